//! Word-size prime fields.
//!
//! Elements are bare canonical residues ([`Fp`]); the modulus lives in a
//! [`PrimeField`] handle that every operation takes explicitly. Containers
//! (polynomials, matrices) carry their field and check it on combination.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};

/// A residue in `[0, p)`. Only meaningful together with its [`PrimeField`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(pub(crate) u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The field F_p for an odd prime `p < 2^63`, with Barrett reduction.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    p: u64,
    k: u32,
    mu: u64,
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeField {}

/// Powers `q^0, ..., q^(s-1)` plus the multiplicative order of `q` when it
/// showed up among them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Powers {
    pub values: Vec<Fp>,
    /// Smallest `k >= 1` with `q^k = 1`, if `k < s`.
    pub unit_order: Option<usize>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 63 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let k = 64 - p.leading_zeros();
        let mu = ((1u128 << (2 * k)) / p as u128) as u64;
        Ok(PrimeField { p, k, mu })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn check(&self, other: &PrimeField) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::ContextMismatch { left: self.p, right: other.p })
        }
    }

    pub fn elem(&self, v: u64) -> Fp {
        Fp(v % self.p)
    }

    pub fn from_i64(&self, v: i64) -> Fp {
        Fp((v as i128).rem_euclid(self.p as i128) as u64)
    }

    pub fn from_bigint(&self, v: &BigInt) -> Fp {
        let r = v % BigInt::from(self.p);
        let r = if r.is_negative() { r + BigInt::from(self.p) } else { r };
        Fp(r.to_u64().expect("residue fits in u64"))
    }

    /// Reduces `a/b`; `None` when `p` divides the denominator.
    pub fn from_rational(&self, v: &BigRational) -> Option<Fp> {
        let den = self.from_bigint(v.denom());
        let inv = self.inv(den).ok()?;
        Some(self.mul(self.from_bigint(v.numer()), inv))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        Fp(rng.random_range(0..self.p))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        Fp(rng.random_range(1..self.p))
    }

    #[inline]
    pub fn add(&self, a: Fp, b: Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fp, b: Fp) -> Fp {
        Fp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Fp, b: Fp) -> Fp {
        Fp(self.reduce(a.0 as u128 * b.0 as u128))
    }

    /// Barrett reduction of `x < p^2`.
    #[inline]
    pub(crate) fn reduce(&self, x: u128) -> u64 {
        let q1 = (x >> (self.k - 1)) as u64;
        let q3 = ((q1 as u128 * self.mu as u128) >> (self.k + 1)) as u64;
        // r < 3p, which can exceed 64 bits when p is close to 2^63.
        let mut r = x - q3 as u128 * self.p as u128;
        while r >= self.p as u128 {
            r -= self.p as u128;
        }
        r as u64
    }

    pub fn pow(&self, a: Fp, mut e: u64) -> Fp {
        let mut base = a;
        let mut acc = Fp::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^e` for exponents beyond 64 bits, such as binomials of large indices.
    pub fn pow_u128(&self, a: Fp, e: u128) -> Fp {
        if e == 0 {
            return Fp::ONE;
        }
        if a.is_zero() {
            return Fp::ZERO;
        }
        self.pow(a, (e % (self.p - 1) as u128) as u64)
    }

    /// `a^e` for signed `e`; negative exponents need `a != 0`.
    pub fn pow_i64(&self, a: Fp, e: i64) -> Result<Fp> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn inv(&self, a: Fp) -> Result<Fp> {
        if a.is_zero() {
            return Err(Error::ZeroInversion);
        }
        let (mut r0, mut r1) = (self.p as i128, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(Fp(t0.rem_euclid(self.p as i128) as u64))
    }

    pub fn div(&self, a: Fp, b: Fp) -> Result<Fp> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `q^0, ..., q^(s-1)`, noting the order of `q` if it is below `s`.
    pub fn batch_powers(&self, q: Fp, s: usize) -> Powers {
        let mut values = Vec::with_capacity(s);
        let mut unit_order = None;
        let mut cur = Fp::ONE;
        for k in 0..s {
            if k > 0 && unit_order.is_none() && cur == Fp::ONE {
                unit_order = Some(k);
            }
            values.push(cur);
            cur = self.mul(cur, q);
        }
        Powers { values, unit_order }
    }

    /// The multiplicative order of `q` if it is at most `bound`.
    pub fn order_at_most(&self, q: Fp, bound: u64) -> Option<u64> {
        let mut cur = q;
        for k in 1..=bound {
            if cur == Fp::ONE {
                return Some(k);
            }
            cur = self.mul(cur, q);
        }
        None
    }

    /// Inverts every element with a single field inversion.
    pub fn batch_inv(&self, xs: &[Fp]) -> Result<Vec<Fp>> {
        let mut prefix = Vec::with_capacity(xs.len());
        let mut acc = Fp::ONE;
        for &x in xs {
            prefix.push(acc);
            acc = self.mul(acc, x);
        }
        let mut inv = self.inv(acc)?;
        let mut out = vec![Fp::ZERO; xs.len()];
        for i in (0..xs.len()).rev() {
            out[i] = self.mul(inv, prefix[i]);
            inv = self.mul(inv, xs[i]);
        }
        Ok(out)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `<= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl Fp {
    /// Signed representative in `(-p/2, p/2]`, handy for printing.
    pub fn centered(self, field: &PrimeField) -> i128 {
        let p = field.modulus();
        if self.0 > p / 2 {
            self.0 as i128 - p as i128
        } else {
            self.0 as i128
        }
    }
}
