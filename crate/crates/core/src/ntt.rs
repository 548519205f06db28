//! Number-theoretic transforms over three fixed 62-bit primes.
//!
//! Products modulo an arbitrary word-size prime are computed exactly over
//! the integers (by CRT across as many NTT primes as the coefficient bound
//! needs) and then reduced. The same machinery multiplies big integers.

use std::sync::{Arc, OnceLock, RwLock};

use crate::field::{Fp, PrimeField};

/// `c * 2^k + 1` primes below 2^62 with primitive roots 3, 7, 10.
pub(crate) const MODULI: [u64; 3] = [4179340454199820289, 4512606826625236993, 4546383823830515713];
const GENERATORS: [u64; 3] = [3, 7, 10];
const TWO_ADICITY: [u32; 3] = [57, 53, 51];

#[derive(Clone, Copy, Debug)]
struct Mont {
    m: u64,
    /// `m^-1 mod 2^64`.
    minv: u64,
    r2: u64,
}

impl Mont {
    const fn new(m: u64) -> Mont {
        let mut inv = 1u64;
        let mut i = 0;
        while i < 6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
            i += 1;
        }
        let r = ((1u128 << 64) % m as u128) as u64;
        let r2 = (r as u128 * r as u128 % m as u128) as u64;
        Mont { m, minv: inv, r2 }
    }

    #[inline(always)]
    fn redc(self, t: u128) -> u64 {
        let q = (t as u64).wrapping_mul(self.minv);
        let s = ((q as u128 * self.m as u128) >> 64) as u64;
        let hi = (t >> 64) as u64;
        if hi >= s {
            hi - s
        } else {
            hi.wrapping_sub(s).wrapping_add(self.m)
        }
    }

    /// Montgomery product left in `(0, 2m)`; needs `a * b < m * 2^64`.
    #[inline(always)]
    fn mul_lazy(self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let q = (t as u64).wrapping_mul(self.minv);
        let s = ((q as u128 * self.m as u128) >> 64) as u64;
        ((t >> 64) as u64).wrapping_add(self.m).wrapping_sub(s)
    }

    #[inline(always)]
    fn mul(self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline(always)]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    fn to_mont(self, a: u64) -> u64 {
        self.mul(a % self.m, self.r2)
    }

    fn pow(self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a plain residue, returned in Montgomery form.
    fn inv_mont(self, a: u64) -> u64 {
        self.pow(self.to_mont(a), self.m - 2)
    }
}

const MONTS: [Mont; 3] = [Mont::new(MODULI[0]), Mont::new(MODULI[1]), Mont::new(MODULI[2])];

/// Per-level root tables: entry `h + j` holds `w_{2h}^j` for `j < h`, so one
/// table of size `L` serves every transform length up to `L`.
struct RootTable {
    fwd: Vec<u64>,
    inv: Vec<u64>,
}

impl RootTable {
    fn build(idx: usize, len: usize) -> RootTable {
        let mt = MONTS[idx];
        let g = mt.to_mont(GENERATORS[idx]);
        let mut fwd = vec![0u64; len.max(2)];
        let mut inv = vec![0u64; len.max(2)];
        let mut h = 1;
        while h < len {
            let w = mt.pow(g, (mt.m - 1) / (2 * h as u64));
            let wi = mt.pow(w, mt.m - 2);
            let (mut a, mut b) = (mt.to_mont(1), mt.to_mont(1));
            for j in 0..h {
                fwd[h + j] = a;
                inv[h + j] = b;
                a = mt.mul(a, w);
                b = mt.mul(b, wi);
            }
            h *= 2;
        }
        RootTable { fwd, inv }
    }
}

fn root_table(idx: usize, len: usize) -> Arc<RootTable> {
    static TABLES: [OnceLock<RwLock<Arc<RootTable>>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let cell = TABLES[idx].get_or_init(|| RwLock::new(Arc::new(RootTable::build(idx, 1 << 12))));
    {
        let t = cell.read().unwrap();
        if t.fwd.len() >= len {
            return Arc::clone(&t);
        }
    }
    let mut t = cell.write().unwrap();
    if t.fwd.len() < len {
        *t = Arc::new(RootTable::build(idx, len));
    }
    Arc::clone(&t)
}

/// Transform data, one vector per NTT prime, in Montgomery form and
/// bit-reversed order.
#[derive(Clone, Debug)]
pub(crate) struct Spectrum(Vec<Vec<u64>>);

/// A transform length together with the number of CRT primes in use.
pub(crate) struct Ntt {
    len: usize,
    tables: Vec<Arc<RootTable>>,
}

impl Ntt {
    pub(crate) fn new(min_len: usize, primes: usize) -> Ntt {
        assert!((1..=3).contains(&primes));
        let len = min_len.max(2).next_power_of_two();
        assert!(len.trailing_zeros() <= TWO_ADICITY[2], "transform length too large");
        let tables = (0..primes).map(|i| root_table(i, len)).collect();
        Ntt { len, tables }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    fn primes(&self) -> usize {
        self.tables.len()
    }

    // Butterflies keep values in [0, 2m) and reduce fully only at the end.
    fn forward(&self, idx: usize, a: &mut [u64]) {
        let mt = MONTS[idx];
        let m2 = 2 * mt.m;
        let w = &self.tables[idx].fwd;
        let mut h = self.len / 2;
        while h >= 1 {
            let tw = &w[h..2 * h];
            for chunk in a.chunks_exact_mut(2 * h) {
                let (lo, hi) = chunk.split_at_mut(h);
                for ((x, y), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let (u, v) = (*x, *y);
                    let s = u + v;
                    *x = if s >= m2 { s - m2 } else { s };
                    *y = mt.mul_lazy(u + m2 - v, t);
                }
            }
            h /= 2;
        }
        for x in a.iter_mut() {
            if *x >= mt.m {
                *x -= mt.m;
            }
        }
    }

    fn inverse(&self, idx: usize, a: &mut [u64]) {
        let mt = MONTS[idx];
        let m2 = 2 * mt.m;
        let w = &self.tables[idx].inv;
        let mut h = 1;
        while h < self.len {
            let tw = &w[h..2 * h];
            for chunk in a.chunks_exact_mut(2 * h) {
                let (lo, hi) = chunk.split_at_mut(h);
                for ((x, y), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let u = *x;
                    let v = mt.mul_lazy(*y, t);
                    let s = u + v;
                    *x = if s >= m2 { s - m2 } else { s };
                    let d = u + m2 - v;
                    *y = if d >= m2 { d - m2 } else { d };
                }
            }
            h *= 2;
        }
        // Multiplying a Montgomery value by the plain 1/len leaves plain output.
        let scale = mt.pow(mt.to_mont(self.len as u64), mt.m - 2);
        let scale = mt.redc(scale as u128);
        for x in a.iter_mut() {
            *x = mt.mul(*x, scale);
        }
    }

    pub(crate) fn forward_words(&self, a: &[u64]) -> Spectrum {
        assert!(a.len() <= self.len);
        let mut out = Vec::with_capacity(self.primes());
        for idx in 0..self.primes() {
            let mt = MONTS[idx];
            let mut v = vec![0u64; self.len];
            for (d, &x) in v.iter_mut().zip(a) {
                *d = mt.to_mont(x);
            }
            self.forward(idx, &mut v);
            out.push(v);
        }
        Spectrum(out)
    }

    pub(crate) fn forward_residues(&self, a: &[Fp]) -> Spectrum {
        assert!(a.len() <= self.len);
        let mut out = Vec::with_capacity(self.primes());
        for idx in 0..self.primes() {
            let mt = MONTS[idx];
            let mut v = vec![0u64; self.len];
            for (d, x) in v.iter_mut().zip(a) {
                *d = mt.to_mont(x.value());
            }
            self.forward(idx, &mut v);
            out.push(v);
        }
        Spectrum(out)
    }

    pub(crate) fn pointwise(&self, a: &Spectrum, b: &Spectrum) -> Spectrum {
        let mut out = Vec::with_capacity(self.primes());
        for idx in 0..self.primes() {
            let mt = MONTS[idx];
            out.push(a.0[idx].iter().zip(&b.0[idx]).map(|(&x, &y)| mt.mul(x, y)).collect());
        }
        Spectrum(out)
    }

    /// `acc += a * b` pointwise; sums of products stay exact as long as the
    /// caller sized the prime count for the total number of terms.
    pub(crate) fn mul_acc(&self, acc: &mut Spectrum, a: &Spectrum, b: &Spectrum) {
        for idx in 0..self.primes() {
            let mt = MONTS[idx];
            for ((d, &x), &y) in acc.0[idx].iter_mut().zip(&a.0[idx]).zip(&b.0[idx]) {
                *d = mt.add(*d, mt.mul(x, y));
            }
        }
    }

    fn inverse_all(&self, mut s: Spectrum) -> Vec<Vec<u64>> {
        for idx in 0..self.primes() {
            self.inverse(idx, &mut s.0[idx]);
        }
        s.0
    }

    /// Inverse transform followed by CRT reconstruction reduced mod `p`.
    pub(crate) fn inverse_residues(&self, s: Spectrum, field: &PrimeField, out_len: usize) -> Vec<Fp> {
        let r = self.inverse_all(s);
        let out_len = out_len.min(self.len);
        let p = field.modulus();
        match r.len() {
            1 => r[0][..out_len].iter().map(|&x| field.elem(x)).collect(),
            2 => {
                let c = Crt::get();
                let m0p = field.elem(MODULI[0]);
                (0..out_len)
                    .map(|i| {
                        let t1 = c.t1(r[0][i], r[1][i]);
                        field.add(field.elem(r[0][i]), field.mul(m0p, Fp(t1 % p)))
                    })
                    .collect()
            }
            _ => {
                let c = Crt::get();
                let m0p = field.elem(MODULI[0]);
                let m01p = field.mul(m0p, field.elem(MODULI[1]));
                (0..out_len)
                    .map(|i| {
                        let (t1, t2) = c.t12(r[0][i], r[1][i], r[2][i]);
                        let acc = field.add(field.elem(r[0][i]), field.mul(m0p, Fp(t1 % p)));
                        field.add(acc, field.mul(m01p, Fp(t2 % p)))
                    })
                    .collect()
            }
        }
    }

    /// Inverse transform, exact CRT to 192-bit coefficients and carry
    /// propagation into base-2^64 words.
    fn inverse_carry(&self, s: Spectrum, out_len: usize) -> Vec<u64> {
        assert_eq!(self.primes(), 3);
        let r = self.inverse_all(s);
        let c = Crt::get();
        let mut out = vec![0u64; out_len];
        // Running carry as a 192-bit number (c0, c1, c2).
        let (mut c0, mut c1, mut c2) = (0u64, 0u64, 0u64);
        for (i, slot) in out.iter_mut().enumerate() {
            let (x0, x1, x2) = if i < self.len {
                let (t1, t2) = c.t12(r[0][i], r[1][i], r[2][i]);
                c.combine(r[0][i], t1, t2)
            } else {
                (0, 0, 0)
            };
            let (s0, k0) = c0.overflowing_add(x0);
            let (s1, k1a) = c1.overflowing_add(x1);
            let (s1, k1b) = s1.overflowing_add(k0 as u64);
            let s2 = c2 + x2 + k1a as u64 + k1b as u64;
            *slot = s0;
            (c0, c1, c2) = (s1, s2, 0);
        }
        debug_assert!(c0 == 0 && c1 == 0 && c2 == 0);
        out
    }
}

/// Garner constants for the three moduli.
struct Crt {
    inv01: u64,
    inv02: u64,
    inv12: u64,
    m01_lo: u64,
    m01_hi: u64,
}

impl Crt {
    fn get() -> &'static Crt {
        static C: OnceLock<Crt> = OnceLock::new();
        C.get_or_init(|| {
            let m01 = MODULI[0] as u128 * MODULI[1] as u128;
            Crt {
                inv01: MONTS[1].inv_mont(MODULI[0]),
                inv02: MONTS[2].inv_mont(MODULI[0]),
                inv12: MONTS[2].inv_mont(MODULI[1]),
                m01_lo: m01 as u64,
                m01_hi: (m01 >> 64) as u64,
            }
        })
    }

    #[inline]
    fn t1(&self, r0: u64, r1: u64) -> u64 {
        let m1 = MONTS[1];
        m1.mul(m1.sub(r1, r0 % m1.m), self.inv01)
    }

    #[inline]
    fn t12(&self, r0: u64, r1: u64, r2: u64) -> (u64, u64) {
        let t1 = self.t1(r0, r1);
        let m2 = MONTS[2];
        let u = m2.mul(m2.sub(r2, r0 % m2.m), self.inv02);
        let t2 = m2.mul(m2.sub(u, t1 % m2.m), self.inv12);
        (t1, t2)
    }

    /// `r0 + t1 m0 + t2 m0 m1` as three words.
    #[inline]
    fn combine(&self, r0: u64, t1: u64, t2: u64) -> (u64, u64, u64) {
        let a = t1 as u128 * MODULI[0] as u128 + r0 as u128;
        let lo = t2 as u128 * self.m01_lo as u128;
        let hi = t2 as u128 * self.m01_hi as u128;
        let w0 = lo as u64;
        let mid = (lo >> 64) + (hi as u64) as u128;
        let w1 = mid as u64;
        let w2 = ((hi >> 64) + (mid >> 64)) as u64;
        let (s0, k0) = w0.overflowing_add(a as u64);
        let s1 = w1 as u128 + (a >> 64) + k0 as u128;
        (s0, s1 as u64, w2 + (s1 >> 64) as u64)
    }
}

/// Number of NTT primes whose product exceeds `terms * (p-1)^2`.
pub(crate) fn primes_for(terms: usize, p: u64) -> usize {
    let sq = (p as u128 - 1) * (p as u128 - 1);
    match sq.checked_mul(terms as u128) {
        Some(b) if b < MODULI[0] as u128 => 1,
        Some(b) if b < MODULI[0] as u128 * MODULI[1] as u128 => 2,
        _ => 3,
    }
}

const SCHOOLBOOK: usize = 32;

pub(crate) fn schoolbook(field: &PrimeField, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let mut out = vec![Fp::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    out
}

/// Full product of two coefficient vectors over F_p.
pub(crate) fn mul_residues(field: &PrimeField, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= SCHOOLBOOK {
        return schoolbook(field, a, b);
    }
    let out_len = a.len() + b.len() - 1;
    let ntt = Ntt::new(out_len, primes_for(a.len().min(b.len()), field.modulus()));
    let fa = ntt.forward_residues(a);
    let fb = ntt.forward_residues(b);
    ntt.inverse_residues(ntt.pointwise(&fa, &fb), field, out_len)
}

/// Product of two little-endian word vectors.
pub(crate) fn mul_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len();
    let ntt = Ntt::new(out_len - 1, 3);
    let fa = ntt.forward_words(a);
    let fb = if std::ptr::eq(a, b) { fa.clone() } else { ntt.forward_words(b) };
    ntt.inverse_carry(ntt.pointwise(&fa, &fb), out_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    #[test]
    fn moduli_are_prime_with_expected_two_adicity() {
        for i in 0..3 {
            assert!(crate::field::is_prime(MODULI[i]));
            assert_eq!((MODULI[i] - 1).trailing_zeros(), TWO_ADICITY[i]);
            assert!(MODULI[i] < 1 << 62);
            // The generator is a non-residue, so its 2-power part has full order.
            let mt = MONTS[i];
            let g = mt.to_mont(GENERATORS[i]);
            let half = mt.pow(g, (MODULI[i] - 1) / 2);
            assert_eq!(mt.redc(half as u128), MODULI[i] - 1);
        }
    }

    #[test]
    fn prime_count_follows_bound() {
        assert_eq!(primes_for(1, 3), 1);
        assert_eq!(primes_for(1000, 1_073_741_827), 2);
        assert_eq!(primes_for(1 << 20, (1 << 61) - 1), 3);
        assert_eq!(primes_for(2, 1 << 30), 1);
        assert_eq!(primes_for(8, 1 << 30), 2);
    }

    fn residues(p: u64, v: Vec<u64>) -> (PrimeField, Vec<Fp>) {
        let f = PrimeField::new(p).unwrap();
        let xs = v.into_iter().map(|x| f.elem(x)).collect();
        (f, xs)
    }

    proptest! {
        #[test]
        fn transform_product_equals_schoolbook(
            p in prop::sample::select(vec![3u64, 998_244_353, 1_073_741_827, (1 << 61) - 1, 9_223_372_036_854_775_783]),
            a in prop::collection::vec(any::<u64>(), 33..300),
            b in prop::collection::vec(any::<u64>(), 33..300),
        ) {
            let (f, xa) = residues(p, a);
            let (_, xb) = residues(p, b);
            prop_assert_eq!(mul_residues(&f, &xa, &xb), schoolbook(&f, &xa, &xb));
        }

        #[test]
        fn word_product_equals_biguint(
            a in prop::collection::vec(any::<u64>(), 1..200),
            b in prop::collection::vec(any::<u64>(), 1..200),
        ) {
            let to_big = |w: &[u64]| {
                let mut digits = Vec::new();
                for &x in w {
                    digits.push(x as u32);
                    digits.push((x >> 32) as u32);
                }
                BigUint::new(digits)
            };
            let got = to_big(&mul_words(&a, &b));
            prop_assert_eq!(got, to_big(&a) * to_big(&b));
        }
    }

    #[test]
    fn word_product_all_ones_worst_case() {
        let a = vec![u64::MAX; 4096];
        let got = mul_words(&a, &a);
        // (2^m - 1)^2 = 2^2m - 2^(m+1) + 1
        let mut want = vec![0u64; 8192];
        want[0] = 1;
        for w in want.iter_mut().take(8192).skip(4096) {
            *w = u64::MAX;
        }
        want[4096] = u64::MAX - 1;
        assert_eq!(got, want);
    }
}
