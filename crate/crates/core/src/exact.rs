//! Exact terms over Q by binary splitting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bigmul;
use crate::error::{Error, Result};
use crate::recurrence::QRecurrence;

/// Ranges at least this long split their halves across threads.
const PAR_SPAN: u64 = 64;

/// `a_N ... a_1` where `a_(i+1) = factor(i)`, always as upper half times
/// lower half. Factors are produced on demand inside the recursion.
pub fn binary_split_product<T, G, M>(count: u64, factor: &G, mul: &M, one: T) -> T
where
    T: Send,
    G: Fn(u64) -> T + Sync,
    M: Fn(&T, &T) -> T + Sync,
{
    if count == 0 {
        return one;
    }
    split(0, count, factor, mul)
}

fn split<T, G, M>(lo: u64, hi: u64, factor: &G, mul: &M) -> T
where
    T: Send,
    G: Fn(u64) -> T + Sync,
    M: Fn(&T, &T) -> T + Sync,
{
    if hi - lo == 1 {
        return factor(lo);
    }
    let mid = lo + (hi - lo) / 2;
    let (upper, lower) = if hi - lo >= PAR_SPAN {
        rayon::join(|| split(mid, hi, factor, mul), || split(lo, mid, factor, mul))
    } else {
        (split(mid, hi, factor, mul), split(lo, mid, factor, mul))
    };
    mul(&upper, &lower)
}

/// Square matrix over Q, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(n: usize, entries: Vec<BigRational>) -> Result<RationalMatrix> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { left: n * n, right: entries.len() });
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        RationalMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        let n = self.n;
        let mut out = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        Ok(RationalMatrix { n, entries: out })
    }
}

/// Integer matrix paired with a scalar, multiplied componentwise.
#[derive(Clone, Debug)]
struct Cleared {
    n: usize,
    m: Vec<BigInt>,
    lead: BigInt,
}

impl Cleared {
    fn mul(&self, other: &Cleared) -> Cleared {
        let n = self.n;
        let mut m = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.m[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.m[k * n + j];
                    if !b.is_zero() {
                        m[i * n + j] += bigmul::mul(a, b);
                    }
                }
            }
        }
        Cleared { n, m, lead: bigmul::mul(&self.lead, &other.lead) }
    }
}

/// Coefficients of the recurrence with `x = q` substituted and a common
/// integer scale, as polynomials in `y`.
struct IntegerForm {
    /// `polys[j][e]` multiplies `y^e` in `c_j`.
    polys: Vec<Vec<BigInt>>,
    a: BigInt,
    b: BigInt,
    d: usize,
}

impl IntegerForm {
    fn new(rec: &QRecurrence, q: &BigRational) -> IntegerForm {
        let d = rec.y_degree();
        let mut gammas = vec![vec![BigRational::zero(); d + 1]; rec.order() + 1];
        for (j, c) in rec.coeffs().iter().enumerate() {
            for t in c.terms() {
                gammas[j][t.dy as usize] += &t.c * pow_rational(q, t.dx);
            }
        }
        let scale = gammas.iter().flatten().fold(BigInt::one(), |acc, g| acc.lcm(g.denom()));
        let polys =
            gammas.iter().map(|row| row.iter().map(|g| (g * BigRational::from_integer(scale.clone())).to_integer()).collect()).collect();
        IntegerForm { polys, a: q.numer().clone(), b: q.denom().clone(), d }
    }

    /// `c_j(q, q^k) * scale * b^(k d)` for every `j`, all integers.
    fn at(&self, k: u64) -> Vec<BigInt> {
        let k = u32::try_from(k).expect("index fits in u32");
        let ak = num_traits::pow::Pow::pow(&self.a, k);
        let bk = num_traits::pow::Pow::pow(&self.b, k);
        let mut apow = Vec::with_capacity(self.d + 1);
        let mut bpow = Vec::with_capacity(self.d + 1);
        apow.push(BigInt::one());
        bpow.push(BigInt::one());
        for e in 1..=self.d {
            apow.push(bigmul::mul(&apow[e - 1], &ak));
            bpow.push(bigmul::mul(&bpow[e - 1], &bk));
        }
        self.polys
            .iter()
            .map(|row| {
                row.iter().enumerate().fold(BigInt::zero(), |acc, (e, g)| {
                    if g.is_zero() {
                        acc
                    } else {
                        acc + g * bigmul::mul(&apow[e], &bpow[self.d - e])
                    }
                })
            })
            .collect()
    }

    fn companion(&self, k: u64) -> Cleared {
        let c = self.at(k);
        let r = c.len() - 1;
        let mut m = vec![BigInt::zero(); r * r];
        for j in 0..r {
            m[j] = -&c[r - 1 - j];
        }
        for i in 1..r {
            m[i * r + i - 1] = c[r].clone();
        }
        Cleared { n: r, m, lead: c[r].clone() }
    }
}

fn pow_rational(q: &BigRational, e: u32) -> BigRational {
    num_traits::pow::Pow::pow(q, e)
}

/// Exact `u_N(q)` for rational `q`: the companion factors are scaled to
/// integer matrices, multiplied by binary splitting together with the
/// product of leading coefficients, and divided once at the end.
pub fn exact_nth_term(rec: &QRecurrence, q: &BigRational, n: u64) -> Result<BigRational> {
    let r = rec.order();
    if n < r as u64 {
        return Ok(rec.initials()[n as usize].clone());
    }
    let len = n - r as u64 + 1;
    let form = IntegerForm::new(rec, q);
    let one = Cleared { n: r, m: identity_int(r), lead: BigInt::one() };
    let prod = binary_split_product(len, &|k| form.companion(k), &|a: &Cleared, b: &Cleared| a.mul(b), one);
    if prod.lead.is_zero() {
        let k = (0..len).find(|&k| form.at(k)[r].is_zero()).expect("a factor vanishes");
        return Err(Error::SingularLeading(k));
    }
    let scale = rec.initials().iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let w: Vec<BigInt> = rec.initials().iter().rev().map(|v| (v * BigRational::from_integer(scale.clone())).to_integer()).collect();
    let top = (0..r).fold(BigInt::zero(), |acc, j| acc + bigmul::mul(&prod.m[j], &w[j]));
    Ok(normalize(top, bigmul::mul(&prod.lead, &scale)))
}

/// `num / den` in lowest terms. The gcd runs on `num mod den`, which is no
/// larger than the denominator; the numerator is often far longer.
fn normalize(num: BigInt, den: BigInt) -> BigRational {
    let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
    if den.is_one() {
        return BigRational::from_integer(num);
    }
    let g = num.mod_floor(&den).gcd(&den);
    if g.is_one() {
        BigRational::new_raw(num, den)
    } else {
        BigRational::new_raw(num / &g, den / g)
    }
}

fn identity_int(n: usize) -> Vec<BigInt> {
    let mut m = vec![BigInt::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = BigInt::one();
    }
    m
}
