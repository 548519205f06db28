//! Curvature tests for q-difference systems `Y(qx) = A(x) Y(x)`.
//!
//! A system with a basis of rational solutions has `C_(p-1)(x) = Id` mod p
//! for almost every prime, where `C_n(x) = A(q^(n-1) x) ... A(qx) A(x)`.
//! The converse is only conjectural, and even the weak test passes for
//! systems without rational solutions: a constant `A = [c]` satisfies
//! `c^(p-1) = 1` at every prime. Reports are evidence, not proofs.

use std::fmt;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{is_prime, primes_up_to, Fp, PrimeField};
use crate::matrix::{isqrt, matrix_q_factorial, PolyMatrix, ScalarMatrix};
use crate::poly::{mul_raw, DensePoly};
use crate::recurrence::{BivariatePoly, Monomial};

/// Attempts at drawing a base point before a prime is skipped.
const MAX_ATTEMPTS: u32 = 16;

/// `num / den`, both polynomials in `q` and `x`. In these entries `dx`
/// counts powers of `q` and `dy` powers of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalEntry {
    pub num: BivariatePoly,
    pub den: BivariatePoly,
}

impl RationalEntry {
    pub fn polynomial(num: BivariatePoly) -> RationalEntry {
        RationalEntry { num, den: BivariatePoly::new(vec![Monomial::int(0, 0, 1)]) }
    }
}

/// The matrix `A(x)` of a system `Y(qx) = A(x) Y(x)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QDifferenceSystem {
    nu: usize,
    entries: Vec<RationalEntry>,
}

impl QDifferenceSystem {
    pub fn new(nu: usize, entries: Vec<RationalEntry>) -> Result<QDifferenceSystem> {
        if nu == 0 || entries.len() != nu * nu {
            return Err(Error::DimensionMismatch { left: nu * nu, right: entries.len() });
        }
        if entries.iter().any(|e| e.den.is_zero()) {
            return Err(Error::ParameterDomain("zero denominator in the system matrix".into()));
        }
        Ok(QDifferenceSystem { nu, entries })
    }

    pub fn identity(nu: usize) -> QDifferenceSystem {
        let entries = (0..nu * nu)
            .map(|k| {
                let c = if k % (nu + 1) == 0 { vec![Monomial::int(0, 0, 1)] } else { vec![] };
                RationalEntry::polynomial(BivariatePoly::new(c))
            })
            .collect();
        QDifferenceSystem { nu, entries }
    }

    /// The companion system of `a_nu(x) y(q^nu x) + ... + a_0(x) y(x) = 0`
    /// acting on `(y(x), y(qx), ..., y(q^(nu-1) x))`.
    pub fn from_scalar_equation(a: Vec<BivariatePoly>) -> Result<QDifferenceSystem> {
        if a.len() < 2 {
            return Err(Error::ArityMismatch(format!("need at least 2 coefficients, got {}", a.len())));
        }
        let nu = a.len() - 1;
        if a[0].is_zero() || a[nu].is_zero() {
            return Err(Error::ParameterDomain("a_0 a_nu must not vanish identically".into()));
        }
        let zero = || RationalEntry::polynomial(BivariatePoly::new(vec![]));
        let mut entries: Vec<RationalEntry> = (0..nu * nu).map(|_| zero()).collect();
        for i in 0..nu - 1 {
            entries[i * nu + i + 1] = RationalEntry::polynomial(BivariatePoly::new(vec![Monomial::int(0, 0, 1)]));
        }
        for j in 0..nu {
            let neg = BivariatePoly::new(a[j].terms().iter().map(|m| Monomial::new(m.dx, m.dy, -m.c.clone())).collect());
            entries[(nu - 1) * nu + j] = RationalEntry { num: neg, den: a[nu].clone() };
        }
        QDifferenceSystem::new(nu, entries)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn entries(&self) -> &[RationalEntry] {
        &self.entries
    }

    /// Distinct denominators, and for each entry the index of its own.
    fn denominators(&self) -> (Vec<&BivariatePoly>, Vec<usize>) {
        let mut uniq: Vec<&BivariatePoly> = Vec::new();
        let idx = self
            .entries
            .iter()
            .map(|e| match uniq.iter().position(|d| **d == e.den) {
                Some(i) => i,
                None => {
                    uniq.push(&e.den);
                    uniq.len() - 1
                }
            })
            .collect();
        (uniq, idx)
    }
}

/// Clears denominators over any coefficient ring: returns `D A` entrywise and
/// `D`, where `D` is the product of the distinct denominators.
fn clear<T: Clone>(
    sys: &QDifferenceSystem,
    lift: &dyn Fn(&BivariatePoly) -> Result<T>,
    mul: &dyn Fn(&T, &T) -> T,
    is_zero: &dyn Fn(&T) -> bool,
    one: T,
) -> Result<(Vec<T>, T)> {
    let (uniq, idx) = sys.denominators();
    let dens = uniq.iter().map(|d| lift(d)).collect::<Result<Vec<_>>>()?;
    if dens.iter().any(is_zero) {
        return Err(Error::BadPrime { p: 0, reason: "a denominator vanishes identically".into() });
    }
    // cofactor[i] = product of all distinct denominators but the i-th.
    let cofactor: Vec<T> =
        (0..dens.len()).map(|i| dens.iter().enumerate().filter(|&(j, _)| j != i).fold(one.clone(), |acc, (_, d)| mul(&acc, d))).collect();
    let total = dens.iter().fold(one, |acc, d| mul(&acc, d));
    let nums = sys.entries.iter().zip(&idx).map(|(e, &i)| Ok(mul(&lift(&e.num)?, &cofactor[i]))).collect::<Result<Vec<_>>>()?;
    Ok((nums, total))
}

fn fix_prime(e: Error, p: u64) -> Error {
    match e {
        Error::BadPrime { reason, .. } => Error::BadPrime { p, reason },
        other => other,
    }
}

/// `C_(p-1)(x_0)` mod p and whether it is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureValue {
    pub matrix: ScalarMatrix,
    pub identity: bool,
}

/// `A(q^(p-2) x_0) ... A(x_0)` mod p through two matrix q-factorials of
/// length `p - 1`: one for the cleared matrix, one for the denominator.
pub fn curvature_mod_p(sys: &QDifferenceSystem, q: &BigRational, f: &PrimeField, x0: Fp) -> Result<CurvatureValue> {
    let p = f.modulus();
    let qp = f.from_rational(q).ok_or_else(|| Error::BadPrime { p, reason: "p divides the denominator of q".into() })?;
    if qp.is_zero() {
        return Err(Error::BadPrime { p, reason: "p divides the numerator of q".into() });
    }
    let (nums, den) = clear(sys, &|b| b.specialize(f, qp), &|a, b| a.mul(b).expect("same field"), &|a| a.is_zero(), DensePoly::one(*f))
        .map_err(|e| fix_prime(e, p))?;
    let len = p - 1;
    let lead = den.scale_arg(x0);
    let den_prod = matrix_q_factorial(&PolyMatrix::new(*f, 1, vec![lead.clone()])?, qp, len)?.get(0, 0);
    if den_prod.is_zero() {
        let mut x = Fp::ONE;
        for k in 0..len {
            if lead.eval(x).is_zero() {
                return Err(Error::PoleHit(k));
            }
            x = f.mul(x, qp);
        }
        unreachable!("a factor of a vanishing product vanishes");
    }
    let m = PolyMatrix::new(*f, sys.nu, nums.iter().map(|e| e.scale_arg(x0)).collect())?;
    let u = matrix_q_factorial(&m, qp, len)?;
    let matrix = u.scale(f.inv(den_prod)?);
    let identity = matrix.is_identity();
    Ok(CurvatureValue { matrix, identity })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Identity,
    NonIdentity,
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeVerdict {
    pub p: u64,
    /// Base point used, when one was found.
    pub x0: Option<u64>,
    pub verdict: Verdict,
}

/// Per-prime results of [`curvature_scan`], sorted by prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureReport {
    pub results: Vec<PrimeVerdict>,
}

impl CurvatureReport {
    fn count(&self, pred: impl Fn(&Verdict) -> bool) -> usize {
        self.results.iter().filter(|r| pred(&r.verdict)).count()
    }

    pub fn identity_count(&self) -> usize {
        self.count(|v| *v == Verdict::Identity)
    }

    pub fn non_identity_count(&self) -> usize {
        self.count(|v| *v == Verdict::NonIdentity)
    }

    pub fn skipped_count(&self) -> usize {
        self.count(|v| matches!(v, Verdict::Skipped(_)))
    }
}

impl fmt::Display for CurvatureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# heuristic: C_(p-1)(x0) = Id mod p is evidence for rational solutions, not a proof")?;
        for r in &self.results {
            let x0 = r.x0.map_or_else(|| "-".to_string(), |x| x.to_string());
            match &r.verdict {
                Verdict::Identity => writeln!(f, "p={} x0={} identity", r.p, x0)?,
                Verdict::NonIdentity => writeln!(f, "p={} x0={} non-identity", r.p, x0)?,
                Verdict::Skipped(why) => writeln!(f, "p={} skipped: {}", r.p, why)?,
            }
        }
        write!(f, "# identity {} non-identity {} skipped {}", self.identity_count(), self.non_identity_count(), self.skipped_count())
    }
}

/// Generator for the `attempt`-th base point at prime `p`.
fn point_rng(seed: u64, p: u64, attempt: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&p.to_le_bytes());
    key[16..20].copy_from_slice(&attempt.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn scan_prime(sys: &QDifferenceSystem, q: &BigRational, p: u64, seed: u64) -> PrimeVerdict {
    let skipped = |why: String| PrimeVerdict { p, x0: None, verdict: Verdict::Skipped(why) };
    let f = match PrimeField::new(p) {
        Ok(f) => f,
        Err(_) => return skipped("only odd primes are supported".into()),
    };
    for attempt in 0..MAX_ATTEMPTS {
        let x0 = f.random_nonzero(&mut point_rng(seed, p, attempt));
        match curvature_mod_p(sys, q, &f, x0) {
            Ok(v) => {
                let verdict = if v.identity { Verdict::Identity } else { Verdict::NonIdentity };
                return PrimeVerdict { p, x0: Some(x0.value()), verdict };
            }
            Err(Error::PoleHit(_)) => continue,
            Err(e) => return skipped(e.to_string()),
        }
    }
    skipped(format!("every one of {MAX_ATTEMPTS} base points hit a pole"))
}

/// Runs [`curvature_mod_p`] at every prime `p <= bound` with base points drawn
/// from a generator keyed by `(seed, p, attempt)`.
pub fn curvature_scan(sys: &QDifferenceSystem, q: &BigRational, bound: u64, seed: u64) -> CurvatureReport {
    let mut results: Vec<PrimeVerdict> = primes_up_to(bound).into_par_iter().map(|p| scan_prime(sys, q, p, seed)).collect();
    results.sort_by_key(|r| r.p);
    CurvatureReport { results }
}

/// `F_p[q] / Phi_n(q)` for prime `n`, where `Phi_n = 1 + q + ... + q^(n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclotomicRing {
    field: PrimeField,
    n: usize,
}

/// Residue of degree `< n - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicElement {
    coeffs: Vec<Fp>,
}

impl CyclotomicElement {
    pub fn coeffs(&self) -> &[Fp] {
        &self.coeffs
    }
}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*q"),
                _ => format!("{c}*q^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl CyclotomicRing {
    pub fn new(field: PrimeField, n: u64) -> Result<CyclotomicRing> {
        if !is_prime(n) {
            return Err(Error::CompositeN(n));
        }
        Ok(CyclotomicRing { field, n: n as usize })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn phi(&self) -> DensePoly {
        DensePoly::new(self.field, vec![Fp::ONE; self.n])
    }

    /// Reduces a residue mod `q^n - 1` (length `n`) further mod `Phi_n`.
    fn from_cyclic(&self, mut c: Vec<Fp>) -> CyclotomicElement {
        let f = &self.field;
        c.resize(self.n, Fp::ZERO);
        let top = c.pop().expect("n >= 2");
        for v in &mut c {
            *v = f.sub(*v, top);
        }
        CyclotomicElement { coeffs: c }
    }

    /// Any polynomial in `q`.
    pub fn reduce(&self, c: &[Fp]) -> CyclotomicElement {
        self.from_cyclic(fold_cyclic(&self.field, c, self.n))
    }

    pub fn zero(&self) -> CyclotomicElement {
        CyclotomicElement { coeffs: vec![Fp::ZERO; self.n - 1] }
    }

    pub fn one(&self) -> CyclotomicElement {
        self.constant(Fp::ONE)
    }

    pub fn constant(&self, c: Fp) -> CyclotomicElement {
        self.reduce(&[c])
    }

    /// The class of `q^k`.
    pub fn q_pow(&self, k: u64) -> CyclotomicElement {
        let mut c = vec![Fp::ZERO; self.n];
        c[(k % self.n as u64) as usize] = Fp::ONE;
        self.from_cyclic(c)
    }

    pub fn add(&self, a: &CyclotomicElement, b: &CyclotomicElement) -> CyclotomicElement {
        let f = &self.field;
        CyclotomicElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f.add(x, y)).collect() }
    }

    pub fn mul(&self, a: &CyclotomicElement, b: &CyclotomicElement) -> CyclotomicElement {
        self.reduce(&mul_raw(&self.field, &a.coeffs, &b.coeffs))
    }

    pub fn inv(&self, a: &CyclotomicElement) -> Option<CyclotomicElement> {
        let inv = DensePoly::new(self.field, a.coeffs.clone()).inv_mod(&self.phi()).ok()??;
        Some(self.reduce(inv.coeffs()))
    }

    pub fn is_zero(&self, a: &CyclotomicElement) -> bool {
        a.coeffs.iter().all(|c| c.is_zero())
    }

    /// `P(q, q^k x_0)` for a polynomial in `q` and `x`.
    fn eval(&self, p: &BivariatePoly, k: u64, x0: Fp) -> Result<CyclotomicElement> {
        let f = &self.field;
        let n = self.n as u64;
        let mut c = vec![Fp::ZERO; self.n];
        for m in p.terms() {
            let v = f
                .from_rational(&m.c)
                .ok_or_else(|| Error::BadPrime { p: f.modulus(), reason: "divides a denominator of the system".into() })?;
            let e = ((m.dx as u64 % n) + (k % n) * (m.dy as u64 % n)) % n;
            let slot = &mut c[e as usize];
            *slot = f.add(*slot, f.mul(v, f.pow(x0, m.dy as u64)));
        }
        Ok(self.from_cyclic(c))
    }
}

fn fold_cyclic(f: &PrimeField, c: &[Fp], n: usize) -> Vec<Fp> {
    let mut out = vec![Fp::ZERO; n];
    for (i, &v) in c.iter().enumerate() {
        out[i % n] = f.add(out[i % n], v);
    }
    out
}

/// `C_n(x_0)` with entries in `F_p[q]/Phi_n` and whether it is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicValue {
    pub nu: usize,
    pub entries: Vec<CyclotomicElement>,
    pub identity: bool,
}

impl CyclotomicValue {
    fn new(ring: &CyclotomicRing, nu: usize, entries: Vec<CyclotomicElement>) -> CyclotomicValue {
        let one = ring.one();
        let zero = ring.zero();
        let identity = entries.iter().enumerate().all(|(k, e)| *e == if k % (nu + 1) == 0 { one.clone() } else { zero.clone() });
        CyclotomicValue { nu, entries, identity }
    }
}

fn ring_matmul(ring: &CyclotomicRing, nu: usize, a: &[CyclotomicElement], b: &[CyclotomicElement]) -> Vec<CyclotomicElement> {
    let mut out = vec![ring.zero(); nu * nu];
    for i in 0..nu {
        for k in 0..nu {
            if ring.is_zero(&a[i * nu + k]) {
                continue;
            }
            for j in 0..nu {
                let t = ring.mul(&a[i * nu + k], &b[k * nu + j]);
                out[i * nu + j] = ring.add(&out[i * nu + j], &t);
            }
        }
    }
    out
}

/// Reference fold: `n` factors, each entry inverted in the ring.
pub fn curvature_cyclotomic_naive(sys: &QDifferenceSystem, n: u64, f: &PrimeField, x0: Fp) -> Result<CyclotomicValue> {
    let ring = CyclotomicRing::new(*f, n)?;
    let nu = sys.nu;
    let mut acc: Vec<CyclotomicElement> = (0..nu * nu).map(|k| if k % (nu + 1) == 0 { ring.one() } else { ring.zero() }).collect();
    for k in 0..n {
        let factor = sys
            .entries
            .iter()
            .map(|e| {
                let den = ring.eval(&e.den, k, x0)?;
                let inv = ring.inv(&den).ok_or(Error::PoleHit(k))?;
                Ok(ring.mul(&ring.eval(&e.num, k, x0)?, &inv))
            })
            .collect::<Result<Vec<_>>>()?;
        acc = ring_matmul(&ring, nu, &factor, &acc);
    }
    Ok(CyclotomicValue::new(&ring, nu, acc))
}

/// Arithmetic in `F_p[q]/(q^n - 1)`, where `q` acts by rotation. `Phi_n`
/// divides `q^n - 1`, so products computed here reduce to the right value.
struct Cyclic {
    f: PrimeField,
    n: usize,
}

/// Polynomial in `y` with coefficients in the cyclic ring, each of length `n`.
type CycPoly = Vec<Vec<Fp>>;

impl Cyclic {
    fn mul(&self, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
        fold_cyclic(&self.f, &mul_raw(&self.f, a, b), self.n)
    }

    fn add_into(&self, acc: &mut [Fp], b: &[Fp]) {
        for (x, &y) in acc.iter_mut().zip(b) {
            *x = self.f.add(*x, y);
        }
    }

    /// `q^t a`.
    fn rot(&self, a: &[Fp], t: u64) -> Vec<Fp> {
        let t = (t % self.n as u64) as usize;
        let mut out = vec![Fp::ZERO; self.n];
        for (i, &v) in a.iter().enumerate() {
            out[(i + t) % self.n] = v;
        }
        out
    }

    /// Product in `R[y]` by Kronecker substitution: coefficient `j` sits at
    /// offset `j (2n - 1)`, which leaves room for each ring product.
    fn poly_mul(&self, a: &CycPoly, b: &CycPoly) -> CycPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let w = 2 * self.n - 1;
        let pack = |p: &CycPoly| {
            let mut v = vec![Fp::ZERO; p.len() * w];
            for (j, c) in p.iter().enumerate() {
                v[j * w..j * w + self.n].copy_from_slice(c);
            }
            v
        };
        let mut prod = mul_raw(&self.f, &pack(a), &pack(b));
        let len = a.len() + b.len() - 1;
        prod.resize(len * w, Fp::ZERO);
        prod.chunks(w).map(|c| fold_cyclic(&self.f, c, self.n)).collect()
    }

    fn poly_add(&self, a: &CycPoly, b: &CycPoly) -> CycPoly {
        let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let mut out = long.clone();
        for (x, y) in out.iter_mut().zip(short) {
            self.add_into(x, y);
        }
        out
    }

    /// `P(q^t y)`.
    fn scale_arg(&self, p: &CycPoly, t: u64) -> CycPoly {
        p.iter().enumerate().map(|(j, c)| self.rot(c, t * j as u64 % self.n as u64)).collect()
    }

    /// `P(q^k)`.
    fn eval(&self, p: &CycPoly, k: u64) -> Vec<Fp> {
        let mut acc = vec![Fp::ZERO; self.n];
        for (j, c) in p.iter().enumerate() {
            self.add_into(&mut acc, &self.rot(c, k % self.n as u64 * j as u64));
        }
        acc
    }

    /// `[P(1), P(q^s), ..., P(q^(s(m-1)))]` through the chirp identity
    /// `ij = C(i+j,2) - C(i,2) - C(j,2)`; every power of `q^s` is a rotation.
    fn chirp(&self, p: &CycPoly, s: u64, m: usize) -> Vec<Vec<Fp>> {
        if p.is_empty() {
            return vec![vec![Fp::ZERO; self.n]; m];
        }
        let n = self.n as u64;
        let tri = |l: u64| (l * l.saturating_sub(1) / 2) % n * (s % n) % n;
        let d = p.len() - 1;
        let a: CycPoly = (0..=d).map(|j| self.rot(&p[d - j], n - tri((d - j) as u64))).collect();
        let kernel: CycPoly = (0..d + m).map(|l| self.rot(&self.unit(), tri(l as u64))).collect();
        let conv = self.poly_mul(&a, &kernel);
        (0..m).map(|i| self.rot(&conv[d + i], n - tri(i as u64))).collect()
    }

    fn unit(&self) -> Vec<Fp> {
        let mut u = vec![Fp::ZERO; self.n];
        u[0] = Fp::ONE;
        u
    }

    fn mat_mul(&self, dim: usize, a: &[CycPoly], b: &[CycPoly]) -> Vec<CycPoly> {
        let mut out = vec![Vec::new(); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                if a[i * dim + k].is_empty() {
                    continue;
                }
                for j in 0..dim {
                    if b[k * dim + j].is_empty() {
                        continue;
                    }
                    let t = self.poly_mul(&a[i * dim + k], &b[k * dim + j]);
                    out[i * dim + j] = self.poly_add(&out[i * dim + j], &t);
                }
            }
        }
        out
    }

    fn scalar_mat_mul(&self, dim: usize, a: &[Vec<Fp>], b: &[Vec<Fp>]) -> Vec<Vec<Fp>> {
        let mut out = vec![vec![Fp::ZERO; self.n]; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                for j in 0..dim {
                    let t = self.mul(&a[i * dim + k], &b[k * dim + j]);
                    self.add_into(&mut out[i * dim + j], &t);
                }
            }
        }
        out
    }

    /// `M(q^(s-1) y) ... M(y)` by doubling.
    fn baby_steps(&self, dim: usize, m: &[CycPoly], s: u64) -> Vec<CycPoly> {
        let top = 63 - s.leading_zeros();
        let mut cur = m.to_vec();
        let mut t = 1u64;
        for bit in (0..top).rev() {
            let shifted: Vec<CycPoly> = cur.iter().map(|e| self.scale_arg(e, t)).collect();
            cur = self.mat_mul(dim, &shifted, &cur);
            t *= 2;
            if (s >> bit) & 1 == 1 {
                let next: Vec<CycPoly> = m.iter().map(|e| self.scale_arg(e, t)).collect();
                cur = self.mat_mul(dim, &next, &cur);
                t += 1;
            }
        }
        cur
    }
}

/// `C_n(x_0)` over `F_p[q]/Phi_n` by baby steps and giant steps: the cleared
/// matrix and its denominator share one block-diagonal product of length `n`,
/// computed in `F_p[q]/(q^n - 1)` and reduced at the end.
pub fn curvature_cyclotomic(sys: &QDifferenceSystem, n: u64, f: &PrimeField, x0: Fp) -> Result<CyclotomicValue> {
    let ring = CyclotomicRing::new(*f, n)?;
    let cyc = Cyclic { f: *f, n: ring.n };
    let nu = sys.nu;
    let p = f.modulus();
    let lift = |b: &BivariatePoly| -> Result<CycPoly> {
        if b.is_zero() {
            return Ok(Vec::new());
        }
        let mut out = vec![vec![Fp::ZERO; ring.n]; b.y_degree().unwrap_or(0) as usize + 1];
        for m in b.terms() {
            let v = f.from_rational(&m.c).ok_or_else(|| Error::BadPrime { p, reason: "divides a denominator of the system".into() })?;
            // x^dy becomes (x_0 y)^dy.
            let v = f.mul(v, f.pow(x0, m.dy as u64));
            let slot = &mut out[m.dy as usize][(m.dx as u64 % n) as usize];
            *slot = f.add(*slot, v);
        }
        Ok(out)
    };
    let (nums, den) =
        clear(sys, &lift, &|a, b| cyc.poly_mul(a, b), &|a: &CycPoly| a.iter().all(|c| c.iter().all(|v| v.is_zero())), vec![cyc.unit()])
            .map_err(|e| fix_prime(e, p))?;
    let dim = nu + 1;
    let mut block: Vec<CycPoly> = vec![Vec::new(); dim * dim];
    for i in 0..nu {
        for j in 0..nu {
            block[i * dim + j] = nums[i * nu + j].clone();
        }
    }
    block[nu * dim + nu] = den.clone();
    let deg = block.iter().map(|e| e.len().saturating_sub(1)).max().unwrap_or(0).max(1) as u64;
    let s = isqrt(n / deg);

    let mut acc: Vec<Vec<Fp>> = (0..dim * dim).map(|k| if k % (dim + 1) == 0 { cyc.unit() } else { vec![Fp::ZERO; ring.n] }).collect();
    let mut k = 0u64;
    if s >= 2 {
        let ps = cyc.baby_steps(dim, &block, s);
        let m = (n / s) as usize;
        let vals: Vec<Vec<Vec<Fp>>> = ps.iter().map(|e| cyc.chirp(e, s, m)).collect();
        for i in 0..m {
            let step: Vec<Vec<Fp>> = vals.iter().map(|v| v[i].clone()).collect();
            acc = cyc.scalar_mat_mul(dim, &step, &acc);
        }
        k = m as u64 * s;
    }
    while k < n {
        let step: Vec<Vec<Fp>> = block.iter().map(|e| cyc.eval(e, k)).collect();
        acc = cyc.scalar_mat_mul(dim, &step, &acc);
        k += 1;
    }

    let den_prod = ring.from_cyclic(acc[nu * dim + nu].clone());
    let Some(inv) = ring.inv(&den_prod) else {
        for k in 0..n {
            let d = ring.from_cyclic(cyc.eval(&den, k));
            if ring.inv(&d).is_none() {
                return Err(Error::PoleHit(k));
            }
        }
        unreachable!("a non-unit product has a non-unit factor");
    };
    let entries = (0..nu)
        .flat_map(|i| (0..nu).map(move |j| (i, j)))
        .map(|(i, j)| ring.mul(&ring.from_cyclic(acc[i * dim + j].clone()), &inv))
        .collect();
    Ok(CyclotomicValue::new(&ring, nu, entries))
}
