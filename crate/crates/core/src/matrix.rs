//! Square matrices of scalars and of polynomials over F_p, and products of
//! polynomial matrices along geometric progressions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::geom::ChirpPlan;
use crate::ntt::{self, Ntt};
use crate::poly::DensePoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    field: PrimeField,
    n: usize,
    entries: Vec<Fp>,
}

impl ScalarMatrix {
    /// Row-major entries; `entries.len()` must be `n * n`.
    pub fn new(field: PrimeField, n: usize, entries: Vec<Fp>) -> Result<ScalarMatrix> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { left: n * n, right: entries.len() });
        }
        Ok(ScalarMatrix { field, n, entries })
    }

    pub fn identity(field: PrimeField, n: usize) -> ScalarMatrix {
        let mut entries = vec![Fp::ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = Fp::ONE;
        }
        ScalarMatrix { field, n, entries }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Fp {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Fp] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        *self == ScalarMatrix::identity(self.field, self.n)
    }

    pub fn mul(&self, other: &ScalarMatrix) -> Result<ScalarMatrix> {
        self.field.check(&other.field)?;
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &ScalarMatrix) -> ScalarMatrix {
        let (f, n) = (&self.field, self.n);
        let mut entries = vec![Fp::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let e = &mut entries[i * n + j];
                    *e = f.add(*e, f.mul(a, other.entries[k * n + j]));
                }
            }
        }
        ScalarMatrix { field: self.field, n, entries }
    }

    pub fn pow(&self, mut e: u64) -> ScalarMatrix {
        let mut base = self.clone();
        let mut acc = ScalarMatrix::identity(self.field, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Fp]) -> Result<Vec<Fp>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: v.len() });
        }
        let f = &self.field;
        Ok((0..self.n).map(|i| (0..self.n).fold(Fp::ZERO, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j])))).collect())
    }

    pub fn scale(&self, c: Fp) -> ScalarMatrix {
        let f = self.field;
        ScalarMatrix { field: f, n: self.n, entries: self.entries.iter().map(|&x| f.mul(x, c)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    field: PrimeField,
    n: usize,
    entries: Vec<DensePoly>,
}

/// Below this operand length matrix products multiply entries directly.
const SPECTRAL_MIN_LEN: usize = 32;
/// Transform length above which entries are processed in parallel.
const PARALLEL_LEN: usize = 1 << 13;

impl PolyMatrix {
    pub fn new(field: PrimeField, n: usize, entries: Vec<DensePoly>) -> Result<PolyMatrix> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { left: n * n, right: entries.len() });
        }
        for e in &entries {
            field.check(e.field())?;
        }
        Ok(PolyMatrix { field, n, entries })
    }

    pub fn identity(field: PrimeField, n: usize) -> PolyMatrix {
        let entries = (0..n * n).map(|k| if k / n == k % n { DensePoly::one(field) } else { DensePoly::zero(field) }).collect();
        PolyMatrix { field, n, entries }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &DensePoly {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[DensePoly] {
        &self.entries
    }

    /// Largest entry degree; `None` for the zero matrix.
    pub fn degree(&self) -> Option<usize> {
        self.entries.iter().filter_map(|e| e.degree()).max()
    }

    pub fn eval(&self, x: Fp) -> ScalarMatrix {
        ScalarMatrix { field: self.field, n: self.n, entries: self.entries.iter().map(|e| e.eval(x)).collect() }
    }

    /// `M(c x)`.
    pub fn scale_arg(&self, c: Fp) -> PolyMatrix {
        PolyMatrix { field: self.field, n: self.n, entries: self.entries.iter().map(|e| e.scale_arg(c)).collect() }
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.field.check(&other.field)?;
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        let (f, n) = (self.field, self.n);
        let la = self.entries.iter().map(|e| e.len()).max().unwrap_or(0);
        let lb = other.entries.iter().map(|e| e.len()).max().unwrap_or(0);
        if la == 0 || lb == 0 {
            return Ok(PolyMatrix { field: f, n, entries: vec![DensePoly::zero(f); n * n] });
        }
        if la.min(lb) <= SPECTRAL_MIN_LEN {
            let entries = (0..n * n)
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    (0..n).fold(DensePoly::zero(f), |acc, k| {
                        acc.add(&self.get(i, k).mul(other.get(k, j)).expect("same field")).expect("same field")
                    })
                })
                .collect();
            return Ok(PolyMatrix { field: f, n, entries });
        }
        // Each entry is transformed once and reused n times; inner sums are
        // accumulated in the transform domain before a single inverse.
        let out_len = la + lb - 1;
        let ntt = Ntt::new(out_len, ntt::primes_for(n * la.min(lb), f.modulus()));
        let par = ntt.len() >= PARALLEL_LEN;
        let fwd = |m: &PolyMatrix| -> Vec<Option<ntt::Spectrum>> {
            let go = |e: &DensePoly| (!e.is_zero()).then(|| ntt.forward_residues(e.coeffs()));
            if par {
                m.entries.par_iter().map(go).collect()
            } else {
                m.entries.iter().map(go).collect()
            }
        };
        let (fa, fb) = (fwd(self), fwd(other));
        let entry = |idx: usize| {
            let (i, j) = (idx / n, idx % n);
            let mut acc: Option<ntt::Spectrum> = None;
            for k in 0..n {
                if let (Some(a), Some(b)) = (&fa[i * n + k], &fb[k * n + j]) {
                    match &mut acc {
                        None => acc = Some(ntt.pointwise(a, b)),
                        Some(s) => ntt.mul_acc(s, a, b),
                    }
                }
            }
            match acc {
                None => DensePoly::zero(f),
                Some(s) => DensePoly::new(f, ntt.inverse_residues(s, &f, out_len)),
            }
        };
        let entries = if par { (0..n * n).into_par_iter().map(entry).collect() } else { (0..n * n).map(entry).collect() };
        Ok(PolyMatrix { field: f, n, entries })
    }
}

/// `P_s(x) = M(q^(s-1) x) ... M(q x) M(x)` by doubling, for `s >= 1`.
pub fn baby_step_product(m: &PolyMatrix, q: Fp, s: u64) -> Result<PolyMatrix> {
    if s == 0 {
        return Ok(PolyMatrix::identity(m.field, m.n));
    }
    let f = m.field;
    let top = 63 - s.leading_zeros();
    let mut cur = m.clone();
    let mut t = 1u64;
    for bit in (0..top).rev() {
        cur = cur.scale_arg(f.pow(q, t)).mul(&cur)?;
        t *= 2;
        if (s >> bit) & 1 == 1 {
            cur = m.scale_arg(f.pow(q, t)).mul(&cur)?;
            t += 1;
        }
    }
    Ok(cur)
}

/// Knobs for [`matrix_q_factorial_with`].
#[derive(Clone, Copy, Debug)]
pub struct FactorialOptions {
    /// When `q` turns out to have small order `n`, reuse the period product
    /// `U_n` by binary powering.
    pub root_of_unity_shortcut: bool,
}

impl Default for FactorialOptions {
    fn default() -> Self {
        FactorialOptions { root_of_unity_shortcut: true }
    }
}

/// Below about this many factors per unit of degree a plain fold beats the
/// baby-step/giant-step setup.
const SHORT_FOLD: u64 = 100;

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `U_N = M(q^(N-1)) ... M(q) M(1)`.
pub fn matrix_q_factorial(m: &PolyMatrix, q: Fp, n: u64) -> Result<ScalarMatrix> {
    matrix_q_factorial_with(m, q, n, FactorialOptions::default())
}

pub fn matrix_q_factorial_with(m: &PolyMatrix, q: Fp, n: u64, opts: FactorialOptions) -> Result<ScalarMatrix> {
    let f = m.field;
    if n == 0 {
        return Ok(ScalarMatrix::identity(f, m.n));
    }
    let d = m.degree().unwrap_or(0) as u64;
    if d == 0 {
        return Ok(m.eval(Fp::ZERO).pow(n));
    }
    if q.is_zero() {
        return Ok(m.eval(Fp::ZERO).pow(n - 1).mul_unchecked(&m.eval(Fp::ONE)));
    }
    let s = isqrt(n / d);
    if s < 2 {
        return Ok(naive_fold(m, q, Fp::ONE, n));
    }
    if opts.root_of_unity_shortcut {
        if let Some(ord) = f.order_at_most(q, s) {
            if ord < n {
                // q^(k n) = 1 makes every block of n consecutive factors equal U_n.
                let plain = FactorialOptions { root_of_unity_shortcut: false };
                let short = |len: u64| {
                    if len <= SHORT_FOLD * d {
                        Ok(naive_fold(m, q, Fp::ONE, len))
                    } else {
                        matrix_q_factorial_with(m, q, len, plain)
                    }
                };
                let period = short(ord)?;
                let head = short(n % ord)?;
                return Ok(head.mul_unchecked(&period.pow(n / ord)));
            }
        }
    }
    giant_steps(m, q, n, s, d)
}

fn naive_fold(m: &PolyMatrix, q: Fp, start: Fp, count: u64) -> ScalarMatrix {
    let f = m.field;
    let mut u = ScalarMatrix::identity(f, m.n);
    let mut x = start;
    for _ in 0..count {
        u = m.eval(x).mul_unchecked(&u);
        x = f.mul(x, q);
    }
    u
}

/// Values of every entry of `p` at `1, Q, ..., Q^(count-1)`, entry-major.
pub(crate) fn chirp_entries(p: &PolyMatrix, big_q: Fp, count: usize) -> Result<Vec<Vec<Fp>>> {
    let deg = p.degree().unwrap_or(0);
    let plan = ChirpPlan::new(p.field, big_q, deg, count)?;
    if deg >= 256 {
        p.entries.par_iter().map(|e| plan.eval(e)).collect()
    } else {
        p.entries.iter().map(|e| plan.eval(e)).collect()
    }
}

fn giant_steps(m: &PolyMatrix, q: Fp, n: u64, s: u64, d: u64) -> Result<ScalarMatrix> {
    let f = m.field;
    let dim = m.n;
    debug_assert!(s * s * d <= n);
    let p = baby_step_product(m, q, s)?;
    let big_q = f.pow(q, s);
    let count = n / s;
    let vals = chirp_entries(&p, big_q, count as usize)?;
    let mut u = ScalarMatrix::identity(f, dim);
    for k in 0..count as usize {
        let step = ScalarMatrix { field: f, n: dim, entries: vals.iter().map(|v| v[k]).collect() };
        u = step.mul_unchecked(&u);
    }
    // At most s - 1 factors remain.
    let tail = naive_fold(m, q, f.pow(q, s * count), n - s * count);
    Ok(tail.mul_unchecked(&u))
}

/// `prod_{k<N} h(q^k)`.
pub fn scalar_q_product(h: &DensePoly, q: Fp, n: u64) -> Result<Fp> {
    let m = PolyMatrix::new(*h.field(), 1, vec![h.clone()])?;
    Ok(matrix_q_factorial(&m, q, n)?.get(0, 0))
}
