//! Dense univariate polynomials over F_p.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::ntt;

/// Coefficients in increasing degree, never with trailing zeros; the zero
/// polynomial has no coefficients and degree `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePoly {
    field: PrimeField,
    coeffs: Vec<Fp>,
}

fn trim(v: &mut Vec<Fp>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

pub(crate) fn horner(field: &PrimeField, coeffs: &[Fp], x: Fp) -> Fp {
    coeffs.iter().rev().fold(Fp::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
}

pub(crate) fn mul_raw(field: &PrimeField, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let mut v = ntt::mul_residues(field, a, b);
    trim(&mut v);
    v
}

fn sub_raw(field: &PrimeField, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let mut out: Vec<Fp> = (0..a.len().max(b.len()))
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(Fp::ZERO);
            let y = b.get(i).copied().unwrap_or(Fp::ZERO);
            field.sub(x, y)
        })
        .collect();
    trim(&mut out);
    out
}

/// `1/f mod x^n`; `f[0]` must be nonzero.
fn inv_series(field: &PrimeField, f: &[Fp], n: usize) -> Result<Vec<Fp>> {
    let mut g = vec![field.inv(f[0])?];
    let mut k = 1;
    while k < n {
        let k2 = (2 * k).min(n);
        let mut e = ntt::mul_residues(field, &f[..k2.min(f.len())], &g);
        e.resize(k2, Fp::ZERO);
        // g <- g (2 - f g)
        for c in e.iter_mut() {
            *c = field.neg(*c);
        }
        e[0] = field.add(e[0], field.elem(2));
        let mut next = ntt::mul_residues(field, &g, &e);
        next.resize(k2, Fp::ZERO);
        g = next;
        k = k2;
    }
    g.truncate(n);
    Ok(g)
}

const FAST_DIV: usize = 64;

/// Quotient and remainder of `a` by nonzero trimmed `b`.
pub(crate) fn div_rem_raw(field: &PrimeField, a: &[Fp], b: &[Fp]) -> Result<(Vec<Fp>, Vec<Fp>)> {
    let lead = *b.last().ok_or(Error::ZeroInversion)?;
    if a.len() < b.len() {
        let mut r = a.to_vec();
        trim(&mut r);
        return Ok((Vec::new(), r));
    }
    let qlen = a.len() - b.len() + 1;
    if qlen < FAST_DIV || b.len() < FAST_DIV {
        let inv = field.inv(lead)?;
        let mut r = a.to_vec();
        let mut q = vec![Fp::ZERO; qlen];
        for i in (0..qlen).rev() {
            let c = field.mul(r[i + b.len() - 1], inv);
            q[i] = c;
            if !c.is_zero() {
                for (j, &bj) in b.iter().enumerate() {
                    r[i + j] = field.sub(r[i + j], field.mul(c, bj));
                }
            }
        }
        r.truncate(b.len() - 1);
        trim(&mut r);
        trim(&mut q);
        return Ok((q, r));
    }
    let ra: Vec<Fp> = a.iter().rev().take(qlen).copied().collect();
    let rb: Vec<Fp> = b.iter().rev().copied().collect();
    let rb_inv = inv_series(field, &rb, qlen)?;
    let mut q = ntt::mul_residues(field, &ra, &rb_inv);
    q.resize(qlen, Fp::ZERO);
    q.reverse();
    trim(&mut q);
    let bq = ntt::mul_residues(field, b, &q);
    let mut r = sub_raw(field, &a[..b.len() - 1], &bq[..(b.len() - 1).min(bq.len())]);
    trim(&mut r);
    Ok((q, r))
}

impl DensePoly {
    pub fn new(field: PrimeField, mut coeffs: Vec<Fp>) -> DensePoly {
        trim(&mut coeffs);
        DensePoly { field, coeffs }
    }

    pub fn from_u64s(field: PrimeField, coeffs: &[u64]) -> DensePoly {
        Self::new(field, coeffs.iter().map(|&c| field.elem(c)).collect())
    }

    pub fn from_i64s(field: PrimeField, coeffs: &[i64]) -> DensePoly {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: PrimeField) -> DensePoly {
        DensePoly { field, coeffs: Vec::new() }
    }

    pub fn constant(field: PrimeField, c: Fp) -> DensePoly {
        Self::new(field, vec![c])
    }

    pub fn one(field: PrimeField) -> DensePoly {
        Self::constant(field, Fp::ONE)
    }

    /// `c * x^k`.
    pub fn monomial(field: PrimeField, c: Fp, k: usize) -> DensePoly {
        let mut v = vec![Fp::ZERO; k + 1];
        v[k] = c;
        Self::new(field, v)
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fp> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fp {
        self.coeffs.get(i).copied().unwrap_or(Fp::ZERO)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored coefficients, `degree + 1`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &DensePoly) -> Result<DensePoly> {
        self.field.check(&other.field)?;
        let f = self.field;
        let n = self.len().max(other.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Ok(Self::new(f, v))
    }

    pub fn sub(&self, other: &DensePoly) -> Result<DensePoly> {
        self.field.check(&other.field)?;
        Ok(Self::new(self.field, sub_raw(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn neg(&self) -> DensePoly {
        let f = self.field;
        Self::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(&self, c: Fp) -> DensePoly {
        let f = self.field;
        Self::new(f, self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, other: &DensePoly) -> Result<DensePoly> {
        self.field.check(&other.field)?;
        Ok(DensePoly { field: self.field, coeffs: mul_raw(&self.field, &self.coeffs, &other.coeffs) })
    }

    pub fn eval(&self, x: Fp) -> Fp {
        horner(&self.field, &self.coeffs, x)
    }

    /// `P(c x)`.
    pub fn scale_arg(&self, c: Fp) -> DensePoly {
        let f = self.field;
        let mut pw = Fp::ONE;
        let v = self
            .coeffs
            .iter()
            .map(|&x| {
                let y = f.mul(x, pw);
                pw = f.mul(pw, c);
                y
            })
            .collect();
        Self::new(f, v)
    }

    pub fn div_rem(&self, d: &DensePoly) -> Result<(DensePoly, DensePoly)> {
        self.field.check(&d.field)?;
        let (q, r) = div_rem_raw(&self.field, &self.coeffs, &d.coeffs)?;
        Ok((Self::new(self.field, q), Self::new(self.field, r)))
    }

    /// Inverse modulo `m`, or `None` when the two share a factor.
    pub fn inv_mod(&self, m: &DensePoly) -> Result<Option<DensePoly>> {
        self.field.check(&m.field)?;
        let f = self.field;
        let (_, r) = self.div_rem(m)?;
        let (mut r0, mut r1) = (m.clone(), r);
        let (mut t0, mut t1) = (DensePoly::zero(f), DensePoly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let t = t0.sub(&q.mul(&t1)?)?;
            (r0, r1) = (r1, r);
            (t0, t1) = (t1, t);
        }
        if r0.degree() != Some(0) {
            return Ok(None);
        }
        let c = f.inv(r0.coeffs[0])?;
        Ok(Some(t0.scale(c).div_rem(m)?.1))
    }

    /// Values at all `points`, by a subproduct tree once there are enough.
    pub fn multipoint_eval(&self, points: &[Fp]) -> Vec<Fp> {
        tree_multipoint_eval(&self.field, &self.coeffs, points)
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

const TREE_LEAF: usize = 16;

/// Subproduct tree node: `poly` is the product of `x - pt` over its points.
struct Tree {
    poly: Vec<Fp>,
    kind: Kind,
}

enum Kind {
    Leaf(Vec<Fp>),
    Split(Box<Tree>, Box<Tree>),
}

impl Tree {
    fn build(field: &PrimeField, points: &[Fp]) -> Tree {
        if points.len() <= TREE_LEAF {
            let mut poly = vec![Fp::ONE];
            for &pt in points {
                poly = ntt::schoolbook(field, &poly, &[field.neg(pt), Fp::ONE]);
            }
            return Tree { poly, kind: Kind::Leaf(points.to_vec()) };
        }
        let (l, r) = points.split_at(points.len() / 2);
        let (l, r) = (Tree::build(field, l), Tree::build(field, r));
        let poly = ntt::mul_residues(field, &l.poly, &r.poly);
        Tree { poly, kind: Kind::Split(Box::new(l), Box::new(r)) }
    }

    fn descend(&self, field: &PrimeField, rem: &[Fp], out: &mut Vec<Fp>) {
        match &self.kind {
            Kind::Leaf(points) => out.extend(points.iter().map(|&x| horner(field, rem, x))),
            Kind::Split(l, r) => {
                // Subproducts are monic, so division cannot fail.
                let (_, rl) = div_rem_raw(field, rem, &l.poly).expect("monic divisor");
                let (_, rr) = div_rem_raw(field, rem, &r.poly).expect("monic divisor");
                l.descend(field, &rl, out);
                r.descend(field, &rr, out);
            }
        }
    }
}

pub(crate) fn tree_multipoint_eval(field: &PrimeField, coeffs: &[Fp], points: &[Fp]) -> Vec<Fp> {
    if points.len() <= 2 * TREE_LEAF || coeffs.len() <= 2 * TREE_LEAF {
        return points.iter().map(|&x| horner(field, coeffs, x)).collect();
    }
    let tree = Tree::build(field, points);
    let (_, rem) = div_rem_raw(field, coeffs, &tree.poly).expect("monic divisor");
    let mut out = Vec::with_capacity(points.len());
    tree.descend(field, &rem, &mut out);
    out
}

/// `prod_i h(roots[i])`.
pub fn prod_of_evals(roots: &[Fp], h: &DensePoly) -> Fp {
    let f = h.field();
    h.multipoint_eval(roots).into_iter().fold(Fp::ONE, |acc, v| f.mul(acc, v))
}
