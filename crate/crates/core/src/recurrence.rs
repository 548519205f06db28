//! q-holonomic recurrences
//! `c_r(q, q^n) u_(n+r) + ... + c_0(q, q^n) u_n = 0`
//! with exact rational data, and their specializations over F_p.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::matrix::PolyMatrix;
use crate::poly::DensePoly;

/// `c * x^dx * y^dy`, where `x` stands for `q` and `y` for `q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub dx: u32,
    pub dy: u32,
    pub c: BigRational,
}

impl Monomial {
    pub fn new(dx: u32, dy: u32, c: impl Into<BigRational>) -> Monomial {
        Monomial { dx, dy, c: c.into() }
    }

    pub fn int(dx: u32, dy: u32, c: i64) -> Monomial {
        Monomial::new(dx, dy, BigRational::from_integer(c.into()))
    }
}

/// Polynomial in `(x, y)` kept as merged monomials sorted by `(dy, dx)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivariatePoly {
    terms: Vec<Monomial>,
}

impl BivariatePoly {
    pub fn new(mut terms: Vec<Monomial>) -> BivariatePoly {
        terms.sort_by_key(|m| (m.dy, m.dx));
        let mut merged: Vec<Monomial> = Vec::with_capacity(terms.len());
        for m in terms {
            match merged.last_mut() {
                Some(last) if last.dx == m.dx && last.dy == m.dy => last.c += m.c,
                _ => merged.push(m),
            }
        }
        merged.retain(|m| !m.c.is_zero());
        BivariatePoly { terms: merged }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn y_degree(&self) -> Option<u32> {
        self.terms.iter().map(|m| m.dy).max()
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.terms.iter().map(|m| m.dx).max()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|m| m.c.is_integer())
    }

    /// Substitutes `x = q`, leaving a polynomial in `y`.
    pub fn specialize(&self, f: &PrimeField, q: Fp) -> Result<DensePoly> {
        let len = self.y_degree().map_or(0, |d| d as usize + 1);
        let mut c = vec![Fp::ZERO; len];
        for m in &self.terms {
            let v = f.from_rational(&m.c).ok_or_else(|| denominator_error(f))?;
            c[m.dy as usize] = f.add(c[m.dy as usize], f.mul(v, f.pow(q, m.dx as u64)));
        }
        Ok(DensePoly::new(*f, c))
    }

    /// Exact value at `x = q`, `y = qn`.
    pub fn eval_exact(&self, q: &BigRational, qn: &BigRational) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, m| acc + &m.c * pow_rat(q, m.dx) * pow_rat(qn, m.dy))
    }
}

fn pow_rat(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

fn denominator_error(f: &PrimeField) -> Error {
    Error::BadPrime { p: f.modulus(), reason: "divides a denominator of the input".into() }
}

/// A validated recurrence of order `r >= 1` with `r` initial values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRecurrence {
    order: usize,
    coeffs: Vec<BivariatePoly>,
    initials: Vec<BigRational>,
    y_degree: usize,
}

impl QRecurrence {
    /// `coeffs[j]` multiplies `u_(n+j)`.
    pub fn new(order: usize, coeffs: Vec<BivariatePoly>, initials: Vec<BigRational>) -> Result<QRecurrence> {
        if order == 0 {
            return Err(Error::ArityMismatch("order must be at least 1".into()));
        }
        if coeffs.len() != order + 1 {
            return Err(Error::ArityMismatch(format!("order {order} needs {} coefficients, got {}", order + 1, coeffs.len())));
        }
        if initials.len() != order {
            return Err(Error::ArityMismatch(format!("order {order} needs {order} initial values, got {}", initials.len())));
        }
        if coeffs[order].is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let y_degree = coeffs.iter().filter_map(|c| c.y_degree()).max().unwrap_or(0) as usize;
        Ok(QRecurrence { order, coeffs, initials, y_degree })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[BivariatePoly] {
        &self.coeffs
    }

    pub fn initials(&self) -> &[BigRational] {
        &self.initials
    }

    /// Largest exponent of `y` over all coefficients.
    pub fn y_degree(&self) -> usize {
        self.y_degree
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integral()) && self.initials.iter().all(|v| v.is_integer())
    }

    /// Substitutes `q` and reduces everything mod p.
    pub fn reduce(&self, f: &PrimeField, q: Fp) -> Result<ModRecurrence> {
        let coeffs = self.coeffs.iter().map(|c| c.specialize(f, q)).collect::<Result<Vec<_>>>()?;
        let initials = self.initials.iter().map(|v| f.from_rational(v).ok_or_else(|| denominator_error(f))).collect::<Result<Vec<_>>>()?;
        ModRecurrence::new(*f, q, coeffs, initials)
    }

    pub fn specialize(&self, f: &PrimeField, q: Fp) -> Result<SpecializedCompanion> {
        Ok(self.reduce(f, q)?.companion())
    }

    /// `u_(n+1) [n+1]_q = ...` cleared of denominators:
    /// `(q - 1) u_(n+1) - (q y - 1) u_n = 0`, `u_0 = 1`. Its terms are `[n]_q!`.
    pub fn q_factorial() -> QRecurrence {
        let c0 = BivariatePoly::new(vec![Monomial::int(1, 1, -1), Monomial::int(0, 0, 1)]);
        let c1 = BivariatePoly::new(vec![Monomial::int(1, 0, 1), Monomial::int(0, 0, -1)]);
        QRecurrence::new(1, vec![c0, c1], vec![BigRational::one()]).expect("valid")
    }

    /// `v_(n+2) - (1 + q^(2n+1)) v_(n+1) + q^(2n+1) v_n = 0`, `v_0 = 0`,
    /// `v_1 = 1`, whose terms are `sum_(k<n) q^(k^2)`.
    pub fn theta_squares() -> QRecurrence {
        let c0 = BivariatePoly::new(vec![Monomial::int(1, 2, 1)]);
        let c1 = BivariatePoly::new(vec![Monomial::int(0, 0, -1), Monomial::int(1, 2, -1)]);
        let c2 = BivariatePoly::new(vec![Monomial::int(0, 0, 1)]);
        QRecurrence::new(2, vec![c0, c1, c2], vec![BigRational::zero(), BigRational::one()]).expect("valid")
    }
}

/// A recurrence specialized at a concrete `q` in F_p: coefficients are
/// polynomials in `y`, evaluated at `y = q^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModRecurrence {
    field: PrimeField,
    q: Fp,
    coeffs: Vec<DensePoly>,
    initials: Vec<Fp>,
}

/// `tilde_m(y) = c_r(q, y) M(y)` for the companion matrix `M`, and
/// `lead = c_r(q, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedCompanion {
    pub tilde_m: PolyMatrix,
    pub lead: DensePoly,
}

impl ModRecurrence {
    pub fn new(field: PrimeField, q: Fp, coeffs: Vec<DensePoly>, initials: Vec<Fp>) -> Result<ModRecurrence> {
        if coeffs.len() < 2 || initials.len() + 1 != coeffs.len() {
            return Err(Error::ArityMismatch(format!("{} coefficients and {} initial values", coeffs.len(), initials.len())));
        }
        for c in &coeffs {
            field.check(c.field())?;
        }
        if coeffs.last().is_some_and(|c| c.is_zero()) {
            return Err(Error::DegenerateLeading);
        }
        Ok(ModRecurrence { field, q, coeffs, initials })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn q(&self) -> Fp {
        self.q
    }

    pub fn order(&self) -> usize {
        self.initials.len()
    }

    pub fn coeffs(&self) -> &[DensePoly] {
        &self.coeffs
    }

    pub fn initials(&self) -> &[Fp] {
        &self.initials
    }

    pub fn lead(&self) -> &DensePoly {
        &self.coeffs[self.order()]
    }

    /// Acts on `(u_(n+r-1), ..., u_n)`: top row `-c_(r-1), ..., -c_0`, then
    /// `c_r` on the subdiagonal.
    pub fn companion(&self) -> SpecializedCompanion {
        let r = self.order();
        let f = self.field;
        let mut entries = vec![DensePoly::zero(f); r * r];
        for j in 0..r {
            entries[j] = self.coeffs[r - 1 - j].neg();
        }
        for i in 1..r {
            entries[i * r + i - 1] = self.lead().clone();
        }
        SpecializedCompanion { tilde_m: PolyMatrix::new(f, r, entries).expect("square"), lead: self.lead().clone() }
    }

    /// `(u_(r-1), ..., u_0)`.
    pub(crate) fn initial_vector(&self) -> Vec<Fp> {
        self.initials.iter().rev().copied().collect()
    }

    /// Smallest `k < len` with `c_r(q, q^k) = 0`.
    pub(crate) fn first_singular(&self, len: u64) -> Option<u64> {
        let f = &self.field;
        let mut x = Fp::ONE;
        for k in 0..len {
            if self.lead().eval(x).is_zero() {
                return Some(k);
            }
            x = f.mul(x, self.q);
            if x == Fp::ONE {
                // The points repeat from here on.
                return None;
            }
        }
        None
    }
}
