//! Linear-time reference implementations, used as oracles and baselines.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::matrix::{PolyMatrix, ScalarMatrix};
use crate::recurrence::{ModRecurrence, QRecurrence};

/// `prod_(i<N) (alpha - q^i)`.
pub fn naive_geom_product(f: &PrimeField, alpha: Fp, q: Fp, n: u64) -> Fp {
    let mut acc = Fp::ONE;
    let mut qi = Fp::ONE;
    for _ in 0..n {
        acc = f.mul(acc, f.sub(alpha, qi));
        qi = f.mul(qi, q);
    }
    acc
}

/// `M(q^(N-1)) ... M(q) M(1)`, one evaluation per factor.
pub fn naive_matrix_q_factorial(m: &PolyMatrix, q: Fp, n: u64) -> ScalarMatrix {
    let f = *m.field();
    let mut acc = ScalarMatrix::identity(f, m.dim());
    let mut x = Fp::ONE;
    for _ in 0..n {
        acc = m.eval(x).mul_unchecked(&acc);
        x = f.mul(x, q);
    }
    acc
}

/// Unrolls the recurrence term by term.
pub fn naive_unroll(rec: &ModRecurrence, n: u64) -> Result<Fp> {
    let f = rec.field();
    let r = rec.order();
    if n < r as u64 {
        return Ok(rec.initials()[n as usize]);
    }
    let mut window: Vec<Fp> = rec.initials().to_vec();
    let mut y = Fp::ONE;
    for k in 0..=(n - r as u64) {
        let lead = rec.lead().eval(y);
        let inv = f.inv(lead).map_err(|_| Error::SingularLeading(k))?;
        let mut acc = Fp::ZERO;
        for (j, c) in rec.coeffs()[..r].iter().enumerate() {
            acc = f.add(acc, f.mul(c.eval(y), window[j]));
        }
        let next = f.mul(f.neg(acc), inv);
        window.remove(0);
        window.push(next);
        y = f.mul(y, rec.q());
    }
    Ok(window[r - 1])
}

pub fn naive_nth_term(rec: &QRecurrence, f: &PrimeField, q: Fp, n: u64) -> Result<Fp> {
    naive_unroll(&rec.reduce(f, q)?, n)
}

/// `sum_(n<N) p^n q^(a n^2 + b n)` summed directly, with the exponent written
/// as `2a C(n,2) + (a+b) n`.
pub fn naive_theta_sum(f: &PrimeField, p: Fp, two_a: i64, a_plus_b: i64, q: Fp, n: u64) -> Result<Fp> {
    let mut acc = Fp::ZERO;
    let mut pn = Fp::ONE;
    for k in 0..n as i128 {
        let e = two_a as i128 * (k * (k - 1) / 2) + a_plus_b as i128 * k;
        let term = if e >= 0 {
            f.pow_u128(q, e as u128)
        } else {
            if q.is_zero() {
                return Err(Error::ParameterDomain("negative power of q = 0".into()));
            }
            f.inv(f.pow_u128(q, e.unsigned_abs()))?
        };
        acc = f.add(acc, f.mul(pn, term));
        pn = f.mul(pn, p);
    }
    Ok(acc)
}

/// Exact unrolling over Q.
pub fn naive_exact_nth_term(rec: &QRecurrence, q: &BigRational, n: u64) -> Result<BigRational> {
    let r = rec.order();
    if n < r as u64 {
        return Ok(rec.initials()[n as usize].clone());
    }
    let mut window: Vec<BigRational> = rec.initials().to_vec();
    let mut y = BigRational::one();
    for k in 0..=(n - r as u64) {
        let lead = rec.coeffs()[r].eval_exact(q, &y);
        if lead.is_zero() {
            return Err(Error::SingularLeading(k));
        }
        let mut acc = BigRational::zero();
        for (j, c) in rec.coeffs()[..r].iter().enumerate() {
            acc += c.eval_exact(q, &y) * &window[j];
        }
        window.remove(0);
        window.push(-acc / lead);
        y *= q;
    }
    Ok(window.pop().expect("order >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let f = PrimeField::new(101).unwrap();
        assert_eq!(naive_geom_product(&f, f.elem(3), f.elem(2), 2), f.elem(2));
        let rec = QRecurrence::q_factorial();
        assert_eq!(naive_nth_term(&rec, &f, f.elem(2), 3).unwrap(), f.elem(21));
        let q = BigRational::from_integer(2.into());
        assert_eq!(naive_exact_nth_term(&rec, &q, 3).unwrap(), BigRational::from_integer(21.into()));
        assert_eq!(naive_theta_sum(&f, Fp::ONE, 2, 1, f.elem(2), 3).unwrap(), f.elem(19));
    }
}
