//! Evaluation on geometric progressions and q-shifted products.

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::ntt::{self, Ntt, Spectrum};
use crate::poly::{horner, DensePoly};

/// Below this many coefficient-point pairs, Horner is cheaper than a transform.
const DIRECT_WORK: usize = 4096;

/// Precomputed chirp data for evaluating polynomials of degree `<= deg` at
/// `1, Q, ..., Q^(count-1)`.
///
/// With `Q^(ij) = Q^C(i+j,2) Q^-C(i,2) Q^-C(j,2)` the evaluation becomes one
/// convolution against the fixed kernel `Q^C(l,2)`, whose transform is
/// computed once and reused for every polynomial.
pub struct ChirpPlan {
    field: PrimeField,
    q: Fp,
    deg: usize,
    count: usize,
    /// `Q^-C(j,2)` for `j < max(deg + 1, count)`.
    inv_tri: Vec<Fp>,
    fast: Option<(Ntt, Spectrum)>,
}

/// `Q^C(l,2)` for `l < n` with one multiplication per entry.
fn triangular_powers(field: &PrimeField, q: Fp, n: usize) -> Vec<Fp> {
    let mut out = Vec::with_capacity(n);
    let (mut cur, mut step) = (Fp::ONE, Fp::ONE);
    for _ in 0..n {
        out.push(cur);
        cur = field.mul(cur, step);
        step = field.mul(step, q);
    }
    out
}

impl ChirpPlan {
    pub fn new(field: PrimeField, q: Fp, deg: usize, count: usize) -> Result<ChirpPlan> {
        if q.is_zero() {
            return Err(Error::ZeroRatio);
        }
        let direct = (deg + 1).saturating_mul(count) <= DIRECT_WORK;
        let n = (deg + 1).max(count);
        let qi = field.inv(q)?;
        let inv_tri = if direct { Vec::new() } else { triangular_powers(&field, qi, n) };
        let fast = if direct {
            None
        } else {
            let ntt = Ntt::new(deg + count, ntt::primes_for(deg + 1, field.modulus()));
            let kernel = triangular_powers(&field, q, deg + count);
            let spec = ntt.forward_residues(&kernel);
            Some((ntt, spec))
        };
        Ok(ChirpPlan { field, q, deg, count, inv_tri, fast })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `[P(1), P(Q), ..., P(Q^(count-1))]`.
    pub fn eval(&self, p: &DensePoly) -> Result<Vec<Fp>> {
        self.field.check(p.field())?;
        let c = p.coeffs();
        assert!(c.len() <= self.deg + 1, "polynomial exceeds the planned degree");
        let f = &self.field;
        if c.is_empty() {
            return Ok(vec![Fp::ZERO; self.count]);
        }
        let Some((ntt, kernel)) = &self.fast else {
            let mut x = Fp::ONE;
            let mut out = Vec::with_capacity(self.count);
            for _ in 0..self.count {
                out.push(horner(f, c, x));
                x = f.mul(x, self.q);
            }
            return Ok(out);
        };
        let d = self.deg;
        let mut a = vec![Fp::ZERO; d + 1];
        for (j, &cj) in c.iter().enumerate() {
            a[d - j] = f.mul(cj, self.inv_tri[j]);
        }
        let spec = ntt.pointwise(&ntt.forward_residues(&a), kernel);
        let conv = ntt.inverse_residues(spec, f, ntt.len());
        // The cyclic length is at least deg + count, so indices deg..deg+count
        // receive no wrapped-around terms.
        Ok((0..self.count).map(|i| f.mul(conv[d + i], self.inv_tri[i])).collect())
    }
}

/// `[P(1), P(Q), ..., P(Q^(m-1))]` for a nonzero ratio `Q`.
pub fn chirp_eval(p: &DensePoly, q: Fp, m: usize) -> Result<Vec<Fp>> {
    let deg = p.degree().unwrap_or(0);
    ChirpPlan::new(*p.field(), q, deg, m)?.eval(p)
}

/// `prod_{i<s} (alpha - q^i x)`, by doubling `s`.
pub fn linear_qshift_product(field: &PrimeField, alpha: Fp, q: Fp, s: u64) -> DensePoly {
    if s == 0 {
        return DensePoly::one(*field);
    }
    let top = 63 - s.leading_zeros();
    let mut cur = DensePoly::new(*field, vec![alpha, field.neg(Fp::ONE)]);
    let mut t = 1u64;
    for bit in (0..top).rev() {
        // P_2t(x) = P_t(q^t x) P_t(x)
        let shifted = cur.scale_arg(field.pow(q, t));
        cur = shifted.mul(&cur).expect("same field");
        t *= 2;
        if (s >> bit) & 1 == 1 {
            let lin = DensePoly::new(*field, vec![alpha, field.neg(field.pow(q, t))]);
            cur = lin.mul(&cur).expect("same field");
            t += 1;
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u64 = 1_073_741_827;

    fn field() -> PrimeField {
        PrimeField::new(P).unwrap()
    }

    fn naive_qshift(f: &PrimeField, alpha: Fp, q: Fp, s: u64) -> DensePoly {
        let mut acc = DensePoly::one(*f);
        let mut qi = Fp::ONE;
        for _ in 0..s {
            acc = acc.mul(&DensePoly::new(*f, vec![alpha, f.neg(qi)])).unwrap();
            qi = f.mul(qi, q);
        }
        acc
    }

    #[test]
    fn zero_ratio_is_rejected() {
        let f = field();
        assert_eq!(chirp_eval(&DensePoly::one(f), Fp::ZERO, 3).err(), Some(Error::ZeroRatio));
    }

    #[test]
    fn small_prime_example() {
        let f = PrimeField::new(7).unwrap();
        let p = DensePoly::from_u64s(f, &[1, 1]);
        let v: Vec<u64> = chirp_eval(&p, f.elem(2), 3).unwrap().iter().map(|x| x.value()).collect();
        assert_eq!(v, vec![2, 3, 5]);
        let h = linear_qshift_product(&f, f.elem(3), f.elem(2), 2);
        // (3 - x)(3 - 2x) = 9 - 9x + 2x^2
        assert_eq!(h, DensePoly::from_u64s(f, &[2, 5, 2]));
    }

    #[test]
    fn qshift_endpoints() {
        let f = field();
        assert_eq!(linear_qshift_product(&f, f.elem(5), f.elem(9), 0), DensePoly::one(f));
        let alpha = f.elem(5);
        // q = 1 collapses to a binomial power, q = 0 to (alpha - x) alpha^(s-1).
        assert_eq!(linear_qshift_product(&f, alpha, Fp::ONE, 13), naive_qshift(&f, alpha, Fp::ONE, 13));
        assert_eq!(linear_qshift_product(&f, alpha, Fp::ZERO, 13), naive_qshift(&f, alpha, Fp::ZERO, 13));
    }

    proptest! {
        #[test]
        fn chirp_matches_horner(
            coeffs in prop::collection::vec(0..P, 0..400),
            q in 1..P,
            m in 0usize..300,
        ) {
            let f = field();
            let p = DensePoly::from_u64s(f, &coeffs);
            let q = f.elem(q);
            let got = chirp_eval(&p, q, m).unwrap();
            let want: Vec<Fp> = (0..m as u64).map(|i| p.eval(f.pow(q, i))).collect();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn chirp_at_root_of_unity(coeffs in prop::collection::vec(0..P, 60..200), m in 70usize..200) {
            // q has order 59, so the points repeat.
            let f = field();
            let q = f.pow(f.elem(2), (P - 1) / 59);
            prop_assert_eq!(f.batch_powers(q, 60).unit_order, Some(59));
            let p = DensePoly::from_u64s(f, &coeffs);
            let want: Vec<Fp> = (0..m as u64).map(|i| p.eval(f.pow(q, i))).collect();
            prop_assert_eq!(chirp_eval(&p, q, m).unwrap(), want);
        }

        #[test]
        fn qshift_matches_naive(alpha in 0..P, q in 0..P, s in 0u64..70) {
            let f = field();
            let (a, q) = (f.elem(alpha), f.elem(q));
            prop_assert_eq!(linear_qshift_product(&f, a, q, s), naive_qshift(&f, a, q, s));
        }
    }
}
