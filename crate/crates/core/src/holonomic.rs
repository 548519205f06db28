//! Terms of q-holonomic sequences mod p in `O~(sqrt N)` field operations.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::matrix::{baby_step_product, chirp_entries, isqrt, matrix_q_factorial_with, FactorialOptions, PolyMatrix, ScalarMatrix};
use crate::poly::{tree_multipoint_eval, DensePoly};
use crate::recurrence::{ModRecurrence, QRecurrence};

/// Index lists this short are accepted whatever their largest entry.
const SHORT_LIST: usize = 4;

/// `u_N(q)` mod p.
pub fn nth_term(rec: &QRecurrence, f: &PrimeField, q: Fp, n: u64) -> Result<Fp> {
    rec.reduce(f, q)?.nth_term(n)
}

/// `[u_(N_1), ..., u_(N_k)]` for strictly increasing indices with `k^2 <= N_k`
/// (or at most four indices).
pub fn terms_multi(rec: &QRecurrence, f: &PrimeField, q: Fp, indices: &[u64]) -> Result<Vec<Fp>> {
    rec.reduce(f, q)?.terms(indices)
}

impl ModRecurrence {
    pub fn nth_term(&self, n: u64) -> Result<Fp> {
        self.nth_term_with(n, FactorialOptions::default())
    }

    /// Transports `(u_(r-1), ..., u_0)` by the `N - r + 1` companion factors
    /// and divides by the matching product of leading coefficients.
    pub fn nth_term_with(&self, n: u64, opts: FactorialOptions) -> Result<Fp> {
        let r = self.order() as u64;
        if n < r {
            return Ok(self.initials()[n as usize]);
        }
        let len = n - r + 1;
        let f = *self.field();
        let sc = self.companion();
        let lead = PolyMatrix::new(f, 1, vec![sc.lead.clone()])?;
        let den = matrix_q_factorial_with(&lead, self.q(), len, opts)?.get(0, 0);
        if den.is_zero() {
            return Err(Error::SingularLeading(self.first_singular(len).expect("a factor vanishes")));
        }
        let u = matrix_q_factorial_with(&sc.tilde_m, self.q(), len, opts)?;
        self.finish(&u, den)
    }

    /// First entry of `u * v_0 / den`, reading columns `< order`.
    fn finish(&self, u: &ScalarMatrix, den: Fp) -> Result<Fp> {
        let f = self.field();
        let v0 = self.initial_vector();
        let top = (0..v0.len()).fold(Fp::ZERO, |acc, j| f.add(acc, f.mul(u.get(0, j), v0[j])));
        f.div(top, den)
    }

    /// Several terms at once: giant-step prefixes for every index, then
    /// halving refinement steps evaluated at all pending points together.
    pub fn terms(&self, indices: &[u64]) -> Result<Vec<Fp>> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedIndices);
        }
        let Some(&last) = indices.last() else {
            return Ok(Vec::new());
        };
        if indices.len() > SHORT_LIST && (indices.len() as u128).pow(2) > last as u128 {
            return Err(Error::TooManyIndices { count: indices.len(), max_index: last });
        }
        let r = self.order() as u64;
        let plain = FactorialOptions { root_of_unity_shortcut: false };
        let f = *self.field();
        let q = self.q();
        let block = self.block_companion();
        let d = block.degree().unwrap_or(0) as u64;
        let lmax = last.saturating_sub(r) + 1;
        let s = if d == 0 { 0 } else { isqrt(lmax / d) };
        if q.is_zero() || s < 2 {
            return indices.iter().map(|&n| self.nth_term_with(n, plain)).collect();
        }

        // Product lengths L_j and the giant-step prefix U_(s floor(L_j/s)).
        let mut out = vec![Fp::ZERO; indices.len()];
        let mut pending: Vec<(usize, u64)> = Vec::new();
        for (j, &n) in indices.iter().enumerate() {
            if n < r {
                out[j] = self.initials()[n as usize];
            } else {
                pending.push((j, n - r + 1));
            }
        }
        let p = baby_step_product(&block, q, s)?;
        let big_q = f.pow(q, s);
        let giant = (lmax / s) as usize;
        let vals = chirp_entries(&p, big_q, giant)?;
        let dim = block.dim();
        let mut states: Vec<(u64, ScalarMatrix)> = Vec::with_capacity(pending.len());
        let mut u = ScalarMatrix::identity(f, dim);
        let mut k = 0usize;
        for &(_, len) in &pending {
            let g = (len / s) as usize;
            while k < g {
                let step = ScalarMatrix::new(f, dim, vals.iter().map(|v| v[k]).collect())?;
                u = step.mul_unchecked(&u);
                k += 1;
            }
            states.push((g as u64 * s, u.clone()));
        }

        // Remaining gaps are < s; each round at step d handles every gap >= d.
        let mut dt = s;
        loop {
            let active: Vec<usize> = (0..pending.len()).filter(|&i| pending[i].1 - states[i].0 >= dt).collect();
            if !active.is_empty() {
                let pt = baby_step_product(&block, q, dt)?;
                let points: Vec<Fp> = active.iter().map(|&i| f.pow(q, states[i].0)).collect();
                let evals: Vec<Vec<Fp>> = pt.entries().iter().map(|e| tree_multipoint_eval(&f, e.coeffs(), &points)).collect();
                for (slot, &i) in active.iter().enumerate() {
                    let step = ScalarMatrix::new(f, dim, evals.iter().map(|v| v[slot]).collect())?;
                    let (k, u) = &mut states[i];
                    *u = step.mul_unchecked(u);
                    *k += dt;
                }
            }
            if dt == 1 {
                break;
            }
            dt = dt.div_ceil(2);
        }

        let rr = self.order();
        for (&(j, len), (k, u)) in pending.iter().zip(&states) {
            debug_assert_eq!(*k, len);
            let den = u.get(rr, rr);
            if den.is_zero() {
                return Err(Error::SingularLeading(self.first_singular(len).expect("a factor vanishes")));
            }
            out[j] = self.finish(u, den)?;
        }
        Ok(out)
    }

    /// `diag(tilde_m, lead)`, so one product tracks numerator and denominator.
    fn block_companion(&self) -> PolyMatrix {
        let sc = self.companion();
        let r = self.order();
        let f = *self.field();
        let n = r + 1;
        let mut entries = vec![DensePoly::zero(f); n * n];
        for i in 0..r {
            for j in 0..r {
                entries[i * n + j] = sc.tilde_m.get(i, j).clone();
            }
        }
        entries[r * n + r] = sc.lead;
        PolyMatrix::new(f, n, entries).expect("square")
    }
}

fn integral(x: &BigRational, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::ParameterDomain(format!("{what} must be an integer, got {x}")));
    }
    x.to_integer().to_i64().ok_or_else(|| Error::ParameterDomain(format!("{what} = {x} is too large")))
}

/// `2a` and `a + b` as integers.
pub fn theta_exponents(a: &BigRational, b: &BigRational) -> Result<(i64, i64)> {
    let two_a = integral(&(a * BigRational::from_integer(2.into())), "2a")?;
    let ab = integral(&(a + b), "a + b")?;
    Ok((two_a, ab))
}

fn signed_pow(f: &PrimeField, q: Fp, e: i64) -> Result<Fp> {
    if e < 0 && q.is_zero() {
        return Err(Error::ParameterDomain("negative power of q = 0".into()));
    }
    f.pow_i64(q, e)
}

/// `v_N = sum_(n<N) p^n q^(a n^2 + b n)` through the 2x2 degree-one matrix
/// `[[p r x + 1, -p r x], [1, 0]]` with `r = q^(a+b)` and ratio `q^(2a)`.
pub fn theta_sum(f: &PrimeField, p: Fp, a: &BigRational, b: &BigRational, q: Fp, n: u64) -> Result<Fp> {
    let (two_a, ab) = theta_exponents(a, b)?;
    let pr = f.mul(p, signed_pow(f, q, ab)?);
    let qt = signed_pow(f, q, two_a)?;
    if n == 0 {
        return Ok(Fp::ZERO);
    }
    let m = PolyMatrix::new(
        *f,
        2,
        vec![DensePoly::new(*f, vec![Fp::ONE, pr]), DensePoly::new(*f, vec![Fp::ZERO, f.neg(pr)]), DensePoly::one(*f), DensePoly::zero(*f)],
    )?;
    Ok(crate::matrix::matrix_q_factorial(&m, qt, n)?.get(1, 0))
}

/// The same sum through the general order-two recurrence
/// `v_(n+2) - v_(n+1) = p q^(a+b) q^(2an) (v_(n+1) - v_n)`; needs `2a >= 0`.
pub fn theta_sum_generic(f: &PrimeField, p: Fp, a: &BigRational, b: &BigRational, q: Fp, n: u64) -> Result<Fp> {
    let (two_a, ab) = theta_exponents(a, b)?;
    if two_a < 0 {
        return Err(Error::ParameterDomain("the generic path needs 2a >= 0".into()));
    }
    let pr = f.mul(p, signed_pow(f, q, ab)?);
    let e = two_a as usize;
    let c0 = DensePoly::monomial(*f, pr, e);
    let c1 = DensePoly::constant(*f, f.neg(Fp::ONE)).sub(&c0)?;
    let rec = ModRecurrence::new(*f, q, vec![c0, c1, DensePoly::one(*f)], vec![Fp::ZERO, Fp::ONE])?;
    rec.nth_term(n)
}

/// `sum_(n<N) alpha^n / [n]_q!`.
pub fn q_exp_trunc(f: &PrimeField, alpha: Fp, q: Fp, n: u64) -> Result<Fp> {
    if q == Fp::ONE {
        // Brackets degenerate to integers; the recurrence's leading
        // coefficient vanishes identically, so sum directly.
        let mut acc = Fp::ZERO;
        let mut term = Fp::ONE;
        for k in 0..n {
            if k > 0 {
                let kf = f.elem(k);
                term = f.mul(term, f.div(alpha, kf).map_err(|_| Error::NonInvertibleBracket(k))?);
            }
            acc = f.add(acc, term);
        }
        return Ok(acc);
    }
    // [n+1]_q (v_(n+2) - v_(n+1)) = alpha (v_(n+1) - v_n), scaled by 1 - q.
    let one_q = f.sub(Fp::ONE, q);
    let lead = DensePoly::new(*f, vec![Fp::ONE, f.neg(q)]);
    let a1q = f.mul(alpha, one_q);
    let c1 = lead.neg().sub(&DensePoly::constant(*f, a1q))?;
    let c0 = DensePoly::constant(*f, a1q);
    let rec = ModRecurrence::new(*f, q, vec![c0, c1, lead], vec![Fp::ZERO, Fp::ONE])?;
    rec.nth_term(n).map_err(|e| match e {
        Error::SingularLeading(k) => Error::NonInvertibleBracket(k + 1),
        other => other,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermiteKind {
    /// `F_(n+1) = x F_n - (1 - q^n) q^(n-1) F_(n-1)`, `F_0 = 1`, `F_1 = x`.
    Discrete,
    /// `H_(n+1) = 2x H_n - (1 - q^n) H_(n-1)`, `H_0 = 1`, `H_1 = 2x`.
    Continuous,
}

pub fn q_hermite_eval(f: &PrimeField, alpha: Fp, q: Fp, n: u64, kind: HermiteKind) -> Result<Fp> {
    let rec = match kind {
        HermiteKind::Discrete => ModRecurrence::new(
            *f,
            q,
            vec![DensePoly::new(*f, vec![Fp::ZERO, Fp::ONE, f.neg(q)]), DensePoly::constant(*f, f.neg(alpha)), DensePoly::one(*f)],
            vec![Fp::ONE, alpha],
        )?,
        HermiteKind::Continuous => {
            let two_a = f.add(alpha, alpha);
            ModRecurrence::new(
                *f,
                q,
                vec![DensePoly::new(*f, vec![Fp::ONE, f.neg(q)]), DensePoly::constant(*f, f.neg(two_a)), DensePoly::one(*f)],
                vec![Fp::ONE, two_a],
            )?
        }
    };
    rec.nth_term(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naive;
    use crate::recurrence::{BivariatePoly, Monomial};
    use crate::testutil::random_recurrence;
    use num_traits::{One, Zero};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: u64 = 1_073_741_827;

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    fn big() -> PrimeField {
        PrimeField::new(P).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn worked_values() {
        let f = f101();
        let two = f.elem(2);
        assert_eq!(nth_term(&QRecurrence::q_factorial(), &f, two, 3).unwrap(), f.elem(21));
        // u_(n+1) - y u_n = 0 gives q^C(N,2).
        let pow = QRecurrence::new(
            1,
            vec![BivariatePoly::new(vec![Monomial::int(0, 1, -1)]), BivariatePoly::new(vec![Monomial::int(0, 0, 1)])],
            vec![BigRational::one()],
        )
        .unwrap();
        assert_eq!(nth_term(&pow, &f, two, 3).unwrap(), f.elem(8));
        let rec = QRecurrence::q_factorial();
        assert_eq!(terms_multi(&rec, &f, two, &[1, 2, 3]).unwrap(), vec![f.elem(1), f.elem(3), f.elem(21)]);
        let (a, b) = (rat(1), rat(0));
        assert_eq!(theta_sum(&f, Fp::ONE, &a, &b, two, 3).unwrap(), f.elem(19));
        assert_eq!(theta_sum(&f, f.elem(7), &a, &b, two, 0).unwrap(), Fp::ZERO);
        assert_eq!(theta_sum(&f, f.elem(7), &a, &b, two, 1).unwrap(), Fp::ONE);
        assert_eq!(q_exp_trunc(&f, f.elem(9), two, 1).unwrap(), Fp::ONE);
        assert_eq!(q_exp_trunc(&f, f.elem(9), two, 2).unwrap(), f.elem(10));
        assert_eq!(q_exp_trunc(&f, Fp::ONE, two, 4).unwrap(), f.elem(12));
        let three = f.elem(3);
        assert_eq!(q_hermite_eval(&f, three, two, 0, HermiteKind::Discrete).unwrap(), Fp::ONE);
        assert_eq!(q_hermite_eval(&f, three, two, 1, HermiteKind::Discrete).unwrap(), three);
        assert_eq!(q_hermite_eval(&f, three, two, 2, HermiteKind::Discrete).unwrap(), f.elem(10));
        assert_eq!(q_hermite_eval(&f, three, two, 2, HermiteKind::Continuous).unwrap(), f.elem(37));
    }

    #[test]
    fn singular_leading_is_localized() {
        let f = f101();
        // c_1 = y - x^2 vanishes at n = 2 when q = 2.
        let rec = QRecurrence::new(
            1,
            vec![
                BivariatePoly::new(vec![Monomial::int(0, 0, 1)]),
                BivariatePoly::new(vec![Monomial::int(0, 1, 1), Monomial::int(2, 0, -1)]),
            ],
            vec![BigRational::one()],
        )
        .unwrap();
        assert!(nth_term(&rec, &f, f.elem(2), 2).is_ok());
        for n in [3, 4, 50, 5000] {
            assert_eq!(nth_term(&rec, &f, f.elem(2), n), Err(Error::SingularLeading(2)));
        }
        assert_eq!(terms_multi(&rec, &f, f.elem(2), &[1, 500]), Err(Error::SingularLeading(2)));
        assert_eq!(naive::naive_nth_term(&rec, &f, f.elem(2), 40), Err(Error::SingularLeading(2)));
    }

    #[test]
    fn index_validation() {
        let f = f101();
        let rec = QRecurrence::q_factorial();
        assert_eq!(terms_multi(&rec, &f, f.elem(2), &[3, 3]), Err(Error::UnsortedIndices));
        assert_eq!(terms_multi(&rec, &f, f.elem(2), &[4, 3]), Err(Error::UnsortedIndices));
        assert_eq!(terms_multi(&rec, &f, f.elem(2), &[1, 2, 3, 4, 5]), Err(Error::TooManyIndices { count: 5, max_index: 5 }));
        assert_eq!(terms_multi(&rec, &f, f.elem(2), &[]).unwrap(), vec![]);
    }

    #[test]
    fn theta_domain() {
        let f = f101();
        let half = BigRational::new(1.into(), 2.into());
        assert!(matches!(
            theta_sum(&f, Fp::ONE, &BigRational::new(1.into(), 3.into()), &rat(0), f.elem(2), 5),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(theta_sum(&f, Fp::ONE, &half, &rat(0), f.elem(2), 5), Err(Error::ParameterDomain(_))));
        assert!(matches!(theta_sum(&f, Fp::ONE, &rat(-1), &rat(0), Fp::ZERO, 5), Err(Error::ParameterDomain(_))));
        // a = 1/2, b = 1/2: exponents n(n+1)/2.
        let got = theta_sum(&f, Fp::ONE, &half, &half, f.elem(3), 30).unwrap();
        assert_eq!(got, naive::naive_theta_sum(&f, Fp::ONE, 1, 1, f.elem(3), 30).unwrap());
        assert_eq!(got, theta_sum_generic(&f, Fp::ONE, &half, &half, f.elem(3), 30).unwrap());
    }

    #[test]
    fn q_exp_brackets_and_q_one() {
        let f = f101();
        // 10 has order 4, so [4]_q = 0 and five terms need it.
        assert!(q_exp_trunc(&f, f.elem(3), f.elem(10), 4).is_ok());
        assert_eq!(q_exp_trunc(&f, f.elem(3), f.elem(10), 5), Err(Error::NonInvertibleBracket(4)));
        // q = 1: sum of alpha^n / n!.
        assert_eq!(q_exp_trunc(&f, Fp::ONE, Fp::ONE, 4).unwrap(), f.elem((1 + 1 + 51 + 17) % 101));
        assert_eq!(q_exp_trunc(&f, Fp::ONE, Fp::ONE, 102), Err(Error::NonInvertibleBracket(101)));
    }

    #[test]
    fn random_recurrences_match_unrolling() {
        let f = big();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r = rng.random_range(1..=4);
            let d = rng.random_range(0..=4);
            let rec = random_recurrence(&mut rng, r, d);
            let q = f.elem(rng.random_range(2..P));
            for n in [0u64, 1, 5, 10, 100, 1000, 4096] {
                assert_eq!(nth_term(&rec, &f, q, n), naive::naive_nth_term(&rec, &f, q, n), "n = {n}");
            }
        }
    }

    #[test]
    fn terms_match_single_calls() {
        let f = big();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let rec = random_recurrence(&mut rng, 2, 2);
            let q = f.elem(rng.random_range(2..P));
            let mut idx: Vec<u64> = (0..30).map(|_| rng.random_range(0..10_000)).collect();
            idx.sort();
            idx.dedup();
            idx.push(10_000);
            let got = terms_multi(&rec, &f, q, &idx);
            let want: Result<Vec<Fp>> = idx.iter().map(|&n| nth_term(&rec, &f, q, n)).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn terms_at_small_order_ratio() {
        let f = big();
        let q = f.pow(f.elem(2), (P - 1) / 59);
        let rec = QRecurrence::theta_squares();
        let idx: Vec<u64> = vec![1, 7, 59, 60, 118, 500, 1234, 5000];
        let want: Vec<Fp> = idx.iter().map(|&n| naive::naive_nth_term(&rec, &f, q, n).unwrap()).collect();
        assert_eq!(terms_multi(&rec, &f, q, &idx).unwrap(), want);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn linear_in_initial_values(
            seed in any::<u64>(),
            x in prop::collection::vec(-100i64..100, 2),
            y in prop::collection::vec(-100i64..100, 2),
            lambda in -50i64..50,
            n in 0u64..3000,
        ) {
            let f = big();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = random_recurrence(&mut rng, 2, 2);
            let q = f.elem(rng.random_range(2..P));
            let with = |v: &[i64]| {
                QRecurrence::new(2, base.coeffs().to_vec(), v.iter().map(|&c| rat(c)).collect()).unwrap()
            };
            let mix: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + lambda * b).collect();
            let lhs = nth_term(&with(&mix), &f, q, n);
            let (a, b) = (nth_term(&with(&x), &f, q, n), nth_term(&with(&y), &f, q, n));
            match (lhs, a, b) {
                (Ok(l), Ok(a), Ok(b)) => prop_assert_eq!(l, f.add(a, f.mul(f.from_i64(lambda), b))),
                (l, a, _) => prop_assert_eq!(l.is_err(), a.is_err()),
            }
        }

        #[test]
        fn theta_paths_agree(p in 0..P, two_a in 0i64..4, ab in -3i64..4, q in 1..P, n in 0u64..10_000) {
            let f = big();
            let (p, q) = (f.elem(p), f.elem(q));
            let a = BigRational::new(two_a.into(), 2.into());
            let b = rat(ab) - &a;
            let fast = theta_sum(&f, p, &a, &b, q, n).unwrap();
            prop_assert_eq!(fast, naive::naive_theta_sum(&f, p, two_a, ab, q, n).unwrap());
            prop_assert_eq!(fast, theta_sum_generic(&f, p, &a, &b, q, n).unwrap());
        }

        #[test]
        fn q_exp_increments(alpha in 0..P, q in 2..P, n in 1u64..2000) {
            let f = big();
            let (alpha, q) = (f.elem(alpha), f.elem(q));
            let step = f.sub(q_exp_trunc(&f, alpha, q, n + 1).unwrap(), q_exp_trunc(&f, alpha, q, n).unwrap());
            let fact = crate::special::q_factorial(&f, q, n);
            prop_assert_eq!(step, f.div(f.pow(alpha, n), fact).unwrap());
        }

        #[test]
        fn hermite_matches_unrolling(alpha in 0..P, q in 0..P, n in 0u64..1500) {
            let f = big();
            let (alpha, q) = (f.elem(alpha), f.elem(q));
            for kind in [HermiteKind::Discrete, HermiteKind::Continuous] {
                let scale = if kind == HermiteKind::Discrete { alpha } else { f.add(alpha, alpha) };
                let (mut a, mut b) = (Fp::ONE, scale);
                let mut qk = Fp::ONE;
                for _ in 0..n {
                    // next = scale * b - (1 - q^(k+1)) (q^k or 1) a
                    let qk1 = f.mul(qk, q);
                    let w = if kind == HermiteKind::Discrete { f.mul(f.sub(Fp::ONE, qk1), qk) } else { f.sub(Fp::ONE, qk1) };
                    let next = f.sub(f.mul(scale, b), f.mul(w, a));
                    (a, b) = (b, next);
                    qk = qk1;
                }
                prop_assert_eq!(q_hermite_eval(&f, alpha, q, n, kind).unwrap(), a);
            }
        }
    }

    #[test]
    fn zero_is_allowed_in_data() {
        let _ = BigRational::zero();
    }
}
