//! q-factorials, q-Pochhammer symbols, Gaussian binomials and truncated
//! q-series, all mod p.

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::geom::{chirp_eval, linear_qshift_product};
use crate::matrix::isqrt;
use crate::poly::{prod_of_evals, DensePoly};

fn naive_geom(f: &PrimeField, alpha: Fp, q: Fp, start: Fp, count: u64) -> Fp {
    let mut acc = Fp::ONE;
    let mut x = start;
    for _ in 0..count {
        acc = f.mul(acc, f.sub(alpha, x));
        x = f.mul(x, q);
    }
    acc
}

/// `F(alpha) = prod_{i<N} (alpha - q^i)` with `O(M(sqrt N))` operations.
///
/// One polynomial `H(x) = prod_{i<s} (alpha - q^i x)` is evaluated at the
/// giant points `q^(s j)`; the few factors past the last full block are
/// multiplied in directly.
pub fn geometric_point_product(f: &PrimeField, alpha: Fp, q: Fp, n: u64) -> Fp {
    if n == 0 {
        return Fp::ONE;
    }
    if q.is_zero() {
        return f.mul(f.sub(alpha, Fp::ONE), f.pow(alpha, n - 1));
    }
    if q == Fp::ONE {
        return f.pow(f.sub(alpha, Fp::ONE), n);
    }
    let s = isqrt(n);
    if s < 2 {
        return naive_geom(f, alpha, q, Fp::ONE, n);
    }
    if let Some(ord) = f.order_at_most(q, s) {
        // q^ord = 1: blocks of ord consecutive factors repeat.
        let period = naive_geom(f, alpha, q, Fp::ONE, ord);
        let head = naive_geom(f, alpha, q, Fp::ONE, n % ord);
        return f.mul(head, f.pow(period, n / ord));
    }
    let h = linear_qshift_product(f, alpha, q, s);
    let count = n / s;
    let big_q = f.pow(q, s);
    let vals = chirp_eval(&h, big_q, count as usize).expect("q is nonzero");
    let acc = vals.into_iter().fold(Fp::ONE, |a, v| f.mul(a, v));
    let tail = naive_geom(f, alpha, q, f.pow(q, s * count), n - s * count);
    f.mul(acc, tail)
}

/// Same value as [`geometric_point_product`], by evaluating
/// `H(x) = prod_{k<m} (alpha - Q^k x)` with `Q = q^s` at `1, q, ..., q^(s-1)`
/// through a subproduct tree. Slower; kept as a reference path.
pub fn alg1_product(f: &PrimeField, alpha: Fp, q: Fp, n: u64) -> Fp {
    if n == 0 {
        return Fp::ONE;
    }
    let s = isqrt(n).max(1);
    let m = n / s;
    let h = linear_qshift_product(f, alpha, f.pow(q, s), m);
    let roots = f.batch_powers(q, s as usize).values;
    let acc = prod_of_evals(&roots, &h);
    f.mul(acc, naive_geom(f, alpha, q, f.pow(q, s * m), n - s * m))
}

/// `[N]_q! = prod_{k=1}^N (1 + q + ... + q^(k-1))`.
pub fn q_factorial(f: &PrimeField, q: Fp, n: u64) -> Fp {
    if q.is_zero() {
        return Fp::ONE;
    }
    if q == Fp::ONE {
        return (1..=n).fold(Fp::ONE, |acc, k| f.mul(acc, f.elem(k)));
    }
    // [N]_q! = r^N F(1/q) with r = q / (1 - q).
    let r = f.div(q, f.sub(Fp::ONE, q)).expect("q != 1");
    let qi = f.inv(q).expect("q != 0");
    f.mul(f.pow(r, n), geometric_point_product(f, qi, q, n))
}

/// `(alpha; q)_N = prod_{k<N} (1 - alpha q^k)`.
pub fn q_pochhammer(f: &PrimeField, alpha: Fp, q: Fp, n: u64) -> Fp {
    if alpha.is_zero() || n == 0 {
        return Fp::ONE;
    }
    if q.is_zero() {
        return f.sub(Fp::ONE, alpha);
    }
    let ai = f.inv(alpha).expect("alpha != 0");
    f.mul(f.pow(alpha, n), geometric_point_product(f, ai, q, n))
}

/// Smallest `j` in `1..=limit` with `[j]_q = 0`.
fn vanishing_bracket(f: &PrimeField, q: Fp, limit: u64) -> Option<u64> {
    if q == Fp::ONE {
        return (limit >= f.modulus()).then(|| f.modulus());
    }
    let mut x = q;
    for j in 1..=limit {
        if x == Fp::ONE {
            return Some(j);
        }
        x = f.mul(x, q);
    }
    None
}

/// Gaussian binomial `[N]! / ([k]! [N-k]!)`.
pub fn q_binomial(f: &PrimeField, n: u64, k: u64, q: Fp) -> Result<Fp> {
    if k > n {
        return Err(Error::IndexOutOfRange { n, k });
    }
    let top = q_factorial(f, q, n);
    let den = f.mul(q_factorial(f, q, k), q_factorial(f, q, n - k));
    if den.is_zero() {
        let j = vanishing_bracket(f, q, k.max(n - k)).unwrap_or(0);
        return Err(Error::NonInvertibleDenominator(j));
    }
    f.div(top, den)
}

fn binom2(n: u64) -> u128 {
    n as u128 * n.saturating_sub(1) as u128 / 2
}

/// Coefficient of `x^n` in `prod_{k=1}^N (1 + q^(k-1) x)`.
pub fn binomial_theorem_coeff(f: &PrimeField, n_total: u64, n: u64, q: Fp) -> Result<Fp> {
    Ok(f.mul(q_binomial(f, n_total, n, q)?, f.pow_u128(q, binom2(n))))
}

/// `sum_k q^(k^2) binom(N-n, k)_q binom(n, k)_q`, evaluated through its
/// closed form `binom(N, n)_q`.
pub fn vandermonde_sum(f: &PrimeField, n_total: u64, n: u64, q: Fp) -> Result<Fp> {
    q_binomial(f, n_total, n, q)
}

/// `prod_{i>=1} (1 - q^i)` truncated mod `q^N`, summed over pentagonal
/// exponents below `N`.
pub fn euler_pentagonal_eval(f: &PrimeField, n: u64, q: Fp) -> Fp {
    let mut acc = Fp::ONE;
    // Exponents i(3i-1)/2 and i(3i+1)/2 grow by 3i+1 and 3i+2.
    let q3 = f.pow(q, 3);
    let (mut e1, mut e2) = (0u64, 0u64);
    let (mut a1, mut a2) = (Fp::ONE, Fp::ONE);
    let (mut d1, mut d2) = (q, f.mul(q, q));
    let mut i = 0u64;
    loop {
        e1 += 3 * i + 1;
        e2 += 3 * i + 2;
        a1 = f.mul(a1, d1);
        a2 = f.mul(a2, d2);
        d1 = f.mul(d1, q3);
        d2 = f.mul(d2, q3);
        i += 1;
        if e1 >= n {
            break;
        }
        let mut term = a1;
        if e2 < n {
            term = f.add(term, a2);
        }
        acc = if i % 2 == 1 { f.sub(acc, term) } else { f.add(acc, term) };
    }
    acc
}

/// `prod_{k>=1} (1 - q^k)^3` truncated mod `q^N`, as
/// `sum_{C(n+1,2) < N} (-1)^n (2n+1) q^C(n+1,2)`.
pub fn cube_eta_eval(f: &PrimeField, n: u64, q: Fp) -> Fp {
    let mut acc = Fp::ZERO;
    let (mut e, mut qe, mut step) = (0u64, Fp::ONE, q);
    let mut k = 0u64;
    while e < n {
        let term = f.mul(f.elem(2 * k + 1), qe);
        acc = if k % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
        k += 1;
        e += k;
        qe = f.mul(qe, step);
        step = f.mul(step, q);
    }
    acc
}

/// `q_factorial` through the first-order bracket recurrence, as a cross-check
/// between the two product kernels.
pub fn q_factorial_via_scalar_product(f: &PrimeField, q: Fp, n: u64) -> Result<Fp> {
    if q == Fp::ONE {
        return Ok(q_factorial(f, q, n));
    }
    // [k+1]_q = (1 - q x)/(1 - q) at x = q^k.
    let c = f.inv(f.sub(Fp::ONE, q))?;
    let h = DensePoly::new(*f, vec![c, f.neg(f.mul(q, c))]);
    crate::matrix::scalar_q_product(&h, q, n)
}
