//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qnth --test acceptance`. The process exits
//! non-zero when a hard criterion fails; the arithmetic scaling check (4) is
//! soft and only reported.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qnth::bench::{run_bench, BenchAlgo};
use qnth::curvature::{curvature_scan, QDifferenceSystem, RationalEntry, Verdict};
use qnth::exact::exact_nth_term;
use qnth::field::{is_prime, Fp, PrimeField};
use qnth::holonomic::{nth_term, terms_multi, theta_sum, theta_sum_generic};
use qnth::matrix::FactorialOptions;
use qnth::naive::{naive_geom_product, naive_nth_term};
use qnth::recurrence::{BivariatePoly, Monomial, QRecurrence};
use qnth::special::{alg1_product, binomial_theorem_coeff, geometric_point_product, q_binomial};

const P: u64 = (1 << 30) + 3;

// Pinned limits.
const IDENTITY_BUDGET: Duration = Duration::from_secs(10);
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const FAST_RATIO_MAX: f64 = 2.8;
const NAIVE_RATIO_MIN: f64 = 3.3;
const EXACT_RATIO_MAX: f64 = 4.8;
const SHORTCUT_FRACTION_MAX: f64 = 0.01;
const TRIALS: usize = 3;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed += 1;
        }
    }

    fn soft(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} criterion {id} (soft): {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn field() -> PrimeField {
    PrimeField::new(P).unwrap()
}

fn random_q(f: &PrimeField, rng: &mut impl Rng) -> Fp {
    f.elem(rng.random_range(2..f.modulus()))
}

fn median_time<T>(trials: usize, mut run: impl FnMut() -> T) -> (f64, T) {
    let mut times = Vec::with_capacity(trials);
    let mut last = None;
    for _ in 0..trials {
        let t = Instant::now();
        last = Some(std::hint::black_box(run()));
        times.push(t.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    (times[trials / 2], last.unwrap())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn fmt_ratios(rs: &[f64]) -> String {
    rs.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(" ")
}

/// Random `r`-th order recurrence, bidegree below `(3, d + 1)`, full-size
/// coefficients.
fn random_recurrence(rng: &mut impl Rng, r: usize, d: u32) -> QRecurrence {
    loop {
        let coeffs = (0..=r)
            .map(|_| {
                let terms = (0..rng.random_range(1..6))
                    .map(|_| Monomial::int(rng.random_range(0..3), rng.random_range(0..=d), rng.random_range(-(1i64 << 40)..1 << 40)))
                    .collect();
                BivariatePoly::new(terms)
            })
            .collect();
        let initials = (0..r).map(|_| BigRational::from_integer(rng.random_range(-(1i64 << 40)..1 << 40).into())).collect();
        if let Ok(rec) = QRecurrence::new(r, coeffs, initials) {
            return rec;
        }
    }
}

/// Gaussian binomials by the q-Pascal rule, independent of factorial division.
fn pascal_table(f: &PrimeField, q: Fp, n: usize) -> Vec<Vec<Fp>> {
    let mut rows = vec![vec![Fp::ONE]];
    for m in 1..=n {
        let prev = &rows[m - 1];
        let mut row = vec![Fp::ONE; m + 1];
        for k in 1..m {
            // binom(m, k) = binom(m-1, k-1) + q^k binom(m-1, k)
            row[k] = f.add(prev[k - 1], f.mul(f.pow(q, k as u64), prev[k]));
        }
        rows.push(row);
    }
    rows
}

fn criterion_1(rep: &mut Report) {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut theorem_ok = true;
    for n in 0..=64u64 {
        for _ in 0..10 {
            let (q, x) = (random_q(&f, &mut rng), f.random(&mut rng));
            let direct = (1..=n).fold(Fp::ONE, |acc, k| f.mul(acc, f.add(Fp::ONE, f.mul(f.pow(q, k - 1), x))));
            let series =
                (0..=n).try_fold(Fp::ZERO, |acc, j| binomial_theorem_coeff(&f, n, j, q).map(|c| f.add(acc, f.mul(c, f.pow(x, j)))));
            theorem_ok &= series == Ok(direct);
        }
    }
    let mut vandermonde_ok = true;
    for _ in 0..10 {
        let q = random_q(&f, &mut rng);
        let table = pascal_table(&f, q, 64);
        for m in 0..=32usize {
            for n in 0..=32usize {
                let lhs = (0..=m.min(n)).fold(Fp::ZERO, |acc, k| {
                    let term = f.mul(f.pow(q, (k * k) as u64), f.mul(table[m][k], table[n][k]));
                    f.add(acc, term)
                });
                vandermonde_ok &= q_binomial(&f, (m + n) as u64, n as u64, q) == Ok(lhs);
            }
        }
    }
    let took = start.elapsed();
    rep.line(
        "1",
        theorem_ok && vandermonde_ok && took < IDENTITY_BUDGET,
        format!(
            "q-binomial theorem {theorem_ok}, q-Vandermonde {vandermonde_ok}, {:.2}s (limit {}s)",
            took.as_secs_f64(),
            IDENTITY_BUDGET.as_secs()
        ),
    );
}

fn criterion_2(rep: &mut Report) {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let (mut rec_ok, mut singular) = (0, 0);
    for _ in 0..200 {
        let r = rng.random_range(1..=4);
        let d = rng.random_range(0..=4);
        let rec = random_recurrence(&mut rng, r, d);
        let q = random_q(&f, &mut rng);
        let good = [10u64, 100, 1000, 4096].iter().all(|&n| {
            let fast = nth_term(&rec, &f, q, n);
            singular += fast.is_err() as usize;
            fast == naive_nth_term(&rec, &f, q, n)
        });
        rec_ok += good as usize;
    }
    let mut geom_ok = 0;
    for _ in 0..1000 {
        let (alpha, q) = (f.random(&mut rng), random_q(&f, &mut rng));
        let n = rng.random_range(0..=1u64 << 14);
        let fast = geometric_point_product(&f, alpha, q, n);
        geom_ok += (fast == naive_geom_product(&f, alpha, q, n) && fast == alg1_product(&f, alpha, q, n)) as usize;
    }
    let took = start.elapsed();
    rep.line(
        "2",
        rec_ok == 200 && geom_ok == 1000 && took < ORACLE_BUDGET,
        format!(
            "nth_term = naive on {rec_ok}/200 recurrences ({singular} singular cases agreed as errors), geometric products {geom_ok}/1000, {:.1}s (limit {}s)",
            took.as_secs_f64(),
            ORACLE_BUDGET.as_secs()
        ),
    );
}

fn criterion_3(rep: &mut Report) {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ok = 0;
    let mut total = 0;
    for n in [10_000u64, 1_000_000] {
        let k = (n as f64).sqrt() as usize;
        for _ in 0..20 {
            let r = rng.random_range(1..=3);
            let d = rng.random_range(0..=2);
            let rec = random_recurrence(&mut rng, r, d);
            let q = random_q(&f, &mut rng);
            let mut idx: Vec<u64> = (0..k - 1).map(|_| rng.random_range(0..n)).collect();
            idx.push(n);
            idx.sort_unstable();
            idx.dedup();
            let many = terms_multi(&rec, &f, q, &idx);
            let single: Result<Vec<Fp>, _> = idx.iter().map(|&i| nth_term(&rec, &f, q, i)).collect();
            total += 1;
            ok += match (&many, &single) {
                (Ok(a), Ok(b)) => a == b,
                // A vanishing leading coefficient must be reported by both.
                (Err(_), Err(_)) => true,
                _ => false,
            } as usize;
        }
    }
    rep.line("3", ok == total, format!("terms_multi = per-index nth_term on {ok}/{total} runs (N in 1e4, 1e6)"));
}

fn ratios(times: &[f64], step: usize) -> Vec<f64> {
    times.windows(step + 1).map(|w| w[step] / w[0]).collect()
}

fn criterion_4(rep: &mut Report) {
    let f = field();
    let sizes: Vec<u64> = (16..=24).map(|e| 1u64 << e).collect();
    let mut lines = Vec::new();
    let mut pass = true;
    for algo in [BenchAlgo::Naive, BenchAlgo::Alg2, BenchAlgo::Alg3] {
        let rows = run_bench(algo, &sizes, &f, TRIALS, 4);
        let times: Vec<f64> = rows.iter().map(|r| r.median_seconds).collect();
        // Sizes double, so a 4x step is two rows apart.
        let rs = ratios(&times, 2);
        let m = median(rs.clone());
        let good = if algo == BenchAlgo::Naive { m >= NAIVE_RATIO_MIN } else { m <= FAST_RATIO_MAX };
        pass &= good;
        lines.push(format!("{algo} median {m:.2} [{}]", fmt_ratios(&rs)));
    }
    rep.soft(
        "4",
        pass,
        format!("per-4x time ratios, N = 2^16..2^24 ({}; fast <= {FAST_RATIO_MAX}, naive >= {NAIVE_RATIO_MIN})", lines.join("; ")),
    );
}

fn random_prime(rng: &mut impl Rng) -> u64 {
    loop {
        let p = rng.random_range(1u64 << 40..1 << 62) | 1;
        if is_prime(p) {
            return p;
        }
    }
}

fn criterion_5(rep: &mut Report) {
    let rec = QRecurrence::q_factorial();
    let q = BigRational::from_integer(2.into());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut times = Vec::new();
    let (mut bits_ok, mut modp_ok) = (true, true);
    let mut bit_detail = Vec::new();
    for e in 8..=12u32 {
        let n = 1u64 << e;
        let (t, v) = median_time(TRIALS, || exact_nth_term(&rec, &q, n).unwrap());
        times.push(t);
        let bits = v.numer().bits();
        // bitlen(2^k) = k + 1
        let (lo, hi) = (n * (n - 1) / 2 + 1, n * (n + 1) / 2 + 1);
        bits_ok &= v.denom().is_one() && lo <= bits && bits <= hi;
        bit_detail.push(format!("2^{e}: {bits} in [{lo}, {hi}]"));
        for _ in 0..10 {
            let p = random_prime(&mut rng);
            let f = PrimeField::new(p).unwrap();
            let expect = f.from_bigint(v.numer());
            modp_ok &= nth_term(&rec, &f, f.elem(2), n) == Ok(expect);
        }
    }
    let rs = ratios(&times, 1);
    let ratio_ok = rs.iter().all(|&r| r <= EXACT_RATIO_MAX);
    rep.line("5a", bits_ok, format!("output bit lengths within bounds ({})", bit_detail.join(", ")));
    rep.line(
        "5b",
        ratio_ok,
        format!(
            "time ratio per doubling, N = 2^8..2^12: [{}] (limit {EXACT_RATIO_MAX}); medians {}",
            fmt_ratios(&rs),
            times.iter().map(|t| format!("{t:.3e}")).collect::<Vec<_>>().join(" ")
        ),
    );
    rep.line("5c", modp_ok, "exact values reduced mod 10 random primes match the F_p path at every N".into());
}

fn criterion_6(rep: &mut Report) {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let one = BigRational::one();
    let zero = BigRational::from_integer(BigInt::from(0));
    let q = random_q(&f, &mut rng);
    let mut direct = Fp::ZERO;
    let mut direct_ok = true;
    for n in 0..=10_000u64 {
        direct_ok &= theta_sum(&f, Fp::ONE, &one, &zero, q, n) == Ok(direct);
        direct = f.add(direct, f.pow(q, n * n));
    }
    let n = 1_000_000;
    let mut paths_ok = true;
    let half = BigRational::new(1.into(), 2.into());
    for (pp, a, b) in
        [(Fp::ONE, &one, &zero), (f.random(&mut rng), &half, &half), (f.random(&mut rng), &one, &BigRational::from_integer((-3).into()))]
    {
        let fast = theta_sum(&f, pp, a, b, q, n);
        paths_ok &= fast.is_ok() && fast == theta_sum_generic(&f, pp, a, b, q, n);
    }
    rep.line(
        "6",
        direct_ok && paths_ok,
        format!("theta_sum(1,1,0) = direct sum for all N <= 1e4: {direct_ok}; specialized = generic path at N = 1e6: {paths_ok}"),
    );
}

fn criterion_7(rep: &mut Report) {
    let q = BigRational::from_integer(2.into());
    let constant_q = QDifferenceSystem::new(1, vec![RationalEntry::polynomial(BivariatePoly::new(vec![Monomial::int(1, 0, 1)]))]).unwrap();
    let scan = curvature_scan(&constant_q, &q, 1000, 7);
    let rational_ok = scan.non_identity_count() == 0 && scan.identity_count() > 0;
    let x = QDifferenceSystem::new(1, vec![RationalEntry::polynomial(BivariatePoly::new(vec![Monomial::int(0, 1, 1)]))]).unwrap();
    let scan_x = curvature_scan(&x, &q, 1000, 7);
    let mut mismatches = 0;
    for r in &scan_x.results {
        // (2|p) = 1 exactly when p = +-1 mod 8.
        let expect = matches!(r.p % 8, 1 | 7);
        match &r.verdict {
            Verdict::Identity => mismatches += (!expect) as usize,
            Verdict::NonIdentity => mismatches += expect as usize,
            Verdict::Skipped(_) => mismatches += (r.p != 2) as usize,
        }
    }
    rep.line(
        "7",
        rational_ok && mismatches == 0,
        format!(
            "y(qx) = q y(x): {} identity, {} non-identity, {} skipped; A = [x]: {} primes, {mismatches} disagree with the p = +-1 mod 8 rule",
            scan.identity_count(),
            scan.non_identity_count(),
            scan.skipped_count(),
            scan_x.results.len()
        ),
    );
}

/// An element of exact multiplicative order `n`.
fn element_of_order(f: &PrimeField, n: u64, rng: &mut impl Rng) -> Option<Fp> {
    let p1 = f.modulus() - 1;
    if p1 % n != 0 {
        return None;
    }
    let divisors: Vec<u64> = (1..n).filter(|d| n % d == 0).collect();
    loop {
        let q = f.pow(f.random_nonzero(rng), p1 / n);
        if divisors.iter().all(|&d| f.pow(q, d) != Fp::ONE) {
            return Some(q);
        }
    }
}

fn criterion_8(rep: &mut Report) {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n_big = 1_000_000u64;
    let plain = FactorialOptions { root_of_unity_shortcut: false };
    let orders: Vec<u64> = (2..=100).filter(|&n| (f.modulus() - 1) % n == 0).collect();
    let mut details = Vec::new();
    let mut pass = !orders.is_empty();
    for &order in &orders {
        let q = element_of_order(&f, order, &mut rng).unwrap();
        let (rec, m) = loop {
            let rec = random_recurrence(&mut rng, 2, 2);
            let m = rec.reduce(&f, q).unwrap();
            // The leading coefficient only takes `order` values here.
            if m.nth_term(n_big).is_ok() {
                break (rec, m);
            }
        };
        let expect = naive_nth_term(&rec, &f, q, n_big);
        let (t_fast, fast) = median_time(TRIALS, || m.nth_term(n_big));
        let (t_generic, generic) = median_time(TRIALS, || m.nth_term_with(n_big, plain));
        let fraction = t_fast / t_generic;
        let good = fast == expect && generic == expect && fraction < SHORTCUT_FRACTION_MAX;
        pass &= good;
        details.push(format!("order {order}: {:.3}%", 100.0 * fraction));
    }
    rep.line(
        "8",
        pass,
        format!(
            "shortcut value = naive at N = 1e6 and time fraction of generic path (limit {:.0}%): {}",
            100.0 * SHORTCUT_FRACTION_MAX,
            details.join(", ")
        ),
    );
}

fn main() -> ExitCode {
    // `cargo test -- --list` should not run the whole suite.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut rep = Report { failed: 0 };
    criterion_1(&mut rep);
    criterion_2(&mut rep);
    criterion_3(&mut rep);
    criterion_4(&mut rep);
    criterion_5(&mut rep);
    criterion_6(&mut rep);
    criterion_7(&mut rep);
    criterion_8(&mut rep);
    println!("acceptance: {} hard criteria failed", rep.failed);
    if rep.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
