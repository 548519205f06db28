//! Timing harness for `prod_(i<N) (alpha - q^i)` across the four methods.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::matrix::{matrix_q_factorial, PolyMatrix};
use crate::naive::naive_geom_product;
use crate::poly::DensePoly;
use crate::special::{alg1_product, geometric_point_product};

pub const CSV_HEADER: [&str; 4] = ["algo", "N", "median_seconds", "result_checksum"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchAlgo {
    /// One multiplication per factor.
    Naive,
    /// Subproduct tree over the baby-step roots.
    Alg1,
    /// Chirp evaluation at the giant-step points.
    Alg2,
    /// The general matrix q-factorial on the 1x1 matrix `[alpha - x]`.
    Alg3,
}

impl BenchAlgo {
    pub const ALL: [BenchAlgo; 4] = [BenchAlgo::Naive, BenchAlgo::Alg1, BenchAlgo::Alg2, BenchAlgo::Alg3];

    pub fn run(self, f: &PrimeField, alpha: Fp, q: Fp, n: u64) -> Fp {
        match self {
            BenchAlgo::Naive => naive_geom_product(f, alpha, q, n),
            BenchAlgo::Alg1 => alg1_product(f, alpha, q, n),
            BenchAlgo::Alg2 => geometric_point_product(f, alpha, q, n),
            BenchAlgo::Alg3 => {
                let m = PolyMatrix::new(*f, 1, vec![DensePoly::new(*f, vec![alpha, f.neg(Fp::ONE)])]).expect("1x1");
                matrix_q_factorial(&m, q, n).expect("1x1").get(0, 0)
            }
        }
    }
}

impl fmt::Display for BenchAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchAlgo::Naive => "naive",
            BenchAlgo::Alg1 => "alg1",
            BenchAlgo::Alg2 => "alg2",
            BenchAlgo::Alg3 => "alg3",
        })
    }
}

impl FromStr for BenchAlgo {
    type Err = Error;

    fn from_str(s: &str) -> Result<BenchAlgo> {
        BenchAlgo::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| Error::parse("algorithm", format!("{s:?} is not one of naive, alg1, alg2, alg3")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub algo: BenchAlgo,
    pub n: u64,
    pub median_seconds: f64,
    /// The computed product, so runs double as correctness checks.
    pub checksum: u64,
}

/// `(alpha, q)` for a seed, with `q` outside `{0, 1}`.
pub fn bench_inputs(f: &PrimeField, seed: u64) -> (Fp, Fp) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = f.random(&mut rng);
    let q = f.elem(rng.random_range(2..f.modulus()));
    (alpha, q)
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// One row per size, each the median of `trials` runs.
pub fn run_bench(algo: BenchAlgo, sizes: &[u64], f: &PrimeField, trials: usize, seed: u64) -> Vec<BenchRow> {
    let (alpha, q) = bench_inputs(f, seed);
    sizes
        .iter()
        .map(|&n| {
            let mut times = Vec::with_capacity(trials.max(1));
            let mut value = Fp::ZERO;
            for _ in 0..trials.max(1) {
                let t = Instant::now();
                value = std::hint::black_box(algo.run(f, alpha, q, n));
                times.push(t.elapsed().as_secs_f64());
            }
            BenchRow { algo, n, median_seconds: median(times), checksum: value.value() }
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([r.algo.to_string(), r.n.to_string(), format!("{:.6e}", r.median_seconds), r.checksum.to_string()])?;
    }
    w.flush()
}
