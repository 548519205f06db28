//! `qnth`: terms of q-holonomic sequences from the command line.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 when a well-formed
//! computation hits a zero divisor. Errors go to stderr as
//! `error[input]: ...` or `error[compute]: ...`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use qnth::bench::{run_bench, write_csv, BenchAlgo};
use qnth::curvature::{curvature_cyclotomic, curvature_mod_p, curvature_scan, QDifferenceSystem};
use qnth::error::Error;
use qnth::exact::exact_nth_term;
use qnth::field::{Fp, PrimeField};
use qnth::format::{format_rational, parse_indices, parse_rational, parse_recurrence, parse_system};
use qnth::holonomic::{q_exp_trunc, q_hermite_eval, terms_multi, theta_sum, HermiteKind};
use qnth::recurrence::QRecurrence;
use qnth::special::{cube_eta_eval, euler_pentagonal_eval, q_binomial, q_factorial, q_pochhammer};

const DEFAULT_PRIME: u64 = 1_073_741_827;

#[derive(Parser, Debug)]
#[command(name = "qnth", version, about = "Terms of q-holonomic sequences mod p and over Q")]
struct Cli {
    /// Prime modulus for the mod-p commands.
    #[arg(long = "mod", global = true, default_value_t = DEFAULT_PRIME, value_name = "P")]
    modulus: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct QN {
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    #[arg(long = "N", value_name = "N")]
    n: u64,
}

#[derive(Args, Debug)]
struct AlphaQN {
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[command(flatten)]
    qn: QN,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Discrete,
    Continuous,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// [N]_q!
    Fact(QN),
    /// (alpha; q)_N
    Poch(AlphaQN),
    /// Gaussian binomial binom(N, k)_q.
    Binom {
        #[command(flatten)]
        qn: QN,
        #[arg(long)]
        k: u64,
    },
    /// N-th term of the recurrence in a JSON file.
    Nth {
        #[arg(long)]
        rec: PathBuf,
        #[command(flatten)]
        qn: QN,
    },
    /// Several terms at strictly increasing indices.
    Terms {
        #[arg(long)]
        rec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        indices: String,
    },
    /// sum_(n<N) p^n q^(a n^2 + b n) with 2a and a + b integers.
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        qn: QN,
    },
    /// sum_(n<N) alpha^n / [n]_q!
    Exp(AlphaQN),
    /// Discrete or continuous q-Hermite polynomial at alpha.
    Hermite {
        #[command(flatten)]
        args: AlphaQN,
        #[arg(long, value_enum, default_value = "discrete")]
        kind: Kind,
    },
    /// prod_(k>=1) (1 - q^k) truncated mod q^N.
    Pentagonal(QN),
    /// prod_(k>=1) (1 - q^k)^3 truncated mod q^N.
    Eta3(QN),
    /// Exact N-th term over Q for a rational q.
    Exact {
        #[arg(long)]
        rec: PathBuf,
        #[command(flatten)]
        qn: QN,
    },
    /// Curvature of a q-difference system: one prime, a scan, or mod Phi_n.
    Curvature {
        #[arg(long, alias = "system")]
        rec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Scan every prime up to this bound instead of using --mod.
        #[arg(long)]
        prime_bound: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Base point for a single prime.
        #[arg(long, default_value_t = 1)]
        x0: u64,
        /// Work in F_p[q]/Phi_n for this prime n.
        #[arg(long)]
        cyclotomic: Option<u64>,
    },
    /// Time prod_(i<N) (alpha - q^i) and write CSV.
    Bench {
        /// naive, alg1, alg2 or alg3; all four when omitted.
        #[arg(long)]
        algo: Option<String>,
        #[arg(long = "N", value_name = "N", value_delimiter = ',')]
        sizes: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

type Outcome = Result<String, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

/// An integer reduced mod p; fractions are only accepted by `exact` and `curvature`.
fn elem(f: &PrimeField, s: &str, what: &str) -> Result<Fp, Failure> {
    let v = parse_rational(s).map_err(|e| input(format!("--{what}: {e}")))?;
    if !v.is_integer() {
        return Err(input(format!("--{what}: expected an integer, got {s}")));
    }
    Ok(f.from_bigint(v.numer()))
}

fn rational(s: &str, what: &str) -> Result<BigRational, Failure> {
    parse_rational(s).map_err(|e| input(format!("--{what}: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn integral_recurrence(path: &Path) -> Result<QRecurrence, Failure> {
    let rec = parse_recurrence(&read(path)?)?;
    if !rec.is_integral() {
        return Err(input("rational coefficients or initial values are only accepted by `exact`"));
    }
    Ok(rec)
}

fn system(path: &Path) -> Result<QDifferenceSystem, Failure> {
    Ok(parse_system(&read(path)?)?)
}

fn field(p: u64) -> Result<PrimeField, Failure> {
    Ok(PrimeField::new(p)?)
}

fn run(cli: Cli) -> Outcome {
    let p = cli.modulus;
    match cli.cmd {
        Cmd::Fact(a) => {
            let f = field(p)?;
            Ok(q_factorial(&f, elem(&f, &a.q, "q")?, a.n).to_string())
        }
        Cmd::Poch(a) => {
            let f = field(p)?;
            Ok(q_pochhammer(&f, elem(&f, &a.alpha, "alpha")?, elem(&f, &a.qn.q, "q")?, a.qn.n).to_string())
        }
        Cmd::Binom { qn, k } => {
            let f = field(p)?;
            Ok(q_binomial(&f, qn.n, k, elem(&f, &qn.q, "q")?)?.to_string())
        }
        Cmd::Nth { rec, qn } => {
            let f = field(p)?;
            let r = integral_recurrence(&rec)?;
            Ok(qnth::holonomic::nth_term(&r, &f, elem(&f, &qn.q, "q")?, qn.n)?.to_string())
        }
        Cmd::Terms { rec, q, indices } => {
            let f = field(p)?;
            let r = integral_recurrence(&rec)?;
            let idx = parse_indices(&indices)?;
            let vals = terms_multi(&r, &f, elem(&f, &q, "q")?, &idx)?;
            Ok(vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        }
        Cmd::Theta { p: pp, a, b, qn } => {
            let f = field(p)?;
            let (pp, q) = (elem(&f, &pp, "p")?, elem(&f, &qn.q, "q")?);
            Ok(theta_sum(&f, pp, &rational(&a, "a")?, &rational(&b, "b")?, q, qn.n)?.to_string())
        }
        Cmd::Exp(a) => {
            let f = field(p)?;
            if a.qn.n == 0 {
                return Err(input("--N must be positive"));
            }
            Ok(q_exp_trunc(&f, elem(&f, &a.alpha, "alpha")?, elem(&f, &a.qn.q, "q")?, a.qn.n)?.to_string())
        }
        Cmd::Hermite { args, kind } => {
            let f = field(p)?;
            let kind = match kind {
                Kind::Discrete => HermiteKind::Discrete,
                Kind::Continuous => HermiteKind::Continuous,
            };
            Ok(q_hermite_eval(&f, elem(&f, &args.alpha, "alpha")?, elem(&f, &args.qn.q, "q")?, args.qn.n, kind)?.to_string())
        }
        Cmd::Pentagonal(a) | Cmd::Eta3(a) if a.n == 0 => Err(input("--N must be positive")),
        Cmd::Pentagonal(a) => {
            let f = field(p)?;
            Ok(euler_pentagonal_eval(&f, a.n, elem(&f, &a.q, "q")?).to_string())
        }
        Cmd::Eta3(a) => {
            let f = field(p)?;
            Ok(cube_eta_eval(&f, a.n, elem(&f, &a.q, "q")?).to_string())
        }
        Cmd::Exact { rec, qn } => {
            let r = parse_recurrence(&read(&rec)?)?;
            Ok(format_rational(&exact_nth_term(&r, &rational(&qn.q, "q")?, qn.n)?))
        }
        Cmd::Curvature { rec, q, prime_bound, seed, x0, cyclotomic } => {
            let sys = system(&rec)?;
            let q = rational(&q, "q")?;
            if let Some(bound) = prime_bound {
                return Ok(curvature_scan(&sys, &q, bound, seed).to_string());
            }
            let f = field(p)?;
            let x0 = f.elem(x0);
            let mut out = String::new();
            if let Some(n) = cyclotomic {
                if q != BigRational::from_integer(1.into()) {
                    return Err(input("--cyclotomic treats q as the ring variable; pass --q 1"));
                }
                let v = curvature_cyclotomic(&sys, n, &f, x0)?;
                for i in 0..v.nu {
                    let row: Vec<String> = (0..v.nu).map(|j| format!("[{}]", v.entries[i * v.nu + j])).collect();
                    writeln!(out, "{}", row.join(" ")).unwrap();
                }
                write!(out, "{}", if v.identity { "identity" } else { "non-identity" }).unwrap();
            } else {
                let v = curvature_mod_p(&sys, &q, &f, x0)?;
                let nu = v.matrix.dim();
                for i in 0..nu {
                    let row: Vec<String> = (0..nu).map(|j| v.matrix.get(i, j).to_string()).collect();
                    writeln!(out, "{}", row.join(" ")).unwrap();
                }
                write!(out, "{} (heuristic)", if v.identity { "identity" } else { "non-identity" }).unwrap();
            }
            Ok(out)
        }
        Cmd::Bench { algo, sizes, trials, seed, csv } => {
            let f = field(p)?;
            let algos = match algo {
                Some(a) => vec![a.parse::<BenchAlgo>()?],
                None => BenchAlgo::ALL.to_vec(),
            };
            if trials == 0 {
                return Err(input("--trials must be positive"));
            }
            let rows: Vec<_> = algos.into_iter().flat_map(|a| run_bench(a, &sizes, &f, trials, seed)).collect();
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).map_err(|e| Failure::Compute(e.to_string()))?;
            let text = String::from_utf8(buf).expect("csv is utf-8");
            match csv {
                Some(path) => {
                    fs::write(&path, &text).map_err(|e| input(format!("{}: {e}", path.display())))?;
                    Ok(format!("wrote {} rows to {}", rows.len(), path.display()))
                }
                None => Ok(text.trim_end().to_string()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version.
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[input]: {first}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            eprintln!("error[input]: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error[compute]: {m}");
            ExitCode::from(2)
        }
    }
}
