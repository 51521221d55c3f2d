//! `randfib`: command-line access to the randfib library.
//!
//! Results go to stdout (or `--output`) as JSON, or CSV for the tabular
//! commands. Exit codes: 0 success, 1 invalid input, 2 failed verification.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use randfib::cfrac::{blocks, q_of_path, ExtendedRational};
use randfib::lyapunov::{
    dgamma_dp_at_1, gamma_curve, gamma_of_alpha, gamma_of_p, gamma_prime, gamma_via_nu_f,
};
use randfib::measure::{
    change_of_variable_residual, furstenberg_residual, furstenberg_residual_exact, question_mark,
    refine_nu_alpha, RefinementPolicy,
};
use randfib::montecarlo::{estimate_reduction, simulate_growth, McReport, RngSpec};
use randfib::params::{alpha_from_p, compression_rate, dalpha_dp, survival_probability};
use randfib::words::{reduce, reduce_trace, reduction_is_sound, sequence_value, Letter, SignWord};
use randfib::ModelCase;
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "randfib",
    version,
    about = "Growth rates of random Fibonacci sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Copy)]
struct Target {
    #[arg(long, conflicts_with = "alpha")]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value = "linear")]
    case: ModelCase,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lyapunov exponent at one parameter.
    Gamma {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Exponent on a uniform grid of p in (0, 1], one CSV row per point.
    GammaCurve {
        #[arg(long, default_value = "linear")]
        case: ModelCase,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Derivative of the exponent in alpha, and in p when p is given.
    Derivative {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Leaves of the refined measure as CSV.
    Measure {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 20)]
        max_rank: u32,
        #[arg(long, default_value_t = 1e-6)]
        mass_threshold: f64,
    },
    /// Minkowski's question mark function at a rational in [0, 1].
    Questionmark {
        #[arg(long)]
        x: ExtendedRational,
    },
    /// Exponent of the linear sequence through the invariant measure on
    /// slopes, with the invariance defect.
    Furstenberg {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 8)]
        max_rank: u32,
    },
    /// Growth rate of one simulated sequence.
    Simulate {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "linear")]
        case: ModelCase,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Survival, compression and transition frequencies of reduced words.
    Estimate {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "linear")]
        case: ModelCase,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Successive reduced words of a sign word.
    Reduce {
        #[arg(long)]
        word: SignWord,
        #[arg(long, default_value = "linear")]
        case: ModelCase,
    },
    /// Continued fraction and label ratio at the end of the path `R y`.
    Qpath {
        #[arg(long, default_value = "")]
        word: SignWord,
    },
    /// Exact identity suites.
    Verify {
        /// Longest word in the reduction brute force.
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 10)]
        max_rank: u32,
    },
}

enum Failure {
    Invalid(String),
    Verification(Value),
}

impl From<randfib::Error> for Failure {
    fn from(e: randfib::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

enum Output {
    Json(Value),
    Csv(Vec<u8>),
}

fn envelope(command: &str, result: impl Serialize) -> Output {
    Output::Json(json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "result": result,
    }))
}

fn resolve_alpha(t: &Target) -> Result<f64, Failure> {
    match (t.p, t.alpha) {
        (Some(p), None) => Ok(alpha_from_p(p, t.case)?),
        (None, Some(a)) => Ok(a),
        _ => Err(Failure::Invalid(
            "give exactly one of --p and --alpha".into(),
        )),
    }
}

fn grid(points: usize) -> Vec<f64> {
    (1..=points).map(|i| i as f64 / points as f64).collect()
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let format = cli.format;
    let tabular = matches!(
        cli.command,
        Command::GammaCurve { .. } | Command::Measure { .. }
    );
    if format == Some(Format::Csv) && !tabular {
        return Err(Failure::Invalid(
            "CSV output is only available for gamma-curve and measure".into(),
        ));
    }
    let csv = tabular && format != Some(Format::Json);
    Ok(match &cli.command {
        Command::Gamma { target, tol } => {
            let r = match (target.p, target.alpha) {
                (Some(p), None) => gamma_of_p(p, target.case, *tol)?,
                (None, Some(a)) => gamma_of_alpha(a, *tol)?,
                _ => {
                    return Err(Failure::Invalid(
                        "give exactly one of --p and --alpha".into(),
                    ))
                }
            };
            envelope("gamma", r)
        }
        Command::GammaCurve { case, points, tol } => {
            if *points == 0 {
                return Err(Failure::Invalid("--points must be positive".into()));
            }
            let rows = gamma_curve(*case, &grid(*points), *tol)?;
            if csv {
                let mut w = csv_writer();
                w.write_record(["p", "alpha", "gamma", "error_bound"])
                    .map_err(|e| Failure::Invalid(e.to_string()))?;
                for r in &rows {
                    w.write_record([r.p, r.alpha, r.gamma, r.error_bound].map(|v| v.to_string()))
                        .map_err(|e| Failure::Invalid(e.to_string()))?;
                }
                Output::Csv(
                    w.into_inner()
                        .map_err(|e| Failure::Invalid(e.to_string()))?,
                )
            } else {
                envelope("gamma-curve", json!({ "case": case, "rows": rows }))
            }
        }
        Command::Derivative { target, tol } => {
            let alpha = resolve_alpha(target)?;
            let d = gamma_prime(alpha, *tol)?;
            let mut out = json!({ "alpha": alpha, "dgamma_dalpha": d });
            if let Some(p) = target.p {
                let da = dalpha_dp(p, target.case)?;
                out["p"] = json!(p);
                out["case"] = json!(target.case);
                out["dalpha_dp"] = json!(da);
                out["dgamma_dp"] = json!(if p == 1.0 {
                    dgamma_dp_at_1(target.case)?
                } else {
                    d * da
                });
            }
            envelope("derivative", out)
        }
        Command::Measure {
            alpha,
            max_rank,
            mass_threshold,
        } => {
            let policy = RefinementPolicy::default()
                .with_mass_threshold(*mass_threshold)
                .with_max_rank(*max_rank);
            let m = refine_nu_alpha(*alpha, policy)?;
            if csv {
                let mut buf = Vec::new();
                m.write_csv(&mut buf)?;
                Output::Csv(buf)
            } else {
                envelope("measure", &m)
            }
        }
        Command::Questionmark { x } => {
            let v = question_mark(x)?;
            envelope(
                "questionmark",
                json!({ "x": x.to_string(), "value": v.to_string(), "approx": v.to_f64() }),
            )
        }
        Command::Furstenberg { p, tol, max_rank } => {
            let r = gamma_via_nu_f(*p, *tol)?;
            let residual = furstenberg_residual(*p, *max_rank)?;
            envelope(
                "furstenberg",
                json!({ "gamma": r, "invariance_residual": residual }),
            )
        }
        Command::Simulate { p, case, n, seed } => {
            let g = simulate_growth(*p, *case, *n, &RngSpec::new(*seed))?;
            let closed = gamma_of_p(*p, *case, 1e-8)?.gamma;
            let rep = McReport::new(g.estimate, g.stderr, g.n, 1, *seed, Some(closed));
            envelope("simulate", json!({ "p": p, "case": case, "growth": rep }))
        }
        Command::Estimate { p, case, n, seed } => {
            let e = estimate_reduction(*p, *case, *n, &RngSpec::new(*seed))?;
            let alpha = alpha_from_p(*p, *case)?;
            let trials = randfib::montecarlo::BATCHES;
            let rep = |est, se, closed| McReport::new(est, se, e.n, trials, *seed, Some(closed));
            envelope(
                "estimate",
                json!({
                    "p": p,
                    "case": case,
                    "p_r": rep(e.p_r_hat, e.stderrs.p_r, survival_probability(*p, *case)?),
                    "sigma": rep(e.sigma_hat, e.stderrs.sigma, compression_rate(alpha)?),
                    "alpha": rep(e.alpha_hat, e.stderrs.alpha, alpha),
                    "mu_r": rep(e.mu_r_hat, e.stderrs.mu_r, 1.0 / (2.0 - alpha)),
                }),
            )
        }
        Command::Reduce { word, case } => {
            let trace: Vec<String> = reduce_trace(word, *case)
                .iter()
                .map(|w| w.to_string())
                .collect();
            let (red, stats) = reduce(word, *case);
            envelope(
                "reduce",
                json!({
                    "word": word.to_string(),
                    "case": case,
                    "trace": trace,
                    "reduced": red.letters.to_string(),
                    "deletions": red.deletions,
                    "flips": red.flips,
                    "stats": stats,
                    "value": sequence_value(word, *case).to_string(),
                }),
            )
        }
        Command::Qpath { word } => {
            let q = q_of_path(word)?;
            let full = SignWord::new(vec![Letter::R]).concat(word);
            envelope(
                "qpath",
                json!({
                    "word": word.to_string(),
                    "path": full.to_string(),
                    "continued_fraction": blocks(&full)?.to_string(),
                    "value": q.to_string(),
                }),
            )
        }
        Command::Verify { max_len, max_rank } => verify(*max_len, *max_rank)?,
    })
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn verify(max_len: usize, max_rank: u32) -> Result<Output, Failure> {
    if max_len > 20 {
        return Err(Failure::Invalid("--max-len is capped at 20".into()));
    }
    if max_rank > 14 {
        return Err(Failure::Invalid("--max-rank is capped at 14".into()));
    }
    let mut suites = Vec::new();

    let mut cov = true;
    for (n, d) in [(2, 3), (1, 2), (3, 5)] {
        cov &= change_of_variable_residual(&ratio(n, d), max_rank)?.is_zero();
    }
    suites.push(json!({ "suite": "change-of-variable", "pass": cov }));

    let mut inv = true;
    for (n, d) in [(2, 3), (3, 4), (3, 5)] {
        inv &= furstenberg_residual_exact(&ratio(n, d), max_rank.min(8))?.is_zero();
    }
    suites.push(json!({ "suite": "furstenberg-invariance", "pass": inv }));

    let red = (0..=max_len).all(|len| {
        (0..(1u64 << len)).all(|bits| {
            let w = SignWord::from_bits(bits, len);
            reduction_is_sound(&w, ModelCase::Linear)
                && reduction_is_sound(&w, ModelCase::NonLinear)
        })
    });
    suites.push(json!({ "suite": "reduction-brute-force", "pass": red }));

    let all = suites.iter().all(|s| s["pass"] == json!(true));
    let out = json!({ "schema_version": SCHEMA_VERSION, "command": "verify", "result": suites });
    if all {
        Ok(Output::Json(out))
    } else {
        Err(Failure::Verification(out))
    }
}

fn emit(out: &Output, path: &Option<PathBuf>) -> io::Result<()> {
    let bytes = match out {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(v).expect("values serialize");
            s.push('\n');
            s.into_bytes()
        }
        Output::Csv(b) => b.clone(),
    };
    match path {
        Some(p) => File::create(p)?.write_all(&bytes),
        None => io::stdout().lock().write_all(&bytes),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(out) => match emit(&out, &cli.output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(v)) => {
            let _ = emit(&Output::Json(v), &cli.output);
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
