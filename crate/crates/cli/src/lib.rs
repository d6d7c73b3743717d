//! `slprime` command-line front end.
//!
//! Exit codes: 0 success (including a truncated spectrum), 2 bad input or
//! I/O failure, 3 an analysis verdict of FAIL.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod document;

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use slprime_core::analysis::{self, Verdict};
use slprime_core::inverse::{self, SearchConfig};
use slprime_core::nonlinear::{self, NonlinearProblem};
use slprime_core::primes;
use slprime_core::spectrum::compute_spectrum_with;
use slprime_core::{Complex, PiecewiseConstant, SLProblem};

pub use document::ProblemDocument;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERDICT_FAIL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "slprime",
    version,
    about = "Sturm-Liouville spectra against the primes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// Problem document (JSON).
    #[arg(long)]
    config: PathBuf,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First eigenvalues of a problem.
    Spectrum {
        #[command(flatten)]
        io: ProblemArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Nonlinear-parameter spectrum against the primes.
    Nonlinear {
        /// Problem document on [0, 1] whose `q` is used; `q ≡ 0` if omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Primes against `n log n` and Cesàro's expansion.
    Primes {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        n_max: usize,
    },
    /// `p_n / λ_n` over the first `n_max` eigenvalues.
    Incompat {
        #[command(flatten)]
        io: ProblemArgs,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
    },
    /// Pointwise bound on the logarithmic derivative.
    Growth {
        #[command(flatten)]
        io: ProblemArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_re: f64,
        #[arg(long, default_value_t = 1e4, allow_hyphen_values = true)]
        lambda_im: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Order of growth of `u(b, λ)` in `λ`.
    Order {
        #[command(flatten)]
        io: ProblemArgs,
        #[arg(long, value_delimiter = ',', default_value = "1e2,1e3,1e4,1e5,1e6")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 16)]
        angular: usize,
    },
    /// Power sums with exponent 1/2 + ε over the primes and over `c n²`.
    Series {
        /// Problem document; its Weyl constant sets `c = π²/C²`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 1_000_000)]
        n_max: usize,
        /// Explicit growth constant; overrides `--config`.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Search for a potential whose nonlinear spectrum approaches the primes.
    Invert {
        /// Search configuration (JSON); defaults apply to absent fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Per-target CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full result as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Overrides `targets`.
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e:#}");
        return EXIT_INVALID;
    }
    match dispatch(cli.command, out) {
        Ok(Some(Verdict::Fail)) => EXIT_VERDICT_FAIL,
        Ok(_) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INVALID
        }
    }
}

/// `SLPRIME_THREADS` sizes the global pool (0 or unset = automatic).
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SLPRIME_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("SLPRIME_THREADS must be a non-negative integer, got {raw:?}"))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// SHA-256 of the canonical JSON of everything that determines the output.
fn config_hash(settings: &Value) -> String {
    let digest = Sha256::digest(settings.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn with_csv(
    settings: &Value,
    fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(
        buf,
        "# slprime {} config-sha256={}",
        env!("CARGO_PKG_VERSION"),
        config_hash(settings)
    )?;
    fill(&mut buf)?;
    Ok(buf)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

/// CSV to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => Ok(out.write_all(bytes)?),
    }
}

fn load_problem(path: &Path) -> Result<(ProblemDocument, SLProblem<f64>)> {
    let doc = ProblemDocument::load(path)?;
    let problem = doc
        .to_problem()
        .with_context(|| format!("in {}", path.display()))?;
    Ok((doc, problem))
}

fn positive(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        bail!("--{name} must be at least 1");
    }
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<Option<Verdict>> {
    match cmd {
        Command::Spectrum { io, n_max } => {
            positive("n-max", n_max)?;
            let (doc, problem) = load_problem(&io.config)?;
            let cfg = doc
                .solver_config()
                .with_context(|| format!("in {}", io.config.display()))?;
            let spectrum = compute_spectrum_with(&problem, n_max, &cfg)?;
            let settings = json!({"command": "spectrum", "problem": doc, "n_max": n_max});
            let csv = with_csv(&settings, |w| spectrum.write_csv(w))?;
            emit(io.out.as_deref(), &csv, out)?;
            if let Some(t) = &spectrum.truncation {
                writeln!(out, "{t}")?;
            }
            Ok(None)
        }

        Command::Nonlinear {
            config,
            out: path,
            n_max,
        } => {
            positive("n-max", n_max)?;
            let (problem, doc) = match &config {
                Some(p) => {
                    let (doc, sl) = load_problem(p)?;
                    (
                        nonlinear_from(&sl).with_context(|| format!("in {}", p.display()))?,
                        Some(doc),
                    )
                }
                None => (NonlinearProblem::free(), None),
            };
            let rows = nonlinear::nonlinear_spectrum(&problem, n_max)?;
            let table = primes::first_primes(n_max)?;
            let settings = json!({"command": "nonlinear", "problem": doc, "n_max": n_max});
            let csv = with_csv(&settings, |w| nonlinear::write_csv(&rows, &table, w))?;
            emit(path.as_deref(), &csv, out)?;
            if rows.len() < n_max {
                writeln!(out, "TRUNCATED at n={}", rows.len() + 1)?;
            }
            Ok(None)
        }

        Command::Primes { out: path, n_max } => {
            positive("n-max", n_max)?;
            let table = primes::first_primes(n_max)?;
            let ns = prime_sample(n_max);
            let rows = primes::asymptotic_rows(&table, &ns);
            let settings = json!({"command": "primes", "n_max": n_max});
            let csv = with_csv(&settings, |w| primes::write_asymptotics_csv(&rows, w))?;
            emit(path.as_deref(), &csv, out)?;
            Ok(None)
        }

        Command::Incompat { io, n_max } => {
            let (doc, problem) = load_problem(&io.config)?;
            let cfg = doc.solver_config()?;
            positive("n-max", n_max)?;
            let spectrum = compute_spectrum_with(&problem, n_max, &cfg)?;
            if let Some(t) = &spectrum.truncation {
                writeln!(out, "{t}")?;
            }
            let report = analysis::incompatibility_report(&spectrum, n_max)?;
            let settings = json!({"command": "incompat", "problem": doc, "n_max": n_max});
            if let Some(p) = &io.out {
                write_file(p, &with_csv(&settings, |w| report.write_csv(w))?)?;
            }
            for r in &report.checkpoints {
                writeln!(
                    out,
                    "n={} lambda={} p_n={} ratio={:e}",
                    r.n, r.lambda, r.prime, r.ratio
                )?;
            }
            writeln!(out, "{}", report.verdict.line("incompat"))?;
            Ok(Some(report.verdict))
        }

        Command::Growth {
            io,
            lambda_re,
            lambda_im,
            samples,
        } => {
            let (doc, problem) = load_problem(&io.config)?;
            let rep =
                analysis::growth_check(&problem, Complex::new(lambda_re, lambda_im), samples)?;
            let settings = json!({
                "command": "growth", "problem": doc,
                "lambda": [lambda_re, lambda_im], "samples": samples,
            });
            if let Some(p) = &io.out {
                write_file(p, &with_csv(&settings, |w| rep.write_csv(w))?)?;
            }
            writeln!(
                out,
                "min_slack={} min_relative_slack={}",
                rep.min_slack, rep.min_relative_slack
            )?;
            writeln!(out, "{}", rep.verdict.line("growth"))?;
            Ok(Some(rep.verdict))
        }

        Command::Order { io, radii, angular } => {
            let (doc, problem) = load_problem(&io.config)?;
            let est = analysis::order_estimate(&problem, &radii, angular)?;
            let settings = json!({
                "command": "order", "problem": doc, "radii": radii, "angular": angular,
            });
            if let Some(p) = &io.out {
                write_file(p, &with_csv(&settings, |w| est.write_csv(w))?)?;
            }
            writeln!(
                out,
                "slope={} low_confidence={}",
                est.slope, est.low_confidence
            )?;
            let verdict = est.verdict(0.4, 0.6);
            writeln!(out, "{}", verdict.line("order"))?;
            Ok(Some(verdict))
        }

        Command::Series {
            config,
            out: path,
            epsilon,
            n_max,
            c,
        } => {
            let (c, doc) = match (c, &config) {
                (Some(c), _) => (c, None),
                (None, Some(p)) => {
                    let (doc, problem) = load_problem(p)?;
                    let w = problem.weyl_constant();
                    if !(w > 0.0) {
                        bail!("{}: Weyl constant vanishes; pass --c", p.display());
                    }
                    (PI * PI / (w * w), Some(doc))
                }
                (None, None) => (PI * PI, None),
            };
            let d = analysis::series_dichotomy(c, epsilon, n_max)?;
            let settings = json!({
                "command": "series", "problem": doc, "c": c, "epsilon": epsilon, "n_max": n_max,
            });
            if let Some(p) = &path {
                write_file(p, &with_csv(&settings, |w| d.write_csv(w))?)?;
            }
            for (name, rows) in [("primes", &d.primes), ("model", &d.model)] {
                for r in rows.iter() {
                    write!(out, "{name} N={} S={}", r.n, r.sum)?;
                    if let Some(t) = r.tail_bound {
                        write!(out, " tail_bound={t}")?;
                    }
                    writeln!(out)?;
                }
            }
            writeln!(out, "{}", d.verdict.line("series"))?;
            Ok(Some(d.verdict))
        }

        Command::Invert {
            config,
            out: path,
            json: json_path,
            n_max,
            seed,
        } => {
            let mut cfg: SearchConfig = match &config {
                Some(p) => {
                    let text = fs::read_to_string(p)
                        .with_context(|| format!("cannot read {}", p.display()))?;
                    serde_json::from_str(&text).with_context(|| format!("in {}", p.display()))?
                }
                None => SearchConfig::default(),
            };
            if let Some(n) = n_max {
                cfg.targets = n;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let res = inverse::search::<f64>(&cfg)?;
            let settings = json!({"command": "invert", "search": cfg});
            if let Some(p) = &path {
                write_file(p, &with_csv(&settings, |w| res.write_targets_csv(w))?)?;
            }
            if let Some(p) = &json_path {
                let doc = json!({
                    "version": env!("CARGO_PKG_VERSION"),
                    "config_sha256": config_hash(&settings),
                    "config": cfg,
                    "result": res,
                });
                write_file(p, serde_json::to_string_pretty(&doc)?.as_bytes())?;
            }
            writeln!(
                out,
                "best_objective={} baseline_objective={} best_restart={}",
                res.best_objective, res.baseline_objective, res.best_restart
            )?;
            writeln!(out, "best_q={:?}", res.best_q.values())?;
            Ok(None)
        }
    }
}

/// The nonlinear problem needs `-y'' + q y` on `[0, 1]` with Dirichlet
/// conditions; only `q` is taken from the document.
fn nonlinear_from(problem: &SLProblem<f64>) -> Result<NonlinearProblem<f64>> {
    let c = problem.coeffs();
    let iv = problem.interval();
    if iv.a() != 0.0 || iv.b() != 1.0 {
        bail!("interval must be [0, 1] for the nonlinear problem");
    }
    if c.s().values().iter().any(|&v| v != 1.0) {
        bail!("coefficients.s must be identically 1 for the nonlinear problem");
    }
    if c.r().values().iter().any(|&v| v != 1.0) {
        bail!("coefficients.r must be identically 1 for the nonlinear problem");
    }
    if problem.bc().alpha() != 0.0 || problem.bc().beta() != PI {
        bail!("bc must be Dirichlet (alpha = 0, beta = pi) for the nonlinear problem");
    }
    let q = PiecewiseConstant::new(c.q().breakpoints().to_vec(), c.q().values().to_vec())?;
    Ok(NonlinearProblem::new(q)?)
}

/// `1, 2, 5 × 10^k` up to `n_max`, plus `n_max`.
fn prime_sample(n_max: usize) -> Vec<u64> {
    let mut ns: Vec<u64> = std::iter::successors(Some(1u64), |k| k.checked_mul(10))
        .flat_map(|k| [k, 2 * k, 5 * k])
        .take_while(|&k| k <= n_max as u64)
        .collect();
    if ns.last() != Some(&(n_max as u64)) {
        ns.push(n_max as u64);
    }
    ns
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_layout() {
        assert_eq!(prime_sample(1), vec![1]);
        assert_eq!(prime_sample(30), vec![1, 2, 5, 10, 20, 30]);
        assert_eq!(
            prime_sample(1000),
            vec![1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]
        );
    }

    #[test]
    fn hash_depends_on_settings() {
        let a = config_hash(&json!({"n_max": 5}));
        assert_eq!(a.len(), 64);
        assert_eq!(a, config_hash(&json!({"n_max": 5})));
        assert_ne!(a, config_hash(&json!({"n_max": 6})));
    }

    #[test]
    fn help_and_version_exit_zero() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run_with(["slprime", "--version"], &mut o, &mut e), EXIT_OK);
        assert!(String::from_utf8(o)
            .unwrap()
            .contains(env!("CARGO_PKG_VERSION")));
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(
            run_with(["slprime", "frobnicate"], &mut o, &mut e),
            EXIT_INVALID
        );
    }
}
