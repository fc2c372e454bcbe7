//! The `monobound` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{self, Direction, ParamBox, ProbeParams};
use crate::engine::{compute_bound, convergence_study_with, family_bound, s_sequence};
use crate::error::{Error, Result};
use crate::families::{asymptotic_constant, asymptotic_constant_in, generate, FamilySpec, RowPolicy};
use crate::oracle::{self, Verdict};
use crate::report::{to_value, Format, Report};
use crate::types::{ExponentPair, NonNegativeMatrix, Regime};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_REGIME: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NOT_COVERED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "monobound",
    version,
    about = "Sharp lower and upper bounds for non-negative matrices on non-increasing sequences"
)]
pub struct Cli {
    /// Worker threads; falls back to MB_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// json, csv or text.
    #[arg(long, global = true, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best constant of a family section or a CSV matrix.
    Bound {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        exps: Exponents,
        /// Row truncation for families: auto, square, infinite or a row count.
        #[arg(long, default_value = "auto")]
        rows: RowPolicy,
    },
    /// Check the formula against step enumeration, cone sampling and local search.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        exps: Exponents,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Published asymptotic constant of a family.
    Constant {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        regime: Option<Regime>,
    },
    /// Bound against size, with the gap to the published constant.
    Converge {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        exps: Exponents,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        sizes: Vec<usize>,
        #[arg(long, default_value = "auto")]
        rows: RowPolicy,
    },
    /// Monotonicity and convexity analyses.
    #[command(subcommand)]
    Analyze(Analysis),
    /// Evaluate a registered inequality over a parameter grid.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

impl FamilyArgs {
    fn spec(&self) -> Result<FamilySpec> {
        FamilySpec::from_name(&self.family, self.alpha, self.t, self.beta)
    }
}

#[derive(Debug, Args)]
pub struct Source {
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    pub family: Option<String>,
    /// Headerless CSV of non-negative entries, one row per line.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Number of columns `N` of the family section.
    #[arg(long)]
    pub size: Option<usize>,
}

impl Source {
    fn spec(&self) -> Result<Option<FamilySpec>> {
        self.family
            .as_deref()
            .map(|f| FamilySpec::from_name(f, self.alpha, self.t, self.beta))
            .transpose()
    }

    fn size(&self) -> Result<usize> {
        self.size
            .ok_or_else(|| Error::InvalidParameter("families need --size".into()))
    }

    fn matrix(&self) -> Result<NonNegativeMatrix> {
        let path = self.matrix.as_ref().expect("clap enforces family or matrix");
        NonNegativeMatrix::from_csv_path(path)
    }
}

#[derive(Debug, Args)]
pub struct Exponents {
    #[arg(long)]
    pub p: f64,
    /// Defaults to `p`.
    #[arg(long)]
    pub q: Option<f64>,
    /// lower or upper; inferred from `(p, q)` when omitted (`lower` at `p = q = 1`).
    #[arg(long)]
    pub regime: Option<Regime>,
}

impl Exponents {
    fn pair(&self) -> Result<ExponentPair> {
        let q = self.q.unwrap_or(self.p);
        let regime = self.regime.unwrap_or(if self.p >= 1.0 && q <= self.p {
            Regime::LowerBound
        } else {
            Regime::UpperBound
        });
        ExponentPair::new(self.p, q, regime)
    }
}

#[derive(Debug, Subcommand)]
pub enum Analysis {
    /// `Λ_n^p/n · Σ_{k>n} Λ_k^{-p}` for power sums and its trend.
    Bennett {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 500)]
        n_max: usize,
        #[arg(long, default_value_t = analysis::DEFAULT_MONOTONE_TOL)]
        tol: f64,
    },
    /// The sufficient condition for the Bennett sequence to increase.
    Condition {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 500)]
        n_max: usize,
    },
    /// Minimum second difference of `f_{α,p}` on `(0, 1)`.
    Convexity {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// `A_n(f_{α,p})` next to `2 s_n` of the tail-power family.
    Mean {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub id: String,
    #[arg(long, requires = "alpha_max")]
    pub alpha_min: Option<f64>,
    #[arg(long, requires = "alpha_min")]
    pub alpha_max: Option<f64>,
    #[arg(long, requires = "beta_max")]
    pub beta_min: Option<f64>,
    #[arg(long, requires = "beta_min")]
    pub beta_max: Option<f64>,
    /// Points in `alpha`.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub beta_grid: Option<usize>,
    #[arg(long)]
    pub x_grid: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Check the reversed inequality on its own range.
    #[arg(long)]
    pub reversed: bool,
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::RegimeViolation(_) => EXIT_REGIME,
        Error::NotCovered(_) => EXIT_NOT_COVERED,
        _ => EXIT_INPUT,
    }
}

/// A rendered report and the exit status it implies.
pub struct Outcome {
    pub report: Report,
    pub code: i32,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, code: EXIT_OK }
    }

    fn flagged(report: Report, violation: bool) -> Self {
        Outcome {
            report,
            code: if violation { EXIT_VIOLATION } else { EXIT_OK },
        }
    }
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let env = std::env::var("MB_THREADS").ok();
    let n = match (flag, env) {
        (Some(n), _) => Some(n),
        (None, Some(s)) => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("MB_THREADS = `{s}` is not a count")))?,
        ),
        (None, None) => None,
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::InvalidParameter("thread count must be positive".into()));
        }
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Executes one parsed command.
pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Bound { source, exps, rows } => cmd_bound(source, exps, *rows),
        Command::Verify {
            source,
            exps,
            samples,
            seed,
        } => cmd_verify(source, exps, *samples, *seed),
        Command::Constant { family, p, q, regime } => cmd_constant(family, *p, q.unwrap_or(*p), *regime),
        Command::Converge {
            family,
            exps,
            sizes,
            rows,
        } => cmd_converge(family, exps, sizes, *rows),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Probe(args) => cmd_probe(args),
    }
}

fn cmd_bound(source: &Source, exps: &Exponents, rows: RowPolicy) -> Result<Outcome> {
    let pair = exps.pair()?;
    let (bound, spec, trunc) = match source.spec()? {
        Some(spec) => {
            let trunc = rows.resolve(&spec, source.size()?, pair.q());
            (family_bound(&spec, trunc, pair)?, Some(spec), Some(trunc))
        }
        None => (compute_bound(&source.matrix()?, pair)?, None, None),
    };
    let citation = spec
        .as_ref()
        .and_then(|s| asymptotic_constant_in(s, pair.p(), pair.q(), pair.regime()).ok())
        .map(|c| c.citation);
    let report = Report::new()
        .field("lambda", bound.lambda)
        .field("lambda_pow_q", bound.lambda_pow_q)
        .field("lambda_pow_p", bound.lambda_pow_p())
        .field("optimal_r", bound.optimal_r)
        .field("n", bound.n())
        .field("family", spec.map(|s| s.to_string()))
        .field("p", pair.p())
        .field("q", pair.q())
        .field("regime", pair.regime().as_str())
        .field("citation", citation)
        .field("rows", trunc.map(|t| t.rows.to_string()))
        .field("row_tail_error", bound.row_tail_error);
    Ok(Outcome::ok(report))
}

fn cmd_verify(source: &Source, exps: &Exponents, samples: usize, seed: u64) -> Result<Outcome> {
    let pair = exps.pair()?;
    let (a, spec) = match source.spec()? {
        Some(spec) => (generate(&spec, source.size()?)?, Some(spec)),
        None => (source.matrix()?, None),
    };
    let r = oracle::verify(&a, pair, samples, seed)?;
    let violation = r.verdict != Verdict::Consistent;
    let report = Report::new()
        .field("family", spec.map(|s| s.to_string()))
        .field("n", a.cols())
        .field("p", pair.p())
        .field("q", pair.q())
        .field("regime", pair.regime().as_str())
        .extend(&r);
    Ok(Outcome::flagged(report, violation))
}

fn cmd_constant(family: &FamilyArgs, p: f64, q: f64, regime: Option<Regime>) -> Result<Outcome> {
    let spec = family.spec()?;
    let c = match regime {
        Some(r) => asymptotic_constant_in(&spec, p, q, r)?,
        None => asymptotic_constant(&spec, p, q)?,
    };
    let report = Report::new()
        .field("family", spec.to_string())
        .field("p", p)
        .field("q", q)
        .field("value", c.value)
        .field("est_abs_error", c.est_abs_error)
        .field("regime", c.regime.as_str())
        .field("citation", c.citation)
        .field("validity", c.validity);
    Ok(Outcome::ok(report))
}

fn cmd_converge(family: &FamilyArgs, exps: &Exponents, sizes: &[usize], rows: RowPolicy) -> Result<Outcome> {
    let spec = family.spec()?;
    let pair = exps.pair()?;
    let t = convergence_study_with(&spec, pair, sizes, rows)?;
    let table = (0..t.sizes.len())
        .map(|i| {
            json!({
                "n": t.sizes[i],
                "lambda_pow_q": t.lambdas[i],
                "optimal_r": t.optimal_r[i],
                "gap": t.gaps.as_ref().map(|g| g[i]),
            })
        })
        .collect();
    let report = Report::new()
        .field("family", spec.to_string())
        .field("p", pair.p())
        .field("q", pair.q())
        .field("regime", pair.regime().as_str())
        .field("target", t.target.as_ref().map(|c| c.value))
        .field("citation", t.target.as_ref().map(|c| c.citation.clone()))
        .field("extrapolated", t.extrapolated)
        .with_table(table);
    Ok(Outcome::ok(report))
}

fn indexed(values: &[f64], key: &str) -> Vec<serde_json::Value> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut m = serde_json::Map::new();
            m.insert("n".into(), json!(i + 1));
            m.insert(key.into(), to_value(v));
            serde_json::Value::Object(m)
        })
        .collect()
}

fn cmd_analyze(a: &Analysis) -> Result<Outcome> {
    match *a {
        Analysis::Bennett { alpha, p, n_max, tol } => {
            let values = analysis::bennett_sequence(alpha, p, n_max)?;
            let mut m = analysis::monotonicity_verdict(&values, tol);
            let claim = analysis::bennett_claim(alpha, p);
            if let Some(c) = claim {
                m.claim_citation = c.citation.to_string();
            }
            let contradicted = claim.is_some_and(|c| c.expected != m.verdict);
            let report = Report::new()
                .field("alpha", alpha)
                .field("p", p)
                .field("n_max", n_max)
                .field("verdict", m.verdict)
                .field("first_violation_index", m.first_violation_index)
                .field("expected", claim.map(|c| c.expected))
                .field("claim_citation", m.claim_citation)
                .with_table(indexed(&values, "value"));
            Ok(Outcome::flagged(report, contradicted))
        }
        Analysis::Condition { alpha, p, n_max } => {
            let values: Vec<f64> = (1..=n_max)
                .map(|n| analysis::increment_condition(alpha, p, n))
                .collect::<Result<_>>()?;
            let (min_at, min_value) = values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i + 1, v) } else { acc });
            let holds = min_value >= -analysis::DEFAULT_MONOTONE_TOL;
            // Known to hold for α >= 1, p >= 1.
            let claimed = alpha >= 1.0 && p >= 1.0;
            let report = Report::new()
                .field("alpha", alpha)
                .field("p", p)
                .field("n_max", n_max)
                .field("min_value", min_value)
                .field("min_at", min_at)
                .field("holds", holds)
                .field("claimed", claimed)
                .with_table(indexed(&values, "value"));
            Ok(Outcome::flagged(report, claimed && !holds))
        }
        Analysis::Convexity { alpha, p, grid } => {
            let min = analysis::second_difference_min(alpha, p, grid)?;
            let report = Report::new()
                .field("alpha", alpha)
                .field("p", p)
                .field("grid", grid)
                .field("second_difference_min", min)
                .field("convex", min >= -analysis::CONVEXITY_TOL);
            Ok(Outcome::ok(report))
        }
        Analysis::Mean { alpha, p, n_max } => {
            let means: Vec<f64> = (1..=n_max)
                .map(|n| analysis::bennett_jameson_mean(alpha, p, n))
                .collect::<Result<_>>()?;
            let tail = generate(&FamilySpec::TailPower { alpha, t: 1.0 }, n_max)?;
            let s = s_sequence(&tail, p, p)?.values;
            let verdict = analysis::monotonicity_verdict(&means, analysis::DEFAULT_MONOTONE_TOL).verdict;
            let max_rel = means
                .iter()
                .zip(&s)
                .map(|(a, s)| (a - 2.0 * s).abs() / a.abs())
                .fold(0.0, f64::max);
            let table = (0..n_max)
                .map(|i| json!({"n": i + 1, "mean": means[i], "two_s_n": 2.0 * s[i]}))
                .collect();
            let report = Report::new()
                .field("alpha", alpha)
                .field("p", p)
                .field("n_max", n_max)
                .field("verdict", verdict)
                .field("max_rel_diff", max_rel)
                .with_table(table);
            Ok(Outcome::ok(report))
        }
    }
}

fn cmd_probe(args: &ProbeArgs) -> Result<Outcome> {
    let mut params = ProbeParams {
        direction: if args.reversed {
            Direction::Reversed
        } else {
            Direction::Holds
        },
        ..Default::default()
    };
    if let Some(g) = args.grid {
        params.alpha_points = g;
    }
    if let Some(g) = args.beta_grid {
        params.beta_points = g;
    }
    if let Some(g) = args.x_grid {
        params.x_points = g;
    }
    if let Some(n) = args.n_max {
        params.n_max = n;
    }
    let reports = match (args.alpha_min, args.alpha_max) {
        (Some(lo), Some(hi)) => {
            let grid = ParamBox {
                alpha: (lo, hi),
                beta: args.beta_min.zip(args.beta_max),
            };
            vec![analysis::probe(&args.id, &params, &grid)?]
        }
        _ => analysis::probe_declared(&args.id, &params)?,
    };
    let passed = reports.iter().all(|r| r.passed);
    let statement = analysis::inequality_ids()
        .into_iter()
        .find(|i| i.id == args.id)
        .map(|i| i.statement);
    let report = Report::new()
        .field("inequality_id", &args.id)
        .field("direction", params.direction)
        .field("statement", statement)
        .field("passed", passed)
        .with_table(reports.iter().map(to_value).collect());
    Ok(Outcome::flagged(report, !passed))
}

/// Parses `args`, runs the command and writes the report. Returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run_cli(cli: &Cli) -> Result<i32> {
    configure_threads(cli.threads)?;
    let outcome = execute(&cli.command)?;
    let text = outcome.report.render(cli.format)?;
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    Ok(outcome.code)
}
