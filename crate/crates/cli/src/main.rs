//! `qig` — monotone metrics and metric adjusted skew information.
//!
//! Exit codes are the machine contract: 0 success, 1 suite failures,
//! 2 parse/flag errors, 3 dimension or validation errors, 4 singular
//! metric (non-regular metric on a rank-deficient state).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qig::bipartite::BipartiteDims;
use qig::checker::{default_catalog, run_suite, TrialConfig};
use qig::linalg::{variance, DensityMatrix, HermitianMatrix};
use qig::metric::{MetricId, MonotoneFunction};
use qig::search::{violation_search, Constraint, SearchOptions};
use qig::skew::skew_information;

mod io;

use io::{format_significant, MatrixFile, ReportFile, SearchReportFile};

#[derive(Parser)]
#[command(name = "qig", version, about = "Metric adjusted skew information toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Skew information I_rho(A) for one metric.
    Skew {
        /// State file (JSON matrix).
        state: PathBuf,
        /// Observable file (JSON matrix).
        observable: PathBuf,
        /// Metric id: wyd:<p>, kubo, harmonic, or bures.
        #[arg(long)]
        metric: String,
    },
    /// Variance Var_rho(A).
    Variance {
        state: PathBuf,
        observable: PathBuf,
    },
    /// Run the randomized property suite and report per-check results.
    Check {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Trials per check.
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Comma-separated dims, e.g. 2,3,4,6,2x2,2x3,3x3.
        #[arg(long)]
        dims: Option<String>,
        /// Comma-separated metric ids; defaults to the whole catalog.
        #[arg(long)]
        metrics: Option<String>,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize the superadditivity gap over bipartite states.
    Search {
        #[arg(long)]
        metric: String,
        /// Bipartite dims, e.g. 2x2.
        #[arg(long, default_value = "2x2")]
        dims: String,
        /// Total objective evaluations across restarts.
        #[arg(long, default_value_t = 20000)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Feasible set: none, semiquantum, or product.
        #[arg(long, default_value = "none")]
        constrain: String,
        /// Write the search report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the metric catalog with regularity and metric constants.
    Zoo,
}

enum CliError {
    /// Unreadable or unparseable input, bad flag values.
    Parse(String),
    /// Library-level validation or computation failure.
    Core(qig::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(qig::Error::SingularMetric(_)) => 4,
            CliError::Core(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

impl From<qig::Error> for CliError {
    fn from(e: qig::Error) -> Self {
        CliError::Core(e)
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

/// QIG_THREADS caps worker parallelism; 0 or unset picks the default.
fn configure_threads() {
    if let Ok(raw) = std::env::var("QIG_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Skew { state, observable, metric } => cmd_skew(&state, &observable, &metric),
        Command::Variance { state, observable } => cmd_variance(&state, &observable),
        Command::Check { seed, trials, dims, metrics, out } => {
            cmd_check(seed, trials, dims.as_deref(), metrics.as_deref(), out.as_deref())
        }
        Command::Search { metric, dims, budget, seed, restarts, constrain, out } => {
            cmd_search(&metric, &dims, budget, seed, restarts, &constrain, out.as_deref())
        }
        Command::Zoo => cmd_zoo(),
    }
}

fn read_density(path: &Path) -> Result<DensityMatrix, CliError> {
    let m = read_matrix(path)?;
    let h = HermitianMatrix::new(m)?;
    Ok(DensityMatrix::new(h)?)
}

fn read_observable(path: &Path) -> Result<HermitianMatrix, CliError> {
    Ok(HermitianMatrix::new(read_matrix(path)?)?)
}

fn read_matrix(path: &Path) -> Result<qig::linalg::ComplexMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: MatrixFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("cannot parse {}: {e}", path.display())))?;
    file.to_matrix()
        .map_err(|e| CliError::Parse(format!("bad matrix in {}: {e}", path.display())))
}

fn parse_metric(id: &str) -> Result<MonotoneFunction, CliError> {
    MonotoneFunction::parse(id).map_err(|e| CliError::Parse(e.to_string()))
}

fn cmd_skew(state: &Path, observable: &Path, metric: &str) -> Result<u8, CliError> {
    let f = parse_metric(metric)?;
    let rho = read_density(state)?;
    let a = read_observable(observable)?;
    let result = skew_information(&rho, &a, &f)?;
    println!("{}", format_significant(result.value, 12));
    Ok(0)
}

fn cmd_variance(state: &Path, observable: &Path) -> Result<u8, CliError> {
    let rho = read_density(state)?;
    let a = read_observable(observable)?;
    let value = variance(&rho, &a)?;
    println!("{}", format_significant(value, 12));
    Ok(0)
}

fn parse_dims(raw: &str) -> Result<(Vec<usize>, Vec<BipartiteDims>), CliError> {
    let mut singles = Vec::new();
    let mut pairs = Vec::new();
    for token in raw.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err(CliError::Parse(format!("empty dims token in {raw:?}")));
        }
        if token.contains('x') {
            pairs.push(
                token
                    .parse::<BipartiteDims>()
                    .map_err(|e| CliError::Parse(e.to_string()))?,
            );
        } else {
            singles.push(
                token
                    .parse::<usize>()
                    .map_err(|_| CliError::Parse(format!("bad dimension {token:?}")))?,
            );
        }
    }
    Ok((singles, pairs))
}

fn parse_metric_list(raw: &str) -> Result<Vec<MetricId>, CliError> {
    raw.split(',')
        .map(|token| {
            let f = parse_metric(token.trim())?;
            Ok(f.id())
        })
        .collect()
}

fn cmd_check(
    seed: u64,
    trials: usize,
    dims: Option<&str>,
    metrics: Option<&str>,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let mut config = TrialConfig { seed, trials_per_check: trials, ..TrialConfig::default() };
    if let Some(raw) = dims {
        let (singles, pairs) = parse_dims(raw)?;
        config.single_dims = singles;
        config.bipartite_dims = pairs;
    }
    if let Some(raw) = metrics {
        config.metric_ids = parse_metric_list(raw)?;
    }
    config.validate().map_err(CliError::Core)?;

    let checks = run_suite(&config)?;
    let mut failed = 0usize;
    for report in &checks {
        let status = if report.failures == 0 { "ok  " } else { "FAIL" };
        println!(
            "{status} {:<38} metric={:<10} trials={:<5} failures={:<4} worst={:>13.4e} replay-seed={}",
            report.check_id,
            report.metric_id,
            report.trials,
            report.failures,
            report.worst_residual,
            report.worst_case_seed,
        );
        if report.failures > 0 {
            failed += 1;
        }
    }
    println!(
        "{} checks, {} failing",
        checks.len(),
        failed,
    );
    if let Some(path) = out {
        let report = ReportFile {
            config,
            checks,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        write_json(path, &report)?;
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn cmd_search(
    metric: &str,
    dims: &str,
    budget: usize,
    seed: u64,
    restarts: usize,
    constrain: &str,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let f = parse_metric(metric)?;
    let dims: BipartiteDims = dims.parse().map_err(|e: qig::Error| CliError::Parse(e.to_string()))?;
    let constraint: Constraint =
        constrain.parse().map_err(|e: qig::Error| CliError::Parse(e.to_string()))?;
    let opts = SearchOptions { metric_id: f.id(), dims, budget, seed, restarts, constraint };
    let result = violation_search(&opts)?;

    println!("metric       {}", result.metric_id);
    println!("dims         {}", result.dims);
    println!("constraint   {constraint}");
    println!("evaluations  {}", result.evaluations);
    println!("best_gap     {}", format_significant(result.best_gap, 12));
    println!("reverified   {}", result.reverified);
    if result.best_gap < -1e-6 && result.reverified {
        println!("violation    yes (superadditivity fails at this point)");
    } else {
        println!("violation    none found");
    }

    if let Some(path) = out {
        let report = SearchReportFile {
            metric: result.metric_id.to_string(),
            dims: result.dims.to_string(),
            constraint: constraint.to_string(),
            budget,
            restarts,
            seed,
            evaluations: result.evaluations,
            best_gap: result.best_gap,
            reverified: result.reverified,
            state: MatrixFile::from_matrix(result.state.matrix()),
            observable_a: MatrixFile::from_matrix(result.a.matrix()),
            observable_b: MatrixFile::from_matrix(result.b.matrix()),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        write_json(path, &report)?;
    }
    Ok(0)
}

fn cmd_zoo() -> Result<u8, CliError> {
    println!("id           regularity   m(c)=f(0)");
    for id in default_catalog() {
        let f = MonotoneFunction::new(id).map_err(CliError::Core)?;
        let regularity = if f.is_regular() { "regular" } else { "non-regular" };
        let constant = match f.metric_constant() {
            Some(m) => format_significant(m, 6),
            None => "-".to_string(),
        };
        println!("{:<12} {:<12} {}", id.to_string(), regularity, constant);
    }
    println!();
    println!("wyd:<p> accepts any p in [-1,2] except 0 and 1; regular exactly for 0<p<1.");
    Ok(0)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Parse(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))
}
