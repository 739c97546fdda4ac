//! `stablefit` command-line tool.
//!
//! Exit status: 0 on success, 1 on input or validation errors, 2 when a
//! numerical result is outside its certified accuracy (unless
//! `--allow-degraded`). Errors are reported as a single JSON line on stderr.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use stablefit::bounds::BoundReport;
use stablefit::estimator::{estimate_general, estimate_strict, EstimateReport};
use stablefit::moments::moment_table;
use stablefit::params::{to_strict, FormAParams, StrictParams};
use stablefit::sampler::{sample_form_a, RandomStream};
use stablefit::signal::{analyze, compose_flux, AnalyzeConfig, FluxConstants, SignalSeries};
use stablefit::study::{variance_study, StudyConfig};

use crate::io::{emit, parse_table, read_input, to_csv, CliError, CliResult, Outputs, Primary, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "stablefit", version, about = "Stable-law exponent estimation and error bounds")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the CSV table here.
    #[arg(long, global = true)]
    out_csv: Option<PathBuf>,
    /// Random seed for subcommands that simulate.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Emit results even when a density falls outside its certified accuracy.
    #[arg(long, global = true)]
    allow_degraded: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw variates from a stable law; one value per line.
    Simulate(SimulateArgs),
    /// Estimate stable parameters from a sample.
    Estimate(EstimateArgs),
    /// Moment table of sign X and log|X| for a strictly stable law.
    Moments(MomentsArgs),
    /// Mean-square deviation bound for the exponent estimate.
    Bound(BoundArgs),
    /// Extrema-increment density analysis of a time series.
    Analyze(AnalyzeArgs),
    /// Monte Carlo variance of the exponent estimate against the bound.
    Study(StudyArgs),
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    n: usize,
    /// Random stream id within the seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

#[derive(Debug, Args, Serialize)]
struct EstimateArgs {
    /// CSV file (or `-` for stdin); a bare column of numbers is accepted.
    #[arg(long)]
    input: PathBuf,
    /// Column name or 0-based index; required for multi-column input.
    #[arg(long)]
    column: Option<String>,
    /// Treat the sample as strictly stable (no triplet transform).
    #[arg(long, conflicts_with = "general")]
    strict: bool,
    /// Transform to a strictly stable sample first (default).
    #[arg(long)]
    general: bool,
}

#[derive(Debug, Args, Serialize)]
struct MomentsArgs {
    #[arg(long)]
    nu: f64,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    tau: f64,
}

#[derive(Debug, Args, Serialize)]
struct BoundArgs {
    #[arg(long, conflicts_with_all = ["nu", "alpha_grid"])]
    alpha: Option<f64>,
    #[arg(long, conflicts_with = "alpha_grid")]
    nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "beta")]
    theta: Option<f64>,
    /// Skewness in form A; converted to theta with the given exponent.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Evaluate at the triplet-transformed law of (alpha, beta).
    #[arg(long)]
    transformed: bool,
    #[arg(long, conflicts_with = "n_grid")]
    n: Option<usize>,
    /// Comma-separated sample sizes (sweep mode, CSV output).
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Comma-separated exponents (sweep mode, CSV output).
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args, Serialize)]
struct AnalyzeArgs {
    /// CSV with columns (time, value) or (time, dn, phi1, phi2).
    #[arg(long)]
    input: PathBuf,
    /// JSON flux constants; required for three-channel input.
    #[arg(long)]
    flux_constants: Option<PathBuf>,
    /// Time window `start:end` in seconds.
    #[arg(long)]
    window: Option<String>,
    #[arg(long, default_value_t = 60)]
    bins: usize,
    #[arg(long, default_value_t = 0.05)]
    tail_fraction: f64,
}

#[derive(Debug, Args, Serialize)]
struct StudyArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    alpha_grid: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    n_grid: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn config_of<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> CliResult<()> {
    let mut manifest = RunManifest::start("simulate", config_of(a), Some(cli.seed));
    let p = FormAParams::new(a.alpha, a.beta, a.gamma, a.lambda)?;
    let xs = sample_form_a(&p, a.n, RandomStream::new(cli.seed, a.stream))?;
    manifest.finish();
    let mut lines = String::with_capacity(24 * xs.len());
    for x in &xs {
        lines.push_str(&format!("{x:?}\n"));
    }
    let outputs = Outputs {
        out: cli.out.as_ref(),
        out_csv: cli.out_csv.as_ref(),
    };
    // The variates themselves always go to stdout or the CSV file; the JSON
    // report only records provenance.
    if outputs.out_csv.is_none() {
        print!("{lines}");
    }
    if outputs.out.is_some() || outputs.out_csv.is_some() {
        let report = json!({ "params": p, "n": xs.len() });
        emit(&outputs, &manifest, report, Some(format!("value\n{lines}")), Primary::Csv)?;
    }
    Ok(())
}

fn estimate(cli: &Cli, a: &EstimateArgs) -> CliResult<()> {
    let mut manifest = RunManifest::start("estimate", config_of(a), None);
    let text = read_input(&a.input, &mut manifest)?;
    let table = parse_table(&text, true)?;
    let col = match &a.column {
        Some(c) => table.column_index(c)?,
        None if table.headers.len() == 1 => 0,
        None => {
            return Err(CliError::Input(format!(
                "input has {} columns; choose one with --column",
                table.headers.len()
            )))
        }
    };
    let sample = table.column(col);
    let report = if a.strict {
        EstimateReport::strict(&estimate_strict(&sample)?, sample.len())
    } else {
        EstimateReport::general(&estimate_general(&sample)?)
    };
    manifest.finish();
    let outputs = Outputs {
        out: cli.out.as_ref(),
        out_csv: cli.out_csv.as_ref(),
    };
    let csv = to_csv(std::slice::from_ref(&report))?;
    emit(&outputs, &manifest, serde_json::to_value(&report)?, Some(csv), Primary::Json)
}

fn moments(cli: &Cli, a: &MomentsArgs) -> CliResult<()> {
    let mut manifest = RunManifest::start("moments", config_of(a), None);
    let table = moment_table(&StrictParams::new(a.nu, a.theta, a.tau)?)?;
    manifest.finish();
    let mut csv = String::from("order,kind,value\n");
    for e in &table.entries {
        csv.push_str(&format!("{},{},{:?}\n", e.order, e.kind.as_str(), e.value));
    }
    let outputs = Outputs {
        out: cli.out.as_ref(),
        out_csv: cli.out_csv.as_ref(),
    };
    emit(&outputs, &manifest, serde_json::to_value(&table)?, Some(csv), Primary::Csv)
}

fn bound_params(a: &BoundArgs, alpha: Option<f64>) -> CliResult<StrictParams> {
    let nu = match (alpha, a.nu) {
        (Some(al), _) => 1.0 / (al * al),
        (None, Some(nu)) => nu,
        (None, None) => return Err(CliError::Input("one of --alpha, --nu, --alpha-grid is required".into())),
    };
    let alpha = 1.0 / nu.sqrt();
    let theta = match (a.theta, a.beta) {
        (Some(_), _) if a.transformed => {
            return Err(CliError::Input("--transformed needs --beta, not --theta".into()))
        }
        (Some(t), _) => t,
        (None, Some(b)) => {
            let p = FormAParams::new(alpha, b, 0.0, 1.0)?;
            if a.transformed {
                stablefit::study::transformed_strict(p.alpha, b)?.theta
            } else {
                to_strict(&p)?.theta
            }
        }
        (None, None) if a.transformed => stablefit::study::transformed_strict(alpha, 0.0)?.theta,
        (None, None) => 0.0,
    };
    let s = StrictParams::new(nu, theta, 0.0)?;
    Ok(s)
}

fn bound(cli: &Cli, a: &BoundArgs) -> CliResult<()> {
    let mut manifest = RunManifest::start("bound", config_of(a), None);
    let outputs = Outputs {
        out: cli.out.as_ref(),
        out_csv: cli.out_csv.as_ref(),
    };
    let sweep = a.n_grid.is_some() || a.alpha_grid.is_some();
    if !sweep {
        let n = a.n.ok_or_else(|| CliError::Input("--n (or --n-grid) is required".into()))?;
        let r = BoundReport::new(&bound_params(a, a.alpha)?, n)?;
        manifest.finish();
        let csv = to_csv(&[r])?;
        return emit(&outputs, &manifest, serde_json::to_value(r)?, Some(csv), Primary::Json);
    }
    let ns = match (&a.n_grid, a.n) {
        (Some(g), _) => g.clone(),
        (None, Some(n)) => vec![n],
        (None, None) => return Err(CliError::Input("--n or --n-grid is required".into())),
    };
    let alphas: Vec<Option<f64>> = match &a.alpha_grid {
        Some(g) => g.iter().map(|&x| Some(x)).collect(),
        None => vec![a.alpha],
    };
    let mut rows = Vec::new();
    for al in alphas {
        let s = bound_params(a, al)?;
        for &n in &ns {
            rows.push(BoundReport::new(&s, n)?);
        }
    }
    manifest.finish();
    let csv = to_csv(&rows)?;
    emit(&outputs, &manifest, serde_json::to_value(&rows)?, Some(csv), Primary::Csv)
}

fn parse_window(w: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Input(format!("window '{w}' is not of the form start:end"));
    let (a, b) = w.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

/// Sampling interval from a time column, which must be uniform.
fn uniform_dt(time: &[f64]) -> CliResult<(f64, f64)> {
    if time.len() < 2 {
        return Err(CliError::Input("need at least 2 time samples".into()));
    }
    let dt = (time[time.len() - 1] - time[0]) / (time.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(CliError::Input("time column must increase".into()));
    }
    for (i, w) in time.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
            return Err(CliError::Input(format!(
                "time column is not uniformly sampled near row {}",
                i + 1
            )));
        }
    }
    Ok((dt, time[0]))
}

#[derive(Serialize)]
struct PlotRow {
    bin_center: f64,
    empirical: f64,
    theoretical: f64,
}

fn analyze_cmd(cli: &Cli, a: &AnalyzeArgs) -> CliResult<()> {
    let mut manifest = RunManifest::start("analyze", config_of(a), None);
    let text = read_input(&a.input, &mut manifest)?;
    let table = parse_table(&text, false)?;
    let time = table.column(table.column_index("time")?);
    let (dt, t0) = uniform_dt(&time)?;
    let series = if table.headers.iter().any(|h| h == "dn") {
        let path = a
            .flux_constants
            .as_ref()
            .ok_or_else(|| CliError::Input("three-channel input needs --flux-constants".into()))?;
        let k: FluxConstants = serde_json::from_str(&read_input(path, &mut manifest)?)?;
        let channel = |name: &str| -> CliResult<SignalSeries> {
            Ok(SignalSeries::new(table.column(table.column_index(name)?), dt, t0, name)?)
        };
        compose_flux(&channel("dn")?, &channel("phi1")?, &channel("phi2")?, &k)?
    } else {
        SignalSeries::new(table.column(table.column_index("value")?), dt, t0, "value")?
    };
    let cfg = AnalyzeConfig {
        bins: a.bins,
        window: a.window.as_deref().map(parse_window).transpose()?,
        tail_fraction: a.tail_fraction,
        ..AnalyzeConfig::default()
    };
    let cmp = analyze(&series, &cfg)?;
    if !cmp.certified && !cli.allow_degraded {
        return Err(CliError::Accuracy(
            "fitted density evaluated outside its certified accuracy region (use --allow-degraded)".into(),
        ));
    }
    manifest.finish();
    let plot: Vec<PlotRow> = cmp
        .histogram
        .iter()
        .zip(&cmp.theoretical)
        .map(|(&(x, e), &(_, t))| PlotRow {
            bin_center: x,
            empirical: e,
            theoretical: t,
        })
        .collect();
    let outputs = Outputs {
        out: cli.out.as_ref(),
        out_csv: cli.out_csv.as_ref(),
    };
    emit(&outputs, &manifest, serde_json::to_value(&cmp)?, Some(to_csv(&plot)?), Primary::Json)
}

fn study(cli: &Cli, a: &StudyArgs) -> CliResult<()> {
    let mut manifest = RunManifest::start("study", config_of(a), Some(cli.seed));
    let cfg = StudyConfig {
        alpha_grid: a.alpha_grid.clone(),
        beta: a.beta,
        n_grid: a.n_grid.clone(),
        replications: a.reps,
        seed: cli.seed,
        workers: a.workers,
    };
    if !cli.quiet {
        eprintln!(
            "study: {} cells x {} replications on {} worker(s)",
            cfg.alpha_grid.len() * cfg.n_grid.len(),
            cfg.replications,
            cfg.workers
        );
    }
    let rows = variance_study(&cfg)?;
    manifest.finish();
    let outputs = Outputs {
        out: cli.out.as_ref(),
        out_csv: cli.out_csv.as_ref(),
    };
    emit(&outputs, &manifest, serde_json::to_value(&rows)?, Some(to_csv(&rows)?), Primary::Csv)
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate(a) => simulate(cli, a),
        Command::Estimate(a) => estimate(cli, a),
        Command::Moments(a) => moments(cli, a),
        Command::Bound(a) => bound(cli, a),
        Command::Analyze(a) => analyze_cmd(cli, a),
        Command::Study(a) => study(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::Input(first.to_string()).record());
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
