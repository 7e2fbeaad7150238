mod config;

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use concentra::bounds::{
    bound_boolean, bound_general, bound_polynomial, bound_suprema_of_sums, bound_ustat, ergm_triangle_bound, hanson_wright,
    moment_to_tail, polynomial_norms, MomentProfile, Regime, TailBound,
};
use concentra::diffops::{draw, norm_profile, NormProfile, ProfileMode, Provenance};
use concentra::funcs::{fourier_transform, FunctionSpec};
use concentra::lsi::{lsi_constant_search, SearchOptions};
use concentra::models::{glauber_sample, write_samples_binary, write_samples_csv};
use concentra::space::{Measure, DEFAULT_CAP};
use concentra::tensors::OpNormOptions;
use concentra::verify::{
    check_domination, check_moment_chain, default_grid, run_suite, tail_curve, with_atoms, BoundCurve, Side, SuiteOptions, TailMode,
};
use serde::Serialize;

use config::{BoundConfig, ExperimentConfig, Mode, SampleFormat};

/// Invalid configuration or input.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SchemaError {}

const EXIT_ERROR: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "concentra", version, about = "Multilevel tail bounds and their exact verification")]
struct Cli {
    /// Experiment config (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RNG seed; overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the config
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,

    /// Monte Carlo sample count
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Worker threads
    #[arg(long, global = true, env = "CONCENTRA_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tail bound curve as CSV
    Bound,
    /// Exact or sampled tail against the configured bound
    VerifyTail,
    /// Moment chain at every p of the p-grid
    VerifyMoments,
    /// Lower estimate of a log-Sobolev constant
    Lsi,
    /// Fourier–Walsh weights of a function on the hypercube
    Fourier,
    /// Draws from the configured model
    Sample,
    /// The full property corpus
    Suite {
        /// Multiplier on every trial count
        #[arg(long)]
        scale: Option<f64>,
    },
}

enum Outcome {
    Clean,
    Violation(String),
}

struct Run {
    cfg: ExperimentConfig,
    seed: u64,
    out: PathBuf,
    mode: Mode,
    samples: Option<usize>,
}

impl Run {
    fn samples(&self, default: usize) -> usize {
        self.samples.or(self.cfg.samples).unwrap_or(default)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let path = self.out.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(file))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

fn schema(msg: impl Into<String>) -> anyhow::Error {
    SchemaError(msg.into()).into()
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(EXIT_VIOLATION)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<SchemaError>().is_some() {
                ExitCode::from(EXIT_SCHEMA)
            } else {
                ExitCode::from(EXIT_ERROR)
            }
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(schema("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let cfg = match &cli.config {
        Some(path) => config::load(path)?,
        None if matches!(cli.command, Command::Suite { .. }) => serde_json::from_str("{}")?,
        None => return Err(schema("this command needs --config")),
    };
    let run = Run {
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
        out: cli.out.clone().or_else(|| cfg.outputs.as_ref().map(|o| o.dir.clone())).unwrap_or_else(|| PathBuf::from(".")),
        mode: cli.mode.or(cfg.mode).unwrap_or(Mode::Exact),
        samples: cli.samples,
        cfg,
    };
    match cli.command {
        Command::Bound => bound(&run),
        Command::VerifyTail => verify_tail(&run),
        Command::VerifyMoments => verify_moments(&run),
        Command::Lsi => lsi(&run),
        Command::Fourier => fourier(&run),
        Command::Sample => sample(&run),
        Command::Suite { scale } => suite(&run, scale),
    }
}

fn profile(run: &Run, measure: &Measure<f64>, f: &FunctionSpec<f64>, d: usize) -> Result<NormProfile<f64>> {
    let mode = match run.mode {
        Mode::Exact => ProfileMode::Exact,
        Mode::Mc => ProfileMode::MonteCarlo { samples: run.samples(10_000), seed: run.seed },
    };
    Ok(norm_profile(f, measure, d, mode, &OpNormOptions::default(), DEFAULT_CAP)?)
}

fn model_function(run: &Run) -> Result<(Measure<f64>, FunctionSpec<f64>)> {
    run.cfg.model_and_function()
}

/// The configured bound; needs the model and function unless the bound is
/// given by explicit parameters.
fn build_bound(run: &Run) -> Result<TailBound<f64>> {
    let cfg = run.cfg.bound.as_ref().ok_or_else(|| schema("config has no bound"))?;
    let bound = match cfg {
        BoundConfig::Profile { gamma, regime } => {
            let p = NormProfile { d: gamma.len(), gamma: gamma.clone(), provenance: Provenance::Exact };
            bound_general(&p, regime)
        }
        BoundConfig::MomentToTail { coefficients, shift } => {
            moment_to_tail(&MomentProfile { coefficients: coefficients.clone(), shift: *shift })
        }
        BoundConfig::ErgmTriangles { n, c_s2, c_e, c_beta } => ergm_triangle_bound(*n, *c_s2, *c_e, *c_beta),
        BoundConfig::SupremaOfSums { sigma2, n, c_sup } => bound_suprema_of_sums(*sigma2, *n, *c_sup),
        BoundConfig::General { regime } => {
            let (m, f) = model_function(run)?;
            bound_general(&profile(run, &m, &f, regime.d())?, regime)
        }
        BoundConfig::Boolean => {
            let (m, f) = model_function(run)?;
            let table = f.tabulate(m.space(), DEFAULT_CAP)?;
            let spectrum = fourier_transform(m.space(), &table).map_err(|e| schema(format!("boolean bound: {e}")))?;
            let d = spectrum.degree(1e-12).max(1);
            let weights: Vec<f64> = (1..=d).map(|j| spectrum.weight(j)).collect();
            bound_boolean(&weights, d)
        }
        BoundConfig::Ustat { regime, normalized } => {
            let (m, f) = model_function(run)?;
            let b = f.ustat_bound().ok_or_else(|| schema("ustat bound needs a U-statistic function"))?;
            bound_ustat(b, m.n(), regime, *normalized)
        }
        BoundConfig::HansonWright { m: bound_m, regime } => {
            let (_, f) = model_function(run)?;
            let FunctionSpec::Quadform { matrix } = &f else {
                return Err(schema("hanson_wright needs a quadform function"));
            };
            hanson_wright(matrix, *bound_m, regime, &OpNormOptions::default())
        }
        BoundConfig::Polynomial { sigma2, c_user } => {
            let (m, f) = model_function(run)?;
            let d = f.as_poly(m.n()).map(|c| c.len()).ok_or_else(|| schema("polynomial bound needs a polynomial function"))?;
            let norms = polynomial_norms(&f, &m.law(DEFAULT_CAP)?, &OpNormOptions::default())?;
            bound_polynomial(&norms, d, *sigma2, *c_user)
        }
    };
    bound.map_err(|e| schema(format!("bound: {e}")))
}

fn t_grid(run: &Run, bound: &TailBound<f64>) -> Result<Vec<f64>> {
    match &run.cfg.t_grid {
        Some(g) => g.values(),
        None => match default_grid(bound, 0.01, 100) {
            Ok(g) => Ok(g),
            // every level vanishes: the bound is 0 for t > 0
            Err(_) => Ok((0..=100).map(|j| j as f64 / 10.0).collect()),
        },
    }
}

fn bound(run: &Run) -> Result<Outcome> {
    let b = build_bound(run)?;
    let grid = t_grid(run, &b)?;
    let mut w = run.create("bound.csv")?;
    b.write_csv(&grid, &mut w)?;
    w.flush()?;
    if !b.certified {
        eprintln!("note: bound '{}' uses a constant that is not certified", b.name);
    }
    Ok(Outcome::Clean)
}

#[derive(Serialize)]
struct TailReport<'a> {
    certified: bool,
    side: Side,
    mode: Mode,
    samples: Option<usize>,
    seed: u64,
    domination: &'a concentra::verify::DominationReport<f64>,
}

fn verify_tail(run: &Run) -> Result<Outcome> {
    let (m, f) = model_function(run)?;
    let b = build_bound(run)?;
    let side = if b.one_sided { Side::Upper } else { Side::TwoSided };
    let table = f.tabulate(m.space(), DEFAULT_CAP)?;
    let mut grid = t_grid(run, &b)?;
    let mode = match run.mode {
        Mode::Exact => {
            if run.cfg.t_grid.is_none() {
                grid = with_atoms(&grid, &m.law(DEFAULT_CAP)?, &table, side);
            }
            TailMode::Exact
        }
        Mode::Mc => TailMode::monte_carlo(run.samples(100_000), run.seed),
    };
    let curve = tail_curve(&m, &table, &grid, mode, side, DEFAULT_CAP)?;
    let bc = BoundCurve::of(&b, &grid);
    let report = check_domination(&curve, &bc)?;

    let mut w = run.create("tail.csv")?;
    writeln!(w, "t,probability,upper_limit,bound,margin")?;
    for j in 0..grid.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            num(grid[j]),
            num(curve.probability[j]),
            num(curve.upper_limit[j]),
            num(bc.clipped[j]),
            num(report.margins[j])
        )?;
    }
    w.flush()?;
    run.write_json(
        "tail_report.json",
        &TailReport { certified: b.certified, side, mode: run.mode, samples: curve.samples, seed: run.seed, domination: &report },
    )?;
    if report.dominated {
        Ok(Outcome::Clean)
    } else {
        Ok(Outcome::Violation(format!("tail exceeds '{}' at {} grid points", b.name, report.violations.len())))
    }
}

fn verify_moments(run: &Run) -> Result<Outcome> {
    if run.mode != Mode::Exact {
        return Err(schema("verify-moments needs exact mode"));
    }
    let (m, f) = model_function(run)?;
    let regime: Regime<f64> = run.cfg.regime.ok_or_else(|| schema("config has no regime"))?;
    let p_grid = run.cfg.p_grid.clone().unwrap_or_else(|| (2..=20).map(f64::from).collect());
    let table = f.tabulate(m.space(), DEFAULT_CAP)?;
    let report = check_moment_chain(&m, &table, &regime, &p_grid, &OpNormOptions::default(), DEFAULT_CAP)
        .map_err(|e| schema(format!("moment chain: {e}")))?;
    let mut w = run.create("moments.csv")?;
    writeln!(w, "p,lhs,rhs,d_rhs,holds")?;
    for r in &report.rows {
        let d = r.d_rhs.map(num).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", num(r.p), num(r.lhs), num(r.rhs), d, r.holds)?;
    }
    w.flush()?;
    run.write_json("moments_report.json", &report)?;
    if report.violations == 0 {
        Ok(Outcome::Clean)
    } else {
        Ok(Outcome::Violation(format!("moment chain fails at {} values of p", report.violations)))
    }
}

fn lsi(run: &Run) -> Result<Outcome> {
    let m = run.cfg.model()?.build().map_err(|e| schema(format!("model: {e}")))?;
    let cfg = run.cfg.lsi.as_ref().ok_or_else(|| schema("config has no lsi section"))?;
    let defaults = SearchOptions::default();
    let opts = SearchOptions {
        starts: cfg.starts.unwrap_or(defaults.starts),
        seed: run.seed,
        max_passes: cfg.max_passes.unwrap_or(defaults.max_passes),
    };
    let report = lsi_constant_search(&m.law(DEFAULT_CAP)?, cfg.operator, &opts)?;
    run.write_json("lsi.json", &report)?;
    Ok(Outcome::Clean)
}

fn fourier(run: &Run) -> Result<Outcome> {
    let (m, f) = model_function(run)?;
    let table = f.tabulate(m.space(), DEFAULT_CAP)?;
    let spectrum = fourier_transform(m.space(), &table).map_err(|e| schema(format!("fourier: {e}")))?;
    let mut w = run.create("fourier.csv")?;
    writeln!(w, "level,weight")?;
    for (j, &v) in spectrum.weights.iter().enumerate() {
        writeln!(w, "{j},{}", num(v))?;
    }
    w.flush()?;
    let mut w = run.create("fourier_coefficients.csv")?;
    writeln!(w, "mask,coefficient")?;
    for (mask, &c) in spectrum.coefficients.iter().enumerate() {
        writeln!(w, "{mask},{}", num(c))?;
    }
    w.flush()?;
    Ok(Outcome::Clean)
}

fn sample(run: &Run) -> Result<Outcome> {
    let m = run.cfg.model()?.build().map_err(|e| schema(format!("model: {e}")))?;
    let cfg = run.cfg.sample.clone().unwrap_or_default();
    let count = run.samples(10_000);
    if count == 0 {
        return Err(schema("sample count must be positive"));
    }
    let draws = if m.is_gibbs() {
        let thinning = cfg.thinning.unwrap_or(1).max(1);
        glauber_sample(&m, count * thinning, cfg.burn_in.unwrap_or(100), thinning, run.seed)?
    } else {
        draw(&m, count, run.seed)?
    };
    match cfg.format {
        SampleFormat::Csv => {
            let mut w = run.create("samples.csv")?;
            write_samples_csv(m.space(), &draws, &mut w)?;
            w.flush()?;
        }
        SampleFormat::Binary => {
            let mut w = run.create("samples.bin")?;
            write_samples_binary(m.n(), &draws, &mut w)?;
            w.flush()?;
        }
    }
    Ok(Outcome::Clean)
}

fn suite(run: &Run, scale: Option<f64>) -> Result<Outcome> {
    let scale = scale.or(run.cfg.suite.as_ref().and_then(|s| s.scale)).unwrap_or(1.0);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(schema("suite scale must be positive"));
    }
    let seed = if run.seed == 0 && run.cfg.seed.is_none() { SuiteOptions::default().seed } else { run.seed };
    let report = run_suite(&SuiteOptions { seed, scale })?;
    let mut w = run.create("report.json")?;
    report.write_json(&mut w)?;
    w.flush()?;
    let mut w = run.create("summary.csv")?;
    report.write_csv(&mut w)?;
    w.flush()?;
    for c in &report.checks {
        let verdict = if c.passed { "pass" } else { "FAIL" };
        let note = if c.gating { "" } else { " (informational)" };
        eprintln!("{verdict:>4} {}{note}", c.name);
    }
    if report.passed {
        Ok(Outcome::Clean)
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| c.gating && !c.passed).map(|c| c.name.as_str()).collect();
        Ok(Outcome::Violation(format!("failed checks: {}", failed.join(", "))))
    }
}

