//! Command-line front end: `bound`, `sweep`, `simulate` and `compare`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, BoundStatus, KernelPoint, ModelParams, SpeedBound};
use crate::sim::{run_epidemic, InfectionRecord, SimConfig};
use crate::specfun::Dim;
use crate::stats::{self, DominationReport, PropagationCurve, SlopeFit};

/// Environment variable selecting the number of simulation workers.
pub const THREADS_ENV: &str = "DTN_SPEED_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_DOMINATION_FAILED: i32 = 3;

pub const DEFAULT_RUNS: usize = 100;
pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_T_MAX: f64 = 5000.0;
pub const DEFAULT_BIN_WIDTH: f64 = 1.0;
pub const DEFAULT_D_MIN: f64 = 5.0;
pub const DEFAULT_SWEEP_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Bound,
    Sweep,
    Simulate,
    Compare,
}

/// Optional scenario fields, read from a JSON config file and/or flags.
/// Flags win over the file.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioArgs {
    /// Spatial dimension (1, 2 or 3).
    #[arg(long)]
    pub dim: Option<u8>,
    /// Node density, nodes per unit D-volume.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Node speed.
    #[arg(long)]
    pub v: Option<f64>,
    /// Direction-change rate.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Box side length.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub box_length: Option<f64>,
    /// Node count; derived as round(nu * L^D) when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long = "bin-width")]
    pub bin_width: Option<f64>,
    #[arg(long = "dmin")]
    pub d_min: Option<f64>,
    /// Comma-separated densities for `sweep`.
    #[arg(long = "nu-grid", value_delimiter = ',')]
    pub nu_grid: Option<Vec<f64>>,
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn overlay(self, flags: ScenarioArgs) -> ScenarioArgs {
        macro_rules! pick {
            ($($f:ident),*) => { ScenarioArgs { $($f: flags.$f.or(self.$f)),* } };
        }
        pick!(dim, nu, v, tau, box_length, n, dt, tmax, seed, runs, bin_width, d_min, nu_grid, out)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON document with any of the scenario fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Multiplies the theoretical slowness before the domination test.
    #[arg(long = "slowness-scale", hide = true, default_value_t = 1.0)]
    pub slowness_scale: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the propagation speed bound for one parameter set.
    Bound(CommonArgs),
    /// Write the slowness bound along a density grid as CSV.
    Sweep(CommonArgs),
    /// Run epidemic simulations and write reception records as CSV.
    Simulate(CommonArgs),
    /// Simulate, fit the slowness and test it against the bound.
    Compare(CommonArgs),
}

#[derive(Debug, Parser)]
#[command(
    name = "dtn-speed",
    version,
    about = "Propagation speed bounds and epidemic simulation for sparse mobile networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub model: ModelParams,
    pub sim: Option<SimConfig>,
    pub runs: usize,
    pub nu_grid: Vec<f64>,
    pub bin_width: f64,
    pub d_min: f64,
    pub output_path: Option<PathBuf>,
}

fn read_config_file(path: &Path) -> Result<ScenarioArgs> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

fn default_nu_grid(d: Dim) -> Vec<f64> {
    let top = d.density_threshold();
    let lo = 1e-4 * top;
    let steps = DEFAULT_SWEEP_POINTS - 1;
    (0..=steps)
        .map(|i| lo * (top / lo).powf(i as f64 / steps as f64))
        .collect()
}

impl ExperimentConfig {
    pub fn resolve(mode: Mode, common: &CommonArgs) -> Result<Self> {
        let file = match &common.config {
            Some(path) => read_config_file(path)?,
            None => ScenarioArgs::default(),
        };
        let s = file.overlay(common.scenario.clone());

        let d = Dim::new(s.dim.unwrap_or(2))?;
        let v = s.v.unwrap_or(1.0);
        let tau = s.tau.unwrap_or(0.0);
        let runs = s.runs.unwrap_or(DEFAULT_RUNS);
        if runs == 0 {
            return Err(Error::config("runs must be >= 1"));
        }

        let sim = match mode {
            Mode::Simulate | Mode::Compare => {
                let l = s
                    .box_length
                    .ok_or_else(|| Error::config("--L is required for simulate/compare"))?;
                let n = match (s.n, s.nu) {
                    (Some(n), _) => n,
                    (None, Some(nu)) => (nu * l.powi(d.get() as i32)).round() as usize,
                    (None, None) => return Err(Error::config("give --n or --nu")),
                };
                let cfg = SimConfig {
                    d,
                    box_length: l,
                    n,
                    v,
                    tau,
                    dt: s.dt.unwrap_or(DEFAULT_DT),
                    t_max: s.tmax.unwrap_or(DEFAULT_T_MAX),
                    seed: s.seed.unwrap_or(1),
                    ..SimConfig::default()
                };
                cfg.validate()?;
                Some(cfg)
            }
            _ => None,
        };

        let nu = match &sim {
            Some(cfg) => cfg.density(),
            None => s.nu.unwrap_or(0.0),
        };
        if mode == Mode::Bound && s.nu.is_none() {
            return Err(Error::config("--nu is required for bound"));
        }
        let model = ModelParams::new(d, nu, v, tau)?;

        let nu_grid = s.nu_grid.unwrap_or_else(|| default_nu_grid(d));
        if nu_grid.iter().any(|x| !(*x >= 0.0)) {
            return Err(Error::config("nu grid values must be >= 0"));
        }
        if matches!(mode, Mode::Sweep | Mode::Simulate | Mode::Compare) && s.out.is_none() {
            return Err(Error::config("--out is required"));
        }

        Ok(ExperimentConfig {
            mode,
            model,
            sim,
            runs,
            nu_grid,
            bin_width: s.bin_width.unwrap_or(DEFAULT_BIN_WIDTH),
            d_min: s.d_min.unwrap_or(DEFAULT_D_MIN),
            output_path: s.out,
        })
    }
}

/// Full-precision float formatting for CSV output (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Runs `f` on a worker pool sized by [`THREADS_ENV`] (rayon's default
/// when unset or unparsable).
pub fn with_workers<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Records of one simulated epidemic.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub records: Vec<InfectionRecord>,
    pub n: usize,
}

impl RunResult {
    pub fn completion_fraction(&self) -> f64 {
        self.records.len() as f64 / self.n as f64
    }
}

/// Runs `runs` independent epidemics with seeds `seed, seed + 1, …`.
/// The result is ordered by seed whatever the worker count.
pub fn run_many(sim: &SimConfig, runs: usize) -> Result<Vec<RunResult>> {
    with_workers(|| {
        (0..runs as u64)
            .into_par_iter()
            .map(|i| {
                let cfg = SimConfig {
                    seed: sim.seed.wrapping_add(i),
                    ..sim.clone()
                };
                Ok(RunResult {
                    seed: cfg.seed,
                    records: run_epidemic(&cfg)?,
                    n: cfg.n,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?
}

pub fn write_records_csv<W: Write>(mut w: W, runs: &[RunResult]) -> Result<()> {
    writeln!(w, "run_seed,node_id,infection_time,distance")?;
    let mut rows: Vec<(u64, &InfectionRecord)> = runs
        .iter()
        .flat_map(|r| r.records.iter().map(move |rec| (r.seed, rec)))
        .collect();
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.infection_time.total_cmp(&b.1.infection_time))
            .then(a.1.node_id.cmp(&b.1.node_id))
    });
    for (seed, rec) in rows {
        writeln!(
            w,
            "{seed},{},{},{}",
            rec.node_id,
            fmt_f64(rec.infection_time),
            fmt_f64(rec.distance)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_csv<W: Write>(mut w: W, curve: &PropagationCurve) -> Result<()> {
    writeln!(w, "distance,mean_time,std_error,count")?;
    for b in &curve.bins {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(b.distance_center),
            fmt_f64(b.mean_time),
            fmt_f64(b.std_error),
            b.count
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fit_csv<W: Write>(mut w: W, fit: &SlopeFit) -> Result<()> {
    writeln!(w, "slope,intercept,slope_std_error,r_squared,n,d_min,d_max")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{}",
        fmt_f64(fit.slope),
        fmt_f64(fit.intercept),
        fmt_f64(fit.slope_std_error),
        fmt_f64(fit.r_squared),
        fit.n,
        fmt_f64(fit.fit_window.0),
        fmt_f64(fit.fit_window.1)
    )?;
    w.flush()?;
    Ok(())
}

/// Text printed by `bound`.
pub fn cmd_bound(model: &ModelParams) -> Result<String> {
    let bound = kernel::speed_bound(model)?;
    let mut out = format!(
        "dim={} nu={} v={} tau={}\nstatus: {}\n",
        model.d,
        model.nu,
        model.v,
        model.tau,
        bound.status.as_str()
    );
    match (bound.status, bound.argmin) {
        (BoundStatus::Finite, Some(p)) => {
            let residual = kernel::kernel_residual(model, p)?;
            out += &format!(
                "speed: {}\nslowness: {}\nrho0: {}\ntheta0: {}\nkernel_residual: {:e}\n",
                bound.speed, bound.slowness, p.rho, p.theta, residual
            );
        }
        (BoundStatus::Finite, None) => {
            out += &format!(
                "speed: {}\nslowness: {}\nargmin: none (zero density: theta/rho = v for every rho, infimum taken as rho -> inf)\n",
                bound.speed, bound.slowness
            );
        }
        (BoundStatus::Unbounded, _) => {
            out += &format!(
                "speed: inf\nslowness: 0\nnote: nu >= 1/V_D = {}\n",
                model.d.density_threshold()
            );
        }
        (BoundStatus::DegenerateZeroDensity, _) => {
            out +=
                "speed: 0\nslowness: inf\nnote: zero density with tau > 0, infimum at rho -> 0\n";
        }
    }
    Ok(out)
}

/// One row of the `sweep` output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub nu: f64,
    pub bound: SpeedBound,
}

pub fn cmd_sweep(
    d: Dim,
    v: f64,
    tau: f64,
    nu_grid: &[f64],
    output: &Path,
) -> Result<Vec<SweepRow>> {
    let rows: Vec<SweepRow> = kernel::sweep(d, v, tau, nu_grid)?
        .into_iter()
        .map(|(nu, bound)| SweepRow { nu, bound })
        .collect();
    let mut w = create(output)?;
    writeln!(w, "nu,slowness,speed,rho0,theta0,status")?;
    for row in &rows {
        let (rho, theta) = row
            .bound
            .argmin
            .map_or((f64::NAN, f64::NAN), |p: KernelPoint| (p.rho, p.theta));
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_f64(row.nu),
            fmt_f64(row.bound.slowness),
            fmt_f64(row.bound.speed),
            fmt_f64(rho),
            fmt_f64(theta),
            row.bound.status.as_str()
        )?;
    }
    w.flush()?;
    Ok(rows)
}

pub fn cmd_simulate(sim: &SimConfig, runs: usize, output: &Path) -> Result<Vec<RunResult>> {
    let results = run_many(sim, runs)?;
    write_records_csv(create(output)?, &results)?;
    Ok(results)
}

/// Everything `compare` computes.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub model: ModelParams,
    pub bound: SpeedBound,
    pub curve: PropagationCurve,
    pub fit: SlopeFit,
    pub curve_fit: Option<SlopeFit>,
    pub report: DominationReport,
    pub completion: Vec<f64>,
}

/// Simulates, fits the slowness beyond `d_min` and checks it against the
/// bound for `ν = n/L^D`. `slowness_scale` multiplies the theoretical
/// slowness (1 for normal use).
pub fn compare(
    sim: &SimConfig,
    runs: usize,
    bin_width: f64,
    d_min: f64,
    slowness_scale: f64,
) -> Result<Comparison> {
    let model = sim.model_params()?;
    let mut bound = kernel::speed_bound(&model)?;
    // The model is in radio-range units; convert back to box units.
    bound.speed *= sim.radio_range;
    bound.slowness = bound.slowness / sim.radio_range * slowness_scale;
    let results = run_many(sim, runs)?;
    let records: Vec<InfectionRecord> = results
        .iter()
        .flat_map(|r| r.records.iter().copied())
        .collect();
    let curve = stats::build_curve(&records, bin_width)?;
    let fit = stats::fit_slope(&records, d_min)?;
    let curve_fit = curve.linear_fit(d_min).ok();
    let report = stats::check_bound(&fit, &bound);
    Ok(Comparison {
        model,
        bound,
        curve,
        fit,
        curve_fit,
        report,
        completion: results.iter().map(RunResult::completion_fraction).collect(),
    })
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Writes the curve to `output`, the fit summary to `<stem>.fit.csv` and
/// the report to `<stem>.report.json` next to it.
pub fn cmd_compare(
    sim: &SimConfig,
    runs: usize,
    bin_width: f64,
    d_min: f64,
    slowness_scale: f64,
    output: &Path,
) -> Result<Comparison> {
    let cmp = compare(sim, runs, bin_width, d_min, slowness_scale)?;
    write_curve_csv(create(output)?, &cmp.curve)?;
    write_fit_csv(create(&sibling(output, ".fit.csv"))?, &cmp.fit)?;
    let mut w = create(&sibling(output, ".report.json"))?;
    writeln!(w, "{}", cmp.report.to_json())?;
    w.flush()?;
    Ok(cmp)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let (mode, common) = match &cli.command {
        Command::Bound(c) => (Mode::Bound, c),
        Command::Sweep(c) => (Mode::Sweep, c),
        Command::Simulate(c) => (Mode::Simulate, c),
        Command::Compare(c) => (Mode::Compare, c),
    };
    let exp = ExperimentConfig::resolve(mode, common)?;
    let out = exp.output_path.as_deref();
    match mode {
        Mode::Bound => {
            print!("{}", cmd_bound(&exp.model)?);
            Ok(EXIT_OK)
        }
        Mode::Sweep => {
            let m = exp.model;
            let rows = cmd_sweep(m.d, m.v, m.tau, &exp.nu_grid, out.expect("checked"))?;
            println!(
                "wrote {} rows to {}",
                rows.len(),
                out.expect("checked").display()
            );
            Ok(EXIT_OK)
        }
        Mode::Simulate => {
            let sim = exp.sim.as_ref().expect("resolved for simulate");
            println!(
                "nu = n/L^D = {} (n = {}, L = {})",
                sim.density(),
                sim.n,
                sim.box_length
            );
            let results = cmd_simulate(sim, exp.runs, out.expect("checked"))?;
            for r in &results {
                println!("seed {}: completion {:.4}", r.seed, r.completion_fraction());
            }
            Ok(EXIT_OK)
        }
        Mode::Compare => {
            let sim = exp.sim.as_ref().expect("resolved for compare");
            println!(
                "nu = n/L^D = {} (n = {}, L = {})",
                sim.density(),
                sim.n,
                sim.box_length
            );
            let cmp = cmd_compare(
                sim,
                exp.runs,
                exp.bin_width,
                exp.d_min,
                common.slowness_scale,
                out.expect("checked"),
            )?;
            let mean_completion = cmp.completion.iter().sum::<f64>() / cmp.completion.len() as f64;
            println!("mean completion fraction: {mean_completion:.4}");
            if let Some(cf) = &cmp.curve_fit {
                println!("curve linear fit R^2 beyond d_min: {:.4}", cf.r_squared);
            }
            println!("{}", cmp.report.summary_line());
            println!("{}", cmp.report.to_json());
            Ok(if cmp.report.pass {
                EXIT_OK
            } else {
                EXIT_DOMINATION_FAILED
            })
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
