//! `wom`: generate WOM networks, simulate the DPA model, price and optimize
//! the influence-based discount, and run experiment sweeps.
//!
//! Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 numerical
//! instability.

mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wom_core::config::{load_experiment, to_toml};
use wom_core::dpa::{integrate, steady_state, SteadyStateOptions};
use wom_core::export::{
    optimization_csv, profit_curve_csv, sweep_records_csv, sweep_trajectories_csv,
    threshold_csv, trajectory_csv, write_outputs, Provenance, TrajectoryForm,
};
use wom_core::network::{
    generate_scale_free, generate_small_world, influential_degree, save_graph,
};
use wom_core::optimize::{optimize_theta, OptimizeOptions};
use wom_core::profit::{profit_curve, uniform_grid};
use wom_core::sweep::{preset, ExperimentResult, PRESET_NAMES};
use wom_core::Error;

use scenario::{ScenarioArgs, DEFAULT_SEED};

#[derive(Parser, Debug)]
#[command(name = "wom", version, about = "Word-of-mouth marketing under an influence-based discount")]
struct Cli {
    /// Worker threads for parallel evaluation (outputs do not depend on it).
    #[arg(long, global = true, env = "WOM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a small-world or scale-free network and write its edge list.
    Generate(GenerateArgs),
    /// Integrate the DPA model and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Evaluate expected profit on a grid of basic discounts.
    Profit(ProfitArgs),
    /// Find the profit-maximizing basic discount.
    Optimize(OptimizeArgs),
    /// Run an experiment from a TOML file or a built-in preset.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    /// Watts–Strogatz small world.
    Sw,
    /// Static-model scale-free.
    Sf,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    kind: Kind,
    /// Node count.
    #[arg(long)]
    n: usize,
    /// Mean degree (small world; even).
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Rewiring probability (small world).
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Edge count (scale-free).
    #[arg(long, default_value_t = 162)]
    m: usize,
    /// Power-law exponent (scale-free; > 1).
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output edge-list path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Trajectory CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Write population means `t,P_mean,A_mean` (default).
    #[arg(long, conflicts_with = "long")]
    mean: bool,
    /// Write per-node rows `t,node,P,A`.
    #[arg(long)]
    long: bool,
}

#[derive(Args, Debug)]
struct ProfitArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// θ grid as `start:end:points`.
    #[arg(long, default_value = "0:1:21")]
    theta_grid: String,
    /// Profit-curve CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Coarse grid size before golden-section refinement (>= 5).
    #[arg(long, default_value_t = 21)]
    coarse_points: usize,
    /// Width of the final θ bracket.
    #[arg(long, default_value_t = 1e-3)]
    tol_theta: f64,
    /// Result CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["config", "preset", "list"]))]
struct SweepArgs {
    /// Experiment TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in experiment name (see --list).
    #[arg(long)]
    preset: Option<String>,
    /// List built-in experiments and exit.
    #[arg(long)]
    list: bool,
    /// Directory for CSV outputs and manifest.json.
    #[arg(long, default_value = "sweep-out")]
    out_dir: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Io(_)) => 1,
            CliError::Core(Error::Instability { .. }) => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Simulate(a) => simulate(a),
        Command::Profit(a) => profit(a),
        Command::Optimize(a) => optimize(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    std::fs::write(path, contents).map_err(|e| CliError::Core(Error::Io(e)))
}

fn generate(a: GenerateArgs) -> CliResult {
    let g = match a.kind {
        Kind::Sw => generate_small_world(a.n, a.k, a.p, a.seed)?,
        Kind::Sf => generate_scale_free(a.n, a.m, a.r, a.seed)?,
    };
    save_graph(&g, &a.out)?;
    let d = influential_degree(&g);
    println!("nodes: {}", g.node_count());
    println!("edges: {}", g.edge_count());
    println!("max influential degree: {}", d.max());
    println!("min influential degree: {}", d.min());
    Ok(())
}

fn simulate(a: SimulateArgs) -> CliResult {
    let sc = a.scenario.resolve()?;
    let traj = integrate(&sc.s0, &sc.params, &sc.graph, &sc.influence, sc.dt)?;
    let form = if a.long {
        TrajectoryForm::Long
    } else {
        TrajectoryForm::Mean
    };
    write_file(&a.out, &trajectory_csv(&traj, form, &sc.provenance()))?;

    let last = traj.final_state();
    println!("samples: {}", traj.len());
    println!(
        "at t = {}: mean P = {:.6}, mean A = {:.6}",
        sc.params.horizon,
        last.mean_potential(),
        last.mean_adopting()
    );
    let ss = steady_state(
        &sc.s0,
        &sc.params,
        &sc.graph,
        &sc.influence,
        sc.dt,
        SteadyStateOptions::default(),
    )?;
    println!(
        "steady state: mean P = {:.6}, mean A = {:.6}, reached = {}, t = {}",
        ss.state.mean_potential(),
        ss.state.mean_adopting(),
        ss.reached,
        ss.t_stop
    );
    Ok(())
}

fn parse_theta_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--theta-grid expects start:end:points, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    Ok(uniform_grid(lo, hi, n))
}

fn profit(a: ProfitArgs) -> CliResult {
    let grid = parse_theta_grid(&a.theta_grid)?;
    let sc = a.scenario.resolve()?;
    let curve = profit_curve(&grid, &sc.params, &sc.graph, &sc.s0, sc.dt)?
        .with_graph_id(sc.graph_id.clone());
    let prov = sc.provenance().with("theta_grid", &a.theta_grid);
    write_file(&a.out, &profit_curve_csv(&curve, &prov))?;
    let (theta, ep) = curve.argmax();
    println!("grid points: {}", curve.thetas.len());
    println!("best grid theta: {theta} (EP = {ep:.6})");
    println!("EP range: {:.6} .. {:.6}", fold_min(&curve.profits), fold_max(&curve.profits));
    Ok(())
}

fn fold_min(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

fn fold_max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn optimize(a: OptimizeArgs) -> CliResult {
    let sc = a.scenario.resolve()?;
    let opts = OptimizeOptions {
        coarse_points: a.coarse_points,
        tol_theta: a.tol_theta,
    };
    let r = optimize_theta(&sc.params, &sc.graph, &sc.s0, sc.dt, opts)?;
    let prov = sc
        .provenance()
        .with("coarse_points", a.coarse_points)
        .with("tol_theta", a.tol_theta);
    write_file(&a.out, &optimization_csv(&r, &prov))?;
    println!("theta* = {:.6}", r.theta_star);
    println!("EP*    = {:.6}", r.ep_star);
    println!("evaluations: {}, method: {}", r.evaluations, r.method);
    Ok(())
}

fn sweep(a: SweepArgs) -> CliResult {
    if a.list {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return Ok(());
    }
    let mut prov = Provenance::new();
    let experiment = match (&a.config, &a.preset) {
        (Some(path), _) => load_experiment(path)?,
        (None, Some(name)) => {
            prov.push("preset", name);
            preset(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset `{name}`; available: {}",
                    PRESET_NAMES.join(", ")
                ))
            })?
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    prov.push("config", to_toml(&experiment).trim_end());

    let mut files = Vec::new();
    match experiment.run()? {
        ExperimentResult::Sweep(result) => {
            files.push(("records.csv".to_string(), sweep_records_csv(&result, &prov)));
            if let Some(t) = sweep_trajectories_csv(&result, &prov) {
                files.push(("trajectories.csv".to_string(), t));
            }
            let failed = result
                .records
                .iter()
                .filter(|r| r.status != wom_core::sweep::Status::Ok)
                .count();
            println!(
                "factor {}: {} values, {} failed",
                result.spec.factor,
                result.records.len(),
                failed
            );
            for r in &result.records {
                let ep = r.profit.map(|p| format!(" EP = {:.4}", p.mean)).unwrap_or_default();
                let ss = r
                    .steady
                    .as_ref()
                    .map(|s| {
                        format!(
                            " P = {:.4} A = {:.4}{}",
                            s.potential.mean,
                            s.adopting.mean,
                            if s.reached { "" } else { " (not converged)" }
                        )
                    })
                    .unwrap_or_default();
                println!("  {}:{ss}{ep}", r.value);
            }
        }
        ExperimentResult::Threshold(scan) => {
            files.push(("threshold.csv".to_string(), threshold_csv(&scan, &prov)));
            for (b, dir) in scan.beta1.iter().zip(&scan.directions) {
                println!("  beta1 = {b}: EP {dir} across networks");
            }
            for f in &scan.flips {
                println!(
                    "  flip in beta1 ({}, {}): {} -> {}",
                    f.beta1_low, f.beta1_high, f.from, f.to
                );
            }
        }
    }
    let manifest = write_outputs(&a.out_dir, &files)?;
    println!("wrote {} files to {}", manifest.outputs.len() + 1, a.out_dir.display());
    Ok(())
}
