//! One-factor-at-a-time experiments: vary α, β₁, β₂, γ, θ or the network,
//! hold everything else at the base scenario, and collect steady-state
//! fractions, expected profit and mean trajectories per value.
//!
//! Random networks are realized `replicates` times (seeds `seed`,
//! `seed + 1`, …) when the network itself is the factor; the same seeds are
//! reused for every descriptor. Values run in parallel and records are
//! assembled by index, so output never depends on scheduling.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dpa::{
    integrate, mean_fractions, steady_state, MeanFractions, ModelParams, StateVector,
    SteadyStateOptions, DEFAULT_DT,
};
use crate::error::{Error, Result};
use crate::network::{
    generate_scale_free, generate_small_world, influential_degree, load_graph, Graph,
};
use crate::profit::{evaluate_profit, expected_profit, uniform_grid};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_REPLICATES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Alpha,
    Beta1,
    Beta2,
    Gamma,
    Theta,
    Network,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::Alpha => "alpha",
            Factor::Beta1 => "beta1",
            Factor::Beta2 => "beta2",
            Factor::Gamma => "gamma",
            Factor::Theta => "theta",
            Factor::Network => "network",
        })
    }
}

/// How to obtain a WOM network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NetworkSpec {
    /// Watts–Strogatz: `n` nodes, mean degree `k`, rewiring probability `p`.
    SmallWorld { n: usize, k: usize, p: f64 },
    /// Static-model scale-free: `n` nodes, `m` edges, exponent `r`.
    ScaleFree { n: usize, m: usize, r: f64 },
    /// An edge-list file.
    File { path: PathBuf },
}

impl NetworkSpec {
    /// The default scenario's network: 100 nodes, 200 edges, p = 0.1.
    pub fn default_small_world() -> Self {
        NetworkSpec::SmallWorld { n: 100, k: 4, p: 0.1 }
    }

    pub fn is_random(&self) -> bool {
        !matches!(self, NetworkSpec::File { .. })
    }

    pub fn build(&self, seed: u64) -> Result<Graph> {
        match self {
            NetworkSpec::SmallWorld { n, k, p } => generate_small_world(*n, *k, *p, seed),
            NetworkSpec::ScaleFree { n, m, r } => generate_scale_free(*n, *m, *r, seed),
            NetworkSpec::File { path } => load_graph(path),
        }
    }

    /// Descriptor id with the realization seeds appended.
    pub fn id(&self, seed: u64, replicates: usize) -> String {
        if !self.is_random() {
            return self.to_string();
        }
        if replicates <= 1 {
            format!("{self}@seed={seed}")
        } else {
            let last = seed.wrapping_add(replicates as u64 - 1);
            format!("{self}@seeds={seed}..={last}")
        }
    }
}

impl fmt::Display for NetworkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkSpec::SmallWorld { n, k, p } => write!(f, "small-world(n={n},k={k},p={p})"),
            NetworkSpec::ScaleFree { n, m, r } => write!(f, "scale-free(n={n},m={m},r={r})"),
            NetworkSpec::File { path } => write!(f, "file({})", path.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorValue {
    Number(f64),
    Network(NetworkSpec),
}

impl fmt::Display for FactorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorValue::Number(x) => write!(f, "{x}"),
            FactorValue::Network(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    MeanTrajectories,
    SteadyState,
    Profit,
}

/// Uniform initial condition: every node potential w.p. `potential` and
/// adopting w.p. `adopting`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialCondition {
    pub potential: f64,
    pub adopting: f64,
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition {
            potential: 0.1,
            adopting: 0.0,
        }
    }
}

impl InitialCondition {
    pub fn state(&self, n: usize) -> Result<StateVector> {
        StateVector::uniform(n, self.potential, self.adopting)
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "uniform(P0={}, A0={})", self.potential, self.adopting)
    }
}

fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}
fn default_outputs() -> BTreeSet<Output> {
    [Output::SteadyState, Output::Profit].into_iter().collect()
}

/// A one-factor experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub factor: Factor,
    pub values: Vec<FactorValue>,
    #[serde(default)]
    pub base: ModelParams,
    /// Network used when the factor is not `network`.
    #[serde(default = "NetworkSpec::default_small_world")]
    pub network: NetworkSpec,
    #[serde(default)]
    pub s0: InitialCondition,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_outputs")]
    pub outputs: BTreeSet<Output>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Realizations per random network descriptor when the factor is
    /// `network`.
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub steady: SteadyStateOptions,
}

impl SweepSpec {
    /// A spec over `factor` with everything else at defaults.
    pub fn new(factor: Factor, values: Vec<FactorValue>) -> Self {
        SweepSpec {
            factor,
            values,
            base: ModelParams::default(),
            network: NetworkSpec::default_small_world(),
            s0: InitialCondition::default(),
            dt: DEFAULT_DT,
            outputs: default_outputs(),
            seed: DEFAULT_SEED,
            replicates: DEFAULT_REPLICATES,
            steady: SteadyStateOptions::default(),
        }
    }

    pub fn numbers(factor: Factor, values: &[f64]) -> Self {
        Self::new(factor, values.iter().map(|&v| FactorValue::Number(v)).collect())
    }

    pub fn networks(values: Vec<NetworkSpec>) -> Self {
        Self::new(
            Factor::Network,
            values.into_iter().map(FactorValue::Network).collect(),
        )
    }

    pub fn with_outputs(mut self, outputs: &[Output]) -> Self {
        self.outputs = outputs.iter().copied().collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::param("sweep needs at least one value"));
        }
        if self.outputs.is_empty() {
            return Err(Error::param("sweep needs at least one output"));
        }
        if self.replicates == 0 {
            return Err(Error::param("replicates must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt <= self.base.horizon) {
            return Err(Error::param(format!(
                "dt = {} must lie in (0, horizon]",
                self.dt
            )));
        }
        self.s0.state(1)?;
        self.base.validate()?;
        for v in &self.values {
            match (self.factor, v) {
                (Factor::Network, FactorValue::Network(_)) => {}
                (Factor::Network, FactorValue::Number(x)) => {
                    return Err(Error::param(format!(
                        "factor `network` needs network descriptors, got {x}"
                    )))
                }
                (f, FactorValue::Number(x)) => self.params_for(f, *x).validate()?,
                (f, FactorValue::Network(n)) => {
                    return Err(Error::param(format!(
                        "factor `{f}` needs numbers, got {n}"
                    )))
                }
            }
        }
        Ok(())
    }

    fn params_for(&self, factor: Factor, x: f64) -> ModelParams {
        let mut p = self.base;
        match factor {
            Factor::Alpha => p.alpha = x,
            Factor::Beta1 => p.beta1 = x,
            Factor::Beta2 => p.beta2 = x,
            Factor::Gamma => p.gamma = x,
            Factor::Theta => p.theta = x,
            Factor::Network => {}
        }
        p
    }

    /// Parameters, network and realization count for one value.
    fn scenario(&self, value: &FactorValue) -> (ModelParams, NetworkSpec, usize) {
        match value {
            FactorValue::Number(x) => (self.params_for(self.factor, *x), self.network.clone(), 1),
            FactorValue::Network(n) => {
                let reps = if n.is_random() { self.replicates } else { 1 };
                (self.base, n.clone(), reps)
            }
        }
    }
}

/// Sample mean and standard deviation over network realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Stat {
        let count = xs.len();
        let mean = xs.iter().sum::<f64>() / count as f64;
        let sd = if count > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean, sd, count }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadySummary {
    pub potential: Stat,
    pub adopting: Stat,
    pub t_stop: Stat,
    /// True only if every realization converged.
    pub reached: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub value: FactorValue,
    pub graph_id: String,
    pub realizations: usize,
    pub status: Status,
    pub steady: Option<SteadySummary>,
    pub profit: Option<Stat>,
    /// Mean fractions averaged over realizations.
    pub trajectory: Option<Vec<MeanFractions>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// Mean steady fractions `(P̄, Ā)` per record, `None` where unavailable.
    pub fn steady_means(&self) -> Vec<Option<(f64, f64)>> {
        self.records
            .iter()
            .map(|r| r.steady.as_ref().map(|s| (s.potential.mean, s.adopting.mean)))
            .collect()
    }

    /// Mean EP per record, `None` where unavailable.
    pub fn profit_means(&self) -> Vec<Option<f64>> {
        self.records
            .iter()
            .map(|r| r.profit.map(|s| s.mean))
            .collect()
    }
}

struct Realization {
    steady: Option<(f64, f64, f64, bool)>,
    profit: Option<f64>,
    trajectory: Option<Vec<MeanFractions>>,
}

fn realize(
    spec: &SweepSpec,
    params: &ModelParams,
    network: &NetworkSpec,
    seed: u64,
) -> Result<Realization> {
    let g = network.build(seed)?;
    let d = influential_degree(&g);
    let s0 = spec.s0.state(g.node_count())?;
    let mut out = Realization {
        steady: None,
        profit: None,
        trajectory: None,
    };
    if spec.outputs.contains(&Output::MeanTrajectories) {
        let traj = integrate(&s0, params, &g, &d, spec.dt)?;
        out.trajectory = Some(mean_fractions(&traj));
        if spec.outputs.contains(&Output::Profit) {
            out.profit = Some(expected_profit(&traj));
        }
    } else if spec.outputs.contains(&Output::Profit) {
        out.profit = Some(evaluate_profit(&s0, params, &g, &d, spec.dt)?);
    }
    if spec.outputs.contains(&Output::SteadyState) {
        let ss = steady_state(&s0, params, &g, &d, spec.dt, spec.steady)?;
        out.steady = Some((
            ss.state.mean_potential(),
            ss.state.mean_adopting(),
            ss.t_stop,
            ss.reached,
        ));
    }
    Ok(out)
}

fn run_value(spec: &SweepSpec, value: &FactorValue) -> SweepRecord {
    let (params, network, reps) = spec.scenario(value);
    let graph_id = network.id(spec.seed, reps);
    let runs: Result<Vec<Realization>> = (0..reps)
        .into_par_iter()
        .map(|r| realize(spec, &params, &network, spec.seed.wrapping_add(r as u64)))
        .collect();

    let mut record = SweepRecord {
        value: value.clone(),
        graph_id,
        realizations: reps,
        status: Status::Ok,
        steady: None,
        profit: None,
        trajectory: None,
    };
    let runs = match runs {
        Ok(r) => r,
        Err(e) => {
            record.status = Status::Failed(e.to_string());
            return record;
        }
    };

    if spec.outputs.contains(&Output::SteadyState) {
        let col = |f: fn(&(f64, f64, f64, bool)) -> f64| {
            Stat::of(&runs.iter().map(|r| f(r.steady.as_ref().unwrap())).collect::<Vec<_>>())
        };
        record.steady = Some(SteadySummary {
            potential: col(|s| s.0),
            adopting: col(|s| s.1),
            t_stop: col(|s| s.2),
            reached: runs.iter().all(|r| r.steady.unwrap().3),
        });
    }
    if spec.outputs.contains(&Output::Profit) {
        record.profit = Some(Stat::of(
            &runs.iter().map(|r| r.profit.unwrap()).collect::<Vec<_>>(),
        ));
    }
    if spec.outputs.contains(&Output::MeanTrajectories) {
        let first = runs[0].trajectory.as_ref().unwrap();
        let k = runs.len() as f64;
        record.trajectory = Some(
            (0..first.len())
                .map(|i| {
                    let (mut p, mut a) = (0.0, 0.0);
                    for r in &runs {
                        let m = r.trajectory.as_ref().unwrap()[i];
                        p += m.potential;
                        a += m.adopting;
                    }
                    MeanFractions {
                        t: first[i].t,
                        potential: p / k,
                        adopting: a / k,
                    }
                })
                .collect(),
        );
    }
    record
}

/// Runs every value of the sweep. Only an invalid spec is an error; solver
/// failures are recorded per value.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let records = spec
        .values
        .par_iter()
        .map(|v| run_value(spec, v))
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        records,
    })
}

/// How EP moves along the ordered network list of one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
    NonMonotone,
    NotApplicable,
}

impl Direction {
    pub fn of(values: &[f64]) -> Direction {
        if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
            return Direction::NotApplicable;
        }
        if values.windows(2).all(|w| w[1] > w[0]) {
            Direction::Increasing
        } else if values.windows(2).all(|w| w[1] < w[0]) {
            Direction::Decreasing
        } else {
            Direction::NonMonotone
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
            Direction::NonMonotone => "non-monotone",
            Direction::NotApplicable => "n/a",
        })
    }
}

/// A change of direction label between consecutive β₁ rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flip {
    pub beta1_low: f64,
    pub beta1_high: f64,
    pub from: Direction,
    pub to: Direction,
}

/// EP for every (β₁, network) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScan {
    pub beta1: Vec<f64>,
    pub networks: Vec<String>,
    /// `ep[row][col]`: mean EP at `beta1[row]` on `networks[col]`; NaN when
    /// that record failed.
    pub ep: Vec<Vec<f64>>,
    pub ep_sd: Vec<Vec<f64>>,
    pub directions: Vec<Direction>,
    pub flips: Vec<Flip>,
}

impl ThresholdScan {
    /// True when some row rises and another falls across the network list.
    pub fn has_reversal(&self) -> bool {
        self.directions.contains(&Direction::Increasing)
            && self.directions.contains(&Direction::Decreasing)
    }
}

/// Repeats a network sweep for every β₁ and labels each row's direction.
pub fn threshold_scan(beta1_values: &[f64], inner: &SweepSpec) -> Result<ThresholdScan> {
    if inner.factor != Factor::Network {
        return Err(Error::param("threshold scan needs a sweep over networks"));
    }
    if beta1_values.is_empty() {
        return Err(Error::param("threshold scan needs at least one beta1 value"));
    }
    let mut spec = inner.clone();
    spec.outputs.insert(Output::Profit);

    let mut ep = Vec::new();
    let mut ep_sd = Vec::new();
    let mut networks = Vec::new();
    for &b in beta1_values {
        let mut row_spec = spec.clone();
        row_spec.base.beta1 = b;
        let result = run_sweep(&row_spec)?;
        networks = result.records.iter().map(|r| r.value.to_string()).collect();
        ep.push(
            result
                .records
                .iter()
                .map(|r| r.profit.map_or(f64::NAN, |s| s.mean))
                .collect::<Vec<_>>(),
        );
        ep_sd.push(
            result
                .records
                .iter()
                .map(|r| r.profit.map_or(f64::NAN, |s| s.sd))
                .collect(),
        );
    }
    let directions: Vec<Direction> = ep.iter().map(|row| Direction::of(row)).collect();
    let flips = (1..directions.len())
        .filter(|&k| directions[k] != directions[k - 1])
        .map(|k| Flip {
            beta1_low: beta1_values[k - 1],
            beta1_high: beta1_values[k],
            from: directions[k - 1],
            to: directions[k],
        })
        .collect();
    Ok(ThresholdScan {
        beta1: beta1_values.to_vec(),
        networks,
        ep,
        ep_sd,
        directions,
        flips,
    })
}

/// A sweep, optionally repeated over β₁ as a threshold scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub sweep: SweepSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSpec {
    pub beta1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentResult {
    Sweep(SweepResult),
    Threshold(ThresholdScan),
}

impl Experiment {
    pub fn sweep(sweep: SweepSpec) -> Self {
        Experiment {
            sweep,
            threshold: None,
        }
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        match &self.threshold {
            None => run_sweep(&self.sweep).map(ExperimentResult::Sweep),
            Some(t) => threshold_scan(&t.beta1, &self.sweep).map(ExperimentResult::Threshold),
        }
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "dynamics-alpha",
    "dynamics-beta1",
    "dynamics-beta2",
    "dynamics-gamma",
    "dynamics-small-world",
    "dynamics-scale-free",
    "dynamics-theta",
    "profit-alpha",
    "profit-beta1",
    "profit-beta2",
    "profit-gamma",
    "profit-theta",
    "threshold-small-world",
    "threshold-scale-free",
];

pub fn small_world_family() -> Vec<NetworkSpec> {
    [0.1, 0.2, 0.3]
        .into_iter()
        .map(|p| NetworkSpec::SmallWorld { n: 100, k: 4, p })
        .collect()
}

pub fn scale_free_family() -> Vec<NetworkSpec> {
    [1.9, 2.0, 2.1]
        .into_iter()
        .map(|r| NetworkSpec::ScaleFree { n: 100, m: 162, r })
        .collect()
}

/// Built-in experiment designs: the dynamics and the profit under each
/// factor, plus the two β₁ threshold scans.
pub fn preset(name: &str) -> Option<Experiment> {
    use Output::*;
    let dynamics = [MeanTrajectories, SteadyState];
    let spec = match name {
        "dynamics-alpha" => SweepSpec::numbers(Factor::Alpha, &[0.2, 0.4, 0.8, 1.6]),
        "dynamics-beta1" => SweepSpec::numbers(Factor::Beta1, &[0.1, 0.3, 0.6, 1.2]),
        "dynamics-beta2" => SweepSpec::numbers(Factor::Beta2, &[0.5, 1.0, 1.5, 3.0]),
        "dynamics-gamma" => SweepSpec::numbers(Factor::Gamma, &[0.2, 0.4, 0.8, 1.2]),
        "dynamics-small-world" => SweepSpec::networks(small_world_family()),
        "dynamics-scale-free" => SweepSpec::networks(scale_free_family()),
        "dynamics-theta" => SweepSpec::numbers(Factor::Theta, &[0.0, 0.25, 0.5, 0.75, 1.0]),
        "profit-alpha" => {
            return Some(Experiment::sweep(
                SweepSpec::numbers(Factor::Alpha, &uniform_grid(0.05, 2.0, 10))
                    .with_outputs(&[Profit]),
            ))
        }
        "profit-beta1" => SweepSpec::numbers(Factor::Beta1, &uniform_grid(0.05, 2.0, 10)),
        "profit-beta2" => SweepSpec::numbers(Factor::Beta2, &uniform_grid(0.0, 4.0, 9)),
        "profit-gamma" => SweepSpec::numbers(Factor::Gamma, &uniform_grid(0.05, 2.0, 14)),
        "profit-theta" => SweepSpec::numbers(Factor::Theta, &uniform_grid(0.0, 1.0, 21)),
        "threshold-small-world" => {
            return Some(Experiment {
                sweep: SweepSpec::networks(small_world_family()).with_outputs(&[Profit]),
                threshold: Some(ThresholdSpec {
                    beta1: vec![0.1, 0.3, 1.0],
                }),
            })
        }
        "threshold-scale-free" => {
            return Some(Experiment {
                sweep: SweepSpec::networks(scale_free_family()).with_outputs(&[Profit]),
                threshold: Some(ThresholdSpec {
                    beta1: vec![0.05, 0.12, 1.0],
                }),
            })
        }
        _ => return None,
    };
    let spec = if name.starts_with("dynamics-") {
        spec.with_outputs(&dynamics)
    } else {
        spec.with_outputs(&[Profit])
    };
    Some(Experiment::sweep(spec))
}
