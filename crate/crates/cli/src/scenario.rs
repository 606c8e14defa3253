//! Single-scenario settings shared by `simulate`, `profit` and `optimize`.
//!
//! Precedence: command-line flags, then the `--config` file, then defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use wom_core::dpa::{ModelParams, StateVector, DEFAULT_DT};
use wom_core::export::Provenance;
use wom_core::network::{influential_degree, load_graph, Graph, InfluenceVector};
use wom_core::sweep::{InitialCondition, NetworkSpec};
use wom_core::{Error, Result};

pub const DEFAULT_SEED: u64 = wom_core::sweep::DEFAULT_SEED;

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    /// Scenario TOML file (keys: graph, network, seed, dt, [params], [s0]).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Edge-list file. Default: small world n=100, k=4, p=0.1 built from --seed.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Seed for the default network [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// WOM force α, per unit time [default: 0.5].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rigid demand β₁, per unit time [default: 0.3].
    #[arg(long)]
    pub beta1: Option<f64>,
    /// Lure force β₂, per unit time per unit discount [default: 1.5].
    #[arg(long)]
    pub beta2: Option<f64>,
    /// Viscosity γ, per unit time [default: 0.4].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Basic discount θ in [0, 1] [default: 0.3].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Campaign length T, time units [default: 50].
    #[arg(long = "horizon", alias = "t-end")]
    pub horizon: Option<f64>,
    /// Initial potential fraction per node [default: 0.1].
    #[arg(long)]
    pub p0: Option<f64>,
    /// Initial adopting fraction per node [default: 0].
    #[arg(long)]
    pub a0: Option<f64>,
    /// RK4 step, time units [default: 0.01].
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    graph: Option<PathBuf>,
    network: Option<NetworkSpec>,
    seed: Option<u64>,
    dt: Option<f64>,
    params: Option<ModelParams>,
    s0: Option<InitialCondition>,
}

pub struct Scenario {
    pub graph: Graph,
    pub graph_id: String,
    pub influence: InfluenceVector,
    pub params: ModelParams,
    pub s0: StateVector,
    pub initial: InitialCondition,
    pub dt: f64,
}

impl Scenario {
    pub fn provenance(&self) -> Provenance {
        Provenance::new()
            .with("graph", &self.graph_id)
            .params(&self.params)
            .with("s0", self.initial)
            .with("dt", self.dt)
    }
}

fn read_file(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)?;
    let mut file: ScenarioFile =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    if let Some(g) = &file.graph {
        if g.is_relative() {
            file.graph = Some(base.join(g));
        }
    }
    if let Some(NetworkSpec::File { path }) = &mut file.network {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
    if file.graph.is_some() && file.network.is_some() {
        return Err(Error::Config("set either `graph` or `network`, not both".into()));
    }
    Ok(file)
}

impl ScenarioArgs {
    pub fn resolve(&self) -> Result<Scenario> {
        let file = match &self.config {
            Some(p) => read_file(p)?,
            None => ScenarioFile::default(),
        };

        let mut params = file.params.unwrap_or_default();
        let overrides = [
            (&mut params.alpha, self.alpha),
            (&mut params.beta1, self.beta1),
            (&mut params.beta2, self.beta2),
            (&mut params.gamma, self.gamma),
            (&mut params.theta, self.theta),
            (&mut params.horizon, self.horizon),
        ];
        for (slot, flag) in overrides {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        params.validate()?;

        let mut initial = file.s0.unwrap_or_default();
        if let Some(p) = self.p0 {
            initial.potential = p;
        }
        if let Some(a) = self.a0 {
            initial.adopting = a;
        }
        let dt = self.dt.or(file.dt).unwrap_or(DEFAULT_DT);
        let seed = self.seed.or(file.seed).unwrap_or(DEFAULT_SEED);

        let (graph, graph_id) = match (&self.graph, &file.graph, &file.network) {
            (Some(p), _, _) | (None, Some(p), _) => (load_graph(p)?, format!("file({})", p.display())),
            (None, None, Some(spec)) => (spec.build(seed)?, spec.id(seed, 1)),
            (None, None, None) => {
                let spec = NetworkSpec::default_small_world();
                (spec.build(seed)?, spec.id(seed, 1))
            }
        };
        let s0 = initial.state(graph.node_count())?;
        let influence = influential_degree(&graph);
        Ok(Scenario {
            graph,
            graph_id,
            influence,
            params,
            s0,
            initial,
            dt,
        })
    }
}
