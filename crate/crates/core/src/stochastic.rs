//! Discrete-time Monte Carlo simulation of the per-node Markov chain behind
//! the DPA model, used as an independent check on the mean-field ODE.
//!
//! Every step of length `h`, using the states realized at the start of the
//! step:
//!
//! * dormant `i` turns potential w.p. `α h · #{adopting j : a_ij = 1}`,
//! * potential `i` turns adopting w.p. `(β₁ + β₂ θ d_i) h`,
//! * adopting `i` turns dormant w.p. `γ h`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dpa::{time_grid, ModelParams, StateVector};
use crate::error::{Error, Result};
use crate::network::{Graph, InfluenceVector};

/// Runs per RNG stream. Fixed so results do not depend on the thread count.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeState {
    Dormant,
    Potential,
    Adopting,
}

/// Empirical mean fractions and their standard errors per sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSeries {
    pub times: Vec<f64>,
    pub potential: Vec<f64>,
    pub adopting: Vec<f64>,
    pub potential_se: Vec<f64>,
    pub adopting_se: Vec<f64>,
    pub runs: usize,
}

impl OracleSeries {
    /// Index of the sample closest to `t`.
    pub fn index_at(&self, t: f64) -> usize {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

#[derive(Clone)]
struct Moments {
    sum_p: Vec<f64>,
    sum_p2: Vec<f64>,
    sum_a: Vec<f64>,
    sum_a2: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments {
            sum_p: vec![0.0; len],
            sum_p2: vec![0.0; len],
            sum_a: vec![0.0; len],
            sum_a2: vec![0.0; len],
        }
    }

    fn record(&mut self, k: usize, p: f64, a: f64) {
        self.sum_p[k] += p;
        self.sum_p2[k] += p * p;
        self.sum_a[k] += a;
        self.sum_a2[k] += a * a;
    }

    fn merge(mut self, other: &Moments) -> Self {
        for k in 0..self.sum_p.len() {
            self.sum_p[k] += other.sum_p[k];
            self.sum_p2[k] += other.sum_p2[k];
            self.sum_a[k] += other.sum_a[k];
            self.sum_a2[k] += other.sum_a2[k];
        }
        self
    }
}

/// Simulates `runs` independent realizations over `[0, params.horizon]`.
///
/// Initial node states are sampled independently from `s0`; a 0/1 `s0`
/// gives a deterministic start. Deterministic given `seed`.
pub fn stochastic_oracle(
    s0: &StateVector,
    params: &ModelParams,
    g: &Graph,
    d: &InfluenceVector,
    dt: f64,
    runs: usize,
    seed: u64,
) -> Result<OracleSeries> {
    params.validate()?;
    let n = s0.len();
    if g.node_count() != n || d.len() != n {
        return Err(Error::param("dimension mismatch between state, graph and influence"));
    }
    if runs == 0 {
        return Err(Error::param("need at least one run"));
    }
    let times = time_grid(params.horizon, dt)?;

    let conversion: Vec<f64> = d
        .as_slice()
        .iter()
        .map(|&di| params.conversion_rate(di))
        .collect();
    let max_pressure = (0..n).map(|i| g.in_degree(i)).max().unwrap_or(0) as f64;
    let worst = [
        ("dormant->potential", params.alpha * max_pressure * dt),
        (
            "potential->adopting",
            conversion.iter().copied().fold(0.0, f64::max) * dt,
        ),
        ("adopting->dormant", params.gamma * dt),
    ];
    for (name, prob) in worst {
        if prob > 1.0 {
            return Err(Error::param(format!(
                "per-step {name} probability {prob} exceeds 1; reduce dt"
            )));
        }
    }

    let chunks = runs.div_ceil(CHUNK);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(runs - c * CHUNK);
            let mut moments = Moments::new(times.len());
            let mut state = vec![NodeState::Dormant; n];
            let mut next = state.clone();
            for _ in 0..count {
                for (i, slot) in state.iter_mut().enumerate() {
                    let u: f64 = rng.random();
                    let (pi, ai) = (s0.potential()[i], s0.adopting()[i]);
                    *slot = if u < pi {
                        NodeState::Potential
                    } else if u < pi + ai {
                        NodeState::Adopting
                    } else {
                        NodeState::Dormant
                    };
                }
                let (p, a) = fractions(&state);
                moments.record(0, p, a);
                for (k, w) in times.windows(2).enumerate() {
                    let h = w[1] - w[0];
                    for i in 0..n {
                        let u: f64 = rng.random();
                        next[i] = match state[i] {
                            NodeState::Dormant => {
                                let active = g
                                    .row(i)
                                    .iter()
                                    .filter(|&&j| state[j] == NodeState::Adopting)
                                    .count();
                                if u < params.alpha * active as f64 * h {
                                    NodeState::Potential
                                } else {
                                    NodeState::Dormant
                                }
                            }
                            NodeState::Potential => {
                                if u < conversion[i] * h {
                                    NodeState::Adopting
                                } else {
                                    NodeState::Potential
                                }
                            }
                            NodeState::Adopting => {
                                if u < params.gamma * h {
                                    NodeState::Dormant
                                } else {
                                    NodeState::Adopting
                                }
                            }
                        };
                    }
                    std::mem::swap(&mut state, &mut next);
                    let (p, a) = fractions(&state);
                    moments.record(k + 1, p, a);
                }
            }
            moments
        })
        .collect();

    let total = partial
        .iter()
        .fold(Moments::new(times.len()), |acc, m| acc.merge(m));
    let r = runs as f64;
    let stderr = |sum: f64, sum2: f64| {
        if runs < 2 {
            return 0.0;
        }
        let mean = sum / r;
        let var = ((sum2 - r * mean * mean) / (r - 1.0)).max(0.0);
        (var / r).sqrt()
    };
    Ok(OracleSeries {
        potential: total.sum_p.iter().map(|s| s / r).collect(),
        adopting: total.sum_a.iter().map(|s| s / r).collect(),
        potential_se: total
            .sum_p
            .iter()
            .zip(&total.sum_p2)
            .map(|(&s, &s2)| stderr(s, s2))
            .collect(),
        adopting_se: total
            .sum_a
            .iter()
            .zip(&total.sum_a2)
            .map(|(&s, &s2)| stderr(s, s2))
            .collect(),
        times,
        runs,
    })
}

fn fractions(state: &[NodeState]) -> (f64, f64) {
    let n = state.len() as f64;
    let p = state.iter().filter(|&&s| s == NodeState::Potential).count() as f64;
    let a = state.iter().filter(|&&s| s == NodeState::Adopting).count() as f64;
    (p / n, a / n)
}
