//! The dormant/potential/adopting (DPA) mean-field model.
//!
//! Each node `i` carries the probability `P_i` of being potential and `A_i`
//! of being adopting; the dormant share is `1 - P_i - A_i`. The state evolves
//! by
//!
//! ```text
//! dP_i/dt = α (1 - P_i - A_i) Σ_j a_ij A_j - (β₁ + β₂ θ d_i) P_i
//! dA_i/dt = (β₁ + β₂ θ d_i) P_i - γ A_i
//! ```
//!
//! integrated here with a fixed-step classical Runge–Kutta scheme. States are
//! never clipped: a sample leaving the probability simplex by more than
//! [`SIMPLEX_TOLERANCE`] aborts the run with [`Error::Instability`].

use serde::{Deserialize, Serialize};

use crate::error::{Component, Error, Result};
use crate::network::{Graph, InfluenceVector};

/// Slack allowed on `P_i, A_i >= 0` and `P_i + A_i <= 1`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_DT: f64 = 0.01;

/// Rate constants and campaign settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// WOM force α: awakening rate per adopting recommender.
    pub alpha: f64,
    /// Rigid demand β₁: baseline purchase rate of potential customers.
    pub beta1: f64,
    /// Lure force β₂: extra purchase rate per unit of discount.
    pub beta2: f64,
    /// Viscosity γ: rate at which adopters fall back to dormant.
    pub gamma: f64,
    /// Basic discount θ in `[0, 1]`.
    pub theta: f64,
    /// Campaign end time T.
    pub horizon: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            alpha: 0.5,
            beta1: 0.3,
            beta2: 1.5,
            gamma: 0.4,
            theta: 0.3,
            horizon: 50.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha),
            ("beta1", self.beta1),
            ("gamma", self.gamma),
            ("horizon", self.horizon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} must be positive, got {v}")));
            }
        }
        // β₂ = 0 switches the lure off; it is allowed.
        if !(self.beta2 >= 0.0 && self.beta2.is_finite()) {
            return Err(Error::param(format!(
                "beta2 must be non-negative, got {}",
                self.beta2
            )));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::param(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        Ok(())
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Purchase rate `β₁ + β₂ θ d` of a potential customer with influence `d`.
    #[inline]
    pub fn conversion_rate(&self, d: f64) -> f64 {
        self.beta1 + self.beta2 * self.theta * d
    }
}

/// Per-node probabilities of being potential (`P`) and adopting (`A`).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    potential: Vec<f64>,
    adopting: Vec<f64>,
}

impl StateVector {
    pub fn new(potential: Vec<f64>, adopting: Vec<f64>) -> Result<Self> {
        if potential.len() != adopting.len() {
            return Err(Error::param(format!(
                "P has {} entries but A has {}",
                potential.len(),
                adopting.len()
            )));
        }
        let s = StateVector {
            potential,
            adopting,
        };
        if let Some((node, component, value)) = s.simplex_violation() {
            return Err(Error::param(format!(
                "initial state {component}[{node}] = {value} is not a valid probability"
            )));
        }
        Ok(s)
    }

    pub fn zeros(n: usize) -> Self {
        StateVector {
            potential: vec![0.0; n],
            adopting: vec![0.0; n],
        }
    }

    /// Every node potential with probability `p0` and adopting with `a0`.
    pub fn uniform(n: usize, p0: f64, a0: f64) -> Result<Self> {
        Self::new(vec![p0; n], vec![a0; n])
    }

    pub fn len(&self) -> usize {
        self.potential.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potential.is_empty()
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn adopting(&self) -> &[f64] {
        &self.adopting
    }

    pub fn dormant(&self, i: usize) -> f64 {
        1.0 - self.potential[i] - self.adopting[i]
    }

    pub fn mean_potential(&self) -> f64 {
        mean(&self.potential)
    }

    pub fn mean_adopting(&self) -> f64 {
        mean(&self.adopting)
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        crate::network::check_permutation(perm, self.len())?;
        let mut p = vec![0.0; self.len()];
        let mut a = vec![0.0; self.len()];
        for (i, &k) in perm.iter().enumerate() {
            p[k] = self.potential[i];
            a[k] = self.adopting[i];
        }
        Ok(StateVector {
            potential: p,
            adopting: a,
        })
    }

    /// Short human-readable description used in provenance blocks.
    pub fn describe(&self) -> String {
        let uniform = |v: &[f64]| v.windows(2).all(|w| w[0] == w[1]);
        if self.is_empty() {
            "empty".into()
        } else if uniform(&self.potential) && uniform(&self.adopting) {
            format!(
                "uniform(P0={}, A0={})",
                self.potential[0], self.adopting[0]
            )
        } else {
            format!(
                "custom(n={}, mean P0={}, mean A0={})",
                self.len(),
                self.mean_potential(),
                self.mean_adopting()
            )
        }
    }

    fn simplex_violation(&self) -> Option<(usize, Component, f64)> {
        simplex_violation(&self.potential, &self.adopting)
    }
}

fn simplex_violation(p: &[f64], a: &[f64]) -> Option<(usize, Component, f64)> {
    let lo = -SIMPLEX_TOLERANCE;
    let hi = 1.0 + SIMPLEX_TOLERANCE;
    for (i, (&pi, &ai)) in p.iter().zip(a).enumerate() {
        if !(pi >= lo) {
            return Some((i, Component::Potential, pi));
        }
        if !(ai >= lo) {
            return Some((i, Component::Adopting, ai));
        }
        if !(pi + ai <= hi) {
            return Some((i, Component::Dormant, 1.0 - pi - ai));
        }
    }
    None
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Time derivative of a [`StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub potential: Vec<f64>,
    pub adopting: Vec<f64>,
}

impl Derivative {
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.potential).max(max_abs(&self.adopting))
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_dimensions(n: usize, g: &Graph, d: &InfluenceVector) -> Result<()> {
    if g.node_count() != n || d.len() != n {
        return Err(Error::param(format!(
            "dimension mismatch: state has {n} nodes, graph {}, influence vector {}",
            g.node_count(),
            d.len()
        )));
    }
    Ok(())
}

/// Right-hand side of the DPA system at state `s`.
pub fn rhs(
    s: &StateVector,
    params: &ModelParams,
    g: &Graph,
    d: &InfluenceVector,
) -> Result<Derivative> {
    check_dimensions(s.len(), g, d)?;
    let model = Model::new(params, g, d);
    let mut dp = vec![0.0; s.len()];
    let mut da = vec![0.0; s.len()];
    model.eval(&s.potential, &s.adopting, &mut dp, &mut da);
    Ok(Derivative {
        potential: dp,
        adopting: da,
    })
}

/// The system's coefficients with per-node conversion rates precomputed.
pub(crate) struct Model<'a> {
    alpha: f64,
    gamma: f64,
    conversion: Vec<f64>,
    graph: &'a Graph,
}

impl<'a> Model<'a> {
    pub(crate) fn new(params: &ModelParams, graph: &'a Graph, d: &InfluenceVector) -> Self {
        Model {
            alpha: params.alpha,
            gamma: params.gamma,
            conversion: d
                .as_slice()
                .iter()
                .map(|&di| params.conversion_rate(di))
                .collect(),
            graph,
        }
    }

    fn eval(&self, p: &[f64], a: &[f64], dp: &mut [f64], da: &mut [f64]) {
        for i in 0..p.len() {
            let pressure: f64 = self.graph.row(i).iter().map(|&j| a[j]).sum();
            let flow = self.conversion[i] * p[i];
            dp[i] = self.alpha * (1.0 - p[i] - a[i]) * pressure - flow;
            da[i] = flow - self.gamma * a[i];
        }
    }
}

/// Classical fourth-order Runge–Kutta stepper with reusable buffers.
pub(crate) struct Rk4<'a> {
    model: Model<'a>,
    k: [Vec<f64>; 8],
    tmp_p: Vec<f64>,
    tmp_a: Vec<f64>,
}

impl<'a> Rk4<'a> {
    pub(crate) fn new(model: Model<'a>, n: usize) -> Self {
        Rk4 {
            model,
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp_p: vec![0.0; n],
            tmp_a: vec![0.0; n],
        }
    }

    /// Evaluates the derivative at the current state into the first stage
    /// buffers and returns its max norm. [`Rk4::step_from_k1`] reuses it.
    fn load_k1(&mut self, p: &[f64], a: &[f64]) -> f64 {
        let [k1p, k1a, ..] = &mut self.k;
        self.model.eval(p, a, k1p, k1a);
        max_abs(k1p).max(max_abs(k1a))
    }

    pub(crate) fn step(&mut self, p: &mut [f64], a: &mut [f64], h: f64) {
        self.load_k1(p, a);
        self.step_from_k1(p, a, h);
    }

    fn step_from_k1(&mut self, p: &mut [f64], a: &mut [f64], h: f64) {
        let n = p.len();
        let [k1p, k1a, k2p, k2a, k3p, k3a, k4p, k4a] = &mut self.k;
        let (tp, ta) = (&mut self.tmp_p, &mut self.tmp_a);

        for i in 0..n {
            tp[i] = p[i] + 0.5 * h * k1p[i];
            ta[i] = a[i] + 0.5 * h * k1a[i];
        }
        self.model.eval(tp, ta, k2p, k2a);
        for i in 0..n {
            tp[i] = p[i] + 0.5 * h * k2p[i];
            ta[i] = a[i] + 0.5 * h * k2a[i];
        }
        self.model.eval(tp, ta, k3p, k3a);
        for i in 0..n {
            tp[i] = p[i] + h * k3p[i];
            ta[i] = a[i] + h * k3a[i];
        }
        self.model.eval(tp, ta, k4p, k4a);
        let sixth = h / 6.0;
        for i in 0..n {
            p[i] += sixth * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
            a[i] += sixth * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
        }
    }
}

/// Sample times `0, dt, 2dt, …, T` with a shortened final step landing on T.
pub fn time_grid(horizon: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) || !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param(format!(
            "need 0 < dt and 0 < horizon, got dt = {dt}, horizon = {horizon}"
        )));
    }
    if dt > horizon {
        return Err(Error::param(format!(
            "step size {dt} exceeds the horizon {horizon}"
        )));
    }
    // The relative slack keeps T/dt that is integral up to rounding from
    // producing a sliver of a final step.
    let steps = (horizon / dt - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
    times.push(horizon);
    Ok(times)
}

fn check_inputs(s0: &StateVector, params: &ModelParams, g: &Graph, d: &InfluenceVector) -> Result<()> {
    params.validate()?;
    check_dimensions(s0.len(), g, d)?;
    if let Some((node, component, value)) = s0.simplex_violation() {
        return Err(Error::param(format!(
            "initial state {component}[{node}] = {value} is not a valid probability"
        )));
    }
    Ok(())
}

fn instability(time: f64, (node, component, value): (usize, Component, f64)) -> Error {
    Error::Instability {
        time,
        node,
        component,
        value,
    }
}

/// Fixed-step integration of the system over `[0, T]`, calling `visit` on
/// every sample (including `t = 0`) with the time and the current `(P, A)`.
pub(crate) fn integrate_with<F>(
    s0: &StateVector,
    params: &ModelParams,
    g: &Graph,
    d: &InfluenceVector,
    dt: f64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(f64, &[f64], &[f64]),
{
    check_inputs(s0, params, g, d)?;
    let times = time_grid(params.horizon, dt)?;
    let mut p = s0.potential.clone();
    let mut a = s0.adopting.clone();
    let mut stepper = Rk4::new(Model::new(params, g, d), s0.len());

    visit(times[0], &p, &a);
    for w in times.windows(2) {
        stepper.step(&mut p, &mut a, w[1] - w[0]);
        if let Some(v) = simplex_violation(&p, &a) {
            return Err(instability(w[1], v));
        }
        visit(w[1], &p, &a);
    }
    Ok(())
}

/// A sampled solution together with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector>,
    params: ModelParams,
    influence: InfluenceVector,
}

impl Trajectory {
    /// Assembles a trajectory from precomputed samples, e.g. synthetic data.
    pub fn from_samples(
        times: Vec<f64>,
        states: Vec<StateVector>,
        params: ModelParams,
        influence: InfluenceVector,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::param("need one state per sample time"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("sample times must be strictly increasing"));
        }
        if states.iter().any(|s| s.len() != influence.len()) {
            return Err(Error::param("state and influence sizes differ"));
        }
        Ok(Trajectory {
            times,
            states,
            params,
            influence,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn influence(&self) -> &InfluenceVector {
        &self.influence
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Integrates the DPA system from `s0` over `[0, params.horizon]` with RK4
/// steps of size `dt`, storing every sample.
///
/// ```
/// use wom_core::dpa::{integrate, ModelParams, StateVector};
/// use wom_core::network::{influential_degree, Graph};
///
/// let g = Graph::empty(1);
/// let d = influential_degree(&g);
/// let params = ModelParams { horizon: 5.0, ..ModelParams::default() };
/// let s0 = StateVector::uniform(1, 1.0, 0.0).unwrap();
/// let traj = integrate(&s0, &params, &g, &d, 0.01).unwrap();
///
/// let p_end = traj.final_state().potential()[0];
/// assert!((p_end - (-params.beta1 * 5.0_f64).exp()).abs() < 1e-9);
/// ```
pub fn integrate(
    s0: &StateVector,
    params: &ModelParams,
    g: &Graph,
    d: &InfluenceVector,
    dt: f64,
) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    integrate_with(s0, params, g, d, dt, |t, p, a| {
        times.push(t);
        states.push(StateVector {
            potential: p.to_vec(),
            adopting: a.to_vec(),
        });
    })?;
    Ok(Trajectory {
        times,
        states,
        params: *params,
        influence: d.clone(),
    })
}

/// Stopping rule for [`steady_state`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyStateOptions {
    /// Max-norm threshold on the derivative.
    pub tol: f64,
    /// Integration cap; `None` means ten horizons.
    pub t_max: Option<f64>,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        SteadyStateOptions {
            tol: 1e-6,
            t_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub state: StateVector,
    pub reached: bool,
    pub t_stop: f64,
}

/// Integrates until the derivative's max norm falls below `opts.tol`, or the
/// time cap is hit (`reached = false`).
pub fn steady_state(
    s0: &StateVector,
    params: &ModelParams,
    g: &Graph,
    d: &InfluenceVector,
    dt: f64,
    opts: SteadyStateOptions,
) -> Result<SteadyState> {
    check_inputs(s0, params, g, d)?;
    if !(opts.tol > 0.0) {
        return Err(Error::param(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let t_max = opts.t_max.unwrap_or(10.0 * params.horizon);
    if !(t_max > 0.0) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param(format!(
            "need dt > 0 and t_max > 0, got dt = {dt}, t_max = {t_max}"
        )));
    }

    let mut p = s0.potential.clone();
    let mut a = s0.adopting.clone();
    let mut stepper = Rk4::new(Model::new(params, g, d), s0.len());
    let mut step = 0usize;
    let mut t = 0.0;
    loop {
        let norm = stepper.load_k1(&p, &a);
        if norm < opts.tol || t >= t_max {
            return Ok(SteadyState {
                state: StateVector {
                    potential: p,
                    adopting: a,
                },
                reached: norm < opts.tol,
                t_stop: t,
            });
        }
        step += 1;
        let next = (step as f64 * dt).min(t_max);
        stepper.step_from_k1(&mut p, &mut a, next - t);
        t = next;
        if let Some(v) = simplex_violation(&p, &a) {
            return Err(instability(t, v));
        }
    }
}

/// Population means `(P̄(t), Ā(t))` at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFractions {
    pub t: f64,
    pub potential: f64,
    pub adopting: f64,
}

pub fn mean_fractions(traj: &Trajectory) -> Vec<MeanFractions> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| MeanFractions {
            t,
            potential: s.mean_potential(),
            adopting: s.mean_adopting(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::influential_degree;

    fn isolated(p0: f64) -> (Graph, InfluenceVector, StateVector) {
        let g = Graph::empty(1);
        let d = influential_degree(&g);
        (g, d, StateVector::uniform(1, p0, 0.0).unwrap())
    }

    #[test]
    fn all_dormant_is_equilibrium() {
        let g = Graph::complete(4);
        let d = influential_degree(&g);
        let s = StateVector::zeros(4);
        let params = ModelParams::default();
        let der = rhs(&s, &params, &g, &d).unwrap();
        assert!(der.potential.iter().chain(&der.adopting).all(|&x| x == 0.0));

        let traj = integrate(&s, &params.clone(), &g, &d, 0.1).unwrap();
        assert!(traj
            .states()
            .iter()
            .all(|s| s.potential().iter().chain(s.adopting()).all(|&x| x == 0.0)));
    }

    #[test]
    fn isolated_node_rhs() {
        let (g, d, s) = isolated(1.0);
        let params = ModelParams::default();
        let der = rhs(&s, &params, &g, &d).unwrap();
        assert_eq!(der.potential, vec![-params.beta1]);
        assert_eq!(der.adopting, vec![params.beta1]);
    }

    #[test]
    fn two_node_rhs_hand_values() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let d = influential_degree(&g);
        let s = StateVector::new(vec![0.2, 0.0], vec![0.0, 0.5]).unwrap();
        let params = ModelParams {
            alpha: 1.0,
            beta1: 0.1,
            beta2: 0.2,
            gamma: 0.3,
            theta: 0.5,
            horizon: 1.0,
        };
        let der = rhs(&s, &params, &g, &d).unwrap();
        // Frozen from evaluating the two equations by hand.
        let expect_p = [0.36, 0.0];
        let expect_a = [0.04, -0.15];
        for i in 0..2 {
            assert!((der.potential[i] - expect_p[i]).abs() < 1e-15);
            assert!((der.adopting[i] - expect_a[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn rhs_dimension_mismatch() {
        let g = Graph::empty(3);
        let d = influential_degree(&g);
        let s = StateVector::zeros(2);
        assert!(matches!(
            rhs(&s, &ModelParams::default(), &g, &d),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn time_grid_lands_on_horizon() {
        let t = time_grid(50.0, 0.01).unwrap();
        assert_eq!(t.len(), 5001);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 50.0);

        let t = time_grid(1.0, 0.3).unwrap();
        assert_eq!(t.len(), 5);
        assert!((t[4] - t[3] - 0.1).abs() < 1e-12);

        assert!(time_grid(1.0, 2.0).is_err());
        assert!(time_grid(1.0, 0.0).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = [
            ModelParams { alpha: 0.0, ..Default::default() },
            ModelParams { gamma: -1.0, ..Default::default() },
            ModelParams { theta: 1.5, ..Default::default() },
            ModelParams { beta2: f64::NAN, ..Default::default() },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
        assert!(ModelParams { beta2: 0.0, ..Default::default() }.validate().is_ok());
    }

    #[test]
    fn large_step_reports_instability() {
        let g = Graph::complete(10);
        let d = influential_degree(&g);
        let s0 = StateVector::uniform(10, 0.0, 0.5).unwrap();
        let params = ModelParams {
            alpha: 20.0,
            horizon: 10.0,
            ..Default::default()
        };
        match integrate(&s0, &params, &g, &d, 1.0) {
            Err(Error::Instability { time, .. }) => assert!(time > 0.0),
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn steady_state_trivial_cases() {
        let g = Graph::complete(3);
        let d = influential_degree(&g);
        let s = steady_state(
            &StateVector::zeros(3),
            &ModelParams::default(),
            &g,
            &d,
            0.01,
            SteadyStateOptions::default(),
        )
        .unwrap();
        assert!(s.reached);
        assert_eq!(s.t_stop, 0.0);

        let (g, d, s0) = isolated(0.7);
        let s = steady_state(&s0, &ModelParams::default(), &g, &d, 0.01, SteadyStateOptions::default())
            .unwrap();
        assert!(s.reached);
        assert!(s.state.potential()[0].abs() < 1e-5);
        assert!(s.state.adopting()[0].abs() < 1e-5);
    }

    #[test]
    fn steady_state_cap() {
        let (g, d, s0) = isolated(1.0);
        let s = steady_state(
            &s0,
            &ModelParams::default(),
            &g,
            &d,
            0.01,
            SteadyStateOptions { tol: 1e-6, t_max: Some(1.0) },
        )
        .unwrap();
        assert!(!s.reached);
        assert_eq!(s.t_stop, 1.0);
    }

    #[test]
    fn mean_fraction_arithmetic() {
        let d = InfluenceVector::zeros(2);
        let s = StateVector::new(vec![0.2, 0.4], vec![0.1, 0.0]).unwrap();
        let traj =
            Trajectory::from_samples(vec![0.0], vec![s], ModelParams::default(), d).unwrap();
        let m = mean_fractions(&traj);
        assert!((m[0].potential - 0.3).abs() < 1e-15);
        assert!((m[0].adopting - 0.05).abs() < 1e-15);
    }

    #[test]
    fn conversion_rate_grows_with_theta() {
        let p = ModelParams::default();
        for d in [0.1, 0.5, 1.0] {
            assert!(p.with_theta(0.6).conversion_rate(d) > p.with_theta(0.2).conversion_rate(d));
        }
        assert_eq!(p.with_theta(0.6).conversion_rate(0.0), p.beta1);
    }
}
