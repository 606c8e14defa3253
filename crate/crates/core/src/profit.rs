//! Expected profit of the influence-based discount.
//!
//! A potential customer `i` buys at rate `β₁ + β₂ θ d_i` and pays the unit
//! price less the discount `θ d_i`, so
//!
//! ```text
//! EP(θ) = ∫₀ᵀ Σ_i (β₁ + β₂ θ d_i) P_i(t) (1 − θ d_i) dt
//! ```
//!
//! The integral is a composite Simpson rule over the integrator's own
//! samples, so its error is of the same order as the RK4 trajectory's.

use rayon::prelude::*;

use crate::dpa::{integrate_with, ModelParams, StateVector, Trajectory};
use crate::error::{Error, Result};
use crate::network::{influential_degree, Graph, InfluenceVector};

/// Instantaneous revenue rate `Σ_i (β₁ + β₂ θ d_i) P_i (1 − θ d_i)`.
pub fn revenue_rate(potential: &[f64], params: &ModelParams, d: &InfluenceVector) -> f64 {
    potential
        .iter()
        .zip(d.as_slice())
        .map(|(&p, &di)| params.conversion_rate(di) * p * (1.0 - params.theta * di))
        .sum()
}

/// Composite Simpson quadrature on arbitrary strictly increasing nodes.
///
/// Intervals are taken in pairs with the three-point rule for unequal
/// spacing. With an odd interval count the last interval uses the quadratic
/// through the final three nodes; a single interval falls back to the
/// trapezoid.
pub fn simpson(times: &[f64], values: &[f64]) -> f64 {
    let n = times.len().min(values.len());
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    if intervals == 1 {
        return 0.5 * (values[0] + values[1]) * (times[1] - times[0]);
    }
    let mut total = 0.0;
    let paired = intervals - intervals % 2;
    let mut k = 0;
    while k < paired {
        let h0 = times[k + 1] - times[k];
        let h1 = times[k + 2] - times[k + 1];
        let (f0, f1, f2) = (values[k], values[k + 1], values[k + 2]);
        let h = h0 + h1;
        total += h / 6.0
            * ((2.0 - h1 / h0) * f0 + h * h / (h0 * h1) * f1 + (2.0 - h0 / h1) * f2);
        k += 2;
    }
    if intervals % 2 == 1 {
        let h0 = times[n - 2] - times[n - 3];
        let h1 = times[n - 1] - times[n - 2];
        let (f0, f1, f2) = (values[n - 3], values[n - 2], values[n - 1]);
        let h = h0 + h1;
        total += f2 * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * h)
            + f1 * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
            - f0 * h1 * h1 * h1 / (6.0 * h0 * h);
    }
    total
}

/// EP of a stored trajectory, using its own parameters and influence vector.
pub fn expected_profit(traj: &Trajectory) -> f64 {
    let rates: Vec<f64> = traj
        .states()
        .iter()
        .map(|s| revenue_rate(s.potential(), traj.params(), traj.influence()))
        .collect();
    simpson(traj.times(), &rates)
}

/// EP accumulated while integrating, without storing the trajectory.
///
/// Bit-identical to `expected_profit(&integrate(..)?)`.
pub fn evaluate_profit(
    s0: &StateVector,
    params: &ModelParams,
    g: &Graph,
    d: &InfluenceVector,
    dt: f64,
) -> Result<f64> {
    let mut times = Vec::new();
    let mut rates = Vec::new();
    integrate_with(s0, params, g, d, dt, |t, p, _| {
        times.push(t);
        rates.push(revenue_rate(p, params, d));
    })?;
    Ok(simpson(&times, &rates))
}

/// Inputs held fixed along a profit curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveContext {
    /// Base parameters; `theta` is ignored.
    pub params: ModelParams,
    pub graph_id: String,
    pub s0: String,
    pub dt: f64,
}

/// EP sampled on a grid of basic discounts.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitCurve {
    pub thetas: Vec<f64>,
    pub profits: Vec<f64>,
    pub context: CurveContext,
}

impl ProfitCurve {
    pub fn with_graph_id(mut self, id: impl Into<String>) -> Self {
        self.context.graph_id = id.into();
        self
    }

    /// Grid point with the largest EP; ties go to the smaller θ.
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = 0;
        for (k, &ep) in self.profits.iter().enumerate() {
            if ep > self.profits[best] {
                best = k;
            }
        }
        (self.thetas[best], self.profits[best])
    }

    /// Number of sign changes in the sequence of nonzero first differences.
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<f64> = self
            .profits
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| *d != 0.0)
            .map(f64::signum)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// `points` equally spaced values from `lo` to `hi`, endpoints exact.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|k| {
                if k == points - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

pub(crate) fn check_theta_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::param("theta grid needs at least two points"));
    }
    if grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::param("theta grid must lie within [0, 1]"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("theta grid must be strictly increasing"));
    }
    Ok(())
}

/// EP at every θ in `theta_grid`, all other inputs fixed. Grid points are
/// evaluated in parallel; the result does not depend on scheduling.
pub fn profit_curve(
    theta_grid: &[f64],
    base: &ModelParams,
    g: &Graph,
    s0: &StateVector,
    dt: f64,
) -> Result<ProfitCurve> {
    check_theta_grid(theta_grid)?;
    let d = influential_degree(g);
    let profits = theta_grid
        .par_iter()
        .map(|&theta| evaluate_profit(s0, &base.with_theta(theta), g, &d, dt))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfitCurve {
        thetas: theta_grid.to_vec(),
        profits,
        context: CurveContext {
            params: *base,
            graph_id: "unnamed".into(),
            s0: s0.describe(),
            dt,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpa::integrate;

    #[test]
    fn zero_trajectory_has_zero_profit() {
        let g = Graph::complete(3);
        let d = influential_degree(&g);
        let traj = integrate(&StateVector::zeros(3), &ModelParams::default(), &g, &d, 0.1).unwrap();
        assert_eq!(expected_profit(&traj), 0.0);
    }

    #[test]
    fn isolated_node_closed_form() {
        let g = Graph::empty(1);
        let d = influential_degree(&g);
        let params = ModelParams::default();
        let s0 = StateVector::uniform(1, 1.0, 0.0).unwrap();
        let traj = integrate(&s0, &params, &g, &d, 0.01).unwrap();
        let exact = 1.0 - (-params.beta1 * params.horizon).exp();
        assert!((expected_profit(&traj) - exact).abs() < 1e-8);
    }

    #[test]
    fn full_discount_zeroes_margin() {
        let d = InfluenceVector::from_values(vec![1.0, 1.0]).unwrap();
        let params = ModelParams { theta: 1.0, ..Default::default() };
        assert_eq!(revenue_rate(&[0.7, 0.4], &params, &d), 0.0);
    }

    #[test]
    fn streamed_matches_stored() {
        let g = crate::network::generate_small_world(30, 4, 0.2, 3).unwrap();
        let d = influential_degree(&g);
        let params = ModelParams { horizon: 10.0, ..Default::default() };
        let s0 = StateVector::uniform(30, 0.1, 0.0).unwrap();
        let stored = expected_profit(&integrate(&s0, &params, &g, &d, 0.02).unwrap());
        let streamed = evaluate_profit(&s0, &params, &g, &d, 0.02).unwrap();
        assert_eq!(stored.to_bits(), streamed.to_bits());
    }

    #[test]
    fn flat_on_edgeless_graph() {
        let g = Graph::empty(5);
        let s0 = StateVector::uniform(5, 0.3, 0.1).unwrap();
        let curve =
            profit_curve(&uniform_grid(0.0, 1.0, 11), &ModelParams::default(), &g, &s0, 0.05)
                .unwrap();
        let first = curve.profits[0];
        assert!(curve.profits.iter().all(|p| (p - first).abs() < 1e-10));
        assert_eq!(curve.argmax().0, 0.0);
    }

    #[test]
    fn no_lure_means_discount_only_costs() {
        let g = crate::network::generate_small_world(40, 4, 0.1, 8).unwrap();
        let s0 = StateVector::uniform(40, 0.1, 0.0).unwrap();
        let params = ModelParams { beta2: 0.0, horizon: 20.0, ..Default::default() };
        let curve = profit_curve(&uniform_grid(0.0, 1.0, 11), &params, &g, &s0, 0.02).unwrap();
        assert!(curve.profits.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn simpson_is_exact_for_cubics_on_uniform_pairs() {
        let f = |t: f64| 1.0 - 2.0 * t + 3.0 * t * t - 0.5 * t * t * t;
        let times = [0.0, 0.5, 1.0, 1.5, 2.0];
        let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        let want = 2.0 - 4.0 + 8.0 - 2.0;
        assert!((simpson(&times, &values) - want).abs() < 1e-12);
        assert_eq!(simpson(&[0.0, 2.0], &[1.0, 3.0]), 4.0);
        assert_eq!(simpson(&[0.0], &[1.0]), 0.0);
    }

    #[test]
    fn simpson_odd_tail_is_exact_for_quadratics() {
        let f = |t: f64| 2.0 + t - 3.0 * t * t;
        let antiderivative = |t: f64| 2.0 * t + 0.5 * t * t - t * t * t;
        // Even and odd interval counts, with and without a short last step.
        for times in [
            &[0.0, 0.4, 0.8, 1.2, 1.3][..],
            &[0.0, 0.4, 0.8, 1.2],
            &[0.0, 0.4, 0.8, 0.9],
            &[0.0, 0.3, 0.6, 0.9, 1.2, 1.25],
        ] {
            let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();
            let want = antiderivative(*times.last().unwrap());
            assert!((simpson(times, &values) - want).abs() < 1e-12, "{times:?}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(check_theta_grid(&[0.0]).is_err());
        assert!(check_theta_grid(&[0.0, 0.0]).is_err());
        assert!(check_theta_grid(&[0.0, 1.5]).is_err());
        assert!(check_theta_grid(&[0.0, 0.5, 1.0]).is_ok());
        let g = uniform_grid(0.0, 1.0, 21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 1.0);
        assert!((g[1] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn sign_change_count() {
        let ctx = CurveContext {
            params: ModelParams::default(),
            graph_id: String::new(),
            s0: String::new(),
            dt: 0.1,
        };
        let curve = ProfitCurve {
            thetas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            profits: vec![1.0, 2.0, 3.0, 2.0, 1.0],
            context: ctx,
        };
        assert_eq!(curve.sign_changes(), 1);
        assert_eq!(curve.argmax(), (0.5, 3.0));
    }
}
