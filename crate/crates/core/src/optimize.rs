//! Choosing the basic discount θ that maximizes expected profit.
//!
//! EP(θ) is evaluated on a coarse uniform grid first; golden-section search
//! then refines inside the two grid cells around the best grid point. A
//! maximum on the grid boundary, or a flat grid, is returned as is.

use std::fmt;

use rayon::prelude::*;

use crate::dpa::{ModelParams, StateVector};
use crate::error::{Error, Result};
use crate::network::{influential_degree, Graph};
use crate::profit::{evaluate_profit, uniform_grid};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Grid,
    GoldenSection,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Grid => "grid",
            Method::GoldenSection => "golden-section-refined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub theta_star: f64,
    pub ep_star: f64,
    pub evaluations: usize,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub coarse_points: usize,
    pub tol_theta: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            coarse_points: 21,
            tol_theta: 1e-3,
        }
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping once
/// the bracket is at most `tol` wide. Ties move the bracket left.
///
/// Returns `(x, f(x), evaluations)` for the best interior point.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) || !(hi > lo) {
        return Err(Error::param(format!(
            "golden-section needs lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut evals = 2;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        evals += 1;
    }
    Ok(if fc >= fd { (c, fc, evals) } else { (d, fd, evals) })
}

/// Maximizes EP over θ ∈ [0, 1] for a fixed scenario.
///
/// ```
/// use wom_core::dpa::{ModelParams, StateVector};
/// use wom_core::network::Graph;
/// use wom_core::optimize::{optimize_theta, Method, OptimizeOptions};
///
/// // No edges: nobody has influence, EP ignores θ, the smallest θ wins.
/// let g = Graph::empty(4);
/// let s0 = StateVector::uniform(4, 0.1, 0.0).unwrap();
/// let params = ModelParams { horizon: 5.0, ..ModelParams::default() };
/// let r = optimize_theta(&params, &g, &s0, 0.05, OptimizeOptions::default()).unwrap();
/// assert_eq!(r.theta_star, 0.0);
/// assert_eq!(r.method, Method::Grid);
/// ```
pub fn optimize_theta(
    base: &ModelParams,
    g: &Graph,
    s0: &StateVector,
    dt: f64,
    opts: OptimizeOptions,
) -> Result<OptimizationResult> {
    if opts.coarse_points < 5 {
        return Err(Error::param(format!(
            "need at least 5 coarse grid points, got {}",
            opts.coarse_points
        )));
    }
    if !(opts.tol_theta > 0.0) {
        return Err(Error::param(format!(
            "theta tolerance must be positive, got {}",
            opts.tol_theta
        )));
    }
    let d = influential_degree(g);
    let ep = |theta: f64| evaluate_profit(s0, &base.with_theta(theta), g, &d, dt);

    let grid = uniform_grid(0.0, 1.0, opts.coarse_points);
    let values = grid
        .par_iter()
        .map(|&t| ep(t))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
    }
    let mut result = OptimizationResult {
        theta_star: grid[best],
        ep_star: values[best],
        evaluations: grid.len(),
        method: Method::Grid,
    };
    if best == 0 || best == grid.len() - 1 {
        return Ok(result);
    }

    let (theta, value, evals) =
        golden_section_max(ep, grid[best - 1], grid[best + 1], opts.tol_theta)?;
    result.evaluations += evals;
    if value > result.ep_star {
        result.theta_star = theta;
        result.ep_star = value;
        result.method = Method::GoldenSection;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx, evals) =
            golden_section_max(|x| Ok(-(x - 0.37) * (x - 0.37)), 0.0, 1.0, 1e-6).unwrap();
        assert!((x - 0.37).abs() < 1e-6);
        assert!(fx <= 0.0 && fx > -1e-12);
        assert!(evals > 10);
    }

    #[test]
    fn golden_section_rejects_bad_bracket() {
        assert!(golden_section_max(Ok, 1.0, 0.0, 1e-3).is_err());
        assert!(golden_section_max(Ok, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn needs_five_points() {
        let g = Graph::empty(2);
        let s0 = StateVector::zeros(2);
        let opts = OptimizeOptions { coarse_points: 4, ..Default::default() };
        assert!(optimize_theta(&ModelParams::default(), &g, &s0, 0.1, opts).is_err());
    }

    #[test]
    fn no_lure_prefers_no_discount() {
        let g = crate::network::generate_small_world(30, 4, 0.1, 2).unwrap();
        let s0 = StateVector::uniform(30, 0.1, 0.0).unwrap();
        let params = ModelParams { beta2: 0.0, horizon: 20.0, ..Default::default() };
        let r = optimize_theta(&params, &g, &s0, 0.05, OptimizeOptions::default()).unwrap();
        assert_eq!(r.theta_star, 0.0);
        assert_eq!(r.method, Method::Grid);
    }
}
