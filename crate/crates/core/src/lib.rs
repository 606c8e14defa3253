//! Word-of-mouth spreading under an influence-based discount.
//!
//! Customers on a WOM network are dormant, potential or adopting. Adopters
//! awaken their dormant contacts, potential customers buy at a rate raised by
//! their discount, and each customer's discount is the basic discount θ
//! scaled by how influential they are in the network. This crate integrates
//! the resulting node-level mean-field model, prices the campaign, finds the
//! most profitable θ and runs one-factor experiments over every ingredient.
//!
//! * [`network`]: graphs, generators, edge-list files, influential degree
//! * [`dpa`]: model parameters, the ODE right-hand side, RK4 integration
//! * [`stochastic`]: Monte Carlo check of the mean-field model
//! * [`profit`]: expected profit and profit curves over θ
//! * [`optimize`]: the profit-maximizing θ
//! * [`sweep`] and [`config`]: experiment harness and its TOML files
//! * [`export`]: CSV output and run manifests
//!
//! ```
//! use wom_core::dpa::{ModelParams, StateVector};
//! use wom_core::network::generate_small_world;
//! use wom_core::profit::{profit_curve, uniform_grid};
//!
//! let g = generate_small_world(100, 4, 0.1, 42).unwrap();
//! let s0 = StateVector::uniform(100, 0.1, 0.0).unwrap();
//! let params = ModelParams { horizon: 10.0, ..ModelParams::default() };
//! let curve = profit_curve(&uniform_grid(0.0, 1.0, 5), &params, &g, &s0, 0.05).unwrap();
//! assert_eq!(curve.profits.len(), 5);
//! ```

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dpa;
pub mod error;
pub mod export;
pub mod network;
pub mod optimize;
pub mod profit;
pub mod stochastic;
pub mod sweep;

pub use error::{Error, Result};

// The guide's code blocks are compiled and run as doctests of these modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/dpa-model.md")]
    mod dpa_model {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/profit.md")]
    mod profit {}
    #[doc = include_str!("../../../book/src/optimization.md")]
    mod optimization {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
