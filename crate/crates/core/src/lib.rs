//! Solvers for covering a line segment with discs.
//!
//! Each disc `i` of the catalog can be used at most once, with any diameter
//! `x_i > 0`, at cost `f_i + b_i x_i^2`. The diameters of the chosen discs
//! must add up to the segment length. The crate provides
//!
//! - closed-form solutions for a fixed disc set and for identical discs
//!   ([`closed_form`]),
//! - the Lagrangean relaxation of the linking constraints
//!   ([`lagrangian`]) and subgradient ascent on its dual ([`subgradient`]),
//! - a multiplier-seeded add/drop heuristic ([`heuristic`]),
//! - an exact branch-and-bound ([`branch_bound`]) and a brute-force
//!   reference ([`oracle`]),
//! - the instance families and benchmark harness used for experiments
//!   ([`instgen`], [`bench`]).
//!
//! ```
//! use linecover::{branch_bound, Instance};
//!
//! // b_i = 10 i, f_i = 10 (11 - i)
//! let costs: Vec<(f64, f64)> = (1..=10).map(|i| (10.0 * (11 - i) as f64, 10.0 * i as f64)).collect();
//! let instance = Instance::from_costs(&costs).unwrap();
//! let (plan, stats) = branch_bound::solve_exact(&instance, &Default::default()).unwrap();
//! assert_eq!(plan.selected_ids(), vec![9, 10]);
//! assert!((plan.objective - 77.368).abs() < 1e-3);
//! assert!(stats.optimum.is_some());
//! ```

pub mod bench;
pub mod branch_bound;
pub mod closed_form;
mod error;
pub mod heuristic;
pub mod instgen;
pub mod lagrangian;
pub mod model;
pub mod oracle;
pub mod subgradient;
pub mod tolerance;

pub use error::{Error, Result};
pub use model::{
    dominated_pairs, evaluate, layout, normalize, CoverPlan, DiscId, DiscType, Instance, PlanEntry,
    Scale,
};
