//! Closed-form solvers for the two polynomial cases.
//!
//! With the selected set `S` fixed, the diameters follow from the KKT
//! conditions: every active disc has the same marginal cost
//! `2 b_i x_i = lambda`, so `x_i` is proportional to `1 / b_i` and
//!
//! ```text
//! z(S) = sum_{i in S} f_i + 1 / sum_{i in S} (1 / b_i)
//! ```
//!
//! With identical discs the optimum uses `k` equal diameters, and the
//! total cost `F(k) = k f + k g(1/k)` is convex in `k`, so the best `k`
//! is found by bisection on the sign of `F(k+1) - F(k)`.

use crate::error::{Error, Result};
use crate::model::{Catalog, CoverPlan, DiscId, Instance};

/// Optimal diameters for a fixed selected set.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedSolution {
    /// Selected ids, ascending.
    pub selected: Vec<DiscId>,
    /// Diameter of each selected disc, parallel to `selected`.
    pub diameters: Vec<f64>,
    /// Common marginal cost `2 b_i x_i`.
    pub lambda: f64,
    /// `z(S)`.
    pub cost: f64,
}

impl RestrictedSolution {
    pub fn diameter(&self, id: DiscId) -> Option<f64> {
        self.selected
            .iter()
            .position(|&s| s == id)
            .map(|k| self.diameters[k])
    }
}

/// Solve the restricted problem on a unit instance for the set `selected`.
pub fn solve_restricted(instance: &Instance, selected: &[DiscId]) -> Result<RestrictedSolution> {
    instance.require_unit()?;
    let catalog = Catalog::new(instance);
    let mut members = catalog.indices_of(selected)?;
    if members.is_empty() {
        return Err(Error::EmptySelection);
    }
    members.sort_unstable();
    let (diameters, lambda) = kkt_diameters(&catalog, &members);
    let cost = members
        .iter()
        .zip(&diameters)
        .map(|(&k, &x)| catalog.f[k] + catalog.b[k] * x * x)
        .sum();
    Ok(RestrictedSolution {
        selected: members.iter().map(|&k| catalog.ids[k]).collect(),
        diameters,
        lambda,
        cost,
    })
}

/// `z(S)` on a unit instance, in O(|S|).
pub fn restricted_cost(instance: &Instance, selected: &[DiscId]) -> Result<f64> {
    instance.require_unit()?;
    let catalog = Catalog::new(instance);
    let members = catalog.indices_of(selected)?;
    if members.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(set_cost(&catalog, &members))
}

/// `z(S)` by the harmonic identity. `members` must be nonempty.
pub(crate) fn set_cost(catalog: &Catalog, members: &[usize]) -> f64 {
    let mut fixed = 0.0;
    let mut inv = 0.0;
    for &k in members {
        fixed += catalog.f[k];
        inv += 1.0 / catalog.b[k];
    }
    fixed + 1.0 / inv
}

/// KKT diameters `x_i = lambda / (2 b_i)` with `lambda = 1 / sum 1/(2 b_j)`.
pub(crate) fn kkt_diameters(catalog: &Catalog, members: &[usize]) -> (Vec<f64>, f64) {
    let weight: f64 = members.iter().map(|&k| 0.5 / catalog.b[k]).sum();
    let lambda = 1.0 / weight;
    let xs = members
        .iter()
        .map(|&k| (0.5 / catalog.b[k]) / weight)
        .collect();
    (xs, lambda)
}

/// Convex per-disc cost `f + g(x)` shared by identical discs.
#[derive(Clone, Copy)]
pub enum ConvexCost<'a> {
    /// `g(x) = coef * x^2`.
    Quadratic { setup: f64, coef: f64 },
    /// Any convex `g` with `g(0) = 0`.
    General {
        setup: f64,
        variable: &'a dyn Fn(f64) -> f64,
    },
}

impl std::fmt::Debug for ConvexCost<'_> {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConvexCost::Quadratic { setup, coef } => fmt
                .debug_struct("Quadratic")
                .field("setup", setup)
                .field("coef", coef)
                .finish(),
            ConvexCost::General { setup, .. } => fmt
                .debug_struct("General")
                .field("setup", setup)
                .finish_non_exhaustive(),
        }
    }
}

impl ConvexCost<'_> {
    fn setup(&self) -> f64 {
        match *self {
            ConvexCost::Quadratic { setup, .. } | ConvexCost::General { setup, .. } => setup,
        }
    }

    /// `F(k)`: total cost of `k` discs with equal diameters `1/k`.
    pub fn total(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            ConvexCost::Quadratic { setup, coef } => kf * setup + coef / kf,
            ConvexCost::General { setup, variable } => kf * setup + kf * variable(1.0 / kf),
        }
    }
}

/// Best number of identical discs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformSolution {
    pub count: usize,
    pub diameter: f64,
    pub cost: f64,
}

/// Minimize `F(k)` over `k = 1..=q`. Ties go to the smaller `k`.
pub fn solve_uniform(cost: &ConvexCost<'_>, q: usize) -> Result<UniformSolution> {
    if q < 1 {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    let setup = cost.setup();
    if !(setup.is_finite() && setup >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "setup cost must be nonnegative, got {setup}"
        )));
    }
    if let ConvexCost::Quadratic { coef, .. } = *cost {
        if !(coef.is_finite() && coef > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coefficient must be positive, got {coef}"
            )));
        }
    }

    // smallest k with F(k+1) >= F(k); F is convex so that k is the leftmost minimizer
    let (mut lo, mut hi) = (1usize, q);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cost.total(mid + 1) < cost.total(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(UniformSolution {
        count: lo,
        diameter: 1.0 / lo as f64,
        cost: cost.total(lo),
    })
}

/// Solve an instance whose discs are all identical: the first `k*` ids
/// share the segment equally.
pub fn solve_uniform_instance(instance: &Instance) -> Result<CoverPlan> {
    let first = instance.discs()[0];
    if let Some(d) = instance
        .discs()
        .iter()
        .find(|d| d.f != first.f || d.b != first.b)
    {
        return Err(Error::NonUniform(d.id));
    }
    let length = instance.length();
    let cost = ConvexCost::Quadratic {
        setup: first.f,
        coef: length * length * first.b,
    };
    let best = solve_uniform(&cost, instance.len())?;
    let diameter = length / best.count as f64;
    CoverPlan::from_diameters(
        instance,
        instance
            .ids()
            .into_iter()
            .take(best.count)
            .map(|id| (id, diameter)),
    )
}
