//! Lagrangean relaxation of the linking constraints `x_i <= y_i`.
//!
//! For multipliers `kappa >= 0` the relaxed problem splits into a choice of
//! `y` (`y_i = 1` exactly when `f_i < kappa_i`) and a separable convex
//! problem in `x` over the simplex:
//!
//! ```text
//! min sum b_i x_i^2 + kappa_i x_i   s.t.  sum x_i = 1, x >= 0
//! ```
//!
//! Its KKT point activates the discs with the smallest multipliers. After
//! sorting `kappa` ascending, the active prefix `1..=h` is the one with
//! `kappa_h < lambda(h) <= kappa_{h+1}` where
//!
//! ```text
//! lambda(h) = (1 + sum_{i<=h} kappa_i / (2 b_i)) / sum_{i<=h} 1 / (2 b_i)
//! ```
//!
//! and `x_i = (lambda - kappa_i) / (2 b_i)` on the prefix.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{fixings, Catalog, DiscId, Fix, Instance};

/// Nonnegative multipliers keyed by disc id. Missing ids read as zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Multipliers(BTreeMap<DiscId, f64>);

impl Multipliers {
    pub fn new(values: BTreeMap<DiscId, f64>) -> Result<Self> {
        for (&id, &value) in &values {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidMultiplier { id, value });
            }
        }
        Ok(Multipliers(values))
    }

    pub fn zero() -> Self {
        Multipliers::default()
    }

    pub fn get(&self, id: DiscId) -> f64 {
        self.0.get(&id).copied().unwrap_or(0.0)
    }

    pub fn as_map(&self) -> &BTreeMap<DiscId, f64> {
        &self.0
    }

    pub(crate) fn dense(&self, catalog: &Catalog) -> Vec<f64> {
        catalog.ids.iter().map(|&id| self.get(id)).collect()
    }

    pub(crate) fn from_dense(catalog: &Catalog, kappa: &[f64], fix: &[Fix]) -> Self {
        Multipliers(
            catalog
                .ids
                .iter()
                .zip(kappa)
                .zip(fix)
                .filter(|(_, &s)| s == Fix::Free)
                .map(|((&id, &k), _)| (id, k))
                .collect(),
        )
    }
}

impl FromIterator<(DiscId, f64)> for Multipliers {
    /// Collects without validation; negative values are clamped to zero.
    fn from_iter<I: IntoIterator<Item = (DiscId, f64)>>(iter: I) -> Self {
        Multipliers(iter.into_iter().map(|(id, k)| (id, k.max(0.0))).collect())
    }
}

/// Solution of the x-only subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct LrpPrimeSolution {
    /// Diameters of every disc in the subproblem, zero when inactive.
    pub x: BTreeMap<DiscId, f64>,
    pub lambda: f64,
    /// Number of active discs (the prefix length `h`).
    pub active: usize,
    /// `sum b_i x_i^2 + kappa_i x_i`.
    pub value: f64,
}

/// Full relaxation at a node.
#[derive(Debug, Clone, PartialEq)]
pub struct LrpSolution {
    /// Diameters for forced and free discs.
    pub x: BTreeMap<DiscId, f64>,
    /// `y` for free discs; forced discs are implicitly on.
    pub y: BTreeMap<DiscId, bool>,
    pub lambda: f64,
    pub active: usize,
    /// Relaxation value `z_LRP(kappa)`, a lower bound on the node optimum.
    pub value: f64,
}

/// Solve the x-only subproblem over `free` on a unit instance.
pub fn solve_lrp_prime(
    instance: &Instance,
    free: &[DiscId],
    kappa: &Multipliers,
) -> Result<LrpPrimeSolution> {
    instance.require_unit()?;
    let catalog = Catalog::new(instance);
    let members = catalog.indices_of(free)?;
    if members.is_empty() {
        return Err(Error::NoAvailableDisc);
    }
    let dense = kappa.dense(&catalog);
    let prime = solve_prime(&catalog, &members, &dense);
    Ok(LrpPrimeSolution {
        x: members
            .iter()
            .map(|&k| (catalog.ids[k], prime.x[k]))
            .collect(),
        lambda: prime.lambda,
        active: prime.active,
        value: prime.value,
    })
}

/// Relaxation value at a node with discs `forced` on and `free` undecided.
/// Multipliers of forced discs are taken as zero; entries for ids outside
/// `free` are ignored.
pub fn lrp_value(
    instance: &Instance,
    forced: &[DiscId],
    free: &[DiscId],
    kappa: &Multipliers,
) -> Result<LrpSolution> {
    instance.require_unit()?;
    let catalog = Catalog::new(instance);
    let fix = fixings(&catalog, forced, free)?;
    if fix.iter().all(|&s| s == Fix::Off) {
        return Err(Error::NoAvailableDisc);
    }
    let rel = relax(&catalog, &fix, &kappa.dense(&catalog));
    Ok(LrpSolution {
        x: (0..catalog.len())
            .filter(|&k| fix[k] != Fix::Off)
            .map(|k| (catalog.ids[k], rel.x[k]))
            .collect(),
        y: (0..catalog.len())
            .filter(|&k| fix[k] == Fix::Free)
            .map(|k| (catalog.ids[k], rel.y[k]))
            .collect(),
        lambda: rel.lambda,
        active: rel.active,
        value: rel.value,
    })
}

/// Dense x-subproblem solution indexed by catalog position.
#[derive(Debug, Clone)]
pub(crate) struct Prime {
    pub x: Vec<f64>,
    pub lambda: f64,
    pub active: usize,
    pub value: f64,
}

/// Solve the x-subproblem over `members` with per-catalog multipliers.
pub(crate) fn solve_prime(catalog: &Catalog, members: &[usize], kappa: &[f64]) -> Prime {
    debug_assert!(!members.is_empty());
    let mut order = members.to_vec();
    order.sort_by(|&i, &j| kappa[i].total_cmp(&kappa[j]).then(i.cmp(&j)));

    // Grow the prefix while the next multiplier is below the current lambda.
    // lambda(h) - kappa_h = W(h-1) (lambda(h-1) - kappa_h) / W(h) > 0, so the
    // first h with lambda(h) <= kappa_{h+1} also satisfies kappa_h < lambda(h).
    let mut weight = 0.0;
    let mut weighted = 0.0;
    let mut lambda = 0.0;
    let mut active = 0;
    for (h, &k) in order.iter().enumerate() {
        let w = 0.5 / catalog.b[k];
        weight += w;
        weighted += kappa[k] * w;
        lambda = (1.0 + weighted) / weight;
        active = h + 1;
        match order.get(h + 1) {
            Some(&next) if kappa[next] < lambda => continue,
            _ => break,
        }
    }

    let mut x = vec![0.0; catalog.len()];
    let mut value = 0.0;
    for &k in &order[..active] {
        let xk = ((lambda - kappa[k]) * 0.5 / catalog.b[k]).max(0.0);
        x[k] = xk;
        value += catalog.b[k] * xk * xk + kappa[k] * xk;
    }
    Prime {
        x,
        lambda,
        active,
        value,
    }
}

/// Dense node relaxation.
#[derive(Debug, Clone)]
pub(crate) struct Relaxation {
    pub x: Vec<f64>,
    /// True for forced discs and for free discs with `f < kappa`.
    pub y: Vec<bool>,
    pub lambda: f64,
    pub active: usize,
    pub value: f64,
}

/// Relaxation at a node. Forced discs use multiplier zero and always pay
/// their setup cost; off discs are excluded.
pub(crate) fn relax(catalog: &Catalog, fix: &[Fix], kappa: &[f64]) -> Relaxation {
    let members: Vec<usize> = (0..catalog.len()).filter(|&k| fix[k] != Fix::Off).collect();
    let effective: Vec<f64> = (0..catalog.len())
        .map(|k| if fix[k] == Fix::Free { kappa[k] } else { 0.0 })
        .collect();
    let prime = solve_prime(catalog, &members, &effective);

    let mut value = prime.value;
    let mut y = vec![false; catalog.len()];
    for &k in &members {
        match fix[k] {
            Fix::On => {
                y[k] = true;
                value += catalog.f[k];
            }
            Fix::Free if catalog.f[k] < kappa[k] => {
                y[k] = true;
                value += catalog.f[k] - kappa[k];
            }
            _ => {}
        }
    }
    Relaxation {
        x: prime.x,
        y,
        lambda: prime.lambda,
        active: prime.active,
        value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;

    fn kappa(pairs: &[(DiscId, f64)]) -> Multipliers {
        Multipliers::new(pairs.iter().copied().collect()).unwrap()
    }

    /// Exact reference: try every support, keep the KKT-feasible one.
    fn by_supports(b: &[f64], k: &[f64]) -> f64 {
        let q = b.len();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << q) {
            let s: Vec<usize> = (0..q).filter(|i| mask >> i & 1 == 1).collect();
            let w: f64 = s.iter().map(|&i| 0.5 / b[i]).sum();
            let lam = (1.0 + s.iter().map(|&i| k[i] * 0.5 / b[i]).sum::<f64>()) / w;
            let xs: Vec<f64> = s.iter().map(|&i| (lam - k[i]) * 0.5 / b[i]).collect();
            if xs.iter().any(|&x| x < 0.0) {
                continue;
            }
            let v: f64 = s
                .iter()
                .zip(&xs)
                .map(|(&i, &x)| b[i] * x * x + k[i] * x)
                .sum();
            best = best.min(v);
        }
        best
    }

    #[test]
    fn prime_two_active() {
        let inst = Instance::from_costs(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let sol = solve_lrp_prime(&inst, &[1, 2], &kappa(&[(1, 0.0), (2, 1.0)])).unwrap();
        assert_eq!(sol.active, 2);
        assert!((sol.lambda - 1.5).abs() < 1e-15);
        assert!((sol.x[&1] - 0.75).abs() < 1e-15);
        assert!((sol.x[&2] - 0.25).abs() < 1e-15);
        assert!((sol.value - 0.875).abs() < 1e-15);
        assert!((sol.value - by_supports(&[1.0, 1.0], &[0.0, 1.0])).abs() < 1e-12);
    }

    #[test]
    fn prime_large_multiplier_deactivates() {
        let inst = Instance::from_costs(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let sol = solve_lrp_prime(&inst, &[1, 2], &kappa(&[(2, 10.0)])).unwrap();
        assert_eq!(sol.active, 1);
        assert_eq!(sol.lambda, 2.0);
        assert_eq!(sol.x[&1], 1.0);
        assert_eq!(sol.x[&2], 0.0);
        assert_eq!(sol.value, 1.0);
    }

    #[test]
    fn prime_zero_multipliers_is_restricted_problem() {
        let inst = Instance::from_costs(&[(1.0, 2.0), (3.0, 5.0), (0.5, 7.0)]).unwrap();
        let sol = solve_lrp_prime(&inst, &[1, 2, 3], &Multipliers::zero()).unwrap();
        let rp = closed_form::solve_restricted(&inst, &[1, 2, 3]).unwrap();
        assert_eq!(sol.active, 3);
        for (&id, &x) in rp.selected.iter().zip(&rp.diameters) {
            assert!((sol.x[&id] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn node_value_base_class() {
        let costs: Vec<(f64, f64)> = (1..=10).map(|i| ((11 - i) as f64, i as f64)).collect();
        let inst = Instance::from_costs(&costs).unwrap();
        let ids = inst.ids();
        let sol = lrp_value(&inst, &[], &ids, &Multipliers::zero()).unwrap();
        let harmonic: f64 = (1..=10).map(|i| 1.0 / i as f64).sum();
        assert!((sol.value - 1.0 / harmonic).abs() < 1e-12);
        assert!((sol.value - 0.3414).abs() < 1e-4);
        assert!(sol.y.values().all(|&y| !y));
    }

    #[test]
    fn node_value_single_disc_at_setup_cost() {
        let inst = Instance::from_costs(&[(5.0, 2.0)]).unwrap();
        let sol = lrp_value(&inst, &[], &[1], &kappa(&[(1, 5.0)])).unwrap();
        // boundary f == kappa keeps y = 0
        assert!(!sol.y[&1]);
        assert_eq!(sol.value, 7.0);
    }

    #[test]
    fn node_value_all_forced_is_restricted_cost() {
        let inst = Instance::from_costs(&[(1.0, 2.0), (3.0, 5.0), (0.5, 7.0)]).unwrap();
        let sol = lrp_value(&inst, &[1, 2, 3], &[], &kappa(&[(1, 9.0)])).unwrap();
        let z = closed_form::restricted_cost(&inst, &[1, 2, 3]).unwrap();
        assert!((sol.value - z).abs() < 1e-12);
    }

    #[test]
    fn node_value_errors() {
        let inst = Instance::from_costs(&[(1.0, 2.0), (3.0, 5.0)]).unwrap();
        assert!(matches!(
            lrp_value(&inst, &[1], &[1, 2], &Multipliers::zero()),
            Err(Error::ConflictingFix(1))
        ));
        assert!(matches!(
            lrp_value(&inst, &[], &[], &Multipliers::zero()),
            Err(Error::NoAvailableDisc)
        ));
        assert!(matches!(
            Multipliers::new(BTreeMap::from([(1, -0.5)])),
            Err(Error::InvalidMultiplier { id: 1, .. })
        ));
    }

    #[test]
    fn tied_multipliers_never_split() {
        let inst = Instance::from_costs(&[(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)]).unwrap();
        let k = kappa(&[(1, 0.0), (2, 0.7), (3, 0.7)]);
        let sol = solve_lrp_prime(&inst, &[1, 2, 3], &k).unwrap();
        assert!((sol.x[&2] > 0.0) == (sol.x[&3] > 0.0));
        assert!((sol.value - by_supports(&[1.0, 2.0, 3.0], &[0.0, 0.7, 0.7])).abs() < 1e-12);
    }
}
