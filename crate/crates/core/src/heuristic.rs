//! Upper bounds from the Lagrangean multipliers.
//!
//! The active discs of the relaxation form a starting set `S`; a greedy
//! local search then tries to drop selected discs (largest setup cost
//! first) and to add unselected ones (smallest setup cost first), scoring
//! every candidate set with the closed-form cost `z(S)`.

use crate::closed_form::{kkt_diameters, set_cost};
use crate::error::{Error, Result};
use crate::lagrangian::{relax, solve_prime, Multipliers};
use crate::model::{normalize, Catalog, CoverPlan, DiscId, Fix, Instance};
use crate::subgradient::{ascend, DualParams};
use crate::tolerance;

/// How a scan picks its move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Acceptance {
    /// Take the first improving candidate in scan order.
    #[default]
    FirstImprovement,
    /// Take the most improving candidate of the scan.
    BestImprovement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HeuristicParams {
    /// Maximum number of drop/add sweeps; `None` means `2 q`.
    pub iter_cap: Option<usize>,
    pub acceptance: Acceptance,
}

/// Discs with positive diameter in the x-subproblem over `free`.
pub fn active_set_from_multipliers(
    instance: &Instance,
    free: &[DiscId],
    kappa: &Multipliers,
) -> Result<Vec<DiscId>> {
    instance.require_unit()?;
    let catalog = Catalog::new(instance);
    let mut members = catalog.indices_of(free)?;
    if members.is_empty() {
        return Err(Error::NoAvailableDisc);
    }
    members.sort_unstable();
    let prime = solve_prime(&catalog, &members, &kappa.dense(&catalog));
    Ok(members
        .into_iter()
        .filter(|&k| prime.x[k] > 0.0)
        .map(|k| catalog.ids[k])
        .collect())
}

/// Feasible plan with the discs in `forced` kept on and the discs in `off`
/// never used.
pub fn heuristic_solve(
    instance: &Instance,
    forced: &[DiscId],
    off: &[DiscId],
    kappa: &Multipliers,
    params: &HeuristicParams,
) -> Result<CoverPlan> {
    let (unit, scale) = normalize(instance);
    let catalog = Catalog::new(&unit);
    let excluded = catalog.indices_of(off)?;
    let forced_idx = catalog.indices_of(forced)?;
    let mut fix = vec![Fix::Free; catalog.len()];
    for &k in &excluded {
        fix[k] = Fix::Off;
    }
    for &k in &forced_idx {
        if fix[k] == Fix::Off {
            return Err(Error::ConflictingFix(catalog.ids[k]));
        }
        fix[k] = Fix::On;
    }
    if fix.iter().all(|&s| s == Fix::Off) {
        return Err(Error::NoAvailableDisc);
    }
    let selected = local_search(&catalog, &fix, &kappa.dense(&catalog), params);
    plan_for(instance, &catalog, &selected, scale.length)
}

/// Root upper bound: the heuristic from zero multipliers, then again from
/// the active set of every multiplier vector visited by the dual ascent.
/// The cheapest plan is kept.
pub fn root_heuristic(
    instance: &Instance,
    dual: &DualParams,
    params: &HeuristicParams,
) -> Result<CoverPlan> {
    dual.validate()?;
    let (unit, scale) = normalize(instance);
    let catalog = Catalog::new(&unit);
    let fix = vec![Fix::Free; catalog.len()];
    let best = root_search(&catalog, &fix, dual, params)?;
    plan_for(instance, &catalog, &best, scale.length)
}

/// Heuristic runs of the root node; the ascent starts from `kappa = 0`
/// with the first heuristic value as upper bound.
fn root_search(
    catalog: &Catalog,
    fix: &[Fix],
    dual: &DualParams,
    params: &HeuristicParams,
) -> Result<Vec<usize>> {
    let zero = vec![0.0; catalog.len()];
    let mut best = local_search(catalog, fix, &zero, params);
    let mut best_cost = set_cost(catalog, &best);
    let mut starts = Vec::new();
    ascend(
        catalog,
        fix,
        best_cost,
        dual,
        zero,
        false,
        Some(&mut starts),
    )?;
    for active in &starts {
        let selected = improve(catalog, fix, active, params);
        let cost = set_cost(catalog, &selected);
        if cost < best_cost {
            best = selected;
            best_cost = cost;
        }
    }
    Ok(best)
}

pub(crate) fn plan_for(
    instance: &Instance,
    catalog: &Catalog,
    selected: &[usize],
    length: f64,
) -> Result<CoverPlan> {
    let (xs, _) = kkt_diameters(catalog, selected);
    CoverPlan::from_diameters(
        instance,
        selected
            .iter()
            .zip(xs)
            .map(|(&k, x)| (catalog.ids[k], length * x)),
    )
}

/// Run the drop/add search from the relaxation's active set. Returns the
/// final selected set as sorted catalog indices.
pub(crate) fn local_search(
    catalog: &Catalog,
    fix: &[Fix],
    kappa: &[f64],
    params: &HeuristicParams,
) -> Vec<usize> {
    let rel = relax(catalog, fix, kappa);
    let active: Vec<bool> = rel.x.iter().map(|&x| x > 0.0).collect();
    improve(catalog, fix, &active, params)
}

/// Drop/add search from `T` plus the free discs marked in `active`.
pub(crate) fn improve(
    catalog: &Catalog,
    fix: &[Fix],
    active: &[bool],
    params: &HeuristicParams,
) -> Vec<usize> {
    let mut in_set: Vec<bool> = (0..catalog.len())
        .map(|k| fix[k] == Fix::On || (fix[k] == Fix::Free && active[k]))
        .collect();

    // scan orders: drops by f descending, adds by f ascending, ties by id
    let mut by_f: Vec<usize> = (0..catalog.len())
        .filter(|&k| fix[k] == Fix::Free)
        .collect();
    by_f.sort_by(|&i, &j| catalog.f[i].total_cmp(&catalog.f[j]).then(i.cmp(&j)));
    let mut drop_order = by_f.clone();
    drop_order.sort_by(|&i, &j| catalog.f[j].total_cmp(&catalog.f[i]).then(i.cmp(&j)));

    let members =
        |in_set: &[bool]| -> Vec<usize> { (0..in_set.len()).filter(|&k| in_set[k]).collect() };
    let mut current = set_cost(catalog, &members(&in_set));
    let cap = params.iter_cap.unwrap_or(2 * catalog.len());

    for _ in 0..cap {
        let mut moved = false;
        for (candidates, adding) in [(&drop_order, false), (&by_f, true)] {
            let mut chosen: Option<(usize, f64)> = None;
            for &k in candidates.iter() {
                if in_set[k] == adding {
                    continue;
                }
                in_set[k] = adding;
                let set = members(&in_set);
                in_set[k] = !adding;
                if set.is_empty() {
                    continue;
                }
                let cost = set_cost(catalog, &set);
                let target = chosen.map_or(current, |(_, c)| c);
                if cost < target - tolerance::IMPROVEMENT * target.abs().max(1.0) {
                    chosen = Some((k, cost));
                    if params.acceptance == Acceptance::FirstImprovement {
                        break;
                    }
                }
            }
            if let Some((k, cost)) = chosen {
                in_set[k] = adding;
                current = cost;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    members(&in_set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(q: u32, s: f64, t: f64) -> Instance {
        let costs: Vec<(f64, f64)> = (1..=q)
            .map(|i| (t * s * f64::from(q + 1 - i), s * f64::from(i)))
            .collect();
        Instance::from_costs(&costs).unwrap()
    }

    fn kappa(pairs: &[(DiscId, f64)]) -> Multipliers {
        pairs.iter().copied().collect()
    }

    #[test]
    fn active_set_examples() {
        let two = Instance::from_costs(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        assert_eq!(
            active_set_from_multipliers(&two, &[1, 2], &Multipliers::zero()).unwrap(),
            vec![1, 2]
        );
        assert_eq!(
            active_set_from_multipliers(&two, &[1, 2], &kappa(&[(2, 10.0)])).unwrap(),
            vec![1]
        );
        assert_eq!(
            active_set_from_multipliers(&two, &[1, 2], &kappa(&[(2, 1.0)])).unwrap(),
            vec![1, 2]
        );
    }

    #[test]
    fn single_disc() {
        let inst = Instance::from_costs(&[(5.0, 2.0)]).unwrap();
        let plan = heuristic_solve(
            &inst,
            &[],
            &[],
            &Multipliers::zero(),
            &HeuristicParams::default(),
        )
        .unwrap();
        assert_eq!(plan.selected_ids(), vec![1]);
        assert_eq!(plan.objective, 7.0);
    }

    #[test]
    fn base_class_from_zero_multipliers() {
        let plan = heuristic_solve(
            &base(10, 10.0, 1.0),
            &[],
            &[],
            &Multipliers::zero(),
            &HeuristicParams::default(),
        )
        .unwrap();
        assert_eq!(plan.selected_ids(), vec![9, 10]);
        assert!((plan.objective - 77.368).abs() < 1e-3);
    }

    #[test]
    fn root_heuristic_matches_anchor() {
        let plan = root_heuristic(
            &base(10, 10.0, 1.0),
            &DualParams::root(),
            &HeuristicParams::default(),
        )
        .unwrap();
        assert!((plan.objective - 77.368).abs() < 1e-3);
    }

    #[test]
    fn root_heuristic_escapes_tied_drop_order() {
        // from {1, 2} the drop scan removes disc 1 first and stalls at {2} = 22
        let inst = Instance::from_costs(&[(20.0, 1.0), (20.0, 2.0)]).unwrap();
        let zero = heuristic_solve(
            &inst,
            &[],
            &[],
            &Multipliers::zero(),
            &HeuristicParams::default(),
        )
        .unwrap();
        assert_eq!(zero.objective, 22.0);
        let root = root_heuristic(&inst, &DualParams::root(), &HeuristicParams::default()).unwrap();
        assert_eq!(root.selected_ids(), vec![1]);
        assert_eq!(root.objective, 21.0);
    }

    #[test]
    fn respects_forced_and_off() {
        let inst = base(6, 1.0, 1.0);
        let plan = heuristic_solve(
            &inst,
            &[1],
            &[6],
            &Multipliers::zero(),
            &HeuristicParams::default(),
        )
        .unwrap();
        let ids = plan.selected_ids();
        assert!(ids.contains(&1));
        assert!(!ids.contains(&6));
        assert!((plan.covered_length() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let inst = base(3, 1.0, 1.0);
        let none = heuristic_solve(
            &inst,
            &[],
            &[1, 2, 3],
            &Multipliers::zero(),
            &HeuristicParams::default(),
        );
        assert!(matches!(none, Err(Error::NoAvailableDisc)));
        let clash = heuristic_solve(
            &inst,
            &[2],
            &[2],
            &Multipliers::zero(),
            &HeuristicParams::default(),
        );
        assert!(matches!(clash, Err(Error::ConflictingFix(2))));
    }

    #[test]
    fn best_improvement_never_worse_than_start() {
        let inst = base(15, 1.0, 10.0);
        let params = HeuristicParams {
            acceptance: Acceptance::BestImprovement,
            ..Default::default()
        };
        let plan = heuristic_solve(&inst, &[], &[], &Multipliers::zero(), &params).unwrap();
        let catalog = Catalog::new(&inst);
        let all: Vec<usize> = (0..15).collect();
        assert!(plan.objective <= set_cost(&catalog, &all) + 1e-12);
    }
}
