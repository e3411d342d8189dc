//! Exact best-first branch-and-bound over the `y` variables.
//!
//! A node fixes some discs on (`T`) and some off; the rest are free. Its
//! bound comes from subgradient ascent on the node relaxation, warm started
//! from the parent's multipliers. Branching picks a free disc that is used
//! in the relaxation without being paid for (`y = 0`, `x > 0`, largest `x`
//! first), else a paid disc whose multiplier still prices slack
//! (`y = 1`, `x < 1`, `kappa > 0`, largest `kappa (y - x)` first). When
//! neither exists the relaxed solution is optimal for the node.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::time::{Duration, Instant};

use crate::closed_form::set_cost;
use crate::error::{Error, Result};
use crate::heuristic::{improve, local_search, plan_for, HeuristicParams};
use crate::lagrangian::{Multipliers, Relaxation};
use crate::model::{normalize, Catalog, CoverPlan, DiscId, Fix, Instance};
use crate::subgradient::{ascend, DualParams};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct BnbParams {
    pub root_dual: DualParams,
    pub node_dual: DualParams,
    pub heuristic: HeuristicParams,
    /// Re-run the heuristic at every node, not only at the root.
    pub heuristic_at_nodes: bool,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
}

impl Default for BnbParams {
    fn default() -> Self {
        BnbParams {
            root_dual: DualParams::root(),
            node_dual: DualParams::interior(),
            heuristic: HeuristicParams::default(),
            heuristic_at_nodes: true,
            time_limit: None,
            node_limit: None,
        }
    }
}

/// Run metrics, one row of the benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub struct BnbStats {
    /// Evaluated nodes, the root included.
    pub nodes: usize,
    pub max_depth: usize,
    /// Heuristic value at the root.
    pub ub_root: f64,
    /// Dual bound at the root.
    pub lb_root: f64,
    /// Proven optimum; `None` when a limit stopped the search.
    pub optimum: Option<f64>,
    /// Best global lower bound when the search ended.
    pub best_lb: f64,
    /// Root gap `(ub_root - lb_root) / ub_root`.
    pub gap: f64,
    pub wall_time: Duration,
}

/// Per-node record kept for inspection of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub depth: usize,
    pub lb: f64,
    /// Bound of the parent node, `None` at the root.
    pub parent_lb: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BnbTrace {
    pub nodes: Vec<NodeRecord>,
    /// Incumbent value after each improvement, in order.
    pub incumbents: Vec<f64>,
}

/// Pick the branching disc from a node relaxation, or `None` when the
/// relaxed solution is optimal for the node.
pub fn select_branch_variable(
    x: &BTreeMap<DiscId, f64>,
    y: &BTreeMap<DiscId, bool>,
    kappa: &Multipliers,
    free: &[DiscId],
) -> Option<DiscId> {
    let candidates: Vec<(DiscId, f64, bool, f64)> = free
        .iter()
        .map(|&id| {
            (
                id,
                x.get(&id).copied().unwrap_or(0.0),
                y.get(&id).copied().unwrap_or(false),
                kappa.get(id),
            )
        })
        .collect();
    pick_branch(candidates.into_iter()).map(|(id, _)| id)
}

/// Two-tier rule over `(key, x, y, kappa)` tuples; ties go to the first key.
fn pick_branch<K: Copy>(candidates: impl Iterator<Item = (K, f64, bool, f64)>) -> Option<(K, u8)> {
    let mut tier1: Option<(K, f64)> = None;
    let mut tier2: Option<(K, f64)> = None;
    for (key, x, y, kappa) in candidates {
        if !y && x > 0.0 {
            if tier1.is_none_or(|(_, best)| x > best) {
                tier1 = Some((key, x));
            }
        } else if y && x < 1.0 && kappa > 0.0 {
            let score = kappa * (1.0 - x);
            if tier2.is_none_or(|(_, best)| score > best) {
                tier2 = Some((key, score));
            }
        }
    }
    tier1.map(|(k, _)| (k, 1)).or(tier2.map(|(k, _)| (k, 2)))
}

/// Solve to optimality, or until a limit is hit.
pub fn solve_exact(instance: &Instance, params: &BnbParams) -> Result<(CoverPlan, BnbStats)> {
    let (plan, stats, _) = run(instance, params, false)?;
    Ok((plan, stats))
}

/// As [`solve_exact`], also returning the per-node trace.
pub fn solve_exact_traced(
    instance: &Instance,
    params: &BnbParams,
) -> Result<(CoverPlan, BnbStats, BnbTrace)> {
    run(instance, params, true)
}

struct Node {
    fix: Vec<Fix>,
    depth: usize,
    lb: f64,
    kappa: Vec<f64>,
    branch: usize,
    seq: u64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: smallest bound first, then deeper, then older
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lb
            .total_cmp(&self.lb)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    catalog: &'a Catalog,
    params: &'a BnbParams,
    incumbent: Vec<usize>,
    incumbent_cost: f64,
    /// Best value produced by the heuristic so far.
    heuristic_best: f64,
    nodes: usize,
    max_depth: usize,
    seq: u64,
    trace: Option<BnbTrace>,
}

enum Evaluated {
    Fathomed,
    Open(Node),
}

impl Search<'_> {
    fn offer(&mut self, members: Vec<usize>) {
        if members.is_empty() {
            return;
        }
        let cost = set_cost(self.catalog, &members);
        if cost < self.incumbent_cost {
            self.incumbent_cost = cost;
            self.incumbent = members;
            if let Some(trace) = &mut self.trace {
                trace.incumbents.push(cost);
            }
        }
    }

    fn offer_heuristic(&mut self, members: Vec<usize>) {
        self.heuristic_best = self.heuristic_best.min(set_cost(self.catalog, &members));
        self.offer(members);
    }

    fn fathoms(&self, lb: f64) -> bool {
        lb >= self.incumbent_cost * (1.0 - tolerance::FATHOM) - 1e-12
    }

    fn evaluate(
        &mut self,
        fix: Vec<Fix>,
        depth: usize,
        parent_lb: Option<f64>,
        warm: Vec<f64>,
        dual: &DualParams,
    ) -> Result<(Evaluated, f64)> {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        let root = parent_lb.is_none();
        let mut starts = Vec::new();
        let collect = root.then_some(&mut starts);
        let ascent = ascend(
            self.catalog,
            &fix,
            self.incumbent_cost,
            dual,
            warm,
            false,
            collect,
        )?;
        // a child solves a restriction of its parent, so the parent bound still holds
        let lb = parent_lb.map_or(ascent.best_lb, |p| ascent.best_lb.max(p));
        if let Some(trace) = &mut self.trace {
            trace.nodes.push(NodeRecord {
                depth,
                lb,
                parent_lb,
            });
        }

        if root {
            for active in &starts {
                self.offer_heuristic(improve(self.catalog, &fix, active, &self.params.heuristic));
            }
        } else if self.params.heuristic_at_nodes {
            let selected = local_search(
                self.catalog,
                &fix,
                &ascent.best_kappa,
                &self.params.heuristic,
            );
            self.offer_heuristic(selected);
        }
        if let Some(support) = ascent.proven {
            self.offer(support);
            return Ok((Evaluated::Fathomed, lb));
        }
        if self.fathoms(lb) {
            return Ok((Evaluated::Fathomed, lb));
        }
        match branch_index(&fix, &ascent.best, &ascent.best_kappa) {
            None => {
                let support =
                    (0..fix.len()).filter(|&k| fix[k] != Fix::Off && ascent.best.x[k] > 0.0);
                self.offer(support.collect());
                Ok((Evaluated::Fathomed, lb))
            }
            Some(branch) => {
                self.seq += 1;
                let node = Node {
                    fix,
                    depth,
                    lb,
                    kappa: ascent.best_kappa,
                    branch,
                    seq: self.seq,
                };
                Ok((Evaluated::Open(node), lb))
            }
        }
    }
}

fn branch_index(fix: &[Fix], rel: &Relaxation, kappa: &[f64]) -> Option<usize> {
    let free = (0..fix.len()).filter(|&k| fix[k] == Fix::Free);
    pick_branch(free.map(|k| (k, rel.x[k], rel.y[k], kappa[k]))).map(|(k, _)| k)
}

fn run(
    instance: &Instance,
    params: &BnbParams,
    traced: bool,
) -> Result<(CoverPlan, BnbStats, BnbTrace)> {
    params.root_dual.validate()?;
    params.node_dual.validate()?;
    if params.time_limit.is_some_and(|t| t.is_zero()) {
        return Err(Error::InvalidParameter(
            "time limit must be positive".into(),
        ));
    }
    let start = Instant::now();
    let (unit, scale) = normalize(instance);
    let catalog = Catalog::new(&unit);
    let q = catalog.len();

    let mut search = Search {
        catalog: &catalog,
        params,
        incumbent: Vec::new(),
        incumbent_cost: f64::INFINITY,
        heuristic_best: f64::INFINITY,
        nodes: 0,
        max_depth: 0,
        seq: 0,
        trace: traced.then(BnbTrace::default),
    };

    // the root dual needs an upper bound: seed it with the heuristic at kappa = 0
    let root_fix = vec![Fix::Free; q];
    let seed = local_search(&catalog, &root_fix, &vec![0.0; q], &params.heuristic);
    search.offer_heuristic(seed);
    let (root, lb_root) = search.evaluate(root_fix, 0, None, vec![0.0; q], &params.root_dual)?;
    let ub_root = search.heuristic_best;

    let mut heap = BinaryHeap::new();
    if let Evaluated::Open(node) = root {
        heap.push(node);
    }

    let mut interrupted = false;
    while let Some(node) = heap.pop() {
        if search.fathoms(node.lb) {
            heap.clear();
            break;
        }
        let over_time = params.time_limit.is_some_and(|t| start.elapsed() >= t);
        let over_nodes = params.node_limit.is_some_and(|n| search.nodes >= n);
        if over_time || over_nodes {
            heap.push(node);
            interrupted = true;
            break;
        }

        let i = node.branch;
        let mut on = node.fix.clone();
        on[i] = Fix::On;
        let mut off = node.fix;
        off[i] = Fix::Off;
        let children = [Some(on), off.iter().any(|&s| s != Fix::Off).then_some(off)];
        for fix in children.into_iter().flatten() {
            let warm = node.kappa.clone();
            let (child, _) =
                search.evaluate(fix, node.depth + 1, Some(node.lb), warm, &params.node_dual)?;
            if let Evaluated::Open(child) = child {
                heap.push(child);
            }
        }
    }

    let best_lb = if interrupted {
        heap.iter()
            .map(|n| n.lb)
            .fold(search.incumbent_cost, f64::min)
    } else {
        search.incumbent_cost
    };
    let plan = plan_for(instance, &catalog, &search.incumbent, scale.length)?;
    let stats = BnbStats {
        nodes: search.nodes,
        max_depth: search.max_depth,
        ub_root,
        lb_root,
        optimum: (!interrupted).then_some(plan.objective),
        best_lb,
        gap: if ub_root != 0.0 {
            (ub_root - lb_root) / ub_root
        } else {
            0.0
        },
        wall_time: start.elapsed(),
    };
    Ok((plan, stats, search.trace.unwrap_or_default()))
}
