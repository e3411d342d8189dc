//! Subgradient ascent on the Lagrangean dual `max_{kappa >= 0} z_LRP(kappa)`.
//!
//! Each iteration solves the relaxation, keeps the best bound, and moves the
//! multipliers of free discs along `s_i = x_i - y_i` with the Polyak-type
//! step `alpha (UB - LB) / |s|^2`, projecting back onto `kappa >= 0`. The
//! step scale `alpha` is halved whenever the bound stalls for
//! `stall_patience` consecutive iterations.

use crate::error::{Error, Result};
use crate::lagrangian::{relax, Multipliers, Relaxation};
use crate::model::{fixings, normalize, Catalog, CoverPlan, DiscId, Fix, Instance};
use crate::{closed_form, tolerance};

/// Step-size schedule and stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualParams {
    /// Initial step scale, in `(0, 2)`.
    pub alpha0: f64,
    pub max_iters: usize,
    /// Non-improving iterations tolerated before halving `alpha`.
    pub stall_patience: usize,
    /// Stop once `ub - lb <= stop_gap * |ub|`.
    pub stop_gap: f64,
}

impl DualParams {
    /// Settings for the root node.
    pub fn root() -> Self {
        DualParams {
            alpha0: 1.95,
            max_iters: 300,
            stall_patience: 20,
            stop_gap: 1e-9,
        }
    }

    /// Settings for interior branch-and-bound nodes.
    pub fn interior() -> Self {
        DualParams {
            max_iters: 60,
            ..Self::root()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0 < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha0 must be in (0, 2), got {}",
                self.alpha0
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter(
                "max_iters must be at least 1".into(),
            ));
        }
        if self.stall_patience < 1 {
            return Err(Error::InvalidParameter(
                "stall_patience must be at least 1".into(),
            ));
        }
        if self.stop_gap.is_nan() || self.stop_gap < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "stop_gap must be nonnegative, got {}",
                self.stop_gap
            )));
        }
        Ok(())
    }
}

impl Default for DualParams {
    fn default() -> Self {
        Self::root()
    }
}

/// Why the ascent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualStop {
    IterationLimit,
    /// The relaxed solution is feasible and complementary, hence optimal.
    ProvenOptimal,
    /// The bound reached the upper bound.
    GapClosed,
    ZeroSubgradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualResult {
    pub best_lb: f64,
    pub best_kappa: Multipliers,
    pub iterations: usize,
    /// Present when the relaxation solution passed the optimality test.
    pub proven_optimal_plan: Option<CoverPlan>,
    /// Best bound after each iteration.
    pub lb_history: Vec<f64>,
    pub final_alpha: f64,
    pub halvings: u32,
    pub stop: DualStop,
}

/// Maximize the relaxation bound of the node with `forced` discs on and
/// `free` discs undecided, starting from `kappa = 0`.
///
/// `ub` must be a valid upper bound on the node optimum; a bound that falls
/// below a computed relaxation value is reported as [`Error::InvalidUpperBound`].
pub fn optimize_dual(
    instance: &Instance,
    forced: &[DiscId],
    free: &[DiscId],
    ub: f64,
    params: &DualParams,
) -> Result<DualResult> {
    params.validate()?;
    if !ub.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "upper bound must be finite, got {ub}"
        )));
    }
    let (unit, scale) = normalize(instance);
    let catalog = Catalog::new(&unit);
    let fix = fixings(&catalog, forced, free)?;
    if fix.iter().all(|&s| s == Fix::Off) {
        return Err(Error::NoAvailableDisc);
    }
    let kappa = vec![0.0; catalog.len()];
    let out = ascend(&catalog, &fix, ub, params, kappa, true, None)?;

    let proven_optimal_plan = match &out.proven {
        Some(support) => {
            let (xs, _) = closed_form::kkt_diameters(&catalog, support);
            let pairs = support
                .iter()
                .zip(xs)
                .map(|(&k, x)| (catalog.ids[k], scale.denormalize(x)));
            Some(CoverPlan::from_diameters(instance, pairs)?)
        }
        None => None,
    };
    Ok(DualResult {
        best_lb: out.best_lb,
        best_kappa: Multipliers::from_dense(&catalog, &out.best_kappa, &fix),
        iterations: out.iterations,
        proven_optimal_plan,
        lb_history: out.lb_history,
        final_alpha: out.alpha,
        halvings: out.halvings,
        stop: out.stop,
    })
}

/// Dense ascent outcome.
#[derive(Debug, Clone)]
pub(crate) struct Ascent {
    pub best_lb: f64,
    pub best_kappa: Vec<f64>,
    /// Relaxation at `best_kappa`.
    pub best: Relaxation,
    /// Support of an optimal node solution, when the optimality test passed.
    pub proven: Option<Vec<usize>>,
    pub iterations: usize,
    pub lb_history: Vec<f64>,
    pub alpha: f64,
    pub halvings: u32,
    pub stop: DualStop,
}

/// Run the ascent from `kappa`. With `strict`, a relaxation value above
/// `ub` is an error; otherwise the ascent simply stops there, which is the
/// situation of a node that can be fathomed. When `starts` is given, the
/// distinct active sets `x > 0` of all iterates are appended to it.
pub(crate) fn ascend(
    catalog: &Catalog,
    fix: &[Fix],
    ub: f64,
    params: &DualParams,
    mut kappa: Vec<f64>,
    strict: bool,
    mut starts: Option<&mut Vec<Vec<bool>>>,
) -> Result<Ascent> {
    let free: Vec<usize> = (0..catalog.len())
        .filter(|&k| fix[k] == Fix::Free)
        .collect();
    let mut alpha = params.alpha0;
    let mut halvings = 0;
    let mut stall = 0;
    let mut best_lb = f64::NEG_INFINITY;
    let mut best_kappa = kappa.clone();
    let mut best: Option<Relaxation> = None;
    let mut lb_history = Vec::with_capacity(params.max_iters);
    let mut proven = None;
    let mut stop = DualStop::IterationLimit;
    let mut iterations = 0;

    while iterations < params.max_iters {
        iterations += 1;
        let rel = relax(catalog, fix, &kappa);
        if let Some(starts) = starts.as_deref_mut() {
            let active: Vec<bool> = rel.x.iter().map(|&x| x > 0.0).collect();
            if !starts.contains(&active) {
                starts.push(active);
            }
        }

        let threshold = tolerance::IMPROVEMENT * best_lb.abs().max(1.0);
        if best.is_none() || rel.value > best_lb + threshold {
            best_lb = rel.value;
            best_kappa.clone_from(&kappa);
            best = Some(rel.clone());
            stall = 0;
        } else {
            stall += 1;
            if stall >= params.stall_patience {
                alpha /= 2.0;
                halvings += 1;
                stall = 0;
            }
        }
        lb_history.push(best_lb);

        if strict && best_lb > ub + 1e-6 * ub.abs() {
            return Err(Error::InvalidUpperBound { ub, lb: best_lb });
        }

        if let Some(support) = optimal_support(catalog, fix, &kappa, &rel) {
            if rel.value >= best_lb {
                best_lb = rel.value;
                best_kappa.clone_from(&kappa);
                best = Some(rel);
                *lb_history.last_mut().expect("pushed above") = best_lb;
            }
            proven = Some(support);
            stop = DualStop::ProvenOptimal;
            break;
        }
        if ub - best_lb <= params.stop_gap * ub.abs() {
            stop = DualStop::GapClosed;
            break;
        }

        let norm2: f64 = free
            .iter()
            .map(|&k| {
                let s = rel.x[k] - f64::from(u8::from(rel.y[k]));
                s * s
            })
            .sum();
        if norm2 == 0.0 {
            stop = DualStop::ZeroSubgradient;
            break;
        }
        let step = alpha * (ub - best_lb) / norm2;
        for &k in &free {
            let s = rel.x[k] - f64::from(u8::from(rel.y[k]));
            kappa[k] = (kappa[k] + step * s).max(0.0);
        }
    }

    Ok(Ascent {
        best_lb,
        best_kappa,
        best: best.expect("at least one iteration"),
        proven,
        iterations,
        lb_history,
        alpha,
        halvings,
        stop,
    })
}

/// The relaxed `(x, y)` is optimal for the node when `x_i <= y_i` and
/// `kappa_i (y_i - x_i) = 0` for every free disc. Returns the support of `x`.
pub(crate) fn optimal_support(
    catalog: &Catalog,
    fix: &[Fix],
    kappa: &[f64],
    rel: &Relaxation,
) -> Option<Vec<usize>> {
    for k in 0..catalog.len() {
        if fix[k] != Fix::Free {
            continue;
        }
        let x = rel.x[k];
        if rel.y[k] {
            if kappa[k] * (1.0 - x) > tolerance::KKT_RESIDUAL {
                return None;
            }
        } else if x > 0.0 {
            return None;
        }
    }
    Some(
        (0..catalog.len())
            .filter(|&k| fix[k] != Fix::Off && rel.x[k] > 0.0)
            .collect(),
    )
}
