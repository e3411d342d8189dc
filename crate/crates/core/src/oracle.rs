//! Brute-force reference solver.
//!
//! Every nonempty subset `S` is scored with the closed-form restricted cost
//! `z(S)`; since setup costs are nonnegative, the best subset with its KKT
//! diameters is a global optimum. Subsets are enumerated depth first so
//! that the running sums are accumulated along a path of at most `q` terms.

use crate::error::{Error, Result};
use crate::heuristic::plan_for;
use crate::model::{normalize, Catalog, CoverPlan, Instance};

pub const DEFAULT_MAX_Q: usize = 25;

/// Hard ceiling: the enumeration uses a 64-bit subset mask.
const MASK_BITS: usize = 63;

/// Optimal plan by enumeration of all `2^q - 1` subsets. Among subsets of
/// equal cost the lexicographically smallest id list wins.
pub fn solve_brute_force(instance: &Instance, max_q: usize) -> Result<CoverPlan> {
    let q = instance.len();
    if q > max_q || q > MASK_BITS {
        return Err(Error::TooLarge {
            q,
            max_q: max_q.min(MASK_BITS),
        });
    }
    let (unit, scale) = normalize(instance);
    let catalog = Catalog::new(&unit);
    let mut search = Search {
        catalog: &catalog,
        best_cost: f64::INFINITY,
        best_mask: 0,
    };
    search.visit(0, 0.0, 0.0, 0);
    let members: Vec<usize> = (0..q).filter(|&k| search.best_mask >> k & 1 == 1).collect();
    plan_for(instance, &catalog, &members, scale.length)
}

struct Search<'a> {
    catalog: &'a Catalog,
    best_cost: f64,
    best_mask: u64,
}

impl Search<'_> {
    fn visit(&mut self, k: usize, fixed: f64, inv: f64, mask: u64) {
        if k == self.catalog.len() {
            if mask != 0 {
                self.offer(fixed + 1.0 / inv, mask);
            }
            return;
        }
        self.visit(k + 1, fixed, inv, mask);
        self.visit(
            k + 1,
            fixed + self.catalog.f[k],
            inv + 1.0 / self.catalog.b[k],
            mask | 1 << k,
        );
    }

    fn offer(&mut self, cost: f64, mask: u64) {
        if self.best_mask == 0 {
            self.best_cost = cost;
            self.best_mask = mask;
            return;
        }
        let tie = 1e-12 * self.best_cost.abs().max(1.0);
        if cost < self.best_cost - tie
            || (cost <= self.best_cost + tie && lex_less(mask, self.best_mask))
        {
            self.best_cost = cost;
            self.best_mask = mask;
        }
    }
}

/// Compare the ascending index lists of two masks lexicographically.
fn lex_less(a: u64, b: u64) -> bool {
    let list = |m: u64| (0..64).filter(move |k| m >> k & 1 == 1);
    list(a).lt(list(b))
}
