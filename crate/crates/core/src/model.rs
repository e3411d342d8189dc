//! Domain model: disc catalog, instances, cover plans and the operations
//! that do not depend on a solver (evaluation, normalization, layout,
//! dominance).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

/// Identifier of a disc type within an instance. Ids start at 1.
pub type DiscId = u32;

/// One available disc: setup cost `f` and variable cost coefficient `b`.
///
/// Using the disc with diameter `x > 0` costs `f + b * x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscType {
    pub id: DiscId,
    pub f: f64,
    pub b: f64,
}

impl DiscType {
    pub fn new(id: DiscId, f: f64, b: f64) -> Result<Self> {
        let disc = DiscType { id, f, b };
        disc.validate()
            .map_err(|msg| Error::InvalidInstance(format!("disc {id}.{msg}")))?;
        Ok(disc)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.id == 0 {
            return Err("id: must be at least 1".into());
        }
        if !(self.f.is_finite() && self.f >= 0.0) {
            return Err(format!("f: must be finite and nonnegative, got {}", self.f));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(format!("b: must be finite and positive, got {}", self.b));
        }
        Ok(())
    }

    /// Cost of using this disc with diameter `x`; zero when `x == 0`.
    pub fn cost(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.f + self.b * x * x
        } else {
            0.0
        }
    }
}

/// A segment of length `length` and the catalog of discs that may cover it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct Instance {
    length: f64,
    discs: Vec<DiscType>,
}

/// On-disk layout of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    version: u32,
    length: f64,
    discs: Vec<DiscType>,
}

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.version != INSTANCE_FORMAT_VERSION {
            return Err(Error::InvalidInstance(format!(
                "version: expected {INSTANCE_FORMAT_VERSION}, got {}",
                file.version
            )));
        }
        Instance::new(file.length, file.discs)
    }
}

impl From<Instance> for InstanceFile {
    fn from(instance: Instance) -> Self {
        InstanceFile {
            version: INSTANCE_FORMAT_VERSION,
            length: instance.length,
            discs: instance.discs,
        }
    }
}

impl Instance {
    pub fn new(length: f64, discs: Vec<DiscType>) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "length: must be finite and positive, got {length}"
            )));
        }
        if discs.is_empty() {
            return Err(Error::InvalidInstance(
                "discs: at least one disc is required".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for (k, disc) in discs.iter().enumerate() {
            disc.validate()
                .map_err(|msg| Error::InvalidInstance(format!("discs[{k}].{msg}")))?;
            if !seen.insert(disc.id) {
                return Err(Error::InvalidInstance(format!(
                    "discs[{k}].id: duplicate id {}",
                    disc.id
                )));
            }
        }
        Ok(Instance { length, discs })
    }

    /// Unit-length instance from `(f, b)` pairs, with ids `1..=q` in order.
    pub fn from_costs(costs: &[(f64, f64)]) -> Result<Self> {
        let discs = costs
            .iter()
            .enumerate()
            .map(|(k, &(f, b))| DiscType {
                id: k as DiscId + 1,
                f,
                b,
            })
            .collect();
        Instance::new(1.0, discs)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn discs(&self) -> &[DiscType] {
        &self.discs
    }

    pub fn len(&self) -> usize {
        self.discs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discs.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.length == 1.0
    }

    pub fn disc(&self, id: DiscId) -> Option<&DiscType> {
        self.discs.iter().find(|d| d.id == id)
    }

    /// All ids in ascending order.
    pub fn ids(&self) -> Vec<DiscId> {
        let mut ids: Vec<_> = self.discs.iter().map(|d| d.id).collect();
        ids.sort_unstable();
        ids
    }

    pub(crate) fn require_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::NotUnitLength(self.length))
        }
    }
}

/// Records how a unit-length instance relates to the original one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub length: f64,
}

impl Scale {
    /// Map a diameter of the unit problem back to the original segment.
    pub fn denormalize(&self, x: f64) -> f64 {
        self.length * x
    }

    pub fn normalize(&self, x: f64) -> f64 {
        x / self.length
    }

    /// Rescale a plan of the unit problem onto the original instance.
    pub fn denormalize_plan(&self, original: &Instance, plan: &CoverPlan) -> Result<CoverPlan> {
        CoverPlan::from_diameters(
            original,
            plan.entries
                .iter()
                .map(|e| (e.id, self.denormalize(e.diameter))),
        )
    }
}

/// Rewrite an instance on the unit segment: `b <- length^2 * b`, `f` unchanged.
pub fn normalize(instance: &Instance) -> (Instance, Scale) {
    let length = instance.length;
    let scale = Scale { length };
    if instance.is_unit() {
        return (instance.clone(), scale);
    }
    let discs = instance
        .discs
        .iter()
        .map(|d| DiscType {
            id: d.id,
            f: d.f,
            b: length * length * d.b,
        })
        .collect();
    (Instance { length: 1.0, discs }, scale)
}

/// Objective of the diameters on `instance`: the sum of `f + b x^2` over
/// discs with positive diameter.
pub fn evaluate(instance: &Instance, diameters: &BTreeMap<DiscId, f64>) -> Result<f64> {
    let mut total = 0.0;
    let mut sum = 0.0;
    for (&id, &x) in diameters {
        let disc = instance.disc(id).ok_or(Error::UnknownDisc(id))?;
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "diameter of disc {id} must be finite and nonnegative, got {x}"
            )));
        }
        sum += x;
        total += disc.cost(x);
    }
    check_coverage(sum, instance.length)?;
    Ok(total)
}

fn check_coverage(sum: f64, length: f64) -> Result<()> {
    if (sum - length).abs() > tolerance::FEASIBILITY * length {
        return Err(Error::CoverageInfeasible { sum, length });
    }
    Ok(())
}

/// Centers of discs placed end to end from coordinate 0 in the given order.
pub fn layout(diameters: &[f64], length: f64) -> Result<Vec<f64>> {
    let sum: f64 = diameters.iter().sum();
    check_coverage(sum, length)?;
    let mut start = 0.0;
    Ok(diameters
        .iter()
        .map(|&x| {
            let center = start + x / 2.0;
            start += x;
            center
        })
        .collect())
}

/// Every `(i, j)` such that disc `i` dominates disc `j`: `b_i <= b_j`,
/// `f_i <= f_j` and the cost pairs differ.
pub fn dominated_pairs(instance: &Instance) -> Vec<(DiscId, DiscId)> {
    let mut pairs = Vec::new();
    for a in &instance.discs {
        for c in &instance.discs {
            if a.id != c.id && a.b <= c.b && a.f <= c.f && (a.b, a.f) != (c.b, c.f) {
                pairs.push((a.id, c.id));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// One disc of a cover plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub id: DiscId,
    pub diameter: f64,
    pub center: f64,
}

/// A feasible cover: selected discs, their diameters and centers, and
/// the objective broken into fixed and variable parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverPlan {
    pub objective: f64,
    pub fixed_cost: f64,
    pub variable_cost: f64,
    #[serde(rename = "selected")]
    pub entries: Vec<PlanEntry>,
}

impl CoverPlan {
    /// Build a plan from `(id, diameter)` pairs. Zero diameters are dropped;
    /// entries are ordered by id and laid out end to end in that order.
    pub fn from_diameters(
        instance: &Instance,
        diameters: impl IntoIterator<Item = (DiscId, f64)>,
    ) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        for (id, x) in diameters {
            if instance.disc(id).is_none() {
                return Err(Error::UnknownDisc(id));
            }
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "diameter of disc {id} must be finite and nonnegative, got {x}"
                )));
            }
            if by_id.insert(id, x).is_some() {
                return Err(Error::DuplicateDisc(id));
            }
        }
        by_id.retain(|_, x| *x > 0.0);
        if by_id.is_empty() {
            return Err(Error::EmptySelection);
        }
        let xs: Vec<f64> = by_id.values().copied().collect();
        let centers = layout(&xs, instance.length)?;

        let mut fixed_cost = 0.0;
        let mut variable_cost = 0.0;
        let entries = by_id
            .iter()
            .zip(centers)
            .map(|((&id, &diameter), center)| {
                let disc = instance.disc(id).expect("checked above");
                fixed_cost += disc.f;
                variable_cost += disc.b * diameter * diameter;
                PlanEntry {
                    id,
                    diameter,
                    center,
                }
            })
            .collect();
        Ok(CoverPlan {
            objective: fixed_cost + variable_cost,
            fixed_cost,
            variable_cost,
            entries,
        })
    }

    pub fn selected_ids(&self) -> Vec<DiscId> {
        self.entries.iter().map(|e| e.id).collect()
    }

    pub fn diameters(&self) -> BTreeMap<DiscId, f64> {
        self.entries.iter().map(|e| (e.id, e.diameter)).collect()
    }

    pub fn diameter(&self, id: DiscId) -> Option<f64> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.diameter)
    }

    pub fn covered_length(&self) -> f64 {
        self.entries.iter().map(|e| e.diameter).sum()
    }
}

/// Solver-side view of a unit instance: discs sorted by id, parallel cost
/// arrays. Catalog indices double as the id tie-break order.
#[derive(Debug, Clone)]
pub(crate) struct Catalog {
    pub ids: Vec<DiscId>,
    pub f: Vec<f64>,
    pub b: Vec<f64>,
}

impl Catalog {
    pub fn new(unit: &Instance) -> Self {
        let mut discs = unit.discs.clone();
        discs.sort_unstable_by_key(|d| d.id);
        Catalog {
            ids: discs.iter().map(|d| d.id).collect(),
            f: discs.iter().map(|d| d.f).collect(),
            b: discs.iter().map(|d| d.b).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn index_of(&self, id: DiscId) -> Result<usize> {
        self.ids
            .binary_search(&id)
            .map_err(|_| Error::UnknownDisc(id))
    }

    /// Indices for a list of ids, rejecting unknown and repeated ids.
    pub fn indices_of(&self, ids: &[DiscId]) -> Result<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        ids.iter()
            .map(|&id| {
                let k = self.index_of(id)?;
                if std::mem::replace(&mut seen[k], true) {
                    return Err(Error::DuplicateDisc(id));
                }
                Ok(k)
            })
            .collect()
    }
}

/// Fixing state of a disc at a branch-and-bound node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Fix {
    Free,
    On,
    Off,
}

/// Build a per-disc fixing vector from forced-on and free id lists; every
/// other disc is off.
pub(crate) fn fixings(catalog: &Catalog, forced: &[DiscId], free: &[DiscId]) -> Result<Vec<Fix>> {
    let mut fix = vec![Fix::Off; catalog.len()];
    for &k in &catalog.indices_of(forced)? {
        fix[k] = Fix::On;
    }
    for &id in free {
        let k = catalog.index_of(id)?;
        match fix[k] {
            Fix::On => return Err(Error::ConflictingFix(id)),
            Fix::Free => return Err(Error::DuplicateDisc(id)),
            Fix::Off => fix[k] = Fix::Free,
        }
    }
    Ok(fix)
}
