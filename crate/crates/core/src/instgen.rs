//! Instance families `(q, s, t, u)`.
//!
//! The base class has ascending `b` and descending `f` with
//! `f_{q-i+1} = b_i`, so no disc dominates another. `s` multiplies `b`,
//! `t` multiplies the setup costs relative to `b`, and `u` perturbs the
//! discs selected by the base optimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::branch_bound::{self, BnbParams};
use crate::error::{Error, Result};
use crate::model::{DiscId, DiscType, Instance};
use crate::oracle;

/// Supported perturbations of the base class.
pub const SUPPORTED_U: [u8; 5] = [0, 1, 2, 3, 5];

/// Range of the random increments between consecutive `b` values.
pub const INCREMENT_RANGE: (f64, f64) = (0.5, 1.5);

/// Description of one instance class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub q: usize,
    #[serde(rename = "s")]
    pub amp_s: f64,
    #[serde(rename = "t")]
    pub setup_t: f64,
    #[serde(rename = "u")]
    pub config_u: u8,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_deterministic")]
    pub deterministic: bool,
}

fn default_deterministic() -> bool {
    true
}

impl ClassSpec {
    /// Deterministic class with `b_i = s i` before perturbation.
    pub fn deterministic(q: usize, amp_s: f64, setup_t: f64, config_u: u8) -> Self {
        ClassSpec {
            q,
            amp_s,
            setup_t,
            config_u,
            seed: 0,
            deterministic: true,
        }
    }

    pub fn random(q: usize, amp_s: f64, setup_t: f64, config_u: u8, seed: u64) -> Self {
        ClassSpec {
            q,
            amp_s,
            setup_t,
            config_u,
            seed,
            deterministic: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 1 {
            return Err(Error::InvalidParameter("q must be at least 1".into()));
        }
        if !(self.amp_s.is_finite() && self.amp_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "s must be positive, got {}",
                self.amp_s
            )));
        }
        if !(self.setup_t.is_finite() && self.setup_t >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "t must be at least 1, got {}",
                self.setup_t
            )));
        }
        if !SUPPORTED_U.contains(&self.config_u) {
            return Err(Error::UnsupportedConfig(self.config_u));
        }
        Ok(())
    }

    /// Label in `q,s,t,u` form.
    pub fn label(&self) -> String {
        format!(
            "{},{},{},{}",
            self.q, self.amp_s, self.setup_t, self.config_u
        )
    }
}

/// Unscaled base `b` values: `1..=q`, or a seeded random walk.
pub fn base_coefficients(spec: &ClassSpec) -> Vec<f64> {
    if spec.deterministic {
        return (1..=spec.q).map(|i| i as f64).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = INCREMENT_RANGE;
    let mut b = Vec::with_capacity(spec.q);
    let mut last = 0.0;
    for _ in 0..spec.q {
        last += rng.random_range(lo..hi);
        b.push(last);
    }
    b
}

/// The class instance with `u = 0`: scaled `b`, setup costs `f_{q-i+1} = t b_i`.
pub fn generate_base(spec: &ClassSpec) -> Result<Instance> {
    spec.validate()?;
    let q = spec.q;
    let b: Vec<f64> = base_coefficients(spec)
        .into_iter()
        .map(|v| v * spec.amp_s)
        .collect();
    let discs = (0..q)
        .map(|i| DiscType {
            id: i as DiscId + 1,
            f: spec.setup_t * b[q - 1 - i],
            b: b[i],
        })
        .collect();
    Instance::new(1.0, discs)
}

/// Generate the instance of a class, solving the base instance first when
/// `u != 0`.
pub fn generate_instance(spec: &ClassSpec) -> Result<Instance> {
    let base = generate_base(spec)?;
    if spec.config_u == 0 {
        return Ok(base);
    }
    let selected = base_optimal_set(&base)?;
    apply_u_config(&base, spec.config_u, &selected)
}

/// Optimal selected set, by enumeration when small, otherwise by
/// branch-and-bound.
pub fn base_optimal_set(instance: &Instance) -> Result<Vec<DiscId>> {
    let plan = if instance.len() <= oracle::DEFAULT_MAX_Q {
        oracle::solve_brute_force(instance, oracle::DEFAULT_MAX_Q)?
    } else {
        branch_bound::solve_exact(instance, &BnbParams::default())?.0
    };
    Ok(plan.selected_ids())
}

/// Perturb the discs in `selected`:
/// `u = 1` sets their `b` to the largest `b`, `u = 2` their `f` to the
/// largest `f`, `u = 3` their `f` to the smallest `f`, `u = 5` both `b`
/// and `f` to the largest values.
pub fn apply_u_config(base: &Instance, u: u8, selected: &[DiscId]) -> Result<Instance> {
    if !SUPPORTED_U.contains(&u) {
        return Err(Error::UnsupportedConfig(u));
    }
    for &id in selected {
        if base.disc(id).is_none() {
            return Err(Error::UnknownDisc(id));
        }
    }
    let max_b = base
        .discs()
        .iter()
        .map(|d| d.b)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_f = base
        .discs()
        .iter()
        .map(|d| d.f)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_f = base
        .discs()
        .iter()
        .map(|d| d.f)
        .fold(f64::INFINITY, f64::min);
    let discs = base
        .discs()
        .iter()
        .map(|d| {
            if !selected.contains(&d.id) {
                return *d;
            }
            match u {
                1 => DiscType { b: max_b, ..*d },
                2 => DiscType { f: max_f, ..*d },
                3 => DiscType { f: min_f, ..*d },
                5 => DiscType {
                    b: max_b,
                    f: max_f,
                    ..*d
                },
                _ => *d,
            }
        })
        .collect();
    Instance::new(base.length(), discs)
}
