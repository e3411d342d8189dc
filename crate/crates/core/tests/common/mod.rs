//! Reference computations shared by the integration tests. Nothing here
//! calls into the solvers; each helper works from the raw problem data.
#![allow(dead_code)]

use linecover::instgen::{generate_instance, ClassSpec};
use linecover::{DiscType, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LEVELS: [f64; 3] = [1.0, 10.0, 100.0];

/// Minimum over all nonempty subsets `S` of `sum f + sum b x^2`, with the
/// diameters of `S` proportional to `1/b` and summing to the length.
pub fn brute_optimum(inst: &Instance) -> (f64, Vec<u32>) {
    let discs = inst.discs();
    let q = discs.len();
    let len = inst.length();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 1u64..(1 << q) {
        let s: Vec<&DiscType> = (0..q)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| &discs[k])
            .collect();
        let inv: f64 = s.iter().map(|d| 1.0 / d.b).sum();
        let cost: f64 = s
            .iter()
            .map(|d| {
                let x = len * (1.0 / d.b) / inv;
                d.f + d.b * x * x
            })
            .sum();
        if cost < best.0 {
            best = (cost, s.iter().map(|d| d.id).collect());
        }
    }
    best
}

/// Euclidean projection onto the unit simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Minimize `sum b x^2 + kappa x` over the unit simplex by projected
/// gradient descent with step `1 / (2 max b)`.
pub fn projected_gradient(b: &[f64], kappa: &[f64], iters: usize) -> (Vec<f64>, f64) {
    let q = b.len();
    let step = 0.5 / b.iter().cloned().fold(0.0, f64::max);
    let mut x = vec![1.0 / q as f64; q];
    for _ in 0..iters {
        let moved: Vec<f64> = (0..q)
            .map(|i| x[i] - step * (2.0 * b[i] * x[i] + kappa[i]))
            .collect();
        x = project_simplex(&moved);
    }
    let value = (0..q).map(|i| b[i] * x[i] * x[i] + kappa[i] * x[i]).sum();
    (x, value)
}

/// Minimum of `k f + b / k` over `k = 1..=q` by full scan; ties go to
/// the smaller `k`.
pub fn uniform_scan(f: f64, b: f64, q: usize) -> (usize, f64) {
    let mut best = (1, f + b);
    for k in 2..=q {
        let v = k as f64 * f + b / k as f64;
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}

/// Unit instance with unstructured costs: `b ~ s U(0.5, 5)`, `f ~ t U(0, 5)`.
pub fn scattered_instance(rng: &mut ChaCha8Rng, q: usize, s: f64, t: f64) -> Instance {
    let costs: Vec<(f64, f64)> = (0..q)
        .map(|_| {
            (
                t * rng.random_range(0.0..5.0),
                s * rng.random_range(0.5..5.0),
            )
        })
        .collect();
    Instance::from_costs(&costs).unwrap()
}

/// Seeded randomized class instance of size `q` with `s` and `t` drawn from
/// [`LEVELS`] and `u` from the supported perturbations.
pub fn mixed_instance(seed: u64, q: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = LEVELS[rng.random_range(0..3)];
    let t = LEVELS[rng.random_range(0..3)];
    let u = [0, 1, 2, 3, 5][rng.random_range(0..5)];
    generate_instance(&ClassSpec::random(q, s, t, u, seed)).unwrap()
}

/// Seeded unstructured instance of size `q`; dominated discs are common.
pub fn scattered_seeded(seed: u64, q: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = LEVELS[rng.random_range(0..3)];
    let t = LEVELS[rng.random_range(0..3)];
    scattered_instance(&mut rng, q, s, t)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
