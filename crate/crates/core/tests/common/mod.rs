#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secidx::model::{self, Realization, StructuralModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> (StructuralModel, Option<Realization>) {
    model::load_model(fixture(name)).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_x: usize,
    pub max_u: usize,
    pub max_sensors: usize,
}

pub const SMALL: Shape = Shape {
    max_x: 6,
    max_u: 3,
    max_sensors: 4,
};

/// Random structure with distinct actuator targets and protected sensors
/// listed last.
pub fn random_model(rng: &mut impl Rng, shape: Shape) -> StructuralModel {
    let n_x = rng.gen_range(1..=shape.max_x);
    let n_u = rng.gen_range(1..=shape.max_u.min(n_x));
    let targets = sample(rng, n_x, n_u).into_vec();
    let density = rng.gen_range(0.2..0.55);
    let mut pattern = Vec::new();
    for i in 0..n_x {
        for j in 0..n_x {
            if rng.gen_bool(density) {
                pattern.push((i, j));
            }
        }
    }
    let n_s = rng.gen_range(0..=shape.max_sensors);
    let n_e = if rng.gen_bool(0.6) { 0 } else { rng.gen_range(0..=n_s) };
    let sensors: Vec<(usize, bool)> = (0..n_s)
        .map(|l| (rng.gen_range(0..n_x), l >= n_s - n_e))
        .collect();
    StructuralModel::new(n_x, pattern, targets, sensors).unwrap()
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Random realization with `A` scaled to spectral radius at most 0.9.
pub fn stable_realization(m: &StructuralModel, seed: u64) -> Realization {
    let mut r = model::random_realization(m, seed);
    let rho = spectral_radius(&r.a);
    if rho > 0.9 {
        r.a *= 0.9 / rho;
    }
    r
}

/// Random placement instance over abstract X-sets.
pub fn random_instance(rng: &mut impl Rng) -> secidx::placement::PlacementInstance {
    use std::collections::BTreeSet;
    let n_x = rng.gen_range(2..=8);
    let n_u = rng.gen_range(1..=4);
    let x_sets: Vec<BTreeSet<usize>> = (0..n_u)
        .map(|_| (0..n_x).filter(|_| rng.gen_bool(0.35)).collect())
        .collect();
    let n_c = rng.gen_range(1..=10);
    let candidates = (0..n_c).map(|_| rng.gen_range(0..n_x)).collect();
    let k = (0..n_u).map(|_| rng.gen_range(0..=2)).collect();
    let u_p: Vec<usize> = (0..n_u).filter(|_| rng.gen_bool(0.7)).collect();
    let k_max = rng.gen_range(0..=3);
    secidx::placement::PlacementInstance::new(n_x, x_sets, candidates, k, u_p, k_max).unwrap()
}
