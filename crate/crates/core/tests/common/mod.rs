#![allow(dead_code)]

use nalgebra::DMatrix;
use previewsafe::brunovsky::nonempty_ineq;
use previewsafe::casestudies::{example1_config, example4_config, example5_config, ScalarPreviewProblem};
use previewsafe::geometry::{ConvexSet, Hyperbox, Interval};
use previewsafe::systems::{BrunovskyProblem, LinearSystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const MASTER_SEEDS: [u64; 3] = [7, 42, 2024];

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn random_box(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Hyperbox {
    Hyperbox::new((0..dim).map(|_| Interval::new(-uniform(rng, lo, hi), uniform(rng, lo, hi))).collect())
}

/// Any Brunovsky problem with random box bounds, nonempty or not.
pub fn random_brunovsky(rng: &mut ChaCha8Rng, n: usize, p: usize) -> BrunovskyProblem {
    let bx = random_box(rng, n, 0.5, 2.0);
    let scale = uniform(rng, 0.0, 0.6);
    let dist = Hyperbox::new(
        (0..n)
            .map(|_| {
                let c = uniform(rng, -0.1, 0.1) * scale;
                let w = uniform(rng, 0.0, 1.0) * scale;
                Interval::new(c - w, c + w)
            })
            .collect(),
    );
    BrunovskyProblem::new(bx, ConvexSet::Box(dist), p).expect("valid problem")
}

/// A Brunovsky problem with a nonempty invariant set.
pub fn valid_brunovsky(rng: &mut ChaCha8Rng, n: usize, p: usize) -> BrunovskyProblem {
    loop {
        let pr = random_brunovsky(rng, n, p);
        if nonempty_ineq(&pr) {
            return pr;
        }
    }
}

/// Small random system with one input, one disturbance and a box safe set.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize) -> LinearSystem {
    let a = DMatrix::from_fn(n, n, |_, _| uniform(rng, -1.2, 1.2));
    let b = DMatrix::from_fn(n, 1, |_, _| uniform(rng, -1.0, 1.0));
    let e = DMatrix::from_fn(n, 1, |_, _| uniform(rng, -0.5, 0.5));
    let w = uniform(rng, 0.0, 0.3);
    let safe = random_box(rng, n + 1, 0.5, 2.0).to_hpolytope();
    LinearSystem::new(a, b, e, ConvexSet::Box(Hyperbox::symmetric(1, w)), safe).expect("consistent")
}

pub fn scalar_problem(p: usize) -> ScalarPreviewProblem {
    ScalarPreviewProblem::new(2.0, 1.0, 1.0, 2.0, p).expect("valid scalar problem")
}

/// The case-study systems, by name.
pub fn case_systems() -> Vec<(&'static str, LinearSystem)> {
    vec![
        ("example1", example1_config(0).0),
        ("scalar", scalar_problem(1).system()),
        ("example4", example4_config()),
        ("example5", example5_config(&scalar_problem(1)).0),
        ("brunovsky", BrunovskyProblem::symmetric(2, 0.1, 0).unwrap().system()),
    ]
}
