mod common;

use nalgebra::{DMatrix, DVector};
use previewsafe::geometry::{lp, ConvexSet, HPolytope, Hyperbox, Interval};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::uniform;

/// `[-1, 1]^d` cut by random halfspaces that keep a ball around the origin.
fn random_polytope(rng: &mut ChaCha8Rng, d: usize, cuts: usize) -> HPolytope {
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        rows.push((e.clone(), uniform(rng, 0.5, 1.5)));
        e[k] = -1.0;
        rows.push((e, uniform(rng, 0.5, 1.5)));
    }
    for _ in 0..cuts {
        let a: Vec<f64> = (0..d).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-3 {
            rows.push((a, uniform(rng, 0.2, 1.0) * norm));
        }
    }
    HPolytope::from_rows(d, &rows).unwrap()
}

fn random_dir(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| uniform(rng, -1.0, 1.0))
}

/// Chebyshev center plus LP-extreme points in random directions.
fn sample_points(rng: &mut ChaCha8Rng, p: &HPolytope, count: usize) -> Vec<DVector<f64>> {
    let mut pts = vec![p.chebyshev().unwrap().1];
    for _ in 0..count {
        let r = p.maximize(&random_dir(rng, p.dim())).unwrap();
        if r.is_optimal() {
            pts.push(r.point);
        }
    }
    pts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_add_sub_roundtrip(lo in -5.0..5.0f64, w in 0.0..3.0f64, blo in -5.0..5.0f64, bw in 0.0..3.0f64) {
        let a = Interval::new(lo, lo + w);
        let b = Interval::new(blo, blo + bw);
        let (l, h) = ((a + b) - b).bounds().unwrap();
        prop_assert!((l - lo).abs() <= 1e-12 && (h - (lo + w)).abs() <= 1e-12);
    }

    #[test]
    fn erosion_reinflation(seed in any::<u64>(), d in 1usize..=3, k in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng, d, 3);
        let m = DMatrix::from_fn(d, k, |_, _| uniform(&mut rng, -1.0, 1.0));
        let s = Hyperbox::symmetric(k, uniform(&mut rng, 0.0, 0.2));
        let eroded = p.pontryagin_diff(&ConvexSet::Box(s.clone()), &m).unwrap();
        if !eroded.is_empty().unwrap() {
            for z in sample_points(&mut rng, &eroded, 8) {
                for v in s.vertices().unwrap() {
                    let moved = &z + &m * DVector::from_vec(v);
                    prop_assert!(p.contains_point(moved.as_slice(), 1e-7));
                }
            }
        }
    }

    #[test]
    fn projection_is_a_shadow(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng, d, 4);
        let keep: Vec<usize> = (0..d).filter(|_| rng.random::<bool>()).collect();
        let keep = if keep.is_empty() { vec![0] } else { keep };
        let proj = p.project(&keep).unwrap();
        for z in sample_points(&mut rng, &p, 8) {
            let y: Vec<f64> = keep.iter().map(|&i| z[i]).collect();
            prop_assert!(proj.contains_point(&y, 1e-7));
        }
        for _ in 0..6 {
            let c = random_dir(&mut rng, keep.len());
            let r = proj.maximize(&c).unwrap();
            prop_assert!(r.is_optimal());
            // the extreme point lifts: fix the kept coordinates and look for slack
            let mut rows: Vec<(Vec<f64>, f64)> = (0..p.n_rows())
                .map(|i| (p.row(i).iter().copied().collect(), p.h_vector()[i]))
                .collect();
            for (j, &i) in keep.iter().enumerate() {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                rows.push((e.clone(), r.point[j]));
                e[i] = -1.0;
                rows.push((e, -r.point[j]));
            }
            let a = DMatrix::from_fn(rows.len(), d, |i, j| rows[i].0[j]);
            let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
            let (t, _) = lp::max_slack(&a, &b).unwrap();
            prop_assert!(t >= -1e-7, "extreme point of the shadow does not lift (slack {t})");
        }
    }

    #[test]
    fn reduce_preserves_the_set(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng, d, 6);
        let r = p.reduce().unwrap();
        prop_assert!(r.n_rows() <= p.n_rows());
        prop_assert!(r.set_equal(&p).unwrap());
    }

    #[test]
    fn containment_is_a_partial_order(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_polytope(&mut rng, d, 2);
        let b = a.intersect(&random_polytope(&mut rng, d, 2)).unwrap();
        let c = b.intersect(&random_polytope(&mut rng, d, 2)).unwrap();
        for x in [&a, &b, &c] {
            prop_assert!(x.contains_set(x).unwrap());
        }
        prop_assert!(a.contains_set(&b).unwrap() && b.contains_set(&c).unwrap());
        prop_assert!(a.contains_set(&c).unwrap());
        // antisymmetry on a redundant rewrite of the same set
        let same = a.intersect(&a.reduce().unwrap()).unwrap();
        prop_assert!(a.contains_set(&same).unwrap() && same.contains_set(&a).unwrap());
        prop_assert!(a.set_equal(&same).unwrap());
        // unrelated triples
        let (x, y, z) = (random_polytope(&mut rng, d, 3), random_polytope(&mut rng, d, 3), random_polytope(&mut rng, d, 3));
        if x.contains_set(&y).unwrap() && y.contains_set(&z).unwrap() {
            prop_assert!(x.contains_set(&z).unwrap());
        }
        if x.contains_set(&y).unwrap() && y.contains_set(&x).unwrap() {
            prop_assert!(x.set_equal(&y).unwrap());
        }
    }

    #[test]
    fn convex_weights_reconstruct(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = common::random_box(&mut rng, d, 0.0, 2.0);
        let v: Vec<f64> = b.intervals().iter().map(|iv| {
            let (lo, hi) = iv.bounds().unwrap();
            uniform(&mut rng, lo, hi)
        }).collect();
        let w = b.convex_weights(&v).unwrap();
        prop_assert!(w.iter().all(|(_, a)| *a >= -1e-12));
        prop_assert!((w.iter().map(|(_, a)| a).sum::<f64>() - 1.0).abs() <= 1e-9);
        for k in 0..d {
            let r: f64 = w.iter().map(|(e, a)| a * e[k]).sum();
            prop_assert!((r - v[k]).abs() <= 1e-9);
        }
    }

    #[test]
    fn box_volume_is_the_width_product(widths in proptest::collection::vec(0.0..4.0f64, 0..6)) {
        let b = Hyperbox::from_bounds(&vec![0.0; widths.len()], &widths).unwrap();
        prop_assert_eq!(b.volume(), widths.iter().product::<f64>());
    }
}

#[test]
fn polytope_volume_matches_box() {
    let b = Hyperbox::from_bounds(&[-1.0, 0.0], &[1.0, 0.5]).unwrap();
    let v = b.to_hpolytope().volume(1, 50_000).unwrap();
    assert!((v - 1.0).abs() < 0.02);
}
