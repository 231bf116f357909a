mod common;

use std::sync::OnceLock;

use nalgebra::DVector;
use previewsafe::brunovsky::closed_form;
use previewsafe::geometry::{HPolytope, Hyperbox};
use previewsafe::simulation::{
    lane_keeping, linear_feedback, lqr_gain, riccati_step, rollout, sample_box, LaneConfig, LqrSpec, PreviewScenario,
    Supervisor,
};
use previewsafe::systems::augment;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_system, uniform, valid_brunovsky};

fn lane() -> &'static (LaneConfig, PreviewScenario) {
    static SETS: OnceLock<(LaneConfig, PreviewScenario)> = OnceLock::new();
    SETS.get_or_init(|| {
        let cfg = LaneConfig::shipped();
        let sc = PreviewScenario::compute(cfg.system().unwrap(), cfg.preview, cfg.growth_iterations, cfg.input_box())
            .unwrap();
        (cfg, sc)
    })
}

/// A point of `c` between its Chebyshev center and an LP-extreme point.
fn interior_point(rng: &mut ChaCha8Rng, c: &HPolytope) -> DVector<f64> {
    let center = c.chebyshev().unwrap().1;
    let dir = DVector::from_fn(c.dim(), |_, _| uniform(rng, -1.0, 1.0));
    let edge = c.maximize(&dir).unwrap().point;
    let t = uniform(rng, 0.0, 0.98);
    &center * (1.0 - t) + edge * t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn riccati_iterates_are_symmetric_psd(seed in any::<u64>(), n in 1usize..=4, p in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let aug = augment(&random_system(&mut rng, n), p).aug;
        let spec = LqrSpec::state_weighted(aug.n(), n, 1);
        let mut cost = spec.q.clone();
        for _ in 0..50 {
            cost = riccati_step(aug.a(), aug.b(), &spec.q, &spec.r, &cost).unwrap();
            prop_assert_eq!(&cost, &cost.transpose());
            let min = cost.clone().symmetric_eigen().eigenvalues.min();
            prop_assert!(min >= -1e-9 * cost.amax().max(1.0), "min eigenvalue {}", min);
        }
    }

    #[test]
    fn supervision_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, sc) = lane();
        let (with, without) = sc.supervisors().unwrap();
        let xi = interior_point(&mut rng, &sc.cio.result);
        let u = DVector::from_element(1, uniform(&mut rng, -2.0, 2.0));
        let once = with.supervise(&xi, &u).unwrap();
        prop_assert_eq!(&with.supervise(&xi, &once.u).unwrap().u, &once.u);
        let x = xi.rows(0, 4).into_owned();
        let once = without.supervise(&x, &u).unwrap();
        prop_assert_eq!(&without.supervise(&x, &once.u).unwrap().u, &once.u);
    }
}

#[test]
fn rollouts_are_deterministic() {
    let cfg = LaneConfig::shipped();
    let a = lane_keeping(&cfg, 5, 60, 9).unwrap();
    let b = lane_keeping(&cfg, 5, 60, 9).unwrap();
    assert_eq!(a.trace_preview.to_csv(), b.trace_preview.to_csv());
    assert_eq!(a.trace_no_preview, b.trace_no_preview);
}

#[test]
fn lane_keeping_runs_from_the_invariant_set_stay_safe() {
    let (_, sc) = lane();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut clean = 0;
    for run in 0..500 {
        let xi = interior_point(&mut rng, &sc.cio.result);
        let (preview, _) = sc.rollouts(&xi, 50, run).unwrap();
        if preview.steps.iter().all(|s| !s.admissible_empty) {
            clean += 1;
            assert!(preview.all_safe(), "run {run} unsafe at {:?}", preview.first_unsafe());
        }
    }
    assert_eq!(clean, 500);
}

#[test]
fn brunovsky_runs_from_the_invariant_set_stay_safe() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for run in 0..500 {
        let n = 1 + run % 3;
        let p = run % 4;
        let pr = valid_brunovsky(&mut rng, n, p);
        let c = closed_form(&pr).unwrap().to_hpolytope();
        let ps = pr.preview_system();
        let sup = Supervisor::new(&ps.aug, c.clone(), Hyperbox::symmetric(1, 10.0), p).unwrap();
        let gain = lqr_gain(&ps.aug, &LqrSpec::state_weighted(ps.aug.n(), n, 1)).unwrap();
        let xi = interior_point(&mut rng, &c);
        let x0 = xi.rows(0, n).into_owned();
        let mut script: Vec<DVector<f64>> = (0..p).map(|i| xi.rows(n + i * n, n).into_owned()).collect();
        while script.len() < 30 + p {
            script.push(sample_box(&mut rng, pr.dist_box()));
        }
        let tr = rollout(&pr.system(), p, &linear_feedback(gain), Some(&sup), &x0, &script, 30).unwrap();
        assert!(tr.steps.iter().all(|s| !s.admissible_empty), "run {run}");
        assert!(tr.all_safe(), "run {run} (n={n}, p={p}) unsafe at {:?}", tr.first_unsafe());
    }
}

#[test]
fn quiet_start_needs_no_supervision() {
    let (cfg, sc) = lane();
    let base = &sc.base;
    let gain = lqr_gain(base, &LqrSpec::state_weighted(4, 4, 1)).unwrap();
    let sup = Supervisor::new(base, sc.cmax0.result.clone(), cfg.input_box(), 0).unwrap();
    let x0 = DVector::from_column_slice(&[0.3, 0.0, 0.01, 0.0]);
    assert!(sc.cmax0.result.contains_point(x0.as_slice(), 0.0));
    let script = vec![DVector::zeros(1); 100];
    let tr = rollout(base, 0, &linear_feedback(gain), Some(&sup), &x0, &script, 100).unwrap();
    assert_eq!(tr.supervised_count(), 0);
    assert!(tr.all_safe());
    assert!(tr.x_final.iter().all(|v| v.abs() < 1e-3));
}

#[test]
fn traces_agree_when_neither_supervisor_acts() {
    let (_, sc) = lane();
    let xi = DVector::zeros(sc.aug.n());
    assert!(sc.seed_set.contains_point(xi.as_slice(), 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dbox = Hyperbox::symmetric(1, 0.002);
    let mut script = vec![DVector::zeros(1); sc.p];
    script.extend((0..100).map(|_| sample_box(&mut rng, &dbox)));
    let ctrl = linear_feedback(sc.nominal_gain().unwrap());
    let (with, without) = sc.supervisors().unwrap();
    let a = rollout(&sc.base, sc.p, &ctrl, Some(&with), &DVector::zeros(4), &script, 100).unwrap();
    let b = rollout(&sc.base, sc.p, &ctrl, Some(&without), &DVector::zeros(4), &script, 100).unwrap();
    assert_eq!(a.supervised_count() + b.supervised_count(), 0);
    let xs = |t: &previewsafe::simulation::Trace| t.steps.iter().map(|s| s.x.clone()).collect::<Vec<_>>();
    assert_eq!(xs(&a), xs(&b));
}

#[test]
fn gap_state_lies_between_the_sets() {
    let (cfg, sc) = lane();
    let demo = sc.simulate(cfg.horizon, 0).unwrap();
    assert!(sc.cio.result.contains_point(&demo.gap_state, 1e-9));
    assert!(!sc.seed_set.contains_point(&demo.gap_state, 1e-9));
    let csv = demo.trace_preview.to_csv();
    assert!(csv.starts_with("t,x1,x2,x3,x4,u_nom,u,d1,supervised,safe,adm_lo,adm_hi\n"));
    assert_eq!(csv.lines().count(), cfg.horizon + 1);
}

#[test]
fn lqr_on_lane_keeping_stabilizes() {
    let (_, sc) = lane();
    let k = sc.nominal_gain().unwrap();
    let closed = sc.aug.a() - sc.aug.b() * &k;
    assert!(previewsafe::simulation::spectral_radius(&closed) < 1.0);
    assert_eq!(k.shape(), (1, 9));
}
