//! Small systems with known answers, used as oracles and as named CLI cases.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConvexSet, HPolytope, Hyperbox, Interval};
use crate::systems::LinearSystem;

/// `x⁺ = a x + u + d` with `|x| ≤ r`, `|u| ≤ β`, `|d| ≤ γ` and preview `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarPreviewProblem {
    pub a: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r: f64,
    pub p: usize,
}

impl ScalarPreviewProblem {
    /// Requires `a > 1`, `r ≥ (β+γ)/(a-1)` and `a^{p-1} β ≥ γ`.
    pub fn new(a: f64, beta: f64, gamma: f64, r: f64, p: usize) -> Result<Self> {
        let prob = ScalarPreviewProblem { a, beta, gamma, r, p };
        prob.validate()?;
        Ok(prob)
    }

    fn validate(&self) -> Result<()> {
        let &ScalarPreviewProblem { a, beta, gamma, r, p } = self;
        if a.is_nan() || a <= 1.0 || beta < 0.0 || gamma < 0.0 {
            return Err(Error::InvalidParameters(format!(
                "need a > 1 and β, γ ≥ 0 (a = {a}, β = {beta}, γ = {gamma})"
            )));
        }
        if r < (beta + gamma) / (a - 1.0) {
            return Err(Error::InvalidParameters(format!("r = {r} is below (β+γ)/(a-1)")));
        }
        if a.powi(p as i32 - 1) * beta < gamma {
            return Err(Error::InvalidParameters(format!("a^(p-1) β < γ at p = {p}")));
        }
        Ok(())
    }

    pub fn with_preview(&self, p: usize) -> Result<Self> {
        Self::new(self.a, self.beta, self.gamma, self.r, p)
    }

    pub fn system(&self) -> LinearSystem {
        let safe = Hyperbox::from_bounds(&[-self.r, -self.beta], &[self.r, self.beta]).unwrap().to_hpolytope();
        LinearSystem::new(
            DMatrix::from_element(1, 1, self.a),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            ConvexSet::Box(Hyperbox::symmetric(1, self.gamma)),
            safe,
        )
        .expect("consistent dimensions")
    }
}

/// `C_max,p` of the scalar problem: `|d_i| ≤ γ` and
/// `|x + Σ_i w_i d_i| ≤ bound` with `w_i = a^{-i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarCmax {
    pub gamma: f64,
    pub bound: f64,
    pub weights: Vec<f64>,
}

pub fn scalar_cmax(prob: &ScalarPreviewProblem) -> Result<ScalarCmax> {
    prob.validate()?;
    let a = prob.a;
    let bound = (prob.beta - prob.gamma / a.powi(prob.p as i32)) / (a - 1.0);
    let weights = (1..=prob.p).map(|i| a.powi(-(i as i32))).collect();
    Ok(ScalarCmax { gamma: prob.gamma, bound, weights })
}

impl ScalarCmax {
    pub fn contains(&self, x: f64, ds: &[f64], tol: f64) -> bool {
        ds.len() == self.weights.len()
            && ds.iter().all(|d| d.abs() <= self.gamma + tol)
            && (x + ds.iter().zip(&self.weights).map(|(d, w)| d * w).sum::<f64>()).abs() <= self.bound + tol
    }

    /// H-form over `(x, d_1, …, d_p)`.
    pub fn to_hpolytope(&self) -> HPolytope {
        let p = self.weights.len();
        let mut rows = Vec::with_capacity(2 * p + 2);
        for i in 0..p {
            let mut r = vec![0.0; p + 1];
            r[i + 1] = 1.0;
            rows.push((r.clone(), self.gamma));
            r[i + 1] = -1.0;
            rows.push((r, self.gamma));
        }
        let mut r = vec![1.0];
        r.extend_from_slice(&self.weights);
        rows.push((r.clone(), self.bound));
        rows.push((r.iter().map(|v| -v).collect(), self.bound));
        HPolytope::from_rows(p + 1, &rows).expect("finite rows")
    }
}

/// State shadow of `C_max,p`, the collaborative invariant interval, and the
/// distance between their endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarProjection {
    pub proj: Interval,
    pub collaborative: Interval,
    pub gap: f64,
}

pub fn scalar_projection(prob: &ScalarPreviewProblem) -> Result<ScalarProjection> {
    prob.validate()?;
    let &ScalarPreviewProblem { a, beta, gamma, p, .. } = prob;
    let ap = a.powi(p as i32);
    Ok(ScalarProjection {
        proj: Interval::symmetric((beta + gamma - 2.0 * gamma / ap) / (a - 1.0)),
        collaborative: Interval::symmetric((beta + gamma) / (a - 1.0)),
        gap: 2.0 * gamma / (ap * (a - 1.0)),
    })
}

/// `b̄ = (a^p β - γ)/(a-1)`, the half-width of `{a^p x + Σ a^{p-i} d_i}` over
/// `C_max,p`.
pub fn auxiliary_bound(prob: &ScalarPreviewProblem) -> f64 {
    (prob.a.powi(prob.p as i32) * prob.beta - prob.gamma) / (prob.a - 1.0)
}

/// Checks `C_max,p × [-γ, γ] ⊊ C_max,p+1` with the polytope kernel.
pub fn scalar_strict_growth(prob: &ScalarPreviewProblem) -> Result<bool> {
    let small = scalar_cmax(prob)?.to_hpolytope();
    let big = scalar_cmax(&prob.with_preview(prob.p + 1)?)?.to_hpolytope();
    let lifted = small.product(&Hyperbox::symmetric(1, prob.gamma).to_hpolytope());
    Ok(big.contains_set(&lifted)? && !lifted.contains_set(&big)?)
}

/// Double integrator whose disturbance is multiplied by zero, with the
/// diagonal segment `{(s, s) : |s| ≤ 1}` as safe states and `D = [-1, 1]²`.
/// Returns the system and the seed `{(0, 0)} × D^p`.
pub fn example1_config(p: usize) -> (LinearSystem, HPolytope) {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let b = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
    let dist = ConvexSet::Box(Hyperbox::symmetric(2, 1.0));
    let safe = HPolytope::from_rows(
        3,
        &[
            (vec![1.0, -1.0, 0.0], 0.0),
            (vec![-1.0, 1.0, 0.0], 0.0),
            (vec![1.0, 0.0, 0.0], 1.0),
            (vec![-1.0, 0.0, 0.0], 1.0),
        ],
    )
    .expect("finite rows");
    let sys = LinearSystem::new(a, b, DMatrix::zeros(2, 2), dist.clone(), safe).expect("consistent");
    let origin = Hyperbox::symmetric(2, 0.0).to_hpolytope();
    (sys, origin.product(&dist.power(p)))
}

/// `x⁺ = u + d`, `D = [-5, 5]`, `S_xu = [-1, 1]²`.
pub fn example4_config() -> LinearSystem {
    LinearSystem::new(
        DMatrix::zeros(1, 1),
        DMatrix::identity(1, 1),
        DMatrix::identity(1, 1),
        ConvexSet::Box(Hyperbox::symmetric(1, 5.0)),
        Hyperbox::symmetric(2, 1.0).to_hpolytope(),
    )
    .expect("consistent")
}

/// The scalar problem after the input change `u = -a x + v`: `x⁺ = v + d`
/// with `S' = {(x, v) : |x| ≤ r, |-a x + v| ≤ β}`.
pub fn example5_config(prob: &ScalarPreviewProblem) -> (LinearSystem, HPolytope) {
    let safe = HPolytope::from_rows(
        2,
        &[
            (vec![1.0, 0.0], prob.r),
            (vec![-1.0, 0.0], prob.r),
            (vec![-prob.a, 1.0], prob.beta),
            (vec![prob.a, -1.0], prob.beta),
        ],
    )
    .expect("finite rows");
    let sys = LinearSystem::new(
        DMatrix::zeros(1, 1),
        DMatrix::identity(1, 1),
        DMatrix::identity(1, 1),
        ConvexSet::Box(Hyperbox::symmetric(1, prob.gamma)),
        safe.clone(),
    )
    .expect("consistent");
    (sys, safe)
}

/// Point in `ℝ^{1+p}` helper for tests and examples.
pub fn scalar_point(x: f64, ds: &[f64]) -> DVector<f64> {
    let mut v = vec![x];
    v.extend_from_slice(ds);
    DVector::from_vec(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariance::{method1, IterOptions};
    use crate::systems::augment;

    fn base(p: usize) -> ScalarPreviewProblem {
        ScalarPreviewProblem::new(2.0, 1.0, 1.0, 2.0, p).unwrap()
    }

    #[test]
    fn cmax_values() {
        let c1 = scalar_cmax(&base(1)).unwrap();
        assert_eq!(c1.bound, 0.5);
        assert_eq!(c1.weights, vec![0.5]);
        assert_eq!(scalar_cmax(&base(2)).unwrap().bound, 0.75);
        let free = ScalarPreviewProblem::new(2.0, 1.0, 0.0, 2.0, 0).unwrap();
        assert_eq!(scalar_cmax(&free).unwrap().bound, 1.0);
        assert!(ScalarPreviewProblem::new(2.0, 1.0, 1.0, 2.0, 0).is_err());
        assert!(ScalarPreviewProblem::new(0.5, 1.0, 1.0, 2.0, 3).is_err());
    }

    #[test]
    fn projections() {
        let pr = scalar_projection(&base(1)).unwrap();
        assert_eq!(pr.proj, Interval::symmetric(1.0));
        assert_eq!(pr.collaborative, Interval::symmetric(2.0));
        let far = scalar_projection(&base(40)).unwrap();
        assert!(far.proj.hi().unwrap() < 2.0 && far.proj.hi().unwrap() > 2.0 - 1e-9);
        for p in 1..6 {
            let g0 = scalar_projection(&base(p)).unwrap().gap;
            let g1 = scalar_projection(&base(p + 1)).unwrap().gap;
            assert!((g1 - g0 / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn growth() {
        assert!(scalar_strict_growth(&base(1)).unwrap());
        assert!(scalar_strict_growth(&base(2)).unwrap());
        let free = ScalarPreviewProblem::new(2.0, 1.0, 0.0, 2.0, 1).unwrap();
        assert!(!scalar_strict_growth(&free).unwrap());
    }

    #[test]
    fn auxiliary_image_is_symmetric_interval() {
        for p in 1..4 {
            let prob = base(p);
            let h = scalar_cmax(&prob).unwrap().to_hpolytope();
            let dir = DVector::from_iterator(p + 1, (0..=p).map(|i| prob.a.powi((p - i) as i32)));
            let hi = h.support(&dir).unwrap();
            let lo = -h.support(&-dir).unwrap();
            assert!((hi - auxiliary_bound(&prob)).abs() < 1e-9);
            assert!((lo + auxiliary_bound(&prob)).abs() < 1e-9);
        }
    }

    #[test]
    fn example5_matches_scalar() {
        let prob = base(1);
        let (sys, safe) = example5_config(&prob);
        assert!(safe.contains_point(&[0.0, 0.0], 0.0));
        let r = method1(&augment(&sys, 1).aug, &IterOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.result.set_equal(&scalar_cmax(&prob).unwrap().to_hpolytope()).unwrap());
    }

    #[test]
    fn example_configs() {
        let (sys, seed) = example1_config(2);
        assert_eq!(sys.n(), 2);
        assert_eq!(seed.dim(), 6);
        assert!(seed.contains_point(&[0.0, 0.0, 1.0, -1.0, 0.5, 0.5], 0.0));
        let e4 = example4_config();
        assert!(e4.is_safe(&[1.0], &[-1.0], 0.0));
    }
}
