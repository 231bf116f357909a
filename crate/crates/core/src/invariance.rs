//! Controlled predecessor, fixed-point iterations and derived set bounds.

use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConvexSet, HPolytope, Interval};
use crate::systems::{augment, collaborative, LinearSystem};

/// Default cap on Method 1 iterations.
pub const MAX_ITER: usize = 200;

/// Iterates with more rows than this (after reduction) abort the run.
pub const ROW_LIMIT: usize = 5000;

/// Default fixed-point tolerance.
///
/// Tighter than [`crate::geometry::EPS_SET`]: iterations that converge only geometrically
/// stop within `tol` of their limit, and callers compare the result with
/// `EPS_SET` afterwards.
pub const FIXED_POINT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub row_limit: usize,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions { max_iter: MAX_ITER, tol: FIXED_POINT_TOL, row_limit: ROW_LIMIT }
    }
}

impl IterOptions {
    pub fn with_max_iter(max_iter: usize) -> Self {
        IterOptions { max_iter, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub result: HPolytope,
    pub iterations: usize,
    pub converged: bool,
    pub per_step_rows: Vec<usize>,
}

/// `{x : ∃u, (x,u) ∈ S_xu, A x + B u + E d ∈ X ∀ d ∈ D}`.
pub fn pre(sys: &LinearSystem, x: &HPolytope) -> Result<HPolytope> {
    let (n, m) = (sys.n(), sys.m());
    check_dim(x, n)?;
    let eroded = x.pontryagin_diff(sys.dist(), sys.e())?;
    if eroded.is_empty()? {
        return Ok(HPolytope::empty(n));
    }
    let mut ab = DMatrix::zeros(n, n + m);
    ab.view_mut((0, 0), (n, n)).copy_from(sys.a());
    ab.view_mut((0, n), (n, m)).copy_from(sys.b());
    let pulled = eroded.preimage(&ab, None)?;
    let joint = pulled.intersect(sys.safe())?;
    joint.project(&(0..n).collect::<Vec<_>>())
}

fn check_dim(x: &HPolytope, n: usize) -> Result<()> {
    if x.dim() != n {
        return Err(Error::DimensionMismatch(format!("set has dimension {}, state dimension is {n}", x.dim())));
    }
    Ok(())
}

fn guard(x: &HPolytope, opts: &IterOptions) -> Result<()> {
    if x.n_rows() > opts.row_limit {
        return Err(Error::RowBlowup { rows: x.n_rows(), limit: opts.row_limit });
    }
    Ok(())
}

/// Outer iteration `X_0 = PROJ_x(S_xu)`, `X_k = Pre(X_{k-1}) ∩ X_{k-1}`.
///
/// Stops at a fixed point (mutual containment within `opts.tol`) or after
/// `opts.max_iter` steps; in the latter case `converged` is false.
pub fn method1(sys: &LinearSystem, opts: &IterOptions) -> Result<IterationReport> {
    let mut cur = sys.safe_states()?;
    let mut rows = vec![cur.n_rows()];
    guard(&cur, opts)?;
    for k in 1..=opts.max_iter.max(1) {
        if cur.is_empty()? {
            let result = HPolytope::empty(sys.n());
            return Ok(IterationReport { result, iterations: k - 1, converged: true, per_step_rows: rows });
        }
        let next = pre(sys, &cur)?.intersect(&cur)?.reduce()?;
        rows.push(next.n_rows());
        guard(&next, opts)?;
        debug!("method 1: step {k}, {} rows", next.n_rows());
        let fixed = next.contains_set_tol(&cur, opts.tol)?;
        cur = next;
        if fixed {
            if cur.is_empty()? {
                cur = HPolytope::empty(sys.n());
            }
            return Ok(IterationReport { result: cur, iterations: k, converged: true, per_step_rows: rows });
        }
    }
    Ok(IterationReport { result: cur, iterations: opts.max_iter.max(1), converged: false, per_step_rows: rows })
}

/// Inner iteration from a controlled invariant seed: `X_k = Pre(X_{k-1})`,
/// for at most `k_max` steps. Every iterate is controlled invariant.
pub fn method2(sys: &LinearSystem, seed: &HPolytope, k_max: usize, opts: &IterOptions) -> Result<IterationReport> {
    check_dim(seed, sys.n())?;
    if !is_invariant(sys, seed)? {
        return Err(Error::SeedNotInvariant);
    }
    let mut cur = seed.reduce()?;
    let mut rows = vec![cur.n_rows()];
    for k in 1..=k_max {
        let next = pre(sys, &cur)?;
        rows.push(next.n_rows());
        guard(&next, opts)?;
        debug!("method 2: step {k}, {} rows", next.n_rows());
        let fixed = cur.contains_set_tol(&next, opts.tol)?;
        cur = next;
        if fixed {
            return Ok(IterationReport { result: cur, iterations: k, converged: true, per_step_rows: rows });
        }
    }
    Ok(IterationReport { result: cur, iterations: k_max, converged: false, per_step_rows: rows })
}

/// `C ⊆ PROJ_x(S_xu)` and `C ⊆ Pre(C)`; the empty set is invariant.
pub fn is_invariant(sys: &LinearSystem, c: &HPolytope) -> Result<bool> {
    check_dim(c, sys.n())?;
    if c.is_empty()? {
        return Ok(true);
    }
    Ok(sys.safe_states()?.contains_set(c)? && pre(sys, c)?.contains_set(c)?)
}

/// Affine description `G_u u ≤ r - G_x x` of the admissible inputs for a
/// fixed target set; building it once makes repeated queries cheap.
#[derive(Debug, Clone)]
pub struct AdmissibleMap {
    gu: DMatrix<f64>,
    gx: DMatrix<f64>,
    r: DVector<f64>,
}

impl AdmissibleMap {
    pub fn new(sys: &LinearSystem, c: &HPolytope) -> Result<Self> {
        let (n, m) = (sys.n(), sys.m());
        check_dim(c, n)?;
        let eroded = c.pontryagin_diff(sys.dist(), sys.e())?;
        let (hc, hs) = (eroded.h_matrix(), sys.safe().h_matrix());
        let (rc, rs) = (hc.nrows(), hs.nrows());
        let mut gu = DMatrix::zeros(rc + rs, m);
        let mut gx = DMatrix::zeros(rc + rs, n);
        gu.view_mut((0, 0), (rc, m)).copy_from(&(hc * sys.b()));
        gx.view_mut((0, 0), (rc, n)).copy_from(&(hc * sys.a()));
        gu.view_mut((rc, 0), (rs, m)).copy_from(&hs.view((0, n), (rs, m)));
        gx.view_mut((rc, 0), (rs, n)).copy_from(&hs.view((0, 0), (rs, n)));
        let mut r = DVector::zeros(rc + rs);
        r.rows_mut(0, rc).copy_from(eroded.h_vector());
        r.rows_mut(rc, rs).copy_from(sys.safe().h_vector());
        Ok(AdmissibleMap { gu, gx, r })
    }

    pub fn input_dim(&self) -> usize {
        self.gu.ncols()
    }

    /// Admissible inputs at `x` as an H-polytope in `u`.
    pub fn at(&self, x: &DVector<f64>) -> Result<HPolytope> {
        HPolytope::new(self.gu.clone(), &self.r - &self.gx * x)
    }

    /// Admissible inputs at `x` for a scalar input.
    pub fn interval_at(&self, x: &DVector<f64>) -> Interval {
        assert_eq!(self.input_dim(), 1, "interval form needs a scalar input");
        let rhs = &self.r - &self.gx * x;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..rhs.len() {
            let g = self.gu[(i, 0)];
            if g.abs() <= 1e-12 {
                if rhs[i] < -1e-9 {
                    return Interval::Empty;
                }
            } else if g > 0.0 {
                hi = hi.min(rhs[i] / g);
            } else {
                lo = lo.max(rhs[i] / g);
            }
        }
        Interval::new(lo, hi)
    }
}

/// `{u : (x,u) ∈ S_xu, A x + B u + E d ∈ C ∀ d ∈ D}`.
pub fn admissible_inputs(sys: &LinearSystem, c: &HPolytope, x: &DVector<f64>) -> Result<HPolytope> {
    AdmissibleMap::new(sys, c)?.at(x)
}

/// `C × D^extra`.
pub fn lift(c: &HPolytope, dist: &ConvexSet, extra: usize) -> HPolytope {
    if extra == 0 {
        return c.clone();
    }
    c.product(&dist.power(extra))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sandwich {
    pub inner: HPolytope,
    pub outer: HPolytope,
    /// Low-preview and collaborative fixed points before lifting.
    pub inner_base: HPolytope,
    pub outer_base: HPolytope,
    pub contained: bool,
}

/// `C_max,p_low × D^{p-p_low} ⊆ C_max,p ⊆ C_max,co × D^p`.
pub fn sandwich(sys: &LinearSystem, p_low: usize, p: usize, opts: &IterOptions) -> Result<Sandwich> {
    if p_low >= p {
        return Err(Error::InvalidParameters(format!("need p_low < p, got {p_low} and {p}")));
    }
    let low = method1(&augment(sys, p_low).aug, opts)?;
    let co = method1(&collaborative(sys).sys, opts)?;
    let inner = lift(&low.result, sys.dist(), p - p_low);
    let outer = lift(&co.result, sys.dist(), p);
    let contained = outer.contains_set(&inner)?;
    Ok(Sandwich { inner, outer, inner_base: low.result, outer_base: co.result, contained })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreviewGain {
    pub inner_vol: f64,
    pub outer_vol: f64,
    pub gap: f64,
}

/// Volumes of the two bounds above. The `D` factors are accounted for
/// exactly (boxes) or by Monte Carlo (polytopes) separately from the base
/// sets, so only low-dimensional sets are ever sampled.
pub fn preview_gain(
    sys: &LinearSystem,
    p_low: usize,
    p: usize,
    seed: u64,
    samples: usize,
    opts: &IterOptions,
) -> Result<PreviewGain> {
    let sw = sandwich(sys, p_low, p, opts)?;
    let dvol = match sys.dist() {
        ConvexSet::Box(b) => b.volume(),
        ConvexSet::Poly(q) => q.volume(seed ^ 0x5eed, samples)?,
    };
    let inner_vol = sw.inner_base.volume(seed, samples)? * dvol.powi((p - p_low) as i32);
    let outer_vol = sw.outer_base.volume(seed, samples)? * dvol.powi(p as i32);
    Ok(PreviewGain { inner_vol, outer_vol, gap: outer_vol - inner_vol })
}
