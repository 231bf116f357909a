//! System models: base linear systems, the preview-augmented realization, the
//! disturbance-collaborative variant and Brunovsky chains.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexSet, HPolytope, Hyperbox, Interval};

/// `x⁺ = A x + B u + E d` with `d ∈ D` and `(x, u) ∈ S_xu`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    e: DMatrix<f64>,
    dist: ConvexSet,
    safe: HPolytope,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, e: DMatrix<f64>, dist: ConvexSet, safe: HPolytope) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!("A is {}x{}, must be square", n, a.ncols())));
        }
        if b.nrows() != n || e.nrows() != n {
            return Err(Error::DimensionMismatch(format!("A has {n} rows, B has {}, E has {}", b.nrows(), e.nrows())));
        }
        if dist.dim() != e.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "disturbance set has dimension {}, E has {} columns",
                dist.dim(),
                e.ncols()
            )));
        }
        if safe.dim() != n + b.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "safe set has dimension {}, expected n + m = {}",
                safe.dim(),
                n + b.ncols()
            )));
        }
        if dist.is_empty()? {
            return Err(Error::InvalidParameters("disturbance set is empty".into()));
        }
        Ok(LinearSystem { a, b, e, dist, safe })
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Input dimension.
    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    /// Disturbance dimension.
    pub fn l(&self) -> usize {
        self.e.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }

    pub fn dist(&self) -> &ConvexSet {
        &self.dist
    }

    /// `S_xu` over `(x, u)`.
    pub fn safe(&self) -> &HPolytope {
        &self.safe
    }

    /// `A x + B u + E d`.
    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>, d: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b * u + &self.e * d
    }

    /// Projection of `S_xu` onto the state coordinates.
    pub fn safe_states(&self) -> Result<HPolytope> {
        self.safe.project(&(0..self.n()).collect::<Vec<_>>())
    }

    /// Whether `(x, u) ∈ S_xu`.
    pub fn is_safe(&self, x: &[f64], u: &[f64], tol: f64) -> bool {
        let mut z = x.to_vec();
        z.extend_from_slice(u);
        self.safe.contains_point(&z, tol)
    }
}

/// The `p`-augmented realization with state `(x, d_1, …, d_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreviewSystem {
    pub base: LinearSystem,
    pub p: usize,
    pub aug: LinearSystem,
}

impl PreviewSystem {
    /// Safe set of the augmented system over `(x, d_1, …, d_p, u)`.
    pub fn aug_safe(&self) -> &HPolytope {
        self.aug.safe()
    }

    /// Augmented state dimension `n + p l`.
    pub fn dim(&self) -> usize {
        self.aug.n()
    }

    /// Stacks a state and a preview window into an augmented state.
    pub fn pack(&self, x: &DVector<f64>, preview: &[DVector<f64>]) -> DVector<f64> {
        assert_eq!(preview.len(), self.p, "preview window length");
        let mut v = x.as_slice().to_vec();
        for d in preview {
            v.extend_from_slice(d.as_slice());
        }
        DVector::from_vec(v)
    }
}

/// Builds the augmented system: `x⁺ = A x + B u + E d_1`, `d_i⁺ = d_{i+1}`,
/// `d_p⁺ = d`. For `p = 0` the base system is returned unchanged.
pub fn augment(sys: &LinearSystem, p: usize) -> PreviewSystem {
    if p == 0 {
        return PreviewSystem { base: sys.clone(), p, aug: sys.clone() };
    }
    let (n, m, l) = (sys.n(), sys.m(), sys.l());
    let na = n + p * l;
    let mut a = DMatrix::zeros(na, na);
    a.view_mut((0, 0), (n, n)).copy_from(&sys.a);
    a.view_mut((0, n), (n, l)).copy_from(&sys.e);
    for i in 0..p.saturating_sub(1) {
        let row = n + i * l;
        a.view_mut((row, row + l), (l, l)).fill_with_identity();
    }
    let mut b = DMatrix::zeros(na, m);
    b.view_mut((0, 0), (n, m)).copy_from(&sys.b);
    let mut e = DMatrix::zeros(na, l);
    e.view_mut((n + (p - 1) * l, 0), (l, l)).fill_with_identity();

    // (x, u) rows of S_xu go on the x and u columns; D rows on each d block
    let s = sys.safe();
    let mut sa = DMatrix::zeros(s.n_rows(), na + m);
    let sh = s.h_matrix();
    sa.view_mut((0, 0), (s.n_rows(), n)).copy_from(&sh.view((0, 0), (s.n_rows(), n)));
    sa.view_mut((0, na), (s.n_rows(), m)).copy_from(&sh.view((0, n), (s.n_rows(), m)));
    let mut safe = HPolytope::from_normalized(sa, s.h_vector().clone());
    let dp = sys.dist.to_hpolytope();
    for i in 0..p {
        safe = safe.intersect(&dp.embed(na + m, n + i * l)).expect("same dimension");
    }
    let aug = LinearSystem { a, b, e, dist: sys.dist.clone(), safe };
    PreviewSystem { base: sys.clone(), p, aug }
}

/// The disturbance re-typed as a second input: `x⁺ = A x + B u + E u_d`,
/// with `(x, u, u_d) ∈ S_xu × D` and no disturbance left.
#[derive(Debug, Clone, PartialEq)]
pub struct CollaborativeSystem {
    pub sys: LinearSystem,
}

impl CollaborativeSystem {
    pub fn safe(&self) -> &HPolytope {
        self.sys.safe()
    }
}

pub fn collaborative(sys: &LinearSystem) -> CollaborativeSystem {
    let (n, m, l) = (sys.n(), sys.m(), sys.l());
    let mut b = DMatrix::zeros(n, m + l);
    b.view_mut((0, 0), (n, m)).copy_from(&sys.b);
    b.view_mut((0, m), (n, l)).copy_from(&sys.e);
    let safe = sys.safe.product(&sys.dist.to_hpolytope());
    let zero = ConvexSet::Box(Hyperbox::new(vec![Interval::point(0.0); l]));
    CollaborativeSystem { sys: LinearSystem { a: sys.a.clone(), b, e: DMatrix::zeros(n, l), dist: zero, safe } }
}

/// Upper shift matrix of size `n`.
pub fn shift_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
}

/// `x⁺ = Ā x + B̄ u + d` with the shift-register pair `(Ā, B̄ = e_n)` and
/// safe set `box × ℝ` (no rows on the input).
pub fn make_brunovsky(n: usize, dist: ConvexSet, bx: &Hyperbox) -> Result<LinearSystem> {
    if n == 0 {
        return Err(Error::InvalidParameters("Brunovsky chain needs n ≥ 1".into()));
    }
    if bx.dim() != n {
        return Err(Error::DimensionMismatch(format!("box has dimension {}, expected {n}", bx.dim())));
    }
    let mut b = DMatrix::zeros(n, 1);
    b[(n - 1, 0)] = 1.0;
    let safe = bx.to_hpolytope().embed(n + 1, 0);
    LinearSystem::new(shift_matrix(n), b, DMatrix::identity(n, n), dist, safe)
}

/// Single-input Brunovsky chain with box safe set `𝐁`, disturbance set `D`
/// and preview `p`. `dist_box` is the smallest box containing `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrunovskyProblem {
    n: usize,
    bx: Hyperbox,
    dist: ConvexSet,
    dist_box: Hyperbox,
    p: usize,
}

impl BrunovskyProblem {
    pub fn new(bx: Hyperbox, dist: ConvexSet, p: usize) -> Result<Self> {
        let n = bx.dim();
        if n == 0 {
            return Err(Error::InvalidParameters("Brunovsky chain needs n ≥ 1".into()));
        }
        if dist.dim() != n {
            return Err(Error::DimensionMismatch(format!("disturbance dimension {} vs n = {n}", dist.dim())));
        }
        let dist_box = dist.bounding_box()?;
        Ok(BrunovskyProblem { n, bx, dist, dist_box, p })
    }

    /// `𝐁 = Π[-1, 1]` and `D = Π[-c, c]`.
    pub fn symmetric(n: usize, c: f64, p: usize) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::InvalidParameters(format!("disturbance bound {c} must be nonnegative")));
        }
        Self::new(Hyperbox::symmetric(n, 1.0), ConvexSet::Box(Hyperbox::symmetric(n, c)), p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `min(p, n)`.
    pub fn p_bar(&self) -> usize {
        self.p.min(self.n)
    }

    pub fn state_box(&self) -> &Hyperbox {
        &self.bx
    }

    pub fn dist(&self) -> &ConvexSet {
        &self.dist
    }

    pub fn dist_box(&self) -> &Hyperbox {
        &self.dist_box
    }

    /// Same chain with a different preview.
    pub fn with_preview(&self, p: usize) -> Self {
        BrunovskyProblem { p, ..self.clone() }
    }

    pub fn system(&self) -> LinearSystem {
        make_brunovsky(self.n, self.dist.clone(), &self.bx).expect("validated on construction")
    }

    pub fn preview_system(&self) -> PreviewSystem {
        augment(&self.system(), self.p)
    }
}

/// A chain driven through `Ē`: `x⁺ = Ā x + B̄ u + Ē d`, `d ∈ D_v`, together
/// with the equivalent problem whose disturbance set is `Ē D_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EVariant {
    pub ebar: DMatrix<f64>,
    pub dist_v: ConvexSet,
    pub problem: BrunovskyProblem,
}

impl EVariant {
    /// The original `Σ_v` (before substituting `Ē D_v`).
    pub fn system(&self) -> LinearSystem {
        let n = self.problem.n;
        let mut b = DMatrix::zeros(n, 1);
        b[(n - 1, 0)] = 1.0;
        let safe = self.problem.bx.to_hpolytope().embed(n + 1, 0);
        LinearSystem::new(shift_matrix(n), b, self.ebar.clone(), self.dist_v.clone(), safe).expect("validated")
    }
}

/// Builds the problem for `x⁺ = Ā x + B̄ u + Ē d`, `d ∈ D_v`, by replacing
/// the disturbance set with its exact image `Ē D_v`.
///
/// Boxes mapped by matrices with at most one nonzero per row and per column
/// have a box image. Every other image is obtained by projecting the graph
/// `{(d, z) : z = Ē d, d ∈ D_v}` and checked facet by facet.
pub fn evariant(n: usize, ebar: &DMatrix<f64>, dist_v: &ConvexSet, bx: &Hyperbox, p: usize) -> Result<EVariant> {
    if ebar.nrows() != n || ebar.ncols() != dist_v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Ē is {}x{}, expected {n}x{}",
            ebar.nrows(),
            ebar.ncols(),
            dist_v.dim()
        )));
    }
    let image = image_set(ebar, dist_v)?;
    let problem = BrunovskyProblem::new(bx.clone(), image, p)?;
    Ok(EVariant { ebar: ebar.clone(), dist_v: dist_v.clone(), problem })
}

fn image_set(ebar: &DMatrix<f64>, dist_v: &ConvexSet) -> Result<ConvexSet> {
    let (n, l) = ebar.shape();
    if n == l && *ebar == DMatrix::identity(n, n) {
        return Ok(dist_v.clone());
    }
    let nnz_rows = (0..n).all(|i| ebar.row(i).iter().filter(|v| **v != 0.0).count() <= 1);
    let nnz_cols = (0..l).all(|j| ebar.column(j).iter().filter(|v| **v != 0.0).count() <= 1);
    if let (true, true, Some(b)) = (nnz_rows, nnz_cols, dist_v.as_box()) {
        let ivs = (0..n)
            .map(|i| match (0..l).find(|&j| ebar[(i, j)] != 0.0) {
                None => Interval::point(0.0),
                Some(j) => {
                    let (lo, hi) = b.interval(j).bounds().expect("nonempty disturbance");
                    let (x, y) = (ebar[(i, j)] * lo, ebar[(i, j)] * hi);
                    Interval::new(x.min(y), x.max(y))
                }
            })
            .collect();
        return Ok(ConvexSet::Box(Hyperbox::new(ivs)));
    }

    // graph polytope over (d, z): d ∈ D_v, z - Ē d = 0
    let dp = dist_v.to_hpolytope().embed(l + n, 0);
    let mut eq = DMatrix::zeros(2 * n, l + n);
    for i in 0..n {
        for j in 0..l {
            eq[(2 * i, j)] = -ebar[(i, j)];
            eq[(2 * i + 1, j)] = ebar[(i, j)];
        }
        eq[(2 * i, l + i)] = 1.0;
        eq[(2 * i + 1, l + i)] = -1.0;
    }
    let graph = dp.intersect(&HPolytope::new(eq, DVector::zeros(2 * n))?)?;
    let image = graph.project(&(l..l + n).collect::<Vec<_>>())?;
    image.bounding_box().map_err(|_| Error::ImageNotExact)?;
    for i in 0..image.n_rows() {
        let dir = ebar.transpose() * image.row(i);
        let s = dist_v.support(&dir).map_err(|_| Error::ImageNotExact)?;
        if (s - image.h_vector()[i]).abs() > 1e-7 {
            return Err(Error::ImageNotExact);
        }
    }
    Ok(ConvexSet::Poly(image))
}

/// JSON system description:
/// `{"A": [[…]], "B": [[…]], "E": [[…]], "disturbance": box|hpoly, "safe": hpoly, "preview": p}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemConfig {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "E")]
    pub e: Vec<Vec<f64>>,
    pub disturbance: ConvexSet,
    pub safe: HPolytope,
    #[serde(default)]
    pub preview: usize,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Config(format!("{what} has ragged rows")));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl SystemConfig {
    pub fn from_system(sys: &LinearSystem, preview: usize) -> Self {
        SystemConfig {
            a: to_rows(&sys.a),
            b: to_rows(&sys.b),
            e: to_rows(&sys.e),
            disturbance: sys.dist.clone(),
            safe: sys.safe.clone(),
            preview,
        }
    }

    pub fn to_system(&self) -> Result<LinearSystem> {
        let a = from_rows(&self.a, "A")?;
        let n = a.nrows();
        let b = from_rows(&self.b, "B")?;
        let mut e = from_rows(&self.e, "E")?;
        if e.nrows() == 0 && n > 0 {
            e = DMatrix::zeros(n, self.disturbance.dim());
        }
        LinearSystem::new(a, b, e, self.disturbance.clone(), self.safe.clone())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
