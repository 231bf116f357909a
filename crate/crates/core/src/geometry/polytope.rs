use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::lp::{self, LpResult, LpStatus, EPS_LP};
use super::{ConvexSet, Hyperbox, Interval};
use crate::error::{Error, Result};

/// Tolerance for set comparison on unit-norm rows.
pub const EPS_SET: f64 = 1e-6;

/// A row is dropped by [`HPolytope::reduce`] when relaxing it moves the set by
/// at most this much.
const EPS_REDUNDANT: f64 = 1e-9;

/// Rows with norm below this are treated as `0·z ≤ b`.
const EPS_ZERO_ROW: f64 = 1e-12;

/// Coefficients below this (on unit-norm rows) are treated as zero during
/// variable elimination.
const EPS_COEFF: f64 = 1e-12;

/// Convex polyhedron `{z : Hz ≤ h}` with unit-norm rows.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl HPolytope {
    /// Builds `{z : a z ≤ b}`, scaling every row to unit norm. Zero rows are
    /// dropped when satisfied and turn the set into the canonical empty set
    /// otherwise.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!("H has {} rows but h has {} entries", a.nrows(), b.len())));
        }
        if a.iter().chain(b.iter()).any(|v| v.is_nan()) {
            return Err(Error::InvalidParameters("NaN in polytope data".into()));
        }
        Ok(Self::normalized(a, b))
    }

    fn normalized(a: DMatrix<f64>, b: DVector<f64>) -> Self {
        let dim = a.ncols();
        let mut rows: Vec<usize> = Vec::with_capacity(a.nrows());
        let mut norms = Vec::with_capacity(a.nrows());
        for i in 0..a.nrows() {
            let nrm = a.row(i).norm();
            if nrm <= EPS_ZERO_ROW {
                if b[i] < -EPS_LP {
                    return HPolytope::empty(dim);
                }
                continue;
            }
            if b[i] == f64::INFINITY {
                continue;
            }
            rows.push(i);
            norms.push(nrm);
        }
        let mut na = DMatrix::zeros(rows.len(), dim);
        let mut nb = DVector::zeros(rows.len());
        for (r, (&i, &nrm)) in rows.iter().zip(&norms).enumerate() {
            for j in 0..dim {
                na[(r, j)] = a[(i, j)] / nrm;
            }
            nb[r] = b[i] / nrm;
        }
        HPolytope { a: na, b: nb }
    }

    /// Trusts the caller that rows already have unit norm.
    pub(crate) fn from_normalized(a: DMatrix<f64>, b: DVector<f64>) -> Self {
        debug_assert_eq!(a.nrows(), b.len());
        HPolytope { a, b }
    }

    /// Convenience constructor from `(row, offset)` pairs.
    pub fn from_rows(dim: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let mut a = DMatrix::zeros(rows.len(), dim);
        let mut b = DVector::zeros(rows.len());
        for (i, (r, off)) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {dim}", r.len())));
            }
            for (j, &v) in r.iter().enumerate() {
                a[(i, j)] = v;
            }
            b[i] = *off;
        }
        Self::new(a, b)
    }

    /// Canonical empty set `{z₀ ≤ -1, -z₀ ≤ -1}` (or `{0 ≤ -1}` in dimension 0).
    pub fn empty(dim: usize) -> Self {
        if dim == 0 {
            return HPolytope { a: DMatrix::zeros(1, 0), b: DVector::from_element(1, -1.0) };
        }
        let mut a = DMatrix::zeros(2, dim);
        a[(0, 0)] = 1.0;
        a[(1, 0)] = -1.0;
        HPolytope { a, b: DVector::from_element(2, -1.0) }
    }

    /// All of `ℝ^dim` (no rows).
    pub fn universe(dim: usize) -> Self {
        HPolytope { a: DMatrix::zeros(0, dim), b: DVector::zeros(0) }
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn n_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn h_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn h_vector(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.a.row(i).transpose()
    }

    /// `max dir·z` over the set.
    pub fn maximize(&self, dir: &DVector<f64>) -> Result<LpResult> {
        lp::maximize(dir, &self.a, &self.b)
    }

    /// `sup_{z ∈ P} dir·z`.
    pub fn support(&self, dir: &DVector<f64>) -> Result<f64> {
        let r = self.maximize(dir)?;
        match r.status {
            LpStatus::Optimal => Ok(r.objective),
            LpStatus::Unbounded => Err(Error::Unbounded),
            LpStatus::Infeasible => Err(Error::EmptySet),
        }
    }

    /// Largest inscribed-ball radius (capped at 1) and its center.
    pub fn chebyshev(&self) -> Result<(f64, DVector<f64>)> {
        lp::max_slack(&self.a, &self.b)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.chebyshev()?.0 < -EPS_LP)
    }

    pub fn contains_point(&self, z: &[f64], tol: f64) -> bool {
        if z.len() != self.dim() {
            return false;
        }
        (0..self.n_rows()).all(|i| {
            let s: f64 = self.a.row(i).iter().zip(z).map(|(a, x)| a * x).sum();
            s <= self.b[i] + tol
        })
    }

    /// Stacks the rows of both sets.
    pub fn intersect(&self, other: &HPolytope) -> Result<HPolytope> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "intersecting dimension {} with {}",
                self.dim(),
                other.dim()
            )));
        }
        let a = stack(&self.a, &other.a);
        let mut b = DVector::zeros(self.n_rows() + other.n_rows());
        b.rows_mut(0, self.n_rows()).copy_from(&self.b);
        b.rows_mut(self.n_rows(), other.n_rows()).copy_from(&other.b);
        Ok(HPolytope { a, b })
    }

    /// Cartesian product `self × other` (block-diagonal rows).
    pub fn product(&self, other: &HPolytope) -> HPolytope {
        let (r1, d1) = self.a.shape();
        let (r2, d2) = other.a.shape();
        let mut a = DMatrix::zeros(r1 + r2, d1 + d2);
        a.view_mut((0, 0), (r1, d1)).copy_from(&self.a);
        a.view_mut((r1, d1), (r2, d2)).copy_from(&other.a);
        let mut b = DVector::zeros(r1 + r2);
        b.rows_mut(0, r1).copy_from(&self.b);
        b.rows_mut(r1, r2).copy_from(&other.b);
        HPolytope { a, b }
    }

    /// Re-expresses the rows in `ℝ^total`, placing the current coordinates at
    /// `offset..offset+dim`.
    pub fn embed(&self, total: usize, offset: usize) -> HPolytope {
        assert!(offset + self.dim() <= total, "embedding out of range");
        let mut a = DMatrix::zeros(self.n_rows(), total);
        a.view_mut((0, offset), (self.n_rows(), self.dim())).copy_from(&self.a);
        HPolytope { a, b: self.b.clone() }
    }

    /// `{z : M z + t ∈ P}`.
    pub fn preimage(&self, m: &DMatrix<f64>, t: Option<&DVector<f64>>) -> Result<HPolytope> {
        if m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "preimage map has {} rows, polytope dimension {}",
                m.nrows(),
                self.dim()
            )));
        }
        let a = &self.a * m;
        let b = match t {
            Some(t) => &self.b - &self.a * t,
            None => self.b.clone(),
        };
        Self::new(a, b)
    }

    /// `{z : H_i z ≤ h_i - σ_S(Mᵀ H_iᵀ)}`, the set of points `z` with
    /// `z + M s ∈ P` for every `s ∈ S`.
    pub fn pontryagin_diff(&self, s: &ConvexSet, m: &DMatrix<f64>) -> Result<HPolytope> {
        if m.nrows() != self.dim() || m.ncols() != s.dim() {
            return Err(Error::DimensionMismatch(format!(
                "erosion map is {}x{}, expected {}x{}",
                m.nrows(),
                m.ncols(),
                self.dim(),
                s.dim()
            )));
        }
        let mut b = self.b.clone();
        for i in 0..self.n_rows() {
            let dir = m.transpose() * self.row(i);
            if dir.iter().all(|v| *v == 0.0) {
                continue;
            }
            match s.support(&dir) {
                Ok(v) => b[i] -= v,
                Err(Error::Unbounded) => return Ok(HPolytope::empty(self.dim())),
                Err(e) => return Err(e),
            }
        }
        Ok(HPolytope { a: self.a.clone(), b })
    }

    /// Drops every row whose removal leaves the set unchanged.
    ///
    /// Parallel duplicates are merged first; the remaining rows are tested one
    /// at a time against the rows still kept, so of two identical facets only
    /// one is ever discarded. Empty input reduces to [`HPolytope::empty`].
    pub fn reduce(&self) -> Result<HPolytope> {
        let dim = self.dim();
        if self.n_rows() == 0 {
            return Ok(self.clone());
        }
        let merged = self.merge_parallel();
        if merged.is_empty()? {
            return Ok(HPolytope::empty(dim));
        }
        let mut keep = vec![true; merged.n_rows()];

        if merged.n_rows() > 3 * dim + 10 {
            if let Some(bbox) = merged.bounding_box_raw()? {
                for (i, k) in keep.iter_mut().enumerate() {
                    let s: f64 = bbox
                        .iter()
                        .enumerate()
                        .map(|(j, &(lo, hi))| {
                            let c = merged.a[(i, j)];
                            if c >= 0.0 {
                                c * hi
                            } else {
                                c * lo
                            }
                        })
                        .sum();
                    if s.is_finite() && s <= merged.b[i] - EPS_REDUNDANT {
                        *k = false;
                    }
                }
                // the box came from the whole row set; at least the rows that
                // define it must survive
                if keep.iter().all(|k| !k) {
                    keep.iter_mut().for_each(|k| *k = true);
                }
            }
        }

        for i in 0..merged.n_rows() {
            if !keep[i] {
                continue;
            }
            let others: Vec<usize> = (0..merged.n_rows()).filter(|&r| keep[r] && r != i).collect();
            let mut a = DMatrix::zeros(others.len() + 1, dim);
            let mut b = DVector::zeros(others.len() + 1);
            for (r, &src) in others.iter().enumerate() {
                a.set_row(r, &merged.a.row(src));
                b[r] = merged.b[src];
            }
            a.set_row(others.len(), &merged.a.row(i));
            b[others.len()] = merged.b[i] + 1.0;
            let res = lp::maximize(&merged.row(i), &a, &b)?;
            if res.is_optimal() && res.objective <= merged.b[i] + EPS_REDUNDANT {
                keep[i] = false;
            }
        }
        Ok(merged.select_rows(&keep))
    }

    fn select_rows(&self, keep: &[bool]) -> HPolytope {
        let idx: Vec<usize> = (0..self.n_rows()).filter(|&i| keep[i]).collect();
        let mut a = DMatrix::zeros(idx.len(), self.dim());
        let mut b = DVector::zeros(idx.len());
        for (r, &i) in idx.iter().enumerate() {
            a.set_row(r, &self.a.row(i));
            b[r] = self.b[i];
        }
        HPolytope { a, b }
    }

    /// Merges rows with (numerically) identical normals, keeping the tightest.
    fn merge_parallel(&self) -> HPolytope {
        const GRID: f64 = 1e9;
        let mut best: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut order = Vec::new();
        for i in 0..self.n_rows() {
            let key: Vec<i64> = self.a.row(i).iter().map(|v| (v * GRID).round() as i64).collect();
            match best.get_mut(&key) {
                Some(j) => {
                    if self.b[i] < self.b[*j] {
                        *j = i;
                    }
                }
                None => {
                    best.insert(key.clone(), i);
                    order.push(key);
                }
            }
        }
        let mut keep = vec![false; self.n_rows()];
        for k in order {
            keep[best[&k]] = true;
        }
        self.select_rows(&keep)
    }

    /// Per-coordinate extent, with infinities where unbounded; `None` if empty.
    fn bounding_box_raw(&self) -> Result<Option<Vec<(f64, f64)>>> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut e = DVector::zeros(dim);
            e[j] = 1.0;
            let hi = self.maximize(&e)?;
            e[j] = -1.0;
            let lo = self.maximize(&e)?;
            let bound = |r: &LpResult| match r.status {
                LpStatus::Optimal => Some(r.objective),
                LpStatus::Unbounded => Some(f64::INFINITY),
                LpStatus::Infeasible => None,
            };
            match (bound(&lo), bound(&hi)) {
                (Some(l), Some(h)) => out.push((-l, h)),
                _ => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// Smallest box containing the set.
    pub fn bounding_box(&self) -> Result<Hyperbox> {
        let raw = self.bounding_box_raw()?.ok_or(Error::EmptySet)?;
        if raw.iter().any(|(l, h)| !l.is_finite() || !h.is_finite()) {
            return Err(Error::Unbounded);
        }
        Ok(Hyperbox::new(raw.into_iter().map(|(l, h)| Interval::new(l, h.max(l))).collect()))
    }

    /// One Fourier–Motzkin step: eliminates coordinate `var` (the result
    /// still lives in the same ambient dimension, with a zero column).
    fn eliminate_in_place(&self, var: usize) -> HPolytope {
        let dim = self.dim();
        let (mut zero, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..self.n_rows() {
            let c = self.a[(i, var)];
            if c > EPS_COEFF {
                pos.push(i);
            } else if c < -EPS_COEFF {
                neg.push(i);
            } else {
                zero.push(i);
            }
        }
        let count = zero.len() + pos.len() * neg.len();
        let mut a = DMatrix::zeros(count, dim);
        let mut b = DVector::zeros(count);
        let mut r = 0;
        for &i in &zero {
            a.set_row(r, &self.a.row(i));
            a[(r, var)] = 0.0;
            b[r] = self.b[i];
            r += 1;
        }
        for &p in &pos {
            let cp = self.a[(p, var)];
            for &q in &neg {
                let cq = -self.a[(q, var)];
                for j in 0..dim {
                    a[(r, j)] = cq * self.a[(p, j)] + cp * self.a[(q, j)];
                }
                a[(r, var)] = 0.0;
                b[r] = cq * self.b[p] + cp * self.b[q];
                r += 1;
            }
        }
        Self::normalized(a, b)
    }

    /// Shadow onto the coordinates `keep` (in the given order) by
    /// Fourier–Motzkin elimination, reducing after every step.
    pub fn project(&self, keep: &[usize]) -> Result<HPolytope> {
        let dim = self.dim();
        if keep.iter().any(|&k| k >= dim) {
            return Err(Error::DimensionMismatch(format!("projection index out of range for dimension {dim}")));
        }
        if self.is_empty()? {
            return Ok(HPolytope::empty(keep.len()));
        }
        let mut drop: Vec<usize> = (0..dim).filter(|j| !keep.contains(j)).collect();
        let mut cur = self.reduce()?;
        while !drop.is_empty() {
            // cheapest variable first: minimizes the number of generated rows
            let (pick, _) = drop
                .iter()
                .enumerate()
                .map(|(slot, &j)| {
                    let p = (0..cur.n_rows()).filter(|&i| cur.a[(i, j)] > EPS_COEFF).count();
                    let n = (0..cur.n_rows()).filter(|&i| cur.a[(i, j)] < -EPS_COEFF).count();
                    (slot, p * n)
                })
                .min_by_key(|&(_, cost)| cost)
                .expect("nonempty");
            let var = drop.swap_remove(pick);
            cur = cur.eliminate_in_place(var).reduce()?;
        }
        let mut a = DMatrix::zeros(cur.n_rows(), keep.len());
        for (c, &k) in keep.iter().enumerate() {
            a.set_column(c, &cur.a.column(k));
        }
        Ok(HPolytope::normalized(a, cur.b))
    }

    /// `inner ⊆ self`, decided facet by facet with tolerance [`EPS_SET`].
    pub fn contains_set(&self, inner: &HPolytope) -> Result<bool> {
        self.contains_set_tol(inner, EPS_SET)
    }

    pub fn contains_set_tol(&self, inner: &HPolytope, tol: f64) -> Result<bool> {
        if self.dim() != inner.dim() {
            return Err(Error::DimensionMismatch(format!(
                "containment between dimension {} and {}",
                self.dim(),
                inner.dim()
            )));
        }
        if inner.is_empty()? {
            return Ok(true);
        }
        for i in 0..self.n_rows() {
            match inner.support(&self.row(i)) {
                Ok(v) if v <= self.b[i] + tol => {}
                Ok(_) | Err(Error::Unbounded) => return Ok(false),
                Err(Error::EmptySet) => return Ok(true),
                Err(e) => return Err(e),
            }
        }
        Ok(true)
    }

    pub fn set_equal(&self, other: &HPolytope) -> Result<bool> {
        Ok(self.contains_set(other)? && other.contains_set(self)?)
    }

    /// Volume: hit-or-miss Monte Carlo inside the bounding box,
    /// deterministic in `seed`. Flat and empty sets have volume 0.
    pub fn volume(&self, seed: u64, samples: usize) -> Result<f64> {
        if self.is_empty()? {
            return Ok(0.0);
        }
        let bbox = self.bounding_box()?;
        let widths: Vec<f64> = bbox.intervals().iter().map(Interval::width).collect();
        if widths.iter().any(|&w| w <= 1e-12) {
            return Ok(0.0);
        }
        // equality pairs make the set flat even if the box is not
        if self.chebyshev()?.0 <= 1e-9 {
            return Ok(0.0);
        }
        let lo = bbox.lo().expect("nonempty");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = vec![0.0; self.dim()];
        let mut hits = 0usize;
        for _ in 0..samples {
            for k in 0..z.len() {
                z[k] = lo[k] + widths[k] * rng.random::<f64>();
            }
            if self.contains_point(&z, 0.0) {
                hits += 1;
            }
        }
        Ok(bbox.volume() * hits as f64 / samples.max(1) as f64)
    }
}

fn stack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    #[serde(rename = "H")]
    a: Vec<Vec<f64>>,
    h: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
}

// `{"H": [[row]...], "h": [...]}`; a set with no rows also carries `"dim"`.
impl Serialize for HPolytope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let a = (0..self.n_rows()).map(|i| self.a.row(i).iter().copied().collect()).collect();
        PolyJson { a, h: self.b.iter().copied().collect(), dim: (self.n_rows() == 0).then_some(self.dim()) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPolytope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        let dim = match (raw.a.first(), raw.dim) {
            (Some(r), _) => r.len(),
            (None, Some(d)) => d,
            (None, None) => return Err(serde::de::Error::custom("polytope without rows needs \"dim\"")),
        };
        let rows: Vec<(Vec<f64>, f64)> = raw.a.into_iter().zip(raw.h).collect();
        HPolytope::from_rows(dim, &rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> HPolytope {
        Hyperbox::symmetric(2, 1.0).to_hpolytope()
    }

    fn triangle() -> HPolytope {
        HPolytope::from_rows(2, &[(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0), (vec![1.0, 1.0], 1.0)]).unwrap()
    }

    #[test]
    fn rows_are_normalized() {
        let p = HPolytope::from_rows(2, &[(vec![3.0, 4.0], 10.0)]).unwrap();
        assert!((p.row(0).norm() - 1.0).abs() < 1e-15);
        assert!((p.h_vector()[0] - 2.0).abs() < 1e-15);
        let e = HPolytope::from_rows(1, &[(vec![0.0], -1.0)]).unwrap();
        assert!(e.is_empty().unwrap());
    }

    #[test]
    fn support_examples() {
        let d = DVector::from_column_slice(&[1.0, 1.0]);
        assert!((triangle().support(&d).unwrap() - 1.0).abs() < 1e-9);
        assert!((unit_square().support(&DVector::from_column_slice(&[1.0, 0.0])).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(HPolytope::empty(2).support(&d), Err(Error::EmptySet));
        let half = HPolytope::from_rows(2, &[(vec![1.0, 0.0], 0.0)]).unwrap();
        assert_eq!(half.support(&d), Err(Error::Unbounded));
    }

    #[test]
    fn erosion_examples() {
        let x = Hyperbox::symmetric(1, 1.0).to_hpolytope();
        let s = ConvexSet::Box(Hyperbox::symmetric(1, 0.2));
        let e = x.pontryagin_diff(&s, &DMatrix::identity(1, 1)).unwrap();
        assert!(e.set_equal(&Hyperbox::symmetric(1, 0.8).to_hpolytope()).unwrap());

        let big = ConvexSet::Box(Hyperbox::symmetric(1, 5.0));
        assert!(x.pontryagin_diff(&big, &DMatrix::identity(1, 1)).unwrap().is_empty().unwrap());

        let sq = unit_square();
        let s2 = ConvexSet::Box(Hyperbox::symmetric(2, 0.2));
        let z = sq.pontryagin_diff(&s2, &DMatrix::zeros(2, 2)).unwrap();
        assert!(z.set_equal(&sq).unwrap());
    }

    #[test]
    fn reduce_examples() {
        let p = HPolytope::from_rows(1, &[(vec![1.0], 1.0), (vec![1.0], 2.0)]).unwrap().reduce().unwrap();
        assert_eq!(p.n_rows(), 1);
        assert!((p.h_vector()[0] - 1.0).abs() < 1e-15);

        let sq = unit_square();
        let dup = sq.intersect(&sq).unwrap().intersect(&sq).unwrap();
        assert_eq!(dup.reduce().unwrap().n_rows(), 4);

        // a redundant rotated facet
        let rot = HPolytope::from_rows(2, &[(vec![1.0, 1.0], 2.0), (vec![1.0, -1.0], 2.5)]).unwrap();
        let with = sq.intersect(&rot).unwrap();
        let r = with.reduce().unwrap();
        assert_eq!(r.n_rows(), 4);
        assert!(r.set_equal(&sq).unwrap());
        assert!(r.reduce().unwrap() == r);
    }

    #[test]
    fn emptiness_and_containment() {
        let e = HPolytope::from_rows(1, &[(vec![1.0], -1.0), (vec![-1.0], -1.0)]).unwrap();
        assert!(e.is_empty().unwrap());
        assert!(e.reduce().unwrap().is_empty().unwrap());
        let inner = Hyperbox::symmetric(1, 0.8).to_hpolytope();
        let outer = Hyperbox::symmetric(1, 1.0).to_hpolytope();
        assert!(outer.contains_set(&inner).unwrap());
        assert!(!inner.contains_set(&outer).unwrap());
        assert!(inner.contains_set(&e).unwrap());
        assert!(!e.contains_set(&inner).unwrap());
    }

    #[test]
    fn projection_examples() {
        // |x| ≤ 1, |u| ≤ 1, x + u = 0  →  x ∈ [-1, 1]
        let p = HPolytope::from_rows(
            2,
            &[
                (vec![1.0, 0.0], 1.0),
                (vec![-1.0, 0.0], 1.0),
                (vec![0.0, 1.0], 1.0),
                (vec![0.0, -1.0], 1.0),
                (vec![1.0, 1.0], 0.0),
                (vec![-1.0, -1.0], 0.0),
            ],
        )
        .unwrap();
        let s = p.project(&[0]).unwrap();
        assert!(s.set_equal(&Hyperbox::symmetric(1, 1.0).to_hpolytope()).unwrap());

        let cube = Hyperbox::from_bounds(&[0.0; 3], &[1.0; 3]).unwrap().to_hpolytope();
        let sq = cube.project(&[0, 1]).unwrap();
        assert!(sq.set_equal(&Hyperbox::from_bounds(&[0.0; 2], &[1.0; 2]).unwrap().to_hpolytope()).unwrap());

        // reordering of kept coordinates
        let bx = Hyperbox::from_bounds(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap().to_hpolytope();
        let sw = bx.project(&[2, 0]).unwrap();
        assert!(sw.set_equal(&Hyperbox::from_bounds(&[2.0, 0.0], &[5.0, 1.0]).unwrap().to_hpolytope()).unwrap());
    }

    #[test]
    fn volumes() {
        let v = triangle().volume(7, 1_000_000).unwrap();
        assert!((v - 0.5).abs() < 0.01, "{v}");
        assert_eq!(HPolytope::empty(2).volume(1, 100).unwrap(), 0.0);
        let seg = HPolytope::from_rows(
            2,
            &[(vec![1.0, -1.0], 0.0), (vec![-1.0, 1.0], 0.0), (vec![1.0, 0.0], 1.0), (vec![-1.0, 0.0], 1.0)],
        )
        .unwrap();
        assert_eq!(seg.volume(3, 1000).unwrap(), 0.0);
        let half = HPolytope::from_rows(1, &[(vec![1.0], 0.0)]).unwrap();
        assert_eq!(half.volume(1, 10), Err(Error::Unbounded));
        assert_eq!(triangle().volume(42, 5000).unwrap(), triangle().volume(42, 5000).unwrap());
    }

    #[test]
    fn json_shape() {
        let p = Hyperbox::symmetric(1, 2.0).to_hpolytope();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"H":[[1.0],[-1.0]],"h":[2.0,2.0]}"#);
        let back: HPolytope = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let u: HPolytope = serde_json::from_str(&serde_json::to_string(&HPolytope::universe(3)).unwrap()).unwrap();
        assert_eq!(u.dim(), 3);
    }
}
