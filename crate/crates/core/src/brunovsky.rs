//! Closed-form results for single-input Brunovsky chains with box safe sets.
//!
//! All indices in this module's public records are 1-based, matching the
//! usual mathematical statement: `x_k` is the `k`-th state, `d_{i,k}` is the
//! `k`-th entry of the `i`-th previewed disturbance.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::geometry::{ConvexSet, HPolytope, Hyperbox, Interval, VERTEX_CAP};
use crate::invariance::{lift, method1, IterOptions};
use crate::systems::{collaborative, evariant, shift_matrix, BrunovskyProblem, EVariant, LinearSystem};

const MEMBER_TOL: f64 = 1e-9;

fn c_lo(pr: &BrunovskyProblem, i: usize) -> f64 {
    pr.dist_box().interval(i - 1).lo().expect("nonempty disturbance")
}

fn c_hi(pr: &BrunovskyProblem, i: usize) -> f64 {
    pr.dist_box().interval(i - 1).hi().expect("nonempty disturbance")
}

/// `Σ_{i=lo}^{hi} f(i)`, zero when `lo > hi`.
fn ssum(lo: i64, hi: i64, f: impl Fn(usize) -> f64) -> f64 {
    if lo > hi {
        return 0.0;
    }
    (lo..=hi).map(|i| f(i as usize)).sum()
}

/// `b̂_k = b_k - Σ_{i=k}^{n-p̄} c_i` for `k = 1..n` (index `k-1`).
pub fn hat_b(pr: &BrunovskyProblem) -> Vec<Interval> {
    let n = pr.n() as i64;
    let top = n - pr.p_bar() as i64;
    (1..=pr.n())
        .map(|k| match pr.state_box().interval(k - 1).bounds() {
            None => Interval::Empty,
            Some((b1, b2)) => {
                let lo = b1 - ssum(k as i64, top, |i| c_lo(pr, i));
                let hi = b2 - ssum(k as i64, top, |i| c_hi(pr, i));
                Interval::new(lo, hi)
            }
        })
        .collect()
}

/// `𝐁_{d,p̄} = Π_{k=n-p̄+1}^{n} [c_{k,1}, c_{k,2}]`.
pub fn vertex_box(pr: &BrunovskyProblem) -> Hyperbox {
    pr.dist_box().slice(pr.n() - pr.p_bar()..pr.n())
}

/// Places a point `v ∈ 𝐁_{d,p̄}` into a preview window: `d_{i,n-i+1} = v_{p̄-i+1}`
/// for `i = 1..p̄`, every other entry zero. Returns `p` vectors of length `n`.
pub fn vertex_to_preview(n: usize, p: usize, v: &[f64]) -> Vec<DVector<f64>> {
    let pb = p.min(n);
    assert_eq!(v.len(), pb, "vertex has p̄ coordinates");
    let mut ds = vec![DVector::zeros(n); p];
    for i in 1..=pb {
        ds[i - 1][n - i] = v[pb - i];
    }
    ds
}

/// Inverse of [`vertex_to_preview`]: `v = (d_{p̄,n-p̄+1}, …, d_{2,n-1}, d_{1,n})`.
pub fn preview_to_vertex(n: usize, p: usize, ds: &[DVector<f64>]) -> Vec<f64> {
    let pb = p.min(n);
    (1..=pb).map(|j| ds[pb - j][n - pb + j - 1]).collect()
}

fn check_preview(pr: &BrunovskyProblem, ds: &[DVector<f64>]) -> Result<()> {
    if ds.len() != pr.p() || ds.iter().any(|d| d.len() != pr.n()) {
        return Err(Error::DimensionMismatch(format!(
            "expected {} previewed disturbances of length {}",
            pr.p(),
            pr.n()
        )));
    }
    Ok(())
}

/// Inputs that keep every future state in `𝐁` for all unpreviewed
/// disturbances: `∩_{K=1}^{n} ([b̂_{n-K+1}] - Σ_{i=0}^{min(K,p)-1} d_{i+1,n-i})`.
pub fn safe_input_interval(pr: &BrunovskyProblem, ds: &[DVector<f64>]) -> Result<Interval> {
    check_preview(pr, ds)?;
    Ok(input_interval(pr, &hat_b(pr), ds))
}

fn input_interval(pr: &BrunovskyProblem, hb: &[Interval], ds: &[DVector<f64>]) -> Interval {
    let n = pr.n();
    Interval::intersect_all((1..=n).map(|kk| {
        let shift: f64 = (0..kk.min(pr.p())).map(|i| ds[i][n - i - 1]).sum();
        hb[n - kk].shift(-shift)
    }))
}

/// Nonemptiness by enumerating the corners of `𝐁_{d,p̄}`.
pub fn nonempty_vertex(pr: &BrunovskyProblem) -> Result<bool> {
    let vb = vertex_box(pr);
    let verts = vb.vertices_capped(VERTEX_CAP)?;
    let hb = hat_b(pr);
    Ok(verts.iter().all(|v| {
        let ds = vertex_to_preview(pr.n(), pr.p(), v);
        !input_interval(pr, &hb, &ds).is_empty()
    }))
}

/// Nonemptiness by the `n²` pairwise inequalities.
pub fn nonempty_ineq(pr: &BrunovskyProblem) -> bool {
    if pr.state_box().is_empty() {
        return false;
    }
    let n = pr.n() as i64;
    let q = n - pr.p() as i64;
    let b1 = |k: i64| pr.state_box().interval(k as usize - 1).lo().expect("nonempty");
    let b2 = |k: i64| pr.state_box().interval(k as usize - 1).hi().expect("nonempty");
    let c1 = |i: usize| c_lo(pr, i);
    let c2 = |i: usize| c_hi(pr, i);
    const SLACK: f64 = 1e-12;
    for j in 1..=n {
        for k in 1..=n {
            let lhs = b1(j) - b2(k);
            let rhs = if j == k {
                ssum(k, q, |i| c1(i) - c2(i))
            } else if j < k {
                ssum(j, q, c1) - ssum(k, q, c2) + ssum(j.max(q + 1), (k - 1).max(q), c1)
            } else {
                ssum(j, q, c1) - ssum(k, q, c2) - ssum(k.max(q + 1), (j - 1).max(q), c2)
            };
            if lhs > rhs + SLACK {
                return false;
            }
        }
    }
    true
}

/// One constraint `x_k + Σ_{(i,r) ∈ dcoords} d_{i,r} ∈ bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub k: usize,
    pub j: usize,
    pub dcoords: Vec<(usize, usize)>,
    pub bound: Interval,
}

/// The maximal controlled invariant set `C_p` of the augmented chain:
/// `x ∈ 𝐁`, `d_i ∈ D`, and every [`Record`].
#[derive(Debug, Clone, PartialEq)]
pub struct BrunovskyInvariant {
    pub problem: BrunovskyProblem,
    pub records: Vec<Record>,
}

#[derive(Serialize)]
struct InvariantJson<'a> {
    n: usize,
    p: usize,
    #[serde(rename = "box")]
    bx: &'a Hyperbox,
    dist: &'a ConvexSet,
    dist_box: &'a Hyperbox,
    records: &'a [Record],
}

impl Serialize for BrunovskyInvariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InvariantJson {
            n: self.problem.n(),
            p: self.problem.p(),
            bx: self.problem.state_box(),
            dist: self.problem.dist(),
            dist_box: self.problem.dist_box(),
            records: &self.records,
        }
        .serialize(s)
    }
}

/// Builds `C_p`; fails with `EmptyInvariant` when the chain admits no
/// nonempty controlled invariant set.
pub fn closed_form(pr: &BrunovskyProblem) -> Result<BrunovskyInvariant> {
    if !nonempty_ineq(pr) {
        return Err(Error::EmptyInvariant);
    }
    let (n, p) = (pr.n(), pr.p());
    let mut records = Vec::new();
    for k in 2..=n {
        for j in 1..k {
            let dcoords = (1..=(k - j).min(p)).map(|i| (i, k - i)).collect();
            let unseen = Interval::sum((p + 1..=k - j).map(|i| pr.dist_box().interval(k - i - 1)));
            let bound = pr.state_box().interval(j - 1) - unseen;
            records.push(Record { k, j, dcoords, bound });
        }
    }
    Ok(BrunovskyInvariant { problem: pr.clone(), records })
}

impl BrunovskyInvariant {
    /// Whether `(x, d_1, …, d_p) ∈ C_p`.
    pub fn contains(&self, x: &[f64], ds: &[DVector<f64>]) -> bool {
        let pr = &self.problem;
        if x.len() != pr.n() || ds.len() != pr.p() || ds.iter().any(|d| d.len() != pr.n()) {
            return false;
        }
        if !pr.state_box().contains(x, MEMBER_TOL) {
            return false;
        }
        if !ds.iter().all(|d| pr.dist().contains(d.as_slice(), MEMBER_TOL)) {
            return false;
        }
        self.records.iter().all(|r| {
            let s = x[r.k - 1] + r.dcoords.iter().map(|&(i, c)| ds[i - 1][c - 1]).sum::<f64>();
            r.bound.contains(s, MEMBER_TOL)
        })
    }

    /// H-form over `(x, d_1, …, d_p) ∈ ℝ^{n + np}`.
    pub fn to_hpolytope(&self) -> HPolytope {
        let pr = &self.problem;
        let (n, p) = (pr.n(), pr.p());
        let dim = n + n * p;
        let mut poly = pr.state_box().to_hpolytope().embed(dim, 0);
        let dh = pr.dist().to_hpolytope();
        for i in 0..p {
            poly = poly.intersect(&dh.embed(dim, n + i * n)).expect("same dimension");
        }
        let mut a = DMatrix::zeros(2 * self.records.len(), dim);
        let mut b = DVector::zeros(2 * self.records.len());
        for (r, rec) in self.records.iter().enumerate() {
            let (lo, hi) = rec.bound.bounds().unwrap_or((1.0, -1.0));
            let mut row = vec![0.0; dim];
            row[rec.k - 1] = 1.0;
            for &(i, c) in &rec.dcoords {
                row[n + (i - 1) * n + c - 1] += 1.0;
            }
            for (col, v) in row.iter().enumerate() {
                a[(2 * r, col)] = *v;
                a[(2 * r + 1, col)] = -*v;
            }
            b[2 * r] = hi;
            b[2 * r + 1] = -lo;
        }
        let recs = HPolytope::new(a, b).expect("finite rows");
        poly.intersect(&recs).expect("same dimension")
    }
}

/// Preview-only feedback: the input is a convex combination of fixed inputs
/// chosen at the corners of `𝐁_{d,p̄}`.
#[derive(Debug, Clone)]
pub struct PreviewController {
    problem: BrunovskyProblem,
    vbox: Hyperbox,
    table: Vec<(Vec<f64>, f64)>,
}

impl PreviewController {
    /// Precomputes the midpoint of the safe-input interval at every corner.
    pub fn new(pr: &BrunovskyProblem) -> Result<Self> {
        let vbox = vertex_box(pr);
        let hb = hat_b(pr);
        let table = vbox
            .vertices()?
            .into_iter()
            .map(|v| {
                let ds = vertex_to_preview(pr.n(), pr.p(), &v);
                let mid = input_interval(pr, &hb, &ds).midpoint().ok_or(Error::EmptyInvariant)?;
                Ok((v, mid))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreviewController { problem: pr.clone(), vbox, table })
    }

    pub fn input(&self, ds: &[DVector<f64>]) -> Result<f64> {
        check_preview(&self.problem, ds)?;
        let v = preview_to_vertex(self.problem.n(), self.problem.p(), ds);
        let w = self.vbox.convex_weights(&v)?;
        // weights come in corner order, matching the table
        Ok(w.iter().zip(&self.table).map(|((_, a), (_, u))| a * u).sum())
    }
}

/// [`PreviewController`] for a single query.
pub fn controller_g(pr: &BrunovskyProblem, ds: &[DVector<f64>]) -> Result<f64> {
    PreviewController::new(pr)?.input(ds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Collapse {
    pub c_n: BrunovskyInvariant,
    pub verified: bool,
}

/// For `p > n`, checks `C_p = C_n × D^{p-n}`.
pub fn collapse(pr: &BrunovskyProblem) -> Result<Collapse> {
    let n = pr.n();
    if pr.p() <= n {
        return Err(Error::InvalidParameters(format!("collapse needs p > n, got p = {}, n = {n}", pr.p())));
    }
    let c_n = closed_form(&pr.with_preview(n))?;
    let c_p = closed_form(pr)?;
    let lifted = lift(&c_n.to_hpolytope(), pr.dist(), pr.p() - n);
    let verified = c_p.to_hpolytope().set_equal(&lifted)?;
    Ok(Collapse { c_n, verified })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionIdentity {
    pub lhs: HPolytope,
    pub rhs: HPolytope,
    pub equal: bool,
}

/// For `p ≥ n`, compares the collaborative fixed point with the state
/// shadow of `C_n`.
pub fn projection_identity(pr: &BrunovskyProblem, opts: &IterOptions) -> Result<ProjectionIdentity> {
    let n = pr.n();
    if pr.p() < n {
        return Err(Error::InvalidParameters(format!("projection identity needs p ≥ n, got p = {}, n = {n}", pr.p())));
    }
    let lhs = method1(&collaborative(&pr.system()).sys, opts)?.result;
    let rhs = match closed_form(&pr.with_preview(n)) {
        Ok(c) => c.to_hpolytope().project(&(0..n).collect::<Vec<_>>())?,
        Err(Error::EmptyInvariant) => HPolytope::empty(n),
        Err(e) => return Err(e),
    };
    let equal = lhs.set_equal(&rhs)?;
    Ok(ProjectionIdentity { lhs, rhs, equal })
}

/// Largest `c` such that the chain with disturbances in `Π[-c, c]` still has
/// a nonempty invariant set; bisection to `1e-12`. Returns infinity when every
/// `c` works (the first-order chain with preview).
pub fn largest_c(n: usize, p: usize, bx: &Hyperbox) -> Result<f64> {
    if bx.dim() != n {
        return Err(Error::DimensionMismatch(format!("box has dimension {}, expected {n}", bx.dim())));
    }
    let feasible = |c: f64| -> Result<bool> {
        let pr = BrunovskyProblem::new(bx.clone(), ConvexSet::Box(Hyperbox::symmetric(n, c)), p)?;
        Ok(nonempty_ineq(&pr))
    };
    if !feasible(0.0)? {
        return Err(Error::EmptyInvariant);
    }
    let half =
        bx.intervals().iter().map(|iv| iv.bounds().map_or(0.0, |(lo, hi)| lo.abs().max(hi.abs()))).fold(0.0, f64::max);
    let mut hi = 2.0 * half + 1.0;
    if feasible(hi)? {
        return Ok(f64::INFINITY);
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `largest_c` for `p = 0..=p_max`, in order of `p`.
pub fn sweep(n: usize, p_max: usize, bx: &Hyperbox) -> Result<Vec<(usize, f64)>> {
    (0..=p_max).into_par_iter().map(|p| Ok((p, largest_c(n, p, bx)?))).collect()
}

pub fn sweep_csv(rows: &[(usize, f64)]) -> String {
    let mut out = String::from("p,largest_c\n");
    for (p, c) in rows {
        out.push_str(&format!("{p},{}\n", g17(*c)));
    }
    out
}

/// Membership for the chain driven through `Ē`: each `d_i ∈ D_v` and
/// `(x, Ē d_1, …, Ē d_p) ∈ C_p`.
pub fn evariant_membership(ev: &EVariant, x: &[f64], ds: &[DVector<f64>]) -> Result<bool> {
    if !ds.iter().all(|d| ev.dist_v.contains(d.as_slice(), MEMBER_TOL)) {
        return Ok(false);
    }
    let inv = match closed_form(&ev.problem) {
        Ok(inv) => inv,
        Err(Error::EmptyInvariant) => return Ok(false),
        Err(e) => return Err(e),
    };
    let mapped: Vec<DVector<f64>> = ds.iter().map(|d| &ev.ebar * d).collect();
    Ok(inv.contains(x, &mapped))
}

/// Recognizes a single-input chain with box safe set and no input
/// constraints; `None` if `sys` is not of that form.
pub fn from_system(sys: &LinearSystem, p: usize) -> Option<Result<EVariant>> {
    let n = sys.n();
    if n == 0 || sys.m() != 1 || *sys.a() != shift_matrix(n) {
        return None;
    }
    if (0..n).any(|i| sys.b()[(i, 0)] != if i == n - 1 { 1.0 } else { 0.0 }) {
        return None;
    }
    let (h, off) = (sys.safe().h_matrix(), sys.safe().h_vector());
    let mut lo = vec![f64::NEG_INFINITY; n];
    let mut hi = vec![f64::INFINITY; n];
    for r in 0..h.nrows() {
        if h[(r, n)].abs() > 1e-12 {
            return None;
        }
        let nz: Vec<usize> = (0..n).filter(|&k| h[(r, k)].abs() > 1e-12).collect();
        let [k] = nz[..] else { return None };
        let a = h[(r, k)];
        if a > 0.0 {
            hi[k] = hi[k].min(off[r] / a);
        } else {
            lo[k] = lo[k].max(off[r] / a);
        }
    }
    if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
        return None;
    }
    let bx = Hyperbox::new(lo.iter().zip(&hi).map(|(&l, &h)| Interval::new(l, h)).collect());
    Some(evariant(n, sys.e(), sys.dist(), &bx, p))
}
