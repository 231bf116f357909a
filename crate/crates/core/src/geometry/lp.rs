//! Dense two-phase simplex for the small LPs used by the polytope kernel.
//!
//! Every problem the kernel poses has the shape `max c·z s.t. Hz ≤ h` with a
//! free `z` of modest dimension (tens) and possibly many rows (thousands after
//! Fourier–Motzkin). We therefore solve the dual standard-form problem
//!
//! ```text
//! min h·y  s.t.  Hᵀy = c,  y ≥ 0
//! ```
//!
//! whose tableau has one row per *variable* of the original problem. The
//! primal maximizer is recovered from the simplex multipliers of the final
//! basis. Entering variables use Dantzig's rule, switching to Bland's rule
//! once a run of degenerate pivots suggests cycling.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Pivot / reduced-cost tolerance.
pub const EPS_LP: f64 = 1e-9;

const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// `c·point` when optimal; `+inf` when unbounded, `-inf` when infeasible.
    pub objective: f64,
    /// Maximizer when optimal, some feasible point when unbounded, empty otherwise.
    pub point: DVector<f64>,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// `max c·z` subject to `a z ≤ b` with `z` free.
pub fn maximize(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LpResult> {
    let dim = a.ncols();
    if c.len() != dim || b.len() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "lp: c has {} entries, A is {}x{}, b has {}",
            c.len(),
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if dim == 0 {
        return Ok(if b.iter().all(|&v| v >= -EPS_LP) {
            LpResult { status: LpStatus::Optimal, objective: 0.0, point: DVector::zeros(0) }
        } else {
            infeasible(0)
        });
    }

    // dual: min b·y  s.t. aᵀ y = c, y ≥ 0
    let at = a.transpose();
    let dual = StandardForm::new(&at, c, b.as_slice()).solve()?;
    match dual {
        Outcome::Optimal { multipliers, .. } => {
            let z = DVector::from_vec(multipliers);
            Ok(LpResult { status: LpStatus::Optimal, objective: c.dot(&z), point: z })
        }
        Outcome::Unbounded => Ok(infeasible(dim)),
        Outcome::Infeasible => {
            // primal is unbounded or infeasible
            let (slack, z) = max_slack(a, b)?;
            if slack >= -EPS_LP {
                Ok(LpResult { status: LpStatus::Unbounded, objective: f64::INFINITY, point: z })
            } else {
                Ok(infeasible(dim))
            }
        }
    }
}

/// Largest uniform slack: `max t s.t. a z + t·1 ≤ b, t ≤ 1`.
///
/// With unit-norm rows `t` is the radius of the largest inscribed ball (capped
/// at 1); the system is feasible iff `t ≥ 0`. Always solvable.
pub fn max_slack(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
    let (rows, dim) = a.shape();
    // dual: min b·y + y0  s.t.  aᵀy = 0, 1ᵀy + y0 = 1, (y, y0) ≥ 0
    let mut m = DMatrix::zeros(dim + 1, rows + 1);
    for i in 0..rows {
        for j in 0..dim {
            m[(j, i)] = a[(i, j)];
        }
        m[(dim, i)] = 1.0;
    }
    m[(dim, rows)] = 1.0;
    let mut rhs = DVector::zeros(dim + 1);
    rhs[dim] = 1.0;
    let mut cost: Vec<f64> = b.iter().copied().collect();
    cost.push(1.0);
    match StandardForm::new(&m, &rhs, &cost).solve()? {
        Outcome::Optimal { multipliers, value } => {
            let z = DVector::from_iterator(dim, multipliers.iter().take(dim).copied());
            Ok((value, z))
        }
        _ => Err(Error::Lp("max-slack dual not optimal".into())),
    }
}

fn infeasible(dim: usize) -> LpResult {
    LpResult { status: LpStatus::Infeasible, objective: f64::NEG_INFINITY, point: DVector::zeros(dim) }
}

enum Outcome {
    Optimal { value: f64, multipliers: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// `min cost·y s.t. A y = rhs, y ≥ 0` as a dense tableau.
///
/// Columns `0..n` are structural, `n..n+m` artificial. The artificial columns
/// are kept through phase 2 so that `B⁻¹` (and with it the multipliers) can be
/// read off at the end.
struct StandardForm {
    m: usize,
    n: usize,
    width: usize,
    tab: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    flip: Vec<f64>,
    cost: Vec<f64>,
}

impl StandardForm {
    fn new(a: &DMatrix<f64>, rhs: &DVector<f64>, cost: &[f64]) -> Self {
        let (m, n) = a.shape();
        let width = n + m;
        let mut tab = vec![0.0; m * width];
        let mut r = vec![0.0; m];
        let mut flip = vec![1.0; m];
        for i in 0..m {
            let s = if rhs[i] < 0.0 { -1.0 } else { 1.0 };
            flip[i] = s;
            for j in 0..n {
                tab[i * width + j] = s * a[(i, j)];
            }
            tab[i * width + n + i] = 1.0;
            r[i] = s * rhs[i];
        }
        StandardForm { m, n, width, tab, rhs: r, basis: (n..n + m).collect(), flip, cost: cost.to_vec() }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.tab[i * self.width + j]
    }

    fn solve(mut self) -> Result<Outcome> {
        let scale = 1.0 + self.rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

        // phase 1: minimize the sum of artificials
        let mut phase1 = vec![0.0; self.width];
        for v in phase1.iter_mut().skip(self.n) {
            *v = 1.0;
        }
        match self.run(&phase1, true)? {
            Run::Optimal => {}
            Run::Unbounded => return Err(Error::Lp("phase 1 reported unbounded".into())),
        }
        let infeas: f64 = self.basis.iter().enumerate().filter(|(_, &b)| b >= self.n).map(|(i, _)| self.rhs[i]).sum();
        if infeas > EPS_LP * scale {
            return Ok(Outcome::Infeasible);
        }
        self.drive_out_artificials();

        // phase 2
        let mut phase2 = vec![0.0; self.width];
        phase2[..self.n].copy_from_slice(&self.cost);
        match self.run(&phase2, false)? {
            Run::Unbounded => return Ok(Outcome::Unbounded),
            Run::Optimal => {}
        }
        let value: f64 = (0..self.m).map(|i| phase2[self.basis[i]] * self.rhs[i]).sum();
        let multipliers = (0..self.m)
            .map(|i| {
                let w: f64 = (0..self.m).map(|k| phase2[self.basis[k]] * self.at(k, self.n + i)).sum();
                self.flip[i] * w
            })
            .collect();
        Ok(Outcome::Optimal { value, multipliers })
    }

    fn drive_out_artificials(&mut self) {
        for i in 0..self.m {
            if self.basis[i] < self.n {
                continue;
            }
            let mut best = None;
            let mut best_abs = EPS_LP;
            for j in 0..self.n {
                let v = self.at(i, j).abs();
                if v > best_abs {
                    best_abs = v;
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                self.pivot(i, j);
            }
            // otherwise the row is linearly dependent; its artificial stays at zero
        }
    }

    fn run(&mut self, cost: &[f64], allow_artificial: bool) -> Result<Run> {
        let limit = 10_000 + 50 * (self.width + self.m);
        let entering_limit = if allow_artificial { self.width } else { self.n };
        let mut degenerate_run = 0usize;
        let mut reduced = vec![0.0; self.width];
        for _ in 0..limit {
            // reduced costs d_j = c_j - c_B B⁻¹ A_j
            reduced[..entering_limit].copy_from_slice(&cost[..entering_limit]);
            for i in 0..self.m {
                let cb = cost[self.basis[i]];
                if cb != 0.0 {
                    let row = &self.tab[i * self.width..i * self.width + entering_limit];
                    for (r, &t) in reduced[..entering_limit].iter_mut().zip(row) {
                        *r -= cb * t;
                    }
                }
            }
            for &b in &self.basis {
                if b < entering_limit {
                    reduced[b] = 0.0;
                }
            }
            let bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            let mut entering = None;
            let mut most_negative = -EPS_LP;
            for (j, &d) in reduced[..entering_limit].iter().enumerate() {
                if d < most_negative {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    most_negative = d;
                }
            }
            let Some(q) = entering else {
                return Ok(Run::Optimal);
            };

            // ratio test; ties go to the smallest basic index
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.at(i, q);
                if a > EPS_LP {
                    let ratio = self.rhs[i] / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(p) = leave else {
                return Ok(Run::Unbounded);
            };
            if best_ratio.abs() <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(p, q);
        }
        Err(Error::Lp(format!("iteration limit {limit} reached")))
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let w = self.width;
        let piv = self.tab[p * w + q];
        for j in 0..w {
            self.tab[p * w + j] /= piv;
        }
        self.rhs[p] /= piv;
        let prow: Vec<f64> = self.tab[p * w..(p + 1) * w].to_vec();
        let prhs = self.rhs[p];
        for i in 0..self.m {
            if i == p {
                continue;
            }
            let f = self.tab[i * w + q];
            if f != 0.0 {
                let row = &mut self.tab[i * w..(i + 1) * w];
                for (x, &y) in row.iter_mut().zip(&prow) {
                    *x -= f * y;
                }
                row[q] = 0.0;
                self.rhs[i] -= f * prhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-11 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        self.basis[p] = q;
    }
}

enum Run {
    Optimal,
    Unbounded,
}
