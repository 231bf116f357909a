//! Closed-loop rollouts: LQR nominal control, invariant-set supervision,
//! scripted disturbances with a sliding preview window, and traces.

use log::info;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::geometry::{lp, ConvexSet, HPolytope, Hyperbox, Interval, LpStatus};
use crate::invariance::{lift, method1, method2, AdmissibleMap, IterOptions, IterationReport};
use crate::systems::{augment, LinearSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct LqrSpec {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub max_iter: usize,
    pub tol: f64,
}

impl LqrSpec {
    /// Identity weight on the first `nx` states, zero on the rest, `R = I`.
    pub fn state_weighted(dim: usize, nx: usize, m: usize) -> Self {
        let q = DMatrix::from_fn(dim, dim, |i, j| if i == j && i < nx { 1.0 } else { 0.0 });
        LqrSpec { q, r: DMatrix::identity(m, m), max_iter: 10_000, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LqrSolution {
    pub gain: DMatrix<f64>,
    pub cost: DMatrix<f64>,
    pub iterations: usize,
    pub spectral_radius: f64,
}

fn gain_from(a: &DMatrix<f64>, b: &DMatrix<f64>, r: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let s = r + b.transpose() * p * b;
    let rhs = b.transpose() * p * a;
    s.lu().solve(&rhs).ok_or_else(|| Error::InvalidParameters("R + BᵀPB is singular".into()))
}

/// One step `P ← Q + AᵀPA - AᵀPB (R + BᵀPB)⁻¹ BᵀPA`, symmetrized.
pub fn riccati_step(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let k = gain_from(a, b, r, p)?;
    let next = q + a.transpose() * p * a - a.transpose() * p * b * k;
    Ok((&next + next.transpose()) * 0.5)
}

/// Spectral radius by Gelfand's formula with repeated squaring.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    let mut cur = m.clone();
    let mut log_scale = 0.0;
    let mut power = 1.0;
    for _ in 0..40 {
        let nrm = cur.norm();
        if nrm == 0.0 {
            return 0.0;
        }
        cur /= nrm;
        log_scale += nrm.ln();
        // cur·e^{log_scale} = m^{power}
        cur = &cur * &cur;
        log_scale *= 2.0;
        power *= 2.0;
    }
    let nrm = cur.norm();
    if nrm == 0.0 {
        return 0.0;
    }
    ((log_scale + nrm.ln()) / power).exp()
}

/// Infinite-horizon discrete LQR by fixed-point Riccati iteration.
pub fn lqr(sys: &LinearSystem, spec: &LqrSpec) -> Result<LqrSolution> {
    let (a, b) = (sys.a(), sys.b());
    let n = sys.n();
    if spec.q.shape() != (n, n) || spec.r.shape() != (sys.m(), sys.m()) {
        return Err(Error::DimensionMismatch("LQR weights do not match the system".into()));
    }
    let mut p = spec.q.clone();
    for it in 1..=spec.max_iter {
        let next = riccati_step(a, b, &spec.q, &spec.r, &p)?;
        let delta = (&next - &p).amax();
        p = next;
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::RiccatiDiverged(it));
        }
        if delta <= spec.tol {
            let gain = gain_from(a, b, &spec.r, &p)?;
            let rho = spectral_radius(&(a - b * &gain));
            if rho >= 1.0 {
                return Err(Error::RiccatiDiverged(it));
            }
            return Ok(LqrSolution { gain, cost: p, iterations: it, spectral_radius: rho });
        }
    }
    Err(Error::RiccatiDiverged(spec.max_iter))
}

/// `K` with `u = -K x`.
pub fn lqr_gain(sys: &LinearSystem, spec: &LqrSpec) -> Result<DMatrix<f64>> {
    Ok(lqr(sys, spec)?.gain)
}

/// Filters nominal inputs through the admissible input set of an invariant
/// set. `preview` is the number of previewed disturbances the supervised
/// system carries in its state.
#[derive(Debug, Clone)]
pub struct Supervisor {
    pub invariant: HPolytope,
    pub input_box: Hyperbox,
    pub preview: usize,
    map: AdmissibleMap,
}

/// Admissible input set as recorded in a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Admissible {
    Interval(Interval),
    Polytope(HPolytope),
}

impl Admissible {
    /// Endpoints for scalar inputs.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            Admissible::Interval(iv) => iv.bounds(),
            Admissible::Polytope(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Supervised {
    pub u: DVector<f64>,
    pub supervised: bool,
    pub admissible: Admissible,
    pub admissible_empty: bool,
}

impl Supervisor {
    pub fn new(sys: &LinearSystem, invariant: HPolytope, input_box: Hyperbox, preview: usize) -> Result<Self> {
        if input_box.dim() != sys.m() {
            return Err(Error::DimensionMismatch("input box does not match the input dimension".into()));
        }
        let map = AdmissibleMap::new(sys, &invariant)?;
        Ok(Supervisor { invariant, input_box, preview, map })
    }

    /// Admissible inputs at `state` (scalar inputs only).
    pub fn admissible(&self, state: &DVector<f64>) -> Interval {
        self.map.interval_at(state)
    }

    pub fn supervise(&self, state: &DVector<f64>, u_nom: &DVector<f64>) -> Result<Supervised> {
        if self.map.input_dim() == 1 {
            let adm = self.map.interval_at(state);
            return Ok(match adm.clamp(u_nom[0]) {
                Some(u) => Supervised {
                    u: DVector::from_element(1, u),
                    supervised: u != u_nom[0],
                    admissible: Admissible::Interval(adm),
                    admissible_empty: false,
                },
                None => Supervised {
                    u: self.clamp_to_box(u_nom),
                    supervised: true,
                    admissible: Admissible::Interval(Interval::Empty),
                    admissible_empty: true,
                },
            });
        }
        let poly = self.map.at(state)?;
        if poly.is_empty()? {
            return Ok(Supervised {
                u: self.clamp_to_box(u_nom),
                supervised: true,
                admissible: Admissible::Polytope(poly),
                admissible_empty: true,
            });
        }
        let u = dykstra(&poly, u_nom);
        let supervised = (&u - u_nom).amax() > 0.0;
        Ok(Supervised { u, supervised, admissible: Admissible::Polytope(poly), admissible_empty: false })
    }

    fn clamp_to_box(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            u.len(),
            u.iter().zip(self.input_box.intervals()).map(|(v, iv)| iv.clamp(*v).unwrap_or(*v)),
        )
    }
}

/// Euclidean projection onto `{u : G u ≤ r}` by Dykstra's alternating
/// projections, stopped when an entire sweep moves less than `1e-8`.
fn dykstra(poly: &HPolytope, u0: &DVector<f64>) -> DVector<f64> {
    if poly.contains_point(u0.as_slice(), 0.0) {
        return u0.clone();
    }
    let (g, r) = (poly.h_matrix(), poly.h_vector());
    let mut x = u0.clone();
    let mut incr = vec![DVector::zeros(x.len()); g.nrows()];
    for _ in 0..100_000 {
        let prev = x.clone();
        for i in 0..g.nrows() {
            let y = &x + &incr[i];
            let gi = g.row(i).transpose();
            let viol = gi.dot(&y) - r[i];
            x = if viol > 0.0 { &y - &gi * (viol / gi.norm_squared()) } else { y.clone() };
            incr[i] = y - &x;
        }
        if (&x - prev).norm() <= 1e-8 {
            break;
        }
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub t: usize,
    pub x: Vec<f64>,
    pub u_nominal: Vec<f64>,
    pub u_applied: Vec<f64>,
    pub d_applied: Vec<f64>,
    pub admissible: Option<Admissible>,
    pub admissible_empty: bool,
    pub supervised: bool,
    pub safe: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub x_final: Vec<f64>,
}

impl Trace {
    pub fn first_unsafe(&self) -> Option<usize> {
        self.steps.iter().find(|s| !s.safe).map(|s| s.t)
    }

    pub fn all_safe(&self) -> bool {
        self.first_unsafe().is_none()
    }

    pub fn supervised_count(&self) -> usize {
        self.steps.iter().filter(|s| s.supervised).count()
    }

    /// `t,x1..xn,u_nom,u,d1..dl,supervised,safe,adm_lo,adm_hi`; vector
    /// inputs get numbered columns. Missing, empty or non-interval admissible
    /// sets print `nan`.
    pub fn to_csv(&self) -> String {
        let Some(first) = self.steps.first() else {
            return "t\n".to_string();
        };
        let (n, m, l) = (first.x.len(), first.u_applied.len(), first.d_applied.len());
        let mut cols = vec!["t".to_string()];
        cols.extend((1..=n).map(|i| format!("x{i}")));
        if m == 1 {
            cols.extend(["u_nom".to_string(), "u".to_string()]);
        } else {
            cols.extend((1..=m).map(|i| format!("u_nom{i}")));
            cols.extend((1..=m).map(|i| format!("u{i}")));
        }
        cols.extend((1..=l).map(|i| format!("d{i}")));
        cols.extend(["supervised", "safe", "adm_lo", "adm_hi"].map(String::from));
        let mut out = cols.join(",");
        out.push('\n');
        for s in &self.steps {
            let mut row = vec![s.t.to_string()];
            row.extend(s.x.iter().map(|v| g17(*v)));
            row.extend(s.u_nominal.iter().map(|v| g17(*v)));
            row.extend(s.u_applied.iter().map(|v| g17(*v)));
            row.extend(s.d_applied.iter().map(|v| g17(*v)));
            row.push(u8::from(s.supervised).to_string());
            row.push(u8::from(s.safe).to_string());
            let (lo, hi) = s.admissible.as_ref().and_then(Admissible::bounds).unwrap_or((f64::NAN, f64::NAN));
            row.push(g17(lo));
            row.push(g17(hi));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Nominal controller: state and preview window to input.
pub type Controller<'a> = dyn Fn(&DVector<f64>, &[DVector<f64>]) -> Result<DVector<f64>> + 'a;

/// Simulates `T` steps of `sys`. At time `t` the controller sees `x(t)` and
/// `d_script[t..t+p]`; the plant is driven by `d_script[t]`.
pub fn rollout(
    sys: &LinearSystem,
    p: usize,
    controller: &Controller<'_>,
    supervisor: Option<&Supervisor>,
    x0: &DVector<f64>,
    d_script: &[DVector<f64>],
    horizon: usize,
) -> Result<Trace> {
    if d_script.len() < horizon + p {
        return Err(Error::ScriptExhausted { needed: horizon + p, have: d_script.len() });
    }
    if let Some(s) = supervisor {
        if s.preview > p {
            return Err(Error::InvalidParameters("supervisor needs more preview than the controller sees".into()));
        }
    }
    let mut x = x0.clone();
    let mut steps = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let window = &d_script[t..t + p];
        let u_nom = controller(&x, window)?;
        let (u, supervised, admissible, admissible_empty) = match supervisor {
            None => (u_nom.clone(), false, None, false),
            Some(s) => {
                let mut xi = x.as_slice().to_vec();
                for d in &window[..s.preview] {
                    xi.extend_from_slice(d.as_slice());
                }
                let r = s.supervise(&DVector::from_vec(xi), &u_nom)?;
                (r.u, r.supervised, Some(r.admissible), r.admissible_empty)
            }
        };
        let d = &d_script[t];
        let safe = sys.is_safe(x.as_slice(), u.as_slice(), 1e-9);
        steps.push(TraceStep {
            t,
            x: x.as_slice().to_vec(),
            u_nominal: u_nom.as_slice().to_vec(),
            u_applied: u.as_slice().to_vec(),
            d_applied: d.as_slice().to_vec(),
            admissible,
            admissible_empty,
            supervised,
            safe,
        });
        x = sys.step(&x, &u, d);
    }
    Ok(Trace { steps, x_final: x.as_slice().to_vec() })
}

/// `u = -K (x, d_1, …, d_p)`.
pub fn linear_feedback(gain: DMatrix<f64>) -> impl Fn(&DVector<f64>, &[DVector<f64>]) -> Result<DVector<f64>> {
    move |x, preview| {
        let mut xi = x.as_slice().to_vec();
        for d in preview {
            xi.extend_from_slice(d.as_slice());
        }
        if xi.len() != gain.ncols() {
            return Err(Error::DimensionMismatch("feedback gain does not match the preview window".into()));
        }
        Ok(-(&gain * DVector::from_vec(xi)))
    }
}

/// Uniform samples from a box, deterministic in the generator.
pub fn sample_box(rng: &mut ChaCha8Rng, b: &Hyperbox) -> DVector<f64> {
    DVector::from_iterator(
        b.dim(),
        b.intervals().iter().map(|iv| {
            let (lo, hi) = iv.bounds().expect("nonempty box");
            lo + (hi - lo) * rng.random::<f64>()
        }),
    )
}

/// Single-track lane-keeping model at constant longitudinal speed.
///
/// States `(y, v, ΔΨ, r)`: lateral offset, lateral velocity, heading error,
/// yaw rate. Input: steering angle. Disturbance `r_d` enters `ΔΨ̇ = r - r_d`.
/// `cf`, `cr` are axle cornering stiffnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneConfig {
    #[serde(default)]
    pub description: String,
    pub speed: f64,
    pub mass: f64,
    pub yaw_inertia: f64,
    pub lf: f64,
    pub lr: f64,
    pub cf: f64,
    pub cr: f64,
    pub dt: f64,
    pub y_max: f64,
    pub v_max: f64,
    pub psi_max: f64,
    pub r_max: f64,
    pub u_max: f64,
    pub rd_max: f64,
    pub preview: usize,
    pub growth_iterations: usize,
    pub horizon: usize,
}

/// The shipped configuration (`data/lane_keeping.json`).
pub const LANE_KEEPING_JSON: &str = include_str!("../data/lane_keeping.json");

impl LaneConfig {
    pub fn shipped() -> Self {
        serde_json::from_str(LANE_KEEPING_JSON).expect("shipped config parses")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Continuous-time `(A, B, E)`.
    pub fn continuous(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let (u0, m, iz) = (self.speed, self.mass, self.yaw_inertia);
        let (a, b, cf, cr) = (self.lf, self.lr, self.cf, self.cr);
        #[rustfmt::skip]
        let ac = DMatrix::from_row_slice(4, 4, &[
            0.0, 1.0, u0, 0.0,
            0.0, -(cf + cr) / (m * u0), 0.0, (b * cr - a * cf) / (m * u0) - u0,
            0.0, 0.0, 0.0, 1.0,
            0.0, (b * cr - a * cf) / (iz * u0), 0.0, -(a * a * cf + b * b * cr) / (iz * u0),
        ]);
        let bc = DMatrix::from_column_slice(4, 1, &[0.0, cf / m, 0.0, a * cf / iz]);
        let ec = DMatrix::from_column_slice(4, 1, &[0.0, 0.0, -1.0, 0.0]);
        (ac, bc, ec)
    }

    pub fn system(&self) -> Result<LinearSystem> {
        let (ac, bc, ec) = self.continuous();
        let mut g = DMatrix::zeros(4, 2);
        g.set_column(0, &bc.column(0));
        g.set_column(1, &ec.column(0));
        let (ad, gd) = zoh(&ac, &g, self.dt);
        let safe = Hyperbox::from_bounds(
            &[-self.y_max, -self.v_max, -self.psi_max, -self.r_max, -self.u_max],
            &[self.y_max, self.v_max, self.psi_max, self.r_max, self.u_max],
        )?
        .to_hpolytope();
        LinearSystem::new(
            ad,
            gd.columns(0, 1).into_owned(),
            gd.columns(1, 1).into_owned(),
            ConvexSet::Box(Hyperbox::symmetric(1, self.rd_max)),
            safe,
        )
    }

    pub fn input_box(&self) -> Hyperbox {
        Hyperbox::symmetric(1, self.u_max)
    }
}

/// Zero-order-hold discretization `(e^{A dt}, ∫₀^dt e^{A s} ds G)` from the
/// exponential of `[[A, G], [0, 0]] dt`, series truncated once a term drops
/// below `1e-12`.
pub fn zoh(a: &DMatrix<f64>, g: &DMatrix<f64>, dt: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, k) = (a.nrows(), g.ncols());
    let mut m = DMatrix::zeros(n + k, n + k);
    m.view_mut((0, 0), (n, n)).copy_from(&(a * dt));
    m.view_mut((0, n), (n, k)).copy_from(&(g * dt));
    let mut sum = DMatrix::identity(n + k, n + k);
    let mut term = DMatrix::identity(n + k, n + k);
    for i in 1..500 {
        term = &term * &m / i as f64;
        sum += &term;
        if term.amax() < 1e-12 {
            break;
        }
    }
    (sum.view((0, 0), (n, n)).into_owned(), sum.view((0, n), (n, k)).into_owned())
}

/// A state of the preview invariant set outside `C_max,0 × D^p`, found by
/// maximizing the violation of one facet at a time, then pulled slightly
/// toward the interior of the preview set.
pub fn find_gap_state(inner: &HPolytope, outer: &HPolytope) -> Result<Option<(DVector<f64>, f64)>> {
    let mut best: Option<(DVector<f64>, f64)> = None;
    for i in 0..inner.n_rows() {
        let res = outer.maximize(&inner.row(i))?;
        if res.status != LpStatus::Optimal {
            continue;
        }
        let viol = res.objective - inner.h_vector()[i];
        if viol > 1e-6 && best.as_ref().is_none_or(|b| viol > b.1) {
            best = Some((res.point, viol));
        }
    }
    let Some((vertex, _)) = best else {
        return Ok(None);
    };
    let (_, center) = lp::max_slack(outer.h_matrix(), outer.h_vector())?;
    let pt = &vertex + (&center - &vertex) * 0.02;
    let viol =
        (0..inner.n_rows()).map(|i| inner.row(i).dot(&pt) - inner.h_vector()[i]).fold(f64::NEG_INFINITY, f64::max);
    if viol <= 1e-6 {
        return Ok(None);
    }
    Ok(Some((pt, viol)))
}

#[derive(Debug, Clone, Serialize)]
pub struct PreviewDemo {
    pub cmax0: IterationReport,
    pub cio: IterationReport,
    pub gap_state: Vec<f64>,
    pub gap_violation: f64,
    pub trace_preview: Trace,
    pub trace_no_preview: Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub first_unsafe: Option<usize>,
    pub supervised_steps: usize,
    pub admissible_empty_steps: usize,
    pub steps: usize,
}

impl Trace {
    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            first_unsafe: self.first_unsafe(),
            supervised_steps: self.supervised_count(),
            admissible_empty_steps: self.steps.iter().filter(|s| s.admissible_empty).count(),
            steps: self.steps.len(),
        }
    }
}

/// Sets and both supervised rollouts of the lane-keeping scenario.
pub fn lane_keeping(cfg: &LaneConfig, p: usize, horizon: usize, seed: u64) -> Result<PreviewDemo> {
    let sets = PreviewScenario::compute(cfg.system()?, p, cfg.growth_iterations, cfg.input_box())?;
    sets.simulate(horizon, seed)
}

/// Without-preview and with-preview invariant sets of one system, computed
/// once: `C_max,0` by Method 1, then `C_io,p` by growing `C_max,0 × Dᵖ`
/// with Method 2.
#[derive(Debug, Clone)]
pub struct PreviewScenario {
    pub base: LinearSystem,
    pub aug: LinearSystem,
    pub p: usize,
    pub input_box: Hyperbox,
    pub cmax0: IterationReport,
    pub cio: IterationReport,
    pub seed_set: HPolytope,
}

impl PreviewScenario {
    pub fn compute(base: LinearSystem, p: usize, growth_iterations: usize, input_box: Hyperbox) -> Result<Self> {
        let cmax0 = method1(&base, &IterOptions::default())?;
        info!("C_max,0: {} rows after {} iterations", cmax0.result.n_rows(), cmax0.iterations);
        if cmax0.result.is_empty()? {
            return Err(Error::EmptyInvariant);
        }
        let aug = augment(&base, p).aug;
        let seed_set = lift(&cmax0.result, base.dist(), p);
        let cio = method2(&aug, &seed_set, growth_iterations, &IterOptions::default())?;
        info!("C_io,{p}: {} rows after {} iterations", cio.result.n_rows(), cio.iterations);
        Ok(PreviewScenario { base, aug, p, input_box, cmax0, cio, seed_set })
    }

    /// Input box taken from the bounding box of the input projection of the
    /// safe set.
    pub fn input_box_of(sys: &LinearSystem) -> Result<Hyperbox> {
        let idx: Vec<usize> = (sys.n()..sys.n() + sys.m()).collect();
        sys.safe().project(&idx)?.bounding_box()
    }

    pub fn supervisors(&self) -> Result<(Supervisor, Supervisor)> {
        let with = Supervisor::new(&self.aug, self.cio.result.clone(), self.input_box.clone(), self.p)?;
        let without = Supervisor::new(&self.base, self.cmax0.result.clone(), self.input_box.clone(), 0)?;
        Ok((with, without))
    }

    pub fn nominal_gain(&self) -> Result<DMatrix<f64>> {
        lqr_gain(&self.aug, &LqrSpec::state_weighted(self.aug.n(), self.base.n(), self.base.m()))
    }

    /// Disturbance script: the given previewed disturbances, then seeded
    /// uniform samples from the disturbance bounding box.
    pub fn script(&self, preview: &[DVector<f64>], horizon: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dbox = self.base.dist().bounding_box()?;
        let mut script = preview.to_vec();
        while script.len() < horizon + self.p {
            script.push(sample_box(&mut rng, &dbox));
        }
        Ok(script)
    }

    /// Splits an augmented state into `x` and its preview window.
    pub fn unpack(&self, xi: &DVector<f64>) -> (DVector<f64>, Vec<DVector<f64>>) {
        let (n, l) = (self.base.n(), self.base.l());
        let x = xi.rows(0, n).into_owned();
        let ds = (0..self.p).map(|i| xi.rows(n + i * l, l).into_owned()).collect();
        (x, ds)
    }

    /// Both supervised rollouts from `xi0` under the same nominal LQR.
    pub fn rollouts(&self, xi0: &DVector<f64>, horizon: usize, seed: u64) -> Result<(Trace, Trace)> {
        let (x0, preview) = self.unpack(xi0);
        let script = self.script(&preview, horizon, seed)?;
        let ctrl = linear_feedback(self.nominal_gain()?);
        let (with, without) = self.supervisors()?;
        let a = rollout(&self.base, self.p, &ctrl, Some(&with), &x0, &script, horizon)?;
        let b = rollout(&self.base, self.p, &ctrl, Some(&without), &x0, &script, horizon)?;
        Ok((a, b))
    }

    pub fn simulate(&self, horizon: usize, seed: u64) -> Result<PreviewDemo> {
        let (gap, viol) = find_gap_state(&self.seed_set, &self.cio.result)?.ok_or(Error::NoGapFound)?;
        let (trace_preview, trace_no_preview) = self.rollouts(&gap, horizon, seed)?;
        Ok(PreviewDemo {
            cmax0: self.cmax0.clone(),
            cio: self.cio.clone(),
            gap_state: gap.as_slice().to_vec(),
            gap_violation: viol,
            trace_preview,
            trace_no_preview,
        })
    }
}
