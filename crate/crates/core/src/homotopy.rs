//! Symmetric Ω-homotopies on a sampled grid.
//!
//! `H[t][m]` approximates `H_t(s_m)` on an s-grid symmetric about ½. Flow
//! stages transport an initial path along the vector field of
//! [`crate::flow`]; linear stages use `h(s) + s(γ(t) − γ(a))` while γ stays
//! near the origin. [`build_symmetric_homotopy`] chains them along the
//! segmentation of [`crate::segment`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, ColumnExecutor, Serial};
use crate::flow::Flow;
use crate::mollifier::Mollifier;
#[allow(unused_imports)]
use crate::num::Float;
use crate::omega::OmegaSet;
use crate::path::{clearance, clearance_with_location, Piece, PiecewisePath};
use crate::segment::{segment_for_key_lemma, IntervalKind, CLEARANCE_SAMPLES};
use crate::{C64, POINT_TOL};

/// Smallest clearance parameter accepted by the full construction.
pub const CLEARANCE_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotopyOptions {
    /// Size M of the s-grid.
    pub s_points: usize,
    /// Rows per stage: `⌈rows_per_length · length / δ′⌉`.
    pub rows_per_length: f64,
    /// RK4 steps satisfy `|γ′|·dt ≤ substep_fraction · min(δ′, min|γ|)`.
    pub substep_fraction: f64,
    pub max_rows: usize,
    pub tolerances: Tolerances,
}

impl Default for HomotopyOptions {
    fn default() -> Self {
        Self {
            s_points: 257,
            rows_per_length: 50.0,
            substep_fraction: 0.01,
            max_rows: 400_000,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub origin: f64,
    pub symmetry: f64,
    pub endpoint: f64,
    /// The grid must keep at least this fraction of `delta_pp` from Ω.
    pub clearance_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { origin: 1e-12, symmetry: 1e-6, endpoint: 1e-6, clearance_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricHomotopy {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Row-major `P × M`.
    pub points: Vec<C64>,
    /// Clearance δ″ of the grid from Ω away from `s = 0`.
    pub delta_pp: f64,
    /// The endpoint path Γ_H, when known.
    pub gamma: Option<PiecewisePath>,
    /// A pair `(ω₁, ω₂)` with `ω₁ + ω₂ ∉ Ω` found near the path, if any.
    pub addition_witness: Option<(C64, C64)>,
    /// Stage maps, kept so that `H_b` can be evaluated off the s-grid.
    stages: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq)]
enum Stage {
    /// RK4 transport with the same row plan as the grid columns.
    Flow { path: PiecewisePath, mollifier: Mollifier, ts: Vec<f64>, plan: Vec<(usize, usize)> },
    /// `h(s) + s(γ(t_end) − γ(a))`.
    Linear { path: PiecewisePath, t_end: f64 },
}

impl Stage {
    fn first_t(&self) -> f64 {
        match self {
            Stage::Flow { ts, .. } => ts[0],
            Stage::Linear { path, .. } => path.domain().0,
        }
    }

    fn cut(&mut self, t_max: f64) {
        match self {
            Stage::Flow { ts, plan, .. } => {
                let keep = ts.partition_point(|&t| t <= t_max + 1e-12).max(1);
                ts.truncate(keep);
                plan.truncate(keep - 1);
            }
            Stage::Linear { t_end, .. } => *t_end = t_end.min(t_max),
        }
    }

    /// Carries `(H(s), H(min(s, 1 − s)))` through the stage. Flow stages
    /// integrate the lower half only and mirror it, as the grid does.
    fn apply(&self, (z, lower): (C64, C64), s: f64) -> Result<(C64, C64)> {
        let sl = s.min(1.0 - s);
        match self {
            Stage::Flow { path, mollifier, ts, plan } => {
                let g = path.at(*ts.last().expect("non-empty stage"));
                let lower = if sl == 0.5 {
                    g * 0.5
                } else {
                    let flow = Flow::new(mollifier, path);
                    let mut z = lower;
                    for (w, &(k, n)) in ts.windows(2).zip(plan) {
                        z = flow.steps_on_piece(k, z, w[0], w[1], n)?;
                    }
                    z
                };
                Ok((if s > 0.5 { g - lower } else { lower }, lower))
            }
            Stage::Linear { path, t_end } => {
                let d = path.at(*t_end) - path.start();
                Ok((z + d * s, lower + d * sl))
            }
        }
    }
}

impl SymmetricHomotopy {
    pub fn from_grid(s_grid: Vec<f64>, t_grid: Vec<f64>, points: Vec<C64>, delta_pp: f64) -> Result<Self> {
        if points.len() != s_grid.len() * t_grid.len() || s_grid.len() < 2 || t_grid.is_empty() {
            return Err(Error::InvalidHomotopy("grid dimensions do not match"));
        }
        Ok(Self { s_grid, t_grid, points, delta_pp, gamma: None, addition_witness: None, stages: Vec::new() })
    }

    pub fn s_len(&self) -> usize {
        self.s_grid.len()
    }

    pub fn t_len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn at(&self, i: usize, m: usize) -> C64 {
        self.points[i * self.s_len() + m]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        let m = self.s_len();
        &self.points[i * m..(i + 1) * m]
    }

    /// `H_a` sampled on the s-grid.
    pub fn initial_path(&self) -> &[C64] {
        self.row(0)
    }

    /// `H_b` sampled on the s-grid.
    pub fn final_path(&self) -> &[C64] {
        self.row(self.t_len() - 1)
    }

    /// `t ↦ H_t(1)`.
    pub fn endpoint_samples(&self) -> Vec<C64> {
        (0..self.t_len()).map(|i| self.at(i, self.s_len() - 1)).collect()
    }

    /// Appends a homotopy whose first row continues this one's last row.
    fn append(&mut self, next: SymmetricHomotopy) {
        let m = self.s_len();
        self.t_grid.extend_from_slice(&next.t_grid[1..]);
        self.points.extend_from_slice(&next.points[m..]);
        self.delta_pp = self.delta_pp.min(next.delta_pp);
        self.stages.extend(next.stages);
    }

    /// Keeps the rows with `t ≤ t_max`.
    fn truncate_rows(&mut self, t_max: f64) {
        let keep = self.t_grid.partition_point(|&t| t <= t_max + 1e-12);
        self.t_grid.truncate(keep);
        self.points.truncate(keep * self.s_len());
        let last = *self.t_grid.last().expect("at least one row");
        self.stages.retain(|st| st.first_t() <= last);
        if let Some(st) = self.stages.last_mut() {
            st.cut(last);
        }
    }

    /// `H_b(s)` for arbitrary `s ∈ [0, 1]`; see [`SymmetricHomotopy::fiber_points`].
    pub fn final_fiber_points(&self, s: &[f64], exec: &dyn ColumnExecutor) -> Result<Vec<C64>> {
        self.fiber_points(self.t_len() - 1, s, exec)
    }

    /// `H_{t_i}(s)` for arbitrary `s ∈ [0, 1]`, obtained by pushing `sγ(a)`
    /// through the recorded stages up to row `i`. Only available for
    /// homotopies built here, not for grids loaded with
    /// [`SymmetricHomotopy::from_grid`].
    pub fn fiber_points(&self, i: usize, s: &[f64], exec: &dyn ColumnExecutor) -> Result<Vec<C64>> {
        if self.stages.is_empty() {
            return Err(Error::InvalidArgument("the homotopy carries no stage record"));
        }
        if i >= self.t_len() {
            return Err(Error::InvalidArgument("row index out of range"));
        }
        if s.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidArgument("s must lie in [0, 1]"));
        }
        let t = self.t_grid[i];
        let mut stages: Vec<Stage> = self.stages.iter().filter(|st| st.first_t() <= t).cloned().collect();
        if let Some(st) = stages.last_mut() {
            st.cut(t);
        }
        let g0 = *self.initial_path().last().expect("non-empty row");
        map_indexed(exec, s.len(), |k| {
            let mut z = (g0 * s[k], g0 * s[k].min(1.0 - s[k]));
            for st in &stages {
                z = st.apply(z, s[k])?;
            }
            Ok(z.0)
        })
        .into_iter()
        .collect()
    }

    /// Smallest distance to Ω over grid points with `s > 0`.
    pub fn measured_clearance(&self, omega: &OmegaSet) -> f64 {
        let m = self.s_len();
        let mut best = f64::INFINITY;
        for i in 0..self.t_len() {
            for &z in &self.row(i)[1..m] {
                best = best.min(omega.distance(z));
            }
        }
        best
    }
}

/// `s_m ≈ m/(M−1)`, chosen so that `s_{M−1−m} = 1 − s_m` and
/// `1 − s_{M−1−m} = s_m` both hold exactly.
pub fn symmetric_s_grid(m: usize) -> Vec<f64> {
    let m = m.max(2);
    let mut s = vec![0.5; m];
    for i in 0..m / 2 {
        let upper = 1.0 - i as f64 / (m - 1) as f64;
        s[m - 1 - i] = upper;
        s[i] = 1.0 - upper;
    }
    s
}

/// Uniform rows on the path domain plus every knot.
fn stage_t_grid(path: &PiecewisePath, delta_p: f64, opts: &HomotopyOptions) -> Result<Vec<f64>> {
    let (a, b) = path.domain();
    let n = (opts.rows_per_length * path.length() / delta_p).ceil().max(1.0);
    if n > opts.max_rows as f64 {
        return Err(Error::InvalidArgument("homotopy grid would exceed the row limit"));
    }
    let n = n as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    ts[n] = b;
    ts.extend(path.knots().iter().copied());
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup_by(|x, y| (*x - *y).abs() <= 1e-13 * (b - a));
    Ok(ts)
}

fn min_modulus(path: &PiecewisePath, n: usize) -> f64 {
    path.sample_params(n).iter().map(|&t| path.at(t).norm()).fold(f64::INFINITY, f64::min)
}

fn sampled_distance(path: &PiecewisePath, omega: &OmegaSet, n: usize) -> f64 {
    path.sample_params(n).iter().map(|&t| omega.distance(path.at(t))).fold(f64::INFINITY, f64::min)
}

/// The initial path starts at 0, keeps `delta_p` from Ω, is symmetric and
/// ends at γ(a).
fn check_initial_path(h: &[C64], gamma_a: C64, omega: &OmegaSet, delta_p: f64, tol: &Tolerances) -> Result<()> {
    let m = h.len();
    if h[0].norm() > tol.origin {
        return Err(Error::Precondition("initial path must start at the origin"));
    }
    if h.iter().any(|z| omega.distance(*z) < delta_p * (1.0 - 1e-6) - 1e-12) {
        return Err(Error::Precondition("initial path enters the delta' neighbourhood of omega"));
    }
    for i in 0..m {
        if (h[m - 1] - h[i] - h[m - 1 - i]).norm() > tol.symmetry {
            return Err(Error::Precondition("initial path is not symmetric"));
        }
    }
    if (h[m - 1] - gamma_a).norm() > tol.endpoint {
        return Err(Error::Precondition("initial path does not end at the start of the path"));
    }
    Ok(())
}

/// Row times, row-major points and the per-row `(piece, substeps)` plan.
type FlowGrid = (Vec<f64>, Vec<C64>, Vec<(usize, usize)>);

/// Transports `h` along the flow; `scale` bounds the RK4 step.
fn flow_stage(
    path: &PiecewisePath,
    h: &[C64],
    mollifier: &Mollifier,
    delta_p: f64,
    opts: &HomotopyOptions,
    exec: &dyn ColumnExecutor,
) -> Result<FlowGrid> {
    let ts = stage_t_grid(path, delta_p, opts)?;
    let scale = delta_p.min(min_modulus(path, 4000));
    let limit = opts.substep_fraction * scale;
    // Piece index and substep count for every row interval.
    let plan: Vec<(usize, usize)> = ts
        .windows(2)
        .map(|w| {
            let k = path.piece_at(0.5 * (w[0] + w[1]));
            let speed = [w[0], 0.5 * (w[0] + w[1]), w[1]]
                .iter()
                .map(|&t| path.velocity_on_piece(k, t).norm())
                .fold(0.0, f64::max);
            let n = (speed * (w[1] - w[0]) / limit).ceil().max(1.0) as usize;
            (k, n)
        })
        .collect();
    let flow = Flow::new(mollifier, path);
    // Only the lower half is integrated: the mirror of a trajectory is a
    // trajectory, and near the origin the symmetric configuration is
    // unstable, so integrating both halves lets them drift apart.
    let m = h.len();
    let half = m / 2;
    let columns: Vec<Result<Vec<C64>>> = map_indexed(exec, half, |m| {
        let mut z = h[m];
        let mut col = Vec::with_capacity(ts.len());
        col.push(z);
        for (w, &(k, n)) in ts.windows(2).zip(&plan) {
            z = flow.steps_on_piece(k, z, w[0], w[1], n)?;
            col.push(z);
        }
        Ok(col)
    });
    let mut points = vec![C64::new(0.0, 0.0); ts.len() * m];
    points[..m].copy_from_slice(h);
    for (j, col) in columns.into_iter().enumerate() {
        for (i, z) in col?.into_iter().enumerate().skip(1) {
            points[i * m + j] = z;
            points[i * m + m - 1 - j] = path.at(ts[i]) - z;
        }
    }
    if m % 2 == 1 {
        for (i, &t) in ts.iter().enumerate().skip(1) {
            points[i * m + half] = path.at(t) * 0.5;
        }
    }
    Ok((ts, points, plan))
}

/// Flow stage on `J = [a, b]` with the mollifier of `{0} ∪ Ω̄_δ′`.
#[allow(clippy::too_many_arguments)]
pub fn build_flow_homotopy(
    path: &PiecewisePath,
    h: &[C64],
    s_grid: &[f64],
    omega: &OmegaSet,
    delta: f64,
    delta_p: f64,
    opts: &HomotopyOptions,
    exec: &dyn ColumnExecutor,
) -> Result<SymmetricHomotopy> {
    if h.len() != s_grid.len() {
        return Err(Error::InvalidArgument("initial path and s-grid differ in length"));
    }
    if !(delta_p > 0.0 && delta_p < 0.5 * delta) {
        return Err(Error::Precondition("delta' must lie in (0, delta/2)"));
    }
    if !(min_modulus(path, 4000) > 0.0) {
        return Err(Error::Precondition("the path passes through the origin on a flow stage"));
    }
    if sampled_distance(path, omega, 4000) < delta * (1.0 - 1e-9) {
        return Err(Error::Precondition("the path enters the delta neighbourhood of omega"));
    }
    check_initial_path(h, path.start(), omega, delta_p, &opts.tolerances)?;
    let mollifier = Mollifier::build(omega, delta_p, true)?;
    let (ts, points, plan) = flow_stage(path, h, &mollifier, delta_p, opts, exec)?;
    let mut out = SymmetricHomotopy::from_grid(s_grid.to_vec(), ts.clone(), points, delta_p)?;
    out.stages = vec![Stage::Flow { path: path.clone(), mollifier, ts, plan }];
    out.gamma = Some(path.clone());
    ensure_valid(&out, omega, &opts.tolerances)?;
    Ok(out)
}

/// `H(s, t) = h(s) + s(γ(t) − γ(a))` on `K = [a, b]`; clearance `δ′ − ε`.
pub fn build_linear_homotopy(
    path: &PiecewisePath,
    h: &[C64],
    s_grid: &[f64],
    omega: &OmegaSet,
    epsilon: f64,
    delta_p: f64,
    opts: &HomotopyOptions,
) -> Result<SymmetricHomotopy> {
    if h.len() != s_grid.len() {
        return Err(Error::InvalidArgument("initial path and s-grid differ in length"));
    }
    if !(epsilon > 0.0 && epsilon < delta_p) {
        return Err(Error::Precondition("epsilon must lie in (0, delta')"));
    }
    if path.max_modulus(4000) > 0.5 * epsilon * (1.0 + 1e-12) {
        return Err(Error::Precondition("the path leaves the closed disk of radius epsilon/2"));
    }
    check_initial_path(h, path.start(), omega, delta_p, &opts.tolerances)?;
    let ts = stage_t_grid(path, delta_p, opts)?;
    let g0 = path.start();
    let mut points = Vec::with_capacity(ts.len() * h.len());
    for &t in &ts {
        let d = path.at(t) - g0;
        points.extend(h.iter().zip(s_grid).map(|(hs, s)| *hs + d * *s));
    }
    let mut out = SymmetricHomotopy::from_grid(s_grid.to_vec(), ts, points, delta_p - epsilon)?;
    out.stages = vec![Stage::Linear { path: path.clone(), t_end: path.domain().1 }];
    out.gamma = Some(path.clone());
    Ok(out)
}

/// The full construction: a symmetric Ω-homotopy with endpoint path γ and
/// initial path `s ↦ sγ(0)`.
pub fn build_symmetric_homotopy(
    path: &PiecewisePath,
    omega: &OmegaSet,
    opts: &HomotopyOptions,
    exec: &dyn ColumnExecutor,
) -> Result<SymmetricHomotopy> {
    path.check_nonvanishing_derivative(2000)?;
    let rho = omega.rho()?;
    let g0 = path.start();
    if !(g0.norm() > 0.0 && g0.norm() < rho) {
        return Err(Error::Precondition("the path must start in the punctured disk of radius rho"));
    }
    let (delta, at) = clearance_with_location(path, omega, CLEARANCE_SAMPLES);
    if !(delta > POINT_TOL) {
        return Err(Error::PathTouchesOmega { t: at });
    }
    let witness = omega.is_addition_stable_window(2.0 * path.max_modulus(2000))?.witness;
    let s_grid = symmetric_s_grid(opts.s_points);
    let h0: Vec<C64> = s_grid.iter().map(|s| g0 * *s).collect();

    let mut out = if omega.contains_origin() {
        let delta = clearance(path, omega, CLEARANCE_SAMPLES);
        let delta0 = 0.5 * (0.5 * delta).min(rho - g0.norm());
        if delta0 < CLEARANCE_FLOOR {
            return Err(Error::ClearanceFloor(delta0));
        }
        let mollifier = Mollifier::build(omega, 0.0, false)?;
        let (ts, points, plan) = flow_stage(path, &h0, &mollifier, delta0, opts, exec)?;
        let mut h = SymmetricHomotopy::from_grid(s_grid.clone(), ts.clone(), points, 0.0)?;
        h.stages = vec![Stage::Flow { path: path.clone(), mollifier, ts, plan }];
        h.delta_pp = h.measured_clearance(omega);
        h
    } else {
        let (_, b) = path.domain();
        let extended = if path.end().norm() == 0.0 { Some(extend_past_origin(path, rho)?) } else { None };
        let work = extended.as_ref().unwrap_or(path);
        let seg = segment_for_key_lemma(work, omega)?;
        if seg.delta0 < CLEARANCE_FLOOR {
            return Err(Error::ClearanceFloor(seg.delta0));
        }
        let mut acc: Option<SymmetricHomotopy> = None;
        let mut delta_j = seg.delta0;
        for iv in &seg.intervals {
            let piece = work.restrict(iv.a, iv.b)?;
            let h = acc.as_ref().map(|x| x.final_path().to_vec()).unwrap_or_else(|| h0.clone());
            let stage = match iv.kind {
                IntervalKind::Flow => build_flow_homotopy(&piece, &h, &s_grid, omega, seg.delta, delta_j, opts, exec)?,
                IntervalKind::Linear => {
                    let st = build_linear_homotopy(&piece, &h, &s_grid, omega, seg.epsilon, delta_j, opts)?;
                    delta_j -= seg.epsilon;
                    st
                }
            };
            match acc.as_mut() {
                Some(x) => x.append(stage),
                None => acc = Some(stage),
            }
        }
        let mut h = acc.expect("at least one stage");
        if extended.is_some() {
            h.truncate_rows(b);
        }
        h
    };
    out.gamma = Some(path.clone());
    out.addition_witness = witness;
    ensure_valid(&out, omega, &opts.tolerances)?;
    Ok(out)
}

/// Same as [`build_symmetric_homotopy`] with the serial executor.
pub fn build_symmetric_homotopy_serial(path: &PiecewisePath, omega: &OmegaSet) -> Result<SymmetricHomotopy> {
    build_symmetric_homotopy(path, omega, &HomotopyOptions::default(), &Serial)
}

/// γ followed by a short segment leaving the origin along `γ′(1)`.
fn extend_past_origin(path: &PiecewisePath, rho: f64) -> Result<PiecewisePath> {
    let (_, b) = path.domain();
    let d = path.derivative_left(b)?;
    if d.norm() == 0.0 {
        return Err(Error::VanishingDerivative { t: b });
    }
    let tail = PiecewisePath::new(vec![Piece::segment(C64::new(0.0, 0.0), d / d.norm() * (0.25 * rho))])?;
    path.concat(&tail)
}

fn ensure_valid(h: &SymmetricHomotopy, omega: &OmegaSet, tol: &Tolerances) -> Result<()> {
    let r = validate_homotopy(h, omega, tol);
    if !r.origin_ok {
        return Err(Error::InvalidHomotopy("H_t(0) is not the origin"));
    }
    if !r.symmetry_ok {
        return Err(Error::InvalidHomotopy("symmetry residual above tolerance"));
    }
    if !r.endpoint_ok {
        return Err(Error::InvalidHomotopy("endpoint path deviates from gamma"));
    }
    if !r.clearance_ok {
        return Err(Error::InvalidHomotopy("grid comes too close to omega"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub origin_residual: f64,
    pub symmetry_residual: f64,
    /// `None` when the homotopy carries no endpoint path.
    pub endpoint_residual: Option<f64>,
    pub min_clearance: f64,
    pub clearance_floor: f64,
    pub origin_ok: bool,
    pub symmetry_ok: bool,
    pub endpoint_ok: bool,
    pub clearance_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.origin_ok && self.symmetry_ok && self.endpoint_ok && self.clearance_ok
    }
}

/// Residuals of the three defining conditions plus the endpoint deviation.
pub fn validate_homotopy(h: &SymmetricHomotopy, omega: &OmegaSet, tol: &Tolerances) -> ValidationReport {
    let m = h.s_len();
    let mut origin: f64 = 0.0;
    let mut sym: f64 = 0.0;
    for i in 0..h.t_len() {
        let row = h.row(i);
        origin = origin.max(row[0].norm());
        for k in 0..m {
            sym = sym.max((row[m - 1] - row[k] - row[m - 1 - k]).norm());
        }
    }
    let endpoint = h
        .gamma
        .as_ref()
        .map(|g| h.t_grid.iter().enumerate().map(|(i, &t)| (h.at(i, m - 1) - g.at(t)).norm()).fold(0.0, f64::max));
    let min_clearance = h.measured_clearance(omega);
    let clearance_floor = tol.clearance_fraction * h.delta_pp;
    ValidationReport {
        origin_residual: origin,
        symmetry_residual: sym,
        endpoint_residual: endpoint,
        min_clearance,
        clearance_floor,
        origin_ok: origin <= tol.origin,
        symmetry_ok: sym <= tol.symmetry,
        endpoint_ok: endpoint.is_none_or(|e| e <= tol.endpoint),
        clearance_ok: min_clearance > 0.0 && min_clearance >= clearance_floor,
    }
}
