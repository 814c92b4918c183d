//! Analytic continuation by disc chaining.
//!
//! The germ is carried as a [`Branch`] whose coefficients are regenerated at
//! every center. Each hop stays within a fixed fraction of a certified
//! radius: `ρ/2` while the path has not left `D_{ρ/2}`, the distance to Ω
//! afterwards, never less than what remains of the previous disk.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::germ::{Germ, DEFAULT_ORDER, TAIL_TOL};
#[allow(unused_imports)]
use crate::num::Float;
use crate::omega::OmegaSet;
use crate::path::{Piece, PiecewisePath};
use crate::source::{Branch, GermSource};
use crate::{C64, POINT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub order: usize,
    /// Hop length as a fraction of the current radius.
    pub hop_fraction: f64,
    pub radius_floor: f64,
    pub tail_tol: f64,
    pub max_halvings: u32,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { order: DEFAULT_ORDER, hop_fraction: 0.4, radius_floor: 1e-6, tail_tol: TAIL_TOL, max_halvings: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub t: f64,
    pub center: C64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    /// Some hop could not meet the tail tolerance; the chain was still completed.
    StepFailure,
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub final_germ: Germ,
    pub trace: Vec<TraceStep>,
    pub status: Status,
    branches: Vec<Branch>,
    path: PiecewisePath,
    rho: f64,
    inside: bool,
    order: usize,
}

/// Samples checked inside every hop.
const HOP_SAMPLES: usize = 16;

/// Continues the germ of `source` at the origin along `path`.
///
/// If the path does not start at the origin, the segment from the origin to
/// its start is traversed first.
pub fn continue_along(
    source: &GermSource,
    path: &PiecewisePath,
    omega: &OmegaSet,
    opts: &ContinuationOptions,
) -> Result<ContinuationResult> {
    source.check_omega(omega)?;
    let rho = omega.rho()?;
    let branch = source.at_origin()?;
    let mut inside = true;
    let mut radius = None;
    let start = path.start();
    let branch = if start.norm() > 0.0 {
        let prefix = chain(branch, &PiecewisePath::segment(C64::new(0.0, 0.0), start), omega, rho, true, None, opts)?;
        inside = prefix.inside;
        radius = Some(prefix.trace.last().unwrap().radius);
        prefix.branches.last().unwrap().clone()
    } else {
        branch
    };
    chain(branch, path, omega, rho, inside, radius, opts)
}

impl ContinuationResult {
    pub fn final_branch(&self) -> &Branch {
        self.branches.last().unwrap()
    }

    pub fn path(&self) -> &PiecewisePath {
        &self.path
    }

    /// Branch re-centered at `γ(t)`.
    pub fn branch_at(&self, t: f64) -> Result<Branch> {
        let (_, b) = self.step_before(t)?;
        b.advanced(self.path.at(t))
    }

    pub fn value_at(&self, t: f64) -> Result<C64> {
        Ok(self.branch_at(t)?.value())
    }

    /// Germ at `γ(t)`, with the radius left over from the enclosing disk.
    pub fn germ_at(&self, t: f64) -> Result<Germ> {
        let (k, b) = self.step_before(t)?;
        let z = self.path.at(t);
        let r = self.trace[k].radius - (z - self.trace[k].center).norm();
        Ok(b.advanced(z)?.germ(self.order, r))
    }

    fn step_before(&self, t: f64) -> Result<(usize, &Branch)> {
        let (a, b) = self.path.domain();
        if !(t >= a && t <= b) {
            return Err(Error::OutOfDomain { t, a, b });
        }
        let k = self.trace.partition_point(|s| s.t <= t).max(1) - 1;
        Ok((k, &self.branches[k]))
    }

    /// Continues the final germ further along `path`, which must start at
    /// the current endpoint.
    pub fn extend(
        &self,
        path: &PiecewisePath,
        omega: &OmegaSet,
        opts: &ContinuationOptions,
    ) -> Result<ContinuationResult> {
        let end = self.final_branch().center();
        if (path.start() - end).norm() > POINT_TOL * end.norm().max(1.0) {
            return Err(Error::CenterMismatch);
        }
        let r = self.trace.last().unwrap().radius;
        chain(self.final_branch().clone(), path, omega, self.rho, self.inside, Some(r), opts)
    }
}

fn refresh(c: C64, remaining: f64, inside: bool, rho: f64, omega: &OmegaSet) -> f64 {
    let fresh = if inside { (0.5 * rho).max(omega.distance(c)) } else { omega.distance(c) };
    remaining.max(fresh)
}

fn chain(
    mut branch: Branch,
    path: &PiecewisePath,
    omega: &OmegaSet,
    rho: f64,
    mut inside: bool,
    radius: Option<f64>,
    opts: &ContinuationOptions,
) -> Result<ContinuationResult> {
    let (a, b) = path.domain();
    let mut t = a;
    let mut c = path.at(a);
    if (c - branch.center()).norm() > POINT_TOL * c.norm().max(1.0) {
        return Err(Error::CenterMismatch);
    }
    branch.advance(c)?;
    if c.norm() > 0.5 * rho {
        inside = false;
    }
    if !inside && omega.distance(c) <= POINT_TOL {
        return Err(Error::PathTouchesOmega { t });
    }
    let mut r = refresh(c, radius.unwrap_or(0.0), inside, rho, omega);
    if r < opts.radius_floor {
        return Err(Error::RadiusCollapse { t, floor: opts.radius_floor });
    }
    let mut status = Status::Converged;
    let mut trace = vec![TraceStep { t, center: c, radius: r }];
    let mut branches = vec![branch.clone()];

    while t < b {
        let coeffs = branch.germ(opts.order, r);
        let reach = opts.hop_fraction * r;
        let speed = path.velocity(t).norm();
        let mut dt = if speed > 0.0 { (b - t).min(reach / speed) } else { b - t };
        let mut halvings = 0;
        let leaves = loop {
            let (hop, leaves) = hop_extent(path, t, dt, c, 0.5 * rho);
            let tail_ok = coeffs.tail_ok(hop, opts.tail_tol);
            if hop <= reach && tail_ok {
                break leaves;
            }
            if hop <= reach && halvings >= opts.max_halvings {
                status = Status::StepFailure;
                break leaves;
            }
            dt *= 0.5;
            halvings += 1;
            if dt <= f64::EPSILON * (b - a).max(1.0) {
                return Err(Error::RadiusCollapse { t, floor: opts.radius_floor });
            }
        };
        let t_next = if b - (t + dt) <= 1e-14 * (b - a) { b } else { t + dt };
        let c_next = path.at(t_next);
        branch.advance(c_next)?;
        if leaves {
            inside = false;
        }
        if !inside && omega.distance(c_next) <= POINT_TOL {
            return Err(Error::PathTouchesOmega { t: t_next });
        }
        r = refresh(c_next, r - (c_next - c).norm(), inside, rho, omega);
        if r < opts.radius_floor {
            return Err(Error::RadiusCollapse { t: t_next, floor: opts.radius_floor });
        }
        t = t_next;
        c = c_next;
        trace.push(TraceStep { t, center: c, radius: r });
        branches.push(branch.clone());
    }

    let final_germ = branch.germ(opts.order, r);
    Ok(ContinuationResult { final_germ, trace, status, branches, path: path.clone(), rho, inside, order: opts.order })
}

/// Largest distance from `c` over `γ([t, t+dt])` and whether the path
/// leaves `D_{r_in}` there.
fn hop_extent(path: &PiecewisePath, t: f64, dt: f64, c: C64, r_in: f64) -> (f64, bool) {
    let mut far: f64 = 0.0;
    let mut leaves = false;
    for k in 1..=HOP_SAMPLES {
        let z = path.at(t + dt * k as f64 / HOP_SAMPLES as f64);
        far = far.max((z - c).norm());
        leaves |= z.norm() > r_in;
    }
    (far, leaves)
}

/// Distance from `z` to `Ω ∖ {exclude}`.
fn distance_excluding(omega: &OmegaSet, z: C64, exclude: C64) -> Result<f64> {
    let mut r = 1.0;
    while r < 1e8 {
        let best = omega
            .enumerate_in_disk(z, r)?
            .into_iter()
            .filter(|p| (*p - exclude).norm() > POINT_TOL)
            .map(|p| (p - z).norm())
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            return Ok(best);
        }
        r *= 4.0;
    }
    Ok(f64::INFINITY)
}

/// Continues the germ to `base`, then once counterclockwise around `ω` and
/// back, and returns the difference of the two germs at `base`.
pub fn monodromy_delta(
    source: &GermSource,
    w: C64,
    base: C64,
    omega: &OmegaSet,
    opts: &ContinuationOptions,
) -> Result<Germ> {
    let loop_r = (0.5 * distance_excluding(omega, w, w)?).min(0.5);
    let offset = base - w;
    if offset.norm() <= POINT_TOL {
        return Err(Error::InvalidArgument("base point coincides with the loop center"));
    }
    let dir = offset / offset.norm();
    let q = w + dir * loop_r;
    let th = dir.im.atan2(dir.re);
    let mut pieces = Vec::new();
    if (q - base).norm() > 0.0 {
        pieces.push(Piece::segment(base, q));
    }
    pieces.push(Piece::arc(w, loop_r, th, th + 2.0 * core::f64::consts::PI));
    if (q - base).norm() > 0.0 {
        pieces.push(Piece::segment(q, base));
    }
    let lap = PiecewisePath::new(pieces)?;

    let before = continue_along(source, &PiecewisePath::segment(C64::new(0.0, 0.0), base), omega, opts)?;
    let after = before.extend(&lap, omega, opts)?;
    let g0 = &before.final_germ;
    let g1 = after.final_germ.clone().with_center(g0.center());
    Ok(g1.sub(g0)?.with_radius(g0.radius().min(g1.radius())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::c;
    use core::f64::consts::PI;

    fn neg_log1m() -> GermSource {
        GermSource::log1m(c(1.0, 0.0)).scaled(c(-1.0, 0.0))
    }

    fn one_point(p: C64) -> OmegaSet {
        OmegaSet::from_points(&[p]).unwrap()
    }

    /// Composite Simpson for ∫ f(z) dz along a segment.
    fn simpson_segment(f: impl Fn(C64) -> C64, a: C64, b: C64, n: usize) -> C64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn log_to_minus_one() {
        let omega = one_point(c(1.0, 0.0));
        let path = PiecewisePath::segment(c(0.0, 0.0), c(-1.0, 0.0));
        let res = continue_along(&neg_log1m(), &path, &omega, &ContinuationOptions::default()).unwrap();
        let oracle = simpson_segment(|z| (c(1.0, 0.0) - z).inv(), c(0.0, 0.0), c(-1.0, 0.0), 4000);
        assert!((res.final_germ.coeffs()[0] - oracle).norm() < 1e-8);
        assert!((oracle.re + 2f64.ln()).abs() < 1e-10);
        assert_eq!(res.status, Status::Converged);
        for w in res.trace.windows(2) {
            assert!((w[1].center - w[0].center).norm() <= 0.5 * w[0].radius);
        }
        assert_eq!(res.trace.last().unwrap().center, c(-1.0, 0.0));
    }

    #[test]
    fn polynomials_continue_trivially() {
        let p = vec![c(1.0, 0.0), c(0.0, -2.0), c(0.5, 0.5), c(0.0, 0.0), c(-0.25, 0.0)];
        let omega = OmegaSet::positive_integers();
        let path = PiecewisePath::polyline(&[c(0.0, 0.0), c(0.5, 1.0), c(3.5, 1.5), c(4.0, -2.0)]).unwrap();
        let res = continue_along(&GermSource::Poly(p.clone()), &path, &omega, &Default::default()).unwrap();
        let direct = crate::germ::horner(&p, c(4.0, -2.0));
        assert!((res.final_germ.coeffs()[0] - direct).norm() < 1e-10);
    }

    #[test]
    fn loop_around_one_picks_up_residue() {
        let omega = one_point(c(1.0, 0.0));
        let opts = ContinuationOptions::default();
        let circle = PiecewisePath::segment(c(0.0, 0.0), c(0.5, 0.0))
            .concat(&PiecewisePath::circle(c(1.0, 0.0), 0.5, PI))
            .unwrap();
        let looped = continue_along(&neg_log1m(), &circle, &omega, &opts).unwrap();
        let straight =
            continue_along(&neg_log1m(), &PiecewisePath::segment(c(0.0, 0.0), c(0.5, 0.0)), &omega, &opts).unwrap();
        // ∮ dξ/(ξ−1) by quadrature on the circle fixes the sign.
        let n = 2000;
        let mut residue = c(0.0, 0.0);
        for k in 0..n {
            let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            let z = C64::from_polar(0.5, th);
            residue += z.inv() * (c(0.0, 1.0) * z) * (2.0 * PI / n as f64);
        }
        let diff = looped.final_germ.coeffs()[0] - straight.final_germ.coeffs()[0];
        assert!((diff + residue).norm() < 1e-8, "{diff}");
        assert!((diff - c(0.0, -2.0 * PI)).norm() < 1e-8);
        let higher = looped.final_germ.with_center(c(0.5, 0.0)).sub(&straight.final_germ).unwrap();
        // Compared on the scale of the disk radius 0.5.
        for (k, a) in higher.coeffs().iter().enumerate().skip(1) {
            assert!(a.norm() * 0.5f64.powi(k as i32) < 1e-8, "k={k}");
        }
    }

    #[test]
    fn monodromy_examples() {
        let omega = OmegaSet::from_points(&[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let opts = ContinuationOptions { order: 24, ..Default::default() };
        let psi = GermSource::geom(c(2.0, 0.0));
        let phi = psi.clone().times(GermSource::Log { at: c(1.0, 0.0) });
        let base = c(0.25, -0.25);
        let delta = monodromy_delta(&phi, c(1.0, 0.0), base, &omega, &opts).unwrap();
        let expect = psi.at_origin().unwrap().advanced(base).unwrap().coefficients(24);
        for (k, a) in delta.coeffs().iter().enumerate() {
            assert!((*a - expect[k] * c(0.0, 2.0 * PI)).norm() < 1e-7, "k={k}");
        }

        let entire = GermSource::Poly(vec![c(1.0, 0.0), c(2.0, 1.0)]);
        let z = monodromy_delta(&entire, c(1.0, 0.0), c(0.0, 0.0), &omega, &opts).unwrap();
        assert!(z.coeffs().iter().all(|a| a.norm() < 1e-10));

        let d = monodromy_delta(&neg_log1m(), c(1.0, 0.0), c(0.0, 0.0), &one_point(c(1.0, 0.0)), &opts).unwrap();
        assert!((d.coeffs()[0] - c(0.0, -2.0 * PI)).norm() < 1e-10);
        assert!(d.coeffs()[1..].iter().all(|a| a.norm() < 1e-10));
    }

    #[test]
    fn errors() {
        let omega = one_point(c(1.0, 0.0));
        let through = PiecewisePath::segment(c(0.0, 0.0), c(2.0, 0.0));
        let e = continue_along(&neg_log1m(), &through, &omega, &Default::default()).unwrap_err();
        assert!(matches!(e, Error::RadiusCollapse { .. } | Error::PathTouchesOmega { .. }), "{e:?}");
        let wrong = GermSource::log1m(c(3.0, 0.0));
        let e = continue_along(&wrong, &through, &omega, &Default::default()).unwrap_err();
        assert_eq!(e, Error::NotOmegaContinuable { point: c(3.0, 0.0) });
    }

    #[test]
    fn trace_queries() {
        let omega = one_point(c(1.0, 0.0));
        let path = PiecewisePath::polyline(&[c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)]).unwrap();
        let res = continue_along(&neg_log1m(), &path, &omega, &Default::default()).unwrap();
        for t in [0.0, 0.3, 0.5, 0.77, 1.0] {
            let z = path.at(t);
            // Above the real axis the principal branch is the continuation.
            let v = res.value_at(t).unwrap();
            if z.im > 0.0 || t == 0.0 {
                assert!((v + (c(1.0, 0.0) - z).ln()).norm() < 1e-12, "t={t}");
            }
        }
        // At 2 we passed above 1: −log(1−ζ) = −(log|1−ζ| − iπ)
        assert!((res.value_at(1.0).unwrap() - c(0.0, PI)).norm() < 1e-12);
        let g = res.germ_at(0.6).unwrap();
        assert!(g.radius() > 0.0);
    }
}
