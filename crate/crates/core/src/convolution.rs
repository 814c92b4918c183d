//! Analytic continuation of convolution products.
//!
//! [`continue_convolution`] builds a symmetric Ω-homotopy for the path and
//! integrates `φ(ξ) ψ(ζ − ξ)` over its final fiber, with both factors
//! continued along the fiber itself; [`convolve_entire`] handles an entire
//! first factor directly along the path.
//!
//! The fiber integral is evaluated chord by chord between consecutive grid
//! points with Gauss–Legendre nodes and branch-tracked local germs. Each
//! chord stays inside disks where both factors are holomorphic, so the sum
//! equals the integral over the fiber without any estimate of `∂H/∂s`.

use alloc::vec;
use alloc::vec::Vec;

use crate::continuation::{continue_along, ContinuationOptions};
use crate::error::{Error, Result};
use crate::exec::ColumnExecutor;
use crate::germ::{convolve_coeffs, Germ, DEFAULT_ORDER};
use crate::homotopy::{build_symmetric_homotopy, HomotopyOptions, SymmetricHomotopy};
#[allow(unused_imports)]
use crate::num::Float;
use crate::omega::OmegaSet;
use crate::path::PiecewisePath;
use crate::quadrature::GaussLegendre;
use crate::source::{Branch, GermSource};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionOptions {
    pub order: usize,
    /// Gauss–Legendre nodes per chord; the refinement pass doubles them.
    pub gauss_nodes: usize,
    /// Largest accepted change under refinement, relative to the result.
    pub refine_tol: f64,
    /// Proceed even if Ω fails the addition test near the path.
    pub allow_unstable: bool,
    /// Fiber chords are refined until each is at most this fraction of the
    /// local germ radius.
    pub chord_fraction: f64,
    /// Upper bound on the refined fiber size.
    pub max_fiber_points: usize,
    pub homotopy: HomotopyOptions,
    pub continuation: ContinuationOptions,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            gauss_nodes: 8,
            refine_tol: 1e-7,
            allow_unstable: false,
            chord_fraction: 0.25,
            max_fiber_points: 1 << 15,
            homotopy: HomotopyOptions::default(),
            continuation: ContinuationOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvolutionResult {
    /// Germ of the continued product at the end of the path.
    pub germ: Germ,
    /// Scaled change between the base and the refined quadrature.
    pub quadrature_change: f64,
    /// Radius bound of the fiber germs (at least ρ/2 near the origin,
    /// the distance to Ω elsewhere).
    pub fiber_delta: f64,
    pub homotopy: Option<SymmetricHomotopy>,
}

/// Branch-tracked germs of φ and ψ along one fiber `p_0 = 0, …, p_{M−1}`.
#[derive(Debug, Clone)]
pub struct FiberCache {
    pub points: Vec<C64>,
    pub phi: Vec<Branch>,
    pub psi: Vec<Branch>,
    /// Certified radius at each point.
    pub radii: Vec<f64>,
}

impl FiberCache {
    pub fn build(phi: &GermSource, psi: &GermSource, fiber: &[C64], omega: &OmegaSet) -> Result<Self> {
        if fiber.len() < 2 || fiber[0].norm() > 1e-12 {
            return Err(Error::InvalidArgument("a fiber must start at the origin and have two points"));
        }
        let radii = local_radii(fiber, omega)?;
        for (m, w) in fiber.windows(2).enumerate() {
            if (w[1] - w[0]).norm() > 0.5 * radii[m].min(radii[m + 1]) {
                return Err(Error::FiberTooCoarse { index: m });
            }
        }
        let sweep = |src: &GermSource| -> Result<Vec<Branch>> {
            let mut b = src.at_origin()?;
            let mut out = Vec::with_capacity(fiber.len());
            out.push(b.clone());
            for &p in &fiber[1..] {
                b.advance(p)?;
                out.push(b.clone());
            }
            Ok(out)
        };
        Ok(Self { points: fiber.to_vec(), phi: sweep(phi)?, psi: sweep(psi)?, radii })
    }

    /// `min(ρ/2, dist(Ω, p_m))` over the points past the first exit from
    /// `D_{ρ/2}`.
    pub fn delta(&self, rho: f64) -> f64 {
        let mut inside = true;
        let mut d = 0.5 * rho;
        for (p, r) in self.points.iter().zip(&self.radii) {
            inside &= p.norm() < 0.5 * rho;
            if !inside {
                d = d.min(*r);
            }
        }
        d
    }
}

/// Radius certified at each fiber point: while the fiber has not yet left
/// `D_{ρ/2}` the germs are principal and reach `ρ − |p|`; afterwards only
/// the distance to Ω is guaranteed.
fn local_radii(fiber: &[C64], omega: &OmegaSet) -> Result<Vec<f64>> {
    let rho = omega.rho()?;
    let mut inside = true;
    Ok(fiber
        .iter()
        .map(|&p| {
            inside &= p.norm() < 0.5 * rho;
            let d = omega.distance(p);
            if inside {
                d.max(rho - p.norm())
            } else {
                d
            }
        })
        .collect())
}

/// Bisects the fiber of `h` at row `i` (symmetrically in `s ↔ 1 − s`)
/// until every chord is short against the local radius.
pub fn refine_fiber(
    h: &SymmetricHomotopy,
    i: usize,
    omega: &OmegaSet,
    opts: &ConvolutionOptions,
    exec: &dyn ColumnExecutor,
) -> Result<(Vec<f64>, Vec<C64>)> {
    let mut s = h.s_grid.clone();
    let mut p = h.row(i).to_vec();
    let floor = h.delta_pp * opts.homotopy.tolerances.clearance_fraction;
    loop {
        let r = local_radii(&p, omega)?;
        let n = p.len();
        let bad = |k: usize| (p[k + 1] - p[k]).norm() > opts.chord_fraction * r[k].min(r[k + 1]);
        let mut new_s = Vec::new();
        for k in 0..n - 1 {
            let mirror = n - 2 - k;
            if k > mirror || !(bad(k) || bad(mirror)) {
                continue;
            }
            let mid = 0.5 * (s[k] + s[k + 1]);
            new_s.push(mid);
            if k != mirror {
                new_s.push(1.0 - mid);
            }
        }
        if new_s.is_empty() {
            return Ok((s, p));
        }
        if n + new_s.len() > opts.max_fiber_points {
            let k = (0..n - 1).find(|&k| bad(k)).unwrap_or(0);
            return Err(Error::FiberTooCoarse { index: k });
        }
        let new_p = h.fiber_points(i, &new_s, exec)?;
        if new_p.iter().any(|z| omega.distance(*z) < floor) {
            return Err(Error::InvalidHomotopy("refined fiber comes too close to omega"));
        }
        let mut merged: Vec<(f64, C64)> = s.into_iter().zip(p).chain(new_s.into_iter().zip(new_p)).collect();
        merged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        (s, p) = merged.into_iter().unzip();
    }
}

/// Weighted coefficient norm `max_k |a_k| r^k`.
fn scaled_norm(c: &[C64], r: f64) -> f64 {
    let mut p = 1.0;
    let mut m: f64 = 0.0;
    for a in c {
        m = m.max(a.norm() * p);
        p *= r;
    }
    m
}

/// Coefficients in `σ` of `∫_fiber φ(ξ) ψ(end + σ − ξ) dξ + ∫_{end}^{end+σ} …`.
fn fiber_coefficients(cache: &FiberCache, end: C64, order: usize, gl: &GaussLegendre) -> Result<Vec<C64>> {
    let m_len = cache.points.len();
    let mut acc = vec![C64::new(0.0, 0.0); order + 1];
    // Chords p_m → p_{m+1}, then the closing chord p_{M−1} → end.
    for m in 0..m_len {
        let a = cache.points[m];
        let b = if m + 1 < m_len { cache.points[m + 1] } else { end };
        if (b - a).norm() == 0.0 {
            continue;
        }
        let mirror = if m + 1 < m_len { m_len - 1 - m } else { 0 };
        let psi_base = &cache.psi[mirror];
        let reach = 0.5 * cache.radii[mirror];
        for (u, w) in gl.mapped(0.0, 1.0) {
            let xi = a + (b - a) * u;
            let target = end - xi;
            if (target - psi_base.center()).norm() > reach {
                return Err(Error::FiberTooCoarse { index: m });
            }
            let f = cache.phi[m].advanced(xi)?.value();
            let weight = f * (b - a) * w;
            for (slot, g) in acc.iter_mut().zip(psi_base.advanced(target)?.coefficients(order)) {
                *slot += weight * g;
            }
        }
    }
    let last = cache.phi[m_len - 1].advanced(end)?.coefficients(order);
    let psi0 = cache.psi[0].coefficients(order);
    for (slot, c) in acc.iter_mut().zip(convolve_coeffs(&last, &psi0, order)) {
        *slot += c;
    }
    Ok(acc)
}

/// Runs the fiber quadrature with `n` and `2n` nodes per chord and returns
/// the refined coefficients with the scaled change.
fn refined<F>(n: usize, radius: f64, tol: f64, mut f: F) -> Result<(Vec<C64>, f64)>
where
    F: FnMut(&GaussLegendre) -> Result<Vec<C64>>,
{
    let coarse = f(&GaussLegendre::new(n))?;
    let fine = f(&GaussLegendre::new(2 * n))?;
    let r = (0.5 * radius).min(1.0);
    let diff: Vec<C64> = coarse.iter().zip(&fine).map(|(x, y)| *x - *y).collect();
    let change = scaled_norm(&diff, r) / (1.0 + scaled_norm(&fine, r));
    if !(change <= tol) {
        return Err(Error::QuadratureNonConvergence { change });
    }
    Ok((fine, change))
}

/// The product continued over one fiber ending near `end`.
pub fn fiber_convolution(
    phi: &GermSource,
    psi: &GermSource,
    fiber: &[C64],
    end: C64,
    omega: &OmegaSet,
    opts: &ConvolutionOptions,
) -> Result<ConvolutionResult> {
    phi.check_omega(omega)?;
    psi.check_omega(omega)?;
    let cache = FiberCache::build(phi, psi, fiber, omega)?;
    let fiber_delta = cache.delta(omega.rho()?);
    let radius = fiber_delta.min(omega.distance(end));
    let (coeffs, change) =
        refined(opts.gauss_nodes, radius, opts.refine_tol, |gl| fiber_coefficients(&cache, end, opts.order, gl))?;
    Ok(ConvolutionResult {
        germ: Germ::new(end, coeffs, radius)?,
        quadrature_change: change,
        fiber_delta,
        homotopy: None,
    })
}

/// Continuation of `φ ∗ ψ` along `path`, whose start must lie in `D*_ρ`.
pub fn continue_convolution(
    phi: &GermSource,
    psi: &GermSource,
    path: &PiecewisePath,
    omega: &OmegaSet,
    opts: &ConvolutionOptions,
    exec: &dyn ColumnExecutor,
) -> Result<ConvolutionResult> {
    phi.check_omega(omega)?;
    psi.check_omega(omega)?;
    let h = build_symmetric_homotopy(path, omega, &opts.homotopy, exec)?;
    if let (Some((a, b)), false) = (h.addition_witness, opts.allow_unstable) {
        return Err(Error::NotAdditionStable { a, b });
    }
    let (_, fiber) = refine_fiber(&h, h.t_len() - 1, omega, opts, exec)?;
    let mut out = fiber_convolution(phi, psi, &fiber, path.end(), omega, opts)?;
    out.homotopy = Some(h);
    Ok(out)
}

/// `A ∗ φ` for entire `A`, continued along `path` via the three-term
/// formula: origin segment, path integral, and the local germ term.
pub fn convolve_entire(
    a: &GermSource,
    phi: &GermSource,
    path: &PiecewisePath,
    omega: &OmegaSet,
    opts: &ConvolutionOptions,
) -> Result<Germ> {
    if !a.singular_points().is_empty() {
        return Err(Error::InvalidArgument("the first factor must be entire"));
    }
    phi.check_omega(omega)?;
    let rho = omega.rho()?;
    let z0 = path.start();
    let z1 = path.end();
    if z0.norm() >= rho {
        return Err(Error::Precondition("the path must start in the disk of radius rho"));
    }
    let cont = continue_along(phi, path, omega, &opts.continuation)?;
    let a0 = a.at_origin()?;
    let phi0 = phi.at_origin()?;
    let order = opts.order;

    // Parameter intervals on which γ is smooth and φ has a single local germ.
    let mut cuts: Vec<f64> = cont.trace.iter().map(|s| s.t).collect();
    cuts.extend(path.knots().iter().copied());
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    let pieces = ((z0.norm() / (0.25 * rho)).ceil() as usize).max(1);

    let radius = cont.trace.last().unwrap().radius.min(omega.distance(z1));
    let (coeffs, _) = refined(opts.gauss_nodes, radius, opts.refine_tol, |gl| {
        let mut acc = vec![C64::new(0.0, 0.0); order + 1];
        let mut add = |xi: C64, weight: C64| -> Result<()> {
            for (slot, g) in acc.iter_mut().zip(a0.advanced(z1 - xi)?.coefficients(order)) {
                *slot += weight * g;
            }
            Ok(())
        };
        // ∫₀^{ζ₀} on the principal sheet.
        for k in 0..pieces {
            let lo = z0 * (k as f64 / pieces as f64);
            let hi = z0 * ((k + 1) as f64 / pieces as f64);
            for (u, w) in gl.mapped(0.0, 1.0) {
                let xi = lo + (hi - lo) * u;
                add(xi, phi0.advanced(xi)?.value() * (hi - lo) * w)?;
            }
        }
        // ∫_γ with the branch continued up to each node.
        for win in cuts.windows(2) {
            if win[1] <= win[0] {
                continue;
            }
            let k = path.piece_at(0.5 * (win[0] + win[1]));
            for (t, w) in gl.mapped(win[0], win[1]) {
                let xi = path.eval_on_piece(k, t);
                let v = cont.branch_at(t)?.advanced(xi)?.value();
                add(xi, v * path.velocity_on_piece(k, t) * w)?;
            }
        }
        for (slot, c) in acc.iter_mut().zip(convolve_coeffs(
            &cont.final_branch().coefficients(order),
            &a0.coefficients(order),
            order,
        )) {
            *slot += c;
        }
        Ok(acc)
    })?;
    Germ::new(z1, coeffs, radius)
}

/// The endpoint-path integral `∫_{[0,γ(0)]·γ} φ(ξ) ψ(γ(1) − ξ) dξ` with ψ
/// taken on its principal star. It is *not* the continuation of the product
/// in general and is provided only for comparison.
pub fn naive_endpoint_integral(
    phi: &GermSource,
    psi: &GermSource,
    path: &PiecewisePath,
    omega: &OmegaSet,
    opts: &ConvolutionOptions,
) -> Result<C64> {
    let cont = continue_along(phi, path, omega, &opts.continuation)?;
    let end = path.end();
    let psi0 = psi.at_origin()?;
    let phi0 = phi.at_origin()?;
    let gl = GaussLegendre::new(2 * opts.gauss_nodes);
    let z0 = path.start();
    let mut total = gl.integrate_segment(C64::new(0.0, 0.0), z0, |xi| {
        let f = phi0.advanced(xi).map(|b| b.value()).unwrap_or(C64::new(f64::NAN, 0.0));
        let g = psi0.advanced(end - xi).map(|b| b.value()).unwrap_or(C64::new(f64::NAN, 0.0));
        f * g
    });
    let mut cuts: Vec<f64> = cont.trace.iter().map(|s| s.t).collect();
    cuts.extend(path.knots().iter().copied());
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    for win in cuts.windows(2) {
        if win[1] <= win[0] {
            continue;
        }
        let k = path.piece_at(0.5 * (win[0] + win[1]));
        for (t, w) in gl.mapped(win[0], win[1]) {
            let xi = path.eval_on_piece(k, t);
            let f = cont.branch_at(t)?.advanced(xi)?.value();
            let g = psi0.advanced(end - xi)?.value();
            total += f * g * path.velocity_on_piece(k, t) * w;
        }
    }
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(Error::InvalidArgument("the naive integrand meets a singularity"));
    }
    Ok(total)
}

/// Closed form of `1/(ζ−ω₁) ∗ 1/(ζ−ω₂)` continued along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPairOracle {
    pub at: C64,
    /// Continued `L₁ = log(1 − ζ/ω₁)` and `L₂` at the end of the path.
    pub l1: C64,
    pub l2: C64,
    pub bracket: C64,
    /// Set when the path ends at `ω₁ + ω₂` and the bracket vanishes there.
    pub removable: bool,
    /// `bracket / (ζ − ω₁ − ω₂)`, its limit in the removable case, `None`
    /// at a genuine pole.
    pub value: Option<C64>,
}

/// Threshold on `|L₁ + L₂|` separating a removable point from a pole.
pub const REMOVABLE_TOL: f64 = 1e-8;

pub fn example4_oracle(w1: C64, w2: C64, path: &PiecewisePath, opts: &ContinuationOptions) -> Result<LogPairOracle> {
    let omega = OmegaSet::from_points(&[w1, w2])?;
    let l1 = continue_along(&GermSource::log1m(w1), path, &omega, opts)?.final_branch().value();
    let l2 = continue_along(&GermSource::log1m(w2), path, &omega, opts)?.final_branch().value();
    let at = path.end();
    let bracket = l1 + l2;
    let w = w1 + w2;
    let gap = at - w;
    if gap.norm() <= 1e-12 * w.norm().max(1.0) {
        let removable = bracket.norm() < REMOVABLE_TOL;
        // (L₁ + L₂)′(ω) = 1/(ω − ω₁) + 1/(ω − ω₂) = 1/ω₂ + 1/ω₁
        let value = removable.then(|| w1.inv() + w2.inv());
        return Ok(LogPairOracle { at, l1, l2, bracket, removable, value });
    }
    Ok(LogPairOracle { at, l1, l2, bracket, removable: false, value: Some(bracket / gap) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Serial;
    use crate::germ::convolve_at_origin;
    use crate::num::c;
    use crate::path::Piece;
    use core::f64::consts::PI;

    fn opts() -> ConvolutionOptions {
        let mut o = ConvolutionOptions { order: 24, ..Default::default() };
        o.homotopy.s_points = 129;
        o
    }

    #[test]
    fn short_path_matches_origin_convolution() {
        let omega = OmegaSet::positive_integers();
        let phi = GermSource::geom(c(1.0, 0.0));
        let psi = GermSource::geom(c(2.0, 0.0));
        let path = PiecewisePath::segment(c(0.1, 0.0), c(0.1, 1e-3));
        let out = continue_convolution(&phi, &psi, &path, &omega, &opts(), &Serial).unwrap();
        let o =
            convolve_at_origin(&phi.at_origin().unwrap().germ(64, 1.0), &psi.at_origin().unwrap().germ(64, 2.0), 64)
                .unwrap();
        assert!((out.germ.coeffs()[0] - o.eval(c(0.1, 1e-3)).unwrap().value).norm() < 1e-8);
    }

    #[test]
    fn entire_factor_one_gives_the_primitive() {
        let omega = OmegaSet::positive_integers();
        let poly = GermSource::Poly(vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.0, 3.0)]);
        let path = PiecewisePath::polyline(&[c(0.2, 0.0), c(1.5, 0.5), c(2.5, 0.5), c(2.5, -0.5)]).unwrap();
        let g = convolve_entire(&GermSource::one(), &poly, &path, &omega, &opts()).unwrap();
        let z: C64 = c(2.5, -0.5);
        let prim = z + c(-1.0, 0.25) * z * z + c(0.0, 1.0) * z * z * z;
        assert!((g.coeffs()[0] - prim).norm() < 1e-8);
    }

    #[test]
    fn entire_factor_on_a_constant_path() {
        let omega = OmegaSet::positive_integers();
        let phi = GermSource::geom(c(1.0, 0.0));
        let path = PiecewisePath::segment(c(0.1, 0.0), c(0.1, 0.0));
        let g = convolve_entire(&GermSource::one(), &phi, &path, &omega, &opts()).unwrap();
        // 1 ∗ 1/(ζ−1) = log(1 − ζ)
        let exact = (c(1.0, 0.0) - c(0.1, 0.0)).ln();
        assert!((g.coeffs()[0] - exact).norm() < 1e-8);
        assert!((g.coeffs()[1] - c(1.0 / (0.1 - 1.0), 0.0)).norm() < 1e-8);
    }

    #[test]
    fn log_pair_branches_after_detours() {
        let copts = ContinuationOptions::default();
        // γ₀: [0, 2] with a lower half-circle around 1 travelled anticlockwise.
        let r = 0.25;
        let gamma0 = PiecewisePath::new(vec![
            Piece::segment(c(0.0, 0.0), c(1.0 - r, 0.0)),
            Piece::arc(c(1.0, 0.0), r, PI, 2.0 * PI),
            Piece::segment(c(1.0 + r, 0.0), c(2.0, 0.0)),
        ])
        .unwrap();
        let e = example4_oracle(c(1.0, 0.0), c(1.0, 0.0), &gamma0, &copts).unwrap();
        assert!((e.l1 - c(0.0, PI)).norm() < 1e-10);
        assert!((e.bracket - c(0.0, 2.0 * PI)).norm() < 1e-10);
        assert!(!e.removable && e.value.is_none());

        // Principal branch at ω₁ + ω₂ off the cuts.
        let straight = PiecewisePath::segment(c(0.0, 0.0), c(2.0, 0.0));
        let p = example4_oracle(c(1.0, 1.0), c(1.0, -1.0), &straight, &copts).unwrap();
        assert!(p.removable);
        assert!(p.bracket.norm() <= 1e-8);
        let expect = c(1.0, 1.0).inv() + c(1.0, -1.0).inv();
        assert!((p.value.unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn refuses_unstable_omega() {
        let omega = OmegaSet::from_points(&[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let path = PiecewisePath::polyline(&[c(0.5, 0.0), c(0.5, 0.6), c(3.2, 0.6)]).unwrap();
        let e = continue_convolution(
            &GermSource::geom(c(1.0, 0.0)),
            &GermSource::geom(c(2.0, 0.0)),
            &path,
            &omega,
            &opts(),
            &Serial,
        )
        .unwrap_err();
        assert!(matches!(e, Error::NotAdditionStable { .. }), "{e:?}");
    }
}
