//! Piecewise C¹ paths `γ: [a, b] → ℂ`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::num::c;
#[allow(unused_imports)]
use crate::num::Float;
use crate::omega::OmegaSet;
use crate::C64;

/// Junction mismatch tolerated between consecutive pieces (relative to scale).
const JUNCTION_TOL: f64 = 1e-12;

/// One C¹ piece, parametrized by a local `u ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Segment {
        from: C64,
        to: C64,
    },
    Arc {
        center: C64,
        radius: f64,
        from_angle: f64,
        to_angle: f64,
    },
    /// Cubic Hermite interpolation through `points` at equally spaced `u`,
    /// with `derivs` holding d/du at each node.
    Sampled {
        points: Vec<C64>,
        derivs: Vec<C64>,
    },
}

impl Piece {
    pub fn segment(from: C64, to: C64) -> Self {
        Piece::Segment { from, to }
    }

    pub fn arc(center: C64, radius: f64, from_angle: f64, to_angle: f64) -> Self {
        Piece::Arc { center, radius, from_angle, to_angle }
    }

    /// Sampled piece with tangents estimated by second-order finite differences.
    pub fn sampled(points: Vec<C64>) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidArgument("sampled piece needs at least two points"));
        }
        let du = 1.0 / (n - 1) as f64;
        let derivs = if n == 2 {
            alloc::vec![(points[1] - points[0]) / du; 2]
        } else {
            (0..n)
                .map(|i| {
                    if i == 0 {
                        (points[0] * -3.0 + points[1] * 4.0 - points[2]) / (2.0 * du)
                    } else if i == n - 1 {
                        (points[n - 1] * 3.0 - points[n - 2] * 4.0 + points[n - 3]) / (2.0 * du)
                    } else {
                        (points[i + 1] - points[i - 1]) / (2.0 * du)
                    }
                })
                .collect()
        };
        Ok(Piece::Sampled { points, derivs })
    }

    pub fn sampled_with_derivatives(points: Vec<C64>, derivs: Vec<C64>) -> Result<Self> {
        if points.len() < 2 || points.len() != derivs.len() {
            return Err(Error::InvalidArgument("sampled piece needs matching points and derivatives"));
        }
        Ok(Piece::Sampled { points, derivs })
    }

    pub fn eval(&self, u: f64) -> C64 {
        match self {
            Piece::Segment { from, to } => *from + (*to - *from) * u,
            Piece::Arc { center, radius, from_angle, to_angle } => {
                let th = from_angle + (to_angle - from_angle) * u;
                *center + c(th.cos(), th.sin()) * *radius
            }
            Piece::Sampled { points, derivs } => {
                let (i, x, h) = locate(points.len(), u);
                let (p0, p1, m0, m1) = (points[i], points[i + 1], derivs[i] * h, derivs[i + 1] * h);
                let x2 = x * x;
                let x3 = x2 * x;
                p0 * (2.0 * x3 - 3.0 * x2 + 1.0)
                    + m0 * (x3 - 2.0 * x2 + x)
                    + p1 * (-2.0 * x3 + 3.0 * x2)
                    + m1 * (x3 - x2)
            }
        }
    }

    /// d/du.
    pub fn derivative(&self, u: f64) -> C64 {
        match self {
            Piece::Segment { from, to } => *to - *from,
            Piece::Arc { radius, from_angle, to_angle, .. } => {
                let w = to_angle - from_angle;
                let th = from_angle + w * u;
                c(-th.sin(), th.cos()) * (radius * w)
            }
            Piece::Sampled { points, derivs } => {
                let (i, x, h) = locate(points.len(), u);
                let (p0, p1, m0, m1) = (points[i], points[i + 1], derivs[i] * h, derivs[i + 1] * h);
                let x2 = x * x;
                let d = p0 * (6.0 * x2 - 6.0 * x)
                    + m0 * (3.0 * x2 - 4.0 * x + 1.0)
                    + p1 * (-6.0 * x2 + 6.0 * x)
                    + m1 * (3.0 * x2 - 2.0 * x);
                d / h
            }
        }
    }

    /// Arc length over `[u0, u1]` (exact for segments and arcs).
    fn length(&self, u0: f64, u1: f64) -> f64 {
        match self {
            Piece::Segment { from, to } => (*to - *from).norm() * (u1 - u0).abs(),
            Piece::Arc { radius, from_angle, to_angle, .. } => {
                radius.abs() * (to_angle - from_angle).abs() * (u1 - u0).abs()
            }
            Piece::Sampled { .. } => {
                let n = 64;
                let mut len = 0.0;
                let mut prev = self.eval(u0);
                for k in 1..=n {
                    let p = self.eval(u0 + (u1 - u0) * k as f64 / n as f64);
                    len += (p - prev).norm();
                    prev = p;
                }
                len
            }
        }
    }
}

/// Interval index, local coordinate in `[0,1]` and interval width for a
/// table of `n` equally spaced samples.
fn locate(n: usize, u: f64) -> (usize, f64, f64) {
    let h = 1.0 / (n - 1) as f64;
    let pos = (u.clamp(0.0, 1.0) / h).min((n - 1) as f64);
    let i = (pos.floor() as usize).min(n - 2);
    (i, pos - i as f64, h)
}

/// A piece restricted to the local range `[u0, u1]`.
#[derive(Debug, Clone, PartialEq)]
struct Span {
    piece: Arc<Piece>,
    u0: f64,
    u1: f64,
}

/// A piecewise C¹ path. Piece `k` occupies `[knots[k], knots[k+1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePath {
    spans: Vec<Span>,
    knots: Vec<f64>,
}

impl PiecewisePath {
    /// Builds a path on `[0, 1]`, allotting each piece a share of the
    /// parameter proportional to its length.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        Self::on_domain(pieces, 0.0, 1.0)
    }

    pub fn on_domain(pieces: Vec<Piece>, a: f64, b: f64) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidArgument("path needs at least one piece"));
        }
        if !(b > a) {
            return Err(Error::InvalidArgument("path domain must have positive length"));
        }
        let lengths: Vec<f64> = pieces.iter().map(|p| p.length(0.0, 1.0)).collect();
        let total: f64 = lengths.iter().sum();
        let mut knots = Vec::with_capacity(pieces.len() + 1);
        knots.push(a);
        let mut acc = 0.0;
        for (k, l) in lengths.iter().enumerate() {
            acc += if total > 0.0 { *l / total } else { 1.0 / pieces.len() as f64 };
            knots.push(if k + 1 == pieces.len() { b } else { a + (b - a) * acc });
        }
        let spans: Vec<Span> = pieces.into_iter().map(|p| Span { piece: Arc::new(p), u0: 0.0, u1: 1.0 }).collect();
        let path = Self { spans, knots };
        path.check_continuity()?;
        Ok(path)
    }

    pub fn segment(from: C64, to: C64) -> Self {
        Self::new(alloc::vec![Piece::segment(from, to)]).expect("a single segment is a valid path")
    }

    pub fn polyline(points: &[C64]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument("polyline needs two points"));
        }
        Self::new(points.windows(2).map(|w| Piece::segment(w[0], w[1])).collect())
    }

    /// Full counterclockwise circle starting at `center + radius·e^{iθ₀}`.
    pub fn circle(center: C64, radius: f64, start_angle: f64) -> Self {
        Self::new(alloc::vec![Piece::arc(center, radius, start_angle, start_angle + 2.0 * PI)])
            .expect("a circle is a valid path")
    }

    fn check_continuity(&self) -> Result<()> {
        for k in 0..self.spans.len().saturating_sub(1) {
            let end = self.span_eval(k, 1.0);
            let start = self.span_eval(k + 1, 0.0);
            if (end - start).norm() > JUNCTION_TOL * end.norm().max(1.0) {
                return Err(Error::Discontinuous { index: k });
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Parameter values where consecutive pieces meet, including both ends.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn piece_count(&self) -> usize {
        self.spans.len()
    }

    pub fn start(&self) -> C64 {
        self.span_eval(0, 0.0)
    }

    pub fn end(&self) -> C64 {
        self.span_eval(self.spans.len() - 1, 1.0)
    }

    fn span_eval(&self, k: usize, x: f64) -> C64 {
        let s = &self.spans[k];
        s.piece.eval(s.u0 + (s.u1 - s.u0) * x)
    }

    fn span_derivative(&self, k: usize, x: f64) -> C64 {
        let s = &self.spans[k];
        let w = self.knots[k + 1] - self.knots[k];
        if w == 0.0 {
            return C64::new(0.0, 0.0);
        }
        s.piece.derivative(s.u0 + (s.u1 - s.u0) * x) * ((s.u1 - s.u0) / w)
    }

    /// Index of the piece active at `t` (the right one at junctions) and the
    /// piece-local fraction.
    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.spans.len();
        let k = match self.knots[1..n].iter().position(|&kn| t < kn) {
            Some(k) => k,
            None => n - 1,
        };
        let w = self.knots[k + 1] - self.knots[k];
        let x = if w > 0.0 { ((t - self.knots[k]) / w).clamp(0.0, 1.0) } else { 0.0 };
        (k, x)
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (a, b) = self.domain();
        if !(t >= a && t <= b) {
            return Err(Error::OutOfDomain { t, a, b });
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<C64> {
        self.check_domain(t)?;
        Ok(self.at(t))
    }

    /// γ(t) with `t` clamped into the domain.
    pub fn at(&self, t: f64) -> C64 {
        let (a, b) = self.domain();
        let (k, x) = self.locate(t.clamp(a, b));
        self.span_eval(k, x)
    }

    /// γ′(t); the right derivative at junctions and the left one at `b`.
    pub fn derivative(&self, t: f64) -> Result<C64> {
        self.check_domain(t)?;
        Ok(self.velocity(t))
    }

    pub(crate) fn velocity(&self, t: f64) -> C64 {
        let (a, b) = self.domain();
        let (k, x) = self.locate(t.clamp(a, b));
        self.span_derivative(k, x)
    }

    /// γ′ taken from the piece that ends at `t` when `t` is a junction.
    pub fn derivative_left(&self, t: f64) -> Result<C64> {
        self.check_domain(t)?;
        if let Some(k) = self.knots[1..].iter().position(|&kn| kn == t) {
            return Ok(self.span_derivative(k, 1.0));
        }
        Ok(self.velocity(t))
    }

    /// γ′(t) using the piece with index `k` (used by integrators that must
    /// not cross a junction mid-step).
    pub(crate) fn velocity_on_piece(&self, k: usize, t: f64) -> C64 {
        let w = self.knots[k + 1] - self.knots[k];
        let x = if w > 0.0 { (t - self.knots[k]) / w } else { 0.0 };
        self.span_derivative(k, x)
    }

    /// Index of the piece containing `t` (the right one at junctions).
    pub(crate) fn piece_at(&self, t: f64) -> usize {
        let (a, b) = self.domain();
        self.locate(t.clamp(a, b)).0
    }

    pub(crate) fn eval_on_piece(&self, k: usize, t: f64) -> C64 {
        let w = self.knots[k + 1] - self.knots[k];
        let x = if w > 0.0 { (t - self.knots[k]) / w } else { 0.0 };
        self.span_eval(k, x)
    }

    /// Restriction to `[t0, t1]`, keeping the parametrization.
    pub fn restrict(&self, t0: f64, t1: f64) -> Result<Self> {
        self.check_domain(t0)?;
        self.check_domain(t1)?;
        if t1 < t0 {
            return Err(Error::InvalidArgument("restriction interval is reversed"));
        }
        let (k0, x0) = self.locate(t0);
        if t1 == t0 {
            let s = &self.spans[k0];
            let u = s.u0 + (s.u1 - s.u0) * x0;
            return Ok(Self {
                spans: alloc::vec![Span { piece: s.piece.clone(), u0: u, u1: u }],
                knots: alloc::vec![t0, t0],
            });
        }
        let mut spans = Vec::new();
        let mut knots = alloc::vec![t0];
        for k in k0..self.spans.len() {
            let (lo, hi) = (self.knots[k], self.knots[k + 1]);
            if hi <= t0 {
                continue;
            }
            if lo >= t1 {
                break;
            }
            let s = &self.spans[k];
            let w = hi - lo;
            let xa = ((t0.max(lo) - lo) / w).clamp(0.0, 1.0);
            let xb = ((t1.min(hi) - lo) / w).clamp(0.0, 1.0);
            if xb <= xa {
                continue;
            }
            spans.push(Span { piece: s.piece.clone(), u0: s.u0 + (s.u1 - s.u0) * xa, u1: s.u0 + (s.u1 - s.u0) * xb });
            knots.push(t1.min(hi));
        }
        Ok(Self { spans, knots })
    }

    /// γ restricted to `[a, s]`.
    pub fn truncate(&self, s: f64) -> Result<Self> {
        let (a, _) = self.domain();
        self.restrict(a, s)
    }

    /// Concatenation; `other` is shifted so that its domain starts at `b`.
    pub fn concat(&self, other: &PiecewisePath) -> Result<Self> {
        let (_, b) = self.domain();
        let (oa, _) = other.domain();
        let mut spans = self.spans.clone();
        spans.extend(other.spans.iter().cloned());
        let mut knots = self.knots.clone();
        knots.extend(other.knots[1..].iter().map(|t| t - oa + b));
        let path = Self { spans, knots };
        path.check_continuity()?;
        Ok(path)
    }

    /// The same curve with the same domain, traversed backwards.
    pub fn reversed(&self) -> Self {
        let (a, b) = self.domain();
        let spans = self.spans.iter().rev().map(|s| Span { piece: s.piece.clone(), u0: s.u1, u1: s.u0 }).collect();
        let knots = self.knots.iter().rev().map(|t| a + b - t).collect();
        Self { spans, knots }
    }

    /// Same curve on a new domain (affine change of parameter).
    pub fn reparametrized(&self, a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidArgument("path domain must have positive length"));
        }
        let (a0, b0) = self.domain();
        let knots = self.knots.iter().map(|t| a + (t - a0) / (b0 - a0) * (b - a)).collect();
        Ok(Self { spans: self.spans.clone(), knots })
    }

    pub fn length(&self) -> f64 {
        self.spans.iter().map(|s| s.piece.length(s.u0, s.u1)).sum()
    }

    /// `n ≥ 2` equally spaced parameters plus every junction, sorted.
    pub fn sample_params(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.domain();
        let n = n.max(2);
        let mut ts: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        ts.extend_from_slice(&self.knots);
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ts.dedup();
        ts
    }

    /// Largest |γ′| over a sample (both one-sided values at junctions).
    pub fn max_speed(&self, n: usize) -> f64 {
        let mut m: f64 = 0.0;
        for t in self.sample_params(n) {
            m = m.max(self.velocity(t).norm());
        }
        for k in 0..self.spans.len() {
            m = m.max(self.span_derivative(k, 1.0).norm());
        }
        m
    }

    pub fn max_modulus(&self, n: usize) -> f64 {
        self.sample_params(n).iter().map(|&t| self.at(t).norm()).fold(0.0, f64::max)
    }

    /// Fails if some sampled one-sided derivative vanishes.
    pub fn check_nonvanishing_derivative(&self, n: usize) -> Result<()> {
        let scale = self.length().max(1e-300);
        for t in self.sample_params(n) {
            let right = self.velocity(t);
            let left = self.derivative_left(t)?;
            if right.norm() <= 1e-12 * scale || left.norm() <= 1e-12 * scale {
                return Err(Error::VanishingDerivative { t });
            }
        }
        Ok(())
    }
}

/// Certified lower bound on dist(Ω, γ): sampled minimum minus the Lipschitz
/// slack `max|γ′|·step/2`, floored at zero.
pub fn clearance(path: &PiecewisePath, omega: &OmegaSet, n_samples: usize) -> f64 {
    clearance_with_location(path, omega, n_samples).0
}

/// Like [`clearance`], also returning the parameter of the sampled minimum.
pub fn clearance_with_location(path: &PiecewisePath, omega: &OmegaSet, n_samples: usize) -> (f64, f64) {
    let (a, b) = path.domain();
    let n = n_samples.max(2);
    let mut best = f64::INFINITY;
    let mut at = a;
    for t in path.sample_params(n) {
        let d = omega.distance(path.at(t));
        if d < best {
            best = d;
            at = t;
        }
    }
    let step = (b - a) / (n - 1) as f64;
    let slack = path.max_speed(n) * step / 2.0;
    ((best - slack).max(0.0), at)
}

/// Certified clearance of the part of γ lying outside the open disk of
/// radius `r` around the origin; `INFINITY` if none of it does.
pub fn clearance_outside_disk(path: &PiecewisePath, omega: &OmegaSet, r: f64, n_samples: usize) -> f64 {
    let (a, b) = path.domain();
    let n = n_samples.max(2);
    let step = (b - a) / (n - 1) as f64;
    let slack = path.max_speed(n) * step / 2.0;
    let mut best = f64::INFINITY;
    for t in path.sample_params(n) {
        let z = path.at(t);
        if z.norm() + slack >= r {
            best = best.min(omega.distance(z));
        }
    }
    if best.is_finite() {
        (best - slack).max(0.0)
    } else {
        best
    }
}

/// Winding number of a closed path around `p`, by adaptive accumulation of
/// the argument.
pub fn winding_number(path: &PiecewisePath, p: C64) -> Result<i64> {
    let total = winding_real(path, p)?;
    let k = total.round();
    if (total - k).abs() > 0.1 {
        return Err(Error::NonIntegerWinding(total));
    }
    Ok(k as i64)
}

/// The unrounded `(1/2π)·Δarg(γ − p)`.
pub fn winding_real(path: &PiecewisePath, p: C64) -> Result<f64> {
    let scale = path.max_modulus(64).max(p.norm()).max(1.0);
    if (path.start() - path.end()).norm() >= 1e-9 * scale {
        return Err(Error::NotClosed);
    }
    let (a, b) = path.domain();
    let mut total = 0.0;
    let n = 64 * path.piece_count();
    let mut t0 = a;
    let mut z0 = path.at(a) - p;
    if z0.norm() <= 1e-12 * scale {
        return Err(Error::PointOnCurve);
    }
    for i in 1..=n {
        let t1 = a + (b - a) * i as f64 / n as f64;
        let z1 = path.at(t1) - p;
        total += accumulate(path, p, t0, t1, z0, z1, 0, scale)?;
        t0 = t1;
        z0 = z1;
    }
    Ok(total / (2.0 * PI))
}

#[allow(clippy::too_many_arguments)]
fn accumulate(path: &PiecewisePath, p: C64, t0: f64, t1: f64, z0: C64, z1: C64, depth: u32, scale: f64) -> Result<f64> {
    if z1.norm() <= 1e-12 * scale {
        return Err(Error::PointOnCurve);
    }
    let tm = 0.5 * (t0 + t1);
    let zm = path.at(tm) - p;
    if zm.norm() <= 1e-12 * scale {
        return Err(Error::PointOnCurve);
    }
    let d1 = (zm / z0).arg();
    let d2 = (z1 / zm).arg();
    if d1.abs() + d2.abs() < 0.25 {
        return Ok(d1 + d2);
    }
    if depth > 48 {
        return Err(Error::PointOnCurve);
    }
    Ok(accumulate(path, p, t0, tm, z0, zm, depth + 1, scale)? + accumulate(path, p, tm, t1, zm, z1, depth + 1, scale)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let g = PiecewisePath::segment(c(0.0, 0.0), c(1.0, 1.0));
        assert_eq!(g.eval(0.5).unwrap(), c(0.5, 0.5));
        let circle = PiecewisePath::circle(c(1.0, 0.0), 1.0, PI);
        assert!(circle.eval(0.0).unwrap().norm() < 1e-15);
        let s = PiecewisePath::segment(c(0.0, 0.0), c(2.0, 0.0));
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(s.derivative(t).unwrap(), c(2.0, 0.0));
        }
        assert!(matches!(s.eval(1.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn junction_takes_right_value() {
        let g = PiecewisePath::polyline(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert_eq!(g.knots(), &[0.0, 0.5, 1.0]);
        assert_eq!(g.derivative(0.5).unwrap(), c(0.0, 2.0));
        assert_eq!(g.derivative_left(0.5).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn truncation() {
        let g = PiecewisePath::segment(c(0.0, 0.0), c(2.0, 0.0));
        assert_eq!(g.truncate(1.0).unwrap(), g);
        let point = g.truncate(0.0).unwrap();
        assert_eq!(point.eval(0.0).unwrap(), c(0.0, 0.0));
        let half = g.truncate(0.5).unwrap();
        assert_eq!(half.domain(), (0.0, 0.5));
        assert_eq!(half.end(), c(1.0, 0.0));
        assert_eq!(half.eval(0.25).unwrap(), c(0.5, 0.0));
    }

    #[test]
    fn discontinuity_rejected() {
        let r = PiecewisePath::new(alloc::vec![
            Piece::segment(c(0.0, 0.0), c(1.0, 0.0)),
            Piece::segment(c(1.0, 0.1), c(2.0, 0.0)),
        ]);
        assert_eq!(r, Err(Error::Discontinuous { index: 0 }));
    }

    #[test]
    fn sampled_piece_interpolates() {
        let pts: Vec<C64> = (0..=40)
            .map(|i| {
                let th = PI * i as f64 / 40.0;
                c(th.cos(), th.sin())
            })
            .collect();
        let g = PiecewisePath::new(alloc::vec![Piece::sampled(pts).unwrap()]).unwrap();
        for k in 0..=20 {
            let z = g.at(k as f64 / 20.0);
            assert!((z.norm() - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn clearance_values() {
        let n = OmegaSet::positive_integers();
        let g = PiecewisePath::segment(c(0.0, 0.0), c(0.5, 0.0));
        assert!((clearance(&g, &n, 10_000) - 0.5).abs() < 1e-3);
        let loop_ = PiecewisePath::circle(c(0.0, 0.0), 2.0, 0.0);
        let one = OmegaSet::from_points(&[c(1.0, 0.0)]).unwrap();
        assert!((clearance(&loop_, &one, 10_000) - 1.0).abs() < 1e-3);
        let touching = PiecewisePath::segment(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(clearance(&touching, &one, 10_000), 0.0);
    }

    #[test]
    fn winding_numbers() {
        let unit = PiecewisePath::circle(c(0.0, 0.0), 1.0, 0.0);
        assert_eq!(winding_number(&unit, c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&unit, c(3.0, 0.0)).unwrap(), 0);
        assert_eq!(winding_number(&unit.reversed(), c(0.1, 0.2)).unwrap(), -1);
        assert_eq!(winding_number(&unit, c(1.0, 0.0)), Err(Error::PointOnCurve));
        let open = PiecewisePath::segment(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(winding_number(&open, c(5.0, 5.0)), Err(Error::NotClosed));
    }

    #[test]
    fn detour_loop_around_one() {
        // Lower half-circle detour from 0 to 2, back along an upper detour.
        let r = 0.25;
        let out = PiecewisePath::new(alloc::vec![
            Piece::segment(c(0.0, 0.0), c(1.0 - r, 0.0)),
            Piece::arc(c(1.0, 0.0), r, PI, 2.0 * PI),
            Piece::segment(c(1.0 + r, 0.0), c(2.0, 0.0)),
        ])
        .unwrap();
        let back = PiecewisePath::new(alloc::vec![
            Piece::segment(c(2.0, 0.0), c(1.0 + r, 0.0)),
            Piece::arc(c(1.0, 0.0), r, 0.0, PI),
            Piece::segment(c(1.0 - r, 0.0), c(0.0, 0.0)),
        ])
        .unwrap();
        let lp = out.concat(&back).unwrap();
        assert_eq!(winding_number(&lp, c(1.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn reversal_and_reparametrization() {
        let g = PiecewisePath::polyline(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 2.0)]).unwrap();
        let r = g.reversed();
        assert_eq!(r.start(), g.end());
        assert_eq!(r.end(), g.start());
        let h = g.reparametrized(2.0, 5.0).unwrap();
        assert!((h.at(3.5) - g.at(0.5)).norm() < 1e-15);
        assert!((h.velocity(2.2) * 3.0 - g.velocity(0.2 / 3.0)).norm() < 1e-12);
    }
}
