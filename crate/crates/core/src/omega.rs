//! The singular-support set Ω.
//!
//! Ω is a closed discrete subset of ℂ described by a finite list of points
//! plus generator rules (rays and lattices). Infinite sets are never
//! materialized: every query reduces to a bounded enumeration.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::num::Float;
use crate::num::{arg_positive, cross, dot};
use crate::{C64, POINT_TOL};

/// Hard cap on the number of candidate points a single enumeration may visit.
const MAX_ENUMERATION: usize = 20_000_000;

/// Points closer than this are considered the same point of Ω.
const DEDUP_TOL: f64 = 1e-12;

/// An infinite family of points of Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// `base + n·step` for `n = 0, 1, 2, …`.
    Ray { base: C64, step: C64 },
    /// `base + m·p1 + n·p2` for `m, n ∈ ℤ`. A zero `p2` gives the
    /// one-dimensional lattice `base + m·p1`.
    Lattice { base: C64, p1: C64, p2: C64 },
}

impl Generator {
    fn validate(&self) -> Result<()> {
        match *self {
            Generator::Ray { base, step } => {
                if !finite(base) || !finite(step) {
                    return Err(Error::MalformedGenerator("non-finite ray parameter"));
                }
                if step.norm() == 0.0 {
                    return Err(Error::MalformedGenerator("ray step is zero"));
                }
            }
            Generator::Lattice { base, p1, p2 } => {
                if !finite(base) || !finite(p1) || !finite(p2) {
                    return Err(Error::MalformedGenerator("non-finite lattice parameter"));
                }
                if p1.norm() == 0.0 {
                    return Err(Error::MalformedGenerator("first lattice period is zero"));
                }
                if p2.norm() != 0.0 && cross(p1, p2).abs() <= 1e-12 * p1.norm() * p2.norm() {
                    return Err(Error::MalformedGenerator(
                        "lattice periods are real-collinear (set would not be discrete)",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Calls `f` on every point of the rule inside the closed disk.
    fn for_each_in_disk(&self, center: C64, radius: f64, f: &mut dyn FnMut(C64)) -> Result<()> {
        let r2 = radius * radius;
        match *self {
            Generator::Ray { base, step } => {
                let Some((lo, hi)) = line_range(center - base, step, radius) else {
                    return Ok(());
                };
                let lo = lo.max(0);
                if hi < lo {
                    return Ok(());
                }
                check_count((hi - lo) as usize + 1)?;
                for n in lo..=hi {
                    let p = base + step * n as f64;
                    if (p - center).norm_sqr() <= r2 {
                        f(p);
                    }
                }
            }
            Generator::Lattice { base, p1, p2 } if p2.norm() == 0.0 => {
                let Some((lo, hi)) = line_range(center - base, p1, radius) else {
                    return Ok(());
                };
                check_count((hi - lo) as usize + 1)?;
                for n in lo..=hi {
                    let p = base + p1 * n as f64;
                    if (p - center).norm_sqr() <= r2 {
                        f(p);
                    }
                }
            }
            Generator::Lattice { base, p1, p2 } => {
                let det = cross(p1, p2);
                let d = center - base;
                let x = cross(d, p2) / det;
                let y = cross(p1, d) / det;
                let dx = radius * p2.norm() / det.abs();
                let dy = radius * p1.norm() / det.abs();
                let (m0, m1) = ((x - dx).floor() as i64 - 1, (x + dx).ceil() as i64 + 1);
                let (n0, n1) = ((y - dy).floor() as i64 - 1, (y + dy).ceil() as i64 + 1);
                check_count(((m1 - m0 + 1) as usize).saturating_mul((n1 - n0 + 1) as usize))?;
                for m in m0..=m1 {
                    for n in n0..=n1 {
                        let p = base + p1 * m as f64 + p2 * n as f64;
                        if (p - center).norm_sqr() <= r2 {
                            f(p);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact distance from `z` to the rule's points.
    fn distance(&self, z: C64) -> f64 {
        match *self {
            Generator::Ray { base, step } => {
                let t = dot(z - base, step) / step.norm_sqr();
                let n = t.round().max(0.0);
                (base + step * n - z).norm()
            }
            Generator::Lattice { base, p1, p2 } if p2.norm() == 0.0 => {
                let t = dot(z - base, p1) / p1.norm_sqr();
                (base + p1 * t.round() - z).norm()
            }
            Generator::Lattice { base, p1, p2 } => {
                let det = cross(p1, p2);
                let d = z - base;
                let x = cross(d, p2) / det;
                let y = cross(p1, d) / det;
                let guess = base + p1 * x.round() + p2 * y.round();
                let bound = (guess - z).norm();
                // Rounding is exact only for orthogonal bases; refine inside the bound.
                let mut best = bound;
                let _ = self.for_each_in_disk(z, bound, &mut |p| {
                    let d = (p - z).norm();
                    if d < best {
                        best = d;
                    }
                });
                best
            }
        }
    }

    /// A point of the rule that is not the origin.
    fn nonzero_point(&self) -> C64 {
        match *self {
            Generator::Ray { base, step } => {
                if base.norm() > DEDUP_TOL {
                    base
                } else {
                    base + step
                }
            }
            Generator::Lattice { base, p1, .. } => {
                if base.norm() > DEDUP_TOL {
                    base
                } else {
                    base + p1
                }
            }
        }
    }

    /// Smallest distance between two distinct points of the rule.
    fn spacing(&self) -> f64 {
        match *self {
            Generator::Ray { step, .. } => step.norm(),
            Generator::Lattice { p1, p2, .. } if p2.norm() == 0.0 => p1.norm(),
            Generator::Lattice { p1, p2, .. } => {
                // Shortest nonzero lattice vector: search a disk of radius min(|p1|,|p2|).
                let r = p1.norm().min(p2.norm());
                let lattice = Generator::Lattice { base: C64::new(0.0, 0.0), p1, p2 };
                let mut best = r;
                let _ = lattice.for_each_in_disk(C64::new(0.0, 0.0), r, &mut |p| {
                    let d = p.norm();
                    if d > DEDUP_TOL && d < best {
                        best = d;
                    }
                });
                best
            }
        }
    }
}

/// Integer range of `n` for which `base + n·step` can lie within `radius` of
/// a point at offset `d` from `base`; `None` if the line misses the disk.
fn line_range(d: C64, step: C64, radius: f64) -> Option<(i64, i64)> {
    let s2 = step.norm_sqr();
    let t0 = dot(d, step) / s2;
    let perp = cross(step, d).abs() / s2.sqrt();
    if perp > radius {
        return None;
    }
    let half = (radius * radius - perp * perp).max(0.0).sqrt() / s2.sqrt();
    Some(((t0 - half).floor() as i64 - 1, (t0 + half).ceil() as i64 + 1))
}

fn check_count(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION {
        Err(Error::TooManyPoints(n))
    } else {
        Ok(())
    }
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Ordering used for every reported list of points: modulus, then argument in `[0, 2π)`.
fn point_order(a: &C64, b: &C64) -> Ordering {
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > DEDUP_TOL {
        return ma.partial_cmp(&mb).unwrap_or(Ordering::Equal);
    }
    arg_positive(*a).partial_cmp(&arg_positive(*b)).unwrap_or(Ordering::Equal)
}

/// Outcome of a windowed addition-stability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditionStability {
    pub window: f64,
    /// First pair (in enumeration order) whose sum is missing from Ω.
    pub witness: Option<(C64, C64)>,
}

impl AdditionStability {
    pub fn is_stable(&self) -> bool {
        self.witness.is_none()
    }
}

/// A non-empty closed discrete subset of ℂ.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSet {
    finite: Vec<C64>,
    generators: Vec<Generator>,
}

impl OmegaSet {
    pub fn new(finite: Vec<C64>, generators: Vec<Generator>) -> Result<Self> {
        if finite.is_empty() && generators.is_empty() {
            return Err(Error::EmptyOmega);
        }
        if finite.iter().any(|z| !self::finite(*z)) {
            return Err(Error::InvalidArgument("non-finite point in omega"));
        }
        for g in &generators {
            g.validate()?;
        }
        Ok(Self { finite, generators })
    }

    pub fn from_points(points: &[C64]) -> Result<Self> {
        Self::new(points.to_vec(), Vec::new())
    }

    /// ℕ* = {1, 2, 3, …}.
    pub fn positive_integers() -> Self {
        Self {
            finite: Vec::new(),
            generators: alloc::vec![Generator::Ray { base: C64::new(1.0, 0.0), step: C64::new(1.0, 0.0) }],
        }
    }

    /// ℤ + iℤ.
    pub fn gaussian_integers() -> Self {
        Self {
            finite: Vec::new(),
            generators: alloc::vec![Generator::Lattice {
                base: C64::new(0.0, 0.0),
                p1: C64::new(1.0, 0.0),
                p2: C64::new(0.0, 1.0),
            }],
        }
    }

    /// `period·ℤ`, a one-dimensional lattice through the origin.
    pub fn lattice_1d(period: C64) -> Result<Self> {
        Self::new(
            Vec::new(),
            alloc::vec![Generator::Lattice { base: C64::new(0.0, 0.0), p1: period, p2: C64::new(0.0, 0.0) }],
        )
    }

    pub fn finite_points(&self) -> &[C64] {
        &self.finite
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Calls `f` once for every distinct point of Ω in the closed disk, in no
    /// particular order.
    pub fn for_each_in_disk(&self, center: C64, radius: f64, mut f: impl FnMut(C64)) -> Result<()> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument("disk radius must be finite and non-negative"));
        }
        let mut seen: Vec<C64> = Vec::new();
        let single_source = self.generators.len() + usize::from(!self.finite.is_empty()) == 1;
        let mut visit = |p: C64| {
            if single_source {
                f(p);
            } else if !seen.iter().any(|q| (*q - p).norm() <= DEDUP_TOL) {
                seen.push(p);
                f(p);
            }
        };
        let r2 = radius * radius;
        for &p in &self.finite {
            if (p - center).norm_sqr() <= r2 {
                visit(p);
            }
        }
        for g in &self.generators {
            g.for_each_in_disk(center, radius, &mut visit)?;
        }
        Ok(())
    }

    /// Points of Ω in the closed disk, sorted by modulus then argument.
    pub fn enumerate_in_disk(&self, center: C64, radius: f64) -> Result<Vec<C64>> {
        let mut out = Vec::new();
        self.for_each_in_disk(center, radius, |p| out.push(p))?;
        // Finite lists may repeat a point.
        out.sort_by(point_order);
        out.dedup_by(|a, b| (*a - *b).norm() <= DEDUP_TOL);
        Ok(out)
    }

    /// dist(ζ, Ω).
    pub fn distance(&self, z: C64) -> f64 {
        let mut best = f64::INFINITY;
        for &p in &self.finite {
            best = best.min((p - z).norm());
        }
        for g in &self.generators {
            best = best.min(g.distance(z));
        }
        best
    }

    /// `dist(ζ, Ω) ≤ tol`.
    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.distance(z) <= tol
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(C64::new(0.0, 0.0), DEDUP_TOL)
    }

    /// ρ = min{|ω| : ω ∈ Ω∖{0}}.
    pub fn rho(&self) -> Result<f64> {
        let mut bound = f64::INFINITY;
        for &p in &self.finite {
            if p.norm() > DEDUP_TOL {
                bound = bound.min(p.norm());
            }
        }
        for g in &self.generators {
            bound = bound.min(g.nonzero_point().norm());
        }
        if !bound.is_finite() {
            return Err(Error::NoNonzeroPoint);
        }
        let mut best = bound;
        self.for_each_in_disk(C64::new(0.0, 0.0), bound, |p| {
            let m = p.norm();
            if m > DEDUP_TOL && m < best {
                best = m;
            }
        })?;
        Ok(best)
    }

    /// Checks ω₁ + ω₂ ∈ Ω for all ω₁, ω₂ ∈ Ω with |ω₁|, |ω₂|, |ω₁+ω₂| ≤ `window`.
    pub fn is_addition_stable_window(&self, window: f64) -> Result<AdditionStability> {
        self.is_addition_stable_window_tol(window, POINT_TOL)
    }

    pub fn is_addition_stable_window_tol(&self, window: f64, tol: f64) -> Result<AdditionStability> {
        if !(window > 0.0) || !window.is_finite() {
            return Err(Error::InvalidArgument("window must be positive and finite"));
        }
        let pts = self.enumerate_in_disk(C64::new(0.0, 0.0), window)?;
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i..] {
                let s = a + b;
                if s.norm() <= window && !self.contains(s, tol) {
                    return Ok(AdditionStability { window, witness: Some((a, b)) });
                }
            }
        }
        Ok(AdditionStability { window, witness: None })
    }

    /// Smallest distance between two distinct points of Ω, taking every
    /// generator's own spacing into account and checking cross-rule pairs
    /// inside the disk of the given radius around the origin.
    pub fn min_separation(&self, window: f64) -> Result<f64> {
        let mut best = f64::INFINITY;
        for g in &self.generators {
            best = best.min(g.spacing());
        }
        let pts = self.enumerate_in_disk(C64::new(0.0, 0.0), window)?;
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        Ok(best)
    }

    /// Largest modulus of the finite points and generator parameters; a
    /// scale below which all structurally distinct behaviour of Ω lives.
    pub(crate) fn extent(&self) -> f64 {
        let mut m: f64 = 0.0;
        for p in &self.finite {
            m = m.max(p.norm());
        }
        for g in &self.generators {
            match *g {
                Generator::Ray { base, step } => m = m.max(base.norm() + step.norm()),
                Generator::Lattice { base, p1, p2 } => m = m.max(base.norm() + p1.norm() + p2.norm()),
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn two_pi_i_z() -> OmegaSet {
        OmegaSet::lattice_1d(c(0.0, 2.0 * PI)).unwrap()
    }

    #[test]
    fn membership() {
        let n = OmegaSet::positive_integers();
        assert!(n.contains(c(3.0, 0.0), 1e-9));
        assert!(!n.contains(c(0.5, 0.0), 1e-9));
        assert!(two_pi_i_z().contains(c(0.0, 2.0 * PI), 1e-9));
        assert!(two_pi_i_z().contains_origin());
        assert!(!n.contains_origin());
    }

    #[test]
    fn distances() {
        let g = OmegaSet::gaussian_integers();
        assert!((g.distance(c(0.5, 0.5)) - 0.5f64.sqrt()).abs() < 1e-15);
        let f = OmegaSet::from_points(&[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(f.distance(c(0.0, 0.0)), 1.0);
        assert_eq!(OmegaSet::positive_integers().distance(c(-3.0, 0.0)), 4.0);
    }

    #[test]
    fn skewed_lattice_distance_is_exact() {
        let o = OmegaSet::new(
            Vec::new(),
            alloc::vec![Generator::Lattice { base: c(0.0, 0.0), p1: c(1.0, 0.0), p2: c(0.9, 0.1) }],
        )
        .unwrap();
        let z = c(0.47, 0.05);
        let brute = o.enumerate_in_disk(z, 3.0).unwrap().iter().map(|p| (*p - z).norm()).fold(f64::INFINITY, f64::min);
        assert!((o.distance(z) - brute).abs() < 1e-15);
    }

    #[test]
    fn enumeration() {
        let n = OmegaSet::positive_integers();
        assert_eq!(n.enumerate_in_disk(c(0.0, 0.0), 3.5).unwrap(), alloc::vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let pts = two_pi_i_z().enumerate_in_disk(c(0.0, 0.0), 7.0).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], c(0.0, 0.0));
        assert!((pts[1] - c(0.0, 2.0 * PI)).norm() < 1e-15);
        assert!((pts[2] - c(0.0, -2.0 * PI)).norm() < 1e-15);
        let single = OmegaSet::from_points(&[c(1.0, 1.0)]).unwrap();
        assert!(single.enumerate_in_disk(c(0.0, 0.0), 1.0).unwrap().is_empty());
    }

    #[test]
    fn duplicates_are_merged() {
        let o = OmegaSet::new(
            alloc::vec![c(2.0, 0.0), c(2.0, 0.0)],
            alloc::vec![Generator::Ray { base: c(1.0, 0.0), step: c(1.0, 0.0) }],
        )
        .unwrap();
        assert_eq!(o.enumerate_in_disk(c(0.0, 0.0), 2.5).unwrap().len(), 2);
        let mut count = 0;
        o.for_each_in_disk(c(0.0, 0.0), 2.5, |_| count += 1).unwrap();
        assert_eq!(count, 2);
    }

    #[test]
    fn malformed_rules() {
        assert!(matches!(
            OmegaSet::new(Vec::new(), alloc::vec![Generator::Ray { base: c(1.0, 0.0), step: c(0.0, 0.0) }]),
            Err(Error::MalformedGenerator(_))
        ));
        assert!(matches!(
            OmegaSet::new(
                Vec::new(),
                alloc::vec![Generator::Lattice { base: c(0.0, 0.0), p1: c(1.0, 0.0), p2: c(2.0, 0.0) }]
            ),
            Err(Error::MalformedGenerator(_))
        ));
        assert_eq!(OmegaSet::new(Vec::new(), Vec::new()), Err(Error::EmptyOmega));
    }

    #[test]
    fn rho_values() {
        assert!((two_pi_i_z().rho().unwrap() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(OmegaSet::positive_integers().rho().unwrap(), 1.0);
        let f = OmegaSet::from_points(&[c(-0.5, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(f.rho().unwrap(), 0.5);
        let zero = OmegaSet::from_points(&[c(0.0, 0.0)]).unwrap();
        assert_eq!(zero.rho(), Err(Error::NoNonzeroPoint));
    }

    #[test]
    fn addition_stability() {
        assert!(OmegaSet::positive_integers().is_addition_stable_window(100.0).unwrap().is_stable());
        let f = OmegaSet::from_points(&[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let r = f.is_addition_stable_window(10.0).unwrap();
        assert_eq!(r.witness, Some((c(1.0, 0.0), c(2.0, 0.0))));
        assert!(OmegaSet::gaussian_integers().is_addition_stable_window(50.0).unwrap().is_stable());
    }

    #[test]
    fn separation() {
        assert!((two_pi_i_z().min_separation(10.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(OmegaSet::gaussian_integers().min_separation(5.0).unwrap(), 1.0);
    }
}
