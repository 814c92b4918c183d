//! Closed-form continuable germs with explicit branch bookkeeping.
//!
//! A [`GermSource`] describes a germ at the origin by an expression whose
//! singularities are known. A [`Branch`] is that expression pinned to an
//! expansion center together with the current value of every logarithm in it,
//! so that Taylor coefficients can be regenerated exactly at each new center
//! instead of being propagated through truncated re-expansions.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::germ::{cauchy_product, taylor_shift, Germ};
use crate::omega::OmegaSet;
use crate::{C64, POINT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum GermSource {
    Const(C64),
    /// Polynomial with the given coefficients at the origin.
    Poly(Vec<C64>),
    /// `(ζ − at)^(−order)`.
    Pole {
        at: C64,
        order: u32,
    },
    /// `log(ζ − at)`, principal branch at the origin.
    Log {
        at: C64,
    },
    /// `log(1 − ζ/at)`, vanishing at the origin.
    Log1m {
        at: C64,
    },
    /// Literal truncated series, continued as the polynomial it is.
    Series(Germ),
    Sum(Vec<GermSource>),
    Product(Vec<GermSource>),
    Scale(C64, Box<GermSource>),
}

impl GermSource {
    pub fn one() -> Self {
        GermSource::Const(C64::new(1.0, 0.0))
    }

    /// `1/(ζ − ω)`.
    pub fn geom(at: C64) -> Self {
        GermSource::Pole { at, order: 1 }
    }

    pub fn log1m(at: C64) -> Self {
        GermSource::Log1m { at }
    }

    pub fn scaled(self, by: C64) -> Self {
        GermSource::Scale(by, Box::new(self))
    }

    pub fn times(self, other: GermSource) -> Self {
        GermSource::Product(vec![self, other])
    }

    pub fn plus(self, other: GermSource) -> Self {
        GermSource::Sum(vec![self, other])
    }

    /// Points where the expression is singular.
    pub fn singular_points(&self) -> Vec<C64> {
        let mut out = Vec::new();
        self.collect_singular(&mut out);
        out
    }

    fn collect_singular(&self, out: &mut Vec<C64>) {
        match self {
            GermSource::Pole { at, .. } | GermSource::Log { at } | GermSource::Log1m { at } => {
                if !out.iter().any(|p| (*p - *at).norm() <= POINT_TOL) {
                    out.push(*at);
                }
            }
            GermSource::Sum(v) | GermSource::Product(v) => v.iter().for_each(|s| s.collect_singular(out)),
            GermSource::Scale(_, s) => s.collect_singular(out),
            GermSource::Const(_) | GermSource::Poly(_) | GermSource::Series(_) => {}
        }
    }

    /// Rejects sources with a singular point outside Ω.
    pub fn check_omega(&self, omega: &OmegaSet) -> Result<()> {
        for p in self.singular_points() {
            if !omega.contains(p, POINT_TOL) {
                return Err(Error::NotOmegaContinuable { point: p });
            }
        }
        Ok(())
    }

    fn log_count(&self) -> usize {
        match self {
            GermSource::Log { .. } | GermSource::Log1m { .. } => 1,
            GermSource::Sum(v) | GermSource::Product(v) => v.iter().map(|s| s.log_count()).sum(),
            GermSource::Scale(_, s) => s.log_count(),
            _ => 0,
        }
    }

    fn initial_logs(&self, out: &mut Vec<C64>) {
        match self {
            GermSource::Log { at } => out.push((C64::new(0.0, 0.0) - *at).ln()),
            GermSource::Log1m { .. } => out.push(C64::new(0.0, 0.0)),
            GermSource::Sum(v) | GermSource::Product(v) => v.iter().for_each(|s| s.initial_logs(out)),
            GermSource::Scale(_, s) => s.initial_logs(out),
            _ => {}
        }
    }

    /// Branch at the origin.
    pub fn at_origin(&self) -> Result<Branch> {
        let zero = C64::new(0.0, 0.0);
        if self.singular_points().iter().any(|p| p.norm() <= POINT_TOL) {
            return Err(Error::SingularCenter(zero));
        }
        let mut logs = Vec::with_capacity(self.log_count());
        self.initial_logs(&mut logs);
        Ok(Branch { source: self.clone(), center: zero, logs })
    }
}

/// A source pinned to a center, with the current determination of each
/// logarithm (in expression order).
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    source: GermSource,
    center: C64,
    logs: Vec<C64>,
}

impl Branch {
    pub fn source(&self) -> &GermSource {
        &self.source
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    /// Distance from the center to the nearest singular point.
    pub fn singular_distance(&self) -> f64 {
        self.source.singular_points().iter().map(|p| (*p - self.center).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Moves the center along the straight segment to `to`, updating every
    /// logarithm by the principal log of its ratio (exact as long as the
    /// segment misses the singular points).
    pub fn advance(&mut self, to: C64) -> Result<()> {
        let from = self.center;
        for p in self.source.singular_points() {
            if segment_distance(from, to, p) <= 1e-14 * p.norm().max(1.0) {
                return Err(Error::SingularCenter(p));
            }
        }
        let mut idx = 0;
        advance_logs(&self.source, from, to, &mut self.logs, &mut idx);
        self.center = to;
        Ok(())
    }

    /// Returns a copy advanced to `to`.
    pub fn advanced(&self, to: C64) -> Result<Branch> {
        let mut b = self.clone();
        b.advance(to)?;
        Ok(b)
    }

    /// Value at the center.
    pub fn value(&self) -> C64 {
        let mut idx = 0;
        value(&self.source, self.center, &self.logs, &mut idx)
    }

    /// Taylor coefficients at the center up to `order`.
    pub fn coefficients(&self, order: usize) -> Vec<C64> {
        let mut idx = 0;
        taylor(&self.source, self.center, &self.logs, &mut idx, order)
    }

    /// Germ at the center with the given certified radius.
    pub fn germ(&self, order: usize, radius: f64) -> Germ {
        Germ::new(self.center, self.coefficients(order), radius).expect("positive radius")
    }
}

fn segment_distance(a: C64, b: C64, p: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let u = ((p - a).re * d.re + (p - a).im * d.im) / len2;
    (a + d * u.clamp(0.0, 1.0) - p).norm()
}

fn advance_logs(s: &GermSource, from: C64, to: C64, logs: &mut [C64], idx: &mut usize) {
    match s {
        GermSource::Log { at } | GermSource::Log1m { at } => {
            logs[*idx] += ((to - *at) / (from - *at)).ln();
            *idx += 1;
        }
        GermSource::Sum(v) | GermSource::Product(v) => v.iter().for_each(|x| advance_logs(x, from, to, logs, idx)),
        GermSource::Scale(_, x) => advance_logs(x, from, to, logs, idx),
        _ => {}
    }
}

fn value(s: &GermSource, c: C64, logs: &[C64], idx: &mut usize) -> C64 {
    match s {
        GermSource::Const(v) => *v,
        GermSource::Poly(p) => crate::germ::horner(p, c),
        GermSource::Pole { at, order } => (c - *at).powi(-(*order as i32)),
        GermSource::Log { .. } | GermSource::Log1m { .. } => {
            let v = logs[*idx];
            *idx += 1;
            v
        }
        GermSource::Series(g) => g.eval_unchecked(c),
        GermSource::Sum(v) => v.iter().map(|x| value(x, c, logs, idx)).sum(),
        GermSource::Product(v) => v.iter().map(|x| value(x, c, logs, idx)).product(),
        GermSource::Scale(k, x) => *k * value(x, c, logs, idx),
    }
}

fn taylor(s: &GermSource, c: C64, logs: &[C64], idx: &mut usize, order: usize) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    match s {
        GermSource::Const(v) => {
            let mut out = vec![zero; order + 1];
            out[0] = *v;
            out
        }
        GermSource::Poly(p) => {
            let mut out = taylor_shift(p, c);
            out.resize(order + 1, zero);
            out
        }
        GermSource::Series(g) => {
            let mut out = taylor_shift(g.coeffs(), c - g.center());
            out.resize(order + 1, zero);
            out
        }
        GermSource::Pole { at, order: m } => {
            // (c−ω)^{−m} Σ C(m+k−1,k) (−x/(c−ω))^k
            let w = c - *at;
            let q = -w.inv();
            let mut out = Vec::with_capacity(order + 1);
            let mut b = w.powi(-(*m as i32));
            for k in 0..=order {
                out.push(b);
                b = b * q * ((*m as f64 + k as f64) / (k as f64 + 1.0));
            }
            out
        }
        GermSource::Log { at } => {
            // L + Σ (−1)^{k+1}/k (x/(c−ω))^k
            let l = logs[*idx];
            *idx += 1;
            let q = (c - *at).inv();
            let mut out = vec![zero; order + 1];
            out[0] = l;
            let mut p = C64::new(1.0, 0.0);
            for (k, slot) in out.iter_mut().enumerate().skip(1) {
                p *= q;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                *slot = p * (sign / k as f64);
            }
            out
        }
        GermSource::Log1m { at } => {
            // L − Σ (x/(ω−c))^k / k
            let l = logs[*idx];
            *idx += 1;
            let q = (*at - c).inv();
            let mut out = vec![zero; order + 1];
            out[0] = l;
            let mut p = C64::new(1.0, 0.0);
            for (k, slot) in out.iter_mut().enumerate().skip(1) {
                p *= q;
                *slot = -p / k as f64;
            }
            out
        }
        GermSource::Sum(v) => {
            let mut out = vec![zero; order + 1];
            for x in v {
                for (o, a) in out.iter_mut().zip(taylor(x, c, logs, idx, order)) {
                    *o += a;
                }
            }
            out
        }
        GermSource::Product(v) => {
            let mut out = vec![zero; order + 1];
            out[0] = C64::new(1.0, 0.0);
            for x in v {
                out = cauchy_product(&out, &taylor(x, c, logs, idx, order), order);
            }
            out
        }
        GermSource::Scale(k, x) => taylor(x, c, logs, idx, order).into_iter().map(|a| a * *k).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::c;
    use core::f64::consts::PI;

    #[test]
    fn coefficients_at_origin() {
        let b = GermSource::log1m(c(1.0, 0.0)).scaled(c(-1.0, 0.0)).at_origin().unwrap();
        let a = b.coefficients(8);
        assert_eq!(a[0], c(0.0, 0.0));
        for (k, x) in a.iter().enumerate().skip(1) {
            assert!((*x - c(1.0 / k as f64, 0.0)).norm() < 1e-15);
        }
        // 1/(ζ−2) = −½ Σ (ζ/2)^k
        let g = GermSource::geom(c(2.0, 0.0)).at_origin().unwrap().coefficients(6);
        for (k, x) in g.iter().enumerate() {
            assert!((*x + c(0.5f64.powi(k as i32 + 1), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn regenerated_coefficients_are_exact() {
        // 1/(1−ζ) = −1/(ζ−1); at −0.5 the coefficients are (2/3)^{k+1}.
        let b = GermSource::geom(c(1.0, 0.0)).scaled(c(-1.0, 0.0)).at_origin().unwrap();
        let moved = b.advanced(c(-0.5, 0.0)).unwrap();
        for (k, x) in moved.coefficients(64).iter().enumerate() {
            let exact = (2.0f64 / 3.0).powi(k as i32 + 1);
            assert!((*x - c(exact, 0.0)).norm() <= 1e-14 * exact.max(1e-300) + 1e-300, "k={k}");
        }
    }

    #[test]
    fn log_branch_tracking() {
        let mut b = GermSource::log1m(c(1.0, 0.0)).at_origin().unwrap();
        // Once around 1 counterclockwise.
        b.advance(c(0.5, 0.0)).unwrap();
        for k in 1..=64 {
            let th = PI + 2.0 * PI * k as f64 / 64.0;
            b.advance(c(1.0, 0.0) + C64::from_polar(0.5, th)).unwrap();
        }
        b.advance(c(0.0, 0.0)).unwrap();
        assert!((b.value() - c(0.0, 2.0 * PI)).norm() < 1e-13);
        assert!(matches!(b.advance(c(2.0, 0.0)), Err(Error::SingularCenter(_))));
    }

    #[test]
    fn products_and_singular_sets() {
        let s = GermSource::geom(c(2.0, 0.0)).times(GermSource::Log { at: c(1.0, 0.0) });
        assert_eq!(s.singular_points().len(), 2);
        let b = s.at_origin().unwrap();
        // ψ(0)·log(−1) = (−½)(iπ)
        assert!((b.value() - c(0.0, -PI / 2.0)).norm() < 1e-15);
        assert!((b.coefficients(4)[0] - b.value()).norm() < 1e-15);
        let omega = OmegaSet::from_points(&[c(1.0, 0.0)]).unwrap();
        assert_eq!(s.check_omega(&omega), Err(Error::NotOmegaContinuable { point: c(2.0, 0.0) }));
        assert!(GermSource::Log { at: c(0.0, 0.0) }.at_origin().is_err());
    }

    #[test]
    fn series_is_shifted_exactly() {
        let p = Germ::new(c(0.0, 0.0), vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1.0).unwrap();
        let b = GermSource::Series(p).at_origin().unwrap().advanced(c(1.0, 0.0)).unwrap();
        assert_eq!(b.value(), c(6.0, 0.0));
        assert_eq!(b.coefficients(3), vec![c(6.0, 0.0), c(8.0, 0.0), c(3.0, 0.0), c(0.0, 0.0)]);
    }
}
