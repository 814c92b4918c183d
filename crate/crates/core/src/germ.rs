//! Truncated Taylor germs.
//!
//! A [`Germ`] is the numerical stand-in for a holomorphic germ: the
//! coefficients `a₀ … a_N` of its expansion at `center`, together with a
//! certified lower bound on the radius of validity.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::num::Float;
use crate::C64;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;

/// Default tail tolerance used by the continuation engine.
pub const TAIL_TOL: f64 = 1e-12;

/// Evaluation is only allowed within this fraction of the radius.
pub const SAFE_FRACTION: f64 = 0.7;

/// Recentering is only allowed within this fraction of the radius.
pub const RECENTER_FRACTION: f64 = 0.5;

/// Value of a germ at a point plus a geometric tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: C64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Germ {
    center: C64,
    coeffs: Vec<C64>,
    radius: f64,
}

impl Germ {
    pub fn new(center: C64, coeffs: Vec<C64>, radius: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("germ needs at least one coefficient"));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("germ radius must be positive"));
        }
        Ok(Self { center, coeffs, radius })
    }

    /// The constant germ `value` (entire, so the radius is infinite).
    pub fn constant(center: C64, value: C64, order: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        Self { center, coeffs, radius: f64::INFINITY }
    }

    pub fn zero(center: C64, order: usize) -> Self {
        Self::constant(center, C64::new(0.0, 0.0), order)
    }

    /// `1/(1-ζ/ω)` style geometric series: coefficients `ratio^k`, radius `1/|ratio|`.
    pub fn geometric(ratio: C64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut p = C64::new(1.0, 0.0);
        for _ in 0..=order {
            coeffs.push(p);
            p *= ratio;
        }
        let radius = if ratio.norm() == 0.0 { f64::INFINITY } else { 1.0 / ratio.norm() };
        Self { center: C64::new(0.0, 0.0), coeffs, radius }
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_center(mut self, center: C64) -> Self {
        self.center = center;
        self
    }

    /// Truncates or zero-pads to the given order.
    pub fn with_order(mut self, order: usize) -> Self {
        self.coeffs.resize(order + 1, C64::new(0.0, 0.0));
        self
    }

    /// Horner evaluation without the safe-disk check.
    pub fn eval_unchecked(&self, z: C64) -> C64 {
        horner(&self.coeffs, z - self.center)
    }

    pub fn eval(&self, z: C64) -> Result<Evaluation> {
        let d = (z - self.center).norm();
        let limit = SAFE_FRACTION * self.radius;
        if d > limit {
            return Err(Error::OutsideSafeDisk { distance: d, limit });
        }
        Ok(Evaluation { value: self.eval_unchecked(z), error: self.tail_estimate(d) })
    }

    /// Geometric bound on the truncated tail at distance `d`, extrapolated
    /// from the last few coefficients.
    pub fn tail_estimate(&self, d: f64) -> f64 {
        if d == 0.0 {
            return 0.0;
        }
        let n = self.order();
        let lo = n.saturating_sub(3);
        let mut m: f64 = 0.0;
        for k in lo..=n {
            m = m.max(self.coeffs[k].norm() * d.powi(k as i32));
        }
        if !self.radius.is_finite() {
            return m * f64::EPSILON;
        }
        let q = (d / self.radius).min(0.999);
        m * q / (1.0 - q)
    }

    /// `|a_N| r^N ≤ tol · max_k |a_k| r^k`.
    pub fn tail_ok(&self, r: f64, tol: f64) -> bool {
        let mut max = 0.0f64;
        let mut pow = 1.0;
        for a in &self.coeffs {
            max = max.max(a.norm() * pow);
            pow *= r;
        }
        let last = self.coeffs[self.order()].norm() * r.powi(self.order() as i32);
        last <= tol * max || max == 0.0
    }

    /// Coefficients of `x ↦ p(h + x)` where `p` is the truncated series in
    /// the local variable.
    pub fn shifted_coeffs(&self, h: C64) -> Vec<C64> {
        taylor_shift(&self.coeffs, h)
    }

    /// Re-expansion at `new_center`; the radius shrinks by the shift.
    pub fn recenter(&self, new_center: C64) -> Result<Germ> {
        let h = new_center - self.center;
        let shift = h.norm();
        if shift > RECENTER_FRACTION * self.radius {
            return Err(Error::ShiftTooLarge { shift, radius: self.radius });
        }
        Ok(Germ { center: new_center, coeffs: taylor_shift(&self.coeffs, h), radius: self.radius - shift })
    }

    fn check_center(&self, other: &Germ) -> Result<()> {
        if (self.center - other.center).norm() > 1e-12 * self.center.norm().max(1.0) {
            return Err(Error::CenterMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Germ) -> Result<Germ> {
        self.check_center(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        let coeffs =
            (0..n).map(|k| *self.coeffs.get(k).unwrap_or(&zero) + *other.coeffs.get(k).unwrap_or(&zero)).collect();
        Ok(Germ { center: self.center, coeffs, radius: self.radius.min(other.radius) })
    }

    pub fn sub(&self, other: &Germ) -> Result<Germ> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, by: C64) -> Germ {
        Germ { center: self.center, coeffs: self.coeffs.iter().map(|a| *a * by).collect(), radius: self.radius }
    }

    /// Truncated Cauchy product at the smaller of the two orders.
    pub fn multiply(&self, other: &Germ) -> Result<Germ> {
        self.check_center(other)?;
        let n = self.order().min(other.order());
        Ok(Germ {
            center: self.center,
            coeffs: cauchy_product(&self.coeffs, &other.coeffs, n),
            radius: self.radius.min(other.radius),
        })
    }

    pub fn differentiate(&self) -> Germ {
        let coeffs = if self.coeffs.len() == 1 {
            vec![C64::new(0.0, 0.0)]
        } else {
            self.coeffs.iter().enumerate().skip(1).map(|(k, a)| *a * k as f64).collect()
        };
        Germ { center: self.center, coeffs, radius: self.radius }
    }

    /// Primitive vanishing at the origin; the order grows by one.
    pub fn integrate_from_zero(&self) -> Result<Germ> {
        if self.center.norm() != 0.0 {
            return Err(Error::NotAtOrigin);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C64::new(0.0, 0.0));
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, a)| *a / (k + 1) as f64));
        Ok(Germ { center: self.center, coeffs, radius: self.radius })
    }

    /// Largest coefficient difference against another germ of the same center.
    pub fn max_coeff_diff(&self, other: &Germ) -> f64 {
        let zero = C64::new(0.0, 0.0);
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (*self.coeffs.get(k).unwrap_or(&zero) - *other.coeffs.get(k).unwrap_or(&zero)).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn horner(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * x + *a)
}

/// Repeated synthetic division: exact re-expansion of a polynomial at `h`.
pub(crate) fn taylor_shift(coeffs: &[C64], h: C64) -> Vec<C64> {
    let mut b = coeffs.to_vec();
    if h.norm() == 0.0 {
        return b;
    }
    let n = b.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = b[j + 1] * h;
            b[j] += t;
        }
    }
    b
}

pub(crate) fn cauchy_product(a: &[C64], b: &[C64], order: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += *x * *y;
        }
    }
    out
}

/// `j!·k!/(j+k+1)!` through log-gamma differences (no factorial overflow).
pub fn beta_weight(j: usize, k: usize) -> f64 {
    let (j, k) = (j as f64, k as f64);
    libm::exp(libm::lgamma(j + 1.0) + libm::lgamma(k + 1.0) - libm::lgamma(j + k + 2.0))
}

/// Coefficients of `∫₀^ζ f(ξ) g(ζ−ξ) dξ` from those of `f` and `g` at the
/// origin, truncated at `order`.
///
/// Terms `(j,k)` and `(k,j)` are accumulated as a pair so the result is
/// bitwise symmetric in the two arguments.
pub(crate) fn convolve_coeffs(a: &[C64], b: &[C64], order: usize) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    let get = |v: &[C64], i: usize| *v.get(i).unwrap_or(&zero);
    let mut out = vec![zero; order + 1];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let m = n - 1;
        let mut acc = zero;
        for j in 0..=m / 2 {
            let k = m - j;
            let w = beta_weight(j, k);
            let term = if j == k { get(a, j) * get(b, k) } else { get(a, j) * get(b, k) + get(a, k) * get(b, j) };
            acc += term * w;
        }
        *slot = acc;
    }
    out
}

/// Convolution of two germs at the origin.
pub fn convolve_at_origin(phi: &Germ, psi: &Germ, order: usize) -> Result<Germ> {
    if phi.center.norm() != 0.0 || psi.center.norm() != 0.0 {
        return Err(Error::NotAtOrigin);
    }
    Ok(Germ {
        center: C64::new(0.0, 0.0),
        coeffs: convolve_coeffs(&phi.coeffs, &psi.coeffs, order),
        radius: phi.radius.min(psi.radius),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::c;

    fn log1m_series(order: usize) -> Germ {
        // −log(1−ζ) = Σ ζⁿ/n
        let coeffs = (0..=order).map(|n| if n == 0 { c(0.0, 0.0) } else { c(1.0 / n as f64, 0.0) }).collect();
        Germ::new(c(0.0, 0.0), coeffs, 1.0).unwrap()
    }

    /// Composite Simpson on the real segment [0, x].
    fn simpson(f: impl Fn(f64) -> f64, x: f64, n: usize) -> f64 {
        let h = x / n as f64;
        let mut s = f(0.0) + f(x);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn log_series_matches_quadrature() {
        let oracle = simpson(|x| 1.0 / (1.0 - x), 0.5, 2000);
        let v = log1m_series(64).eval(c(0.5, 0.0)).unwrap();
        assert!((v.value - c(oracle, 0.0)).norm() < 1e-9);
        assert!(v.error < 1e-15);
    }

    #[test]
    fn constants_and_geometric() {
        let one = Germ::constant(c(0.0, 0.0), c(1.0, 0.0), 8);
        assert_eq!(one.eval(c(123.0, -7.0)).unwrap().value, c(1.0, 0.0));
        let g = Germ::geometric(c(1.0, 0.0), 64);
        assert!((g.eval(c(-0.5, 0.0)).unwrap().value - c(2.0 / 3.0, 0.0)).norm() < 1e-9);
        assert!(matches!(g.eval(c(0.8, 0.0)), Err(Error::OutsideSafeDisk { .. })));
    }

    #[test]
    fn recentering() {
        let one = Germ::constant(c(0.0, 0.0), c(1.0, 0.0), 4);
        let moved = one.recenter(c(3.0, 4.0)).unwrap();
        assert_eq!(moved.coeffs()[0], c(1.0, 0.0));
        assert!(moved.coeffs()[1..].iter().all(|a| a.norm() == 0.0));

        let g = Germ::geometric(c(1.0, 0.0), 64);
        let r = g.recenter(c(-0.5, 0.0)).unwrap();
        assert_eq!(r.radius(), 0.5);
        // Low coefficients agree with (2/3)^{k+1}; higher ones carry the
        // truncation of the original series.
        for k in 0..=6 {
            let exact = (2.0f64 / 3.0).powi(k as i32 + 1);
            assert!((r.coeffs()[k] - c(exact, 0.0)).norm() < 1e-8, "k={k}");
        }
        for z in [c(-0.75, 0.0), c(-0.5, 0.25), c(-0.3, -0.1)] {
            let exact = 1.0 / (c(1.0, 0.0) - z);
            assert!((r.eval_unchecked(z) - exact).norm() < 1e-8);
        }
        assert!(matches!(g.recenter(c(0.6, 0.0)), Err(Error::ShiftTooLarge { .. })));
    }

    #[test]
    fn arithmetic() {
        let geo = Germ::geometric(c(1.0, 0.0), 32);
        let one_minus = Germ::new(c(0.0, 0.0), vec![c(1.0, 0.0), c(-1.0, 0.0)], f64::INFINITY).unwrap();
        let p = geo.multiply(&one_minus.with_order(32)).unwrap();
        assert_eq!(p.coeffs()[0], c(1.0, 0.0));
        assert!(p.coeffs()[1..].iter().all(|a| a.norm() == 0.0));

        let d = log1m_series(33).differentiate();
        for (k, a) in d.coeffs().iter().enumerate() {
            assert!((*a - c(1.0, 0.0)).norm() < 1e-12, "k={k}");
        }
        let i = geo.integrate_from_zero().unwrap();
        assert!(i.max_coeff_diff(&log1m_series(33)) < 1e-15);

        let shifted = geo.recenter(c(0.1, 0.0)).unwrap();
        assert_eq!(geo.add(&shifted), Err(Error::CenterMismatch));
        assert_eq!(shifted.integrate_from_zero(), Err(Error::NotAtOrigin));
    }

    #[test]
    fn convolution_basics() {
        let one = Germ::constant(c(0.0, 0.0), c(1.0, 0.0), 8);
        let z = convolve_at_origin(&one, &one, 8).unwrap();
        assert_eq!(z.coeffs()[1], c(1.0, 0.0));
        assert!(z.coeffs().iter().enumerate().all(|(k, a)| k == 1 || a.norm() == 0.0));

        let zeta = Germ::new(c(0.0, 0.0), vec![c(0.0, 0.0), c(1.0, 0.0)], f64::INFINITY).unwrap().with_order(8);
        let cube = convolve_at_origin(&zeta, &zeta, 8).unwrap();
        for (k, a) in cube.coeffs().iter().enumerate() {
            let expect = if k == 3 { 1.0 / 6.0 } else { 0.0 };
            assert!((*a - c(expect, 0.0)).norm() < 1e-15);
        }
        assert!(matches!(
            convolve_at_origin(&zeta.clone().with_center(c(1.0, 0.0)), &zeta, 8),
            Err(Error::NotAtOrigin)
        ));
    }

    #[test]
    fn beta_weights_match_factorials() {
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        for j in 0..10 {
            for k in 0..10 {
                let exact = fact(j) * fact(k) / fact(j + k + 1);
                assert!((beta_weight(j, k) - exact).abs() <= 1e-13 * exact);
            }
        }
        assert!(beta_weight(150, 150).is_finite());
        assert!(beta_weight(150, 150) > 0.0);
    }
}
