//! The C¹ cutoff `η: ℂ → [0, 1]` vanishing exactly on `{0} ∪ Ω̄_ε`.
//!
//! `η` is a product of radial factors `χ(|ζ − ω|²)`, one per point of Ω, and
//! optionally a factor `χ₀(|ζ|²)` for the origin. Only the finitely many
//! factors whose support reaches `ζ` are evaluated.

use crate::error::{Error, Result};
use crate::omega::OmegaSet;
use crate::C64;

/// Quintic smootherstep `6u⁵ − 15u⁴ + 10u³` on `[0, 1]`, clamped outside.
fn smootherstep(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        (0.0, 0.0)
    } else if u >= 1.0 {
        (1.0, 0.0)
    } else {
        let u2 = u * u;
        let v = u2 * u * (10.0 + u * (-15.0 + 6.0 * u));
        let d = 30.0 * u2 * (1.0 - u) * (1.0 - u);
        (v, d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mollifier {
    omega: OmegaSet,
    epsilon: f64,
    include_origin: bool,
    origin_factor: bool,
}

impl Mollifier {
    /// `ε = 0` gives the variant whose zero set is exactly Ω (plus the origin
    /// when requested).
    pub fn build(omega: &OmegaSet, epsilon: f64, include_origin: bool) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument("epsilon must be finite and non-negative"));
        }
        if epsilon > 0.0 {
            let separation = omega.min_separation(2.0 * omega.extent() + 4.0)?;
            if 2.0 * epsilon >= separation {
                return Err(Error::EpsilonTooLarge { epsilon, separation });
            }
        }
        let origin_factor = include_origin && omega.distance(C64::new(0.0, 0.0)) > epsilon;
        Ok(Self { omega: omega.clone(), epsilon, include_origin, origin_factor })
    }

    pub fn omega(&self) -> &OmegaSet {
        &self.omega
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn include_origin(&self) -> bool {
        self.include_origin
    }

    /// Factor `χ(|d|²)` around one point and its gradient in `(re, im)`.
    fn factor(&self, d: C64, eps: f64) -> (f64, [f64; 2]) {
        let x = d.norm_sqr();
        let lo = eps * eps;
        let width = (1.0 + eps) * (1.0 + eps) - lo;
        let (v, s) = smootherstep((x - lo) / width);
        let k = 2.0 * s / width;
        (v, [k * d.re, k * d.im])
    }

    /// Visits every factor that differs from 1 at `z`.
    fn for_each_factor(&self, z: C64, mut f: impl FnMut(f64, [f64; 2])) {
        let reach = 1.0 + self.epsilon;
        if self.origin_factor && z.norm_sqr() < 1.0 {
            let (v, g) = self.factor(z, 0.0);
            f(v, g);
        }
        let eps = self.epsilon;
        self.omega
            .for_each_in_disk(z, reach, |w| {
                let (v, g) = self.factor(z - w, eps);
                if v < 1.0 {
                    f(v, g);
                }
            })
            .expect("finite disk");
    }

    pub fn eval(&self, z: C64) -> f64 {
        let mut p = 1.0;
        self.for_each_factor(z, |v, _| p *= v);
        p
    }

    pub fn gradient(&self, z: C64) -> [f64; 2] {
        self.eval_with_gradient(z).1
    }

    /// Product rule over the active factors.
    pub fn eval_with_gradient(&self, z: C64) -> (f64, [f64; 2]) {
        let mut value = 1.0;
        let mut grad = [0.0, 0.0];
        self.for_each_factor(z, |v, g| {
            grad = [grad[0] * v + value * g[0], grad[1] * v + value * g[1]];
            value *= v;
        });
        (value, grad)
    }

    /// Distance from `z` to the intended zero set `{0} ∪ Ω̄_ε`.
    pub fn zero_set_distance(&self, z: C64) -> f64 {
        let d = (self.omega.distance(z) - self.epsilon).max(0.0);
        if self.include_origin {
            d.min(z.norm())
        } else {
            d
        }
    }
}
