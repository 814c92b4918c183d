//! The non-autonomous vector field
//! `X(ζ, t) = η(ζ) / (η(ζ) + η(γ(t) − ζ)) · γ′(t)` and its flow.
//!
//! Points of the zero set of `η` are fixed, and `ζ ↦ γ(t) − ζ` maps
//! trajectories to trajectories, which is what makes flowed paths symmetric.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mollifier::Mollifier;
#[allow(unused_imports)]
use crate::num::Float;
use crate::path::PiecewisePath;
use crate::C64;

/// Below this the denominator is treated as zero.
const DENOMINATOR_FLOOR: f64 = 1e-300;

/// `X` bound to a mollifier and a path.
#[derive(Debug, Clone, Copy)]
pub struct Flow<'a> {
    pub mollifier: &'a Mollifier,
    pub path: &'a PiecewisePath,
}

fn field_at(m: &Mollifier, gamma: C64, dgamma: C64, z: C64, t: f64) -> Result<C64> {
    let a = m.eval(z);
    let b = m.eval(gamma - z);
    let d = a + b;
    if !(d > DENOMINATOR_FLOOR) {
        return Err(Error::VanishingDenominator { zeta: z, t });
    }
    Ok(dgamma * (a / d))
}

/// `X(ζ, t)`.
pub fn vector_field(m: &Mollifier, path: &PiecewisePath, z: C64, t: f64) -> Result<C64> {
    Flow { mollifier: m, path }.field(z, t)
}

/// `Φ^{t0,t1}(ζ0)` by classical RK4 with about `n_steps` equal steps,
/// split at the path knots so that no step straddles a corner.
pub fn flow(m: &Mollifier, path: &PiecewisePath, z0: C64, t0: f64, t1: f64, n_steps: usize) -> Result<C64> {
    Flow { mollifier: m, path }.transport(z0, t0, t1, n_steps)
}

impl<'a> Flow<'a> {
    pub fn new(mollifier: &'a Mollifier, path: &'a PiecewisePath) -> Self {
        Self { mollifier, path }
    }

    pub fn field(&self, z: C64, t: f64) -> Result<C64> {
        let (a, b) = self.path.domain();
        if !(t >= a && t <= b) {
            return Err(Error::OutOfDomain { t, a, b });
        }
        field_at(self.mollifier, self.path.at(t), self.path.velocity(t), z, t)
    }

    fn field_on(&self, k: usize, z: C64, t: f64) -> Result<C64> {
        field_at(self.mollifier, self.path.eval_on_piece(k, t), self.path.velocity_on_piece(k, t), z, t)
    }

    /// One RK4 step on piece `k`.
    fn rk4(&self, k: usize, z: C64, t: f64, h: f64) -> Result<C64> {
        let k1 = self.field_on(k, z, t)?;
        let k2 = self.field_on(k, z + k1 * (0.5 * h), t + 0.5 * h)?;
        let k3 = self.field_on(k, z + k2 * (0.5 * h), t + 0.5 * h)?;
        let k4 = self.field_on(k, z + k3 * h, t + h)?;
        Ok(z + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0))
    }

    /// `n` equal RK4 steps from `t0` to `t1`, both inside piece `k`.
    pub(crate) fn steps_on_piece(&self, k: usize, z0: C64, t0: f64, t1: f64, n: usize) -> Result<C64> {
        let n = n.max(1);
        let h = (t1 - t0) / n as f64;
        let mut z = z0;
        for i in 0..n {
            z = self.rk4(k, z, t0 + h * i as f64, h)?;
        }
        Ok(z)
    }

    /// Flow map from `t0` to `t1` (either direction).
    pub fn transport(&self, z0: C64, t0: f64, t1: f64, n_steps: usize) -> Result<C64> {
        let (a, b) = self.path.domain();
        for t in [t0, t1] {
            if !(t >= a && t <= b) {
                return Err(Error::OutOfDomain { t, a, b });
            }
        }
        if t0 == t1 {
            return Ok(z0);
        }
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        let mut cuts: Vec<f64> = Vec::new();
        cuts.push(lo);
        cuts.extend(self.path.knots().iter().copied().filter(|&k| k > lo && k < hi));
        cuts.push(hi);
        if t0 > t1 {
            cuts.reverse();
        }
        let total = hi - lo;
        let mut z = z0;
        for w in cuts.windows(2) {
            let k = self.path.piece_at(0.5 * (w[0] + w[1]));
            let n = ((n_steps as f64) * (w[1] - w[0]).abs() / total).ceil() as usize;
            z = self.steps_on_piece(k, z, w[0], w[1], n)?;
        }
        Ok(z)
    }
}
