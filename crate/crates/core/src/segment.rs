//! Splitting a path at its zeros for the symmetric-homotopy construction.
//!
//! Around every zero `t_j` of γ we take the component `K_j` of
//! `{|γ| ≤ ε/2}` that contains it; the closures of what is left are the
//! intervals `J_j`. On `J_j` the path stays away from both 0 and `Ω_δ`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::dot;
#[allow(unused_imports)]
use crate::num::Float;
use crate::omega::OmegaSet;
use crate::path::{clearance, PiecewisePath};

/// Samples used for the certified clearance δ.
pub const CLEARANCE_SAMPLES: usize = 20_000;

const MAX_ZERO_SAMPLES: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalKind {
    /// `J_j`: handled by the flow of the vector field.
    Flow,
    /// `K_j`: γ stays in the closed disk of radius ε/2; handled by the
    /// linear homotopy.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub kind: IntervalKind,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub zero_times: Vec<f64>,
    /// `J₀, K₁, J₁, …, K_N, J_N` (components containing several zeros are
    /// merged, so there may be fewer `K`s than zeros).
    pub intervals: Vec<Interval>,
    pub delta: f64,
    pub delta0: f64,
    pub epsilon: f64,
    pub rho: f64,
}

impl Segmentation {
    /// Number of linear stages.
    pub fn linear_count(&self) -> usize {
        self.intervals.iter().filter(|i| i.kind == IntervalKind::Linear).count()
    }
}

pub fn segment_for_key_lemma(path: &PiecewisePath, omega: &OmegaSet) -> Result<Segmentation> {
    let (a, b) = path.domain();
    let rho = omega.rho()?;
    let g0 = path.start().norm();
    let g1 = path.end().norm();
    if !(g0 > 0.0 && g0 < rho) {
        return Err(Error::Precondition("the path must start in the punctured disk of radius rho"));
    }
    if g1 == 0.0 {
        return Err(Error::Precondition("the path ends at the origin; extend it first"));
    }
    let delta = clearance(path, omega, CLEARANCE_SAMPLES);
    if !(delta > 0.0) {
        return Err(Error::Precondition("the path does not keep a positive distance from omega"));
    }
    let delta0 = 0.5 * (0.5 * delta).min(rho - g0);
    let length = path.length();

    // ε depends on the number of zeros, and the sampling resolution on ε.
    let mut eps = g0.min(g1).min(delta0);
    let mut zeros;
    loop {
        let n = ((100.0 * length / eps).ceil() as usize).max(1000);
        if n > MAX_ZERO_SAMPLES {
            return Err(Error::Segmentation("zero search needs more samples than allowed"));
        }
        zeros = find_zeros(path, n)?;
        let next = g0.min(g1).min(delta0 / (zeros.len() + 1) as f64);
        let needed = ((100.0 * length / next).ceil() as usize).max(1000);
        eps = next;
        if needed <= n {
            break;
        }
    }

    let mut ks: Vec<(f64, f64)> = Vec::new();
    for &tz in &zeros {
        if ks.last().is_some_and(|&(_, hi)| tz <= hi) {
            continue;
        }
        let lo = disk_exit(path, tz, a, 0.5 * eps);
        let hi = disk_exit(path, tz, b, 0.5 * eps);
        if !(lo < tz && tz < hi) {
            return Err(Error::Segmentation("could not isolate a zero"));
        }
        if let Some(last) = ks.last_mut() {
            if lo <= last.1 {
                last.1 = last.1.max(hi);
                continue;
            }
        }
        ks.push((lo, hi));
    }

    let mut intervals = Vec::with_capacity(2 * ks.len() + 1);
    let mut cursor = a;
    for &(lo, hi) in &ks {
        intervals.push(Interval { kind: IntervalKind::Flow, a: cursor, b: lo });
        intervals.push(Interval { kind: IntervalKind::Linear, a: lo, b: hi });
        cursor = hi;
    }
    intervals.push(Interval { kind: IntervalKind::Flow, a: cursor, b });
    if intervals.iter().any(|i| !(i.b > i.a)) {
        return Err(Error::Segmentation("an interval has zero length"));
    }
    Ok(Segmentation { zero_times: zeros, intervals, delta, delta0, epsilon: eps, rho })
}

/// Zeros of γ: sampled local minima of |γ| within the Lipschitz slack,
/// refined by bisection on `⟨γ′, γ⟩` (the derivative of |γ|²/2).
fn find_zeros(path: &PiecewisePath, n: usize) -> Result<Vec<f64>> {
    let (a, b) = path.domain();
    let h = (b - a) / n as f64;
    let slack = path.max_speed(n.min(100_000)) * h;
    let scale = path.max_modulus(256).max(1.0);
    let mods: Vec<f64> = (0..=n).map(|i| path.at(a + h * i as f64).norm()).collect();
    let mut out: Vec<f64> = Vec::new();
    for i in 0..=n {
        let left = if i > 0 { mods[i - 1] } else { f64::INFINITY };
        let right = if i < n { mods[i + 1] } else { f64::INFINITY };
        if !(mods[i] <= left && mods[i] < right && mods[i] <= slack) {
            continue;
        }
        let lo = a + h * i.saturating_sub(1) as f64;
        let hi = (a + h * (i + 1) as f64).min(b);
        let t = refine_minimum(path, lo, hi);
        if path.at(t).norm() > 1e-9 * scale {
            continue;
        }
        if let Some(&prev) = out.last() {
            if t - prev < 2.0 * h {
                return Err(Error::Segmentation("two zeros closer than the sampling resolution"));
            }
        }
        out.push(t);
    }
    Ok(out)
}

fn refine_minimum(path: &PiecewisePath, mut lo: f64, mut hi: f64) -> f64 {
    let g = |t: f64| dot(path.derivative_left(t).unwrap_or(path.velocity(t)), path.at(t));
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        // Fall back to the best of a fine scan.
        let mut best = lo;
        for k in 0..=64 {
            let t = lo + (hi - lo) * k as f64 / 64.0;
            if path.at(t).norm() < path.at(best).norm() {
                best = t;
            }
        }
        return best;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (pl, ph) = (path.at(lo).norm(), path.at(hi).norm());
    if pl <= ph {
        lo
    } else {
        hi
    }
}

/// First parameter between `t0` and `limit` where |γ| exceeds `r`, refined
/// so that the returned point still satisfies |γ| ≤ r.
fn disk_exit(path: &PiecewisePath, t0: f64, limit: f64, r: f64) -> f64 {
    let speed = path.max_speed(4096).max(1e-300);
    let step = (0.25 * r / speed).max(1e-15) * (limit - t0).signum();
    let mut inside = t0;
    loop {
        let next = inside + step;
        let past = if step > 0.0 { next >= limit } else { next <= limit };
        let probe = if past { limit } else { next };
        if path.at(probe).norm() > r {
            let mut outside = probe;
            while (outside - inside).abs() > 1e-13 {
                let mid = 0.5 * (inside + outside);
                if path.at(mid).norm() <= r {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            return inside;
        }
        if past {
            return limit;
        }
        inside = next;
    }
}
