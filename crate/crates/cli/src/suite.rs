//! Bundled verification suite: reference branch values, the closed-form
//! convolution, the entire-factor formula and monodromy, each reported as
//! a residual against its tolerance.

use std::f64::consts::PI;

use resurgence_core::{
    continue_along, continue_convolution, convolve_entire, example4_oracle, monodromy_delta, ColumnExecutor,
    ContinuationOptions, ConvolutionOptions, GermSource, OmegaSet, Piece, PiecewisePath, C64,
};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteRow {
    fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), residual, tolerance, passed: residual <= tolerance }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The real segment `[0, end]` with a lower half-circle of radius `r`
/// (travelled anticlockwise) around each point of `around`.
pub fn detour_path(end: f64, around: &[f64], r: f64) -> Result<PiecewisePath, CliError> {
    let mut pts: Vec<f64> = around.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let mut pieces = Vec::new();
    let mut x = 0.0;
    for &w in &pts {
        pieces.push(Piece::segment(c(x, 0.0), c(w - r, 0.0)));
        pieces.push(Piece::arc(c(w, 0.0), r, PI, 2.0 * PI));
        x = w + r;
    }
    pieces.push(Piece::segment(c(x, 0.0), c(end, 0.0)));
    Ok(PiecewisePath::new(pieces)?)
}

/// Loop from 0.5 once around 1, then on to `end`.
pub fn loop_around_one(end: C64) -> Result<PiecewisePath, CliError> {
    let circle = PiecewisePath::circle(c(1.0, 0.0), 0.5, PI);
    Ok(circle.concat(&PiecewisePath::segment(c(0.5, 0.0), end))?)
}

pub fn reference_examples(exec: &dyn ColumnExecutor) -> Result<Vec<SuiteRow>, CliError> {
    let copts = ContinuationOptions::default();
    let mut rows = Vec::new();

    let g0 = detour_path(2.0, &[1.0], 0.25)?;
    let e = example4_oracle(c(1.0, 0.0), c(1.0, 0.0), &g0, &copts)?;
    rows.push(SuiteRow::new("log(1-z) at 2 after the lower detour = i*pi", (e.l1 - c(0.0, PI)).norm(), 1e-6));
    rows.push(SuiteRow::new("L1 + L2 at 2 = 2*pi*i", (e.bracket - c(0.0, 2.0 * PI)).norm(), 1e-6));

    let g0 = detour_path(3.0, &[1.0, 2.0], 0.25)?;
    let e = example4_oracle(c(1.0, 0.0), c(2.0, 0.0), &g0, &copts)?;
    rows.push(SuiteRow::new("log(1-z) at 3 after detours = log 2 + i*pi", (e.l1 - c(2f64.ln(), PI)).norm(), 1e-6));

    let straight = PiecewisePath::segment(c(0.0, 0.0), c(2.0, 0.0));
    let e = example4_oracle(c(1.0, 1.0), c(1.0, -1.0), &straight, &copts)?;
    rows.push(SuiteRow::new("principal bracket at w1 + w2 vanishes", e.bracket.norm(), 1e-8));

    let omega = OmegaSet::positive_integers();
    let opts = ConvolutionOptions::default();
    let path = PiecewisePath::polyline(&[c(0.3, 0.0), c(0.3, -0.5), c(2.6, -0.5), c(2.6, 0.4)])?;
    let phi = GermSource::geom(c(1.0, 0.0));
    let psi = GermSource::geom(c(2.0, 0.0));
    let chi = continue_convolution(&phi, &psi, &path, &omega, &opts, exec)?;
    let oracle = example4_oracle(c(1.0, 0.0), c(2.0, 0.0), &path, &copts)?;
    let expect = oracle.value.ok_or_else(|| CliError::Failed("oracle hit a pole".into()))?;
    rows.push(SuiteRow::new(
        "continued 1/(z-1) * 1/(z-2) vs closed form",
        (chi.germ.coeffs()[0] - expect).norm(),
        1e-5,
    ));

    let lp = loop_around_one(c(1.5, -0.3))?;
    let a = GermSource::Poly(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let direct = convolve_entire(&a, &phi, &lp, &omega, &opts)?;
    let general = continue_convolution(&a, &phi, &lp, &omega, &opts, exec)?;
    rows.push(SuiteRow::new(
        "entire-factor formula vs general engine (A = z)",
        (direct.coeffs()[0] - general.germ.coeffs()[0]).norm(),
        1e-6,
    ));

    let one = OmegaSet::from_points(&[c(1.0, 0.0)])?;
    let neg_log = GermSource::log1m(c(1.0, 0.0)).scaled(c(-1.0, 0.0));
    let d = monodromy_delta(&neg_log, c(1.0, 0.0), c(0.0, 0.0), &one, &copts)?;
    let spread = d.coeffs()[1..].iter().map(|a| a.norm()).fold(0.0, f64::max);
    rows.push(SuiteRow::new(
        "monodromy of -log(1-z) around 1 = -2*pi*i",
        (d.coeffs()[0] - c(0.0, -2.0 * PI)).norm().max(spread),
        1e-7,
    ));

    let two = OmegaSet::from_points(&[c(1.0, 0.0), c(2.0, 0.0)])?;
    let inner = GermSource::geom(c(2.0, 0.0));
    let with_log = inner.clone().times(GermSource::Log { at: c(1.0, 0.0) });
    let base = c(0.25, -0.25);
    let order = 24;
    let d = monodromy_delta(&with_log, c(1.0, 0.0), base, &two, &ContinuationOptions { order, ..copts })?;
    let expect = continue_along(&inner, &PiecewisePath::segment(c(0.0, 0.0), base), &two, &copts)?
        .final_branch()
        .coefficients(order);
    let worst = d.coeffs().iter().zip(&expect).map(|(a, b)| (*a - *b * c(0.0, 2.0 * PI)).norm()).fold(0.0, f64::max);
    rows.push(SuiteRow::new("monodromy of psi*log(z-1) = 2*pi*i*psi", worst, 1e-6));

    Ok(rows)
}
