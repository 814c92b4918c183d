//! Numerical machinery for Ω-continuable germs in the Borel plane.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithmic
//! core: the singular-support set [`OmegaSet`], piecewise C¹ paths, truncated
//! Taylor germs and closed-form continuable germs, disc-chaining analytic
//! continuation, the C¹ mollifier, the flow of the non-autonomous vector field
//! that deforms paths, symmetric Ω-homotopies, and the continuation of
//! convolution products along arbitrary Ω-avoiding paths.
//!
//! File formats, the command-line front end and the threaded executor live in
//! the companion `resurgence-cli` crate.

#![no_std]
// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod continuation;
pub mod convolution;
pub mod error;
pub mod exec;
pub mod flow;
pub mod germ;
pub mod homotopy;
pub mod mollifier;
pub mod omega;
pub mod path;
pub mod quadrature;
pub mod segment;
pub mod source;

mod num;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Global point-equality tolerance.
pub const POINT_TOL: f64 = 1e-9;

pub use continuation::{continue_along, monodromy_delta, ContinuationOptions, ContinuationResult, Status, TraceStep};
pub use convolution::{
    continue_convolution, convolve_entire, example4_oracle, fiber_convolution, ConvolutionOptions, ConvolutionResult,
    FiberCache, LogPairOracle,
};
pub use error::{Error, Result};
pub use exec::{ColumnExecutor, Serial};
pub use flow::{flow, vector_field, Flow};
pub use germ::{convolve_at_origin, Evaluation, Germ};
pub use homotopy::{
    build_symmetric_homotopy, build_symmetric_homotopy_serial, validate_homotopy, HomotopyOptions, SymmetricHomotopy,
    Tolerances, ValidationReport,
};
pub use mollifier::Mollifier;
pub use omega::{AdditionStability, Generator, OmegaSet};
pub use path::{clearance, winding_number, Piece, PiecewisePath};
pub use segment::{segment_for_key_lemma, Segmentation};
pub use source::{Branch, GermSource};
