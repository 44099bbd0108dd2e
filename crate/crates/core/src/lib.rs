//! Quantization of compactly supported measures with codebooks confined to a
//! closed constraint set.
//!
//! The crate computes the constrained quantization errors `e_{n,r}(P;S)`,
//! their `n → ∞` limits via the metric projection onto `S`, the excess
//! errors `ê`/`ẽ`, optimal codebooks, and the dimension estimates that govern
//! the decay rate of the excess — together with the geometric regularity
//! diagnostics the rate theory relies on.
//!
//! Start from the runnable programs in `examples/`, or from the `cquant`
//! binary for scenario-driven batch runs.

pub mod dimension;
pub mod error;
pub mod geometry;
pub mod measures;
pub mod point;
pub mod quantizer;
pub mod runner;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::{ConstraintSet, ProjectionResult, Shape, TieCount};
pub use measures::{DiscreteMeasure, Provenance};
pub use point::Point;
pub use quantizer::{
    assign, brute_force_solve, e_infinity, error, error_curve, lloyd_step_r2, perturb_codebook,
    solve, weight_decompose, Assignment, Codebook, ErrorCurve, Order, SolveOptions,
};
