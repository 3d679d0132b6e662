//! Coarse-grained measurement statistics and uncertainty relations for
//! continuous-variable quantum states.
//!
//! The crate models one- and two-mode quantum states (sampled wavefunctions on
//! a grid, or Gaussian states given by mean and covariance), discretizes their
//! marginal distributions under standard and periodic coarse graining, and
//! evaluates the resulting uncertainty relations: variance-based, entropic
//! (Shannon and Rényi), and their coarse-grained refinements whose lower
//! bounds involve radial prolate spheroidal wave functions.
//!
//! Main entry points:
//!
//! - [`states`]: state types, quadrature marginals, Fourier / fractional
//!   Fourier transforms, bona fide covariance checks.
//! - [`coarse_grain`]: binning of continuous densities, histogram functions,
//!   piecewise reconstructions.
//! - [`entropy`]: differential and discrete Shannon/Rényi entropies and the
//!   exact decomposition / Jensen inequalities connecting them.
//! - [`special_fn`]: the special-function kernel (R00, ε_α, K, M⁻¹, erf).
//! - [`ur_bounds`]: evaluators producing [`UrReport`]s for every supported
//!   uncertainty relation.
//! - [`mub`]: mutual unbiasedness of periodic coarse graining.
//! - [`entanglement`]: PPT-based witnesses on two-mode states, including the
//!   coarse-grained corrections that remove false positives.
//!
//! All public operations are pure: state objects are immutable after
//! construction and safe to share across threads.

// validation guards use `!(x > 0.0)` so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coarse_grain;
pub mod entanglement;
pub mod entropy;
mod error;
pub mod generators;
pub mod mub;
pub mod numeric;
mod report;
pub mod special_fn;
pub mod states;
pub mod ur_bounds;

pub use error::{Error, Result};
pub use report::{UrKind, UrReport, Verdict};

/// Absolute tolerance on uncertainty-relation margins when assigning verdicts.
///
/// Grid quadrature error stays well below this for the default 4096-point
/// grids, so a margin below `-MARGIN_TOL` is a genuine violation.
pub const MARGIN_TOL: f64 = 1e-9;

/// Coverage threshold below which a discrete distribution is flagged as an
/// unfaithful coarse-grained measurement.
pub const FAITHFUL_COVERAGE: f64 = 0.999_999;
