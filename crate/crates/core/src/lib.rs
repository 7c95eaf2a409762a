//! Special relativity in a non-orthogonal Euclidean space (NES) and the
//! intrinsically regularized one-loop φ⁴ self-energy built on top of it.
//!
//! The crate is organized by subsystem:
//!
//! * [`kinematics`]: NES metrics, boosts, velocity addition, Eigenzeit,
//!   energy–mass relations and the orthogonal Minkowski reference transform.
//! * [`effective_dimension`]: entropy-based effective dimension `q(E)` of the
//!   metric spectrum, plus the combinatorial entropy oracle and figure data.
//! * [`loop_regularization`]: the split loop integral `D(0)` in two evaluation
//!   modes, the dressed propagator, mass correction and lifetime.
//! * [`blurred_lt`]: Monte Carlo recovery of a boost from second moments of
//!   metric-correlated coordinate fluctuations.
//!
//! All coordinates are scaled and dimensionless (`τ = ct`); physical units
//! only appear through [`PhysicalConstants`].

// negated comparisons are deliberate: they reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blurred_lt;
pub mod constants;
pub mod effective_dimension;
mod error;
pub mod kinematics;
pub mod linalg;
pub mod loop_regularization;
pub mod quadrature;

pub use constants::PhysicalConstants;
pub use error::{NesError, Result};
pub use kinematics::{
    Branch, BoostNES, FourMomentum, FourVector, MetricNES, MetricParams, VelocityRatio,
};
pub use loop_regularization::{ComplexScalar, EvalMode, LoopResult, MassCorrection};
