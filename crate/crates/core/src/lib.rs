//! Analytic and numerical solutions of the third Painlevé equation in its
//! two-parameter form
//!
//! ```text
//! λ'' = λ'²/λ − λ'/t − χ∞ λ²/t² + λ³/t² + χ₀/t − 1/λ
//! ```
//!
//! near a prescribed simple root `t₀ ≠ 0` (and, through the `λ ↦ t/λ`
//! symmetry, near a prescribed simple pole).
//!
//! The crate is organised by role:
//!
//! - [`equation`]: the scalar, Hamiltonian and coupled first-order forms of
//!   the equation, plus the conversion from the four-parameter form.
//! - [`series`]: truncated power series in `δt = t − t₀`, the integral
//!   kernels, the staggered fixed-point scheme producing the root expansion
//!   to any order, convergence bounds and residual-order measurements.
//! - [`ode`]: an adaptive Dormand–Prince integrator with dense output that
//!   crosses roots using the local series, root location and `λ'''` extraction.
//! - [`pole`]: Laurent expansions at poles.
//! - [`appendix`]: the worked example with six roots on `(0.01, 2)`.
//! - [`verify`]: the end-to-end checks behind `p3 verify`.

pub mod appendix;
pub mod equation;
mod error;
pub mod fit;
pub mod io;
pub mod ode;
pub mod pole;
mod scalar;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Dd, Real};

pub use equation::{EquationParams, P3FormParams, PhasePoint, RootAnchor, SignSwitch};
pub use pole::LaurentExpansion;
pub use series::{BoundSet, DtSeries, SigmaDtPoly};
