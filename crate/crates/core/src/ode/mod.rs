//! Adaptive integration of the scalar equation and analysis of the result.
//!
//! The right-hand side is `0/0` at a root, so the integrator never steps
//! onto one. Once `|λ|` falls below `eps_switch·|t|` it fits the local root
//! series (anchor `t₀` and `λ^III`) to the current `(λ, λ')`. The fit is
//! then repeated at `δt = −ROOT_FIT_OFFSET·|t₀|`: `λ^III` only enters `λ` at
//! order `δt³`, and so close to the root it is lost in the step error. The
//! series replaces the solution on `|δt| ≤ ROOT_FIT_OFFSET·|t₀|` and the
//! integrator restarts at the far end of that window.

mod analysis;
mod dopri;
mod solution;

pub use analysis::{
    compare_series, find_roots, hamiltonian_crosscheck, lam3_at_root, laurent_from_solution,
    mu_dichotomy, residual_scan, roots_with_lam3, symmetry_check, MuDichotomy, RootInfo,
    COMPARE_POINTS, LAM3_MAX_NODES, LAM3_MIN_NODES, POLE_FIT_OFFSET,
};
pub use solution::{
    integrate, integrate_with, DenseSolution, IntegrateOptions, PoleMarker, RootCrossing,
    ROOT_FIT_OFFSET,
};
