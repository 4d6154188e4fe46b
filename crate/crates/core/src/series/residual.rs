use super::DtSeries;
use crate::equation::rhs_unchecked;
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::{EquationParams, Real};

/// `λ'' − F(t, λ, λ')` for the series `λ` at `t = t₀ + δt`, with the
/// derivatives taken exactly on the polynomial.
pub fn series_residual<T: Real>(lam: &DtSeries<T>, p: &EquationParams, dt: T) -> T {
    let t = T::of(lam.anchor().t0) + dt;
    let [v, d1, d2] = lam.eval_derivs(dt);
    d2 - rhs_unchecked(t, v, d1, p)
}

pub(crate) fn check_grid(dt_grid: &[f64]) -> Result<()> {
    if dt_grid.len() < 3 {
        return Err(Error::DegenerateGrid(format!(
            "need at least 3 points, got {}",
            dt_grid.len()
        )));
    }
    if dt_grid.iter().any(|&d| d == 0.0 || !d.is_finite()) {
        return Err(Error::DegenerateGrid(
            "grid points must be finite and nonzero".into(),
        ));
    }
    let lo = dt_grid.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    let hi = dt_grid.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::DegenerateGrid(format!(
            "grid spans less than two decades ({lo:e}..{hi:e})"
        )));
    }
    Ok(())
}

/// Log-log slope of `|residual|` against `|δt|` over the grid.
pub fn residual_order<T: Real>(
    lam: &DtSeries<T>,
    p: &EquationParams,
    dt_grid: &[f64],
) -> Result<f64> {
    check_grid(dt_grid)?;
    let r: Vec<f64> = dt_grid
        .iter()
        .map(|&d| series_residual(lam, p, T::of(d)).as_f64().abs())
        .collect();
    let x: Vec<f64> = dt_grid.iter().map(|d| d.abs()).collect();
    loglog_slope(&x, &r)
}
