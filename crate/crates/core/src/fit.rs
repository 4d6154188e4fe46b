//! Least-squares helpers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ordinary least-squares polynomial fit; returns coefficients in
/// increasing powers of `x − x0`.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize, x0: f64) -> Result<Vec<f64>> {
    if x.len() != y.len() || x.len() < degree + 1 {
        return Err(Error::DegenerateGrid(format!(
            "polynomial fit of degree {degree} needs at least {} points, got {}",
            degree + 1,
            x.len()
        )));
    }
    let a = DMatrix::from_fn(x.len(), degree + 1, |i, j| (x[i] - x0).powi(j as i32));
    let b = DVector::from_column_slice(y);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::DegenerateGrid(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateGrid(
            "log-log fit needs positive finite data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let c = polyfit(&lx, &ly, 1, 0.0)?;
    Ok(c[1])
}
