//! JSON records for expansions and CSV output for sampled curves.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ode::DenseSolution;
use crate::pole::LaurentExpansion;
use crate::series::DtSeries;
use crate::{EquationParams, RootAnchor, SignSwitch};

/// A root series together with the equation it solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub t0: f64,
    pub sgn: SignSwitch,
    pub lam3: f64,
    pub chi0: f64,
    pub chi_inf: f64,
    pub valid_order: usize,
    pub coeffs: Vec<f64>,
}

impl SeriesRecord {
    /// Keeps the trusted coefficients only.
    pub fn new(s: &DtSeries<f64>, p: &EquationParams) -> Self {
        let a = s.anchor();
        Self {
            t0: a.t0,
            sgn: a.sgn,
            lam3: a.lam3,
            chi0: p.chi0,
            chi_inf: p.chi_inf,
            valid_order: s.valid_order(),
            coeffs: s.trusted().to_vec(),
        }
    }

    pub fn to_series(&self) -> Result<(DtSeries<f64>, EquationParams)> {
        let a = RootAnchor::new(self.t0, self.sgn, self.lam3)?;
        let p = EquationParams::new(self.chi0, self.chi_inf)?;
        Ok((DtSeries::new(a, self.coeffs.clone(), self.valid_order), p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentRecord {
    pub t0: f64,
    pub sgn: SignSwitch,
    pub residue: f64,
    pub chi0: f64,
    pub chi_inf: f64,
    pub lam3_swapped: f64,
    pub valid_order: usize,
    pub regular_coeffs: Vec<f64>,
}

impl LaurentRecord {
    pub fn new(le: &LaurentExpansion<f64>, p: &EquationParams) -> Self {
        Self {
            t0: le.t0,
            sgn: le.sgn,
            residue: le.residue,
            chi0: p.chi0,
            chi_inf: p.chi_inf,
            lam3_swapped: le.lam3_swapped,
            valid_order: le.valid_order,
            regular_coeffs: le.trusted().to_vec(),
        }
    }

    pub fn to_laurent(&self) -> Result<(LaurentExpansion<f64>, EquationParams)> {
        let p = EquationParams::new(self.chi0, self.chi_inf)?;
        let le = LaurentExpansion {
            t0: self.t0,
            sgn: self.sgn,
            residue: self.residue,
            regular_coeffs: self.regular_coeffs.clone(),
            valid_order: self
                .valid_order
                .min(self.regular_coeffs.len().saturating_sub(1)),
            lam3_swapped: self.lam3_swapped,
        };
        Ok((le, p))
    }
}

/// Formats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header line and one line per row, comma separated.
pub fn write_csv<W: Write>(
    mut w: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// `t,lambda,lambda_dot` at the grid points inside the solution's span.
pub fn write_dense_csv<W: Write>(w: W, sol: &DenseSolution, grid: &[f64]) -> io::Result<()> {
    let rows = grid
        .iter()
        .filter_map(|&t| sol.eval(t).map(|v| vec![t, v[0], v[1]]));
    write_csv(w, &["t", "lambda", "lambda_dot"], rows)
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
