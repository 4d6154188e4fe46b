//! Majorants for the convergence of the increment iteration.

use serde::{Deserialize, Serialize};

use super::init_pair;
use super::poly;
use crate::error::{Error, Result};
use crate::{EquationParams, RootAnchor};

pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub m_lambda: f64,
    pub m_mu: f64,
    pub b_mu_lambda: f64,
    pub b_mu_mu: f64,
    pub b_xi_lambda: f64,
    pub b_xi_mu: f64,
    pub q1: f64,
    pub q2: f64,
    pub beta: f64,
    pub alpha: f64,
    pub alpha_tilde: f64,
}

impl BoundSet {
    /// Largest admissible `|t − t₀|`.
    pub fn radius(&self, t0: f64) -> f64 {
        self.alpha_tilde * t0.abs()
    }

    /// `½M (β|δt|/|t₀|)^{n−1}` for the given `M`.
    pub fn majorant(&self, m: f64, dt: f64, t0: f64, n: usize) -> f64 {
        0.5 * m * (self.beta * dt.abs() / t0.abs()).powi(n as i32 - 1)
    }
}

/// `sup |p(x)|` over `[−r, r]` from endpoints and bracketed critical points.
pub(crate) fn sup_abs_on(c: &[f64], r: f64) -> f64 {
    let d: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| k as f64 * a)
        .collect();
    let mut best = poly::eval(c, -r).abs().max(poly::eval(c, r).abs());
    if d.iter().all(|&x| x == 0.0) {
        return best;
    }
    const SAMPLES: usize = 2000;
    let xs: Vec<f64> = (0..=SAMPLES)
        .map(|i| -r + 2.0 * r * i as f64 / SAMPLES as f64)
        .collect();
    for w in xs.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        best = best.max(poly::eval(c, lo).abs());
        let (mut flo, fhi) = (poly::eval(&d, lo), poly::eval(&d, hi));
        if flo == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let fm = poly::eval(&d, mid);
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        best = best.max(poly::eval(c, 0.5 * (lo + hi)).abs());
    }
    best
}

/// Constants of the convergence theorem over `|t − t₀| ≤ α|t₀|`.
pub fn convergence_bounds(a: &RootAnchor, p: &EquationParams, alpha: f64) -> Result<BoundSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameters(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let (s, t0, c0) = (a.s(), a.t0, p.chi0);
    let at0 = t0.abs();
    let e = alpha * at0;
    let (l1, m1) = init_pair::<f64>(a, p);
    let ml = (2.0 * sup_abs_on(l1.coeffs(), e)).max(1.0);
    let mm = (2.0 * sup_abs_on(m1.coeffs(), e)).max(1.0);

    let c = ((c0 - s) / (2.0 * t0)).abs();
    let x = 1.0 + e * c + e * e * ml;
    let e3 = e * e * e;
    let b_mu_lambda = (e3 * (4.0 * mm * mm + 2.0 * mm)).max(1.0);
    let b_mu_mu = (c0.abs() + 2.0 * e * (2.0 * mm + 1.0) * x).max(1.0);
    let b_xi_lambda = (3.0 * at0 * (c0 - 2.0 * s).abs()
        + 6.0 * at0 * e * (2.0 * mm + 1.0) * x
        + 4.0 * e3 * (2.0 * mm * mm + mm))
        .max(1.0);
    let b_xi_mu = (8.0 * c0.abs()
        + 3.0 * e * (c0 - s).powi(2) / (2.0 * at0)
        + 4.0 * e * (2.0 * mm + 1.0 + 3.0 * at0 * ml) * x
        + 12.0 * e3 * at0 * ml * ml)
        .max(1.0);

    let q1 = 1.0 + b_mu_mu + b_mu_lambda * ml / mm;
    let q2 = 1.0
        + (2.0 * b_mu_lambda + b_xi_lambda / 7f64.sqrt()) / (3.0 * at0)
        + (2.0 * b_mu_mu / 3f64.sqrt() + b_xi_mu / 3.0) / (6.0 * at0) * mm / ml;
    let beta = q1.max(q2);
    let alpha_tilde = alpha.min(1.0 / (2.0 * beta));
    Ok(BoundSet {
        m_lambda: ml,
        m_mu: mm,
        b_mu_lambda,
        b_mu_mu,
        b_xi_lambda,
        b_xi_mu,
        q1,
        q2,
        beta,
        alpha,
        alpha_tilde,
    })
}
