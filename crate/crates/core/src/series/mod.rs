//! Truncated power series in `δt = t − t₀` and the iterative construction
//! of the root expansion.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::{Real, RootAnchor};

mod algorithm;
mod bounds;
mod kernels;
pub(crate) mod poly;
mod residual;
mod scheme;

pub use algorithm::{algorithm_increments, DecayReport, DecayRow};
pub use bounds::{convergence_bounds, BoundSet, DEFAULT_ALPHA};
pub use kernels::{kernel_omega_lambda, kernel_omega_lambda_hat, kernel_omega_mu, kernel_omega_xi};
pub(crate) use residual::check_grid;
pub use residual::{residual_order, series_residual};
pub use scheme::{
    assemble_lambda, init_pair, lam6_reference, mu_at_root, run_scheme, step_lambda,
    step_lambda_refined, step_mu, xi_series,
};

/// Power series `Σ c_k δt^k` about an anchored root. Coefficients above
/// `valid_order` may be stored but are not trusted and never evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct DtSeries<T = f64> {
    anchor: RootAnchor,
    coeffs: Vec<T>,
    valid_order: usize,
}

impl<T: Real> DtSeries<T> {
    /// Coefficients shorter than `valid_order + 1` are padded with zeros.
    pub fn new(anchor: RootAnchor, mut coeffs: Vec<T>, valid_order: usize) -> Self {
        if coeffs.len() < valid_order + 1 {
            coeffs.resize(valid_order + 1, T::zero());
        }
        Self {
            anchor,
            coeffs,
            valid_order,
        }
    }

    pub fn zero(anchor: RootAnchor, valid_order: usize) -> Self {
        Self::new(anchor, Vec::new(), valid_order)
    }

    pub fn anchor(&self) -> &RootAnchor {
        &self.anchor
    }

    pub fn valid_order(&self) -> usize {
        self.valid_order
    }

    /// All stored coefficients, including untrusted ones.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficients `c₀..=c_V`.
    pub fn trusted(&self) -> &[T] {
        &self.coeffs[..=self.valid_order]
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    /// Horner evaluation over the trusted coefficients.
    pub fn eval(&self, dt: T) -> T {
        poly::eval(self.trusted(), dt)
    }

    /// Value and first two derivatives with respect to `δt`.
    pub fn eval_derivs(&self, dt: T) -> [T; 3] {
        poly::eval_derivs(self.trusted(), dt)
    }

    /// Drops trusted coefficients above `order` (no effect if already lower).
    pub fn truncated(&self, order: usize) -> Self {
        let v = order.min(self.valid_order);
        Self {
            anchor: self.anchor,
            coeffs: self.coeffs[..=v].to_vec(),
            valid_order: v,
        }
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> DtSeries<U> {
        DtSeries {
            anchor: self.anchor,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
            valid_order: self.valid_order,
        }
    }

    pub fn to_f64(&self) -> DtSeries<f64> {
        self.map(|c| c.as_f64())
    }

    pub(crate) fn same_anchor(&self, other: &DtSeries<T>) -> Result<()> {
        if self.anchor == other.anchor {
            Ok(())
        } else {
            Err(Error::AnchorMismatch)
        }
    }
}

/// Horner evaluation of the trusted part.
pub fn series_eval<T: Real>(s: &DtSeries<T>, dt: T) -> T {
    s.eval(dt)
}

/// Polynomial in `(σ, δt)` with coefficients keyed by `(σ power, δt power)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaDtPoly<T = f64> {
    anchor: RootAnchor,
    terms: BTreeMap<(u32, u32), T>,
    valid_order: usize,
}

impl<T: Real> SigmaDtPoly<T> {
    pub fn new(anchor: RootAnchor, valid_order: usize) -> Self {
        Self {
            anchor,
            terms: BTreeMap::new(),
            valid_order,
        }
    }

    /// Embeds a polynomial in `η = σδt`: `Σ a_k η^k ↦ Σ a_k σ^k δt^k`.
    pub fn from_eta(anchor: RootAnchor, eta_coeffs: &[T], valid_order: usize) -> Self {
        let mut q = Self::new(anchor, valid_order);
        for (k, &c) in eta_coeffs.iter().enumerate() {
            q.add_term(k as u32, k as u32, c);
        }
        q
    }

    pub fn anchor(&self) -> &RootAnchor {
        &self.anchor
    }

    /// The `δt` order up to which the coefficients are trusted.
    pub fn valid_order(&self) -> usize {
        self.valid_order
    }

    pub fn add_term(&mut self, sigma_pow: u32, dt_pow: u32, c: T) {
        if c.is_zero() {
            return;
        }
        let e = self
            .terms
            .entry((sigma_pow, dt_pow))
            .or_insert_with(T::zero);
        *e = *e + c;
    }

    pub fn get(&self, sigma_pow: u32, dt_pow: u32) -> T {
        self.terms
            .get(&(sigma_pow, dt_pow))
            .copied()
            .unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), T)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn sigma_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn dt_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// Multiplies by `σ^p`.
    pub fn times_sigma(&self, p: u32) -> Self {
        let mut q = Self::new(self.anchor, self.valid_order);
        for (&(m, k), &c) in &self.terms {
            q.add_term(m + p, k, c);
        }
        q
    }

    pub fn scaled(&self, f: T) -> Self {
        let mut q = Self::new(self.anchor, self.valid_order);
        for (&(m, k), &c) in &self.terms {
            q.add_term(m, k, c * f);
        }
        q
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.anchor != other.anchor {
            return Err(Error::AnchorMismatch);
        }
        let mut q = self.clone();
        q.valid_order = self.valid_order.min(other.valid_order);
        for (&(m, k), &c) in &other.terms {
            q.add_term(m, k, c);
        }
        Ok(q)
    }

    pub fn eval(&self, sigma: T, dt: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, (&(m, k), &c)| {
            acc + c * sigma.powi(m as i32) * dt.powi(k as i32)
        })
    }

    /// `∫₀¹ σ^p q(σ, δt) dσ` as a series in `δt`, keeping powers up to the
    /// trusted order.
    pub fn sigma_average(&self, extra_sigma_power: u32) -> DtSeries<T> {
        let mut c = vec![T::zero(); self.valid_order + 1];
        for (&(m, k), &v) in &self.terms {
            if (k as usize) <= self.valid_order {
                c[k as usize] = c[k as usize] + v / T::of_i((m + extra_sigma_power + 1) as i64);
            }
        }
        DtSeries::new(self.anchor, c, self.valid_order)
    }
}

/// See [`SigmaDtPoly::sigma_average`].
pub fn sigma_average<T: Real>(q: &SigmaDtPoly<T>, extra_sigma_power: u32) -> DtSeries<T> {
    q.sigma_average(extra_sigma_power)
}
