//! Integrands of the fixed-point equations for `(λ^III, μ)`.
//!
//! Every kernel depends on `σ` only through `η = σδt` (the series are
//! evaluated at `τ = t₀ + η`), so they are built as polynomials in `η` and
//! embedded into [`SigmaDtPoly`] at the end.

use super::poly::{add, add_const, mul, scale, shift};
use super::{DtSeries, SigmaDtPoly};
use crate::error::{Error, Result};
use crate::{EquationParams, Real, RootAnchor};

/// Anchor and parameters lifted into the working scalar type.
#[derive(Clone, Copy)]
pub(crate) struct Consts<T> {
    pub s: T,
    pub t0: T,
    pub c0: T,
    pub ci: T,
    pub l3: T,
}

impl<T: Real> Consts<T> {
    pub fn new(a: &RootAnchor, p: &EquationParams) -> Self {
        Self {
            s: T::of(a.s()),
            t0: T::of(a.t0),
            c0: T::of(p.chi0),
            ci: T::of(p.chi_inf),
            l3: T::of(a.lam3),
        }
    }

    /// `(χ₀ − sgn)/(2t₀)`
    pub fn c(&self) -> T {
        (self.c0 - self.s) / (self.t0 + self.t0)
    }

    /// `sgn(χ₀² − 1)/(2t₀)`
    pub fn a(&self) -> T {
        self.s * (self.c0 * self.c0 - T::one()) / (self.t0 + self.t0)
    }

    /// `χ∞ + sgn·χ₀ − 1`
    pub fn k(&self) -> T {
        self.ci + self.s * self.c0 - T::one()
    }
}

pub(crate) fn check_anchors<T: Real>(
    lam: &DtSeries<T>,
    mu: &DtSeries<T>,
    a: &RootAnchor,
) -> Result<()> {
    lam.same_anchor(mu)?;
    if lam.anchor() != a {
        return Err(Error::AnchorMismatch);
    }
    Ok(())
}

/// `sgn − ηc + η²λ`
fn x_factor<T: Real>(k: &Consts<T>, lam: &[T], cap: Option<usize>) -> Vec<T> {
    let mut x = add(&[k.s, -k.c()], &shift(lam, 2));
    if let Some(n) = cap {
        x.truncate(n + 1);
    }
    x
}

/// `2sgn·λ + (c − ηλ)²`
fn z_factor<T: Real>(k: &Consts<T>, lam: &[T], cap: Option<usize>) -> Vec<T> {
    let y = add_const(&shift(&scale(lam, -T::one()), 1), k.c());
    add(&scale(lam, k.s + k.s), &mul(&y, &y, cap))
}

pub(crate) fn omega_mu_eta<T: Real>(
    k: &Consts<T>,
    lam: &[T],
    mu: &[T],
    cap: Option<usize>,
) -> Vec<T> {
    let x = x_factor(k, lam, cap);
    let one_minus_mu = add_const(&scale(mu, -T::one()), T::one());
    let two = T::of(2.0);
    let inner = add_const(
        &shift(&scale(&mul(&one_minus_mu, &x, cap), two), 1),
        k.s * k.c0,
    );
    mul(mu, &inner, cap)
}

pub(crate) fn omega_lambda_eta<T: Real>(
    k: &Consts<T>,
    lam: &[T],
    mu: &[T],
    cap: Option<usize>,
) -> Vec<T> {
    let two = T::of(2.0);
    let m2 = add_const(&scale(mu, two), -T::one());
    let base = add_const(&scale(mu, two), k.a() - T::one());
    let lin = add(
        &scale(lam, k.c0 - two * k.s),
        &scale(&m2, (k.c0 - k.s) / k.t0),
    );
    let lin = shift(&scale(&lin, -k.s), 1);
    let quad = shift(&mul(&m2, &z_factor(k, lam, cap), cap), 2);
    add(&add(&base, &lin), &quad)
}

pub(crate) fn omega_xi_eta<T: Real>(
    k: &Consts<T>,
    lam: &[T],
    mu: &[T],
    cap: Option<usize>,
) -> Vec<T> {
    let two = T::of(2.0);
    let three = T::of(3.0);
    let first = add_const(
        &add(
            &scale(mu, -T::of(8.0) * k.c0 * k.s),
            &scale(lam, -three * (k.c0 - two * k.s) * k.t0 * k.s),
        ),
        k.s * three * (k.c0 - k.s),
    );
    let m2 = add_const(&scale(mu, two), -T::one());
    let second = shift(
        &scale(&mul(&m2, &z_factor(k, lam, cap), cap), three * k.t0),
        1,
    );
    let mm = mul(&add_const(mu, -T::one()), mu, cap);
    let third = shift(
        &scale(&mul(&mm, &x_factor(k, lam, cap), cap), T::of(4.0)),
        1,
    );
    add(&add(&first, &second), &third)
}

fn cut<T: Real>(mut v: Vec<T>, cap: Option<usize>) -> Vec<T> {
    if let Some(n) = cap {
        v.truncate(n + 1);
    }
    v
}

pub(crate) fn validity_mu(lam: usize, mu: usize) -> usize {
    mu.min(lam + 3)
}

pub(crate) fn validity_lambda(lam: usize, mu: usize) -> usize {
    mu.min(lam + 1)
}

pub(crate) fn validity_xi(lam: usize, mu: usize) -> usize {
    mu.min(lam)
}

/// Kernel of the `λ^III` integral equation.
pub fn kernel_omega_lambda<T: Real>(
    lam: &DtSeries<T>,
    mu: &DtSeries<T>,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<SigmaDtPoly<T>> {
    check_anchors(lam, mu, a)?;
    let k = Consts::new(a, p);
    let e = omega_lambda_eta(&k, lam.trusted(), mu.trusted(), None);
    let v = validity_lambda(lam.valid_order(), mu.valid_order());
    Ok(SigmaDtPoly::from_eta(*a, &e, v))
}

/// Kernel of the `μ` integral equation.
pub fn kernel_omega_mu<T: Real>(
    lam: &DtSeries<T>,
    mu: &DtSeries<T>,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<SigmaDtPoly<T>> {
    check_anchors(lam, mu, a)?;
    let k = Consts::new(a, p);
    let e = omega_mu_eta(&k, lam.trusted(), mu.trusted(), None);
    let v = validity_mu(lam.valid_order(), mu.valid_order());
    Ok(SigmaDtPoly::from_eta(*a, &e, v))
}

/// Kernel of the regular function `ξ`.
pub fn kernel_omega_xi<T: Real>(
    lam: &DtSeries<T>,
    mu: &DtSeries<T>,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<SigmaDtPoly<T>> {
    check_anchors(lam, mu, a)?;
    let k = Consts::new(a, p);
    let e = omega_xi_eta(&k, lam.trusted(), mu.trusted(), None);
    let v = validity_xi(lam.valid_order(), mu.valid_order());
    Ok(SigmaDtPoly::from_eta(*a, &e, v))
}

/// `2Ω_μ + σ³Ω_ξ`, the kernel of the refined `λ^III` equation.
pub fn kernel_omega_lambda_hat<T: Real>(
    lam: &DtSeries<T>,
    mu: &DtSeries<T>,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<SigmaDtPoly<T>> {
    let om = kernel_omega_mu(lam, mu, a, p)?;
    let ox = kernel_omega_xi(lam, mu, a, p)?;
    om.scaled(T::of(2.0)).plus(&ox.times_sigma(3))
}

/// `∫₀¹ σ^p q(η) dσ` for `q` given by its `η` coefficients; entry `k` is the
/// `δt^k` coefficient.
pub(crate) fn eta_average<T: Real>(q: &[T], p: u32, cap: Option<usize>) -> Vec<T> {
    cut(
        q.iter()
            .enumerate()
            .map(|(k, &c)| c / T::of_i((k as u32 + p + 1) as i64))
            .collect(),
        cap,
    )
}
