//! Pointwise forms of the equation: scalar right-hand side, Hamiltonian,
//! Hamilton equations, the coupled first-order system for `(λ^III, μ)` and
//! the parameter map from the four-parameter form.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::Real;

/// The constant pair `(χ₀, χ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationParams {
    pub chi0: f64,
    pub chi_inf: f64,
}

impl EquationParams {
    pub fn new(chi0: f64, chi_inf: f64) -> Result<Self> {
        if !chi0.is_finite() || !chi_inf.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "chi0 = {chi0}, chi_inf = {chi_inf} must be finite"
            )));
        }
        Ok(Self { chi0, chi_inf })
    }

    /// Parameters of the equation solved by `t/λ(t)`.
    pub fn swapped(&self) -> Self {
        Self {
            chi0: self.chi_inf,
            chi_inf: self.chi0,
        }
    }
}

/// The slope switch `sgn ∈ {−1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct SignSwitch(i8);

impl SignSwitch {
    pub const PLUS: SignSwitch = SignSwitch(1);
    pub const MINUS: SignSwitch = SignSwitch(-1);

    pub fn new(sgn: i32) -> Result<Self> {
        match sgn {
            1 => Ok(Self::PLUS),
            -1 => Ok(Self::MINUS),
            _ => Err(Error::InvalidParameters(format!(
                "sgn must be +1 or -1, got {sgn}"
            ))),
        }
    }

    /// Sign of a nonzero real.
    pub fn of(x: f64) -> Result<Self> {
        if x > 0.0 {
            Ok(Self::PLUS)
        } else if x < 0.0 {
            Ok(Self::MINUS)
        } else {
            Err(Error::InvalidParameters("sign of zero is undefined".into()))
        }
    }

    pub fn get(self) -> i32 {
        self.0 as i32
    }

    pub fn value(self) -> f64 {
        self.0 as f64
    }

    pub fn flipped(self) -> Self {
        Self(-self.0)
    }
}

impl TryFrom<i32> for SignSwitch {
    type Error = Error;
    fn try_from(v: i32) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SignSwitch> for i32 {
    fn from(s: SignSwitch) -> i32 {
        s.get()
    }
}

/// A root `t₀ ≠ 0`, the slope `sgn = λ'(t₀)` and `λ^III = λ'''(t₀)/6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootAnchor {
    pub t0: f64,
    pub sgn: SignSwitch,
    pub lam3: f64,
}

impl RootAnchor {
    pub fn new(t0: f64, sgn: SignSwitch, lam3: f64) -> Result<Self> {
        if t0 == 0.0 || !t0.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "t0 must be finite and nonzero, got {t0}"
            )));
        }
        if !lam3.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "lam3 must be finite, got {lam3}"
            )));
        }
        Ok(Self { t0, sgn, lam3 })
    }

    pub fn s(&self) -> f64 {
        self.sgn.value()
    }
}

/// Parameters `(α, β, γ, δ)` of the four-parameter form
/// `λ'' = λ'²/λ − λ'/t + (αλ² + β)/t + γλ³ + δ/λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P3FormParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Scalings relating the two forms:
/// `t_ = t_scale·t^{1/2}`, `λ_(t_) = lambda_scale·t^{-1/2}·λ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableMap {
    pub t_scale: f64,
    pub lambda_scale: f64,
}

impl VariableMap {
    /// `(t, λ) ↦ (t_, λ_)`; requires `t > 0`.
    pub fn forward(&self, t: f64, lambda: f64) -> Result<(f64, f64)> {
        if t <= 0.0 {
            return domain(format!("variable map needs t > 0, got {t}"));
        }
        let r = t.sqrt();
        Ok((self.t_scale * r, self.lambda_scale * lambda / r))
    }

    /// `(t_, λ_) ↦ (t, λ)`; requires `t_ > 0`.
    pub fn inverse(&self, t_u: f64, lambda_u: f64) -> Result<(f64, f64)> {
        if t_u <= 0.0 {
            return domain(format!("variable map needs t_ > 0, got {t_u}"));
        }
        let r = t_u / self.t_scale;
        Ok((r * r, lambda_u * r / self.lambda_scale))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// `λ''` from the equation.
pub fn rhs_scalar<T: Real>(t: T, lambda: T, lambda_dot: T, p: &EquationParams) -> Result<T> {
    if t.is_zero() {
        return domain("rhs_scalar: t = 0");
    }
    if lambda.is_zero() {
        return domain("rhs_scalar: lambda = 0");
    }
    Ok(rhs_unchecked(t, lambda, lambda_dot, p))
}

#[inline]
pub(crate) fn rhs_unchecked<T: Real>(t: T, l: T, ld: T, p: &EquationParams) -> T {
    let chi0 = T::of(p.chi0);
    let chi_inf = T::of(p.chi_inf);
    let t2 = t * t;
    ld * ld / l - ld / t - chi_inf * l * l / t2 + l * l * l / t2 + chi0 / t - T::one() / l
}

/// `λ'''` obtained by differentiating the equation once and eliminating `λ''`.
pub fn third_derivative(t: f64, lambda: f64, lambda_dot: f64, p: &EquationParams) -> Result<f64> {
    let f = rhs_scalar(t, lambda, lambda_dot, p)?;
    let (l, ld) = (lambda, lambda_dot);
    let (t2, t3) = (t * t, t * t * t);
    let l2 = l * l;
    let f_t = ld / t2 + 2.0 * p.chi_inf * l2 / t3 - 2.0 * l2 * l / t3 - p.chi0 / t2;
    let f_l = -ld * ld / l2 - 2.0 * p.chi_inf * l / t2 + 3.0 * l2 / t2 + 1.0 / l2;
    let f_ld = 2.0 * ld / l - 1.0 / t;
    Ok(f_t + f_l * ld + f_ld * f)
}

pub fn hamiltonian(pt: &PhasePoint, p: &EquationParams, s: SignSwitch) -> Result<f64> {
    if pt.t == 0.0 {
        return domain("hamiltonian: t = 0");
    }
    let (t, l, m) = (pt.t, pt.lambda, pt.mu);
    let sg = s.value();
    Ok((l * l * m * m - (l * l - l + sg * (p.chi0 * l - t)) * m
        + 0.5 * (p.chi_inf + sg * p.chi0 - 1.0) * l)
        / t)
}

/// `(λ', μ')` from the Hamilton equations.
pub fn hamilton_rhs(pt: &PhasePoint, p: &EquationParams, s: SignSwitch) -> Result<(f64, f64)> {
    if pt.t == 0.0 {
        return domain("hamilton_rhs: t = 0");
    }
    let (t, l, m) = (pt.t, pt.lambda, pt.mu);
    let sg = s.value();
    let a = sg * p.chi0 - 1.0;
    let ld = (sg * t - a * l + (2.0 * m - 1.0) * l * l) / t;
    let md = (-0.5 * (p.chi_inf + sg * p.chi0 - 1.0) + (a + 2.0 * l) * m - 2.0 * l * m * m) / t;
    Ok((ld, md))
}

/// The conjugate momentum expressed through `λ` and `λ'`.
pub fn mu_from_lambda(
    t: f64,
    lambda: f64,
    lambda_dot: f64,
    s: SignSwitch,
    p: &EquationParams,
) -> Result<f64> {
    if lambda == 0.0 {
        return domain("mu_from_lambda: lambda = 0");
    }
    let sg = s.value();
    Ok(
        ((sg * p.chi0 - 1.0) * lambda + lambda * lambda + (lambda_dot - sg) * t)
            / (2.0 * lambda * lambda),
    )
}

/// Right-hand side of `t·dλ^III/dt` in the coupled system, with `uplam`
/// and `mu` the values of `λ^III(t)` and `μ(t)`.
pub fn w_lambda(
    dt: f64,
    t: f64,
    uplam: f64,
    mu: f64,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<f64> {
    if dt == 0.0 {
        return domain("w_lambda: dt = 0");
    }
    if t == 0.0 {
        return domain("w_lambda: t = 0");
    }
    let (s, t0, c0) = (a.s(), a.t0, p.chi0);
    let m2 = 2.0 * mu - 1.0;
    let q = (s - c0) / (2.0 * t0) + dt * uplam;
    Ok(
        (s * (c0 * c0 - 1.0) / (2.0 * t0) - 1.0 + 2.0 * mu - 3.0 * t0 * uplam) / dt
            + (1.0 - s * c0) * m2 / t0
            - (2.0 + s * c0) * uplam
            + dt * m2 * (2.0 * s * uplam + q * q),
    )
}

/// Right-hand side of `t·dμ/dt` in the coupled system.
pub fn w_mu(dt: f64, _t: f64, uplam: f64, mu: f64, a: &RootAnchor, p: &EquationParams) -> f64 {
    let (s, t0, c0) = (a.s(), a.t0, p.chi0);
    -0.5 * (p.chi_inf + s * c0 - 1.0)
        - (1.0 - s * c0) * mu
        - 2.0 * dt * (mu - 1.0) * mu * (s + dt * (s - c0) / (2.0 * t0) + dt * dt * uplam)
}

/// Maps four-parameter-form constants to `(χ₀, χ∞)` and the variable scalings.
/// Only the real branch (`δ < 0`, `γδ < 0`) is supported.
pub fn convert_p3_to_p3prime(q: &P3FormParams) -> Result<(EquationParams, VariableMap)> {
    let P3FormParams {
        alpha,
        beta,
        gamma,
        delta,
    } = *q;
    if gamma == 0.0 || delta == 0.0 {
        return Err(Error::InvalidParameters(
            "gamma and delta must be nonzero".into(),
        ));
    }
    if delta >= 0.0 || gamma * delta >= 0.0 {
        return Err(Error::InvalidParameters(format!(
            "real conversion needs delta < 0 and gamma*delta < 0 (gamma = {gamma}, delta = {delta})"
        )));
    }
    let md = (-delta).sqrt();
    let mgd = (-gamma * delta).sqrt();
    let chi_inf = alpha * md / (2.0 * mgd);
    let chi0 = -beta / (2.0 * md);
    let quarter = mgd.sqrt();
    let map = VariableMap {
        t_scale: 2.0 / quarter,
        lambda_scale: md / quarter,
    };
    Ok((EquationParams::new(chi0, chi_inf)?, map))
}

/// Inverse of [`convert_p3_to_p3prime`] for given `γ`, `δ`.
pub fn convert_p3prime_to_p3(p: &EquationParams, gamma: f64, delta: f64) -> Result<P3FormParams> {
    if delta >= 0.0 || gamma * delta >= 0.0 {
        return Err(Error::InvalidParameters(format!(
            "real conversion needs delta < 0 and gamma*delta < 0 (gamma = {gamma}, delta = {delta})"
        )));
    }
    let md = (-delta).sqrt();
    let mgd = (-gamma * delta).sqrt();
    Ok(P3FormParams {
        alpha: 2.0 * mgd / md * p.chi_inf,
        beta: -2.0 * md * p.chi0,
        gamma,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(c0: f64, ci: f64) -> EquationParams {
        EquationParams::new(c0, ci).unwrap()
    }

    #[test]
    fn rhs_trivial_points() {
        assert_eq!(rhs_scalar(1.0, 1.0, 0.0, &pp(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(rhs_scalar(1.0, 1.0, 1.0, &pp(1.0, 1.0)).unwrap(), 0.0);
        assert!(rhs_scalar(0.0, 1.0, 1.0, &pp(1.0, 1.0)).is_err());
        assert!(rhs_scalar(1.0, 0.0, 1.0, &pp(1.0, 1.0)).is_err());
    }

    #[test]
    fn sign_switch_rejects_other_values() {
        assert!(SignSwitch::new(0).is_err());
        assert!(SignSwitch::new(2).is_err());
        assert_eq!(SignSwitch::new(-1).unwrap().value(), -1.0);
        let s: std::result::Result<SignSwitch, _> = serde_json::from_str("3");
        assert!(s.is_err());
        let s: SignSwitch = serde_json::from_str("-1").unwrap();
        assert_eq!(s, SignSwitch::MINUS);
    }

    #[test]
    fn anchor_rejects_zero_root() {
        assert!(RootAnchor::new(0.0, SignSwitch::PLUS, 1.0).is_err());
    }

    #[test]
    fn hamiltonian_trivial_points() {
        let p = pp(0.3, -0.7);
        let pt = PhasePoint {
            t: 1.0,
            lambda: 0.0,
            mu: 0.0,
        };
        assert_eq!(hamiltonian(&pt, &p, SignSwitch::PLUS).unwrap(), 0.0);
        let pt = PhasePoint {
            t: 1.0,
            lambda: 1.0,
            mu: 0.0,
        };
        assert_eq!(
            hamiltonian(&pt, &pp(1.0, 1.0), SignSwitch::PLUS).unwrap(),
            0.5
        );
        let pt = PhasePoint {
            t: 1.0,
            lambda: 0.0,
            mu: 0.0,
        };
        let (a, b) = hamilton_rhs(&pt, &p, SignSwitch::PLUS).unwrap();
        assert_eq!(a, 1.0);
        assert_eq!(b, -0.5 * (-0.7 + 0.3 - 1.0));
    }

    #[test]
    fn mu_from_lambda_unit_slope() {
        let p = pp(0.37, 2.0);
        for s in [SignSwitch::PLUS, SignSwitch::MINUS] {
            let m = mu_from_lambda(3.3, 1.0, s.value(), s, &p).unwrap();
            assert!((m - s.value() * 0.37 / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn w_mu_at_zero_dt() {
        let p = pp(0.4, -1.3);
        let a = RootAnchor::new(0.8, SignSwitch::MINUS, 2.0).unwrap();
        let base = -0.5 * (-1.3 - 0.4 - 1.0);
        assert_eq!(w_mu(0.0, 0.8, 5.0, 0.0, &a, &p), base);
        assert!((w_mu(0.0, 0.8, 5.0, 1.7, &a, &p) - (base - (1.0 + 0.4) * 1.7)).abs() < 1e-14);
    }

    #[test]
    fn w_lambda_constraint_numerator() {
        let a = RootAnchor::new(1.0, SignSwitch::PLUS, 0.0).unwrap();
        let p = pp(0.0, 0.3);
        let w = w_lambda(0.1, 1.1, 0.0, 0.75, &a, &p).unwrap();
        // Only the regular terms survive.
        let expect = (1.0) * 0.5 / 1.0 + 0.1 * 0.5 * (0.5_f64).powi(2);
        assert!((w - expect).abs() < 1e-14);
        assert!(w_lambda(0.0, 1.0, 0.0, 0.75, &a, &p).is_err());
    }

    #[test]
    fn conversion_examples() {
        let (p, _) = convert_p3_to_p3prime(&P3FormParams {
            alpha: 0.0,
            beta: 0.0,
            gamma: 1.0,
            delta: -1.0,
        })
        .unwrap();
        assert_eq!((p.chi0, p.chi_inf), (0.0, 0.0));
        let (p, _) = convert_p3_to_p3prime(&P3FormParams {
            alpha: 2.0,
            beta: -2.0,
            gamma: 1.0,
            delta: -1.0,
        })
        .unwrap();
        assert_eq!((p.chi0, p.chi_inf), (1.0, 1.0));
        assert!(convert_p3_to_p3prime(&P3FormParams {
            alpha: 2.0,
            beta: -2.0,
            gamma: -1.0,
            delta: -1.0
        })
        .is_err());
        assert!(convert_p3_to_p3prime(&P3FormParams {
            alpha: 2.0,
            beta: -2.0,
            gamma: 1.0,
            delta: 1.0
        })
        .is_err());
        assert!(convert_p3_to_p3prime(&P3FormParams {
            alpha: 2.0,
            beta: -2.0,
            gamma: 0.0,
            delta: -1.0
        })
        .is_err());
    }

    #[test]
    fn variable_map_round_trip() {
        let q = P3FormParams {
            alpha: 0.3,
            beta: 1.1,
            gamma: 2.5,
            delta: -0.7,
        };
        let (_, m) = convert_p3_to_p3prime(&q).unwrap();
        let (tu, lu) = m.forward(1.7, -0.4).unwrap();
        let (t, l) = m.inverse(tu, lu).unwrap();
        assert!((t - 1.7).abs() < 1e-14 && (l + 0.4).abs() < 1e-14);
        assert!(m.forward(-1.0, 1.0).is_err());
    }
}
