//! Laurent expansions at simple poles, obtained from root expansions of the
//! parameter-swapped equation through `λ ↦ t/λ`.

use crate::equation::rhs_unchecked;
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::series::poly;
use crate::series::{assemble_lambda, run_scheme, DtSeries};
use crate::{EquationParams, Real, RootAnchor, SignSwitch};

/// `residue/δt + Σ d_k δt^k` about a pole `t₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentExpansion<T = f64> {
    pub t0: f64,
    pub sgn: SignSwitch,
    pub residue: T,
    pub regular_coeffs: Vec<T>,
    pub valid_order: usize,
    /// `λ^III` of the root expansion of the swapped equation.
    pub lam3_swapped: f64,
}

impl<T: Real> LaurentExpansion<T> {
    pub fn eval(&self, dt: T) -> T {
        self.residue / dt + poly::eval(self.trusted(), dt)
    }

    /// Value and first two derivatives.
    pub fn eval_derivs(&self, dt: T) -> [T; 3] {
        let [v, d1, d2] = poly::eval_derivs(self.trusted(), dt);
        let r = self.residue / dt;
        let two = T::of(2.0);
        [v + r, d1 - r / dt, d2 + two * r / (dt * dt)]
    }

    pub fn trusted(&self) -> &[T] {
        &self.regular_coeffs[..=self.valid_order.min(self.regular_coeffs.len() - 1)]
    }

    /// Derivative of the regular part at the pole, the free family parameter.
    pub fn d1(&self) -> T {
        self.regular_coeffs.get(1).copied().unwrap_or_else(T::zero)
    }

    pub fn truncated(&self, order: usize) -> Self {
        let v = order.min(self.valid_order);
        let mut out = self.clone();
        out.regular_coeffs.truncate(v + 1);
        out.valid_order = v;
        out
    }

    pub fn to_f64(&self) -> LaurentExpansion<f64> {
        LaurentExpansion {
            t0: self.t0,
            sgn: self.sgn,
            residue: self.residue.as_f64(),
            regular_coeffs: self.regular_coeffs.iter().map(|c| c.as_f64()).collect(),
            valid_order: self.valid_order,
            lam3_swapped: self.lam3_swapped,
        }
    }
}

/// `t/λ` for a root series `λ = c₁δt + c₂δt² + …` with `c₀ = 0`, `|c₁| = 1`.
pub fn series_reciprocal_times_t<T: Real>(lam_root: &DtSeries<T>) -> Result<LaurentExpansion<T>> {
    let c = lam_root.trusted();
    if c.len() < 2 || !c[0].is_zero() {
        return Err(Error::NotSimpleRoot("constant term must vanish".into()));
    }
    let c1 = c[1].as_f64();
    if (c1.abs() - 1.0).abs() > 1e-12 {
        return Err(Error::NotSimpleRoot(format!(
            "slope at the root is {c1}, not ±1"
        )));
    }
    let v_order = lam_root.valid_order();
    if v_order < 2 {
        return Err(Error::NotSimpleRoot(
            "need the series through second order".into(),
        ));
    }
    // λ = δt·u, t/λ = (t₀ + δt)/δt · 1/u
    let u = &c[1..];
    let n = v_order - 1;
    let v = poly::reciprocal(u, n);
    let a = lam_root.anchor();
    let t0 = T::of(a.t0);
    let regular: Vec<T> = (0..n).map(|k| t0 * v[k + 1] + v[k]).collect();
    Ok(LaurentExpansion {
        t0: a.t0,
        sgn: SignSwitch::of(c1)?,
        residue: t0 * v[0],
        regular_coeffs: regular,
        valid_order: n - 1,
        lam3_swapped: a.lam3,
    })
}

/// Laurent expansion at a pole `a.t0` of a solution of the equation with
/// parameters `p`; `a.lam3` is the `λ^III` of the swapped-parameter root.
pub fn root_to_pole<T: Real>(
    a: &RootAnchor,
    p: &EquationParams,
    order: usize,
) -> LaurentExpansion<T> {
    let q = p.swapped();
    let n = order.max(1) - 1;
    let (l3, _) = run_scheme::<T>(a, &q, n);
    let lam = assemble_lambda(a, &q, &l3);
    series_reciprocal_times_t(&lam)
        .expect("assembled root series has unit slope")
        .truncated(order)
}

/// Closed-form Laurent expansion through `δt⁴`.
pub fn pole_b5_reference<T: Real>(a: &RootAnchor, p: &EquationParams) -> LaurentExpansion<T> {
    let n = |x: i64| T::of_i(x);
    let (s, t0, c0, ci, l) = (
        T::of(a.s()),
        T::of(a.t0),
        T::of(p.chi0),
        T::of(p.chi_inf),
        T::of(a.lam3),
    );
    let ci2 = ci * ci;
    let one = T::one();
    let t2 = t0 * t0;
    let d0 = (s + ci) / n(2);
    let d1 = -(s * (one - ci2) / (n(4) * t0) + t0 * l);
    let d2 =
        ((s - ci) * (one - ci2) / (n(2) * t0) + c0 + (n(2) - n(3) * s * ci) * t0 * l) / (n(4) * t0);
    let d3 = -(s
        + (n(3) - n(2) * s * ci) / (n(2) * t0) * c0
        + n(5) * (s * (one + ci2) - n(2) * ci) * (one - ci2) / (n(8) * t2)
        + (one - n(5) * (n(3) * s - n(2) * ci) * ci / n(2)) * l
        - n(7) * s * t2 * l * l)
        / (n(10) * t0);
    let d4 = (n(7) * s / n(9)
        + n(5) * (one - ci2) * (s * (one + n(3) * ci2) - (n(3) + ci2) * ci) / (n(8) * t2)
        + (n(47) + n(45) * ci2 - n(88) * s * ci) * c0 / (n(36) * t0)
        - ((n(2) - n(15) * ci2) + n(5) * s * (n(7) + n(5) * ci2) * ci / n(4) + n(5) * s * t0 * c0)
            * l
        - n(3) * (n(7) * s - n(5) * ci) * t2 * l * l)
        / (n(20) * t2);
    LaurentExpansion {
        t0: a.t0,
        sgn: a.sgn,
        residue: s * t0,
        regular_coeffs: vec![d0, d1, d2, d3, d4],
        valid_order: 4,
        lam3_swapped: a.lam3,
    }
}

/// `λ'' − F(t, λ, λ')` on the expansion at `t = t₀ + δt`.
pub fn laurent_residual<T: Real>(le: &LaurentExpansion<T>, p: &EquationParams, dt: T) -> T {
    let [v, d1, d2] = le.eval_derivs(dt);
    d2 - rhs_unchecked(T::of(le.t0) + dt, v, d1, p)
}

/// Log-log slope of the residual of the equation on the expansion.
pub fn pole_residual_order<T: Real>(
    le: &LaurentExpansion<T>,
    p: &EquationParams,
    dt_grid: &[f64],
) -> Result<f64> {
    crate::series::check_grid(dt_grid)?;
    let r: Vec<f64> = dt_grid
        .iter()
        .map(|&d| laurent_residual(le, p, T::of(d)).as_f64().abs())
        .collect();
    let x: Vec<f64> = dt_grid.iter().map(|d| d.abs()).collect();
    loglog_slope(&x, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Dd;

    fn anchor(sgn: SignSwitch) -> RootAnchor {
        RootAnchor::new(0.9, sgn, -1.7).unwrap()
    }

    #[test]
    fn reciprocal_of_identity() {
        let a = anchor(SignSwitch::PLUS);
        let s = DtSeries::new(a, vec![0.0, 1.0, 0.0, 0.0], 3);
        let le = series_reciprocal_times_t(&s).unwrap();
        assert_eq!(le.residue, 0.9);
        assert_eq!(le.regular_coeffs[0], 1.0);
        assert_eq!(le.regular_coeffs[1], 0.0);
    }

    #[test]
    fn reciprocal_long_division() {
        let a = anchor(SignSwitch::PLUS);
        let k = 0.37;
        let s = DtSeries::new(a, vec![0.0, 1.0, k, 0.0, 0.0, 0.0], 5);
        let le = series_reciprocal_times_t(&s).unwrap();
        assert_eq!(le.residue, 0.9);
        assert!((le.regular_coeffs[0] - (1.0 - k * 0.9)).abs() < 1e-15);
        // (t0 + δt)/(δt (1 + kδt)) = (t0 + δt) Σ (−k)^j δt^{j−1}
        for j in 1..le.regular_coeffs.len() {
            let expect = 0.9 * (-k).powi(j as i32 + 1) + (-k).powi(j as i32);
            assert!((le.regular_coeffs[j] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_simple_root() {
        let a = anchor(SignSwitch::PLUS);
        assert!(series_reciprocal_times_t(&DtSeries::new(a, vec![0.1, 1.0, 0.0], 2)).is_err());
        assert!(series_reciprocal_times_t(&DtSeries::new(a, vec![0.0, 2.0, 0.0], 2)).is_err());
    }

    #[test]
    fn residue_and_constant_term() {
        let p = EquationParams::new(0.25, -0.6).unwrap();
        for s in [SignSwitch::PLUS, SignSwitch::MINUS] {
            let a = anchor(s);
            let le = root_to_pole::<f64>(&a, &p, 4);
            assert_eq!(le.residue, s.value() * 0.9);
            assert!((le.regular_coeffs[0] - (s.value() - 0.6) / 2.0).abs() < 1e-15);
            assert_eq!(le.valid_order, 4);
        }
    }

    #[test]
    fn matches_closed_form() {
        let p = EquationParams::new(0.25, -0.6).unwrap();
        for s in [SignSwitch::PLUS, SignSwitch::MINUS] {
            let a = anchor(s);
            let le = root_to_pole::<f64>(&a, &p, 4);
            let closed = pole_b5_reference::<f64>(&a, &p);
            for k in 0..=4 {
                let (x, y) = (le.regular_coeffs[k], closed.regular_coeffs[k]);
                assert!(
                    (x - y).abs() <= 1e-12 * y.abs().max(1.0),
                    "{s:?} d{k}: {x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn residue_only_has_negative_slope() {
        let p = EquationParams::new(0.25, -0.6).unwrap();
        let a = anchor(SignSwitch::PLUS);
        let le = root_to_pole::<Dd>(&a, &p, 0);
        let bare = LaurentExpansion {
            regular_coeffs: vec![Dd::zero()],
            ..le
        };
        let grid: Vec<f64> = (0..=10)
            .map(|i| 0.9 * 10f64.powf(-3.0 + 0.2 * i as f64))
            .collect();
        assert!(pole_residual_order(&bare, &p, &grid).unwrap() <= -0.5);
    }

    #[test]
    fn residual_slopes_grow_with_order() {
        let p = EquationParams::new(0.25, -0.6).unwrap();
        let grid: Vec<f64> = (0..=10)
            .map(|i| 0.9 * 10f64.powf(-3.0 + 0.2 * i as f64))
            .collect();
        for s in [SignSwitch::PLUS, SignSwitch::MINUS] {
            let a = anchor(s);
            let closed = pole_b5_reference::<Dd>(&a, &p);
            let k4 = pole_residual_order(&closed, &p, &grid).unwrap();
            let k6 = pole_residual_order(&root_to_pole::<Dd>(&a, &p, 6), &p, &grid).unwrap();
            assert!(k4 >= 2.5, "{k4}");
            assert!(k6 >= 4.5, "{k6}");
        }
    }
}
