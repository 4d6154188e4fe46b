//! Integral steps, the staggered scheme and closed-form references.

use super::kernels::{
    check_anchors, eta_average, omega_lambda_eta, omega_mu_eta, omega_xi_eta, validity_xi, Consts,
};
use super::DtSeries;
use crate::error::Result;
use crate::{EquationParams, Real, RootAnchor};

/// `μ(t₀)` forced by regularity at the root.
pub fn mu_at_root<T: Real>(a: &RootAnchor, p: &EquationParams) -> T {
    let k = Consts::<T>::new(a, p);
    let three = T::of(3.0);
    (T::one() - k.a() + three * k.t0 * k.l3) / T::of(2.0)
}

/// Starting pair `(λ₁, μ₁)`: degree 5 and 1 polynomials, both trusted only
/// at order 0.
pub fn init_pair<T: Real>(a: &RootAnchor, p: &EquationParams) -> (DtSeries<T>, DtSeries<T>) {
    let k = Consts::<T>::new(a, p);
    let (s, t0, c0, ci, l) = (k.s, k.t0, k.c0, k.ci, k.l3);
    let n = |x: i64| T::of_i(x);
    let kk = k.k();
    let b = k.a() - n(3) * t0 * l;
    let cm = c0 - s;
    let sq = c0 * c0 - T::one();

    // Coefficients in powers of (t - t0)/t0.
    let r = [
        l,
        -ci / (n(4) * t0),
        s * (T::one() - (s * c0 * cm / t0 - n(3) * t0 * l) * b) / n(10)
            + kk * s * c0 / (n(10) * t0),
        -kk * (cm * cm / (n(4) * t0) + sq / (n(3) * t0) - n(2) * s * t0 * l) / n(6)
            + cm * (b * b - T::one()) / n(36),
        kk * cm * b / n(28) - kk * kk * s / n(28),
        kk * kk * cm / n(80),
    ];
    let mut scale = T::one();
    let lam: Vec<T> = r
        .iter()
        .map(|&c| {
            let v = c * scale;
            scale = scale / t0;
            v
        })
        .collect();
    let mu = vec![mu_at_root::<T>(a, p), -kk / (n(2) * t0)];
    (DtSeries::new(*a, lam, 0), DtSeries::new(*a, mu, 0))
}

/// One application of the `μ` integral equation.
pub fn step_mu<T: Real>(
    lam_in: &DtSeries<T>,
    mu_in: &DtSeries<T>,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<DtSeries<T>> {
    check_anchors(lam_in, mu_in, a)?;
    let v = (mu_in.valid_order() + 1).min(lam_in.valid_order() + 4);
    let k = Consts::<T>::new(a, p);
    let cap = Some(v - 1);
    let w = eta_average(
        &omega_mu_eta(&k, lam_in.trusted(), mu_in.trusted(), cap),
        0,
        cap,
    );
    let mut out = vec![T::zero(); v + 1];
    out[0] = mu_at_root::<T>(a, p);
    for j in 0..v {
        let mut c = w.get(j).copied().unwrap_or_else(T::zero) - mu_in.coeff(j);
        if j == 0 {
            c = c - k.k() / T::of(2.0);
        }
        out[j + 1] = c / k.t0;
    }
    Ok(DtSeries::new(*a, out, v))
}

/// One application of the `λ^III` integral equation.
pub fn step_lambda<T: Real>(
    lam_in: &DtSeries<T>,
    mu_in: &DtSeries<T>,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<DtSeries<T>> {
    check_anchors(lam_in, mu_in, a)?;
    let v = (lam_in.valid_order() + 1).min(mu_in.valid_order());
    let k = Consts::<T>::new(a, p);
    let cap = Some(v);
    let w = eta_average(
        &omega_lambda_eta(&k, lam_in.trusted(), mu_in.trusted(), cap),
        2,
        cap,
    );
    let out = (0..=v)
        .map(|j| {
            let mut c = w.get(j).copied().unwrap_or_else(T::zero);
            if j > 0 {
                c = c - lam_in.coeff(j - 1);
            }
            c / k.t0
        })
        .collect();
    Ok(DtSeries::new(*a, out, v))
}

/// The refined `λ^III` equation, which exposes `λ^III(t₀)` explicitly.
pub fn step_lambda_refined<T: Real>(
    lam_in: &DtSeries<T>,
    mu_in: &DtSeries<T>,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<DtSeries<T>> {
    check_anchors(lam_in, mu_in, a)?;
    let v = (lam_in.valid_order() + 1).min(mu_in.valid_order());
    let k = Consts::<T>::new(a, p);
    let (three, four) = (T::of(3.0), T::of(4.0));
    let mut out = vec![T::zero(); v + 1];
    out[0] = k.l3;
    if v > 0 {
        let cap = Some(v - 1);
        let (l, m) = (lam_in.trusted(), mu_in.trusted());
        let wm = eta_average(&omega_mu_eta(&k, l, m, cap), 0, cap);
        let wx = eta_average(&omega_xi_eta(&k, l, m, cap), 3, cap);
        for j in 0..v {
            let hat = T::of(2.0) * wm.get(j).copied().unwrap_or_else(T::zero)
                + wx.get(j).copied().unwrap_or_else(T::zero);
            let mut c = lam_in.coeff(j) - hat / (three * k.t0);
            if j == 0 {
                c = c + k.k() / (four * k.t0);
            }
            out[j + 1] = -c / k.t0;
        }
    }
    Ok(DtSeries::new(*a, out, v))
}

/// The regular function `ξ` as a series.
pub fn xi_series<T: Real>(
    lam: &DtSeries<T>,
    mu: &DtSeries<T>,
    a: &RootAnchor,
    p: &EquationParams,
) -> Result<DtSeries<T>> {
    check_anchors(lam, mu, a)?;
    let v = validity_xi(lam.valid_order(), mu.valid_order());
    let k = Consts::<T>::new(a, p);
    let cap = Some(v);
    let w = eta_average(&omega_xi_eta(&k, lam.trusted(), mu.trusted(), cap), 3, cap);
    let (two, three) = (T::of(2.0), T::of(3.0));
    let out = (0..=v)
        .map(|j| {
            let mut c = two * mu.coeff(j) - three * k.t0 * lam.coeff(j)
                + w.get(j).copied().unwrap_or_else(T::zero);
            if j == 0 {
                c = c + k.k() / T::of(4.0);
            }
            -c / k.t0
        })
        .collect();
    Ok(DtSeries::new(*a, out, v))
}

/// Runs macro-rounds of four `μ` steps followed by four `λ` steps until the
/// `λ^III` series is trusted to order `target_order`.
pub fn run_scheme<T: Real>(
    a: &RootAnchor,
    p: &EquationParams,
    target_order: usize,
) -> (DtSeries<T>, DtSeries<T>) {
    let (mut lam, mut mu) = init_pair::<T>(a, p);
    while lam.valid_order() < target_order {
        let mut mus = Vec::with_capacity(4);
        let mut m = mu.clone();
        for _ in 0..4 {
            m = step_mu(&lam, &m, a, p).expect("shared anchor");
            mus.push(m.clone());
        }
        let mut l = lam;
        for m in &mus {
            l = step_lambda(&l, m, a, p).expect("shared anchor");
        }
        lam = l;
        mu = m;
    }
    (lam.truncated(target_order), mu.truncated(target_order))
}

/// `λ(t) = sgn·δt + (sgn − χ₀)/(2t₀)·δt² + δt³·λ^III(t)`.
pub fn assemble_lambda<T: Real>(
    a: &RootAnchor,
    p: &EquationParams,
    lam3: &DtSeries<T>,
) -> DtSeries<T> {
    let k = Consts::<T>::new(a, p);
    let mut c = vec![T::zero(), k.s, -k.c()];
    c.extend_from_slice(lam3.trusted());
    DtSeries::new(*lam3.anchor(), c, lam3.valid_order() + 3)
}

/// Closed-form `λ^III` series through `δt⁵`.
pub fn lam6_reference<T: Real>(a: &RootAnchor, p: &EquationParams) -> DtSeries<T> {
    let k = Consts::<T>::new(a, p);
    let (s, t0, c0, ci, l) = (k.s, k.t0, k.c0, k.ci, k.l3);
    let n = |x: i64| T::of_i(x);
    let t2 = t0 * t0;
    let t3 = t2 * t0;
    let t5 = t3 * t2;
    let (l2, l3) = (l * l, l * l * l);
    let cp = c0 + s;

    let c1 = -(ci + (s * c0 + n(2)) * t0 * l) / (n(4) * t2);
    let c2 = s * (n(2) + n(3) * ci * cp / t0 + (n(5) * c0 + n(7) * s) * l + n(6) * t2 * l2)
        / (n(20) * t2);
    let c3 = -(ci * (cp * (n(9) * c0 + n(46) * s) / t0 + n(90) * s * t0 * l)
        + n(2) * (n(18) * c0 + n(7) * s)
        + n(9) * s * (n(9) * c0 + n(11) * s) * l
        + n(18) * (c0 + n(9) * s) * t2 * l2)
        / (n(360) * t3);
    let c4 = (n(90) * s * t0 * ci * ci
        + ci * (cp * (n(91) * c0 + n(284) * s) + n(18) * (n(18) * c0 + n(53) * s) * t2 * l)
        + n(2) * (n(97) * c0 + s * (n(45) * c0 * c0 + n(53))) * t0
        + n(36) * (n(11) * t2 + n(14) * s * c0 + n(16)) * t0 * l
        + n(18) * (n(14) * c0 + n(73) * s) * t3 * l2
        + n(108) * t5 * l3)
        / (n(2520) * t5);
    let c5 = -(n(18) * (n(33) * c0 + n(65) * s) * t0 * ci * ci
        + ci * (cp * (n(830) * c0 + n(2047) * s)
            + n(756) * t2
            + n(36) * s * (n(9) * c0 * c0 + n(140) * s * c0 + n(257)) * t2 * l
            + n(2268) * t2 * t2 * l2)
        + n(2) * (n(45) * c0 * c0 * c0 + n(423) * s * c0 * c0 + n(761) * c0 + n(388) * s) * t0
        + n(36) * (n(100) * s * c0 + n(110) + n(27) * (n(3) * s * c0 + n(4)) * t2) * t0 * l
        + n(18) * (n(157) * c0 + n(620) * s) * t3 * l2
        + n(108) * (s * c0 + n(20)) * t5 * l3)
        / (n(20160) * t5 * t0);
    DtSeries::new(*a, vec![l, c1, c2, c3, c4, c5], 5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SignSwitch;

    fn setup(s: SignSwitch) -> (RootAnchor, EquationParams) {
        (
            RootAnchor::new(0.511115, s, -9.01149).unwrap(),
            EquationParams::new(-0.811597, -0.0550042).unwrap(),
        )
    }

    #[test]
    fn mu_at_root_trivial() {
        let p = EquationParams::new(1.0, 0.3).unwrap();
        let a = RootAnchor::new(2.0, SignSwitch::PLUS, 0.0).unwrap();
        assert_eq!(mu_at_root::<f64>(&a, &p), 0.5);
        let (_, mu1) = init_pair::<f64>(&a, &p);
        assert_eq!(mu1.coeff(0), 0.5);
        let p = EquationParams::new(0.0, 0.3).unwrap();
        let a = RootAnchor::new(1.0, SignSwitch::PLUS, 0.0).unwrap();
        assert_eq!(mu_at_root::<f64>(&a, &p), 0.75);
    }

    #[test]
    fn step_mu_from_zero_gives_mu1() {
        let (a, p) = setup(SignSwitch::MINUS);
        let z = DtSeries::<f64>::zero(a, 0);
        let m = step_mu(&z, &z, &a, &p).unwrap();
        let (_, mu1) = init_pair::<f64>(&a, &p);
        assert_eq!(m.valid_order(), 1);
        for j in 0..2 {
            assert!((m.coeff(j) - mu1.coeff(j)).abs() < 1e-14);
        }
    }

    #[test]
    fn validity_chain() {
        let (a, p) = setup(SignSwitch::PLUS);
        let (l1, mut m) = init_pair::<f64>(&a, &p);
        let mut orders = vec![];
        let mut mus = vec![];
        for _ in 0..5 {
            m = step_mu(&l1, &m, &a, &p).unwrap();
            orders.push(m.valid_order());
            mus.push(m.clone());
        }
        assert_eq!(orders, vec![1, 2, 3, 4, 4]);
        let mut l = l1;
        let mut lo = vec![];
        for m in &mus[..4] {
            l = step_lambda(&l, m, &a, &p).unwrap();
            lo.push(l.valid_order());
        }
        assert_eq!(lo, vec![1, 2, 3, 4]);
    }

    #[test]
    fn refined_keeps_initial_value() {
        let (a, p) = setup(SignSwitch::MINUS);
        let l = DtSeries::new(a, vec![0.3, -2.0, 5.0], 2);
        let m = DtSeries::new(a, vec![1.1, 0.2, 0.0, 4.0], 3);
        let r = step_lambda_refined(&l, &m, &a, &p).unwrap();
        assert_eq!(r.coeff(0), a.lam3);
        assert_eq!(r.valid_order(), 3);
    }

    #[test]
    fn run_scheme_order_zero() {
        let (a, p) = setup(SignSwitch::PLUS);
        let (l, m) = run_scheme::<f64>(&a, &p, 0);
        assert_eq!(l.trusted(), &[a.lam3]);
        assert_eq!(m.trusted(), &[mu_at_root::<f64>(&a, &p)]);
    }

    #[test]
    fn lam6_simple_reads() {
        let p = EquationParams::new(0.7, 0.0).unwrap();
        for s in [SignSwitch::PLUS, SignSwitch::MINUS] {
            let a = RootAnchor::new(1.7, s, 0.0).unwrap();
            let r = lam6_reference::<f64>(&a, &p);
            assert_eq!(r.coeff(1), 0.0);
            assert!((r.coeff(2) - s.value() / (10.0 * 1.7 * 1.7)).abs() < 1e-15);
        }
    }

    #[test]
    fn scheme_matches_lam6_at_appendix_root() {
        let (a, p) = setup(SignSwitch::PLUS);
        let (l, _) = run_scheme::<f64>(&a, &p, 5);
        let r = lam6_reference::<f64>(&a, &p);
        for j in 0..=5 {
            let (x, y) = (l.coeff(j), r.coeff(j));
            assert!(
                (x - y).abs() <= 1e-12 * y.abs().max(1.0),
                "c{j}: {x} vs {y}"
            );
        }
    }

    #[test]
    fn assemble_three_term_part() {
        let (a, p) = setup(SignSwitch::MINUS);
        let z = DtSeries::<f64>::zero(a, 0);
        let s = assemble_lambda(&a, &p, &z);
        assert_eq!(s.coeff(0), 0.0);
        assert_eq!(s.coeff(1), -1.0);
        assert!((s.coeff(2) - (-1.0 + 0.811597) / (2.0 * 0.511115)).abs() < 1e-15);
        assert_eq!(s.valid_order(), 3);
    }
}
