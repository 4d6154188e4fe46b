use num_bigint::BigInt;
use num_rational::BigRational;
use p3_core::equation::{
    hamilton_rhs, hamiltonian, mu_from_lambda, rhs_scalar, third_derivative, w_lambda, w_mu,
};
use p3_core::series::{assemble_lambda, init_pair, mu_at_root, run_scheme, SigmaDtPoly};
use p3_core::{EquationParams, PhasePoint, RootAnchor, SignSwitch};
use proptest::prelude::*;

type Q = BigRational;

fn q(x: f64) -> Q {
    Q::from_float(x).expect("finite")
}

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn f(x: &Q) -> f64 {
    let (n, d) = (x.numer().to_string(), x.denom().to_string());
    // good to a few ulp, enough for a 1e-12 comparison
    n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
}

/// Relative to the largest term, since the terms may cancel.
fn close(got: f64, exact: &Q, scale: f64, tol: f64) -> bool {
    (got - f(exact)).abs() <= tol * scale.max(1.0)
}

fn sgn_of(b: bool) -> SignSwitch {
    if b {
        SignSwitch::PLUS
    } else {
        SignSwitch::MINUS
    }
}

fn nonzero(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi, any::<bool>()).prop_map(|(x, neg)| if neg { -x } else { x })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rhs_matches_exact_rational(t in nonzero(0.1, 3.0), l in nonzero(0.1, 3.0), ld in -3.0..3.0f64,
                                  c0 in -3.0..3.0f64, ci in -3.0..3.0f64) {
        let p = EquationParams::new(c0, ci).unwrap();
        let (tq, lq, ldq) = (q(t), q(l), q(ld));
        let t2 = &tq * &tq;
        let terms = [
            &ldq * &ldq / &lq,
            -(&ldq / &tq),
            -(q(ci) * &lq * &lq / &t2),
            &lq * &lq * &lq / &t2,
            q(c0) / &tq,
            -(qi(1) / &lq),
        ];
        let scale = terms.iter().map(|x| f(x).abs()).fold(0.0, f64::max);
        let exact = terms.iter().fold(qi(0), |a, x| a + x);
        let got = rhs_scalar(t, l, ld, &p).unwrap();
        prop_assert!(close(got, &exact, scale, 1e-14), "{got} vs {}", f(&exact));
    }

    #[test]
    fn hamiltonian_matches_exact_rational(t in nonzero(0.1, 3.0), l in -3.0..3.0f64, m in -3.0..3.0f64,
                                          c0 in -3.0..3.0f64, ci in -3.0..3.0f64, s in any::<bool>()) {
        let p = EquationParams::new(c0, ci).unwrap();
        let sg = sgn_of(s);
        let sq = qi(sg.get() as i64);
        let (tq, lq, mq) = (q(t), q(l), q(m));
        let l2 = &lq * &lq;
        let exact = (&l2 * &mq * &mq - (&l2 - &lq + &sq * (q(c0) * &lq - &tq)) * &mq
            + (q(ci) + &sq * q(c0) - qi(1)) * &lq / qi(2)) / &tq;
        let got = hamiltonian(&PhasePoint { t, lambda: l, mu: m }, &p, sg).unwrap();
        prop_assert!(close(got, &exact, 30.0 / t.abs(), 1e-14));
    }

    #[test]
    fn coupled_rhs_match_exact_rational(dt in nonzero(1e-3, 0.5), t0 in nonzero(0.3, 3.0), up in -5.0..5.0f64,
                                        m in -3.0..3.0f64, c0 in -3.0..3.0f64, ci in -3.0..3.0f64,
                                        s in any::<bool>()) {
        let p = EquationParams::new(c0, ci).unwrap();
        let a = RootAnchor::new(t0, sgn_of(s), 0.0).unwrap();
        let (sq, t0q, c0q, dq, uq, mq) = (qi(sgn_of(s).get() as i64), q(t0), q(c0), q(dt), q(up), q(m));
        let m2 = qi(2) * &mq - qi(1);
        let two_t0 = qi(2) * &t0q;
        let qq = (&sq - &c0q) / &two_t0 + &dq * &uq;
        let wl = (&sq * (&c0q * &c0q - qi(1)) / &two_t0 - qi(1) + qi(2) * &mq - qi(3) * &t0q * &uq) / &dq
            + (qi(1) - &sq * &c0q) * &m2 / &t0q
            - (qi(2) + &sq * &c0q) * &uq
            + &dq * &m2 * (qi(2) * &sq * &uq + &qq * &qq);
        let wm = -(q(ci) + &sq * &c0q - qi(1)) / qi(2) - (qi(1) - &sq * &c0q) * &mq
            - qi(2) * &dq * (&mq - qi(1)) * &mq * (&sq + &dq * (&sq - &c0q) / &two_t0 + &dq * &dq * &uq);
        let t = t0 + dt;
        let got_l = w_lambda(dt, t, up, m, &a, &p).unwrap();
        let got_m = w_mu(dt, t, up, m, &a, &p);
        let scale = 100.0 / dt.abs() / t0.abs();
        prop_assert!(close(got_l, &wl, scale, 1e-14), "{got_l} vs {}", f(&wl));
        prop_assert!(close(got_m, &wm, 100.0, 1e-14));
    }

    #[test]
    fn hamilton_equations_are_gradients(t in nonzero(0.2, 3.0), l in -2.0..2.0f64, m in -2.0..2.0f64,
                                        c0 in -3.0..3.0f64, ci in -3.0..3.0f64, s in any::<bool>()) {
        let p = EquationParams::new(c0, ci).unwrap();
        let sg = sgn_of(s);
        let h = 1e-5;
        let at = |l: f64, m: f64| hamiltonian(&PhasePoint { t, lambda: l, mu: m }, &p, sg).unwrap();
        let (ld, md) = hamilton_rhs(&PhasePoint { t, lambda: l, mu: m }, &p, sg).unwrap();
        let dm = (at(l, m + h) - at(l, m - h)) / (2.0 * h);
        let dl = (at(l + h, m) - at(l - h, m)) / (2.0 * h);
        prop_assert!((ld - dm).abs() <= 1e-7 * ld.abs().max(1.0));
        prop_assert!((md + dl).abs() <= 1e-7 * md.abs().max(1.0));
    }

    /// Eliminating μ from the Hamilton equations gives back λ' and λ''.
    #[test]
    fn momentum_elimination(t in nonzero(0.2, 3.0), l in nonzero(0.2, 2.0), ld in -2.0..2.0f64,
                            c0 in -3.0..3.0f64, ci in -3.0..3.0f64, s in any::<bool>()) {
        let p = EquationParams::new(c0, ci).unwrap();
        let sg = sgn_of(s);
        let mu = mu_from_lambda(t, l, ld, sg, &p).unwrap();
        let (l1, m1) = hamilton_rhs(&PhasePoint { t, lambda: l, mu }, &p, sg).unwrap();
        prop_assert!((l1 - ld).abs() <= 1e-12 * (1.0 + ld.abs() + mu.abs() * l * l / t.abs()));
        // d/dt of mu_from_lambda along the flow equals the Hamilton μ'
        let l2 = rhs_scalar(t, l, ld, &p).unwrap();
        let h = 1e-5;
        let along = |e: f64| mu_from_lambda(t + e, l + e * ld + 0.5 * e * e * l2, ld + e * l2, sg, &p).unwrap();
        let dmu = (along(h) - along(-h)) / (2.0 * h);
        prop_assert!((dmu - m1).abs() <= 1e-5 * m1.abs().max(1.0), "{dmu} vs {m1}");
    }

    #[test]
    fn third_derivative_matches_differences(t in nonzero(0.3, 3.0), l in nonzero(0.3, 2.0), ld in -2.0..2.0f64,
                                            c0 in -3.0..3.0f64, ci in -3.0..3.0f64) {
        let p = EquationParams::new(c0, ci).unwrap();
        let l2 = rhs_scalar(t, l, ld, &p).unwrap();
        let h = 1e-6;
        let at = |e: f64| rhs_scalar(t + e, l + e * ld, ld + e * l2, &p).unwrap();
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let got = third_derivative(t, l, ld, &p).unwrap();
        prop_assert!((got - fd).abs() <= 1e-5 * got.abs().max(1.0), "{got} vs {fd}");
    }

    #[test]
    fn swapping_twice_is_identity(c0 in -3.0..3.0f64, ci in -3.0..3.0f64, s in any::<bool>()) {
        let p = EquationParams::new(c0, ci).unwrap();
        prop_assert_eq!(p.swapped().swapped(), p);
        prop_assert_eq!(sgn_of(s).flipped().flipped(), sgn_of(s));
        prop_assert_eq!(sgn_of(s).get() * sgn_of(s).get(), 1);
    }

    /// The series depends on sgn only through the anchor, and λ'(t₀) = sgn.
    #[test]
    fn series_starts_with_unit_slope(t0 in nonzero(0.3, 3.0), l3 in -10.0..10.0f64, c0 in -3.0..3.0f64,
                                     ci in -3.0..3.0f64, s in any::<bool>()) {
        let p = EquationParams::new(c0, ci).unwrap();
        let a = RootAnchor::new(t0, sgn_of(s), l3).unwrap();
        let (l, _) = run_scheme::<f64>(&a, &p, 4);
        let lam = assemble_lambda(&a, &p, &l);
        let [v, d1, d2] = lam.eval_derivs(0.0);
        prop_assert_eq!(v, 0.0);
        prop_assert_eq!(d1, a.s());
        prop_assert!((d2 - (a.s() - c0) / t0).abs() <= 1e-14 * d2.abs().max(1.0));
        prop_assert!((lam.coeff(3) - l3).abs() <= 1e-15 * l3.abs().max(1.0));
    }

    #[test]
    fn init_pair_anchors_at_the_root(t0 in nonzero(0.3, 3.0), l3 in -10.0..10.0f64, c0 in -3.0..3.0f64,
                             ci in -3.0..3.0f64, s in any::<bool>()) {
        let p = EquationParams::new(c0, ci).unwrap();
        let a = RootAnchor::new(t0, sgn_of(s), l3).unwrap();
        let (l, m) = init_pair::<f64>(&a, &p);
        prop_assert_eq!(l.coeff(0), l3);
        prop_assert_eq!(m.coeff(0), mu_at_root::<f64>(&a, &p));
        prop_assert_eq!((l.valid_order(), m.valid_order()), (0, 0));
    }
}

/// ∫₀¹ σ^(m+p) dσ against composite Gauss–Legendre quadrature.
#[test]
fn sigma_average_matches_quadrature() {
    let a = RootAnchor::new(0.9, SignSwitch::MINUS, 2.0).unwrap();
    let mut poly = SigmaDtPoly::<f64>::new(a, 3);
    poly.add_term(0, 0, 1.5);
    poly.add_term(2, 1, -0.75);
    poly.add_term(5, 1, 2.0);
    poly.add_term(3, 3, 0.125);
    poly.add_term(1, 4, 9.0); // beyond the trusted order
    let (x, w) = (
        [
            -0.906179845938664,
            -0.538469310105683,
            0.0,
            0.538469310105683,
            0.906179845938664,
        ],
        [
            0.236926885056189,
            0.478628670499366,
            0.568888888888889,
            0.478628670499366,
            0.236926885056189,
        ],
    );
    let dt: f64 = 0.3;
    for p in 0..3u32 {
        let avg = poly.sigma_average(p);
        let mut quad = 0.0;
        for cell in 0..8 {
            let (lo, hi) = (cell as f64 / 8.0, (cell + 1) as f64 / 8.0);
            for (xi, wi) in x.iter().zip(w) {
                let s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi;
                let trusted: f64 = poly
                    .terms()
                    .filter(|((_, k), _)| *k <= 3)
                    .map(|((m, k), c)| c * s.powi(m as i32) * dt.powi(k as i32))
                    .sum();
                quad += 0.5 * (hi - lo) * wi * s.powi(p as i32) * trusted;
            }
        }
        assert!(
            (avg.eval(dt) - quad).abs() < 1e-13,
            "p = {p}: {} vs {quad}",
            avg.eval(dt)
        );
        assert_eq!(avg.coeff(4), 0.0);
    }
}
