//! End-to-end checks, one per acceptance criterion.
//!
//! Random draws come from a ChaCha8 generator seeded with
//! [`VerifyConfig::seed`], so every run sees the same parameters.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::appendix;
use crate::equation::{convert_p3_to_p3prime, convert_p3prime_to_p3, hamilton_rhs, hamiltonian};
use crate::error::Result;
use crate::ode::{
    compare_series, hamiltonian_crosscheck, mu_dichotomy, roots_with_lam3, symmetry_check,
    DenseSolution, IntegrateOptions,
};
use crate::pole::{pole_b5_reference, pole_residual_order, root_to_pole};
use crate::series::{
    algorithm_increments, assemble_lambda, convergence_bounds, lam6_reference, residual_order,
    run_scheme,
};
use crate::{Dd, EquationParams, P3FormParams, PhasePoint, RootAnchor, SignSwitch};

pub const DEFAULT_SEED: u64 = 20;
pub const DEFAULT_DRAWS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub draws: usize,
    pub options: IntegrateOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            draws: DEFAULT_DRAWS,
            options: IntegrateOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{tag}] {}. {}: {} ({:.2} s)",
            self.id, self.title, self.detail, self.seconds
        )
    }
}

/// Runs one check; exceeding `budget` seconds counts as a failure.
fn run(
    id: u32,
    budget: f64,
    title: &'static str,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> Outcome {
    let start = Instant::now();
    let (mut passed, mut detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    let seconds = start.elapsed().as_secs_f64();
    if seconds > budget {
        passed = false;
        detail = format!("{detail}; over the {budget} s budget");
    }
    Outcome {
        id,
        title,
        passed,
        detail,
        seconds,
    }
}

/// χ₀, χ∞ ∈ [−3, 3], t₀ ∈ ±[0.3, 3], λ^III ∈ [−10, 10]; sgn alternates.
pub fn random_draws(seed: u64, n: usize) -> Vec<(EquationParams, RootAnchor)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let c0 = rng.gen_range(-3.0..3.0);
            let ci = rng.gen_range(-3.0..3.0);
            let t0 = rng.gen_range(0.3..3.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let l3 = rng.gen_range(-10.0..10.0);
            let s = if i % 2 == 0 {
                SignSwitch::PLUS
            } else {
                SignSwitch::MINUS
            };
            let p = EquationParams::new(c0, ci).expect("finite");
            (p, RootAnchor::new(t0, s, l3).expect("t0 ≠ 0"))
        })
        .collect()
}

fn rel_err(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / y.abs()
    }
}

/// Nonfinite values count as failures.
fn worst(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| {
        if x.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(x)
        }
    })
}

fn ok(x: f64, bound: f64) -> bool {
    x.is_finite() && x <= bound
}

/// `δt/|t₀|` from 1e−3 to 1e−1, logarithmic.
fn slope_grid(t0: f64) -> Vec<f64> {
    (0..=10)
        .map(|i| t0.abs() * 10f64.powf(-3.0 + 0.2 * i as f64))
        .collect()
}

pub fn check_closed_form(cfg: &VerifyConfig) -> Outcome {
    run(1, 1.0, "closed-form oracle", || {
        let e = worst(random_draws(cfg.seed, cfg.draws).iter().map(|(p, a)| {
            let (l, _) = run_scheme::<f64>(a, p, 5);
            let r = lam6_reference::<f64>(a, p);
            worst((0..=5).map(|k| rel_err(l.coeff(k), r.coeff(k))))
        }));
        Ok((
            ok(e, 1e-12),
            format!(
                "max relative error {e:.2e} over {} draws (bound 1e-12)",
                cfg.draws
            ),
        ))
    })
}

pub fn check_residual_order(_cfg: &VerifyConfig) -> Outcome {
    run(2, 1.0, "residual order at a root", || {
        let p = appendix::params();
        let mut pass = true;
        let mut parts = Vec::new();
        for a in appendix::anchors() {
            let grid = slope_grid(a.t0);
            let (l3, _) = run_scheme::<Dd>(&a, &p, 5);
            let mut slopes = Vec::new();
            for k in 0..=5 {
                let s = residual_order(&assemble_lambda(&a, &p, &l3.truncated(k)), &p, &grid)?;
                pass &= if k == 5 {
                    s >= 6.5
                } else {
                    (s - (k as f64 + 2.0)).abs() <= 0.3
                };
                slopes.push(format!("{s:.2}"));
            }
            parts.push(format!(
                "t0 = {}: slopes k=0..5 [{}]",
                a.t0,
                slopes.join(", ")
            ));
        }
        Ok((pass, parts.join("; ")))
    })
}

struct Appendix {
    sol: DenseSolution,
    roots: Vec<crate::ode::RootInfo>,
}

fn appendix_run(cfg: &VerifyConfig) -> Result<Appendix> {
    let sol = appendix::solve(&cfg.options)?;
    let roots = roots_with_lam3(&sol);
    Ok(Appendix { sol, roots })
}

pub fn check_appendix(cfg: &VerifyConfig) -> Outcome {
    run(3, 10.0, "appendix reproduction", || {
        let Appendix { sol, roots } = appendix_run(cfg)?;
        if roots.len() != appendix::ROOTS.len() {
            let found: Vec<String> = roots.iter().map(|r| format!("{:.6}", r.t0)).collect();
            return Ok((
                false,
                format!(
                    "found {} roots [{}], expected 6",
                    roots.len(),
                    found.join(", ")
                ),
            ));
        }
        let dt = worst(
            roots
                .iter()
                .zip(appendix::ROOTS)
                .map(|(r, t)| (r.t0 - t).abs()),
        );
        let slope = worst(
            roots
                .iter()
                .map(|r| (sol.eval(r.t0).map_or(f64::NAN, |v| v[1]).abs() - 1.0).abs()),
        );
        let mut l3_err: f64 = 0.0;
        for (r, &(_, s, l3)) in roots[4..].iter().zip(&appendix::ANCHORS) {
            let e = r.lam3.map_or(f64::NAN, |x| rel_err(x, l3));
            l3_err = worst([l3_err, e]);
            if r.sgn.get() != s {
                return Ok((false, format!("root {} has sgn {}", r.t0, r.sgn.get())));
            }
        }
        let pass = ok(dt, 1e-3) && ok(slope, 1e-3) && ok(l3_err, 1e-2);
        let l3s: Vec<String> = roots[4..]
            .iter()
            .map(|r| format!("{:.6}", r.lam3.unwrap_or(f64::NAN)))
            .collect();
        Ok((
            pass,
            format!(
                "6 roots, max |Δt0| {dt:.1e}; max ||λ'|−1| {slope:.1e}; λ^III [{}] rel err {l3_err:.1e}",
                l3s.join(", ")
            ),
        ))
    })
}

pub fn check_overlap(cfg: &VerifyConfig) -> Outcome {
    run(4, 5.0, "series/solution overlap", || {
        let sol = appendix::solve(&cfg.options)?;
        let mut devs = Vec::new();
        for (a, w) in appendix::anchors().iter().zip(appendix::OVERLAP_WINDOWS) {
            devs.push(compare_series(&sol, &appendix::anchor_series(a, 5), w)?);
        }
        let pass = devs.iter().all(|&d| ok(d, 1e-2));
        Ok((
            pass,
            format!(
                "deviation {:.2e} on [0.511115, 0.85], {:.2e} on [0.7, 1.38175] (bound 1e-2)",
                devs[0], devs[1]
            ),
        ))
    })
}

pub fn check_decay(cfg: &VerifyConfig) -> Outcome {
    run(5, 5.0, "increment decay", || {
        let mut cases: Vec<(EquationParams, RootAnchor)> = appendix::anchors()
            .into_iter()
            .map(|a| (appendix::params(), a))
            .collect();
        cases.extend(random_draws(cfg.seed, cfg.draws));
        let mut ratio: f64 = 0.0;
        let mut dev: f64 = 0.0;
        for (p, a) in &cases {
            let b = convergence_bounds(a, p, 0.5)?;
            let r = b.radius(a.t0);
            let samples: Vec<f64> = [-0.9, -0.45, 0.2, 0.5, 0.9]
                .iter()
                .map(|f| a.t0 + f * r)
                .collect();
            let rep = algorithm_increments(a, p, 40, &samples)?;
            ratio = worst(
                rep.rows
                    .iter()
                    .filter(|row| row.n <= 15)
                    .flat_map(|row| {
                        [
                            row.abs_dlambda / row.majorant_lambda,
                            row.abs_dmu / row.majorant_mu,
                        ]
                    })
                    .chain([ratio]),
            );
            let (l, m) = run_scheme::<f64>(a, p, 20);
            for (i, &t) in samples.iter().enumerate() {
                let d = t - a.t0;
                dev = worst([
                    dev,
                    (l.eval(d) - rep.partial_lambda[i]).abs(),
                    (m.eval(d) - rep.partial_mu[i]).abs(),
                ]);
            }
        }
        let pass = ok(ratio, 1.0) && ok(dev, 1e-10);
        Ok((
            pass,
            format!(
                "{} anchors: max increment/majorant {ratio:.3} (n ≤ 15), max |partial sum − series| {dev:.1e} at n = 40",
                cases.len()
            ),
        ))
    })
}

pub fn check_mu_dichotomy(cfg: &VerifyConfig) -> Outcome {
    run(6, 2.0, "momentum dichotomy", || {
        let Appendix { sol, roots } = appendix_run(cfg)?;
        let p = appendix::params();
        let root = roots
            .iter()
            .find(|r| (r.t0 - appendix::ANCHORS[0].0).abs() < 1e-3)
            .ok_or_else(|| crate::Error::Domain("root near 0.511115 not found".into()))?;
        // approach from the side of the Cauchy point
        let d = mu_dichotomy(&sol, &p, root, 1.0, 1e-3, 1e-6, 31)?;
        let mu0 = d.mu_at_root.unwrap_or(f64::NAN);
        let bounded = worst(d.mu_matched.iter().map(|m| m.abs())) <= 10.0 * mu0.abs();
        let last: Vec<f64> =
            d.dt.iter()
                .zip(&d.mu_other_scaled)
                .filter(|(&dt, _)| dt <= 1e-5)
                .map(|(_, &v)| v)
                .collect();
        let (lo, hi) = last
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        let mean = last.iter().sum::<f64>() / last.len() as f64;
        let var = (hi - lo) / mean.abs();
        let pass = bounded && ok(var, 0.05) && mean.abs() > 1e-6;
        Ok((
            pass,
            format!(
                "sgn=+1: max |μ| {:.3} vs 10|μ(t0)| = {:.3}; sgn=−1: μ·δt² → {mean:.6} (variation {var:.1e} over last decade)",
                worst(d.mu_matched.iter().map(|m| m.abs())),
                10.0 * mu0.abs()
            ),
        ))
    })
}

pub fn check_pole(cfg: &VerifyConfig) -> Outcome {
    run(7, 2.0, "pole expansion", || {
        let mut e: f64 = 0.0;
        let (mut s4, mut s6) = (f64::INFINITY, f64::INFINITY);
        for (p, a) in random_draws(cfg.seed, cfg.draws) {
            let le = root_to_pole::<f64>(&a, &p, 4);
            let closed = pole_b5_reference::<f64>(&a, &p);
            e = worst(
                [e, rel_err(le.residue, closed.residue)]
                    .into_iter()
                    .chain((0..=4).map(|k| rel_err(le.regular_coeffs[k], closed.regular_coeffs[k]))),
            );
            let grid = slope_grid(a.t0);
            s4 = s4.min(pole_residual_order(
                &pole_b5_reference::<Dd>(&a, &p),
                &p,
                &grid,
            )?);
            s6 = s6.min(pole_residual_order(
                &root_to_pole::<Dd>(&a, &p, 6),
                &p,
                &grid,
            )?);
        }
        let pass = ok(e, 1e-12) && s4 >= 2.5 && s6 >= 4.5;
        Ok((
            pass,
            format!(
                "max relative error {e:.1e}; min slopes {s4:.2} (closed form), {s6:.2} (order 6)"
            ),
        ))
    })
}

pub fn check_symmetry(cfg: &VerifyConfig) -> Outcome {
    run(8, 5.0, "symmetry", || {
        let sol = appendix::solve(&cfg.options)?;
        let grid: Vec<f64> = (0..=70).map(|i| 0.6 + 0.01 * i as f64).collect();
        let d = symmetry_check(&sol, &appendix::params(), &grid)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut rt: f64 = 0.0;
        for _ in 0..cfg.draws.max(1) {
            let q = P3FormParams {
                alpha: rng.gen_range(-3.0..3.0),
                beta: rng.gen_range(-3.0..3.0),
                gamma: rng.gen_range(0.1..4.0),
                delta: -rng.gen_range(0.1..4.0),
            };
            let (p, _) = convert_p3_to_p3prime(&q)?;
            let back = convert_p3prime_to_p3(&p, q.gamma, q.delta)?;
            rt = worst([rt, (back.alpha - q.alpha).abs(), (back.beta - q.beta).abs()]);
        }
        Ok((
            ok(d, 1e-6) && ok(rt, 1e-14),
            format!("max |t/λ − λ_swapped| {d:.1e}; conversion round trip {rt:.1e}"),
        ))
    })
}

pub fn check_cross_formulation(cfg: &VerifyConfig) -> Outcome {
    run(9, 5.0, "cross-formulation consistency", || {
        let Appendix { sol, roots } = appendix_run(cfg)?;
        let p = appendix::params();
        let mut ham: f64 = 0.0;
        for w in roots.windows(2) {
            ham = worst([ham, hamiltonian_crosscheck(&sol, &p, &w[0], &w[1], 200)?]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let h = 1e-5;
        let mut grad: f64 = 0.0;
        for i in 0..100 {
            let q = EquationParams::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))?;
            let t = rng.gen_range(0.3..3.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let pt = PhasePoint {
                t,
                lambda: rng.gen_range(-2.0..2.0),
                mu: rng.gen_range(-2.0..2.0),
            };
            let s = if i % 2 == 0 {
                SignSwitch::PLUS
            } else {
                SignSwitch::MINUS
            };
            let at = |l: f64, m: f64| {
                hamiltonian(
                    &PhasePoint {
                        t,
                        lambda: l,
                        mu: m,
                    },
                    &q,
                    s,
                )
            };
            let dh_dmu = (at(pt.lambda, pt.mu + h)? - at(pt.lambda, pt.mu - h)?) / (2.0 * h);
            let dh_dl = (at(pt.lambda + h, pt.mu)? - at(pt.lambda - h, pt.mu)?) / (2.0 * h);
            let (ld, md) = hamilton_rhs(&pt, &q, s)?;
            grad = worst([
                grad,
                (ld - dh_dmu).abs() / ld.abs().max(1.0),
                (md + dh_dl).abs() / md.abs().max(1.0),
            ]);
        }
        let pass = ok(ham, 1e-6) && ok(grad, 1e-7);
        Ok((
            pass,
            format!(
                "scalar vs Hamiltonian over {} root intervals {ham:.1e}; gradient check {grad:.1e} over 100 points",
                roots.len().saturating_sub(1)
            ),
        ))
    })
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<Outcome> {
    vec![
        check_closed_form(cfg),
        check_residual_order(cfg),
        check_appendix(cfg),
        check_overlap(cfg),
        check_decay(cfg),
        check_mu_dichotomy(cfg),
        check_pole(cfg),
        check_symmetry(cfg),
        check_cross_formulation(cfg),
    ]
}
