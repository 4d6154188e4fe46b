use serde::{Deserialize, Serialize};

use super::dopri::{Dopri, Node};
use super::solution::{integrate_with, match_root, DenseSolution};
use crate::equation::{hamilton_rhs, mu_from_lambda, rhs_scalar, third_derivative};
use crate::error::{Error, Result};
use crate::fit::polyfit;
use crate::pole::{root_to_pole, LaurentExpansion};
use crate::series::DtSeries;
use crate::{EquationParams, PhasePoint, RootAnchor, SignSwitch};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootInfo {
    pub t0: f64,
    pub sgn: SignSwitch,
    pub lam3: Option<f64>,
}

/// Sign changes of `λ`, bracketed on the mesh and refined on the interpolant.
pub fn find_roots(sol: &DenseSolution) -> Vec<RootInfo> {
    let lam = |t: f64| sol.lambda(t).unwrap_or(f64::NAN);
    let mut roots = Vec::new();
    for (a, b) in sol.intervals() {
        let (fa, fb) = (lam(a), lam(b));
        if !(fa * fb < 0.0 || (fb == 0.0 && fa != 0.0)) {
            continue;
        }
        let (mut lo, mut hi) = (a, b);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if lam(mid) * fa > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut t = if lam(lo).abs() < lam(hi).abs() {
            lo
        } else {
            hi
        };
        for _ in 0..4 {
            let [v, d, _] = match sol.eval(t) {
                Some(x) => x,
                None => break,
            };
            if v == 0.0 || d == 0.0 {
                break;
            }
            let tn = t - v / d;
            if !(tn >= a && tn <= b) || lam(tn).abs() >= v.abs() {
                break;
            }
            t = tn;
        }
        let d = sol.eval(t).map(|v| v[1]).unwrap_or(0.0);
        if let Ok(sgn) = SignSwitch::of(d) {
            roots.push(RootInfo {
                t0: t,
                sgn,
                lam3: None,
            });
        }
    }
    roots
}

/// Nodes considered by [`lam3_at_root`].
/// [`find_roots`] with `λ^III` filled in where [`lam3_at_root`] succeeds.
pub fn roots_with_lam3(sol: &DenseSolution) -> Vec<RootInfo> {
    let p = sol.params;
    find_roots(sol)
        .into_iter()
        .map(|mut r| {
            r.lam3 = lam3_at_root(sol, &r, &p).ok();
            r
        })
        .collect()
}

pub const LAM3_MAX_NODES: usize = 41;
pub const LAM3_MIN_NODES: usize = 8;

/// `λ'''(t₀)/6` from a degree-4 least-squares fit of the analytic third
/// derivative at mesh nodes near the root, skipping nodes where `λ` is small.
pub fn lam3_at_root(sol: &DenseSolution, root: &RootInfo, p: &EquationParams) -> Result<f64> {
    let t0 = root.t0;
    if !sol.contains(t0) {
        return Err(Error::OutsideDomain { t: t0, radius: 0.0 });
    }
    let half = 0.1 * t0.abs();
    let floor = 1e-3 * t0.abs().max(1.0);
    let mut nodes: Vec<(f64, f64, f64)> = sol
        .mesh()
        .into_iter()
        .filter(|&(t, l, _)| (t - t0).abs() <= half && l.abs() > floor)
        .collect();
    nodes.sort_by(|x, y| (x.0 - t0).abs().total_cmp(&(y.0 - t0).abs()));
    nodes.truncate(LAM3_MAX_NODES);
    if nodes.len() < LAM3_MIN_NODES {
        return Err(Error::InsufficientNodes {
            t0,
            found: nodes.len(),
            needed: LAM3_MIN_NODES,
        });
    }
    let mut x = Vec::with_capacity(nodes.len());
    let mut y = Vec::with_capacity(nodes.len());
    for &(t, l, ld) in &nodes {
        x.push(t);
        y.push(third_derivative(t, l, ld, p)?);
    }
    let c = polyfit(&x, &y, 4, t0)?;
    Ok(c[0] / 6.0)
}

/// Five-point central difference `λ''` of the interpolant minus the
/// equation's right-hand side.
pub fn residual_scan(sol: &DenseSolution, grid: &[f64], fd_step: f64) -> Result<Vec<(f64, f64)>> {
    if !(fd_step > 0.0) {
        return Err(Error::InvalidParameters("fd_step must be positive".into()));
    }
    let at = |t: f64| sol.eval(t).ok_or(Error::OutsideDomain { t, radius: 0.0 });
    grid.iter()
        .map(|&t| {
            let [l, ld, _] = at(t)?;
            let h = fd_step;
            let (p1, m1) = (at(t + h)?[0], at(t - h)?[0]);
            let (p2, m2) = (at(t + 2.0 * h)?[0], at(t - 2.0 * h)?[0]);
            let dd = (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * l) / (12.0 * h * h);
            Ok((t, dd - rhs_scalar(t, l, ld, &sol.params)?))
        })
        .collect()
}

pub const COMPARE_POINTS: usize = 2001;

/// Largest `|series − λ|` over an even grid on `window`.
pub fn compare_series(
    sol: &DenseSolution,
    lam_series: &DtSeries<f64>,
    window: (f64, f64),
) -> Result<f64> {
    let t0 = lam_series.anchor().t0;
    let (a, b) = window;
    let mut worst: f64 = 0.0;
    for i in 0..COMPARE_POINTS {
        let t = a + (b - a) * i as f64 / (COMPARE_POINTS - 1) as f64;
        let l = sol
            .lambda(t)
            .ok_or(Error::OutsideDomain { t, radius: 0.0 })?;
        worst = worst.max((lam_series.eval(t - t0) - l).abs());
    }
    Ok(worst)
}

/// Integrates the parameter-swapped equation from `t/λ` at the grid midpoint
/// and returns the largest `|t/λ − λ_swapped|` on the grid.
pub fn symmetry_check(sol: &DenseSolution, p: &EquationParams, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::DegenerateGrid("empty grid".into()));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    let at = |t: f64| sol.eval(t).ok_or(Error::OutsideDomain { t, radius: 0.0 });
    for &t in &g {
        if at(t)?[0].abs() < 1e-6 * t.abs().max(1.0) {
            return Err(Error::Domain(format!(
                "grid point {t} is too close to a zero of λ"
            )));
        }
    }
    let ta = g[g.len() / 2];
    let [l, ld, _] = at(ta)?;
    let u0 = ta / l;
    let du0 = 1.0 / l - ta * ld / (l * l);
    let swapped = integrate_with(
        &p.swapped(),
        ta,
        u0,
        du0,
        (g[0], g[g.len() - 1]),
        &sol.options,
    )?;
    let mut worst: f64 = 0.0;
    for &t in &g {
        let u = swapped
            .lambda(t)
            .ok_or(Error::OutsideDomain { t, radius: 0.0 })?;
        worst = worst.max((t / at(t)?[0] - u).abs());
    }
    Ok(worst)
}

fn hamilton_sweep(
    p: &EquationParams,
    s: SignSwitch,
    t0: f64,
    y0: [f64; 2],
    t_end: f64,
    rel: f64,
    abs: f64,
) -> Result<Vec<Node<2>>> {
    let p = *p;
    let f = move |t: f64, y: &[f64; 2]| {
        let (a, b) = hamilton_rhs(
            &PhasePoint {
                t,
                lambda: y[0],
                mu: y[1],
            },
            &p,
            s,
        )
        .ok()?;
        (a.is_finite() && b.is_finite()).then_some([a, b])
    };
    let mut d = Dopri::new(f, t0, y0, t_end, rel, abs)?;
    let mut nodes = vec![d.current()];
    while !d.done() {
        nodes.push(d.step()?);
    }
    Ok(nodes)
}

fn cubic_hermite(a: &Node<2>, b: &Node<2>, t: f64) -> f64 {
    let h = b.t - a.t;
    let u = (t - a.t) / h;
    let (u2, u3) = (u * u, u * u * u);
    (2.0 * u3 - 3.0 * u2 + 1.0) * a.y[0]
        + (u3 - 2.0 * u2 + u) * h * a.f[0]
        + (-2.0 * u3 + 3.0 * u2) * b.y[0]
        + (u3 - u2) * h * b.f[0]
}

fn lambda_on(nodes: &[Node<2>], t: f64) -> Option<f64> {
    nodes.windows(2).find_map(|w| {
        let (lo, hi) = (w[0].t.min(w[1].t), w[0].t.max(w[1].t));
        (t >= lo && t <= hi).then(|| cubic_hermite(&w[0], &w[1], t))
    })
}

/// Integrates the Hamiltonian system from the midpoint of two consecutive
/// roots towards each of them, with `sgn` of the root being approached and
/// `μ` from the scalar solution, and returns the largest deviation of `λ`
/// from the scalar solution over `n` points per half.
pub fn hamiltonian_crosscheck(
    sol: &DenseSolution,
    p: &EquationParams,
    left: &RootInfo,
    right: &RootInfo,
    n: usize,
) -> Result<f64> {
    let (ta, tb) = (left.t0.min(right.t0), left.t0.max(right.t0));
    let (ra, rb) = if left.t0 <= right.t0 {
        (left, right)
    } else {
        (right, left)
    };
    let tm = 0.5 * (ta + tb);
    let [l, ld, _] = sol
        .eval(tm)
        .ok_or(Error::OutsideDomain { t: tm, radius: 0.0 })?;
    let (rel, abs) = (sol.options.rel_tol, sol.options.abs_tol);
    let mut worst: f64 = 0.0;
    for (target, root) in [(ta, ra), (tb, rb)] {
        let mu0 = mu_from_lambda(tm, l, ld, root.sgn, p)?;
        let nodes = hamilton_sweep(p, root.sgn, tm, [l, mu0], target, rel, abs)?;
        for i in 0..=n {
            let t = tm + (target - tm) * i as f64 / n.max(1) as f64;
            let h = lambda_on(&nodes, t).ok_or(Error::OutsideDomain { t, radius: 0.0 })?;
            let s = sol
                .lambda(t)
                .ok_or(Error::OutsideDomain { t, radius: 0.0 })?;
            worst = worst.max((h - s).abs());
        }
    }
    Ok(worst)
}

/// `μ` along the solution as it approaches a root, for both choices of sgn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuDichotomy {
    pub root: RootInfo,
    /// Distances `|t − t₀|`, decreasing.
    pub dt: Vec<f64>,
    /// `μ` with sgn equal to `λ'(t₀)`.
    pub mu_matched: Vec<f64>,
    /// `μ·δt²` with the opposite sgn.
    pub mu_other_scaled: Vec<f64>,
    /// `μ(t₀)` of the regular family, known once `root.lam3` is.
    pub mu_at_root: Option<f64>,
}

/// Samples `μ` on `points` logarithmically spaced distances in
/// `[dt_min, dt_max]` on the side `side` (±1) of the root.
pub fn mu_dichotomy(
    sol: &DenseSolution,
    p: &EquationParams,
    root: &RootInfo,
    side: f64,
    dt_max: f64,
    dt_min: f64,
    points: usize,
) -> Result<MuDichotomy> {
    let mut out = MuDichotomy {
        root: *root,
        dt: Vec::new(),
        mu_matched: Vec::new(),
        mu_other_scaled: Vec::new(),
        mu_at_root: match root.lam3 {
            Some(l3) => Some(crate::series::mu_at_root::<f64>(
                &RootAnchor::new(root.t0, root.sgn, l3)?,
                p,
            )),
            None => None,
        },
    };
    let r = (dt_min / dt_max).ln();
    for i in 0..points {
        let dt = dt_max * (r * i as f64 / (points.max(2) - 1) as f64).exp();
        let t = root.t0 + side.signum() * dt;
        let [l, ld, _] = sol.eval(t).ok_or(Error::OutsideDomain { t, radius: 0.0 })?;
        out.dt.push(dt);
        out.mu_matched.push(mu_from_lambda(t, l, ld, root.sgn, p)?);
        out.mu_other_scaled
            .push(mu_from_lambda(t, l, ld, root.sgn.flipped(), p)? * dt * dt);
    }
    Ok(out)
}

/// Distance from the pole, relative to `|t₀|`, at which the free parameter of
/// the Laurent expansion is fitted.
pub const POLE_FIT_OFFSET: f64 = 0.02;

/// Laurent expansion of a solution that ran into a pole.
///
/// The pole is located by matching `t/λ` at the last point before the cap
/// to the root series of the swapped equation. The family parameter barely
/// shows that close to the pole, so it is refitted the same way at
/// `POLE_FIT_OFFSET·|t₀|` from the pole.
pub fn laurent_from_solution(sol: &DenseSolution, order: usize) -> Result<LaurentExpansion<f64>> {
    let m = sol
        .poles()
        .first()
        .ok_or_else(|| Error::Domain("solution has no pole marker".into()))?;
    let q = sol.params.swapped();
    let fit = |t: f64, l: f64, ld: f64| match_root(t, t / l, 1.0 / l - t * ld / (l * l), &q);
    let t0 = fit(m.t, m.lambda, m.lambda_dot)?.anchor().t0;
    let back = if m.forward { -1.0 } else { 1.0 };
    let t = t0 + back * POLE_FIT_OFFSET * t0.abs();
    let [l, ld, _] = sol.eval(t).ok_or(Error::OutsideDomain { t, radius: 0.0 })?;
    let ser = fit(t, l, ld)?;
    Ok(root_to_pole(ser.anchor(), &sol.params, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::integrate;

    fn sqrt_solution() -> (EquationParams, DenseSolution) {
        let p = EquationParams::new(0.3, 0.3).unwrap();
        let sol = integrate(&p, 1.0, 1.0, 0.5, (0.5, 2.0), 1e-10, 1e-12).unwrap();
        (p, sol)
    }

    #[test]
    fn no_roots_on_positive_solution() {
        assert!(find_roots(&sqrt_solution().1).is_empty());
    }

    #[test]
    fn residual_is_small_on_exact_solution() {
        let (_, sol) = sqrt_solution();
        let r = residual_scan(&sol, &[0.8, 1.2, 1.9], 1e-3).unwrap();
        assert!(r.iter().all(|&(_, v)| v.abs() < 1e-7), "{r:?}");
        assert!(residual_scan(&sol, &[1.9999], 1e-3).is_err());
    }

    #[test]
    fn self_symmetric_parameters() {
        // With χ₀ = χ∞, √t is its own image t/√t.
        let (p, sol) = sqrt_solution();
        let d = symmetry_check(&sol, &p, &[0.6, 0.9, 1.3, 1.8]).unwrap();
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn series_against_itself() {
        let p = EquationParams::new(-0.3, 0.7).unwrap();
        let a = RootAnchor::new(1.2, SignSwitch::PLUS, 0.8).unwrap();
        let s = super::super::solution::local_series(1.2, SignSwitch::PLUS, 0.8, &p).unwrap();
        let [l, ld, _] = s.eval_derivs(0.05);
        let sol = integrate(&p, 1.25, l, ld, (1.1, 1.3), 1e-11, 1e-13).unwrap();
        let roots = find_roots(&sol);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].t0 - a.t0).abs() < 1e-7);
        assert!(compare_series(&sol, &s, (1.19, 1.21)).unwrap() < 1e-8);
    }
}
