//! The worked numerical example: one solution with six roots on `(0.01, 2)`.

use serde::{Deserialize, Serialize};

use crate::equation::third_derivative;
use crate::error::Result;
use crate::io::linspace;
use crate::ode::{
    integrate_with, residual_scan, roots_with_lam3, DenseSolution, IntegrateOptions, RootInfo,
};
use crate::series::{assemble_lambda, run_scheme, DtSeries};
use crate::{EquationParams, RootAnchor, SignSwitch};

pub const CHI0: f64 = -0.811597;
pub const CHI_INF: f64 = -0.0550042;
/// Cauchy data `(t, λ, λ')`.
pub const CAUCHY: (f64, f64, f64) = (0.833651, 0.288298, 0.374531);
pub const SPAN: (f64, f64) = (0.01, 2.0);
/// Published roots, increasing.
pub const ROOTS: [f64; 6] = [0.0159082, 0.0427774, 0.0901638, 0.242530, 0.511115, 1.38175];
/// Published `(t₀, sgn, λ^III)` at the two largest roots.
pub const ANCHORS: [(f64, i32, f64); 2] = [(0.511115, 1, -9.01149), (1.38175, -1, 1.24246)];
/// Windows on which the two root series track the solution.
pub const OVERLAP_WINDOWS: [(f64, f64); 2] = [(0.511115, 0.85), (0.7, 1.38175)];

pub fn params() -> EquationParams {
    EquationParams::new(CHI0, CHI_INF).expect("finite constants")
}

pub fn anchors() -> [RootAnchor; 2] {
    ANCHORS.map(|(t0, s, l3)| {
        RootAnchor::new(t0, SignSwitch::new(s).expect("±1"), l3).expect("t0 ≠ 0")
    })
}

pub fn solve(o: &IntegrateOptions) -> Result<DenseSolution> {
    let (t, l, ld) = CAUCHY;
    integrate_with(&params(), t, l, ld, SPAN, o)
}

/// Root series with `λ^III` valid to order `n` at a published anchor.
pub fn anchor_series(a: &RootAnchor, n: usize) -> DtSeries<f64> {
    let p = params();
    let (l3, _) = run_scheme::<f64>(a, &p, n);
    assemble_lambda(a, &p, &l3)
}

/// Tables behind the four figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figures {
    /// `(t, λ)`
    pub fig1: Vec<[f64; 2]>,
    /// `(t, residual)`
    pub fig2: Vec<[f64; 2]>,
    /// `(t, λ''')`
    pub fig3: Vec<[f64; 2]>,
    /// `(t, series at the sgn = +1 root, series at the sgn = −1 root, λ)`
    pub fig4: Vec<[f64; 4]>,
    pub roots: Vec<RootInfo>,
}

pub const FIG_POINTS: usize = 2000;
pub const FD_STEP: f64 = 1e-4;

pub fn figures(sol: &DenseSolution) -> Result<Figures> {
    let p = sol.params;
    let (a, b) = sol.span();
    let fig1 = linspace(a, b, FIG_POINTS)
        .into_iter()
        .filter_map(|t| sol.lambda(t).map(|l| [t, l]))
        .collect();
    let inner = linspace(a + 2.0 * FD_STEP, b - 2.0 * FD_STEP, FIG_POINTS);
    let fig2 = inner
        .iter()
        .filter_map(|&t| residual_scan(sol, &[t], FD_STEP).ok().map(|r| [t, r[0].1]))
        .collect();
    let fig3 = linspace(0.4, 1.5, FIG_POINTS)
        .into_iter()
        .filter_map(|t| {
            let [l, ld, _] = sol.eval(t)?;
            (l.abs() > 1e-3).then(|| third_derivative(t, l, ld, &p).ok().map(|d| [t, d]))?
        })
        .collect();
    let [ap, am] = anchors();
    let (sp, sm) = (anchor_series(&ap, 5), anchor_series(&am, 5));
    let fig4 = linspace(0.45, 1.45, FIG_POINTS)
        .into_iter()
        .filter_map(|t| {
            sol.lambda(t)
                .map(|l| [t, sp.eval(t - ap.t0), sm.eval(t - am.t0), l])
        })
        .collect();
    Ok(Figures {
        fig1,
        fig2,
        fig3,
        fig4,
        roots: roots_with_lam3(sol),
    })
}
