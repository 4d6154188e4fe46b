//! The increment form of the iteration, run on polynomial representatives.

use serde::{Deserialize, Serialize};

use super::kernels::Consts;
use super::poly::{add, add_const, mul, scale, shift};
use super::{convergence_bounds, init_pair, BoundSet, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::{EquationParams, RootAnchor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    pub t: f64,
    pub abs_dlambda: f64,
    pub abs_dmu: f64,
    pub majorant_lambda: f64,
    pub majorant_mu: f64,
}

impl DecayRow {
    pub fn within_majorant(&self) -> bool {
        self.abs_dlambda <= self.majorant_lambda && self.abs_dmu <= self.majorant_mu
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub bounds: BoundSet,
    pub samples: Vec<f64>,
    pub rows: Vec<DecayRow>,
    /// `λ^III_{n_max}(t)` at each sample.
    pub partial_lambda: Vec<f64>,
    /// `μ_{n_max}(t)` at each sample.
    pub partial_mu: Vec<f64>,
}

type P = Vec<f64>;

struct Ctx {
    k: Consts<f64>,
    cap: usize,
}

impl Ctx {
    fn m(&self, a: &[f64], b: &[f64]) -> P {
        mul(a, b, Some(self.cap))
    }

    /// `sgn − ηc + η²λ̂`
    fn x(&self, lh: &[f64]) -> P {
        add(&[self.k.s, -self.k.c()], &shift(lh, 2))
    }

    fn d_lam_mu(&self, mh: &[f64], dm: &[f64]) -> P {
        let m2 = add_const(&scale(mh, 2.0), -1.0);
        let inner = add_const(&add(&self.m(&m2, &m2), &self.m(dm, dm)), -1.0);
        shift(&scale(&inner, -0.5), 3)
    }

    fn d_mu_mu(&self, lh: &[f64], mh: &[f64]) -> P {
        let m2 = add_const(&scale(mh, 2.0), -1.0);
        add_const(
            &shift(&scale(&self.m(&m2, &self.x(lh)), -2.0), 1),
            self.k.s * self.k.c0,
        )
    }

    fn d_lam_xi(&self, lh: &[f64], mh: &[f64], dm: &[f64]) -> P {
        let Consts { s, t0, c0, .. } = self.k;
        let m2 = add_const(&scale(mh, 2.0), -1.0);
        let a = shift(&scale(&self.m(&m2, &self.x(lh)), 6.0 * t0), 1);
        let b = add(
            &self.m(mh, &add_const(mh, -1.0)),
            &scale(&self.m(dm, dm), 0.25),
        );
        let b = shift(&scale(&b, 4.0), 3);
        add_const(&add(&a, &b), -3.0 * s * t0 * (c0 - 2.0 * s))
    }

    fn d_mu_xi(&self, lh: &[f64], mh: &[f64], dl: &[f64]) -> P {
        let Consts { s, t0, c0, .. } = self.k;
        let lin = add_const(&add(&scale(mh, 2.0), &scale(lh, 3.0 * t0)), -1.0);
        let a = shift(&scale(&self.m(&lin, &self.x(lh)), 4.0), 1);
        let sq = add(&self.m(lh, lh), &scale(&self.m(dl, dl), -0.25));
        let b = shift(&scale(&sq, -6.0 * t0), 3);
        let mut r = add(&a, &b);
        r = add(&r, &[0.0, 3.0 * (c0 - s).powi(2) / (2.0 * t0)]);
        add_const(&r, -8.0 * s * c0)
    }

    /// `δ̊t·(−prev + avg)` where `avg` holds `δt` coefficients of the σ-integral.
    fn close(&self, prev: &[f64], avg: &[f64]) -> P {
        let mut r = shift(&add(&scale(prev, -1.0), avg), 1);
        r.truncate(self.cap + 1);
        scale(&r, 1.0 / self.k.t0)
    }
}

fn average(q: &[f64], p: u32) -> P {
    q.iter()
        .enumerate()
        .map(|(k, &c)| c / (k as u32 + p + 1) as f64)
        .collect()
}

fn eval(c: &[f64], x: f64) -> f64 {
    super::poly::eval(c, x)
}

/// Runs `n_max` iteration steps with polynomial degrees capped at
/// `degree_cap` and reports the increment sizes at each sample.
pub fn algorithm_increments_with(
    a: &RootAnchor,
    p: &EquationParams,
    n_max: usize,
    t_samples: &[f64],
    alpha: f64,
    degree_cap: usize,
) -> Result<DecayReport> {
    let bounds = convergence_bounds(a, p, alpha)?;
    let radius = bounds.radius(a.t0);
    for &t in t_samples {
        if !((t - a.t0).abs() < radius) {
            return Err(Error::OutsideDomain { t, radius });
        }
    }
    let ctx = Ctx {
        k: Consts::new(a, p),
        cap: degree_cap,
    };
    let (l1, m1) = init_pair::<f64>(a, p);
    let mut lam_prev: P = vec![0.0];
    let mut mu_prev: P = vec![0.0];
    let mut dl: P = l1.coeffs().to_vec();
    let mut dm: P = m1.coeffs().to_vec();
    let mut rows = Vec::new();
    let mut lam_n = P::new();
    let mut mu_n = P::new();

    for n in 1..=n_max {
        for &t in t_samples {
            let d = t - a.t0;
            rows.push(DecayRow {
                n,
                t,
                abs_dlambda: eval(&dl, d).abs(),
                abs_dmu: eval(&dm, d).abs(),
                majorant_lambda: bounds.majorant(bounds.m_lambda, d, a.t0, n),
                majorant_mu: bounds.majorant(bounds.m_mu, d, a.t0, n),
            });
        }
        lam_n = add(&lam_prev, &dl);
        mu_n = add(&mu_prev, &dm);
        if n == n_max {
            break;
        }
        let lam_half = add(&lam_prev, &scale(&dl, 0.5));
        let mu_half = add(&mu_prev, &scale(&dm, 0.5));

        let q = add(
            &ctx.m(&dm, &ctx.d_mu_mu(&lam_half, &mu_half)),
            &ctx.m(&dl, &ctx.d_lam_mu(&mu_half, &dm)),
        );
        let dm_next = ctx.close(&dm, &average(&q, 0));
        let mu_next_half = add(&mu_n, &scale(&dm_next, 0.5));

        let qm = add(
            &ctx.m(&dm_next, &ctx.d_mu_mu(&lam_half, &mu_next_half)),
            &ctx.m(&dl, &ctx.d_lam_mu(&mu_next_half, &dm_next)),
        );
        let qx = add(
            &ctx.m(&dm_next, &ctx.d_mu_xi(&lam_half, &mu_next_half, &dl)),
            &ctx.m(&dl, &ctx.d_lam_xi(&lam_half, &mu_next_half, &dm_next)),
        );
        let avg = scale(
            &add(&scale(&average(&qm, 0), 2.0), &average(&qx, 3)),
            1.0 / (3.0 * ctx.k.t0),
        );
        let dl_next = ctx.close(&dl, &avg);

        lam_prev = lam_n.clone();
        mu_prev = mu_n.clone();
        dl = dl_next;
        dm = dm_next;
    }

    let partial_lambda = t_samples.iter().map(|&t| eval(&lam_n, t - a.t0)).collect();
    let partial_mu = t_samples.iter().map(|&t| eval(&mu_n, t - a.t0)).collect();
    Ok(DecayReport {
        bounds,
        samples: t_samples.to_vec(),
        rows,
        partial_lambda,
        partial_mu,
    })
}

/// [`algorithm_increments_with`] at the default `α` and a degree cap that
/// leaves the first `n_max` orders untouched by truncation.
pub fn algorithm_increments(
    a: &RootAnchor,
    p: &EquationParams,
    n_max: usize,
    t_samples: &[f64],
) -> Result<DecayReport> {
    algorithm_increments_with(a, p, n_max, t_samples, DEFAULT_ALPHA, 3 * n_max + 40)
}
