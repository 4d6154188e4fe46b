use serde::{Deserialize, Serialize};

use super::dopri::{Dopri, Node};
use crate::equation::rhs_unchecked;
use crate::error::{Error, Result};
use crate::series::{assemble_lambda, run_scheme, DtSeries};
use crate::{EquationParams, RootAnchor, SignSwitch};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Crossing starts once `|λ| < eps_switch·|t|` while approaching zero.
    pub eps_switch: f64,
    /// `|λ|` above this ends the sweep with a pole marker.
    pub pole_cap: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            eps_switch: 1e-4,
            pole_cap: 1e6,
        }
    }
}

/// One analytic hop over a root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCrossing {
    pub t0: f64,
    pub sgn: SignSwitch,
    /// `λ^III` fitted while matching the local series.
    pub lam3: f64,
    pub t_enter: f64,
    pub t_exit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleMarker {
    /// Last accepted point before the cap was exceeded.
    pub t: f64,
    pub lambda: f64,
    pub lambda_dot: f64,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Piece {
    /// Quintic in `u = (t − ta)/h` matching `λ, λ', λ''` at both ends.
    Hermite {
        h: f64,
        a: [f64; 6],
    },
    Series(DtSeries<f64>),
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    ta: f64,
    tb: f64,
    piece: Piece,
}

fn hermite(ta: f64, tb: f64, ya: [f64; 3], yb: [f64; 3]) -> Segment {
    let h = tb - ta;
    let (a0, a1, a2) = (ya[0], ya[1] * h, ya[2] * h * h / 2.0);
    let aa = yb[0] - (a0 + a1 + a2);
    let bb = yb[1] * h - (a1 + 2.0 * a2);
    let cc = yb[2] * h * h - 2.0 * a2;
    let a = [
        a0,
        a1,
        a2,
        10.0 * aa - 4.0 * bb + cc / 2.0,
        -15.0 * aa + 7.0 * bb - cc,
        6.0 * aa - 3.0 * bb + cc / 2.0,
    ];
    Segment {
        ta,
        tb,
        piece: Piece::Hermite { h, a },
    }
}

impl Segment {
    fn eval(&self, t: f64) -> [f64; 3] {
        match &self.piece {
            Piece::Hermite { h, a } => {
                let u = (t - self.ta) / h;
                let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
                for k in (0..6).rev() {
                    d2 = d2 * u + d1;
                    d1 = d1 * u + v;
                    v = v * u + a[k];
                }
                [v, d1 / h, 2.0 * d2 / (h * h)]
            }
            Piece::Series(s) => s.eval_derivs(t - s.anchor().t0),
        }
    }

    fn lo(&self) -> f64 {
        self.ta.min(self.tb)
    }

    fn hi(&self) -> f64 {
        self.ta.max(self.tb)
    }
}

/// Numerical solution with continuous `λ, λ', λ''` over its span.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution {
    pub params: EquationParams,
    pub options: IntegrateOptions,
    segments: Vec<Segment>,
    crossings: Vec<RootCrossing>,
    poles: Vec<PoleMarker>,
}

impl DenseSolution {
    pub fn span(&self) -> (f64, f64) {
        (
            self.segments[0].lo(),
            self.segments[self.segments.len() - 1].hi(),
        )
    }

    pub fn contains(&self, t: f64) -> bool {
        let (a, b) = self.span();
        t >= a && t <= b
    }

    fn segment(&self, t: f64) -> Option<&Segment> {
        if !self.contains(t) {
            return None;
        }
        let i = self.segments.partition_point(|s| s.hi() < t);
        self.segments.get(i)
    }

    /// `[λ, λ', λ'']` at `t`, or `None` outside the span.
    pub fn eval(&self, t: f64) -> Option<[f64; 3]> {
        self.segment(t).map(|s| s.eval(t))
    }

    pub fn lambda(&self, t: f64) -> Option<f64> {
        self.eval(t).map(|v| v[0])
    }

    /// Accepted mesh points `(t, λ, λ')`, increasing in `t`.
    pub fn mesh(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        for s in &self.segments {
            let t = s.lo();
            let v = s.eval(t);
            out.push((t, v[0], v[1]));
        }
        if let Some(s) = self.segments.last() {
            let t = s.hi();
            let v = s.eval(t);
            out.push((t, v[0], v[1]));
        }
        out
    }

    /// Segment end points as `(lo, hi)`; used for bracketing.
    pub(crate) fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.segments.iter().map(|s| (s.lo(), s.hi()))
    }

    pub fn crossings(&self) -> &[RootCrossing] {
        &self.crossings
    }

    pub fn poles(&self) -> &[PoleMarker] {
        &self.poles
    }
}

/// `assemble_lambda(run_scheme(3))` at the given anchor.
pub(crate) fn local_series(
    t0: f64,
    sgn: SignSwitch,
    lam3: f64,
    p: &EquationParams,
) -> Result<DtSeries<f64>> {
    let a = RootAnchor::new(t0, sgn, lam3)?;
    let (l3, _) = run_scheme::<f64>(&a, p, 3);
    Ok(assemble_lambda(&a, p, &l3))
}

/// Fits `(t₀, λ^III)` so the local root series reproduces `(λ, λ')` at `t`.
pub(crate) fn match_root(
    t: f64,
    lam: f64,
    lamdot: f64,
    p: &EquationParams,
) -> Result<DtSeries<f64>> {
    let fail = |reason: String| Error::CrossingFailed { t, reason };
    let sgn = SignSwitch::of(lamdot).map_err(|_| fail("zero slope".into()))?;
    let resid = |x: [f64; 2]| -> Result<[f64; 2]> {
        let s = local_series(x[0], sgn, x[1], p)?;
        let [v, d, _] = s.eval_derivs(t - x[0]);
        Ok([v - lam, d - lamdot])
    };
    let mut x = [t - lam / lamdot, 0.0];
    let mut r = resid(x)?;
    for _ in 0..60 {
        let ht = 1e-3 * (t - x[0]).abs().max(1e-300);
        let hl = 1e-3 * x[1].abs().max(1.0);
        let rt = resid([x[0] + ht, x[1]])?;
        let rl = resid([x[0], x[1] + hl])?;
        let j = [
            [(rt[0] - r[0]) / ht, (rl[0] - r[0]) / hl],
            [(rt[1] - r[1]) / ht, (rl[1] - r[1]) / hl],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(fail("singular matching Jacobian".into()));
        }
        let dx0 = (r[0] * j[1][1] - r[1] * j[0][1]) / det;
        let dx1 = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        x = [x[0] - dx0, x[1] - dx1];
        if !x[0].is_finite() || !x[1].is_finite() || x[0] == 0.0 {
            return Err(fail("matching diverged".into()));
        }
        let r_new = resid(x)?;
        let small = dx0.abs() <= 4.0 * f64::EPSILON * x[0].abs()
            && dx1.abs() <= 1e-12 * x[1].abs().max(1.0);
        let stalled = r_new[0].abs() >= r[0].abs() && r_new[1].abs() >= r[1].abs();
        r = r_new;
        if small || stalled {
            break;
        }
    }
    let scale = lam.abs().max(1e-300);
    if r[0].abs() > 1e-9 * scale.max(1e-6) || r[1].abs() > 1e-8 {
        return Err(fail(format!("matching residual {:e}, {:e}", r[0], r[1])));
    }
    local_series(x[0], sgn, x[1], p)
}

fn scalar_rhs(p: EquationParams) -> impl Fn(f64, &[f64; 2]) -> Option<[f64; 2]> {
    move |t, y| {
        if y[0] == 0.0 || t == 0.0 {
            return None;
        }
        let dd = rhs_unchecked(t, y[0], y[1], &p);
        dd.is_finite().then_some([y[1], dd])
    }
}

fn state(n: &Node<2>) -> [f64; 3] {
    [n.y[0], n.y[1], n.f[1]]
}

/// Half-width, relative to `|t₀|`, of the window a crossing hands to the
/// local series.
pub const ROOT_FIT_OFFSET: f64 = 0.01;

fn state_at(segs: &[Segment], t: f64) -> Option<[f64; 3]> {
    segs.iter()
        .rev()
        .find(|s| (t - s.ta) * (t - s.tb) <= 0.0)
        .map(|s| s.eval(t))
}

/// Cuts the sweep back to end at `t`.
fn trim(segs: &mut Vec<Segment>, t: f64) {
    if let Some(k) = segs.iter().rposition(|s| (t - s.ta) * (t - s.tb) <= 0.0) {
        let s = segs[k].clone();
        segs.truncate(k);
        if t != s.ta {
            segs.push(hermite(s.ta, t, s.eval(s.ta), s.eval(t)));
        }
    }
}

struct Sweep {
    segments: Vec<Segment>,
    crossings: Vec<RootCrossing>,
    pole: Option<PoleMarker>,
}

fn sweep(
    p: &EquationParams,
    t0: f64,
    y0: [f64; 2],
    t_end: f64,
    o: &IntegrateOptions,
) -> Result<Sweep> {
    let mut out = Sweep {
        segments: Vec::new(),
        crossings: Vec::new(),
        pole: None,
    };
    if t_end == t0 {
        return Ok(out);
    }
    let forward = t_end > t0;
    let rhs = scalar_rhs(*p);
    let mut dr = Dopri::new(&rhs, t0, y0, t_end, o.rel_tol, o.abs_tol)?;
    let gap = |t: f64, lam: f64, side: f64| side * lam - o.eps_switch * t.abs();

    while !dr.done() {
        let prev = dr.current();
        let next = dr.step()?;
        let (ya, yb) = (state(&prev), state(&next));
        let seg = hermite(prev.t, next.t, ya, yb);

        if yb[0].abs() > o.pole_cap {
            out.segments.push(seg);
            out.pole = Some(PoleMarker {
                t: next.t,
                lambda: yb[0],
                lambda_dot: yb[1],
                forward,
            });
            break;
        }

        let side = ya[0].signum();
        let (ga, gb) = (gap(prev.t, ya[0], side), gap(next.t, yb[0], side));
        if !(ga > 0.0 && gb <= 0.0) {
            out.segments.push(seg);
            continue;
        }

        // locate the switch point inside the step
        let (mut lo, mut hi) = (prev.t, next.t);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if gap(mid, seg.eval(mid)[0], side) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let ts = lo;
        let v = seg.eval(ts);
        let ys = [v[0], v[1], rhs_unchecked(ts, v[0], v[1], p)];
        out.segments.push(seg);

        let first = match_root(ts, ys[0], ys[1], p)?;
        let dir = (t_end - ts).signum();
        let w = ROOT_FIT_OFFSET * first.anchor().t0.abs();
        // the series takes over on |δt| ≤ w, matched where the solution
        // still resolves λ^III
        let tr = first.anchor().t0 - dir * w;
        let refit = state_at(&out.segments, tr).and_then(|y| match_root(tr, y[0], y[1], p).ok());
        let (ser, t_enter) = match refit {
            Some(s) => (s, tr),
            None => (first, ts),
        };
        trim(&mut out.segments, t_enter);
        let a = *ser.anchor();
        if (a.t0 - t_enter) * dir <= 0.0 {
            return Err(Error::CrossingFailed {
                t: ts,
                reason: format!("fitted root {} lies behind", a.t0),
            });
        }
        let mut tm = a.t0 + dir * w;
        let stop = (tm - t_end) * dir >= 0.0;
        if stop {
            tm = t_end;
        }
        out.crossings.push(RootCrossing {
            t0: a.t0,
            sgn: a.sgn,
            lam3: a.lam3,
            t_enter,
            t_exit: tm,
        });
        let ym = ser.eval_derivs(tm - a.t0);
        out.segments.push(Segment {
            ta: t_enter,
            tb: tm,
            piece: Piece::Series(ser),
        });
        if stop {
            break;
        }
        dr.restart(tm, [ym[0], ym[1]])?;
    }
    Ok(out)
}

/// Integrates from `(t_init, λ₀, λ'₀)` over `span` in both directions.
pub fn integrate_with(
    p: &EquationParams,
    t_init: f64,
    lam0: f64,
    lamdot0: f64,
    span: (f64, f64),
    o: &IntegrateOptions,
) -> Result<DenseSolution> {
    let (a, b) = (span.0.min(span.1), span.0.max(span.1));
    if !(a * b > 0.0) {
        return Err(Error::Domain(format!(
            "span [{a}, {b}] must not contain t = 0"
        )));
    }
    if !(t_init >= a && t_init <= b) {
        return Err(Error::Domain(format!(
            "t_init = {t_init} outside [{a}, {b}]"
        )));
    }
    if lam0 == 0.0 || !lam0.is_finite() || !lamdot0.is_finite() {
        return Err(Error::Domain("initial λ must be finite and nonzero".into()));
    }
    if !(o.rel_tol > 0.0 && o.abs_tol > 0.0) {
        return Err(Error::InvalidParameters(
            "tolerances must be positive".into(),
        ));
    }
    let y0 = [lam0, lamdot0];
    let back = sweep(p, t_init, y0, a, o)?;
    let fwd = sweep(p, t_init, y0, b, o)?;

    let mut segments = Vec::with_capacity(back.segments.len() + fwd.segments.len());
    segments.extend(back.segments.into_iter().rev());
    segments.extend(fwd.segments);
    if segments.is_empty() {
        return Err(Error::Domain("empty span".into()));
    }
    let mut crossings: Vec<RootCrossing> = back
        .crossings
        .into_iter()
        .rev()
        .chain(fwd.crossings)
        .collect();
    crossings.sort_by(|x, y| x.t0.total_cmp(&y.t0));
    let poles = back.pole.into_iter().chain(fwd.pole).collect();
    Ok(DenseSolution {
        params: *p,
        options: *o,
        segments,
        crossings,
        poles,
    })
}

/// [`integrate_with`] at default crossing threshold and pole cap.
pub fn integrate(
    p: &EquationParams,
    t_init: f64,
    lam0: f64,
    lamdot0: f64,
    span: (f64, f64),
    rel_tol: f64,
    abs_tol: f64,
) -> Result<DenseSolution> {
    let o = IntegrateOptions {
        rel_tol,
        abs_tol,
        ..Default::default()
    };
    integrate_with(p, t_init, lam0, lamdot0, span, &o)
}
