use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{debug, info};
use p3_core::appendix;
use p3_core::io::{linspace, write_csv, write_dense_csv, LaurentRecord, SeriesRecord};
use p3_core::ode::{
    integrate_with, residual_scan, roots_with_lam3, symmetry_check, DenseSolution, RootInfo,
    ROOT_FIT_OFFSET,
};
use p3_core::pole::root_to_pole;
use p3_core::series::{assemble_lambda, convergence_bounds, run_scheme};
use p3_core::verify::{run_all, VerifyConfig};
use serde::Serialize;

use crate::config::{ConfigError, Format, RunConfig};

/// How a command failed; each kind maps to one exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Usage(#[from] ConfigError),
    #[error(transparent)]
    Compute(#[from] p3_core::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) | Failure::Io(_) => 1,
            Failure::Check(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

const CURVE_POINTS: usize = 200;
const DENSE_POINTS: usize = 2001;

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> io::Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

fn write_rows(path: Option<&Path>, header: &[&str], rows: Vec<Vec<f64>>) -> io::Result<()> {
    let mut w = sink(path)?;
    write_csv(&mut w, header, rows)?;
    w.flush()
}

/// Writes the record in the requested format to `--out` (or stdout) and,
/// when `--out` is given, the sampled curve or record in the other format
/// next to it.
fn write_expansion<T: Serialize>(
    cfg: &RunConfig,
    record: &T,
    header: &[&str],
    rows: Vec<Vec<f64>>,
) -> Outcome {
    let out = cfg.out.as_deref();
    match cfg.format_or(Format::Json) {
        Format::Json => {
            write_json(out, record)?;
            if let Some(p) = out {
                write_rows(Some(&p.with_extension("csv")), header, rows)?;
            }
        }
        Format::Csv => {
            write_rows(out, header, rows)?;
            if let Some(p) = out {
                write_json(Some(&p.with_extension("json")), record)?;
            }
        }
    }
    Ok(())
}

/// Samples on `|δt| ≤ 0.1|t₀|`, never at `δt = 0`.
fn curve_offsets(t0: f64) -> Vec<f64> {
    linspace(-0.1 * t0.abs(), 0.1 * t0.abs(), CURVE_POINTS)
}

pub fn expand_root(cfg: &RunConfig) -> Outcome {
    let (p, a) = (cfg.params()?, cfg.anchor()?);
    let (l3, _) = run_scheme::<f64>(&a, &p, cfg.order);
    let s = assemble_lambda(&a, &p, &l3);
    info!("root series at t0 = {} to lam3 order {}", a.t0, cfg.order);
    let rows = curve_offsets(a.t0)
        .into_iter()
        .map(|d| vec![a.t0 + d, s.eval(d)])
        .collect();
    write_expansion(cfg, &SeriesRecord::new(&s, &p), &["t", "lambda"], rows)
}

pub fn expand_pole(cfg: &RunConfig) -> Outcome {
    let (p, a) = (cfg.params()?, cfg.anchor()?);
    let le = root_to_pole::<f64>(&a, &p, cfg.order);
    info!(
        "pole at t0 = {}: residue {}, d0 {}",
        le.t0, le.residue, le.regular_coeffs[0]
    );
    let rows = curve_offsets(a.t0)
        .into_iter()
        .map(|d| vec![a.t0 + d, le.eval(d)])
        .collect();
    write_expansion(cfg, &LaurentRecord::new(&le, &p), &["t", "lambda"], rows)
}

/// From `--cauchy` when given, otherwise from the root anchor's series just
/// outside the crossing window.
fn solve(cfg: &RunConfig) -> Result<DenseSolution, Failure> {
    let p = cfg.params()?;
    let span = cfg.span()?;
    let (t, l, ld) = match cfg.cauchy {
        Some(c) => (c.0, c.1, c.2),
        None => {
            let a = cfg
                .anchor()
                .map_err(|_| ConfigError::Missing("cauchy (or --t0, --sgn and --lam3)"))?;
            let (l3, _) = run_scheme::<f64>(&a, &p, 10);
            let s = assemble_lambda(&a, &p, &l3);
            let d = 2.0 * ROOT_FIT_OFFSET * a.t0.abs();
            let d = if a.t0 + d <= span.1 { d } else { -d };
            let [l, ld, _] = s.eval_derivs(d);
            (a.t0 + d, l, ld)
        }
    };
    if !(span.0..=span.1).contains(&t) {
        return Err(ConfigError::Invalid {
            key: "span",
            reason: format!("does not contain the start point {t}"),
        }
        .into());
    }
    debug!(
        "integrating from ({t}, {l}, {ld}) over [{}, {}]",
        span.0, span.1
    );
    let sol = integrate_with(&p, t, l, ld, (span.0, span.1), &cfg.options())?;
    info!(
        "{} mesh points, {} crossings, {} pole markers",
        sol.mesh().len(),
        sol.crossings().len(),
        sol.poles().len()
    );
    Ok(sol)
}

fn roots_csv(roots: &[RootInfo]) -> Vec<Vec<f64>> {
    roots
        .iter()
        .map(|r| vec![r.t0, r.sgn.value(), r.lam3.unwrap_or(f64::NAN)])
        .collect()
}

#[derive(Serialize)]
struct IntegrationReport<'a> {
    span: (f64, f64),
    crossings: &'a [p3_core::ode::RootCrossing],
    poles: &'a [p3_core::ode::PoleMarker],
    samples: Vec<[f64; 3]>,
}

pub fn integrate(cfg: &RunConfig) -> Outcome {
    let sol = solve(cfg)?;
    let (a, b) = sol.span();
    let grid = linspace(a, b, DENSE_POINTS);
    match cfg.format_or(Format::Csv) {
        Format::Csv => {
            let mut w = sink(cfg.out.as_deref())?;
            write_dense_csv(&mut w, &sol, &grid)?;
            w.flush()?;
        }
        Format::Json => {
            let samples = grid
                .iter()
                .filter_map(|&t| sol.eval(t).map(|v| [t, v[0], v[1]]))
                .collect();
            let report = IntegrationReport {
                span: (a, b),
                crossings: sol.crossings(),
                poles: sol.poles(),
                samples,
            };
            write_json(cfg.out.as_deref(), &report)?;
        }
    }
    Ok(())
}

pub fn find_roots_cmd(cfg: &RunConfig) -> Outcome {
    let roots = roots_with_lam3(&solve(cfg)?);
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(cfg.out.as_deref(), &roots)?,
        Format::Csv => write_rows(
            cfg.out.as_deref(),
            &["t0", "sgn", "lam3"],
            roots_csv(&roots),
        )?,
    }
    Ok(())
}

/// `λ^III` at every root, or at the root nearest `--t0` when integrating
/// from `--cauchy`.
pub fn lam3(cfg: &RunConfig) -> Outcome {
    let mut roots = roots_with_lam3(&solve(cfg)?);
    if let (Some(t0), Some(_)) = (cfg.t0, cfg.cauchy) {
        let near = roots
            .iter()
            .min_by(|x, y| (x.t0 - t0).abs().total_cmp(&(y.t0 - t0).abs()))
            .copied()
            .ok_or_else(|| Failure::Check("no roots in span".into()))?;
        roots = vec![near];
    }
    if let Some(r) = roots.iter().find(|r| r.lam3.is_none()) {
        return Err(Failure::Check(format!(
            "could not fit lam3 at the root {}",
            r.t0
        )));
    }
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(cfg.out.as_deref(), &roots)?,
        Format::Csv => write_rows(
            cfg.out.as_deref(),
            &["t0", "sgn", "lam3"],
            roots_csv(&roots),
        )?,
    }
    Ok(())
}

fn residual_rows(sol: &DenseSolution) -> Vec<Vec<f64>> {
    let (a, b) = sol.span();
    let h = appendix::FD_STEP;
    linspace(a + 2.0 * h, b - 2.0 * h, DENSE_POINTS)
        .into_iter()
        .filter_map(|t| residual_scan(sol, &[t], h).ok().map(|r| vec![t, r[0].1]))
        .collect()
}

pub fn residual(cfg: &RunConfig) -> Outcome {
    let rows = residual_rows(&solve(cfg)?);
    match cfg.format_or(Format::Csv) {
        Format::Csv => write_rows(cfg.out.as_deref(), &["t", "residual"], rows)?,
        Format::Json => {
            let pairs: Vec<[f64; 2]> = rows.iter().map(|r| [r[0], r[1]]).collect();
            write_json(cfg.out.as_deref(), &pairs)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SymmetryReport {
    points: usize,
    max_deviation: f64,
}

pub fn symmetry(cfg: &RunConfig) -> Outcome {
    let sol = solve(cfg)?;
    let (a, b) = sol.span();
    let grid = linspace(a, b, 201);
    let d = symmetry_check(&sol, &sol.params, &grid)?;
    let report = SymmetryReport {
        points: grid.len(),
        max_deviation: d,
    };
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(cfg.out.as_deref(), &report)?,
        Format::Csv => write_rows(
            cfg.out.as_deref(),
            &["points", "max_deviation"],
            vec![vec![grid.len() as f64, d]],
        )?,
    }
    Ok(())
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let vc = VerifyConfig {
        seed: cfg.seed,
        options: cfg.options(),
        ..Default::default()
    };
    let outcomes = run_all(&vc);
    let mut stdout = io::stdout().lock();
    for o in &outcomes {
        writeln!(stdout, "{o}")?;
    }
    if let Some(p) = &cfg.out {
        write_json(Some(p), &outcomes)?;
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
    if failed.is_empty() {
        return Ok(());
    }
    for o in &failed {
        eprintln!("failed: {o}");
    }
    Err(Failure::Check(format!(
        "{} of {} checks failed",
        failed.len(),
        outcomes.len()
    )))
}

pub fn bounds(cfg: &RunConfig) -> Outcome {
    let (p, a) = (cfg.params()?, cfg.anchor()?);
    let b = convergence_bounds(&a, &p, cfg.alpha)?;
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(cfg.out.as_deref(), &b)?,
        Format::Csv => write_rows(
            cfg.out.as_deref(),
            &[
                "m_lambda",
                "m_mu",
                "q1",
                "q2",
                "beta",
                "alpha",
                "alpha_tilde",
            ],
            vec![vec![
                b.m_lambda,
                b.m_mu,
                b.q1,
                b.q2,
                b.beta,
                b.alpha,
                b.alpha_tilde,
            ]],
        )?,
    }
    if b.beta < b.q1.max(b.q2) || b.alpha_tilde * b.beta > 0.5 * (1.0 + 1e-12) {
        return Err(Failure::Check(format!(
            "inconsistent bounds: beta {}, alpha_tilde {}",
            b.beta, b.alpha_tilde
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct RootsReport {
    chi0: f64,
    chi_inf: f64,
    roots: Vec<RootInfo>,
    published_roots: [f64; 6],
    published_lam3: [(f64, i32, f64); 2],
}

pub fn reproduce_appendix(cfg: &RunConfig) -> Outcome {
    let dir: PathBuf = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let sol = appendix::solve(&cfg.options())?;
    let figs = appendix::figures(&sol)?;
    let two = |v: &[[f64; 2]]| v.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    write_rows(
        Some(&dir.join("fig1.csv")),
        &["t", "lambda"],
        two(&figs.fig1),
    )?;
    write_rows(
        Some(&dir.join("fig2.csv")),
        &["t", "residual"],
        two(&figs.fig2),
    )?;
    write_rows(
        Some(&dir.join("fig3.csv")),
        &["t", "lambda_dddot"],
        two(&figs.fig3),
    )?;
    write_rows(
        Some(&dir.join("fig4.csv")),
        &["t", "series_plus", "series_minus", "lambda"],
        figs.fig4.iter().map(|r| r.to_vec()).collect(),
    )?;
    let report = RootsReport {
        chi0: appendix::CHI0,
        chi_inf: appendix::CHI_INF,
        roots: figs.roots.clone(),
        published_roots: appendix::ROOTS,
        published_lam3: appendix::ANCHORS,
    };
    write_json(Some(&dir.join("roots.json")), &report)?;
    info!("wrote fig1-4.csv and roots.json to {}", dir.display());

    let found: Vec<f64> = figs.roots.iter().map(|r| r.t0).collect();
    let matched = found.len() == appendix::ROOTS.len()
        && found
            .iter()
            .zip(appendix::ROOTS)
            .all(|(a, b)| (a - b).abs() <= 1e-3);
    if !matched {
        return Err(Failure::Check(format!(
            "roots {found:?} do not match the published list"
        )));
    }
    Ok(())
}
