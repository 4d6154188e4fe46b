use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use p3_core::ode::IntegrateOptions;
use p3_core::verify::DEFAULT_SEED;
use p3_core::{EquationParams, RootAnchor, SignSwitch};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required value --{0}")]
    Missing(&'static str),
    #[error("invalid value for --{key}: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("config file {path}: {reason}")]
    File { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A pair `A:B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span(pub f64, pub f64);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or("expected A:B")?;
        let a: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
        let b: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
        Ok(Span(a, b))
    }
}

/// Initial data `T:L:LD`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cauchy(pub f64, pub f64, pub f64);

impl FromStr for Cauchy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<f64> = s
            .split(':')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}")))
            .collect::<Result<_, _>>()?;
        match v[..] {
            [t, l, ld] => Ok(Cauchy(t, l, ld)),
            _ => Err("expected T:L:LD".into()),
        }
    }
}

/// Flags shared by all commands. Each one may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub chi0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub chiinf: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// +1 or -1
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sgn: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lam3: Option<f64>,
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Integration interval A:B
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub span: Option<String>,
    /// Initial data T:L:LD; without it integration starts from the root anchor
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub cauchy: Option<String>,
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol", global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key = value file; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub chi0: Option<f64>,
    pub chi_inf: Option<f64>,
    pub t0: Option<f64>,
    pub sgn: Option<SignSwitch>,
    pub lam3: Option<f64>,
    pub order: usize,
    pub span: Option<Span>,
    pub cauchy: Option<Cauchy>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub alpha: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn invalid(key: &'static str, reason: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key,
        reason: reason.to_string(),
    }
}

fn parse_sgn(s: &str) -> Result<SignSwitch, ConfigError> {
    let v: i32 = s
        .trim()
        .trim_start_matches('+')
        .parse()
        .map_err(|_| invalid("sgn", format!("{s} is not ±1")))?;
    SignSwitch::new(v).map_err(|_| invalid("sgn", format!("{s} is not ±1")))
}

/// Values read from a config file, as strings keyed like the flags.
fn read_file(path: &Path) -> Result<toml::Table, ConfigError> {
    let err = |reason: String| ConfigError::File {
        path: path.to_owned(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| err(e.message().to_string()))?;
    const KNOWN: [&str; 14] = [
        "chi0", "chiinf", "t0", "sgn", "lam3", "order", "span", "cauchy", "rel-tol", "abs-tol",
        "alpha", "seed", "out", "format",
    ];
    if let Some(k) = table.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(err(format!("unknown key {k}")));
    }
    Ok(table)
}

fn file_f64(t: &toml::Table, key: &'static str) -> Result<Option<f64>, ConfigError> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::Float(x)) => Ok(Some(*x)),
        Some(toml::Value::Integer(n)) => Ok(Some(*n as f64)),
        Some(v) => Err(invalid(key, format!("{v} is not a number"))),
    }
}

fn file_str(t: &toml::Table, key: &'static str) -> Result<Option<String>, ConfigError> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s.clone())),
        Some(toml::Value::Integer(n)) => Ok(Some(n.to_string())),
        Some(v) => Err(invalid(key, format!("{v} is not a string"))),
    }
}

fn file_uint(t: &toml::Table, key: &'static str) -> Result<Option<u64>, ConfigError> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(n)) if *n >= 0 => Ok(Some(*n as u64)),
        Some(v) => Err(invalid(key, format!("{v} is not a nonnegative integer"))),
    }
}

impl RunConfig {
    pub fn resolve(f: &Flags) -> Result<Self, ConfigError> {
        let file = match &f.config {
            Some(p) => read_file(p)?,
            None => toml::Table::new(),
        };
        let num = |flag: Option<f64>, key: &'static str| -> Result<Option<f64>, ConfigError> {
            let v = match flag {
                Some(x) => Some(x),
                None => file_f64(&file, key)?,
            };
            match v {
                Some(x) if !x.is_finite() => Err(invalid(key, "not finite")),
                v => Ok(v),
            }
        };
        let text =
            |flag: &Option<String>, key: &'static str| -> Result<Option<String>, ConfigError> {
                match flag {
                    Some(s) => Ok(Some(s.clone())),
                    None => file_str(&file, key),
                }
            };
        let t0 = num(f.t0, "t0")?;
        if t0 == Some(0.0) {
            return Err(invalid("t0", "must be nonzero"));
        }
        let sgn = text(&f.sgn, "sgn")?.map(|s| parse_sgn(&s)).transpose()?;
        let span = text(&f.span, "span")?
            .map(|s| s.parse::<Span>().map_err(|e| invalid("span", e)))
            .transpose()?;
        let cauchy = text(&f.cauchy, "cauchy")?
            .map(|s| s.parse::<Cauchy>().map_err(|e| invalid("cauchy", e)))
            .transpose()?;
        let format = match (f.format, text(&None, "format")?) {
            (Some(x), _) => Some(x),
            (None, Some(s)) => Some(Format::from_str(&s, true).map_err(|e| invalid("format", e))?),
            (None, None) => None,
        };
        let defaults = IntegrateOptions::default();
        let positive = |v: Option<f64>, key: &'static str, d: f64| match v {
            Some(x) if x <= 0.0 => Err(invalid(key, "must be positive")),
            v => Ok(v.unwrap_or(d)),
        };
        let order = match f.order {
            Some(n) => n,
            None => file_uint(&file, "order")?.map_or(5, |n| n as usize),
        };
        Ok(RunConfig {
            chi0: num(f.chi0, "chi0")?,
            chi_inf: num(f.chiinf, "chiinf")?,
            t0,
            sgn,
            lam3: num(f.lam3, "lam3")?,
            order,
            span,
            cauchy,
            rel_tol: positive(num(f.rel_tol, "rel-tol")?, "rel-tol", defaults.rel_tol)?,
            abs_tol: positive(num(f.abs_tol, "abs-tol")?, "abs-tol", defaults.abs_tol)?,
            alpha: positive(
                num(f.alpha, "alpha")?,
                "alpha",
                p3_core::series::DEFAULT_ALPHA,
            )?,
            seed: match f.seed {
                Some(s) => s,
                None => file_uint(&file, "seed")?.unwrap_or(DEFAULT_SEED),
            },
            out: f.out.clone().or(text(&None, "out")?.map(PathBuf::from)),
            format,
        })
    }

    pub fn params(&self) -> Result<EquationParams, ConfigError> {
        let chi0 = self.chi0.ok_or(ConfigError::Missing("chi0"))?;
        let chi_inf = self.chi_inf.ok_or(ConfigError::Missing("chiinf"))?;
        EquationParams::new(chi0, chi_inf).map_err(|e| invalid("chi0", e))
    }

    pub fn anchor(&self) -> Result<RootAnchor, ConfigError> {
        let t0 = self.t0.ok_or(ConfigError::Missing("t0"))?;
        let sgn = self.sgn.ok_or(ConfigError::Missing("sgn"))?;
        let lam3 = self.lam3.ok_or(ConfigError::Missing("lam3"))?;
        RootAnchor::new(t0, sgn, lam3).map_err(|e| invalid("t0", e))
    }

    pub fn span(&self) -> Result<Span, ConfigError> {
        let s = self.span.ok_or(ConfigError::Missing("span"))?;
        if s.0 == s.1 || s.0 * s.1 <= 0.0 {
            return Err(invalid(
                "span",
                "must be a nonempty interval not containing 0",
            ));
        }
        Ok(Span(s.0.min(s.1), s.0.max(s.1)))
    }

    pub fn options(&self) -> IntegrateOptions {
        IntegrateOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..Default::default()
        }
    }

    pub fn format_or(&self, d: Format) -> Format {
        self.format.unwrap_or(d)
    }
}
