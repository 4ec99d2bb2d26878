//! Run configuration: flat `key = value` files merged with command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use qes_core::model::effective_mass;
use qes_core::oracle::DEFAULT_POINTS;
use qes_core::MapConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format '{other}' (expected csv|json)"),
        }
    }
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Either the effective mass directly or the bare mass plus the reference
/// field entering `m = m̄ + αB₀²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mass {
    Effective(f64),
    Bare { mbar: f64, b0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mass: Mass,
    pub alpha: f64,
    pub mu: f64,
    pub omega_rot: f64,
    pub k: Vec<f64>,
    pub n: Vec<u32>,
    pub l: Vec<i64>,
    pub r_max: Option<f64>,
    pub n_pts: usize,
    pub refine: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub convention: MapConvention,
    pub allow_n0: bool,
}

/// Raw values before validation; every field optional so that file values
/// and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub m: Option<f64>,
    pub mbar: Option<f64>,
    pub b0: Option<f64>,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub omega_rot: Option<f64>,
    pub k: Option<Vec<f64>>,
    pub n: Option<Vec<u32>>,
    pub l: Option<Vec<i64>>,
    pub r_max: Option<f64>,
    pub n_pts: Option<usize>,
    pub refine: Option<bool>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub convention: Option<MapConvention>,
    pub allow_n0: Option<bool>,
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| anyhow!("{key}: cannot parse '{}': {e}", s.trim())))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| anyhow!("{key}: cannot parse '{}': {e}", value.trim()))
}

impl ConfigLayer {
    pub fn parse(text: &str) -> Result<Self> {
        let mut layer = ConfigLayer::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value', got '{raw}'", lineno + 1))?;
            let key = key.trim();
            layer.set(key, value).with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(layer)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "m" => self.m = Some(parse_one(key, value)?),
            "mbar" => self.mbar = Some(parse_one(key, value)?),
            "b0" => self.b0 = Some(parse_one(key, value)?),
            "alpha" => self.alpha = Some(parse_one(key, value)?),
            "mu" => self.mu = Some(parse_one(key, value)?),
            "omega_rot" => self.omega_rot = Some(parse_one(key, value)?),
            "k" => self.k = Some(parse_list(key, value)?),
            "n" => self.n = Some(parse_list(key, value)?),
            "l" => self.l = Some(parse_list(key, value)?),
            "rmax" => {
                self.r_max = match value.trim() {
                    "auto" => None,
                    v => Some(parse_one(key, v)?),
                }
            }
            "npts" => self.n_pts = Some(parse_one(key, value)?),
            "refine" => self.refine = Some(parse_one(key, value)?),
            "format" => self.format = Some(parse_one(key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "convention" => self.convention = Some(parse_one(key, value)?),
            "allow_n0" => self.allow_n0 = Some(parse_one(key, value)?),
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    /// Values in `over` win.
    pub fn overlay(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            m: over.m.or(self.m),
            mbar: over.mbar.or(self.mbar),
            b0: over.b0.or(self.b0),
            alpha: over.alpha.or(self.alpha),
            mu: over.mu.or(self.mu),
            omega_rot: over.omega_rot.or(self.omega_rot),
            k: over.k.or(self.k),
            n: over.n.or(self.n),
            l: over.l.or(self.l),
            r_max: over.r_max.or(self.r_max),
            n_pts: over.n_pts.or(self.n_pts),
            refine: over.refine.or(self.refine),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            convention: over.convention.or(self.convention),
            allow_n0: over.allow_n0.or(self.allow_n0),
        }
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let mass = match (self.m, self.mbar) {
            (Some(_), Some(_)) => bail!("give exactly one of m and mbar, not both"),
            (Some(m), None) => {
                if self.b0.is_some() {
                    bail!("b0 only applies together with mbar");
                }
                if !(m > 0.0) {
                    bail!("m must be positive, got {m}");
                }
                Mass::Effective(m)
            }
            (None, Some(mbar)) => Mass::Bare { mbar, b0: self.b0.unwrap_or(0.0) },
            (None, None) => Mass::Effective(1.0),
        };
        let cfg = RunConfig {
            mass,
            alpha: self.alpha.unwrap_or(1.0),
            mu: self.mu.unwrap_or(1.0),
            omega_rot: self.omega_rot.unwrap_or(1.0),
            k: self.k.unwrap_or_else(|| vec![0.0]),
            n: self.n.unwrap_or_else(|| vec![1]),
            l: self.l.unwrap_or_else(|| vec![0]),
            r_max: self.r_max,
            n_pts: self.n_pts.unwrap_or(DEFAULT_POINTS),
            refine: self.refine.unwrap_or(true),
            format: self.format.unwrap_or(Format::Csv),
            out: self.out,
            convention: self.convention.unwrap_or_default(),
            allow_n0: self.allow_n0.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.k.is_empty() || self.n.is_empty() || self.l.is_empty() {
            bail!("sweep lists n, l and k must be non-empty");
        }
        if !(self.alpha > 0.0) || !(self.mu > 0.0) {
            bail!("alpha and mu must be positive");
        }
        if !self.omega_rot.is_finite() || self.omega_rot < 0.0 {
            bail!("omega_rot must be finite and non-negative, got {}", self.omega_rot);
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0) {
                bail!("rmax must be positive, got {r}");
            }
        }
        self.m()?;
        Ok(())
    }

    pub fn m(&self) -> Result<f64> {
        match self.mass {
            Mass::Effective(m) => Ok(m),
            Mass::Bare { mbar, b0 } => Ok(effective_mass(mbar, self.alpha, b0)?),
        }
    }

    /// Flat-text form that [`ConfigLayer::parse`] reads back to the same
    /// configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self.mass {
            Mass::Effective(m) => writeln!(s, "m = {m:?}").unwrap(),
            Mass::Bare { mbar, b0 } => {
                writeln!(s, "mbar = {mbar:?}").unwrap();
                writeln!(s, "b0 = {b0:?}").unwrap();
            }
        }
        let join = |v: Vec<String>| v.join(",");
        writeln!(s, "alpha = {:?}", self.alpha).unwrap();
        writeln!(s, "mu = {:?}", self.mu).unwrap();
        writeln!(s, "omega_rot = {:?}", self.omega_rot).unwrap();
        writeln!(s, "k = {}", join(self.k.iter().map(|v| format!("{v:?}")).collect())).unwrap();
        writeln!(s, "n = {}", join(self.n.iter().map(|v| v.to_string()).collect())).unwrap();
        writeln!(s, "l = {}", join(self.l.iter().map(|v| v.to_string()).collect())).unwrap();
        match self.r_max {
            Some(r) => writeln!(s, "rmax = {r:?}").unwrap(),
            None => writeln!(s, "rmax = auto").unwrap(),
        }
        writeln!(s, "npts = {}", self.n_pts).unwrap();
        writeln!(s, "refine = {}", self.refine).unwrap();
        writeln!(s, "format = {}", self.format.name()).unwrap();
        if let Some(out) = &self.out {
            writeln!(s, "out = {}", out.display()).unwrap();
        }
        writeln!(s, "convention = {}", self.convention).unwrap();
        writeln!(s, "allow_n0 = {}", self.allow_n0).unwrap();
        s
    }

    /// One-line parameter summary for output headers.
    pub fn summary(&self) -> String {
        let mass = match self.mass {
            Mass::Effective(m) => format!("m={m}"),
            Mass::Bare { mbar, b0 } => format!("mbar={mbar} b0={b0} m={}", self.m().unwrap_or(f64::NAN)),
        };
        let list = |v: Vec<String>| v.join(",");
        format!(
            "convention={} {mass} alpha={} mu={} omega_rot={} k={} n={} l={} rmax={} npts={} refine={}",
            self.convention,
            self.alpha,
            self.mu,
            self.omega_rot,
            list(self.k.iter().map(|v| v.to_string()).collect()),
            list(self.n.iter().map(|v| v.to_string()).collect()),
            list(self.l.iter().map(|v| v.to_string()).collect()),
            self.r_max.map_or("auto".to_string(), |r| r.to_string()),
            self.n_pts,
            self.refine,
        )
    }
}
