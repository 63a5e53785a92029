//! Run configuration: defaults, optional `key = value` file, flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dpw_cmc::loop_core::LambdaGrid;
use dpw_cmc::potential::CylinderParams;
use dpw_cmc::surface::DomainGrid;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Ply => "ply",
        }
    }
}

impl FromStr for MeshFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            _ => Err(format!("unknown mesh format '{s}' (expected obj or ply)")),
        }
    }
}

impl fmt::Display for MeshFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Which initial frame the monodromy check uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    /// `Φ₀ = I`.
    Identity,
    /// `Φ₀ = diag(k, 1/k)` chosen to make the monodromy unitary.
    Unitarized,
}

impl FromStr for Start {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identity" => Ok(Start::Identity),
            "unitarized" => Ok(Start::Unitarized),
            _ => Err(format!("unknown start '{s}' (expected identity or unitarized)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub r: f64,
    pub degree: usize,
    pub lambda_samples: usize,
    pub ode_tol: f64,
    pub annulus: (f64, f64),
    pub grid: (usize, usize),
    pub out: PathBuf,
    pub format: MeshFormat,
    pub start: Start,
    /// Added to the Bessel order in `verify gauge` (negative control).
    pub alpha_offset: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            r: 1.0 / 3.0,
            degree: 32,
            lambda_samples: 128,
            ode_tol: 1e-10,
            annulus: (0.1, 3.0),
            grid: (128, 64),
            out: PathBuf::from("surface.obj"),
            format: MeshFormat::Obj,
            start: Start::Identity,
            alpha_offset: 0.0,
        }
    }
}

/// Partial settings from a file or the command line; `None` keeps the
/// lower-priority value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub r: Option<f64>,
    pub degree: Option<usize>,
    pub lambda_samples: Option<usize>,
    pub ode_tol: Option<f64>,
    pub annulus: Option<(f64, f64)>,
    pub grid: Option<(usize, usize)>,
    pub out: Option<PathBuf>,
    pub format: Option<MeshFormat>,
    pub start: Option<Start>,
    pub alpha_offset: Option<f64>,
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = o.$f.clone() { self.$f = v; } )* };
        }
        take!(r, degree, lambda_samples, ode_tol, annulus, grid, out, format, start, alpha_offset);
    }

    pub fn params(&self) -> Result<CylinderParams, CliError> {
        CylinderParams::new(self.r).map_err(|e| CliError::BadInput(e.to_string()))
    }

    pub fn lambda_grid(&self) -> Result<LambdaGrid, CliError> {
        if self.lambda_samples < 2 * self.degree + 2 {
            return Err(CliError::BadInput(format!(
                "lambda samples m = {} must be at least 2N + 2 = {}",
                self.lambda_samples,
                2 * self.degree + 2
            )));
        }
        LambdaGrid::new(self.lambda_samples).map_err(|e| CliError::BadInput(e.to_string()))
    }

    pub fn domain(&self) -> Result<DomainGrid, CliError> {
        DomainGrid::new(self.annulus.0, self.annulus.1, self.grid.0, self.grid.1)
            .map_err(|e| CliError::BadInput(e.to_string()))
    }

    /// Checks every invariant without running anything.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if self.degree == 0 {
            return Err(CliError::BadInput("degree N must be positive".into()));
        }
        if !(self.ode_tol > 0.0 && self.ode_tol < 1.0) {
            return Err(CliError::BadInput(format!(
                "ODE tolerance must lie in (0, 1), got {}",
                self.ode_tol
            )));
        }
        self.lambda_grid()?;
        self.domain()?;
        Ok(())
    }

    /// `<stem><suffix>.<ext>` next to the mesh output.
    pub fn sibling(&self, suffix: &str, ext: &str) -> PathBuf {
        let stem = self
            .out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "surface".into());
        self.out.with_file_name(format!("{stem}{suffix}.{ext}"))
    }
}

pub fn parse_pair<T: FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected 'a:b', got '{s}'"))?;
    let p = |x: &str| {
        x.trim()
            .parse::<T>()
            .map_err(|_| format!("cannot parse '{x}' in '{s}'"))
    };
    Ok((p(a)?, p(b)?))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Overrides, CliError> {
    let mut o = Overrides::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::BadInput(format!("config line {}: {msg}", n + 1));
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key = value, got '{line}'")))?;
        let (k, v) = (k.trim(), v.trim());
        fn num<T: FromStr>(v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("cannot parse '{v}'"))
        }
        let res: Result<(), String> = (|| {
            match k {
                "r" => o.r = Some(num(v)?),
                "degree" => o.degree = Some(num(v)?),
                "lambda_samples" => o.lambda_samples = Some(num(v)?),
                "tol" | "ode_tol" => o.ode_tol = Some(num(v)?),
                "annulus" => o.annulus = Some(parse_pair(v)?),
                "grid" => o.grid = Some(parse_pair(v)?),
                "out" => o.out = Some(PathBuf::from(v)),
                "format" => o.format = Some(v.parse()?),
                "start" => o.start = Some(v.parse()?),
                _ => return Err(format!("unknown key '{k}'")),
            }
            Ok(())
        })();
        res.map_err(bad)?;
    }
    Ok(o)
}

pub fn read_config_file(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}
