//! Run configuration: a flat `key = value` file overridden by flags.

use std::path::{Path, PathBuf};

use crate::audit::THEOREM_IDS;
use crate::data::{parse_data, parse_params, DataRef};
use crate::error::{Error, Result};
use crate::spectra::{BoundaryCondition, OperatorKind};
use crate::surface::{parse_surface, QbarVariant, SurfaceChart};

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "MOTSLAB_OUT";

pub const GRID_MIN: usize = 8;
pub const GRID_MAX: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: String,
    pub surface: String,
    pub grid: (usize, usize),
    pub operator: String,
    /// Boundary condition; the topology default when absent.
    pub bc: Option<String>,
    pub qbar: String,
    pub theorems: Vec<String>,
    pub theta_tol: f64,
    pub spectral_tol: f64,
    pub audit_tol: f64,
    pub eigen_tol: f64,
    pub residual_tol: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub samples: usize,
    pub a: f64,
    pub c: Option<f64>,
    pub radius: Option<f64>,
    pub ratio: f64,
    pub genus: Option<u32>,
    pub boundary: Option<u32>,
    pub index: Option<u32>,
    pub area: Option<f64>,
    pub zeta: f64,
    pub collar_steps: usize,
    pub workers: usize,
}

/// Keys accepted in config files and by `sweep --param` (numeric ones).
pub const KEYS: [&str; 27] = [
    "data",
    "surface",
    "grid",
    "operator",
    "bc",
    "qbar",
    "theorem",
    "theta_tol",
    "spectral_tol",
    "audit_tol",
    "eigen_tol",
    "residual_tol",
    "output_dir",
    "seed",
    "samples",
    "a",
    "c",
    "radius",
    "ratio",
    "genus",
    "boundary",
    "index",
    "area",
    "zeta",
    "collar_steps",
    "workers",
    "n",
];

impl Default for RunConfig {
    fn default() -> Self {
        let output_dir = std::env::var_os(OUTPUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("motslab-out"));
        RunConfig {
            data: "minkowski".into(),
            surface: "sphere:r=1".into(),
            grid: (32, 64),
            operator: "L".into(),
            bc: None,
            qbar: "proof".into(),
            theorems: vec![],
            theta_tol: 1e-6,
            spectral_tol: 5e-3,
            audit_tol: 1e-6,
            eigen_tol: 1e-12,
            residual_tol: 1e-8,
            output_dir,
            seed: 0,
            samples: 200,
            a: 1.0,
            c: None,
            radius: None,
            ratio: 0.5,
            genus: None,
            boundary: None,
            index: None,
            area: None,
            zeta: 0.05,
            collar_steps: 5,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Parse(format!("`{key}`: cannot parse `{value}`")))
}

/// `NUxNV`, e.g. `64x128`.
pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Parse(format!("grid must look like 64x128, got `{s}`")))?;
    Ok((num("grid", a)?, num("grid", b)?))
}

impl RunConfig {
    /// Defaults overlaid with the file at `path`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('-', "_");
        match key.as_str() {
            "data" => self.data = value.into(),
            "surface" => self.surface = value.into(),
            "grid" => self.grid = parse_grid(value)?,
            // square-ish shorthand: n → n x 2n
            "n" => {
                let n: usize = num(&key, value)?;
                self.grid = (n, 2 * n);
            }
            "operator" => self.operator = value.into(),
            "bc" => self.bc = Some(value.into()),
            "qbar" => self.qbar = value.into(),
            "theorem" => {
                self.theorems = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
            }
            "theta_tol" => self.theta_tol = num(&key, value)?,
            "spectral_tol" => self.spectral_tol = num(&key, value)?,
            "audit_tol" => self.audit_tol = num(&key, value)?,
            "eigen_tol" => self.eigen_tol = num(&key, value)?,
            "residual_tol" => self.residual_tol = num(&key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "seed" => self.seed = num(&key, value)?,
            "samples" => self.samples = num(&key, value)?,
            "a" => self.a = num(&key, value)?,
            "c" => self.c = Some(num(&key, value)?),
            "radius" => self.radius = Some(num(&key, value)?),
            "ratio" => self.ratio = num(&key, value)?,
            "genus" => self.genus = Some(num(&key, value)?),
            "boundary" => self.boundary = Some(num(&key, value)?),
            "index" => self.index = Some(num(&key, value)?),
            "area" => self.area = Some(num(&key, value)?),
            "zeta" => self.zeta = num(&key, value)?,
            "collar_steps" => self.collar_steps = num(&key, value)?,
            "workers" => self.workers = num(&key, value)?,
            other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Check the invariants; referenced names must resolve.
    pub fn validate(&self) -> Result<()> {
        let (nu, nv) = self.grid;
        for n in [nu, nv] {
            if !(GRID_MIN..=GRID_MAX).contains(&n) {
                return Err(Error::InvalidParameter(format!("grid size {n} outside [{GRID_MIN}, {GRID_MAX}]")));
            }
        }
        for (name, t) in [
            ("theta_tol", self.theta_tol),
            ("spectral_tol", self.spectral_tol),
            ("audit_tol", self.audit_tol),
            ("eigen_tol", self.eigen_tol),
            ("residual_tol", self.residual_tol),
        ] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("tolerance `{name}` must be positive")));
            }
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        self.data_ref()?;
        self.chart()?;
        OperatorKind::parse(&self.operator)?;
        if let Some(bc) = &self.bc {
            BoundaryCondition::parse(bc)?;
        }
        QbarVariant::parse(&self.qbar)?;
        if let Some(t) = self.theorems.iter().find(|t| !THEOREM_IDS.contains(&t.as_str())) {
            return Err(Error::Parse(format!("unknown theorem `{t}` (expected one of {})", THEOREM_IDS.join(", "))));
        }
        Ok(())
    }

    pub fn data_ref(&self) -> Result<DataRef> {
        parse_data(&self.data)
    }

    pub fn chart(&self) -> Result<SurfaceChart> {
        parse_surface(&self.surface, self.grid.0, self.grid.1)
    }

    pub fn grid_label(&self) -> String {
        format!("{}x{}", self.grid.0, self.grid.1)
    }

    /// Copy with `param` set to `value`. `param` is a numeric config key or
    /// `surface.<p>` / `data.<p>` for a parameter inside a spec string.
    pub fn with_param(&self, param: &str, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        let text = format!("{value}");
        if let Some(p) = param.strip_prefix("surface.") {
            cfg.surface = replace_spec_param(&self.surface, p, &text)?;
        } else if let Some(p) = param.strip_prefix("data.") {
            cfg.data = replace_spec_param(&self.data, p, &text)?;
        } else {
            let integer = matches!(
                param.replace('-', "_").as_str(),
                "seed" | "samples" | "genus" | "boundary" | "index" | "collar_steps" | "workers" | "n"
            );
            if integer {
                if value < 0.0 {
                    return Err(Error::InvalidParameter(format!("`{param}` must be nonnegative")));
                }
                cfg.set(param, &format!("{}", value.round() as u64))?;
            } else if matches!(param, "data" | "surface" | "grid" | "operator" | "bc" | "qbar" | "theorem" | "output_dir") {
                return Err(Error::InvalidParameter(format!("`{param}` is not numeric")));
            } else {
                cfg.set(param, &text)?;
            }
        }
        Ok(cfg)
    }
}

/// Set `key=value` inside `name:k=v,...`, adding the key if absent.
fn replace_spec_param(spec: &str, key: &str, value: &str) -> Result<String> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let mut items: Vec<String> = args.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let mut found = false;
    for it in items.iter_mut() {
        if it.split_once('=').map(|(k, _)| k.trim()) == Some(key) {
            *it = format!("{key}={value}");
            found = true;
        }
    }
    if !found {
        items.push(format!("{key}={value}"));
    }
    // numeric parameters must still parse
    let numeric: Vec<&str> = items.iter().map(String::as_str).filter(|s| !s.starts_with("support=") && !s.starts_with("file=")).collect();
    parse_params(&numeric.join(","))?;
    Ok(format!("{}:{}", name.trim(), items.join(",")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# comment\ndata = schwarzschild-iso:m=2\ngrid = 16x32\nsurface=sphere:r=1 # inline\n").unwrap();
        cfg.set("grid", "24x48").unwrap();
        assert_eq!(cfg.data, "schwarzschild-iso:m=2");
        assert_eq!(cfg.grid, (24, 48));
        assert!(cfg.validate().is_ok());
        assert!(cfg.set("colour", "red").is_err());
        cfg.grid = (4, 8);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sweep_substitution() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.with_param("surface.r", 0.5).unwrap().surface, "sphere:r=0.5");
        let mut d = cfg.clone();
        d.surface = "disk:r=1,support=ball".into();
        assert_eq!(d.with_param("surface.r", 2.0).unwrap().surface, "disk:r=2,support=ball");
        assert_eq!(cfg.with_param("data.m", 2.0).unwrap().data, "minkowski:m=2");
        assert_eq!(cfg.with_param("genus", 2.6).unwrap().genus, Some(3));
        assert!(cfg.with_param("operator", 1.0).is_err());
    }
}
