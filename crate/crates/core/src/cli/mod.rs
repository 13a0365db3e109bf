//! The `motslab` command line.
//!
//! Every run writes plain CSV (and, for audits, a text block) into the
//! output directory: `--output-dir`, else `output_dir` from the config file,
//! else `$MOTSLAB_OUT`, else `./motslab-out`. Exit codes: 0 all checks hold,
//! 1 some inequality violated, 2 a hypothesis unmet or statement not
//! applicable, 3 numerical failure, 64 invalid configuration.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_audit, cmd_catalog, cmd_constraints, cmd_eigen, cmd_surface, cmd_sweep, CommandOutput, SweepTarget, Table,
    EXIT_NUMERICAL, EXIT_OK, EXIT_UNMET, EXIT_USAGE, EXIT_VIOLATED,
};
pub use config::{RunConfig, OUTPUT_ENV};

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "motslab", version, about = "Stability spectra and inequality audits for surfaces in initial data sets")]
struct Cli {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the initial data catalog.
    Catalog(Common),
    /// Sample μ, |J| and μ − |J| at reproducible random points.
    Constraints(Common),
    /// Geometry summary of a surface.
    Surface(Common),
    /// Principal eigenvalue of a stability operator.
    Eigen(Common),
    /// Evaluate one or more theorems.
    Audit(Common),
    /// Repeat a command over a parameter range.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Command to repeat.
    #[arg(long = "command", value_enum)]
    target: SweepTarget,
    /// Numeric config key, or `surface.<p>` / `data.<p>`.
    #[arg(long)]
    param: String,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long)]
    steps: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Catalog entry, e.g. `schwarzschild-iso:m=1`.
    #[arg(long)]
    data: Option<String>,
    /// Surface, e.g. `sphere:r=0.5` or `disk:r=1,support=cylinder`.
    #[arg(long)]
    surface: Option<String>,
    /// Resolution `NUxNV`.
    #[arg(long)]
    grid: Option<String>,
    /// `L`, `Ls`, `Hstab-N` or `Hstab-lminus`.
    #[arg(long)]
    operator: Option<String>,
    /// `closed`, `robin:gamma=<rad>`, `robin:free` or `robin:sym`.
    #[arg(long)]
    bc: Option<String>,
    /// `lemma` or `proof`.
    #[arg(long)]
    qbar: Option<String>,
    /// Theorem ids, repeated or comma separated.
    #[arg(long = "theorem")]
    theorems: Vec<String>,
    #[arg(long)]
    theta_tol: Option<f64>,
    #[arg(long)]
    spectral_tol: Option<f64>,
    #[arg(long)]
    audit_tol: Option<f64>,
    #[arg(long)]
    eigen_tol: Option<f64>,
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long, short = 'o')]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long = "a")]
    a: Option<f64>,
    #[arg(long = "c")]
    c: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    genus: Option<u32>,
    #[arg(long)]
    boundary: Option<u32>,
    #[arg(long)]
    index: Option<u32>,
    #[arg(long)]
    area: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    collar_steps: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let strings = [
            ("data", &self.data),
            ("surface", &self.surface),
            ("grid", &self.grid),
            ("operator", &self.operator),
            ("bc", &self.bc),
            ("qbar", &self.qbar),
        ];
        for (k, v) in strings {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        if !self.theorems.is_empty() {
            cfg.set("theorem", &self.theorems.join(","))?;
        }
        let reals = [
            ("theta_tol", self.theta_tol),
            ("spectral_tol", self.spectral_tol),
            ("audit_tol", self.audit_tol),
            ("eigen_tol", self.eigen_tol),
            ("residual_tol", self.residual_tol),
            ("a", self.a),
            ("c", self.c),
            ("radius", self.radius),
            ("ratio", self.ratio),
            ("area", self.area),
            ("zeta", self.zeta),
        ];
        for (k, v) in reals {
            if let Some(v) = v {
                cfg.set(k, &format!("{v:e}"))?;
            }
        }
        let ints = [
            ("seed", self.seed),
            ("samples", self.samples.map(|x| x as u64)),
            ("genus", self.genus.map(u64::from)),
            ("boundary", self.boundary.map(u64::from)),
            ("index", self.index.map(u64::from)),
            ("collar_steps", self.collar_steps.map(|x| x as u64)),
            ("workers", self.workers.map(|x| x as u64)),
        ];
        for (k, v) in ints {
            if let Some(v) = v {
                cfg.set(k, &v.to_string())?;
            }
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        Ok(())
    }
}

fn build_config(file: Option<&PathBuf>, common: &Common) -> Result<RunConfig> {
    let mut cfg = match file {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    common.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let common = match &cli.command {
        Command::Catalog(c)
        | Command::Constraints(c)
        | Command::Surface(c)
        | Command::Eigen(c)
        | Command::Audit(c) => c,
        Command::Sweep(s) => &s.common,
    };
    let cfg = match build_config(cli.config.as_ref(), common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match &cli.command {
        Command::Catalog(_) => cmd_catalog(),
        Command::Constraints(_) => cmd_constraints(&cfg),
        Command::Surface(_) => cmd_surface(&cfg),
        Command::Eigen(_) => cmd_eigen(&cfg),
        Command::Audit(_) => cmd_audit(&cfg),
        Command::Sweep(s) => cmd_sweep(&cfg, s.target, &s.param, s.from, s.to, s.steps),
    };
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return commands::error_code(&e);
        }
    };
    if let Err(e) = out.write_to(&cfg.output_dir) {
        eprintln!("error: {e}");
        return EXIT_NUMERICAL;
    }
    print!("{}", out.text);
    out.code
}
