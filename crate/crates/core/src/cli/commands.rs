//! Command implementations. Each returns its files and summary rows; the
//! caller decides where they are written.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::audit::{
    audit_cohn_vossen, audit_collar, audit_cy_estimate, audit_diameter, audit_g_quantity, audit_growth_bounds,
    audit_hawking_bound, audit_i_sigma, audit_index_bounds, AuditOptions, AuditReport, GrowthParams, Tolerance, Verdict,
};
use crate::cli::config::RunConfig;
use crate::data::{catalog, energy_momentum, sample_points, InitialData};
use crate::error::{Error, Result};
use crate::geometry::{gauss_bonnet_total, Topology};
use crate::spectra::{
    assemble, morse_index, principal_eigenvalue_with, BoundaryCondition, EigenOptions, OperatorKind, OperatorSpec,
};
use crate::surface::{compute_geometry, hawking_energy, QbarVariant, SurfaceGeometry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_UNMET: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
/// Invalid configuration or command line.
pub const EXIT_USAGE: i32 = 64;

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Holds => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::HypothesisUnmet | Verdict::NotApplicable => EXIT_UNMET,
    }
}

/// Exit code for an error raised while running a command.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::UnknownData(_) | Error::InvalidParameter(_) | Error::BoundaryMismatch(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Combine codes with precedence 3 > 2 > 1 > 0 (usage errors above all).
pub fn combine_codes(a: i32, b: i32) -> i32 {
    a.max(b)
}

/// Round-trip float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub code: i32,
    pub summary: Table,
    pub files: Vec<OutputFile>,
    /// Human-readable text for the terminal.
    pub text: String,
}

impl CommandOutput {
    fn new(code: i32, summary: Table, file_name: &str) -> Result<Self> {
        let csv = summary.to_csv()?;
        Ok(CommandOutput {
            code,
            files: vec![OutputFile { name: file_name.into(), contents: csv.clone() }],
            summary,
            text: csv,
        })
    }

    /// Write every file under `dir`, each through a temporary file and rename.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = vec![];
        for f in &self.files {
            let path = dir.join(&f.name);
            write_atomic(&path, &f.contents)?;
            out.push(path);
        }
        Ok(out)
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn cmd_catalog() -> Result<CommandOutput> {
    let mut t = Table::new(&["name", "spec", "extension", "slicing", "excision_radius"]);
    for d in catalog() {
        t.push(vec![
            d.name().into(),
            d.spec(),
            d.extension().is_some().to_string(),
            d.slicing().is_some().to_string(),
            fmt_f64(d.excision_radius()),
        ]);
    }
    CommandOutput::new(EXIT_OK, t, "catalog.csv")
}

pub const CONSTRAINTS_HEADER: [&str; 7] = ["data", "samples", "seed", "min_mu", "max_mu", "max_j_norm", "min_dec_margin"];

pub fn cmd_constraints(cfg: &RunConfig) -> Result<CommandOutput> {
    let data = cfg.data_ref()?;
    let pts = sample_points(data.as_ref(), cfg.samples, cfg.seed);
    let mut detail = Table::new(&["index", "x", "y", "z", "mu", "j_norm", "dec_margin"]);
    let (mut min_mu, mut max_mu, mut max_j, mut min_dec) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::INFINITY);
    for (i, x) in pts.iter().enumerate() {
        let em = energy_momentum(data.as_ref(), x)?;
        min_mu = min_mu.min(em.mu);
        max_mu = max_mu.max(em.mu);
        max_j = max_j.max(em.j_norm);
        min_dec = min_dec.min(em.mu - em.j_norm);
        detail.push(vec![
            i.to_string(),
            fmt_f64(x[0]),
            fmt_f64(x[1]),
            fmt_f64(x[2]),
            fmt_f64(em.mu),
            fmt_f64(em.j_norm),
            fmt_f64(em.mu - em.j_norm),
        ]);
    }
    let mut summary = Table::new(&CONSTRAINTS_HEADER);
    summary.push(vec![
        data.spec(),
        cfg.samples.to_string(),
        cfg.seed.to_string(),
        fmt_f64(min_mu),
        fmt_f64(max_mu),
        fmt_f64(max_j),
        fmt_f64(min_dec),
    ]);
    let mut out = CommandOutput::new(EXIT_OK, summary, "constraints_summary.csv")?;
    out.files.push(OutputFile { name: "constraints.csv".into(), contents: detail.to_csv()? });
    Ok(out)
}

fn geometry(cfg: &RunConfig, data: &dyn InitialData) -> Result<SurfaceGeometry> {
    compute_geometry(&cfg.chart()?, data)
}

pub const SURFACE_HEADER: [&str; 12] = [
    "data",
    "surface",
    "grid",
    "area",
    "boundary_length",
    "min_theta_plus",
    "max_theta_plus",
    "min_theta_minus",
    "max_theta_minus",
    "max_abs_theta_plus",
    "hawking_energy",
    "gauss_bonnet_residual",
];

pub fn cmd_surface(cfg: &RunConfig) -> Result<CommandOutput> {
    let data = cfg.data_ref()?;
    let g = geometry(cfg, data.as_ref())?;
    let chi = g.topology().euler_characteristic() as f64;
    let gb = gauss_bonnet_total(&g.metric)? - 2.0 * PI * chi;
    let e_h = match g.topology() {
        Topology::Sphere => fmt_f64(hawking_energy(&g)?),
        Topology::Disk => String::new(),
    };
    let blen = g.boundary.as_ref().map_or(0.0, |b| b.length());
    let mut t = Table::new(&SURFACE_HEADER);
    t.push(vec![
        data.spec(),
        g.label.clone(),
        cfg.grid_label(),
        fmt_f64(g.area()),
        fmt_f64(blen),
        fmt_f64(g.theta_plus.min()),
        fmt_f64(g.theta_plus.max()),
        fmt_f64(g.theta_minus.min()),
        fmt_f64(g.theta_minus.max()),
        fmt_f64(g.max_abs_theta_plus()),
        e_h,
        fmt_f64(gb),
    ]);
    let mut fields = Table::new(&["node", "u", "v", "x", "y", "z", "h", "p", "theta_plus", "theta_minus", "gauss", "mu", "j_n"]);
    let grid = g.metric.grid();
    for k in 0..g.len() {
        let (u, v) = grid.coords(k);
        let x = g.position[k];
        fields.push(vec![
            k.to_string(),
            fmt_f64(u),
            fmt_f64(v),
            fmt_f64(x[0]),
            fmt_f64(x[1]),
            fmt_f64(x[2]),
            fmt_f64(g.h[k]),
            fmt_f64(g.p[k]),
            fmt_f64(g.theta_plus[k]),
            fmt_f64(g.theta_minus[k]),
            fmt_f64(g.gauss[k]),
            fmt_f64(g.mu[k]),
            fmt_f64(g.j_n[k]),
        ]);
    }
    let mut out = CommandOutput::new(EXIT_OK, t, "surface.csv")?;
    out.files.push(OutputFile { name: "surface_fields.csv".into(), contents: fields.to_csv()? });
    Ok(out)
}

pub const EIGEN_HEADER: [&str; 13] = [
    "data",
    "surface",
    "grid",
    "operator",
    "bc",
    "lambda1",
    "residual",
    "iterations",
    "positive",
    "adjoint_lambda1",
    "shift",
    "hypothesis_violated",
    "symmetric",
];

fn boundary_condition(cfg: &RunConfig, topology: Topology) -> Result<BoundaryCondition> {
    match &cfg.bc {
        Some(s) => BoundaryCondition::parse(s),
        None => Ok(BoundaryCondition::default_for(topology)),
    }
}

pub fn cmd_eigen(cfg: &RunConfig) -> Result<CommandOutput> {
    let data = cfg.data_ref()?;
    let g = geometry(cfg, data.as_ref())?;
    let kind = OperatorKind::parse(&cfg.operator)?;
    let bc = boundary_condition(cfg, g.topology())?;
    let mut spec = OperatorSpec::new(kind, bc);
    spec.qbar_variant = QbarVariant::parse(&cfg.qbar)?;
    let op = assemble(&g, data.as_ref(), &spec)?;
    let opts = EigenOptions { tol: cfg.eigen_tol, residual_tol: cfg.residual_tol, ..EigenOptions::default() };
    let r = principal_eigenvalue_with(&op, &opts)?;
    let mut t = Table::new(&EIGEN_HEADER);
    t.push(vec![
        data.spec(),
        g.label.clone(),
        cfg.grid_label(),
        kind.name().into(),
        bc.name(),
        fmt_f64(r.lambda1),
        fmt_f64(r.residual),
        r.iterations.to_string(),
        r.positive.to_string(),
        fmt_f64(r.adjoint_lambda1),
        fmt_f64(r.shift),
        op.hypothesis_violated.to_string(),
        op.symmetric.to_string(),
    ]);
    let mut ef = Table::new(&["node", "u", "v", "x", "y", "z", "phi", "adjoint_phi"]);
    let grid = g.metric.grid();
    for k in 0..g.len() {
        let (u, v) = grid.coords(k);
        let x = g.position[k];
        ef.push(vec![
            k.to_string(),
            fmt_f64(u),
            fmt_f64(v),
            fmt_f64(x[0]),
            fmt_f64(x[1]),
            fmt_f64(x[2]),
            fmt_f64(r.eigenfunction[k]),
            fmt_f64(r.adjoint_eigenfunction[k]),
        ]);
    }
    let code = if op.hypothesis_violated { EXIT_UNMET } else { EXIT_OK };
    let mut out = CommandOutput::new(code, t, "eigen.csv")?;
    out.files.push(OutputFile { name: "eigenfunction.csv".into(), contents: ef.to_csv()? });
    for w in &op.warnings {
        out.text.push_str(&format!("warning: {w}\n"));
    }
    Ok(out)
}

pub const AUDIT_HEADER: [&str; 5] = ["theorem_id", "verdict", "lhs", "rhs", "margin"];

/// Flat `key,value` rendering of a report.
pub fn report_csv(r: &AuditReport) -> Result<String> {
    let mut t = Table::new(&["key", "value"]);
    let mut kv = |k: String, v: String| t.push(vec![k, v]);
    kv("theorem_id".into(), r.theorem_id.clone());
    kv("verdict".into(), r.verdict.name().into());
    kv("lhs".into(), fmt_f64(r.lhs()));
    kv("rhs".into(), fmt_f64(r.rhs()));
    kv("margin".into(), fmt_f64(r.margin()));
    if let Some(na) = &r.not_applicable {
        kv("not_applicable".into(), na.clone());
    }
    for c in &r.checks {
        kv(format!("check.{}.lhs", c.name), fmt_f64(c.lhs));
        kv(format!("check.{}.relation", c.name), c.relation.symbol().into());
        kv(format!("check.{}.rhs", c.name), fmt_f64(c.rhs));
        kv(format!("check.{}.margin", c.name), fmt_f64(c.margin));
        kv(format!("check.{}.tolerance", c.name), fmt_f64(c.tolerance));
    }
    for f in &r.hypothesis_flags {
        kv(format!("flag.{}.satisfied", f.name), f.satisfied.to_string());
        kv(format!("flag.{}.evidence", f.name), fmt_f64(f.evidence));
    }
    for d in &r.equality_diagnostics {
        kv(format!("equality.{}", d.quantity), fmt_f64(d.residual_norm));
    }
    for (i, n) in r.notes.iter().enumerate() {
        kv(format!("note.{i}"), n.clone());
    }
    t.to_csv()
}

fn audit_options(cfg: &RunConfig) -> AuditOptions {
    AuditOptions {
        tolerance: Tolerance { rel: cfg.audit_tol, ..Tolerance::default() },
        theta_tol: cfg.theta_tol,
        spectral_tol: cfg.spectral_tol,
        samples: cfg.samples,
        seed: cfg.seed,
        ..AuditOptions::default()
    }
}

/// Runs one theorem; the geometry is built on first use and shared.
fn run_theorem(
    id: &str,
    cfg: &RunConfig,
    data: &dyn InitialData,
    geom: &mut Option<SurfaceGeometry>,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    let mut g = || -> Result<SurfaceGeometry> {
        if geom.is_none() {
            *geom = Some(geometry(cfg, data)?);
        }
        Ok(geom.clone().expect("geometry just built"))
    };
    match id {
        "cy-estimate" => audit_cy_estimate(&g()?, data, opts),
        "hawking-bound" => audit_hawking_bound(&g()?, data, opts),
        "cohn-vossen" => audit_cohn_vossen(&g()?, data, None, opts),
        "growth-bounds" => {
            let c = cfg.c.ok_or_else(|| Error::InvalidParameter("growth-bounds needs c".into()))?;
            let mut p = GrowthParams::new(cfg.a, c);
            p.radius = cfg.radius;
            p.ratio = cfg.ratio;
            audit_growth_bounds(&g()?, &p, opts)
        }
        "g-quantity" => audit_g_quantity(&g()?, data, opts),
        "area-boundary" => audit_i_sigma(&g()?, data, opts),
        "diameter" => audit_diameter(&g()?, data, None, opts),
        "collar" => audit_collar(&g()?, data, cfg.zeta, cfg.collar_steps, opts),
        "index" => {
            let (genus, boundary) = match (cfg.genus, cfg.boundary) {
                (Some(gn), Some(l)) => (gn, l),
                (gn, l) => {
                    let topo = g()?.topology();
                    let l_default = if topo == Topology::Disk { 1 } else { 0 };
                    (gn.unwrap_or(0), l.unwrap_or(l_default))
                }
            };
            let index = match cfg.index {
                Some(i) => i,
                None => {
                    let geo = g()?;
                    let bc = boundary_condition(cfg, geo.topology())?;
                    let op = assemble(&geo, data, &OperatorSpec::new(OperatorKind::MotsLs, bc))?;
                    morse_index(&op)? as u32
                }
            };
            audit_index_bounds(genus, boundary, index, cfg.c, cfg.area, opts)
        }
        other => Err(Error::Parse(format!("unknown theorem `{other}`"))),
    }
}

pub fn cmd_audit(cfg: &RunConfig) -> Result<CommandOutput> {
    if cfg.theorems.is_empty() {
        return Err(Error::InvalidParameter("audit needs at least one theorem".into()));
    }
    let data = cfg.data_ref()?;
    let opts = audit_options(cfg);
    let mut geom = None;
    let mut summary = Table::new(&AUDIT_HEADER);
    let mut files = vec![];
    let mut text = String::new();
    let mut code = EXIT_OK;
    for id in &cfg.theorems {
        match run_theorem(id, cfg, data.as_ref(), &mut geom, &opts) {
            Ok(r) => {
                code = combine_codes(code, verdict_code(r.verdict));
                summary.push(vec![
                    r.theorem_id.clone(),
                    r.verdict.name().into(),
                    fmt_f64(r.lhs()),
                    fmt_f64(r.rhs()),
                    fmt_f64(r.margin()),
                ]);
                files.push(OutputFile { name: format!("audit_{id}.csv"), contents: report_csv(&r)? });
                files.push(OutputFile { name: format!("audit_{id}.txt"), contents: r.to_string() });
                text.push_str(&r.to_string());
            }
            Err(e) => {
                code = combine_codes(code, error_code(&e));
                summary.push(vec![id.clone(), "Error".into(), String::new(), String::new(), String::new()]);
                text.push_str(&format!("theorem {id}: error: {e}\n"));
            }
        }
    }
    let csv = summary.to_csv()?;
    files.insert(0, OutputFile { name: "audit.csv".into(), contents: csv });
    Ok(CommandOutput { code, summary, files, text })
}

/// Commands that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepTarget {
    Constraints,
    Surface,
    Eigen,
    Audit,
}

impl SweepTarget {
    pub fn name(self) -> &'static str {
        match self {
            SweepTarget::Constraints => "constraints",
            SweepTarget::Surface => "surface",
            SweepTarget::Eigen => "eigen",
            SweepTarget::Audit => "audit",
        }
    }

    fn header(self) -> &'static [&'static str] {
        match self {
            SweepTarget::Constraints => &CONSTRAINTS_HEADER,
            SweepTarget::Surface => &SURFACE_HEADER,
            SweepTarget::Eigen => &EIGEN_HEADER,
            SweepTarget::Audit => &AUDIT_HEADER,
        }
    }

    fn run(self, cfg: &RunConfig) -> Result<CommandOutput> {
        match self {
            SweepTarget::Constraints => cmd_constraints(cfg),
            SweepTarget::Surface => cmd_surface(cfg),
            SweepTarget::Eigen => cmd_eigen(cfg),
            SweepTarget::Audit => cmd_audit(cfg),
        }
    }
}

/// Run `target` for `steps` evenly spaced values of `param`. Per-step files
/// go to `step_NNNN/` under the sweep directory; the merged table is
/// returned in step order.
pub fn cmd_sweep(
    cfg: &RunConfig,
    target: SweepTarget,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<CommandOutput> {
    if steps < 2 {
        return Err(Error::InvalidParameter("sweep needs at least 2 steps".into()));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(Error::InvalidParameter("sweep range must be finite".into()));
    }
    let values: Vec<f64> = (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect();
    let sweep_dir = cfg.output_dir.join(format!("sweep_{}", target.name()));
    let configs: Vec<RunConfig> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut c = cfg.with_param(param, v)?;
            c.validate()?;
            c.output_dir = sweep_dir.join(format!("step_{i:04}"));
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<(i32, Option<Table>, String)> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| match target.run(c).and_then(|o| o.write_to(&c.output_dir).map(|_| o)) {
                Ok(o) => (o.code, Some(o.summary), String::new()),
                Err(e) => (error_code(&e), None, e.to_string()),
            })
            .collect()
    });

    let mut header = vec!["step", param, "exit_code"];
    header.extend_from_slice(target.header());
    let mut merged = Table::new(&header);
    let mut code = EXIT_OK;
    let mut text = String::new();
    for (i, ((c, table, err), v)) in results.into_iter().zip(&values).enumerate() {
        code = combine_codes(code, c);
        let lead = vec![i.to_string(), fmt_f64(*v), c.to_string()];
        match table {
            Some(t) => {
                for row in t.rows {
                    let mut r = lead.clone();
                    r.extend(row);
                    merged.push(r);
                }
            }
            None => {
                let mut r = lead;
                r.extend(std::iter::repeat_n(String::new(), target.header().len()));
                merged.push(r);
                text.push_str(&format!("step {i}: error: {err}\n"));
            }
        }
    }
    let csv = merged.to_csv()?;
    text.insert_str(0, &csv);
    Ok(CommandOutput {
        code,
        files: vec![OutputFile { name: format!("sweep_{}.csv", target.name()), contents: csv }],
        summary: merged,
        text,
    })
}
