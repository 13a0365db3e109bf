//! Assembly of the stability operators.
//!
//! Every operator handled here has the form
//! `𝓛φ = −Δφ + 2⟨V, ∇φ⟩ + cφ` with Robin condition `∂_ν φ = qφ` on a disk
//! boundary. Writing it as `−(div − V·)(∇ − V)φ + (c − div V + |V|²)φ`, the
//! drift is carried by twisting each stiffness edge `a → b` with the factor
//! `exp(−∫_a^b V)`. The assembled matrix `K` acts as `𝓛 = M⁻¹K` with the
//! lumped mass `M = diag(dμ)`. The natural boundary condition of the twisted
//! form is `∂_ν φ = ⟨V, ν⟩φ`, so the Robin rows receive `−(q − ⟨V, ν⟩) ds`.

use std::f64::consts::PI;
use std::fmt;

use crate::data::InitialData;
use crate::error::{Error, Result};
use crate::geometry::ops::divergence;
use crate::geometry::{stiffness_edges, CovectorField, Metric2Field, ScalarField, Topology};
use crate::surface::variation::qbar_field;
use crate::surface::{QbarVariant, SurfaceGeometry};

/// Which linearized operator to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// MOTS stability operator `L`.
    MotsL,
    /// Symmetrized operator `L_s = −Δ + Q`.
    MotsLs,
    /// Linearization of `|𝐇|²` along `φN` (divided by `2H`).
    HStabNormal,
    /// Linearization of `|𝐇|²` along `−φl₋` (divided by `−2θ₋`).
    HStabMinusLminus,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] =
        [OperatorKind::MotsL, OperatorKind::MotsLs, OperatorKind::HStabNormal, OperatorKind::HStabMinusLminus];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::MotsL => "L",
            OperatorKind::MotsLs => "Ls",
            OperatorKind::HStabNormal => "Hstab-N",
            OperatorKind::HStabMinusLminus => "Hstab-lminus",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown operator `{s}` (expected L, Ls, Hstab-N, Hstab-lminus)")))
    }

    /// Whether the assembled matrix is symmetric.
    pub fn is_symmetric(self) -> bool {
        self == OperatorKind::MotsLs
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Source of the Robin coefficient `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QSource {
    /// `q = −cot γ A(ν,ν) + Π(ν̄,ν̄)/sin γ` at a prescribed contact angle.
    Capillary(f64),
    /// `q = Π(N, N)`, the `γ = π/2` case.
    FreeBoundary,
    /// `q` at the surface's own contact angle: the free-boundary value when
    /// `γ ≡ π/2`, otherwise the capillary value at the measured angle.
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Closed,
    Robin(QSource),
}

impl BoundaryCondition {
    /// Parses `closed`, `robin:gamma=<rad>`, `robin:free` or `robin:sym`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "closed" => return Ok(BoundaryCondition::Closed),
            "robin:free" => return Ok(BoundaryCondition::Robin(QSource::FreeBoundary)),
            "robin:sym" => return Ok(BoundaryCondition::Robin(QSource::Symmetrized)),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("robin:gamma=") {
            let g: f64 = v.parse().map_err(|_| Error::Parse(format!("bad contact angle `{v}`")))?;
            return Ok(BoundaryCondition::Robin(QSource::Capillary(g)));
        }
        Err(Error::Parse(format!("unknown boundary condition `{s}`")))
    }

    pub fn name(&self) -> String {
        match self {
            BoundaryCondition::Closed => "closed".into(),
            BoundaryCondition::Robin(QSource::Capillary(g)) => format!("robin:gamma={g}"),
            BoundaryCondition::Robin(QSource::FreeBoundary) => "robin:free".into(),
            BoundaryCondition::Robin(QSource::Symmetrized) => "robin:sym".into(),
        }
    }

    /// The natural choice for a topology: closed on spheres, symmetrized
    /// Robin on disks.
    pub fn default_for(topology: Topology) -> Self {
        match topology {
            Topology::Sphere => BoundaryCondition::Closed,
            Topology::Disk => BoundaryCondition::Robin(QSource::Symmetrized),
        }
    }
}

/// Contact angles closer than this to `0` or `π` are rejected.
pub const GAMMA_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub bc: BoundaryCondition,
    pub qbar_variant: QbarVariant,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, bc: BoundaryCondition) -> Self {
        OperatorSpec { kind, bc, qbar_variant: QbarVariant::default() }
    }
}

/// Boundary data of a Robin problem, aligned with the boundary ring.
#[derive(Debug, Clone)]
pub struct RobinData {
    pub nodes: Vec<usize>,
    pub ds: Vec<f64>,
    pub q: Vec<f64>,
    /// `⟨V, ν⟩` for the drift `V`.
    pub drift_nu: Vec<f64>,
}

/// Coefficients of `−Δφ + 2⟨V,∇φ⟩ + cφ` with optional Robin data.
///
/// Besides the operators built from a surface, this is how Schrödinger-type
/// operators such as `−Δ + aK − c` are assembled.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub metric: Metric2Field,
    pub drift: CovectorField,
    /// Zeroth-order coefficient `c`.
    pub zeroth: ScalarField,
    pub robin: Option<RobinData>,
}

impl Coefficients {
    /// `−Δ + c` on a closed surface or with Neumann condition on a disk.
    pub fn schrodinger(metric: &Metric2Field, zeroth: Vec<f64>) -> Self {
        let n = metric.len();
        let robin = metric.grid().has_boundary().then(|| {
            let nodes = metric.grid().boundary_index().to_vec();
            let m = nodes.len();
            RobinData { nodes, ds: metric.boundary_lengths(), q: vec![0.0; m], drift_nu: vec![0.0; m] }
        });
        Coefficients {
            metric: metric.clone(),
            drift: CovectorField(vec![[0.0; 2]; n]),
            zeroth: ScalarField(zeroth),
            robin,
        }
    }

    /// `c − div V + |V|²`, the potential left after absorbing the drift.
    fn potential(&self) -> Result<Vec<f64>> {
        let div = divergence(&self.metric, &self.drift)?;
        Ok((0..self.metric.len())
            .map(|k| self.zeroth[k] - div[k] + self.metric.norm_sq(k, self.drift[k]))
            .collect())
    }

    /// Coefficients of `spec` on a computed surface.
    pub fn from_geometry(geom: &SurfaceGeometry, data: &dyn InitialData, spec: &OperatorSpec) -> Result<Self> {
        check_bc(geom.topology(), &spec.bc)?;
        let n = geom.len();
        let w2 = geom.w_norm_sq();
        let (drift, zeroth, drift_scale): (CovectorField, Vec<f64>, Vec<f64>) = match spec.kind {
            OperatorKind::MotsL => (
                geom.w.clone(),
                (0..n).map(|k| geom.q[k] + geom.div_w[k] - w2[k]).collect(),
                vec![1.0; n],
            ),
            // no drift in the interior, but the Robin coefficient is still q − ⟨W,ν⟩
            OperatorKind::MotsLs => (CovectorField(vec![[0.0; 2]; n]), geom.q.0.clone(), vec![1.0; n]),
            OperatorKind::HStabNormal => {
                let a2 = geom.a_norm_sq();
                let ak = geom.a_dot_k();
                let mut zeroth = Vec::with_capacity(n);
                let mut scale = Vec::with_capacity(n);
                for k in 0..n {
                    let h = geom.h[k];
                    if h == 0.0 {
                        return Err(Error::VanishingMeanCurvature { node: k });
                    }
                    let s = -geom.p[k] / h;
                    let base = 0.5
                        * (2.0 * geom.gauss[k] - 2.0 * geom.mu[k] - geom.tr_k[k].powi(2) + geom.k_norm_sq[k]
                            - a2[k]
                            - h * h);
                    let dp = -geom.j_n[k] + geom.div_w[k] + h * geom.k_nn[k] - ak[k];
                    zeroth.push(base + s * dp);
                    scale.push(s);
                }
                let drift = (0..n).map(|k| [scale[k] * geom.w[k][0], scale[k] * geom.w[k][1]]).collect();
                (CovectorField(drift), zeroth, scale)
            }
            OperatorKind::HStabMinusLminus => {
                let qbar = qbar_field(geom, data, spec.qbar_variant)?;
                (geom.w.clone(), (0..n).map(|k| qbar[k] + geom.div_w[k] - w2[k]).collect(), vec![1.0; n])
            }
        };
        let robin = match spec.bc {
            BoundaryCondition::Closed => None,
            BoundaryCondition::Robin(src) => {
                let b = geom.boundary.as_ref().ok_or(Error::NoBoundary)?;
                let q = match src {
                    QSource::Capillary(g) => b.capillary_q(g),
                    QSource::FreeBoundary => b.free_q(),
                    QSource::Symmetrized => {
                        if b.is_free_boundary() {
                            b.free_q()
                        } else {
                            (0..b.nodes.len())
                                .map(|i| {
                                    let g = b.gamma[i];
                                    if !(GAMMA_MARGIN..=PI - GAMMA_MARGIN).contains(&g) {
                                        return Err(Error::ContactAngle(g));
                                    }
                                    let (s, c) = g.sin_cos();
                                    Ok(-c / s * b.a_nu_nu[i] + b.pi_nubar_nubar[i] / s)
                                })
                                .collect::<Result<Vec<_>>>()?
                        }
                    }
                };
                let drift_nu = b.nodes.iter().zip(&b.w_nu).map(|(&k, w)| drift_scale[k] * w).collect();
                Some(RobinData { nodes: b.nodes.clone(), ds: b.ds.clone(), q, drift_nu })
            }
        };
        Ok(Coefficients { metric: geom.metric.clone(), drift, zeroth: ScalarField(zeroth), robin })
    }
}

fn check_bc(topology: Topology, bc: &BoundaryCondition) -> Result<()> {
    match (topology, bc) {
        (Topology::Sphere, BoundaryCondition::Closed) => Ok(()),
        (Topology::Disk, BoundaryCondition::Robin(src)) => {
            if let QSource::Capillary(g) = src {
                if !(GAMMA_MARGIN..=PI - GAMMA_MARGIN).contains(g) || !g.is_finite() {
                    return Err(Error::ContactAngle(*g));
                }
            }
            Ok(())
        }
        (t, bc) => Err(Error::BoundaryMismatch(format!("{} is not valid on a {t:?} surface", bc.name()))),
    }
}

/// Sparse operator `𝓛 = M⁻¹K`, stored row-wise.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub label: String,
    /// `K` is symmetric, so `𝓛` is self-adjoint in `L²(dμ)`.
    pub symmetric: bool,
    /// Row `a` holds `(b, K_ab)` pairs, diagonal first.
    pub rows: Vec<Vec<(usize, f64)>>,
    /// Lumped mass `dμ`.
    pub mass: Vec<f64>,
    /// Effective zeroth-order coefficient per node, including the Robin
    /// contribution per unit mass.
    pub node_c: Vec<f64>,
    /// Set when the Robin coefficient is positive somewhere for `L`.
    pub hypothesis_violated: bool,
    pub warnings: Vec<String>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `K x`.
    pub fn stiffness_apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(b, v)| v * x[b]).sum()).collect()
    }

    /// `𝓛 x = M⁻¹ K x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.stiffness_apply(x).into_iter().zip(&self.mass).map(|(y, m)| y / m).collect()
    }

    /// `Kᵀ x`.
    pub fn stiffness_apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        for (a, r) in self.rows.iter().enumerate() {
            for &(b, v) in r {
                y[b] += v * x[a];
            }
        }
        y
    }

    /// `K_ab`, zero when absent.
    pub fn entry(&self, a: usize, b: usize) -> f64 {
        self.rows[a].iter().filter(|(c, _)| *c == b).map(|(_, v)| v).sum()
    }

    /// Largest `|K_ab − K_ba| / max|K|`.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.rows.iter().flatten().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        let mut worst = 0.0f64;
        for (a, r) in self.rows.iter().enumerate() {
            for &(b, v) in r {
                worst = worst.max((v - self.entry(b, a)).abs());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    /// `(K + Kᵀ)/2`, which has the same quadratic form.
    pub fn symmetric_part(&self) -> OperatorMatrix {
        let mut rows: Vec<Vec<(usize, f64)>> = self.rows.iter().map(|r| vec![r[0]]).collect();
        for (a, r) in self.rows.iter().enumerate() {
            for &(b, v) in &r[1..] {
                rows[a].push((b, 0.5 * v));
                rows[b].push((a, 0.5 * v));
            }
        }
        for r in rows.iter_mut() {
            merge_duplicates(r);
        }
        OperatorMatrix {
            label: format!("sym({})", self.label),
            symmetric: true,
            rows,
            mass: self.mass.clone(),
            node_c: self.node_c.clone(),
            hypothesis_violated: self.hypothesis_violated,
            warnings: self.warnings.clone(),
        }
    }

    /// `(row, col, value)` triplets.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        self.rows.iter().enumerate().flat_map(|(a, r)| r.iter().map(move |&(b, v)| (a, b, v))).collect()
    }
}

/// Assembles `spec` on a computed surface.
pub fn assemble(geom: &SurfaceGeometry, data: &dyn InitialData, spec: &OperatorSpec) -> Result<OperatorMatrix> {
    let coeffs = Coefficients::from_geometry(geom, data, spec)?;
    let mut m = assemble_coefficients(spec.kind.name(), &coeffs)?;
    m.symmetric = spec.kind.is_symmetric() || m.symmetric;
    if spec.kind == OperatorKind::MotsL {
        if let Some(r) = &coeffs.robin {
            if let Some(qmax) = r.q.iter().cloned().reduce(f64::max) {
                if qmax > 0.0 {
                    m.hypothesis_violated = true;
                    m.warnings.push(format!("Robin coefficient q > 0 on the boundary (max {qmax:.3e})"));
                }
            }
        }
    }
    Ok(m)
}

/// Assembles `−Δ + 2⟨V,∇·⟩ + c` from explicit coefficients.
pub fn assemble_coefficients(label: &str, coeffs: &Coefficients) -> Result<OperatorMatrix> {
    let metric = &coeffs.metric;
    let n = metric.len();
    crate::geometry::fields::check_len(n, coeffs.drift.len())?;
    crate::geometry::fields::check_len(n, coeffs.zeroth.len())?;
    let potential = coeffs.potential()?;
    crate::geometry::fields::check_finite(&potential)?;
    let mass = metric.area_elements().to_vec();
    let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|a| vec![(a, potential[a] * mass[a])]).collect();
    let twisted = coeffs.drift.iter().any(|w| w[0] != 0.0 || w[1] != 0.0);
    for e in stiffness_edges(metric) {
        if e.weight == 0.0 {
            continue;
        }
        let omega = if twisted {
            let (va, vb) = (coeffs.drift[e.a], coeffs.drift[e.b]);
            0.5 * ((va[0] + vb[0]) * e.du + (va[1] + vb[1]) * e.dv)
        } else {
            0.0
        };
        rows[e.a][0].1 += e.weight;
        rows[e.b][0].1 += e.weight;
        rows[e.a].push((e.b, -e.weight * (-omega).exp()));
        rows[e.b].push((e.a, -e.weight * omega.exp()));
    }
    let mut node_c = potential.clone();
    if let Some(r) = &coeffs.robin {
        for (i, &k) in r.nodes.iter().enumerate() {
            let q_eff = r.q[i] - r.drift_nu[i];
            rows[k][0].1 -= q_eff * r.ds[i];
            node_c[k] -= q_eff * r.ds[i] / mass[k];
        }
    }
    for r in rows.iter_mut() {
        merge_duplicates(r);
    }
    Ok(OperatorMatrix {
        label: label.to_string(),
        symmetric: !twisted,
        rows,
        mass,
        node_c,
        hypothesis_violated: false,
        warnings: vec![],
    })
}

fn merge_duplicates(row: &mut Vec<(usize, f64)>) {
    let diag = row[0];
    let mut rest: Vec<(usize, f64)> = row[1..].to_vec();
    rest.sort_by_key(|e| e.0);
    row.clear();
    row.push(diag);
    for (b, v) in rest {
        if b == diag.0 {
            row[0].1 += v;
        } else if row.len() > 1 && row[row.len() - 1].0 == b {
            let last = row.len() - 1;
            row[last].1 += v;
        } else {
            row.push((b, v));
        }
    }
}
