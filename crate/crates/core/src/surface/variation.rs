//! Finite-difference check of the first-variation formulas for `θ₊` and
//! `|𝐇|²`.
//!
//! The perturbed surfaces are radial graphs `ρ ± εψ` with
//! `ψ = φ / g(ω, N)`, so the variation field is `φN` plus a tangential part
//! `T`; the formula side adds `T(f)` accordingly. For the `−φ l₋` direction
//! the surface is also displaced to time `t = ∓εφ` in the slicing
//! spacetime.

use rayon::prelude::*;

use crate::data::tensor::{self, Vec3};
use crate::data::{FourVector, InitialData};
use crate::error::{Error, Result};
use crate::geometry::diff::{d_u, d_v, Parity};
use crate::geometry::ops::{gradient, laplace_beltrami};
use crate::surface::chart::SurfaceChart;
use crate::surface::geometry::{compute_geometry, SurfaceGeometry};
use crate::surface::spacetime::mean_curvature_norm_sq;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariationDirection {
    /// `X = φN` inside the slice.
    NormalN,
    /// `X = −φ l₋ = φN − φτ`.
    MinusLMinus,
}

/// Coefficient variant of the zeroth-order term in the `−φ l₋` formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QbarVariant {
    /// `θ₊/(2θ₋)(|χ₋|² + G(l₋,l₋)) + ½θ₋θ₊`.
    Lemma,
    /// `θ₊/(2θ₋)(|χ̂₋|² + G(l₋,l₋)) + ¾θ₋θ₊`.
    #[default]
    Proof,
}

impl QbarVariant {
    pub fn name(self) -> &'static str {
        match self {
            QbarVariant::Lemma => "lemma",
            QbarVariant::Proof => "proof",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "lemma" => Ok(QbarVariant::Lemma),
            "proof" => Ok(QbarVariant::Proof),
            other => Err(Error::Parse(format!("unknown qbar variant `{other}`"))),
        }
    }
}

/// One formula compared against finite differences at every `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationComparison {
    pub quantity: String,
    /// Max-norm of the formula field.
    pub formula_max_abs: f64,
    /// Max-norm deviation per `ε`.
    pub deviations: Vec<f64>,
    /// Least-squares slope of `log(deviation)` against `log(ε)`.
    pub fitted_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationRecord {
    pub direction: VariationDirection,
    pub epsilons: Vec<f64>,
    pub comparisons: Vec<VariationComparison>,
    /// For `−φ l₋`, the variant with the smallest deviation at the smallest `ε`.
    pub best_qbar: Option<QbarVariant>,
}

impl VariationRecord {
    pub fn comparison(&self, quantity: &str) -> Option<&VariationComparison> {
        self.comparisons.iter().find(|c| c.quantity == quantity)
    }
}

fn fitted_order(eps: &[f64], dev: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(dev)
        .filter(|(e, d)| **e > 0.0 && **d > 0.0)
        .map(|(e, d)| (e.ln(), d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `Q̄` field for the requested variant.
pub fn qbar_field(geom: &SurfaceGeometry, data: &dyn InitialData, variant: QbarVariant) -> Result<Vec<f64>> {
    let ext = data.extension().ok_or_else(|| Error::MissingExtension(data.name().to_string()))?;
    let chi_sq: Vec<f64> = match variant {
        QbarVariant::Lemma => (0..geom.len())
            .map(|k| geom.metric.tensor_inner(k, geom.chi_minus[k], geom.chi_minus[k]))
            .collect(),
        QbarVariant::Proof => (0..geom.len())
            .map(|k| geom.metric.tensor_inner(k, geom.chi_minus_hat[k], geom.chi_minus_hat[k]))
            .collect(),
    };
    let tt_coeff = match variant {
        QbarVariant::Lemma => 0.5,
        QbarVariant::Proof => 0.75,
    };
    let mut out = Vec::with_capacity(geom.len());
    for k in 0..geom.len() {
        let tm = geom.theta_minus[k];
        if tm == 0.0 {
            return Err(Error::VanishingThetaMinus { node: k });
        }
        let tp = geom.theta_plus[k];
        let (lp, lm) = FourVector::null_pair(geom.normal[k]);
        let x = &geom.position[k];
        let g_pm = ext.einstein_contraction(x, &lp, &lm);
        let g_mm = ext.einstein_contraction(x, &lm, &lm);
        out.push(geom.gauss[k] - 0.5 * g_pm + tp / (2.0 * tm) * (chi_sq[k] + g_mm) + tt_coeff * tm * tp);
    }
    Ok(out)
}

/// `δ_{φN} θ₊` from the closed-form operator.
pub fn theta_plus_variation(geom: &SurfaceGeometry, phi: &[f64]) -> Result<Vec<f64>> {
    let lap = laplace_beltrami(&geom.metric, phi)?;
    let dphi = gradient(&geom.metric, phi)?;
    let w2 = geom.w_norm_sq();
    Ok((0..geom.len())
        .map(|k| {
            let tp = geom.theta_plus[k];
            -lap[k]
                + 2.0 * geom.metric.inner(k, geom.w[k], dphi[k])
                + (geom.q[k] + geom.div_w[k] - w2[k] + tp * geom.tr_k[k] - 0.5 * tp * tp) * phi[k]
        })
        .collect())
}

/// `δ_{φN} |𝐇|²` (requires `H ≠ 0`).
pub fn hnorm_normal_variation(geom: &SurfaceGeometry, phi: &[f64]) -> Result<Vec<f64>> {
    let lap = laplace_beltrami(&geom.metric, phi)?;
    let dphi = gradient(&geom.metric, phi)?;
    let a2 = geom.a_norm_sq();
    let ak = geom.a_dot_k();
    let mut out = Vec::with_capacity(geom.len());
    for k in 0..geom.len() {
        let h = geom.h[k];
        if h == 0.0 {
            return Err(Error::VanishingMeanCurvature { node: k });
        }
        let p = geom.p[k];
        let zeroth = 0.5
            * (2.0 * geom.gauss[k] - 2.0 * geom.mu[k] - geom.tr_k[k].powi(2) + geom.k_norm_sq[k]
                - a2[k]
                - h * h);
        let dp = -geom.j_n[k] + geom.div_w[k] + h * geom.k_nn[k] - ak[k];
        let inner = -lap[k] + zeroth * phi[k] - 2.0 * p / h * geom.metric.inner(k, geom.w[k], dphi[k])
            - p / h * dp * phi[k];
        out.push(2.0 * h * inner);
    }
    Ok(out)
}

/// `δ_{−φl₋} |𝐇|²`.
pub fn hnorm_minus_lminus_variation(
    geom: &SurfaceGeometry,
    data: &dyn InitialData,
    phi: &[f64],
    variant: QbarVariant,
) -> Result<Vec<f64>> {
    let qbar = qbar_field(geom, data, variant)?;
    let lap = laplace_beltrami(&geom.metric, phi)?;
    let dphi = gradient(&geom.metric, phi)?;
    let w2 = geom.w_norm_sq();
    Ok((0..geom.len())
        .map(|k| {
            let inner = lap[k] - 2.0 * geom.metric.inner(k, geom.w[k], dphi[k])
                - (geom.div_w[k] - w2[k] + qbar[k]) * phi[k];
            2.0 * geom.theta_minus[k] * inner
        })
        .collect())
}

/// `T^a ∂_a f` for the tangential part of the radial displacement `ψ ω`.
fn tangential_derivative(geom: &SurfaceGeometry, data: &dyn InitialData, psi: &[f64], omega: &[Vec3], f: &[f64]) -> Vec<f64> {
    let grid = geom.metric.grid();
    let fu = d_u(grid, f, Parity::Even);
    let fv = d_v(grid, f);
    (0..geom.len())
        .map(|k| {
            let g = data.g(&geom.position[k]);
            let [eu, ev] = geom.tangents[k];
            let low = [tensor::bilinear(&g, &omega[k], &eu), tensor::bilinear(&g, &omega[k], &ev)];
            let up = geom.metric.raise(k, low);
            psi[k] * (up[0] * fu[k] + up[1] * fv[k])
        })
        .collect()
}

/// Compare the variation formulas with central finite differences.
pub fn variation_oracle(
    surface: &SurfaceChart,
    data: &dyn InitialData,
    phi: &[f64],
    direction: VariationDirection,
    epsilons: &[f64],
) -> Result<VariationRecord> {
    let rho = surface
        .rho()
        .ok_or_else(|| Error::Unsupported("variation oracle needs a radial graph".into()))?;
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter("no epsilon values".into()));
    }
    crate::geometry::fields::check_len(rho.len(), phi.len())?;
    let geom = compute_geometry(surface, data)?;
    let center = surface.center();
    let omega: Vec<Vec3> = geom
        .position
        .iter()
        .map(|x| {
            let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            d.map(|c| c / r)
        })
        .collect();
    let mut psi = Vec::with_capacity(phi.len());
    for k in 0..phi.len() {
        let g = data.g(&geom.position[k]);
        let c = tensor::bilinear(&g, &omega[k], &geom.normal[k]);
        if !(c > 0.0) {
            return Err(Error::ImmersionFailure { node: k });
        }
        psi.push(phi[k] / c);
    }
    let slicing = match direction {
        VariationDirection::NormalN => None,
        VariationDirection::MinusLMinus => {
            Some(data.slicing().ok_or_else(|| Error::MissingSlicing(data.name().to_string()))?)
        }
    };

    // finite-difference fields per epsilon: (θ₊, |𝐇|²)
    let samples: Vec<Result<(Vec<f64>, Vec<f64>)>> = epsilons
        .par_iter()
        .map(|&eps| {
            let mut fields = Vec::with_capacity(2);
            for sign in [1.0, -1.0] {
                let s = surface.with_rho((0..rho.len()).map(|k| rho[k] + sign * eps * psi[k]).collect())?;
                match slicing {
                    None => {
                        let g = compute_geometry(&s, data)?;
                        let h2: Vec<f64> = (0..g.len()).map(|k| g.h[k] * g.h[k] - g.p[k] * g.p[k]).collect();
                        fields.push((g.theta_plus.0, h2));
                    }
                    Some(sl) => {
                        let time: Vec<f64> = phi.iter().map(|p| -sign * eps * p).collect();
                        let h2 = mean_curvature_norm_sq(sl, s.grid(), &time, &s.jets())?;
                        fields.push((vec![], h2));
                    }
                }
            }
            let (plus, minus) = (&fields[0], &fields[1]);
            let fd = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * eps)).collect() };
            Ok((fd(&plus.0, &minus.0), fd(&plus.1, &minus.1)))
        })
        .collect();
    let samples: Vec<(Vec<f64>, Vec<f64>)> = samples.into_iter().collect::<Result<_>>()?;

    let h2_base: Vec<f64> = (0..geom.len()).map(|k| geom.h[k] * geom.h[k] - geom.p[k] * geom.p[k]).collect();
    let tang_h2 = tangential_derivative(&geom, data, &psi, &omega, &h2_base);
    let mut comparisons = Vec::new();
    let mut push = |name: &str, formula: Vec<f64>, pick: &dyn Fn(&(Vec<f64>, Vec<f64>)) -> Vec<f64>| {
        let deviations: Vec<f64> = samples.iter().map(|s| max_dev(&pick(s), &formula)).collect();
        comparisons.push(VariationComparison {
            quantity: name.to_string(),
            formula_max_abs: formula.iter().fold(0.0, |m, x| m.max(x.abs())),
            fitted_order: fitted_order(epsilons, &deviations),
            deviations,
        });
    };
    let mut best_qbar = None;
    match direction {
        VariationDirection::NormalN => {
            let tang = tangential_derivative(&geom, data, &psi, &omega, &geom.theta_plus);
            let f: Vec<f64> = theta_plus_variation(&geom, phi)?.iter().zip(&tang).map(|(a, b)| a + b).collect();
            push("theta_plus", f, &|s| s.0.clone());
            if geom.h.iter().all(|h| *h > 0.0) {
                let f: Vec<f64> = hnorm_normal_variation(&geom, phi)?.iter().zip(&tang_h2).map(|(a, b)| a + b).collect();
                push("hnorm_sq", f, &|s| s.1.clone());
            }
        }
        VariationDirection::MinusLMinus => {
            for v in [QbarVariant::Lemma, QbarVariant::Proof] {
                let f: Vec<f64> = hnorm_minus_lminus_variation(&geom, data, phi, v)?
                    .iter()
                    .zip(&tang_h2)
                    .map(|(a, b)| a + b)
                    .collect();
                push(&format!("hnorm_sq_{}", v.name()), f, &|s| s.1.clone());
            }
            let last = |q: &str| {
                comparisons.iter().find(|c| c.quantity == q).and_then(|c| c.deviations.last().copied())
            };
            if let (Some(l), Some(p)) = (last("hnorm_sq_lemma"), last("hnorm_sq_proof")) {
                best_qbar = Some(if p <= l { QbarVariant::Proof } else { QbarVariant::Lemma });
            }
        }
    }
    Ok(VariationRecord { direction, epsilons: epsilons.to_vec(), comparisons, best_qbar })
}
