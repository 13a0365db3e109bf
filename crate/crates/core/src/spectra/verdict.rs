//! Stability verdict for a MOTS: principal eigenvalues of `L` and `L_s`.

use crate::data::InitialData;
use crate::error::{Error, Result};
use crate::spectra::eigen::principal_eigenvalue;
use crate::spectra::operator::{assemble, BoundaryCondition, OperatorKind, OperatorSpec};
use crate::surface::SurfaceGeometry;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictOptions {
    /// Largest `|θ₊|` accepted as a MOTS.
    pub theta_tol: f64,
    /// `λ1(L) ≥ −stable_tol` counts as stable.
    pub stable_tol: f64,
    /// Slack in `λ1(L) ≤ λ1(L_s)`.
    pub comparison_tol: f64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions { theta_tol: 1e-6, stable_tol: 1e-8, comparison_tol: 1e-7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub lambda1_l: f64,
    pub lambda1_ls: f64,
    pub adjoint_lambda1_l: f64,
    pub stable: bool,
    /// `λ1(L) ≤ λ1(L_s) + tol`; only asserted when `q ≤ 0` on the boundary.
    pub comparison_ok: bool,
    /// Whether the comparison hypothesis `q ≤ 0` held.
    pub comparison_applies: bool,
    pub max_theta_plus: f64,
}

pub fn stability_verdict(
    geom: &SurfaceGeometry,
    data: &dyn InitialData,
    bc: BoundaryCondition,
    opts: &VerdictOptions,
) -> Result<StabilityVerdict> {
    let max_theta = geom.max_abs_theta_plus();
    if !(max_theta < opts.theta_tol) {
        return Err(Error::NotAMots { max_theta, tol: opts.theta_tol });
    }
    let l = assemble(geom, data, &OperatorSpec::new(OperatorKind::MotsL, bc))?;
    let ls = assemble(geom, data, &OperatorSpec::new(OperatorKind::MotsLs, bc))?;
    let el = principal_eigenvalue(&l)?;
    let els = principal_eigenvalue(&ls)?;
    let comparison_applies = !l.hypothesis_violated;
    let within = el.lambda1 <= els.lambda1 + opts.comparison_tol;
    Ok(StabilityVerdict {
        lambda1_l: el.lambda1,
        lambda1_ls: els.lambda1,
        adjoint_lambda1_l: el.adjoint_lambda1,
        stable: el.lambda1 >= -opts.stable_tol,
        comparison_ok: !comparison_applies || within,
        comparison_applies,
        max_theta_plus: max_theta,
    })
}
