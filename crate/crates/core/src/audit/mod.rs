//! Inequality audits: both sides of each statement, hypothesis flags,
//! margins and equality-case residuals.

pub mod report;
pub mod theorems;

pub use report::{AuditReport, EqualityDiagnostic, HypothesisFlag, InequalityCheck, Relation, Tolerance, Verdict};
pub use theorems::{
    audit_cohn_vossen, audit_collar, audit_cy_estimate, audit_diameter, audit_g_quantity, audit_growth_bounds,
    audit_hawking_bound, audit_i_sigma, audit_index_bounds, collar_infimum, compute_g_quantity, AmbientInfima,
    AuditOptions, CollarField, GrowthParams,
};

/// Theorem ids accepted by the command line.
pub const THEOREM_IDS: [&str; 9] = [
    "cy-estimate",
    "hawking-bound",
    "cohn-vossen",
    "growth-bounds",
    "g-quantity",
    "area-boundary",
    "index",
    "diameter",
    "collar",
];
