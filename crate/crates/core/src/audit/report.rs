use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Violated,
    HypothesisUnmet,
    NotApplicable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "Holds",
            Verdict::Violated => "Violated",
            Verdict::HypothesisUnmet => "HypothesisUnmet",
            Verdict::NotApplicable => "NotApplicable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Orientation of an inequality `lhs ∘ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `lhs ≤ rhs`
    Le,
    /// `lhs ≥ rhs`
    Ge,
    /// `lhs < rhs`, for integer-valued bounds
    Lt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Lt => "<",
        }
    }
}

/// One evaluated inequality. The margin is the slack, so it is
/// nonnegative exactly when the inequality holds.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub margin: f64,
    pub tolerance: f64,
}

impl InequalityCheck {
    pub fn new(name: &str, lhs: f64, rhs: f64, relation: Relation, tol: &Tolerance) -> Self {
        let margin = match relation {
            Relation::Le | Relation::Lt => rhs - lhs,
            Relation::Ge => lhs - rhs,
        };
        InequalityCheck {
            name: name.to_string(),
            lhs,
            rhs,
            relation,
            margin,
            tolerance: tol.rel * rhs.abs() + tol.abs,
        }
    }

    pub fn holds(&self) -> bool {
        match self.relation {
            Relation::Lt => self.margin > 0.0,
            _ => self.margin >= -self.tolerance,
        }
    }
}

/// Audit tolerance `rel·|rhs| + abs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-6, abs: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisFlag {
    pub name: String,
    pub satisfied: bool,
    pub evidence: f64,
}

impl HypothesisFlag {
    pub fn new(name: &str, satisfied: bool, evidence: f64) -> Self {
        HypothesisFlag { name: name.to_string(), satisfied, evidence }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualityDiagnostic {
    pub quantity: String,
    pub residual_norm: f64,
}

/// Result of auditing one theorem on one input.
///
/// `checks[0]` is the headline inequality; further entries are companion
/// inequalities of the same statement.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub theorem_id: String,
    pub checks: Vec<InequalityCheck>,
    pub hypothesis_flags: Vec<HypothesisFlag>,
    pub equality_diagnostics: Vec<EqualityDiagnostic>,
    /// Why the statement could not be evaluated, if so.
    pub not_applicable: Option<String>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl AuditReport {
    pub fn new(theorem_id: &str) -> Self {
        AuditReport {
            theorem_id: theorem_id.to_string(),
            checks: vec![],
            hypothesis_flags: vec![],
            equality_diagnostics: vec![],
            not_applicable: None,
            notes: vec![],
            verdict: Verdict::NotApplicable,
        }
    }

    pub fn check(&mut self, c: InequalityCheck) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn flag(&mut self, name: &str, satisfied: bool, evidence: f64) -> &mut Self {
        self.hypothesis_flags.push(HypothesisFlag::new(name, satisfied, evidence));
        self
    }

    pub fn diagnostic(&mut self, quantity: &str, residual_norm: f64) -> &mut Self {
        self.equality_diagnostics.push(EqualityDiagnostic { quantity: quantity.to_string(), residual_norm });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn mark_not_applicable(&mut self, reason: impl Into<String>) -> &mut Self {
        self.not_applicable = Some(reason.into());
        self
    }

    pub fn lhs(&self) -> f64 {
        self.checks.first().map_or(f64::NAN, |c| c.lhs)
    }

    pub fn rhs(&self) -> f64 {
        self.checks.first().map_or(f64::NAN, |c| c.rhs)
    }

    pub fn margin(&self) -> f64 {
        self.checks.first().map_or(f64::NAN, |c| c.margin)
    }

    pub fn flag_named(&self, name: &str) -> Option<&HypothesisFlag> {
        self.hypothesis_flags.iter().find(|f| f.name == name)
    }

    pub fn diagnostic_named(&self, quantity: &str) -> Option<f64> {
        self.equality_diagnostics.iter().find(|d| d.quantity == quantity).map(|d| d.residual_norm)
    }

    /// Fix the verdict: not applicable, then failed hypotheses, then the
    /// sign of the margins.
    pub fn finish(mut self) -> Self {
        assert!(!self.hypothesis_flags.is_empty(), "audit report without hypothesis flags");
        self.verdict = if self.not_applicable.is_some() || self.checks.is_empty() {
            Verdict::NotApplicable
        } else if self.hypothesis_flags.iter().any(|f| !f.satisfied) {
            Verdict::HypothesisUnmet
        } else if self.checks.iter().any(|c| !c.holds()) {
            Verdict::Violated
        } else {
            Verdict::Holds
        };
        self
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem {}: {}", self.theorem_id, self.verdict)?;
        if let Some(r) = &self.not_applicable {
            writeln!(f, "  not applicable: {r}")?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "  {}: {:.10e} {} {:.10e}  (margin {:.3e}, tol {:.1e})",
                c.name,
                c.lhs,
                c.relation.symbol(),
                c.rhs,
                c.margin,
                c.tolerance
            )?;
        }
        for h in &self.hypothesis_flags {
            writeln!(f, "  hypothesis {}: {} (evidence {:.6e})", h.name, if h.satisfied { "ok" } else { "FAILED" }, h.evidence)?;
        }
        for d in &self.equality_diagnostics {
            writeln!(f, "  equality {}: {:.3e}", d.quantity, d.residual_norm)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(flag_ok: bool, lhs: f64, rhs: f64) -> AuditReport {
        let mut r = AuditReport::new("t");
        r.check(InequalityCheck::new("main", lhs, rhs, Relation::Le, &Tolerance::default()));
        r.flag("h", flag_ok, 0.0);
        r.finish()
    }

    #[test]
    fn verdict_order() {
        assert_eq!(report(true, 1.0, 2.0).verdict, Verdict::Holds);
        assert_eq!(report(true, 3.0, 2.0).verdict, Verdict::Violated);
        assert_eq!(report(false, 3.0, 2.0).verdict, Verdict::HypothesisUnmet);
        assert_eq!(report(false, 1.0, 2.0).verdict, Verdict::HypothesisUnmet);
        let mut r = AuditReport::new("t");
        r.flag("h", false, 0.0).mark_not_applicable("undefined");
        assert_eq!(r.finish().verdict, Verdict::NotApplicable);
    }

    #[test]
    fn margin_is_slack() {
        let t = Tolerance::default();
        assert_eq!(InequalityCheck::new("a", 1.0, 3.0, Relation::Le, &t).margin, 2.0);
        assert_eq!(InequalityCheck::new("a", 1.0, 3.0, Relation::Ge, &t).margin, -2.0);
        assert!(!InequalityCheck::new("a", 10.0, 10.0, Relation::Lt, &t).holds());
        assert!(InequalityCheck::new("a", 10.0, 10.0, Relation::Le, &t).holds());
        // within the relative tolerance
        assert!(InequalityCheck::new("a", 1.0 + 5e-7, 1.0, Relation::Le, &t).holds());
    }
}
