use std::f64::consts::PI;

use proptest::prelude::*;

use motslab::audit::{
    audit_cy_estimate, audit_growth_bounds, audit_hawking_bound, audit_i_sigma, audit_index_bounds, AuditOptions,
    AuditReport, GrowthParams, InequalityCheck, Relation, Tolerance, Verdict,
};
use motslab::data::{HyperboloidalFlat, InitialData, MinkowskiFlat, SchwarzschildIsotropic};
use motslab::geometry::{integrate, Grid2, Metric2Field};
use motslab::surface::{compute_geometry, Support, SurfaceChart, SurfaceGeometry};

fn sphere(data: &dyn InitialData, r: f64, n: usize) -> SurfaceGeometry {
    let s = SurfaceChart::sphere(Grid2::sphere(n, 2 * n).unwrap(), [0.0; 3], r).unwrap();
    compute_geometry(&s, data).unwrap()
}

fn cylinder_disk(n: usize) -> SurfaceGeometry {
    let s = SurfaceChart::flat_disk(Grid2::disk(n, 2 * n).unwrap(), 1.0, Support::Cylinder { radius: 1.0 }).unwrap();
    compute_geometry(&s, &MinkowskiFlat).unwrap()
}

proptest! {
    #[test]
    fn index_threshold_depends_on_genus_parity(g in 0u32..=5, l in 1u32..=20) {
        let rep = audit_index_bounds(g, l, 1, None, None, &AuditOptions::default()).unwrap();
        let limit = if g % 2 == 0 { 10 } else { 14 };
        prop_assert_eq!(rep.verdict == Verdict::Violated, l >= limit);
        prop_assert_eq!(rep.verdict == Verdict::Holds, l < limit);
    }

    #[test]
    fn failed_hypothesis_takes_precedence(
        flags in prop::collection::vec(any::<bool>(), 1..5),
        lhs in -10.0f64..10.0,
        rhs in -10.0f64..10.0,
        na in any::<bool>(),
    ) {
        let mut r = AuditReport::new("t");
        r.check(InequalityCheck::new("main", lhs, rhs, Relation::Le, &Tolerance::default()));
        for (i, ok) in flags.iter().enumerate() {
            r.flag(&format!("h{i}"), *ok, 0.0);
        }
        if na {
            r.mark_not_applicable("undefined");
        }
        let holds = r.checks[0].holds();
        let v = r.finish().verdict;
        let want = if na {
            Verdict::NotApplicable
        } else if flags.iter().any(|f| !f) {
            Verdict::HypothesisUnmet
        } else if holds {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        prop_assert_eq!(v, want);
    }

    #[test]
    fn margin_sign_matches_inequality(lhs in -1e3f64..1e3, rhs in -1e3f64..1e3) {
        let t = Tolerance { rel: 0.0, abs: 0.0 };
        let le = InequalityCheck::new("le", lhs, rhs, Relation::Le, &t);
        let ge = InequalityCheck::new("ge", lhs, rhs, Relation::Ge, &t);
        prop_assert_eq!(le.margin >= 0.0, lhs <= rhs);
        prop_assert_eq!(ge.margin >= 0.0, lhs >= rhs);
        prop_assert_eq!(le.holds(), lhs <= rhs);
        prop_assert_eq!(le.margin, -ge.margin);
    }

    #[test]
    fn integration_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0, seed in 0u64..1000) {
        let grid = Grid2::sphere(8, 16).unwrap();
        let metric = Metric2Field::round_sphere(grid.clone(), 1.3).unwrap();
        let n = grid.len();
        let f: Vec<f64> = (0..n).map(|k| ((k as u64 * 31 + seed) % 17) as f64 - 8.0).collect();
        let g: Vec<f64> = (0..n).map(|k| ((k as u64 * 7 + seed) % 5) as f64).collect();
        let mix: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let lhs = integrate(&metric, &mix).unwrap();
        let rhs = a * integrate(&metric, &f).unwrap() + b * integrate(&metric, &g).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
    }
}

#[test]
fn index_area_bound() {
    let o = AuditOptions::default();
    // even genus: 2π(6 − l)/c, odd genus: 2π(8 − l)/c
    let rep = audit_index_bounds(2, 4, 1, Some(2.0), Some(6.0), &o).unwrap();
    assert!((rep.checks[1].rhs - 2.0 * PI).abs() < 1e-12);
    assert_eq!(rep.verdict, Verdict::Holds);
    let rep = audit_index_bounds(3, 4, 1, Some(2.0), Some(13.0), &o).unwrap();
    assert!((rep.checks[1].rhs - 4.0 * PI).abs() < 1e-12);
    assert_eq!(rep.verdict, Verdict::Violated);
    assert_eq!(audit_index_bounds(0, 1, 2, None, None, &o).unwrap().verdict, Verdict::HypothesisUnmet);
    assert!(audit_index_bounds(0, 1, 1, Some(1.0), None, &o).is_err());
}

#[test]
fn growth_bounds_unit_sphere() {
    // K = 1, so aK − c = 0 and the distance bound is π√(4/3)
    let rep = audit_growth_bounds(&sphere(&MinkowskiFlat, 1.0, 32), &GrowthParams::new(1.0, 1.0), &AuditOptions::default())
        .unwrap();
    assert!((rep.rhs() - PI * (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!((rep.lhs() - PI).abs() < 0.05 * PI);
    assert!(rep.flag_named("nonnegative_ak_minus_c").unwrap().satisfied);
    assert_eq!(rep.verdict, Verdict::Holds);
}

#[test]
fn growth_bounds_flat_disk_area_side() {
    // |B_{R/2}| = πR²/4 gives 8a²/(4a−1)·π/4 = 2π/3 against 2π·2^{2/3}
    let geom = cylinder_disk(48);
    let rep = audit_growth_bounds(&geom, &GrowthParams::new(1.0, 0.5), &AuditOptions::default()).unwrap();
    let area = &rep.checks[1];
    assert!((area.rhs - 2.0 * PI * 2f64.powf(2.0 / 3.0)).abs() < 1e-12);
    assert!((area.lhs - 2.0 * PI / 3.0).abs() < 0.1, "{}", area.lhs);
    assert!(area.holds());
    // −c < 0 is not a nonnegative Neumann potential
    assert_eq!(rep.verdict, Verdict::HypothesisUnmet);
    assert!(audit_growth_bounds(&geom, &GrowthParams::new(0.25, 1.0), &AuditOptions::default()).is_err());
}

#[test]
fn area_boundary_equality_case_residuals() {
    let rep = audit_i_sigma(&cylinder_disk(24), &MinkowskiFlat, &AuditOptions::default()).unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    assert!((rep.lhs() - 2.0 * PI).abs() < 1e-9);
    assert!(rep.margin().abs() < 1e-9);
    for d in &rep.equality_diagnostics {
        assert!(d.residual_norm < 1e-6, "{} = {}", d.quantity, d.residual_norm);
    }
}

#[test]
fn h_stability_flag_on_horizon_and_flat_spheres() {
    let o = AuditOptions::default();
    let data = SchwarzschildIsotropic::new(1.0).unwrap();
    let rep = audit_hawking_bound(&sphere(&data, 0.5, 16), &data, &o).unwrap();
    let f = rep.flag_named("h_stable_volume_preserving").unwrap();
    assert!(f.satisfied && f.evidence == 0.0);
    assert_eq!(rep.verdict, Verdict::Holds);

    let rep = audit_cy_estimate(&sphere(&MinkowskiFlat, 1.0, 24), &MinkowskiFlat, &o).unwrap();
    assert!(rep.flag_named("h_stable_volume_preserving").unwrap().satisfied);

    // marginal case: the exact mean-zero eigenvalue is zero
    let rep = audit_hawking_bound(&sphere(&HyperboloidalFlat, 0.5, 24), &HyperboloidalFlat, &o).unwrap();
    let f = rep.flag_named("h_stable_volume_preserving").unwrap();
    assert!(f.satisfied && f.evidence.abs() < 0.04, "{}", f.evidence);
    assert!((rep.lhs() - 1.0 / 16.0).abs() < 1e-9);
    assert!((rep.rhs() - 1.0 / 8.0).abs() < 1e-9);
    assert_eq!(rep.verdict, Verdict::Violated);
    assert!(rep.notes.iter().any(|n| n.contains("(1/2)")));
}
