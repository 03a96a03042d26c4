use formwave::error::Error;
use formwave::field::{FieldState, FormField};
use formwave::grid::{Grid, GridSpec};
use formwave::vector_fields::battery::{battery_field, boost_decomposition_residual, run_battery};
use formwave::vector_fields::*;
use formwave::Exec;

#[test]
fn commutator_battery_passes() {
    let report = run_battery(2024, Exec::default()).unwrap();
    for e in &report.entries {
        assert!(e.residual <= report.tolerance, "{} residual {}", e.label, e.residual);
    }
    assert!(report.passed());
    // the competing sign patterns disagree with the computed commutators
    let off = report.sign_variants.iter().filter(|e| e.residual > 1e-3).count();
    assert!(off > 0);
}

#[test]
fn word_counts() {
    assert_eq!(enumerate_words(0).len(), 1);
    assert_eq!(enumerate_words(1).len(), 12);
    assert_eq!(enumerate_words(2).len(), 1 + 11 + 121);
    let w = &enumerate_words(2)[20];
    assert_eq!(w.order(), 2);
}

#[test]
fn rotation_kills_radial_functions() {
    let g = Grid::new(GridSpec::new(64, 16.0, 0, 0)).unwrap();
    let mut f = FormField::zero(&g, 0);
    f.insert(g.zero_slot, 0, (0..g.point_count()).map(|i| (-g.radius(i).powi(2)).exp()).collect());
    let s = FieldState {
        u: f.clone(),
        ut: f.clone(),
        time: 0.0,
    };
    let j = PdeContext::linear(3).jet(&s, 2).unwrap();
    let r = apply_generator(&j, Generator::Rotation(1, 2), Exec::default()).unwrap();
    assert!(r.levels[0].max_abs() < 1e-12);
    let b = apply_generator(&j, Generator::Boost(1), Exec::default()).unwrap();
    assert!(b.levels[0].max_abs() > 1e-3);
}

#[test]
fn boost_decomposition_holds() {
    let j = battery_field(5, 0.7, 3).unwrap();
    let r = boost_decomposition_residual(&j, Exec::default()).unwrap();
    assert!(r < 1e-10, "residual {r}");
}

#[test]
fn jet_depth_is_bounded() {
    let g = Grid::new(GridSpec::new(8, 6.0, 0, 0)).unwrap();
    let s = FieldState::zero(&g, 3);
    let ctx = PdeContext::nonlinear(4);
    assert!(ctx.jet(&s, 4).is_ok());
    assert!(matches!(
        ctx.jet(&s, 5),
        Err(Error::RecursionLimit { requested: 5, limit: 4 })
    ));
}

#[test]
fn gradient_norms_of_zero_field() {
    let g = Grid::new(GridSpec::new(8, 6.0, 1, 1)).unwrap();
    let s = FieldState::zero(&g, 3);
    let j = PdeContext::linear(4).jet(&s, 4).unwrap();
    assert_eq!(gamma_weighted_norm(&j, 1, NormKind::L2, Exec::default()).unwrap(), 0.0);
    assert_eq!(gamma_weighted_norm(&j, 1, NormKind::Sup, Exec::default()).unwrap(), 0.0);
}
