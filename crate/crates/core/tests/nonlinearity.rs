use std::f64::consts::PI;

use formwave::algebra::blade::blades;
use formwave::calculus::project_p0;
use formwave::error::Error;
use formwave::field::{FieldState, FormField, Jet};
use formwave::grid::{Grid, GridSpec};
use formwave::nonlinearity::*;
use formwave::sample::{random_field, rng};
use formwave::Exec;

fn rel(a: &FormField, b: &FormField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm().max(1e-300)
}

fn state(seed: u64, zero_only: bool) -> FieldState {
    let g = Grid::new(GridSpec::new(16, 2.0 * PI, 1, 1)).unwrap();
    let mut r = rng(seed);
    let mut u = random_field(&g, 3, 4, &mut r);
    let mut ut = random_field(&g, 3, 4, &mut r);
    if zero_only {
        u = project_p0(&u);
        ut = project_p0(&ut);
    }
    FieldState { u, ut, time: 0.0 }
}

#[test]
fn split_recombines_to_full_source() {
    for seed in [11, 12] {
        let s = state(seed, false);
        let opts = SourceOptions::default();
        let full = full_source(&s, opts).unwrap();
        let split = split_source(&s, opts).unwrap();
        let e = rel(&split.total, &full);
        assert!(e < 1e-12, "B + 2C + D differs from F: {e}");
        assert!(split.d_part.l2_norm() > 0.0 && split.c_part.l2_norm() > 0.0);
    }
}

#[test]
fn pair_table_matches_direct_product() {
    let g = Grid::new(GridSpec::new(8, 2.0 * PI, 1, 1)).unwrap();
    let mut r = rng(3);
    let w = random_field(&g, 4, 5, &mut r);
    let a = star_square(&w, Exec::default()).unwrap();
    let b = star_wedge(&w, &w, Exec::default()).unwrap();
    assert!(rel(&a, &b) < 1e-13);
    let table = PairTable::for_three_forms();
    assert!(!table.is_empty());
    assert_eq!(table.degree, 4);
}

#[test]
fn source_is_quadratic() {
    let s = state(21, false);
    let opts = SourceOptions::default();
    let f1 = full_source(&s, opts).unwrap();
    let scaled = FieldState {
        u: s.u.scaled(3.0),
        ut: s.ut.scaled(3.0),
        time: 0.0,
    };
    let f3 = full_source(&scaled, opts).unwrap();
    assert!(rel(&f3, &f1.scaled(9.0)) < 1e-12);
}

#[test]
fn null_form_route_matches_wedge_route() {
    let s = state(31, true);
    let opts = SourceOptions {
        dealias: false,
        exec: Exec::default(),
    };
    let split = split_source(&s, opts).unwrap();
    let b = b_via_null_forms(&s.jet(), Exec::default()).unwrap();
    let e = rel(&b, &split.b_part);
    assert!(e < 1e-12, "null-form route differs: {e}");
    assert!(split.c_part.is_empty() || split.c_part.max_abs() == 0.0);
}

#[test]
fn q_form_of_time_and_coordinate() {
    let g = Grid::new(GridSpec::new(8, 2.0 * PI, 0, 0)).unwrap();
    let np = g.point_count();
    let scalar = |v: Vec<f64>| {
        let mut f = FormField::zero(&g, 0);
        f.insert(g.zero_slot, 0, v);
        f
    };
    // f = t near t = 0, g = sin x1
    let f = Jet::new(0.0, vec![scalar(vec![0.0; np]), scalar(vec![1.0; np])]).unwrap();
    let x = g.coordinate(1);
    let gg = Jet::new(
        0.0,
        vec![scalar(x.iter().map(|v| v.sin()).collect()), scalar(vec![0.0; np])],
    )
    .unwrap();
    let q = q_form(&f, &gg, 0, 1, Exec::default()).unwrap();
    let v = q.get(g.zero_slot, 0).unwrap();
    for (a, xi) in v.iter().zip(&x) {
        assert!((a - xi.cos()).abs() < 1e-12);
    }
    let self_q = q_form(&gg, &gg, 0, 1, Exec::default()).unwrap();
    assert!(self_q.max_abs() < 1e-15);
    assert!(matches!(q_form(&f, &gg, 0, 4, Exec::default()), Err(Error::InvalidAxis(4))));
}

#[test]
fn null_plane_waves_are_annihilated() {
    let mut r = rng(41);
    for _ in 0..20 {
        let k = random_null_covector(&mut r);
        let a1 = random_point_form(&mut r);
        let a2 = random_point_form(&mut r);
        let ratio = null_plane_wave_test(k, &a1, &a2).unwrap();
        assert!(ratio <= 1e-12, "null pair ratio {ratio} for {k:?}");
    }
}

#[test]
fn non_null_controls_are_detected() {
    let mut r = rng(42);
    let a1 = random_point_form(&mut r);
    let a2 = random_point_form(&mut r);
    let timelike = [2.0, 1.0, 0.0, 0.0];
    assert!(matches!(null_plane_wave_test(timelike, &a1, &a2), Err(Error::NotNull(_))));
    // a single covector k gives du = k ∧ (…) for both waves, so only
    // distinct covectors can couple
    let ratio = plane_wave_pair_ratio(timelike, [2.0, 0.0, 1.0, 0.0], &a1, &a2).unwrap();
    assert!(ratio > 1e-3, "timelike control ratio {ratio}");
    let ratio = plane_wave_pair_ratio([1.0, 1.0, 0.0, 0.0], [1.0, 0.0, 1.0, 0.0], &a1, &a2).unwrap();
    assert!(ratio > 1e-3, "crossed null directions ratio {ratio}");
}

#[test]
fn q_expansion_covers_every_blade_pair() {
    let from = |ix: [usize; 3]| ix.iter().fold(0u16, |m, &i| m | 1 << i);
    let masks = vec![from([1, 2, 4]), from([5, 6, 7]), from([8, 9, 10]), from([3, 5, 8])];
    assert!(masks.iter().all(|m| blades(3).contains(m)));
    let terms = q_expansion(&masks);
    assert!(!terms.is_empty());
    assert!(terms.iter().all(|t| t.coef.abs() == 1.0 && t.p < t.q && t.q < 4));
    assert!(terms.iter().all(|t| t.out.count_ones() == 3));
}

#[test]
fn positive_spectrum_detection() {
    let s = state(51, false);
    assert!(!is_positive_spectrum(&s.u));
    let g = s.u.grid().clone();
    let pos = s.u.filter_slots(|k| k != g.zero_slot);
    assert!(is_positive_spectrum(&pos));
}
