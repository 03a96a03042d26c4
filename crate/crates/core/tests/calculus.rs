use std::f64::consts::PI;

use formwave::algebra::blade::{self, MetricSignature};
use formwave::calculus::*;
use formwave::field::{FormField, Jet};
use formwave::grid::{Grid, GridSpec, SlotKind};
use formwave::sample::{random_field, random_jet, rng};
use formwave::Exec;

const SIG: MetricSignature = MetricSignature::lorentzian();

fn rel(diff: &Jet, reference: &Jet) -> f64 {
    let num: f64 = diff.levels.iter().map(|l| l.norm_sq()).sum();
    let den: f64 = reference.levels.iter().map(|l| l.norm_sq()).sum();
    (num / den.max(1e-300)).sqrt()
}

fn grid(n: usize) -> std::sync::Arc<Grid> {
    Grid::new(GridSpec::new(n, 2.0 * PI, 1, 1)).unwrap()
}

#[test]
fn d_squared_vanishes() {
    let g = grid(16);
    let mut r = rng(1);
    for _ in 0..3 {
        let j = random_jet(&g, 3, 3, 4, &mut r);
        let d1 = d_full(&j, Exec::default()).unwrap();
        let d2 = d_full(&d1, Exec::default()).unwrap();
        assert!(d2.levels[0].max_abs() < 1e-12 * d1.levels[0].max_abs().max(1.0));
        let dpp = d_perp(&d_perp(&j).unwrap()).unwrap();
        assert!(dpp.levels[0].max_abs() == 0.0);
        let dpar = d_parallel(&d_parallel(&j, Exec::default()).unwrap(), Exec::default()).unwrap();
        assert!(dpar.levels[0].max_abs() < 1e-12 * d1.levels[0].max_abs());
    }
}

#[test]
fn codifferential_routes_agree() {
    let g = grid(16);
    let mut r = rng(2);
    for _ in 0..3 {
        let j = random_jet(&g, 3, 2, 6, &mut r);
        let a = codifferential(&j, &SIG, Exec::default()).unwrap();
        let b = codifferential_coordinate(&j, Exec::default()).unwrap();
        let e = rel(&a.sub(&b).unwrap(), &a);
        assert!(e < 1e-12, "routes differ: {e}");
    }
}

#[test]
fn delta_squared_vanishes() {
    let g = grid(16);
    let mut r = rng(3);
    let j = random_jet(&g, 3, 3, 6, &mut r);
    let d1 = codifferential(&j, &SIG, Exec::default()).unwrap();
    let d2 = codifferential(&d1, &SIG, Exec::default()).unwrap();
    assert!(d2.levels[0].max_abs() < 1e-12 * d1.levels[0].max_abs());
}

#[test]
fn box_routes_agree() {
    let g = grid(16);
    let mut r = rng(4);
    let j = random_jet(&g, 3, 3, 6, &mut r);
    let a = box_operator(&j, &SIG, Exec::default()).unwrap();
    let b = box_componentwise(&j, Exec::default()).unwrap();
    let e = rel(&a.sub(&b).unwrap(), &b);
    assert!(e < 1e-10, "box routes differ: {e}");
}

#[test]
fn torus_derivative_of_single_mode() {
    // d_perp(sin(2π y_1) dx1∧dx2∧dx3) = 2π cos(2π y_1) dx4∧dx1∧dx2∧dx3
    let g = Grid::new(GridSpec::new(4, 1.0, 1, 1)).unwrap();
    let sin = g.slots.iter().position(|s| s.kind == SlotKind::Sin).unwrap();
    let cos = g.slots[sin].partner;
    let mut f = FormField::zero(&g, 3);
    f.insert(sin, 0b1110, vec![1.0; g.point_count()]);
    let j = Jet::new(0.0, vec![f]).unwrap();
    let out = d_perp(&j).unwrap();
    let m = 0b11110;
    let sign = blade::reorder_sign(1 << 4, 0b1110) as f64;
    assert_eq!(sign, -1.0);
    let v = out.levels[0].get(cos, m).unwrap();
    assert!(v.iter().all(|x| (x - sign * 2.0 * PI).abs() < 1e-12));
    assert_eq!(out.levels[0].len(), 1);
}

#[test]
fn projections_and_roots() {
    let g = grid(8);
    let mut r = rng(5);
    let f = random_field(&g, 3, 3, &mut r);
    let p0 = project_p0(&f);
    assert_eq!(project_p0(&p0), p0);
    assert_eq!(p0.add(&project_pgt0(&f)).unwrap(), f);
    assert_eq!(laplacian_k(&p0).max_abs(), 0.0);
    let twice = sqrt_neg_laplacian_k(&sqrt_neg_laplacian_k(&f));
    let lap = laplacian_k(&f).scaled(-1.0);
    assert!(twice.sub(&lap).unwrap().max_abs() <= 1e-12 * lap.max_abs());
    assert!((spectral_norm_sq(&f) / f.norm_sq() - 1.0).abs() < 1e-12);
}
