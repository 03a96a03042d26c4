use std::sync::Arc;

use formwave::error::Error;
use formwave::field::{FieldState, FormField, Jet};
use formwave::gauge::*;
use formwave::grid::{Grid, GridSpec};
use formwave::nonlinearity::SourceOptions;
use formwave::sample::{random_field, rng, smooth_bump};
use formwave::solver::config::{DataConfig, DiagnosticsConfig, TimeConfig};
use formwave::solver::{make_admissible_data, Mode, RunConfig};
use formwave::Exec;

fn params(t_final: f64, dt: f64) -> GaugeParams {
    GaugeParams {
        t_final,
        dt,
        exec: Exec::default(),
    }
}

/// `cos(t) φ(x_1) dx2∧dx3∧dx4`: divergence free, no time legs.
struct Transverse {
    grid: Arc<Grid>,
    profile: Vec<f64>,
}

impl PotentialHistory for Transverse {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn start_time(&self) -> f64 {
        0.0
    }

    fn jet_at(&self, t: f64, depth: usize) -> formwave::Result<Jet> {
        let levels = (0..depth)
            .map(|m| {
                let mut f = FormField::zero(&self.grid, 3);
                let c = (t + m as f64 * std::f64::consts::FRAC_PI_2).cos();
                f.accumulate(self.grid.zero_slot, 0b11100, &self.profile, c);
                f
            })
            .collect();
        Jet::new(t, levels)
    }

    fn support(&self) -> ([f64; 3], f64) {
        ([0.0; 3], self.grid.spec.box_length)
    }
}

#[test]
fn divergence_free_potential_needs_no_correction() {
    let grid = Grid::new(GridSpec::new(16, 8.0, 1, 1)).unwrap();
    let profile = (0..grid.point_count())
        .map(|i| smooth_bump(grid.position(i)[0].abs(), 2.0))
        .collect();
    let h = Transverse { grid, profile };
    let out = gauge_fix(&h, params(1.0, 0.05)).unwrap();
    assert!(out.b.u.max_abs() == 0.0 && out.b.ut.max_abs() == 0.0);
    let a = h.jet_at(1.0, 2).unwrap();
    assert_eq!(out.corrected.u, a.levels[0]);
    assert!(out.report.residual_delta < 1e-14);
    assert_eq!(out.report.residual_da, 0.0);
}

#[test]
fn random_potential_is_corrected() {
    let grid = Grid::new(GridSpec::new(48, 16.0, 1, 1)).unwrap();
    let pot = AnalyticPotential::random(&grid, 5, 6, 3.0).unwrap();
    let a = pot.jet_at(0.0, 2).unwrap();
    let before = formwave::calculus::codifferential(&a, &formwave::algebra::MetricSignature::lorentzian(), Exec::default())
        .unwrap()
        .levels[0]
        .l2_norm()
        / a.levels[0].l2_norm();
    assert!(before > 1e-2, "test potential should violate the gauge: {before}");
    let out = gauge_fix(&pot, params(2.0, 0.05)).unwrap();
    let r = out.report;
    assert!(r.residual_delta < 1e-6, "{r:?}");
    assert!(r.residual_da < 1e-10, "{r:?}");
    assert!(r.support_violation < 1e-10, "{r:?}");
    assert!(r.delta_b >= 0.0);
}

#[test]
fn gauge_fix_rejects_bad_parameters() {
    let grid = Grid::new(GridSpec::new(8, 8.0, 0, 0)).unwrap();
    let pot = AnalyticPotential::random(&grid, 1, 2, 1.0).unwrap();
    assert!(matches!(gauge_fix(&pot, params(1.0, 0.0)), Err(Error::Config(_))));
    assert!(matches!(gauge_fix(&pot, params(-1.0, 0.1)), Err(Error::Config(_))));
    assert!(AnalyticPotential::new(&grid, [0.0; 3], 0.0, vec![]).is_err());
}

#[test]
fn compatibility_does_not_depend_on_second_derivative() {
    let grid = Grid::new(GridSpec::new(16, 8.0, 1, 1)).unwrap();
    let mut r = rng(9);
    let u0 = random_field(&grid, 3, 3, &mut r);
    let u1 = random_field(&grid, 3, 3, &mut r);
    let u2 = random_field(&grid, 3, 3, &mut r);
    let a = linear_compatibility_field(&u0, &u1, None, Exec::default()).unwrap();
    let b = linear_compatibility_field(&u0, &u1, Some(&u2), Exec::default()).unwrap();
    assert!(a.sub(&b).unwrap().max_abs() <= 1e-12 * a.max_abs());
    assert!(a.max_abs() > 0.0);
}

fn small_config() -> RunConfig {
    RunConfig {
        grid: GridSpec::new(24, 12.0, 1, 1),
        time: TimeConfig {
            dt: 0.05,
            t_final: 1.0,
            cfl_factor: 0.5,
        },
        data: DataConfig {
            mode: Mode::FullNonlinear,
            amplitude: 1e-3,
            seed: 4,
            smoothing_length: 0.3,
            dealias: true,
        },
        diagnostics: DiagnosticsConfig::default(),
    }
}

#[test]
fn perturbed_data_is_flagged_incompatible() {
    let d = make_admissible_data(&small_config(), Exec::default()).unwrap();
    let opts = SourceOptions::default();
    let ok = compatibility_residual(&d.u0, &d.u1, opts).unwrap();
    let mut bent = d.u1.clone();
    let (k, v) = d.u0.iter().next().map(|(k, v)| (k, v.to_vec())).unwrap();
    bent.accumulate(k.0, k.1, &v, 0.1);
    let bad = compatibility_residual(&d.u0, &bent, opts).unwrap();
    assert!(bad > 1e6 * ok.max(1e-30), "ok {ok:e} bad {bad:e}");
}

#[test]
fn persistence_monitor_is_zero_for_admissible_data() {
    let d = make_admissible_data(&small_config(), Exec::default()).unwrap();
    let m = gauge_persistence_monitor(&d.state(), Exec::default()).unwrap();
    assert!(m < 1e-12, "monitor {m:e}");
    let grid = d.u0.grid().clone();
    let z = FieldState::zero(&grid, 3);
    assert_eq!(gauge_persistence_monitor(&z, Exec::default()).unwrap(), 0.0);
}
