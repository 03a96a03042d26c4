//! Self-test suites shared by the `algebra-selftest` command and the
//! acceptance harness.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::algebra::blade::{self, blades, reorder_sign, star_blade, MetricSignature, DIM};
use crate::algebra::oracle::{oracle_star_sign, oracle_wedge_sign};
use crate::algebra::point_form::{hodge_star, minkowski_pairing, volume, wedge, PointForm};
use crate::calculus::{box_componentwise, box_operator, codifferential, d_full};
use crate::error::Result;
use crate::exec::Exec;
use crate::field::{FieldState, Jet};
use crate::grid::{Grid, GridSpec};
use crate::nonlinearity::{
    full_source, null_plane_wave_test, plane_wave_pair_ratio, random_null_covector, random_point_form, split_source,
    SourceOptions,
};
use crate::sample::{random_field, random_jet, rng};
use crate::vector_fields::battery::run_battery;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    Above(f64),
}

#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    pub fn new(label: impl Into<String>, value: f64, bound: Bound) -> Self {
        Check {
            label: label.into(),
            value,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost(t) => self.value <= t,
            Bound::Above(t) => self.value > t,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn summary(&self) -> String {
        let bad = self.failures().count();
        format!(
            "{} {}: {} checks, {} failed, {:.2} s",
            if bad == 0 { "PASS" } else { "FAIL" },
            self.name,
            self.checks.len(),
            bad,
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed(name: &'static str, body: impl FnOnce() -> Result<Vec<Check>>) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = body()?;
    Ok(SuiteReport {
        name,
        checks,
        elapsed: start.elapsed(),
    })
}

/// Exact checks of the double dual, the pairing identity and the sign
/// tables against the permutation oracle.
pub fn algebra_suite(seed: u64) -> Result<SuiteReport> {
    timed("algebra", || {
        let sig = MetricSignature::lorentzian();
        let three = blades(3);
        let mut star_fail = 0usize;
        for &m in three {
            let e = PointForm::basis(m, 1.0);
            if hodge_star(&hodge_star(&e, &sig), &sig) != e.scale(-1.0) {
                star_fail += 1;
            }
        }
        let mut pair_fail = 0usize;
        let vol = volume();
        for &a in three {
            let u = PointForm::basis(a, 1.0);
            for &b in three {
                let v = PointForm::basis(b, 1.0);
                let lhs = wedge(&u, &hodge_star(&v, &sig))?;
                let g = minkowski_pairing(&u, &v, &sig)?;
                if lhs != vol.scale(g) {
                    pair_fail += 1;
                }
            }
        }
        let mut r = rng(seed);
        let mut sign_fail = 0usize;
        for _ in 0..1000 {
            let p = r.random_range(0..=DIM);
            let q = r.random_range(0..=DIM - p);
            let a = blades(p)[r.random_range(0..blades(p).len())];
            let b = blades(q)[r.random_range(0..blades(q).len())];
            if reorder_sign(a, b) != oracle_wedge_sign(a, b) {
                sign_fail += 1;
            }
            if star_blade(a, &sig).1 != oracle_star_sign(a, &sig) {
                sign_fail += 1;
            }
        }
        debug_assert_eq!(three.len(), blade::blade_count(3));
        Ok(vec![
            Check::new("double dual on 165 basis 3-forms", star_fail as f64, Bound::AtMost(0.0)),
            Check::new("u ^ *v = g(u,v) vol on basis pairs", pair_fail as f64, Bound::AtMost(0.0)),
            Check::new("1000 random wedge/star signs vs oracle", sign_fail as f64, Bound::AtMost(0.0)),
        ])
    })
}

fn rel_levels(diff: &Jet, reference: &Jet) -> f64 {
    let num: f64 = diff.levels.iter().map(|l| l.norm_sq()).sum();
    let den: f64 = reference.levels.iter().map(|l| l.norm_sq()).sum();
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// `d² = 0`, `δ² = 0` and the two routes to the wave operator on random
/// band-limited 3-form jets.
pub fn calculus_suite(cases: usize, n: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    timed("calculus", || {
        let grid = Grid::new(GridSpec::new(n, 2.0 * PI, 1, 1))?;
        let sig = MetricSignature::lorentzian();
        let mut r = rng(seed);
        let (mut dd, mut cc, mut bb) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..cases {
            let j = random_jet(&grid, 3, 3, 2, &mut r);
            let d1 = d_full(&j, exec)?;
            let d2 = d_full(&d1, exec)?;
            dd = dd.max(d2.levels[0].l2_norm() / d1.levels[0].l2_norm().max(f64::MIN_POSITIVE));
            let c1 = codifferential(&j, &sig, exec)?;
            let c2 = codifferential(&c1, &sig, exec)?;
            cc = cc.max(c2.levels[0].l2_norm() / c1.levels[0].l2_norm().max(f64::MIN_POSITIVE));
            let a = box_operator(&j, &sig, exec)?;
            let b = box_componentwise(&j, exec)?;
            bb = bb.max(rel_levels(&a.sub(&b)?, &b));
        }
        Ok(vec![
            Check::new("d^2 = 0", dd, Bound::AtMost(1e-10)),
            Check::new("delta^2 = 0", cc, Bound::AtMost(1e-10)),
            Check::new("box routes agree", bb, Bound::AtMost(1e-10)),
        ])
    })
}

/// Plane waves sharing one null covector do not interact; crossed or
/// timelike covectors do.
pub fn null_form_suite(seed: u64) -> Result<SuiteReport> {
    timed("null form", || {
        let mut r = rng(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let k = random_null_covector(&mut r);
            let a1 = random_point_form(&mut r);
            let a2 = random_point_form(&mut r);
            worst = worst.max(null_plane_wave_test(k, &a1, &a2)?);
        }
        let a1 = random_point_form(&mut r);
        let a2 = random_point_form(&mut r);
        let crossed = plane_wave_pair_ratio([1.0, 1.0, 0.0, 0.0], [1.0, 0.0, 1.0, 0.0], &a1, &a2)?;
        let timelike = plane_wave_pair_ratio([2.0, 1.0, 0.0, 0.0], [2.0, 0.0, 1.0, 0.0], &a1, &a2)?;
        Ok(vec![
            Check::new("shared null covector, 20 cases", worst, Bound::AtMost(1e-12)),
            Check::new("crossed null covectors", crossed, Bound::Above(1e-3)),
            Check::new("timelike covectors", timelike, Bound::Above(1e-3)),
        ])
    })
}

/// `B + 2C + D` reproduces the full source on random states.
pub fn splitting_suite(cases: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    timed("splitting", || {
        let grid = Grid::new(GridSpec::new(16, 2.0 * PI, 1, 1))?;
        let mut r = rng(seed);
        let opts = SourceOptions { dealias: true, exec };
        let mut worst: f64 = 0.0;
        for _ in 0..cases {
            let state = FieldState {
                u: random_field(&grid, 3, 3, &mut r),
                ut: random_field(&grid, 3, 3, &mut r),
                time: 0.0,
            };
            let full = full_source(&state, opts)?;
            let split = split_source(&state, opts)?;
            let e = split.total.sub(&full)?.l2_norm() / full.l2_norm().max(f64::MIN_POSITIVE);
            worst = worst.max(e);
        }
        Ok(vec![Check::new("|F - (B + 2C + D)| / |F|", worst, Bound::AtMost(1e-10))])
    })
}

/// Commutator identities on the polynomial battery.
pub fn commutator_suite(exec: Exec) -> Result<SuiteReport> {
    timed("commutators", || {
        let report = run_battery(2024, exec)?;
        Ok(report
            .entries
            .into_iter()
            .map(|e| Check::new(e.label, e.residual, Bound::AtMost(report.tolerance)))
            .collect())
    })
}

/// Everything `algebra-selftest` runs.
pub fn all_suites(exec: Exec) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        algebra_suite(1)?,
        null_form_suite(41)?,
        commutator_suite(exec)?,
    ])
}
