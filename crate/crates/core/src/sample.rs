//! Seeded test fields: random band-limited forms and smooth localized
//! profiles. Used by the self-test command and the test suites.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::blade::blades;
use crate::field::{FormField, Jet};
use crate::grid::Grid;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sum of `terms` random plane waves with integer wavenumbers `|m| ≤ kmax`.
pub fn band_limited_scalar(grid: &Grid, rng: &mut impl Rng, terms: usize, kmax: i64) -> Vec<f64> {
    let l = grid.spec.box_length;
    let waves: Vec<([f64; 3], f64, f64)> = (0..terms)
        .map(|_| {
            let k = [0, 1, 2].map(|_| 2.0 * PI * rng.random_range(-kmax..=kmax) as f64 / l);
            (k, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    (0..grid.point_count())
        .map(|i| {
            let x = grid.position(i);
            waves
                .iter()
                .map(|(k, a, ph)| a * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).cos())
                .sum()
        })
        .collect()
}

/// Random band-limited form of the given degree on `ncomp` random blades
/// in every slot.
pub fn random_field(grid: &Arc<Grid>, degree: usize, ncomp: usize, rng: &mut impl Rng) -> FormField {
    let all = blades(degree);
    let mut f = FormField::zero(grid, degree);
    for s in 0..grid.slot_count() {
        for _ in 0..ncomp {
            let m = all[rng.random_range(0..all.len())];
            let v = band_limited_scalar(grid, rng, 3, (grid.n() as i64 / 4).max(1));
            f.accumulate(s, m, &v, 1.0);
        }
    }
    f
}

/// Jet with independent random levels on a shared set of blades.
pub fn random_jet(grid: &Arc<Grid>, degree: usize, depth: usize, ncomp: usize, rng: &mut impl Rng) -> Jet {
    let all = blades(degree);
    let masks: Vec<u16> = (0..ncomp).map(|_| all[rng.random_range(0..all.len())]).collect();
    let kmax = (grid.n() as i64 / 4).max(1);
    let levels = (0..depth)
        .map(|_| {
            let mut f = FormField::zero(grid, degree);
            for s in 0..grid.slot_count() {
                for &m in &masks {
                    let v = band_limited_scalar(grid, rng, 3, kmax);
                    f.accumulate(s, m, &v, 1.0);
                }
            }
            f
        })
        .collect();
    Jet { time: 0.0, levels }
}

/// Compact polynomial bump `(1 − r²/R²)^4` for `r < R`.
pub fn poly_bump(r: f64, radius: f64) -> f64 {
    power_bump(r, radius, 4)
}

/// `(1 − r²/R²)^p` inside the ball, zero outside.
pub fn power_bump(r: f64, radius: f64, p: i32) -> f64 {
    let s = 1.0 - (r / radius).powi(2);
    if s > 0.0 {
        s.powi(p)
    } else {
        0.0
    }
}

/// Smooth compactly supported bump `exp(1 − 1/(1 − r²/R²))`.
pub fn smooth_bump(r: f64, radius: f64) -> f64 {
    let s = 1.0 - (r / radius).powi(2);
    if s > 0.0 {
        (1.0 - 1.0 / s).exp()
    } else {
        0.0
    }
}
