//! Admissible Cauchy data: localized `u0`, time components of `u1` fixed
//! by `δu = 0`, spatial components of `u1` corrected until the
//! compatibility condition holds.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::blade::{blades, TIME, TORUS0};
use crate::calculus::{codifferential_coordinate, d_full, inverse_neg_laplacian};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{FieldState, FormField, Jet};
use crate::gauge::{compatibility_field, gauge_persistence_monitor, linear_compatibility_field};
use crate::grid::Grid;
use crate::nonlinearity::SourceOptions;
use crate::sample::{poly_bump, rng};

use super::config::{Mode, RunConfig};

const MAX_REFINEMENTS: usize = 20;

#[derive(Clone, Debug)]
pub struct InitialData {
    pub u0: FormField,
    pub u1: FormField,
    /// Compatibility residual after refinement.
    pub compat_residual: f64,
    /// `‖δu(0)‖ / ‖∇u(0)‖`.
    pub delta_residual: f64,
    /// Residual before each refinement pass; the first entry is the
    /// unrefined residual.
    pub history: Vec<f64>,
    /// Fraction of `‖u0‖` outside the unit ball after smoothing.
    pub support_leak: f64,
}

impl InitialData {
    pub fn state(&self) -> FieldState {
        FieldState {
            u: self.u0.clone(),
            ut: self.u1.clone(),
            time: 0.0,
        }
    }
}

/// Spatial blades seeded in `u0`: those over `x1..x3` and the active torus
/// axes, plus the two internal blades `567` and `8 9 10` when at most one
/// torus axis is active.
pub fn seed_blades(d_active: usize) -> Vec<u16> {
    let live: u16 = 0b1110 | (((1u16 << d_active) - 1) << TORUS0);
    let mut out: Vec<u16> = blades(3).iter().copied().filter(|m| m & !live == 0).collect();
    if d_active <= 1 {
        out.push(0b111 << 5);
        out.push(0b111 << 8);
    }
    out
}

/// Slots seeded for a run mode.
pub fn seed_slots(grid: &Grid, mode: Mode) -> Result<Vec<usize>> {
    let mut first = [0i32; 7];
    first[0] = 1;
    let kg = || {
        grid.cos_slot(&first)
            .ok_or_else(|| Error::Config("mode needs the first torus mode".into()))
    };
    Ok(match mode {
        Mode::LinearWave => vec![grid.zero_slot],
        Mode::LinearKg => vec![kg()?],
        Mode::FullNonlinear => vec![grid.zero_slot, kg()?],
    })
}

/// Compact bump of radius `radius` around `center`, Gaussian-filtered with
/// width `ell` and optionally dealiased.
pub fn smoothed_bump(grid: &Arc<Grid>, center: [f64; 3], radius: f64, ell: f64, dealias: bool) -> Vec<f64> {
    let raw: Vec<f64> = (0..grid.point_count())
        .map(|i| {
            let x = grid.position(i);
            let r = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2) + (x[2] - center[2]).powi(2)).sqrt();
            poly_bump(r, radius)
        })
        .collect();
    let mut spec = grid.forward(&raw);
    for (c, k2) in spec.iter_mut().zip(grid.k2()) {
        *c *= (-0.5 * k2 * ell * ell).exp();
    }
    if dealias {
        grid.apply_dealias(&mut spec);
    }
    grid.inverse(&spec)
}

/// Time components `u1_{0S} = Σ_γ ∂_γ u0_{γS}`, which make `δu(0) = 0`.
pub fn constrained_time_components(u0: &FormField, exec: Exec) -> Result<FormField> {
    let grid = u0.grid().clone();
    let j = Jet::new(0.0, vec![u0.clone(), FormField::zero(&grid, u0.degree())])?;
    let div = codifferential_coordinate(&j, exec)?.levels.remove(0);
    let mut out = FormField::zero(&grid, u0.degree());
    for ((s, m), v) in div.iter() {
        out.accumulate(s, m | (1 << TIME), v, 1.0);
    }
    Ok(out)
}

/// `−d_s (−Δ)^{-1} R`: spatial 3-form whose divergence is `R`.
fn spatial_correction(r: &FormField, exec: Exec) -> Result<FormField> {
    let grid = r.grid().clone();
    let psi = inverse_neg_laplacian(r, exec);
    let j = Jet::new(0.0, vec![psi, FormField::zero(&grid, r.degree())])?;
    Ok(d_full(&j, exec)?.levels.remove(0).scaled(-1.0))
}

pub fn make_admissible_data(cfg: &RunConfig, exec: Exec) -> Result<InitialData> {
    cfg.validate()?;
    let grid = Grid::new(cfg.grid.clone())?;
    let d = &cfg.data;
    let mut r = rng(d.seed);
    let mut u0 = FormField::zero(&grid, 3);
    if d.amplitude > 0.0 {
        for s in seed_slots(&grid, d.mode)? {
            for m in seed_blades(cfg.grid.d_active) {
                let off = 0.25 * r.random_range(0.0..1.0f64);
                let dir: [f64; 3] = [0, 1, 2].map(|_| r.random_range(-1.0..1.0));
                let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                let c = dir.map(|x| off * x / norm);
                let a = d.amplitude * r.random_range(-1.0..1.0);
                let prof = smoothed_bump(&grid, c, 1.0 - off, d.smoothing_length, d.dealias);
                u0.accumulate(s, m, &prof, a);
            }
        }
    }
    let leak = {
        let outside = u0.map_values(|_, v| {
            v.iter()
                .enumerate()
                .map(|(i, x)| if grid.radius(i) > 1.0 { *x } else { 0.0 })
                .collect()
        });
        let total = u0.l2_norm();
        if total > 0.0 {
            outside.l2_norm() / total
        } else {
            0.0
        }
    };
    let mut u1 = constrained_time_components(&u0, exec)?;
    let opts = SourceOptions {
        dealias: d.dealias,
        exec,
    };
    let source_on = d.mode.nonlinear();
    let target = 1e-8 * d.amplitude * d.amplitude;
    let mut history = Vec::new();
    let mut residual = 0.0;
    for pass in 0..=MAX_REFINEMENTS {
        let rf = if source_on {
            compatibility_field(&u0, &u1, None, opts)?
        } else {
            linear_compatibility_field(&u0, &u1, None, exec)?
        };
        residual = rf.l2_norm();
        if residual <= target || residual == 0.0 {
            break;
        }
        history.push(residual);
        if pass == MAX_REFINEMENTS {
            return Err(Error::Refinement { history });
        }
        u1.axpy(1.0, &spatial_correction(&rf, exec)?)?;
    }
    if history.is_empty() {
        history.push(residual);
    }
    let state = FieldState {
        u: u0.clone(),
        ut: u1.clone(),
        time: 0.0,
    };
    let delta_residual = gauge_persistence_monitor(&state, exec)?;
    Ok(InitialData {
        u0,
        u1,
        compat_residual: residual,
        delta_residual,
        history,
        support_leak: leak,
    })
}
