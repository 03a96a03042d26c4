//! Gauge fixing: given a potential history `A(t)`, solve
//! `b_tt = Δ_x b + Δ_K b + δA` with `b(0) = 0`, `∂_t b_{0α}(0) = 0`,
//! `∂_t b_S(0) = −A_{0S}` and return `Ã = A + db`, which satisfies
//! `δÃ = −dδb = 0` while `dÃ = dA`.
//!
//! Also hosts the compatibility condition on Cauchy data and the
//! gauge-persistence monitor used during runs.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rand::Rng;

use crate::algebra::blade::{blades, MetricSignature, TIME};
use crate::calculus::{codifferential, contract_time, d_full, laplacian_k, laplacian_x};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{FieldState, FormField, Jet, Key};
use crate::grid::{Grid, SlotKind};
use crate::nonlinearity::{full_source, SourceOptions};
use crate::sample::{power_bump, rng};
use crate::solver::integrator::{Integrator, SpectralState, Spectrum};
use crate::vector_fields::{gradient_norm, NormKind};

const SIG: MetricSignature = MetricSignature::lorentzian();
/// Spectral leakage of the test profile falls off like `(k R)^{-p}`; a
/// high power keeps the corrected potential inside its causal cone to
/// roundoff on desk-scale grids.
const PROFILE_POWER: i32 = 8;

/// `‖δu‖₂ / ‖∇u‖₂` for the state's `(u, u_t)`; zero for the zero field.
pub fn gauge_persistence_monitor(state: &FieldState, exec: Exec) -> Result<f64> {
    let j = state.jet();
    let del = codifferential(&j, &SIG, exec)?.levels.remove(0);
    let g = gradient_norm(&j, NormKind::L2, exec)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    Ok(del.l2_norm() / g)
}

/// `(δdu)⌋∂_t` at `t = 0` from the jet `(u0, u1, u2)`. `u2` stands in for
/// `∂_t²u`; the result does not depend on it.
pub fn linear_compatibility_field(
    u0: &FormField,
    u1: &FormField,
    u2: Option<&FormField>,
    exec: Exec,
) -> Result<FormField> {
    let grid = u0.grid().clone();
    let u2 = u2.cloned().unwrap_or_else(|| FormField::zero(&grid, u0.degree()));
    let j = Jet::new(0.0, vec![u0.clone(), u1.clone(), u2])?;
    let du = d_full(&j, exec)?;
    let ddu = codifferential(&du, &SIG, exec)?;
    contract_time(&ddu.levels[0])
}

/// `(δdu)⌋∂_t + *(du∧du)⌋∂_t` at `t = 0`.
pub fn compatibility_field(
    u0: &FormField,
    u1: &FormField,
    u2: Option<&FormField>,
    opts: SourceOptions,
) -> Result<FormField> {
    let mut r = linear_compatibility_field(u0, u1, u2, opts.exec)?;
    let state = FieldState {
        u: u0.clone(),
        ut: u1.clone(),
        time: 0.0,
    };
    let f = full_source(&state, opts)?;
    r.axpy(1.0, &contract_time(&f)?)?;
    Ok(r)
}

/// L² norm of [`compatibility_field`].
pub fn compatibility_residual(u0: &FormField, u1: &FormField, opts: SourceOptions) -> Result<f64> {
    Ok(compatibility_field(u0, u1, None, opts)?.l2_norm())
}

/// A 3-form potential known at every time of the gauge-fixing window.
pub trait PotentialHistory {
    fn grid(&self) -> &Arc<Grid>;
    fn start_time(&self) -> f64;
    /// Jet of `A` at absolute time `t` with `depth` levels.
    fn jet_at(&self, t: f64, depth: usize) -> Result<Jet>;
    /// Ball `(center, radius)` containing the support of `A` at the start time.
    fn support(&self) -> ([f64; 3], f64);
}

/// One term `a φ(x) cos(ωt + θ)` of an [`AnalyticPotential`].
#[derive(Clone, Copy, Debug)]
pub struct PotentialTerm {
    pub slot: usize,
    pub mask: u16,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
}

/// Static smooth bump times harmonic time dependence per component. Not a
/// solution of anything, so `δA ≠ 0` in general.
pub struct AnalyticPotential {
    grid: Arc<Grid>,
    center: [f64; 3],
    radius: f64,
    profile: Vec<f64>,
    terms: Vec<PotentialTerm>,
}

impl AnalyticPotential {
    pub fn new(grid: &Arc<Grid>, center: [f64; 3], radius: f64, terms: Vec<PotentialTerm>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Config(format!("support radius {radius} must be positive")));
        }
        for t in &terms {
            if t.mask.count_ones() != 3 || t.slot >= grid.slot_count() {
                return Err(Error::Shape(format!("bad potential term {t:?}")));
            }
        }
        let profile = (0..grid.point_count())
            .map(|i| {
                let x = grid.position(i);
                let r = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2) + (x[2] - center[2]).powi(2)).sqrt();
                power_bump(r, radius, PROFILE_POWER)
            })
            .collect();
        Ok(AnalyticPotential {
            grid: grid.clone(),
            center,
            radius,
            profile,
            terms,
        })
    }

    /// Seeded potential with `count` terms on blades over the axes
    /// `0..=4` and the internal blades, in the zero slot and (if present)
    /// the first torus mode.
    pub fn random(grid: &Arc<Grid>, seed: u64, count: usize, radius: f64) -> Result<Self> {
        let mut r = rng(seed);
        let pool: Vec<u16> = blades(3).iter().copied().filter(|m| m & !0b11111 == 0).collect();
        let mut slots = vec![grid.zero_slot];
        if let Some(s) = grid.slots.iter().position(|s| s.kind == SlotKind::Cos) {
            slots.push(s);
        }
        let terms = (0..count)
            .map(|i| PotentialTerm {
                slot: slots[i % slots.len()],
                mask: pool[r.random_range(0..pool.len())],
                amplitude: r.random_range(0.5..1.0),
                omega: r.random_range(0.5..1.5),
                phase: r.random_range(0.0..2.0 * std::f64::consts::PI),
            })
            .collect();
        AnalyticPotential::new(grid, [0.0; 3], radius, terms)
    }
}

impl PotentialHistory for AnalyticPotential {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn start_time(&self) -> f64 {
        0.0
    }

    fn jet_at(&self, t: f64, depth: usize) -> Result<Jet> {
        let levels = (0..depth)
            .map(|m| {
                let mut f = FormField::zero(&self.grid, 3);
                for term in &self.terms {
                    let c = term.amplitude
                        * term.omega.powi(m as i32)
                        * (term.omega * t + term.phase + m as f64 * FRAC_PI_2).cos();
                    f.accumulate(term.slot, term.mask, &self.profile, c);
                }
                f
            })
            .collect();
        Jet::new(t, levels)
    }

    fn support(&self) -> ([f64; 3], f64) {
        (self.center, self.radius)
    }
}

/// `A` evolved by the homogeneous equation from a stored state, exactly
/// per Fourier mode.
pub struct FreeEvolution {
    integrator: Integrator,
    start: SpectralState,
    radius: f64,
}

impl FreeEvolution {
    pub fn new(state: &FieldState, exec: Exec) -> Result<Self> {
        if state.u.degree() != 3 {
            return Err(Error::DegreeMismatch(state.u.degree(), 3));
        }
        let grid = state.grid().clone();
        let keys: BTreeSet<Key> = state.u.keys().chain(state.ut.keys()).collect();
        let integrator = Integrator::new(&grid, 3, keys.into_iter().collect(), exec);
        let start = integrator.to_spectral(state)?;
        let peak = state.u.max_abs().max(state.ut.max_abs());
        let mut radius: f64 = 0.0;
        for f in [&state.u, &state.ut] {
            for (_, v) in f.iter() {
                for (i, x) in v.iter().enumerate() {
                    if x.abs() > 1e-10 * peak {
                        radius = radius.max(grid.radius(i));
                    }
                }
            }
        }
        Ok(FreeEvolution {
            integrator,
            start,
            radius: radius + grid.dx(),
        })
    }
}

impl PotentialHistory for FreeEvolution {
    fn grid(&self) -> &Arc<Grid> {
        self.integrator.grid()
    }

    fn start_time(&self) -> f64 {
        self.start.time
    }

    fn jet_at(&self, t: f64, depth: usize) -> Result<Jet> {
        let s = self.integrator.propagate_free(&self.start, t - self.start.time);
        let grid = self.integrator.grid().clone();
        let k2 = grid.k2();
        let keys = self.integrator.keys();
        let mut spec = vec![s.u, s.ut];
        while spec.len() < depth {
            let prev = &spec[spec.len() - 2];
            let next = prev
                .iter()
                .zip(keys)
                .map(|(v, &(slot, _))| {
                    let lam2 = grid.slots[slot].lambda.powi(2);
                    v.iter().zip(k2).map(|(c, k)| -c * (k + lam2)).collect()
                })
                .collect();
            spec.push(next);
        }
        spec.truncate(depth);
        let levels = spec.iter().map(|l| self.integrator.field(l)).collect();
        Jet::new(t, levels)
    }

    fn support(&self) -> ([f64; 3], f64) {
        ([0.0; 3], self.radius)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugeReport {
    /// `‖δÃ‖ / max(‖Ã‖, ε_mach)`.
    pub residual_delta: f64,
    /// `‖dÃ − dA‖ / ‖dA‖`.
    pub residual_da: f64,
    /// Fraction of `‖Ã‖²` outside the causal dilation of the support of `A`.
    pub support_violation: f64,
    /// `‖δb‖ / max(‖∇b‖, ε_mach)` at the final time.
    pub delta_b: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct GaugeParams {
    pub t_final: f64,
    pub dt: f64,
    pub exec: Exec,
}

pub struct GaugeOutput {
    /// `(Ã, ∂_tÃ)` at the final time.
    pub corrected: FieldState,
    pub b: FieldState,
    pub report: GaugeReport,
}

/// Blades and slots `b` can occupy given the blades and slots of `A`.
fn correction_keys(grid: &Grid, a_keys: &BTreeSet<Key>) -> Vec<Key> {
    let torus: Vec<usize> = grid.active_torus_axes().collect();
    let mut out = BTreeSet::new();
    for &(s, m) in a_keys {
        let mut axes = vec![0usize, 1, 2, 3];
        if grid.slots[s].kind != SlotKind::Zero {
            axes.extend(&torus);
        }
        for a in axes {
            if m & (1 << a) != 0 {
                let bm = m & !(1 << a);
                out.insert((s, bm));
                out.insert((grid.slots[s].partner, bm));
            }
        }
    }
    out.into_iter().collect()
}

pub fn gauge_fix(history: &dyn PotentialHistory, params: GaugeParams) -> Result<GaugeOutput> {
    let exec = params.exec;
    if !(params.t_final >= 0.0) || !(params.dt > 0.0) {
        return Err(Error::Config(format!(
            "gauge fixing needs t_final >= 0 and dt > 0 (got {}, {})",
            params.t_final, params.dt
        )));
    }
    let grid = history.grid().clone();
    let t0 = history.start_time();
    let a0 = history.jet_at(t0, 2)?;
    if a0.degree() != 3 {
        return Err(Error::DegreeMismatch(a0.degree(), 3));
    }
    let a_keys: BTreeSet<Key> = a0.levels.iter().flat_map(|l| l.keys()).collect();
    let keys = correction_keys(&grid, &a_keys);
    let integ = Integrator::new(&grid, 2, keys, exec);

    let mut bt = FormField::zero(&grid, 2);
    for ((s, m), v) in a0.levels[0].iter() {
        if m & (1 << TIME) != 0 {
            bt.accumulate(s, m & !(1 << TIME), v, -1.0);
        }
    }
    let b0 = FieldState {
        u: FormField::zero(&grid, 2),
        ut: bt,
        time: t0,
    };
    let mut state = integ.to_spectral(&b0)?;
    let source_at = |t: f64| -> Result<FormField> {
        let a = history.jet_at(t, 2)?;
        Ok(codifferential(&a, &SIG, exec)?.levels.remove(0))
    };
    let steps = (params.t_final / params.dt - 1e-9).ceil().max(0.0) as usize;
    if steps > 0 {
        let h = params.t_final / steps as f64;
        let mut src = |t: f64, _: &SpectralState| -> Result<Option<Spectrum>> {
            Ok(Some(integ.source_spectrum(&source_at(t)?, false)?))
        };
        for n in 0..steps {
            state.time = t0 + n as f64 * h;
            state = integ.step(&state, h, &mut src)?;
        }
    }
    let t1 = t0 + params.t_final;
    state.time = t1;
    let b = integ.to_physical(&state);

    let e = source_at(t1)?;
    let mut btt = laplacian_x(&b.u, exec);
    btt.axpy(1.0, &laplacian_k(&b.u))?;
    btt.axpy(1.0, &e)?;
    let bjet = Jet::new(t1, vec![b.u.clone(), b.ut.clone(), btt])?;
    let db = d_full(&bjet, exec)?;
    let a1 = history.jet_at(t1, 2)?;
    let tilde = a1.add(&db)?;

    let del = codifferential(&tilde, &SIG, exec)?.levels.remove(0);
    let residual_delta = del.l2_norm() / tilde.levels[0].l2_norm().max(f64::EPSILON);
    let da = d_full(&a1, exec)?.levels.remove(0);
    let dtilde = d_full(&tilde, exec)?.levels.remove(0);
    let diff = dtilde.sub(&da)?.l2_norm();
    let residual_da = if da.l2_norm() > 0.0 { diff / da.l2_norm() } else { diff };

    let (c, r) = history.support();
    let reach = r + params.t_final;
    let outside = tilde.levels[0].map_values(|_, v| {
        v.iter()
            .enumerate()
            .map(|(i, x)| {
                let p = grid.position(i);
                let d = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt();
                if d > reach {
                    *x
                } else {
                    0.0
                }
            })
            .collect()
    });
    let total = tilde.levels[0].norm_sq();
    let support_violation = if total > 0.0 { outside.norm_sq() / total } else { 0.0 };

    let delta_b = {
        let j = bjet.truncated(2);
        let d = codifferential(&j, &SIG, exec)?.levels.remove(0).l2_norm();
        d / gradient_norm(&j, NormKind::L2, exec)?.max(f64::EPSILON)
    };

    let mut levels = tilde.levels;
    let ut = levels.pop().expect("two levels");
    let u = levels.pop().expect("two levels");
    Ok(GaugeOutput {
        corrected: FieldState { u, ut, time: t1 },
        b,
        report: GaugeReport {
            residual_delta,
            residual_da,
            support_violation,
            delta_b,
        },
    })
}
