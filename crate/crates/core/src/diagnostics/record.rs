//! Per-sample diagnostics computed from a quiesced state.

use crate::calculus::{d_full, project_p0, project_pgt0};
use crate::error::Result;
use crate::exec::Exec;
use crate::field::{FieldState, FormField, Jet};
use crate::gauge::gauge_persistence_monitor;
use crate::nonlinearity::{bilinear_jet, dealias_field, full_source, star_wedge, SourceOptions};
use crate::vector_fields::{gamma_l2_norm, gamma_weighted_norm, gradient_norm, visit_words, NormKind, PdeContext};

use super::null_ratio::null_ratio_monitor;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub e_high: f64,
    pub e_mid: f64,
    pub e_low: f64,
    pub sup_p0: f64,
    pub sup_pgt0: f64,
    pub gauge_residual: f64,
    pub b_norm: f64,
    pub c_norm: f64,
    pub d_norm: f64,
    pub slab_fraction: f64,
    pub null_ratio: f64,
}

impl DiagnosticsRecord {
    pub fn values(&self) -> [f64; 12] {
        [
            self.t,
            self.e_high,
            self.e_mid,
            self.e_low,
            self.sup_p0,
            self.sup_pgt0,
            self.gauge_residual,
            self.b_norm,
            self.c_norm,
            self.d_norm,
            self.slab_fraction,
            self.null_ratio,
        ]
    }

    pub fn from_values(v: &[f64; 12]) -> Self {
        DiagnosticsRecord {
            t: v[0],
            e_high: v[1],
            e_mid: v[2],
            e_low: v[3],
            sup_p0: v[4],
            sup_pgt0: v[5],
            gauge_residual: v[6],
            b_norm: v[7],
            c_norm: v[8],
            d_norm: v[9],
            slab_fraction: v[10],
            null_ratio: v[11],
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RecordSettings {
    pub m_high: usize,
    pub m_mid: usize,
    pub m_low: usize,
    pub nonlinear: bool,
    pub dealias: bool,
    pub exec: Exec,
}

impl Default for RecordSettings {
    fn default() -> Self {
        RecordSettings {
            m_high: 2,
            m_mid: 1,
            m_low: 0,
            nonlinear: true,
            dealias: true,
            exec: Exec::default(),
        }
    }
}

/// Null ratios are only meaningful away from `t = 0`.
pub const NULL_RATIO_START: f64 = 2.0;

/// Fraction of `‖F‖` outside the slab `||x| − t| ≤ 1`.
pub fn slab_fraction(f: &FormField, t: f64) -> f64 {
    let grid = f.grid().clone();
    let total = f.l2_norm();
    if total == 0.0 {
        return 0.0;
    }
    let outside = f.map_values(|_, v| {
        v.iter()
            .enumerate()
            .map(|(i, x)| if (grid.radius(i) - t).abs() > 1.0 { *x } else { 0.0 })
            .collect()
    });
    outside.l2_norm() / total
}

fn split_norm(a: &Jet, b: &Jet, order: usize, s: &RecordSettings) -> Result<f64> {
    let prod = |x: &FormField, y: &FormField| -> Result<FormField> {
        let p = star_wedge(x, y, s.exec)?;
        Ok(if s.dealias { dealias_field(&p, s.exec) } else { p })
    };
    let j = bilinear_jet(a, b, order + 1, prod)?;
    gamma_l2_norm(&j, order, s.exec)
}

pub fn record(state: &FieldState, s: &RecordSettings) -> Result<DiagnosticsRecord> {
    let exec = s.exec;
    let depth = s.m_high + 2;
    let ctx = PdeContext {
        nonlinear: s.nonlinear,
        dealias: s.dealias,
        max_depth: depth,
        exec,
    };
    let jet = ctx.jet(state, depth)?;

    let (mut e_high, mut e_mid, mut e_low) = (0.0, 0.0, 0.0);
    visit_words(&jet, s.m_high, exec, &mut |w, v| {
        let e = gradient_norm(v, NormKind::L2, exec)?;
        let o = w.order();
        e_high += e;
        if o <= s.m_mid {
            e_mid += e;
        }
        if o <= s.m_low {
            e_low += e;
        }
        Ok(())
    })?;

    let low = jet.truncated(s.m_low + 2);
    let sup_p0 = gamma_weighted_norm(&low.map(project_p0), s.m_low, NormKind::Sup, exec)?;
    let sup_pgt0 = gamma_weighted_norm(&low.map(project_pgt0), s.m_low, NormKind::Sup, exec)?;

    let gauge_residual = gauge_persistence_monitor(state, exec)?;

    let mid = jet.truncated(s.m_mid + 2);
    let a = d_full(&mid.map(project_p0), exec)?;
    let b = d_full(&mid.map(project_pgt0), exec)?;
    let b_norm = split_norm(&a, &a, s.m_mid, s)?;
    let c_norm = split_norm(&a, &b, s.m_mid, s)?;
    let d_norm = split_norm(&b, &b, s.m_mid, s)?;

    let f = full_source(
        state,
        SourceOptions {
            dealias: s.dealias,
            exec,
        },
    )?;
    let slab = slab_fraction(&f, state.time);

    let null_ratio = if state.time >= NULL_RATIO_START {
        null_ratio_monitor(&jet.truncated(2).map(project_p0), exec)?
    } else {
        0.0
    };

    Ok(DiagnosticsRecord {
        t: state.time,
        e_high,
        e_mid,
        e_low,
        sup_p0,
        sup_pgt0,
        gauge_residual,
        b_norm,
        c_norm,
        d_norm,
        slab_fraction: slab,
        null_ratio,
    })
}
