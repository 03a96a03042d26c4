//! Growth monitor for the tiered energies:
//! `E_high(t) / (1 + t)^δ` and `E_mid(t)` against their initial values.

use super::record::DiagnosticsRecord;

pub const DELTA: f64 = 1.0 / 12.0;
pub const DEFAULT_THRESHOLD: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapReport {
    pub delta: f64,
    pub threshold: f64,
    pub high_ratio_max: f64,
    pub mid_ratio_max: f64,
    /// First sample time at which either ratio exceeded the threshold.
    pub first_violation: Option<f64>,
}

impl BootstrapReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn ratio(value: f64, initial: f64) -> f64 {
    if initial > 0.0 {
        value / initial
    } else if value == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn bootstrap_monitor(records: &[DiagnosticsRecord], threshold: f64) -> BootstrapReport {
    let mut rep = BootstrapReport {
        delta: DELTA,
        threshold,
        high_ratio_max: 0.0,
        mid_ratio_max: 0.0,
        first_violation: None,
    };
    let Some(first) = records.first() else {
        return rep;
    };
    let h0 = first.e_high / (1.0 + first.t).powf(DELTA);
    for r in records {
        let h = ratio(r.e_high / (1.0 + r.t).powf(DELTA), h0);
        let m = ratio(r.e_mid, first.e_mid);
        rep.high_ratio_max = rep.high_ratio_max.max(h);
        rep.mid_ratio_max = rep.mid_ratio_max.max(m);
        if (h > threshold || m > threshold) && rep.first_violation.is_none() {
            rep.first_violation = Some(r.t);
        }
    }
    rep
}
