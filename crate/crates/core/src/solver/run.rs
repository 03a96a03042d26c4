//! Driver: admissible data, time stepping, sampled diagnostics, snapshots.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::diagnostics::{record, CsvWriter, DiagnosticsRecord, RecordSettings};
use crate::error::Result;
use crate::exec::Exec;
use crate::field::{FieldState, Key};
use crate::grid::Grid;

use super::config::RunConfig;
use super::data::{make_admissible_data, InitialData};
use super::integrator::{closure_keys, Integrator, SpectralState, Spectrum};
use super::snapshot::save_snapshot;

pub const CSV_NAME: &str = "diagnostics.csv";

pub struct RunOutput {
    pub data: InitialData,
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: FieldState,
    pub snapshots: Vec<PathBuf>,
    pub steps: usize,
}

pub fn record_settings(cfg: &RunConfig, exec: Exec) -> RecordSettings {
    RecordSettings {
        m_high: cfg.diagnostics.m_high,
        m_mid: cfg.diagnostics.m_mid,
        m_low: cfg.diagnostics.m_low,
        nonlinear: cfg.data.mode.nonlinear(),
        dealias: cfg.data.dealias,
        exec,
    }
}

fn state_keys(state: &FieldState) -> BTreeSet<Key> {
    state.u.keys().chain(state.ut.keys()).collect()
}

fn integrator_for(state: &FieldState, nonlinear: bool, exec: Exec) -> Integrator {
    let grid = state.grid().clone();
    let keys = closure_keys(&grid, &state_keys(state), nonlinear);
    Integrator::new(&grid, state.u.degree(), keys, exec)
}

/// Homogeneous runs are propagated exactly per mode; the source is stepped
/// with RK4.
fn advance(integ: &Integrator, s: &SpectralState, dt: f64, nonlinear: bool) -> Result<SpectralState> {
    if !nonlinear {
        return Ok(integ.propagate_free(s, dt));
    }
    let mut src = |_: f64, st: &SpectralState| -> Result<Option<Spectrum>> {
        if nonlinear {
            Ok(Some(integ.nonlinear_source(st)?))
        } else {
            Ok(None)
        }
    };
    integ.step(s, dt, &mut src)
}

/// One step of size `cfg.time.dt` from a physical state.
pub fn step(state: &FieldState, cfg: &RunConfig) -> Result<FieldState> {
    let exec = Exec::default();
    let nonlinear = cfg.data.mode.nonlinear();
    let integ = integrator_for(state, nonlinear, exec);
    let s = integ.to_spectral(state)?;
    Ok(integ.to_physical(&advance(&integ, &s, cfg.time.dt, nonlinear)?))
}

/// Header comments for the diagnostics CSV.
pub fn csv_comments(cfg: &RunConfig, data: &InitialData) -> Vec<String> {
    let d = &cfg.diagnostics;
    vec![
        format!(
            "tiers: E_high sums words of order <= {}, E_mid <= {}, E_low <= {}; sup norms use order <= {}",
            d.m_high, d.m_mid, d.m_low, d.m_low
        ),
        format!(
            "mode {:?}, amplitude {:e}, seed {}, n_x {}, box {}, dt {}",
            cfg.data.mode, cfg.data.amplitude, cfg.data.seed, cfg.grid.n_x, cfg.grid.box_length, cfg.time.dt
        ),
        format!(
            "initial data: delta residual {:e}, compatibility residual {:e}, support leak {:e}",
            data.delta_residual, data.compat_residual, data.support_leak
        ),
    ]
}

/// Run a configuration. With `out_dir`, the CSV and snapshots are written
/// there as the run proceeds; `on_record` sees every sample.
pub fn run(
    cfg: &RunConfig,
    out_dir: Option<&Path>,
    exec: Exec,
    on_record: &mut dyn FnMut(&DiagnosticsRecord),
) -> Result<RunOutput> {
    cfg.validate()?;
    let data = make_admissible_data(cfg, exec)?;
    let nonlinear = cfg.data.mode.nonlinear();
    let settings = record_settings(cfg, exec);
    let state0 = data.state();
    let integ = integrator_for(&state0, nonlinear, exec);
    let mut s = integ.to_spectral(&state0)?;

    let mut csv = match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| crate::Error::io(dir, e))?;
            Some(CsvWriter::create(&dir.join(CSV_NAME), &csv_comments(cfg, &data))?)
        }
        None => None,
    };

    let t_final = cfg.time.t_final;
    let interval = cfg.diagnostics.sample_interval;
    let per_sample = ((interval / cfg.time.dt) - 1e-9).ceil().max(1.0) as usize;
    let h = interval / per_sample as f64;
    let total = ((t_final / h) - 1e-9).ceil().max(0.0) as usize;
    let time_of = |k: usize| (k as f64 * h).min(t_final);

    let mut pending: Vec<f64> = cfg.diagnostics.snapshot_times.clone();
    pending.sort_by(|a, b| a.total_cmp(b));
    let mut snapshots = Vec::new();
    let mut records = Vec::new();
    let mut physical = state0;

    for k in 0..=total {
        if k > 0 {
            s.time = time_of(k - 1);
            let dt = time_of(k) - time_of(k - 1);
            s = advance(&integ, &s, dt, nonlinear)?;
            s.time = time_of(k);
        }
        let t = time_of(k);
        let sample = k % per_sample == 0 || k == total;
        let snap = out_dir.is_some() && pending.first().is_some_and(|ts| *ts <= t + 1e-9 * h);
        if k > 0 && (sample || snap || k == total) {
            physical = integ.to_physical(&s);
        }
        if sample {
            let r = record(&physical, &settings)?;
            if let Some(w) = csv.as_mut() {
                w.append(&r)?;
            }
            on_record(&r);
            records.push(r);
        }
        if let Some(dir) = out_dir {
            while pending.first().is_some_and(|ts| *ts <= t + 1e-9 * h) {
                pending.remove(0);
                let p = dir.join(format!("snapshot_{k:06}.fwav"));
                save_snapshot(&physical, &p)?;
                snapshots.push(p);
            }
        }
    }
    if let (Some(dir), true) = (out_dir, cfg.diagnostics.final_snapshot) {
        let p = dir.join("final.fwav");
        save_snapshot(&physical, &p)?;
        snapshots.push(p);
    }
    Ok(RunOutput {
        data,
        records,
        final_state: physical,
        snapshots,
        steps: total,
    })
}

/// Grid described by a configuration.
pub fn grid_of(cfg: &RunConfig) -> Result<std::sync::Arc<Grid>> {
    Grid::new(cfg.grid.clone())
}
