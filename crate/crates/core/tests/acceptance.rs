//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use formwave::diagnostics::{bootstrap_monitor, fit_decay, DiagnosticsRecord};
use formwave::gauge::{gauge_fix, AnalyticPotential, GaugeParams};
use formwave::grid::{Grid, GridSpec};
use formwave::selftest::{
    algebra_suite, calculus_suite, commutator_suite, null_form_suite, splitting_suite, SuiteReport,
};
use formwave::solver::config::{DataConfig, DiagnosticsConfig, TimeConfig};
use formwave::solver::{run, Mode, RunConfig};
use formwave::Exec;

struct Outcome {
    passed: bool,
    detail: String,
}

fn suite(report: formwave::Result<SuiteReport>, limit: Option<Duration>) -> Outcome {
    match report {
        Ok(r) => {
            let fast = limit.is_none_or(|l| r.elapsed <= l);
            let worst = r
                .failures()
                .next()
                .map(|c| format!(", first failure {} = {:e}", c.label, c.value))
                .unwrap_or_default();
            Outcome {
                passed: r.passed() && fast,
                detail: format!("{} checks in {:.2} s{worst}", r.checks.len(), r.elapsed.as_secs_f64()),
            }
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn failed(e: formwave::Error) -> Outcome {
    Outcome {
        passed: false,
        detail: format!("error: {e}"),
    }
}

fn gauge_criterion() -> formwave::Result<Outcome> {
    let grid = Grid::new(GridSpec::new(64, 16.0, 1, 1))?;
    let pot = AnalyticPotential::random(&grid, 5, 6, 3.0)?;
    let fix = |dt| {
        gauge_fix(
            &pot,
            GaugeParams {
                t_final: 4.0,
                dt,
                exec: Exec::default(),
            },
        )
    };
    let coarse = fix(0.1)?.report;
    let fine = fix(0.05)?.report;
    let gain = coarse.residual_delta / fine.residual_delta;
    Ok(Outcome {
        passed: fine.residual_delta <= 1e-6 && fine.residual_da <= 1e-10 && gain >= 8.0,
        detail: format!(
            "residual_delta {:.2e} -> {:.2e} (gain {gain:.1}), dA drift {:.2e}",
            coarse.residual_delta, fine.residual_delta, fine.residual_da
        ),
    })
}

fn config(n: usize, box_length: f64, mode: Mode, smoothing: f64, seed: u64, t_final: f64, tiers: [usize; 3]) -> RunConfig {
    RunConfig {
        grid: GridSpec {
            torus_period: 2.0 * PI,
            ..GridSpec::new(n, box_length, 1, 1)
        },
        time: TimeConfig {
            dt: 0.25,
            t_final,
            cfl_factor: 0.5,
        },
        data: DataConfig {
            mode,
            amplitude: 1e-3,
            seed,
            smoothing_length: smoothing,
            dealias: mode.nonlinear(),
        },
        diagnostics: DiagnosticsConfig {
            sample_interval: 1.0,
            m_high: tiers[0],
            m_mid: tiers[1],
            m_low: tiers[2],
            snapshot_times: vec![],
            final_snapshot: false,
        },
    }
}

fn column(records: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> f64) -> (Vec<f64>, Vec<f64>) {
    (records.iter().map(|r| r.t).collect(), records.iter().map(f).collect())
}

fn linear_decay() -> formwave::Result<Outcome> {
    let start = Instant::now();
    let wave = run(&config(96, 96.0, Mode::LinearWave, 1.5, 11, 40.0, [0, 0, 0]), None, Exec::default(), &mut |_| {})?;
    let kg = run(&config(96, 96.0, Mode::LinearKg, 1.5, 11, 40.0, [0, 0, 0]), None, Exec::default(), &mut |_| {})?;
    let (t, v) = column(&wave.records, |r| r.sup_p0);
    let p0 = fit_decay(&t, &v, [5.0, 40.0])?;
    let (t, v) = column(&kg.records, |r| r.sup_pgt0);
    let pk = fit_decay(&t, &v, [5.0, 40.0])?;
    let elapsed = start.elapsed();
    Ok(Outcome {
        passed: (-1.15..=-0.85).contains(&p0.exponent)
            && (-1.65..=-1.35).contains(&pk.exponent)
            && elapsed <= Duration::from_secs(1800),
        detail: format!(
            "zero-mode exponent {:.3}, first-mode exponent {:.3}, {:.0} s",
            p0.exponent,
            pk.exponent,
            elapsed.as_secs_f64()
        ),
    })
}

struct Nonlinear {
    persistence: Outcome,
    decay: Outcome,
    bootstrap: Outcome,
}

fn nonlinear_run() -> formwave::Result<Nonlinear> {
    let cfg = config(48, 48.0, Mode::FullNonlinear, 1.6, 7, 16.0, [2, 1, 0]);
    let out = run(&cfg, None, Exec::default(), &mut |_| {})?;
    let recs = &out.records;

    let gauge = recs
        .iter()
        .filter(|r| r.t <= 8.0)
        .map(|r| r.gauge_residual)
        .fold(0.0, f64::max);
    let persistence = Outcome {
        passed: gauge <= 1e-6,
        detail: format!("max gauge residual on [0, 8] {gauge:.2e}"),
    };

    let (t, v) = column(recs, |r| r.b_norm + r.c_norm + r.d_norm);
    let decay = match fit_decay(&t, &v, [4.0, 16.0]) {
        Ok(f) => Outcome {
            passed: f.exponent <= -1.0,
            detail: format!("B+C+D exponent {:.3} (r^2 {:.3})", f.exponent, f.r_squared),
        },
        Err(e) => failed(e),
    };

    let boot = bootstrap_monitor(recs, 1.5);
    let (t, v) = column(recs, |r| r.e_high);
    let growth = fit_decay(&t, &v, [0.0, 16.0]).map(|f| f.exponent).unwrap_or(f64::NAN);
    let bootstrap = Outcome {
        passed: boot.passed() && recs.last().is_some_and(|r| r.t >= 16.0),
        detail: format!(
            "max ratios: high {:.3}, mid {:.3}; E_high growth exponent {growth:.3}",
            boot.high_ratio_max, boot.mid_ratio_max
        ),
    };
    Ok(Nonlinear {
        persistence,
        decay,
        bootstrap,
    })
}

fn determinism() -> formwave::Result<Outcome> {
    let dir = tempfile::tempdir().map_err(|e| formwave::Error::io("<tempdir>", e))?;
    let cfg = config(16, 8.0, Mode::FullNonlinear, 0.3, 7, 2.0, [1, 1, 0]);
    let path = dir.path().join("det.toml");
    std::fs::write(&path, cfg.to_toml()).map_err(|e| formwave::Error::io(&path, e))?;
    let mut csvs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let args = ["formwave", "simulate", path.to_str().unwrap(), "--out", out.to_str().unwrap()];
        let code = formwave::cli::dispatch(args, &mut Vec::new(), &mut Vec::new());
        if code != 0 {
            return Ok(Outcome {
                passed: false,
                detail: format!("simulate exited with {code}"),
            });
        }
        let p = out.join("diagnostics.csv");
        csvs.push(std::fs::read(&p).map_err(|e| formwave::Error::io(&p, e))?);
    }
    Ok(Outcome {
        passed: csvs[0] == csvs[1] && !csvs[0].is_empty(),
        detail: format!("{} bytes per CSV", csvs[0].len()),
    })
}

fn main() {
    let exec = Exec::default();
    let mut all = true;
    let mut report = |n: usize, name: &str, o: Outcome| {
        all &= o.passed;
        println!("criterion {n:>2} {}: {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    };
    let secs = Duration::from_secs;

    report(1, "algebra", suite(algebra_suite(1), Some(secs(10))));
    report(2, "calculus", suite(calculus_suite(100, 32, 2, exec), Some(secs(60))));
    report(3, "null form", suite(null_form_suite(3), Some(secs(30))));
    report(4, "splitting", suite(splitting_suite(50, 4, exec), None));
    report(5, "gauge fixing", gauge_criterion().unwrap_or_else(failed));
    match nonlinear_run() {
        Ok(n) => {
            report(6, "gauge persistence", n.persistence);
            report(7, "linear decay", linear_decay().unwrap_or_else(failed));
            report(8, "nonlinearity decay", n.decay);
            report(9, "bootstrap", n.bootstrap);
        }
        Err(e) => {
            let msg = e.to_string();
            for (n, name) in [(6, "gauge persistence"), (8, "nonlinearity decay"), (9, "bootstrap")] {
                report(n, name, Outcome { passed: false, detail: format!("error: {msg}") });
            }
            report(7, "linear decay", linear_decay().unwrap_or_else(failed));
        }
    }
    report(10, "commutators", suite(commutator_suite(exec), Some(secs(60))));
    report(11, "determinism", determinism().unwrap_or_else(failed));
    if !all {
        std::process::exit(1);
    }
}
