use std::path::Path;

use formwave::cli::dispatch;
use formwave::diagnostics::{CsvWriter, DiagnosticsRecord};
use formwave::field::FieldState;
use formwave::grid::{Grid, GridSpec};
use formwave::sample::{random_field, rng};
use formwave::solver::{load_snapshot, save_snapshot};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["formwave"];
    full.extend_from_slice(args);
    let code = dispatch(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: &str = r#"
[grid]
n_x = 16
box_length = 8.0

[time]
dt = 0.05
t_final = 1.0

[data]
mode = "linear_wave"
amplitude = 1e-3
seed = 2

[diagnostics]
sample_interval = 0.5
m_high = 1
m_mid = 0
"#;

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&[]).0, 2);
    let (code, _, err) = call(&["fit-decay", "x.csv", "--column", "t", "--window", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("lo,hi"), "{err}");
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("simulate"));
}

#[test]
fn bad_configurations_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, SMALL.replace("t_final = 1.0", "t_final = 3.5")).unwrap();
    let (code, _, err) = call(&["simulate", path(&cfg)]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("box_length"), "{err}");
    std::fs::write(&cfg, SMALL.replace("seed = 2", "seed = 2\ncolour = 3")).unwrap();
    assert_eq!(call(&["simulate", path(&cfg)]).0, 2);
    assert_eq!(call(&["simulate", path(&dir.path().join("missing.toml"))]).0, 1);
}

#[test]
fn simulate_then_fit_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let (code, out, err) = call(&["--sequential", "simulate", path(&cfg)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().filter(|l| l.starts_with("t ")).count(), 3);
    let csv = dir.path().join("small").join("diagnostics.csv");
    assert!(csv.exists());
    assert!(dir.path().join("small").join("final.fwav").exists());

    let (code, _, err) = call(&["fit-decay", path(&csv), "--column", "E_low", "--window", "0,1"]);
    assert_eq!(code, 1, "three samples are too few to fit: {err}");

    let (code, out, _) = call(&["emit-plots", path(&csv)]);
    assert_eq!(code, 0);
    assert!(out.contains("wrote 22 files"), "{out}");
}

#[test]
fn fit_decay_reports_the_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let mut w = CsvWriter::create(&csv, &[]).unwrap();
    for k in 0..=30 {
        let t = k as f64;
        w.append(&DiagnosticsRecord {
            t,
            sup_pgt0: 2.0 * (1.0 + t).powf(-1.5),
            ..Default::default()
        })
        .unwrap();
    }
    drop(w);
    let (code, out, _) = call(&["fit-decay", path(&csv), "--column", "sup_Pgt0", "--window", "5,30"]);
    assert_eq!(code, 0);
    assert!(out.contains("exponent -1.500000"), "{out}");
    assert!(out.contains("samples 26"), "{out}");
}

#[test]
fn gauge_fix_round_trips_a_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::new(GridSpec::new(16, 16.0, 1, 1)).unwrap();
    let mut r = rng(4);
    let state = FieldState {
        u: random_field(&grid, 3, 3, &mut r).scaled(1e-2),
        ut: random_field(&grid, 3, 3, &mut r).scaled(1e-2),
        time: 0.0,
    };
    let input = dir.path().join("in.fwav");
    let output = dir.path().join("out.fwav");
    save_snapshot(&state, &input).unwrap();
    let (code, out, err) = call(&["gauge-fix", path(&input), path(&output), "--t-final", "1", "--dt", "0.05"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("residual_delta"));
    let fixed = load_snapshot(&output).unwrap();
    assert_eq!(fixed.time, 1.0);
    assert_eq!(fixed.u.degree(), 3);
}

#[test]
fn algebra_selftest_passes() {
    let (code, out, _) = call(&["algebra-selftest"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.contains("PASS")).count(), 3, "{out}");
}
