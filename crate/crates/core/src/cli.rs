//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::diagnostics::{bootstrap_monitor, emit_plots, fit_csv_column, read_table, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gauge::{gauge_fix, FreeEvolution, GaugeParams};
use crate::selftest::all_suites;
use crate::solver::{load_snapshot, run, save_snapshot, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "formwave", version, about = "Pseudo-spectral 3-form wave laboratory")]
struct Cli {
    /// Run sequentially even when built with the parallel feature.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exterior algebra, null-form and commutator self-tests.
    AlgebraSelftest,
    /// Run a configuration, writing the diagnostics CSV and snapshots.
    Simulate {
        config: PathBuf,
        /// Output directory (default: the config file name without extension).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correct a stored potential into Lorenz gauge by free evolution.
    GaugeFix {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        t_final: f64,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
    },
    /// Fit `value ~ (1 + t)^p` to one CSV column.
    FitDecay {
        csv: PathBuf,
        #[arg(long)]
        column: String,
        /// Window as `lo,hi`.
        #[arg(long, value_parser = parse_window)]
        window: [f64; 2],
    },
    /// Write per-column data files and SVG charts.
    EmitPlots {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected lo,hi but got {s:?}"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err(format!("window lower bound {lo} must be below {hi}"));
    }
    Ok([lo, hi])
}

/// Parse `args` and run; returns the process exit status.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match execute(cli.command, exec, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

fn line(out: &mut dyn Write, s: String) -> Result<()> {
    writeln!(out, "{s}").map_err(|e| Error::io("<stdout>", e))
}

fn execute(cmd: Command, exec: Exec, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::AlgebraSelftest => {
            let mut ok = true;
            for suite in all_suites(exec)? {
                line(out, suite.summary())?;
                for c in suite.failures() {
                    line(out, format!("  FAILED {}: {:e} vs {:?}", c.label, c.value, c.bound))?;
                }
                ok &= suite.passed();
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Simulate { config, out: dir } => simulate(&config, dir, exec, out),
        Command::GaugeFix {
            input,
            output,
            t_final,
            dt,
        } => {
            let state = load_snapshot(&input)?;
            let history = FreeEvolution::new(&state, exec)?;
            let res = gauge_fix(&history, GaugeParams { t_final, dt, exec })?;
            save_snapshot(&res.corrected, &output)?;
            let r = res.report;
            line(
                out,
                format!(
                    "residual_delta {:e}\nresidual_dA {:e}\nsupport_violation {:e}\ndelta_b {:e}",
                    r.residual_delta, r.residual_da, r.support_violation, r.delta_b
                ),
            )?;
            Ok(0)
        }
        Command::FitDecay { csv, column, window } => {
            let fit = fit_csv_column(&csv, &column, window)?;
            line(
                out,
                format!(
                    "column {column} window [{}, {}] samples {}\nexponent {:.6}\nintercept {:.6}\nr_squared {:.6}",
                    window[0], window[1], fit.samples, fit.exponent, fit.intercept, fit.r_squared
                ),
            )?;
            Ok(0)
        }
        Command::EmitPlots { csv, out: dir } => {
            let table = read_table(&csv)?;
            let dir = dir.unwrap_or_else(|| csv.parent().unwrap_or(Path::new(".")).join("plots"));
            let files = emit_plots(&table, &dir)?;
            line(out, format!("wrote {} files to {}", files.len(), dir.display()))?;
            Ok(0)
        }
    }
}

fn simulate(config: &Path, dir: Option<PathBuf>, exec: Exec, out: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::load(config)?;
    let dir = dir.unwrap_or_else(|| config.with_extension(""));
    let mut echo = |r: &DiagnosticsRecord| {
        let _ = writeln!(
            out,
            "t {:8.3}  E_high {:.6e}  E_mid {:.6e}  gauge {:.3e}",
            r.t, r.e_high, r.e_mid, r.gauge_residual
        );
    };
    let res = run(&cfg, Some(&dir), exec, &mut echo)?;
    let boot = bootstrap_monitor(&res.records, crate::diagnostics::bootstrap::DEFAULT_THRESHOLD);
    line(
        out,
        format!(
            "{} steps, {} records, csv in {}\nenergy ratios: high {:.6} mid {:.6}{}",
            res.steps,
            res.records.len(),
            dir.display(),
            boot.high_ratio_max,
            boot.mid_ratio_max,
            match boot.first_violation {
                Some(t) => format!(", first violation at t = {t}"),
                None => String::new(),
            }
        ),
    )?;
    Ok(0)
}
