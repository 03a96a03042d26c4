//! Power-law fits `value ≈ c (1 + t)^p` by least squares in log–log.

use std::path::Path;

use crate::error::{Error, Result};

use super::csv::read_table;

pub const MIN_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub window: [f64; 2],
    pub r_squared: f64,
    pub samples: usize,
}

/// Fit over samples with `lo ≤ t ≤ hi`.
pub fn fit_decay(t: &[f64], values: &[f64], window: [f64; 2]) -> Result<DecayFit> {
    let [lo, hi] = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&ti, &vi) in t.iter().zip(values) {
        if ti < lo || ti > hi {
            continue;
        }
        if !(vi > 0.0) || !vi.is_finite() {
            return Err(Error::FitDomain { t: ti, value: vi });
        }
        xs.push((1.0 + ti).ln());
        ys.push(vi.ln());
    }
    let n = xs.len();
    if n < MIN_SAMPLES {
        return Err(Error::FitWindow { lo, hi, got: n });
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum();
    // a constant series is fitted exactly; rounding in the mean must not
    // turn that into a meaningless ratio of tiny numbers
    let flat = syy <= 1e-24 * ys.iter().map(|y| y * y).sum::<f64>().max(f64::MIN_POSITIVE);
    let r_squared = if flat { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(DecayFit {
        exponent,
        intercept,
        window,
        r_squared,
        samples: n,
    })
}

pub fn fit_csv_column(path: &Path, column: &str, window: [f64; 2]) -> Result<DecayFit> {
    let table = read_table(path)?;
    let t = table.column("t")?;
    fit_decay(t, table.column(column)?, window)
}
