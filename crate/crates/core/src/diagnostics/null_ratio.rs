//! Pointwise null-form ratio
//! `max |Q_ij(f, g)| (1 + t) / (|Γf||∇g| + |∇f||Γg| + ε)` over pairs of
//! zero-mode components.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::Jet;

struct Derivs {
    /// `∂_0 .. ∂_3` at every point.
    d: [Vec<f64>; 4],
    grad: Vec<f64>,
    gamma: Vec<f64>,
}

fn derivs(f: &[f64], ft: &[f64], grid: &crate::grid::Grid, t: f64) -> Derivs {
    let [d1, d2, d3] = grid.gradient(f);
    let d = [ft.to_vec(), d1, d2, d3];
    let x = [grid.coordinate(1), grid.coordinate(2), grid.coordinate(3)];
    let np = f.len();
    let mut grad = vec![0.0; np];
    let mut gamma = vec![0.0; np];
    for p in 0..np {
        let dd = [d[0][p], d[1][p], d[2][p], d[3][p]];
        let xx = [x[0][p], x[1][p], x[2][p]];
        let g2: f64 = dd.iter().map(|v| v * v).sum();
        let mut s = g2;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let r = xx[i] * dd[j + 1] - xx[j] * dd[i + 1];
            s += r * r;
        }
        for j in 0..3 {
            let b = t * dd[j + 1] + xx[j] * dd[0];
            s += b * b;
        }
        grad[p] = g2.sqrt();
        gamma[p] = s.sqrt();
    }
    Derivs { d, grad, gamma }
}

/// `jet` holds the zero-mode part of `(u, u_t)`.
pub fn null_ratio_monitor(jet: &Jet, exec: Exec) -> Result<f64> {
    if jet.depth() < 2 {
        return Err(Error::RecursionLimit {
            requested: 1,
            limit: 0,
        });
    }
    let grid = jet.grid().clone();
    let z = grid.zero_slot;
    let t = jet.time;
    let masks: Vec<u16> = jet.levels[0].masks();
    let zero = vec![0.0; grid.point_count()];
    let items: Vec<(Vec<f64>, Vec<f64>)> = masks
        .iter()
        .map(|&m| {
            let f = jet.levels[0].get(z, m).map(|v| v.to_vec()).unwrap_or_else(|| zero.clone());
            let ft = jet.levels[1].get(z, m).map(|v| v.to_vec()).unwrap_or_else(|| zero.clone());
            (f, ft)
        })
        .collect();
    let ds = exec.map(items, |(f, ft)| derivs(&f, &ft, &grid, t));
    let mut pairs = Vec::new();
    for a in 0..ds.len() {
        for b in a + 1..ds.len() {
            pairs.push((a, b));
        }
    }
    let worst = exec.map(pairs, |(a, b)| {
        let (f, g) = (&ds[a], &ds[b]);
        let mut best: f64 = 0.0;
        for p in 0..f.grad.len() {
            let den = f.gamma[p] * g.grad[p] + f.grad[p] * g.gamma[p] + f64::EPSILON;
            for i in 0..4 {
                for j in i + 1..4 {
                    let q = f.d[i][p] * g.d[j][p] - f.d[j][p] * g.d[i][p];
                    best = best.max(q.abs() / den);
                }
            }
        }
        best
    });
    Ok(worst.into_iter().fold(0.0, f64::max) * (1.0 + t))
}
