//! Differential operators on form fields over ℝ^{3+1} × K.
//!
//! Operators that need time derivatives act on [`Jet`]s: spatial and torus
//! derivatives act level by level, while `∂_0` shifts a jet down by one
//! level. Anything involving `∂_0` therefore returns a jet one level
//! shallower than its input.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::blade::{self, reorder_sign, MetricSignature, DIM, FULL, TIME};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{FormField, Jet, Key};
use crate::grid::SlotKind;

/// Spatial partials `∂_1, ∂_2, ∂_3` of every component, one forward FFT each.
pub fn spatial_gradient(f: &FormField, exec: Exec) -> [FormField; 3] {
    let grid = f.grid().clone();
    let items: Vec<(Key, &[f64])> = f.iter().collect();
    let parts = exec.map(items, |(k, v)| (k, grid.gradient(v)));
    let mut out = [0, 1, 2].map(|_| FormField::zero(f.grid(), f.degree()));
    for ((s, m), [gx, gy, gz]) in parts {
        out[0].insert(s, m, gx);
        out[1].insert(s, m, gy);
        out[2].insert(s, m, gz);
    }
    out
}

/// Spatial partial along axis 1..3.
pub fn partial_space(f: &FormField, axis: usize, exec: Exec) -> FormField {
    let grid = f.grid().clone();
    let items: Vec<(Key, &[f64])> = f.iter().collect();
    let parts = exec.map(items, |(k, v)| (k, grid.partial(v, axis)));
    let mut out = FormField::zero(f.grid(), f.degree());
    for ((s, m), v) in parts {
        out.insert(s, m, v);
    }
    out
}

/// Torus partial along axis 4..10, pairing cos and sin slots.
///
/// With `f = a cos θ + b sin θ` and `θ = κ·y`, `∂_j f = κ_j b cos θ − κ_j a sin θ`.
pub fn partial_torus(f: &FormField, axis: usize) -> FormField {
    let grid = f.grid();
    let j = axis - blade::TORUS0;
    let mut out = FormField::zero(grid, f.degree());
    for ((s, m), v) in f.iter() {
        let slot = &grid.slots[s];
        let k = slot.kappa[j];
        if k == 0.0 {
            continue;
        }
        match slot.kind {
            SlotKind::Zero => {}
            SlotKind::Cos => out.accumulate(slot.partner, m, v, -k),
            SlotKind::Sin => out.accumulate(slot.partner, m, v, k),
        }
    }
    out
}

/// `∂_axis` of a plain field for a non-time axis.
pub fn partial(f: &FormField, axis: usize, exec: Exec) -> FormField {
    match axis {
        1..=3 => partial_space(f, axis, exec),
        a if a >= blade::TORUS0 && a < DIM => partial_torus(f, axis),
        _ => panic!("partial along axis {axis} needs a jet"),
    }
}

/// `Δ_x` per component.
pub fn laplacian_x(f: &FormField, exec: Exec) -> FormField {
    let grid = f.grid().clone();
    let items: Vec<(Key, &[f64])> = f.iter().collect();
    let parts = exec.map(items, |(k, v)| (k, grid.laplacian(v)));
    let mut out = FormField::zero(f.grid(), f.degree());
    for ((s, m), v) in parts {
        out.insert(s, m, v);
    }
    out
}

fn slot_multiplier(f: &FormField, mult: impl Fn(f64) -> f64) -> FormField {
    let grid = f.grid().clone();
    let mut out = f.map_values(|(s, _), v| {
        let c = mult(grid.slots[s].lambda);
        v.iter().map(|x| x * c).collect()
    });
    out.prune();
    out
}

/// `Δ_K`: multiply slot `s` by `−λ_s²`.
pub fn laplacian_k(f: &FormField) -> FormField {
    slot_multiplier(f, |l| -l * l)
}

/// `(−Δ_K)^{1/2}`: multiply slot `s` by `λ_s`.
pub fn sqrt_neg_laplacian_k(f: &FormField) -> FormField {
    slot_multiplier(f, |l| l)
}

/// Projection onto the kernel of `Δ_K` (the constant torus mode).
pub fn project_p0(f: &FormField) -> FormField {
    let z = f.grid().zero_slot;
    f.filter_slots(|s| s == z)
}

/// Projection onto the positive spectrum of `−Δ_K`.
pub fn project_pgt0(f: &FormField) -> FormField {
    let z = f.grid().zero_slot;
    f.filter_slots(|s| s != z)
}

/// `f ⌋ ∂_t`: components containing `dx^0`, with the time index removed.
pub fn contract_time(f: &FormField) -> Result<FormField> {
    if f.degree() == 0 {
        return Err(Error::DegreeUnderflow { needed: 1, got: 0 });
    }
    let mut out = FormField::zero(f.grid(), f.degree() - 1);
    for ((s, m), v) in f.iter() {
        if m & (1 << TIME) != 0 {
            out.insert(s, m & !(1 << TIME), v.to_vec());
        }
    }
    Ok(out)
}

/// `(−Δ_x − Δ_K)^{-1}` per component; the kernel (constant zero mode) is
/// mapped to zero.
pub fn inverse_neg_laplacian(f: &FormField, exec: Exec) -> FormField {
    let grid = f.grid().clone();
    let k2 = grid.k2();
    let mut spec = to_spectral(f, exec);
    for ((s, _), v) in spec.iter_mut() {
        let lam2 = grid.slots[*s].lambda.powi(2);
        for (c, k) in v.iter_mut().zip(k2) {
            let w = k + lam2;
            *c = if w > 0.0 { *c / w } else { Complex64::new(0.0, 0.0) };
        }
    }
    from_spectral(&grid, f.degree(), &spec, exec)
}

/// Pointwise Hodge star, component by component.
pub fn star(f: &FormField, sig: &MetricSignature) -> FormField {
    let mut out = FormField::zero(f.grid(), DIM - f.degree());
    for ((s, m), v) in f.iter() {
        let (mc, sign) = blade::star_blade(m, sig);
        out.insert(s, mc, v.iter().map(|x| sign as f64 * x).collect());
    }
    out
}

pub fn star_jet(j: &Jet, sig: &MetricSignature) -> Jet {
    j.map(|l| star(l, sig))
}

impl Jet {
    /// `∂_axis` of a jet. Along time this shifts the levels down by one.
    pub fn partial(&self, axis: usize, exec: Exec) -> Result<Jet> {
        if axis == TIME {
            if self.depth() < 2 {
                return Err(Error::RecursionLimit {
                    requested: 1,
                    limit: 0,
                });
            }
            return Ok(Jet {
                time: self.time,
                levels: self.levels[1..].to_vec(),
            });
        }
        Ok(self.map(|l| partial(l, axis, exec)))
    }
}

fn wedge_axis_into(out: &mut FormField, src: &FormField, axis: usize) {
    for ((s, m), v) in src.iter() {
        if m & (1 << axis) != 0 {
            continue;
        }
        let sign = reorder_sign(1 << axis, m);
        out.accumulate(s, m | (1 << axis), v, sign as f64);
    }
}

fn check_d_degree(degree: usize) -> Result<()> {
    if degree >= DIM {
        return Err(Error::DegreeOverflow {
            left: degree,
            right: 1,
        });
    }
    Ok(())
}

/// Exterior derivative along `t, x_1, x_2, x_3`; one level shallower.
pub fn d_parallel(j: &Jet, exec: Exec) -> Result<Jet> {
    check_d_degree(j.degree())?;
    if j.depth() < 2 {
        return Err(Error::RecursionLimit {
            requested: 1,
            limit: 0,
        });
    }
    let mut levels = Vec::with_capacity(j.depth() - 1);
    for m in 0..j.depth() - 1 {
        let l = &j.levels[m];
        let mut out = FormField::zero(l.grid(), l.degree() + 1);
        wedge_axis_into(&mut out, &j.levels[m + 1], TIME);
        let grad = spatial_gradient(l, exec);
        for (i, g) in grad.iter().enumerate() {
            wedge_axis_into(&mut out, g, i + 1);
        }
        levels.push(out);
    }
    Ok(Jet {
        time: j.time,
        levels,
    })
}

/// Exterior derivative along the torus axes; same depth as the input.
pub fn d_perp(j: &Jet) -> Result<Jet> {
    check_d_degree(j.degree())?;
    let grid = j.grid().clone();
    Ok(j.map(|l| {
        let mut out = FormField::zero(&grid, l.degree() + 1);
        for axis in grid.active_torus_axes() {
            wedge_axis_into(&mut out, &partial_torus(l, axis), axis);
        }
        out
    }))
}

/// `d = d_∥ + d_⊥`, one level shallower than the input.
pub fn d_full(j: &Jet, exec: Exec) -> Result<Jet> {
    let par = d_parallel(j, exec)?;
    let perp = d_perp(j)?;
    par.add(&perp)
}

/// Codifferential computed literally as `(−1)^k * d *`.
pub fn codifferential(j: &Jet, sig: &MetricSignature, exec: Exec) -> Result<Jet> {
    let k = j.degree();
    if k == 0 {
        return Err(Error::DegreeUnderflow { needed: 1, got: 0 });
    }
    let dual = star_jet(j, sig);
    let d = d_full(&dual, exec)?;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(star_jet(&d, sig).scaled(sign))
}

/// Codifferential from the coordinate contraction
/// `(δu)_S = −∂_0 u_{0S} + Σ_{γ≥1} ∂_γ u_{γS}`.
pub fn codifferential_coordinate(j: &Jet, exec: Exec) -> Result<Jet> {
    let k = j.degree();
    if k == 0 {
        return Err(Error::DegreeUnderflow { needed: 1, got: 0 });
    }
    if j.depth() < 2 {
        return Err(Error::RecursionLimit {
            requested: 1,
            limit: 0,
        });
    }
    let grid = j.grid().clone();
    let mut levels = Vec::with_capacity(j.depth() - 1);
    for m in 0..j.depth() - 1 {
        let l = &j.levels[m];
        let mut out = FormField::zero(&grid, k - 1);
        let contract = |out: &mut FormField, src: &FormField, axis: usize, c: f64| {
            for ((s, mask), v) in src.iter() {
                if mask & (1 << axis) == 0 {
                    continue;
                }
                let rest = mask & !(1 << axis);
                let sign = reorder_sign(1 << axis, rest) as f64;
                out.accumulate(s, rest, v, c * sign);
            }
        };
        contract(&mut out, &j.levels[m + 1], TIME, -1.0);
        let grad = spatial_gradient(l, exec);
        for (i, g) in grad.iter().enumerate() {
            contract(&mut out, g, i + 1, 1.0);
        }
        for axis in grid.active_torus_axes() {
            contract(&mut out, &partial_torus(l, axis), axis, 1.0);
        }
        levels.push(out);
    }
    Ok(Jet {
        time: j.time,
        levels,
    })
}

/// `□ = −dδ − δd`; two levels shallower than the input.
pub fn box_operator(j: &Jet, sig: &MetricSignature, exec: Exec) -> Result<Jet> {
    let dd = d_full(&codifferential(j, sig, exec)?, exec)?;
    let dd2 = if j.degree() + 1 <= DIM {
        Some(codifferential(&d_full(j, exec)?, sig, exec)?)
    } else {
        None
    };
    let mut out = dd.scaled(-1.0);
    if let Some(x) = dd2 {
        out = out.sub(&x)?;
    }
    Ok(out)
}

/// `∂_t² − Δ_x − Δ_K` component by component; two levels shallower.
pub fn box_componentwise(j: &Jet, exec: Exec) -> Result<Jet> {
    if j.depth() < 3 {
        return Err(Error::RecursionLimit {
            requested: 2,
            limit: j.depth().saturating_sub(1),
        });
    }
    let mut levels = Vec::with_capacity(j.depth() - 2);
    for m in 0..j.depth() - 2 {
        let mut out = j.levels[m + 2].clone();
        out.axpy(-1.0, &laplacian_x(&j.levels[m], exec))?;
        out.axpy(-1.0, &laplacian_k(&j.levels[m]))?;
        levels.push(out);
    }
    Ok(Jet {
        time: j.time,
        levels,
    })
}

/// Spatial L² norm computed from the half spectrum (Parseval).
pub fn spectral_norm_sq(f: &FormField) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let nh = n / 2 + 1;
    let np = grid.point_count() as f64;
    let mut total = 0.0;
    for ((s, _), v) in f.iter() {
        let spec = grid.forward(v);
        let mut sum = 0.0;
        for (i, c) in spec.iter().enumerate() {
            let kx = i % nh;
            let w = if kx == 0 || 2 * kx == n { 1.0 } else { 2.0 };
            sum += w * c.norm_sqr();
        }
        total += grid.slot_weight(s) * sum / np;
    }
    total * grid.cell() * grid.torus_volume()
}

/// Ratio of the spectral `H^n(K)` norm of `P_{>0} f` to `‖(−Δ_K)^{n/2} f‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct SobolevReport {
    /// `None` when `P_{>0} f = 0`.
    pub ratio: Option<f64>,
    /// Mode-wise upper bound `((1 + λ_min²)/λ_min²)^{n/2}`.
    pub upper_bound: f64,
}

pub fn sobolev_equivalence_check(f: &FormField, order: u32) -> SobolevReport {
    let grid = f.grid();
    let lambda_min = grid
        .slots
        .iter()
        .map(|s| s.lambda)
        .filter(|l| *l > 0.0)
        .fold(f64::INFINITY, f64::min);
    let upper_bound = if lambda_min.is_finite() {
        ((1.0 + lambda_min * lambda_min) / (lambda_min * lambda_min)).powf(order as f64 / 2.0)
    } else {
        1.0
    };
    let mut hn = 0.0;
    let mut root = 0.0;
    for ((s, _), v) in f.iter() {
        let l2 = grid.slots[s].lambda.powi(2);
        if l2 == 0.0 {
            continue;
        }
        let w = grid.slot_weight(s) * v.iter().map(|x| x * x).sum::<f64>();
        hn += w * (1.0 + l2).powi(order as i32);
        root += w * l2.powi(order as i32);
    }
    SobolevReport {
        ratio: if root > 0.0 { Some((hn / root).sqrt()) } else { None },
        upper_bound,
    }
}

/// Physical → half-spectrum for every component.
pub fn to_spectral(f: &FormField, exec: Exec) -> BTreeMap<Key, Vec<Complex64>> {
    let grid = f.grid().clone();
    let items: Vec<(Key, &[f64])> = f.iter().collect();
    exec.map(items, |(k, v)| (k, grid.forward(v))).into_iter().collect()
}

/// Half-spectrum → physical for every component.
pub fn from_spectral(
    grid: &std::sync::Arc<crate::grid::Grid>,
    degree: usize,
    spec: &BTreeMap<Key, Vec<Complex64>>,
    exec: Exec,
) -> FormField {
    let g = grid.clone();
    let items: Vec<(Key, &Vec<Complex64>)> = spec.iter().map(|(k, v)| (*k, v)).collect();
    let comps = exec.map(items, |(k, v)| (k, g.inverse(v)));
    FormField::from_parts(grid, degree, comps.into_iter().collect())
}

/// Blades reachable from `masks` by one exterior derivative along `axes`.
pub fn d_support(masks: &[u16], axes: &[usize]) -> Vec<u16> {
    let mut out: Vec<u16> = masks
        .iter()
        .flat_map(|&m| axes.iter().filter(move |&&a| m & (1 << a) == 0).map(move |&a| m | (1 << a)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Complementary blade.
pub fn complement(mask: u16) -> u16 {
    FULL & !mask
}
