//! Discretization of ℝ³ × T⁷: a periodic spatial box with FFT derivatives,
//! and a truncated real Fourier basis on the torus.
//!
//! Torus dependence lives in *slots*. Slot indices are mixed-radix over
//! `n ∈ {-m..m}^d` on the active axes. A slot whose first nonzero entry is
//! positive holds the `cos(κ·y)` coefficient of that mode; the slot of `-n`
//! holds the matching `sin(κ·y)` coefficient; `n = 0` is the constant.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::blade::TORUS0;
use crate::error::{Error, Result};
use crate::fft::Fft3;

pub const TORUS_DIM: usize = 7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_x: usize,
    pub box_length: f64,
    #[serde(default = "default_d_active")]
    pub d_active: usize,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    #[serde(default = "default_period")]
    pub torus_period: f64,
}

fn default_d_active() -> usize {
    1
}
fn default_m_max() -> usize {
    1
}
fn default_period() -> f64 {
    1.0
}

impl GridSpec {
    pub fn new(n_x: usize, box_length: f64, d_active: usize, m_max: usize) -> Self {
        GridSpec {
            n_x,
            box_length,
            d_active,
            m_max,
            torus_period: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x < 4 || self.n_x % 2 != 0 {
            return Err(Error::Config(format!("n_x = {} must be even and >= 4", self.n_x)));
        }
        if !(self.box_length > 0.0) || !self.box_length.is_finite() {
            return Err(Error::Config("box_length must be positive".into()));
        }
        if self.d_active > TORUS_DIM {
            return Err(Error::Config(format!("d_active = {} exceeds 7", self.d_active)));
        }
        if !(self.torus_period > 0.0) || !self.torus_period.is_finite() {
            return Err(Error::Config("torus_period must be positive".into()));
        }
        Ok(())
    }

    pub fn mode_count(&self) -> usize {
        (2 * self.m_max + 1).pow(self.d_active as u32)
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.n_x as f64
    }

    /// Largest torus eigenvalue root `λ_max`.
    pub fn lambda_max(&self) -> f64 {
        2.0 * PI * self.m_max as f64 * (self.d_active as f64).sqrt() / self.torus_period
    }

    /// Bytes of one dense `(u, u_t)` pair over all 165 components.
    pub fn dense_state_bytes(&self) -> u64 {
        (self.n_x as u64).pow(3) * 165 * self.mode_count() as u64 * 2 * 8
    }
}

/// A torus eigenmode and its `-Δ_K` eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusMode {
    pub n: [i32; TORUS_DIM],
    pub eigenvalue: f64,
}

impl TorusMode {
    pub fn new(n: [i32; TORUS_DIM], period: f64) -> Self {
        let eigenvalue = n
            .iter()
            .map(|&k| (2.0 * PI * k as f64 / period).powi(2))
            .sum();
        TorusMode { n, eigenvalue }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Zero,
    Cos,
    Sin,
}

#[derive(Clone, Debug)]
pub struct Slot {
    /// Mode vector with first nonzero entry positive.
    pub mode: TorusMode,
    pub kind: SlotKind,
    /// `2π n_j / period` per torus axis.
    pub kappa: [f64; TORUS_DIM],
    pub lambda: f64,
    /// Slot holding the other member of the cos/sin pair.
    pub partner: usize,
}

/// Grid geometry, transform plans and cached multipliers.
#[derive(Debug)]
pub struct Grid {
    pub spec: GridSpec,
    pub slots: Vec<Slot>,
    pub zero_slot: usize,
    fft: Fft3,
    /// Physical coordinate per index along one axis, centred on the origin.
    pub coords: Vec<f64>,
    kx: Vec<f64>,
    kyz: Vec<f64>,
    k2: Vec<f64>,
    dealias: Vec<bool>,
    /// Quadrature points on the active torus axes.
    pub torus_points: Vec<[f64; TORUS_DIM]>,
    /// `basis[p][s]`: value of slot `s`'s basis function at point `p`.
    basis: Vec<Vec<f64>>,
}

fn slot_digits(spec: &GridSpec, s: usize) -> [i32; TORUS_DIM] {
    let r = 2 * spec.m_max + 1;
    let mut n = [0i32; TORUS_DIM];
    let mut rest = s;
    for j in 0..spec.d_active {
        n[j] = (rest % r) as i32 - spec.m_max as i32;
        rest /= r;
    }
    n
}

fn slot_of(spec: &GridSpec, n: &[i32; TORUS_DIM]) -> usize {
    let r = 2 * spec.m_max + 1;
    let mut s = 0;
    for j in (0..spec.d_active).rev() {
        s = s * r + (n[j] + spec.m_max as i32) as usize;
    }
    s
}

fn signed_wavenumber(i: usize, n: usize, length: f64) -> f64 {
    // Nyquist bin carries no derivative so first and second derivatives agree.
    if 2 * i == n {
        0.0
    } else if 2 * i < n {
        2.0 * PI * i as f64 / length
    } else {
        2.0 * PI * (i as f64 - n as f64) / length
    }
}

fn signed_index(i: usize, n: usize) -> i64 {
    if 2 * i <= n {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Arc<Grid>> {
        spec.validate()?;
        let n = spec.n_x;
        let dx = spec.dx();
        let coords = (0..n)
            .map(|i| {
                if 2 * i < n {
                    i as f64 * dx
                } else {
                    (i as f64 - n as f64) * dx
                }
            })
            .collect();

        let mut slots = Vec::with_capacity(spec.mode_count());
        for s in 0..spec.mode_count() {
            let n_raw = slot_digits(&spec, s);
            let first = n_raw.iter().find(|&&k| k != 0).copied();
            let (kind, rep) = match first {
                None => (SlotKind::Zero, n_raw),
                Some(k) if k > 0 => (SlotKind::Cos, n_raw),
                Some(_) => (SlotKind::Sin, n_raw.map(|k| -k)),
            };
            let mode = TorusMode::new(rep, spec.torus_period);
            let mut kappa = [0.0; TORUS_DIM];
            for j in 0..TORUS_DIM {
                kappa[j] = 2.0 * PI * rep[j] as f64 / spec.torus_period;
            }
            let lambda = mode.eigenvalue.sqrt();
            let partner = slot_of(&spec, &n_raw.map(|k| -k));
            slots.push(Slot {
                mode,
                kind,
                kappa,
                lambda,
                partner,
            });
        }
        let zero_slot = slot_of(&spec, &[0; TORUS_DIM]);

        let fft = Fft3::new(n);
        let nh = fft.nh();
        let kx: Vec<f64> = (0..nh).map(|i| signed_wavenumber(i, n, spec.box_length)).collect();
        let kyz: Vec<f64> = (0..n).map(|i| signed_wavenumber(i, n, spec.box_length)).collect();
        let mut k2 = Vec::with_capacity(fft.spectral_len());
        let mut dealias = Vec::with_capacity(fft.spectral_len());
        for z in 0..n {
            for y in 0..n {
                for x in 0..nh {
                    k2.push(kx[x] * kx[x] + kyz[y] * kyz[y] + kyz[z] * kyz[z]);
                    let keep = [x as i64, signed_index(y, n), signed_index(z, n)]
                        .iter()
                        .all(|&m| 3 * m.unsigned_abs() < n as u64);
                    dealias.push(keep);
                }
            }
        }

        let q = if spec.m_max == 0 { 1 } else { 3 * spec.m_max + 1 };
        let npts = q.pow(spec.d_active as u32);
        let mut torus_points = Vec::with_capacity(npts);
        for p in 0..npts {
            let mut y = [0.0; TORUS_DIM];
            let mut rest = p;
            for j in 0..spec.d_active {
                y[j] = (rest % q) as f64 * spec.torus_period / q as f64;
                rest /= q;
            }
            torus_points.push(y);
        }
        let basis = torus_points
            .iter()
            .map(|y| slots.iter().map(|s| basis_value(s, y)).collect())
            .collect();

        Ok(Arc::new(Grid {
            spec,
            slots,
            zero_slot,
            fft,
            coords,
            kx,
            kyz,
            k2,
            dealias,
            torus_points,
            basis,
        }))
    }

    pub fn n(&self) -> usize {
        self.spec.n_x
    }

    pub fn point_count(&self) -> usize {
        self.spec.n_x.pow(3)
    }

    pub fn spectral_len(&self) -> usize {
        self.fft.spectral_len()
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn dx(&self) -> f64 {
        self.spec.dx()
    }

    /// Spatial cell volume.
    pub fn cell(&self) -> f64 {
        self.dx().powi(3)
    }

    /// Volume of the torus.
    pub fn torus_volume(&self) -> f64 {
        self.spec.torus_period.powi(TORUS_DIM as i32)
    }

    /// Weight of a slot in `∫_K f² = vol_K Σ_s w_s c_s²`.
    pub fn slot_weight(&self, s: usize) -> f64 {
        match self.slots[s].kind {
            SlotKind::Zero => 1.0,
            _ => 0.5,
        }
    }

    /// Torus axis (4..10) are live when the slot set reaches them.
    pub fn active_torus_axes(&self) -> impl Iterator<Item = usize> {
        TORUS0..TORUS0 + self.spec.d_active
    }

    pub fn slot_of_mode(&self, n: &[i32; TORUS_DIM]) -> Option<usize> {
        if n[self.spec.d_active..].iter().any(|&k| k != 0)
            || n.iter().any(|&k| k.unsigned_abs() as usize > self.spec.m_max)
        {
            return None;
        }
        Some(slot_of(&self.spec, n))
    }

    /// Cos slot of mode `n` (first nonzero entry made positive).
    pub fn cos_slot(&self, n: &[i32; TORUS_DIM]) -> Option<usize> {
        let s = self.slot_of_mode(n)?;
        Some(match self.slots[s].kind {
            SlotKind::Sin => self.slots[s].partner,
            _ => s,
        })
    }

    /// Physical position of flat index `i` as `(x, y, z)`.
    pub fn position(&self, i: usize) -> [f64; 3] {
        let n = self.n();
        let x = i % n;
        let y = (i / n) % n;
        let z = i / (n * n);
        [self.coords[x], self.coords[y], self.coords[z]]
    }

    pub fn radius(&self, i: usize) -> f64 {
        let p = self.position(i);
        (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
    }

    /// Coordinate multiplier `x_axis` (axis 1..3) on the whole grid.
    pub fn coordinate(&self, axis: usize) -> Vec<f64> {
        (0..self.point_count())
            .map(|i| self.position(i)[axis - 1])
            .collect()
    }

    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        self.fft.forward(data)
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        self.fft.inverse(spec)
    }

    /// Wavenumber along spatial axis 1..3 at spectral index `i`.
    pub fn wavenumber(&self, axis: usize, i: usize) -> f64 {
        let n = self.n();
        let nh = self.fft.nh();
        match axis {
            1 => self.kx[i % nh],
            2 => self.kyz[(i / nh) % n],
            3 => self.kyz[i / (nh * n)],
            _ => panic!("spatial axis {axis}"),
        }
    }

    /// Multiply a spectrum by `i k_axis` in place.
    pub fn apply_partial(&self, spec: &mut [Complex64], axis: usize) {
        for (i, v) in spec.iter_mut().enumerate() {
            let k = self.wavenumber(axis, i);
            *v = Complex64::new(-k * v.im, k * v.re);
        }
    }

    /// `|k|²` per spectral index (Nyquist bins contribute nothing).
    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.dealias
    }

    pub fn apply_dealias(&self, spec: &mut [Complex64]) {
        for (v, &keep) in spec.iter_mut().zip(&self.dealias) {
            if !keep {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Spatial partial derivative of a physical array, axis 1..3.
    pub fn partial(&self, data: &[f64], axis: usize) -> Vec<f64> {
        let mut s = self.forward(data);
        self.apply_partial(&mut s, axis);
        self.inverse(&s)
    }

    /// All three spatial partials from a single forward transform.
    pub fn gradient(&self, data: &[f64]) -> [Vec<f64>; 3] {
        let s = self.forward(data);
        [1, 2, 3].map(|a| {
            let mut t = s.clone();
            self.apply_partial(&mut t, a);
            self.inverse(&t)
        })
    }

    /// Selected spatial partials from a single forward transform.
    pub fn partials(&self, data: &[f64], axes: &[usize]) -> Vec<Vec<f64>> {
        let s = self.forward(data);
        axes.iter()
            .map(|&a| {
                let mut t = s.clone();
                self.apply_partial(&mut t, a);
                self.inverse(&t)
            })
            .collect()
    }

    pub fn laplacian(&self, data: &[f64]) -> Vec<f64> {
        let mut s = self.forward(data);
        for (v, k2) in s.iter_mut().zip(&self.k2) {
            *v *= -k2;
        }
        self.inverse(&s)
    }

    pub fn torus_point_count(&self) -> usize {
        self.torus_points.len()
    }

    pub fn basis_at(&self, point: usize, slot: usize) -> f64 {
        self.basis[point][slot]
    }

    /// Galerkin projection weight of point values onto slot `s`.
    pub fn projection_weight(&self, s: usize) -> f64 {
        let w = match self.slots[s].kind {
            SlotKind::Zero => 1.0,
            _ => 2.0,
        };
        w / self.torus_point_count() as f64
    }
}

fn basis_value(slot: &Slot, y: &[f64; TORUS_DIM]) -> f64 {
    let th: f64 = slot.kappa.iter().zip(y).map(|(k, y)| k * y).sum();
    match slot.kind {
        SlotKind::Zero => 1.0,
        SlotKind::Cos => th.cos(),
        SlotKind::Sin => th.sin(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_pair_up() {
        let g = Grid::new(GridSpec::new(8, 8.0, 2, 1)).unwrap();
        assert_eq!(g.slot_count(), 9);
        assert_eq!(g.slots[g.zero_slot].kind, SlotKind::Zero);
        let mut cos = 0;
        for (i, s) in g.slots.iter().enumerate() {
            assert_eq!(g.slots[s.partner].partner, i);
            if s.kind == SlotKind::Cos {
                cos += 1;
                assert_eq!(g.slots[s.partner].kind, SlotKind::Sin);
                assert_eq!(g.slots[s.partner].mode, s.mode);
            }
        }
        assert_eq!(cos, 4);
    }

    #[test]
    fn quadrature_is_orthogonal() {
        let g = Grid::new(GridSpec::new(4, 4.0, 2, 1)).unwrap();
        for a in 0..g.slot_count() {
            for b in 0..g.slot_count() {
                let ip: f64 = (0..g.torus_point_count())
                    .map(|p| g.basis_at(p, a) * g.basis_at(p, b))
                    .sum::<f64>()
                    * g.projection_weight(a);
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-13, "{a} {b} {ip}");
            }
        }
    }

    #[test]
    fn spectral_derivative_of_sine() {
        let g = Grid::new(GridSpec::new(16, 2.0 * PI, 0, 0)).unwrap();
        let f: Vec<f64> = (0..g.point_count()).map(|i| (2.0 * g.position(i)[1]).sin()).collect();
        let df = g.partial(&f, 2);
        for i in 0..g.point_count() {
            let expect = 2.0 * (2.0 * g.position(i)[1]).cos();
            assert!((df[i] - expect).abs() < 1e-12);
        }
        let lap = g.laplacian(&f);
        for i in 0..g.point_count() {
            assert!((lap[i] + 4.0 * f[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_odd_grid() {
        assert!(Grid::new(GridSpec::new(7, 1.0, 0, 0)).is_err());
        assert!(Grid::new(GridSpec::new(8, 1.0, 8, 0)).is_err());
    }
}
