//! Classical RK4 on the spectral first-order system
//! `û' = v̂`, `v̂' = −(|k|² + λ²) û + F̂`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;

use crate::calculus::{d_full, d_support};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{FieldState, FormField, Jet, Key};
use crate::grid::{Grid, SlotKind};
use crate::nonlinearity::{product_slots, star_square, PairTable};

pub type Spectrum = Vec<Vec<Complex64>>;

/// Spectral coefficients of `(u, u_t)` on a fixed key set.
#[derive(Clone, Debug)]
pub struct SpectralState {
    pub time: f64,
    pub u: Spectrum,
    pub ut: Spectrum,
}

impl SpectralState {
    pub fn is_finite(&self) -> bool {
        self.u
            .iter()
            .chain(&self.ut)
            .all(|v| v.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }
}

/// Source callback: `F̂(t, state)` on the integrator's keys, or `None` for
/// the homogeneous equation.
pub type SourceFn<'a> = dyn FnMut(f64, &SpectralState) -> Result<Option<Spectrum>> + 'a;

/// Smallest key set closed under the evolution: slot partners, and for
/// the nonlinear equation every blade and slot the source can reach.
pub fn closure_keys(grid: &Grid, initial: &BTreeSet<Key>, nonlinear: bool) -> Vec<Key> {
    if !nonlinear {
        return initial.iter().copied().collect();
    }
    let mut slots: BTreeSet<usize> = initial.iter().map(|k| k.0).collect();
    let mut masks: BTreeSet<u16> = initial.iter().map(|k| k.1).collect();
    let table = PairTable::for_three_forms();
    loop {
        let partners: Vec<usize> = slots.iter().map(|&s| grid.slots[s].partner).collect();
        slots.extend(partners);
        let mut axes = vec![0, 1, 2, 3];
        if slots.iter().any(|&s| grid.slots[s].kind != SlotKind::Zero) {
            axes.extend(grid.active_torus_axes());
        }
        let m: Vec<u16> = masks.iter().copied().collect();
        let du: BTreeSet<u16> = d_support(&m, &axes).into_iter().collect();
        let reach = table.reachable(&du);
        let new_slots = product_slots(grid, &slots, &slots);
        let before = (slots.len(), masks.len());
        masks.extend(reach);
        slots.extend(new_slots);
        if (slots.len(), masks.len()) == before {
            break;
        }
    }
    slots
        .iter()
        .flat_map(|&s| masks.iter().map(move |&m| (s, m)))
        .collect()
}

pub struct Integrator {
    grid: Arc<Grid>,
    degree: usize,
    keys: Vec<Key>,
    exec: Exec,
}

impl Integrator {
    pub fn new(grid: &Arc<Grid>, degree: usize, keys: Vec<Key>, exec: Exec) -> Self {
        Integrator {
            grid: grid.clone(),
            degree,
            keys,
            exec,
        }
    }

    pub fn keys(&self) -> &[Key] {
        &self.keys
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Transform a physical state; components outside the key set must vanish.
    pub fn to_spectral(&self, state: &FieldState) -> Result<SpectralState> {
        for f in [&state.u, &state.ut] {
            if f.degree() != self.degree {
                return Err(Error::DegreeMismatch(f.degree(), self.degree));
            }
            for (k, v) in f.iter() {
                if !self.keys.contains(&k) && v.iter().any(|x| *x != 0.0) {
                    return Err(Error::Shape(format!("component {k:?} outside the evolved set")));
                }
            }
        }
        let grid = self.grid.clone();
        let transform = |f: &FormField| -> Spectrum {
            let items: Vec<Option<&[f64]>> = self.keys.iter().map(|&(s, m)| f.get(s, m)).collect();
            self.exec.map(items, |v| match v {
                Some(v) => grid.forward(v),
                None => vec![Complex64::new(0.0, 0.0); grid.spectral_len()],
            })
        };
        Ok(SpectralState {
            time: state.time,
            u: transform(&state.u),
            ut: transform(&state.ut),
        })
    }

    pub fn to_physical(&self, s: &SpectralState) -> FieldState {
        FieldState {
            u: self.field(&s.u),
            ut: self.field(&s.ut),
            time: s.time,
        }
    }

    /// Physical field from spectral components, dropping all-zero ones.
    pub fn field(&self, spec: &Spectrum) -> FormField {
        let grid = self.grid.clone();
        let items: Vec<(Key, &Vec<Complex64>)> = self.keys.iter().copied().zip(spec).collect();
        let comps = self.exec.map(items, |(k, v)| {
            if v.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                None
            } else {
                Some((k, grid.inverse(v)))
            }
        });
        let mut f = FormField::zero(&self.grid, self.degree);
        for (k, v) in comps.into_iter().flatten() {
            f.insert(k.0, k.1, v);
        }
        f
    }

    /// Dealiased spectral image of a physical source on the key set.
    pub fn source_spectrum(&self, f: &FormField, dealias: bool) -> Result<Spectrum> {
        for (k, v) in f.iter() {
            if !self.keys.contains(&k) && v.iter().any(|x| *x != 0.0) {
                return Err(Error::Shape(format!("source component {k:?} outside the evolved set")));
            }
        }
        let grid = self.grid.clone();
        let items: Vec<Option<&[f64]>> = self.keys.iter().map(|&(s, m)| f.get(s, m)).collect();
        Ok(self.exec.map(items, |v| match v {
            Some(v) => {
                let mut c = grid.forward(v);
                if dealias {
                    grid.apply_dealias(&mut c);
                }
                c
            }
            None => vec![Complex64::new(0.0, 0.0); grid.spectral_len()],
        }))
    }

    /// `*(du ∧ du)` of a spectral state, dealiased, on the key set.
    pub fn nonlinear_source(&self, s: &SpectralState) -> Result<Spectrum> {
        let phys = self.to_physical(s);
        let j = Jet::new(s.time, vec![phys.u, phys.ut])?;
        let du = d_full(&j, self.exec)?.levels.remove(0);
        let f = star_square(&du, self.exec)?;
        f.check_finite("source output")?;
        self.source_spectrum(&f, true)
    }

    fn rhs(&self, s: &SpectralState, source: Option<Spectrum>) -> (Spectrum, Spectrum) {
        let k2 = self.grid.k2();
        let items: Vec<usize> = (0..self.keys.len()).collect();
        let src = source.as_ref();
        let acc = self.exec.map(items, |i| {
            let lam = self.grid.slots[self.keys[i].0].lambda;
            let u = &s.u[i];
            let mut a: Vec<Complex64> = u.iter().zip(k2).map(|(c, k)| -c * (k + lam * lam)).collect();
            if let Some(f) = src {
                for (x, y) in a.iter_mut().zip(&f[i]) {
                    *x += y;
                }
            }
            a
        });
        (s.ut.clone(), acc)
    }

    fn shifted(&self, base: &SpectralState, k: &(Spectrum, Spectrum), h: f64, time: f64) -> SpectralState {
        let add = |x: &Spectrum, y: &Spectrum| -> Spectrum {
            x.iter()
                .zip(y)
                .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p + q * h).collect())
                .collect()
        };
        SpectralState {
            time,
            u: add(&base.u, &k.0),
            ut: add(&base.ut, &k.1),
        }
    }

    /// One RK4 step of size `dt`.
    pub fn step(&self, s: &SpectralState, dt: f64, source: &mut SourceFn<'_>) -> Result<SpectralState> {
        let t = s.time;
        let k1 = self.rhs(s, source(t, s)?);
        let y2 = self.shifted(s, &k1, 0.5 * dt, t + 0.5 * dt);
        let k2 = self.rhs(&y2, source(t + 0.5 * dt, &y2)?);
        let y3 = self.shifted(s, &k2, 0.5 * dt, t + 0.5 * dt);
        let k3 = self.rhs(&y3, source(t + 0.5 * dt, &y3)?);
        let y4 = self.shifted(s, &k3, dt, t + dt);
        let k4 = self.rhs(&y4, source(t + dt, &y4)?);
        let c = dt / 6.0;
        let combine = |base: &Spectrum, a: &Spectrum, b: &Spectrum, d: &Spectrum, e: &Spectrum| -> Spectrum {
            (0..base.len())
                .map(|i| {
                    (0..base[i].len())
                        .map(|j| base[i][j] + c * (a[i][j] + 2.0 * b[i][j] + 2.0 * d[i][j] + e[i][j]))
                        .collect()
                })
                .collect()
        };
        let next = SpectralState {
            time: t + dt,
            u: combine(&s.u, &k1.0, &k2.0, &k3.0, &k4.0),
            ut: combine(&s.ut, &k1.1, &k2.1, &k3.1, &k4.1),
        };
        if !next.is_finite() {
            return Err(Error::Diverged {
                time: t + dt,
                last_good: t,
            });
        }
        Ok(next)
    }

    /// Exact homogeneous propagation by `tau` (cos/sin per mode).
    pub fn propagate_free(&self, s: &SpectralState, tau: f64) -> SpectralState {
        let k2 = self.grid.k2();
        // one propagator table per distinct torus eigenvalue
        let mut tables: Vec<(f64, Vec<[f64; 3]>)> = Vec::new();
        for &(slot, _) in &self.keys {
            let lam = self.grid.slots[slot].lambda;
            if tables.iter().all(|(l, _)| *l != lam) {
                let t = k2
                    .iter()
                    .map(|k| {
                        let w = (k + lam * lam).sqrt();
                        if w > 0.0 {
                            let (sn, c) = (w * tau).sin_cos();
                            [c, sn / w, -w * sn]
                        } else {
                            [1.0, tau, 0.0]
                        }
                    })
                    .collect();
                tables.push((lam, t));
            }
        }
        let items: Vec<usize> = (0..self.keys.len()).collect();
        let out = self.exec.map(items, |i| {
            let lam = self.grid.slots[self.keys[i].0].lambda;
            let table = &tables.iter().find(|(l, _)| *l == lam).expect("table built above").1;
            let mut u = Vec::with_capacity(table.len());
            let mut ut = Vec::with_capacity(table.len());
            for ((a, b), [c, sn, wsn]) in s.u[i].iter().zip(&s.ut[i]).zip(table) {
                u.push(a * c + b * sn);
                ut.push(a * wsn + b * c);
            }
            (u, ut)
        });
        let (u, ut) = out.into_iter().unzip();
        SpectralState {
            time: s.time + tau,
            u,
            ut,
        }
    }
}
