//! Form-valued fields on the grid.
//!
//! A [`FormField`] stores one physical array per `(torus slot, blade)` pair.
//! Storage is sparse: a missing key is an identically zero component. Keys
//! are ordered slot-major, then by blade mask, which within one degree is the
//! canonical ordinal order; every reduction iterates in that order.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::blade::{self, blade_count, mask_of};
use crate::error::{Error, Result};
use crate::grid::Grid;

pub type Key = (usize, u16);

#[derive(Clone, Debug)]
pub struct FormField {
    grid: Arc<Grid>,
    degree: usize,
    comps: BTreeMap<Key, Vec<f64>>,
}

impl PartialEq for FormField {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.grid.spec == other.grid.spec && self.comps == other.comps
    }
}

impl FormField {
    pub fn zero(grid: &Arc<Grid>, degree: usize) -> Self {
        FormField {
            grid: grid.clone(),
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, slot: usize, mask: u16) -> Option<&[f64]> {
        self.comps.get(&(slot, mask)).map(|v| v.as_slice())
    }

    pub fn keys(&self) -> impl Iterator<Item = Key> + '_ {
        self.comps.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Key, &[f64])> {
        self.comps.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (Key, &mut Vec<f64>)> {
        self.comps.iter_mut().map(|(k, v)| (*k, v))
    }

    pub fn insert(&mut self, slot: usize, mask: u16, data: Vec<f64>) {
        assert_eq!(blade::degree(mask), self.degree, "blade degree");
        assert_eq!(data.len(), self.grid.point_count(), "component length");
        assert!(slot < self.grid.slot_count(), "slot index");
        self.comps.insert((slot, mask), data);
    }

    pub fn remove(&mut self, slot: usize, mask: u16) -> Option<Vec<f64>> {
        self.comps.remove(&(slot, mask))
    }

    /// Mutable component, created as zeros if absent.
    pub fn entry(&mut self, slot: usize, mask: u16) -> &mut Vec<f64> {
        debug_assert_eq!(blade::degree(mask), self.degree);
        let n = self.grid.point_count();
        self.comps.entry((slot, mask)).or_insert_with(|| vec![0.0; n])
    }

    /// `self[slot, mask] += c * data`.
    pub fn accumulate(&mut self, slot: usize, mask: u16, data: &[f64], c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.entry(slot, mask);
        for (a, b) in e.iter_mut().zip(data) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for v in self.comps.values_mut() {
            for x in v.iter_mut() {
                *x *= c;
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &FormField) -> Result<()> {
        if other.degree != self.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        for ((s, m), v) in &other.comps {
            self.accumulate(*s, *m, v, c);
        }
        Ok(())
    }

    pub fn add(&self, other: &FormField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &FormField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Keep only the slots accepted by `keep`.
    pub fn filter_slots(&self, keep: impl Fn(usize) -> bool) -> Self {
        FormField {
            grid: self.grid.clone(),
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .filter(|((s, _), _)| keep(*s))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Apply a per-component map, keeping keys.
    pub fn map_values(&self, f: impl Fn(Key, &[f64]) -> Vec<f64>) -> Self {
        FormField {
            grid: self.grid.clone(),
            degree: self.degree,
            comps: self.comps.iter().map(|(k, v)| (*k, f(*k, v))).collect(),
        }
    }

    pub(crate) fn from_parts(grid: &Arc<Grid>, degree: usize, comps: BTreeMap<Key, Vec<f64>>) -> Self {
        FormField {
            grid: grid.clone(),
            degree,
            comps,
        }
    }

    /// Drop components that are identically zero.
    pub fn prune(&mut self) {
        self.comps.retain(|_, v| v.iter().any(|x| *x != 0.0));
    }

    /// `‖f‖²` over ℝ³ × K: cell volume × torus volume × Σ_slots w_s Σ c².
    pub fn norm_sq(&self) -> f64 {
        let scale = self.grid.cell() * self.grid.torus_volume();
        let mut total = 0.0;
        for ((s, _), v) in &self.comps {
            let w = self.grid.slot_weight(*s);
            total += w * v.iter().map(|x| x * x).sum::<f64>();
        }
        total * scale
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .values()
            .flat_map(|v| v.iter())
            .fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.comps.values().all(|v| v.iter().all(|x| x.is_finite()))
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }

    /// Component values at torus quadrature point `p`, summed over slots.
    pub fn at_torus_point(&self, mask: u16, p: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.point_count()];
        for ((s, m), v) in &self.comps {
            if *m != mask {
                continue;
            }
            let b = self.grid.basis_at(p, *s);
            if b == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += b * x;
            }
        }
        out
    }

    /// Distinct blades present in any slot.
    pub fn masks(&self) -> Vec<u16> {
        let mut m: Vec<u16> = self.comps.keys().map(|k| k.1).collect();
        m.sort_unstable();
        m.dedup();
        m
    }

    /// Dense `[slot][ordinal][z][y][x]` array over every blade of the degree.
    pub fn to_dense(&self) -> Vec<f64> {
        let np = self.grid.point_count();
        let nb = blade_count(self.degree);
        let mut out = vec![0.0; self.grid.slot_count() * nb * np];
        for ((s, m), v) in &self.comps {
            let off = (s * nb + blade::ordinal(*m)) * np;
            out[off..off + np].copy_from_slice(v);
        }
        out
    }

    /// Inverse of [`Self::to_dense`]; all-zero components are left absent.
    pub fn from_dense(grid: &Arc<Grid>, degree: usize, data: &[f64]) -> Result<Self> {
        let np = grid.point_count();
        let nb = blade_count(degree);
        if data.len() != grid.slot_count() * nb * np {
            return Err(Error::Shape(format!(
                "dense field of {} values does not match grid",
                data.len()
            )));
        }
        let mut f = FormField::zero(grid, degree);
        for s in 0..grid.slot_count() {
            for o in 0..nb {
                let off = (s * nb + o) * np;
                let chunk = &data[off..off + np];
                if chunk.iter().any(|x| x.to_bits() != 0) {
                    f.comps.insert((s, mask_of(degree, o)), chunk.to_vec());
                }
            }
        }
        Ok(f)
    }
}

/// A field together with its first time derivatives at one instant:
/// `levels[m] = ∂_t^m u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub time: f64,
    pub levels: Vec<FormField>,
}

impl Jet {
    pub fn new(time: f64, levels: Vec<FormField>) -> Result<Self> {
        let Some(first) = levels.first() else {
            return Err(Error::Shape("jet needs at least one level".into()));
        };
        let d = first.degree();
        if levels.iter().any(|l| l.degree() != d) {
            return Err(Error::Shape("jet levels differ in degree".into()));
        }
        Ok(Jet { time, levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn degree(&self) -> usize {
        self.levels[0].degree()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.levels[0].grid()
    }

    pub fn value(&self) -> &FormField {
        &self.levels[0]
    }

    pub fn truncated(&self, depth: usize) -> Jet {
        Jet {
            time: self.time,
            levels: self.levels[..depth.min(self.levels.len())].to_vec(),
        }
    }

    /// Level-wise map.
    pub fn map(&self, f: impl Fn(&FormField) -> FormField) -> Jet {
        Jet {
            time: self.time,
            levels: self.levels.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&FormField) -> Result<FormField>) -> Result<Jet> {
        Ok(Jet {
            time: self.time,
            levels: self.levels.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Level-wise sum over the common depth.
    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Jet, c: f64) -> Result<Jet> {
        let depth = self.depth().min(other.depth());
        let mut levels = Vec::with_capacity(depth);
        for m in 0..depth {
            let mut l = self.levels[m].clone();
            l.axpy(c, &other.levels[m])?;
            levels.push(l);
        }
        Ok(Jet {
            time: self.time,
            levels,
        })
    }

    pub fn scaled(&self, c: f64) -> Jet {
        self.map(|l| l.scaled(c))
    }
}

/// The Cauchy pair `(u, ∂_t u)` at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub u: FormField,
    pub ut: FormField,
    pub time: f64,
}

impl FieldState {
    pub fn zero(grid: &Arc<Grid>, degree: usize) -> Self {
        FieldState {
            u: FormField::zero(grid, degree),
            ut: FormField::zero(grid, degree),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    pub fn jet(&self) -> Jet {
        Jet {
            time: self.time,
            levels: vec![self.u.clone(), self.ut.clone()],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.ut.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn dense_round_trip() {
        let g = Grid::new(GridSpec::new(4, 4.0, 1, 1)).unwrap();
        let mut f = FormField::zero(&g, 3);
        let data: Vec<f64> = (0..64).map(|i| i as f64 - 3.5).collect();
        f.insert(2, 0b111, data.clone());
        f.insert(0, 0b1110000, data.iter().map(|x| x * 2.0).collect());
        let back = FormField::from_dense(&g, 3, &f.to_dense()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn norm_uses_slot_weights() {
        let g = Grid::new(GridSpec::new(4, 4.0, 1, 1)).unwrap();
        let mut f = FormField::zero(&g, 0);
        f.insert(g.zero_slot, 0, vec![1.0; 64]);
        assert!((f.norm_sq() - 64.0).abs() < 1e-12);
        let mut h = FormField::zero(&g, 0);
        h.insert(2, 0, vec![1.0; 64]);
        assert!((h.norm_sq() - 32.0).abs() < 1e-12);
    }
}
