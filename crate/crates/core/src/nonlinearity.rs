//! The quadratic source `*(du ∧ du)`, its projection splitting, and null-form
//! machinery.
//!
//! Products are formed pointwise in `x` and at torus quadrature points, then
//! projected back onto slots. The quadrature has `3m + 1` points per active
//! axis, which integrates (band m) × (band m) × (band m) exactly, so the
//! projection is an exact Galerkin truncation of the product.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use crate::algebra::blade::{self, blade_count, blades, reorder_sign, MetricSignature, DIM, FULL};
use crate::algebra::oracle::{oracle_star_sign, oracle_wedge_sign, permutation_sign_oracle};
use crate::algebra::PointForm;
use crate::calculus::{self, d_full, project_p0, project_pgt0};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{FieldState, FormField, Jet};
use crate::grid::{Grid, SlotKind, TORUS_DIM};

const SIG: MetricSignature = MetricSignature::lorentzian();

/// Output slots reachable by products of fields supported on `a` and `b`.
pub(crate) fn product_slots(grid: &Grid, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &sa in a {
        for &sb in b {
            let ra = grid.slots[sa].mode.n;
            let rb = grid.slots[sb].mode.n;
            for sign in [1i32, -1] {
                let mut n = [0i32; TORUS_DIM];
                for j in 0..TORUS_DIM {
                    n[j] = ra[j] + sign * rb[j];
                }
                if let Some(s) = grid.slot_of_mode(&n) {
                    out.insert(s);
                    out.insert(grid.slots[s].partner);
                }
            }
        }
    }
    out
}

fn slot_set(f: &FormField) -> BTreeSet<usize> {
    f.keys().map(|k| k.0).collect()
}

/// Component values at the torus points used for a product.
struct PointValues {
    values: BTreeMap<u16, Vec<Vec<f64>>>,
}

fn only_zero_slot(grid: &Grid, slots: &BTreeSet<usize>) -> bool {
    slots.iter().all(|&s| s == grid.zero_slot)
}

fn point_values(f: &FormField, npts: usize, exec: Exec) -> PointValues {
    let masks = f.masks();
    let vals = exec.map(masks, |m| {
        let per_point: Vec<Vec<f64>> = (0..npts).map(|p| f.at_torus_point(m, p)).collect();
        (m, per_point)
    });
    PointValues {
        values: vals.into_iter().collect(),
    }
}

/// Project point values of one output blade onto the requested slots.
fn project_into(
    out: &mut FormField,
    mask: u16,
    pts: &[Vec<f64>],
    slots: &BTreeSet<usize>,
    zero_only: bool,
) {
    let grid = out.grid().clone();
    if zero_only {
        out.accumulate(grid.zero_slot, mask, &pts[0], 1.0);
        return;
    }
    for &s in slots {
        let w = grid.projection_weight(s);
        let mut acc = vec![0.0; grid.point_count()];
        for (p, v) in pts.iter().enumerate() {
            let b = grid.basis_at(p, s) * w;
            if b == 0.0 {
                continue;
            }
            for (a, x) in acc.iter_mut().zip(v) {
                *a += b * x;
            }
        }
        out.accumulate(s, mask, &acc, 1.0);
    }
}

/// Product layout shared by every bilinear evaluation.
struct ProductPlan {
    zero_only: bool,
    npts: usize,
    slots: BTreeSet<usize>,
}

fn plan(a: &FormField, b: &FormField) -> ProductPlan {
    let grid = a.grid();
    let sa = slot_set(a);
    let sb = slot_set(b);
    let zero_only = only_zero_slot(grid, &sa) && only_zero_slot(grid, &sb);
    ProductPlan {
        zero_only,
        npts: if zero_only { 1 } else { grid.torus_point_count() },
        slots: if zero_only {
            [grid.zero_slot].into_iter().collect()
        } else {
            product_slots(grid, &sa, &sb)
        },
    }
}

/// `*(a ∧ b)` computed blade pair by blade pair from bitmask signs.
pub fn star_wedge(a: &FormField, b: &FormField, exec: Exec) -> Result<FormField> {
    let (p, q) = (a.degree(), b.degree());
    if p + q > DIM {
        return Err(Error::DegreeOverflow { left: p, right: q });
    }
    let grid = a.grid().clone();
    let mut out = FormField::zero(&grid, DIM - p - q);
    if a.is_empty() || b.is_empty() {
        return Ok(out);
    }
    let pl = plan(a, b);
    let va = point_values(a, pl.npts, exec);
    let vb = point_values(b, pl.npts, exec);
    // group contributing blade pairs by output blade
    let mut by_out: BTreeMap<u16, Vec<(u16, u16, f64)>> = BTreeMap::new();
    for &ma in va.values.keys() {
        for &mb in vb.values.keys() {
            let s = reorder_sign(ma, mb);
            if s == 0 {
                continue;
            }
            let (t, s2) = blade::star_blade(ma | mb, &SIG);
            by_out.entry(t).or_default().push((ma, mb, (s * s2) as f64));
        }
    }
    let np = grid.point_count();
    let jobs: Vec<(u16, Vec<(u16, u16, f64)>)> = by_out.into_iter().collect();
    let results = exec.map(jobs, |(t, terms)| {
        let pts: Vec<Vec<f64>> = (0..pl.npts)
            .map(|p| {
                let mut acc = vec![0.0; np];
                for &(ma, mb, c) in &terms {
                    let x = &va.values[&ma][p];
                    let y = &vb.values[&mb][p];
                    for i in 0..np {
                        acc[i] += c * x[i] * y[i];
                    }
                }
                acc
            })
            .collect();
        (t, pts)
    });
    for (t, pts) in results {
        project_into(&mut out, t, &pts, &pl.slots, pl.zero_only);
    }
    Ok(out)
}

/// Symmetric pair table for `*(w ∧ w)` with `w` of even degree `k`:
/// for every output blade, unordered pairs `A < B` with `A ⊔ B = T^c` and a
/// coefficient that already includes the factor 2 from `A ∧ B = B ∧ A`.
/// Every sign comes from the brute-force oracle.
pub struct PairTable {
    pub degree: usize,
    pub entries: BTreeMap<u16, Vec<(u16, u16, f64)>>,
}

impl PairTable {
    pub fn build(k: usize) -> PairTable {
        assert!(k % 2 == 0 && 2 * k <= DIM);
        let mut entries: BTreeMap<u16, Vec<(u16, u16, f64)>> = BTreeMap::new();
        for &w in blades(2 * k) {
            let t = FULL & !w;
            let star = oracle_star_sign(w, &SIG) as f64;
            for &a in blades(k) {
                if a & !w != 0 {
                    continue;
                }
                let b = w & !a;
                if a >= b {
                    continue;
                }
                let s = oracle_wedge_sign(a, b) as f64;
                entries.entry(t).or_default().push((a, b, 2.0 * s * star));
            }
        }
        PairTable { degree: k, entries }
    }

    /// Table for 4-form gradients of a 3-form, built once.
    pub fn for_three_forms() -> &'static PairTable {
        static T: OnceLock<PairTable> = OnceLock::new();
        T.get_or_init(|| PairTable::build(4))
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Output blades reachable from an input blade set.
    pub fn reachable(&self, present: &BTreeSet<u16>) -> BTreeSet<u16> {
        self.entries
            .iter()
            .filter(|(_, terms)| terms.iter().any(|(a, b, _)| present.contains(a) && present.contains(b)))
            .map(|(t, _)| *t)
            .collect()
    }
}

/// `*(w ∧ w)` through the oracle-built symmetric pair table.
pub fn star_square(w: &FormField, exec: Exec) -> Result<FormField> {
    let k = w.degree();
    let table = if k == 4 {
        PairTable::for_three_forms()
    } else {
        return Err(Error::DegreeMismatch(k, 4));
    };
    let grid = w.grid().clone();
    let mut out = FormField::zero(&grid, DIM - 2 * k);
    if w.is_empty() {
        return Ok(out);
    }
    let pl = plan(w, w);
    let vw = point_values(w, pl.npts, exec);
    let np = grid.point_count();
    let jobs: Vec<(u16, Vec<(u16, u16, f64)>)> = table
        .entries
        .iter()
        .map(|(t, terms)| {
            let live: Vec<_> = terms
                .iter()
                .filter(|(a, b, _)| vw.values.contains_key(a) && vw.values.contains_key(b))
                .copied()
                .collect();
            (*t, live)
        })
        .filter(|(_, live)| !live.is_empty())
        .collect();
    let results = exec.map(jobs, |(t, terms)| {
        let pts: Vec<Vec<f64>> = (0..pl.npts)
            .map(|p| {
                let mut acc = vec![0.0; np];
                for &(a, b, c) in &terms {
                    let x = &vw.values[&a][p];
                    let y = &vw.values[&b][p];
                    for i in 0..np {
                        acc[i] += c * x[i] * y[i];
                    }
                }
                acc
            })
            .collect();
        (t, pts)
    });
    for (t, pts) in results {
        project_into(&mut out, t, &pts, &pl.slots, pl.zero_only);
    }
    Ok(out)
}

/// Pointwise product of two scalar fields.
pub fn scalar_product(f: &FormField, g: &FormField, exec: Exec) -> Result<FormField> {
    if f.degree() != 0 || g.degree() != 0 {
        return Err(Error::DegreeMismatch(f.degree(), 0));
    }
    let grid = f.grid().clone();
    let mut out = FormField::zero(&grid, 0);
    if f.is_empty() || g.is_empty() {
        return Ok(out);
    }
    let pl = plan(f, g);
    let vf = point_values(f, pl.npts, exec);
    let vg = point_values(g, pl.npts, exec);
    let pts: Vec<Vec<f64>> = (0..pl.npts)
        .map(|p| {
            vf.values[&0][p]
                .iter()
                .zip(&vg.values[&0][p])
                .map(|(a, b)| a * b)
                .collect()
        })
        .collect();
    project_into(&mut out, 0, &pts, &pl.slots, pl.zero_only);
    Ok(out)
}

/// Leibniz rule for a bilinear map on jets:
/// level m of the output is `Σ_i C(m,i) op(a_i, b_{m−i})`.
pub fn bilinear_jet(
    a: &Jet,
    b: &Jet,
    depth: usize,
    op: impl Fn(&FormField, &FormField) -> Result<FormField>,
) -> Result<Jet> {
    let depth = depth.min(a.depth()).min(b.depth());
    let mut levels = Vec::with_capacity(depth);
    for m in 0..depth {
        let mut acc: Option<FormField> = None;
        for i in 0..=m {
            let c = binom(m, i) as f64;
            let term = op(&a.levels[i], &b.levels[m - i])?;
            match acc.as_mut() {
                None => acc = Some(term.scaled(c)),
                Some(x) => x.axpy(c, &term)?,
            }
        }
        levels.push(acc.expect("m >= 0"));
    }
    Jet::new(a.time, levels)
}

fn binom(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Options shared by the source evaluations.
#[derive(Clone, Copy, Debug)]
pub struct SourceOptions {
    pub dealias: bool,
    pub exec: Exec,
}

impl Default for SourceOptions {
    fn default() -> Self {
        SourceOptions {
            dealias: true,
            exec: Exec::default(),
        }
    }
}

/// Apply the 2/3 mask to every component.
pub fn dealias_field(f: &FormField, exec: Exec) -> FormField {
    let grid = f.grid().clone();
    let mut spec = calculus::to_spectral(f, exec);
    for v in spec.values_mut() {
        grid.apply_dealias(v);
    }
    calculus::from_spectral(&grid, f.degree(), &spec, exec)
}

fn prepared(state: &FieldState, opts: SourceOptions) -> Jet {
    let j = state.jet();
    if opts.dealias {
        j.map(|l| dealias_field(l, opts.exec))
    } else {
        j
    }
}

/// `F = *(du ∧ du)` for the state's `(u, u_t)`.
pub fn full_source(state: &FieldState, opts: SourceOptions) -> Result<FormField> {
    state.u.check_finite("source input")?;
    state.ut.check_finite("source input")?;
    let j = prepared(state, opts);
    let du = d_full(&j, opts.exec)?;
    let mut f = star_square(&du.levels[0], opts.exec)?;
    if opts.dealias {
        f = dealias_field(&f, opts.exec);
    }
    f.check_finite("source output")?;
    Ok(f)
}

/// `B`, `C`, `D` and their recombination `B + 2C + D`.
#[derive(Clone, Debug)]
pub struct SplitSource {
    pub b_part: FormField,
    pub c_part: FormField,
    pub d_part: FormField,
    pub total: FormField,
}

pub fn split_source(state: &FieldState, opts: SourceOptions) -> Result<SplitSource> {
    let j = prepared(state, opts);
    let p0 = j.map(project_p0);
    let pg = j.map(project_pgt0);
    let a = d_full(&p0, opts.exec)?.levels.remove(0);
    let b = d_full(&pg, opts.exec)?.levels.remove(0);
    let fin = |f: FormField| if opts.dealias { dealias_field(&f, opts.exec) } else { f };
    let b_part = fin(star_wedge(&a, &a, opts.exec)?);
    let c_part = fin(star_wedge(&a, &b, opts.exec)?);
    let d_part = fin(star_wedge(&b, &b, opts.exec)?);
    let mut total = b_part.clone();
    total.axpy(2.0, &c_part)?;
    total.axpy(1.0, &d_part)?;
    Ok(SplitSource {
        b_part,
        c_part,
        d_part,
        total,
    })
}

/// Component `mask` of a form-valued jet as a scalar jet.
pub fn component_jet(j: &Jet, mask: u16) -> Jet {
    let grid = j.grid().clone();
    j.map(|l| {
        let mut f = FormField::zero(&grid, 0);
        for ((s, m), v) in l.iter() {
            if m == mask {
                f.insert(s, 0, v.to_vec());
            }
        }
        f
    })
}

/// `Q_ij(f, g) = ∂_i f ∂_j g − ∂_j f ∂_i g` for axes in `0..=3`, evaluated
/// at level 0. Time derivatives come from the jets.
pub fn q_form(f: &Jet, g: &Jet, i: usize, j: usize, exec: Exec) -> Result<FormField> {
    if f.degree() != 0 || g.degree() != 0 {
        return Err(Error::DegreeMismatch(f.degree(), 0));
    }
    if i > 3 || j > 3 {
        return Err(Error::InvalidAxis(i.max(j)));
    }
    let grad = |h: &Jet, a: usize| -> Result<FormField> { Ok(h.partial(a, exec)?.levels.remove(0)) };
    let (fi, fj, gi, gj) = (grad(f, i)?, grad(f, j)?, grad(g, i)?, grad(g, j)?);
    let mut out = scalar_product(&fi, &gj, exec)?;
    out.axpy(-1.0, &scalar_product(&fj, &gi, exec)?)?;
    Ok(out)
}

/// One term of the null-form expansion of `B`: `coef · Q_pq(u_S, u_T)`
/// contributes to output blade `out`.
#[derive(Clone, Debug, PartialEq)]
pub struct QTerm {
    pub out: u16,
    pub p: usize,
    pub q: usize,
    pub s: u16,
    pub t: u16,
    pub coef: f64,
}

fn padded(seq: &[usize]) -> Vec<usize> {
    let mut v = seq.to_vec();
    for a in 0..DIM {
        if !seq.contains(&a) {
            v.push(a);
        }
    }
    v
}

/// Expansion of `*(d_∥u ∧ d_∥u)` into null forms over the given blades,
/// with signs taken from the permutation oracle.
pub fn q_expansion(masks: &[u16]) -> Vec<QTerm> {
    let mut terms = Vec::new();
    for &s in masks {
        for &t in masks {
            if s & t != 0 {
                continue;
            }
            for p in 0..4usize {
                for q in p + 1..4 {
                    let pq = (1u16 << p) | (1u16 << q);
                    if pq & (s | t) != 0 {
                        continue;
                    }
                    let w = s | t | pq;
                    let mut seq = vec![p];
                    seq.extend(blade::indices(s));
                    seq.push(q);
                    seq.extend(blade::indices(t));
                    let sign = permutation_sign_oracle(&padded(&seq)).expect("11 labels")
                        * permutation_sign_oracle(&padded(&blade::indices(w))).expect("11 labels");
                    let star = oracle_star_sign(w, &SIG);
                    terms.push(QTerm {
                        out: FULL & !w,
                        p,
                        q,
                        s,
                        t,
                        coef: (sign * star) as f64,
                    });
                }
            }
        }
    }
    terms
}

/// `B = *(d_∥P₀u ∧ d_∥P₀u)` assembled from null forms of components.
pub fn b_via_null_forms(j: &Jet, exec: Exec) -> Result<FormField> {
    let p0 = j.map(project_p0);
    let masks = p0.levels[0].masks();
    let grid = j.grid().clone();
    let mut out = FormField::zero(&grid, DIM - 2 * (j.degree() + 1));
    let comps: BTreeMap<u16, Jet> = masks.iter().map(|&m| (m, component_jet(&p0, m))).collect();
    for term in q_expansion(&masks) {
        let q = q_form(&comps[&term.s], &comps[&term.t], term.p, term.q, exec)?;
        if let Some(v) = q.get(grid.zero_slot, 0) {
            out.accumulate(grid.zero_slot, term.out, v, term.coef);
        }
    }
    Ok(out)
}

/// Smallest box scale `s` (box length `2π s`) on which every spatial
/// component of the covectors is a lattice wavenumber.
fn lattice_scale(ks: &[[f64; 4]]) -> Option<u32> {
    (1..=64u32).find(|&s| {
        ks.iter()
            .all(|k| k[1..].iter().all(|c| ((c * s as f64) - (c * s as f64).round()).abs() < 1e-9))
    })
}

fn check_null(k: &[f64; 4]) -> Result<()> {
    let q = k[0] * k[0] - k[1] * k[1] - k[2] * k[2] - k[3] * k[3];
    let scale = k.iter().map(|c| c * c).sum::<f64>().max(1.0);
    if q.abs() > 1e-12 * scale {
        return Err(Error::NotNull(q));
    }
    Ok(())
}

/// `ω = A cos(k·x − k_0 t)` at `t = 0` as a two-level jet.
fn plane_wave(grid: &Arc<Grid>, k: &[f64; 4], a: &PointForm) -> Jet {
    let phase: Vec<f64> = (0..grid.point_count())
        .map(|i| {
            let x = grid.position(i);
            k[1] * x[0] + k[2] * x[1] + k[3] * x[2]
        })
        .collect();
    let mut u = FormField::zero(grid, a.degree());
    let mut ut = FormField::zero(grid, a.degree());
    for (m, c) in a.terms() {
        u.insert(grid.zero_slot, m, phase.iter().map(|p| c * p.cos()).collect());
        ut.insert(grid.zero_slot, m, phase.iter().map(|p| c * k[0] * p.sin()).collect());
    }
    Jet {
        time: 0.0,
        levels: vec![u, ut],
    }
}

/// `‖B(ω₁, ω₂)‖_∞ / (‖A₁‖‖A₂‖|k₁||k₂|)` for plane waves with covectors
/// `k1`, `k2`, computed without dealiasing.
pub fn plane_wave_pair_ratio(k1: [f64; 4], k2: [f64; 4], a1: &PointForm, a2: &PointForm) -> Result<f64> {
    if a1.degree() != 3 || a2.degree() != 3 {
        return Err(Error::DegreeMismatch(a1.degree().max(a2.degree()), 3));
    }
    let s = lattice_scale(&[k1, k2])
        .ok_or_else(|| Error::Config("covector is not commensurate with a periodic box".into()))?;
    let kmax = [k1, k2]
        .iter()
        .flat_map(|k| k[1..].iter())
        .map(|c| (c * s as f64).abs().round() as usize)
        .max()
        .unwrap_or(0);
    let n = (2 * (2 * kmax + 2)).max(8);
    let n = n + n % 2;
    let grid = Grid::new(crate::grid::GridSpec::new(n, 2.0 * std::f64::consts::PI * s as f64, 0, 0))?;
    let w1 = plane_wave(&grid, &k1, a1);
    let w2 = plane_wave(&grid, &k2, a2);
    let exec = Exec::default();
    let d1 = d_full(&w1, exec)?.levels.remove(0);
    let d2 = d_full(&w2, exec)?.levels.remove(0);
    let b = star_wedge(&d1, &d2, exec)?;
    let norm = |k: &[f64; 4]| k.iter().map(|c| c * c).sum::<f64>().sqrt();
    let den = a1.norm() * a2.norm() * norm(&k1) * norm(&k2);
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(b.max_abs() / den)
}

/// Null-form certificate: both waves share the null covector `k`.
pub fn null_plane_wave_test(k: [f64; 4], a1: &PointForm, a2: &PointForm) -> Result<f64> {
    check_null(&k)?;
    plane_wave_pair_ratio(k, k, a1, a2)
}

/// Random 3-form with entries in `[-1, 1]` on every blade.
pub fn random_point_form(rng: &mut impl rand::Rng) -> PointForm {
    let c = (0..blade_count(3)).map(|_| rng.random_range(-1.0..1.0)).collect();
    PointForm::from_coeffs(3, c).expect("165 coefficients")
}

/// Random lattice-compatible null covector: spatial part `m / s` with
/// integer `m`, time part `|m| / s`.
pub fn random_null_covector(rng: &mut impl rand::Rng) -> [f64; 4] {
    loop {
        let s = rng.random_range(1..=3) as f64;
        let m: [i64; 3] = [0, 1, 2].map(|_| rng.random_range(-3i64..=3));
        if m.iter().all(|&c| c == 0) {
            continue;
        }
        let sp = m.map(|c| c as f64 / s);
        let k0 = sp.iter().map(|c| c * c).sum::<f64>().sqrt();
        return [k0, sp[0], sp[1], sp[2]];
    }
}

/// Whether every slot of `f` is the cos or sin member of a nonzero mode.
pub fn is_positive_spectrum(f: &FormField) -> bool {
    let grid = f.grid();
    f.keys().all(|(s, _)| grid.slots[s].kind != SlotKind::Zero)
}
