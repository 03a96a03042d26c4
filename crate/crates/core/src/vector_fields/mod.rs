//! Commuting vector fields: translations, rotations, boosts and the torus
//! root `(−Δ_K)^{1/2}`, acting component by component on jets.

use std::fmt;

pub mod battery;

pub use battery::{commutator_self_test, CommutatorReport};

use crate::calculus::{laplacian_k, laplacian_x, sqrt_neg_laplacian_k, spatial_gradient};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{FieldState, FormField, Jet, Key};
use crate::grid::Grid;
use crate::nonlinearity::{dealias_field, star_wedge};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `∂_i`, `i = 0..=3`.
    Translation(usize),
    /// `x_i ∂_j − x_j ∂_i`, `1 ≤ i < j ≤ 3`.
    Rotation(usize, usize),
    /// `t ∂_j + x_j ∂_t`, `j = 1..=3`.
    Boost(usize),
    /// `(−Δ_K)^{1/2}`.
    TorusRoot,
}

impl Generator {
    pub fn all() -> [Generator; 11] {
        use Generator::*;
        [
            Translation(0),
            Translation(1),
            Translation(2),
            Translation(3),
            Rotation(1, 2),
            Rotation(1, 3),
            Rotation(2, 3),
            Boost(1),
            Boost(2),
            Boost(3),
            TorusRoot,
        ]
    }

    /// Whether applying the generator consumes one time level.
    pub fn uses_time(&self) -> bool {
        matches!(self, Generator::Translation(0) | Generator::Boost(_))
    }

    /// Jacobian `J[γ][μ] = ∂_γ X^μ` of the spacetime vector field
    /// (zero for the torus root, which is not a vector field on ℝ^{3+1}).
    pub fn jacobian(&self) -> [[f64; 4]; 4] {
        let mut j = [[0.0; 4]; 4];
        match *self {
            Generator::Rotation(a, b) => {
                // X^b = x_a, X^a = −x_b
                j[a][b] = 1.0;
                j[b][a] = -1.0;
            }
            Generator::Boost(b) => {
                // X^b = t, X^0 = x_b
                j[0][b] = 1.0;
                j[b][0] = 1.0;
            }
            _ => {}
        }
        j
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Translation(i) => write!(f, "d{i}"),
            Generator::Rotation(i, j) => write!(f, "O{i}{j}"),
            Generator::Boost(j) => write!(f, "O0{j}"),
            Generator::TorusRoot => write!(f, "rootK"),
        }
    }
}

/// A word `Γ_{I₁} Γ_{I₂} ⋯`; the rightmost generator acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaMultiIndex {
    pub word: Vec<Generator>,
}

impl GammaMultiIndex {
    pub fn new(word: Vec<Generator>) -> Self {
        GammaMultiIndex { word }
    }

    pub fn order(&self) -> usize {
        self.word.len()
    }

    pub fn time_uses(&self) -> usize {
        self.word.iter().filter(|g| g.uses_time()).count()
    }
}

impl fmt::Display for GammaMultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.word.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// All words of order `≤ max_order`, shortest first.
pub fn enumerate_words(max_order: usize) -> Vec<GammaMultiIndex> {
    let mut out = vec![GammaMultiIndex::default()];
    let mut frontier = out.clone();
    for _ in 0..max_order {
        let mut next = Vec::with_capacity(frontier.len() * 11);
        for w in &frontier {
            for g in Generator::all() {
                let mut word = vec![g];
                word.extend_from_slice(&w.word);
                next.push(GammaMultiIndex::new(word));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn multiply(f: &FormField, coef: &[f64]) -> FormField {
    f.map_values(|_, v| v.iter().zip(coef).map(|(a, b)| a * b).collect())
}

/// `(∂_i L, ∂_j L)` for every component, sharing the forward transform.
fn two_partials(l: &FormField, i: usize, j: usize, exec: Exec) -> (FormField, FormField) {
    let grid = l.grid().clone();
    let items: Vec<(Key, &[f64])> = l.iter().collect();
    let parts = exec.map(items, |(k, v)| (k, grid.partials(v, &[i, j])));
    let mut a = FormField::zero(l.grid(), l.degree());
    let mut b = FormField::zero(l.grid(), l.degree());
    for ((s, m), mut p) in parts {
        let pj = p.pop().expect("two partials");
        let pi = p.pop().expect("two partials");
        a.insert(s, m, pi);
        b.insert(s, m, pj);
    }
    (a, b)
}

/// Apply one generator to a jet.
pub fn apply_generator(j: &Jet, g: Generator, exec: Exec) -> Result<Jet> {
    let grid = j.grid().clone();
    match g {
        Generator::Translation(i) => j.partial(i, exec),
        Generator::TorusRoot => Ok(j.map(sqrt_neg_laplacian_k)),
        Generator::Rotation(a, b) => {
            let xa = grid.coordinate(a);
            let xb = grid.coordinate(b);
            j.try_map(|l| {
                let (da, db) = two_partials(l, a, b, exec);
                let mut out = multiply(&db, &xa);
                out.axpy(-1.0, &multiply(&da, &xb))?;
                Ok(out)
            })
        }
        Generator::Boost(b) => {
            if j.depth() < 2 {
                return Err(Error::RecursionLimit {
                    requested: 1,
                    limit: 0,
                });
            }
            let xb = grid.coordinate(b);
            let dl: Vec<FormField> = j.levels.iter().map(|l| crate::calculus::partial_space(l, b, exec)).collect();
            let t = j.time;
            let mut levels = Vec::with_capacity(j.depth() - 1);
            for m in 0..j.depth() - 1 {
                let mut out = dl[m].scaled(t);
                if m > 0 {
                    out.axpy(m as f64, &dl[m - 1])?;
                }
                out.axpy(1.0, &multiply(&j.levels[m + 1], &xb))?;
                levels.push(out);
            }
            Jet::new(j.time, levels)
        }
    }
}

/// Spatial gradients of every level of a jet, shared by all generators
/// applied to it.
pub struct JetGradients {
    levels: Vec<[FormField; 3]>,
}

impl JetGradients {
    pub fn new(j: &Jet, exec: Exec) -> Self {
        JetGradients {
            levels: j.levels.iter().map(|l| spatial_gradient(l, exec)).collect(),
        }
    }
}

/// [`apply_generator`] with precomputed spatial gradients.
pub fn apply_generator_with(j: &Jet, g: Generator, grads: &JetGradients, exec: Exec) -> Result<Jet> {
    let grid = j.grid().clone();
    let d = |level: usize, axis: usize| &grads.levels[level][axis - 1];
    match g {
        Generator::Translation(0) | Generator::TorusRoot => apply_generator(j, g, exec),
        Generator::Translation(i) => Jet::new(j.time, (0..j.depth()).map(|m| d(m, i).clone()).collect()),
        Generator::Rotation(a, b) => {
            let xa = grid.coordinate(a);
            let xb = grid.coordinate(b);
            let levels = (0..j.depth())
                .map(|m| {
                    let mut out = multiply(d(m, b), &xa);
                    out.axpy(-1.0, &multiply(d(m, a), &xb))?;
                    Ok(out)
                })
                .collect::<Result<_>>()?;
            Jet::new(j.time, levels)
        }
        Generator::Boost(b) => {
            if j.depth() < 2 {
                return Err(Error::RecursionLimit {
                    requested: 1,
                    limit: 0,
                });
            }
            let xb = grid.coordinate(b);
            let mut levels = Vec::with_capacity(j.depth() - 1);
            for m in 0..j.depth() - 1 {
                let mut out = d(m, b).scaled(j.time);
                if m > 0 {
                    out.axpy(m as f64, d(m - 1, b))?;
                }
                out.axpy(1.0, &multiply(&j.levels[m + 1], &xb))?;
                levels.push(out);
            }
            Jet::new(j.time, levels)
        }
    }
}

/// `Γ^I` applied right to left.
pub fn apply_multi_index(j: &Jet, idx: &GammaMultiIndex, exec: Exec) -> Result<Jet> {
    let mut v = j.clone();
    for &g in idx.word.iter().rev() {
        v = apply_generator(&v, g, exec)?;
    }
    Ok(v)
}

/// Time-derivative hierarchy obtained by differentiating the equation
/// `∂_t² u = Δ_x u + Δ_K u + F`, with `F = *(du ∧ du)` when nonlinear.
#[derive(Clone, Copy, Debug)]
pub struct PdeContext {
    pub nonlinear: bool,
    pub dealias: bool,
    /// Deepest jet (number of levels) that may be requested.
    pub max_depth: usize,
    pub exec: Exec,
}

impl PdeContext {
    pub fn linear(max_depth: usize) -> Self {
        PdeContext {
            nonlinear: false,
            dealias: false,
            max_depth,
            exec: Exec::default(),
        }
    }

    pub fn nonlinear(max_depth: usize) -> Self {
        PdeContext {
            nonlinear: true,
            dealias: true,
            max_depth,
            exec: Exec::default(),
        }
    }

    pub fn jet(&self, state: &FieldState, depth: usize) -> Result<Jet> {
        if depth > self.max_depth {
            return Err(Error::RecursionLimit {
                requested: depth,
                limit: self.max_depth,
            });
        }
        let mut levels = vec![state.u.clone(), state.ut.clone()];
        levels.truncate(depth.max(1));
        while levels.len() < depth {
            let m = levels.len() - 2;
            let mut next = laplacian_x(&levels[m], self.exec);
            next.axpy(1.0, &laplacian_k(&levels[m]))?;
            if self.nonlinear {
                let partial = Jet::new(state.time, levels.clone())?;
                let du = crate::calculus::d_full(&partial, self.exec)?;
                let mut f: Option<FormField> = None;
                for i in 0..=m {
                    let c = binom(m, i);
                    let term = star_wedge(&du.levels[i], &du.levels[m - i], self.exec)?;
                    match f.as_mut() {
                        None => f = Some(term.scaled(c)),
                        Some(x) => x.axpy(c, &term)?,
                    }
                }
                let mut f = f.expect("m >= 0");
                if self.dealias {
                    f = dealias_field(&f, self.exec);
                }
                next.axpy(1.0, &f)?;
            }
            levels.push(next);
        }
        Jet::new(state.time, levels)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    L2,
    Sup,
}

/// Spatial gradient energy of level 0 by Parseval.
fn space_gradient_sq(f: &FormField) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let nh = n / 2 + 1;
    let k2 = grid.k2();
    let mut total = 0.0;
    for ((s, _), v) in f.iter() {
        let spec = grid.forward(v);
        let mut sum = 0.0;
        for (i, c) in spec.iter().enumerate() {
            let kx = i % nh;
            let w = if kx == 0 || 2 * kx == n { 1.0 } else { 2.0 };
            sum += w * k2[i] * c.norm_sqr();
        }
        total += grid.slot_weight(s) * sum / grid.point_count() as f64;
    }
    total * grid.cell() * grid.torus_volume()
}

/// `‖∇v‖_p` with `∇ = (∂_t, ∂_1, ∂_2, ∂_3, (−Δ_K)^{1/2})`; needs two levels.
pub fn gradient_norm(v: &Jet, p: NormKind, exec: Exec) -> Result<f64> {
    if v.depth() < 2 {
        return Err(Error::RecursionLimit {
            requested: 1,
            limit: 0,
        });
    }
    let l0 = &v.levels[0];
    let root = sqrt_neg_laplacian_k(l0);
    match p {
        NormKind::L2 => {
            let e = v.levels[1].norm_sq() + space_gradient_sq(l0) + root.norm_sq();
            Ok(e.sqrt())
        }
        NormKind::Sup => {
            let grid = l0.grid().clone();
            let [gx, gy, gz] = spatial_gradient(l0, exec);
            let parts = [&v.levels[1], &gx, &gy, &gz, &root];
            Ok(pointwise_sup(&grid, &parts))
        }
    }
}

/// `max_{x, y} sqrt(Σ_fields Σ_blades f²)` over grid and torus points.
pub fn pointwise_sup(grid: &Grid, parts: &[&FormField]) -> f64 {
    let np = grid.point_count();
    let zero_only = parts
        .iter()
        .all(|f| f.keys().all(|(s, _)| s == grid.zero_slot));
    let npts = if zero_only { 1 } else { grid.torus_point_count() };
    let mut best: f64 = 0.0;
    for p in 0..npts {
        let mut acc = vec![0.0; np];
        for f in parts {
            for m in f.masks() {
                let vals = if zero_only {
                    f.get(grid.zero_slot, m).map(|v| v.to_vec()).unwrap_or_default()
                } else {
                    f.at_torus_point(m, p)
                };
                for (a, x) in acc.iter_mut().zip(&vals) {
                    *a += x * x;
                }
            }
        }
        best = acc.iter().fold(best, |b, x| b.max(*x));
    }
    best.sqrt()
}

/// `Σ_{|α| ≤ M} ‖∇Γ^α v‖_p`; the jet must have at least `M + 2` levels.
pub fn gamma_weighted_norm(j: &Jet, max_order: usize, p: NormKind, exec: Exec) -> Result<f64> {
    let mut total = 0.0;
    visit_words(j, max_order, exec, &mut |_, v| {
        total += gradient_norm(v, p, exec)?;
        Ok(())
    })?;
    Ok(total)
}

/// `Σ_{|α| ≤ M} ‖Γ^α v‖_2`.
pub fn gamma_l2_norm(j: &Jet, max_order: usize, exec: Exec) -> Result<f64> {
    let mut total = 0.0;
    visit_words(j, max_order, exec, &mut |_, v| {
        total += v.levels[0].l2_norm();
        Ok(())
    })?;
    Ok(total)
}

/// Depth-first traversal of all words of order `≤ max_order`, each computed
/// from its suffix so every generator application happens once.
pub fn visit_words(
    j: &Jet,
    max_order: usize,
    exec: Exec,
    f: &mut dyn FnMut(&GammaMultiIndex, &Jet) -> Result<()>,
) -> Result<()> {
    fn rec(
        v: &Jet,
        word: &mut Vec<Generator>,
        left: usize,
        exec: Exec,
        f: &mut dyn FnMut(&GammaMultiIndex, &Jet) -> Result<()>,
    ) -> Result<()> {
        let idx = GammaMultiIndex::new(word.iter().rev().copied().collect());
        f(&idx, v)?;
        if left == 0 {
            return Ok(());
        }
        let grads = JetGradients::new(v, exec);
        for g in Generator::all() {
            let w = apply_generator_with(v, g, &grads, exec)?;
            word.push(g);
            rec(&w, word, left - 1, exec, f)?;
            word.pop();
        }
        Ok(())
    }
    let mut word = Vec::new();
    rec(j, &mut word, max_order, exec, f)
}
