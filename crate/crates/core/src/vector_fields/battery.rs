//! Commutator battery on Gaussian × polynomial × torus-mode test fields.

use std::sync::Arc;

use rand::Rng;

use super::{apply_generator, Generator};
use crate::error::Result;
use crate::exec::Exec;
use crate::field::{FormField, Jet};
use crate::grid::{Grid, GridSpec};
use crate::nonlinearity::{bilinear_jet, scalar_product};
use crate::sample;

/// One checked identity and its relative residual.
#[derive(Clone, Debug)]
pub struct CommutatorEntry {
    pub label: String,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct CommutatorReport {
    pub tolerance: f64,
    pub entries: Vec<CommutatorEntry>,
    /// The same relations with the competing sign patterns, for comparison only.
    pub sign_variants: Vec<CommutatorEntry>,
}

impl CommutatorReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.residual <= self.tolerance)
    }

    pub fn worst(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.residual))
    }
}

/// `f(t, x, y) = G(x) Σ_a t^a p_a(x) (c_0 + c_1 cos 2πy)` with `deg p_a ≤ 3 − a`.
struct PolyField {
    width: f64,
    terms: Vec<(usize, [u32; 3], f64)>,
    slot_coef: [f64; 2],
}

impl PolyField {
    fn random(rng: &mut impl Rng, width: f64) -> Self {
        let mut terms = Vec::new();
        for a in 0..=3usize {
            for e1 in 0..=3u32 {
                for e2 in 0..=3u32 {
                    for e3 in 0..=3u32 {
                        if (a as u32) + e1 + e2 + e3 <= 3 && rng.random_bool(0.5) {
                            terms.push((a, [e1, e2, e3], rng.random_range(-1.0..1.0)));
                        }
                    }
                }
            }
        }
        PolyField {
            width,
            terms,
            slot_coef: [rng.random_range(0.5..1.0), rng.random_range(0.5..1.0)],
        }
    }

    fn jet(&self, grid: &Arc<Grid>, t: f64, depth: usize) -> Jet {
        let cos = grid.cos_slot(&[1, 0, 0, 0, 0, 0, 0]).expect("mode (1,0,..)");
        let levels = (0..depth)
            .map(|m| {
                let v: Vec<f64> = (0..grid.point_count())
                    .map(|i| {
                        let x = grid.position(i);
                        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                        let g = (-r2 / (2.0 * self.width * self.width)).exp();
                        let p: f64 = self
                            .terms
                            .iter()
                            .filter(|(a, _, _)| *a >= m)
                            .map(|(a, e, c)| {
                                let fall: f64 = ((a - m + 1)..=*a).map(|k| k as f64).product();
                                c * fall
                                    * t.powi((a - m) as i32)
                                    * x[0].powi(e[0] as i32)
                                    * x[1].powi(e[1] as i32)
                                    * x[2].powi(e[2] as i32)
                            })
                            .sum();
                        g * p
                    })
                    .collect();
                let mut f = FormField::zero(grid, 0);
                f.insert(grid.zero_slot, 0, v.iter().map(|x| x * self.slot_coef[0]).collect());
                f.insert(cos, 0, v.iter().map(|x| x * self.slot_coef[1]).collect());
                f
            })
            .collect();
        Jet { time: t, levels }
    }
}

fn rel(diff: &FormField, scale: f64) -> f64 {
    diff.max_abs() / scale.max(f64::MIN_POSITIVE)
}

fn lvl0(j: &Jet) -> &FormField {
    &j.levels[0]
}

/// `Q_γδ(f, g)` as a jet (Leibniz rule on the gradient jets).
pub fn q_jet(f: &Jet, g: &Jet, c: usize, d: usize, exec: Exec) -> Result<Jet> {
    let fc = f.partial(c, exec)?;
    let fd = f.partial(d, exec)?;
    let gc = g.partial(c, exec)?;
    let gd = g.partial(d, exec)?;
    let depth = fc.depth().min(fd.depth()).min(gc.depth()).min(gd.depth());
    let prod = |a: &FormField, b: &FormField| scalar_product(a, b, exec);
    let a = bilinear_jet(&fc, &gd, depth, prod)?;
    let b = bilinear_jet(&fd, &gc, depth, prod)?;
    a.sub(&b)
}

const BATTERY_N: usize = 60;
const BATTERY_BOX: f64 = 16.0;

/// Run every relation on a fixed seeded battery.
pub fn commutator_self_test() -> Result<CommutatorReport> {
    run_battery(2024, Exec::default())
}

pub fn run_battery(seed: u64, exec: Exec) -> Result<CommutatorReport> {
    let grid = Grid::new(GridSpec::new(BATTERY_N, BATTERY_BOX, 1, 1))?;
    let mut rng = sample::rng(seed);
    let t0 = 0.7;
    // three levels suffice: one generator and one derivative, compared at level 0
    let f = PolyField::random(&mut rng, 1.0).jet(&grid, t0, 3);
    let g = PolyField::random(&mut rng, 1.0).jet(&grid, t0, 3);
    let mut entries = Vec::new();
    let mut variants = Vec::new();
    let tilde: Vec<Generator> = Generator::all()
        .into_iter()
        .filter(|g| *g != Generator::TorusRoot)
        .collect();

    let f3 = f.clone();
    let partials: Vec<Jet> = (0..4).map(|k| f3.partial(k, exec)).collect::<Result<_>>()?;
    for &om in &tilde {
        if matches!(om, Generator::Translation(_)) {
            continue;
        }
        let omf = apply_generator(&f3, om, exec)?;
        for k in 0..4 {
            let lhs_a = omf.partial(k, exec)?;
            let lhs_b = apply_generator(&partials[k], om, exec)?;
            let lhs = lvl0(&lhs_a).sub(lvl0(&lhs_b))?;
            let scale = lvl0(&lhs_a).max_abs().max(lvl0(&lhs_b).max_abs());
            let (expected, variant_form) = match om {
                Generator::Rotation(i, j) => {
                    // [∂_k, Ω_ij] = δ_ik ∂_j − δ_jk ∂_i
                    let mut e = FormField::zero(&grid, 0);
                    let mut p = FormField::zero(&grid, 0);
                    if k == i {
                        e.axpy(1.0, lvl0(&partials[j]))?;
                        p.axpy(-1.0, lvl0(&partials[j]))?;
                    }
                    if k == j {
                        e.axpy(-1.0, lvl0(&partials[i]))?;
                        p.axpy(1.0, lvl0(&partials[k]))?;
                    }
                    (e, Some(p))
                }
                Generator::Boost(j) => {
                    // [∂_k, Ω_0j] = δ_0k ∂_j + δ_jk ∂_0
                    let mut e = FormField::zero(&grid, 0);
                    if k == 0 {
                        e.axpy(1.0, lvl0(&partials[j]))?;
                    }
                    if k == j {
                        e.axpy(1.0, lvl0(&partials[0]))?;
                    }
                    (e, None)
                }
                _ => unreachable!(),
            };
            entries.push(CommutatorEntry {
                label: format!("[d{k},{om}]"),
                residual: rel(&lhs.sub(&expected)?, scale),
            });
            if let Some(p) = variant_form {
                variants.push(CommutatorEntry {
                    label: format!("[d{k},{om}] variant"),
                    residual: rel(&lhs.sub(&p)?, scale),
                });
            }
        }
    }

    for k in 0..4 {
        for l in k + 1..4 {
            let a = partials[k].partial(l, exec)?;
            let b = partials[l].partial(k, exec)?;
            let scale = lvl0(&a).max_abs();
            entries.push(CommutatorEntry {
                label: format!("[d{k},d{l}]"),
                residual: rel(&lvl0(&a).sub(lvl0(&b))?, scale),
            });
        }
    }

    let rf = apply_generator(&f3, Generator::TorusRoot, exec)?;
    for &om in &tilde {
        let a = apply_generator(&rf, om, exec)?;
        let b = apply_generator(&apply_generator(&f3, om, exec)?, Generator::TorusRoot, exec)?;
        let scale = lvl0(&a).max_abs().max(lvl0(&b).max_abs());
        entries.push(CommutatorEntry {
            label: format!("[rootK,{om}]"),
            residual: rel(&lvl0(&a).sub(lvl0(&b))?, scale),
        });
    }

    // Ω Q_γδ(f,g) − Q_γδ(Ωf,g) − Q_γδ(f,Ωg) = −(∂_γX^μ) Q_μδ − (∂_δX^μ) Q_γμ
    let q: Vec<Vec<Option<Jet>>> = (0..4)
        .map(|c| {
            (0..4)
                .map(|d| if c == d { None } else { q_jet(&f, &g, c, d, exec).ok() })
                .collect()
        })
        .collect();
    let qz = |c: usize, d: usize| -> FormField {
        q[c][d]
            .as_ref()
            .map(|j| j.levels[0].clone())
            .unwrap_or_else(|| FormField::zero(&grid, 0))
    };
    let minkowski = [-1.0, 1.0, 1.0, 1.0];
    for &om in &tilde {
        let (a_idx, b_idx, orient) = match om {
            Generator::Rotation(i, j) => (i, j, 1.0),
            Generator::Boost(j) => (0, j, -1.0),
            _ => continue,
        };
        let omf = apply_generator(&f, om, exec)?;
        let omg = apply_generator(&g, om, exec)?;
        let jac = om.jacobian();
        for c in 0..4 {
            for d in c + 1..4 {
                let qcd = q[c][d].as_ref().expect("c != d");
                let lhs0 = apply_generator(qcd, om, exec)?;
                let t1 = q_jet(&omf, &g, c, d, exec)?;
                let t2 = q_jet(&f, &omg, c, d, exec)?;
                let mut lhs = lvl0(&lhs0).clone();
                lhs.axpy(-1.0, lvl0(&t1))?;
                lhs.axpy(-1.0, lvl0(&t2))?;
                let mut tilde_q = FormField::zero(&grid, 0);
                for mu in 0..4 {
                    tilde_q.axpy(-jac[c][mu], &qz(mu, d))?;
                    tilde_q.axpy(-jac[d][mu], &qz(c, mu))?;
                }
                let scale = [lvl0(&lhs0), lvl0(&t1), lvl0(&t2)]
                    .iter()
                    .fold(0.0f64, |m, x| m.max(x.max_abs()));
                entries.push(CommutatorEntry {
                    label: format!("{om} Q{c}{d}"),
                    residual: rel(&lhs.sub(&tilde_q)?, scale),
                });
                // m_αγ Q_βδ − m_βγ Q_αδ + m_αδ Q_βγ + m_βδ Q_αγ, in the
                // orientation x_α∂_β − x_β∂_α with lowered coordinates
                let m = |x: usize, y: usize| if x == y { minkowski[x] } else { 0.0 };
                let mut pq = FormField::zero(&grid, 0);
                pq.axpy(m(a_idx, c), &qz(b_idx, d))?;
                pq.axpy(-m(b_idx, c), &qz(a_idx, d))?;
                pq.axpy(m(a_idx, d), &qz(b_idx, c))?;
                pq.axpy(m(b_idx, d), &qz(a_idx, c))?;
                variants.push(CommutatorEntry {
                    label: format!("{om} Q{c}{d} variant"),
                    residual: rel(&lhs.sub(&pq.scaled(orient))?, scale),
                });
            }
        }
    }

    Ok(CommutatorReport {
        tolerance: 1e-10,
        entries,
        sign_variants: variants,
    })
}

/// `∂_i = −(x_i/t)∂_0 + (1/t)Ω_{0i}` at level 0; returns the worst relative
/// residual over `i = 1..=3`.
pub fn boost_decomposition_residual(j: &Jet, exec: Exec) -> Result<f64> {
    let grid = j.grid().clone();
    let t = j.time;
    let dt = j.partial(0, exec)?;
    let mut worst: f64 = 0.0;
    for i in 1..=3 {
        let di = j.partial(i, exec)?;
        let bi = apply_generator(j, Generator::Boost(i), exec)?;
        let xi = grid.coordinate(i);
        let mut rhs = lvl0(&bi).scaled(1.0 / t);
        let corr = lvl0(&dt).map_values(|_, v| v.iter().zip(&xi).map(|(a, x)| -a * x / t).collect());
        rhs.axpy(1.0, &corr)?;
        let scale = lvl0(&di).max_abs().max(rhs.max_abs());
        worst = worst.max(rel(&lvl0(&di).sub(&rhs)?, scale));
    }
    Ok(worst)
}

/// Test jet for external checks: a random scalar on the battery grid.
pub fn battery_field(seed: u64, t: f64, depth: usize) -> Result<Jet> {
    let grid = Grid::new(GridSpec::new(BATTERY_N, BATTERY_BOX, 1, 1))?;
    let mut rng = sample::rng(seed);
    Ok(PolyField::random(&mut rng, 1.0).jet(&grid, t, depth))
}
