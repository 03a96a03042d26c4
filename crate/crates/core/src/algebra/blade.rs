//! Basis blades of the exterior algebra over 11 axes.
//!
//! A blade is stored as a `u16` bitmask: bit `a` set means `dx^a` is a
//! factor. Within a fixed degree, blades are ranked colexicographically,
//! which for equal popcount coincides with ordering by the integer value of
//! the mask. The rank of `{s_0 < s_1 < ... < s_{k-1}}` is `sum C(s_i, i+1)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of axes of the product manifold: time, three space, seven torus.
pub const DIM: usize = 11;
/// Axis label of time.
pub const TIME: usize = 0;
/// First torus axis.
pub const TORUS0: usize = 4;
/// Mask of all axes.
pub const FULL: u16 = (1 << DIM) - 1;

const fn binomial_table() -> [[usize; DIM + 1]; DIM + 1] {
    let mut t = [[0usize; DIM + 1]; DIM + 1];
    let mut n = 0;
    while n <= DIM {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + if k <= n - 1 { t[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    t
}

static BINOM: [[usize; DIM + 1]; DIM + 1] = binomial_table();

/// `C(n, k)` for `n <= 11`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n || n > DIM {
        0
    } else {
        BINOM[n][k]
    }
}

/// Number of basis blades of the given degree.
pub fn blade_count(degree: usize) -> usize {
    binomial(DIM, degree)
}

struct Tables {
    by_degree: Vec<Vec<u16>>,
    ordinal: Vec<u16>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut by_degree = vec![Vec::new(); DIM + 1];
        let mut ordinal = vec![0u16; 1 << DIM];
        // Ascending mask order is colex order within each degree.
        for mask in 0u16..(1 << DIM) {
            let k = mask.count_ones() as usize;
            ordinal[mask as usize] = by_degree[k].len() as u16;
            by_degree[k].push(mask);
        }
        Tables { by_degree, ordinal }
    })
}

/// All blades of a degree, in ordinal order.
pub fn blades(degree: usize) -> &'static [u16] {
    &tables().by_degree[degree]
}

/// Colex ordinal of a blade within its degree (table lookup).
pub fn ordinal(mask: u16) -> usize {
    tables().ordinal[mask as usize] as usize
}

/// Blade with the given degree and ordinal.
pub fn mask_of(degree: usize, ordinal: usize) -> u16 {
    tables().by_degree[degree][ordinal]
}

/// Colex rank from the combinatorial number system, computed directly.
pub fn colex_rank(mask: u16) -> usize {
    let mut rank = 0;
    let mut i = 0;
    for s in 0..DIM {
        if mask & (1 << s) != 0 {
            i += 1;
            rank += binomial(s, i);
        }
    }
    rank
}

pub fn degree(mask: u16) -> usize {
    mask.count_ones() as usize
}

/// Sorted axis labels of a blade.
pub fn indices(mask: u16) -> Vec<usize> {
    (0..DIM).filter(|&a| mask & (1 << a) != 0).collect()
}

pub fn mask_from_indices(idx: &[usize]) -> Result<u16> {
    let mut m = 0u16;
    for &a in idx {
        if a >= DIM {
            return Err(Error::InvalidAxis(a));
        }
        m |= 1 << a;
    }
    Ok(m)
}

/// Sign of moving the sorted factors of `a` in front of the sorted factors of
/// `b`, i.e. `e_a ∧ e_b = reorder_sign(a, b) e_{a|b}`. Zero if they overlap.
pub fn reorder_sign(a: u16, b: u16) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        // factors of a lying above axis j must hop over dx^j
        swaps += (a >> (j + 1)).count_ones();
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Whether a blade has a factor along a timelike axis.
pub fn is_timelike(mask: u16, timelike: u16) -> bool {
    mask & timelike != 0
}

/// Canonical description of a basis blade.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormBasisIndex {
    pub degree: usize,
    pub indices: Vec<usize>,
    pub ordinal: usize,
}

impl FormBasisIndex {
    /// From a strictly increasing list of axis labels.
    pub fn from_indices(idx: &[usize]) -> Result<Self> {
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Shape(format!("indices {idx:?} not strictly increasing")));
        }
        let mask = mask_from_indices(idx)?;
        Ok(Self::from_mask(mask))
    }

    pub fn from_mask(mask: u16) -> Self {
        FormBasisIndex {
            degree: degree(mask),
            indices: indices(mask),
            ordinal: ordinal(mask),
        }
    }

    pub fn from_ordinal(degree: usize, ordinal: usize) -> Result<Self> {
        if degree > DIM || ordinal >= blade_count(degree) {
            return Err(Error::Shape(format!(
                "ordinal {ordinal} out of range for degree {degree}"
            )));
        }
        Ok(Self::from_mask(mask_of(degree, ordinal)))
    }

    pub fn mask(&self) -> u16 {
        self.indices.iter().fold(0, |m, &a| m | (1 << a))
    }
}

/// Signature of the product metric: which axes carry a `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricSignature {
    pub timelike: u16,
}

impl MetricSignature {
    /// `(-, +, ..., +)` with time on axis 0.
    pub const fn lorentzian() -> Self {
        MetricSignature { timelike: 1 << TIME }
    }

    pub fn dimension(&self) -> usize {
        DIM
    }

    /// `(-1)^{alpha(S)}`: `-1` iff the blade meets a timelike axis.
    pub fn alpha_sign(&self, mask: u16) -> i32 {
        if (mask & self.timelike).count_ones() % 2 == 1 {
            -1
        } else {
            1
        }
    }

    /// Diagonal metric coefficient of a single axis.
    pub fn eta(&self, axis: usize) -> f64 {
        if self.timelike & (1 << axis) != 0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Default for MetricSignature {
    fn default() -> Self {
        Self::lorentzian()
    }
}

/// Hodge dual of a basis blade: `*e_S = sign · e_{S^c}`.
pub fn star_blade(mask: u16, sig: &MetricSignature) -> (u16, i32) {
    let comp = FULL & !mask;
    (comp, sig.alpha_sign(mask) * reorder_sign(mask, comp))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_ranks() {
        let total: usize = (0..=DIM).map(blade_count).sum();
        assert_eq!(total, 2048);
        assert_eq!(blade_count(3), 165);
        assert_eq!(blade_count(4), 330);
        for k in 0..=DIM {
            for (i, &m) in blades(k).iter().enumerate() {
                assert_eq!(ordinal(m), i);
                assert_eq!(colex_rank(m), i);
                assert_eq!(mask_of(k, i), m);
            }
        }
    }

    #[test]
    fn basis_index_round_trip() {
        let b = FormBasisIndex::from_indices(&[0, 4, 9]).unwrap();
        assert_eq!(b.degree, 3);
        assert_eq!(FormBasisIndex::from_ordinal(3, b.ordinal).unwrap(), b);
        assert!(FormBasisIndex::from_indices(&[2, 1]).is_err());
        assert!(FormBasisIndex::from_indices(&[11]).is_err());
    }

    #[test]
    fn reorder_signs() {
        assert_eq!(reorder_sign(0b1, 0b10), 1);
        assert_eq!(reorder_sign(0b10, 0b1), -1);
        assert_eq!(reorder_sign(0b1, 0b1), 0);
        // dx1 ∧ (dx0 ∧ dx2): one hop
        assert_eq!(reorder_sign(0b10, 0b101), -1);
    }

    #[test]
    fn star_of_time_axis() {
        let sig = MetricSignature::lorentzian();
        assert_eq!(star_blade(0, &sig), (FULL, 1));
        assert_eq!(star_blade(1, &sig), (FULL & !1, -1));
    }
}
