//! Brute-force sign oracle.
//!
//! Deliberately naive: signs come from bubble-sorting an explicit label
//! sequence and counting swaps. Nothing here shares code with the bitmask
//! arithmetic in [`super::blade`], so agreement between the two is evidence.

use super::blade::{indices, MetricSignature, DIM, FULL};
use crate::error::{Error, Result};

/// Levi-Civita symbol of a sequence of 11 axis labels.
///
/// Returns 0 on a repeated label, otherwise `(-1)^swaps` where `swaps` is the
/// number of adjacent transpositions needed to sort the sequence.
pub fn permutation_sign_oracle(perm: &[usize]) -> Result<i32> {
    if perm.len() != DIM {
        return Err(Error::MalformedPermutation {
            expected: DIM,
            got: perm.len(),
        });
    }
    if let Some(&bad) = perm.iter().find(|&&a| a >= DIM) {
        return Err(Error::InvalidAxis(bad));
    }
    Ok(sequence_sign(perm))
}

/// Parity of an arbitrary finite label sequence, 0 on repeats.
fn sequence_sign(seq: &[usize]) -> i32 {
    let mut v = seq.to_vec();
    let mut swaps = 0usize;
    for pass in 0..v.len() {
        for i in 0..v.len().saturating_sub(1 + pass) {
            if v[i] == v[i + 1] {
                return 0;
            }
            if v[i] > v[i + 1] {
                v.swap(i, i + 1);
                swaps += 1;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return 0;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Pads a label sequence with the missing axes (ascending) up to length 11.
fn complete(seq: &[usize]) -> Vec<usize> {
    let mut out = seq.to_vec();
    for a in 0..DIM {
        if !seq.contains(&a) {
            out.push(a);
        }
    }
    out
}

/// Sign in `e_a ∧ e_b = s e_{a ∪ b}` recomputed through the oracle.
///
/// Padding both `a ++ b` and `sort(a ∪ b)` with the same ascending tail and
/// dividing the two symbols isolates the parity of the concatenation.
pub fn oracle_wedge_sign(a: u16, b: u16) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut cat = indices(a);
    cat.extend(indices(b));
    let sorted = indices(a | b);
    let s1 = permutation_sign_oracle(&complete(&cat)).expect("11 labels");
    let s2 = permutation_sign_oracle(&complete(&sorted)).expect("11 labels");
    s1 * s2
}

/// Sign in `*e_S = s e_{S^c}` recomputed through the oracle.
pub fn oracle_star_sign(mask: u16, sig: &MetricSignature) -> i32 {
    let mut seq = indices(mask);
    seq.extend(indices(FULL & !mask));
    let eps = permutation_sign_oracle(&seq).expect("11 labels");
    let alpha = indices(mask & sig.timelike).len();
    if alpha % 2 == 1 {
        -eps
    } else {
        eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_one_swap() {
        let id: Vec<usize> = (0..11).collect();
        assert_eq!(permutation_sign_oracle(&id).unwrap(), 1);
        let mut sw = id.clone();
        sw.swap(0, 1);
        assert_eq!(permutation_sign_oracle(&sw).unwrap(), -1);
        let mut rep = id.clone();
        rep[1] = 0;
        assert_eq!(permutation_sign_oracle(&rep).unwrap(), 0);
    }

    #[test]
    fn rejects_wrong_length_and_labels() {
        assert!(matches!(
            permutation_sign_oracle(&[0, 1, 2]),
            Err(Error::MalformedPermutation { got: 3, .. })
        ));
        let mut bad: Vec<usize> = (0..11).collect();
        bad[10] = 11;
        assert!(matches!(permutation_sign_oracle(&bad), Err(Error::InvalidAxis(11))));
    }

    #[test]
    fn reversal_parity() {
        // reversing 11 labels takes 55 swaps
        let rev: Vec<usize> = (0..11).rev().collect();
        assert_eq!(permutation_sign_oracle(&rev).unwrap(), -1);
    }
}
