use formwave::algebra::blade::{self, blade_count, blades, reorder_sign, star_blade, FULL};
use formwave::algebra::oracle::{oracle_star_sign, oracle_wedge_sign};
use formwave::algebra::*;
use formwave::selftest::{algebra_suite, Bound};
use proptest::prelude::*;

const SIG: MetricSignature = MetricSignature::lorentzian();

fn blade_of(degree: usize) -> impl Strategy<Value = u16> {
    (0..blade_count(degree)).prop_map(move |i| blades(degree)[i])
}

fn form(degree: usize) -> impl Strategy<Value = PointForm> {
    prop::collection::vec(-4i32..=4, blade_count(degree))
        .prop_map(move |c| PointForm::from_coeffs(degree, c.into_iter().map(f64::from).collect()).unwrap())
}

fn any_permutation() -> impl Strategy<Value = Vec<usize>> {
    Just((0..DIM).collect::<Vec<usize>>()).prop_shuffle()
}

#[test]
fn suite_passes_exactly() {
    let r = algebra_suite(7).unwrap();
    assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    assert!(r.checks.iter().all(|c| c.bound == Bound::AtMost(0.0) && c.value == 0.0));
}

#[test]
fn double_dual_is_minus_one_in_every_degree() {
    for k in 0..=DIM {
        for &m in blades(k) {
            let e = PointForm::basis(m, 1.0);
            assert_eq!(hodge_star(&hodge_star(&e, &SIG), &SIG), e.scale(-1.0), "degree {k}");
        }
    }
}

proptest! {
    #[test]
    fn even_forms_commute_under_wedge(a in form(2), b in form(3)) {
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn wedge_of_odd_forms_anticommutes(a in form(3), b in form(3)) {
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert_eq!(ab, ba.scale(-1.0));
    }

    #[test]
    fn wedge_is_associative(a in form(1), b in form(2), c in form(3)) {
        let l = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let r = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn pairing_matches_wedge_with_dual(u in form(3), v in form(3)) {
        let lhs = wedge(&u, &hodge_star(&v, &SIG)).unwrap();
        let g = minkowski_pairing(&u, &v, &SIG).unwrap();
        prop_assert_eq!(lhs, volume().scale(g));
        prop_assert_eq!(g, minkowski_pairing(&v, &u, &SIG).unwrap());
    }

    #[test]
    fn dual_is_an_isometry_up_to_sign(u in form(4), v in form(4)) {
        let g = minkowski_pairing(&u, &v, &SIG).unwrap();
        let gs = minkowski_pairing(&hodge_star(&u, &SIG), &hodge_star(&v, &SIG), &SIG).unwrap();
        prop_assert_eq!(gs, -g);
    }

    #[test]
    fn bitmask_signs_match_the_oracle(p in 0usize..=DIM, seed in any::<u64>()) {
        let q = (seed as usize) % (DIM - p + 1);
        let a = blades(p)[(seed as usize / 13) % blade_count(p)];
        let b = blades(q)[(seed as usize / 7) % blade_count(q)];
        prop_assert_eq!(reorder_sign(a, b), oracle_wedge_sign(a, b));
        prop_assert_eq!(star_blade(a, &SIG).1, oracle_star_sign(a, &SIG));
    }

    #[test]
    fn oracle_parity_is_multiplicative(p in any_permutation(), i in 0usize..DIM, j in 0usize..DIM) {
        prop_assume!(i != j);
        let mut q = p.clone();
        q.swap(i, j);
        let a = permutation_sign_oracle(&p).unwrap();
        let b = permutation_sign_oracle(&q).unwrap();
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn basis_index_round_trips(m in blade_of(3)) {
        let b = FormBasisIndex::from_mask(m);
        prop_assert_eq!(b.mask(), m);
        prop_assert_eq!(FormBasisIndex::from_ordinal(3, b.ordinal).unwrap(), b.clone());
        prop_assert_eq!(FormBasisIndex::from_indices(&b.indices).unwrap(), b);
    }

    #[test]
    fn interior_time_kills_spatial_blades(m in blade_of(3)) {
        let e = PointForm::basis(m, 2.0);
        let r = interior_time(&e).unwrap();
        prop_assert_eq!(r.is_zero(), m & 1 == 0);
    }
}

#[test]
fn complements_and_volume() {
    for &m in blades(3) {
        let (c, s) = star_blade(m, &SIG);
        assert_eq!(c, FULL & !m);
        assert!(s == 1 || s == -1);
        assert_eq!(blade::degree(c), 8);
    }
    assert_eq!(wedge(&volume(), &PointForm::basis(0, 3.0)).unwrap(), volume().scale(3.0));
    assert!(wedge(&volume(), &PointForm::basis(1, 1.0)).is_err());
}
