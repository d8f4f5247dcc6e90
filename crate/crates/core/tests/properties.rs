use proptest::prelude::*;
use zc_core::cover::{classify_cover, cover_genus, BranchTuple};
use zc_core::group::{PermutationGroup, DEFAULT_ELEMENT_CAP};
use zc_core::hurwitz::{canonical_form, class_key};
use zc_core::perm::Permutation;

fn perm_of(d: usize) -> impl Strategy<Value = Permutation> {
    Just((0..d).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(&images).unwrap())
}

fn perms(d: usize, n: usize) -> impl Strategy<Value = Vec<Permutation>> {
    proptest::collection::vec(perm_of(d), n)
}

/// Random entries with the last one forced; `None` if an entry is trivial.
fn close_up(d: usize, mut entries: Vec<Permutation>) -> Option<BranchTuple> {
    let product = entries
        .iter()
        .fold(Permutation::identity(d).unwrap(), |acc, p| acc.then(p));
    entries.push(product.inverse());
    BranchTuple::new(d, entries).ok()
}

fn tuple_and_relabel() -> impl Strategy<Value = (usize, Vec<Permutation>, Permutation)> {
    (2usize..=7, 1usize..=4).prop_flat_map(|(d, l)| (Just(d), perms(d, l), perm_of(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn composition_laws(ps in (1usize..=9).prop_flat_map(|d| perms(d, 3))) {
        let (a, b, c) = (ps[0], ps[1], ps[2]);
        let id = Permutation::identity(a.degree()).unwrap();
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
        prop_assert_eq!(a.then(&a.inverse()), id);
        prop_assert_eq!(a.then(&id), a);
        // x -> b(a(x))
        for x in 0..a.degree() {
            prop_assert_eq!(a.compose(&b).unwrap().apply(x), b.apply(a.apply(x)));
        }
        // relabelling is a homomorphism
        prop_assert_eq!(a.then(&b).conjugate_by(&c), a.conjugate_by(&c).then(&b.conjugate_by(&c)));
        prop_assert_eq!(a.pow(a.order()), id);
    }

    #[test]
    fn text_round_trip(p in (1usize..=16).prop_flat_map(perm_of)) {
        let again = Permutation::parse(&p.to_string(), p.degree()).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn canonical_form_is_a_class_invariant((d, entries, tau) in tuple_and_relabel()) {
        let Some(t) = close_up(d, entries) else { return Ok(()) };
        let moved = t.conjugated_by(&tau);
        let canon = canonical_form(&t);
        prop_assert_eq!(&canonical_form(&moved), &canon);
        prop_assert_eq!(&canonical_form(&canon), &canon);
        prop_assert!(canon <= t);
        prop_assert_eq!(class_key(&moved), class_key(&t));
    }

    #[test]
    fn rotation_preserves_classification((d, entries, _) in tuple_and_relabel(), k in 0usize..8) {
        let Some(t) = close_up(d, entries) else { return Ok(()) };
        let r = t.rotated(k);
        prop_assert_eq!(cover_genus(&r).unwrap(), cover_genus(&t).unwrap());
        let (a, b) = (
            classify_cover(&t, DEFAULT_ELEMENT_CAP).unwrap(),
            classify_cover(&r, DEFAULT_ELEMENT_CAP).unwrap(),
        );
        prop_assert_eq!(
            (a.genus, a.transitive, a.primitive, a.solvable, a.ps),
            (b.genus, b.transitive, b.primitive, b.solvable, b.ps)
        );
        prop_assert!(t.monodromy_group().same_elements(&r.monodromy_group(), DEFAULT_ELEMENT_CAP).unwrap());
    }

    #[test]
    fn multiplicity_dominates_nontrivial_cycles((d, entries, _) in tuple_and_relabel()) {
        let Some(t) = close_up(d, entries) else { return Ok(()) };
        for (b, s) in t.branch_multiplicities().into_iter().zip(t.entries()) {
            prop_assert!(b >= s.orbit_count() - s.fixed_points());
        }
    }

    #[test]
    fn solvability_shortcuts_agree_with_derived_series(gens in (2usize..=7).prop_flat_map(|d| perms(d, 2))) {
        let g = PermutationGroup::new(gens[0].degree(), gens.clone()).unwrap();
        let fresh = PermutationGroup::new(gens[0].degree(), gens).unwrap();
        prop_assert_eq!(
            g.is_solvable(DEFAULT_ELEMENT_CAP).unwrap(),
            fresh.derived_series(DEFAULT_ELEMENT_CAP).unwrap().solvable
        );
    }

    #[test]
    fn primitive_solvable_fixed_point_bound(gens in (4usize..=7).prop_flat_map(|d| perms(d, 2))) {
        // Degrees 4..=7 only; primitive solvable groups there are small.
        let d = gens[0].degree();
        let g = PermutationGroup::new(d, gens).unwrap();
        if g.is_primitive() && g.is_solvable(DEFAULT_ELEMENT_CAP).unwrap() {
            let (p, k) = zc_core::arith::prime_power(d as u64).expect("prime-power degree");
            let bound = (p as usize).pow(k - 1);
            let mins = g.minimal_normal_subgroups(DEFAULT_ELEMENT_CAP).unwrap();
            prop_assert_eq!(mins.len(), 1);
            prop_assert!(mins[0].regular && mins[0].elementary_abelian_p == Some(p));
            for x in g.stabilizer(0, DEFAULT_ELEMENT_CAP).unwrap().iter().filter(|x| !x.is_identity()) {
                prop_assert!(!mins[0].group.contains(x, DEFAULT_ELEMENT_CAP).unwrap());
            }
            for x in g.elements(DEFAULT_ELEMENT_CAP).unwrap().iter().filter(|x| !x.is_identity()) {
                prop_assert!(x.fixed_points() <= bound, "{x} in degree {d}");
            }
        }
    }
}
