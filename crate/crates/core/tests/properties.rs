use std::sync::Arc;

use fibsite_core::cohom::{category_cohomology, cochain_complex, global_sections, AbelianPresheaf};
use fibsite_core::fibred::{grothendieck_construct, induced_topology, same_data, EnrichedSetDiagram};
use fibsite_core::fincat::FiniteCategory;
use fibsite_core::random::{
    random_presheaf, random_presheaf_of_categories, random_sectionwise_equivalence, random_site, random_unimodular,
    rng,
};
use fibsite_core::site::{verify_topology, GrothendieckTopology, SiteCaps};
use fibsite_core::sset::{homology, homology_unnormalized, nerve, smith_normal_form, FgAbelianGroup, IntegerMatrix};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-10i64..=10, c), r))
}

proptest! {
    #[test]
    fn smith_form_invariants(rows in matrix()) {
        let m = IntegerMatrix::from_rows(&rows);
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(s.d.is_diagonal());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            prop_assert!(w[0] >= BigInt::zero());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        for d in [s.u.determinant(), s.v.determinant()] {
            prop_assert!(d == BigInt::one() || d == -BigInt::one());
        }
        prop_assert_eq!(s.v.mul(&s.v_inv), IntegerMatrix::identity(s.v.rows()));
    }

    #[test]
    fn smith_form_ignores_unimodular_changes(rows in matrix(), seed in 0u64..1000) {
        let m = IntegerMatrix::from_rows(&rows);
        let mut r = rng(seed);
        let (p, _) = random_unimodular(&mut r, m.rows(), 6);
        let (q, _) = random_unimodular(&mut r, m.cols(), 6);
        prop_assert_eq!(smith_normal_form(&p.mul(&m).mul(&q)).diagonal(), smith_normal_form(&m).diagonal());
    }

    #[test]
    fn induced_topologies_are_topologies(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let site = random_site(&mut r, 3);
        let a = Arc::new(random_presheaf_of_categories(&mut r, &site, 3).unwrap());
        let fs = grothendieck_construct(&a).unwrap();
        prop_assert!(fs.total.validate().is_empty());
        prop_assert!(fs.projection.validate().is_empty());
        let caps = SiteCaps::relaxed();
        for t in [GrothendieckTopology::trivial(site.clone()), GrothendieckTopology::generated(site.clone(), &[], &caps).unwrap()] {
            let induced = induced_topology(&fs, &t, &caps).unwrap();
            prop_assert!(verify_topology(&induced, &caps).unwrap().is_empty());
        }
    }

    #[test]
    fn enriched_round_trip(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let site = random_site(&mut r, 3);
        let a = Arc::new(random_presheaf_of_categories(&mut r, &site, 3).unwrap());
        let fs = grothendieck_construct(&a).unwrap();
        let f = random_presheaf(&mut r, &fs.total, 2, false);
        let e = EnrichedSetDiagram::from_presheaf(&fs, &f).unwrap();
        prop_assert!(e.validate().is_empty());
        prop_assert!(same_data(&e.to_presheaf(&fs).unwrap(), &f));
    }

    #[test]
    fn cochains_square_to_zero(seed in 0u64..10_000, k in 0u32..4) {
        let mut r = rng(seed);
        let site = random_site(&mut r, 3);
        let g = if k == 0 { FgAbelianGroup::free(1) } else { FgAbelianGroup::from_factors(&[k + 1]) };
        let f = AbelianPresheaf::constant(site, &g);
        for normalized in [true, false] {
            prop_assert!(cochain_complex(&f, 3, normalized).unwrap().check_square_zero().is_ok());
        }
        prop_assert_eq!(category_cohomology(&f, 2).unwrap()[0].clone(), global_sections(&f).unwrap());
    }

    #[test]
    fn cohomology_survives_basis_change(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let site = random_site(&mut r, 2);
        let f = AbelianPresheaf::constant(site.clone(), &FgAbelianGroup::from_factors(&[0u32, 2]));
        let (q, q_inv): (Vec<_>, Vec<_>) = site.objects().map(|_| random_unimodular(&mut r, 2, 4)).unzip();
        let g = f.change_basis(&q, &q_inv).unwrap();
        prop_assert!(g.validate().is_empty());
        prop_assert_eq!(category_cohomology(&f, 3).unwrap(), category_cohomology(&g, 3).unwrap());
    }

    #[test]
    fn sectionwise_equivalences_are_equivalences(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let site = random_site(&mut r, 3);
        let m = random_sectionwise_equivalence(&mut r, &site, 2, 1, 2).unwrap();
        prop_assert!(m.is_sectionwise_equivalence());
        let fg = grothendieck_construct(&m.dom).unwrap();
        let fh = grothendieck_construct(&m.cod).unwrap();
        prop_assert!(fg.induced_functor(&m, &fh).unwrap().is_equivalence());
    }
}

#[test]
fn normalized_homology_matches_unnormalized() {
    for c in [FiniteCategory::cyclic_group(2), FiniteCategory::cyclic_group(3), FiniteCategory::chain(3), FiniteCategory::codiscrete(2)] {
        let s = nerve(&c, 4).sset;
        assert_eq!(homology(&s, 3).unwrap(), homology_unnormalized(&s, 3).unwrap(), "{}", c.name());
    }
}

#[test]
fn classifying_space_of_z3() {
    let s = nerve(&FiniteCategory::cyclic_group(3), 5).sset;
    let h: Vec<String> = homology(&s, 4).unwrap().groups.iter().map(ToString::to_string).collect();
    assert_eq!(h, ["Z", "Z/3", "0", "Z/3", "0"]);
}
