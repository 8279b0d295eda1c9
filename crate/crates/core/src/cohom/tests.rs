use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::fibred::{grothendieck_construct, MorphismOfPresheavesOfCategories, PresheafOfCategories, PresheafOfGroupoids};
use crate::site::{matching_families, sieve_from_generators, GrothendieckTopology, Sieve, SiteCaps};

fn z() -> FgAbelianGroup {
    FgAbelianGroup::free(1)
}

fn zk(k: u32) -> FgAbelianGroup {
    FgAbelianGroup::from_factors(&[k])
}

fn zero() -> FgAbelianGroup {
    FgAbelianGroup::trivial()
}

#[test]
fn point_with_integers() {
    let f = AbelianPresheaf::constant(Arc::new(FiniteCategory::terminal()), &z());
    assert_eq!(category_cohomology(&f, 4).unwrap(), vec![z(), zero(), zero(), zero(), zero()]);
}

#[test]
fn cyclic_group_with_integers() {
    let f = AbelianPresheaf::constant(Arc::new(FiniteCategory::cyclic_group(2)), &z());
    assert_eq!(category_cohomology(&f, 4).unwrap(), vec![z(), zero(), zk(2), zero(), zk(2)]);
    let f = AbelianPresheaf::constant(Arc::new(FiniteCategory::cyclic_group(3)), &z());
    assert_eq!(category_cohomology(&f, 4).unwrap(), vec![z(), zero(), zk(3), zero(), zk(3)]);
}

#[test]
fn cyclic_group_with_torsion_coefficients() {
    let f = AbelianPresheaf::constant(Arc::new(FiniteCategory::cyclic_group(2)), &zk(2));
    assert!(f.validate().is_empty());
    assert_eq!(category_cohomology(&f, 3).unwrap(), vec![zk(2); 4]);
    assert_eq!(global_sections(&f).unwrap(), zk(2));
}

#[test]
fn zero_coefficients() {
    let f = AbelianPresheaf::zero(Arc::new(FiniteCategory::cyclic_group(2)));
    let c = cochain_complex(&f, 3, true).unwrap();
    assert!(c.ranks.iter().all(|&r| r == 0));
    assert_eq!(cohomology_of_complex(&c).unwrap(), vec![zero(); 4]);
}

#[test]
fn normalized_matches_unnormalized() {
    for f in [
        AbelianPresheaf::constant(Arc::new(FiniteCategory::cyclic_group(2)), &z()),
        AbelianPresheaf::constant(Arc::new(FiniteCategory::banded_groupoid("B", 2, 2)), &zk(2)),
        AbelianPresheaf::constant(Arc::new(FiniteCategory::chain(3)), &z()),
    ] {
        let a = cohomology_of_complex(&cochain_complex(&f, 2, true).unwrap()).unwrap();
        let b = cohomology_of_complex(&cochain_complex(&f, 2, false).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn h0_is_global_sections() {
    let c = Arc::new(FiniteCategory::poset("P", &["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap());
    let f = AbelianPresheaf::constant(c.clone(), &z());
    assert_eq!(category_cohomology(&f, 1).unwrap()[0], global_sections(&f).unwrap());
    let f = AbelianPresheaf::constant(c, &zk(6));
    assert_eq!(category_cohomology(&f, 1).unwrap()[0], global_sections(&f).unwrap());
}

#[test]
fn basis_change_is_harmless() {
    let c = Arc::new(FiniteCategory::cyclic_group(2));
    let g = FgAbelianGroup::from_factors(&[0u32, 2]);
    let f = AbelianPresheaf::constant(c, &g);
    let q = IntegerMatrix::from_rows(&[vec![1, 3], vec![0, 1]]);
    let q_inv = IntegerMatrix::from_rows(&[vec![1, -3], vec![0, 1]]);
    let f2 = f.change_basis(&[q], &[q_inv]).unwrap();
    assert!(f2.validate().is_empty());
    assert_eq!(category_cohomology(&f, 3).unwrap(), category_cohomology(&f2, 3).unwrap());
}

#[test]
fn elements_of_finite_presheaf() {
    let f = AbelianPresheaf::constant(Arc::new(FiniteCategory::chain(2)), &FgAbelianGroup::from_factors(&[2u32, 3]));
    let p = f.elements(100).unwrap();
    assert_eq!(p.sizes(), &[6, 6]);
}

fn pt() -> Arc<FiniteCategory> {
    Arc::new(FiniteCategory::terminal())
}

fn groupoids_over_pt(g: FiniteCategory) -> PresheafOfGroupoids {
    PresheafOfGroupoids::new(PresheafOfCategories::constant(pt(), Arc::new(g))).unwrap()
}

fn total(g: &PresheafOfGroupoids) -> Arc<FiniteCategory> {
    grothendieck_construct(&Arc::new(g.inner().clone())).unwrap().total
}

#[test]
fn stack_cohomology_examples() {
    let t = GrothendieckTopology::trivial(pt());
    let cases = [
        (FiniteCategory::cyclic_group(1), vec![z(), zero(), zero(), zero(), zero()]),
        (FiniteCategory::cyclic_group(2), vec![z(), zero(), zk(2), zero(), zk(2)]),
        (FiniteCategory::codiscrete(2), vec![z(), zero(), zero(), zero(), zero()]),
    ];
    for (g, expected) in cases {
        let g = groupoids_over_pt(g);
        let f = AbelianPresheaf::constant(total(&g), &z());
        assert_eq!(stack_cohomology(&t, &g, &f, 4).unwrap(), expected);
    }
}

#[test]
fn stack_cohomology_refuses_nontrivial_topology() {
    let site = Arc::new(FiniteCategory::poset("S", &["V", "U"], &[("V", "U")]).unwrap());
    let a = site.morphism_ids().find(|&m| !site.is_identity(m)).unwrap();
    let s = sieve_from_generators(&site, 1, &[a]).unwrap();
    let t = GrothendieckTopology::generated(site.clone(), &[s], &SiteCaps::default()).unwrap();
    let g = PresheafOfGroupoids::new(PresheafOfCategories::constant(site, Arc::new(FiniteCategory::cyclic_group(2)))).unwrap();
    let f = AbelianPresheaf::constant(total(&g), &z());
    assert!(matches!(stack_cohomology(&t, &g, &f, 2), Err(Error::Refused(_))));
}

#[test]
fn cech_examples() {
    let site = Arc::new(FiniteCategory::poset("S", &["V", "U"], &[("V", "U")]).unwrap());
    let a = site.morphism_ids().find(|&m| !site.is_identity(m)).unwrap();
    let s = sieve_from_generators(&site, 1, &[a]).unwrap();
    let t = GrothendieckTopology::generated(site.clone(), core::slice::from_ref(&s), &SiteCaps::default()).unwrap();
    let f = AbelianPresheaf::constant(site.clone(), &z());
    assert_eq!(cech_cohomology(&t, 1, &s, &f, 2).unwrap(), vec![z(), zero(), zero()]);
    let max = Sieve::maximal(&site, 1);
    let g = FgAbelianGroup::from_factors(&[0u32, 3]);
    let f3 = AbelianPresheaf::constant(site.clone(), &g);
    assert_eq!(cech_cohomology(&t, 1, &max, &f3, 2).unwrap()[0], f3.value(1));
    let zf = AbelianPresheaf::zero(site.clone());
    assert_eq!(cech_cohomology(&t, 1, &s, &zf, 2).unwrap(), vec![zero(); 3]);
    // H^0 order = number of matching families for finite coefficients
    let f6 = AbelianPresheaf::constant(site.clone(), &zk(6));
    let h0 = cech_cohomology(&t, 1, &s, &f6, 1).unwrap()[0].clone();
    let families = matching_families(&f6.elements(100).unwrap(), &s).unwrap();
    assert_eq!(h0.order().unwrap(), families.len().into());
    // not covering
    let empty = Sieve::empty(1);
    assert!(matches!(cech_cohomology(&t, 1, &empty, &f, 1), Err(Error::Input(_))));
}

#[test]
fn invariance_examples() {
    let t = GrothendieckTopology::trivial(pt());
    let e2 = Arc::new(groupoids_over_pt(FiniteCategory::codiscrete(2)).into_inner());
    let one = Arc::new(groupoids_over_pt(FiniteCategory::terminal()).into_inner());
    let comp = Functor::to_terminal(e2.value(0).clone(), one.value(0).clone()).unwrap();
    let m = MorphismOfPresheavesOfCategories::new(e2.clone(), one.clone(), vec![comp]).unwrap();
    let f = AbelianPresheaf::constant(grothendieck_construct(&one).unwrap().total, &z());
    let r = invariance_report(&m, &t, &f, 3).unwrap();
    assert!(r.pass());
    assert_eq!(r.source, vec![z(), zero(), zero(), zero()]);

    let id = MorphismOfPresheavesOfCategories::identity(e2.clone());
    let f = AbelianPresheaf::constant(grothendieck_construct(&e2).unwrap().total, &z());
    assert!(invariance_report(&id, &t, &f, 2).unwrap().pass());

    // not an equivalence: trivial group into Z2
    let z2 = Arc::new(groupoids_over_pt(FiniteCategory::cyclic_group(2)).into_inner());
    let inc = Functor::new(one.value(0).clone(), z2.value(0).clone(), vec![0], vec![0]);
    let m = MorphismOfPresheavesOfCategories::new(one, z2.clone(), vec![inc]).unwrap();
    let f = AbelianPresheaf::constant(grothendieck_construct(&z2).unwrap().total, &z());
    assert!(matches!(invariance_report(&m, &t, &f, 2), Err(Error::Refused(_))));
}

#[test]
fn strings_are_capped() {
    let c = FiniteCategory::cyclic_group(8);
    assert!(matches!(composable_strings(&c, 7, false), Err(Error::CapExceeded(_))));
    let ok: Vec<usize> = composable_strings(&c, 3, true).unwrap().iter().map(Vec::len).collect();
    assert_eq!(ok, vec![1, 7, 49, 343]);
}
