use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::fibred::{PresheafOfCategories, PresheafOfGroupoids};
use crate::sset::{homology, we_evidence, FgAbelianGroup};

fn z2() -> Groupoid {
    Groupoid::new(Arc::new(FiniteCategory::cyclic_group(2))).unwrap()
}

fn trivial() -> Groupoid {
    Groupoid::new(Arc::new(FiniteCategory::cyclic_group(1))).unwrap()
}

fn free_orbit(g: &Groupoid, dim: usize) -> GroupoidDiagram {
    let act: Vec<Vec<usize>> =
        g.morphism_ids().map(|f| if g.is_identity(f) { vec![0, 1] } else { vec![1, 0] }).collect();
    GroupoidDiagram::from_gset(g.clone(), &[2], &act, dim).unwrap()
}

fn is_iso_map(m: &SimplicialMap) -> bool {
    m.validate().is_empty() && m.is_isomorphism()
}

#[test]
fn hocolim_over_trivial_group_is_the_value() {
    let g = trivial();
    let nz2 = Arc::new(nerve(&FiniteCategory::cyclic_group(2), 3).sset);
    let a = GroupoidDiagram::constant(g, nz2.clone());
    let h = hocolim(&a, 3).unwrap();
    let maps = h.keys.iter().map(|ks| ks.iter().map(|&(_, e)| e).collect()).collect();
    let m = SimplicialMap::new(h.over.total().clone(), nz2, maps).unwrap();
    assert!(is_iso_map(&m));
}

#[test]
fn hocolim_of_point_is_the_nerve() {
    let a = GroupoidDiagram::one_point(z2(), 3);
    let h = hocolim(&a, 3).unwrap();
    assert!(is_iso_map(h.over.structure()));
}

#[test]
fn hocolim_of_free_orbit_is_acyclic() {
    let h = hocolim(&free_orbit(&z2(), 3), 3).unwrap();
    let r = homology(h.over.total(), 2).unwrap();
    assert_eq!(r.groups, vec![FgAbelianGroup::free(1), FgAbelianGroup::trivial(), FgAbelianGroup::trivial()]);
}

#[test]
fn pb_of_nerve_counts() {
    let x = OverNerve::nerve_over_itself(z2(), 4);
    let p = pb(&x).unwrap();
    assert!(p.diagram.validate().is_empty());
    let counts: Vec<usize> = (0..=4).map(|n| p.diagram.value(0).count(n)).collect();
    assert_eq!(counts, vec![2, 4, 8, 16, 32]);
    // nerve of the comma groupoid Z2/∗ is contractible
    let r = homology(p.diagram.value(0), 3).unwrap();
    assert!(r.groups[1..].iter().all(FgAbelianGroup::is_trivial));
}

#[test]
fn pb_over_trivial_group_is_x() {
    let g = trivial();
    let x = OverNerve::nerve_over_itself(g, 3);
    let p = pb(&x).unwrap();
    let maps = p.keyed[0].keys.iter().map(|ks| ks.iter().map(|&(e, _)| e).collect()).collect();
    let m = SimplicialMap::new(p.diagram.value(0).clone(), x.total().clone(), maps).unwrap();
    assert!(is_iso_map(&m));
}

#[test]
fn pb_rejects_non_groupoid() {
    let c = Arc::new(FiniteCategory::chain(2));
    let n = Arc::new(nerve(&c, 2).sset);
    let err = OverNerve::over_category(c, SimplicialMap::identity(n)).unwrap_err();
    assert!(matches!(err, crate::Error::Input(_)));
}

#[test]
fn eta_trivial_is_iso_and_z2_is_we() {
    let x = OverNerve::nerve_over_itself(trivial(), 3);
    let p = pb(&x).unwrap();
    let h = hocolim(&p.diagram, 3).unwrap();
    assert!(is_iso_map(&unit_eta(&x, &p, &h).unwrap()));

    let x = OverNerve::nerve_over_itself(z2(), 4);
    let p = pb(&x).unwrap();
    let h = hocolim(&p.diagram, 4).unwrap();
    let eta = unit_eta(&x, &p, &h).unwrap();
    assert!(eta.validate().is_empty());
    assert!(we_evidence(&eta, 3).unwrap().pass());
    let c = c_map(&x, &p, &h).unwrap();
    assert!(c.validate().is_empty());
    assert!(we_evidence(&c, 3).unwrap().pass());
}

#[test]
fn epsilon_examples() {
    for (a, top) in [(GroupoidDiagram::one_point(z2(), 4), 3), (free_orbit(&z2(), 4), 3)] {
        let h = hocolim(&a, 4).unwrap();
        let p = pb(&h.over).unwrap();
        let eps = counit_epsilon(&a, &h, &p).unwrap();
        assert!(is_natural(&p.diagram, &a, &eps));
        for e in &eps {
            assert!(we_evidence(e, top).unwrap().pass());
        }
    }
    let a = GroupoidDiagram::constant(trivial(), Arc::new(nerve(&FiniteCategory::cyclic_group(2), 3).sset));
    let h = hocolim(&a, 3).unwrap();
    let p = pb(&h.over).unwrap();
    assert!(is_iso_map(&counit_epsilon(&a, &h, &p).unwrap()[0]));
}

#[test]
fn triangles_exact() {
    let g = trivial();
    let r = check_triangles(&OverNerve::nerve_over_itself(g.clone(), 3), &GroupoidDiagram::one_point(g, 3), 3).unwrap();
    assert!(r.pass());
    let g = z2();
    let r = check_triangles(&OverNerve::nerve_over_itself(g.clone(), 4), &free_orbit(&g, 4), 4).unwrap();
    assert!(r.pass(), "{r:?}");
}

#[test]
fn normalize_last_vertex_composes_string() {
    let g = z2();
    let x = OverNerve::nerve_over_itself(g.clone(), 2);
    let t = g.morphism_ids().find(|&f| !g.is_identity(f)).unwrap();
    let s = x.nerve().find(2, &(0, vec![t, t])).unwrap();
    assert_eq!(normalize_last_vertex(&x, 2, s, t).unwrap(), t);
}

#[test]
fn sectionwise_constant_z2() {
    let site = Arc::new(FiniteCategory::chain(2));
    let pc = PresheafOfCategories::constant(site, Arc::new(FiniteCategory::cyclic_group(2)));
    let base = Arc::new(PresheafOfGroupoids::new(pc).unwrap());
    let y = PresheafOverNerve::nerve_over_itself(base.clone(), 3).checked().unwrap();
    let x = EnrichedGroupoidDiagram::constant(base.clone(), Arc::new(discrete_sset(1, 3))).checked().unwrap();
    let report = check_sectionwise(&y, &x, 3).unwrap();
    assert!(report.pass(), "{report:?}");
    let p = presheaf_pb(&y).unwrap();
    let h = presheaf_hocolim(&p.diagram, 3).unwrap();
    for (u, eta) in presheaf_unit_eta(&y, &p, &h).unwrap().iter().enumerate() {
        assert!(we_evidence(eta, 2).unwrap().pass(), "section {u}");
    }
}
