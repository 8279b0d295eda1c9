use super::enriched::{check_kan_triangles, check_psi_triangles};
use super::*;
use crate::fincat::pi0;
use crate::site::{representable, verify_topology};

fn arrow(name: &str, a: &str, b: &str) -> Arc<FiniteCategory> {
    Arc::new(FiniteCategory::poset(name, &[a, b], &[(a, b)]).unwrap())
}

fn pt() -> Arc<FiniteCategory> {
    Arc::new(FiniteCategory::terminal())
}

fn z2() -> Arc<FiniteCategory> {
    Arc::new(FiniteCategory::cyclic_group(2))
}

fn cover_a(c: &Arc<FiniteCategory>) -> GrothendieckTopology {
    let u = c.object_index("U").unwrap();
    let a = c.morphism_index("V->U").unwrap();
    let s = crate::site::sieve_from_generators(c, u, &[a]).unwrap();
    GrothendieckTopology::generated(c.clone(), &[s], &SiteCaps::default()).unwrap()
}

#[test]
fn constant_terminal_total_is_the_site() {
    let c = arrow("C", "V", "U");
    let a = Arc::new(PresheafOfCategories::constant(c.clone(), pt()));
    let fs = grothendieck_construct(&a).unwrap();
    assert!(fs.total.validate().is_empty());
    assert!(fs.projection.validate().is_empty());
    assert!(fs.projection.is_isomorphism());
}

#[test]
fn constant_group_over_point() {
    let a = Arc::new(PresheafOfCategories::constant(pt(), z2()));
    let fs = grothendieck_construct(&a).unwrap();
    assert_eq!((fs.total.num_objects(), fs.total.num_morphisms()), (1, 2));
    assert!(fs.total.is_groupoid());
    assert!(fs.total.validate().is_empty());
}

#[test]
fn constant_arrow_over_arrow_is_product() {
    let c = arrow("C", "V", "U");
    let j = arrow("J", "x", "y");
    let a = Arc::new(PresheafOfCategories::constant(c.clone(), j.clone()));
    let fs = grothendieck_construct(&a).unwrap();
    assert_eq!((fs.total.num_objects(), fs.total.num_morphisms()), (4, 9));
    assert!(fs.total.validate().is_empty());
    // literal isomorphism with the product through the stored pairs
    let prod = Arc::new(FiniteCategory::product(&c, &j));
    let objects = fs
        .objects
        .iter()
        .map(|&(u, x)| prod.object_index(&format!("({},{})", c.object_name(u), j.object_name(x))).unwrap())
        .collect();
    let morphisms = fs
        .morphisms
        .iter()
        .map(|&(al, f)| prod.morphism_index(&format!("({},{})", c.morphism_name(al), j.morphism_name(f))).unwrap())
        .collect();
    let iso = Functor::checked(fs.total.clone(), prod, objects, morphisms).unwrap();
    assert!(iso.is_isomorphism());
}

#[test]
fn induced_topologies() {
    let c = arrow("C", "V", "U");
    let a = Arc::new(PresheafOfCategories::constant(c.clone(), z2()));
    let fs = grothendieck_construct(&a).unwrap();
    let trivial = induced_topology(&fs, &GrothendieckTopology::trivial(c.clone()), &SiteCaps::relaxed()).unwrap();
    assert!(trivial.is_trivial());
    let t = cover_a(&c);
    let induced = induced_topology(&fs, &t, &SiteCaps::relaxed()).unwrap();
    assert!(verify_topology(&induced, &SiteCaps::relaxed()).unwrap().is_empty());
    let u = c.object_index("U").unwrap();
    let a_mor = c.morphism_index("V->U").unwrap();
    let s = crate::site::sieve_from_generators(&c, u, &[a_mor]).unwrap();
    let r = fs.pi_inverse(&s, 0).unwrap();
    let over_a: Vec<MorIx> = r.members().iter().copied().filter(|&m| fs.morphisms[m].0 == a_mor).collect();
    assert_eq!(over_a.len(), 2);
    assert!(induced.is_covering(&r));
    // sections are groupoids, so no closing upward was needed
    assert_eq!(induced, pi_inverse_covers(&fs, &t).unwrap());
}

#[test]
fn literal_pi_inverse_covers_can_fail_local_character() {
    // a sieve containing π⁻¹⟨a⟩ that is not of the form π⁻¹S
    let c = arrow("C", "V", "U");
    let j = arrow("J", "x", "y");
    let a = Arc::new(PresheafOfCategories::constant(c.clone(), j));
    let fs = grothendieck_construct(&a).unwrap();
    let t = cover_a(&c);
    let literal = pi_inverse_covers(&fs, &t).unwrap();
    let report = verify_topology(&literal, &SiteCaps::relaxed()).unwrap();
    assert!(report.iter().any(|v| v.axiom() == "local-character"));
    let saturated = induced_topology(&fs, &t, &SiteCaps::relaxed()).unwrap();
    assert!(verify_topology(&saturated, &SiteCaps::relaxed()).unwrap().is_empty());
    let extra: Vec<&Sieve> = saturated
        .all_covers()
        .iter()
        .flatten()
        .filter(|r| as_pi_inverse(&fs, r).is_none())
        .collect();
    assert!(!extra.is_empty());
}

#[test]
fn pullback_commutes_with_pi_inverse() {
    let c = arrow("C", "V", "U");
    let a = Arc::new(PresheafOfCategories::constant(c.clone(), arrow("J", "x", "y")));
    let fs = grothendieck_construct(&a).unwrap();
    for u in c.objects() {
        for s in crate::site::all_sieves(&c, u, &SiteCaps::default()).unwrap() {
            for m in fs.total.morphism_ids() {
                if fs.objects[fs.total.target(m)].0 != u {
                    continue;
                }
                let (l, r) = pullback_of_pi_inverse(&fs, &s, m).unwrap();
                assert_eq!(l, r);
            }
        }
    }
}

#[test]
fn representable_round_trip() {
    let a = Arc::new(PresheafOfCategories::constant(pt(), z2()));
    let fs = grothendieck_construct(&a).unwrap();
    let h = representable(&fs.total, 0);
    let e = EnrichedSetDiagram::from_presheaf(&fs, &h).unwrap();
    assert_eq!(e.sizes(), &[vec![2]]);
    // t acts on {(id|id), (id|g)} by swapping
    let g = a.value(0).morphism_index("g^1").unwrap();
    assert_eq!((e.act(0, g, 0), e.act(0, g, 1)), (1, 0));
    let back = e.to_presheaf(&fs).unwrap();
    assert_eq!(back.actions(), h.actions());
    assert_eq!(back.sizes(), h.sizes());
}

#[test]
fn one_point_round_trip() {
    let c = arrow("C", "V", "U");
    let a = Arc::new(PresheafOfCategories::constant(c, arrow("J", "x", "y")));
    let fs = grothendieck_construct(&a).unwrap();
    let one = EnrichedSetDiagram::one_point(a.clone());
    assert!(one.validate().is_empty());
    let p = one.to_presheaf(&fs).unwrap();
    p.validate().unwrap();
    assert_eq!(EnrichedSetDiagram::from_presheaf(&fs, &p).unwrap(), one);
}

fn swap_diagram(a: &Arc<PresheafOfCategories>) -> EnrichedSetDiagram {
    // value {0,1} with the generator swapping
    let g = a.value(0).morphism_index("g^1").unwrap();
    let mut act = alloc::vec![alloc::vec![0, 1]; 2];
    act[g] = alloc::vec![1, 0];
    EnrichedSetDiagram::new(a.clone(), alloc::vec![alloc::vec![2]], alloc::vec![act], alloc::vec![alloc::vec![alloc::vec![0, 1]]])
        .unwrap()
        .checked()
        .unwrap()
}

#[test]
fn object_restriction_examples() {
    let a = Arc::new(PresheafOfCategories::constant(pt(), z2()));
    let one = EnrichedSetDiagram::one_point(a.clone());
    let r = one.object_restriction();
    assert_eq!(r.total, a.objects_presheaf().with_labels(r.total.labels().unwrap().clone()));
    let x = swap_diagram(&a);
    let r = x.object_restriction();
    assert_eq!(r.total.sizes(), &[2]);
    assert_eq!(r.projection, alloc::vec![alloc::vec![0, 0]]);
}

#[test]
fn psi_examples() {
    let c = arrow("C", "V", "U");
    let trivial = Arc::new(PresheafOfCategories::constant(c.clone(), pt()));
    let one = EnrichedSetDiagram::one_point(trivial.clone()).object_restriction();
    let l = psi_left_adjoint(&trivial, &one).unwrap();
    assert_eq!(l.diagram.sizes(), &[alloc::vec![1], alloc::vec![1]]);

    let a = Arc::new(PresheafOfCategories::constant(pt(), z2()));
    let x0 = EnrichedSetDiagram::one_point(a.clone()).object_restriction();
    let l = psi_left_adjoint(&a, &x0).unwrap();
    assert!(l.diagram.validate().is_empty());
    assert_eq!(l.diagram.object_restriction().total.sizes(), &[2]);
    let tri = check_psi_triangles(&a, &x0, &swap_diagram(&a)).unwrap();
    assert!(tri.pass(), "{tri:?}");
}

fn e2_to_point() -> MorphismOfPresheavesOfCategories {
    let e2 = Arc::new(FiniteCategory::codiscrete(2));
    let a = Arc::new(PresheafOfCategories::constant(pt(), e2.clone()));
    let b = Arc::new(PresheafOfCategories::constant(pt(), pt()));
    let f = Functor::to_terminal(e2, pt()).unwrap();
    MorphismOfPresheavesOfCategories::new(a, b, alloc::vec![f]).unwrap().checked().unwrap()
}

#[test]
fn restriction_and_kan_examples() {
    let m = e2_to_point();
    let b = m.cod.clone();
    let x = EnrichedSetDiagram::new(b.clone(), alloc::vec![alloc::vec![2]], alloc::vec![alloc::vec![alloc::vec![0, 1]]], alloc::vec![alloc::vec![alloc::vec![0, 1]]])
        .unwrap();
    let r = restrict_along(&m, &x).unwrap();
    assert!(r.validate().is_empty());
    assert_eq!(r.sizes(), &[alloc::vec![2, 2]]);
    let y = EnrichedSetDiagram::one_point(m.dom.clone());
    let l = left_kan_along(&m, &y).unwrap();
    assert_eq!(l.diagram.sizes(), &[alloc::vec![1]]);
    assert!(check_kan_triangles(&m, &y, &x).unwrap().pass());

    let id = MorphismOfPresheavesOfCategories::identity(m.dom.clone());
    assert_eq!(restrict_along(&id, &y).unwrap(), y);
    let l = left_kan_along(&id, &y).unwrap();
    assert_eq!(l.diagram.sizes(), y.sizes());
}

#[test]
fn kan_of_point_counts_components() {
    // m: discrete {p, q} -> chain 0 -> 1 sending p, q to 0, 1
    let d = Arc::new(FiniteCategory::discrete("D", &["p", "q"]));
    let ch = Arc::new(FiniteCategory::chain(2));
    let f = Functor::checked(d.clone(), ch.clone(), alloc::vec![0, 1], alloc::vec![ch.identity(0), ch.identity(1)]).unwrap();
    let a = Arc::new(PresheafOfCategories::constant(pt(), d));
    let b = Arc::new(PresheafOfCategories::constant(pt(), ch.clone()));
    let m = MorphismOfPresheavesOfCategories::new(a.clone(), b, alloc::vec![f.clone()]).unwrap();
    let l = left_kan_along(&m, &EnrichedSetDiagram::one_point(a)).unwrap();
    for bo in ch.objects() {
        let comma = crate::fincat::comma_category(&f.opposite(), bo).unwrap();
        assert_eq!(l.diagram.size(0, bo), pi0(&comma.category).classes.len());
    }
    // (U, 0) sees p and q, (U, 1) only q
    assert_eq!(l.diagram.sizes(), &[alloc::vec![2, 1]]);
}

#[test]
fn translation_examples() {
    let c = arrow("C", "V", "U");
    let one = crate::fincat::SetValuedFunctor::constant(c.clone(), Variance::Contravariant, 1);
    let ch = Arc::new(FiniteCategory::chain(2));
    let data = TranslationData {
        index: ch.clone(),
        presheaves: alloc::vec![one.clone(), one.clone()],
        transitions: alloc::vec![alloc::vec![alloc::vec![0]; 2]; 3],
    };
    let ey = Arc::new(make_translation_presheaf(&data).unwrap());
    assert_eq!(ey.value(0).num_morphisms(), 3);
    let fs = grothendieck_construct(&ey).unwrap();
    // ≅ C × chain
    assert_eq!((fs.total.num_objects(), fs.total.num_morphisms()), (4, 9));

    let x = crate::fincat::SetValuedFunctor::new(
        c.clone(),
        Variance::Contravariant,
        alloc::vec![3, 2],
        alloc::vec![alloc::vec![0, 1, 2], alloc::vec![0, 1], alloc::vec![0, 2]],
    );
    x.validate().unwrap();
    let single = TranslationData { index: pt(), presheaves: alloc::vec![x.clone()], transitions: alloc::vec![alloc::vec![alloc::vec![0, 1, 2], alloc::vec![0, 1]]] };
    let ey = Arc::new(make_translation_presheaf(&single).unwrap());
    assert!(ey.value(0).morphism_ids().all(|f| ey.value(0).is_identity(f)));
    let fs = grothendieck_construct(&ey).unwrap();
    let fx = grothendieck_construct(&Arc::new(PresheafOfCategories::discrete(&x).unwrap())).unwrap();
    assert_eq!(fs.total.num_morphisms(), fx.total.num_morphisms());

    // non-natural transition is rejected
    let bad = TranslationData {
        index: ch,
        presheaves: alloc::vec![x.clone(), x],
        transitions: alloc::vec![alloc::vec![alloc::vec![0, 1, 2], alloc::vec![0, 1]], alloc::vec![alloc::vec![0, 1, 2], alloc::vec![0, 1]], alloc::vec![alloc::vec![1, 0, 2], alloc::vec![0, 1]]],
    };
    assert!(make_translation_presheaf(&bad).is_err());
}

#[test]
fn hand_counted_translation() {
    // Y_0(U) = {p}, Y_0(V) = {q}, Y_1 = Y_0, θ the identity: C/EY has the
    // four objects (U|i:p), (V|i:q) and 9 morphisms
    let c = arrow("C", "V", "U");
    let y = crate::fincat::SetValuedFunctor::constant(c.clone(), Variance::Contravariant, 1);
    let ch = Arc::new(FiniteCategory::chain(2));
    let data = TranslationData {
        index: ch,
        presheaves: alloc::vec![y.clone(), y],
        transitions: alloc::vec![alloc::vec![alloc::vec![0]; 2]; 3],
    };
    let fs = grothendieck_construct(&Arc::new(make_translation_presheaf(&data).unwrap())).unwrap();
    assert_eq!(fs.total.num_morphisms(), 9);
}

#[test]
fn invertible_iff_base_invertible() {
    let g = Arc::new(FiniteCategory::banded_groupoid("G", 2, 2));
    let c = arrow("C", "V", "U");
    let a = Arc::new(PresheafOfGroupoids::new(PresheafOfCategories::constant(c.clone(), g)).unwrap().into_inner());
    let fs = grothendieck_construct(&a).unwrap();
    for m in fs.total.morphism_ids() {
        let (alpha, _) = fs.morphisms[m];
        assert_eq!(fs.total.inverse_of(m).is_some(), c.inverse_of(alpha).is_some());
    }
}

#[test]
fn sectionwise_equivalence_gives_total_equivalence() {
    let m = e2_to_point();
    assert!(m.is_sectionwise_equivalence());
    let fa = grothendieck_construct(&m.dom).unwrap();
    let fb = grothendieck_construct(&m.cod).unwrap();
    let f = fa.induced_functor(&m, &fb).unwrap();
    assert!(f.is_equivalence());
}

#[test]
fn over_presheaf_conversions() {
    let c = arrow("C", "V", "U");
    let x = crate::fincat::SetValuedFunctor::new(
        c.clone(),
        Variance::Contravariant,
        alloc::vec![2, 1],
        alloc::vec![alloc::vec![0, 1], alloc::vec![0], alloc::vec![0]],
    );
    let y = crate::fincat::SetValuedFunctor::new(
        c.clone(),
        Variance::Contravariant,
        alloc::vec![3, 2],
        alloc::vec![alloc::vec![0, 1, 2], alloc::vec![0, 1], alloc::vec![0, 2]],
    );
    let over = OverPresheaf::new(x.clone(), y, alloc::vec![alloc::vec![0, 1, 0], alloc::vec![0, 0]]).unwrap();
    let fs = grothendieck_construct(&Arc::new(PresheafOfCategories::discrete(&x).unwrap())).unwrap();
    let p = over.to_total_presheaf(&fs).unwrap();
    p.validate().unwrap();
    let back = OverPresheaf::from_total_presheaf(&fs, &p).unwrap();
    // elements come back grouped by section
    let perm: Vec<Vec<usize>> = c
        .objects()
        .map(|u| (0..x.size(u)).flat_map(|s| over.fibre(u, s)).collect())
        .collect();
    assert!(back.total.is_iso_via(&over.total, &perm));
    assert!(back.is_morphism_to(&over, &perm));
    let pulled = over.pullback_along_section(1, 0).unwrap();
    assert_eq!(pulled.total.sizes(), &[2, 2]);
}

#[test]
fn restriction_collapsing_objects() {
    // both objects over U restrict to the single object over V
    let c = arrow("C", "V", "U");
    let j = arrow("J", "x", "y");
    let restrictions = c
        .morphism_ids()
        .map(|m| match (c.is_identity(m), c.source(m) == c.object_index("U").unwrap()) {
            (true, true) => Functor::identity(j.clone()),
            (true, false) => Functor::identity(pt()),
            _ => Functor::to_terminal(j.clone(), pt()).unwrap(),
        })
        .collect();
    let values = c.objects().map(|u| if c.object_name(u) == "U" { j.clone() } else { pt() }).collect();
    let a = Arc::new(PresheafOfCategories::new(c.clone(), values, restrictions).unwrap());
    let fs = grothendieck_construct(&a).unwrap();
    assert!(fs.total.validate().is_empty(), "{:?}", fs.total.validate());
    assert_eq!((fs.total.num_objects(), fs.total.num_morphisms()), (3, 6));
    for (i, &(alpha, f)) in fs.morphisms.iter().enumerate() {
        assert_eq!(fs.morphism_of(fs.total.target(i), alpha, f), Some(i));
    }
    let t = induced_topology(&fs, &cover_a(&c), &SiteCaps::default()).unwrap();
    assert!(verify_topology(&t, &SiteCaps::default()).unwrap().is_empty());
}
