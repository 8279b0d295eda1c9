//! Seedable generators of small finite instances.
//!
//! Every generator takes a [`ChaCha8Rng`], so a seed fixes the whole
//! sequence of instances on every platform.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fibred::{
    grothendieck_construct, EnrichedSetDiagram, MorphismOfPresheavesOfCategories, PresheafOfCategories,
    PresheafOfGroupoids,
};
use crate::fincat::{CategoryBuilder, FiniteCategory, Functor, Groupoid, MorIx, ObjIx, Variance};
use crate::hocopb::{
    presheaf_hocolim, EnrichedGroupoidDiagram, GroupoidDiagram, OverNerve, PresheafOverNerve,
};
use crate::site::{representable, Presheaf};
use crate::sset::{copair, nerve, IntegerMatrix, SimplicialMap, TruncatedSimplicialSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small site: a random poset on up to `max_objects` objects, the group
/// `Z/2`, or a parallel pair. At most 8 morphisms when `max_objects ≤ 3`.
pub fn random_site(rng: &mut ChaCha8Rng, max_objects: usize) -> Arc<FiniteCategory> {
    let max_objects = max_objects.max(1);
    match rng.gen_range(0..10) {
        0 => Arc::new(FiniteCategory::cyclic_group(2)),
        1 if max_objects >= 2 => {
            let mut b = CategoryBuilder::new("P");
            let a = b.add_object("a");
            let c = b.add_object("b");
            b.add_morphism("f", a, c);
            b.add_morphism("g", a, c);
            Arc::new(b.build())
        }
        _ => Arc::new(random_poset(rng, max_objects)),
    }
}

pub fn random_poset(rng: &mut ChaCha8Rng, max_objects: usize) -> FiniteCategory {
    let n = rng.gen_range(1..=max_objects.max(1));
    let names: Vec<String> = (0..n)
        .map(|i| match ["U", "V", "W", "X", "Y", "Z"].get(i) {
            Some(s) => s.to_string(),
            None => format!("U{i}"),
        })
        .collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut rel = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(0.5) {
                rel.push((refs[i], refs[j]));
            }
        }
    }
    FiniteCategory::poset("S", &refs, &rel).expect("forward relations are acyclic")
}

/// Coproducts of representables and one-point presheaves with every set of
/// size at most `max_size`; `inhabited` forces a one-point summand.
pub fn random_presheaf(rng: &mut ChaCha8Rng, c: &Arc<FiniteCategory>, max_size: usize, inhabited: bool) -> Presheaf {
    let mut summands: Vec<Presheaf> = Vec::new();
    let mut sizes = vec![0usize; c.num_objects()];
    let point = Presheaf::constant(c.clone(), Variance::Contravariant, 1);
    if inhabited && max_size >= 1 {
        sizes = point.sizes().to_vec();
        summands.push(point.clone());
    }
    let attempts = if c.num_objects() == 0 { 0 } else { rng.gen_range(0..=3) };
    for _ in 0..attempts {
        let s = if rng.gen_bool(0.3) { point.clone() } else { representable(c, rng.gen_range(0..c.num_objects())) };
        if sizes.iter().zip(s.sizes()).all(|(a, b)| a + b <= max_size) {
            for (a, b) in sizes.iter_mut().zip(s.sizes()) {
                *a += b;
            }
            summands.push(s);
        }
    }
    coproduct(c, &summands)
}

/// Disjoint union of presheaves on `c`.
pub fn coproduct(c: &Arc<FiniteCategory>, parts: &[Presheaf]) -> Presheaf {
    let mut sizes = vec![0usize; c.num_objects()];
    let mut action: Vec<Vec<usize>> = vec![Vec::new(); c.num_morphisms()];
    for p in parts {
        for f in c.morphism_ids() {
            let (s, t) = (c.source(f), c.target(f));
            let (os, _) = (sizes[s], sizes[t]);
            action[f].extend((0..p.size(t)).map(|e| os + p.apply(f, e)));
        }
        for (a, b) in sizes.iter_mut().zip(p.sizes()) {
            *a += b;
        }
    }
    Presheaf::new(c.clone(), Variance::Contravariant, sizes, action)
}

/// `U ↦ E(X(U)) × Z/n`, the codiscrete groupoid on `X(U)` with every hom-set
/// a copy of `Z/n`, restricting along `X`.
pub fn banded_presheaf(x: &Presheaf, n: usize) -> Result<PresheafOfGroupoids> {
    let c = x.base().clone();
    let values: Vec<Arc<FiniteCategory>> = c
        .objects()
        .map(|u| Arc::new(FiniteCategory::banded_groupoid(&format!("G{}", c.object_name(u)), x.size(u), n)))
        .collect();
    let restrictions = c
        .morphism_ids()
        .map(|a| {
            let (v, u) = (c.source(a), c.target(a));
            let map: Vec<usize> = (0..x.size(u)).map(|e| x.apply(a, e)).collect();
            banded_functor(&values[u], &values[v], x.size(u), x.size(v), n, &map)
        })
        .collect();
    PresheafOfGroupoids::new(PresheafOfCategories::new(c, values, restrictions)?)
}

/// The functor between banded groupoids induced by a map of object sets,
/// identity on the band.
pub fn banded_functor(
    dom: &Arc<FiniteCategory>,
    cod: &Arc<FiniteCategory>,
    k1: usize,
    k2: usize,
    n: usize,
    map: &[usize],
) -> Functor {
    let mut mors = vec![0; dom.num_morphisms()];
    for i in 0..k1 {
        for j in 0..k1 {
            for g in 0..n {
                mors[banded_index(k1, n, i, j, g)] = banded_index(k2, n, map[i], map[j], g);
            }
        }
    }
    Functor::new(dom.clone(), cod.clone(), map.to_vec(), mors)
}

/// Index of the arrow `i → j` with band element `g` in
/// [`FiniteCategory::banded_groupoid`]`(k, n)`.
pub fn banded_index(k: usize, n: usize, i: usize, j: usize, g: usize) -> MorIx {
    if i == j && g == 0 {
        return i;
    }
    let lin = (i * k + j) * n + g;
    let identities_before = (0..k).filter(|&a| (a * k + a) * n < lin).count();
    k + lin - identities_before
}

/// A presheaf of categories with at most `max_per_section` objects per
/// section: discrete, banded, a product with a fixed small category, or
/// constant.
pub fn random_presheaf_of_categories(
    rng: &mut ChaCha8Rng,
    site: &Arc<FiniteCategory>,
    max_per_section: usize,
) -> Result<PresheafOfCategories> {
    match rng.gen_range(0..4) {
        0 => {
            let x = random_presheaf(rng, site, max_per_section, false);
            PresheafOfCategories::discrete(&x)
        }
        1 => {
            let x = random_presheaf(rng, site, max_per_section, false);
            let n = rng.gen_range(1..=3);
            Ok(banded_presheaf(&x, n)?.into_inner())
        }
        2 if max_per_section >= 2 => {
            let x = random_presheaf(rng, site, max_per_section / 2, false);
            product_presheaf(&x, &Arc::new(FiniteCategory::chain(2)))
        }
        _ => {
            let j = match rng.gen_range(0..3) {
                0 => FiniteCategory::chain(max_per_section.clamp(1, 3)),
                1 => FiniteCategory::cyclic_group(2),
                _ => FiniteCategory::codiscrete(max_per_section.clamp(1, 2)),
            };
            Ok(PresheafOfCategories::constant(site.clone(), Arc::new(j)))
        }
    }
}

/// `U ↦ X(U) × J` with restrictions `X(α) × 1`.
pub fn product_presheaf(x: &Presheaf, j: &Arc<FiniteCategory>) -> Result<PresheafOfCategories> {
    let c = x.base().clone();
    let values: Vec<Arc<FiniteCategory>> = c
        .objects()
        .map(|u| {
            let names: Vec<String> = (0..x.size(u)).map(|e| format!("{}{e}", c.object_name(u))).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let d = FiniteCategory::discrete(&format!("X{}", c.object_name(u)), &refs);
            Arc::new(FiniteCategory::product(&d, j))
        })
        .collect();
    let (nj, mj) = (j.num_objects(), j.num_morphisms());
    let restrictions = c
        .morphism_ids()
        .map(|a| {
            let (v, u) = (c.source(a), c.target(a));
            let objects = (0..x.size(u) * nj).map(|o| x.apply(a, o / nj) * nj + o % nj).collect();
            let morphisms = (0..x.size(u) * mj).map(|m| x.apply(a, m / mj) * mj + m % mj).collect();
            Functor::new(values[u].clone(), values[v].clone(), objects, morphisms)
        })
        .collect();
    PresheafOfCategories::new(c, values, restrictions)?.checked()
}

/// A presheaf of groupoids: banded over a random presheaf of sets with
/// band `Z/n`, `n ≤ max_band`.
pub fn random_presheaf_of_groupoids(
    rng: &mut ChaCha8Rng,
    site: &Arc<FiniteCategory>,
    max_per_section: usize,
    max_band: usize,
) -> Result<PresheafOfGroupoids> {
    let inhabited = rng.gen_bool(0.7);
    let x = random_presheaf(rng, site, max_per_section, inhabited);
    banded_presheaf(&x, rng.gen_range(1..=max_band.max(1)))
}

/// A sectionwise equivalence `G → H` of banded presheaves: `H` is banded
/// over an inhabited `Y`, `G` over `Y ⊔ Z` with `Z` sent to a global point.
pub fn random_sectionwise_equivalence(
    rng: &mut ChaCha8Rng,
    site: &Arc<FiniteCategory>,
    max_target: usize,
    max_extra: usize,
    max_band: usize,
) -> Result<MorphismOfPresheavesOfCategories> {
    let y = random_presheaf(rng, site, max_target.max(1), true);
    let z = random_presheaf(rng, site, max_extra, false);
    let x = coproduct(site, &[y.clone(), z.clone()]);
    let n = rng.gen_range(1..=max_band.max(1));
    let g = banded_presheaf(&x, n)?.into_inner();
    let h = banded_presheaf(&y, n)?.into_inner();
    // the inhabited summand put its point first
    let components = site
        .objects()
        .map(|u| {
            let map: Vec<usize> = (0..x.size(u)).map(|e| if e < y.size(u) { e } else { 0 }).collect();
            banded_functor(g.value(u), h.value(u), x.size(u), y.size(u), n, &map)
        })
        .collect();
    MorphismOfPresheavesOfCategories::new(Arc::new(g), Arc::new(h), components)?.checked()
}

/// A disjoint union of banded groupoids `E(k) × Z/n` with the band arrow
/// `(component, i, j, g)` behind every morphism.
#[derive(Clone, Debug)]
pub struct BandedGroupoid {
    pub groupoid: Groupoid,
    /// `(k, n)` per component.
    pub components: Vec<(usize, usize)>,
    pub object_component: Vec<(usize, usize)>,
    pub arrows: Vec<(usize, usize, usize, usize)>,
}

pub fn banded_union(components: &[(usize, usize)]) -> BandedGroupoid {
    let mut b = CategoryBuilder::new("G");
    let mut object_component = Vec::new();
    let mut first = Vec::new();
    for (c, &(k, _)) in components.iter().enumerate() {
        first.push(b.num_objects());
        for i in 0..k {
            b.add_object(&format!("{}{i}", (b'a' + c as u8) as char));
            object_component.push((c, i));
        }
    }
    let mut arrows: Vec<(usize, usize, usize, usize)> =
        object_component.iter().map(|&(c, i)| (c, i, i, 0)).collect();
    for (c, &(k, n)) in components.iter().enumerate() {
        let mut t = vec![0; k * k * n];
        for i in 0..k {
            for j in 0..k {
                for g in 0..n {
                    let idx = (i * k + j) * n + g;
                    t[idx] = if i == j && g == 0 {
                        first[c] + i
                    } else {
                        let name = format!("{}{i}>{j}:{g}", (b'a' + c as u8) as char);
                        arrows.push((c, i, j, g));
                        b.add_morphism(&name, first[c] + i, first[c] + j)
                    };
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    for g in 0..n {
                        for h in 0..n {
                            b.set_composite(t[(j * k + l) * n + h], t[(i * k + j) * n + g], t[(i * k + l) * n + (g + h) % n]);
                        }
                    }
                }
            }
        }
    }
    let groupoid = Groupoid::new(Arc::new(b.build())).expect("banded categories are groupoids");
    BandedGroupoid { groupoid, components: components.to_vec(), object_component, arrows }
}

/// At most `max_objects` objects; bands from `{1, 2, 3}`; at most
/// `max_morphisms` morphisms.
pub fn random_groupoid(rng: &mut ChaCha8Rng, max_objects: usize, max_morphisms: usize) -> BandedGroupoid {
    loop {
        let mut comps = Vec::new();
        let mut objects = 0;
        let target = rng.gen_range(1..=max_objects.max(1));
        while objects < target {
            let k = rng.gen_range(1..=target - objects);
            let n = rng.gen_range(1..=3);
            comps.push((k, n));
            objects += k;
        }
        let morphisms: usize = comps.iter().map(|&(k, n)| k * k * n).sum();
        if morphisms <= max_morphisms {
            return banded_union(&comps);
        }
    }
}

/// A `G`-set diagram of discrete simplicial sets: every component acts on a
/// union of orbits `Z/n → Z/d`.
pub fn random_gset_diagram(rng: &mut ChaCha8Rng, g: &BandedGroupoid, dim: usize) -> Result<GroupoidDiagram> {
    let orbits: Vec<Vec<usize>> = g
        .components
        .iter()
        .map(|&(_, n)| {
            let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
            (0..rng.gen_range(1..=2)).map(|_| *divisors.choose(rng).expect("n ≥ 1")).collect()
        })
        .collect();
    let sizes: Vec<usize> = g.object_component.iter().map(|&(c, _)| orbits[c].iter().sum()).collect();
    let act: Vec<Vec<usize>> = g
        .arrows
        .iter()
        .map(|&(c, _, _, shift)| {
            let mut out = Vec::new();
            let mut base = 0;
            for &d in &orbits[c] {
                out.extend((0..d).map(|e| base + (e + shift) % d));
                base += d;
            }
            out
        })
        .collect();
    // arrows are listed in morphism order
    GroupoidDiagram::from_gset(g.groupoid.clone(), &sizes, &act, dim)
}

/// A simplicial set over the nerve of `g` with at most `max_nondegenerate`
/// nondegenerate simplices: one or two subcomplexes of the nerve generated
/// by a few strings, mapped in by inclusion.
pub fn random_over_nerve(
    rng: &mut ChaCha8Rng,
    g: &Groupoid,
    dim: usize,
    max_nondegenerate: usize,
) -> Result<OverNerve> {
    let keyed = nerve(g.category(), dim);
    let nv = Arc::new(keyed.sset.clone());
    let flags = nv.degenerate_flags();
    let top = dim.min(2);
    let candidates: Vec<(usize, usize)> = (0..=top)
        .flat_map(|n| (0..nv.count(n)).filter(|&x| !flags[n][x]).map(move |x| (n, x)).collect::<Vec<_>>())
        .collect();
    loop {
        let copies = rng.gen_range(1..=2);
        let mut parts: Vec<SimplicialMap> = Vec::new();
        for _ in 0..copies {
            let k = rng.gen_range(1..=3);
            let gens: Vec<(usize, usize)> = (0..k).map(|_| *candidates.choose(rng).expect("nerve is inhabited")).collect();
            parts.push(nv.generated_subset(&gens)?);
        }
        let structure = copair(&parts)?;
        let nondeg: usize = (0..=dim).map(|n| structure.dom.nondegenerate(n).len()).sum();
        if nondeg <= max_nondegenerate {
            return OverNerve::new(g.clone(), structure);
        }
    }
}

/// A presheaf of groupoids on a poset site with at most two objects, small
/// sections, and a pair `(Y, X)` of sectionwise inputs for the adjunction.
pub fn random_enriched_instance(
    rng: &mut ChaCha8Rng,
    dim: usize,
) -> Result<(PresheafOverNerve, EnrichedGroupoidDiagram)> {
    let site = Arc::new(random_poset(rng, 2));
    let x = random_presheaf(rng, &site, 2, true);
    let band = if x.sizes().iter().all(|&s| s <= 1) { rng.gen_range(1..=3) } else { 1 };
    let base = Arc::new(banded_presheaf(&x, band)?);
    let fs = grothendieck_construct(&Arc::new(base.inner().clone()))?;
    let total = fs.total.clone();
    let discrete = |rng: &mut ChaCha8Rng| -> Result<EnrichedGroupoidDiagram> {
        let inhabited = rng.gen_bool(0.5);
        let f = random_presheaf(rng, &total, 2, inhabited);
        let d = EnrichedSetDiagram::from_presheaf(&fs, &f)?;
        EnrichedGroupoidDiagram::discrete(base.clone(), &d, dim)
    };
    let y = if rng.gen_bool(0.4) {
        PresheafOverNerve::nerve_over_itself(base.clone(), dim)
    } else {
        presheaf_hocolim(&discrete(rng)?, dim)?.over
    };
    let xd = discrete(rng)?;
    Ok((y, xd))
}

/// Entries uniform in `[-bound, bound]`, shape up to `max_dim × max_dim`.
pub fn random_integer_matrix(rng: &mut ChaCha8Rng, max_dim: usize, bound: i64) -> IntegerMatrix {
    let r = rng.gen_range(1..=max_dim.max(1));
    let c = rng.gen_range(1..=max_dim.max(1));
    let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
    IntegerMatrix::from_rows(&rows)
}

/// A random unimodular matrix and its inverse, from elementary operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> (IntegerMatrix, IntegerMatrix) {
    let mut q = IntegerMatrix::identity(n);
    let mut q_inv = IntegerMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            q.set(0, 0, BigInt::from(-1));
            q_inv.set(0, 0, BigInt::from(-1));
        }
        return (q, q_inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k = BigInt::from(rng.gen_range(-2i64..=2));
        // E = 1 + k e_ij, E⁻¹ = 1 − k e_ij
        let mut e = IntegerMatrix::identity(n);
        e.set(i, j, k.clone());
        let mut e_inv = IntegerMatrix::identity(n);
        e_inv.set(i, j, -k);
        q = e.mul(&q);
        q_inv = q_inv.mul(&e_inv);
    }
    (q, q_inv)
}

/// Index of an object in a banded union by component and position.
pub fn banded_object(g: &BandedGroupoid, component: usize, i: usize) -> Option<ObjIx> {
    g.object_component.iter().position(|&p| p == (component, i))
}

/// Simplicial sets used as constant diagram values.
pub fn small_simplicial_set(rng: &mut ChaCha8Rng, dim: usize) -> TruncatedSimplicialSet {
    let c = match rng.gen_range(0..3) {
        0 => FiniteCategory::chain(2),
        1 => FiniteCategory::terminal(),
        _ => FiniteCategory::discrete("D", &["p", "q"]),
    };
    nerve(&c, dim).sset
}
