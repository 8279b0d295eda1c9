//! Presheaves of categories, the Grothendieck construction and the structures
//! built on it.

mod enriched;
mod translation;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{input_err, invalid, Error, Result};
use crate::fincat::{FiniteCategory, Functor, Groupoid, MorIx, Morphism, ObjIx, SetValuedFunctor, Variance};
use crate::site::{pullback_sieve, sieves_containing, GrothendieckTopology, Presheaf, Sieve, SiteCaps};

pub use enriched::{
    check_kan_triangles, check_psi_triangles, left_kan_along, psi_counit, psi_left_adjoint, restrict_along,
    same_data, EnrichedSetDiagram, KanAlong, KanTriangles, OverPresheaf, PsiLeftAdjoint, PsiTriangles,
};
pub use translation::{make_translation_presheaf, TranslationData};

/// A strict presheaf of finite categories on a finite site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafOfCategories {
    site: Arc<FiniteCategory>,
    values: Vec<Arc<FiniteCategory>>,
    // restrictions[α] : A(target α) → A(source α)
    restrictions: Vec<Functor>,
}

impl PresheafOfCategories {
    /// Shape checks only; see [`PresheafOfCategories::validate`].
    pub fn new(site: Arc<FiniteCategory>, values: Vec<Arc<FiniteCategory>>, restrictions: Vec<Functor>) -> Result<Self> {
        if values.len() != site.num_objects() || restrictions.len() != site.num_morphisms() {
            return Err(input_err!("need one category per object and one functor per morphism of {}", site.name()));
        }
        for alpha in site.morphism_ids() {
            let r = &restrictions[alpha];
            if **r.dom() != *values[site.target(alpha)] || **r.cod() != *values[site.source(alpha)] {
                return Err(input_err!(
                    "restriction along {} must go from the value at {} to the value at {}",
                    site.morphism_name(alpha),
                    site.object_name(site.target(alpha)),
                    site.object_name(site.source(alpha))
                ));
            }
        }
        Ok(PresheafOfCategories { site, values, restrictions })
    }

    pub fn constant(site: Arc<FiniteCategory>, value: Arc<FiniteCategory>) -> Self {
        let values = vec![value.clone(); site.num_objects()];
        let restrictions = vec![Functor::identity(value); site.num_morphisms()];
        PresheafOfCategories { site, values, restrictions }
    }

    /// Discrete categories on the sections of a presheaf of sets.
    pub fn discrete(x: &Presheaf) -> Result<Self> {
        if x.variance() != Variance::Contravariant {
            return Err(input_err!("presheaves are contravariant"));
        }
        let site = x.base().clone();
        let values: Vec<Arc<FiniteCategory>> = site
            .objects()
            .map(|u| {
                let names: Vec<String> = (0..x.size(u)).map(|e| x.label(u, e)).collect();
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                Arc::new(FiniteCategory::discrete(site.object_name(u), &refs))
            })
            .collect();
        let restrictions = site
            .morphism_ids()
            .map(|alpha| {
                let act = x.action(alpha).to_vec();
                let cod = values[site.source(alpha)].clone();
                let mors = act.iter().map(|&e| cod.identity(e)).collect();
                Functor::new(values[site.target(alpha)].clone(), cod, act, mors)
            })
            .collect();
        Ok(PresheafOfCategories { site, values, restrictions })
    }

    pub fn site(&self) -> &Arc<FiniteCategory> {
        &self.site
    }

    pub fn value(&self, u: ObjIx) -> &Arc<FiniteCategory> {
        &self.values[u]
    }

    pub fn values(&self) -> &[Arc<FiniteCategory>] {
        &self.values
    }

    pub fn restriction(&self, alpha: MorIx) -> &Functor {
        &self.restrictions[alpha]
    }

    /// `α*(x)`.
    pub fn restrict_obj(&self, alpha: MorIx, x: ObjIx) -> ObjIx {
        self.restrictions[alpha].obj(x)
    }

    /// `α*(f)`.
    pub fn restrict_mor(&self, alpha: MorIx, f: MorIx) -> MorIx {
        self.restrictions[alpha].mor(f)
    }

    /// Functoriality failures: invalid functors, identities not acting as
    /// identities, and composites not restricting strictly.
    pub fn validate(&self) -> Vec<String> {
        let c = &*self.site;
        let mut out = Vec::new();
        for alpha in c.morphism_ids() {
            for v in self.restrictions[alpha].validate() {
                out.push(format!("restriction along {}: {v}", c.morphism_name(alpha)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for u in c.objects() {
            if !self.restrictions[c.identity(u)].is_identity() {
                out.push(format!("restriction along {} is not the identity", c.morphism_name(c.identity(u))));
            }
        }
        for alpha in c.morphism_ids() {
            for gamma in c.into_object(c.source(alpha)) {
                let ag = c.compose(alpha, gamma);
                let (ra, rg, rag) = (&self.restrictions[alpha], &self.restrictions[gamma], &self.restrictions[ag]);
                let objects_ok = rag.object_map().iter().zip(ra.object_map()).all(|(&l, &m)| l == rg.obj(m));
                let morphisms_ok = rag.morphism_map().iter().zip(ra.morphism_map()).all(|(&l, &m)| l == rg.mor(m));
                if !objects_ok || !morphisms_ok {
                    out.push(format!(
                        "restriction along {} is not the composite of the restrictions along {} and {}",
                        c.morphism_name(ag),
                        c.morphism_name(alpha),
                        c.morphism_name(gamma)
                    ));
                }
            }
        }
        out
    }

    pub fn checked(self) -> Result<Self> {
        let report = self.validate();
        if report.is_empty() {
            Ok(self)
        } else {
            Err(invalid!("{}", report.join("; ")))
        }
    }

    /// The presheaf of objects `Ob(A)`.
    pub fn objects_presheaf(&self) -> Presheaf {
        let c = &self.site;
        let sizes = c.objects().map(|u| self.values[u].num_objects()).collect();
        let action = c.morphism_ids().map(|a| self.restrictions[a].object_map().to_vec()).collect();
        let labels = c.objects().map(|u| self.values[u].object_names().to_vec()).collect();
        SetValuedFunctor::new(c.clone(), Variance::Contravariant, sizes, action).with_labels(labels)
    }

    /// The presheaf of morphisms `Mor(A)`.
    pub fn morphisms_presheaf(&self) -> Presheaf {
        let c = &self.site;
        let sizes = c.objects().map(|u| self.values[u].num_morphisms()).collect();
        let action = c.morphism_ids().map(|a| self.restrictions[a].morphism_map().to_vec()).collect();
        let labels = c
            .objects()
            .map(|u| self.values[u].morphisms().iter().map(|m| m.name.clone()).collect())
            .collect();
        SetValuedFunctor::new(c.clone(), Variance::Contravariant, sizes, action).with_labels(labels)
    }
}

/// A presheaf of categories whose values are all groupoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafOfGroupoids {
    inner: PresheafOfCategories,
    groupoids: Vec<Groupoid>,
}

impl PresheafOfGroupoids {
    pub fn new(inner: PresheafOfCategories) -> Result<Self> {
        let inner = inner.checked()?;
        let groupoids = inner
            .values
            .iter()
            .zip(inner.site.object_names())
            .map(|(v, u)| Groupoid::new(v.clone()).map_err(|_| invalid!("value at {u} is not a groupoid")))
            .collect::<Result<_>>()?;
        Ok(PresheafOfGroupoids { inner, groupoids })
    }

    pub fn groupoid(&self, u: ObjIx) -> &Groupoid {
        &self.groupoids[u]
    }

    pub fn inner(&self) -> &PresheafOfCategories {
        &self.inner
    }

    pub fn into_inner(self) -> PresheafOfCategories {
        self.inner
    }
}

impl core::ops::Deref for PresheafOfGroupoids {
    type Target = PresheafOfCategories;
    fn deref(&self) -> &PresheafOfCategories {
        &self.inner
    }
}

/// A strict natural transformation of presheaves of categories: one functor
/// per object of the site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismOfPresheavesOfCategories {
    pub dom: Arc<PresheafOfCategories>,
    pub cod: Arc<PresheafOfCategories>,
    pub components: Vec<Functor>,
}

impl MorphismOfPresheavesOfCategories {
    pub fn new(dom: Arc<PresheafOfCategories>, cod: Arc<PresheafOfCategories>, components: Vec<Functor>) -> Result<Self> {
        if *dom.site != *cod.site {
            return Err(input_err!("presheaves live on different sites"));
        }
        if components.len() != dom.site.num_objects() {
            return Err(input_err!("need one functor per object of the site"));
        }
        for u in dom.site.objects() {
            if **components[u].dom() != *dom.values[u] || **components[u].cod() != *cod.values[u] {
                return Err(input_err!("component at {} has the wrong endpoints", dom.site.object_name(u)));
            }
        }
        Ok(MorphismOfPresheavesOfCategories { dom, cod, components })
    }

    pub fn identity(a: Arc<PresheafOfCategories>) -> Self {
        let components = a.values.iter().map(|v| Functor::identity(v.clone())).collect();
        MorphismOfPresheavesOfCategories { dom: a.clone(), cod: a, components }
    }

    pub fn component(&self, u: ObjIx) -> &Functor {
        &self.components[u]
    }

    /// Invalid components and naturality squares that fail to commute.
    pub fn validate(&self) -> Vec<String> {
        let c = &*self.dom.site;
        let mut out = Vec::new();
        for u in c.objects() {
            for v in self.components[u].validate() {
                out.push(format!("component at {}: {v}", c.object_name(u)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for alpha in c.morphism_ids() {
            let (v, u) = (c.source(alpha), c.target(alpha));
            let (mu, mv) = (&self.components[u], &self.components[v]);
            let (ra, rb) = (&self.dom.restrictions[alpha], &self.cod.restrictions[alpha]);
            let obj_ok = self.dom.values[u].objects().all(|x| mv.obj(ra.obj(x)) == rb.obj(mu.obj(x)));
            let mor_ok = self.dom.values[u].morphism_ids().all(|f| mv.mor(ra.mor(f)) == rb.mor(mu.mor(f)));
            if !obj_ok || !mor_ok {
                out.push(format!("naturality fails along {}", c.morphism_name(alpha)));
            }
        }
        out
    }

    pub fn checked(self) -> Result<Self> {
        let report = self.validate();
        if report.is_empty() {
            Ok(self)
        } else {
            Err(invalid!("{}", report.join("; ")))
        }
    }

    /// Every component is an equivalence of categories.
    pub fn is_sectionwise_equivalence(&self) -> bool {
        self.components.iter().all(Functor::is_equivalence)
    }

    /// The functor on objects `Ob(A) → Ob(B)` as a map of presheaves.
    pub fn object_map(&self, u: ObjIx) -> &[ObjIx] {
        self.components[u].object_map()
    }
}

/// The total category `C/A` of a presheaf of categories with its projection
/// to the site.
#[derive(Clone, Debug)]
pub struct FibredSite {
    pub base: Arc<PresheafOfCategories>,
    pub total: Arc<FiniteCategory>,
    pub projection: Functor,
    /// Object `i` is the pair `(U, x)` with `x` in `A(U)`.
    pub objects: Vec<(ObjIx, ObjIx)>,
    /// Morphism `i` is `(α, f)` with `α: V → U` and `f: y → α*(x)` in `A(V)`.
    pub morphisms: Vec<(MorIx, MorIx)>,
    object_index: BTreeMap<(ObjIx, ObjIx), ObjIx>,
    morphism_index: BTreeMap<(ObjIx, MorIx, MorIx), MorIx>,
}

impl FibredSite {
    pub fn object_of(&self, u: ObjIx, x: ObjIx) -> Option<ObjIx> {
        self.object_index.get(&(u, x)).copied()
    }

    /// The morphism `(α, f)` into the total object `target`.
    pub fn morphism_of(&self, target: ObjIx, alpha: MorIx, f: MorIx) -> Option<MorIx> {
        self.morphism_index.get(&(target, alpha, f)).copied()
    }

    pub fn site(&self) -> &Arc<FiniteCategory> {
        &self.base.site
    }

    /// `π⁻¹S` on the object `(U, x)`: the `(α, f)` into it with `α ∈ S`.
    pub fn pi_inverse(&self, s: &Sieve, x: ObjIx) -> Result<Sieve> {
        let o = self
            .object_of(s.base(), x)
            .ok_or_else(|| input_err!("no object {x} over {}", self.site().object_name(s.base())))?;
        let members = self.total.into_object(o).filter(|&m| s.contains(self.morphisms[m].0));
        Ok(Sieve::from_members(o, members))
    }

    /// The functor `C/A → C/B` induced by a morphism of presheaves of
    /// categories, given the total category of its codomain.
    pub fn induced_functor(&self, m: &MorphismOfPresheavesOfCategories, target: &FibredSite) -> Result<Functor> {
        if *m.dom != *self.base || *m.cod != *target.base {
            return Err(input_err!("morphism does not match the fibred sites"));
        }
        let c = self.site();
        let objects: Vec<ObjIx> = self
            .objects
            .iter()
            .map(|&(u, x)| target.object_of(u, m.components[u].obj(x)).expect("object"))
            .collect();
        let morphisms = self
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, &(alpha, f))| {
                let t = objects[self.total.target(i)];
                target.morphism_of(t, alpha, m.components[c.source(alpha)].mor(f)).expect("morphism")
            })
            .collect();
        Functor::checked(self.total.clone(), target.total.clone(), objects, morphisms)
    }
}

/// Objects `(U, x)`, morphisms `(α, f): (V, y) → (U, x)` with
/// `f: y → α*(x)`, composition `(α, f)(γ, g) = (αγ, γ*(f) ∘ g)`.
pub fn grothendieck_construct(a: &Arc<PresheafOfCategories>) -> Result<FibredSite> {
    let report = a.validate();
    if !report.is_empty() {
        return Err(invalid!("{}", report.join("; ")));
    }
    let c = &*a.site;
    let mut objects = Vec::new();
    let mut object_index = BTreeMap::new();
    let mut object_names = Vec::new();
    for u in c.objects() {
        for x in a.values[u].objects() {
            object_index.insert((u, x), objects.len());
            objects.push((u, x));
            object_names.push(format!("({}|{})", c.object_name(u), a.values[u].object_name(x)));
        }
    }
    let mut morphisms = Vec::new();
    let mut morphism_index = BTreeMap::new();
    let mut records = Vec::new();
    for (t, &(u, x)) in objects.iter().enumerate() {
        for alpha in c.into_object(u) {
            let v = c.source(alpha);
            let av = &a.values[v];
            for f in av.into_object(a.restrict_obj(alpha, x)) {
                morphism_index.insert((t, alpha, f), morphisms.len());
                morphisms.push((alpha, f));
                records.push(Morphism {
                    name: format!("({}|{})", c.morphism_name(alpha), av.morphism_name(f)),
                    source: object_index[&(v, av.source(f))],
                    target: t,
                });
            }
        }
    }
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for r in &records {
        *seen.entry(r.name.clone()).or_default() += 1;
    }
    for r in &mut records {
        if seen[&r.name] > 1 {
            r.name = format!("{}@{}", r.name, object_names[r.target]);
        }
    }
    let identity = objects
        .iter()
        .enumerate()
        .map(|(t, &(u, x))| morphism_index[&(t, c.identity(u), a.values[u].identity(x))])
        .collect();
    let m = morphisms.len();
    let mut compose = vec![None; m * m];
    for (h, &(gamma, k)) in morphisms.iter().enumerate() {
        let mid = records[h].target;
        for g in 0..m {
            if records[g].source != mid {
                continue;
            }
            let (alpha, f) = morphisms[g];
            let w = c.source(gamma);
            let composite = (c.compose(alpha, gamma), a.values[w].compose(a.restrict_mor(gamma, f), k));
            compose[g * m + h] = Some(morphism_index[&(records[g].target, composite.0, composite.1)]);
        }
    }
    let name = format!("{}/A", c.name());
    let total = Arc::new(FiniteCategory::from_parts(name, object_names, records, identity, compose));
    let projection = Functor::new(
        total.clone(),
        a.site.clone(),
        objects.iter().map(|&(u, _)| u).collect(),
        morphisms.iter().map(|&(alpha, _)| alpha).collect(),
    );
    Ok(FibredSite { base: a.clone(), total, projection, objects, morphisms, object_index, morphism_index })
}

/// For the total category of a constant presheaf with value `j`, the
/// comparison `C/J → C × J`, `(U|x) ↦ (U,x)`, `(α|f) ↦ (α,f)`.
pub fn product_comparison(fs: &FibredSite, j: &FiniteCategory) -> Result<Functor> {
    let c = fs.site();
    let prod = Arc::new(FiniteCategory::product(c, j));
    let objects = fs
        .objects
        .iter()
        .map(|&(u, x)| {
            prod.object_index(&format!("({},{})", c.object_name(u), j.object_name(x)))
                .ok_or_else(|| input_err!("total category is not over a constant presheaf"))
        })
        .collect::<Result<Vec<_>>>()?;
    let morphisms = fs
        .morphisms
        .iter()
        .map(|&(al, f)| {
            prod.morphism_index(&format!("({},{})", c.morphism_name(al), j.morphism_name(f)))
                .ok_or_else(|| input_err!("total category is not over a constant presheaf"))
        })
        .collect::<Result<Vec<_>>>()?;
    Functor::checked(fs.total.clone(), prod, objects, morphisms)
}

/// The topology on `C/A` whose covering sieves are those containing some
/// `π⁻¹S` with `S` covering in the base.
pub fn induced_topology(fs: &FibredSite, base: &GrothendieckTopology, caps: &SiteCaps) -> Result<GrothendieckTopology> {
    if **base.site() != **fs.site() {
        return Err(input_err!("topology lives on a different site"));
    }
    let total = &*fs.total;
    if total.num_objects() > caps.max_objects || total.num_morphisms() > caps.max_morphisms {
        return Err(Error::CapExceeded(format!(
            "total category has {} objects and {} morphisms",
            total.num_objects(),
            total.num_morphisms()
        )));
    }
    let mut covers = Vec::with_capacity(total.num_objects());
    for &(u, x) in &fs.objects {
        let mut found = BTreeSet::new();
        for s in base.covers(u) {
            let floor = fs.pi_inverse(s, x)?;
            found.extend(sieves_containing(total, &floor, caps)?);
        }
        covers.push(found.into_iter().collect());
    }
    Ok(GrothendieckTopology::from_covers(fs.total.clone(), covers))
}

/// Exactly the sieves `π⁻¹S`, without closing upward.
pub fn pi_inverse_covers(fs: &FibredSite, base: &GrothendieckTopology) -> Result<GrothendieckTopology> {
    let mut covers = Vec::with_capacity(fs.objects.len());
    for &(u, x) in &fs.objects {
        covers.push(base.covers(u).iter().map(|s| fs.pi_inverse(s, x)).collect::<Result<Vec<_>>>()?);
    }
    Ok(GrothendieckTopology::from_covers(fs.total.clone(), covers))
}

/// If `r` is `π⁻¹S` for some sieve `S` on the base, that `S`.
pub fn as_pi_inverse(fs: &FibredSite, r: &Sieve) -> Option<Sieve> {
    let (u, x) = fs.objects[r.base()];
    let c = fs.site();
    let alphas: BTreeSet<MorIx> = r.members().iter().map(|&m| fs.morphisms[m].0).collect();
    let s = Sieve::from_members(u, alphas);
    (s.is_valid(c) && fs.pi_inverse(&s, x).ok()? == *r).then_some(s)
}

/// `(α, f)*π⁻¹S` and `π⁻¹α*S` for a morphism of the total category.
pub fn pullback_of_pi_inverse(fs: &FibredSite, s: &Sieve, m: MorIx) -> Result<(Sieve, Sieve)> {
    let total = &*fs.total;
    let (_, x) = fs.objects[total.target(m)];
    let (alpha, _) = fs.morphisms[m];
    let (_, y) = fs.objects[total.source(m)];
    let lhs = pullback_sieve(total, &fs.pi_inverse(s, x)?, m)?;
    let rhs = fs.pi_inverse(&pullback_sieve(fs.site(), s, alpha)?, y)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests;
