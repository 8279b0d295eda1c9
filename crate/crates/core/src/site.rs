//! Sieves, Grothendieck topologies on finite categories, the sheaf condition
//! and sheafification by the plus construction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{input_err, invalid, Error, Result};
use crate::fincat::{colim_set, FiniteCategory, MorIx, ObjIx, SetValuedFunctor, Variance};

/// A presheaf of finite sets: a contravariant [`SetValuedFunctor`].
pub type Presheaf = SetValuedFunctor;

/// `hom(−, u)`: sections at `v` are the morphisms `v → u` in the order of
/// [`FiniteCategory::hom`].
pub fn representable(c: &Arc<FiniteCategory>, u: ObjIx) -> Presheaf {
    let homs: Vec<Vec<MorIx>> = c.objects().map(|v| c.hom(v, u).collect()).collect();
    let action = c
        .morphism_ids()
        .map(|g| {
            let (w, v) = (c.source(g), c.target(g));
            homs[v]
                .iter()
                .map(|&b| homs[w].iter().position(|&x| x == c.compose(b, g)).expect("hom set"))
                .collect()
        })
        .collect();
    let labels = homs
        .iter()
        .map(|h| h.iter().map(|&b| c.morphism_name(b).to_string()).collect())
        .collect();
    SetValuedFunctor::new(c.clone(), Variance::Contravariant, homs.iter().map(Vec::len).collect(), action)
        .with_labels(labels)
}

/// A set of morphisms into `base`, closed under precomposition. Members are
/// kept sorted so that structural equality is set equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sieve {
    base: ObjIx,
    members: Vec<MorIx>,
}

impl Sieve {
    /// Wrap a member set without closing it; see [`Sieve::is_valid`].
    pub fn from_members(base: ObjIx, members: impl IntoIterator<Item = MorIx>) -> Sieve {
        let mut members: Vec<MorIx> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Sieve { base, members }
    }

    pub fn maximal(c: &FiniteCategory, base: ObjIx) -> Sieve {
        Sieve { base, members: c.into_object(base).collect() }
    }

    pub fn empty(base: ObjIx) -> Sieve {
        Sieve { base, members: Vec::new() }
    }

    pub fn base(&self) -> ObjIx {
        self.base
    }

    pub fn members(&self) -> &[MorIx] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, f: MorIx) -> bool {
        self.members.binary_search(&f).is_ok()
    }

    pub fn position(&self, f: MorIx) -> Option<usize> {
        self.members.binary_search(&f).ok()
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.members.iter().all(|&f| other.contains(f))
    }

    pub fn is_maximal(&self, c: &FiniteCategory) -> bool {
        self.contains(c.identity(self.base))
    }

    /// Members target the base and the set is closed under precomposition.
    pub fn is_valid(&self, c: &FiniteCategory) -> bool {
        self.members.iter().all(|&f| f < c.num_morphisms() && c.target(f) == self.base)
            && self.members.iter().all(|&f| c.into_object(c.source(f)).all(|g| self.contains(c.compose(f, g))))
    }

    pub fn describe(&self, c: &FiniteCategory) -> String {
        let names: Vec<&str> = self.members.iter().map(|&f| c.morphism_name(f)).collect();
        format!("{}:{{{}}}", c.object_name(self.base), names.join(" "))
    }
}

/// The smallest sieve on `base` containing `gens`.
pub fn sieve_from_generators(c: &FiniteCategory, base: ObjIx, gens: &[MorIx]) -> Result<Sieve> {
    let mut members = BTreeSet::new();
    for &g in gens {
        if g >= c.num_morphisms() || c.target(g) != base {
            return Err(input_err!(
                "generator {} does not target {}",
                c.morphisms().get(g).map(|m| m.name.as_str()).unwrap_or("?"),
                c.object_name(base)
            ));
        }
        for h in c.into_object(c.source(g)) {
            members.insert(c.compose(g, h));
        }
    }
    Ok(Sieve { base, members: members.into_iter().collect() })
}

/// `α* S = { γ | α ∘ γ ∈ S }`.
pub fn pullback_sieve(c: &FiniteCategory, s: &Sieve, alpha: MorIx) -> Result<Sieve> {
    if c.target(alpha) != s.base {
        return Err(input_err!(
            "{} does not target {}",
            c.morphism_name(alpha),
            c.object_name(s.base)
        ));
    }
    let v = c.source(alpha);
    let members = c.into_object(v).filter(|&g| s.contains(c.compose(alpha, g))).collect();
    Ok(Sieve { base: v, members })
}

/// Size limits for exhaustive sieve enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteCaps {
    pub max_objects: usize,
    pub max_morphisms: usize,
    /// Maximum number of sieves enumerated on a single object.
    pub max_sieves: usize,
}

impl Default for SiteCaps {
    fn default() -> Self {
        SiteCaps { max_objects: 5, max_morphisms: 16, max_sieves: 1 << 16 }
    }
}

impl SiteCaps {
    /// Caps for total categories of fibred sites, which are larger than the
    /// bases they come from.
    pub fn relaxed() -> Self {
        SiteCaps { max_objects: 64, max_morphisms: 2048, max_sieves: 1 << 18 }
    }

    fn check(&self, c: &FiniteCategory) -> Result<()> {
        if c.num_objects() > self.max_objects || c.num_morphisms() > self.max_morphisms {
            return Err(Error::CapExceeded(format!(
                "site {} has {} objects and {} morphisms (cap {} / {})",
                c.name(),
                c.num_objects(),
                c.num_morphisms(),
                self.max_objects,
                self.max_morphisms
            )));
        }
        Ok(())
    }
}

/// Every sieve on `base`, as down-sets of the factorisation preorder on
/// morphisms into `base`. Fails with `CapExceeded` past `caps.max_sieves`.
pub fn all_sieves(c: &FiniteCategory, base: ObjIx, caps: &SiteCaps) -> Result<Vec<Sieve>> {
    sieves_containing(c, &Sieve::empty(base), caps)
}

/// Every sieve on the base of `floor` that contains `floor`.
pub fn sieves_containing(c: &FiniteCategory, floor: &Sieve, caps: &SiteCaps) -> Result<Vec<Sieve>> {
    let base = floor.base;
    let into: Vec<MorIx> = c.into_object(base).collect();
    let k = into.len();
    let pos = |f: MorIx| into.iter().position(|&g| g == f).expect("targets base");
    // below[i]: positions of α_i ∘ γ; above[i]: positions j with α_i below α_j
    let mut below = vec![Vec::new(); k];
    let mut above = vec![Vec::new(); k];
    for (i, &a) in into.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for g in c.into_object(c.source(a)) {
            let j = pos(c.compose(a, g));
            if seen.insert(j) {
                below[i].push(j);
                above[j].push(i);
            }
        }
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Free,
        In,
        Out,
    }
    let mut marks = vec![Mark::Free; k];
    for &f in floor.members() {
        for &j in &below[pos(f)] {
            marks[j] = Mark::In;
        }
    }
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        marks: &mut Vec<Mark>,
        below: &[Vec<usize>],
        above: &[Vec<usize>],
        into: &[MorIx],
        base: ObjIx,
        out: &mut Vec<Sieve>,
        cap: usize,
    ) -> Result<()> {
        if i == marks.len() {
            if out.len() >= cap {
                return Err(Error::CapExceeded(format!("more than {cap} sieves on one object")));
            }
            let members = (0..marks.len()).filter(|&j| marks[j] == Mark::In).map(|j| into[j]);
            out.push(Sieve::from_members(base, members));
            return Ok(());
        }
        if marks[i] != Mark::Free {
            return go(i + 1, marks, below, above, into, base, out, cap);
        }
        // include i with its down-closure
        if below[i].iter().all(|&j| marks[j] != Mark::Out) {
            let saved = marks.clone();
            for &j in &below[i] {
                marks[j] = Mark::In;
            }
            go(i + 1, marks, below, above, into, base, out, cap)?;
            *marks = saved;
        }
        // exclude i with its up-closure
        if above[i].iter().all(|&j| marks[j] != Mark::In) {
            let saved = marks.clone();
            for &j in &above[i] {
                marks[j] = Mark::Out;
            }
            go(i + 1, marks, below, above, into, base, out, cap)?;
            *marks = saved;
        }
        Ok(())
    }
    go(0, &mut marks, &below, &above, &into, base, &mut out, caps.max_sieves)?;
    out.sort();
    Ok(out)
}

/// A Grothendieck topology stored extensionally: the covering sieves of each
/// object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrothendieckTopology {
    site: Arc<FiniteCategory>,
    covers: Vec<Vec<Sieve>>,
}

impl GrothendieckTopology {
    /// Take covering sieves as given (sorted, deduplicated); nothing is
    /// checked until [`verify_topology`].
    pub fn from_covers(site: Arc<FiniteCategory>, mut covers: Vec<Vec<Sieve>>) -> Self {
        covers.resize(site.num_objects(), Vec::new());
        for list in &mut covers {
            list.sort();
            list.dedup();
        }
        GrothendieckTopology { site, covers }
    }

    /// Only maximal sieves cover.
    pub fn trivial(site: Arc<FiniteCategory>) -> Self {
        let covers = site.objects().map(|u| vec![Sieve::maximal(&site, u)]).collect();
        GrothendieckTopology { site, covers }
    }

    /// The smallest topology in which the given sieves cover: closure under
    /// the maximal-sieve, base-change and local-character rules, computed as
    /// a fixed point.
    pub fn generated(site: Arc<FiniteCategory>, generators: &[Sieve], caps: &SiteCaps) -> Result<Self> {
        caps.check(&site)?;
        let c = &*site;
        let mut covers: Vec<BTreeSet<Sieve>> =
            c.objects().map(|u| BTreeSet::from([Sieve::maximal(c, u)])).collect();
        for s in generators {
            if !s.is_valid(c) {
                return Err(input_err!("{} is not a sieve", s.describe(c)));
            }
            covers[s.base].insert(s.clone());
        }
        let sieves: Vec<Vec<Sieve>> = c.objects().map(|u| all_sieves(c, u, caps)).collect::<Result<_>>()?;
        loop {
            let mut changed = false;
            for u in c.objects() {
                let current: Vec<Sieve> = covers[u].iter().cloned().collect();
                for s in &current {
                    for alpha in c.into_object(u) {
                        let p = pullback_sieve(c, s, alpha)?;
                        changed |= covers[p.base].insert(p);
                    }
                }
            }
            for u in c.objects() {
                for r in &sieves[u] {
                    if covers[u].contains(r) {
                        continue;
                    }
                    let locally = covers[u].iter().any(|s| {
                        s.members().iter().all(|&alpha| {
                            let p = pullback_sieve(c, r, alpha).expect("targets u");
                            covers[p.base].contains(&p)
                        })
                    });
                    if locally {
                        covers[u].insert(r.clone());
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let covers = covers.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(GrothendieckTopology { site, covers })
    }

    pub fn site(&self) -> &Arc<FiniteCategory> {
        &self.site
    }

    pub fn covers(&self, u: ObjIx) -> &[Sieve] {
        &self.covers[u]
    }

    pub fn all_covers(&self) -> &[Vec<Sieve>] {
        &self.covers
    }

    pub fn is_covering(&self, s: &Sieve) -> bool {
        self.covers[s.base].binary_search(s).is_ok()
    }

    /// Every covering sieve is maximal and every maximal sieve covers.
    pub fn is_trivial(&self) -> bool {
        self.site.objects().all(|u| {
            self.covers[u].len() == 1 && self.covers[u][0] == Sieve::maximal(&self.site, u)
        })
    }
}

/// One failed topology axiom, with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyViolation {
    NotASieve { object: String, sieve: String },
    MaximalMissing { object: String },
    BaseChange { object: String, sieve: String, along: String },
    LocalCharacter { object: String, covering: String, sieve: String },
}

impl TopologyViolation {
    pub fn axiom(&self) -> &'static str {
        match self {
            TopologyViolation::NotASieve { .. } => "sieve",
            TopologyViolation::MaximalMissing { .. } => "maximal-sieve",
            TopologyViolation::BaseChange { .. } => "base-change",
            TopologyViolation::LocalCharacter { .. } => "local-character",
        }
    }
}

impl core::fmt::Display for TopologyViolation {
    fn fmt(&self, out: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TopologyViolation::NotASieve { object, sieve } => {
                write!(out, "{sieve} on {object} is not closed under precomposition")
            }
            TopologyViolation::MaximalMissing { object } => {
                write!(out, "maximal sieve on {object} does not cover")
            }
            TopologyViolation::BaseChange { object, sieve, along } => {
                write!(out, "pullback of covering sieve {sieve} on {object} along {along} does not cover")
            }
            TopologyViolation::LocalCharacter { object, covering, sieve } => write!(
                out,
                "{sieve} on {object} is locally covering over {covering} but does not cover"
            ),
        }
    }
}

/// Check the three axioms exhaustively. Local character enumerates every
/// sieve on every object, so the site must fit within `caps`.
pub fn verify_topology(t: &GrothendieckTopology, caps: &SiteCaps) -> Result<Vec<TopologyViolation>> {
    let c = &*t.site;
    caps.check(c)?;
    let mut report = Vec::new();
    for u in c.objects() {
        for s in t.covers(u) {
            if s.base != u || !s.is_valid(c) {
                report.push(TopologyViolation::NotASieve {
                    object: c.object_name(u).to_string(),
                    sieve: s.describe(c),
                });
            }
        }
    }
    if !report.is_empty() {
        return Ok(report);
    }
    for u in c.objects() {
        if !t.is_covering(&Sieve::maximal(c, u)) {
            report.push(TopologyViolation::MaximalMissing { object: c.object_name(u).to_string() });
        }
    }
    for u in c.objects() {
        for s in t.covers(u) {
            for alpha in c.into_object(u) {
                if !t.is_covering(&pullback_sieve(c, s, alpha)?) {
                    report.push(TopologyViolation::BaseChange {
                        object: c.object_name(u).to_string(),
                        sieve: s.describe(c),
                        along: c.morphism_name(alpha).to_string(),
                    });
                }
            }
        }
    }
    for u in c.objects() {
        for r in all_sieves(c, u, caps)? {
            if t.is_covering(&r) {
                continue;
            }
            // members α with α*R covering
            let good: BTreeSet<MorIx> = c
                .into_object(u)
                .filter(|&alpha| t.is_covering(&pullback_sieve(c, &r, alpha).expect("targets u")))
                .collect();
            if let Some(s) = t.covers(u).iter().find(|s| s.members().iter().all(|f| good.contains(f))) {
                report.push(TopologyViolation::LocalCharacter {
                    object: c.object_name(u).to_string(),
                    covering: s.describe(c),
                    sieve: r.describe(c),
                });
            }
        }
    }
    Ok(report)
}

/// Matching families for `f` on `s`: one element of `F(source α)` per member
/// `α`, compatible under precomposition. Each family is listed in the order
/// of `s.members()`.
pub fn matching_families(f: &Presheaf, s: &Sieve) -> Result<Vec<Vec<usize>>> {
    if f.variance() != Variance::Contravariant {
        return Err(input_err!("presheaves are contravariant"));
    }
    let c = f.base();
    let members = s.members();
    // constraints[k] = (i, γ, j): x_j = F(γ)(x_i), checked once max(i, j) = k is assigned
    let mut constraints: Vec<Vec<(usize, MorIx, usize)>> = vec![Vec::new(); members.len()];
    for (i, &alpha) in members.iter().enumerate() {
        for g in c.into_object(c.source(alpha)) {
            if c.is_identity(g) {
                continue;
            }
            let j = s
                .position(c.compose(alpha, g))
                .ok_or_else(|| invalid!("{} is not a sieve", s.describe(c)))?;
            constraints[i.max(j)].push((i, g, j));
        }
    }
    let mut out = Vec::new();
    let mut family = vec![0usize; members.len()];
    fn go(
        k: usize,
        f: &Presheaf,
        members: &[MorIx],
        constraints: &[Vec<(usize, MorIx, usize)>],
        family: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == members.len() {
            out.push(family.clone());
            return;
        }
        let c = f.base();
        for x in 0..f.size(c.source(members[k])) {
            family[k] = x;
            if constraints[k].iter().all(|&(i, g, j)| family[j] == f.apply(g, family[i])) {
                go(k + 1, f, members, constraints, family, out);
            }
        }
    }
    go(0, f, members, &constraints, &mut family, &mut out);
    Ok(out)
}

pub fn is_matching_family(f: &Presheaf, s: &Sieve, family: &[usize]) -> bool {
    let c = f.base();
    s.members().iter().enumerate().all(|(i, &alpha)| {
        c.into_object(c.source(alpha)).all(|g| {
            let j = s.position(c.compose(alpha, g)).expect("closed");
            family[j] == f.apply(g, family[i])
        })
    })
}

/// The family `(F(α)(x))_α` induced by a section `x` over the base.
pub fn restrict_to_sieve(f: &Presheaf, s: &Sieve, x: usize) -> Vec<usize> {
    s.members().iter().map(|&alpha| f.apply(alpha, x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SheafFailure {
    /// A matching family with no amalgamation.
    Existence { family: Vec<usize> },
    /// Two distinct sections with the same restrictions.
    Uniqueness { sections: (usize, usize), family: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafWitness {
    pub object: ObjIx,
    pub sieve: Sieve,
    pub failure: SheafFailure,
}

/// Sheaf condition on every covering sieve; the first failure found is
/// returned as a witness.
pub fn is_sheaf(f: &Presheaf, t: &GrothendieckTopology) -> Result<Option<SheafWitness>> {
    if **f.base() != **t.site() {
        return Err(input_err!("presheaf and topology live on different sites"));
    }
    let c = f.base();
    for u in c.objects() {
        for s in t.covers(u) {
            let families = matching_families(f, s)?;
            let mut image: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for x in 0..f.size(u) {
                let fam = restrict_to_sieve(f, s, x);
                if let Some(&y) = image.get(&fam) {
                    return Ok(Some(SheafWitness {
                        object: u,
                        sieve: s.clone(),
                        failure: SheafFailure::Uniqueness { sections: (y, x), family: fam },
                    }));
                }
                image.insert(fam, x);
            }
            if let Some(fam) = families.into_iter().find(|fam| !image.contains_key(fam)) {
                return Ok(Some(SheafWitness {
                    object: u,
                    sieve: s.clone(),
                    failure: SheafFailure::Existence { family: fam },
                }));
            }
        }
    }
    Ok(None)
}

/// A presheaf with the canonical map into it from the input.
#[derive(Clone, Debug)]
pub struct Sheafification {
    pub sheaf: Presheaf,
    /// `unit[u][x]`: image of section `x` of the input at `u`.
    pub unit: Vec<Vec<usize>>,
}

/// One plus construction: `F⁺(U)` is the colimit of matching families over
/// the covering sieves of `U`, ordered by reverse inclusion.
pub fn plus_construction(f: &Presheaf, t: &GrothendieckTopology) -> Result<Sheafification> {
    if **f.base() != **t.site() {
        return Err(input_err!("presheaf and topology live on different sites"));
    }
    let c = f.base().clone();
    struct Local {
        families: Vec<Vec<Vec<usize>>>,
        index: Vec<BTreeMap<Vec<usize>, usize>>,
        cocone: Vec<Vec<usize>>,
        representatives: Vec<(usize, usize)>,
        size: usize,
    }
    let mut locals = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let covers = t.covers(u);
        let families: Vec<Vec<Vec<usize>>> =
            covers.iter().map(|s| matching_families(f, s)).collect::<Result<_>>()?;
        let index: Vec<BTreeMap<Vec<usize>, usize>> = families
            .iter()
            .map(|fs| fs.iter().enumerate().map(|(i, fam)| (fam.clone(), i)).collect())
            .collect();
        let names: Vec<String> = (0..covers.len()).map(|i| format!("S{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut rel = Vec::new();
        for (i, si) in covers.iter().enumerate() {
            for (j, sj) in covers.iter().enumerate() {
                if i != j && sj.is_subset(si) {
                    rel.push((refs[i], refs[j]));
                }
            }
        }
        let poset = Arc::new(FiniteCategory::poset("covers", &refs, &rel)?);
        let mut action = vec![Vec::new(); poset.num_morphisms()];
        for m in poset.morphism_ids() {
            let (i, j) = (poset.source(m), poset.target(m));
            action[m] = families[i]
                .iter()
                .map(|fam| {
                    let restricted: Vec<usize> =
                        covers[j].members().iter().map(|&a| fam[covers[i].position(a).expect("subset")]).collect();
                    index[j][&restricted]
                })
                .collect();
        }
        let diagram = SetValuedFunctor::new(
            poset,
            Variance::Covariant,
            families.iter().map(|fs| fs.len()).collect(),
            action,
        );
        let colim = colim_set(&diagram)?;
        locals.push(Local {
            families,
            index,
            cocone: colim.cocone,
            representatives: colim.representatives,
            size: colim.size,
        });
    }
    let mut action = vec![Vec::new(); c.num_morphisms()];
    for alpha in c.morphism_ids() {
        let (v, u) = (c.source(alpha), c.target(alpha));
        let local = &locals[u];
        let row = local
            .representatives
            .iter()
            .map(|&(i, k)| {
                let s = &t.covers(u)[i];
                let fam = &local.families[i][k];
                let pulled = pullback_sieve(&c, s, alpha)?;
                let j = t.covers(v).binary_search(&pulled).map_err(|_| {
                    invalid!("pullback {} is not covering; verify the topology first", pulled.describe(&c))
                })?;
                let new_fam: Vec<usize> = pulled
                    .members()
                    .iter()
                    .map(|&g| fam[s.position(c.compose(alpha, g)).expect("pulled back")])
                    .collect();
                let k2 = locals[v].index[j][&new_fam];
                Ok(locals[v].cocone[j][k2])
            })
            .collect::<Result<Vec<usize>>>()?;
        action[alpha] = row;
    }
    let mut unit = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let max = Sieve::maximal(&c, u);
        let i = t
            .covers(u)
            .binary_search(&max)
            .map_err(|_| invalid!("maximal sieve on {} does not cover", c.object_name(u)))?;
        unit.push(
            (0..f.size(u))
                .map(|x| locals[u].cocone[i][locals[u].index[i][&restrict_to_sieve(f, &max, x)]])
                .collect(),
        );
    }
    let labels = c
        .objects()
        .map(|u| {
            let local = &locals[u];
            local
                .representatives
                .iter()
                .map(|&(i, k)| {
                    let parts: Vec<String> = local.families[i][k]
                        .iter()
                        .zip(t.covers(u)[i].members())
                        .map(|(&x, &a)| f.label(c.source(a), x))
                        .collect();
                    format!("[S{i}:{}]", parts.join(","))
                })
                .collect()
        })
        .collect();
    let sheaf = SetValuedFunctor::new(
        c.clone(),
        Variance::Contravariant,
        locals.iter().map(|l| l.size).collect(),
        action,
    )
    .with_labels(labels);
    Ok(Sheafification { sheaf, unit })
}

/// Associated sheaf: the plus construction applied twice.
pub fn sheafify(f: &Presheaf, t: &GrothendieckTopology) -> Result<Sheafification> {
    let once = plus_construction(f, t)?;
    let twice = plus_construction(&once.sheaf, t)?;
    let unit = once
        .unit
        .iter()
        .enumerate()
        .map(|(u, row)| row.iter().map(|&x| twice.unit[u][x]).collect())
        .collect();
    Ok(Sheafification { sheaf: twice.sheaf, unit })
}

#[cfg(test)]
mod tests {
    use super::*;

    // V --a--> U
    fn arrow_site() -> Arc<FiniteCategory> {
        Arc::new(FiniteCategory::poset("C", &["V", "U"], &[("V", "U")]).unwrap())
    }

    fn chain3() -> Arc<FiniteCategory> {
        Arc::new(FiniteCategory::poset("C", &["W", "V", "U"], &[("W", "V"), ("V", "U")]).unwrap())
    }

    fn presheaf(c: &Arc<FiniteCategory>, sizes: Vec<usize>, acts: &[(&str, Vec<usize>)]) -> Presheaf {
        let mut action: Vec<Vec<usize>> =
            c.morphism_ids().map(|f| (0..sizes[c.target(f)]).collect()).collect();
        for (name, act) in acts {
            action[c.morphism_index(name).unwrap()] = act.clone();
        }
        let p = SetValuedFunctor::new(c.clone(), Variance::Contravariant, sizes, action);
        p.validate().unwrap();
        p
    }

    fn cover_a(c: &Arc<FiniteCategory>) -> GrothendieckTopology {
        let a = c.morphism_index("V->U").unwrap();
        let u = c.object_index("U").unwrap();
        let s = sieve_from_generators(c, u, &[a]).unwrap();
        GrothendieckTopology::generated(c.clone(), &[s], &SiteCaps::default()).unwrap()
    }

    #[test]
    fn generator_closure() {
        let c = chain3();
        let u = c.object_index("U").unwrap();
        assert!(sieve_from_generators(&c, u, &[]).unwrap().is_empty());
        let max = sieve_from_generators(&c, u, &[c.identity(u)]).unwrap();
        assert_eq!(max, Sieve::maximal(&c, u));
        let vu = c.morphism_index("V->U").unwrap();
        let wu = c.morphism_index("W->U").unwrap();
        let s = sieve_from_generators(&c, u, &[vu]).unwrap();
        assert_eq!(s, Sieve::from_members(u, [vu, wu]));
        assert_eq!(sieve_from_generators(&c, u, s.members()).unwrap(), s);
        let wv = c.morphism_index("W->V").unwrap();
        assert!(sieve_from_generators(&c, u, &[wv]).is_err());
    }

    #[test]
    fn pullback_examples() {
        let c = chain3();
        let u = c.object_index("U").unwrap();
        let v = c.object_index("V").unwrap();
        let vu = c.morphism_index("V->U").unwrap();
        let s = sieve_from_generators(&c, u, &[vu]).unwrap();
        assert_eq!(pullback_sieve(&c, &s, c.identity(u)).unwrap(), s);
        assert_eq!(pullback_sieve(&c, &Sieve::maximal(&c, u), vu).unwrap(), Sieve::maximal(&c, v));
        assert_eq!(pullback_sieve(&c, &s, vu).unwrap(), Sieve::maximal(&c, v));
        assert!(pullback_sieve(&c, &s, c.identity(v)).is_err());
    }

    #[test]
    fn sieve_enumeration_on_chain() {
        let c = chain3();
        let u = c.object_index("U").unwrap();
        // down-sets of the chain W < V < U: 4
        assert_eq!(all_sieves(&c, u, &SiteCaps::default()).unwrap().len(), 4);
        let z2 = FiniteCategory::cyclic_group(2);
        assert_eq!(all_sieves(&z2, 0, &SiteCaps::default()).unwrap().len(), 2);
    }

    #[test]
    fn trivial_topology_verifies() {
        for c in [arrow_site(), chain3(), Arc::new(FiniteCategory::cyclic_group(3))] {
            let t = GrothendieckTopology::trivial(c);
            assert!(verify_topology(&t, &SiteCaps::default()).unwrap().is_empty());
            assert!(t.is_trivial());
        }
    }

    #[test]
    fn missing_maximal_sieve_is_reported() {
        let c = arrow_site();
        let a = c.morphism_index("V->U").unwrap();
        let (v, u) = (c.object_index("V").unwrap(), c.object_index("U").unwrap());
        let t = GrothendieckTopology::from_covers(
            c.clone(),
            vec![vec![Sieve::maximal(&c, v)], vec![Sieve::from_members(u, [a])]],
        );
        let report = verify_topology(&t, &SiteCaps::default()).unwrap();
        let axioms: Vec<&str> = report.iter().map(|v| v.axiom()).collect();
        assert!(axioms.contains(&"maximal-sieve"));
        assert!(report.iter().any(|v| matches!(v,
            TopologyViolation::LocalCharacter { sieve, .. } if sieve == "U:{id_U V->U}")));
    }

    #[test]
    fn generated_topology_verifies() {
        let t = cover_a(&arrow_site());
        assert!(verify_topology(&t, &SiteCaps::default()).unwrap().is_empty());
        assert_eq!(t.covers(1).len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let big = Arc::new(FiniteCategory::discrete("D", &["a", "b", "c", "d", "e", "f"]));
        let t = GrothendieckTopology::trivial(big);
        assert!(matches!(verify_topology(&t, &SiteCaps::default()), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn sheaf_condition_examples() {
        let c = arrow_site();
        let trivial = GrothendieckTopology::trivial(c.clone());
        let f = presheaf(&c, vec![2, 1], &[("V->U", vec![0])]);
        assert_eq!(is_sheaf(&f, &trivial).unwrap(), None);
        let t = cover_a(&c);
        let witness = is_sheaf(&f, &t).unwrap().expect("not a sheaf");
        assert!(matches!(witness.failure, SheafFailure::Existence { .. }));
        assert_eq!(matching_families(&f, &witness.sieve).unwrap().len(), 2);
        let g = presheaf(&c, vec![2, 2], &[("V->U", vec![0, 1])]);
        assert_eq!(is_sheaf(&g, &t).unwrap(), None);
    }

    #[test]
    fn uniqueness_failure() {
        let c = arrow_site();
        let t = cover_a(&c);
        let f = presheaf(&c, vec![1, 2], &[("V->U", vec![0, 0])]);
        let w = is_sheaf(&f, &t).unwrap().unwrap();
        assert!(matches!(w.failure, SheafFailure::Uniqueness { .. }));
    }

    #[test]
    fn sheafification_examples() {
        let c = arrow_site();
        let t = cover_a(&c);
        let f = presheaf(&c, vec![2, 1], &[("V->U", vec![0])]);
        let sh = sheafify(&f, &t).unwrap();
        sh.sheaf.validate().unwrap();
        assert_eq!(sh.sheaf.sizes(), &[2, 2]);
        assert_eq!(is_sheaf(&sh.sheaf, &t).unwrap(), None);

        // sheaves are fixed up to bijection
        let g = presheaf(&c, vec![2, 2], &[("V->U", vec![1, 0])]);
        let sh = sheafify(&g, &t).unwrap();
        assert!(g.is_iso_via(&sh.sheaf, &sh.unit));

        let empty = presheaf(&c, vec![0, 0], &[]);
        let sh = sheafify(&empty, &GrothendieckTopology::trivial(c.clone())).unwrap();
        assert_eq!(sh.sheaf.sizes(), &[0, 0]);
    }

    #[test]
    fn pullback_composes() {
        let c = chain3();
        for u in c.objects() {
            for s in all_sieves(&c, u, &SiteCaps::default()).unwrap() {
                for alpha in c.into_object(u) {
                    let once = pullback_sieve(&c, &s, alpha).unwrap();
                    for g in c.into_object(c.source(alpha)) {
                        assert_eq!(
                            pullback_sieve(&c, &once, g).unwrap(),
                            pullback_sieve(&c, &s, c.compose(alpha, g)).unwrap()
                        );
                    }
                }
            }
        }
    }
}
