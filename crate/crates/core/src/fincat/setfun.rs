use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::comma::{comma_category, CommaCategory};
use super::{FiniteCategory, Functor, MorIx, ObjIx};
use crate::error::{input_err, invalid, Result};
use crate::util::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// A functor into finite sets. The value at an object is `0..size`; the
/// action of a morphism is a function between those ranges, in the direction
/// the variance dictates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetValuedFunctor {
    base: Arc<FiniteCategory>,
    variance: Variance,
    sizes: Vec<usize>,
    action: Vec<Vec<usize>>,
    labels: Option<Vec<Vec<String>>>,
}

impl SetValuedFunctor {
    pub fn new(
        base: Arc<FiniteCategory>,
        variance: Variance,
        sizes: Vec<usize>,
        action: Vec<Vec<usize>>,
    ) -> Self {
        SetValuedFunctor { base, variance, sizes, action, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Self {
        self.labels = Some(labels);
        self
    }

    /// The constant functor with value `0..size`.
    pub fn constant(base: Arc<FiniteCategory>, variance: Variance, size: usize) -> Self {
        let sizes = vec![size; base.num_objects()];
        let action = vec![(0..size).collect(); base.num_morphisms()];
        SetValuedFunctor { base, variance, sizes, action, labels: None }
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn size(&self, o: ObjIx) -> usize {
        self.sizes[o]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn action(&self, f: MorIx) -> &[usize] {
        &self.action[f]
    }

    pub fn actions(&self) -> &[Vec<usize>] {
        &self.action
    }

    pub fn labels(&self) -> Option<&Vec<Vec<String>>> {
        self.labels.as_ref()
    }

    pub fn label(&self, o: ObjIx, e: usize) -> String {
        match &self.labels {
            Some(l) => l[o][e].clone(),
            None => format!("{e}"),
        }
    }

    /// Apply the action of `f` to element `e`.
    pub fn apply(&self, f: MorIx, e: usize) -> usize {
        self.action[f][e]
    }

    /// Object whose value the action of `f` reads from.
    pub fn action_source(&self, f: MorIx) -> ObjIx {
        match self.variance {
            Variance::Covariant => self.base.source(f),
            Variance::Contravariant => self.base.target(f),
        }
    }

    pub fn action_target(&self, f: MorIx) -> ObjIx {
        match self.variance {
            Variance::Covariant => self.base.target(f),
            Variance::Contravariant => self.base.source(f),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = &*self.base;
        if self.sizes.len() != c.num_objects() || self.action.len() != c.num_morphisms() {
            return Err(invalid!("set-valued functor on {} has the wrong shape", c.name()));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.sizes.len() || labels.iter().zip(&self.sizes).any(|(l, &n)| l.len() != n) {
                return Err(invalid!("labels do not match value sizes"));
            }
        }
        for f in c.morphism_ids() {
            let (from, to) = (self.action_source(f), self.action_target(f));
            let act = &self.action[f];
            if act.len() != self.sizes[from] || act.iter().any(|&e| e >= self.sizes[to]) {
                return Err(invalid!("action of {} is not a function between the values", c.morphism_name(f)));
            }
        }
        for o in c.objects() {
            let id = &self.action[c.identity(o)];
            if id.iter().enumerate().any(|(i, &e)| i != e) {
                return Err(invalid!("identity of {} acts non-trivially", c.object_name(o)));
            }
        }
        for f in c.morphism_ids() {
            for g in c.out_of(c.target(f)) {
                let gf = c.compose(g, f);
                let ok = match self.variance {
                    Variance::Covariant => (0..self.sizes[c.source(f)])
                        .all(|e| self.action[gf][e] == self.action[g][self.action[f][e]]),
                    Variance::Contravariant => (0..self.sizes[c.target(g)])
                        .all(|e| self.action[gf][e] == self.action[f][self.action[g][e]]),
                };
                if !ok {
                    return Err(invalid!(
                        "action does not respect composite {}.{}",
                        c.morphism_name(g),
                        c.morphism_name(f)
                    ));
                }
            }
        }
        Ok(())
    }

    /// Reinterpret on the opposite base with the opposite variance. The data
    /// is unchanged because opposites keep indices.
    pub fn flip(&self) -> SetValuedFunctor {
        SetValuedFunctor {
            base: Arc::new(self.base.opposite()),
            variance: match self.variance {
                Variance::Covariant => Variance::Contravariant,
                Variance::Contravariant => Variance::Covariant,
            },
            sizes: self.sizes.clone(),
            action: self.action.clone(),
            labels: self.labels.clone(),
        }
    }

    /// The covariant form: `self` when already covariant, otherwise
    /// [`flip`](Self::flip).
    pub fn as_covariant(&self) -> SetValuedFunctor {
        match self.variance {
            Variance::Covariant => self.clone(),
            Variance::Contravariant => self.flip(),
        }
    }

    /// Precompose with a functor `along: D -> base` (same variance).
    pub fn restrict(&self, along: &Functor) -> Result<SetValuedFunctor> {
        if **along.cod() != *self.base {
            return Err(input_err!("functor does not land in {}", self.base.name()));
        }
        let d = along.dom();
        Ok(SetValuedFunctor {
            base: d.clone(),
            variance: self.variance,
            sizes: d.objects().map(|o| self.sizes[along.obj(o)]).collect(),
            action: d.morphism_ids().map(|f| self.action[along.mor(f)].clone()).collect(),
            labels: self.labels.as_ref().map(|l| d.objects().map(|o| l[along.obj(o)].clone()).collect()),
        })
    }

    /// Two functors agree up to an elementwise bijection given per object,
    /// and the bijections commute with all actions.
    pub fn is_iso_via(&self, other: &SetValuedFunctor, maps: &[Vec<usize>]) -> bool {
        if *self.base != *other.base || self.variance != other.variance || maps.len() != self.sizes.len() {
            return false;
        }
        for o in self.base.objects() {
            let m = &maps[o];
            if m.len() != self.sizes[o] || self.sizes[o] != other.sizes[o] {
                return false;
            }
            let mut seen = vec![false; other.sizes[o]];
            for &e in m {
                if e >= seen.len() || seen[e] {
                    return false;
                }
                seen[e] = true;
            }
        }
        self.base.morphism_ids().all(|f| {
            let (from, to) = (self.action_source(f), self.action_target(f));
            (0..self.sizes[from]).all(|e| maps[to][self.action[f][e]] == other.action[f][maps[from][e]])
        })
    }
}

/// A partition of the objects of a category into connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Each class lists its objects in index order; classes are ordered by
    /// their representative (least object identifier).
    pub classes: Vec<Vec<ObjIx>>,
    pub class_of: Vec<usize>,
}

impl Partition {
    /// Representative of each class: the lexicographically least identifier.
    pub fn representatives<'a>(&self, c: &'a FiniteCategory) -> Vec<&'a str> {
        self.classes
            .iter()
            .map(|class| class.iter().map(|&o| c.object_name(o)).min().expect("non-empty class"))
            .collect()
    }

    /// The same partition as a set of sets, for comparisons that ignore order.
    pub fn normalized(&self) -> Vec<Vec<ObjIx>> {
        let mut classes = self.classes.clone();
        classes.sort();
        classes
    }
}

/// Zig-zag connected components, by union-find over the undirected morphism
/// graph.
pub fn pi0(c: &FiniteCategory) -> Partition {
    let mut uf = UnionFind::new(c.num_objects());
    for f in c.morphism_ids() {
        uf.union(c.source(f), c.target(f));
    }
    let (n, label) = uf.labels();
    let mut classes = vec![Vec::new(); n];
    for o in c.objects() {
        classes[label[o]].push(o);
    }
    let rep = |class: &Vec<ObjIx>| class.iter().map(|&o| c.object_name(o)).min().map(String::from);
    classes.sort_by_key(|class| rep(class));
    let mut class_of = vec![0; c.num_objects()];
    for (i, class) in classes.iter().enumerate() {
        for &o in class {
            class_of[o] = i;
        }
    }
    Partition { classes, class_of }
}

/// Colimit of a covariant set-valued functor, with its cocone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colimit {
    pub size: usize,
    /// `cocone[o][e]` is the class of element `e` of the value at `o`.
    pub cocone: Vec<Vec<usize>>,
    /// The first `(object, element)` of each class in index order.
    pub representatives: Vec<(ObjIx, usize)>,
}

impl Colimit {
    /// The unique map out of the colimit through which a cocone `into[o]`
    /// (into `0..target`) factors, or `None` if `into` is not a cocone.
    pub fn factor(&self, f: &SetValuedFunctor, into: &[Vec<usize>]) -> Option<Vec<usize>> {
        let c = f.base();
        for g in c.morphism_ids() {
            let (a, b) = (c.source(g), c.target(g));
            if (0..f.size(a)).any(|e| into[a][e] != into[b][f.apply(g, e)]) {
                return None;
            }
        }
        let map: Vec<usize> = self.representatives.iter().map(|&(o, e)| into[o][e]).collect();
        for o in c.objects() {
            for e in 0..f.size(o) {
                if map[self.cocone[o][e]] != into[o][e] {
                    return None;
                }
            }
        }
        Some(map)
    }
}

/// Colimit of a covariant functor: the disjoint union of the values modulo
/// `e ~ f(e)`.
pub fn colim_set(f: &SetValuedFunctor) -> Result<Colimit> {
    if f.variance() != Variance::Covariant {
        return Err(input_err!("colim_set expects a covariant functor"));
    }
    let c = f.base();
    let mut offset = Vec::with_capacity(c.num_objects());
    let mut total = 0;
    for o in c.objects() {
        offset.push(total);
        total += f.size(o);
    }
    let mut uf = UnionFind::new(total);
    for g in c.morphism_ids() {
        let (a, b) = (c.source(g), c.target(g));
        for e in 0..f.size(a) {
            uf.union(offset[a] + e, offset[b] + f.apply(g, e));
        }
    }
    let (size, label) = uf.labels();
    let mut representatives = vec![(usize::MAX, 0); size];
    let mut cocone = Vec::with_capacity(c.num_objects());
    for o in c.objects() {
        let row: Vec<usize> = (0..f.size(o)).map(|e| label[offset[o] + e]).collect();
        for (e, &k) in row.iter().enumerate() {
            if representatives[k].0 == usize::MAX {
                representatives[k] = (o, e);
            }
        }
        cocone.push(row);
    }
    Ok(Colimit { size, cocone, representatives })
}

/// Pointwise left Kan extension of a covariant set-valued functor, with the
/// comma categories and colimits it was computed from.
#[derive(Clone, Debug)]
pub struct KanExtension {
    pub functor: SetValuedFunctor,
    pub commas: Vec<CommaCategory>,
    pub colimits: Vec<Colimit>,
}

impl KanExtension {
    /// Class at `b` of the comma object `(a, h: along(a) -> b)` and element `e`.
    pub fn class_of(&self, b: ObjIx, a: ObjIx, h: MorIx, e: usize) -> usize {
        let o = self.commas[b].object_of(a, h).expect("comma object exists");
        self.colimits[b].cocone[o][e]
    }
}

/// `Lan_along f`: the value at `b` is the colimit of `f` over `along / b`;
/// a morphism `n: b -> b'` acts by `(a, h, e) ↦ (a, n ∘ h, e)`.
pub fn left_kan_set(along: &Functor, f: &SetValuedFunctor) -> Result<KanExtension> {
    if f.variance() != Variance::Covariant {
        return Err(input_err!("left_kan_set expects a covariant functor"));
    }
    if **along.dom() != **f.base() {
        return Err(input_err!("functor is not defined on the domain of the Kan extension"));
    }
    let b_cat = along.cod().clone();
    let mut commas = Vec::with_capacity(b_cat.num_objects());
    let mut colimits = Vec::with_capacity(b_cat.num_objects());
    for b in b_cat.objects() {
        let comma = comma_category(along, b)?;
        let pulled = f.restrict(&comma.projection)?;
        colimits.push(colim_set(&pulled)?);
        commas.push(comma);
    }
    let sizes: Vec<usize> = colimits.iter().map(|c| c.size).collect();
    let mut action = Vec::with_capacity(b_cat.num_morphisms());
    for n in b_cat.morphism_ids() {
        let (b, b2) = (b_cat.source(n), b_cat.target(n));
        let row = colimits[b]
            .representatives
            .iter()
            .map(|&(o, e)| {
                let (a, h) = commas[b].objects[o];
                let o2 = commas[b2].object_of(a, b_cat.compose(n, h)).expect("comma object exists");
                colimits[b2].cocone[o2][e]
            })
            .collect();
        action.push(row);
    }
    let functor = SetValuedFunctor::new(b_cat, Variance::Covariant, sizes, action);
    Ok(KanExtension { functor, commas, colimits })
}
