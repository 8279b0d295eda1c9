use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{join, FiniteCategory, MorIx, ObjIx};
use crate::error::{input_err, invalid, Result};

/// A functor between finite categories, stored as object and morphism maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    dom: Arc<FiniteCategory>,
    cod: Arc<FiniteCategory>,
    on_objects: Vec<ObjIx>,
    on_morphisms: Vec<MorIx>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorViolation {
    Shape,
    OutOfRange,
    Endpoints { morphism: String },
    Identity { object: String },
    Composition { g: String, f: String },
}

impl core::fmt::Display for FunctorViolation {
    fn fmt(&self, out: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FunctorViolation::Shape => write!(out, "object or morphism map has the wrong length"),
            FunctorViolation::OutOfRange => write!(out, "map points outside the codomain"),
            FunctorViolation::Endpoints { morphism } => {
                write!(out, "image of {morphism} has the wrong source or target")
            }
            FunctorViolation::Identity { object } => {
                write!(out, "identity of {object} not sent to an identity")
            }
            FunctorViolation::Composition { g, f } => write!(out, "composite {g}.{f} not preserved"),
        }
    }
}

impl Functor {
    pub fn new(
        dom: Arc<FiniteCategory>,
        cod: Arc<FiniteCategory>,
        on_objects: Vec<ObjIx>,
        on_morphisms: Vec<MorIx>,
    ) -> Self {
        Functor { dom, cod, on_objects, on_morphisms }
    }

    /// Build and validate in one step.
    pub fn checked(
        dom: Arc<FiniteCategory>,
        cod: Arc<FiniteCategory>,
        on_objects: Vec<ObjIx>,
        on_morphisms: Vec<MorIx>,
    ) -> Result<Self> {
        let f = Functor::new(dom, cod, on_objects, on_morphisms);
        let report = f.validate();
        if report.is_empty() {
            Ok(f)
        } else {
            Err(invalid!("functor {} -> {}: {}", f.dom.name(), f.cod.name(), join(&report)))
        }
    }

    pub fn identity(c: Arc<FiniteCategory>) -> Self {
        let on_objects = c.objects().collect();
        let on_morphisms = c.morphism_ids().collect();
        Functor { dom: c.clone(), cod: c, on_objects, on_morphisms }
    }

    /// The unique functor to a one-object, one-morphism category.
    pub fn to_terminal(dom: Arc<FiniteCategory>, terminal: Arc<FiniteCategory>) -> Result<Self> {
        if terminal.num_morphisms() != 1 {
            return Err(input_err!("{} is not terminal", terminal.name()));
        }
        let on_objects = vec![0; dom.num_objects()];
        let on_morphisms = vec![0; dom.num_morphisms()];
        Ok(Functor { dom, cod: terminal, on_objects, on_morphisms })
    }

    pub fn dom(&self) -> &Arc<FiniteCategory> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FiniteCategory> {
        &self.cod
    }

    pub fn obj(&self, o: ObjIx) -> ObjIx {
        self.on_objects[o]
    }

    pub fn mor(&self, f: MorIx) -> MorIx {
        self.on_morphisms[f]
    }

    pub fn object_map(&self) -> &[ObjIx] {
        &self.on_objects
    }

    pub fn morphism_map(&self) -> &[MorIx] {
        &self.on_morphisms
    }

    pub fn validate(&self) -> Vec<FunctorViolation> {
        let (d, c) = (&*self.dom, &*self.cod);
        if self.on_objects.len() != d.num_objects() || self.on_morphisms.len() != d.num_morphisms() {
            return vec![FunctorViolation::Shape];
        }
        if self.on_objects.iter().any(|&o| o >= c.num_objects())
            || self.on_morphisms.iter().any(|&f| f >= c.num_morphisms())
        {
            return vec![FunctorViolation::OutOfRange];
        }
        let mut report = Vec::new();
        for f in d.morphism_ids() {
            let image = self.mor(f);
            if c.source(image) != self.obj(d.source(f)) || c.target(image) != self.obj(d.target(f)) {
                report.push(FunctorViolation::Endpoints { morphism: d.morphism_name(f).to_string() });
            }
        }
        for o in d.objects() {
            if self.mor(d.identity(o)) != c.identity(self.obj(o)) {
                report.push(FunctorViolation::Identity { object: d.object_name(o).to_string() });
            }
        }
        if !report.is_empty() {
            return report;
        }
        for f in d.morphism_ids() {
            for g in d.out_of(d.target(f)) {
                let lhs = d.try_compose(g, f).map(|h| self.mor(h));
                if lhs.is_none() || lhs != c.try_compose(self.mor(g), self.mor(f)) {
                    report.push(FunctorViolation::Composition {
                        g: d.morphism_name(g).to_string(),
                        f: d.morphism_name(f).to_string(),
                    });
                }
            }
        }
        report
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Functor) -> Result<Functor> {
        if *self.cod != *other.dom {
            return Err(input_err!(
                "cannot compose {} -> {} with {} -> {}",
                self.dom.name(),
                self.cod.name(),
                other.dom.name(),
                other.cod.name()
            ));
        }
        Ok(Functor {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            on_objects: self.on_objects.iter().map(|&o| other.obj(o)).collect(),
            on_morphisms: self.on_morphisms.iter().map(|&f| other.mor(f)).collect(),
        })
    }

    /// The same functor between opposite categories.
    pub fn opposite(&self) -> Functor {
        Functor {
            dom: Arc::new(self.dom.opposite()),
            cod: Arc::new(self.cod.opposite()),
            on_objects: self.on_objects.clone(),
            on_morphisms: self.on_morphisms.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self.dom == *self.cod
            && self.on_objects.iter().enumerate().all(|(i, &o)| i == o)
            && self.on_morphisms.iter().enumerate().all(|(i, &f)| i == f)
    }

    /// Every hom-set map `hom(a, a') -> hom(Fa, Fa')` is a bijection.
    pub fn is_fully_faithful(&self) -> bool {
        let (d, c) = (&*self.dom, &*self.cod);
        for a in d.objects() {
            for b in d.objects() {
                let mut images: Vec<MorIx> = d.hom(a, b).map(|f| self.mor(f)).collect();
                let before = images.len();
                images.sort_unstable();
                images.dedup();
                if images.len() != before || before != c.hom(self.obj(a), self.obj(b)).count() {
                    return false;
                }
            }
        }
        true
    }

    /// Every object of the codomain is isomorphic to an image object.
    pub fn is_essentially_surjective(&self) -> bool {
        let c = &*self.cod;
        c.objects().all(|b| {
            self.on_objects.iter().any(|&fa| {
                fa == b || c.hom(fa, b).any(|u| c.inverse_of(u).is_some())
            })
        })
    }

    /// Brute-force equivalence test: fully faithful and essentially surjective.
    pub fn is_equivalence(&self) -> bool {
        self.is_fully_faithful() && self.is_essentially_surjective()
    }

    pub fn is_isomorphism(&self) -> bool {
        let mut objs = self.on_objects.clone();
        objs.sort_unstable();
        objs.dedup();
        let mut mors = self.on_morphisms.clone();
        mors.sort_unstable();
        mors.dedup();
        objs.len() == self.cod.num_objects()
            && objs.len() == self.dom.num_objects()
            && mors.len() == self.cod.num_morphisms()
            && mors.len() == self.dom.num_morphisms()
    }
}

/// A category together with a chosen inverse for every morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groupoid {
    category: Arc<FiniteCategory>,
    inverse: Vec<MorIx>,
}

impl Groupoid {
    /// Compute inverses by search; fails if some morphism has none.
    pub fn new(category: Arc<FiniteCategory>) -> Result<Self> {
        let mut inverse = Vec::with_capacity(category.num_morphisms());
        for f in category.morphism_ids() {
            match category.inverse_of(f) {
                Some(g) => inverse.push(g),
                None => {
                    return Err(invalid!(
                        "{} is not a groupoid: {} has no inverse",
                        category.name(),
                        category.morphism_name(f)
                    ))
                }
            }
        }
        Ok(Groupoid { category, inverse })
    }

    /// Use the given inverse table, checking both inverse laws.
    pub fn with_inverses(category: Arc<FiniteCategory>, inverse: Vec<MorIx>) -> Result<Self> {
        if inverse.len() != category.num_morphisms() {
            return Err(invalid!("inverse table of {} has the wrong length", category.name()));
        }
        for f in category.morphism_ids() {
            let g = inverse[f];
            let (a, b) = (category.source(f), category.target(f));
            if g >= category.num_morphisms()
                || category.try_compose(g, f) != Some(category.identity(a))
                || category.try_compose(f, g) != Some(category.identity(b))
            {
                return Err(invalid!(
                    "inverse law fails for {} in {}",
                    category.morphism_name(f),
                    category.name()
                ));
            }
        }
        Ok(Groupoid { category, inverse })
    }

    pub fn category(&self) -> &Arc<FiniteCategory> {
        &self.category
    }

    pub fn inverse(&self, f: MorIx) -> MorIx {
        self.inverse[f]
    }

    pub fn opposite(&self) -> Groupoid {
        Groupoid { category: Arc::new(self.category.opposite()), inverse: self.inverse.clone() }
    }

    /// Automorphisms of `x`, identity first.
    pub fn automorphisms(&self, x: ObjIx) -> Vec<MorIx> {
        let c = &self.category;
        let id = c.identity(x);
        let mut out = vec![id];
        out.extend(c.hom(x, x).filter(|&f| f != id));
        out
    }
}

impl core::ops::Deref for Groupoid {
    type Target = FiniteCategory;
    fn deref(&self) -> &FiniteCategory {
        &self.category
    }
}

/// Brute-force isomorphism test between the automorphism groups of `x` in
/// `a` and `y` in `b`. Intended for small groups (order at most 8).
pub fn groups_isomorphic(a: &FiniteCategory, x: ObjIx, b: &FiniteCategory, y: ObjIx) -> bool {
    let ga: Vec<MorIx> = a.hom(x, x).collect();
    let gb: Vec<MorIx> = b.hom(y, y).collect();
    if ga.len() != gb.len() {
        return false;
    }
    let order = |c: &FiniteCategory, o: ObjIx, g: MorIx| {
        let mut p = g;
        let mut k = 1;
        while p != c.identity(o) {
            p = c.compose(g, p);
            k += 1;
        }
        k
    };
    let oa: Vec<usize> = ga.iter().map(|&g| order(a, x, g)).collect();
    let ob: Vec<usize> = gb.iter().map(|&g| order(b, y, g)).collect();
    let mut sa = oa.clone();
    let mut sb = ob.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    let n = ga.len();
    let mut assign: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    let pos_a = |g: MorIx| ga.iter().position(|&h| h == g).expect("closed");
    let pos_b = |g: MorIx| gb.iter().position(|&h| h == g).expect("closed");

    fn search(
        i: usize,
        n: usize,
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        ok: &dyn Fn(&[Option<usize>]) -> bool,
        compatible: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if i == n {
            return ok(assign);
        }
        for j in 0..n {
            if !used[j] && compatible(i, j) {
                assign[i] = Some(j);
                used[j] = true;
                if ok(assign) && search(i + 1, n, assign, used, ok, compatible) {
                    return true;
                }
                used[j] = false;
                assign[i] = None;
            }
        }
        false
    }

    let ok = |assign: &[Option<usize>]| {
        for i in 0..n {
            for j in 0..n {
                if let (Some(pi), Some(pj)) = (assign[i], assign[j]) {
                    let prod = pos_a(a.compose(ga[j], ga[i]));
                    if let Some(pp) = assign[prod] {
                        if pos_b(b.compose(gb[pj], gb[pi])) != pp {
                            return false;
                        }
                    }
                }
            }
        }
        true
    };
    let compatible = |i: usize, j: usize| oa[i] == ob[j];
    search(0, n, &mut assign, &mut used, &ok, &compatible)
}
