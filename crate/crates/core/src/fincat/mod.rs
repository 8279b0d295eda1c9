//! Finite categories with explicit composition tables, and the constructions
//! built directly on top of them.

mod comma;
mod functor;
mod setfun;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{input_err, invalid, Result};

pub use comma::{comma_category, CommaCategory};
pub use functor::{groups_isomorphic, Functor, FunctorViolation, Groupoid};
pub use setfun::{
    colim_set, left_kan_set, pi0, Colimit, KanExtension, Partition, SetValuedFunctor, Variance,
};

pub type ObjIx = usize;
pub type MorIx = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub source: ObjIx,
    pub target: ObjIx,
}

/// A finite category stored extensionally.
///
/// Identifiers are opaque strings and equality is identifier equality. The
/// composition table is total on the pairs it defines; missing or wrong
/// entries are representable so that [`FiniteCategory::validate`] can report
/// them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<MorIx>,
    // row-major: compose[g * m + f] = g ∘ f
    compose: Vec<Option<MorIx>>,
}

/// One violated category law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LawViolation {
    DuplicateName(String),
    IdentityEndpoints { object: String },
    MissingComposite { g: String, f: String },
    CompositeEndpoints { g: String, f: String },
    LeftUnit { morphism: String },
    RightUnit { morphism: String },
    Associativity { h: String, g: String, f: String },
}

impl core::fmt::Display for LawViolation {
    fn fmt(&self, out: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LawViolation::DuplicateName(n) => write!(out, "duplicate identifier {n}"),
            LawViolation::IdentityEndpoints { object } => {
                write!(out, "identity of {object} is not an endomorphism of it")
            }
            LawViolation::MissingComposite { g, f } => write!(out, "missing composite {g}.{f}"),
            LawViolation::CompositeEndpoints { g, f } => {
                write!(out, "composite {g}.{f} has wrong source or target")
            }
            LawViolation::LeftUnit { morphism } => write!(out, "left unit law fails for {morphism}"),
            LawViolation::RightUnit { morphism } => {
                write!(out, "right unit law fails for {morphism}")
            }
            LawViolation::Associativity { h, g, f } => {
                write!(out, "associativity fails for {h}.{g}.{f}")
            }
        }
    }
}

impl FiniteCategory {
    /// Assemble a category from raw parts without checking any law.
    pub fn from_parts(
        name: impl Into<String>,
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identity: Vec<MorIx>,
        compose: Vec<Option<MorIx>>,
    ) -> Self {
        let m = morphisms.len();
        assert_eq!(identity.len(), objects.len(), "one identity per object");
        assert_eq!(compose.len(), m * m, "composition table must be m x m");
        FiniteCategory { name: name.into(), objects, morphisms, identity, compose }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjIx> + '_ {
        0..self.objects.len()
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = MorIx> + '_ {
        0..self.morphisms.len()
    }

    pub fn object_name(&self, o: ObjIx) -> &str {
        &self.objects[o]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism(&self, f: MorIx) -> &Morphism {
        &self.morphisms[f]
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism_name(&self, f: MorIx) -> &str {
        &self.morphisms[f].name
    }

    pub fn source(&self, f: MorIx) -> ObjIx {
        self.morphisms[f].source
    }

    pub fn target(&self, f: MorIx) -> ObjIx {
        self.morphisms[f].target
    }

    pub fn identity(&self, o: ObjIx) -> MorIx {
        self.identity[o]
    }

    pub fn is_identity(&self, f: MorIx) -> bool {
        self.identity[self.source(f)] == f
    }

    pub fn object_index(&self, name: &str) -> Option<ObjIx> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<MorIx> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    /// The stored composite `g ∘ f`, if the pair is composable and present.
    pub fn try_compose(&self, g: MorIx, f: MorIx) -> Option<MorIx> {
        if self.target(f) != self.source(g) {
            return None;
        }
        self.compose[g * self.morphisms.len() + f]
    }

    /// `g ∘ f`. Panics on a non-composable pair or a hole in the table; use on
    /// validated categories.
    pub fn compose(&self, g: MorIx, f: MorIx) -> MorIx {
        match self.try_compose(g, f) {
            Some(h) => h,
            None => panic!(
                "no composite {}.{} in category {}",
                self.morphism_name(g),
                self.morphism_name(f),
                self.name
            ),
        }
    }

    /// Compose a path given in diagrammatic order (first arrow first).
    pub fn compose_path(&self, path: &[MorIx]) -> Option<MorIx> {
        let (&first, rest) = path.split_first()?;
        rest.iter().try_fold(first, |acc, &g| self.try_compose(g, acc))
    }

    pub fn hom(&self, a: ObjIx, b: ObjIx) -> impl Iterator<Item = MorIx> + '_ {
        self.morphism_ids().filter(move |&f| self.source(f) == a && self.target(f) == b)
    }

    /// Morphisms with the given target.
    pub fn into_object(&self, b: ObjIx) -> impl Iterator<Item = MorIx> + '_ {
        self.morphism_ids().filter(move |&f| self.target(f) == b)
    }

    /// Morphisms with the given source.
    pub fn out_of(&self, a: ObjIx) -> impl Iterator<Item = MorIx> + '_ {
        self.morphism_ids().filter(move |&f| self.source(f) == a)
    }

    /// Exhaustive check of identities, composites, unit and associativity
    /// laws. Empty means the data is a category.
    pub fn validate(&self) -> Vec<LawViolation> {
        let mut report = Vec::new();
        let mut seen = BTreeMap::new();
        for name in self.objects.iter().chain(self.morphisms.iter().map(|m| &m.name)) {
            if seen.insert(name.as_str(), ()).is_some() {
                report.push(LawViolation::DuplicateName(name.clone()));
            }
        }
        for o in self.objects() {
            let id = self.identity[o];
            if self.source(id) != o || self.target(id) != o {
                report.push(LawViolation::IdentityEndpoints { object: self.objects[o].clone() });
            }
        }
        if !report.is_empty() {
            return report;
        }
        let m = self.morphisms.len();
        let mut table_ok = true;
        for g in 0..m {
            for f in 0..m {
                if self.target(f) != self.source(g) {
                    continue;
                }
                match self.compose[g * m + f] {
                    None => {
                        table_ok = false;
                        report.push(LawViolation::MissingComposite {
                            g: self.morphism_name(g).to_string(),
                            f: self.morphism_name(f).to_string(),
                        });
                    }
                    Some(h) => {
                        if self.source(h) != self.source(f) || self.target(h) != self.target(g) {
                            table_ok = false;
                            report.push(LawViolation::CompositeEndpoints {
                                g: self.morphism_name(g).to_string(),
                                f: self.morphism_name(f).to_string(),
                            });
                        }
                    }
                }
            }
        }
        for f in 0..m {
            let (a, b) = (self.source(f), self.target(f));
            if self.compose[self.identity[b] * m + f] != Some(f) {
                report.push(LawViolation::LeftUnit { morphism: self.morphism_name(f).to_string() });
            }
            if self.compose[f * m + self.identity[a]] != Some(f) {
                report.push(LawViolation::RightUnit { morphism: self.morphism_name(f).to_string() });
            }
        }
        if !table_ok {
            return report;
        }
        for f in 0..m {
            for g in self.out_of(self.target(f)) {
                let gf = self.compose(g, f);
                for h in self.out_of(self.target(g)) {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        report.push(LawViolation::Associativity {
                            h: self.morphism_name(h).to_string(),
                            g: self.morphism_name(g).to_string(),
                            f: self.morphism_name(f).to_string(),
                        });
                    }
                }
            }
        }
        report
    }

    /// Validate and return `self`, turning a non-empty report into an error.
    pub fn checked(self) -> Result<Self> {
        let report = self.validate();
        if report.is_empty() {
            Ok(self)
        } else {
            Err(invalid!("category {}: {}", self.name, join(&report)))
        }
    }

    /// Same objects and morphisms with sources and targets swapped. Object
    /// and morphism indices are preserved.
    pub fn opposite(&self) -> FiniteCategory {
        let m = self.morphisms.len();
        let morphisms = self
            .morphisms
            .iter()
            .map(|f| Morphism { name: f.name.clone(), source: f.target, target: f.source })
            .collect();
        let mut compose = vec![None; m * m];
        for g in 0..m {
            for f in 0..m {
                compose[g * m + f] = self.compose[f * m + g];
            }
        }
        FiniteCategory {
            name: opposite_name(&self.name),
            objects: self.objects.clone(),
            morphisms,
            identity: self.identity.clone(),
            compose,
        }
    }

    /// True when every morphism has a two-sided inverse.
    pub fn is_groupoid(&self) -> bool {
        self.morphism_ids().all(|f| self.inverse_of(f).is_some())
    }

    pub fn inverse_of(&self, f: MorIx) -> Option<MorIx> {
        let (a, b) = (self.source(f), self.target(f));
        self.hom(b, a).find(|&g| {
            self.try_compose(g, f) == Some(self.identity[a])
                && self.try_compose(f, g) == Some(self.identity[b])
        })
    }

    /// The terminal category: one object `*` and its identity.
    pub fn terminal() -> FiniteCategory {
        let mut b = CategoryBuilder::new("pt");
        b.add_object("*");
        b.build()
    }

    pub fn discrete(name: &str, objects: &[&str]) -> FiniteCategory {
        let mut b = CategoryBuilder::new(name);
        for o in objects {
            b.add_object(o);
        }
        b.build()
    }

    /// The poset generated by `relations` (pairs `a <= b`), one morphism
    /// `a->b` per comparable pair.
    pub fn poset(name: &str, objects: &[&str], relations: &[(&str, &str)]) -> Result<FiniteCategory> {
        let n = objects.len();
        let index = |s: &str| {
            objects.iter().position(|o| *o == s).ok_or_else(|| input_err!("unknown object {s}"))
        };
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for (a, b) in relations {
            le[index(a)? * n + index(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i * n + k] && le[k * n + j] {
                        le[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i * n + j] && le[j * n + i] {
                    return Err(input_err!("relations contain a cycle through {}", objects[i]));
                }
            }
        }
        let mut b = CategoryBuilder::new(name);
        for o in objects {
            b.add_object(o);
        }
        let mut arrow = vec![None; n * n];
        for i in 0..n {
            arrow[i * n + i] = Some(b.identity(i));
            for j in 0..n {
                if i != j && le[i * n + j] {
                    arrow[i * n + j] = Some(b.add_morphism(&format!("{}->{}", objects[i], objects[j]), i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if let (Some(f), Some(g)) = (arrow[i * n + j], arrow[j * n + k]) {
                        b.set_composite(g, f, arrow[i * n + k].expect("transitive"));
                    }
                }
            }
        }
        Ok(b.build())
    }

    /// The linear order `0 -> 1 -> ... -> n-1`.
    pub fn chain(n: usize) -> FiniteCategory {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let rel: Vec<(&str, &str)> = (1..n).map(|i| (refs[i - 1], refs[i])).collect();
        FiniteCategory::poset(&format!("chain{n}"), &refs, &rel).expect("chain is acyclic")
    }

    /// The cyclic group of order `n` as a one-object category; the generator
    /// power `g^k` composes additively.
    pub fn cyclic_group(n: usize) -> FiniteCategory {
        FiniteCategory::banded_groupoid(&format!("Z{n}"), 1, n)
    }

    /// The codiscrete groupoid on `k` objects (exactly one arrow between any
    /// two objects).
    pub fn codiscrete(k: usize) -> FiniteCategory {
        FiniteCategory::banded_groupoid(&format!("E{k}"), k, 1)
    }

    /// Codiscrete groupoid on `k` objects times the cyclic group of order
    /// `n`: every hom-set is a copy of `Z/n`.
    pub fn banded_groupoid(name: &str, k: usize, n: usize) -> FiniteCategory {
        assert!(n >= 1);
        let mut b = CategoryBuilder::new(name);
        for i in 0..k {
            if k == 1 {
                b.add_object("*");
            } else {
                b.add_object(&i.to_string());
            }
        }
        // arrow[(i, j, g)]
        let mut arrow = vec![0; k * k * n];
        for i in 0..k {
            for j in 0..k {
                for g in 0..n {
                    let idx = (i * k + j) * n + g;
                    if i == j && g == 0 {
                        arrow[idx] = b.identity(i);
                    } else {
                        let name = match (k, n) {
                            (1, _) => format!("g^{g}"),
                            (_, 1) => format!("{i}>{j}"),
                            _ => format!("{i}>{j}:g^{g}"),
                        };
                        arrow[idx] = b.add_morphism(&name, i, j);
                    }
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    for g in 0..n {
                        for h in 0..n {
                            let f = arrow[(i * k + j) * n + g];
                            let gg = arrow[(j * k + l) * n + h];
                            b.set_composite(gg, f, arrow[(i * k + l) * n + (g + h) % n]);
                        }
                    }
                }
            }
        }
        b.build()
    }

    /// Product category; objects `(a,b)`, morphisms `(f,g)`.
    pub fn product(a: &FiniteCategory, b: &FiniteCategory) -> FiniteCategory {
        let (na, nb) = (a.num_objects(), b.num_objects());
        let (ma, mb) = (a.num_morphisms(), b.num_morphisms());
        let mut builder = CategoryBuilder::new(&format!("{}x{}", a.name, b.name));
        for x in 0..na {
            for y in 0..nb {
                let id_name = format!("({},{})", a.morphism_name(a.identity(x)), b.morphism_name(b.identity(y)));
                builder.add_object_with_identity(&format!("({},{})", a.object_name(x), b.object_name(y)), &id_name);
            }
        }
        let mut arrow = vec![0; ma * mb];
        for f in 0..ma {
            for g in 0..mb {
                let src = a.source(f) * nb + b.source(g);
                let tgt = a.target(f) * nb + b.target(g);
                arrow[f * mb + g] = if a.is_identity(f) && b.is_identity(g) {
                    builder.identity(src)
                } else {
                    builder.add_morphism(&format!("({},{})", a.morphism_name(f), b.morphism_name(g)), src, tgt)
                };
            }
        }
        for f1 in 0..ma {
            for f2 in a.out_of(a.target(f1)) {
                let f = a.compose(f2, f1);
                for g1 in 0..mb {
                    for g2 in b.out_of(b.target(g1)) {
                        let g = b.compose(g2, g1);
                        builder.set_composite(arrow[f2 * mb + g2], arrow[f1 * mb + g1], arrow[f * mb + g]);
                    }
                }
            }
        }
        builder.build()
    }

    /// Disjoint union; names are kept, so they must not clash.
    pub fn disjoint_union(name: &str, parts: &[&FiniteCategory]) -> Result<FiniteCategory> {
        let mut builder = CategoryBuilder::new(name);
        for part in parts {
            let base_obj = builder.num_objects();
            for o in part.objects() {
                builder.add_object_with_identity(part.object_name(o), part.morphism_name(part.identity(o)));
            }
            let mut map = vec![0; part.num_morphisms()];
            for f in part.morphism_ids() {
                map[f] = if part.is_identity(f) {
                    builder.identity(base_obj + part.source(f))
                } else {
                    builder.add_morphism(part.morphism_name(f), base_obj + part.source(f), base_obj + part.target(f))
                };
            }
            for f in part.morphism_ids() {
                for g in part.out_of(part.target(f)) {
                    builder.set_composite(map[g], map[f], map[part.compose(g, f)]);
                }
            }
        }
        let cat = builder.build();
        let report = cat.validate();
        if report.iter().any(|v| matches!(v, LawViolation::DuplicateName(_))) {
            return Err(input_err!("disjoint union {name}: {}", join(&report)));
        }
        Ok(cat)
    }

    /// The full subcategory on the given objects (in the given order).
    pub fn full_subcategory(&self, name: &str, objects: &[ObjIx]) -> (FiniteCategory, Vec<MorIx>) {
        let mut builder = CategoryBuilder::new(name);
        let mut new_obj = vec![usize::MAX; self.num_objects()];
        for &o in objects {
            new_obj[o] = builder.add_object_with_identity(self.object_name(o), self.morphism_name(self.identity(o)));
        }
        let mut new_mor = vec![usize::MAX; self.num_morphisms()];
        let mut old_of_new = Vec::new();
        for &o in objects {
            old_of_new.push(self.identity(o));
            new_mor[self.identity(o)] = builder.identity(new_obj[o]);
        }
        for f in self.morphism_ids() {
            let (a, b) = (self.source(f), self.target(f));
            if new_obj[a] != usize::MAX && new_obj[b] != usize::MAX && !self.is_identity(f) {
                new_mor[f] = builder.add_morphism(self.morphism_name(f), new_obj[a], new_obj[b]);
                old_of_new.push(f);
            }
        }
        for f in self.morphism_ids() {
            if new_mor[f] == usize::MAX {
                continue;
            }
            for g in self.out_of(self.target(f)) {
                if new_mor[g] != usize::MAX {
                    builder.set_composite(new_mor[g], new_mor[f], new_mor[self.compose(g, f)]);
                }
            }
        }
        (builder.build(), old_of_new)
    }
}

fn opposite_name(name: &str) -> String {
    match name.strip_suffix("^op") {
        Some(base) => base.to_string(),
        None => format!("{name}^op"),
    }
}

pub(crate) fn join<T: core::fmt::Display>(items: &[T]) -> String {
    let mut out = String::new();
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(&item.to_string());
    }
    out
}

/// Incremental construction of a [`FiniteCategory`].
///
/// Identities are created with their object and unit-law composites are
/// filled in at [`build`](CategoryBuilder::build) unless set explicitly; every
/// other composite must be supplied.
#[derive(Clone, Debug)]
pub struct CategoryBuilder {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<MorIx>,
    composites: BTreeMap<(MorIx, MorIx), MorIx>,
}

impl CategoryBuilder {
    pub fn new(name: &str) -> Self {
        CategoryBuilder {
            name: name.to_string(),
            objects: Vec::new(),
            morphisms: Vec::new(),
            identity: Vec::new(),
            composites: BTreeMap::new(),
        }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn add_object(&mut self, name: &str) -> ObjIx {
        let id = format!("id_{name}");
        self.add_object_with_identity(name, &id)
    }

    pub fn add_object_with_identity(&mut self, name: &str, identity_name: &str) -> ObjIx {
        let o = self.objects.len();
        self.objects.push(name.to_string());
        let id = self.morphisms.len();
        self.morphisms.push(Morphism { name: identity_name.to_string(), source: o, target: o });
        self.identity.push(id);
        o
    }

    pub fn identity(&self, o: ObjIx) -> MorIx {
        self.identity[o]
    }

    pub fn add_morphism(&mut self, name: &str, source: ObjIx, target: ObjIx) -> MorIx {
        self.morphisms.push(Morphism { name: name.to_string(), source, target });
        self.morphisms.len() - 1
    }

    pub fn object_index(&self, name: &str) -> Option<ObjIx> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<MorIx> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn rename_morphism(&mut self, f: MorIx, name: &str) {
        self.morphisms[f].name = name.to_string();
    }

    pub fn morphism(&self, f: MorIx) -> &Morphism {
        &self.morphisms[f]
    }

    /// Record `g ∘ f = h`, overriding anything set before.
    pub fn set_composite(&mut self, g: MorIx, f: MorIx, h: MorIx) {
        self.composites.insert((g, f), h);
    }

    pub fn build(self) -> FiniteCategory {
        let m = self.morphisms.len();
        let mut compose = vec![None; m * m];
        for (f, mor) in self.morphisms.iter().enumerate() {
            compose[self.identity[mor.target] * m + f] = Some(f);
            compose[f * m + self.identity[mor.source]] = Some(f);
        }
        for ((g, f), h) in self.composites {
            compose[g * m + f] = Some(h);
        }
        FiniteCategory {
            name: self.name,
            objects: self.objects,
            morphisms: self.morphisms,
            identity: self.identity,
            compose,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_object_site() -> FiniteCategory {
        FiniteCategory::poset("C", &["V", "U"], &[("V", "U")]).unwrap()
    }

    #[test]
    fn terminal_is_valid() {
        let pt = FiniteCategory::terminal();
        assert!(pt.validate().is_empty());
        assert_eq!(pt.num_morphisms(), 1);
    }

    #[test]
    fn broken_unit_law_is_reported() {
        let mut b = CategoryBuilder::new("bad");
        let v = b.add_object("V");
        let u = b.add_object("U");
        let a = b.add_morphism("a", v, u);
        let c = b.add_morphism("c", v, u);
        let id_v = b.identity(v);
        b.set_composite(a, id_v, c);
        let report = b.build().validate();
        assert!(report.contains(&LawViolation::RightUnit { morphism: "a".into() }), "{report:?}");
    }

    #[test]
    fn chain_of_three_is_valid() {
        let c = FiniteCategory::chain(3);
        assert!(c.validate().is_empty());
        assert_eq!(c.num_morphisms(), 6);
    }

    #[test]
    fn missing_composite_is_reported() {
        let mut b = CategoryBuilder::new("holes");
        let x = b.add_object("x");
        let y = b.add_object("y");
        let z = b.add_object("z");
        b.add_morphism("f", x, y);
        b.add_morphism("g", y, z);
        let report = b.build().validate();
        assert_eq!(report, vec![LawViolation::MissingComposite { g: "g".into(), f: "f".into() }]);
    }

    #[test]
    fn opposite_of_chain() {
        let c = FiniteCategory::chain(3);
        let op = c.opposite();
        assert!(op.validate().is_empty());
        let non_id = |k: &FiniteCategory| k.morphism_ids().filter(|&f| !k.is_identity(f)).count();
        assert_eq!(non_id(&op), 3);
        let f = c.morphism_index("0->1").unwrap();
        assert_eq!((op.source(f), op.target(f)), (c.target(f), c.source(f)));
        assert_eq!(op.opposite(), c);
        assert_eq!(FiniteCategory::terminal().opposite().opposite(), FiniteCategory::terminal());
    }

    #[test]
    fn groups_and_groupoids() {
        let z3 = FiniteCategory::cyclic_group(3);
        assert!(z3.validate().is_empty());
        assert!(z3.is_groupoid());
        let e2 = FiniteCategory::codiscrete(2);
        assert_eq!(e2.num_morphisms(), 4);
        assert!(e2.is_groupoid());
        let band = FiniteCategory::banded_groupoid("B", 2, 2);
        assert!(band.validate().is_empty());
        assert_eq!(band.num_morphisms(), 8);
        assert!(!FiniteCategory::chain(2).is_groupoid());
    }

    #[test]
    fn product_counts() {
        let c = two_object_site();
        let p = FiniteCategory::product(&c, &FiniteCategory::chain(2));
        assert!(p.validate().is_empty());
        assert_eq!((p.num_objects(), p.num_morphisms()), (4, 9));
    }

    #[test]
    fn disjoint_union_and_subcategory() {
        let z2 = FiniteCategory::cyclic_group(2);
        let pt = FiniteCategory::discrete("p", &["p"]);
        let u = FiniteCategory::disjoint_union("Z2+p", &[&z2, &pt]).unwrap();
        assert!(u.validate().is_empty());
        assert_eq!((u.num_objects(), u.num_morphisms()), (2, 3));
        assert!(FiniteCategory::disjoint_union("clash", &[&z2, &z2]).is_err());
        let (sub, old) = u.full_subcategory("sub", &[0]);
        assert!(sub.validate().is_empty());
        assert_eq!(old.len(), 2);
    }

    #[test]
    fn poset_rejects_cycles() {
        assert!(FiniteCategory::poset("p", &["a", "b"], &[("a", "b"), ("b", "a")]).is_err());
    }
}
