//! Truncated simplicial and bisimplicial sets, nerves, integer homology and
//! weak-equivalence evidence.

mod homology;
mod snf;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{input_err, invalid, Result};
use crate::fincat::{FiniteCategory, Functor, MorIx, ObjIx};
use crate::util::UnionFind;

pub use homology::{
    homology, homology_unnormalized, we_evidence, we_evidence_groupoids, FgAbelianGroup,
    GroupoidEvidence, HomologyResult, WeEvidence,
};
pub use snf::{elementary_divisors, rank, smith_normal_form, IntegerMatrix, SmithForm, SparseMatrix};

/// A simplicial set truncated at degree `dim`: simplices in degrees
/// `0..=dim`, faces out of degrees `1..=dim`, degeneracies out of degrees
/// `0..dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSimplicialSet {
    dim: usize,
    counts: Vec<usize>,
    // faces[n][i][x] = d_i x for x in degree n; faces[0] is empty
    faces: Vec<Vec<Vec<usize>>>,
    // degens[n][i][x] = s_i x for x in degree n < dim
    degens: Vec<Vec<Vec<usize>>>,
    labels: Option<Vec<Vec<String>>>,
}

/// A simplicial identity that failed, with the simplex it failed on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityViolation {
    pub identity: String,
    pub degree: usize,
    pub simplex: usize,
}

impl TruncatedSimplicialSet {
    /// Assemble from raw tables; see [`TruncatedSimplicialSet::validate`].
    pub fn from_parts(
        dim: usize,
        counts: Vec<usize>,
        faces: Vec<Vec<Vec<usize>>>,
        degens: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if counts.len() != dim + 1 || faces.len() != dim + 1 || degens.len() != dim + 1 {
            return Err(input_err!("simplicial tables do not match truncation {dim}"));
        }
        for n in 0..=dim {
            let nf = if n == 0 { 0 } else { n + 1 };
            let nd = if n < dim { n + 1 } else { 0 };
            if faces[n].len() != nf || degens[n].len() != nd {
                return Err(input_err!("wrong number of face or degeneracy maps in degree {n}"));
            }
            for (i, f) in faces[n].iter().enumerate() {
                if f.len() != counts[n] || f.iter().any(|&y| y >= counts[n - 1]) {
                    return Err(input_err!("face d{i} out of degree {n} is malformed"));
                }
            }
            for (i, s) in degens[n].iter().enumerate() {
                if s.len() != counts[n] || s.iter().any(|&y| y >= counts[n + 1]) {
                    return Err(input_err!("degeneracy s{i} out of degree {n} is malformed"));
                }
            }
        }
        Ok(TruncatedSimplicialSet { dim, counts, faces, degens, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Self {
        assert!(labels.len() == self.dim + 1 && labels.iter().zip(&self.counts).all(|(l, &c)| l.len() == c));
        self.labels = Some(labels);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self, n: usize) -> usize {
        self.counts[n]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn face(&self, n: usize, i: usize, x: usize) -> usize {
        self.faces[n][i][x]
    }

    pub fn degeneracy(&self, n: usize, i: usize, x: usize) -> usize {
        self.degens[n][i][x]
    }

    pub fn label(&self, n: usize, x: usize) -> String {
        match &self.labels {
            Some(l) => l[n][x].clone(),
            None => format!("{n}:{x}"),
        }
    }

    /// Chop off every degree above `dim`.
    pub fn truncate(&self, dim: usize) -> Result<Self> {
        if dim > self.dim {
            return Err(input_err!("cannot raise truncation from {} to {dim}", self.dim));
        }
        let mut out = self.clone();
        out.dim = dim;
        out.counts.truncate(dim + 1);
        out.faces.truncate(dim + 1);
        out.degens.truncate(dim + 1);
        out.degens[dim].clear();
        if let Some(l) = &mut out.labels {
            l.truncate(dim + 1);
        }
        Ok(out)
    }

    /// `flags[n][x]`: whether `x` is in the image of some degeneracy.
    pub fn degenerate_flags(&self) -> Vec<Vec<bool>> {
        let mut flags: Vec<Vec<bool>> = self.counts.iter().map(|&c| vec![false; c]).collect();
        for n in 0..self.dim {
            for s in &self.degens[n] {
                for &y in s {
                    flags[n + 1][y] = true;
                }
            }
        }
        flags
    }

    pub fn nondegenerate(&self, n: usize) -> Vec<usize> {
        let flags = self.degenerate_flags();
        (0..self.counts[n]).filter(|&x| !flags[n][x]).collect()
    }

    /// Path components of the 1-skeleton: count and vertex labels.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut uf = UnionFind::new(self.counts[0]);
        if self.dim >= 1 {
            for e in 0..self.counts[1] {
                uf.union(self.faces[1][0][e], self.faces[1][1][e]);
            }
        }
        uf.labels()
    }

    /// Exhaustive check of the simplicial identities in every degree where
    /// both sides are defined.
    pub fn validate(&self) -> Vec<IdentityViolation> {
        let mut out = Vec::new();
        let mut fail = |identity: String, degree: usize, simplex: usize| {
            out.push(IdentityViolation { identity, degree, simplex })
        };
        let d = self.dim;
        for n in 2..=d {
            for x in 0..self.counts[n] {
                for j in 1..=n {
                    for i in 0..j {
                        let l = self.face(n - 1, i, self.face(n, j, x));
                        let r = self.face(n - 1, j - 1, self.face(n, i, x));
                        if l != r {
                            fail(format!("d{i} d{j} = d{} d{i}", j - 1), n, x);
                        }
                    }
                }
            }
        }
        for n in 0..d {
            for x in 0..self.counts[n] {
                for j in 0..=n {
                    let sx = self.degeneracy(n, j, x);
                    for i in 0..=n + 1 {
                        let l = self.face(n + 1, i, sx);
                        let ok = if i < j {
                            l == self.degeneracy(n - 1, j - 1, self.face(n, i, x))
                        } else if i == j || i == j + 1 {
                            l == x
                        } else {
                            l == self.degeneracy(n - 1, j, self.face(n, i - 1, x))
                        };
                        if !ok {
                            fail(format!("d{i} s{j}"), n, x);
                        }
                    }
                    if n + 1 < d {
                        for i in 0..=j {
                            let l = self.degeneracy(n + 1, i, sx);
                            let r = self.degeneracy(n + 1, j + 1, self.degeneracy(n, i, x));
                            if l != r {
                                fail(format!("s{i} s{j} = s{} s{i}", j + 1), n, x);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn checked(self) -> Result<Self> {
        match self.validate().first() {
            None => Ok(self),
            Some(v) => Err(invalid!(
                "simplicial identity {} fails on simplex {} in degree {}",
                v.identity,
                v.simplex,
                v.degree
            )),
        }
    }

    /// The smallest simplicial subset containing `generators` (degree,
    /// simplex), with its inclusion.
    pub fn generated_subset(self: &Arc<Self>, generators: &[(usize, usize)]) -> Result<SimplicialMap> {
        let mut keep: Vec<Vec<bool>> = self.counts.iter().map(|&c| vec![false; c]).collect();
        for &(n, x) in generators {
            if n > self.dim || x >= self.counts[n] {
                return Err(input_err!("no simplex {x} in degree {n}"));
            }
            keep[n][x] = true;
        }
        // close downward under faces, then upward under degeneracies
        for n in (1..=self.dim).rev() {
            for x in 0..self.counts[n] {
                if keep[n][x] {
                    for i in 0..=n {
                        keep[n - 1][self.face(n, i, x)] = true;
                    }
                }
            }
        }
        for n in 0..self.dim {
            for x in 0..self.counts[n] {
                if keep[n][x] {
                    for i in 0..=n {
                        keep[n + 1][self.degeneracy(n, i, x)] = true;
                    }
                }
            }
        }
        let maps: Vec<Vec<usize>> =
            keep.iter().map(|k| (0..k.len()).filter(|&x| k[x]).collect()).collect();
        let keys = maps.clone();
        let sub = build_keyed(
            self.dim,
            keys,
            |n, i, &x| self.face(n, i, x),
            |n, i, &x| self.degeneracy(n, i, x),
        )?;
        let labels = (0..=self.dim).map(|n| maps[n].iter().map(|&x| self.label(n, x)).collect()).collect();
        let dom = Arc::new(sub.sset.with_labels(labels));
        Ok(SimplicialMap { dom, cod: self.clone(), maps })
    }
}

/// Disjoint union of simplicial sets with the same truncation; the
/// simplices of each part follow those of the previous parts.
#[allow(clippy::needless_range_loop)]
pub fn disjoint_union(parts: &[&TruncatedSimplicialSet]) -> Result<TruncatedSimplicialSet> {
    let dim = parts.first().map_or(0, |p| p.dim);
    if parts.iter().any(|p| p.dim != dim) {
        return Err(input_err!("parts have different truncations"));
    }
    let mut counts = vec![0; dim + 1];
    let mut faces: Vec<Vec<Vec<usize>>> = (0..=dim).map(|n| vec![Vec::new(); if n == 0 { 0 } else { n + 1 }]).collect();
    let mut degens: Vec<Vec<Vec<usize>>> = (0..=dim).map(|n| vec![Vec::new(); if n < dim { n + 1 } else { 0 }]).collect();
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); dim + 1];
    for p in parts {
        let base = counts.clone();
        for n in 0..=dim {
            if n > 0 {
                for i in 0..=n {
                    faces[n][i].extend(p.faces[n][i].iter().map(|&y| y + base[n - 1]));
                }
            }
            if n < dim {
                for i in 0..=n {
                    degens[n][i].extend(p.degens[n][i].iter().map(|&y| y + base[n + 1]));
                }
            }
            labels[n].extend((0..p.counts[n]).map(|x| p.label(n, x)));
            counts[n] += p.counts[n];
        }
    }
    Ok(TruncatedSimplicialSet { dim, counts, faces, degens, labels: Some(labels) })
}

/// The map out of the disjoint union of the domains that restricts to each
/// of `maps`.
pub fn copair(maps: &[SimplicialMap]) -> Result<SimplicialMap> {
    let first = maps.first().ok_or_else(|| input_err!("need at least one map"))?;
    if maps.iter().any(|m| *m.cod != *first.cod) {
        return Err(input_err!("maps have different codomains"));
    }
    let doms: Vec<&TruncatedSimplicialSet> = maps.iter().map(|m| &*m.dom).collect();
    let dom = Arc::new(disjoint_union(&doms)?);
    let out = (0..=dom.dim).map(|n| maps.iter().flat_map(|m| m.maps[n].iter().copied()).collect()).collect();
    SimplicialMap::new(dom, first.cod.clone(), out)
}

/// A simplicial set built from explicit keys, with the key of every simplex.
#[derive(Clone, Debug)]
pub struct Keyed<K> {
    pub sset: TruncatedSimplicialSet,
    pub keys: Vec<Vec<K>>,
    pub index: Vec<BTreeMap<K, usize>>,
}

impl<K: Ord> Keyed<K> {
    pub fn find(&self, n: usize, key: &K) -> Option<usize> {
        self.index.get(n)?.get(key).copied()
    }
}

/// Build a truncated simplicial set from the keys of its simplices and face
/// and degeneracy functions on keys. `face(n, i, k)` receives a key of
/// degree `n`; `degen(n, i, k)` likewise.
pub fn build_keyed<K: Ord + Clone>(
    dim: usize,
    keys: Vec<Vec<K>>,
    face: impl Fn(usize, usize, &K) -> K,
    degen: impl Fn(usize, usize, &K) -> K,
) -> Result<Keyed<K>> {
    if keys.len() != dim + 1 {
        return Err(input_err!("expected simplices in degrees 0..={dim}"));
    }
    let mut index = Vec::with_capacity(dim + 1);
    for (n, ks) in keys.iter().enumerate() {
        let mut map = BTreeMap::new();
        for (x, k) in ks.iter().enumerate() {
            if map.insert(k.clone(), x).is_some() {
                return Err(input_err!("duplicate simplex in degree {n}"));
            }
        }
        index.push(map);
    }
    let lookup = |index: &Vec<BTreeMap<K, usize>>, n: usize, k: &K, what: &str| -> Result<usize> {
        index[n].get(k).copied().ok_or_else(|| invalid!("{what} leaves the simplices listed in degree {n}"))
    };
    let mut faces = vec![Vec::new(); dim + 1];
    let mut degens = vec![Vec::new(); dim + 1];
    for n in 0..=dim {
        if n > 0 {
            for i in 0..=n {
                let row = keys[n]
                    .iter()
                    .map(|k| lookup(&index, n - 1, &face(n, i, k), "a face"))
                    .collect::<Result<Vec<_>>>()?;
                faces[n].push(row);
            }
        }
        if n < dim {
            for i in 0..=n {
                let row = keys[n]
                    .iter()
                    .map(|k| lookup(&index, n + 1, &degen(n, i, k), "a degeneracy"))
                    .collect::<Result<Vec<_>>>()?;
                degens[n].push(row);
            }
        }
    }
    let counts = keys.iter().map(Vec::len).collect();
    let sset = TruncatedSimplicialSet { dim, counts, faces, degens, labels: None };
    Ok(Keyed { sset, keys, index })
}

/// A degree-wise map of simplicial sets with the same truncation.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub dom: Arc<TruncatedSimplicialSet>,
    pub cod: Arc<TruncatedSimplicialSet>,
    /// `maps[n][x]` is the image of the `n`-simplex `x`.
    pub maps: Vec<Vec<usize>>,
}

impl SimplicialMap {
    pub fn new(
        dom: Arc<TruncatedSimplicialSet>,
        cod: Arc<TruncatedSimplicialSet>,
        maps: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if dom.dim != cod.dim {
            return Err(input_err!("truncations differ: {} and {}", dom.dim, cod.dim));
        }
        let shape_ok = maps.len() == dom.dim + 1
            && (0..=dom.dim).all(|n| maps[n].len() == dom.counts[n] && maps[n].iter().all(|&y| y < cod.counts[n]));
        if !shape_ok {
            return Err(input_err!("map tables do not match the simplicial sets"));
        }
        Ok(SimplicialMap { dom, cod, maps })
    }

    pub fn identity(s: Arc<TruncatedSimplicialSet>) -> Self {
        let maps = s.counts.iter().map(|&c| (0..c).collect()).collect();
        SimplicialMap { dom: s.clone(), cod: s, maps }
    }

    pub fn apply(&self, n: usize, x: usize) -> usize {
        self.maps[n][x]
    }

    /// Simplices where the map fails to commute with a face or degeneracy.
    pub fn validate(&self) -> Vec<IdentityViolation> {
        let (a, b) = (&*self.dom, &*self.cod);
        let mut out = Vec::new();
        for n in 0..=a.dim {
            for x in 0..a.counts[n] {
                let fx = self.maps[n][x];
                if n > 0 {
                    for i in 0..=n {
                        if self.maps[n - 1][a.face(n, i, x)] != b.face(n, i, fx) {
                            out.push(IdentityViolation { identity: format!("f d{i} = d{i} f"), degree: n, simplex: x });
                        }
                    }
                }
                if n < a.dim {
                    for i in 0..=n {
                        if self.maps[n + 1][a.degeneracy(n, i, x)] != b.degeneracy(n, i, fx) {
                            out.push(IdentityViolation { identity: format!("f s{i} = s{i} f"), degree: n, simplex: x });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn checked(self) -> Result<Self> {
        match self.validate().first() {
            None => Ok(self),
            Some(v) => Err(invalid!(
                "simplicial map breaks {} on simplex {} in degree {}",
                v.identity,
                v.simplex,
                v.degree
            )),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SimplicialMap) -> Result<SimplicialMap> {
        if *self.cod != *other.dom {
            return Err(input_err!("simplicial maps are not composable"));
        }
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(n, m)| m.iter().map(|&x| other.maps[n][x]).collect())
            .collect();
        Ok(SimplicialMap { dom: self.dom.clone(), cod: other.cod.clone(), maps })
    }

    pub fn is_isomorphism(&self) -> bool {
        (0..=self.dom.dim).all(|n| {
            let mut seen = vec![false; self.cod.counts[n]];
            self.dom.counts[n] == self.cod.counts[n]
                && self.maps[n].iter().all(|&y| !core::mem::replace(&mut seen[y], true))
        })
    }
}

/// A nerve simplex: the first vertex and a composable string of arrows.
pub type NerveKey = (ObjIx, Vec<MorIx>);

fn nerve_face(c: &FiniteCategory, n: usize, i: usize, (x0, fs): &NerveKey) -> NerveKey {
    if n == 0 {
        unreachable!("vertices have no faces");
    }
    if i == 0 {
        (c.target(fs[0]), fs[1..].to_vec())
    } else if i == n {
        (*x0, fs[..n - 1].to_vec())
    } else {
        let mut out = Vec::with_capacity(n - 1);
        out.extend_from_slice(&fs[..i - 1]);
        out.push(c.compose(fs[i], fs[i - 1]));
        out.extend_from_slice(&fs[i + 1..]);
        (*x0, out)
    }
}

fn nerve_degeneracy(c: &FiniteCategory, i: usize, (x0, fs): &NerveKey) -> NerveKey {
    let xi = if i == 0 { *x0 } else { c.target(fs[i - 1]) };
    let mut out = fs.clone();
    out.insert(i, c.identity(xi));
    (*x0, out)
}

/// Composable strings of every length `0..=dim`.
pub fn nerve_strings(c: &FiniteCategory, dim: usize) -> Vec<Vec<NerveKey>> {
    let mut levels: Vec<Vec<NerveKey>> = vec![c.objects().map(|o| (o, Vec::new())).collect()];
    for _ in 0..dim {
        let prev = levels.last().expect("nonempty");
        let mut next = Vec::new();
        for (x0, fs) in prev {
            let last = fs.last().map_or(*x0, |&f| c.target(f));
            for g in c.out_of(last) {
                let mut s = fs.clone();
                s.push(g);
                next.push((*x0, s));
            }
        }
        levels.push(next);
    }
    levels
}

/// The nerve of `c` truncated at `dim`: `n`-simplices are composable strings
/// `x0 → x1 → … → xn`; `d_i` deletes `x_i`, `s_i` repeats it.
pub fn nerve(c: &FiniteCategory, dim: usize) -> Keyed<NerveKey> {
    let keys = nerve_strings(c, dim);
    let mut keyed = build_keyed(dim, keys, |n, i, k| nerve_face(c, n, i, k), |_, i, k| nerve_degeneracy(c, i, k))
        .expect("nerve tables are closed");
    let labels = keyed
        .keys
        .iter()
        .map(|ks| ks.iter().map(|k| nerve_label(c, k)).collect())
        .collect();
    keyed.sset = keyed.sset.with_labels(labels);
    keyed
}

fn nerve_label(c: &FiniteCategory, (x0, fs): &NerveKey) -> String {
    let mut s = String::from(c.object_name(*x0));
    for &f in fs {
        s.push_str(&format!(" -{}-> {}", c.morphism_name(f), c.object_name(c.target(f))));
    }
    s
}

/// The map of nerves induced by a functor.
pub fn nerve_map(f: &Functor, dim: usize) -> SimplicialMap {
    let a = nerve(f.dom(), dim);
    let b = nerve(f.cod(), dim);
    let maps = a
        .keys
        .iter()
        .enumerate()
        .map(|(n, ks)| {
            ks.iter()
                .map(|(x0, fs)| {
                    let key = (f.obj(*x0), fs.iter().map(|&g| f.mor(g)).collect());
                    b.find(n, &key).expect("functors preserve strings")
                })
                .collect()
        })
        .collect();
    SimplicialMap { dom: Arc::new(a.sset), cod: Arc::new(b.sset), maps }
}

/// A bisimplicial set truncated at bidegree `(dim, dim)`. The first index
/// is horizontal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimplicialSet {
    dim: usize,
    counts: Vec<Vec<usize>>,
    // h_faces[m][n][i][x]: (m, n) → (m-1, n); v_faces: (m, n) → (m, n-1)
    h_faces: Vec<Vec<Vec<Vec<usize>>>>,
    v_faces: Vec<Vec<Vec<Vec<usize>>>>,
    h_degens: Vec<Vec<Vec<Vec<usize>>>>,
    v_degens: Vec<Vec<Vec<Vec<usize>>>>,
}

impl BisimplicialSet {
    /// Build from keys per bidegree and the four families of structure maps
    /// on keys; each function receives `(m, n, i, key)`.
    #[allow(clippy::type_complexity)]
    pub fn from_keys<K: Ord + Clone>(
        dim: usize,
        keys: &[Vec<Vec<K>>],
        h_face: impl Fn(usize, usize, usize, &K) -> K,
        v_face: impl Fn(usize, usize, usize, &K) -> K,
        h_degen: impl Fn(usize, usize, usize, &K) -> K,
        v_degen: impl Fn(usize, usize, usize, &K) -> K,
    ) -> Result<Self> {
        let index: Vec<Vec<BTreeMap<&K, usize>>> = keys
            .iter()
            .map(|row| row.iter().map(|ks| ks.iter().enumerate().map(|(x, k)| (k, x)).collect()).collect())
            .collect();
        let find = |m: usize, n: usize, k: &K| -> Result<usize> {
            index[m][n].get(k).copied().ok_or_else(|| invalid!("structure map leaves bidegree ({m}, {n})"))
        };
        let grid = || vec![vec![Vec::new(); dim + 1]; dim + 1];
        let (mut hf, mut vf, mut hd, mut vd) = (grid(), grid(), grid(), grid());
        for m in 0..=dim {
            for n in 0..=dim {
                let ks = &keys[m][n];
                for i in 0..=m {
                    if m > 0 {
                        hf[m][n].push(ks.iter().map(|k| find(m - 1, n, &h_face(m, n, i, k))).collect::<Result<Vec<_>>>()?);
                    }
                    if m < dim {
                        hd[m][n].push(ks.iter().map(|k| find(m + 1, n, &h_degen(m, n, i, k))).collect::<Result<Vec<_>>>()?);
                    }
                }
                for j in 0..=n {
                    if n > 0 {
                        vf[m][n].push(ks.iter().map(|k| find(m, n - 1, &v_face(m, n, j, k))).collect::<Result<Vec<_>>>()?);
                    }
                    if n < dim {
                        vd[m][n].push(ks.iter().map(|k| find(m, n + 1, &v_degen(m, n, j, k))).collect::<Result<Vec<_>>>()?);
                    }
                }
            }
        }
        let counts = keys.iter().map(|row| row.iter().map(Vec::len).collect()).collect();
        Ok(BisimplicialSet { dim, counts, h_faces: hf, v_faces: vf, h_degens: hd, v_degens: vd })
    }

    /// The bisimplicial set that is `s` in every column (constant
    /// vertically).
    pub fn horizontal(s: &TruncatedSimplicialSet) -> Self {
        let d = s.dim;
        let keys: Vec<Vec<Vec<usize>>> = (0..=d).map(|m| vec![(0..s.count(m)).collect(); d + 1]).collect();
        Self::from_keys(
            d,
            &keys,
            |m, _, i, &x| s.face(m, i, x),
            |_, _, _, &x| x,
            |m, _, i, &x| s.degeneracy(m, i, x),
            |_, _, _, &x| x,
        )
        .expect("closed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self, m: usize, n: usize) -> usize {
        self.counts[m][n]
    }

    /// Row `n` (horizontal direction) as a simplicial set.
    pub fn row(&self, n: usize) -> TruncatedSimplicialSet {
        let d = self.dim;
        TruncatedSimplicialSet {
            dim: d,
            counts: (0..=d).map(|m| self.counts[m][n]).collect(),
            faces: (0..=d).map(|m| self.h_faces[m][n].clone()).collect(),
            degens: (0..=d).map(|m| self.h_degens[m][n].clone()).collect(),
            labels: None,
        }
    }

    /// Column `m` (vertical direction) as a simplicial set.
    pub fn column(&self, m: usize) -> TruncatedSimplicialSet {
        TruncatedSimplicialSet {
            dim: self.dim,
            counts: self.counts[m].clone(),
            faces: self.v_faces[m].clone(),
            degens: self.v_degens[m].clone(),
            labels: None,
        }
    }

    /// Rows and columns are simplicial and the two directions commute.
    pub fn validate(&self) -> Vec<IdentityViolation> {
        let d = self.dim;
        let mut out = Vec::new();
        for k in 0..=d {
            out.extend(self.row(k).validate());
            out.extend(self.column(k).validate());
        }
        for m in 0..=d {
            for n in 0..=d {
                for x in 0..self.counts[m][n] {
                    let mut bad = |what: String| {
                        out.push(IdentityViolation { identity: what, degree: m + n, simplex: x })
                    };
                    for i in 0..=m {
                        for j in 0..=n {
                            if m > 0 && n > 0 {
                                let a = self.v_faces[m - 1][n][j][self.h_faces[m][n][i][x]];
                                let b = self.h_faces[m][n - 1][i][self.v_faces[m][n][j][x]];
                                if a != b {
                                    bad(format!("dh{i} dv{j} commute"));
                                }
                            }
                            if m < d && n < d {
                                let a = self.v_degens[m + 1][n][j][self.h_degens[m][n][i][x]];
                                let b = self.h_degens[m][n + 1][i][self.v_degens[m][n][j][x]];
                                if a != b {
                                    bad(format!("sh{i} sv{j} commute"));
                                }
                            }
                            if m > 0 && n < d {
                                let a = self.v_degens[m - 1][n][j][self.h_faces[m][n][i][x]];
                                let b = self.h_faces[m][n + 1][i][self.v_degens[m][n][j][x]];
                                if a != b {
                                    bad(format!("dh{i} sv{j} commute"));
                                }
                            }
                            if n > 0 && m < d {
                                let a = self.h_degens[m][n - 1][i][self.v_faces[m][n][j][x]];
                                let b = self.v_faces[m + 1][n][j][self.h_degens[m][n][i][x]];
                                if a != b {
                                    bad(format!("dv{j} sh{i} commute"));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `n`-simplices are the `(n, n)` bisimplices; `d_i = dh_i dv_i` and
    /// `s_i = sh_i sv_i`.
    pub fn diagonal(&self) -> TruncatedSimplicialSet {
        let d = self.dim;
        let counts = (0..=d).map(|n| self.counts[n][n]).collect();
        let mut faces = vec![Vec::new(); d + 1];
        let mut degens = vec![Vec::new(); d + 1];
        for n in 0..=d {
            if n > 0 {
                for i in 0..=n {
                    faces[n].push(
                        (0..self.counts[n][n])
                            .map(|x| self.h_faces[n][n - 1][i][self.v_faces[n][n][i][x]])
                            .collect(),
                    );
                }
            }
            if n < d {
                for i in 0..=n {
                    degens[n].push(
                        (0..self.counts[n][n])
                            .map(|x| self.h_degens[n][n + 1][i][self.v_degens[n][n][i][x]])
                            .collect(),
                    );
                }
            }
        }
        TruncatedSimplicialSet { dim: d, counts, faces, degens, labels: None }
    }
}

/// The comparison of a category with its opposite through the bisimplicial
/// set of strings `b_m → … → b_0 → a_0 → … → a_n`.
#[derive(Clone, Debug)]
pub struct Interchange {
    pub bisimplicial: BisimplicialSet,
    pub diagonal: Arc<TruncatedSimplicialSet>,
    /// Onto the nerve of the opposite category: keeps `b_0 ← … ← b_n`.
    pub phi: SimplicialMap,
    /// Onto the nerve of the category: keeps `a_0 → … → a_n`.
    pub psi: SimplicialMap,
}

pub fn interchange_comparison(c: &FiniteCategory, dim: usize) -> Interchange {
    let total = nerve_strings(c, 2 * dim + 1);
    let keys: Vec<Vec<Vec<NerveKey>>> =
        (0..=dim).map(|m| (0..=dim).map(|n| total[m + n + 1].clone()).collect()).collect();
    // a bisimplex of bidegree (m, n) is a nerve simplex of degree m + n + 1
    // whose vertex m - i is b_i and vertex m + 1 + j is a_j
    let b = BisimplicialSet::from_keys(
        dim,
        &keys,
        |m, n, i, k| nerve_face(c, m + n + 1, m - i, k),
        |m, n, j, k| nerve_face(c, m + n + 1, m + 1 + j, k),
        |m, _, i, k| nerve_degeneracy(c, m - i, k),
        |m, _, j, k| nerve_degeneracy(c, m + 1 + j, k),
    )
    .expect("string tables are closed");
    let diagonal = Arc::new(b.diagonal());
    let op = c.opposite();
    let n_op = nerve(&op, dim);
    let n_c = nerve(c, dim);
    let mut phi = Vec::with_capacity(dim + 1);
    let mut psi = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let (mut prow, mut qrow) = (Vec::new(), Vec::new());
        for (x0, fs) in &keys[n][n] {
            // vertices x0..x_{2n+1}; b_k = x_{n-k}, a_k = x_{n+1+k}
            let b_part: Vec<MorIx> = fs[..n].iter().rev().copied().collect();
            let b0 = if n == 0 { *x0 } else { c.target(fs[n - 1]) };
            prow.push(n_op.find(n, &(b0, b_part)).expect("opposite string"));
            let a_part: Vec<MorIx> = fs[n + 1..].to_vec();
            qrow.push(n_c.find(n, &(c.target(fs[n]), a_part)).expect("string"));
        }
        phi.push(prow);
        psi.push(qrow);
    }
    let phi = SimplicialMap { dom: diagonal.clone(), cod: Arc::new(n_op.sset), maps: phi };
    let psi = SimplicialMap { dom: diagonal.clone(), cod: Arc::new(n_c.sset), maps: psi };
    Interchange { bisimplicial: b, diagonal, phi, psi }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nerve_counts() {
        let pt = nerve(&FiniteCategory::terminal(), 4);
        assert!(pt.sset.counts().iter().all(|&c| c == 1));
        assert!(pt.sset.validate().is_empty());
        let z2 = nerve(&FiniteCategory::cyclic_group(2), 4);
        assert_eq!(z2.sset.counts(), &[1, 2, 4, 8, 16]);
        assert!(z2.sset.validate().is_empty());
        let ch = nerve(&FiniteCategory::chain(2), 3);
        let nd: Vec<usize> = (0..=3).map(|n| ch.sset.nondegenerate(n).len()).collect();
        assert_eq!(nd, vec![2, 1, 0, 0]);
    }

    #[test]
    fn broken_face_is_reported() {
        let mut s = nerve(&FiniteCategory::chain(3), 3).sset;
        s.faces[2][1].swap(0, 1);
        assert!(!s.validate().is_empty());
    }

    #[test]
    fn diagonal_of_constant_direction() {
        let s = nerve(&FiniteCategory::cyclic_group(3), 3).sset;
        let b = BisimplicialSet::horizontal(&s);
        assert!(b.validate().is_empty());
        let mut d = b.diagonal();
        d.labels = s.labels.clone();
        assert_eq!(d, s);
    }

    #[test]
    fn interchange_shapes() {
        let z2 = FiniteCategory::cyclic_group(2);
        let x = interchange_comparison(&z2, 3);
        assert!(x.bisimplicial.validate().is_empty());
        assert!(x.diagonal.validate().is_empty());
        let counts: Vec<usize> = (0..=3).map(|n| x.diagonal.count(n)).collect();
        assert_eq!(counts, vec![2, 8, 32, 128]);
        assert!(x.phi.validate().is_empty());
        assert!(x.psi.validate().is_empty());

        let pt = interchange_comparison(&FiniteCategory::terminal(), 3);
        assert!(pt.phi.is_isomorphism() && pt.psi.is_isomorphism());
    }

    #[test]
    fn subsets_and_maps() {
        let s = Arc::new(nerve(&FiniteCategory::cyclic_group(2), 3).sset);
        let inc = s.generated_subset(&[(0, 0)]).unwrap();
        assert!(inc.validate().is_empty());
        assert!(inc.dom.counts().iter().all(|&c| c == 1));
        let all = s.generated_subset(&[(1, 1)]).unwrap();
        assert_eq!(&all.dom.counts()[..3], &[1, 2, 3]);
        assert!(all.validate().is_empty());
        let id = SimplicialMap::identity(s.clone());
        assert!(id.then(&id).unwrap().is_isomorphism());
        assert_eq!(s.components().0, 1);
    }
}
