//! Cochain complexes of finite categories with finitely generated abelian
//! coefficients, and the cohomology built from them.

mod lattice;
mod stack;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{input_err, invalid, Error, Result};
use crate::fincat::{FiniteCategory, Functor, MorIx, ObjIx, Variance};
use crate::site::Presheaf;
use crate::sset::{elementary_divisors, FgAbelianGroup, IntegerMatrix, SparseMatrix};
use lattice::{column, kernel, mat_vec, Lattice};

pub use stack::{
    cech_cohomology, cech_nerve_category, invariance_report, stack_cohomology, InvarianceReport,
};

/// Most composable strings enumerated in one degree.
pub const STRING_CAP: usize = 200_000;

/// Default top degree.
pub const DEFAULT_TOP: usize = 4;

/// A contravariant functor from a finite category to finitely generated
/// abelian groups. `F(x)` is `Z^{g_x}` modulo the columns of `relations[x]`;
/// for `f: x → y`, `restriction[f]` is the `g_x × g_y` matrix of
/// `F(f): F(y) → F(x)` on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianPresheaf {
    base: Arc<FiniteCategory>,
    generators: Vec<usize>,
    relations: Vec<IntegerMatrix>,
    restriction: Vec<IntegerMatrix>,
}

impl AbelianPresheaf {
    /// Shape checks only; see [`AbelianPresheaf::validate`].
    pub fn new(
        base: Arc<FiniteCategory>,
        relations: Vec<IntegerMatrix>,
        restriction: Vec<IntegerMatrix>,
    ) -> Result<Self> {
        if relations.len() != base.num_objects() || restriction.len() != base.num_morphisms() {
            return Err(input_err!("need one presentation per object and one matrix per morphism"));
        }
        let generators: Vec<usize> = relations.iter().map(IntegerMatrix::rows).collect();
        for f in base.morphism_ids() {
            let (x, y) = (base.source(f), base.target(f));
            let m = &restriction[f];
            if m.rows() != generators[x] || m.cols() != generators[y] {
                return Err(input_err!(
                    "matrix of {} is {}x{}, expected {}x{}",
                    base.morphism_name(f),
                    m.rows(),
                    m.cols(),
                    generators[x],
                    generators[y]
                ));
            }
        }
        Ok(AbelianPresheaf { base, generators, relations, restriction })
    }

    /// The constant presheaf with value `group`.
    pub fn constant(base: Arc<FiniteCategory>, group: &FgAbelianGroup) -> Self {
        let g = group.free_rank + group.torsion.len();
        let mut rel = IntegerMatrix::zeros(g, group.torsion.len());
        for (j, t) in group.torsion.iter().enumerate() {
            rel.set(j, j, BigInt::from(t.clone()));
        }
        let relations = vec![rel; base.num_objects()];
        let restriction = vec![IntegerMatrix::identity(g); base.num_morphisms()];
        let generators = vec![g; base.num_objects()];
        AbelianPresheaf { base, generators, relations, restriction }
    }

    pub fn zero(base: Arc<FiniteCategory>) -> Self {
        Self::constant(base, &FgAbelianGroup::trivial())
    }

    /// Free abelian group on the elements of a set-valued presheaf.
    pub fn free_on(f: &Presheaf) -> Result<Self> {
        if f.variance() != Variance::Contravariant {
            return Err(input_err!("expected a presheaf"));
        }
        let base = f.base().clone();
        let relations = f.sizes().iter().map(|&k| IntegerMatrix::zeros(k, 0)).collect();
        let restriction = base
            .morphism_ids()
            .map(|h| {
                let (x, y) = (base.source(h), base.target(h));
                let mut m = IntegerMatrix::zeros(f.size(x), f.size(y));
                for e in 0..f.size(y) {
                    m.set(f.apply(h, e), e, BigInt::one());
                }
                m
            })
            .collect();
        Self::new(base, relations, restriction)
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn generators(&self, x: ObjIx) -> usize {
        self.generators[x]
    }

    pub fn relations(&self, x: ObjIx) -> &IntegerMatrix {
        &self.relations[x]
    }

    pub fn restriction(&self, f: MorIx) -> &IntegerMatrix {
        &self.restriction[f]
    }

    /// No relations anywhere.
    pub fn is_free(&self) -> bool {
        self.relations.iter().all(IntegerMatrix::is_zero)
    }

    /// `F(x)` up to isomorphism.
    pub fn value(&self, x: ObjIx) -> FgAbelianGroup {
        let lat = Lattice::span(&self.relations[x]);
        let divisors: Vec<BigUint> =
            lat.quotient_orders()[..lat.rank()].iter().map(|d| d.magnitude().clone()).collect();
        FgAbelianGroup::cokernel(self.generators[x], &divisors)
    }

    /// Relations preserved by every restriction; identities and composites
    /// act correctly modulo relations.
    pub fn validate(&self) -> Vec<String> {
        let c = &self.base;
        let lattices: Vec<Lattice> = self.relations.iter().map(Lattice::span).collect();
        let mut out = Vec::new();
        for f in c.morphism_ids() {
            let (x, y) = (c.source(f), c.target(f));
            let m = &self.restriction[f];
            let images = m.mul(&self.relations[y]);
            if (0..images.cols()).any(|j| !lattices[x].contains(&column(&images, j))) {
                out.push(format!("{} does not preserve relations", c.morphism_name(f)));
            }
            if c.is_identity(f) {
                let diff_ok = (0..m.cols()).all(|j| {
                    let mut col = column(m, j);
                    col[j] -= 1;
                    lattices[x].contains(&col)
                });
                if !diff_ok {
                    out.push(format!("identity {} acts nontrivially", c.morphism_name(f)));
                }
            }
            // F(g ∘ f) = F(f) ∘ F(g)
            for g in c.out_of(y) {
                let gf = c.compose(g, f);
                let two = m.mul(&self.restriction[g]);
                let one = &self.restriction[gf];
                let ok = (0..one.cols()).all(|j| {
                    let d: Vec<BigInt> = column(one, j).iter().zip(column(&two, j)).map(|(a, b)| a - b).collect();
                    lattices[x].contains(&d)
                });
                if !ok {
                    out.push(format!(
                        "{} does not act as {} then {}",
                        c.morphism_name(gf),
                        c.morphism_name(g),
                        c.morphism_name(f)
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

    /// `F ∘ φ` for a functor `φ` into the base.
    pub fn restrict_along(&self, phi: &Functor) -> Result<Self> {
        if **phi.cod() != *self.base {
            return Err(input_err!("functor does not land in {}", self.base.name()));
        }
        let d = phi.dom().clone();
        let relations = d.objects().map(|x| self.relations[phi.obj(x)].clone()).collect();
        let restriction = d.morphism_ids().map(|f| self.restriction[phi.mor(f)].clone()).collect();
        Self::new(d, relations, restriction)
    }

    /// New generators `q[x] · old`; `q_inv[x]` must invert `q[x]`.
    pub fn change_basis(&self, q: &[IntegerMatrix], q_inv: &[IntegerMatrix]) -> Result<Self> {
        let c = &self.base;
        for x in c.objects() {
            let g = self.generators[x];
            if q[x].rows() != g || q[x].cols() != g || q[x].mul(&q_inv[x]) != IntegerMatrix::identity(g) {
                return Err(input_err!("basis change at {} is not invertible", c.object_name(x)));
            }
        }
        let relations = c.objects().map(|x| q[x].mul(&self.relations[x])).collect();
        let restriction = c
            .morphism_ids()
            .map(|f| q[c.source(f)].mul(&self.restriction[f]).mul(&q_inv[c.target(f)]))
            .collect();
        Self::new(c.clone(), relations, restriction)
    }

    /// The underlying presheaf of sets, when every value is finite and the
    /// total number of elements is at most `cap`. Elements are listed in
    /// Smith coordinates.
    pub fn elements(&self, cap: usize) -> Result<Presheaf> {
        let c = &self.base;
        let lattices: Vec<Lattice> = self.relations.iter().map(Lattice::span).collect();
        let mut elements: Vec<Vec<Vec<BigInt>>> = Vec::new();
        let mut total = 0usize;
        for x in c.objects() {
            let orders = lattices[x].quotient_orders();
            if orders.iter().any(Zero::is_zero) {
                return Err(input_err!("value at {} is infinite", c.object_name(x)));
            }
            let mut list: Vec<Vec<BigInt>> = vec![Vec::new()];
            for d in &orders {
                let d = d.to_usize().ok_or_else(|| Error::CapExceeded(String::from("group too large")))?;
                let mut next = Vec::with_capacity(list.len() * d);
                for w in &list {
                    for k in 0..d {
                        let mut w2 = w.clone();
                        w2.push(BigInt::from(k));
                        next.push(w2);
                    }
                }
                list = next;
                if total + list.len() > cap {
                    return Err(Error::CapExceeded(format!("more than {cap} elements")));
                }
            }
            total += list.len();
            elements.push(list);
        }
        let index: Vec<BTreeMap<Vec<BigInt>, usize>> =
            elements.iter().map(|l| l.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect()).collect();
        let action = c
            .morphism_ids()
            .map(|f| {
                let (x, y) = (c.source(f), c.target(f));
                elements[y]
                    .iter()
                    .map(|w| {
                        let v = lattices[y].lift(w);
                        let image = mat_vec(&self.restriction[f], &v);
                        index[x][&lattices[x].reduce(&image)]
                    })
                    .collect()
            })
            .collect();
        let sizes = elements.iter().map(Vec::len).collect();
        Ok(Presheaf::new(c.clone(), Variance::Contravariant, sizes, action))
    }
}

/// Cochain groups `C^n = Z^{ranks[n]} / (columns of relations[n])` for
/// `n = 0..=top+1`, with differentials lifted to generators.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub ranks: Vec<usize>,
    /// `relations[n]` has one row per relation, giving its coordinates.
    pub relations: Vec<SparseMatrix>,
    /// `differentials[n]: C^n → C^{n+1}`, one row per generator of
    /// `C^{n+1}`.
    pub differentials: Vec<SparseMatrix>,
}

impl CochainComplex {
    /// A complex of free groups.
    pub fn free(ranks: Vec<usize>, differentials: Vec<SparseMatrix>) -> Result<Self> {
        let relations = ranks.iter().map(|&r| SparseMatrix::new(0, r)).collect();
        let c = CochainComplex { ranks, relations, differentials };
        c.check_shapes()?;
        Ok(c)
    }

    fn check_shapes(&self) -> Result<()> {
        let ok = !self.ranks.is_empty()
            && self.differentials.len() + 1 == self.ranks.len()
            && self.relations.len() == self.ranks.len()
            && self.differentials.iter().enumerate().all(|(n, d)| d.rows == self.ranks[n + 1] && d.cols == self.ranks[n])
            && self.relations.iter().enumerate().all(|(n, r)| r.cols == self.ranks[n]);
        if ok {
            Ok(())
        } else {
            Err(input_err!("cochain complex shapes do not match"))
        }
    }

    /// Highest degree whose cohomology the complex determines.
    pub fn top(&self) -> usize {
        self.ranks.len() - 2
    }

    pub fn is_free(&self) -> bool {
        self.relations.iter().all(|r| r.entries.iter().all(|row| row.iter().all(|&(_, v)| v == 0)))
    }

    fn relation_lattice(&self, n: usize) -> Lattice {
        Lattice::span(&self.relations[n].to_dense().transpose())
    }

    /// `d ∘ d = 0`, modulo relations.
    pub fn check_square_zero(&self) -> Result<()> {
        for n in 0..self.differentials.len().saturating_sub(1) {
            let (first, second) = (&self.differentials[n], &self.differentials[n + 1]);
            let mut product: BTreeMap<(usize, usize), i128> = BTreeMap::new();
            for (i, row) in second.entries.iter().enumerate() {
                for &(k, a) in row {
                    for &(j, b) in &first.entries[k] {
                        *product.entry((i, j)).or_insert(0) += a as i128 * b as i128;
                    }
                }
            }
            product.retain(|_, v| *v != 0);
            if product.is_empty() {
                continue;
            }
            let lat = self.relation_lattice(n + 2);
            let mut columns: BTreeMap<usize, Vec<BigInt>> = BTreeMap::new();
            for ((i, j), v) in product {
                columns.entry(j).or_insert_with(|| vec![BigInt::zero(); self.ranks[n + 2]])[i] = BigInt::from(v);
            }
            if let Some((j, _)) = columns.iter().find(|(_, col)| !lat.contains(col)) {
                return Err(invalid!("d∘d is nonzero in degree {n} on generator {j}"));
            }
        }
        Ok(())
    }
}

/// `H^0, …, H^top` of a cochain complex.
pub fn cohomology_of_complex(c: &CochainComplex) -> Result<Vec<FgAbelianGroup>> {
    c.check_shapes()?;
    if c.is_free() {
        return Ok(free_cohomology(c));
    }
    (0..=c.top()).map(|n| general_cohomology(c, n)).collect()
}

fn free_cohomology(c: &CochainComplex) -> Vec<FgAbelianGroup> {
    let divisors: Vec<Vec<BigUint>> = c.differentials.iter().map(elementary_divisors).collect();
    (0..=c.top())
        .map(|n| {
            let into = if n == 0 { &[][..] } else { &divisors[n - 1][..] };
            let mut g = FgAbelianGroup::from_factors(into);
            g.free_rank = c.ranks[n] - divisors[n].len() - into.len();
            g
        })
        .collect()
}

fn general_cohomology(c: &CochainComplex, n: usize) -> Result<FgAbelianGroup> {
    let g = c.ranks[n];
    // cocycles: v with d v ∈ relations of C^{n+1}
    let d = c.differentials[n].to_dense();
    let rel_next = c.relations[n + 1].to_dense().transpose();
    let mut stacked = IntegerMatrix::zeros(d.rows(), g + rel_next.cols());
    for i in 0..d.rows() {
        for j in 0..g {
            stacked.set(i, j, d.get(i, j).clone());
        }
        for j in 0..rel_next.cols() {
            stacked.set(i, g + j, -rel_next.get(i, j));
        }
    }
    let k = kernel(&stacked);
    let mut cocycle_gens = IntegerMatrix::zeros(g, k.cols());
    for i in 0..g {
        for j in 0..k.cols() {
            cocycle_gens.set(i, j, k.get(i, j).clone());
        }
    }
    let cocycles = Lattice::span(&cocycle_gens);
    // coboundaries plus relations, in cocycle coordinates
    let mut sub: Vec<Vec<BigInt>> = Vec::new();
    if n > 0 {
        let prev = c.differentials[n - 1].to_dense();
        sub.extend((0..prev.cols()).map(|j| column(&prev, j)));
    }
    let rel = c.relations[n].to_dense().transpose();
    sub.extend((0..rel.cols()).map(|j| column(&rel, j)));
    let r = cocycles.rank();
    let mut coords = IntegerMatrix::zeros(r, sub.len());
    for (j, v) in sub.iter().enumerate() {
        let x = cocycles.coordinates(v).ok_or_else(|| invalid!("coboundary in degree {n} is not a cocycle"))?;
        for (i, e) in x.into_iter().enumerate() {
            coords.set(i, j, e);
        }
    }
    let q = Lattice::span(&coords);
    let divisors: Vec<BigUint> = q.quotient_orders()[..q.rank()].iter().map(|d| d.magnitude().clone()).collect();
    Ok(FgAbelianGroup::cokernel(r, &divisors))
}

/// A composable string `x0 -f1-> x1 -> … -fn-> xn`.
pub type CategoryString = (ObjIx, Vec<MorIx>);

/// Composable strings of length `0..=top`; with `normalized`, only those
/// without identity arrows.
pub fn composable_strings(c: &FiniteCategory, top: usize, normalized: bool) -> Result<Vec<Vec<CategoryString>>> {
    let mut out: Vec<Vec<CategoryString>> = vec![c.objects().map(|x| (x, Vec::new())).collect()];
    for n in 1..=top {
        let mut level = Vec::new();
        for (x0, fs) in &out[n - 1] {
            let last = fs.last().map_or(*x0, |&f| c.target(f));
            for f in c.out_of(last) {
                if normalized && c.is_identity(f) {
                    continue;
                }
                let mut next = fs.clone();
                next.push(f);
                level.push((*x0, next));
                if level.len() > STRING_CAP {
                    return Err(Error::CapExceeded(format!("more than {STRING_CAP} strings in degree {n}")));
                }
            }
        }
        out.push(level);
    }
    Ok(out)
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::CapExceeded(String::from("coefficient matrix entry exceeds 64 bits")))
}

/// The cosimplicial cochain complex of `F` through degree `top + 1`:
/// `C^n = ∏ F(x0)` over strings `x0 → … → xn`, with
/// `(dφ)(x0 → … → x_{n+1}) = F(x0 → x1) φ(x1 → …) + Σ_{i ≥ 1} (−1)^i φ(d_i)`.
/// Normalized cochains unless `normalized` is false.
pub fn cochain_complex(f: &AbelianPresheaf, top: usize, normalized: bool) -> Result<CochainComplex> {
    let c = &*f.base;
    let strings = composable_strings(c, top + 1, normalized)?;
    let index: Vec<BTreeMap<&CategoryString, usize>> =
        strings.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s, i)).collect()).collect();
    let offsets: Vec<Vec<usize>> = strings
        .iter()
        .map(|l| {
            let mut acc = 0;
            l.iter()
                .map(|(x0, _)| {
                    let o = acc;
                    acc += f.generators[*x0];
                    o
                })
                .collect()
        })
        .collect();
    let ranks: Vec<usize> = strings.iter().map(|l| l.iter().map(|(x0, _)| f.generators[*x0]).sum()).collect();

    let mut relations = Vec::with_capacity(strings.len());
    for (n, l) in strings.iter().enumerate() {
        let mut m = SparseMatrix::new(0, ranks[n]);
        for (s, (x0, _)) in l.iter().enumerate() {
            let r = &f.relations[*x0];
            for j in 0..r.cols() {
                let mut row = Vec::new();
                for i in 0..r.rows() {
                    let v = to_i64(r.get(i, j))?;
                    if v != 0 {
                        row.push((offsets[n][s] + i, v));
                    }
                }
                m.entries.push(row);
                m.rows += 1;
            }
        }
        relations.push(m);
    }

    let restrictions: Vec<Vec<(usize, usize, i64)>> = f
        .restriction
        .iter()
        .map(|m| {
            let mut out = Vec::new();
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let v = to_i64(m.get(i, j))?;
                    if v != 0 {
                        out.push((i, j, v));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut differentials = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let mut d = SparseMatrix::new(ranks[n + 1], ranks[n]);
        for (s, (x0, fs)) in strings[n + 1].iter().enumerate() {
            let row0 = offsets[n + 1][s];
            let g = f.generators[*x0];
            // d_0
            let tail: CategoryString = (c.target(fs[0]), fs[1..].to_vec());
            let t = index[n][&tail];
            for &(i, j, v) in &restrictions[fs[0]] {
                d.add(row0 + i, offsets[n][t] + j, v);
            }
            for i in 1..=n + 1 {
                let face: Vec<MorIx> = if i == n + 1 {
                    fs[..n].to_vec()
                } else {
                    let composite = c.compose(fs[i], fs[i - 1]);
                    if normalized && c.is_identity(composite) {
                        continue;
                    }
                    let mut v = fs[..i - 1].to_vec();
                    v.push(composite);
                    v.extend_from_slice(&fs[i + 1..]);
                    v
                };
                let t = index[n][&(*x0, face)];
                let sign = if i % 2 == 0 { 1 } else { -1 };
                for k in 0..g {
                    d.add(row0 + k, offsets[n][t] + k, sign);
                }
            }
        }
        differentials.push(d);
    }
    let out = CochainComplex { ranks, relations, differentials };
    out.check_square_zero()?;
    Ok(out)
}

/// `H^n(D; F)` for `n = 0..=top` from normalized cochains.
pub fn category_cohomology(f: &AbelianPresheaf, top: usize) -> Result<Vec<FgAbelianGroup>> {
    cohomology_of_complex(&cochain_complex(f, top, true)?)
}

/// The group of compatible families `(φ_x ∈ F(x))` with `F(f) φ_y = φ_x`
/// for every `f: x → y`, computed directly as a kernel.
pub fn global_sections(f: &AbelianPresheaf) -> Result<FgAbelianGroup> {
    let c = &*f.base;
    let offsets: Vec<usize> = c
        .objects()
        .scan(0, |acc, x| {
            let o = *acc;
            *acc += f.generators[x];
            Some(o)
        })
        .collect();
    let total: usize = f.generators.iter().sum();
    let mut constraints: Vec<Vec<BigInt>> = Vec::new();
    for h in c.morphism_ids().filter(|&h| !c.is_identity(h)) {
        let (x, y) = (c.source(h), c.target(h));
        let m = &f.restriction[h];
        for i in 0..f.generators[x] {
            let mut row = vec![BigInt::zero(); total];
            for j in 0..f.generators[y] {
                row[offsets[y] + j] += m.get(i, j);
            }
            row[offsets[x] + i] -= 1;
            constraints.push(row);
        }
    }
    // one-degree complex: C^0 = ⊕F(x), C^1 = ⊕ over arrows of F(source)
    let mut ranks = vec![total, constraints.len()];
    let mut d = SparseMatrix::new(constraints.len(), total);
    for (i, row) in constraints.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                d.add(i, j, to_i64(v)?);
            }
        }
    }
    let mut rel0 = SparseMatrix::new(0, total);
    for x in c.objects() {
        let r = &f.relations[x];
        for j in 0..r.cols() {
            rel0.entries.push((0..r.rows()).filter(|&i| !r.get(i, j).is_zero()).map(|i| Ok((offsets[x] + i, to_i64(r.get(i, j))?))).collect::<Result<_>>()?);
            rel0.rows += 1;
        }
    }
    let mut rel1 = SparseMatrix::new(0, constraints.len());
    let mut row = 0;
    for h in c.morphism_ids().filter(|&h| !c.is_identity(h)) {
        let x = c.source(h);
        let r = &f.relations[x];
        for j in 0..r.cols() {
            rel1.entries.push((0..r.rows()).filter(|&i| !r.get(i, j).is_zero()).map(|i| Ok((row + i, to_i64(r.get(i, j))?))).collect::<Result<_>>()?);
            rel1.rows += 1;
        }
        row += f.generators[x];
    }
    ranks.push(0);
    let complex = CochainComplex {
        ranks,
        relations: vec![rel0, rel1, SparseMatrix::new(0, 0)],
        differentials: vec![d, SparseMatrix::new(0, constraints.len())],
    };
    let all = if complex.is_free() { free_cohomology(&complex) } else { vec![general_cohomology(&complex, 0)?] };
    Ok(all[0].clone())
}

#[cfg(test)]
mod tests;
