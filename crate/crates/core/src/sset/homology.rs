use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::snf::{elementary_divisors, SparseMatrix};
use super::{nerve_map, SimplicialMap, TruncatedSimplicialSet};
use crate::error::{input_err, Result};
use crate::fincat::{groups_isomorphic, Functor};

/// A finitely generated abelian group `Z^r ⊕ Z/t1 ⊕ … ⊕ Z/tk` with
/// `1 < t1 | t2 | … | tk`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    /// From invariant factors in any order; `0` is a copy of `Z`, `1` is
    /// dropped. The torsion part is normalised to a divisibility chain.
    pub fn from_factors<T: Into<BigUint> + Clone>(factors: &[T]) -> Self {
        let mut free_rank = 0;
        let mut cyclic = Vec::new();
        for f in factors {
            let f: BigUint = f.clone().into();
            if f.is_zero() {
                free_rank += 1;
            } else if !f.is_one() {
                cyclic.push(f);
            }
        }
        FgAbelianGroup { free_rank, torsion: normalize_torsion(cyclic) }
    }

    /// The cokernel of a map `Z^cols → Z^rows` with the given nonzero
    /// elementary divisors.
    pub fn cokernel(rows: usize, divisors: &[BigUint]) -> Self {
        let mut g = Self::from_factors(divisors);
        g.free_rank = rows - divisors.len();
        g
    }

    /// Invariant factors in divisibility order, infinite cyclic factors
    /// (written `0`) last.
    pub fn invariant_factors(&self) -> Vec<BigUint> {
        let mut out = self.torsion.clone();
        out.extend(core::iter::repeat_n(BigUint::zero(), self.free_rank));
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<BigUint> {
        (self.free_rank == 0).then(|| self.torsion.iter().fold(BigUint::one(), |a, b| a * b))
    }

    /// Number of elements killed by `k`; `None` if infinite (only when
    /// `k = 0` and the group has a free part).
    pub fn k_torsion_count(&self, k: u64) -> Option<BigUint> {
        if k == 0 {
            return self.order();
        }
        let k = BigUint::from(k);
        Some(self.torsion.iter().fold(BigUint::one(), |a, t| a * num_integer::Integer::gcd(t, &k)))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        FgAbelianGroup { free_rank: self.free_rank + other.free_rank, torsion: normalize_torsion(t) }
    }
}

/// Rewrites cyclic orders as an invariant-factor chain by splitting into
/// prime powers and regrouping.
fn normalize_torsion(cyclic: Vec<BigUint>) -> Vec<BigUint> {
    let mut by_prime: BTreeMap<BigUint, Vec<BigUint>> = BTreeMap::new();
    for c in cyclic {
        for (p, pk) in prime_power_parts(c) {
            by_prime.entry(p).or_default().push(pk);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = alloc::vec![BigUint::one(); len];
    for mut powers in by_prime.into_values() {
        powers.sort();
        let offset = len - powers.len();
        for (i, q) in powers.into_iter().enumerate() {
            out[offset + i] *= q;
        }
    }
    out
}

fn prime_power_parts(mut n: BigUint) -> Vec<(BigUint, BigUint)> {
    let mut out = Vec::new();
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut pk = BigUint::one();
            while (&n % &p).is_zero() {
                n /= &p;
                pk *= &p;
            }
            out.push((p.clone(), pk));
        }
        p += 1u32;
    }
    if !n.is_one() {
        out.push((n.clone(), n));
    }
    out
}

impl core::fmt::Display for FgAbelianGroup {
    fn fmt(&self, out: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_trivial() {
            return write!(out, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        write!(out, "{}", parts.join(" ⊕ "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    /// `groups[i] = H_i` for `i` up to the requested degree.
    pub groups: Vec<FgAbelianGroup>,
    pub components: usize,
}

fn chain_homology(s: &TruncatedSimplicialSet, top: usize, normalized: bool) -> Result<HomologyResult> {
    if top + 1 > s.dim() {
        return Err(input_err!(
            "homology through degree {top} needs truncation at least {}, have {}",
            top + 1,
            s.dim()
        ));
    }
    let flags = s.degenerate_flags();
    let basis: Vec<Vec<usize>> = (0..=top + 1)
        .map(|n| (0..s.count(n)).filter(|&x| !normalized || !flags[n][x]).collect())
        .collect();
    let position: Vec<BTreeMap<usize, usize>> =
        basis.iter().map(|b| b.iter().enumerate().map(|(p, &x)| (x, p)).collect()).collect();
    // divisors[n]: elementary divisors of ∂_n: C_n → C_{n-1}, n ≥ 1
    let mut divisors: Vec<Vec<BigUint>> = alloc::vec![Vec::new()];
    for n in 1..=top + 1 {
        // one row per n-simplex, i.e. the transpose of ∂_n
        let mut m = SparseMatrix::new(basis[n].len(), basis[n - 1].len());
        for (r, &x) in basis[n].iter().enumerate() {
            for i in 0..=n {
                let y = s.face(n, i, x);
                if let Some(&c) = position[n - 1].get(&y) {
                    m.add(r, c, if i % 2 == 0 { 1 } else { -1 });
                }
            }
        }
        divisors.push(elementary_divisors(&m));
    }
    let groups = (0..=top)
        .map(|n| {
            let rank_n = divisors[n].len();
            let rank_next = divisors[n + 1].len();
            let mut g = FgAbelianGroup::from_factors(&divisors[n + 1]);
            g.free_rank = basis[n].len() - rank_n - rank_next;
            g
        })
        .collect();
    Ok(HomologyResult { groups, components: s.components().0 })
}

/// Integer homology through degree `top` from normalized chains.
pub fn homology(s: &TruncatedSimplicialSet, top: usize) -> Result<HomologyResult> {
    chain_homology(s, top, true)
}

/// Same as [`homology`], from the full chain complex.
pub fn homology_unnormalized(s: &TruncatedSimplicialSet, top: usize) -> Result<HomologyResult> {
    chain_homology(s, top, false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidEvidence {
    pub equivalence: bool,
    /// Automorphism groups agree on a representative of every component.
    pub automorphisms_match: bool,
}

/// Necessary conditions for a weak equivalence, compared as abstract
/// isomorphism types. For maps of groupoid nerves the groupoid part makes
/// them sufficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeEvidence {
    pub pi0_bijective: bool,
    pub components: (usize, usize),
    pub homology: Vec<(FgAbelianGroup, FgAbelianGroup)>,
    pub groupoid: Option<GroupoidEvidence>,
}

impl WeEvidence {
    pub fn homology_matches(&self) -> bool {
        self.homology.iter().all(|(a, b)| a == b)
    }

    pub fn pass(&self) -> bool {
        self.pi0_bijective
            && self.homology_matches()
            && self.groupoid.as_ref().is_none_or(|g| g.equivalence && g.automorphisms_match)
    }

    /// First failing check, for reports.
    pub fn failure(&self) -> Option<String> {
        if !self.pi0_bijective {
            return Some(format!(
                "π0 not bijective ({} vs {} components)",
                self.components.0, self.components.1
            ));
        }
        if let Some((i, (a, b))) = self.homology.iter().enumerate().find(|(_, (a, b))| a != b) {
            return Some(format!("H{i}: {a} vs {b}"));
        }
        match &self.groupoid {
            Some(g) if !g.equivalence => Some("functor is not an equivalence".into()),
            Some(g) if !g.automorphisms_match => Some("automorphism groups differ".into()),
            _ => None,
        }
    }
}

pub fn we_evidence(f: &SimplicialMap, top: usize) -> Result<WeEvidence> {
    if f.dom.dim() != f.cod.dim() {
        return Err(input_err!("truncations differ"));
    }
    let (ca, la) = f.dom.components();
    let (cb, lb) = f.cod.components();
    // induced map on components
    let mut image = alloc::vec![usize::MAX; ca];
    let mut well_defined = true;
    for (v, &comp) in la.iter().enumerate() {
        let target = lb[f.apply(0, v)];
        if image[comp] == usize::MAX {
            image[comp] = target;
        } else {
            well_defined &= image[comp] == target;
        }
    }
    let mut hit = alloc::vec![false; cb];
    let mut injective = true;
    for &t in &image {
        injective &= !core::mem::replace(&mut hit[t], true);
    }
    let pi0_bijective = well_defined && injective && hit.iter().all(|&h| h);
    let ha = homology(&f.dom, top)?;
    let hb = homology(&f.cod, top)?;
    Ok(WeEvidence {
        pi0_bijective,
        components: (ca, cb),
        homology: ha.groups.into_iter().zip(hb.groups).collect(),
        groupoid: None,
    })
}

/// Evidence for a functor of groupoids: the nerve map's evidence plus the
/// exact equivalence and automorphism-group checks.
pub fn we_evidence_groupoids(f: &Functor, top: usize) -> Result<WeEvidence> {
    if !f.dom().is_groupoid() || !f.cod().is_groupoid() {
        return Err(input_err!("both categories must be groupoids"));
    }
    let mut ev = we_evidence(&nerve_map(f, top + 1), top)?;
    let comps = crate::fincat::pi0(f.dom());
    let automorphisms_match = comps
        .classes
        .iter()
        .all(|class| groups_isomorphic(f.dom(), class[0], f.cod(), f.obj(class[0])));
    ev.groupoid = Some(GroupoidEvidence { equivalence: f.is_equivalence(), automorphisms_match });
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::super::nerve;
    use super::*;
    use crate::fincat::FiniteCategory;
    use alloc::string::ToString;
    use alloc::sync::Arc;

    fn factors(h: &HomologyResult) -> Vec<String> {
        h.groups.iter().map(|g| g.to_string()).collect()
    }

    #[test]
    fn nerve_homology() {
        let pt = nerve(&FiniteCategory::terminal(), 4).sset;
        assert_eq!(factors(&homology(&pt, 3).unwrap()), ["Z", "0", "0", "0"]);
        let z2 = nerve(&FiniteCategory::cyclic_group(2), 5).sset;
        assert_eq!(factors(&homology(&z2, 3).unwrap()), ["Z", "Z/2", "0", "Z/2"]);
        let e2 = nerve(&FiniteCategory::codiscrete(2), 4).sset;
        assert_eq!(factors(&homology(&e2, 3).unwrap()), ["Z", "0", "0", "0"]);
        assert!(homology(&e2, 4).is_err());
    }

    #[test]
    fn normalized_matches_unnormalized() {
        let z2 = nerve(&FiniteCategory::cyclic_group(2), 3).sset;
        assert_eq!(homology(&z2, 2).unwrap(), homology_unnormalized(&z2, 2).unwrap());
    }

    #[test]
    fn group_normal_form() {
        let g = FgAbelianGroup::from_factors(&[6u32, 2, 0, 1]);
        assert_eq!(g.to_string(), "Z ⊕ Z/2 ⊕ Z/6");
        assert_eq!(g.invariant_factors().len(), 3);
        let h = FgAbelianGroup::from_factors(&[2u32, 3]);
        assert_eq!(h.to_string(), "Z/6");
        assert_eq!(h.k_torsion_count(2), Some(BigUint::from(2u32)));
        assert_eq!(FgAbelianGroup::trivial().to_string(), "0");
    }

    #[test]
    fn evidence_examples() {
        let e2 = Arc::new(FiniteCategory::codiscrete(2));
        let pt = Arc::new(FiniteCategory::terminal());
        let f = Functor::to_terminal(e2, pt.clone()).unwrap();
        assert!(we_evidence_groupoids(&f, 3).unwrap().pass());
        let z2 = Arc::new(FiniteCategory::cyclic_group(2));
        let g = Functor::to_terminal(z2, pt).unwrap();
        let ev = we_evidence(&nerve_map(&g, 4), 3).unwrap();
        assert!(!ev.pass());
        assert_eq!(ev.failure().unwrap(), "H1: Z/2 vs 0");
        let s = Arc::new(nerve(&FiniteCategory::chain(3), 3).sset);
        assert!(we_evidence(&SimplicialMap::identity(s), 2).unwrap().pass());
    }
}
