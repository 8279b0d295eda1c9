//! Homotopy colimits of groupoid diagrams of simplicial sets and the
//! pullback functor back from simplicial sets over the nerve.

mod presheaf;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{input_err, invalid, Result};
use crate::fincat::{FiniteCategory, Groupoid, MorIx, ObjIx};
use crate::sset::{build_keyed, nerve, Keyed, NerveKey, SimplicialMap, TruncatedSimplicialSet};

pub use presheaf::{
    check_sectionwise, presheaf_counit, presheaf_hocolim, presheaf_pb, presheaf_unit_eta, EnrichedGroupoidDiagram,
    PresheafHocolim, PresheafOverNerve, PresheafPb, SectionwiseReport,
};

/// A functor from a groupoid to truncated simplicial sets.
#[derive(Clone, Debug)]
pub struct GroupoidDiagram {
    groupoid: Groupoid,
    values: Vec<Arc<TruncatedSimplicialSet>>,
    // action[g]: A_{source g} → A_{target g}
    action: Vec<SimplicialMap>,
}

impl GroupoidDiagram {
    pub fn new(groupoid: Groupoid, values: Vec<Arc<TruncatedSimplicialSet>>, action: Vec<SimplicialMap>) -> Result<Self> {
        let g = groupoid.category().clone();
        if values.len() != g.num_objects() || action.len() != g.num_morphisms() {
            return Err(input_err!("need one simplicial set per object and one map per morphism"));
        }
        let dim = values.first().map_or(0, |v| v.dim());
        if values.iter().any(|v| v.dim() != dim) {
            return Err(input_err!("values have different truncations"));
        }
        for f in g.morphism_ids() {
            if *action[f].dom != *values[g.source(f)] || *action[f].cod != *values[g.target(f)] {
                return Err(input_err!("action of {} has the wrong endpoints", g.morphism_name(f)));
            }
        }
        Ok(GroupoidDiagram { groupoid, values, action })
    }

    /// The same simplicial set everywhere with identity actions.
    pub fn constant(groupoid: Groupoid, value: Arc<TruncatedSimplicialSet>) -> Self {
        let g = groupoid.category().clone();
        let values = vec![value.clone(); g.num_objects()];
        let action = vec![SimplicialMap::identity(value); g.num_morphisms()];
        GroupoidDiagram { groupoid, values, action }
    }

    pub fn one_point(groupoid: Groupoid, dim: usize) -> Self {
        Self::constant(groupoid, Arc::new(discrete_sset(1, dim)))
    }

    /// A `G`-set viewed as a diagram of discrete simplicial sets:
    /// `act[g][e]` is `g·e`.
    pub fn from_gset(groupoid: Groupoid, sizes: &[usize], act: &[Vec<usize>], dim: usize) -> Result<Self> {
        let g = groupoid.category().clone();
        if sizes.len() != g.num_objects() || act.len() != g.num_morphisms() {
            return Err(input_err!("G-set tables do not match the groupoid"));
        }
        let values: Vec<Arc<TruncatedSimplicialSet>> = sizes.iter().map(|&k| Arc::new(discrete_sset(k, dim))).collect();
        let action = g
            .morphism_ids()
            .map(|f| {
                let (a, b) = (g.source(f), g.target(f));
                SimplicialMap::new(values[a].clone(), values[b].clone(), vec![act[f].clone(); dim + 1])
            })
            .collect::<Result<Vec<_>>>()?;
        let out = GroupoidDiagram { groupoid, values, action };
        out.checked()
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    pub fn value(&self, y: ObjIx) -> &Arc<TruncatedSimplicialSet> {
        &self.values[y]
    }

    pub fn action(&self, g: MorIx) -> &SimplicialMap {
        &self.action[g]
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, |v| v.dim())
    }

    /// Every action is simplicial; identities act trivially; composites act
    /// as composites.
    pub fn validate(&self) -> Vec<String> {
        let g = self.groupoid.category();
        let mut out = Vec::new();
        for f in g.morphism_ids() {
            if let Some(v) = self.action[f].validate().first() {
                out.push(format!("action of {} breaks {}", g.morphism_name(f), v.identity));
            }
        }
        for y in g.objects() {
            let id = &self.action[g.identity(y)];
            if id.maps.iter().any(|m| m.iter().enumerate().any(|(x, &z)| x != z)) {
                out.push(format!("identity of {} acts nontrivially", g.object_name(y)));
            }
        }
        for f in g.morphism_ids() {
            for h in g.out_of(g.target(f)) {
                let hf = g.compose(h, f);
                let ok = self.action[f].maps.iter().enumerate().all(|(n, m)| {
                    m.iter().enumerate().all(|(x, &z)| self.action[hf].maps[n][x] == self.action[h].maps[n][z])
                });
                if !ok {
                    out.push(format!("action of {} is not composite", g.morphism_name(hf)));
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
}

/// `k` points, every higher simplex degenerate.
pub fn discrete_sset(k: usize, dim: usize) -> TruncatedSimplicialSet {
    let keys = vec![(0..k).collect::<Vec<_>>(); dim + 1];
    build_keyed(dim, keys, |_, _, &x| x, |_, _, &x| x).expect("closed").sset
}

/// A simplicial set with a map to the nerve of a groupoid.
#[derive(Clone, Debug)]
pub struct OverNerve {
    groupoid: Groupoid,
    nerve: Arc<Keyed<NerveKey>>,
    structure: SimplicialMap,
}

impl OverNerve {
    /// `structure` must land in the nerve of `groupoid` at the same
    /// truncation.
    pub fn new(groupoid: Groupoid, structure: SimplicialMap) -> Result<Self> {
        let keyed = nerve(groupoid.category(), structure.dom.dim());
        if *structure.cod != keyed.sset {
            return Err(input_err!("structure map does not land in the nerve of {}", groupoid.category().name()));
        }
        let structure = structure.checked()?;
        Ok(OverNerve { groupoid, nerve: Arc::new(keyed), structure })
    }

    /// As [`OverNerve::new`] for a bare category, which must be a groupoid.
    pub fn over_category(category: Arc<FiniteCategory>, structure: SimplicialMap) -> Result<Self> {
        let name = String::from(category.name());
        let g = Groupoid::new(category).map_err(|_| input_err!("{name} is not a groupoid"))?;
        Self::new(g, structure)
    }

    /// The nerve over itself.
    pub fn nerve_over_itself(groupoid: Groupoid, dim: usize) -> Self {
        let keyed = nerve(groupoid.category(), dim);
        let s = Arc::new(keyed.sset.clone());
        OverNerve { groupoid, nerve: Arc::new(keyed), structure: SimplicialMap::identity(s) }
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    pub fn total(&self) -> &Arc<TruncatedSimplicialSet> {
        &self.structure.dom
    }

    pub fn structure(&self) -> &SimplicialMap {
        &self.structure
    }

    pub fn nerve(&self) -> &Arc<Keyed<NerveKey>> {
        &self.nerve
    }

    pub fn dim(&self) -> usize {
        self.structure.dom.dim()
    }

    /// The string `f(x)`.
    pub fn string_of(&self, n: usize, x: usize) -> &NerveKey {
        &self.nerve.keys[n][self.structure.apply(n, x)]
    }

    /// `X_σ = f⁻¹(σ)` for the `n`-simplex `σ` of the nerve.
    pub fn fibre(&self, n: usize, sigma: usize) -> Vec<usize> {
        (0..self.total().count(n)).filter(|&x| self.structure.apply(n, x) == sigma).collect()
    }
}

/// `hocolim_G A` with the pair `(σ, x)` behind each simplex.
#[derive(Clone, Debug)]
pub struct Hocolim {
    pub over: OverNerve,
    /// `keys[n][i] = (σ, x)`: `σ` an `n`-simplex of the nerve with first
    /// vertex `a0`, `x` an `n`-simplex of `A_{a0}`.
    pub keys: Vec<Vec<(usize, usize)>>,
    index: Vec<BTreeMap<(usize, usize), usize>>,
}

impl Hocolim {
    pub fn find(&self, n: usize, sigma: usize, x: usize) -> Option<usize> {
        self.index[n].get(&(sigma, x)).copied()
    }
}

/// Diagonal of the simplicial replacement: `d_0` pushes `x` along the first
/// arrow of `σ`, the other faces and all degeneracies act on both parts.
pub fn hocolim(a: &GroupoidDiagram, dim: usize) -> Result<Hocolim> {
    if a.dim() < dim {
        return Err(input_err!("values are truncated at {}, below {dim}", a.dim()));
    }
    let g = a.groupoid.category();
    let nv = nerve(g, dim);
    let mut keys: Vec<Vec<(usize, usize)>> = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let mut level = Vec::new();
        for (s, (a0, _)) in nv.keys[n].iter().enumerate() {
            for x in 0..a.values[*a0].count(n) {
                level.push((s, x));
            }
        }
        keys.push(level);
    }
    let keyed = build_keyed(
        dim,
        keys,
        |n, i, &(s, x)| {
            let (a0, fs) = &nv.keys[n][s];
            let face = a.values[*a0].face(n, i, x);
            let face = if i == 0 { a.action[fs[0]].apply(n - 1, face) } else { face };
            (nv.sset.face(n, i, s), face)
        },
        |n, i, &(s, x)| {
            let (a0, _) = &nv.keys[n][s];
            (nv.sset.degeneracy(n, i, s), a.values[*a0].degeneracy(n, i, x))
        },
    )?;
    let labels = keyed
        .keys
        .iter()
        .enumerate()
        .map(|(n, ks)| {
            ks.iter()
                .map(|&(s, x)| format!("[{}; {}]", nv.sset.label(n, s), a.values[nv.keys[n][s].0].label(n, x)))
                .collect()
        })
        .collect();
    let structure_maps = keyed.keys.iter().map(|ks| ks.iter().map(|&(s, _)| s).collect()).collect();
    let total = Arc::new(keyed.sset.with_labels(labels));
    let nerve_arc = Arc::new(nv);
    let structure = SimplicialMap { dom: total, cod: Arc::new(nerve_arc.sset.clone()), maps: structure_maps };
    let over = OverNerve { groupoid: a.groupoid.clone(), nerve: nerve_arc, structure };
    Ok(Hocolim { over, keys: keyed.keys, index: keyed.index })
}

/// `pb(X)` with the pair `(x, γ: a0 → y)` behind each simplex of each value.
#[derive(Clone, Debug)]
pub struct Pb {
    pub diagram: GroupoidDiagram,
    /// `keyed[y]` indexes the simplices of `pb(X)_y`.
    pub keyed: Vec<Keyed<(usize, MorIx)>>,
}

impl Pb {
    pub fn find(&self, y: ObjIx, n: usize, x: usize, gamma: MorIx) -> Option<usize> {
        self.keyed[y].find(n, &(x, gamma))
    }
}

/// `pb(X)_y`: simplices `(x, γ: a0 → y)` with `a0` the first vertex of
/// `f(x)`; `d_0` replaces `γ` by `γ ∘ g1⁻¹`, the rest act on `x`; `h: y → y'`
/// acts by `γ ↦ h ∘ γ`.
pub fn pb(x: &OverNerve) -> Result<Pb> {
    let g = x.groupoid.category().clone();
    let dim = x.dim();
    let total = x.total().clone();
    let mut keyed = Vec::with_capacity(g.num_objects());
    for y in g.objects() {
        let keys: Vec<Vec<(usize, MorIx)>> = (0..=dim)
            .map(|n| {
                (0..total.count(n))
                    .flat_map(|e| {
                        let a0 = x.string_of(n, e).0;
                        g.hom(a0, y).map(move |gamma| (e, gamma)).collect::<Vec<_>>()
                    })
                    .collect()
            })
            .collect();
        let k = build_keyed(
            dim,
            keys,
            |n, i, &(e, gamma)| {
                if i == 0 {
                    let g1 = x.string_of(n, e).1[0];
                    (total.face(n, 0, e), g.compose(gamma, x.groupoid.inverse(g1)))
                } else {
                    (total.face(n, i, e), gamma)
                }
            },
            |n, i, &(e, gamma)| (total.degeneracy(n, i, e), gamma),
        )?;
        let labels = k
            .keys
            .iter()
            .enumerate()
            .map(|(n, ks)| ks.iter().map(|&(e, gamma)| format!("({}, {})", total.label(n, e), g.morphism_name(gamma))).collect())
            .collect();
        let mut k = k;
        k.sset = k.sset.with_labels(labels);
        keyed.push(k);
    }
    let values: Vec<Arc<TruncatedSimplicialSet>> = keyed.iter().map(|k| Arc::new(k.sset.clone())).collect();
    let action = g
        .morphism_ids()
        .map(|h| {
            let (y, y2) = (g.source(h), g.target(h));
            let maps = keyed[y]
                .keys
                .iter()
                .enumerate()
                .map(|(n, ks)| ks.iter().map(|&(e, gamma)| keyed[y2].find(n, &(e, g.compose(h, gamma))).expect("closed")).collect())
                .collect();
            SimplicialMap { dom: values[y].clone(), cod: values[y2].clone(), maps }
        })
        .collect();
    let diagram = GroupoidDiagram { groupoid: x.groupoid.clone(), values, action };
    Ok(Pb { diagram, keyed })
}

/// `η: X → hocolim pb(X)`, `x ↦ (f(x), (x, 1_{a0}))`.
pub fn unit_eta(x: &OverNerve, pbx: &Pb, h: &Hocolim) -> Result<SimplicialMap> {
    let g = x.groupoid.category();
    let maps = (0..=x.dim())
        .map(|n| {
            (0..x.total().count(n))
                .map(|e| {
                    let s = x.structure.apply(n, e);
                    let a0 = x.nerve.keys[n][s].0;
                    let p = pbx.find(a0, n, e, g.identity(a0)).ok_or_else(|| invalid!("pb does not match X"))?;
                    h.find(n, s, p).ok_or_else(|| invalid!("hocolim does not match pb(X)"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialMap::new(x.total().clone(), h.over.total().clone(), maps)
}

/// `ε_y: pb(hocolim A)_y → A_y`, `((σ, x), γ) ↦ γ_*(x)`.
pub fn counit_epsilon(a: &GroupoidDiagram, h: &Hocolim, pbh: &Pb) -> Result<Vec<SimplicialMap>> {
    let g = a.groupoid.category();
    g.objects()
        .map(|y| {
            let maps = pbh.keyed[y]
                .keys
                .iter()
                .enumerate()
                .map(|(n, ks)| {
                    ks.iter()
                        .map(|&(p, gamma)| {
                            let (_, e) = h.keys[n][p];
                            a.action[gamma].apply(n, e)
                        })
                        .collect()
                })
                .collect();
            SimplicialMap::new(pbh.diagram.values[y].clone(), a.values[y].clone(), maps)
        })
        .collect()
}

/// `c: hocolim pb(X) → X`, `(σ, (x, γ)) ↦ x`.
pub fn c_map(x: &OverNerve, pbx: &Pb, h: &Hocolim) -> Result<SimplicialMap> {
    let maps = h
        .keys
        .iter()
        .enumerate()
        .map(|(n, ks)| {
            ks.iter()
                .map(|&(s, p)| {
                    let a0 = h.over.nerve.keys[n][s].0;
                    pbx.keyed[a0].keys[n][p].0
                })
                .collect()
        })
        .collect();
    SimplicialMap::new(h.over.total().clone(), x.total().clone(), maps)
}

/// `hocolim φ` for a map of diagrams given object by object.
pub fn hocolim_map(phi: &[SimplicialMap], from: &Hocolim, to: &Hocolim) -> Result<SimplicialMap> {
    let maps = from
        .keys
        .iter()
        .enumerate()
        .map(|(n, ks)| {
            ks.iter()
                .map(|&(s, e)| {
                    let a0 = from.over.nerve.keys[n][s].0;
                    to.find(n, s, phi[a0].apply(n, e)).ok_or_else(|| invalid!("hocolim targets do not match"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialMap::new(from.over.total().clone(), to.over.total().clone(), maps)
}

/// `pb φ` for a map `φ: X → X'` over the nerve.
pub fn pb_map(phi: &SimplicialMap, from: &Pb, to: &Pb) -> Result<Vec<SimplicialMap>> {
    from.keyed
        .iter()
        .enumerate()
        .map(|(y, k)| {
            let maps = k
                .keys
                .iter()
                .enumerate()
                .map(|(n, ks)| {
                    ks.iter()
                        .map(|&(e, gamma)| to.find(y, n, phi.apply(n, e), gamma).ok_or_else(|| invalid!("map is not over the nerve")))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            SimplicialMap::new(from.diagram.values[y].clone(), to.diagram.values[y].clone(), maps)
        })
        .collect()
}

/// A family of maps `φ_y: A_y → B_y` commutes with the actions.
pub fn is_natural(a: &GroupoidDiagram, b: &GroupoidDiagram, phi: &[SimplicialMap]) -> bool {
    let g = a.groupoid.category();
    g.morphism_ids().all(|h| {
        let (y, y2) = (g.source(h), g.target(h));
        (0..=a.dim()).all(|n| {
            (0..a.values[y].count(n)).all(|e| phi[y2].apply(n, a.action[h].apply(n, e)) == b.action[h].apply(n, phi[y].apply(n, e)))
        })
    }) && phi.iter().all(|p| p.validate().is_empty())
}

/// Outcome of the exact adjunction checks for one `X` and one `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleReport {
    /// `hocolim(ε) ∘ η_{hocolim A} = 1`.
    pub hocolim_side: bool,
    /// `ε_{pb X} ∘ pb(η) = 1` at every object.
    pub pb_side: bool,
    pub eta_over_nerve: bool,
    pub epsilon_natural: bool,
    /// `c ∘ η = 1`.
    pub c_retracts_eta: bool,
}

impl TriangleReport {
    pub fn pass(&self) -> bool {
        self.hocolim_side && self.pb_side && self.eta_over_nerve && self.epsilon_natural && self.c_retracts_eta
    }
}

fn is_identity_map(m: &SimplicialMap) -> bool {
    *m.dom == *m.cod && m.maps.iter().all(|row| row.iter().enumerate().all(|(x, &y)| x == y))
}

/// Check both triangle identities of `pb ⊣ hocolim` simplex by simplex, in
/// degrees up to `dim`, for the object `x` over the nerve and the diagram
/// `a`.
pub fn check_triangles(x: &OverNerve, a: &GroupoidDiagram, dim: usize) -> Result<TriangleReport> {
    if x.dim() != dim || a.dim() < dim {
        return Err(input_err!("inputs must be truncated at {dim}"));
    }
    if x.groupoid != a.groupoid {
        return Err(input_err!("inputs live over different groupoids"));
    }
    // hocolim side
    let ha = hocolim(a, dim)?;
    let pbha = pb(&ha.over)?;
    let hpbha = hocolim(&pbha.diagram, dim)?;
    let eta_ha = unit_eta(&ha.over, &pbha, &hpbha)?;
    let eps_a = counit_epsilon(a, &ha, &pbha)?;
    let epsilon_natural = is_natural(&pbha.diagram, a, &eps_a);
    let back = hocolim_map(&eps_a, &hpbha, &ha)?;
    let hocolim_side = is_identity_map(&eta_ha.then(&back)?);
    // pb side
    let pbx = pb(x)?;
    let hpbx = hocolim(&pbx.diagram, dim)?;
    let eta_x = unit_eta(x, &pbx, &hpbx)?;
    let eta_over_nerve = eta_x.validate().is_empty()
        && (0..=dim).all(|n| {
            (0..x.total().count(n)).all(|e| hpbx.over.structure.apply(n, eta_x.apply(n, e)) == x.structure.apply(n, e))
        });
    let pbhpbx = pb(&hpbx.over)?;
    let pb_eta = pb_map(&eta_x, &pbx, &pbhpbx)?;
    let eps_pbx = counit_epsilon(&pbx.diagram, &hpbx, &pbhpbx)?;
    let pb_side = pb_eta.iter().zip(&eps_pbx).all(|(f, e)| f.then(e).map(|m| is_identity_map(&m)).unwrap_or(false));
    let c = c_map(x, &pbx, &hpbx)?;
    let c_retracts_eta = c.validate().is_empty() && is_identity_map(&eta_x.then(&c)?);
    Ok(TriangleReport { hocolim_side, pb_side, eta_over_nerve, epsilon_natural, c_retracts_eta })
}

/// The stored form of a pullback simplex given as `(x, α: aₙ → y)`:
/// `γ = α ∘ gₙ ∘ … ∘ g₁`.
pub fn normalize_last_vertex(x: &OverNerve, n: usize, e: usize, alpha: MorIx) -> Result<MorIx> {
    let g = x.groupoid.category();
    let (a0, fs) = x.string_of(n, e);
    let an = fs.last().map_or(*a0, |&f| g.target(f));
    if g.source(alpha) != an {
        return Err(input_err!("{} does not start at the last vertex", g.morphism_name(alpha)));
    }
    Ok(fs.iter().rev().fold(alpha, |acc, &f| g.compose(acc, f)))
}

#[cfg(test)]
mod tests;
