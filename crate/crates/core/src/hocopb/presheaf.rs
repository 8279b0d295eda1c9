//! The homotopy colimit and pullback applied section by section over a
//! presheaf of groupoids.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    check_triangles, counit_epsilon, discrete_sset, hocolim, pb, unit_eta, GroupoidDiagram, Hocolim, OverNerve, Pb, TriangleReport,
};
use crate::error::{input_err, invalid, Result};
use crate::fibred::{EnrichedSetDiagram, PresheafOfGroupoids};
use crate::fincat::{Groupoid, MorIx, ObjIx};
use crate::sset::{nerve_map, SimplicialMap, TruncatedSimplicialSet};

/// Per section `U` a diagram over `G(U)^op`; `site_action[α][x]` sends
/// `X(U)_x` to `X(V)_{α*x}` for `α: V → U`.
#[derive(Clone, Debug)]
pub struct EnrichedGroupoidDiagram {
    base: Arc<PresheafOfGroupoids>,
    sections: Vec<GroupoidDiagram>,
    site_action: Vec<Vec<SimplicialMap>>,
}

fn section_groupoid(base: &PresheafOfGroupoids, u: ObjIx) -> Groupoid {
    base.groupoid(u).opposite()
}

impl EnrichedGroupoidDiagram {
    pub fn new(
        base: Arc<PresheafOfGroupoids>,
        sections: Vec<GroupoidDiagram>,
        site_action: Vec<Vec<SimplicialMap>>,
    ) -> Result<Self> {
        let site = base.site().clone();
        if sections.len() != site.num_objects() || site_action.len() != site.num_morphisms() {
            return Err(input_err!("need one diagram per section and one action per site morphism"));
        }
        for u in site.objects() {
            if *sections[u].groupoid() != section_groupoid(&base, u) {
                return Err(input_err!("diagram at {} is not over the opposite of its section", site.object_name(u)));
            }
        }
        for a in site.morphism_ids() {
            let (v, u) = (site.source(a), site.target(a));
            if site_action[a].len() != base.value(u).num_objects() {
                return Err(input_err!("site action of {} has the wrong length", site.morphism_name(a)));
            }
            for (x, m) in site_action[a].iter().enumerate() {
                let y = base.restrict_obj(a, x);
                if *m.dom != **sections[u].value(x) || *m.cod != **sections[v].value(y) {
                    return Err(input_err!("site action of {} has the wrong endpoints", site.morphism_name(a)));
                }
            }
        }
        Ok(EnrichedGroupoidDiagram { base, sections, site_action })
    }

    /// The same simplicial set everywhere, every action the identity.
    pub fn constant(base: Arc<PresheafOfGroupoids>, value: Arc<TruncatedSimplicialSet>) -> Self {
        let site = base.site().clone();
        let sections = site
            .objects()
            .map(|u| GroupoidDiagram::constant(section_groupoid(&base, u), value.clone()))
            .collect();
        let site_action = site
            .morphism_ids()
            .map(|a| {
                let u = site.target(a);
                (0..base.value(u).num_objects()).map(|_| SimplicialMap::identity(value.clone())).collect()
            })
            .collect();
        EnrichedGroupoidDiagram { base, sections, site_action }
    }

    /// An enriched set diagram on `G^op` viewed degreewise as discrete
    /// simplicial sets.
    pub fn discrete(base: Arc<PresheafOfGroupoids>, x: &EnrichedSetDiagram, dim: usize) -> Result<Self> {
        if **x.base() != *base.inner() {
            return Err(input_err!("diagram lives over a different presheaf"));
        }
        let site = base.site().clone();
        let mut sections = Vec::with_capacity(site.num_objects());
        let mut values_at: Vec<Vec<Arc<TruncatedSimplicialSet>>> = Vec::new();
        for u in site.objects() {
            let g = base.value(u);
            let values: Vec<Arc<TruncatedSimplicialSet>> =
                g.objects().map(|o| Arc::new(discrete_sset(x.size(u, o), dim))).collect();
            let action = g
                .morphism_ids()
                .map(|gm| {
                    let (a, b) = (g.source(gm), g.target(gm));
                    let row: Vec<usize> = (0..x.size(u, b)).map(|e| x.act(u, gm, e)).collect();
                    SimplicialMap::new(values[b].clone(), values[a].clone(), vec![row; dim + 1])
                })
                .collect::<Result<Vec<_>>>()?;
            sections.push(GroupoidDiagram::new(section_groupoid(&base, u), values.clone(), action)?);
            values_at.push(values);
        }
        let site_action = site
            .morphism_ids()
            .map(|a| {
                let (v, u) = (site.source(a), site.target(a));
                base.value(u)
                    .objects()
                    .map(|o| {
                        let ao = base.restrict_obj(a, o);
                        let row: Vec<usize> = (0..x.size(u, o)).map(|e| x.restrict(a, o, e)).collect();
                        SimplicialMap::new(values_at[u][o].clone(), values_at[v][ao].clone(), vec![row; dim + 1])
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, sections, site_action)?.checked()
    }

    pub fn base(&self) -> &Arc<PresheafOfGroupoids> {
        &self.base
    }

    pub fn section(&self, u: ObjIx) -> &GroupoidDiagram {
        &self.sections[u]
    }

    pub fn site_action(&self, alpha: MorIx, x: ObjIx) -> &SimplicialMap {
        &self.site_action[alpha][x]
    }

    pub fn dim(&self) -> usize {
        self.sections.first().map_or(0, GroupoidDiagram::dim)
    }

    /// Section diagrams valid, site actions simplicial and functorial, and
    /// the squares `α* ∘ γ = (α*γ) ∘ α*` commuting degreewise.
    pub fn validate(&self) -> Vec<String> {
        let site = self.base.site();
        let mut out = Vec::new();
        for u in site.objects() {
            for e in self.sections[u].validate() {
                out.push(format!("at {}: {e}", site.object_name(u)));
            }
        }
        for a in site.morphism_ids() {
            let (v, u) = (site.source(a), site.target(a));
            let gu = self.base.value(u);
            for x in gu.objects() {
                let m = &self.site_action[a][x];
                if !m.validate().is_empty() {
                    out.push(format!("site action of {} at {} is not simplicial", site.morphism_name(a), gu.object_name(x)));
                }
                if site.is_identity(a) && m.maps.iter().any(|row| row.iter().enumerate().any(|(i, &j)| i != j)) {
                    out.push(format!("identity {} acts nontrivially", site.morphism_name(a)));
                }
                for b in site.into_object(v) {
                    let ab = site.compose(a, b);
                    let y = self.base.restrict_obj(a, x);
                    let direct = &self.site_action[ab][x];
                    let two = &self.site_action[b][y];
                    let ok = m.maps.iter().enumerate().all(|(n, row)| {
                        row.iter().enumerate().all(|(e, &z)| direct.maps[n][e] == two.maps[n][z])
                    });
                    if !ok {
                        out.push(format!("site actions of {} and {} do not compose", site.morphism_name(a), site.morphism_name(b)));
                    }
                }
            }
            // γ: x → y in G(U) acts X(U)_y → X(U)_x
            for g in gu.morphism_ids() {
                let (x, y) = (gu.source(g), gu.target(g));
                let ag = self.base.restrict_mor(a, g);
                let lhs_first = self.sections[u].action(g);
                let ok = (0..=self.dim()).all(|n| {
                    (0..self.sections[u].value(y).count(n)).all(|e| {
                        let l = self.site_action[a][x].apply(n, lhs_first.apply(n, e));
                        let r = self.sections[v].action(ag).apply(n, self.site_action[a][y].apply(n, e));
                        l == r
                    })
                });
                if !ok {
                    out.push(format!("square for {} and {} fails", site.morphism_name(a), gu.morphism_name(g)));
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

/// Per section an object over `nerve(G(U)^op)`, with site actions covering
/// the nerves of the restriction functors.
#[derive(Clone, Debug)]
pub struct PresheafOverNerve {
    base: Arc<PresheafOfGroupoids>,
    sections: Vec<OverNerve>,
    site_action: Vec<SimplicialMap>,
}

fn restriction_nerve(base: &PresheafOfGroupoids, alpha: MorIx, dim: usize) -> SimplicialMap {
    nerve_map(&base.restriction(alpha).opposite(), dim)
}

impl PresheafOverNerve {
    pub fn new(base: Arc<PresheafOfGroupoids>, sections: Vec<OverNerve>, site_action: Vec<SimplicialMap>) -> Result<Self> {
        let site = base.site().clone();
        if sections.len() != site.num_objects() || site_action.len() != site.num_morphisms() {
            return Err(input_err!("need one object per section and one action per site morphism"));
        }
        for u in site.objects() {
            if *sections[u].groupoid() != section_groupoid(&base, u) {
                return Err(input_err!("object at {} is not over the opposite of its section", site.object_name(u)));
            }
        }
        for a in site.morphism_ids() {
            let (v, u) = (site.source(a), site.target(a));
            if *site_action[a].dom != **sections[u].total() || *site_action[a].cod != **sections[v].total() {
                return Err(input_err!("site action of {} has the wrong endpoints", site.morphism_name(a)));
            }
        }
        Ok(PresheafOverNerve { base, sections, site_action })
    }

    /// `nerve(G(U)^op)` over itself in every section.
    pub fn nerve_over_itself(base: Arc<PresheafOfGroupoids>, dim: usize) -> Self {
        let site = base.site().clone();
        let sections = site.objects().map(|u| OverNerve::nerve_over_itself(section_groupoid(&base, u), dim)).collect();
        let site_action = site.morphism_ids().map(|a| restriction_nerve(&base, a, dim)).collect();
        PresheafOverNerve { base, sections, site_action }
    }

    pub fn base(&self) -> &Arc<PresheafOfGroupoids> {
        &self.base
    }

    pub fn section(&self, u: ObjIx) -> &OverNerve {
        &self.sections[u]
    }

    pub fn site_action(&self, alpha: MorIx) -> &SimplicialMap {
        &self.site_action[alpha]
    }

    pub fn dim(&self) -> usize {
        self.sections.first().map_or(0, OverNerve::dim)
    }

    /// Site actions simplicial, functorial and over the restriction maps of
    /// the nerves.
    pub fn validate(&self) -> Vec<String> {
        let site = self.base.site();
        let mut out = Vec::new();
        for a in site.morphism_ids() {
            let (v, u) = (site.source(a), site.target(a));
            let m = &self.site_action[a];
            if !m.validate().is_empty() {
                out.push(format!("site action of {} is not simplicial", site.morphism_name(a)));
            }
            if site.is_identity(a) && m.maps.iter().any(|row| row.iter().enumerate().any(|(i, &j)| i != j)) {
                out.push(format!("identity {} acts nontrivially", site.morphism_name(a)));
            }
            let rn = restriction_nerve(&self.base, a, self.dim());
            let over = (0..=self.dim()).all(|n| {
                (0..m.dom.count(n)).all(|e| {
                    self.sections[v].structure().apply(n, m.apply(n, e))
                        == rn.apply(n, self.sections[u].structure().apply(n, e))
                })
            });
            if !over {
                out.push(format!("site action of {} does not cover the nerve map", site.morphism_name(a)));
            }
            for b in site.into_object(v) {
                let ab = site.compose(a, b);
                let ok = m.maps.iter().enumerate().all(|(n, row)| {
                    row.iter().enumerate().all(|(e, &z)| self.site_action[ab].maps[n][e] == self.site_action[b].maps[n][z])
                });
                if !ok {
                    out.push(format!("site actions of {} and {} do not compose", site.morphism_name(a), site.morphism_name(b)));
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

/// Sectionwise homotopy colimit with its keys.
#[derive(Clone, Debug)]
pub struct PresheafHocolim {
    pub over: PresheafOverNerve,
    pub sections: Vec<Hocolim>,
}

/// `(σ, e) ↦ (α*σ, α*e)` in every section.
pub fn presheaf_hocolim(x: &EnrichedGroupoidDiagram, dim: usize) -> Result<PresheafHocolim> {
    let base = x.base.clone();
    let site = base.site().clone();
    let sections = site.objects().map(|u| hocolim(&x.sections[u], dim)).collect::<Result<Vec<_>>>()?;
    let mut site_action = Vec::with_capacity(site.num_morphisms());
    for a in site.morphism_ids() {
        let (v, u) = (site.source(a), site.target(a));
        let rn = restriction_nerve(&base, a, dim);
        let (hu, hv) = (&sections[u], &sections[v]);
        let maps = hu
            .keys
            .iter()
            .enumerate()
            .map(|(n, ks)| {
                ks.iter()
                    .map(|&(s, e)| {
                        let a0 = hu.over.nerve().keys[n][s].0;
                        let s2 = rn.apply(n, s);
                        let e2 = x.site_action[a][a0].apply(n, e);
                        hv.find(n, s2, e2).ok_or_else(|| invalid!("site action leaves the homotopy colimit"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        site_action.push(SimplicialMap::new(hu.over.total().clone(), hv.over.total().clone(), maps)?);
    }
    let over_sections = sections.iter().map(|h| h.over.clone()).collect();
    let over = PresheafOverNerve { base, sections: over_sections, site_action };
    Ok(PresheafHocolim { over, sections })
}

/// Sectionwise pullback with its keys.
#[derive(Clone, Debug)]
pub struct PresheafPb {
    pub diagram: EnrichedGroupoidDiagram,
    pub sections: Vec<Pb>,
}

/// `(e, γ) ↦ (α*e, α*γ)` in every section.
pub fn presheaf_pb(y: &PresheafOverNerve) -> Result<PresheafPb> {
    let base = y.base.clone();
    let site = base.site().clone();
    let sections = site.objects().map(|u| pb(&y.sections[u])).collect::<Result<Vec<_>>>()?;
    let mut site_action = Vec::with_capacity(site.num_morphisms());
    for a in site.morphism_ids() {
        let (v, u) = (site.source(a), site.target(a));
        let (pu, pv) = (&sections[u], &sections[v]);
        let per_object = pu
            .keyed
            .iter()
            .enumerate()
            .map(|(x, k)| {
                let ax = base.restrict_obj(a, x);
                let maps = k
                    .keys
                    .iter()
                    .enumerate()
                    .map(|(n, ks)| {
                        ks.iter()
                            .map(|&(e, g)| {
                                let e2 = y.site_action[a].apply(n, e);
                                pv.find(ax, n, e2, base.restrict_mor(a, g))
                                    .ok_or_else(|| invalid!("site action leaves the pullback"))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                SimplicialMap::new(pu.diagram.value(x).clone(), pv.diagram.value(ax).clone(), maps)
            })
            .collect::<Result<Vec<_>>>()?;
        site_action.push(per_object);
    }
    let diagram = EnrichedGroupoidDiagram { base, sections: sections.iter().map(|p| p.diagram.clone()).collect(), site_action };
    Ok(PresheafPb { diagram, sections })
}

/// Per-section triangle reports plus naturality of everything in the site
/// direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionwiseReport {
    pub sections: Vec<TriangleReport>,
    /// The constructed site actions satisfy the enriched axioms.
    pub actions_valid: bool,
    /// `η` commutes with site actions.
    pub eta_natural: bool,
    /// `ε` commutes with site actions.
    pub epsilon_natural: bool,
}

impl SectionwiseReport {
    pub fn pass(&self) -> bool {
        self.actions_valid && self.eta_natural && self.epsilon_natural && self.sections.iter().all(TriangleReport::pass)
    }
}

/// `η` in every section.
pub fn presheaf_unit_eta(y: &PresheafOverNerve, pby: &PresheafPb, h: &PresheafHocolim) -> Result<Vec<SimplicialMap>> {
    (0..y.sections.len()).map(|u| unit_eta(&y.sections[u], &pby.sections[u], &h.sections[u])).collect()
}

/// `ε` in every section and object.
pub fn presheaf_counit(x: &EnrichedGroupoidDiagram, h: &PresheafHocolim, pbh: &PresheafPb) -> Result<Vec<Vec<SimplicialMap>>> {
    (0..x.sections.len()).map(|u| counit_epsilon(&x.sections[u], &h.sections[u], &pbh.sections[u])).collect()
}

fn commutes(first: &SimplicialMap, then: &SimplicialMap, other_first: &SimplicialMap, other_then: &SimplicialMap) -> bool {
    first.maps.iter().enumerate().all(|(n, row)| {
        row.iter().enumerate().all(|(e, &z)| then.apply(n, z) == other_then.apply(n, other_first.apply(n, e)))
    })
}

/// Apply hocolim, pb, η and ε in every section and check the triangles
/// and all site naturality squares exactly up to degree `dim`.
pub fn check_sectionwise(y: &PresheafOverNerve, x: &EnrichedGroupoidDiagram, dim: usize) -> Result<SectionwiseReport> {
    if y.base != x.base && *y.base != *x.base {
        return Err(input_err!("inputs live over different presheaves of groupoids"));
    }
    let site = y.base.site().clone();
    let sections = site
        .objects()
        .map(|u| check_triangles(&y.sections[u], &x.sections[u], dim))
        .collect::<Result<Vec<_>>>()?;

    let pby = presheaf_pb(y)?;
    let hpby = presheaf_hocolim(&pby.diagram, dim)?;
    let hx = presheaf_hocolim(x, dim)?;
    let pbhx = presheaf_pb(&hx.over)?;
    let actions_valid = pby.diagram.validate().is_empty()
        && hpby.over.validate().is_empty()
        && hx.over.validate().is_empty()
        && pbhx.diagram.validate().is_empty();

    let eta = presheaf_unit_eta(y, &pby, &hpby)?;
    let eta_natural = site.morphism_ids().all(|a| {
        let (v, u) = (site.source(a), site.target(a));
        commutes(&y.site_action[a], &eta[v], &eta[u], &hpby.over.site_action[a])
    });

    let eps = presheaf_counit(x, &hx, &pbhx)?;
    let epsilon_natural = site.morphism_ids().all(|a| {
        let (v, u) = (site.source(a), site.target(a));
        (0..y.base.value(u).num_objects()).all(|o| {
            let ao = y.base.restrict_obj(a, o);
            commutes(&pbhx.diagram.site_action[a][o], &eps[v][ao], &eps[u][o], &x.site_action[a][o])
        })
    });
    Ok(SectionwiseReport { sections, actions_valid, eta_natural, epsilon_natural })
}
