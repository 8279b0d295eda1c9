use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{FibredSite, MorphismOfPresheavesOfCategories, PresheafOfCategories};
use crate::error::{input_err, invalid, Result};
use crate::fincat::{left_kan_set, KanExtension, MorIx, ObjIx, SetValuedFunctor, Variance};
use crate::site::{representable, Presheaf};

/// A set-valued diagram on a presheaf of categories: a finite set at every
/// `(U, x)`, a contravariant action of each `A(U)`, and restriction maps
/// along the site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnrichedSetDiagram {
    base: Arc<PresheafOfCategories>,
    sizes: Vec<Vec<usize>>,
    // category_action[U][γ]: value(U, target γ) → value(U, source γ)
    category_action: Vec<Vec<Vec<usize>>>,
    // site_action[α][x]: value(U, x) → value(V, α*x) for α: V → U
    site_action: Vec<Vec<Vec<usize>>>,
}

impl EnrichedSetDiagram {
    pub fn new(
        base: Arc<PresheafOfCategories>,
        sizes: Vec<Vec<usize>>,
        category_action: Vec<Vec<Vec<usize>>>,
        site_action: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let c = base.site();
        let shape = sizes.len() == c.num_objects()
            && category_action.len() == c.num_objects()
            && site_action.len() == c.num_morphisms()
            && c.objects().all(|u| {
                let a = base.value(u);
                sizes[u].len() == a.num_objects()
                    && category_action[u].len() == a.num_morphisms()
                    && a.morphism_ids().all(|g| {
                        category_action[u][g].len() == sizes[u][a.target(g)]
                            && category_action[u][g].iter().all(|&e| e < sizes[u][a.source(g)])
                    })
            })
            && c.morphism_ids().all(|alpha| {
                let (v, u) = (c.source(alpha), c.target(alpha));
                site_action[alpha].len() == base.value(u).num_objects()
                    && base.value(u).objects().all(|x| {
                        let to = sizes[v][base.restrict_obj(alpha, x)];
                        site_action[alpha][x].len() == sizes[u][x] && site_action[alpha][x].iter().all(|&e| e < to)
                    })
            });
        if !shape {
            return Err(input_err!("enriched diagram tables do not match the presheaf of categories"));
        }
        Ok(EnrichedSetDiagram { base, sizes, category_action, site_action })
    }

    /// The terminal diagram.
    pub fn one_point(base: Arc<PresheafOfCategories>) -> Self {
        let c = base.site().clone();
        let sizes = c.objects().map(|u| vec![1; base.value(u).num_objects()]).collect();
        let category_action = c.objects().map(|u| vec![vec![0]; base.value(u).num_morphisms()]).collect();
        let site_action = c
            .morphism_ids()
            .map(|alpha| vec![vec![0]; base.value(c.target(alpha)).num_objects()])
            .collect();
        EnrichedSetDiagram { base, sizes, category_action, site_action }
    }

    pub fn base(&self) -> &Arc<PresheafOfCategories> {
        &self.base
    }

    pub fn size(&self, u: ObjIx, x: ObjIx) -> usize {
        self.sizes[u][x]
    }

    pub fn sizes(&self) -> &[Vec<usize>] {
        &self.sizes
    }

    /// `γ*(e)` for `γ: x → y` in `A(U)` and `e` over `y`.
    pub fn act(&self, u: ObjIx, gamma: MorIx, e: usize) -> usize {
        self.category_action[u][gamma][e]
    }

    /// `α*(e)` for `e` over `x` at `U`.
    pub fn restrict(&self, alpha: MorIx, x: ObjIx, e: usize) -> usize {
        self.site_action[alpha][x][e]
    }

    /// Functoriality of both actions and the compatibility square
    /// `α* ∘ γ* = (α*γ)* ∘ α*`.
    pub fn validate(&self) -> Vec<String> {
        let base = &*self.base;
        let c = base.site();
        let mut out = Vec::new();
        for u in c.objects() {
            let a = base.value(u);
            for x in a.objects() {
                let id = a.identity(x);
                if self.category_action[u][id].iter().enumerate().any(|(e, &y)| e != y) {
                    out.push(format!("{} does not act trivially", a.morphism_name(id)));
                }
            }
            for f in a.morphism_ids() {
                for g in a.out_of(a.target(f)) {
                    let gf = a.compose(g, f);
                    let ok = (0..self.sizes[u][a.target(g)])
                        .all(|e| self.act(u, gf, e) == self.act(u, f, self.act(u, g, e)));
                    if !ok {
                        out.push(format!(
                            "action of {} is not the composite action at {}",
                            a.morphism_name(gf),
                            c.object_name(u)
                        ));
                    }
                }
            }
        }
        for u in c.objects() {
            let id = c.identity(u);
            for x in base.value(u).objects() {
                if self.site_action[id][x].iter().enumerate().any(|(e, &y)| e != y) {
                    out.push(format!("{} does not act trivially", c.morphism_name(id)));
                }
            }
        }
        for alpha in c.morphism_ids() {
            let u = c.target(alpha);
            for beta in c.into_object(c.source(alpha)) {
                let ab = c.compose(alpha, beta);
                for x in base.value(u).objects() {
                    let ax = base.restrict_obj(alpha, x);
                    let ok = (0..self.sizes[u][x])
                        .all(|e| self.restrict(ab, x, e) == self.restrict(beta, ax, self.restrict(alpha, x, e)));
                    if !ok {
                        out.push(format!("restriction along {} is not composite", c.morphism_name(ab)));
                    }
                }
            }
            let a = base.value(u);
            for gamma in a.morphism_ids() {
                let (x, y) = (a.source(gamma), a.target(gamma));
                let ag = base.restrict_mor(alpha, gamma);
                let ok = (0..self.sizes[u][y]).all(|e| {
                    self.restrict(alpha, x, self.act(u, gamma, e))
                        == self.act(c.source(alpha), ag, self.restrict(alpha, y, e))
                });
                if !ok {
                    out.push(format!(
                        "actions of {} and {} do not commute",
                        c.morphism_name(alpha),
                        a.morphism_name(gamma)
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

    /// `value(U, x) = F(U, x)`, `γ* = F(1, γ)`, `α* = F(α, 1)`.
    pub fn from_presheaf(fs: &FibredSite, f: &Presheaf) -> Result<Self> {
        if **f.base() != *fs.total || f.variance() != Variance::Contravariant {
            return Err(input_err!("expected a presheaf on the total category"));
        }
        let base = fs.base.clone();
        let c = base.site();
        let sizes = c
            .objects()
            .map(|u| base.value(u).objects().map(|x| f.size(fs.object_of(u, x).expect("object"))).collect())
            .collect();
        let category_action = c
            .objects()
            .map(|u| {
                base.value(u)
                    .morphism_ids()
                    .map(|g| {
                        let t = fs.object_of(u, base.value(u).target(g)).expect("object");
                        f.action(fs.morphism_of(t, c.identity(u), g).expect("morphism")).to_vec()
                    })
                    .collect()
            })
            .collect();
        let site_action = c
            .morphism_ids()
            .map(|alpha| {
                let av = base.value(c.source(alpha));
                base.value(c.target(alpha))
                    .objects()
                    .map(|x| {
                        let one = av.identity(base.restrict_obj(alpha, x));
                        let t = fs.object_of(c.target(alpha), x).expect("object");
                        f.action(fs.morphism_of(t, alpha, one).expect("morphism")).to_vec()
                    })
                    .collect()
            })
            .collect();
        EnrichedSetDiagram::new(base, sizes, category_action, site_action)?.checked()
    }

    /// `F(α, f) = f* ∘ α*`, from `(α, f) = (α, 1) ∘ (1, f)`.
    pub fn to_presheaf(&self, fs: &FibredSite) -> Result<Presheaf> {
        if *fs.base != *self.base {
            return Err(input_err!("diagram and fibred site have different presheaves of categories"));
        }
        let c = self.base.site();
        let sizes = fs.objects.iter().map(|&(u, x)| self.sizes[u][x]).collect();
        let action = fs
            .morphisms
            .iter()
            .enumerate()
            .map(|(m, &(alpha, f))| {
                let (u, x) = fs.objects[fs.total.target(m)];
                let v = c.source(alpha);
                (0..self.sizes[u][x]).map(|e| self.act(v, f, self.restrict(alpha, x, e))).collect()
            })
            .collect();
        Ok(SetValuedFunctor::new(fs.total.clone(), Variance::Contravariant, sizes, action))
    }

    /// `maps[U][x][e]` commutes with both actions of `self` and `other`.
    pub fn is_morphism_to(&self, other: &EnrichedSetDiagram, maps: &[Vec<Vec<usize>>]) -> bool {
        let base = &*self.base;
        let c = base.site();
        if *other.base != *base {
            return false;
        }
        let shape = c.objects().all(|u| {
            base.value(u).objects().all(|x| {
                maps[u][x].len() == self.sizes[u][x] && maps[u][x].iter().all(|&y| y < other.sizes[u][x])
            })
        });
        shape
            && c.objects().all(|u| {
                let a = base.value(u);
                a.morphism_ids().all(|g| {
                    let (x, y) = (a.source(g), a.target(g));
                    (0..self.sizes[u][y]).all(|e| maps[u][x][self.act(u, g, e)] == other.act(u, g, maps[u][y][e]))
                })
            })
            && c.morphism_ids().all(|alpha| {
                let (v, u) = (c.source(alpha), c.target(alpha));
                base.value(u).objects().all(|x| {
                    let ax = base.restrict_obj(alpha, x);
                    (0..self.sizes[u][x]).all(|e| {
                        maps[v][ax][self.restrict(alpha, x, e)] == other.restrict(alpha, x, maps[u][x][e])
                    })
                })
            })
    }

    /// Forget the category actions: `X₀(U) = ⊔_x value(U, x)` over `Ob(A)`,
    /// listed by `x` and then by element.
    pub fn object_restriction(&self) -> OverPresheaf {
        let base = &*self.base;
        let c = base.site().clone();
        let offsets = self.offsets();
        let mut projection = Vec::with_capacity(c.num_objects());
        let mut labels = Vec::with_capacity(c.num_objects());
        for u in c.objects() {
            let a = base.value(u);
            let mut p = Vec::new();
            let mut l = Vec::new();
            for x in a.objects() {
                for e in 0..self.sizes[u][x] {
                    p.push(x);
                    l.push(format!("{}:{e}", a.object_name(x)));
                }
            }
            projection.push(p);
            labels.push(l);
        }
        let action = c
            .morphism_ids()
            .map(|alpha| {
                let (v, u) = (c.source(alpha), c.target(alpha));
                base.value(u)
                    .objects()
                    .flat_map(|x| {
                        let ax = base.restrict_obj(alpha, x);
                        let off = offsets[v][ax];
                        (0..self.sizes[u][x]).map(move |e| off + self.restrict(alpha, x, e))
                    })
                    .collect()
            })
            .collect();
        let sizes = projection.iter().map(Vec::len).collect();
        let total = SetValuedFunctor::new(c, Variance::Contravariant, sizes, action).with_labels(labels);
        OverPresheaf { base: base.objects_presheaf(), total, projection }
    }

    /// Position of the first element over each `(U, x)` in
    /// [`object_restriction`](Self::object_restriction).
    pub fn offsets(&self) -> Vec<Vec<usize>> {
        self.sizes
            .iter()
            .map(|row| {
                let mut acc = 0;
                row.iter()
                    .map(|&s| {
                        let o = acc;
                        acc += s;
                        o
                    })
                    .collect()
            })
            .collect()
    }
}
/// Equal up to labels.
/// Equal sizes and actions, labels ignored.
pub fn same_data(a: &Presheaf, b: &Presheaf) -> bool {
    **a.base() == **b.base() && a.sizes() == b.sizes() && a.actions() == b.actions()
}

/// A map of presheaves `p: Y → X`, i.e. an object of presheaves over `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverPresheaf {
    pub base: Presheaf,
    pub total: Presheaf,
    /// `projection[U][y]` is `p(y)`.
    pub projection: Vec<Vec<usize>>,
}

impl OverPresheaf {
    pub fn new(base: Presheaf, total: Presheaf, projection: Vec<Vec<usize>>) -> Result<Self> {
        let o = OverPresheaf { base, total, projection };
        o.check()?;
        Ok(o)
    }

    fn check(&self) -> Result<()> {
        let c = self.base.base();
        if **self.total.base() != **c {
            return Err(input_err!("presheaves live on different sites"));
        }
        self.base.validate()?;
        self.total.validate()?;
        for u in c.objects() {
            if self.projection[u].len() != self.total.size(u) || self.projection[u].iter().any(|&x| x >= self.base.size(u)) {
                return Err(input_err!("projection at {} has the wrong shape", c.object_name(u)));
            }
        }
        for alpha in c.morphism_ids() {
            let (v, u) = (c.source(alpha), c.target(alpha));
            for y in 0..self.total.size(u) {
                if self.projection[v][self.total.apply(alpha, y)] != self.base.apply(alpha, self.projection[u][y]) {
                    return Err(invalid!("projection is not natural along {}", c.morphism_name(alpha)));
                }
            }
        }
        Ok(())
    }

    /// The elements over `x` at `U`, in order.
    pub fn fibre(&self, u: ObjIx, x: usize) -> Vec<usize> {
        (0..self.total.size(u)).filter(|&y| self.projection[u][y] == x).collect()
    }

    /// The presheaf `(U, x) ↦ p⁻¹(x)` on the site of sections of the base.
    /// `fs` must be the Grothendieck construction of the base viewed as a
    /// discrete presheaf of categories.
    pub fn to_total_presheaf(&self, fs: &FibredSite) -> Result<Presheaf> {
        if !same_data(&fs.base.objects_presheaf(), &self.base) {
            return Err(input_err!("fibred site is not built on the base presheaf"));
        }
        let fibres: Vec<Vec<usize>> = fs.objects.iter().map(|&(u, x)| self.fibre(u, x)).collect();
        let action = fs
            .morphisms
            .iter()
            .enumerate()
            .map(|(m, &(alpha, _))| {
                let (t, s) = (fs.total.target(m), fs.total.source(m));
                fibres[t]
                    .iter()
                    .map(|&y| {
                        let z = self.total.apply(alpha, y);
                        fibres[s].iter().position(|&w| w == z).expect("natural projection")
                    })
                    .collect()
            })
            .collect();
        let labels = fs
            .objects
            .iter()
            .zip(&fibres)
            .map(|(&(u, _), f)| f.iter().map(|&y| self.total.label(u, y)).collect())
            .collect();
        Ok(SetValuedFunctor::new(fs.total.clone(), Variance::Contravariant, fibres.iter().map(Vec::len).collect(), action)
            .with_labels(labels))
    }

    /// Inverse of [`to_total_presheaf`](Self::to_total_presheaf): elements
    /// listed by section and then by element of the fibre.
    pub fn from_total_presheaf(fs: &FibredSite, f: &Presheaf) -> Result<Self> {
        if **f.base() != *fs.total {
            return Err(input_err!("expected a presheaf on the total category"));
        }
        let base = fs.base.objects_presheaf();
        let c = base.base().clone();
        let mut offset = BTreeMap::new();
        let mut projection = vec![Vec::new(); c.num_objects()];
        for (o, &(u, x)) in fs.objects.iter().enumerate() {
            offset.insert(o, projection[u].len());
            projection[u].extend(core::iter::repeat_n(x, f.size(o)));
        }
        let action = c
            .morphism_ids()
            .map(|alpha| {
                let u = c.target(alpha);
                let mut row = Vec::new();
                for x in 0..base.size(u) {
                    let o = fs.object_of(u, x).expect("object");
                    let m = fs.morphism_of(o, alpha, fs.base.value(c.source(alpha)).identity(base.apply(alpha, x)));
                    let m = m.expect("morphism");
                    let s = fs.total.source(m);
                    row.extend((0..f.size(o)).map(|e| offset[&s] + f.apply(m, e)));
                }
                row
            })
            .collect();
        let total = SetValuedFunctor::new(c.clone(), Variance::Contravariant, projection.iter().map(Vec::len).collect(), action);
        OverPresheaf::new(base, total, projection)
    }

    /// Pullback along the section `x ∈ X(U)`, i.e. along `hom(−, U) → X`:
    /// elements at `V` are pairs `(y, β: V → U)` with `p(y) = β*(x)`.
    pub fn pullback_along_section(&self, u: ObjIx, x: usize) -> Result<OverPresheaf> {
        let c = self.base.base().clone();
        if u >= c.num_objects() || x >= self.base.size(u) {
            return Err(input_err!("no section {x} at object {u}"));
        }
        let rep = representable(&c, u);
        let homs: Vec<Vec<MorIx>> = c.objects().map(|v| c.hom(v, u).collect()).collect();
        let mut elements: Vec<Vec<(usize, usize)>> = Vec::with_capacity(c.num_objects());
        for v in c.objects() {
            let mut list = Vec::new();
            for (bi, &beta) in homs[v].iter().enumerate() {
                let bx = self.base.apply(beta, x);
                for y in 0..self.total.size(v) {
                    if self.projection[v][y] == bx {
                        list.push((y, bi));
                    }
                }
            }
            elements.push(list);
        }
        let action = c
            .morphism_ids()
            .map(|g| {
                let (w, v) = (c.source(g), c.target(g));
                elements[v]
                    .iter()
                    .map(|&(y, bi)| {
                        let key = (self.total.apply(g, y), rep.apply(g, bi));
                        elements[w].iter().position(|&k| k == key).expect("closed")
                    })
                    .collect()
            })
            .collect();
        let projection: Vec<Vec<usize>> = elements.iter().map(|l| l.iter().map(|&(_, b)| b).collect()).collect();
        let labels = c
            .objects()
            .map(|v| elements[v].iter().map(|&(y, bi)| format!("({},{})", self.total.label(v, y), rep.label(v, bi))).collect())
            .collect();
        let total = SetValuedFunctor::new(c.clone(), Variance::Contravariant, elements.iter().map(Vec::len).collect(), action)
            .with_labels(labels);
        OverPresheaf::new(rep, total, projection)
    }

    /// `maps[U][y]` is natural and commutes with the projections.
    pub fn is_morphism_to(&self, other: &OverPresheaf, maps: &[Vec<usize>]) -> bool {
        let c = self.base.base();
        if !same_data(&self.base, &other.base) {
            return false;
        }
        c.objects().all(|u| {
            maps[u].len() == self.total.size(u)
                && maps[u].iter().enumerate().all(|(y, &z)| z < other.total.size(u) && other.projection[u][z] == self.projection[u][y])
        }) && c.morphism_ids().all(|alpha| {
            let (v, u) = (c.source(alpha), c.target(alpha));
            (0..self.total.size(u)).all(|y| maps[v][self.total.apply(alpha, y)] == other.total.apply(alpha, maps[u][y]))
        })
    }
}

/// `ψ_!` of a presheaf over `Ob(A)`, with the pairs behind each element.
#[derive(Clone, Debug)]
pub struct PsiLeftAdjoint {
    pub diagram: EnrichedSetDiagram,
    /// `elements[U][y][i] = (e, m)` with `e` over `x` and `m: y → x`.
    pub elements: Vec<Vec<Vec<(usize, MorIx)>>>,
    index: Vec<Vec<BTreeMap<(usize, MorIx), usize>>>,
}

impl PsiLeftAdjoint {
    pub fn element(&self, u: ObjIx, y: ObjIx, e: usize, m: MorIx) -> Option<usize> {
        self.index[u][y].get(&(e, m)).copied()
    }

    /// Unit `X₀ → ψ*ψ_!X₀`, `e ↦ (e, id)`, as maps into the object
    /// restriction of [`diagram`](Self::diagram).
    pub fn unit(&self, x0: &OverPresheaf) -> Vec<Vec<usize>> {
        let base = self.diagram.base();
        let offsets = self.diagram.offsets();
        (0..x0.projection.len())
            .map(|u| {
                x0.projection[u]
                    .iter()
                    .enumerate()
                    .map(|(e, &x)| offsets[u][x] + self.element(u, x, e, base.value(u).identity(x)).expect("pair"))
                    .collect()
            })
            .collect()
    }
}

/// The left adjoint of [`EnrichedSetDiagram::object_restriction`]: the
/// value at `(U, y)` is the set of `(e, m)` with `e ∈ X₀(U)` over `x` and
/// `m: y → x`; `γ` acts by `m ↦ m ∘ γ`, `α` by restriction of both parts.
pub fn psi_left_adjoint(a: &Arc<PresheafOfCategories>, x0: &OverPresheaf) -> Result<PsiLeftAdjoint> {
    let ob = a.objects_presheaf();
    if !same_data(&ob, &x0.base) {
        return Err(input_err!("presheaf is not over the objects of the presheaf of categories"));
    }
    let c = a.site().clone();
    let mut elements = Vec::with_capacity(c.num_objects());
    let mut index = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let au = a.value(u);
        let mut per_y = Vec::new();
        let mut idx = Vec::new();
        for y in au.objects() {
            let mut list = Vec::new();
            for (e, &x) in x0.projection[u].iter().enumerate() {
                for m in au.hom(y, x) {
                    list.push((e, m));
                }
            }
            idx.push(list.iter().enumerate().map(|(i, &k)| (k, i)).collect::<BTreeMap<_, _>>());
            per_y.push(list);
        }
        elements.push(per_y);
        index.push(idx);
    }
    let sizes = elements.iter().map(|row| row.iter().map(Vec::len).collect()).collect();
    let category_action = c
        .objects()
        .map(|u| {
            let au = a.value(u);
            au.morphism_ids()
                .map(|g| {
                    let (s, t) = (au.source(g), au.target(g));
                    elements[u][t].iter().map(|&(e, m)| index[u][s][&(e, au.compose(m, g))]).collect()
                })
                .collect()
        })
        .collect();
    let site_action = c
        .morphism_ids()
        .map(|alpha| {
            let (v, u) = (c.source(alpha), c.target(alpha));
            a.value(u)
                .objects()
                .map(|y| {
                    let ay = a.restrict_obj(alpha, y);
                    elements[u][y]
                        .iter()
                        .map(|&(e, m)| index[v][ay][&(x0.total.apply(alpha, e), a.restrict_mor(alpha, m))])
                        .collect()
                })
                .collect()
        })
        .collect();
    let diagram = EnrichedSetDiagram::new(a.clone(), sizes, category_action, site_action)?;
    Ok(PsiLeftAdjoint { diagram, elements, index })
}

/// Counit `ψ_!ψ*F → F`, `(e, m) ↦ m*(e)`; `psi` must be `ψ_!` of the object
/// restriction of `f`.
pub fn psi_counit(psi: &PsiLeftAdjoint, f: &EnrichedSetDiagram) -> Vec<Vec<Vec<usize>>> {
    let base = f.base();
    let offsets = f.offsets();
    base.site()
        .objects()
        .map(|u| {
            base.value(u)
                .objects()
                .map(|y| {
                    psi.elements[u][y]
                        .iter()
                        .map(|&(e, m)| {
                            let x = base.value(u).target(m);
                            f.act(u, m, e - offsets[u][x])
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Result of checking the `ψ_! ⊣ ψ*` adjunction on one pair of objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiTriangles {
    pub unit_natural: bool,
    pub counit_natural: bool,
    /// `ε ψ_! ∘ ψ_! η = 1`.
    pub left: bool,
    /// `ψ* ε ∘ η ψ* = 1`.
    pub right: bool,
}

impl PsiTriangles {
    pub fn pass(&self) -> bool {
        self.unit_natural && self.counit_natural && self.left && self.right
    }
}

/// Check both triangle identities for `x0` and `f`.
pub fn check_psi_triangles(a: &Arc<PresheafOfCategories>, x0: &OverPresheaf, f: &EnrichedSetDiagram) -> Result<PsiTriangles> {
    let lx = psi_left_adjoint(a, x0)?;
    let unit = lx.unit(x0);
    let unit_natural = x0.is_morphism_to(&lx.diagram.object_restriction(), &unit);
    let rf = f.object_restriction();
    let lrf = psi_left_adjoint(a, &rf)?;
    let counit = psi_counit(&lrf, f);
    let counit_natural = lrf.diagram.is_morphism_to(f, &counit);
    // ψ_!η: ψ_!X₀ → ψ_!ψ*ψ_!X₀ sends (e, m) to (η(e), m), then the counit
    let rlx = lx.diagram.object_restriction();
    let llx = psi_left_adjoint(a, &rlx)?;
    let eps = psi_counit(&llx, &lx.diagram);
    let c = a.site();
    let left = c.objects().all(|u| {
        a.value(u).objects().all(|y| {
            lx.elements[u][y].iter().enumerate().all(|(i, &(e, m))| {
                let j = llx.element(u, y, unit[u][e], m).expect("pair");
                eps[u][y][j] == i
            })
        })
    });
    // ψ*ε ∘ ηψ*: e ↦ (e, id) ↦ id*(e)
    let unit_f = lrf.unit(&rf);
    let offsets = f.offsets();
    let right = c.objects().all(|u| {
        (0..rf.total.size(u)).all(|e| {
            let x = rf.projection[u][e];
            let j = unit_f[u][e] - lrf.diagram.offsets()[u][x];
            offsets[u][x] + counit[u][x][j] == e
        })
    });
    Ok(PsiTriangles { unit_natural, counit_natural, left, right })
}

/// `m*X`: `value(U, a) = X(U, m(a))` with both actions precomposed with `m`.
pub fn restrict_along(m: &MorphismOfPresheavesOfCategories, x: &EnrichedSetDiagram) -> Result<EnrichedSetDiagram> {
    if **x.base() != *m.cod {
        return Err(input_err!("diagram is not on the codomain of the morphism"));
    }
    let a = &m.dom;
    let c = a.site();
    let sizes = c
        .objects()
        .map(|u| a.value(u).objects().map(|o| x.size(u, m.components[u].obj(o))).collect())
        .collect();
    let category_action = c
        .objects()
        .map(|u| a.value(u).morphism_ids().map(|g| x.category_action[u][m.components[u].mor(g)].clone()).collect())
        .collect();
    let site_action = c
        .morphism_ids()
        .map(|alpha| {
            let u = c.target(alpha);
            a.value(u).objects().map(|o| x.site_action[alpha][m.components[u].obj(o)].clone()).collect()
        })
        .collect();
    EnrichedSetDiagram::new(m.dom.clone(), sizes, category_action, site_action)
}

/// `m_!Y` with the section-wise Kan extensions it was computed from.
#[derive(Clone, Debug)]
pub struct KanAlong {
    pub diagram: EnrichedSetDiagram,
    /// Kan extension along `m(U)^op` at each object of the site.
    pub sections: Vec<KanExtension>,
}

impl KanAlong {
    /// Class at `(U, b)` of `(a, h: b → m(a), e)`.
    pub fn class_of(&self, u: ObjIx, b: ObjIx, a: ObjIx, h: MorIx, e: usize) -> usize {
        self.sections[u].class_of(b, a, h, e)
    }

    /// Unit `Y → m*m_!Y`, `e ↦ [a, 1, e]`.
    pub fn unit(&self, m: &MorphismOfPresheavesOfCategories, y: &EnrichedSetDiagram) -> Vec<Vec<Vec<usize>>> {
        let c = m.dom.site();
        c.objects()
            .map(|u| {
                let mu = &m.components[u];
                m.dom
                    .value(u)
                    .objects()
                    .map(|a| {
                        let b = mu.obj(a);
                        let id = m.cod.value(u).identity(b);
                        (0..y.size(u, a)).map(|e| self.class_of(u, b, a, id, e)).collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// `m_!φ` for `φ: Y → Y'`, given `m_!Y'`.
    pub fn map_to(&self, phi: &[Vec<Vec<usize>>], target: &KanAlong) -> Vec<Vec<Vec<usize>>> {
        self.sections
            .iter()
            .enumerate()
            .map(|(u, kan)| {
                kan.colimits
                    .iter()
                    .enumerate()
                    .map(|(b, colim)| {
                        colim
                            .representatives
                            .iter()
                            .map(|&(o, e)| {
                                let (a, h) = kan.commas[b].objects[o];
                                target.class_of(u, b, a, h, phi[u][a][e])
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Counit `m_!m*X → X`, `[a, h, e] ↦ h*(e)`; `self` must be `m_!` of
    /// `m*X`.
    pub fn counit(&self, x: &EnrichedSetDiagram) -> Vec<Vec<Vec<usize>>> {
        self.sections
            .iter()
            .enumerate()
            .map(|(u, kan)| {
                kan.colimits
                    .iter()
                    .enumerate()
                    .map(|(b, colim)| {
                        colim
                            .representatives
                            .iter()
                            .map(|&(o, e)| {
                                let (_, h) = kan.commas[b].objects[o];
                                x.act(u, h, e)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// `m_!Y`, computed at each object `U` as the left Kan extension along
/// `m(U)^op: A(U)^op → B(U)^op`.
pub fn left_kan_along(m: &MorphismOfPresheavesOfCategories, y: &EnrichedSetDiagram) -> Result<KanAlong> {
    if **y.base() != *m.dom {
        return Err(input_err!("diagram is not on the domain of the morphism"));
    }
    let c = m.dom.site().clone();
    let mut sections = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let along = m.components[u].opposite();
        let f = SetValuedFunctor::new(
            along.dom().clone(),
            Variance::Covariant,
            y.sizes[u].clone(),
            y.category_action[u].clone(),
        );
        sections.push(left_kan_set(&along, &f)?);
    }
    let sizes = sections.iter().map(|k| k.functor.sizes().to_vec()).collect();
    let category_action = sections.iter().map(|k| k.functor.actions().to_vec()).collect();
    let site_action = c
        .morphism_ids()
        .map(|alpha| {
            let (v, u) = (c.source(alpha), c.target(alpha));
            let kan = &sections[u];
            m.cod
                .value(u)
                .objects()
                .map(|b| {
                    let ab = m.cod.restrict_obj(alpha, b);
                    kan.colimits[b]
                        .representatives
                        .iter()
                        .map(|&(o, e)| {
                            let (a, h) = kan.commas[b].objects[o];
                            let aa = m.dom.restrict_obj(alpha, a);
                            let ah = m.cod.restrict_mor(alpha, h);
                            sections[v].class_of(ab, aa, ah, y.restrict(alpha, a, e))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let diagram = EnrichedSetDiagram::new(m.cod.clone(), sizes, category_action, site_action)?;
    Ok(KanAlong { diagram, sections })
}

/// Result of checking `m_! ⊣ m*` on one pair of objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KanTriangles {
    pub unit_natural: bool,
    pub counit_natural: bool,
    pub left: bool,
    pub right: bool,
}

impl KanTriangles {
    pub fn pass(&self) -> bool {
        self.unit_natural && self.counit_natural && self.left && self.right
    }
}

pub fn check_kan_triangles(
    m: &MorphismOfPresheavesOfCategories,
    y: &EnrichedSetDiagram,
    x: &EnrichedSetDiagram,
) -> Result<KanTriangles> {
    let ly = left_kan_along(m, y)?;
    let rly = restrict_along(m, &ly.diagram)?;
    let unit_y = ly.unit(m, y);
    let unit_natural = y.is_morphism_to(&rly, &unit_y);
    let rx = restrict_along(m, x)?;
    let lrx = left_kan_along(m, &rx)?;
    let counit_x = lrx.counit(x);
    let counit_natural = lrx.diagram.is_morphism_to(x, &counit_x);
    // m_!Y → m_!m*m_!Y → m_!Y
    let lrly = left_kan_along(m, &rly)?;
    let first = ly.map_to(&unit_y, &lrly);
    let second = lrly.counit(&ly.diagram);
    let c = m.dom.site();
    let left = c.objects().all(|u| {
        first[u].iter().enumerate().all(|(b, row)| row.iter().enumerate().all(|(i, &j)| second[u][b][j] == i))
    });
    // m*X → m*m_!m*X → m*X
    let unit_rx = lrx.unit(m, &rx);
    let right = c.objects().all(|u| {
        m.dom.value(u).objects().all(|a| {
            let b = m.components[u].obj(a);
            (0..rx.size(u, a)).all(|e| counit_x[u][b][unit_rx[u][a][e]] == e)
        })
    });
    Ok(KanTriangles { unit_natural, counit_natural, left, right })
}
