use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::PresheafOfCategories;
use crate::error::{input_err, invalid, Result};
use crate::fincat::{FiniteCategory, Functor, MorIx, Morphism};
use crate::site::Presheaf;

/// A diagram of presheaves `i ↦ Y_i` indexed by a finite category, with the
/// transition maps `θ_*: Y_i → Y_j` given section by section.
#[derive(Clone, Debug)]
pub struct TranslationData {
    pub index: Arc<FiniteCategory>,
    pub presheaves: Vec<Presheaf>,
    /// `transitions[θ][U][x]` is `θ_*(x)`.
    pub transitions: Vec<Vec<Vec<usize>>>,
}

impl TranslationData {
    /// Every presheaf on the same site, `θ_*` natural and functorial in `θ`.
    pub fn validate(&self) -> Result<()> {
        let i = &*self.index;
        if self.presheaves.len() != i.num_objects() || self.transitions.len() != i.num_morphisms() {
            return Err(input_err!("need one presheaf per index and one map per index morphism"));
        }
        let c = self.presheaves.first().map(|p| p.base().clone());
        for p in &self.presheaves {
            if c.as_deref() != Some(&**p.base()) {
                return Err(input_err!("presheaves live on different sites"));
            }
            p.validate()?;
        }
        let Some(c) = c else { return Ok(()) };
        for t in i.morphism_ids() {
            let (a, b) = (&self.presheaves[i.source(t)], &self.presheaves[i.target(t)]);
            for u in c.objects() {
                let row = &self.transitions[t][u];
                if row.len() != a.size(u) || row.iter().any(|&y| y >= b.size(u)) {
                    return Err(input_err!("map {} has the wrong shape at {}", i.morphism_name(t), c.object_name(u)));
                }
            }
            for alpha in c.morphism_ids() {
                let (v, u) = (c.source(alpha), c.target(alpha));
                for x in 0..a.size(u) {
                    if self.transitions[t][v][a.apply(alpha, x)] != b.apply(alpha, self.transitions[t][u][x]) {
                        return Err(invalid!(
                            "map {} is not natural along {}",
                            i.morphism_name(t),
                            c.morphism_name(alpha)
                        ));
                    }
                }
            }
        }
        for o in i.objects() {
            let id = i.identity(o);
            if self.transitions[id].iter().any(|row| row.iter().enumerate().any(|(x, &y)| x != y)) {
                return Err(invalid!("identity {} does not act trivially", i.morphism_name(id)));
            }
        }
        for f in i.morphism_ids() {
            for g in i.out_of(i.target(f)) {
                let gf = i.compose(g, f);
                for u in c.objects() {
                    let ok = self.transitions[f][u]
                        .iter()
                        .enumerate()
                        .all(|(x, &y)| self.transitions[gf][u][x] == self.transitions[g][u][y]);
                    if !ok {
                        return Err(invalid!("maps are not functorial at {}", i.morphism_name(gf)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The presheaf of translation categories: `EY(U)` has objects `(i, x)`
/// with `x ∈ Y_i(U)` and morphisms `θ: (i, x) → (j, θ_*x)`.
pub fn make_translation_presheaf(data: &TranslationData) -> Result<PresheafOfCategories> {
    data.validate()?;
    let i = &*data.index;
    let site = data
        .presheaves
        .first()
        .map(|p| p.base().clone())
        .ok_or_else(|| input_err!("index category has no objects"))?;
    let mut values = Vec::with_capacity(site.num_objects());
    // object and morphism numbering per U
    let mut obj_ids: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut mor_ids: Vec<Vec<Vec<usize>>> = Vec::new();
    for u in site.objects() {
        let mut names: Vec<String> = Vec::new();
        let mut ids = Vec::new();
        for o in i.objects() {
            let p = &data.presheaves[o];
            ids.push((0..p.size(u)).map(|x| {
                names.push(format!("{}:{}", i.object_name(o), p.label(u, x)));
                names.len() - 1
            }).collect::<Vec<_>>());
        }
        let mut records = Vec::new();
        let mut mids: Vec<Vec<MorIx>> = Vec::new();
        for t in i.morphism_ids() {
            let (a, b) = (i.source(t), i.target(t));
            let p = &data.presheaves[a];
            mids.push(
                (0..p.size(u))
                    .map(|x| {
                        records.push(Morphism {
                            name: format!("{}:{}", i.morphism_name(t), p.label(u, x)),
                            source: ids[a][x],
                            target: ids[b][data.transitions[t][u][x]],
                        });
                        records.len() - 1
                    })
                    .collect(),
            );
        }
        let m = records.len();
        let mut compose = alloc::vec![None; m * m];
        for f in i.morphism_ids() {
            for g in i.out_of(i.target(f)) {
                let gf = i.compose(g, f);
                for x in 0..data.presheaves[i.source(f)].size(u) {
                    let y = data.transitions[f][u][x];
                    compose[mids[g][y] * m + mids[f][x]] = Some(mids[gf][x]);
                }
            }
        }
        let mut identity = alloc::vec![0; names.len()];
        for o in i.objects() {
            for (x, &id) in ids[o].iter().enumerate() {
                identity[id] = mids[i.identity(o)][x];
            }
        }
        let cat = FiniteCategory::from_parts(format!("EY({})", site.object_name(u)), names, records, identity, compose);
        values.push(Arc::new(cat));
        obj_ids.push(ids);
        mor_ids.push(mids);
    }
    let restrictions = site
        .morphism_ids()
        .map(|alpha| {
            let (v, u) = (site.source(alpha), site.target(alpha));
            let mut objects = alloc::vec![0; values[u].num_objects()];
            let mut morphisms = alloc::vec![0; values[u].num_morphisms()];
            for o in i.objects() {
                let p = &data.presheaves[o];
                for x in 0..p.size(u) {
                    objects[obj_ids[u][o][x]] = obj_ids[v][o][p.apply(alpha, x)];
                }
            }
            for t in i.morphism_ids() {
                let p = &data.presheaves[i.source(t)];
                for x in 0..p.size(u) {
                    morphisms[mor_ids[u][t][x]] = mor_ids[v][t][p.apply(alpha, x)];
                }
            }
            Functor::new(values[u].clone(), values[v].clone(), objects, morphisms)
        })
        .collect();
    PresheafOfCategories::new(site, values, restrictions)?.checked()
}
