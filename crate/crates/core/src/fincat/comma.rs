use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{CategoryBuilder, FiniteCategory, Functor, MorIx, ObjIx};
use crate::error::{input_err, Result};

/// The comma category `f / y` together with its forgetful functor to the
/// domain of `f`.
#[derive(Clone, Debug)]
pub struct CommaCategory {
    pub category: Arc<FiniteCategory>,
    /// Object `i` is the pair `(x, h: f(x) -> y)`.
    pub objects: Vec<(ObjIx, MorIx)>,
    /// Underlying morphism of the domain for each comma morphism.
    pub underlying: Vec<MorIx>,
    pub projection: Functor,
}

impl CommaCategory {
    pub fn object_of(&self, x: ObjIx, h: MorIx) -> Option<ObjIx> {
        self.objects.iter().position(|&p| p == (x, h))
    }
}

/// Objects `(x, h: f(x) -> y)`; morphisms `(x,h) -> (x',h')` are the `m: x -> x'`
/// with `h' ∘ f(m) = h`, composed as in the domain.
pub fn comma_category(f: &Functor, y: ObjIx) -> Result<CommaCategory> {
    let (d, c) = (f.dom(), f.cod());
    if y >= c.num_objects() {
        return Err(input_err!("object {y} is not in {}", c.name()));
    }
    let mut builder = CategoryBuilder::new(&format!("{}/{}", d.name(), c.object_name(y)));
    let mut objects = Vec::new();
    let mut index = BTreeMap::new();
    for x in d.objects() {
        for h in c.hom(f.obj(x), y) {
            let o = builder.add_object_with_identity(
                &format!("({}|{})", d.object_name(x), c.morphism_name(h)),
                &format!("({}|{})", d.morphism_name(d.identity(x)), c.morphism_name(h)),
            );
            index.insert((x, h), o);
            objects.push((x, h));
        }
    }
    let mut underlying: Vec<MorIx> = objects.iter().map(|&(x, _)| d.identity(x)).collect();
    // comma morphism id keyed by (source comma object, underlying morphism)
    let mut mor_index = BTreeMap::new();
    for (o, &(x, _)) in objects.iter().enumerate() {
        mor_index.insert((o, d.identity(x)), builder.identity(o));
    }
    for (o, &(x, h)) in objects.iter().enumerate() {
        for m in d.out_of(x) {
            if d.is_identity(m) {
                continue;
            }
            let x2 = d.target(m);
            for h2 in c.hom(f.obj(x2), y) {
                if c.compose(h2, f.mor(m)) == h {
                    let target = index[&(x2, h2)];
                    let id = builder.add_morphism(
                        &format!("({}|{})", d.morphism_name(m), c.morphism_name(h)),
                        o,
                        target,
                    );
                    mor_index.insert((o, m), id);
                    underlying.push(m);
                }
            }
        }
    }
    // composites are inherited from the domain
    let pairs: Vec<((ObjIx, MorIx), MorIx)> = mor_index.iter().map(|(&k, &v)| (k, v)).collect();
    for &((o1, m1), id1) in &pairs {
        let mid = builder.morphism(id1).target;
        for &((o2, m2), id2) in &pairs {
            if o2 != mid {
                continue;
            }
            let composite = mor_index[&(o1, d.compose(m2, m1))];
            builder.set_composite(id2, id1, composite);
        }
    }
    let category = Arc::new(builder.build());
    let projection = Functor::new(
        category.clone(),
        d.clone(),
        objects.iter().map(|&(x, _)| x).collect(),
        underlying.clone(),
    );
    Ok(CommaCategory { category, objects, underlying, projection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::pi0;

    #[test]
    fn comma_of_point() {
        let pt = Arc::new(FiniteCategory::terminal());
        let comma = comma_category(&Functor::identity(pt), 0).unwrap();
        assert_eq!((comma.category.num_objects(), comma.category.num_morphisms()), (1, 1));
    }

    #[test]
    fn comma_of_z2_over_itself() {
        let z2 = Arc::new(FiniteCategory::cyclic_group(2));
        let comma = comma_category(&Functor::identity(z2), 0).unwrap();
        let k = &comma.category;
        assert!(k.validate().is_empty());
        assert_eq!((k.num_objects(), k.num_morphisms()), (2, 4));
        assert_eq!(pi0(k).classes.len(), 1);
        assert!(k.is_groupoid());
        assert!(comma.projection.validate().is_empty());
    }

    #[test]
    fn comma_rejects_foreign_object() {
        let pt = Arc::new(FiniteCategory::terminal());
        assert!(comma_category(&Functor::identity(pt), 3).is_err());
    }

    #[test]
    fn slice_of_chain() {
        let c = Arc::new(FiniteCategory::chain(3));
        let slice = comma_category(&Functor::identity(c), 1).unwrap();
        // objects over 1: 0->1 and id_1
        assert_eq!(slice.category.num_objects(), 2);
        assert!(slice.category.validate().is_empty());
    }
}
