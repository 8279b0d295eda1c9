use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{category_cohomology, AbelianPresheaf};
use crate::error::{input_err, Error, Result};
use crate::fibred::{grothendieck_construct, MorphismOfPresheavesOfCategories, PresheafOfGroupoids};
use crate::fincat::{comma_category, FiniteCategory, Functor, MorIx, ObjIx};
use crate::site::{GrothendieckTopology, Sieve};
use crate::sset::FgAbelianGroup;

fn require_trivial(t: &GrothendieckTopology) -> Result<()> {
    if t.is_trivial() {
        Ok(())
    } else {
        Err(Error::Refused(String::from(
            "exact cohomology is only available for the trivial topology; use Čech cohomology of a covering sieve",
        )))
    }
}

/// `H^n(C/G; F)` for `n = 0..=top`, with `F` a presheaf on the total
/// category of `G`. Only the trivial topology is supported.
pub fn stack_cohomology(
    t: &GrothendieckTopology,
    g: &PresheafOfGroupoids,
    f: &AbelianPresheaf,
    top: usize,
) -> Result<Vec<FgAbelianGroup>> {
    require_trivial(t)?;
    if **t.site() != **g.site() {
        return Err(input_err!("topology and groupoids live on different sites"));
    }
    let fs = grothendieck_construct(&Arc::new(g.inner().clone()))?;
    if *fs.total != **f.base() {
        return Err(input_err!("coefficients are not defined on {}", fs.total.name()));
    }
    category_cohomology(f, top)
}

/// The members of `s` as a full subcategory of the slice over its base,
/// with the underlying object and morphism of the site for each object and
/// morphism.
pub fn cech_nerve_category(s: &Sieve, site: &Arc<FiniteCategory>) -> Result<(FiniteCategory, Vec<ObjIx>, Vec<MorIx>)> {
    let slice = comma_category(&Functor::identity(site.clone()), s.base())?;
    let keep: Vec<ObjIx> = slice
        .objects
        .iter()
        .enumerate()
        .filter(|(_, (_, h))| s.contains(*h))
        .map(|(o, _)| o)
        .collect();
    let name = format!("{}|{}", site.object_name(s.base()), s.describe(site));
    let (sub, old_of_new) = slice.category.full_subcategory(&name, &keep);
    let objects = keep.iter().map(|&o| slice.objects[o].0).collect();
    let morphisms = old_of_new.iter().map(|&m| slice.underlying[m]).collect();
    Ok((sub, objects, morphisms))
}

/// Cohomology of the category of members of the covering sieve `s` on `u`
/// with coefficients `F` restricted to it. `H^0` is the group of matching
/// families.
pub fn cech_cohomology(
    t: &GrothendieckTopology,
    u: ObjIx,
    s: &Sieve,
    f: &AbelianPresheaf,
    top: usize,
) -> Result<Vec<FgAbelianGroup>> {
    if s.base() != u {
        return Err(input_err!("sieve is not on {}", t.site().object_name(u)));
    }
    if !t.is_covering(s) {
        return Err(input_err!("sieve {} is not covering", s.describe(t.site())));
    }
    if **f.base() != **t.site() {
        return Err(input_err!("coefficients are not defined on {}", t.site().name()));
    }
    let (cat, objects, morphisms) = cech_nerve_category(s, t.site())?;
    let cat = Arc::new(cat);
    let relations = objects.iter().map(|&x| f.relations(x).clone()).collect();
    let restriction = morphisms.iter().map(|&m| f.restriction(m).clone()).collect();
    let restricted = AbelianPresheaf::new(cat, relations, restriction)?;
    category_cohomology(&restricted, top)
}

/// Cohomology of both total categories, degree by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    /// `H^n(C/H; F)`.
    pub target: Vec<FgAbelianGroup>,
    /// `H^n(C/G; m*F)`.
    pub source: Vec<FgAbelianGroup>,
}

impl InvarianceReport {
    pub fn pass(&self) -> bool {
        self.target == self.source
    }

    /// Degrees where the two sides differ.
    pub fn mismatches(&self) -> Vec<usize> {
        (0..self.target.len()).filter(|&n| self.target[n] != self.source[n]).collect()
    }
}

/// Compare `H^*(C/H; F)` with `H^*(C/G; m*F)` for a sectionwise equivalence
/// `m: G → H`.
pub fn invariance_report(
    m: &MorphismOfPresheavesOfCategories,
    t: &GrothendieckTopology,
    f: &AbelianPresheaf,
    top: usize,
) -> Result<InvarianceReport> {
    require_trivial(t)?;
    if !m.is_sectionwise_equivalence() {
        return Err(Error::Refused(String::from("the morphism is not a sectionwise equivalence")));
    }
    let fs_g = grothendieck_construct(&m.dom)?;
    let fs_h = grothendieck_construct(&m.cod)?;
    if *fs_h.total != **f.base() {
        return Err(input_err!("coefficients are not defined on {}", fs_h.total.name()));
    }
    let phi = fs_g.induced_functor(m, &fs_h)?;
    let pulled = f.restrict_along(&phi)?;
    Ok(InvarianceReport { target: category_cohomology(f, top)?, source: category_cohomology(&pulled, top)? })
}
