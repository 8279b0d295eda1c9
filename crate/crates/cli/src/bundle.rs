//! Parsed and validated input files.

use std::sync::Arc;

use fibsite_core::cohom::AbelianPresheaf;
use fibsite_core::fibred::{
    grothendieck_construct, induced_topology, FibredSite, MorphismOfPresheavesOfCategories, PresheafOfCategories,
    PresheafOfGroupoids,
};
use fibsite_core::fincat::{FiniteCategory, MorIx, ObjIx};
use fibsite_core::site::{sieve_from_generators, GrothendieckTopology, Presheaf, Sieve, SiteCaps};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub path: String,
    /// Hex SHA-256 of the file contents.
    pub sha256: String,
}

/// A category as written, with the inverse pairs it declared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryDecl {
    pub category: Arc<FiniteCategory>,
    pub inverses: Vec<(MorIx, MorIx)>,
}

impl CategoryDecl {
    pub fn name(&self) -> &str {
        self.category.name()
    }
}

/// A top-level category with its covering sieves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteDecl {
    pub decl: CategoryDecl,
    /// Generators of each declared covering sieve.
    pub covers: Vec<(ObjIx, Vec<MorIx>)>,
    /// Close the declared covers under the topology axioms instead of taking
    /// them literally.
    pub generated: bool,
}

impl SiteDecl {
    pub fn name(&self) -> &str {
        self.decl.name()
    }

    pub fn category(&self) -> &Arc<FiniteCategory> {
        &self.decl.category
    }

    pub fn sieves(&self) -> CliResult<Vec<Sieve>> {
        let c = self.category();
        self.covers.iter().map(|(u, gens)| Ok(sieve_from_generators(c, *u, gens)?)).collect()
    }

    /// Declared sieves plus the maximal ones, or their closure.
    pub fn topology(&self) -> CliResult<GrothendieckTopology> {
        let c = self.category().clone();
        let sieves = self.sieves()?;
        if self.generated {
            return Ok(GrothendieckTopology::generated(c, &sieves, &SiteCaps::default())?);
        }
        let mut covers: Vec<Vec<Sieve>> = c.objects().map(|u| vec![Sieve::maximal(&c, u)]).collect();
        for s in sieves {
            covers[s.base()].push(s);
        }
        Ok(GrothendieckTopology::from_covers(c, covers))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionDecl {
    pub decl: CategoryDecl,
    /// Name of the top-level category this section refers to, if any.
    pub shared: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsheafDecl {
    pub name: String,
    pub site: String,
    pub sections: Vec<SectionDecl>,
    pub presheaf: Arc<PresheafOfCategories>,
}

impl PsheafDecl {
    pub fn groupoids(&self) -> CliResult<PresheafOfGroupoids> {
        PresheafOfGroupoids::new((*self.presheaf).clone())
            .map_err(|e| CliError::validation(format!("{} is not a presheaf of groupoids: {e}", self.name)))
    }

    pub fn fibred(&self) -> CliResult<FibredSite> {
        Ok(grothendieck_construct(&self.presheaf)?)
    }
}

/// A presheaf of finite sets; element names are kept as labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafDecl {
    pub name: String,
    pub over: String,
    pub presheaf: Presheaf,
}

/// Abelian coefficients; `groups[x]` lists the cyclic factors at `x`, `0`
/// standing for `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianDecl {
    pub name: String,
    pub over: String,
    pub groups: Vec<Vec<u64>>,
    pub presheaf: AbelianPresheaf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDecl {
    pub name: String,
    pub dom: String,
    pub cod: String,
    pub morphism: MorphismOfPresheavesOfCategories,
}

/// Everything declared across a set of input files. Equality ignores
/// provenance.
#[derive(Clone, Debug, Default)]
pub struct Bundle {
    pub sources: Vec<Source>,
    pub sites: Vec<SiteDecl>,
    pub psheaves: Vec<PsheafDecl>,
    pub presheaves: Vec<PresheafDecl>,
    pub abelian: Vec<AbelianDecl>,
    pub maps: Vec<MapDecl>,
}

impl PartialEq for Bundle {
    fn eq(&self, other: &Self) -> bool {
        self.sites == other.sites
            && self.psheaves == other.psheaves
            && self.presheaves == other.presheaves
            && self.abelian == other.abelian
            && self.maps == other.maps
    }
}

/// A category something can live over: a declared site or the total
/// category `S/A` of a presheaf of categories on it.
#[derive(Clone, Debug)]
pub enum Base<'a> {
    Site(&'a SiteDecl),
    Total { psheaf: &'a PsheafDecl, site: &'a SiteDecl, fibred: FibredSite },
}

impl Base<'_> {
    pub fn category(&self) -> &Arc<FiniteCategory> {
        match self {
            Base::Site(s) => s.category(),
            Base::Total { fibred, .. } => &fibred.total,
        }
    }

    /// The declared topology, or the one induced on the total category.
    pub fn topology(&self) -> CliResult<GrothendieckTopology> {
        match self {
            Base::Site(s) => s.topology(),
            Base::Total { site, fibred, .. } => {
                Ok(induced_topology(fibred, &site.topology()?, &SiteCaps::relaxed())?)
            }
        }
    }

    /// Topology of the underlying base site.
    pub fn site_topology(&self) -> CliResult<GrothendieckTopology> {
        match self {
            Base::Site(s) | Base::Total { site: s, .. } => s.topology(),
        }
    }
}

impl Bundle {
    pub fn site(&self, name: &str) -> Option<&SiteDecl> {
        self.sites.iter().find(|s| s.name() == name)
    }

    pub fn psheaf(&self, name: &str) -> Option<&PsheafDecl> {
        self.psheaves.iter().find(|p| p.name == name)
    }

    pub fn presheaf(&self, name: &str) -> Option<&PresheafDecl> {
        self.presheaves.iter().find(|p| p.name == name)
    }

    pub fn abelian(&self, name: &str) -> Option<&AbelianDecl> {
        self.abelian.iter().find(|p| p.name == name)
    }

    pub fn map(&self, name: &str) -> Option<&MapDecl> {
        self.maps.iter().find(|m| m.name == name)
    }

    /// Resolve `S` or `S/A`. `None` if nothing of that name exists.
    pub fn base(&self, name: &str) -> Option<CliResult<Base<'_>>> {
        if let Some(s) = self.site(name) {
            return Some(Ok(Base::Site(s)));
        }
        let (site_name, psheaf_name) = name.rsplit_once('/')?;
        let psheaf = self.psheaf(psheaf_name)?;
        if psheaf.site != site_name {
            return None;
        }
        let site = self.site(site_name)?;
        Some(psheaf.fibred().map(|fibred| Base::Total { psheaf, site, fibred }))
    }
}
