//! Line-oriented bundle format.
//!
//! ```text
//! category C
//! objects V U
//! mor a : V -> U
//! cover U = { a }
//!
//! psheaf-cat G over C
//! at U category Z2
//! objects *
//! mor t : * -> *
//! compose t.t = id_*
//! inverse t = t
//! at V category Z2
//! restrict a : functor * -> * ; t -> t
//!
//! abpresheaf F over C/G
//! constant Z/2
//! ```

use std::path::Path;
use std::sync::Arc;

use fibsite_core::cohom::AbelianPresheaf;
use fibsite_core::fibred::{MorphismOfPresheavesOfCategories, PresheafOfCategories};
use fibsite_core::fincat::{CategoryBuilder, FiniteCategory, Functor, MorIx, ObjIx, Variance};
use fibsite_core::site::{sieve_from_generators, Presheaf};
use fibsite_core::sset::IntegerMatrix;
use sha2::{Digest, Sha256};

use crate::bundle::{
    AbelianDecl, Bundle, CategoryDecl, MapDecl, PresheafDecl, PsheafDecl, SectionDecl, SiteDecl, Source,
};
use crate::error::{CliError, CliResult, Location};

/// Read, parse and validate a set of files. Names declared in one file are
/// visible in the files after it.
pub fn parse_files<P: AsRef<Path>>(paths: &[P]) -> CliResult<Bundle> {
    let mut sources = Vec::new();
    for p in paths {
        let path = p.as_ref().display().to_string();
        let text = std::fs::read_to_string(p.as_ref())
            .map_err(|e| CliError::Io { path: path.clone(), message: e.to_string() })?;
        sources.push((path, text));
    }
    parse_sources(&sources)
}

/// Parse one in-memory file.
pub fn parse_str(file: &str, text: &str) -> CliResult<Bundle> {
    parse_sources(&[(file.to_string(), text.to_string())])
}

/// Parse `(name, contents)` pairs in order.
pub fn parse_sources(sources: &[(String, String)]) -> CliResult<Bundle> {
    let mut parser = Parser { file: String::new(), bundle: Bundle::default(), open: Open::Nothing };
    for (name, text) in sources {
        parser.file = name.clone();
        parser.bundle.sources.push(Source { path: name.clone(), sha256: sha256_hex(text.as_bytes()) });
        for (i, raw) in text.lines().enumerate() {
            let toks = tokenize(raw);
            if toks.is_empty() {
                continue;
            }
            parser.line(&Line { no: i + 1, raw, toks })?;
        }
        parser.close()?;
    }
    Ok(parser.bundle)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug)]
struct Tok {
    text: String,
    col: usize,
    start: usize,
}

struct Line<'a> {
    no: usize,
    raw: &'a str,
    toks: Vec<Tok>,
}

fn tokenize(line: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut cur: Option<Tok> = None;
    for (col0, (i, ch)) in line.char_indices().enumerate() {
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() || matches!(ch, '{' | '}' | ';') {
            out.extend(cur.take());
            if !ch.is_whitespace() {
                out.push(Tok { text: ch.to_string(), col: col0 + 1, start: i });
            }
        } else {
            match &mut cur {
                Some(t) => t.text.push(ch),
                None => cur = Some(Tok { text: ch.to_string(), col: col0 + 1, start: i }),
            }
        }
    }
    out.extend(cur);
    out
}

#[derive(Clone, Debug)]
struct Pair {
    from: String,
    from_at: Location,
    to: String,
    to_at: Location,
}

struct CatDraft {
    name: String,
    at: Location,
    builder: CategoryBuilder,
    inverses: Vec<(MorIx, MorIx)>,
    touched: bool,
}

impl CatDraft {
    fn new(name: &str, at: Location) -> Self {
        CatDraft { name: name.to_string(), at, builder: CategoryBuilder::new(name), inverses: Vec::new(), touched: false }
    }

    fn finish(self) -> CliResult<CategoryDecl> {
        let c = self.builder.build();
        let violations = c.validate();
        if !violations.is_empty() {
            let shown: Vec<String> = violations.iter().take(5).map(ToString::to_string).collect();
            return Err(CliError::Validation {
                at: Some(self.at),
                message: format!("category {}: {}", self.name, shown.join("; ")),
            });
        }
        for &(f, g) in &self.inverses {
            let (a, b) = (c.source(f), c.target(f));
            let checks = [(g, f, a), (f, g, b)];
            for (p, q, o) in checks {
                let got = c.try_compose(p, q);
                if got != Some(c.identity(o)) {
                    let shown = got.map_or("undefined".to_string(), |h| c.morphism_name(h).to_string());
                    return Err(CliError::Validation {
                        at: Some(self.at),
                        message: format!(
                            "category {}: inverse law fails for {} = {}: {}.{} = {}, expected {}",
                            self.name,
                            c.morphism_name(f),
                            c.morphism_name(g),
                            c.morphism_name(p),
                            c.morphism_name(q),
                            shown,
                            c.morphism_name(c.identity(o))
                        ),
                    });
                }
            }
        }
        Ok(CategoryDecl { category: Arc::new(c), inverses: self.inverses })
    }
}

struct SiteDraft {
    cat: CatDraft,
    covers: Vec<(ObjIx, Vec<MorIx>, Location)>,
    generated: bool,
}

struct PsheafDraft {
    name: String,
    site_name: String,
    site: Arc<FiniteCategory>,
    at: Location,
    sections: Vec<Option<SectionDecl>>,
    inline: Option<(ObjIx, CatDraft)>,
    restrictions: Vec<Option<(Location, Vec<Pair>)>>,
}

struct PresheafDraft {
    name: String,
    over: String,
    base: Arc<FiniteCategory>,
    at: Location,
    labels: Vec<Option<Vec<String>>>,
    constant: Option<Vec<String>>,
    restrictions: Vec<Option<(Location, Vec<Pair>)>>,
}

struct AbelianDraft {
    name: String,
    over: String,
    base: Arc<FiniteCategory>,
    at: Location,
    groups: Vec<Option<Vec<u64>>>,
    constant: Option<Vec<u64>>,
    matrices: Vec<Option<(Location, Vec<Vec<i64>>)>>,
}

struct MapDraft {
    name: String,
    dom_name: String,
    cod_name: String,
    dom: Arc<PresheafOfCategories>,
    cod: Arc<PresheafOfCategories>,
    at: Location,
    components: Vec<Option<(Location, Vec<Pair>)>>,
}

enum Open {
    Nothing,
    Site(SiteDraft),
    Psheaf(PsheafDraft),
    Presheaf(PresheafDraft),
    Abelian(AbelianDraft),
    Map(MapDraft),
}

struct Parser {
    file: String,
    bundle: Bundle,
    open: Open,
}

impl Parser {
    fn loc(&self, line: &Line, tok: &Tok) -> Location {
        Location { file: self.file.clone(), line: line.no, column: tok.col }
    }

    fn end_loc(&self, line: &Line) -> Location {
        Location { file: self.file.clone(), line: line.no, column: line.raw.chars().count() + 1 }
    }

    fn syntax(&self, line: &Line, i: usize, message: impl Into<String>) -> CliError {
        match line.toks.get(i) {
            Some(t) => CliError::Syntax { at: self.loc(line, t), token: t.text.clone(), message: message.into() },
            None => CliError::Syntax { at: self.end_loc(line), token: "end of line".into(), message: message.into() },
        }
    }

    fn unresolved(&self, line: &Line, i: usize, message: impl Into<String>) -> CliError {
        let t = &line.toks[i];
        CliError::Unresolved { at: self.loc(line, t), token: t.text.clone(), message: message.into() }
    }

    fn tok<'l>(&self, line: &'l Line, i: usize, what: &str) -> CliResult<&'l str> {
        line.toks.get(i).map(|t| t.text.as_str()).ok_or_else(|| self.syntax(line, i, format!("expected {what}")))
    }

    fn expect(&self, line: &Line, i: usize, lit: &str) -> CliResult<()> {
        match line.toks.get(i) {
            Some(t) if t.text == lit => Ok(()),
            _ => Err(self.syntax(line, i, format!("expected `{lit}`"))),
        }
    }

    fn no_more(&self, line: &Line, i: usize) -> CliResult<()> {
        if i < line.toks.len() {
            return Err(self.syntax(line, i, "unexpected token"));
        }
        Ok(())
    }

    fn line(&mut self, line: &Line) -> CliResult<()> {
        let kw = line.toks[0].text.as_str();
        match kw {
            "category" => self.category(line),
            "objects" | "identity" | "mor" | "compose" | "inverse" => self.category_body(line),
            "cover" | "topology" => self.site_body(line),
            "psheaf-cat" => self.psheaf_cat(line),
            "presheaf" | "abpresheaf" => self.presheaf(line, kw == "abpresheaf"),
            "psheaf-map" => self.psheaf_map(line),
            "at" => self.at(line),
            "restrict" => self.restrict(line),
            "constant" => self.constant(line),
            _ => Err(self.syntax(line, 0, "unknown keyword")),
        }
    }

    fn close(&mut self) -> CliResult<()> {
        match std::mem::replace(&mut self.open, Open::Nothing) {
            Open::Nothing => Ok(()),
            Open::Site(d) => self.finish_site(d),
            Open::Psheaf(d) => self.finish_psheaf(d),
            Open::Presheaf(d) => self.finish_presheaf(d),
            Open::Abelian(d) => self.finish_abelian(d),
            Open::Map(d) => self.finish_map(d),
        }
    }

    fn category(&mut self, line: &Line) -> CliResult<()> {
        self.close()?;
        let name = self.tok(line, 1, "a category name")?;
        self.no_more(line, 2)?;
        if self.bundle.site(name).is_some() {
            return Err(self.duplicate(line, 1, "category"));
        }
        let at = self.loc(line, &line.toks[0]);
        self.open = Open::Site(SiteDraft { cat: CatDraft::new(name, at), covers: Vec::new(), generated: false });
        Ok(())
    }

    fn duplicate(&self, line: &Line, i: usize, what: &str) -> CliError {
        CliError::Validation {
            at: Some(self.loc(line, &line.toks[i])),
            message: format!("{what} {} is declared twice", line.toks[i].text),
        }
    }

    fn current_category(&mut self) -> Option<&mut CatDraft> {
        match &mut self.open {
            Open::Site(d) => Some(&mut d.cat),
            Open::Psheaf(PsheafDraft { inline: Some((_, d)), .. }) => Some(d),
            _ => None,
        }
    }

    fn category_body(&mut self, line: &Line) -> CliResult<()> {
        let cx = Parser { file: self.file.clone(), bundle: Bundle::default(), open: Open::Nothing };
        let draft = match self.current_category() {
            Some(d) => d,
            None => return Err(cx.syntax(line, 0, "no category is open")),
        };
        cx.category_line(line, draft)
    }

    fn category_line(&self, line: &Line, draft: &mut CatDraft) -> CliResult<()> {
        let kw = line.toks[0].text.as_str();
        draft.touched = true;
        let obj = |p: &Parser, d: &CatDraft, i: usize| -> CliResult<ObjIx> {
            let name = p.tok(line, i, "an object")?;
            d.builder.object_index(name).ok_or_else(|| p.unresolved(line, i, format!("no object of {}", d.name)))
        };
        let mor = |p: &Parser, d: &CatDraft, i: usize| -> CliResult<MorIx> {
            let name = p.tok(line, i, "a morphism")?;
            d.builder.morphism_index(name).ok_or_else(|| p.unresolved(line, i, format!("no morphism of {}", d.name)))
        };
        match kw {
            "objects" => {
                for i in 1..line.toks.len() {
                    let name = &line.toks[i].text;
                    if draft.builder.object_index(name).is_some() {
                        return Err(self.duplicate(line, i, "object"));
                    }
                    draft.builder.add_object(name);
                }
            }
            "identity" => {
                // identity NAME : OBJECT
                let name = self.tok(line, 1, "an identity name")?.to_string();
                self.expect(line, 2, ":")?;
                let o = obj(self, draft, 3)?;
                self.no_more(line, 4)?;
                let id = draft.builder.identity(o);
                draft.builder.rename_morphism(id, &name);
            }
            "mor" => {
                // mor f : a -> b
                let name = self.tok(line, 1, "a morphism name")?.to_string();
                self.expect(line, 2, ":")?;
                let a = obj(self, draft, 3)?;
                self.expect(line, 4, "->")?;
                let b = obj(self, draft, 5)?;
                self.no_more(line, 6)?;
                if draft.builder.morphism_index(&name).is_some() {
                    return Err(self.duplicate(line, 1, "morphism"));
                }
                draft.builder.add_morphism(&name, a, b);
            }
            "compose" => {
                // compose g.f = h
                let gf = self.tok(line, 1, "g.f")?;
                if !gf.contains('.') {
                    return Err(self.syntax(line, 1, "expected g.f"));
                }
                let split = gf.match_indices('.').find_map(|(i, _)| {
                    let (g, f) = (&gf[..i], &gf[i + 1..]);
                    Some((draft.builder.morphism_index(g)?, draft.builder.morphism_index(f)?))
                });
                let Some((g, f)) = split else {
                    return Err(self.unresolved(line, 1, format!("no composable pair of morphisms of {}", draft.name)));
                };
                self.expect(line, 2, "=")?;
                let h = mor(self, draft, 3)?;
                self.no_more(line, 4)?;
                if draft.builder.morphism(f).target != draft.builder.morphism(g).source {
                    return Err(CliError::Validation {
                        at: Some(self.loc(line, &line.toks[1])),
                        message: format!("{gf} is not composable"),
                    });
                }
                draft.builder.set_composite(g, f, h);
            }
            "inverse" => {
                // inverse f = g
                let f = mor(self, draft, 1)?;
                self.expect(line, 2, "=")?;
                let g = mor(self, draft, 3)?;
                self.no_more(line, 4)?;
                draft.inverses.push((f, g));
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn site_body(&mut self, line: &Line) -> CliResult<()> {
        let Open::Site(d) = &self.open else {
            return Err(self.syntax(line, 0, "covers belong to a top-level category"));
        };
        let builder = &d.cat.builder;
        if line.toks[0].text == "topology" {
            let generated = match self.tok(line, 1, "`generated` or `literal`")? {
                "generated" => true,
                "literal" => false,
                _ => return Err(self.syntax(line, 1, "expected `generated` or `literal`")),
            };
            self.no_more(line, 2)?;
            if let Open::Site(d) = &mut self.open {
                d.generated = generated;
            }
            return Ok(());
        }
        // cover U = { f g }
        let u_name = self.tok(line, 1, "an object")?;
        let u = builder.object_index(u_name).ok_or_else(|| self.unresolved(line, 1, "no such object"))?;
        self.expect(line, 2, "=")?;
        self.expect(line, 3, "{")?;
        let mut gens = Vec::new();
        let mut i = 4;
        loop {
            let t = self.tok(line, i, "`}`")?;
            if t == "}" {
                break;
            }
            gens.push(builder.morphism_index(t).ok_or_else(|| self.unresolved(line, i, "no such morphism"))?);
            i += 1;
        }
        self.no_more(line, i + 1)?;
        let at = self.loc(line, &line.toks[0]);
        if let Open::Site(d) = &mut self.open {
            d.covers.push((u, gens, at));
        }
        Ok(())
    }

    fn finish_site(&mut self, d: SiteDraft) -> CliResult<()> {
        let decl = d.cat.finish()?;
        let mut covers = Vec::new();
        for (u, gens, at) in d.covers {
            sieve_from_generators(&decl.category, u, &gens).map_err(|e| CliError::from(e).located(&at))?;
            covers.push((u, gens));
        }
        self.bundle.sites.push(SiteDecl { decl, covers, generated: d.generated });
        Ok(())
    }

    fn psheaf_cat(&mut self, line: &Line) -> CliResult<()> {
        self.close()?;
        // psheaf-cat A over C
        let name = self.tok(line, 1, "a name")?.to_string();
        self.expect(line, 2, "over")?;
        let site_name = self.tok(line, 3, "a site")?.to_string();
        self.no_more(line, 4)?;
        if self.bundle.psheaf(&name).is_some() {
            return Err(self.duplicate(line, 1, "presheaf of categories"));
        }
        let site = self.bundle.site(&site_name).ok_or_else(|| self.unresolved(line, 3, "no such category"))?;
        let site = site.category().clone();
        self.open = Open::Psheaf(PsheafDraft {
            name,
            site_name,
            at: self.loc(line, &line.toks[0]),
            sections: vec![None; site.num_objects()],
            inline: None,
            restrictions: vec![None; site.num_morphisms()],
            site,
        });
        Ok(())
    }

    fn close_inline(&mut self) -> CliResult<()> {
        let Open::Psheaf(d) = &mut self.open else { return Ok(()) };
        let Some((u, cat)) = d.inline.take() else { return Ok(()) };
        let section = match self.bundle.site(&cat.name) {
            Some(s) if !cat.touched => SectionDecl { decl: s.decl.clone(), shared: Some(cat.name.clone()) },
            _ => SectionDecl { decl: cat.finish()?, shared: None },
        };
        if let Open::Psheaf(d) = &mut self.open {
            d.sections[u] = Some(section);
        }
        Ok(())
    }

    fn finish_psheaf(&mut self, mut d: PsheafDraft) -> CliResult<()> {
        if let Some((u, cat)) = d.inline.take() {
            let section = match self.bundle.site(&cat.name) {
                Some(s) if !cat.touched => SectionDecl { decl: s.decl.clone(), shared: Some(cat.name.clone()) },
                _ => SectionDecl { decl: cat.finish()?, shared: None },
            };
            d.sections[u] = Some(section);
        }
        let c = d.site.clone();
        let mut sections = Vec::new();
        for u in c.objects() {
            match d.sections[u].take() {
                Some(s) => sections.push(s),
                None => {
                    return Err(CliError::Validation {
                        at: Some(d.at),
                        message: format!("{} has no section at {}", d.name, c.object_name(u)),
                    })
                }
            }
        }
        let values: Vec<Arc<FiniteCategory>> = sections.iter().map(|s| s.decl.category.clone()).collect();
        let mut restrictions = Vec::new();
        for alpha in c.morphism_ids() {
            let (dom, cod) = (&values[c.target(alpha)], &values[c.source(alpha)]);
            let what = format!("restriction of {} along {}", d.name, c.morphism_name(alpha));
            restrictions.push(match &d.restrictions[alpha] {
                Some((at, pairs)) => build_functor(dom, cod, pairs, &what, at)?,
                None if c.is_identity(alpha) || dom == cod => identity_between(dom, cod),
                None => {
                    return Err(CliError::Validation { at: Some(d.at), message: format!("{what} is missing") })
                }
            });
        }
        let presheaf = PresheafOfCategories::new(c, values, restrictions)
            .and_then(PresheafOfCategories::checked)
            .map_err(|e| CliError::from(e).located(&d.at))?;
        self.bundle.psheaves.push(PsheafDecl {
            name: d.name,
            site: d.site_name,
            sections,
            presheaf: Arc::new(presheaf),
        });
        Ok(())
    }

    fn resolve_base(&self, line: &Line, i: usize) -> CliResult<Arc<FiniteCategory>> {
        let name = self.tok(line, i, "a category")?;
        match self.bundle.base(name) {
            None => Err(self.unresolved(line, i, "no such site or total category")),
            Some(Err(e)) => Err(e.located(&self.loc(line, &line.toks[i]))),
            Some(Ok(b)) => Ok(b.category().clone()),
        }
    }

    fn presheaf(&mut self, line: &Line, abelian: bool) -> CliResult<()> {
        self.close()?;
        let name = self.tok(line, 1, "a name")?.to_string();
        self.expect(line, 2, "over")?;
        let over = self.tok(line, 3, "a category")?.to_string();
        self.no_more(line, 4)?;
        let base = self.resolve_base(line, 3)?;
        let at = self.loc(line, &line.toks[0]);
        let (n, m) = (base.num_objects(), base.num_morphisms());
        if abelian {
            if self.bundle.abelian(&name).is_some() {
                return Err(self.duplicate(line, 1, "abelian presheaf"));
            }
            self.open = Open::Abelian(AbelianDraft {
                name,
                over,
                base,
                at,
                groups: vec![None; n],
                constant: None,
                matrices: vec![None; m],
            });
        } else {
            if self.bundle.presheaf(&name).is_some() {
                return Err(self.duplicate(line, 1, "presheaf"));
            }
            self.open = Open::Presheaf(PresheafDraft {
                name,
                over,
                base,
                at,
                labels: vec![None; n],
                constant: None,
                restrictions: vec![None; m],
            });
        }
        Ok(())
    }

    fn psheaf_map(&mut self, line: &Line) -> CliResult<()> {
        self.close()?;
        // psheaf-map m : A -> B
        let name = self.tok(line, 1, "a name")?.to_string();
        self.expect(line, 2, ":")?;
        let dom_name = self.tok(line, 3, "a presheaf of categories")?.to_string();
        self.expect(line, 4, "->")?;
        let cod_name = self.tok(line, 5, "a presheaf of categories")?.to_string();
        self.no_more(line, 6)?;
        if self.bundle.map(&name).is_some() {
            return Err(self.duplicate(line, 1, "map"));
        }
        let dom = self.bundle.psheaf(&dom_name).ok_or_else(|| self.unresolved(line, 3, "no such presheaf"))?;
        let cod = self.bundle.psheaf(&cod_name).ok_or_else(|| self.unresolved(line, 5, "no such presheaf"))?;
        if dom.site != cod.site {
            return Err(CliError::Validation {
                at: Some(self.loc(line, &line.toks[0])),
                message: format!("{dom_name} and {cod_name} live on different sites"),
            });
        }
        let n = dom.presheaf.site().num_objects();
        self.open = Open::Map(MapDraft {
            name,
            dom_name,
            cod_name,
            dom: dom.presheaf.clone(),
            cod: cod.presheaf.clone(),
            at: self.loc(line, &line.toks[0]),
            components: vec![None; n],
        });
        Ok(())
    }

    fn pairs(&self, line: &Line, mut i: usize) -> CliResult<Vec<Pair>> {
        let mut out = Vec::new();
        while i < line.toks.len() {
            if line.toks[i].text == ";" {
                i += 1;
                continue;
            }
            self.tok(line, i, "a name")?;
            self.expect(line, i + 1, "->")?;
            self.tok(line, i + 2, "a name")?;
            out.push(Pair {
                from: line.toks[i].text.clone(),
                from_at: self.loc(line, &line.toks[i]),
                to: line.toks[i + 2].text.clone(),
                to_at: self.loc(line, &line.toks[i + 2]),
            });
            i += 3;
        }
        Ok(out)
    }

    fn at(&mut self, line: &Line) -> CliResult<()> {
        self.close_inline()?;
        let target = self.tok(line, 1, "an object")?;
        let kind = self.tok(line, 2, "a value kind")?;
        let at = self.loc(line, &line.toks[0]);
        let object_of = |c: &FiniteCategory| c.object_index(target).ok_or_else(|| self.unresolved(line, 1, "no such object"));
        match &self.open {
            Open::Psheaf(d) => {
                if kind != "category" {
                    return Err(self.syntax(line, 2, "expected `category`"));
                }
                let u = object_of(&d.site)?;
                if d.sections[u].is_some() {
                    return Err(self.duplicate(line, 1, "section"));
                }
                let name = self.tok(line, 3, "a category name")?.to_string();
                self.no_more(line, 4)?;
                if let Open::Psheaf(d) = &mut self.open {
                    d.inline = Some((u, CatDraft::new(&name, at)));
                }
            }
            Open::Presheaf(d) => {
                if kind != "elements" {
                    return Err(self.syntax(line, 2, "expected `elements`"));
                }
                let u = object_of(&d.base)?;
                if d.labels[u].is_some() {
                    return Err(self.duplicate(line, 1, "value"));
                }
                let labels = self.labels(line, 3)?;
                if let Open::Presheaf(d) = &mut self.open {
                    d.labels[u] = Some(labels);
                }
            }
            Open::Abelian(d) => {
                if kind != "group" {
                    return Err(self.syntax(line, 2, "expected `group`"));
                }
                let u = object_of(&d.base)?;
                if d.groups[u].is_some() {
                    return Err(self.duplicate(line, 1, "value"));
                }
                let g = self.group(line, 3)?;
                if let Open::Abelian(d) = &mut self.open {
                    d.groups[u] = Some(g);
                }
            }
            Open::Map(d) => {
                if kind != "functor" {
                    return Err(self.syntax(line, 2, "expected `functor`"));
                }
                let u = object_of(d.dom.site())?;
                if d.components[u].is_some() {
                    return Err(self.duplicate(line, 1, "component"));
                }
                let pairs = self.pairs(line, 3)?;
                if let Open::Map(d) = &mut self.open {
                    d.components[u] = Some((at, pairs));
                }
            }
            _ => return Err(self.syntax(line, 0, "`at` outside a presheaf block")),
        }
        Ok(())
    }

    fn labels(&self, line: &Line, from: usize) -> CliResult<Vec<String>> {
        let labels: Vec<String> = line.toks[from..].iter().map(|t| t.text.clone()).collect();
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(self.duplicate(line, from + k, "element"));
            }
        }
        Ok(labels)
    }

    fn group(&self, line: &Line, from: usize) -> CliResult<Vec<u64>> {
        let toks = &line.toks[from..];
        if toks.len() == 1 && toks[0].text == "0" {
            return Ok(Vec::new());
        }
        if toks.is_empty() {
            return Err(self.syntax(line, from, "expected a group such as `Z Z/2` or `0`"));
        }
        toks.iter()
            .enumerate()
            .map(|(k, t)| {
                if t.text == "Z" {
                    return Ok(0);
                }
                t.text
                    .strip_prefix("Z/")
                    .and_then(|n| n.parse::<u64>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| self.syntax(line, from + k, "expected `Z` or `Z/n`"))
            })
            .collect()
    }

    fn restrict(&mut self, line: &Line) -> CliResult<()> {
        self.close_inline()?;
        let name = self.tok(line, 1, "a morphism")?;
        let mut i = 2;
        if line.toks.get(i).is_some_and(|t| t.text == ":") {
            i += 1;
        }
        let kind = self.tok(line, i, "`functor`, `map` or `matrix`")?;
        let at = self.loc(line, &line.toks[0]);
        let mor_of = |c: &FiniteCategory| c.morphism_index(name).ok_or_else(|| self.unresolved(line, 1, "no such morphism"));
        match &self.open {
            Open::Psheaf(d) => {
                if kind != "functor" {
                    return Err(self.syntax(line, i, "expected `functor`"));
                }
                let alpha = mor_of(&d.site)?;
                if d.restrictions[alpha].is_some() {
                    return Err(self.duplicate(line, 1, "restriction"));
                }
                let pairs = self.pairs(line, i + 1)?;
                if let Open::Psheaf(d) = &mut self.open {
                    d.restrictions[alpha] = Some((at, pairs));
                }
            }
            Open::Presheaf(d) => {
                if kind != "map" {
                    return Err(self.syntax(line, i, "expected `map`"));
                }
                let f = mor_of(&d.base)?;
                if d.restrictions[f].is_some() {
                    return Err(self.duplicate(line, 1, "restriction"));
                }
                let pairs = self.pairs(line, i + 1)?;
                if let Open::Presheaf(d) = &mut self.open {
                    d.restrictions[f] = Some((at, pairs));
                }
            }
            Open::Abelian(d) => {
                if kind != "matrix" {
                    return Err(self.syntax(line, i, "expected `matrix`"));
                }
                let f = mor_of(&d.base)?;
                if d.matrices[f].is_some() {
                    return Err(self.duplicate(line, 1, "restriction"));
                }
                let t = &line.toks[i];
                let rest = &line.raw[t.start + t.text.len()..];
                let rest = rest.split('#').next().unwrap_or("");
                let rows: Vec<Vec<i64>> = serde_json::from_str(rest.trim())
                    .map_err(|e| self.syntax(line, i + 1, format!("expected a matrix such as [[1,0],[0,1]]: {e}")))?;
                if let Open::Abelian(d) = &mut self.open {
                    d.matrices[f] = Some((at, rows));
                }
            }
            _ => return Err(self.syntax(line, 0, "`restrict` outside a presheaf block")),
        }
        Ok(())
    }

    fn constant(&mut self, line: &Line) -> CliResult<()> {
        match &self.open {
            Open::Presheaf(d) => {
                if d.constant.is_some() {
                    return Err(self.syntax(line, 0, "constant value given twice"));
                }
                let labels = self.labels(line, 1)?;
                if let Open::Presheaf(d) = &mut self.open {
                    d.constant = Some(labels);
                }
            }
            Open::Abelian(d) => {
                if d.constant.is_some() {
                    return Err(self.syntax(line, 0, "constant value given twice"));
                }
                let g = self.group(line, 1)?;
                if let Open::Abelian(d) = &mut self.open {
                    d.constant = Some(g);
                }
            }
            _ => return Err(self.syntax(line, 0, "`constant` outside a presheaf block")),
        }
        Ok(())
    }

    fn finish_presheaf(&mut self, d: PresheafDraft) -> CliResult<()> {
        let c = d.base.clone();
        let mut labels = Vec::new();
        for u in c.objects() {
            match d.labels[u].clone().or_else(|| d.constant.clone()) {
                Some(l) => labels.push(l),
                None => {
                    return Err(CliError::Validation {
                        at: Some(d.at),
                        message: format!("{} has no value at {}", d.name, c.object_name(u)),
                    })
                }
            }
        }
        let mut action = Vec::new();
        for f in c.morphism_ids() {
            let (from, to) = (&labels[c.target(f)], &labels[c.source(f)]);
            let what = format!("restriction of {} along {}", d.name, c.morphism_name(f));
            action.push(match &d.restrictions[f] {
                Some((at, pairs)) => build_map(from, to, pairs, &what, at)?,
                None if c.is_identity(f) || from == to => (0..from.len()).collect(),
                None => {
                    return Err(CliError::Validation { at: Some(d.at), message: format!("{what} is missing") })
                }
            });
        }
        let sizes = labels.iter().map(Vec::len).collect();
        let presheaf = Presheaf::new(c, Variance::Contravariant, sizes, action).with_labels(labels);
        presheaf.validate().map_err(|e| CliError::from(e).located(&d.at))?;
        self.bundle.presheaves.push(PresheafDecl { name: d.name, over: d.over, presheaf });
        Ok(())
    }

    fn finish_abelian(&mut self, d: AbelianDraft) -> CliResult<()> {
        let c = d.base.clone();
        let mut groups = Vec::new();
        for u in c.objects() {
            match d.groups[u].clone().or_else(|| d.constant.clone()) {
                Some(g) => groups.push(g),
                None => {
                    return Err(CliError::Validation {
                        at: Some(d.at),
                        message: format!("{} has no value at {}", d.name, c.object_name(u)),
                    })
                }
            }
        }
        let relations: Vec<IntegerMatrix> = groups.iter().map(|g| presentation(g)).collect();
        let mut restriction = Vec::new();
        for f in c.morphism_ids() {
            let (x, y) = (c.source(f), c.target(f));
            let what = format!("restriction of {} along {}", d.name, c.morphism_name(f));
            restriction.push(match &d.matrices[f] {
                Some((at, rows)) => {
                    let (r, k) = (groups[x].len(), groups[y].len());
                    if rows.len() != r || rows.iter().any(|row| row.len() != k) {
                        return Err(CliError::Validation {
                            at: Some(at.clone()),
                            message: format!("{what} must be a {r}x{k} matrix"),
                        });
                    }
                    if r == 0 || k == 0 {
                        IntegerMatrix::zeros(r, k)
                    } else {
                        IntegerMatrix::from_rows(rows)
                    }
                }
                None if c.is_identity(f) || groups[x] == groups[y] => IntegerMatrix::identity(groups[x].len()),
                None => {
                    return Err(CliError::Validation { at: Some(d.at), message: format!("{what} is missing") })
                }
            });
        }
        let presheaf = AbelianPresheaf::new(c, relations, restriction)
            .and_then(AbelianPresheaf::checked)
            .map_err(|e| CliError::from(e).located(&d.at))?;
        self.bundle.abelian.push(AbelianDecl { name: d.name, over: d.over, groups, presheaf });
        Ok(())
    }

    fn finish_map(&mut self, d: MapDraft) -> CliResult<()> {
        let c = d.dom.site().clone();
        let mut components = Vec::new();
        for u in c.objects() {
            let (dom, cod) = (d.dom.value(u), d.cod.value(u));
            let what = format!("component of {} at {}", d.name, c.object_name(u));
            components.push(match &d.components[u] {
                Some((at, pairs)) => build_functor(dom, cod, pairs, &what, at)?,
                None if dom == cod => identity_between(dom, cod),
                None => {
                    return Err(CliError::Validation { at: Some(d.at), message: format!("{what} is missing") })
                }
            });
        }
        let morphism = MorphismOfPresheavesOfCategories::new(d.dom, d.cod, components)
            .and_then(MorphismOfPresheavesOfCategories::checked)
            .map_err(|e| CliError::from(e).located(&d.at))?;
        self.bundle.maps.push(MapDecl { name: d.name, dom: d.dom_name, cod: d.cod_name, morphism });
        Ok(())
    }
}

/// Relations of `Z^k` presenting the listed cyclic factors.
pub(crate) fn presentation(factors: &[u64]) -> IntegerMatrix {
    let torsion: Vec<(usize, u64)> = factors.iter().copied().enumerate().filter(|&(_, n)| n != 0).collect();
    let mut m = IntegerMatrix::zeros(factors.len(), torsion.len());
    for (j, &(i, n)) in torsion.iter().enumerate() {
        m.set(i, j, n.into());
    }
    m
}

fn identity_between(dom: &Arc<FiniteCategory>, cod: &Arc<FiniteCategory>) -> Functor {
    Functor::new(dom.clone(), cod.clone(), dom.objects().collect(), dom.morphism_ids().collect())
}

fn build_functor(
    dom: &Arc<FiniteCategory>,
    cod: &Arc<FiniteCategory>,
    pairs: &[Pair],
    what: &str,
    at: &Location,
) -> CliResult<Functor> {
    let mut objects = vec![None; dom.num_objects()];
    let mut morphisms = vec![None; dom.num_morphisms()];
    let unresolved = |name: &str, at: &Location, in_cat: &FiniteCategory| CliError::Unresolved {
        at: at.clone(),
        token: name.to_string(),
        message: format!("not an object or morphism of {}", in_cat.name()),
    };
    for p in pairs {
        if let Some(x) = dom.object_index(&p.from) {
            let y = cod.object_index(&p.to).ok_or_else(|| unresolved(&p.to, &p.to_at, cod))?;
            objects[x] = Some(y);
        } else if let Some(f) = dom.morphism_index(&p.from) {
            let g = cod.morphism_index(&p.to).ok_or_else(|| unresolved(&p.to, &p.to_at, cod))?;
            morphisms[f] = Some(g);
        } else {
            return Err(unresolved(&p.from, &p.from_at, dom));
        }
    }
    let mut on_objects = Vec::new();
    for x in dom.objects() {
        on_objects.push(objects[x].ok_or_else(|| CliError::Validation {
            at: Some(at.clone()),
            message: format!("{what} does not say where {} goes", dom.object_name(x)),
        })?);
    }
    for x in dom.objects() {
        morphisms[dom.identity(x)].get_or_insert(cod.identity(on_objects[x]));
    }
    let mut on_morphisms = Vec::new();
    for f in dom.morphism_ids() {
        on_morphisms.push(morphisms[f].ok_or_else(|| CliError::Validation {
            at: Some(at.clone()),
            message: format!("{what} does not say where {} goes", dom.morphism_name(f)),
        })?);
    }
    Functor::checked(dom.clone(), cod.clone(), on_objects, on_morphisms)
        .map_err(|e| CliError::Validation { at: Some(at.clone()), message: format!("{what}: {e}") })
}

fn build_map(from: &[String], to: &[String], pairs: &[Pair], what: &str, at: &Location) -> CliResult<Vec<usize>> {
    let mut out = vec![None; from.len()];
    for p in pairs {
        let find = |labels: &[String], name: &str, at: &Location| {
            labels.iter().position(|l| l == name).ok_or_else(|| CliError::Unresolved {
                at: at.clone(),
                token: name.to_string(),
                message: "no such element".into(),
            })
        };
        let a = find(from, &p.from, &p.from_at)?;
        let b = find(to, &p.to, &p.to_at)?;
        out[a] = Some(b);
    }
    out.iter()
        .enumerate()
        .map(|(a, b)| {
            b.ok_or_else(|| CliError::Validation {
                at: Some(at.clone()),
                message: format!("{what} does not say where {} goes", from[a]),
            })
        })
        .collect()
}
