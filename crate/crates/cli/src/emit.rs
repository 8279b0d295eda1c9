//! Write a bundle back out in the input format.

use std::fmt::Write;

use fibsite_core::fincat::{FiniteCategory, Functor};
use fibsite_core::site::{GrothendieckTopology, Presheaf};
use fibsite_core::sset::IntegerMatrix;

use crate::bundle::{AbelianDecl, Bundle, CategoryDecl, MapDecl, PresheafDecl, PsheafDecl, SiteDecl};

pub fn emit_bundle(b: &Bundle) -> String {
    let mut out = String::new();
    for s in &b.sites {
        emit_site(&mut out, s);
    }
    for p in &b.psheaves {
        emit_psheaf(&mut out, p);
    }
    for p in &b.presheaves {
        emit_presheaf(&mut out, p);
    }
    for a in &b.abelian {
        emit_abelian(&mut out, a);
    }
    for m in &b.maps {
        emit_map(&mut out, m);
    }
    out
}

/// A standalone site file listing every covering sieve of `t`.
pub fn emit_site_with_topology(t: &GrothendieckTopology) -> String {
    let c = t.site();
    let mut out = String::new();
    emit_category_lines(&mut out, &CategoryDecl { category: c.clone(), inverses: Vec::new() }, "category");
    for u in c.objects() {
        for s in t.covers(u) {
            if s.is_maximal(c) {
                continue;
            }
            let names: Vec<&str> = s.members().iter().map(|&f| c.morphism_name(f)).collect();
            writeln!(out, "cover {} = {{ {} }}", c.object_name(u), names.join(" ")).unwrap();
        }
    }
    out
}

fn emit_site(out: &mut String, s: &SiteDecl) {
    emit_category_lines(out, &s.decl, "category");
    let c = s.category();
    if s.generated {
        out.push_str("topology generated\n");
    }
    for (u, gens) in &s.covers {
        let names: Vec<&str> = gens.iter().map(|&f| c.morphism_name(f)).collect();
        writeln!(out, "cover {} = {{ {} }}", c.object_name(*u), names.join(" ")).unwrap();
    }
    out.push('\n');
}

/// Objects and morphisms in index order, then composites of non-identity
/// pairs and declared inverses.
fn emit_category_lines(out: &mut String, d: &CategoryDecl, keyword: &str) {
    let c: &FiniteCategory = &d.category;
    writeln!(out, "{keyword} {}", c.name()).unwrap();
    let mut pending: Vec<usize> = Vec::new();
    let flush = |out: &mut String, pending: &mut Vec<usize>| {
        let names: Vec<&str> = pending.iter().map(|&o| c.object_name(o)).collect();
        writeln!(out, "objects{}{}", if names.is_empty() { "" } else { " " }, names.join(" ")).unwrap();
        for &o in pending.iter() {
            let id = c.morphism_name(c.identity(o));
            if id != format!("id_{}", c.object_name(o)) {
                writeln!(out, "identity {id} : {}", c.object_name(o)).unwrap();
            }
        }
        pending.clear();
    };
    let mut wrote_objects = false;
    for f in c.morphism_ids() {
        if c.is_identity(f) {
            pending.push(c.source(f));
            continue;
        }
        if !pending.is_empty() {
            flush(out, &mut pending);
            wrote_objects = true;
        }
        let m = c.morphism(f);
        writeln!(out, "mor {} : {} -> {}", m.name, c.object_name(m.source), c.object_name(m.target)).unwrap();
    }
    if !pending.is_empty() || !wrote_objects {
        flush(out, &mut pending);
    }
    for g in c.morphism_ids().filter(|&g| !c.is_identity(g)) {
        for f in c.morphism_ids().filter(|&f| !c.is_identity(f)) {
            if let Some(h) = c.try_compose(g, f) {
                writeln!(out, "compose {}.{} = {}", c.morphism_name(g), c.morphism_name(f), c.morphism_name(h)).unwrap();
            }
        }
    }
    for &(f, g) in &d.inverses {
        writeln!(out, "inverse {} = {}", c.morphism_name(f), c.morphism_name(g)).unwrap();
    }
}

fn functor_pairs(f: &Functor) -> String {
    let (dom, cod) = (f.dom(), f.cod());
    let mut parts: Vec<String> =
        dom.objects().map(|x| format!("{} -> {}", dom.object_name(x), cod.object_name(f.obj(x)))).collect();
    parts.extend(
        dom.morphism_ids()
            .filter(|&m| !dom.is_identity(m))
            .map(|m| format!("{} -> {}", dom.morphism_name(m), cod.morphism_name(f.mor(m)))),
    );
    parts.join(" ; ")
}

fn emit_psheaf(out: &mut String, p: &PsheafDecl) {
    let c = p.presheaf.site();
    writeln!(out, "psheaf-cat {} over {}", p.name, p.site).unwrap();
    for u in c.objects() {
        let s = &p.sections[u];
        match &s.shared {
            Some(name) => writeln!(out, "at {} category {name}", c.object_name(u)).unwrap(),
            None => {
                let mut body = String::new();
                emit_category_lines(&mut body, &s.decl, "category");
                write!(out, "at {} {body}", c.object_name(u)).unwrap();
            }
        }
    }
    for alpha in c.morphism_ids().filter(|&a| !c.is_identity(a)) {
        writeln!(out, "restrict {} : functor {}", c.morphism_name(alpha), functor_pairs(p.presheaf.restriction(alpha)))
            .unwrap();
    }
    out.push('\n');
}

fn emit_presheaf(out: &mut String, p: &PresheafDecl) {
    let f: &Presheaf = &p.presheaf;
    let c = f.base();
    writeln!(out, "presheaf {} over {}", p.name, p.over).unwrap();
    let label = |o: usize, e: usize| f.label(o, e);
    for u in c.objects() {
        let names: Vec<String> = (0..f.size(u)).map(|e| label(u, e)).collect();
        writeln!(out, "at {} elements{}{}", c.object_name(u), if names.is_empty() { "" } else { " " }, names.join(" "))
            .unwrap();
    }
    for h in c.morphism_ids().filter(|&h| !c.is_identity(h)) {
        let (x, y) = (c.source(h), c.target(h));
        let pairs: Vec<String> = (0..f.size(y)).map(|e| format!("{} -> {}", label(y, e), label(x, f.apply(h, e)))).collect();
        writeln!(out, "restrict {} : map {}", c.morphism_name(h), pairs.join(" ; ")).unwrap();
    }
    out.push('\n');
}

pub(crate) fn group_tokens(factors: &[u64]) -> String {
    if factors.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = factors.iter().map(|&n| if n == 0 { "Z".into() } else { format!("Z/{n}") }).collect();
    parts.join(" ")
}

fn matrix_text(m: &IntegerMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let entries: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
            format!("[{}]", entries.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn emit_abelian(out: &mut String, a: &AbelianDecl) {
    let f = &a.presheaf;
    let c = f.base();
    writeln!(out, "abpresheaf {} over {}", a.name, a.over).unwrap();
    for u in c.objects() {
        writeln!(out, "at {} group {}", c.object_name(u), group_tokens(&a.groups[u])).unwrap();
    }
    for h in c.morphism_ids().filter(|&h| !c.is_identity(h)) {
        writeln!(out, "restrict {} matrix {}", c.morphism_name(h), matrix_text(f.restriction(h))).unwrap();
    }
    out.push('\n');
}

fn emit_map(out: &mut String, m: &MapDecl) {
    let c = m.morphism.dom.site();
    writeln!(out, "psheaf-map {} : {} -> {}", m.name, m.dom, m.cod).unwrap();
    for u in c.objects() {
        writeln!(out, "at {} functor {}", c.object_name(u), functor_pairs(m.morphism.component(u))).unwrap();
    }
    out.push('\n');
}
