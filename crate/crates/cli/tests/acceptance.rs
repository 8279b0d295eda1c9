//! End-to-end acceptance run. One line per criterion; exits non-zero if any
//! criterion fails or runs over its time limit.

use std::collections::{BTreeMap, BTreeSet};
use std::error::Error;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fibsite::parse_files;
use fibsite_core::cohom::{cech_cohomology, invariance_report, stack_cohomology, AbelianPresheaf};
use fibsite_core::fibred::{
    grothendieck_construct, induced_topology, left_kan_along, product_comparison, same_data, EnrichedSetDiagram,
    MorphismOfPresheavesOfCategories, PresheafOfCategories, PresheafOfGroupoids,
};
use fibsite_core::fincat::{comma_category, pi0, FiniteCategory, Functor};
use fibsite_core::hocopb::{
    check_sectionwise, check_triangles, counit_epsilon, hocolim, pb, presheaf_counit, presheaf_hocolim, presheaf_pb,
    presheaf_unit_eta, unit_eta,
};
use fibsite_core::random::{
    random_enriched_instance, random_groupoid, random_gset_diagram, random_integer_matrix, random_over_nerve,
    random_poset, random_presheaf, random_presheaf_of_categories, random_presheaf_of_groupoids,
    random_sectionwise_equivalence, random_site, rng, ChaCha8Rng,
};
use fibsite_core::site::{
    all_sieves, is_sheaf, matching_families, sheafify, sieves_containing, verify_topology, GrothendieckTopology,
    Sieve, SiteCaps,
};
use fibsite_core::sset::{interchange_comparison, smith_normal_form, we_evidence, FgAbelianGroup, IntegerMatrix};
use num_bigint::BigInt;
use rand::Rng;

type Outcome = Result<String, Box<dyn Error>>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Box<dyn Error>> {
    if cond {
        Ok(())
    } else {
        Err(msg().into())
    }
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn shipped_bundles() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(workspace_root().join("bundles"))
        .expect("bundles directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "fib"))
        .collect();
    v.sort();
    v
}

/// A topology generated by up to two random sieves.
fn random_topology(r: &mut ChaCha8Rng, c: &Arc<FiniteCategory>) -> Result<GrothendieckTopology, Box<dyn Error>> {
    let caps = SiteCaps::default();
    let mut gens = Vec::new();
    for _ in 0..r.gen_range(0..=2) {
        let u = r.gen_range(0..c.num_objects());
        let all = all_sieves(c, u, &caps)?;
        gens.push(all[r.gen_range(0..all.len())].clone());
    }
    Ok(GrothendieckTopology::generated(c.clone(), &gens, &caps)?)
}

fn topology_soundness() -> Outcome {
    let mut r = rng(1);
    let relaxed = SiteCaps::relaxed();
    let mut checked = 0;
    for _ in 0..120 {
        let site = random_site(&mut r, 3);
        let t = random_topology(&mut r, &site)?;
        let a = Arc::new(random_presheaf_of_categories(&mut r, &site, 3)?);
        let fs = grothendieck_construct(&a)?;
        let induced = induced_topology(&fs, &t, &relaxed)?;
        let v = verify_topology(&induced, &relaxed)?;
        ensure(v.is_empty(), || format!("{} over {}: {v:?}", fs.total.name(), site.name()))?;
        checked += 1;
    }
    let mut shipped = 0;
    for path in shipped_bundles() {
        let b = parse_files(&[&path])?;
        for p in &b.psheaves {
            let base = b.base(&format!("{}/{}", p.site, p.name)).expect("declared")?;
            let v = verify_topology(&base.topology()?, &relaxed)?;
            ensure(v.is_empty(), || format!("{}: {}/{}: {v:?}", path.display(), p.site, p.name))?;
            shipped += 1;
        }
    }
    Ok(format!("{checked} random instances, {shipped} shipped"))
}

fn enriched_round_trip() -> Outcome {
    let mut r = rng(2);
    for i in 0..100 {
        let site = random_site(&mut r, 3);
        let a = Arc::new(random_presheaf_of_categories(&mut r, &site, 3)?);
        let fs = grothendieck_construct(&a)?;
        let f = random_presheaf(&mut r, &fs.total, 2, false);
        let e = EnrichedSetDiagram::from_presheaf(&fs, &f)?;
        let back = e.to_presheaf(&fs)?;
        ensure(same_data(&back, &f), || format!("instance {i}: presheaf changed"))?;
        ensure(EnrichedSetDiagram::from_presheaf(&fs, &back)? == e, || format!("instance {i}: diagram changed"))?;
    }
    Ok("100 instances".into())
}

fn constant_is_product() -> Outcome {
    let mut r = rng(3);
    let relaxed = SiteCaps::relaxed();
    let mut sieves = 0;
    for i in 0..10 {
        let c = random_site(&mut r, 3);
        let j = Arc::new(match i % 4 {
            0 => FiniteCategory::chain(2),
            1 => FiniteCategory::cyclic_group(2),
            2 => FiniteCategory::codiscrete(2),
            _ => random_poset(&mut r, 2).with_name("J"),
        });
        let t = random_topology(&mut r, &c)?;
        let fs = grothendieck_construct(&Arc::new(PresheafOfCategories::constant(c.clone(), j.clone())))?;
        let phi = product_comparison(&fs, &j)?;
        ensure(phi.is_isomorphism(), || format!("instance {i}: comparison is not an isomorphism"))?;
        let prod = phi.cod().clone();
        // first component of each product morphism, read off the names
        let mut first = vec![usize::MAX; prod.num_morphisms()];
        for alpha in c.morphism_ids() {
            for f in j.morphism_ids() {
                let name = format!("({},{})", c.morphism_name(alpha), j.morphism_name(f));
                let p = prod.morphism_index(&name).ok_or_else(|| format!("no morphism {name}"))?;
                first[p] = alpha;
            }
        }
        let induced = induced_topology(&fs, &t, &relaxed)?;
        for o in fs.total.objects() {
            let po = phi.obj(o);
            let u = fs.objects[o].0;
            let mut expected = BTreeSet::new();
            for s in t.covers(u) {
                let floor = Sieve::from_members(po, prod.into_object(po).filter(|&p| s.contains(first[p])));
                expected.extend(sieves_containing(&prod, &floor, &relaxed)?);
            }
            let image: BTreeSet<Sieve> = induced
                .covers(o)
                .iter()
                .map(|s| Sieve::from_members(po, s.members().iter().map(|&m| phi.mor(m))))
                .collect();
            ensure(image == expected, || format!("instance {i}: covers differ at {}", fs.total.object_name(o)))?;
            sieves += image.len();
        }
    }
    Ok(format!("10 pairs, {sieves} covering sieves matched"))
}

/// The triangle and evidence checks run on the same instances.
struct AdjunctionCounts {
    triangles: usize,
    evidence: usize,
}

fn adjunction(evidence: bool) -> Result<AdjunctionCounts, Box<dyn Error>> {
    let dim = 4;
    let top = 3;
    let mut r = rng(4);
    let mut counts = AdjunctionCounts { triangles: 0, evidence: 0 };
    for i in 0..25 {
        let g = random_groupoid(&mut r, 3, 6);
        let x = random_over_nerve(&mut r, &g.groupoid, dim, 12)?;
        let a = random_gset_diagram(&mut r, &g, dim)?;
        let t = check_triangles(&x, &a, dim)?;
        ensure(t.pass(), || format!("groupoid instance {i}: {t:?}"))?;
        counts.triangles += 1;
        if evidence {
            let p = pb(&x)?;
            let h = hocolim(&p.diagram, dim)?;
            let eta = we_evidence(&unit_eta(&x, &p, &h)?, top)?;
            ensure(eta.pass(), || format!("groupoid instance {i}: η {:?}", eta.failure()))?;
            let ha = hocolim(&a, dim)?;
            let pa = pb(&ha.over)?;
            for (y, e) in counit_epsilon(&a, &ha, &pa)?.iter().enumerate() {
                let ev = we_evidence(e, top)?;
                ensure(ev.pass(), || format!("groupoid instance {i}: ε at {y}: {:?}", ev.failure()))?;
            }
            counts.evidence += 1;
        }
    }
    for i in 0..10 {
        let (y, x) = random_enriched_instance(&mut r, dim)?;
        let rep = check_sectionwise(&y, &x, dim)?;
        ensure(rep.pass(), || format!("enriched instance {i}: {rep:?}"))?;
        counts.triangles += 1;
        if evidence {
            let p = presheaf_pb(&y)?;
            let h = presheaf_hocolim(&p.diagram, dim)?;
            for (u, eta) in presheaf_unit_eta(&y, &p, &h)?.iter().enumerate() {
                let ev = we_evidence(eta, top)?;
                ensure(ev.pass(), || format!("enriched instance {i}: η at {u}: {:?}", ev.failure()))?;
            }
            let hx = presheaf_hocolim(&x, dim)?;
            let px = presheaf_pb(&hx.over)?;
            for (u, eps) in presheaf_counit(&x, &hx, &px)?.iter().enumerate() {
                for (a, e) in eps.iter().enumerate() {
                    let ev = we_evidence(e, top)?;
                    ensure(ev.pass(), || format!("enriched instance {i}: ε at ({u}, {a}): {:?}", ev.failure()))?;
                }
            }
            counts.evidence += 1;
        }
    }
    Ok(counts)
}

fn triangles() -> Outcome {
    let c = adjunction(false)?;
    Ok(format!("{} instances (25 groupoid, 10 enriched), truncation 4", c.triangles))
}

fn unit_counit_evidence() -> Outcome {
    let c = adjunction(true)?;
    Ok(format!("{} instances, evidence through degree 3", c.evidence))
}

fn interchange() -> Outcome {
    let cases = [
        ("pt", FiniteCategory::terminal()),
        ("chain", FiniteCategory::chain(3)),
        ("Z2", FiniteCategory::cyclic_group(2)),
        ("E2", FiniteCategory::codiscrete(2)),
    ];
    for (name, c) in &cases {
        let ic = interchange_comparison(c, 4);
        for (label, m) in [("φ", &ic.phi), ("ψ", &ic.psi)] {
            let ev = we_evidence(m, 3)?;
            ensure(ev.pass(), || format!("{name}: {label}: {:?}", ev.failure()))?;
        }
    }
    Ok("pt, chain, Z2, E2".into())
}

fn terminal_map(g: &PresheafOfGroupoids) -> Result<MorphismOfPresheavesOfCategories, Box<dyn Error>> {
    let a = Arc::new(g.inner().clone());
    let pt = Arc::new(FiniteCategory::terminal());
    let b = Arc::new(PresheafOfCategories::constant(a.site().clone(), pt.clone()));
    let components = a
        .site()
        .objects()
        .map(|u| Functor::to_terminal(a.value(u).clone(), pt.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MorphismOfPresheavesOfCategories::new(a, b, components)?.checked()?)
}

fn kan_of_point() -> Outcome {
    let mut r = rng(7);
    let mut morphisms = 0;
    let mut classes = 0;
    while morphisms < 50 {
        let site = random_site(&mut r, 3);
        let g = random_presheaf_of_groupoids(&mut r, &site, 2, 2)?;
        for m in [terminal_map(&g)?, random_sectionwise_equivalence(&mut r, &site, 2, 1, 2)?] {
            let l = left_kan_along(&m, &EnrichedSetDiagram::one_point(m.dom.clone()))?;
            for u in site.objects() {
                for b in m.cod.value(u).objects() {
                    let comma = comma_category(&m.component(u).opposite(), b)?;
                    let parts = pi0(&comma.category);
                    // comma components → Kan classes must be a bijection
                    let mut image: BTreeMap<usize, usize> = BTreeMap::new();
                    for (k, class) in parts.classes.iter().enumerate() {
                        for &o in class {
                            let (a, h) = comma.objects[o];
                            let z = l.class_of(u, b, a, h, 0);
                            ensure(*image.entry(z).or_insert(k) == k, || format!("morphism {morphisms}: class {z} hit twice"))?;
                        }
                    }
                    let n = l.diagram.size(u, b);
                    ensure(image.len() == parts.classes.len() && n == image.len(), || {
                        format!("morphism {morphisms}: {n} Kan classes vs {} components", parts.classes.len())
                    })?;
                    classes += n;
                }
            }
            morphisms += 1;
        }
    }
    Ok(format!("{morphisms} morphisms, {classes} classes matched"))
}

/// Elementary divisors over i128 by plain row and column reduction.
#[allow(clippy::needless_range_loop)]
fn divisors_i128(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let pivot = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j))).filter(|&(i, j)| m[i][j] != 0).min_by_key(|&(i, j)| m[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let p = m[t][t];
        let mut clean = true;
        for i in t + 1..rows {
            let q = m[i][t] / p;
            for j in t..cols {
                m[i][j] -= q * m[t][j];
            }
            clean &= m[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = m[t][j] / p;
            for i in t..rows {
                m[i][j] -= q * m[i][t];
            }
            clean &= m[t][j] == 0;
        }
        if !clean {
            continue;
        }
        if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0)) {
            for j in t..cols {
                m[t][j] += m[i][j];
            }
            continue;
        }
        out.push(p.abs());
        t += 1;
    }
    out
}

/// `H^n(Z/2; Z)` from the inhomogeneous bar complex with trivial action.
fn bar_cohomology_z2(top: usize) -> Vec<(usize, Vec<i128>)> {
    let g = 2usize;
    let mul = |a: usize, b: usize| (a + b) % g;
    let tuples = |n: usize| -> Vec<Vec<usize>> {
        (0..g.pow(n as u32)).map(|k| (0..n).map(|i| (k / g.pow(i as u32)) % g).collect()).collect()
    };
    // d^n: C^n → C^{n+1}, one row per (n+1)-tuple
    let differential = |n: usize| -> Vec<Vec<i128>> {
        let cols: BTreeMap<Vec<usize>, usize> = tuples(n).into_iter().enumerate().map(|(i, t)| (t, i)).collect();
        tuples(n + 1)
            .iter()
            .map(|s| {
                let mut row = vec![0i128; cols.len()];
                row[cols[&s[1..].to_vec()]] += 1;
                for i in 0..n {
                    let mut face = s[..i].to_vec();
                    face.push(mul(s[i], s[i + 1]));
                    face.extend_from_slice(&s[i + 2..]);
                    row[cols[&face]] += if (i + 1) % 2 == 0 { 1 } else { -1 };
                }
                row[cols[&s[..n].to_vec()]] += if (n + 1).is_multiple_of(2) { 1 } else { -1 };
                row
            })
            .collect()
    };
    let divisors: Vec<Vec<i128>> = (0..=top).map(|n| divisors_i128(differential(n))).collect();
    (0..=top)
        .map(|n| {
            let dim = g.pow(n as u32);
            let below = if n == 0 { Vec::new() } else { divisors[n - 1].clone() };
            let free = dim - divisors[n].len() - below.len();
            (free, below.into_iter().filter(|&d| d > 1).collect())
        })
        .collect()
}

fn shape(g: &FgAbelianGroup) -> (usize, Vec<i128>) {
    (g.free_rank, g.torsion.iter().map(|t| t.to_string().parse().expect("small")).collect())
}

fn stack_oracle() -> Outcome {
    let pt = Arc::new(FiniteCategory::terminal());
    let g = PresheafOfGroupoids::new(PresheafOfCategories::constant(pt.clone(), Arc::new(FiniteCategory::cyclic_group(2))))?;
    let fs = grothendieck_construct(&Arc::new(g.inner().clone()))?;
    let f = AbelianPresheaf::constant(fs.total.clone(), &FgAbelianGroup::free(1));
    let h = stack_cohomology(&GrothendieckTopology::trivial(pt), &g, &f, 4)?;
    let got: Vec<_> = h.iter().map(shape).collect();
    let expected = vec![(1, vec![]), (0, vec![]), (0, vec![2]), (0, vec![]), (0, vec![2])];
    ensure(got == expected, || format!("got {got:?}"))?;
    let oracle = bar_cohomology_z2(4);
    ensure(oracle == expected, || format!("bar complex gives {oracle:?}"))?;
    let shown: Vec<String> = h.iter().map(ToString::to_string).collect();
    Ok(format!("({}) in degrees 0..4, bar complex agrees", shown.join(", ")))
}

fn invariance() -> Outcome {
    let mut r = rng(9);
    for i in 0..25 {
        let site = random_site(&mut r, 3);
        let m = random_sectionwise_equivalence(&mut r, &site, 2, 1, 2)?;
        let fs = grothendieck_construct(&m.cod)?;
        let f = AbelianPresheaf::constant(fs.total.clone(), &FgAbelianGroup::free(1));
        let rep = invariance_report(&m, &GrothendieckTopology::trivial(site.clone()), &f, 3)?;
        ensure(rep.pass(), || format!("instance {i}: degrees {:?} differ", rep.mismatches()))?;
    }
    Ok("25 sectionwise equivalences, degrees 0..3".into())
}

fn snf() -> Outcome {
    let mut r = rng(10);
    let one = BigInt::from(1);
    let minus = BigInt::from(-1);
    for i in 0..1000 {
        let m = random_integer_matrix(&mut r, 8, 10);
        let s = smith_normal_form(&m);
        ensure(s.u.mul(&m).mul(&s.v) == s.d, || format!("matrix {i}: U·M·V ≠ D"))?;
        ensure(s.d.is_diagonal(), || format!("matrix {i}: D not diagonal"))?;
        let diag = s.diagonal();
        ensure(diag.iter().all(|d| *d >= BigInt::from(0)), || format!("matrix {i}: negative entry"))?;
        for w in diag.windows(2) {
            let ok = if w[0] == BigInt::from(0) { w[1] == BigInt::from(0) } else { (&w[1] % &w[0]) == BigInt::from(0) };
            ensure(ok, || format!("matrix {i}: {} does not divide {}", w[0], w[1]))?;
        }
        for (name, x) in [("U", &s.u), ("V", &s.v)] {
            let det = x.determinant();
            ensure(det == one || det == minus, || format!("matrix {i}: det {name} = {det}"))?;
        }
        ensure(s.u.mul(&s.u_inv) == IntegerMatrix::identity(s.u.rows()), || format!("matrix {i}: U⁻¹"))?;
    }
    Ok("1000 matrices up to 8×8".into())
}

/// `Z/n[X]` on a presheaf of sets.
fn torsion_free_on(x: &fibsite_core::site::Presheaf, n: i64) -> Result<AbelianPresheaf, Box<dyn Error>> {
    let free = AbelianPresheaf::free_on(x)?;
    let c = x.base().clone();
    let relations = c
        .objects()
        .map(|u| {
            let k = x.size(u);
            let mut m = IntegerMatrix::zeros(k, k);
            for i in 0..k {
                m.set(i, i, BigInt::from(n));
            }
            m
        })
        .collect();
    let restriction = c.morphism_ids().map(|h| free.restriction(h).clone()).collect();
    Ok(AbelianPresheaf::new(c, relations, restriction)?.checked()?)
}

fn sheaves() -> Outcome {
    let mut r = rng(11);
    let caps = SiteCaps::default();
    let (mut presheaves, mut covers) = (0, 0);
    for _ in 0..30 {
        let site = random_site(&mut r, 3);
        let t = random_topology(&mut r, &site)?;
        let v = verify_topology(&t, &caps)?;
        ensure(v.is_empty(), || format!("generated topology fails: {v:?}"))?;
        for _ in 0..3 {
            let x = random_presheaf(&mut r, &site, 3, false);
            let sh = sheafify(&x, &t)?;
            let w = is_sheaf(&sh.sheaf, &t)?;
            ensure(w.is_none(), || format!("sheafification over {} is not a sheaf: {w:?}", site.name()))?;
            presheaves += 1;
            let f = torsion_free_on(&x, if presheaves % 2 == 0 { 2 } else { 3 })?;
            let elements = f.elements(1 << 16)?;
            for u in site.objects() {
                for s in t.covers(u) {
                    let h = cech_cohomology(&t, u, s, &f, 0)?;
                    let families = matching_families(&elements, s)?.len();
                    let order = h[0].order().map(|o| o.to_string());
                    ensure(order == Some(families.to_string()), || {
                        format!("{}: Ȟ^0 = {} but {families} matching families", s.describe(&site), h[0])
                    })?;
                    covers += 1;
                }
            }
        }
    }
    Ok(format!("{presheaves} presheaves, {covers} covers"))
}

fn fibsite(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_fibsite")).args(args).current_dir(workspace_root()).output().expect("run fibsite");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli() -> Outcome {
    let runs: &[&[&str]] = &[
        &["validate", "bundles/pt.fib"],
        &["topology-check", "bundles/pt.fib"],
        &["adjunction-check", "bundles/pt.fib"],
        &["homology", "bundles/pt.fib"],
        &["nerve-export", "bundles/pt.fib"],
        &["validate", "bundles/z2-over-pt.fib"],
        &["fibred-build", "bundles/z2-over-pt.fib"],
        &["topology-check", "bundles/z2-over-pt.fib", "--site", "pt", "--psheaf", "G"],
        &["cohomology", "bundles/z2-over-pt.fib"],
        &["cech", "bundles/z2-over-pt.fib"],
        &["adjunction-check", "bundles/z2-over-pt.fib", "--truncation", "4", "--site", "Z2"],
        &["adjunction-check", "bundles/z2-over-pt.fib", "--truncation", "4", "--psheaf", "G", "--seed", "3"],
        &["homology", "bundles/z2-over-pt.fib", "--category", "Z2"],
        &["validate", "bundles/arrow-site.fib"],
        &["fibred-build", "bundles/arrow-site.fib"],
        &["topology-check", "bundles/arrow-site.fib", "--psheaf", "A"],
        &["sheaf-check", "bundles/arrow-site.fib"],
        &["cech", "bundles/arrow-site.fib"],
        &["nerve-export", "bundles/arrow-site.fib", "--format", "markdown"],
        &["validate", "bundles/equivalence.fib"],
        &["cohomology", "bundles/equivalence.fib", "--nmax", "3"],
        &["invariance-check", "bundles/equivalence.fib", "--nmax", "3"],
        &["fibred-build", "bundles/equivalence.fib", "--psheaf", "G"],
    ];
    for args in runs {
        let (code, first) = fibsite(args);
        ensure(code == 0, || format!("{args:?} exited {code}"))?;
        let (_, second) = fibsite(args);
        ensure(first == second, || format!("{args:?} is not deterministic"))?;
    }
    // the total site written by fibred-build passes topology-check
    let dir = tempfile::tempdir()?;
    let total = dir.path().join("total.fib");
    let total_s = total.to_str().expect("utf-8 path");
    let (code, _) = fibsite(&["fibred-build", "bundles/arrow-site.fib", "--psheaf", "A", "--out", total_s]);
    ensure(code == 0, || format!("fibred-build exited {code}"))?;
    let (code, _) = fibsite(&["topology-check", total_s]);
    ensure(code == 0, || format!("topology-check of the built site exited {code}"))?;
    let fx = "crates/cli/tests/fixtures";
    let codes: Vec<(Vec<String>, i32)> = vec![
        (vec!["validate".into(), "bundles/no-such-file.fib".into()], 1),
        (vec!["validate".into(), format!("{fx}/syntax.fib")], 2),
        (vec!["validate".into(), format!("{fx}/bad-inverse.fib")], 3),
        (vec!["topology-check".into(), format!("{fx}/bad-topology.fib")], 3),
        (vec!["cohomology".into(), "bundles/arrow-site.fib".into()], 4),
        (vec!["validate".into(), format!("{fx}/cap.fib")], 5),
        (vec!["validate".into(), format!("{fx}/unresolved.fib")], 6),
    ];
    for (args, want) in &codes {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, _) = fibsite(&refs);
        ensure(code == *want, || format!("{args:?} exited {code}, expected {want}"))?;
    }
    Ok(format!("{} runs repeated byte-identically, exit codes 0-6 observed", runs.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("topology soundness on fibred sites", 60, topology_soundness),
        ("presheaf/enriched diagram round trip", 10, enriched_round_trip),
        ("constant presheaf total is the product site", 10, constant_is_product),
        ("pb/hocolim triangle identities", 120, triangles),
        ("unit and counit weak-equivalence evidence", 120, unit_counit_evidence),
        ("interchange maps φ, ψ", 60, interchange),
        ("Kan extension of the point vs π0 of comma", 30, kan_of_point),
        ("stack cohomology of Z/2 over a point", 10, stack_oracle),
        ("cohomology invariance under sectionwise equivalences", 300, invariance),
        ("Smith normal form", 10, snf),
        ("sheafification and Čech H^0", 60, sheaves),
        ("command line determinism and exit codes", 30, cli),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(Ok(d)) if elapsed <= Duration::from_secs(limit) => (true, d),
            Ok(Ok(d)) => (false, format!("{d}; over the {limit} s limit")),
            Ok(Err(e)) => (false, e.to_string()),
            Err(_) => (false, "panicked".into()),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {} {name}: {detail} ({:.2} s, limit {limit} s)",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
