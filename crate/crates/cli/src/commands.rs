//! Command dispatch.

use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use fibsite_core::cohom::{
    category_cohomology, cech_cohomology, global_sections, invariance_report, stack_cohomology, AbelianPresheaf,
};
use fibsite_core::fibred::{induced_topology, EnrichedSetDiagram, PresheafOfGroupoids};
use fibsite_core::fincat::{FiniteCategory, Groupoid};
use fibsite_core::hocopb::{
    check_sectionwise, check_triangles, counit_epsilon, discrete_sset, hocolim, pb, presheaf_hocolim, presheaf_pb,
    presheaf_unit_eta, unit_eta, EnrichedGroupoidDiagram, GroupoidDiagram, OverNerve, PresheafOverNerve,
};
use fibsite_core::random::{random_over_nerve, random_presheaf, rng};
use fibsite_core::site::{is_sheaf, matching_families, sheafify, verify_topology, GrothendieckTopology, SheafFailure, SiteCaps};
use fibsite_core::sset::{homology, homology_unnormalized, nerve, we_evidence, FgAbelianGroup, WeEvidence};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::bundle::{Base, Bundle};
use crate::emit::{emit_bundle, emit_site_with_topology};
use crate::error::{CliError, CliResult};
use crate::parse::{parse_str, sha256_hex};
use crate::report::{degrees_json, Parameters, Report, Timing};

/// Largest nerve `nerve-export` writes out, in simplices.
pub const EXPORT_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    FibredBuild,
    TopologyCheck,
    SheafCheck,
    Cohomology,
    Cech,
    AdjunctionCheck,
    InvarianceCheck,
    Homology,
    NerveExport,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Validate,
        Command::FibredBuild,
        Command::TopologyCheck,
        Command::SheafCheck,
        Command::Cohomology,
        Command::Cech,
        Command::AdjunctionCheck,
        Command::InvarianceCheck,
        Command::Homology,
        Command::NerveExport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::FibredBuild => "fibred-build",
            Command::TopologyCheck => "topology-check",
            Command::SheafCheck => "sheaf-check",
            Command::Cohomology => "cohomology",
            Command::Cech => "cech",
            Command::AdjunctionCheck => "adjunction-check",
            Command::InvarianceCheck => "invariance-check",
            Command::Homology => "homology",
            Command::NerveExport => "nerve-export",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command {s}")))
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub truncation: usize,
    pub nmax: usize,
    /// Random extra inputs for `adjunction-check`.
    pub samples: usize,
    pub site: Option<String>,
    pub psheaf: Option<String>,
    pub presheaf: Option<String>,
    pub coefficients: Option<String>,
    pub category: Option<String>,
    pub morphism: Option<String>,
    pub object: Option<String>,
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            truncation: 5,
            nmax: 4,
            samples: 2,
            site: None,
            psheaf: None,
            presheaf: None,
            coefficients: None,
            category: None,
            morphism: None,
            object: None,
            timings: false,
        }
    }
}

/// A report plus, for `fibred-build`, the site file it produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub artifact: Option<String>,
}

struct Clock {
    enabled: bool,
    last: Instant,
    steps: Vec<Timing>,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Clock { enabled, last: Instant::now(), steps: Vec::new() }
    }

    fn lap(&mut self, step: &str) {
        if self.enabled {
            let now = Instant::now();
            self.steps.push(Timing { step: step.into(), millis: (now - self.last).as_secs_f64() * 1e3 });
            self.last = now;
        }
    }
}

pub fn run(command: Command, bundle: &Bundle, opts: &Options) -> CliResult<Outcome> {
    if opts.truncation < 2 {
        return Err(CliError::Usage("--truncation must be at least 2".into()));
    }
    let params = Parameters { seed: opts.seed, truncation: opts.truncation, nmax: opts.nmax };
    let mut report = Report::new(command.name(), bundle, params);
    let mut clock = Clock::new(opts.timings);
    let mut artifact = None;
    match command {
        Command::Validate => validate(bundle, &mut report)?,
        Command::FibredBuild => artifact = Some(fibred_build(bundle, opts, &mut report)?),
        Command::TopologyCheck => topology_check(bundle, opts, &mut report)?,
        Command::SheafCheck => sheaf_check(bundle, opts, &mut report)?,
        Command::Cohomology => cohomology(bundle, opts, &mut report)?,
        Command::Cech => cech(bundle, opts, &mut report)?,
        Command::AdjunctionCheck => adjunction_check(bundle, opts, &mut report)?,
        Command::InvarianceCheck => invariance_check(bundle, opts, &mut report)?,
        Command::Homology => homology_command(bundle, opts, &mut report)?,
        Command::NerveExport => nerve_export(bundle, opts, &mut report)?,
    }
    clock.lap(command.name());
    if opts.timings {
        report.timings = Some(clock.steps);
    }
    Ok(Outcome { report, artifact })
}

fn pick<'a, T>(items: &'a [T], wanted: Option<&str>, name: impl Fn(&T) -> &str, what: &str, flag: &str) -> CliResult<&'a T> {
    match wanted {
        Some(w) => items
            .iter()
            .find(|i| name(i) == w)
            .ok_or_else(|| CliError::Usage(format!("the bundle has no {what} named {w}"))),
        None if items.len() == 1 => Ok(&items[0]),
        None => Err(CliError::Usage(format!("found {} candidates for the {what}; choose one with {flag}", items.len()))),
    }
}

fn base<'a>(bundle: &'a Bundle, name: &str) -> CliResult<Base<'a>> {
    bundle.base(name).unwrap_or_else(|| Err(CliError::Usage(format!("no site or total category named {name}"))))
}

fn factors_json(g: &FgAbelianGroup) -> Value {
    json!(g.to_string())
}

fn validate(bundle: &Bundle, report: &mut Report) -> CliResult<()> {
    let mut sites = Vec::new();
    for s in &bundle.sites {
        let c = s.category();
        sites.push(json!({
            "name": s.name(),
            "objects": c.num_objects(),
            "morphisms": c.num_morphisms(),
            "groupoid": c.is_groupoid(),
            "covers": s.covers.len(),
            "topology": if s.generated { "generated" } else { "literal" },
        }));
        if !s.covers.is_empty() {
            let violations = verify_topology(&s.topology()?, &SiteCaps::default())?;
            report.verdict(
                format!("{}: topology axioms", s.name()),
                violations.is_empty(),
                violations.first().map(ToString::to_string),
            );
        }
    }
    let psheaves: Vec<Value> = bundle
        .psheaves
        .iter()
        .map(|p| {
            let c = p.presheaf.site();
            let sections: Vec<Value> = c
                .objects()
                .map(|u| {
                    let v = p.presheaf.value(u);
                    json!({
                        "object": c.object_name(u),
                        "category": v.name(),
                        "objects": v.num_objects(),
                        "morphisms": v.num_morphisms(),
                        "groupoid": v.is_groupoid(),
                    })
                })
                .collect();
            json!({ "name": p.name, "site": p.site, "sections": sections })
        })
        .collect();
    let presheaves: Vec<Value> = bundle
        .presheaves
        .iter()
        .map(|p| json!({ "name": p.name, "over": p.over, "sizes": p.presheaf.sizes() }))
        .collect();
    let abelian: Vec<Value> = bundle
        .abelian
        .iter()
        .map(|a| {
            let c = a.presheaf.base();
            let values: Vec<Value> = c
                .objects()
                .map(|u| json!({ "object": c.object_name(u), "group": factors_json(&a.presheaf.value(u)) }))
                .collect();
            json!({ "name": a.name, "over": a.over, "values": values })
        })
        .collect();
    let maps: Vec<Value> = bundle
        .maps
        .iter()
        .map(|m| {
            json!({
                "name": m.name,
                "dom": m.dom,
                "cod": m.cod,
                "sectionwise_equivalence": m.morphism.is_sectionwise_equivalence(),
            })
        })
        .collect();
    let text = emit_bundle(bundle);
    let round_trip = parse_str("<emitted>", &text).map(|b| b == *bundle);
    report.verdict(
        "bundle round-trips through the text format",
        matches!(round_trip, Ok(true)),
        round_trip.err().map(|e| e.to_string()),
    );
    report.payload = json!({
        "sites": sites,
        "psheaves": psheaves,
        "presheaves": presheaves,
        "abelian": abelian,
        "maps": maps,
    });
    Ok(())
}

fn fibred_build(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<String> {
    let p = pick(&bundle.psheaves, opts.psheaf.as_deref(), |p| &p.name, "presheaf of categories", "--psheaf")?;
    let site = bundle.site(&p.site).expect("parser resolved the site");
    let fs = p.fibred()?;
    let caps = SiteCaps::relaxed();
    let base_topology = site.topology()?;
    let induced = induced_topology(&fs, &base_topology, &caps)?;
    let laws = fs.total.validate();
    report.verdict("total category laws", laws.is_empty(), laws.first().map(ToString::to_string));
    let projection = fs.projection.validate();
    report.verdict("projection is a functor", projection.is_empty(), projection.first().map(ToString::to_string));
    let violations = verify_topology(&induced, &caps)?;
    report.verdict("induced topology axioms", violations.is_empty(), violations.first().map(ToString::to_string));
    let name = format!("{}/{}", p.site, p.name);
    let renamed = Arc::new((*fs.total).clone().with_name(&name));
    let covers = induced.all_covers().to_vec();
    let text = emit_site_with_topology(&GrothendieckTopology::from_covers(renamed, covers));
    let c = &fs.total;
    report.payload = json!({
        "psheaf": p.name,
        "site": p.site,
        "total": name,
        "objects": c.object_names(),
        "morphisms": c.num_morphisms(),
        "covering_sieves": c.objects().map(|x| json!({
            "object": c.object_name(x),
            "count": induced.covers(x).len(),
        })).collect::<Vec<_>>(),
        "site_file_sha256": sha256_hex(text.as_bytes()),
    });
    Ok(text)
}

fn axiom_verdicts(report: &mut Report, label: &str, t: &GrothendieckTopology, caps: &SiteCaps) -> CliResult<Value> {
    let violations = verify_topology(t, caps)?;
    for axiom in ["sieve", "maximal-sieve", "base-change", "local-character"] {
        let first = violations.iter().find(|v| v.axiom() == axiom);
        report.verdict(format!("{label}: {axiom}"), first.is_none(), first.map(ToString::to_string));
    }
    let c = t.site();
    let covers: Vec<Value> = c
        .objects()
        .map(|u| {
            json!({
                "object": c.object_name(u),
                "sieves": t.covers(u).iter().map(|s| s.describe(c)).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "covering_sieves": covers,
        "violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
    }))
}

fn topology_check(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<()> {
    let s = pick(&bundle.sites, opts.site.as_deref(), |s| s.name(), "site", "--site")?;
    let site_part = axiom_verdicts(report, s.name(), &s.topology()?, &SiteCaps::default())?;
    let mut payload = json!({ "site": s.name(), "topology": site_part });
    if let Some(name) = &opts.psheaf {
        let p = bundle.psheaf(name).ok_or_else(|| CliError::Usage(format!("no presheaf of categories named {name}")))?;
        let fs = p.fibred()?;
        let caps = SiteCaps::relaxed();
        let induced = induced_topology(&fs, &bundle.site(&p.site).expect("resolved").topology()?, &caps)?;
        let total = format!("{}/{}", p.site, p.name);
        payload["induced"] = axiom_verdicts(report, &total, &induced, &caps)?;
        payload["total"] = json!(total);
    }
    report.payload = payload;
    Ok(())
}

fn sheaf_check(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<()> {
    let p = pick(&bundle.presheaves, opts.presheaf.as_deref(), |p| &p.name, "presheaf", "--presheaf")?;
    let b = base(bundle, &p.over)?;
    let t = b.topology()?;
    let c = b.category();
    let f = &p.presheaf;
    let witness = is_sheaf(f, &t)?;
    let sh = sheafify(f, &t)?;
    let again = is_sheaf(&sh.sheaf, &t)?;
    report.verdict("sheafification is a sheaf", again.is_none(), again.as_ref().map(|w| format!("{w:?}")));
    let unit_bijective = c.objects().all(|u| {
        let mut seen: Vec<usize> = sh.unit[u].clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == f.size(u) && f.size(u) == sh.sheaf.size(u)
    });
    report.verdict(
        "unit is a bijection exactly when the input is a sheaf",
        unit_bijective == witness.is_none(),
        None,
    );
    let witness_json = witness.as_ref().map(|w| {
        let (kind, family) = match &w.failure {
            SheafFailure::Existence { family } => ("existence", family),
            SheafFailure::Uniqueness { family, .. } => ("uniqueness", family),
        };
        json!({
            "object": c.object_name(w.object),
            "sieve": w.sieve.describe(c),
            "failure": kind,
            "family": family,
        })
    });
    report.payload = json!({
        "presheaf": p.name,
        "over": p.over,
        "is_sheaf": witness.is_none(),
        "witness": witness_json,
        "sizes": f.sizes(),
        "sheafified_sizes": sh.sheaf.sizes(),
    });
    Ok(())
}

fn require_trivial(t: &GrothendieckTopology) -> CliResult<()> {
    if !t.is_trivial() {
        return Err(CliError::Refused(
            "exact cohomology is only available for the trivial topology; use `cech` for covers".into(),
        ));
    }
    Ok(())
}

fn cohomology(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<()> {
    let a = pick(&bundle.abelian, opts.coefficients.as_deref(), |a| &a.name, "abelian presheaf", "--coefficients")?;
    let b = base(bundle, &a.over)?;
    let t = b.site_topology()?;
    require_trivial(&t)?;
    let f = &a.presheaf;
    let groups = match &b {
        Base::Total { psheaf, .. } => match PresheafOfGroupoids::new((*psheaf.presheaf).clone()) {
            Ok(g) => stack_cohomology(&t, &g, f, opts.nmax)?,
            Err(_) => category_cohomology(f, opts.nmax)?,
        },
        Base::Site(_) => category_cohomology(f, opts.nmax)?,
    };
    let h0 = global_sections(f)?;
    report.verdict("H^0 equals global sections", groups[0] == h0, Some(format!("H^0 = {}, Γ = {h0}", groups[0])));
    report.payload = json!({
        "coefficients": a.name,
        "over": a.over,
        "title": format!("H^n({}; {})", a.over, a.name),
        "degrees": degrees_json(&groups),
    });
    Ok(())
}

fn cech(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<()> {
    let a = pick(&bundle.abelian, opts.coefficients.as_deref(), |a| &a.name, "abelian presheaf", "--coefficients")?;
    let b = base(bundle, &a.over)?;
    let t = b.topology()?;
    let c = b.category();
    let f = &a.presheaf;
    let objects: Vec<usize> = match &opts.object {
        Some(name) => vec![c.object_index(name).ok_or_else(|| CliError::Usage(format!("no object named {name}")))?],
        None => c.objects().collect(),
    };
    let finite = c.objects().all(|x| f.value(x).free_rank == 0);
    let elements = if finite { Some(f.elements(1 << 16)?) } else { None };
    let mut rows = Vec::new();
    for &u in &objects {
        for s in t.covers(u) {
            let groups = cech_cohomology(&t, u, s, f, opts.nmax)?;
            if let Some(el) = &elements {
                let families = matching_families(el, s)?.len();
                let order = groups[0].order().and_then(|o| o.to_usize());
                report.verdict(
                    format!("{}: H^0 counts matching families", s.describe(c)),
                    order == Some(families),
                    Some(format!("|H^0| = {}, families = {families}", groups[0])),
                );
            }
            rows.push(json!({
                "object": c.object_name(u),
                "sieve": s.describe(c),
                "title": format!("Ȟ^n({}; {})", s.describe(c), a.name),
                "degrees": degrees_json(&groups),
            }));
        }
    }
    report.payload = json!({ "coefficients": a.name, "over": a.over, "covers": rows });
    Ok(())
}

fn evidence_verdict(report: &mut Report, check: String, e: &WeEvidence) {
    report.verdict(check, e.pass(), e.failure());
}

fn adjunction_check(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<()> {
    let dim = opts.truncation;
    let top = (dim - 1).min(3);
    let use_psheaf = match (&opts.psheaf, &opts.site) {
        (Some(_), _) => true,
        (None, Some(_)) => false,
        (None, None) => bundle.psheaves.len() == 1,
    };
    if use_psheaf {
        let p = pick(&bundle.psheaves, opts.psheaf.as_deref(), |p| &p.name, "presheaf of categories", "--psheaf")?;
        return adjunction_sectionwise(p.groupoids()?, &p.name, opts, report);
    }
    let groupoids: Vec<_> = bundle.sites.iter().filter(|s| s.category().is_groupoid()).collect();
    let s = match &opts.site {
        Some(name) => bundle.site(name).ok_or_else(|| CliError::Usage(format!("no site named {name}")))?,
        None if groupoids.len() == 1 => groupoids[0],
        None => return Err(CliError::Usage("choose a groupoid with --site or a presheaf with --psheaf".into())),
    };
    let g = Groupoid::new(s.category().clone())?;
    let mut r = rng(opts.seed);
    let mut xs: Vec<(String, OverNerve)> = vec![("BG".into(), OverNerve::nerve_over_itself(g.clone(), dim))];
    for k in 0..opts.samples {
        xs.push((format!("sample {k}"), random_over_nerve(&mut r, &g, dim, 12)?));
    }
    let mut diagrams: Vec<(String, GroupoidDiagram)> = vec![("point".into(), GroupoidDiagram::one_point(g.clone(), dim))];
    for x0 in g.objects() {
        diagrams.push((format!("hom({},-)", g.object_name(x0)), representable(&g, x0, dim)?));
    }
    let mut xs_json = Vec::new();
    for (name, x) in &xs {
        let p = pb(x)?;
        let h = hocolim(&p.diagram, dim)?;
        let eta = unit_eta(x, &p, &h)?;
        evidence_verdict(report, format!("η at {name}: weak equivalence evidence"), &we_evidence(&eta, top)?);
        xs_json.push(json!({ "name": name, "counts": x.total().counts(), "hocolim_pb_counts": h.over.total().counts() }));
    }
    let mut as_json = Vec::new();
    for (name, a) in &diagrams {
        let h = hocolim(a, dim)?;
        let p = pb(&h.over)?;
        let eps = counit_epsilon(a, &h, &p)?;
        let ok: Vec<bool> = eps.iter().map(|e| we_evidence(e, top).map(|w| w.pass())).collect::<Result<_, _>>()?;
        report.verdict(format!("ε at {name}: weak equivalence evidence"), ok.iter().all(|&b| b), None);
        as_json.push(json!({ "name": name, "hocolim_counts": h.over.total().counts() }));
    }
    for (xn, x) in &xs {
        for (an, a) in &diagrams {
            let t = check_triangles(x, a, dim)?;
            report.verdict(format!("triangle identities for X = {xn}, A = {an}"), t.pass(), (!t.pass()).then(|| format!("{t:?}")));
        }
    }
    report.payload = json!({
        "groupoid": s.name(),
        "truncation": dim,
        "evidence_top": top,
        "over_nerve": xs_json,
        "diagrams": as_json,
    });
    Ok(())
}

/// `y ↦ hom(x0, y)` with the action by postcomposition.
fn representable(g: &Groupoid, x0: usize, dim: usize) -> CliResult<GroupoidDiagram> {
    let homs: Vec<Vec<usize>> = g.objects().map(|y| g.hom(x0, y).collect()).collect();
    let sizes: Vec<usize> = homs.iter().map(Vec::len).collect();
    let act: Vec<Vec<usize>> = g
        .morphism_ids()
        .map(|h| {
            let (y, y2) = (g.source(h), g.target(h));
            homs[y].iter().map(|&k| homs[y2].iter().position(|&m| m == g.compose(h, k)).expect("closed")).collect()
        })
        .collect();
    Ok(GroupoidDiagram::from_gset(g.clone(), &sizes, &act, dim)?)
}

fn adjunction_sectionwise(g: PresheafOfGroupoids, name: &str, opts: &Options, report: &mut Report) -> CliResult<()> {
    let dim = opts.truncation;
    let top = (dim - 1).min(3);
    let base = Arc::new(g);
    let fs = fibsite_core::fibred::grothendieck_construct(&Arc::new(base.inner().clone()))?;
    let y = PresheafOverNerve::nerve_over_itself(base.clone(), dim);
    let mut xs = vec![("point".to_string(), EnrichedGroupoidDiagram::constant(base.clone(), Arc::new(discrete_sset(1, dim))))];
    let mut r = rng(opts.seed);
    for k in 0..opts.samples {
        let f = random_presheaf(&mut r, &fs.total, 2, k % 2 == 0);
        let d = EnrichedSetDiagram::from_presheaf(&fs, &f)?;
        xs.push((format!("sample {k}"), EnrichedGroupoidDiagram::discrete(base.clone(), &d, dim)?));
    }
    let p = presheaf_pb(&y)?;
    let h = presheaf_hocolim(&p.diagram, dim)?;
    let site = base.site();
    for (u, eta) in presheaf_unit_eta(&y, &p, &h)?.iter().enumerate() {
        evidence_verdict(report, format!("η at {}: weak equivalence evidence", site.object_name(u)), &we_evidence(eta, top)?);
    }
    let mut rows = Vec::new();
    for (xn, x) in &xs {
        let rep = check_sectionwise(&y, x, dim)?;
        report.verdict(format!("sectionwise triangles and naturality for X = {xn}"), rep.pass(), None);
        let hx = presheaf_hocolim(x, dim)?;
        rows.push(json!({
            "name": xn,
            "hocolim_counts": hx.sections.iter().map(|s| s.over.total().counts().to_vec()).collect::<Vec<_>>(),
        }));
    }
    report.payload = json!({ "psheaf": name, "truncation": dim, "evidence_top": top, "diagrams": rows });
    Ok(())
}

fn invariance_check(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<()> {
    let m = pick(&bundle.maps, opts.morphism.as_deref(), |m| &m.name, "psheaf map", "--morphism")?;
    let cod = bundle.psheaf(&m.cod).expect("resolved");
    let site = bundle.site(&cod.site).expect("resolved");
    let t = site.topology()?;
    let total_name = format!("{}/{}", cod.site, cod.name);
    let (f, coefficients): (AbelianPresheaf, String) = match &opts.coefficients {
        Some(name) => {
            let a = bundle.abelian(name).ok_or_else(|| CliError::Usage(format!("no abelian presheaf named {name}")))?;
            if a.over != total_name {
                return Err(CliError::Usage(format!("{name} lives over {}, not {total_name}", a.over)));
            }
            (a.presheaf.clone(), a.name.clone())
        }
        None => (AbelianPresheaf::constant(cod.fibred()?.total.clone(), &FgAbelianGroup::free(1)), "Z".into()),
    };
    let r = invariance_report(&m.morphism, &t, &f, opts.nmax)?;
    for n in 0..r.target.len() {
        report.verdict(
            format!("H^{n} agrees"),
            r.target[n] == r.source[n],
            Some(format!("{} vs {}", r.target[n], r.source[n])),
        );
    }
    report.payload = json!({
        "morphism": m.name,
        "coefficients": coefficients,
        "target": { "title": format!("H^n({total_name}; {coefficients})"), "degrees": degrees_json(&r.target) },
        "source": {
            "title": format!("H^n({}/{}; pulled back {coefficients})", cod.site, m.dom),
            "degrees": degrees_json(&r.source),
        },
    });
    Ok(())
}

fn nerve_category(bundle: &Bundle, opts: &Options) -> CliResult<(String, Arc<FiniteCategory>)> {
    match &opts.category {
        Some(name) => Ok((name.clone(), base(bundle, name)?.category().clone())),
        None => {
            let s = pick(&bundle.sites, None, |s| s.name(), "category", "--category")?;
            Ok((s.name().to_string(), s.category().clone()))
        }
    }
}

fn homology_command(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<()> {
    let (name, c) = nerve_category(bundle, opts)?;
    let top = opts.nmax.min(opts.truncation - 1);
    let n = nerve(&c, top + 1);
    let h = homology(&n.sset, top)?;
    let unnormalized = homology_unnormalized(&n.sset, top)?;
    report.verdict("normalized and unnormalized chains agree", h == unnormalized, None);
    report.payload = json!({
        "category": name,
        "counts": n.sset.counts(),
        "components": h.components,
        "title": format!("H_n(B{name})"),
        "degrees": degrees_json(&h.groups),
    });
    Ok(())
}

fn nerve_export(bundle: &Bundle, opts: &Options, report: &mut Report) -> CliResult<()> {
    let (name, c) = nerve_category(bundle, opts)?;
    let dim = opts.truncation;
    let total: usize = fibsite_core::sset::nerve_strings(&c, dim).iter().map(Vec::len).sum();
    if total > EXPORT_CAP {
        return Err(CliError::CapExceeded(format!("nerve of {name} has {total} simplices through degree {dim}")));
    }
    let n = nerve(&c, dim);
    let s = &n.sset;
    let levels: Vec<Value> = (0..=dim)
        .map(|k| {
            let simplices: Vec<Value> = (0..s.count(k))
                .map(|x| {
                    let faces: Vec<usize> = if k == 0 { Vec::new() } else { (0..=k).map(|i| s.face(k, i, x)).collect() };
                    let degeneracies: Vec<usize> =
                        if k == dim { Vec::new() } else { (0..=k).map(|i| s.degeneracy(k, i, x)).collect() };
                    json!({ "label": s.label(k, x), "faces": faces, "degeneracies": degeneracies })
                })
                .collect();
            json!({ "degree": k, "simplices": simplices })
        })
        .collect();
    report.verdict("simplicial identities", s.validate().is_empty(), None);
    report.payload = json!({ "category": name, "truncation": dim, "counts": s.counts(), "levels": levels });
    Ok(())
}
