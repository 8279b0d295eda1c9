use std::path::{Path, PathBuf};

use fibsite::report::{parse_report, Parameters, SCHEMA};
use fibsite::{emit_report, parse_files, run, Bundle, Command, Format, Options, Report};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bundle(name: &str) -> Bundle {
    parse_files(&[root().join("bundles").join(name)]).unwrap()
}

fn cohomology_report() -> Report {
    run(Command::Cohomology, &bundle("z2-over-pt.fib"), &Options::default()).unwrap().report
}

#[test]
fn cohomology_of_z2_over_point() {
    let r = cohomology_report();
    assert!(r.pass());
    let groups: Vec<&str> =
        r.payload["degrees"].as_array().unwrap().iter().map(|d| d["group"].as_str().unwrap()).collect();
    assert_eq!(groups, ["Z", "0", "Z/2", "0", "Z/2"]);
}

#[test]
fn empty_verdicts_give_valid_json() {
    let p = Parameters { seed: 0, truncation: 5, nmax: 4 };
    let r = Report::new("validate", &Bundle::default(), p);
    let text = emit_report(&r, Format::Json);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdicts"], serde_json::json!([]));
    assert_eq!(v["schema"], SCHEMA);
}

#[test]
fn json_round_trips_byte_identically() {
    let text = emit_report(&cohomology_report(), Format::Json);
    let back = parse_report(&text).unwrap();
    assert_eq!(emit_report(&back, Format::Json), text);
}

#[test]
fn reports_are_deterministic() {
    let b = bundle("z2-over-pt.fib");
    let opts = Options { truncation: 4, seed: 7, ..Options::default() };
    for c in [Command::Cohomology, Command::AdjunctionCheck, Command::FibredBuild, Command::Validate] {
        let one = emit_report(&run(c, &b, &opts).unwrap().report, Format::Json);
        let two = emit_report(&run(c, &b, &opts).unwrap().report, Format::Json);
        assert_eq!(one, two, "{}", c.name());
    }
}

#[test]
fn markdown_lists_degrees() {
    let md = emit_report(&cohomology_report(), Format::Markdown);
    for (n, g) in ["Z", "0", "Z/2", "0", "Z/2"].iter().enumerate() {
        assert!(md.contains(&format!("| {n} | {g} |")), "{md}");
    }
    assert!(!md.contains("| 5 |"));
}

#[test]
fn markdown_renders_direct_sums() {
    let b = fibsite::parse_str("s.fib", "category pt\nobjects *\nabpresheaf F over pt\nconstant Z Z/2\n").unwrap();
    let r = run(Command::Cohomology, &b, &Options { nmax: 1, ..Options::default() }).unwrap().report;
    let md = emit_report(&r, Format::Markdown);
    assert!(md.contains("| 0 | Z ⊕ Z/2 |"), "{md}");
}

#[test]
fn parameters_are_recorded() {
    let b = bundle("pt.fib");
    let opts = Options { seed: 11, truncation: 3, nmax: 2, ..Options::default() };
    let r = run(Command::Homology, &b, &opts).unwrap().report;
    assert_eq!(r.parameters, Parameters { seed: 11, truncation: 3, nmax: 2 });
    assert_eq!(r.inputs.len(), 1);
    assert!(r.timings.is_none());
}

#[test]
fn homology_of_bz2() {
    let b = bundle("z2-over-pt.fib");
    let opts = Options { category: Some("Z2".into()), ..Options::default() };
    let r = run(Command::Homology, &b, &opts).unwrap().report;
    assert!(r.pass());
    let groups: Vec<&str> =
        r.payload["degrees"].as_array().unwrap().iter().map(|d| d["group"].as_str().unwrap()).collect();
    assert_eq!(groups, ["Z", "Z/2", "0", "Z/2", "0"]);
}

#[test]
fn invariance_on_shipped_equivalence() {
    let b = bundle("equivalence.fib");
    let r = run(Command::InvarianceCheck, &b, &Options { nmax: 3, ..Options::default() }).unwrap().report;
    assert!(r.pass(), "{:?}", r.verdicts);
    assert_eq!(r.verdicts.len(), 4);
}

#[test]
fn adjunction_check_on_z2() {
    let b = bundle("z2-over-pt.fib");
    let opts = Options { truncation: 4, site: Some("Z2".into()), ..Options::default() };
    let r = run(Command::AdjunctionCheck, &b, &opts).unwrap().report;
    assert!(r.pass(), "{:?}", r.verdicts);
    assert!(r.verdicts.iter().any(|v| v.check.starts_with("triangle identities")));
}

#[test]
fn exact_cohomology_refuses_covers() {
    let err = run(Command::Cohomology, &bundle("arrow-site.fib"), &Options::default()).unwrap_err();
    assert_eq!(err.exit_code(), fibsite::exit::REFUSED);
}

#[test]
fn fibred_build_output_is_a_site() {
    let b = bundle("arrow-site.fib");
    let out = run(Command::FibredBuild, &b, &Options { psheaf: Some("A".into()), ..Options::default() }).unwrap();
    assert!(out.report.pass());
    let total = fibsite::parse_str("total.fib", out.artifact.as_deref().unwrap()).unwrap();
    let r = run(Command::TopologyCheck, &total, &Options::default()).unwrap().report;
    assert!(r.pass(), "{:?}", r.verdicts);
}
