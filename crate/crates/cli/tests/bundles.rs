use std::path::{Path, PathBuf};

use fibsite::emit::emit_bundle;
use fibsite::{parse_files, parse_str, CliError};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn shipped() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(root().join("bundles"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "fib"))
        .collect();
    v.sort();
    v
}

#[test]
fn point_has_one_object() {
    let b = parse_files(&[root().join("bundles/pt.fib")]).unwrap();
    assert_eq!(b.sites.len(), 1);
    assert_eq!(b.sites[0].category().num_objects(), 1);
    assert_eq!(b.sites[0].category().num_morphisms(), 1);
}

#[test]
fn z2_over_point_counts() {
    let b = parse_files(&[root().join("bundles/z2-over-pt.fib")]).unwrap();
    let g = b.psheaf("G").unwrap();
    assert_eq!(g.presheaf.site().num_objects(), 1);
    let section = g.presheaf.value(0);
    assert_eq!((section.num_objects(), section.num_morphisms()), (1, 2));
    assert!(g.groupoids().is_ok());
}

#[test]
fn wrong_composite_cites_inverse_law() {
    let err = parse_files(&[root().join("crates/cli/tests/fixtures/bad-inverse.fib")]).unwrap_err();
    assert!(matches!(err, CliError::Validation { .. }), "{err:?}");
    assert!(err.to_string().contains("inverse law"), "{err}");
}

#[test]
fn syntax_errors_carry_position_and_token() {
    let err = parse_str("x.fib", "category X\nobjects a\nmor f a -> a\n").unwrap_err();
    match err {
        CliError::Syntax { at, token, .. } => {
            assert_eq!((at.file.as_str(), at.line), ("x.fib", 3));
            assert!(at.column > 0);
            assert!(!token.is_empty());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unresolved_names_are_reported() {
    let err = parse_str("x.fib", "category X\nobjects a\nmor f : a -> b\n").unwrap_err();
    match err {
        CliError::Unresolved { at, token, .. } => {
            assert_eq!(at.line, 3);
            assert_eq!(token, "b");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let b = parse_str("c.fib", "# a point\n\ncategory pt   # trailing\nobjects *\n").unwrap();
    assert_eq!(b.sites[0].category().num_objects(), 1);
}

#[test]
fn shipped_examples_round_trip() {
    for path in shipped() {
        let b = parse_files(&[&path]).unwrap();
        let text = emit_bundle(&b);
        let again = parse_str("emitted.fib", &text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", path.display()));
        assert_eq!(again, b, "{}", path.display());
        assert_eq!(emit_bundle(&again), text, "{}", path.display());
    }
}

#[test]
fn literal_and_generated_covers() {
    let text = "category C\nobjects V W U\nmor a : V -> U\nmor b : W -> U\ncover U = { a }\n";
    let literal = parse_str("l.fib", text).unwrap();
    let t = literal.sites[0].topology().unwrap();
    let u = literal.sites[0].category().object_index("U").unwrap();
    assert_eq!(t.covers(u).len(), 2);
    let generated = parse_str("g.fib", &format!("{text}topology generated\n")).unwrap();
    let t = generated.sites[0].topology().unwrap();
    assert!(t.covers(u).len() > 2);
}

#[test]
fn names_are_shared_across_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.fib");
    let b = dir.path().join("b.fib");
    std::fs::write(&a, "category pt\nobjects *\n").unwrap();
    std::fs::write(&b, "abpresheaf F over pt\nconstant Z Z/3\n").unwrap();
    let bundle = parse_files(&[&a, &b]).unwrap();
    assert_eq!(bundle.sources.len(), 2);
    assert_eq!(bundle.abelian("F").unwrap().groups, vec![vec![0, 3]]);
    assert!(parse_files(&[&b, &a]).is_err());
}

#[test]
fn hashes_follow_contents() {
    let one = parse_str("a.fib", "category pt\nobjects *\n").unwrap();
    let two = parse_str("b.fib", "category pt\nobjects *\n").unwrap();
    let three = parse_str("a.fib", "category pt\nobjects x\n").unwrap();
    assert_eq!(one.sources[0].sha256, two.sources[0].sha256);
    assert_ne!(one.sources[0].sha256, three.sources[0].sha256);
    assert_eq!(one.sources[0].sha256.len(), 64);
}
