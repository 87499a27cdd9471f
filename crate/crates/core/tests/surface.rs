mod common;

use std::collections::BTreeMap;
use std::fs;

use proptest::prelude::*;

use common::{fixture, repo, strat};
use vl_core::surface::eval::{run_program, EvalError, Output};
use vl_core::surface::{
    discover_registry, load_repository, parse_module, parse_term, pretty_module, pretty_term, SurfaceError,
    SurfaceTerm, TermKind,
};
use vl_core::version::{PartialLabel, Version};

#[test]
fn parses_identity_module() {
    let m = parse_module("module M where\nid x = x").unwrap();
    assert_eq!(m.name, "M");
    assert!(m.imports.is_empty());
    assert_eq!(m.defs.len(), 1);
    assert_eq!(m.defs[0].name, "id");
    assert_eq!(m.defs[0].body, SurfaceTerm::lam("x", SurfaceTerm::var("x")));
}

#[test]
fn parses_imports_and_ver() {
    let src = "module App where\nimport Dir\nimport Hash\n\nmain = ver [Hash=1.0.0] of mkHash 3\n";
    let m = parse_module(src).unwrap();
    assert_eq!(m.imports, vec!["Dir".to_string(), "Hash".to_string()]);
    let d = PartialLabel::single("Hash", Version::new(1, 0, 0));
    let want = SurfaceTerm::new(TermKind::VerOf(d, Box::new(SurfaceTerm::app(SurfaceTerm::var("mkHash"), SurfaceTerm::int(3)))));
    assert_eq!(m.def("main").unwrap().body, want);
}

#[test]
fn parses_unversion() {
    let m = parse_module("module M where\nf = unversion (g 1)").unwrap();
    let want = SurfaceTerm::new(TermKind::Unversion(Box::new(SurfaceTerm::app(SurfaceTerm::var("g"), SurfaceTerm::int(1)))));
    assert_eq!(m.def("f").unwrap().body, want);
}

#[test]
fn operators_and_precedence() {
    let t = parse_term("1 + 2 * 3 == 7").unwrap();
    let want = SurfaceTerm::binop(
        "==",
        SurfaceTerm::binop("+", SurfaceTerm::int(1), SurfaceTerm::binop("*", SurfaceTerm::int(2), SurfaceTerm::int(3))),
        SurfaceTerm::int(7),
    );
    assert_eq!(t, want);
    let cons = parse_term("1 : 2 : []").unwrap();
    let nil = SurfaceTerm::new(TermKind::List(vec![]));
    assert_eq!(cons, SurfaceTerm::binop(":", SurfaceTerm::int(1), SurfaceTerm::binop(":", SurfaceTerm::int(2), nil)));
}

#[test]
fn if_desugars_to_case() {
    let t = parse_term("if c then 1 else 2").unwrap();
    let TermKind::Case(_, alts) = &t.kind else { panic!("expected case, got {t:?}") };
    assert_eq!(alts.len(), 2);
    assert_eq!(alts[0].1, SurfaceTerm::int(2));
    assert_eq!(alts[1].1, SurfaceTerm::int(1));
}

#[test]
fn syntax_error_reports_position() {
    let e = parse_module("module M where\nf = (1 +").unwrap_err();
    match e {
        SurfaceError::Syntax { span, .. } => assert_eq!(span.line, 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn duplicate_definition_rejected() {
    let e = parse_module("module M where\nf = 1\nf = 2").unwrap_err();
    assert_eq!(e, SurfaceError::DuplicateDefinition("f".into()));
}

#[test]
fn pretty_module_round_trips_fixtures() {
    for case in ["hash", "matrix"] {
        let r = repo(case);
        for m in r.modules.values() {
            let mut back = parse_module(&pretty_module(m)).unwrap();
            back.version = m.version.clone();
            let strip = |m: &vl_core::surface::SurfaceModule| {
                m.defs.iter().map(|d| (d.name.clone(), d.body.clone())).collect::<Vec<_>>()
            };
            assert_eq!(strip(&back), strip(m), "{}", m.name);
            assert_eq!(back.imports, m.imports);
        }
    }
}

#[test]
fn repository_orders_imports_first() {
    let r = repo("matrix");
    let pos = |m: &str| r.order.iter().position(|x| x == m).unwrap();
    assert!(pos("List") < pos("Matrix"));
    assert_eq!(
        r.registry.versions("Matrix").unwrap(),
        &[Version::new(0, 15, 0), Version::new(0, 16, 0)]
    );
}

fn write_module(root: &std::path::Path, name: &str, version: &str, src: &str) {
    let dir = root.join(name).join(version);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join(format!("{name}.vl")), src).unwrap();
}

#[test]
fn import_cycle_detected() {
    let tmp = tempfile::tempdir().unwrap();
    write_module(tmp.path(), "A", "1.0.0", "module A where\nimport B\na = b");
    write_module(tmp.path(), "B", "1.0.0", "module B where\nimport A\nb = a");
    let roots = vec![tmp.path().to_path_buf()];
    let reg = discover_registry(&roots).unwrap();
    let e = load_repository(&roots, &reg).unwrap_err();
    assert_eq!(e, SurfaceError::ImportCycle(vec!["A".into(), "B".into()]));
}

#[test]
fn module_name_must_match_directory() {
    let tmp = tempfile::tempdir().unwrap();
    write_module(tmp.path(), "A", "1.0.0", "module Wrong where\na = 1");
    let roots = vec![tmp.path().to_path_buf()];
    let reg = discover_registry(&roots).unwrap();
    match load_repository(&roots, &reg).unwrap_err() {
        SurfaceError::InFile { source, .. } => {
            assert_eq!(*source, SurfaceError::ModuleNameMismatch { expected: "A".into(), found: "Wrong".into() })
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_import_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    write_module(tmp.path(), "A", "1.0.0", "module A where\nimport Nope\na = 1");
    let roots = vec![tmp.path().to_path_buf()];
    let reg = discover_registry(&roots).unwrap();
    assert_eq!(
        load_repository(&roots, &reg).unwrap_err(),
        SurfaceError::UnknownImport { module: "A".into(), import: "Nope".into() }
    );
}

fn run(src: &str) -> Result<Output, EvalError> {
    let m = parse_module(src).unwrap();
    let defs: BTreeMap<_, _> = m.defs.iter().map(|d| (d.name.clone(), d.body.clone())).collect();
    run_program(&defs, "main", 100_000)
}

#[test]
fn evaluator_examples() {
    assert_eq!(run("module M where\nmain = let x = 2 in x * 21").unwrap(), Output::Int(42));
    assert_eq!(
        run("module M where\nmain = reverse (sort [3, 1, 2])").unwrap(),
        Output::List(vec![Output::Int(3), Output::Int(2), Output::Int(1)])
    );
    assert_eq!(
        run("module M where\nmain = case (1, 2) of { (a, b) -> b - a }").unwrap(),
        Output::Int(1)
    );
    assert_eq!(run("module M where\ninc x = x + 1\nmain = foldl (\\a x -> a + inc x) 0 [1, 2]").unwrap(), Output::Int(5));
    assert_eq!(run("module M where\nmain = if 1 == 2 then 10 else 20").unwrap(), Output::Int(20));
}

#[test]
fn evaluator_runs_out_of_fuel() {
    let m = parse_module("module M where\nmain = length (map (\\x -> x * x) [1, 2, 3, 4, 5, 6, 7, 8])").unwrap();
    let defs: BTreeMap<_, _> = m.defs.iter().map(|d| (d.name.clone(), d.body.clone())).collect();
    assert!(run_program(&defs, "main", 3).is_err());
}

#[test]
fn fixture_path_exists() {
    assert!(fixture("hash").join("App.vl").is_file());
}

proptest! {
    #[test]
    fn parse_pretty_is_fixpoint(t in strat::term()) {
        let printed = pretty_term(&t);
        let once = parse_term(&printed).map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
        prop_assert_eq!(&once, &t, "{}", printed);
        let twice = parse_term(&pretty_term(&once)).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn free_vars_survive_round_trip(t in strat::term()) {
        let back = parse_term(&pretty_term(&t)).unwrap();
        prop_assert_eq!(back.free_vars(), t.free_vars());
    }
}
