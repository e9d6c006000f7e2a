use std::path::{Path, PathBuf};

use super::*;
use crate::hecke_characters::CharSpec;
use crate::padic_core::PadicElem;
use crate::quadfield::{Ideal, OkElem, QuadField};
use crate::tate_curve::{CurveSpec, PhiMeta, PointFile, Qp2Elem, UCoord};

const BASE: &str = r#"p = 5
precision = 8
qcap = 60

[field]
d_k = 7

[characters]
eta1 = "eta1.json"

[f]
n_f = 11
"#;

fn spec(c: i128, r: u32, e: u64) -> CharSpec {
    let k = QuadField::new(7).unwrap();
    let c0 = if c == 1 { Ideal::unit() } else { k.principal(&OkElem::int(c)) };
    CharSpec { d_k: 7, c0: c0.rep(), r, generator_images: vec![e] }
}

/// Write `toml` and the character files into a fresh directory and validate.
fn validate_with(toml: &str, chars: &[(&str, CharSpec)]) -> Result<Validated> {
    let dir = tempfile::tempdir().unwrap();
    for (name, s) in chars {
        std::fs::write(dir.path().join(name), s.to_json()).unwrap();
    }
    let path = dir.path().join("config.toml");
    std::fs::write(&path, toml).unwrap();
    PipelineConfig::load(&path)?.validate()
}

fn clause_of(r: Result<Validated>) -> String {
    match r {
        Err(Error::ValidationFailed { clause, .. }) => clause,
        other => panic!("expected a validation failure, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn base_config_validates() {
    let v = validate_with(BASE, &[("eta1.json", spec(1, 1, 1))]).unwrap();
    assert_eq!(v.eta2, v.eta1.pow(-1));
}

#[test]
fn each_clause_has_a_failing_fixture() {
    let good = spec(1, 1, 1);
    let cases: Vec<(&str, String, Vec<(&str, CharSpec)>)> = vec![
        ("p prime", BASE.replace("p = 5", "p = 9"), vec![]),
        ("precision", BASE.replace("precision = 8", "precision = 0"), vec![]),
        ("p inert", BASE.replace("p = 5", "p = 11").replace("n_f = 11", "n_f = 13"), vec![]),
        ("N_f squarefree", BASE.replace("n_f = 11", "n_f = 121"), vec![]),
        ("N_f coprime to d_K", BASE.replace("n_f = 11", "n_f = 7"), vec![]),
        ("Heegner parity", BASE.replace("n_f = 11", "n_f = 3"), vec![]),
        ("field", BASE.to_string(), vec![("eta1.json", CharSpec { d_k: 11, ..good.clone() })]),
        ("conductor shape", BASE.to_string(), vec![("eta1.json", spec(1, 0, 1))]),
        ("conductor shape", BASE.to_string(), vec![("eta1.json", spec(11, 1, 1))]),
        ("split c", BASE.to_string(), vec![("eta1.json", spec(3, 1, 1))]),
        ("eta != eta^sigma", BASE.to_string(), vec![("eta1.json", spec(1, 1, 3))]),
        (
            "self-duality",
            BASE.replace("eta1 = \"eta1.json\"", "eta1 = \"eta1.json\"\neta2 = \"eta2.json\""),
            vec![("eta2.json", spec(1, 1, 2))],
        ),
    ];
    for (clause, toml, extra) in cases {
        let mut chars = vec![("eta1.json", good.clone())];
        for (n, s) in extra {
            chars.retain(|(m, _)| *m != n);
            chars.push((n, s));
        }
        assert_eq!(clause_of(validate_with(&toml, &chars)), clause, "{toml}");
    }
}

#[test]
fn config_parse_errors() {
    let e = PipelineConfig::from_toml("p = 5\n[field]\nd_k = \"seven\"\n").unwrap_err();
    assert!(matches!(&e, Error::Parse { location, .. } if location == "line 3"), "{e:?}");
    assert_eq!(e.exit_code(), 3);
    let e = PipelineConfig::from_toml(&format!("{BASE}\nbogus = 1\n")).unwrap_err();
    assert!(matches!(e, Error::Parse { .. }));
}

#[test]
fn malformed_charspec_names_the_field() {
    let bad = r#"{"d_K": 7, "c0": {"a": 1, "b": 0, "content": 1}, "r": 1, "generator_images": "one"}"#;
    match CharSpec::from_json(bad) {
        Err(Error::Parse { location, .. }) => assert_eq!(location, "generator_images"),
        other => panic!("{other:?}"),
    }
    let missing = r#"{"d_K": 7, "c0": {"a": 1, "b": 0, "content": 1}, "generator_images": [1]}"#;
    match CharSpec::from_json(missing) {
        Err(Error::Parse { location, .. }) => assert_eq!(location, "r"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn basis_loader() {
    let (b, _) = synthetic_basis(8, 40, 2, false).unwrap();
    let loaded = b.load().unwrap();
    assert_eq!(loaded.labels.len(), 3);
    assert_eq!(loaded.basis.dim(), 3);

    let mut dup = b.clone();
    dup.lines.push(dup.lines[0].clone());
    assert!(matches!(dup.load(), Err(Error::RankDeficient(_))));

    let mut wrong = b.clone();
    let tag = wrong.lines[1].tag.as_mut().unwrap();
    let a2 = tag.a_l.get_mut(&2).unwrap();
    a2[0] = (a2[0] + 1) % 5u64.pow(8);
    match wrong.load() {
        Err(e @ Error::EigenMismatch { .. }) => assert_eq!(e.exit_code(), 2),
        other => panic!("{other:?}"),
    }

    let mut schema = b.clone();
    schema.schema = "other/1".into();
    assert!(matches!(schema.load(), Err(Error::Parse { location, .. }) if location == "schema"));
}

#[test]
fn expansion_file_round_trip() {
    let (_, x) = synthetic_basis(6, 30, 2, true).unwrap();
    let back = ExpansionFile::from_json(&x.to_json()).unwrap();
    assert_eq!(back, x);
    let e = back.expansion().unwrap();
    assert_eq!(ExpansionFile::from_expansion(&e, x.weight).coefficients, x.coefficients);
}

#[test]
fn exit_codes_for_bad_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    assert_eq!(run(["padic-theta", "--help"]), 0);
    assert_eq!(run(["padic-theta", "frobnicate"]), 3);
    assert_eq!(run(["padic-theta", "theta", "--out", o]), 2);
    let missing = dir.path().join("nope.toml");
    assert_eq!(run(["padic-theta", "theta", "--out", o, "--config", missing.to_str().unwrap()]), 3);
    assert!(out.join(LOG_FILE).exists());
}

// Fixtures shipped in `fixtures/`. Regenerate with UPDATE_FIXTURES=1.

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

const FIXTURE_CONFIG: &str = r#"# Q(sqrt(-7)), p = 5 inert, eta of conductor 5 and order 12.
p = 5
precision = 8
qcap = 120

[field]
d_k = 7

[characters]
eta1 = "eta1.json"

[f]
n_f = 11

[family]
kind = "hida"
qcap = 40

[theta]
weights = [1, 2, 3]

[ordproj]
basis = "basis.json"
input = "xi.json"
target = "E(1,1)"

[triple]
target = 0
lambda_cap = 7
qcap = 40
weights = [2, 4]

[tate]
point = "point.json"
"#;

fn fixture_point() -> PointFile {
    let n = 8;
    let x = PadicElem::new(5, n, 7, 0) * PadicElem::new(5, n, 1, 5);
    let u = Qp2Elem::new(0, x * x.conj().inv().unwrap()).unwrap();
    PointFile {
        curve: CurveSpec { p: 5, precision: n, j: Some("-7/5".into()), a_invariants: None, alpha: Some(1) },
        u: UCoord::from_elem(&u),
        u_frob: Some(UCoord::from_elem(&u.conj())),
        phi: PhiMeta {
            label: "quadratic phi1(p)=-1".into(),
            quadratic: true,
            phi1_p: Some(-1),
            d1: Some(-3),
            d2: Some(-23),
            check_frobenius: true,
        },
    }
}

fn fixture_files() -> Vec<(&'static str, String)> {
    let (basis, xi) = synthetic_basis(8, 60, 2, true).unwrap();
    let (basis3, _) = synthetic_basis(8, 60, 2, false).unwrap();
    vec![
        ("config.toml", FIXTURE_CONFIG.to_string()),
        ("eta1.json", spec(1, 1, 1).to_json() + "\n"),
        ("basis.json", basis.to_json()),
        ("basis3.json", basis3.to_json()),
        ("xi.json", xi.to_json()),
        ("point.json", fixture_point().to_json()),
    ]
}

#[test]
fn fixtures_are_current() {
    let dir = fixture_dir();
    let update = std::env::var_os("UPDATE_FIXTURES").is_some();
    for (name, text) in fixture_files() {
        let path = dir.join(name);
        if update {
            write_atomic(&path, text.as_bytes()).unwrap();
        } else {
            let on_disk = std::fs::read_to_string(&path).unwrap_or_default();
            assert!(on_disk == text, "{name} is stale; rerun with UPDATE_FIXTURES=1");
        }
    }
}

#[test]
fn shipped_fixtures_load() {
    let cfg = PipelineConfig::load(&fixture_dir().join("config.toml")).unwrap();
    cfg.validate().unwrap();
    let b = load_eigenbasis(&cfg.resolve(Path::new("basis.json"))).unwrap();
    assert_eq!(b.labels, ["E(1,1)", "E(chi3,chi3^-1)", "E(chi2,chi2^-1)", "kernel"]);
}
