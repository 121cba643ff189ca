//! The binary's exit codes and the determinism and round-trip properties of
//! documents and reports.

mod common;

use common::*;
use gstruct::cli::run::render_document;
use gstruct::cli::{example, parse, run_source, Command, Options, Report, FIXTURES};
use gstruct::exterior::KForm;
use gstruct::g_structures::{model_form, GStructure, Kind};
use std::path::PathBuf;
use std::process::Command as Process;

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_gstruct"))
}

fn fixture_path(name: &str) -> String {
    format!("{}/examples/{name}.gs", env!("CARGO_MANIFEST_DIR"))
}

fn status(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("gstruct-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn exit_codes() {
    assert_eq!(status(&["check", &fixture_path("nonintsu3")]), 0);
    assert_eq!(status(&["reduce", &fixture_path("nonintG2")]), 0);
    assert_eq!(status(&["extend", &fixture_path("nonintG2reduced")]), 0);
    // τ₀ = −6/7 and Ψ = μ∧φ + ⋆φ do not hold in the φ-derived orientation
    assert_eq!(status(&["reduce", &fixture_path("nonintSpin7OneA")]), 1);
    assert_eq!(status(&["example", "--name", "nonintG2"]), 1);

    let bad = scratch("bad.gs", "dim 3\nd e1 = e2^^e3\n");
    assert_eq!(status(&["check", bad.to_str().unwrap()]), 2);
    assert_eq!(status(&["check", &fixture_path("nonintsu3"), "--tol", "1e-9"]), 2);
    assert_eq!(status(&["example", "--name", "nosuchfixture"]), 2);

    assert_eq!(status(&["check", &fixture_path("nonintSpin7Two")]), 3);
    assert_eq!(status(&["reduce", &fixture_path("nonintsu3")]), 3);
    let _ = std::fs::remove_file(bad);
}

#[test]
fn float_backend_runs() {
    let out = bin()
        .args(["check", &fixture_path("nonintG2"), "--backend", "float", "--tol", "1e-9", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(r.backend, "float");
    assert_eq!(r.kind.as_deref(), Some("g2"));
}

#[test]
fn json_reports_are_byte_stable() {
    for fx in FIXTURES {
        let run = || bin().args(["example", "--name", fx.id, "--format", "json"]).output().unwrap().stdout;
        let first = run();
        assert!(!first.is_empty());
        assert_eq!(first, run(), "{}", fx.id);
        assert_eq!(String::from_utf8(first).unwrap(), example(fx.id).unwrap().to_json(), "{}", fx.id);
    }
}

#[test]
fn reports_round_trip_through_json() {
    for fx in FIXTURES {
        let r = example(fx.id).unwrap();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r, "{}", fx.id);
    }
    let r = run_source(b"dim 2\nd e1 = e1^e2\nd e2 = e2^e1\n", "inline", Command::Check, &Options::default());
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn fixtures_survive_parse_serialize_parse() {
    for fx in FIXTURES {
        let doc = match parse(fx.source) {
            Err(e) if fx.id == "nonintSpin7Two" => {
                assert_eq!(e.code, "lie_frame::jacobi");
                continue;
            }
            other => other.unwrap(),
        };
        let text = doc.serialize();
        assert_eq!(parse(&text).unwrap(), doc, "{}", fx.id);
        assert_eq!(parse(&text).unwrap().serialize(), text, "{}", fx.id);
    }
}

#[test]
fn random_documents_survive_parse_serialize_parse() {
    let mut r = rng(41);
    for i in 0..40 {
        let (kind, n) = [(Kind::AlmostHermitian, 6), (Kind::SU3, 6), (Kind::G2, 7), (Kind::Spin7, 8)][i % 4];
        let fr = frame_pool(n, i as u8, &mut r);
        let rot = random_orthogonal(n, &mut r);
        let f: Vec<KForm<E>> = model_form(kind, n).unwrap().iter().map(|a| rotate(a, &rot)).collect();
        let sp = full(fr.clone());
        let s = match kind {
            Kind::AlmostHermitian => GStructure::almost_hermitian(sp, f[0].clone()),
            Kind::SU3 => GStructure::su3(sp, f[0].clone(), f[1].clone()),
            Kind::G2 => GStructure::g2(sp, f[0].clone()),
            Kind::Spin7 => GStructure::spin7(sp, f[0].clone()),
        }
        .unwrap();
        let text = render_document(&fr, &s, &KForm::zero(n, 1));
        let doc = parse(&text).unwrap();
        assert_eq!(parse(&doc.serialize()).unwrap(), doc);
        let back = doc.structure().unwrap().unwrap();
        assert_eq!(back.primary_forms(), s.primary_forms());
        assert_eq!(doc.frame().unwrap(), fr);
    }
}

#[test]
fn crlf_input_gives_the_same_report() {
    let src = std::fs::read_to_string(fixture_path("nonintG2")).unwrap();
    let crlf = src.replace('\n', "\r\n");
    let a = run_source(src.as_bytes(), "x", Command::Reduce, &Options::default());
    let b = run_source(crlf.as_bytes(), "x", Command::Reduce, &Options::default());
    assert_eq!(a.to_json(), b.to_json());
}
