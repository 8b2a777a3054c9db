use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use outf3::pipeline::{parse_automorphism, Envelope};
use outf3::Automorphism;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_outf3"));
    c.env_remove("OUTF3_BUDGET");
    c
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn envelope(phi: &Automorphism) -> String {
    serde_json::to_string(&Envelope::new(phi, "")).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn e1() -> Automorphism {
    Automorphism::from_ints(&[&[1], &[2, 1], &[3, 2]])
}

#[test]
fn planted_conjugate_gives_verified_witness() {
    let dir = tempfile::tempdir().unwrap();
    let g = outf3::automorphism::elementary::generators(3);
    let chi = g[3].then(&g[14]).then(&g[27]).then(&g[8]);
    let psi = e1().conjugate_by(&chi);
    let l = write(dir.path(), "l.json", &envelope(&e1()));
    let r = write(dir.path(), "r.txt", &outf3::pipeline::format_automorphism(&psi));
    let out = bin().arg("decide").arg(&l).arg(&r).arg("--json").output().unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["branch"], "quadratic");
    let w = parse_automorphism(v["witness"].as_str().unwrap()).unwrap();
    // independent check: images of χ^-1 φ χ and ψ differ by one conjugator
    let lhs = w.inverse().then(&e1()).then(&w);
    assert!(lhs.outer_equal(&psi));
    for key in ["transcript", "timings", "budgets"] {
        assert!(!v[key].is_null(), "{key}");
    }
}

#[test]
fn profile_reports_degree_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "e1.txt", "a->a, b->b*a, c->c*b\n");
    let out = bin().arg("profile").arg(&f).output().unwrap();
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["growth"]["value"]["degree"], 2);
    assert_eq!(v["growth"]["verified"], true);
    assert_eq!(v["reducibility"]["value"]["status"], "reducible");
}

#[test]
fn exit_codes_for_no_and_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(dir.path(), "l.txt", "a->a, b->ba, c->c");
    let id = write(dir.path(), "id.txt", "a->a, b->b, c->c");
    let sq = write(dir.path(), "sq.txt", "a->a, b->b a^2, c->c");
    assert_eq!(code(&bin().arg("decide").arg(&l).arg(&id).output().unwrap()), 1);
    let out = bin().arg("decide").arg(&l).arg(&sq).arg("--budget").arg("2").output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("unknown"));
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "g.txt", "a->a, b->b, c->c");
    let bad = write(dir.path(), "b.txt", "a->a,\nb->b%, c->c");
    let out = bin().arg("decide").arg(&good).arg(&bad).output().unwrap();
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 5"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn budgets_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.txt", "a->a, b->b, c->c");
    assert_eq!(code(&bin().arg("decide").arg(&f).arg(&f).arg("--budget").arg("0").output().unwrap()), 3);
    assert_eq!(code(&bin().arg("decide").arg(&f).arg(&f).arg("--budget").arg("99").output().unwrap()), 3);
    let env = bin().env("OUTF3_BUDGET", "lots").arg("decide").arg(&f).arg(&f).output().unwrap();
    assert_eq!(code(&env), 3);
    let ok = bin().env("OUTF3_BUDGET", "3").arg("decide").arg(&f).arg(&f).arg("--json").output().unwrap();
    assert_eq!(code(&ok), 0);
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["budgets"]["search_length"], 3);
}

#[test]
fn bundled_corpus_is_sound() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("out.json");
    let out = bin().arg("corpus").arg(corpus()).arg("--report").arg(&report).output().unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["soundness_violations"], 0);
    assert_eq!(v["expectation_mismatches"], 0);
    assert!(v["cases"].as_u64().unwrap() >= 10);
    for r in v["results"].as_array().unwrap() {
        match r["verdict"].as_str().unwrap() {
            "yes" => assert!(r["witness"].is_string()),
            "no" => assert!(r["certificate"].is_object()),
            _ => assert!(r["reason"].is_string()),
        }
    }
}

#[test]
fn selftest_passes() {
    let out = bin().arg("selftest").output().unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}
