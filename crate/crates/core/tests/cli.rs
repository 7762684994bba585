use std::path::Path;
use std::process::{Command, Output};

use latrep::lattice::{BilinearForm, FormKind};
use latrep::modrep::format_action;
use latrep::tensor::{format_scenario, stand_in_action, TensorScenario};
use serde_json::Value;

fn latrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latrep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn craig_six_three() {
    let out = latrep(&["verify-craig", "--n", "6", "--ell", "3"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["cases"][0]["verdict"]["pq_order_valuation"], 1);
    assert_eq!(r["cases"][0]["anchor"], "craig-lemma (ii)-(vi)");
}

#[test]
fn craig_five_three_has_q_equal_p() {
    let out = latrep(&["verify-craig", "--n", "5", "--ell", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["cases"][0]["verdict"]["q_equals_p"], true);
}

#[test]
fn missing_scenario_exits_two() {
    let out = latrep(&["verify-tensor", "--scenario", "missing.txt"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.txt"));
}

#[test]
fn invalid_prime_and_flags_exit_two() {
    assert_eq!(
        code(&latrep(&["verify-craig", "--n", "6", "--ell", "4"])),
        2
    );
    assert_eq!(code(&latrep(&["verify-craig", "--n", "6"])), 2);
    assert_eq!(code(&latrep(&["suite", "--n", "6"])), 2);
    assert_eq!(
        code(&latrep(&[
            "composite-demo",
            "--m",
            "2",
            "--n",
            "4",
            "--ell",
            "2"
        ])),
        2
    );
}

#[test]
fn enumeration_bound_is_reported() {
    let out = Command::new(env!("CARGO_BIN_EXE_latrep"))
        .args(["verify-craig", "--n", "8", "--ell", "2"])
        .env("LATREP_MAX_ENUM", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let r = json(&out);
    assert_eq!(r["enumeration_bound"], 3);
    assert_eq!(r["bounds_hit"].as_array().unwrap().len(), 1);
}

#[test]
fn wellrounded_from_action_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sl2.txt");
    std::fs::write(&path, format_action(&stand_in_action(), 7)).unwrap();
    let out = latrep(&["verify-wellrounded", "--action", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = &json(&out)["cases"][0]["verdict"];
    assert_eq!(v["evidence"]["well_rounded"], true);
    assert_eq!(v["evidence"]["span_dim"], 4);
    assert_eq!(v["condition_iii_lifted"], true);
}

fn write_scenario(dir: &Path, name: &str, scn: &TensorScenario) -> String {
    let path = dir.join(name);
    std::fs::write(&path, format_scenario(scn)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn tensor_scenario_file_and_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let scn = TensorScenario::symmetric_group(6, 3).unwrap();
    let good = write_scenario(dir.path(), "s6.txt", &scn);
    let out = latrep(&["verify-tensor", "--scenario", &good]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["cases"][0]["verdict"]["t_exponent"], 1);
    assert_eq!(r["cases"][0]["verdict"]["jh_factor_count"], 1);

    let mut bad = scn.clone();
    bad.h = BilinearForm::new(latrep::ExactMatrix::identity(5), FormKind::Symmetric, 3).unwrap();
    let bad_path = write_scenario(dir.path(), "corrupt.txt", &bad);
    let out = latrep(&["verify-tensor", "--scenario", &bad_path]);
    assert_eq!(code(&out), 1);
    let r = json(&out);
    let failed = r["cases"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["status"] == "fail")
        .unwrap();
    let names: Vec<&str> = failed["counterexample"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"h") && names.contains(&"d_action[0]"));
}

#[test]
fn malformed_scenario_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(
        &path,
        "[s_action]\naction dim=2 ngens=1 ell=3\n2 2\n1 x\n0 1\n",
    )
    .unwrap();
    assert_eq!(
        code(&latrep(&[
            "verify-tensor",
            "--scenario",
            path.to_str().unwrap()
        ])),
        2
    );
}

#[test]
fn classify_with_window_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.md");
    let out = latrep(&[
        "classify-lattices",
        "--n",
        "3",
        "--ell",
        "3",
        "--window",
        "1:1",
        "--format",
        "markdown",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let md = std::fs::read_to_string(&out_path).unwrap();
    assert!(md.starts_with("# latrep report"));
    assert!(md.contains("stable-lattice-factorization-lemma"));
}

#[test]
fn composite_demo_small() {
    let out = latrep(&["composite-demo", "--m", "2", "--n", "3", "--ell", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        json(&out)["cases"][0]["verdict"]["product_well_rounded"],
        true
    );
}

#[test]
fn suite_is_green_and_byte_stable() {
    let a = latrep(&["suite", "--jobs", "4"]);
    let b = latrep(&["suite", "--jobs", "1"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    let (mut ja, mut jb) = (json(&a), json(&b));
    ja.as_object_mut().unwrap().remove("timing");
    jb.as_object_mut().unwrap().remove("timing");
    assert_eq!(ja.to_string(), jb.to_string());
    assert!(ja["cases"].as_array().unwrap().len() >= 80);
}

#[test]
fn unknown_window_syntax_is_rejected() {
    let out = latrep(&[
        "classify-lattices",
        "--n",
        "3",
        "--ell",
        "3",
        "--window",
        "x",
    ]);
    assert_eq!(code(&out), 2);
}
