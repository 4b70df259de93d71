use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn nsakit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsakit")).args(args).env_remove("NSAKIT_SEED").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn normalize_exit_codes() {
    let out = nsakit(&["--json", "normalize", path(&corpus("eq4.nsa")), "--annotations", path(&corpus("eq4.ann.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "1");
    assert_eq!(r["normal_form"], true);
    assert_eq!(r["caps"]["search_cap"], 10000);

    let dir = tempfile::tempdir().unwrap();
    let internal = dir.path().join("internal.nsa");
    std::fs::write(&internal, "(forall x:0)le(x, x)").unwrap();
    let r = report(&nsakit(&["--json", "normalize", path(&internal)]));
    assert_eq!(r["final"], "(forall x:0)le(x, x)");
    assert_eq!(r["trace"]["steps"].as_array().unwrap().len(), 0);

    let stuck = dir.path().join("stuck.nsa");
    std::fs::write(&stuck, "(exists x:0)(forall^st y:0)le(x, y)").unwrap();
    assert_eq!(nsakit(&["normalize", path(&stuck)]).status.code(), Some(2));

    let bad = dir.path().join("bad.nsa");
    std::fs::write(&bad, "(forall x:0 le(x, x)").unwrap();
    assert_eq!(nsakit(&["normalize", path(&bad)]).status.code(), Some(1));
    std::fs::write(&bad, "(forall x:0)le(x, \\y:0. y)").unwrap();
    assert_eq!(nsakit(&["normalize", path(&bad)]).status.code(), Some(1));
    assert_eq!(nsakit(&["normalize", "/nonexistent.nsa"]).status.code(), Some(1));
}

#[test]
fn model_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsakit(&["--json", "normalize", path(&corpus("eq4.nsa")), "--annotations", path(&corpus("eq4.ann.json"))]);
    let trace = dir.path().join("eq4.json");
    std::fs::write(&trace, &out.stdout).unwrap();
    let ok = nsakit(&["--json", "model-check", path(&trace)]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&ok)["counterexamples"], 0);

    let mut t = report(&out)["trace"].clone();
    let last = t["steps"].as_array().unwrap().len() - 1;
    let after = t["steps"][last]["after"].as_str().unwrap().replace("closeR(x, y, n) ->", "closeR(x, y, n) &");
    t["steps"][last]["after"] = Value::String(after);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, t.to_string()).unwrap();
    let out = nsakit(&["--json", "model-check", path(&bad)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(report(&out)["first_counterexample"]["env"].is_array());

    let models = dir.path().join("models");
    std::fs::create_dir(&models).unwrap();
    let m = nsakit::model::TwoLevelModel::new(3, 2, 2).unwrap().with_relation(
        "closeR",
        nsakit::model::Relation::Named(nsakit::model::NamedRelation::DistLt),
    );
    std::fs::write(models.join("m.json"), m.to_json()).unwrap();
    assert_eq!(nsakit(&["model-check", path(&trace), "--models", path(&models)]).status.code(), Some(0));
    std::fs::write(models.join("z.json"), "{\"U\": 9}").unwrap();
    assert_eq!(nsakit(&["model-check", path(&trace), "--models", path(&models)]).status.code(), Some(1));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(nsakit(&["model-check", path(&bad)]).status.code(), Some(1));

    assert_eq!(nsakit(&["model-check", "--random", "200"]).status.code(), Some(0));
}

#[test]
fn case_study_exit_codes() {
    for name in ["mct", "gh", "fan"] {
        let out = nsakit(&["--json", "case-study", name]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(report(&out)["passed"], true);
    }
    let out = nsakit(&["--json", "case-study", "fan", "--caps", "depth=1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["caps"]["depth_cap"], 1);
    assert_eq!(nsakit(&["case-study", "mct", "--caps", "search=3"]).status.code(), Some(3));
    assert_ne!(nsakit(&["case-study", "nope"]).status.code(), Some(0));
}

#[test]
fn reports_are_byte_identical() {
    let runs = [
        vec!["--json", "case-study", "mct", "--seed", "5"],
        vec!["--json", "case-study", "fan", "--seed", "5"],
        vec!["--json", "case-study", "gh"],
        vec!["--json", "model-check", "--random", "50", "--seed", "9"],
    ];
    for args in &runs {
        assert_eq!(nsakit(args).stdout, nsakit(args).stdout, "{args:?}");
    }
}

#[test]
fn environment_seed_overrides_flag() {
    let with_env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_nsakit"))
            .args(["--json", "case-study", "fan", "--seed", "1"])
            .env("NSAKIT_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(report(&with_env("77"))["seed"], 77);
    assert_eq!(with_env("77").stdout, nsakit(&["--json", "case-study", "fan", "--seed", "77"]).stdout);
}
