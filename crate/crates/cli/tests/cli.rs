use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lexichoice_cli::report::{Record, Report};
use lexichoice_cli::spec::{build_choice, build_exclusion, choice_def, exclusion_table_def, load, SpecFile, Theorem};
use lexichoice_core::families::{random_mto1_responsive, random_responsive, random_union_of_orders, rng};
use lexichoice_core::{ChoiceFunction, EquivalencePartition, ExclusionFunction, GroundSet, ItemSet, WitnessCondition};

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn schema(name: &str) -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn lexichoice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexichoice")).args(args).env_remove("LEXICHOICE_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(items: &[usize]) -> ItemSet {
    ItemSet::from_items(items.iter().copied())
}

#[test]
fn spec_files_round_trip() {
    for name in ["spec.json", "contracts.json"] {
        let loaded = load(&shipped(name)).unwrap();
        let printed = serde_json::to_string_pretty(&loaded.spec).unwrap();
        let reparsed: SpecFile = serde_json::from_str(&printed).unwrap();
        assert_eq!(reparsed, loaded.spec, "{name}");
        let dir = tempfile::tempdir().unwrap();
        let copy = dir.path().join(name);
        std::fs::write(&copy, &printed).unwrap();
        let again = load(&copy).unwrap();
        assert_eq!(again.spec, loaded.spec);
        assert_eq!(again.choices.keys().collect::<Vec<_>>(), loaded.choices.keys().collect::<Vec<_>>());
    }
}

#[test]
fn printed_definitions_rebuild_the_same_functions() {
    let g = GroundSet::new(5).unwrap();
    let p = EquivalencePartition::new(vec![s(&[0, 1]), s(&[2, 3]), s(&[4])]).unwrap();
    let mut r = rng(3);
    for _ in 0..30 {
        let fs: Vec<ChoiceFunction> = vec![
            random_responsive(&g, &mut r),
            random_union_of_orders(&g, &mut r),
            random_mto1_responsive(&g, &p, &mut r),
            lexichoice_core::compose::lex_compose(
                &random_responsive(&g, &mut r),
                &random_responsive(&g, &mut r),
                &ExclusionFunction::capacity(&g, 2),
            )
            .unwrap(),
        ];
        for c in fs {
            let def = choice_def(&c);
            let json = serde_json::to_string(&def).unwrap();
            let back = build_choice(&g, Some(&p), &serde_json::from_str(&json).unwrap()).unwrap();
            assert_eq!(back.tabulate().unwrap(), c.tabulate().unwrap(), "{json}");
        }
    }
    let e = ExclusionFunction::underline_equiv(&g, p.clone()).unwrap();
    let def = exclusion_table_def(&e);
    let back = build_exclusion(&g, None, &serde_json::from_str(&serde_json::to_string(&def).unwrap()).unwrap()).unwrap();
    for z in g.all_subsets() {
        assert_eq!(back.eval(z).unwrap(), e.eval(z).unwrap());
    }
}

#[test]
fn classify_reports_parameters() {
    let spec = shipped("spec.json");
    let o = lexichoice(&["classify", spec.to_str().unwrap(), "identityE"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let params = &v["results"][0]["data"]["params"];
    assert_eq!(params, &serde_json::json!({"t": "inf", "K": [], "T": []}));
    assert_eq!(v["seed"], 0);
}

#[test]
fn reports_are_byte_stable_and_round_trip() {
    let spec = shipped("spec.json");
    let spec = spec.to_str().unwrap();
    let a = lexichoice(&["run", spec, "--seed", "7"]);
    let b = lexichoice(&["run", spec, "--seed", "7"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_lexichoice"))
        .args(["run", spec, "--seed", "7"])
        .env("LEXICHOICE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(single.stdout, a.stdout);

    let text = String::from_utf8(a.stdout).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
    assert_eq!(report.seed, 7);
    assert!(report.timing_ms.is_none());
}

#[test]
fn exit_codes() {
    let spec = shipped("spec.json");
    let spec = spec.to_str().unwrap();
    assert_eq!(code(&lexichoice(&["verify", spec, "--theorem=thm1", "--exhaustive"])), 0);
    assert_eq!(code(&lexichoice(&["witness", spec, "capE2", "--condition=pi-domain"])), 0);
    assert_eq!(code(&lexichoice(&["check", spec, "serial", "--prop=PI"])), 0);
    // A failed check without an expectation is a verification failure.
    assert_eq!(code(&lexichoice(&["check", spec, "either", "--prop=SM"])), 1);
    // The identity satisfies every condition, so there is nothing to build.
    assert_eq!(code(&lexichoice(&["witness", spec, "identityE", "--condition=pi-domain"])), 2);
    assert_eq!(code(&lexichoice(&["check", spec, "serial", "--prop=XX"])), 2);
    assert_eq!(code(&lexichoice(&["verify", spec, "--theorem=thm9"])), 2);
    assert_eq!(code(&lexichoice(&["classify", "/nonexistent/spec.json", "identityE"])), 2);
}

#[test]
fn diagnostics_name_file_and_line() {
    let original = std::fs::read_to_string(shipped("spec.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        // serde error: line and column come from the parser
        (original.replace("\"quota\": 2", "\"quota\": \"two\""), "invalid type", 6),
        (original.replace("\"rule\": \"capacity\", \"n\": 2", "\"rule\": \"capacity\", \"m\": 2"), "unknown field", 12),
        // unresolved name inside a task
        (original.replace("lex(capE2, pair, serial)", "lex(capE3, pair, serial)"), "capE3", 25),
        // incomplete table without a default
        (original.replace(",\n      \"default\": \"identity\"", ""), "no entry", 14),
    ];
    for (i, (text, needle, line)) in cases.into_iter().enumerate() {
        assert_ne!(text, original, "case {i} did not edit the spec");
        let path = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&path, text).unwrap();
        let o = lexichoice(&["run", path.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "case {i}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(needle), "case {i}: {err}");
        let prefix = format!("{}:{line}", path.display());
        assert!(err.starts_with(&prefix), "case {i}: expected {prefix}, got {err}");
    }
}

#[test]
fn replay_reproduces_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let spec = shipped("spec.json");
    let o = lexichoice(&["run", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let mut report: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let records: Vec<&Record> = report.results.iter().flat_map(|r| &r.records).collect();
    assert!(records.len() >= 3);
    assert!(records.iter().any(|r| matches!(r, Record::Choice { .. })));
    assert!(records.iter().all(|r| r.replay() == Ok(true)));
    assert_eq!(code(&lexichoice(&["replay", out.to_str().unwrap()])), 0);

    // Moving the larger input to the smaller one erases every breach.
    for r in report.results.iter_mut().flat_map(|r| r.records.iter_mut()) {
        match r {
            Record::Composition { y_small, y_big, .. } | Record::Choice { y_small, y_big, .. } => *y_big = *y_small,
        }
    }
    std::fs::write(&out, serde_json::to_string_pretty(&report).unwrap()).unwrap();
    assert_eq!(code(&lexichoice(&["replay", out.to_str().unwrap()])), 1);
}

#[test]
fn compose_evaluates_and_tabulates() {
    let spec = shipped("spec.json");
    let spec = spec.to_str().unwrap();
    let o = lexichoice(&["compose", spec, "--tree=lex(capE2, pair, serial)", "--eval=a,b,c,d"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // pair takes {d,c}; capacity 2 is then reached and closes everything.
    assert_eq!(v["results"][0]["data"]["output"], serde_json::json!([2, 3]));
    let o = lexichoice(&["compose", spec, "--tree=left(identityE, serial, pair, either)"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"][0]["data"]["table"].as_array().unwrap().len(), 16);
    assert_eq!(code(&lexichoice(&["compose", spec, "--tree=lex(capE2, pair)"])), 2);
}

#[test]
fn contracts_spec_runs_clean() {
    let spec = shipped("contracts.json");
    let o = lexichoice(&["run", spec.to_str().unwrap(), "--samples", "40"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn schemas_list_every_name() {
    let spec = schema("spec.schema.json");
    let tasks = spec["$defs"]["task"]["oneOf"].as_array().unwrap();
    let verify = tasks.iter().find(|t| t["properties"]["task"]["const"] == "verify").unwrap();
    let theorems: Vec<&str> =
        verify["properties"]["theorem"]["enum"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(theorems, Theorem::ALL.iter().map(|t| t.name()).collect::<Vec<_>>());
    let witness = tasks.iter().find(|t| t["properties"]["task"]["const"] == "witness").unwrap();
    let conditions: Vec<String> = witness["properties"]["condition"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let expected: Vec<String> =
        WitnessCondition::ALL.iter().map(|c| serde_json::to_value(c).unwrap().as_str().unwrap().to_string()).collect();
    assert_eq!(conditions, expected);
    let report = schema("report.schema.json");
    assert_eq!(report["properties"]["report_version"]["const"], lexichoice_cli::report::REPORT_VERSION);
}
