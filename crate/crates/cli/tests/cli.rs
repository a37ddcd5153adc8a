use std::io::Write;
use std::process::Command;

use sprox_cli::{run, stable_json, Outcome};

fn sprox(args: &[&str]) -> Outcome {
    run(std::iter::once("sprox").chain(args.iter().copied()).map(String::from))
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("sprox-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
    p
}

#[test]
fn every_subcommand_succeeds_on_its_example() {
    let cases: &[&[&str]] = &[
        &["analyze-substitution", "--rules", "a->aab;b->bad;c->ccd;d->dcb"],
        &["verify-pair", "--construction", "golden-blocks", "--horizon", "2000"],
        &["verify-pair", "--construction", "quartic", "--horizon", "1000"],
        &["verify-pair", "--construction", "base-scrambled", "--horizon", "3000"],
        &["construct-witness", "--construction", "geometric", "--length", "100"],
        &["construct-witness", "--construction", "fixed-point", "--rules", "0->001;1->100", "--length", "30"],
        &["check-circular", "--words", "01,10"],
        &["classify-set", "--rule", "avoid-powers:3", "--horizon", "500"],
        &["sft-info", "--forbidden", "11"],
        &["interval-trace", "--coding", "10"],
        &["rotation-example", "--n-max", "10"],
    ];
    for c in cases {
        let out = sprox(c);
        assert_eq!(out.code, 0, "{c:?}: {}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["schema"], "sprox-report/1");
        assert_eq!(v["command"], c[0]);
    }
}

#[test]
fn spec_examples() {
    let out = sprox(&["analyze-substitution", "--rules", "a->aab;b->bad;c->ccd;d->dcb", "--depth", "5"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["verdicts"]["primitivity"]["primitive"], true);
    assert!(v["verdicts"]["coincidence"].is_null());
    assert_eq!(v["verdicts"]["column_number"]["estimate"], 2);
    let bd = v["verdicts"]["pairs"]["entries"].as_array().unwrap().iter().find(|e| e["u"] == "b" && e["v"] == "d").unwrap();
    assert_eq!(bd["class"], "exclusive");

    let out = sprox(&["verify-pair", "--construction", "substitution-fixed-points", "--horizon", "19683"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["verdicts"]["pair"]["proximal_evidence"], true);
    assert_eq!(v["verdicts"]["pair"]["sprox_evidence"], false);
    assert!(v["verdicts"]["pair"]["levels"][0]["close"]["max_gap"].is_u64());

    let out = sprox(&["check-circular", "--family", "padded-even", "--n", "3", "--test-length", "60"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["verdicts"]["circular"]["circular"], true);
}

#[test]
fn aliases_resolve_to_the_same_report() {
    let a = sprox(&["verify-pair", "--construction", "ex55-fixed-points", "--horizon", "729"]);
    let b = sprox(&["verify-pair", "--construction", "substitution-fixed-points", "--horizon", "729"]);
    let c = sprox(&["verify-pair", "--horizon", "729"]);
    let sa = stable_json(a.report.as_ref().unwrap());
    assert_eq!(sa, stable_json(b.report.as_ref().unwrap()));
    assert_eq!(sa, stable_json(c.report.as_ref().unwrap()));
    let a = sprox(&["check-circular", "--family", "ex49", "--n", "2"]);
    let b = sprox(&["check-circular", "--family", "padded-even", "--n", "2"]);
    assert_eq!(stable_json(a.report.as_ref().unwrap()), stable_json(b.report.as_ref().unwrap()));
}

#[test]
fn text_and_csv_renderings() {
    let out = sprox(&["analyze-substitution", "--rules", "0->001;1->100", "--output", "text"]);
    assert!(out.stdout.contains("coincidence (t=1, i=1, e=0)"), "{}", out.stdout);
    let out = sprox(&["rotation-example", "--output", "csv"]);
    assert!(out.stdout.starts_with("n,distance,height,coeff\n"));
    let out = sprox(&["interval-trace", "--coding", "01", "--output", "csv"]);
    assert!(out.stdout.starts_with("j,value,decimal\n"));
    let out = sprox(&["check-circular", "--family", "padded-even", "--output", "csv"]);
    assert_eq!(out.code, 2);
}

#[test]
fn usage_errors_exit_two() {
    for c in [
        &["frobnicate"][..],
        &["verify-pair", "--construction", "nope"],
        &["analyze-substitution", "--rules", "a->"],
        &["classify-set", "--rule", "primes"],
        &["sft-info"],
        &["interval-trace", "--coding", "012"],
        &["interval-trace", "--coding", "010101010"],
        &["rotation-example", "--horizon", "10"],
        &["construct-witness", "--construction", "fixed-point"],
        &["verify-pair", "--output", "yaml"],
    ] {
        let out = sprox(c);
        assert_eq!(out.code, 2, "{c:?}");
        assert!(out.stdout.is_empty());
    }
    let out = sprox(&["classify-set", "--rule", "primes"]);
    let diag: serde_json::Value = serde_json::from_str(out.stderr.trim()).unwrap();
    assert_eq!(diag["error"], "invalid-input");
}

#[test]
fn failed_checks_exit_one() {
    // too short to see the holes grow: the check is reported, not hidden
    let out = sprox(&["rotation-example", "--n-max", "10", "--horizon", "100"]);
    assert_eq!(out.code, 1);
    let diag: serde_json::Value = serde_json::from_str(out.stderr.trim()).unwrap();
    assert_eq!(diag["error"], "invariant-violation");
    assert_eq!(diag["failed"][0], "closeness holes grow");
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().iter().filter(|c| c["holds"] == false).count(), 1);

    // the map has no fixed point left of the ladder, so the construction fails
    let out = sprox(&["interval-trace", "--map", "0:0, 1/2:1/4, 1:0", "--coding", "01"]);
    assert_eq!(out.code, 1, "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn graph_inputs() {
    let g = temp_file("cycle.adj", "a: b\nb: a\n");
    let out = sprox(&["sft-info", "--graph", g.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["verdicts"]["period"]["period"], 2);
    assert_eq!(v["verdicts"]["period"]["mixing"], false);
    let bad = temp_file("bad.adj", "a: b\nb\n");
    assert_eq!(sprox(&["sft-info", "--graph", bad.to_str().unwrap()]).code, 2);
    assert_eq!(sprox(&["sft-info", "--graph", "/no/such/file"]).code, 2);
}

#[test]
fn config_file_supplies_defaults() {
    let cfg = temp_file("defaults.cfg", "# shared defaults\noutput = text\nhorizon = 729\nn-max = 12\n");
    let out = sprox(&["verify-pair", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("horizon 729"));
    let out = sprox(&["verify-pair", "--config", cfg.to_str().unwrap(), "--horizon", "243", "--output", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["horizons"]["horizon"], 243);
    let bad = temp_file("bad.cfg", "colour = blue\n");
    assert_eq!(sprox(&["sft-info", "--config", bad.to_str().unwrap()]).code, 2);
}

#[test]
fn recipes_replay_to_identical_verdicts() {
    let a = sprox(&["verify-pair", "--construction", "golden-blocks", "--horizon", "1500", "--seed", "11"]);
    let b = sprox(&["verify-pair", "--construction", "golden-blocks", "--horizon", "1500", "--seed", "11"]);
    assert_eq!(stable_json(a.report.as_ref().unwrap()), stable_json(b.report.as_ref().unwrap()));
    let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    let x: sprox_core::StreamRecipe = serde_json::from_value(v["recipe"]["x"].clone()).unwrap();
    let y: sprox_core::StreamRecipe = serde_json::from_value(v["recipe"]["y"].clone()).unwrap();
    let verdict = sprox_core::relations::pair_profile(&x.build().unwrap(), &y.build().unwrap(), 1500, &[1, 2, 4, 8]).unwrap();
    assert_eq!(serde_json::to_value(&verdict).unwrap(), v["verdicts"]["pair"]);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sprox");
    let ok = Command::new(bin).args(["classify-set", "--rule", "evens", "--horizon", "50"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let usage = Command::new(bin).arg("no-such-command").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("interval-trace"));
}
