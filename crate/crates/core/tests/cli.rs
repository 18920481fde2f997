use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = vec![];
    let mut err = vec![];
    let argv = std::iter::once("quadflt").chain(args.iter().copied());
    let code = quadflt::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    v
}

#[test]
fn check_outcomes() {
    let cases = [
        ("2", "holds_unconditional"),
        ("3", "holds_unconditional"),
        ("5", "criterion_fails"),
        ("13", "holds_under_ES"),
        ("17", "criterion_fails"),
    ];
    for (d, outcome) in cases {
        let v = json(&["check", d, "--format", "json"]);
        assert_eq!(v["command"], "check");
        assert_eq!(v["result"]["outcome"], outcome, "d = {d}");
    }
    let v = json(&["check", "3", "--format", "json"]);
    let clauses = v["result"]["provenance"]["clauses"].as_array().unwrap();
    assert_eq!(clauses[0], "Theorem 1(i)");
}

#[test]
fn check_text_mentions_outcome() {
    let (code, out, _) = run(&["check", "13"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("d = 13: holds_under_ES"));
    assert!(out.contains("Eichler–Shimura"));
}

#[test]
fn rejects_bad_d() {
    let (code, out, err) = run(&["check", "12"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(err.trim(), "12 = 2²·3 not squarefree");

    let (code, _, err) = run(&["sunit", "1"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["check"]).0, 2);
    assert_eq!(run(&["check", "x"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["check", "3", "--format", "csv"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("density-ap"));
}

#[test]
fn sunit_with_oracle() {
    let v = json(&["sunit", "7", "--oracle", "--height", "100000", "--format", "json"]);
    let r = &v["result"];
    assert_eq!(r["orbit_count"], 1);
    assert_eq!(r["oracle"]["agrees"], true);
    assert_eq!(v["bounds"]["height"], 100000);
    assert_eq!(r["orbits"][0]["lambda"], "128+48√7");
}

#[test]
fn scan_csv_columns() {
    let (code, out, _) = run(&["scan", "--max", "200", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("d,squarefree,class_mod_16,in_C_prime,witness"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 199);
    assert_eq!(rows[0], ["2", "true", "2", "true", "-1 -1 1 0 2"]);
    assert_eq!(rows[2], ["4", "false", "4", "false", ""]);
    for r in &rows {
        assert_eq!(r[3] == "true", !r[4].is_empty());
    }
}

#[test]
fn scan_small_limit_rejected() {
    assert_eq!(run(&["scan", "--max", "50"]).0, 2);
}

#[test]
fn scan_json_fields() {
    let v = json(&["scan", "--max", "10000", "--format", "json"]);
    let r = &v["result"];
    assert_eq!(r["X"], 10000);
    assert_eq!(r["n_sf"], 6082);
    assert_eq!(r["n_sf"], r["n_sf_mobius"]);
    let found = r["n_C_prime_found"].as_u64().unwrap();
    assert_eq!(r["witnesses"].as_object().unwrap().len() as u64, found);
    assert!(r["n_D"].as_u64().unwrap() <= r["n_sf"].as_u64().unwrap());
}

#[test]
fn mersenne_cap_and_override() {
    let (code, _, err) = run(&["mersenne", "--m", "210"]);
    assert_eq!(code, 2);
    assert!(err.contains("210"));

    let v = json(&["mersenne", "--range", "2..12", "--trials", "50", "--format", "json"]);
    let reports = v["result"].as_array().unwrap();
    assert_eq!(reports.len(), 11);
    let six = &reports[4];
    assert_eq!(six["data"]["m"], 6);
    assert_eq!(six["data"]["primitive_divisors"].as_array().unwrap().len(), 0);
    assert_eq!(six["corollary_holds"], true);

    assert_eq!(run(&["mersenne", "--range", "5..2"]).0, 2);
    assert_eq!(run(&["mersenne"]).0, 2);
}

#[test]
fn frey_rationals() {
    let v = json(&["frey", "1", "1", "-2", "--format", "json"]);
    assert_eq!(v["result"]["j"], "1728");
    assert_eq!(v["result"]["disc"], "64");
    let (code, out, _) = run(&["frey", "1/2", "1/2", "-1"]);
    assert_eq!(code, 0);
    assert!(out.contains("j = 1728"));
    assert_eq!(run(&["frey", "1", "1", "1"]).0, 2);
    assert_eq!(run(&["frey", "1", "-1", "0"]).0, 2);
    assert_eq!(run(&["frey", "1/0", "1", "1"]).0, 2);
}

#[test]
fn density_ap() {
    let v = json(&["density-ap", "5", "8", "100000", "--format", "json"]);
    let r = &v["result"];
    assert_eq!(r["coefficient"], "1/6");
    assert!(r["relative_error"].as_f64().unwrap() < 0.01);
    assert_eq!(run(&["density-ap", "4", "8", "1000"]).0, 2);
}

#[test]
fn outputs_are_deterministic() {
    for args in [&["scan", "--max", "5000", "--format", "csv"][..], &["mersenne", "--range", "2..20", "--format", "json"]] {
        assert_eq!(run(args).1, run(args).1);
    }
}
