use std::process::{Command, Output};

use serde_json::{json, Value};

fn sbw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbw")).args(args).env_remove("SBW_MAX_ORDER").output().expect("runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn sections_of_s3() {
    let out = sbw(&["sections", "list", "--group", "S3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["count"], 8);
    assert_eq!(r["result"]["sections"].as_array().unwrap().len(), 8);
}

#[test]
fn seeds_merge_quaternion_and_dihedral_rows() {
    let out = sbw(&["seeds", "--max-order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = report(&out)["result"]["rows"].as_array().unwrap().clone();
    let pair = json!([[0, 2], [0, 1, 2, 3]]);
    let find = |group: &str| {
        rows.iter()
            .find(|r| r["group"] == group && r["members"].as_array().unwrap().contains(&pair))
            .unwrap_or_else(|| panic!("no {group} row"))
            .clone()
    };
    let (q, d) = (find("Q8"), find("D8"));
    assert_eq!(q["linkage_id"], d["linkage_id"]);
    assert_eq!(q["gamma_order"], d["gamma_order"]);
    assert_eq!(q["irr_count"], d["irr_count"]);
}

#[test]
fn verify_mackey_passes() {
    let out = sbw(&["verify", "--suite", "mackey", "--max-order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["passed"], true);
    assert!(r["result"]["suites"][0]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn several_suites_report_in_fixed_order() {
    let out = sbw(&["verify", "--suite", "reduced", "--suite", "goursat", "--max-order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let suites = report(&out)["result"]["suites"].clone();
    assert_eq!(suites[0]["suite"], "reduced");
    assert_eq!(suites[1]["suite"], "goursat");
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [
        &["seeds", "--max-order", "6"][..],
        &["verify", "--suite", "linkage", "--max-order", "4"],
        &["linkage", "--group", "Q8", "--with", "D8"],
        &["gamma-group", "--group", "S3", "--format", "table"],
    ] {
        assert_eq!(sbw(args).stdout, sbw(args).stdout, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let out = sbw(&["group", "info", "X9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "usage");
    assert_eq!(sbw(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(sbw(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(sbw(&["group", "info", "{not json"]).status.code(), Some(2));
}

#[test]
fn order_cap_and_override() {
    let capped = Command::new(env!("CARGO_BIN_EXE_sbw"))
        .args(["sections", "list", "--group", "C3", "--right", "C4"])
        .env("SBW_MAX_ORDER", "6")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(1));
    assert_eq!(report(&capped)["error"]["kind"], "order_limit_exceeded");
    let lifted = Command::new(env!("CARGO_BIN_EXE_sbw"))
        .args(["sections", "list", "--group", "C3", "--right", "C4", "--unsafe-order"])
        .env("SBW_MAX_ORDER", "6")
        .output()
        .unwrap();
    assert_eq!(lifted.status.code(), Some(0));
}

#[test]
fn composing_with_the_identity() {
    // In C2 x C2, index 3 is (1, 1); the diagonal section is the identity of Γ(C2, C2).
    let identity = json!({"left": "C2", "right": "C2", "terms": [
        {"class": {"ambient": "C2xC2", "factors": [2, 2], "T": [0, 3], "S": [0, 3]}, "num": 1, "den": 1}
    ]});
    let x = json!({"left": "C2", "right": "C2", "terms": [
        {"class": {"ambient": "C2xC2", "factors": [2, 2], "T": [0, 1, 2, 3], "S": [0, 1]}, "num": 3, "den": 2}
    ]});
    let out = sbw(&["compose", &identity.to_string(), &x.to_string()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"], x);
    let mismatched = json!({"left": "C3", "right": "C2", "terms": []});
    let out = sbw(&["compose", &x.to_string(), &mismatched.to_string()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["error"]["kind"], "middle_mismatch");
}

#[test]
fn decomposition_and_essential_quotient_of_c2() {
    let out = sbw(&["decompose", "--group", "C2"]);
    let r = report(&out);
    assert_eq!(r["result"]["covering_dim"], 4);
    assert_eq!(r["result"]["blocks"].as_array().unwrap().len(), 4);
    let out = sbw(&["essential", "--group", "C2", "--brute-force"]);
    let r = report(&out);
    assert_eq!(r["result"]["report"]["essential_dim"], json!({"lo": 3, "hi": 3}));
    assert_eq!(r["result"]["brute_force"]["rank"], r["result"]["brute_force"]["predicted"]);
}

#[test]
fn catalog_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("sbw-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    let build = |p: &std::path::Path| sbw(&["catalog", "build", "--max-order", "8", "--out", p.to_str().unwrap()]);
    assert_eq!(build(&a).status.code(), Some(0));
    assert_eq!(build(&b).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let shown = report(&sbw(&["catalog", "show", a.to_str().unwrap()]));
    assert_eq!(shown["result"]["groups"].as_array().unwrap().len(), 14);
    let group_file = dir.join("d8.json");
    std::fs::write(&group_file, r#"{"construct": "dihedral", "args": [8]}"#).unwrap();
    let info = report(&sbw(&["group", "info", group_file.to_str().unwrap()]));
    assert_eq!(info["result"]["automorphism_group_order"], 8);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn gamma_groups_match_outer_automorphisms() {
    let r = report(&sbw(&["gamma-group", "--group", "Q8"]));
    for pair in r["result"].as_array().unwrap() {
        assert_eq!(pair["order"], pair["out_comparison"]["out_order"]);
    }
    assert_eq!(sbw(&["gamma-group", "--group", "Q8", "--pair", "999"]).status.code(), Some(2));
}

#[test]
fn table_format_renders_rows() {
    let out = sbw(&["sections", "list", "--group", "C2", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("result.count: 3"));
    assert!(text.lines().any(|l| l.trim_start().starts_with("S ")));
}
