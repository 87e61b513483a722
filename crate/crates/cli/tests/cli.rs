use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn treegroups(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treegroups"))
        .args(args)
        .env_remove("TREEGROUPS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("treegroups-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn criteria_check_alt5_in_sym5() {
    let out = treegroups(&[
        "criteria", "check", "--d", "5", "--F", "Alt(5)", "--Fprime", "Sym(5)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["applicable"], true);
    for verdict in v["verdicts"].as_array().unwrap() {
        assert_eq!(verdict["value"], true, "{verdict}");
    }
    assert_eq!(v["eta"]["primes"], serde_json::json!([2, 3]));
    assert_eq!(v["provenance"]["tool_version"], "0.1.0");
    assert!(v["provenance"]["wall_time_ms"].is_null());
}

#[test]
fn criteria_check_not_applicable_exits_2() {
    let out = treegroups(&[
        "criteria", "check", "--d", "3", "--F", "Sym(3)", "--Fprime", "Cyc(3)",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["applicable"], false);
}

#[test]
fn output_is_byte_stable() {
    let args = [
        "criteria",
        "survey",
        "--d",
        "4",
        "--pairs",
        "--eta-depth",
        "2",
    ];
    let a = treegroups(&args);
    let b = treegroups(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timing_fills_wall_time() {
    let out = treegroups(&[
        "wreath", "build", "--base", "Sym(2)", "--depth", "2", "--timing",
    ]);
    assert!(json(&out)["provenance"]["wall_time_ms"].is_u64());
}

#[test]
fn survey_text_table() {
    let out = treegroups(&[
        "criteria",
        "survey",
        "--d",
        "5",
        "--transitive-only",
        "--text",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.contains("F20"));
}

#[test]
fn wreath_build_klein4() {
    let out = treegroups(&[
        "wreath", "build", "--base", "Klein4", "--depth", "2", "--square",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["tower"]["order"], "1024");
    assert_eq!(v["tower"]["order_matches_formula"], true);
    assert_eq!(v["square"]["order"], "1048576");

    let out = treegroups(&[
        "wreath", "build", "--base", "Alt(4)", "--depth", "2", "--sylow", "2",
    ]);
    let v = json(&out);
    assert_eq!(v["sylow"]["ambient_order"], "248832");
    assert_eq!(v["sylow"]["index"], "243");
    assert_eq!(v["sylow"]["certified"], true);
}

#[test]
fn unknown_flag_exits_1_with_usage() {
    let out = treegroups(&["wreath", "build", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn cap_refusal_names_the_flag() {
    let out = treegroups(&["wreath", "build", "--base", "Sym(3)", "--depth", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--leaf-cap"));
    let out = treegroups(&[
        "wreath",
        "build",
        "--base",
        "Sym(3)",
        "--depth",
        "3",
        "--leaf-cap",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = treegroups(&[
        "wreath",
        "build",
        "--base",
        "Sym(3)",
        "--depth",
        "3",
        "--leaf-cap",
        "27",
    ]);
    assert!(out.status.success());
}

#[test]
fn group_spec_files() {
    let path = scratch("f20.txt");
    std::fs::write(&path, "degree: 5\ngen: (1 2 3 4 5)\ngen: (2 3 5 4)\n").unwrap();
    let out = treegroups(&[
        "tate",
        "verify",
        "--group",
        path.to_str().unwrap(),
        "--p",
        "2",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["report"]["group_order"], "20");
    assert_eq!(v["consistent"], true);

    let bad = scratch("bad.txt");
    std::fs::write(&bad, "degree: 5\ngen: (1 2 x)\n").unwrap();
    let out = treegroups(&[
        "tate",
        "verify",
        "--group",
        &format!("file:{}", bad.display()),
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn series_op_kinds() {
    for (kind, order) in [("sylow", "8"), ("core", "4"), ("residual", "12")] {
        let out = treegroups(&[
            "series", "op", "--group", "Sym(4)", "--kind", kind, "--p", "2",
        ]);
        let v = json(&out);
        assert_eq!(v["verified"], true);
        assert_eq!(v["certificate"]["subgroup_order"], order, "{kind}");
    }
}

#[test]
fn tree_ball_round_trip() {
    let out = treegroups(&[
        "tree", "ball", "--d", "3", "--radius", "2", "--color", "legal",
    ]);
    let v = json(&out);
    assert_eq!(v["vertex_count"], 10);
    assert_eq!(v["coloring"]["legal"], true);

    let path = scratch("ball.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let color = format!("file:{}", path.display());
    let again = treegroups(&[
        "tree", "ball", "--d", "3", "--radius", "2", "--color", &color,
    ]);
    assert_eq!(json(&again)["edges"], v["edges"]);
}

#[test]
fn ball_group_and_defects() {
    let out = treegroups(&[
        "ball", "group", "--d", "3", "--radius", "2", "--F", "Sym(3)",
    ]);
    let v = json(&out);
    assert_eq!(v["order"], "48");
    assert_eq!(v["match"], true);

    let out = treegroups(&[
        "ball", "group", "--d", "3", "--radius", "1", "--F", "Sym(3)", "--center", "edge",
    ]);
    assert_eq!(json(&out)["tits"]["endpoint_fixing_order"], "4");

    let element = scratch("swap.txt");
    std::fs::write(&element, "(2 3)\n").unwrap();
    let out = treegroups(&[
        "ball",
        "defects",
        "--d",
        "3",
        "--radius",
        "1",
        "--F",
        "Alt(3)",
        "--Fprime",
        "Sym(3)",
        "--element",
        &format!("file:{}", element.display()),
    ]);
    let v = json(&out);
    assert_eq!(v["report"]["defects"], serde_json::json!([1]));
    assert_eq!(v["report"]["admissible"], true);
}

#[test]
fn lattice_commands() {
    let out = treegroups(&["lattice", "rist", "--tower", "Klein4:2", "--subset", "1"]);
    let v = json(&out);
    assert_eq!(v["leaves"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(v["rist_order"], "4");

    let out = treegroups(&[
        "lattice",
        "sweep",
        "--tower",
        "Sym(2):2",
        "--max-pairs",
        "10",
    ]);
    let v = json(&out);
    assert_eq!(v["holds"], true);
    assert_eq!(v["report"]["truncated"], true);
}

#[test]
fn out_dir_override() {
    let dir = scratch("outdir");
    let status = Command::new(env!("CARGO_BIN_EXE_treegroups"))
        .args([
            "wreath", "build", "--base", "Sym(2)", "--depth", "1", "--out", "w.json",
        ])
        .env("TREEGROUPS_OUT_DIR", &dir)
        .status()
        .unwrap();
    assert!(status.success());
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("w.json")).unwrap()).unwrap();
    assert_eq!(v["tower"]["order"], "2");
}
