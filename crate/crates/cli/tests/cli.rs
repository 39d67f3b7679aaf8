use std::process::{Command, Output};

fn g2mut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2mut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = g2mut(&all);
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn documented_examples() {
    let out = g2mut(&["cohomology", "F", "O(3h-2H)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "H^1 = 1 (Determined)"
    );
    let out = g2mut(&["ext", "M", "dual(U)(-h)", "U"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "Ext^1 = 1 (Determined)"
    );
}

#[test]
fn json_shapes() {
    let v = json(&["cohomology", "M", "U(h)"]);
    for key in [
        "space",
        "input",
        "profile",
        "status",
        "lower",
        "upper",
        "conflicts",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let v = json(&["gram", "final"]);
    assert_eq!(v["objects"].as_array().unwrap().len(), 6);
    assert_eq!(v["upper_unitriangular"], true);
    let v = json(&["script", "dump"]);
    assert_eq!(v["steps"].as_array().unwrap().len(), 10);
    let v = json(&["verify", "--timestamp", "0"]);
    assert_eq!(v["overall_pass"], true);
    assert_eq!(v["header"]["timestamp"], "0");
}

#[test]
fn certificate_expressions_reparse() {
    let v = json(&["verify", "--timestamp", "0"]);
    for step in v["steps"].as_array().unwrap() {
        for name in step["collection_after"].as_array().unwrap() {
            let name = name.as_str().unwrap();
            if !name.starts_with('Φ') {
                assert!(g2mut::sheaf::FilteredBundle::parse(name).is_ok(), "{name}");
            }
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(g2mut(&["ext", "M", "U", "U"]).status.code(), Some(1));
    assert_eq!(g2mut(&["cohomology", "F", "O(h"]).status.code(), Some(2));
    assert_eq!(g2mut(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        g2mut(&["verify", "--probe-box", "1", "0", "0", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("g2mut-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g2mut.toml");
    std::fs::write(&path, "json = true\ntimestamp = \"42\"\n").unwrap();
    let out = g2mut(&["verify", "--config", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["header"]["timestamp"], "42");
    std::fs::write(&path, "colour = 1\n").unwrap();
    assert_eq!(
        g2mut(&["verify", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
