use g2mut::bwb::{LineClass, PicCalibration};
use g2mut::mutation::Justification;
use g2mut::proof::{emit, paper_script, run, Format, RunConfig, StepStatus};
use g2mut::sheaf::FilteredBundle;

fn fixed() -> RunConfig {
    RunConfig {
        timestamp: Some("0".into()),
        ..RunConfig::default()
    }
}

#[test]
fn full_replay_passes() {
    let cert = run(&paper_script(), &fixed()).unwrap();
    assert!(cert.overall_pass, "{:?}", cert.first_failure());
    assert!(cert.steps.iter().all(|s| s.status == StepStatus::Passed));
    assert_eq!(cert.steps.len(), 10);
}

#[test]
fn wrong_declared_cone_fails_at_probe_equality() {
    let script = paper_script().with_first_right_declared(FilteredBundle::parse("O(H-h)").unwrap());
    let cert = run(&script, &fixed()).unwrap();
    assert!(!cert.overall_pass);
    let (section, check) = cert.first_failure().unwrap();
    assert_eq!(section, "move-07");
    assert!(check.name.starts_with("probe equality"), "{}", check.name);
}

#[test]
fn perturbed_canonical_class_fails() {
    let config = RunConfig {
        k_m: LineClass::new(-1, 0),
        ..fixed()
    };
    let cert = run(&paper_script(), &config).unwrap();
    assert!(!cert.overall_pass);
    let (section, check) = cert.first_failure().unwrap();
    assert_eq!(section, "move-02");
    assert!(check.name.starts_with("semiorthogonal"), "{}", check.name);
}

#[test]
fn swapped_calibration_fails_anchor() {
    let config = RunConfig {
        calibration: PicCalibration::SHIPPED.swapped(),
        ..fixed()
    };
    let cert = run(&paper_script(), &config).unwrap();
    assert!(!cert.overall_pass);
    let (section, check) = cert.first_failure().unwrap();
    assert_eq!(section, "calibration");
    assert!(check.name.starts_with("anchor"), "{}", check.name);
}

#[test]
fn json_is_deterministic() {
    let a = emit(&run(&paper_script(), &fixed()).unwrap(), Format::Json).unwrap();
    let b = emit(&run(&paper_script(), &fixed()).unwrap(), Format::Json).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["overall_pass"], true);
}

#[test]
fn axiom_checks_carry_a_derivation() {
    let cert = run(&paper_script(), &fixed()).unwrap();
    for c in cert.axiom_checks() {
        assert_eq!(c.justification, Justification::Axiom);
        assert!(!c.detail.is_empty(), "{} has no derivation", c.name);
    }
}
