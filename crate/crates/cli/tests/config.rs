use ratchet_cli::config::*;
use ratchet_cli::CliError;

const MINIMAL: &str = r#"
    engine = "classical"
    experiment = "current"
    output = "demo"
    [params]
    kick_strength = 7.0
    asymmetry = 0.7
    phase = 1.5707963267948966
    gamma = 0.75
"#;

fn message(text: &str) -> String {
    match ExperimentConfig::parse(text).unwrap_err() {
        CliError::Config(m) => m,
        e => panic!("expected a config error, got {e}"),
    }
}

#[test]
fn minimal_config_takes_defaults() {
    let c = ExperimentConfig::parse(MINIMAL).unwrap();
    assert_eq!(c.protocol.steps, 100);
    assert_eq!(c.classical_temperatures(), vec![0.0]);
}

#[test]
fn empty_file_names_missing_field() {
    let err = message("");
    assert!(err.contains("engine"), "{err}");
}

#[test]
fn unknown_field_is_rejected() {
    let text = MINIMAL.replace("gamma = 0.75", "gamma = 0.75\nkick = 3");
    let err = message(&text);
    assert!(err.contains("kick"), "{err}");
}

#[test]
fn unsupported_combinations() {
    let husimi = MINIMAL.replace("\"current\"", "\"husimi\"");
    assert!(message(&husimi).starts_with("engine"));
    let bif = MINIMAL.replace("\"classical\"", "\"quantum\"").replace("\"current\"", "\"bifurcation\"");
    assert!(message(&bif).starts_with("engine"));
}

#[test]
fn quantum_needs_its_section() {
    let text = MINIMAL.replace("\"classical\"", "\"quantum\"");
    assert!(message(&text).starts_with("quantum"));
    let text = format!("{text}\n[quantum]\nhbar_eff = [0.494, 0.165]\nn_max = [160]\n");
    assert!(message(&text).starts_with("quantum.n_max"));
}

#[test]
fn grid_range_is_inclusive() {
    let g = Grid::Range { start: 0.6, stop: 0.9, points: 4 };
    let v = g.values();
    assert_eq!(v.len(), 4);
    assert_eq!(v[0], 0.6);
    assert!((v[3] - 0.9).abs() < 1e-15);
}
