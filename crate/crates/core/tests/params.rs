use ratchet_core::params::*;
use std::f64::consts::FRAC_PI_2;

fn weak_kick_set(gamma: f64, temperature: f64) -> SimulationParams {
    SimulationParams {
        kick_strength: 0.7,
        asymmetry: 0.7,
        phase: FRAC_PI_2,
        gamma,
        temperature,
        seed: 1,
    }
}

#[test]
fn validation_accepts_reference_set() {
    let p = weak_kick_set(0.75, 0.0);
    assert_eq!(validate(p), Ok(p));
}

#[test]
fn validation_reports_offending_field() {
    let err = validate(weak_kick_set(1.2, 0.0)).unwrap_err();
    assert!(err.to_string().contains("gamma out of [0,1]"));
    let err = validate(weak_kick_set(0.5, -0.1)).unwrap_err();
    assert!(err.to_string().contains("negative temperature"));
    let mut p = weak_kick_set(0.5, 0.0);
    p.kick_strength = 0.0;
    assert!(matches!(validate(p), Err(ParamError::NonPositiveKick(_))));
    p.kick_strength = f64::NAN;
    assert_eq!(validate(p), Err(ParamError::NonFinite { field: "kick_strength" }));
}

#[test]
fn coupling_examples() {
    assert_eq!(coupling_constant(0.0).unwrap(), 0.0);
    assert!((coupling_constant(0.75).unwrap() - 1.386_294_361_119_890_6).abs() < 1e-15);
    assert!(coupling_constant(1.0).is_err());
    assert!(momentum_decay_coupling(1.0).unwrap().abs() < 1e-300);
    assert!(momentum_decay_coupling(0.0).is_err());
    let g = momentum_decay_coupling(0.75).unwrap();
    assert!(((-2.0 * g).exp() - 0.75).abs() < 1e-15);
}

#[test]
fn noise_variance_examples() {
    assert!((noise_std(0.75, 0.25).powi(2) - 0.125).abs() < 1e-15);
    assert!((noise_std(0.7, 0.05).powi(2) - 0.03).abs() < 1e-15);
    assert_eq!(noise_std(0.3, 0.0), 0.0);
    assert_eq!(noise_std(1.0, 5.0), 0.0);
}

#[test]
fn quantum_defaults() {
    let q = QuantumParams::new(SimulationParams::standard(0.75, 0.0), 0.494)
        .validate()
        .unwrap();
    assert_eq!(q.n_max, 81);
    assert!((q.kick() - 7.0 / 0.494).abs() < 1e-12);
    assert!(QuantumParams::new(q.base, 0.0).validate().is_err());
    assert!(q.with_n_max(0).validate().is_err());
    assert!(q.with_substeps(0).validate().is_err());
}

proptest::proptest! {
    #[test]
    fn log_complement_coupling_is_monotone(a in 0.0f64..0.999, b in 0.0f64..0.999) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        proptest::prop_assert!(coupling_constant(lo).unwrap() <= coupling_constant(hi).unwrap());
    }

    #[test]
    fn validation_is_idempotent(gamma in 0.0f64..=1.0, t in 0.0f64..10.0, k in 0.01f64..20.0) {
        let p = SimulationParams { kick_strength: k, ..weak_kick_set(gamma, t) };
        let once = validate(p).unwrap();
        proptest::prop_assert_eq!(validate(once).unwrap(), once);
    }
}
