use ratchet_demo::{bifurcation_strip, current_curve, portrait, MAX_KICKS};

#[test]
fn curve_has_one_value_per_kick() {
    let j = current_curve(0.75, 0.0, 2000, 30, 1).unwrap();
    assert_eq!(j.len(), 31);
    assert!(j[0].abs() < 0.2);
    assert!(j[30] > 0.3, "{}", j[30]);
}

#[test]
fn strip_pairs_gamma_with_momenta() {
    let flat = bifurcation_strip(0.7, 0.8, 3, 0.0, 20, 200, 5, 2).unwrap();
    assert_eq!(flat.len(), 2 * 3 * 20 * 5);
    let gammas: Vec<f64> = flat.chunks(2).map(|c| c[0]).collect();
    assert_eq!(gammas[0], 0.7);
    assert!((gammas[gammas.len() - 1] - 0.8).abs() < 1e-15);
    assert!(bifurcation_strip(0.7, 0.8, 1, 0.0, 20, 200, 5, 2).is_err());
}

#[test]
fn portrait_is_a_normalised_raster() {
    let v = portrait(0.75, 0.1, 5000, 20, 32, 24, -60.0, 60.0, 3).unwrap();
    assert_eq!(v.len(), 32 * 24);
    let area = (std::f64::consts::TAU / 32.0) * (120.0 / 24.0);
    let integral: f64 = v.iter().sum::<f64>() * area;
    assert!((integral - 1.0).abs() < 1e-9, "{integral}");
}

#[test]
fn oversized_requests_are_refused() {
    let err = current_curve(0.75, 0.0, MAX_KICKS, 2, 1).unwrap_err();
    assert!(err.contains("demo limit"));
    assert!(current_curve(1.5, 0.0, 10, 2, 1).is_err());
}
