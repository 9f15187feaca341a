mod series {
    use ratchet_core::observables::*;

    #[test]
    fn constant_series_is_settled_from_start() {
        let s = CurrentSeries::from_currents(&[1.5; 50]);
        let a = detect_asymptote(&s, 10, 0.01).unwrap();
        assert_eq!(a.j_inf, 1.5);
        assert_eq!(a.t_settle, Some(0));
    }

    #[test]
    fn linear_series_never_settles() {
        let v: Vec<f64> = (0..100).map(|t| t as f64).collect();
        let a = detect_asymptote(&CurrentSeries::from_currents(&v), 10, 0.01).unwrap();
        assert_eq!(a.t_settle, None);
    }

    #[test]
    fn relaxing_series_settles_after_transient() {
        let v: Vec<f64> = (0..400).map(|t| 2.0 + 3.0 * (-(t as f64) / 5.0).exp()).collect();
        let a = detect_asymptote(&CurrentSeries::from_currents(&v), 20, 0.01).unwrap();
        let t = a.t_settle.unwrap();
        assert!(t > 0 && t < 40, "t_settle = {t}");
    }

    #[test]
    fn short_series_is_rejected() {
        let s = CurrentSeries::from_currents(&[0.0; 20]);
        assert!(matches!(detect_asymptote(&s, 10, 0.1), Err(SeriesError::TooShort { .. })));
    }

    #[test]
    fn peak_detection() {
        let bump: Vec<f64> = (0..30).map(|t| 1.0 + (-((t as f64 - 10.0) / 3.0).powi(2)).exp()).collect();
        let s = CurrentSeries::from_currents(&bump);
        let p = detect_transient_peak(&s, 2, 25, 0.05).unwrap().unwrap();
        assert_eq!(p.t, 10);
        let mono: Vec<f64> = (0..30).map(|t| t as f64).collect();
        let s = CurrentSeries::from_currents(&mono);
        assert_eq!(detect_transient_peak(&s, 2, 25, 0.05).unwrap(), None);
        assert!(detect_transient_peak(&s, 2, 99, 0.05).is_err());
    }

    #[test]
    fn blocked_error_of_constant_is_zero() {
        let (m, e) = blocked_mean(&[3.0; 100], 10);
        assert_eq!((m, e), (3.0, 0.0));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = NeumaierSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            acc.add(x);
        }
        assert_eq!(acc.value(), 2.0);
    }

    proptest::proptest! {
        #[test]
        fn stationary_noise_barely_moves_asymptote(
            level in -5.0f64..5.0,
            noise in proptest::collection::vec(-1.0f64..1.0, 60),
        ) {
            let stderr = 0.05;
            let mut v = vec![level; 40];
            let base = detect_asymptote(&CurrentSeries::from_currents(&v), 10, 0.1).unwrap();
            v.extend(noise.iter().take(10).map(|u| level + stderr * u));
            let after = detect_asymptote(&CurrentSeries::from_currents(&v), 10, 0.1).unwrap();
            proptest::prop_assert!((after.j_inf - base.j_inf).abs() <= stderr);
        }
    }
}

mod portrait {
    use std::f64::consts::TAU;
    use ratchet_core::classical::PhasePoint;
    use ratchet_core::observables::*;

    #[test]
    fn identical_points_fill_one_bin() {
        let pts = vec![PhasePoint { x: 1.0, p: 0.5 }; 100];
        let h = poincare_histogram(&pts, PhaseWindow::default());
        assert_eq!(h.values.iter().filter(|&&v| v > 0.0).count(), 1);
        assert!((h.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integral_is_fraction_inside() {
        let mut pts = vec![PhasePoint { x: 7.0, p: 0.0 }; 3];
        pts.push(PhasePoint { x: 0.0, p: 100.0 });
        let h = poincare_histogram(&pts, PhaseWindow::default());
        assert!((h.integral() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn unwrapped_positions_fold_onto_circle() {
        let w = PhaseWindow::default();
        assert_eq!(w.bin(0.1, 0.0), w.bin(0.1 + 5.0 * TAU, 0.0));
        assert_eq!(w.bin(-1e-3, 0.0).unwrap().1, w.x_bins - 1);
        assert_eq!(w.bin(1.0, w.p_max).unwrap().0, w.p_bins - 1);
    }
}

mod husimi {
    use ratchet_core::quantum::DensityMatrix;
    use ratchet_core::observables::*;
    use ratchet_core::quantum::MomentumBasis;

    #[test]
    fn momentum_eigenstate_gives_flat_ridge() {
        let hbar = 0.2;
        let basis = MomentumBasis::new(60);
        let rho = DensityMatrix::pure_level(basis, hbar, 10);
        let window = PhaseWindow { x_bins: 16, p_bins: 60, p_min: 0.0, p_max: 4.0 };
        let h = husimi(&rho, window, &HusimiOptions::default());
        for row in h.grid.rows() {
            let first = row[0];
            assert!(row.iter().all(|v| (v - first).abs() < 1e-12 * first.max(1e-300)));
        }
        let peak_row = (0..window.p_bins)
            .max_by(|&a, &b| h.grid.get(a, 0).total_cmp(&h.grid.get(b, 0)))
            .unwrap();
        assert!((window.p_center(peak_row) - 2.0).abs() <= window.p_width());
    }

    #[test]
    fn integrates_to_one() {
        let hbar = 0.3;
        let basis = MomentumBasis::new(40);
        let rho = DensityMatrix::initial_cell_state(basis, hbar).unwrap();
        let window = PhaseWindow { x_bins: 64, p_bins: 400, p_min: -8.0, p_max: 8.0 };
        let h = husimi(&rho, window, &HusimiOptions::default());
        assert!((h.grid.integral() - 1.0).abs() < 1e-3, "{}", h.grid.integral());
    }
}
