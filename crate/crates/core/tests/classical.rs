mod map {
    use std::f64::consts::TAU;
    use ratchet_core::SimulationParams;
    use ratchet_core::classical::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn weak_kick(gamma: f64) -> SimulationParams {
        SimulationParams {
            kick_strength: 0.7,
            asymmetry: 0.7,
            phase: FRAC_PI_2,
            gamma,
            temperature: 0.0,
            seed: 0,
        }
    }

    #[test]
    fn force_at_origin() {
        // 0.7 * (0 + 0.7 * sin(pi/2))
        assert!((kick_force(0.0, &weak_kick(0.75)) - 0.49).abs() < 1e-15);
    }

    #[test]
    fn symmetric_limit_is_pure_sine() {
        let p = SimulationParams { asymmetry: 0.0, ..weak_kick(0.5) };
        for i in 0..20 {
            let x = 0.3 * i as f64;
            assert!((kick_force(x, &p) - 0.7 * x.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn force_has_zero_mean_over_period() {
        let p = SimulationParams::standard(0.75, 0.0);
        let n = 4096;
        let total: f64 = (0..n).map(|i| kick_force(TAU * i as f64 / n as f64, &p)).sum();
        assert!(total.abs() / (n as f64) < 1e-13);
    }

    #[test]
    fn free_rotor_translates() {
        let p = SimulationParams { kick_strength: 0.0, gamma: 1.0, ..weak_kick(1.0) };
        let out = step(PhasePoint { x: 0.4, p: 1.3 }, &p, 0.0);
        assert_eq!(out, PhasePoint { x: 0.4 + 1.3, p: 1.3 });
    }

    #[test]
    fn single_step_from_origin() {
        let out = step(PhasePoint { x: 0.0, p: 0.0 }, &weak_kick(0.75), 0.0);
        assert!((out.p - 0.49).abs() < 1e-15 && (out.x - 0.49).abs() < 1e-15);
    }

    #[test]
    fn full_damping_forgets_momentum() {
        let p = SimulationParams::standard(0.0, 0.0);
        let a = step(PhasePoint { x: 1.1, p: -3.0 }, &p, 0.0);
        let b = step(PhasePoint { x: 1.1, p: PI }, &p, 0.0);
        assert_eq!(a.p, b.p);
    }

    #[test]
    fn unkicked_momentum_contracts_geometrically() {
        let p = SimulationParams { kick_strength: 0.0, ..weak_kick(0.8) };
        let mut pt = PhasePoint { x: 0.0, p: 2.0 };
        let mut expected = 2.0;
        for _ in 0..30 {
            pt = step(pt, &p, 0.0);
            expected *= 0.8;
            assert_eq!(pt.p, expected);
        }
    }
}

mod ensemble {
    use std::f64::consts::PI;
    use ratchet_core::SimulationParams;
    use ratchet_core::classical::*;

    #[test]
    fn samples_stay_in_cell() {
        let region = CellRegion::default();
        let e = sample_initial(5000, &region, 3).unwrap();
        assert_eq!(e.len(), 5000);
        assert!(e.points().iter().all(|p| (0.0..PI).contains(&p.x) && (-PI..=PI).contains(&p.p)));
        assert!(sample_initial(0, &region, 3).is_err());
    }

    #[test]
    fn zero_steps_reports_initial_current() {
        let mut e = sample_initial(10, &CellRegion::default(), 1).unwrap();
        let s = evolve(&mut e, &SimulationParams::standard(0.75, 0.1), 0);
        assert_eq!(s.len(), 1);
        assert_eq!(s.entries()[0].current, e.mean_momentum().0);
    }

    #[test]
    fn singleton_current_is_its_momentum() {
        let mut e = sample_initial(1, &CellRegion::default(), 9).unwrap();
        let s = evolve(&mut e, &SimulationParams::standard(0.75, 0.1), 5);
        assert_eq!(s.last().unwrap().current, e.points()[0].p);
        assert_eq!(s.last().unwrap().stderr, Some(0.0));
    }

    #[test]
    fn split_evolution_matches_single_run() {
        let params = SimulationParams::standard(0.74, 0.05);
        let mut a = sample_initial(3000, &CellRegion::default(), 5).unwrap();
        let mut b = a.clone();
        let whole = evolve(&mut a, &params, 30);
        let mut split = evolve(&mut b, &params, 12);
        split.extend_from(&evolve(&mut b, &params, 18));
        assert_eq!(whole, split);
        assert_eq!(a, b);
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let params = SimulationParams::standard(0.75, 0.1);
        let base = sample_initial(5000, &CellRegion::default(), 11).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let mut e = base.clone();
            pool.install(|| evolve(&mut e, &params, 20))
        };
        assert_eq!(run(1), run(3));
    }
}

mod protocols {
    use ratchet_core::SimulationParams;
    use ratchet_core::classical::*;

    #[test]
    fn iqr_of_known_values() {
        let v: Vec<f64> = (0..=100).map(f64::from).collect();
        assert_eq!(interquartile_range(&v), 50.0);
        assert_eq!(interquartile_range(&[2.0; 7]), 0.0);
    }

    #[test]
    fn scan_shapes_follow_protocol() {
        let protocol = BifurcationProtocol { transient: 50, retained: 20, count: 30, sample_cap: 10_000 };
        let scan = bifurcation_scan(&[0.3, 0.7], &SimulationParams::standard(0.0, 0.0), &protocol, &CellRegion::default()).unwrap();
        assert_eq!(scan.samples.len(), 2);
        assert!(scan.samples.iter().all(|s| s.len() == 600));
        let capped = BifurcationProtocol { sample_cap: 100, ..protocol };
        let scan = bifurcation_scan(&[0.3], &SimulationParams::standard(0.0, 0.0), &capped, &CellRegion::default()).unwrap();
        assert_eq!(scan.samples[0].len(), 100);
        assert!(bifurcation_scan(&[], &SimulationParams::standard(0.0, 0.0), &protocol, &CellRegion::default()).is_err());
        assert!(bifurcation_scan(&[1.5], &SimulationParams::standard(0.0, 0.0), &protocol, &CellRegion::default()).is_err());
    }

    #[test]
    fn full_damping_slaves_momentum_to_position() {
        // At Gamma = 0 every retained p equals the force at the previous x, so
        // the momenta lie on the single band [min F, max F].
        let params = SimulationParams::standard(0.0, 0.0);
        let (lo, hi) = (0..20_000)
            .map(|i| kick_force(std::f64::consts::TAU * i as f64 / 20_000.0, &params))
            .fold((f64::MAX, f64::MIN), |(lo, hi), f| (lo.min(f), hi.max(f)));
        let protocol = BifurcationProtocol { transient: 100, retained: 50, count: 200, sample_cap: 10_000 };
        let scan = bifurcation_scan(&[0.0], &params, &protocol, &CellRegion::default()).unwrap();
        assert!(scan.samples[0].iter().all(|&p| p >= lo - 1e-3 && p <= hi + 1e-3));
    }

    #[test]
    fn averaging_window_excludes_transient() {
        let params = SimulationParams::standard(0.7, 0.0);
        let r = asymptotic_current(&params, &CellRegion::default(), 20, 30, 200).unwrap();
        assert_eq!(r.series.len(), 51);
        let direct = ratchet_core::observables::mean(&r.series.currents()[21..]);
        assert!((r.j_inf - direct).abs() < 1e-12);
        assert!(asymptotic_current(&params, &CellRegion::default(), 0, 0, 10).is_err());
    }
}
