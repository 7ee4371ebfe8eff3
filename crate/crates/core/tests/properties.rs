use num_complex::Complex64;
use photon_spinor::algebra::{build_operators, hamiltonian_matrix};
use photon_spinor::fields::io::FieldContainer;
use photon_spinor::fields::{state_to_grid, to_momentum, to_position, GridSpec};
use photon_spinor::lorentz::{boost_mode, boost_parts, boost_wavevector, spinor_boost_matrix, Boost, FourVector};
use photon_spinor::modes::{constraint_residual, make_mode, ModeState};
use photon_spinor::vector::*;
use photon_spinor::Units;
use proptest::prelude::*;

fn arb_beta() -> impl Strategy<Value = f64> {
    -0.95f64..0.95
}

fn arb_k() -> impl Strategy<Value = R3> {
    prop::array::uniform3(-5.0f64..5.0).prop_filter("nonzero", |k| norm_r3(*k) > 1e-2)
}

fn arb_c() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn arb_spinor() -> impl Strategy<Value = Spinor> {
    prop::array::uniform6(arb_c())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boosts_compose_by_velocity_addition(b1 in arb_beta(), b2 in arb_beta()) {
        let ops = build_operators();
        let (x, y) = (Boost::new(b1).unwrap(), Boost::new(b2).unwrap());
        let product = spinor_boost_matrix(&ops, &x) * spinor_boost_matrix(&ops, &y);
        let combined = spinor_boost_matrix(&ops, &x.compose(&y));
        let scale = x.gamma * y.gamma * 4.0;
        prop_assert!(product.max_abs_diff(&combined) <= 1e-13 * scale);
    }

    #[test]
    fn reverse_boost_is_inverse(beta in arb_beta()) {
        let ops = build_operators();
        let b = Boost::new(beta).unwrap();
        let p = spinor_boost_matrix(&ops, &b) * spinor_boost_matrix(&ops, &b.inverse());
        prop_assert!(p.max_abs_diff(&photon_spinor::algebra::Matrix6::identity()) <= 1e-13 * b.gamma * b.gamma);
    }

    #[test]
    fn block_formulas_match_matrix(beta in arb_beta(), psi in arb_spinor()) {
        let ops = build_operators();
        let b = Boost::new(beta).unwrap();
        let direct = spinor_boost_matrix(&ops, &b).apply(&psi);
        let (u, v) = blocks(&psi);
        let (bu, bv) = boost_parts(&u, &v, &b);
        prop_assert!(spinor_max_abs_diff(&direct, &join(&bu, &bv)) <= 1e-13 * b.gamma * 4.0);
    }

    #[test]
    fn wavevectors_stay_on_light_cone(beta in arb_beta(), k in arb_k()) {
        let u = Units::si();
        let b = Boost::new(beta).unwrap();
        let (kp, wp) = boost_wavevector(k, u.c * norm_r3(k), &b, &u).unwrap();
        prop_assert!((wp - u.c * norm_r3(kp)).abs() <= 1e-12 * wp);
    }

    #[test]
    fn interval_is_invariant(beta in arb_beta(), x0 in -3.0f64..3.0, x in prop::array::uniform3(-3.0f64..3.0)) {
        let e = FourVector::new(x0, x);
        let b = Boost::new(beta).unwrap();
        let scale = (x0 * x0 + dot_r3(x, x)) * b.gamma * b.gamma;
        prop_assert!((e.boost(&b).interval() - e.interval()).abs() <= 1e-13 * scale.max(1.0));
        let back = e.boost(&b).boost(&b.inverse());
        prop_assert!((back.x0 - x0).abs() <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn boosted_modes_are_physical(beta in arb_beta(), k in arb_k(), ap in arb_c(), am in arb_c()) {
        prop_assume!(ap.norm() + am.norm() > 1e-3);
        let ops = build_operators();
        let u = Units::natural();
        let b = Boost::new(beta).unwrap();
        let m = make_mode(k, ap, am, 1.0).unwrap();
        let bm = boost_mode(&ops, &m, &b, &u).unwrap();
        let kp = bm.k.components();
        // ψ' = Λψ exactly, so nothing of the boosted spinor is dropped
        let lam = spinor_boost_matrix(&ops, &b).apply(&m.spinor());
        let scale = spinor_norm_sqr(&lam).sqrt();
        prop_assert!(spinor_max_abs_diff(&bm.spinor(), &lam) <= 1e-12 * scale);
        let h = hamiltonian_matrix(&ops, kp, &u).unwrap().apply(&lam);
        let w = bm.k.omega(&u);
        let diff: Spinor = std::array::from_fn(|i| h[i] - lam[i] * w);
        prop_assert!(spinor_norm_sqr(&diff).sqrt() <= 1e-12 * w * scale);
        prop_assert!(constraint_residual(&ModeState::new(vec![bm])).max() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn mode_state_json_round_trip(seed in 0u64..10_000, count in 1usize..6) {
        let s = ModeState::random(seed, count, 0.1, 8.0);
        let text = serde_json::to_string(&s).unwrap();
        let back: ModeState = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.modes, s.modes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_transform_is_unitary(seed in 0u64..1000, dx in 0.2f64..2.0) {
        let grid = GridSpec::new(8, dx).unwrap();
        let kmax = 0.9 * grid.max_index() as f64 * grid.dk();
        let s = ModeState::random(seed, 4, grid.dk(), kmax);
        let f = state_to_grid(&s, &grid).unwrap();
        let x = to_position(&f);
        let p = f.total_probability();
        prop_assert!((x.total_probability() - p).abs() <= 1e-12 * p);
        let back = to_momentum(&x);
        let worst = back.nodes().iter().zip(f.nodes()).map(|(a, b)| spinor_max_abs_diff(a, b)).fold(0.0, f64::max);
        let peak = f.nodes().iter().map(|v| spinor_norm_sqr(v).sqrt()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-12 * peak);
    }

    #[test]
    fn spectral_evolution_keeps_probability(seed in 0u64..1000, t in -5.0f64..5.0) {
        let grid = GridSpec::new(8, 0.7).unwrap();
        let kmax = 0.9 * grid.max_index() as f64 * grid.dk();
        let f = state_to_grid(&ModeState::random(seed, 3, grid.dk(), kmax), &grid).unwrap();
        let g = f.evolve(t, &Units::natural());
        let p = f.total_probability();
        prop_assert!((g.total_probability() - p).abs() <= 1e-13 * p);
        prop_assert!(g.constraint_residual().max() <= 1e-12);
    }

    #[test]
    fn container_round_trip_is_bit_exact(seed in 0u64..1000) {
        let grid = GridSpec::new(8, 0.5).unwrap();
        let kmax = 0.9 * grid.max_index() as f64 * grid.dk();
        let f = state_to_grid(&ModeState::random(seed, 3, grid.dk(), kmax), &grid).unwrap();
        let x = to_position(&f);
        let mut bytes = Vec::new();
        FieldContainer::from(&x).write_to(&mut bytes).unwrap();
        let back = FieldContainer::read_from(bytes.as_slice()).unwrap().to_position().unwrap();
        prop_assert_eq!(back.nodes(), x.nodes());
    }
}
