use proptest::prelude::*;
use tfn_core::scenarios::{analytic_transmission, build_grandfather, build_undo, perturbative_check, perturbative_instance};
use tfn_core::{couple, Complex64, FeedbackNetwork, GrandfatherParams, Operator, SplitterParams, StateVector};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn state(entries: &[(f64, f64)]) -> StateVector {
    StateVector::new(entries.iter().map(|&(re, im)| c(re, im)).collect()).unwrap()
}

type Entries = Vec<(f64, f64)>;

fn pair_strategy(max_dim: usize) -> impl Strategy<Value = (Entries, Entries)> {
    (1..=max_dim).prop_flat_map(|d| {
        let entry = (-10.0..10.0f64, -10.0..10.0f64);
        (
            prop::collection::vec(entry.clone(), d),
            prop::collection::vec(entry, d),
        )
    })
}

proptest! {
    #[test]
    fn coupler_matrix_is_unitary(beta in 0.0..=1.0f64) {
        let p = SplitterParams::from_beta(beta).unwrap();
        prop_assert!(p.coupler_matrix().is_unitary(1e-14));
    }

    #[test]
    fn coupler_preserves_total_norm(beta in 0.0..=1.0f64, (x, y) in pair_strategy(8)) {
        let p = SplitterParams::from_beta(beta).unwrap();
        let (x, y) = (state(&x), state(&y));
        let (a, b) = couple(&p, &x, &y).unwrap();
        let before = x.norm_sqr() + y.norm_sqr();
        let after = a.norm_sqr() + b.norm_sqr();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
    }

    #[test]
    fn inverse_times_matrix_is_identity(dim in 1usize..8, seed in any::<u64>(), shift in 0.5..3.0f64) {
        // unitary plus a shift keeps the condition number modest
        let a = Operator::random_unitary(dim, seed).unwrap()
            .add(&Operator::scalar(dim, c(shift, 0.3)).unwrap()).unwrap();
        let inv = a.invert().unwrap();
        prop_assume!(inv.condition <= 1e10);
        let id = Operator::identity(dim).unwrap();
        let err = inv.inverse.mat_mul(&a).unwrap().max_abs_diff(&id);
        prop_assert!(err <= inv.condition * 1e-14, "err {err} cond {}", inv.condition);
    }

    #[test]
    fn spectral_radius_of_scaled_unitary(dim in 1usize..6, seed in any::<u64>(), r in 0.05..2.0f64, arg in -3.0..3.0f64) {
        let u = Operator::random_unitary(dim, seed).unwrap().scaled(Complex64::from_polar(r, arg));
        prop_assert!((u.spectral_radius(200, seed) - r).abs() <= 1e-6 * r.max(1.0));
    }

    #[test]
    fn solution_is_linear_in_input(dim in 1usize..5, seed in any::<u64>(), beta in 0.05..0.95f64, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let net = FeedbackNetwork::new(
            Operator::random_unitary(dim, seed).unwrap(),
            Operator::random_unitary(dim, seed ^ 1).unwrap(),
            Operator::random_unitary(dim, seed ^ 2).unwrap(),
            SplitterParams::from_beta(beta).unwrap(),
        ).unwrap();
        let psi = StateVector::random(dim, seed ^ 3).unwrap();
        let k = c(re, im);
        let base = net.solve_closed_form(&psi);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let scaled = net.solve_closed_form(&psi.scaled(k)).unwrap();
        let tol = 1e-12 * k.norm().max(1.0) * base.denom_condition.unwrap();
        for ((_, a), (_, b)) in base.amplitudes().into_iter().zip(scaled.amplitudes()) {
            prop_assert!(b.max_abs_diff(&a.scaled(k)) <= tol);
        }
    }

    #[test]
    fn conservation_holds_at_both_couplers(dim in 1usize..6, seed in any::<u64>(), beta in 0.01..0.99f64) {
        let net = FeedbackNetwork::new(
            Operator::random_unitary(dim, seed).unwrap(),
            Operator::random_unitary(dim, seed ^ 5).unwrap(),
            Operator::random_unitary(dim, seed ^ 6).unwrap(),
            SplitterParams::from_beta(beta).unwrap(),
        ).unwrap();
        let psi = StateVector::random(dim, seed ^ 7).unwrap();
        if let Ok(sol) = net.solve_closed_form(&psi) {
            let scale = sol.psi_in.norm_sqr() + sol.psi4.norm_sqr();
            prop_assert!(sol.conservation_residual_t1 <= 1e-11 * scale);
            prop_assert!(sol.conservation_residual_t2 <= 1e-11 * scale);
            prop_assert!(net.verify_fixed_point(&sol) <= 1e-10 * sol.psi4.max_norm().max(1.0));
        }
    }

    #[test]
    fn transmission_is_even_and_periodic(beta in 0.02..0.98f64, phi in -6.0..6.0f64) {
        let psi = StateVector::basis(1, 0).unwrap();
        let t = |phi: f64| {
            build_grandfather(&GrandfatherParams::new(beta, 0.4, phi).unwrap())
                .unwrap()
                .solve_closed_form(&psi)
                .unwrap()
                .transmitted_probability()
                .unwrap()
        };
        let here = t(phi);
        prop_assert!((here - t(-phi)).abs() <= 1e-12);
        prop_assert!((here - t(phi + 2.0 * std::f64::consts::PI)).abs() <= 1e-10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&here));
    }
}

/// Direct scalar evaluation of
/// `psi3' = [alpha^2 G1 D (1 - M G2) - beta^2 G2 D (1 + M G1)] psi`.
fn scalar_output(g1: Complex64, g2: Complex64, m: Complex64, beta: f64, psi: Complex64) -> Complex64 {
    let a2 = 1.0 - beta * beta;
    let b2 = beta * beta;
    let d = 1.0 / (1.0 + b2 * m * g1 - a2 * m * g2);
    (a2 * g1 * d * (1.0 - m * g2) - b2 * g2 * d * (1.0 + m * g1)) * psi
}

#[test]
fn scalar_network_matches_direct_formula() {
    for seed in 0..50u64 {
        let g1 = Operator::random_unitary(1, seed).unwrap().get(0, 0) * 0.8;
        let g2 = Operator::random_unitary(1, seed + 100).unwrap().get(0, 0);
        let m = Operator::random_unitary(1, seed + 200).unwrap().get(0, 0) * 1.1;
        let beta = 0.05 + 0.9 * (seed as f64 / 50.0);
        let psi = StateVector::random(1, seed + 300).unwrap();
        let net = FeedbackNetwork::new(
            Operator::scalar(1, g1).unwrap(),
            Operator::scalar(1, g2).unwrap(),
            Operator::scalar(1, m).unwrap(),
            SplitterParams::from_beta(beta).unwrap(),
        )
        .unwrap();
        let sol = net.solve_closed_form(&psi).unwrap();
        let expected = scalar_output(g1, g2, m, beta, psi.entries()[0]);
        assert!((sol.psi3p.entries()[0] - expected).norm() <= 1e-14 * expected.norm().max(1.0));
    }
}

#[test]
fn grandfather_transmission_grid_is_theta_independent() {
    let psi = StateVector::basis(1, 0).unwrap();
    let betas: Vec<f64> = (0..20).map(|k| 0.04 + 0.048 * k as f64).collect();
    let thetas: Vec<f64> = (0..8).map(|k| -3.0 + 0.85 * k as f64).collect();
    let phis: Vec<f64> = (0..41).map(|k| -std::f64::consts::PI + k as f64 * std::f64::consts::PI / 20.0).collect();
    for &beta in &betas {
        for &phi in &phis {
            let analytic = analytic_transmission(beta, phi);
            for &theta in &thetas {
                let t = build_grandfather(&GrandfatherParams::new(beta, theta, phi).unwrap())
                    .unwrap()
                    .solve_closed_form(&psi)
                    .unwrap()
                    .transmitted_probability()
                    .unwrap();
                assert!((t - analytic).abs() <= 1e-12, "beta={beta} theta={theta} phi={phi}: {t} vs {analytic}");
            }
        }
    }
}

#[test]
fn resonance_holds_down_to_small_beta() {
    let psi = StateVector::basis(1, 0).unwrap();
    for beta in [0.01, 0.02, 0.05, 0.1, 0.5, 0.99] {
        let sol = build_grandfather(&GrandfatherParams::new(beta, 0.0, 0.0).unwrap())
            .unwrap()
            .solve_closed_form(&psi)
            .unwrap();
        assert!((sol.transmitted_probability().unwrap() - 1.0).abs() <= 1e-10);
        assert!(sol.psi4.norm() > sol.psi_in.norm() || beta > 0.7);
    }
}

#[test]
fn undo_is_beta_independent() {
    for beta in [0.1, 0.5, 0.9] {
        for seed in 0..5u64 {
            let g1 = Operator::random_unitary(4, seed).unwrap();
            let g2 = Operator::random_unitary(4, seed + 10).unwrap();
            let net = build_undo(g1, g2, SplitterParams::from_beta(beta).unwrap()).unwrap();
            let psi = StateVector::random(4, seed + 20).unwrap();
            let sol = net.solve_closed_form(&psi).unwrap();
            let expected = net.g1().mat_vec(&psi).unwrap();
            assert!(sol.psi3p.max_abs_diff(&expected) <= 1e-11);
        }
    }
}

#[test]
fn perturbative_error_shrinks_with_gamma() {
    // Richardson-extrapolated central differences: halving gamma cuts the
    // truncation error by about 2^4, well beyond the required O(gamma^2).
    let (g1, g2, m, psi) = perturbative_instance(4, 7).unwrap();
    let coarse = perturbative_check(&g1, &g2, &m, &psi, 1e-2).unwrap().relative_error;
    let fine = perturbative_check(&g1, &g2, &m, &psi, 5e-3).unwrap().relative_error;
    let ratio = coarse / fine;
    assert!(ratio >= 4.0, "ratio {ratio} (coarse {coarse}, fine {fine})");
    assert!((8.0..=32.0).contains(&ratio), "ratio {ratio} (coarse {coarse}, fine {fine})");
}
