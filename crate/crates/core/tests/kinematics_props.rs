use nes_core::kinematics::{
    compose_sigma, eigenzeit_factor, eigenzeit_factor_from_metric, energy_of, invariance_residual,
    lambda_of_energy, metric_from_rho, minkowski_interval, oms_lorentz, rho_from_sigma, sigma0_from_rho,
    sigma_between_frames,
};
use nes_core::{BoostNES, Branch, FourMomentum, FourVector, NesError};
use proptest::prelude::*;

fn sigma_either_branch() -> impl Strategy<Value = f64> {
    prop_oneof![0.0..0.99f64, 1.01..10.0f64]
}

fn four_vector() -> impl Strategy<Value = FourVector> {
    prop::array::uniform4(-1.0..1.0f64).prop_map(FourVector)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn length_is_conserved(sigma in sigma_either_branch(), axis in 1usize..4, x in four_vector()) {
        let g = metric_from_rho(0.0, axis, 4).unwrap();
        let gp = metric_from_rho(rho_from_sigma(sigma).unwrap().rho, axis, 4).unwrap();
        let y = BoostNES::from_sigma(sigma, axis, 4).unwrap().apply(&x);
        let before = g.inner_product(&x, &x);
        prop_assert!((gp.inner_product(&y, &y) - before).abs() <= 1e-12 * before.max(1e-300) + 1e-15);
    }

    #[test]
    fn rho_and_lambda_lie_on_unit_circle(sigma in sigma_either_branch()) {
        let p = rho_from_sigma(sigma).unwrap();
        prop_assert!((p.rho * p.rho + p.lam * p.lam - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_of_energy_on_unit_circle(m in 0.1..10.0f64, factor in 1.0..1e6f64) {
        let p = lambda_of_energy(m, m * factor).unwrap();
        prop_assert!((p.rho * p.rho + p.lam * p.lam - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_solutions_satisfy_invariance(rho in 0.0..0.95f64, rho_p in 0.0..0.95f64, axis in 1usize..4) {
        let g = metric_from_rho(rho, axis, 4).unwrap();
        let gp = metric_from_rho(rho_p, axis, 4).unwrap();
        let sol = sigma_between_frames(rho, rho_p).unwrap();
        prop_assert!(sol.sigma.sigma().abs() < 1.0);
        let n = BoostNES::from_ratio(sol.sigma, axis, 4).unwrap();
        prop_assert!(invariance_residual(&g, &gp, &n) < 1e-10);
        prop_assert_eq!(n.determinant_sign(), 1.0);
        if let Some(hat) = sol.sigma_hat {
            prop_assert!(hat.sigma().abs() > 1.0);
            if sol.sigma.sigma() != 0.0 {
                prop_assert!((hat.sigma() * sol.sigma.sigma() - 1.0).abs() < 1e-9);
            }
            let nh = BoostNES::from_ratio(hat, axis, 4).unwrap();
            prop_assert!(invariance_residual(&g, &gp, &nh) < 1e-10);
            prop_assert_eq!(nh.determinant_sign(), -1.0);
        }
    }

    #[test]
    fn sigma0_inverts_rho_from_sigma(rho in 1e-6..0.999f64) {
        for branch in [Branch::Subluminal, Branch::Superluminal] {
            let s = sigma0_from_rho(rho, branch).unwrap();
            prop_assert_eq!(s.branch(), branch);
            prop_assert!((rho_from_sigma(s.sigma()).unwrap().rho - rho).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_shell_holds(m in 0.1..10.0f64, sigma in 0.0..0.99f64, axis in 1usize..4) {
        let p = FourMomentum::on_shell(m, sigma, axis).unwrap();
        let g = metric_from_rho(rho_from_sigma(sigma).unwrap().rho, axis, 4).unwrap();
        // cancellation grows like ω²/λ towards the light cone
        let kappa = (1.0 + sigma * sigma) / (1.0 - sigma * sigma).powi(2);
        prop_assert!((p.norm_sq(&g) - m * m).abs() / (m * m) < 1e-14 * kappa.max(100.0));
        prop_assert!((p.energy() - energy_of(m, sigma).unwrap()).abs() < 1e-12 * p.energy());
    }

    #[test]
    fn eigenzeit_routes_agree(beta in 0.0..0.999f64) {
        let a = eigenzeit_factor(beta).unwrap();
        let b = eigenzeit_factor_from_metric(beta).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn composition_matches_boost_product(a in 0.0..0.95f64, b in 0.0..0.95f64) {
        let c = compose_sigma(a, b, Branch::Subluminal).unwrap();
        let product = BoostNES::from_sigma(a, 1, 2).unwrap().matrix()
            * BoostNES::from_sigma(-b, 1, 2).unwrap().matrix();
        let direct = BoostNES::from_ratio(c, 1, 2).unwrap().matrix();
        prop_assert!((product - direct).amax() < 1e-12);
        let between = sigma_between_frames(rho_from_sigma(b).unwrap().rho, rho_from_sigma(a).unwrap().rho).unwrap();
        prop_assert!((between.sigma.sigma() - c.sigma()).abs() < 1e-10);
    }

    #[test]
    fn minkowski_reference_preserves_interval(beta in -0.99..0.99f64, t in -5.0..5.0f64, x in -5.0..5.0f64) {
        let (tp, xp) = oms_lorentz(beta, t, x).unwrap();
        let scale = (t * t + x * x).max(1.0) / (1.0 - beta * beta);
        prop_assert!((minkowski_interval(tp, xp) - minkowski_interval(t, x)).abs() < 1e-12 * scale);
    }
}

#[test]
fn light_cone_is_rejected() {
    assert!(matches!(BoostNES::from_sigma(1.0, 1, 4), Err(NesError::Singularity(_))));
    assert!(matches!(BoostNES::from_sigma(1.0 - 1e-16, 1, 4), Err(NesError::Singularity(_))));
    assert!(matches!(rho_from_sigma(1.0), Err(NesError::Singularity(_))));
}
