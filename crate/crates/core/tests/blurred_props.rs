use nes_core::blurred_lt::{
    accumulate_moments, estimate_adjugate_form, estimate_by_inversion, estimate_inverse_form,
    levi_civita_contraction, residual_variance_from_moment, sample_fluctuations_partitioned,
    FluctuationModel, MomentMatrix,
};
use nes_core::linalg::{max_abs_diff, Matrix};
use nes_core::NesError;
use proptest::prelude::*;

fn spd(dim: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0..1.0f64, dim * dim).prop_map(move |v| {
        let b = Matrix::from_vec(dim, dim, v);
        &b * b.transpose() + Matrix::identity(dim, dim) * 0.1
    })
}

fn moment_pair() -> impl Strategy<Value = (Matrix, Matrix)> {
    (2usize..=4).prop_flat_map(|d| {
        (spd(d), prop::collection::vec(-1.0..1.0f64, d * d).prop_map(move |v| Matrix::from_vec(d, d, v)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn adjugate_form_equals_inversion((cxx, cxpx) in moment_pair()) {
        let m = MomentMatrix::new(cxx, cxpx, 1000).unwrap();
        let a = estimate_adjugate_form(&m).unwrap().n_hat;
        let b = estimate_by_inversion(&m).unwrap().n_hat;
        prop_assert!(max_abs_diff(&a, &b) <= 1e-10 * b.amax().max(1.0));
    }

    #[test]
    fn contraction_is_scaled_inverse((cxx, _) in moment_pair()) {
        // C·Q is a multiple of the identity
        let d = cxx.nrows();
        let prod = &cxx * levi_civita_contraction(&cxx);
        let diag = prod[(0, 0)];
        prop_assert!(max_abs_diff(&prod, &(Matrix::identity(d, d) * diag)) <= 1e-10 * diag.abs().max(1.0));
    }

    #[test]
    fn population_moments_recover_boost(
        rho in 0.0..0.95f64, rho_p in 0.0..0.95f64, dim in 2usize..=4, e2 in 0.0..0.5f64
    ) {
        let model = FluctuationModel::between_frames(rho, rho_p, 1, dim, 1.0, e2, 0).unwrap();
        let pop = model.population_moments();
        let inv = estimate_inverse_form(&pop.moments, &model.g, model.s2).unwrap();
        prop_assert!(inv.max_abs_error(&model.n_true) < 1e-10);
        let adj = estimate_adjugate_form(&pop.moments).unwrap();
        prop_assert!(adj.max_abs_error(&model.n_true) < 1e-10);
        // the noise contracts to e²·D
        let report = residual_variance_from_moment(&model, &pop.cxpxp);
        prop_assert!((report.e2_covariance_relation - e2).abs() < 1e-10);
    }
}

#[test]
fn sampling_is_deterministic_and_stream_consistent() {
    let model = FluctuationModel::from_sigma(0.0, 0.5, 1, 4, 1.0, 0.01, 7).unwrap();
    let a = accumulate_moments(&model, 10_001, 3).unwrap();
    let b = accumulate_moments(&model, 10_001, 3).unwrap();
    assert_eq!(a, b);
    let ens = sample_fluctuations_partitioned(&model, 10_001, 3).unwrap();
    assert_eq!(ens.len(), 10_001);
    let c = ens.sample_moments();
    assert!(max_abs_diff(&a.moments.cxx, &c.moments.cxx) < 1e-12);
    assert!(max_abs_diff(&a.moments.cxpx, &c.moments.cxpx) < 1e-12);
    // other seed, other numbers
    let other = FluctuationModel { seed: 8, ..model };
    assert_ne!(accumulate_moments(&other, 10_001, 3).unwrap(), a);
}

#[test]
fn noise_is_uncorrelated_with_fluctuations() {
    let model = FluctuationModel::from_sigma(0.2, 0.4, 1, 4, 1.0, 0.05, 11).unwrap();
    let n = 40_000;
    let ens = sample_fluctuations_partitioned(&model, n, 4).unwrap();
    let bound = 4.0 / (n as f64).sqrt();
    assert!(ens.cross_noise_moment().amax() < bound);
}

#[test]
fn monte_carlo_error_shrinks() {
    let model = FluctuationModel::from_sigma(0.0, 0.5, 1, 4, 1.0, 0.01, 3).unwrap();
    let err = |n| {
        let m = accumulate_moments(&model, n, 4).unwrap();
        estimate_inverse_form(&m.moments, &model.g, model.s2).unwrap().max_abs_error(&model.n_true)
    };
    let (small, large) = (err(2_000), err(200_000));
    assert!(large < small, "{large} !< {small}");
    assert!(large < 0.02);
}

#[test]
fn singular_moments_are_rejected() {
    let cxx = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    let m = MomentMatrix::new(cxx, Matrix::identity(2, 2), 100).unwrap();
    assert!(matches!(estimate_adjugate_form(&m), Err(NesError::Rank(_))));
    assert!(matches!(estimate_by_inversion(&m), Err(NesError::Rank(_))));
}
