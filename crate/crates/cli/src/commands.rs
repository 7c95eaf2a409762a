//! One function per subcommand, each returning the table it emits.

use nes_core::blurred_lt::{
    accumulate_moments, estimate_adjugate_form, estimate_inverse_form, residual_variance_from_moment,
    FluctuationModel,
};
use nes_core::effective_dimension::{figure2_data, figure3_data};
use nes_core::loop_regularization as lr;
use nes_core::{EvalMode, NesError, PhysicalConstants, Result};

use crate::output::{Cell, Table};
use crate::{BlurArgs, DzeroArgs, Figure2Args, Figure3Args, MassCorrectionArgs, ThetaTableArgs};

const AXIS: usize = 1;

pub fn figure2(a: &Figure2Args) -> Result<Table> {
    let mut t = Table::new(["panel", "sigma", "rho", "lambda"]);
    for r in figure2_data(a.points, a.sigma_max)? {
        t.push(vec![r.panel.as_str().into(), r.sigma.into(), r.rho.into(), r.lambda.into()]);
    }
    Ok(t)
}

pub fn figure3(a: &Figure3Args) -> Result<Table> {
    let c = PhysicalConstants::default();
    let mut t = Table::new(["mass_gev", "energy_ratio", "q", "clamped"]);
    for r in figure3_data(&a.masses_gev, a.points, (a.ratio_min, a.ratio_max), &c)? {
        t.push(vec![r.mass_gev.into(), r.energy_ratio.into(), r.q.into(), r.clamped.into()]);
    }
    Ok(t)
}

pub fn dzero(a: &DzeroArgs) -> Result<Table> {
    let c = PhysicalConstants::default();
    let k = match (a.kstar, a.mass_gev) {
        (Some(k), _) => k,
        (None, Some(m)) => lr::kstar(m, &c)?,
        (None, None) => return Err(NesError::Domain("one of --mass-gev or --kstar is required".into())),
    };
    let r = match a.mode {
        EvalMode::Paper => lr::dzero_paper_closed_form(k)?,
        EvalMode::Plemelj => lr::dzero_quadrature(k, a.tolerance)?,
    };
    Ok(Table::record([
        ("mode", Cell::from(r.mode.as_str())),
        ("mass_gev", a.mass_gev.into()),
        ("kstar", r.kstar.into()),
        ("re", r.d0.re.into()),
        ("im", r.d0.im.into()),
        ("segment1_re", r.segment1.re.into()),
        ("segment1_im", r.segment1.im.into()),
        ("segment2_re", r.segment2.re.into()),
        ("segment2_im", r.segment2.im.into()),
        ("quadrature_error", r.quadrature_error.into()),
    ]))
}

pub fn mass_correction(a: &MassCorrectionArgs) -> Result<Table> {
    let m = lr::mass_correction(a.mass_gev, a.coupling, a.mode, &PhysicalConstants::default())?;
    Ok(Table::record([
        ("mode", Cell::from(m.mode.as_str())),
        ("mass_gev", m.m0c2_gev.into()),
        ("coupling", m.coupling.into()),
        ("kstar", m.kstar.into()),
        ("re", m.d0.re.into()),
        ("im", m.d0.im.into()),
        ("theta_js", m.theta_js.into()),
        ("mu_star", m.mu_star.into()),
        ("tau_l_s", m.tau_l_s.into()),
    ]))
}

pub fn theta_table(a: &ThetaTableArgs) -> Result<Table> {
    let mut t = Table::new(["mass_gev", "kstar", "theta_js", "theta_inv_per_js"]);
    for r in lr::theta_table(&a.masses_gev, &PhysicalConstants::default())? {
        t.push(vec![r.m0c2_gev.into(), r.kstar.into(), r.theta_js.into(), r.theta_inv_per_js.into()]);
    }
    Ok(t)
}

pub fn blur_estimate(a: &BlurArgs) -> Result<Table> {
    let model = match a.rho_prime {
        Some(rp) => FluctuationModel::between_frames(a.rho, rp, AXIS, a.dim, a.s2, a.e2, a.seed)?,
        None => FluctuationModel::from_sigma(a.rho, a.sigma, AXIS, a.dim, a.s2, a.e2, a.seed)?,
    };
    let sample = accumulate_moments(&model, a.samples, a.streams)?;
    let inverse = estimate_inverse_form(&sample.moments, &model.g, model.s2)?;
    let adjugate = estimate_adjugate_form(&sample.moments)?;
    let residual = residual_variance_from_moment(&model, &sample.cxpxp);

    let mut fields: Vec<(String, Cell)> = vec![
        ("dim".into(), a.dim.into()),
        ("rho".into(), model.g.rho().into()),
        ("rho_prime".into(), model.g_prime.rho().into()),
        ("sigma".into(), model.n_true.sigma().sigma().into()),
        ("s2".into(), a.s2.into()),
        ("e2".into(), a.e2.into()),
        ("samples".into(), a.samples.into()),
        ("seed".into(), a.seed.into()),
        ("streams".into(), a.streams.into()),
        ("max_abs_error_inverse".into(), inverse.max_abs_error(&model.n_true).into()),
        ("max_abs_error_adjugate".into(), adjugate.max_abs_error(&model.n_true).into()),
        ("s_prime2_hat".into(), residual.s_prime2_hat.into()),
        ("trace_g_prime_upper".into(), residual.trace_g_prime_upper.into()),
        ("e2_difference_relation".into(), residual.e2_difference_relation.into()),
        ("e2_trace_relation".into(), residual.e2_trace_relation.into()),
        ("e2_covariance_relation".into(), residual.e2_covariance_relation.into()),
        ("discrepancy".into(), residual.discrepancy.into()),
    ];
    for i in 0..a.dim {
        for j in 0..a.dim {
            fields.push((format!("n_hat_{i}{j}"), inverse.n_hat[(i, j)].into()));
        }
    }
    Ok(Table::record(fields))
}
