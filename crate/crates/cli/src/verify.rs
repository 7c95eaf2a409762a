//! Randomized invariant suite behind `nes verify`.
//!
//! Each property draws its own parameters from a ChaCha stream derived from
//! the seed and the property's position in the suite, so filtering groups
//! does not change the draws of the remaining properties.

use std::f64::consts::PI;
use std::fmt;

use nes_core::blurred_lt::{
    accumulate_moments, estimate_adjugate_form, estimate_by_inversion, estimate_inverse_form,
    FluctuationModel, MomentMatrix,
};
use nes_core::effective_dimension::{
    counts_from_proportions, effective_dim, multinomial_entropy_oracle, normalized_eigenvalues,
    numeric_normalized_eigenvalues, SpectrumWeights,
};
use nes_core::kinematics::{
    compose_sigma, eigenzeit_factor, eigenzeit_factor_from_metric, invariance_residual, metric_from_rho,
    rho_from_sigma, sigma_between_frames,
};
use nes_core::linalg::{max_abs_diff, Matrix};
use nes_core::loop_regularization::{dzero_paper_closed_form, dzero_quadrature, pv_first_segment_analytic};
use nes_core::{BoostNES, Branch, FourMomentum, FourVector, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::Table;
use crate::{CliError, VerifyArgs};

pub const GROUPS: [&str; 4] = ["kinematics", "effective_dimension", "loop_regularization", "blurred_lt"];

const DRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

/// Largest residual seen over `draws` evaluations.
#[derive(Debug, Clone, Copy)]
struct Check {
    draws: usize,
    residual: f64,
}

impl Check {
    fn new() -> Self {
        Check { draws: 0, residual: 0.0 }
    }

    fn record(&mut self, r: f64) {
        self.draws += 1;
        // NaN must not be swallowed by max
        self.residual = if r.is_nan() || self.residual.is_nan() { f64::NAN } else { self.residual.max(r) };
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub group: &'static str,
    pub property: &'static str,
    pub status: Status,
    pub draws: usize,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.status != Status::Pass).count()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["group", "property", "status", "draws", "max_residual", "tolerance", "detail"]);
        for o in &self.outcomes {
            t.push(vec![
                o.group.into(),
                o.property.into(),
                o.status.to_string().into(),
                o.draws.into(),
                o.max_residual.into(),
                o.tolerance.into(),
                o.detail.clone().into(),
            ]);
        }
        t
    }
}

type PropertyFn = Box<dyn Fn(&mut ChaCha8Rng) -> Result<Check>>;

struct Property {
    group: &'static str,
    name: &'static str,
    tolerance: f64,
    run: PropertyFn,
}

fn property(
    group: &'static str,
    name: &'static str,
    tolerance: f64,
    run: impl Fn(&mut ChaCha8Rng) -> Result<Check> + 'static,
) -> Property {
    Property { group, name, tolerance, run: Box::new(run) }
}

/// Runs every property whose group matches the filter.
pub fn run(args: &VerifyArgs) -> std::result::Result<Report, CliError> {
    let mut report = Report::default();
    for (index, p) in suite(args.rho).iter().enumerate() {
        if args.filter.as_deref().is_some_and(|f| !p.group.contains(f)) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        rng.set_stream(index as u64);
        let outcome = evaluate(p, &mut rng);
        if args.verbose {
            eprintln!(
                "[{}] {}/{}: residual {:?} (tolerance {:e}, {} draws) {}",
                outcome.status, outcome.group, outcome.property, outcome.max_residual, outcome.tolerance,
                outcome.draws, outcome.detail
            );
        }
        report.outcomes.push(outcome);
    }
    if report.is_empty() {
        return Err(CliError::Usage(format!(
            "filter {:?} matches no group (groups: {})",
            args.filter.as_deref().unwrap_or(""),
            GROUPS.join(", ")
        )));
    }
    Ok(report)
}

fn evaluate(p: &Property, rng: &mut ChaCha8Rng) -> Outcome {
    let base = Outcome {
        group: p.group,
        property: p.name,
        status: Status::Error,
        draws: 0,
        max_residual: None,
        tolerance: p.tolerance,
        detail: String::new(),
    };
    match (p.run)(rng) {
        Ok(check) => {
            let pass = check.residual <= p.tolerance;
            Outcome {
                status: if pass { Status::Pass } else { Status::Fail },
                draws: check.draws,
                max_residual: Some(check.residual),
                ..base
            }
        }
        Err(e) => Outcome { detail: format!("{}: {e}", e.kind()), ..base },
    }
}

fn suite(injected_rho: Option<f64>) -> Vec<Property> {
    let mut props = vec![
        property("kinematics", "length_conservation", 1e-10, length_conservation),
        property("kinematics", "frame_invariance", 1e-10, frame_invariance),
        property("kinematics", "mass_shell", 1e-10, mass_shell),
        property("kinematics", "eigenzeit_identity", 1e-10, eigenzeit_identity),
        property("kinematics", "composition", 1e-10, composition),
        property("effective_dimension", "q_limits", 1e-12, q_limits),
        property("effective_dimension", "eigen_cross_check", 1e-10, eigen_cross_check),
        property("effective_dimension", "multinomial_oracle", 1e-2, multinomial_oracle),
        property("loop_regularization", "pv_real_part", 1e-6, pv_real_part),
        property("loop_regularization", "pole_term", 1e-10, pole_term),
        property("loop_regularization", "closed_form_imaginary", 5e-3, closed_form_imaginary),
        property("blurred_lt", "adjugate_identity", 1e-10, adjugate_identity),
        property("blurred_lt", "population_recovery", 1e-10, population_recovery),
        property("blurred_lt", "sampled_estimator_agreement", 1e-10, sampled_estimator_agreement),
    ];
    if let Some(rho) = injected_rho {
        props.push(property("kinematics", "injected_rho", 1e-10, move |_| injected(rho)));
    }
    props
}

fn random_vector(rng: &mut ChaCha8Rng) -> FourVector {
    FourVector(std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
}

fn random_sigma(rng: &mut ChaCha8Rng, draw: usize) -> f64 {
    // alternate between the two branches
    if draw.is_multiple_of(2) {
        rng.random_range(0.0..0.99)
    } else {
        rng.random_range(1.01..10.0)
    }
}

fn length_conservation(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for draw in 0..DRAWS {
        let sigma = random_sigma(rng, draw);
        let axis = rng.random_range(1..4);
        let g = metric_from_rho(0.0, axis, 4)?;
        let g_prime = metric_from_rho(rho_from_sigma(sigma)?.rho, axis, 4)?;
        let n = BoostNES::from_sigma(sigma, axis, 4)?;
        let x = random_vector(rng);
        let before = g.inner_product(&x, &x);
        let after = g_prime.inner_product(&n.apply(&x), &n.apply(&x));
        c.record((after - before).abs() / before);
    }
    Ok(c)
}

fn frame_invariance(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for _ in 0..DRAWS {
        let (rho, rho_prime) = (rng.random_range(0.0..0.95), rng.random_range(0.0..0.95));
        let axis = rng.random_range(1..4);
        let g = metric_from_rho(rho, axis, 4)?;
        let g_prime = metric_from_rho(rho_prime, axis, 4)?;
        let sol = sigma_between_frames(rho, rho_prime)?;
        c.record(invariance_residual(&g, &g_prime, &BoostNES::from_ratio(sol.sigma, axis, 4)?));
        if let Some(hat) = sol.sigma_hat {
            c.record(invariance_residual(&g, &g_prime, &BoostNES::from_ratio(hat, axis, 4)?));
        }
    }
    Ok(c)
}

fn mass_shell(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for _ in 0..DRAWS {
        let (m, sigma) = (rng.random_range(0.1..10.0), rng.random_range(0.0..0.99));
        let axis = rng.random_range(1..4);
        let p = FourMomentum::on_shell(m, sigma, axis)?;
        let g = metric_from_rho(rho_from_sigma(sigma)?.rho, axis, 4)?;
        c.record((p.norm_sq(&g) - m * m).abs() / (m * m));
    }
    Ok(c)
}

fn eigenzeit_identity(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for _ in 0..DRAWS {
        let beta = rng.random_range(0.0..0.999);
        c.record((eigenzeit_factor(beta)? - eigenzeit_factor_from_metric(beta)?).abs());
    }
    Ok(c)
}

fn composition(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for _ in 0..DRAWS {
        let (a, b) = (rng.random_range(0.0..0.95), rng.random_range(0.0..0.95));
        let composed = compose_sigma(a, b, Branch::Subluminal)?;
        // boost matrices compose the same way
        let product = BoostNES::from_sigma(a, 1, 2)?.matrix() * BoostNES::from_sigma(-b, 1, 2)?.matrix();
        let direct = BoostNES::from_ratio(composed, 1, 2)?.matrix();
        // and the frame solution between the two metrics agrees
        let between = sigma_between_frames(rho_from_sigma(b)?.rho, rho_from_sigma(a)?.rho)?;
        c.record(max_abs_diff(&product, &direct).max((between.sigma.sigma() - composed.sigma()).abs()));
    }
    Ok(c)
}

fn injected(rho: f64) -> Result<Check> {
    let g = metric_from_rho(rho, 1, 4)?;
    let g_prime = metric_from_rho(0.5, 1, 4)?;
    let sol = sigma_between_frames(rho, 0.5)?;
    let mut c = Check::new();
    c.record(invariance_residual(&g, &g_prime, &BoostNES::from_ratio(sol.sigma, 1, 4)?));
    Ok(c)
}

fn q_limits(_: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    c.record((effective_dim(&normalized_eigenvalues(&metric_from_rho(0.0, 1, 4)?)) - 4.0).abs());
    c.record((effective_dim(&SpectrumWeights::new(vec![1.0, 0.0, 0.0, 0.0])?) - 1.0).abs());
    Ok(c)
}

fn eigen_cross_check(_: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for i in 0..DRAWS {
        let rho = 0.999 * i as f64 / (DRAWS - 1) as f64;
        let g = metric_from_rho(rho, 1, 4)?;
        let closed = normalized_eigenvalues(&g).sorted_desc();
        let mut numeric = numeric_normalized_eigenvalues(&g);
        numeric.sort_by(|a, b| b.total_cmp(a));
        let diff = closed.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        c.record(diff);
    }
    Ok(c)
}

fn multinomial_oracle(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    let mut weights = vec![vec![4.0 / 9.0, 1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0], vec![0.25; 4]];
    for _ in 0..8 {
        let g = metric_from_rho(rng.random_range(0.0..0.99), 1, 4)?;
        weights.push(normalized_eigenvalues(&g).as_slice().to_vec());
    }
    for w in weights {
        let q = effective_dim(&SpectrumWeights::new(w.clone())?);
        let oracle = multinomial_entropy_oracle(&counts_from_proportions(&w, 10_000))?;
        c.record((oracle - q).abs() / q);
    }
    Ok(c)
}

const KSTARS: [f64; 3] = [2.0, 10.0, 1e3];

fn pv_real_part(_: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for k in KSTARS {
        let quad = dzero_quadrature(k, 1e-12)?.segment1.re;
        let exact = pv_first_segment_analytic(k)? / (8.0 * PI * PI);
        c.record(((quad - exact) / exact).abs());
    }
    Ok(c)
}

fn pole_term(_: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for k in KSTARS {
        c.record((dzero_quadrature(k, 1e-12)?.segment1.im + 1.0 / (16.0 * PI)).abs());
    }
    Ok(c)
}

fn closed_form_imaginary(_: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for i in 0..=100 {
        let k = 10f64.powf(1.0 + 19.0 * i as f64 / 100.0);
        c.record((dzero_paper_closed_form(k)?.d0.im - 0.48).abs());
    }
    Ok(c)
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0))
}

fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let b = random_matrix(rng, d);
    &b * b.transpose() + Matrix::identity(d, d) * 0.1
}

fn relative_gap(a: &Matrix, b: &Matrix) -> f64 {
    max_abs_diff(a, b) / b.amax().max(1.0)
}

fn adjugate_identity(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for d in 2..=4 {
        for _ in 0..100 {
            let m = MomentMatrix::new(random_spd(rng, d), random_matrix(rng, d), 1000)?;
            c.record(relative_gap(&estimate_adjugate_form(&m)?.n_hat, &estimate_by_inversion(&m)?.n_hat));
        }
    }
    Ok(c)
}

fn population_recovery(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for _ in 0..100 {
        let dim = rng.random_range(2..=4);
        let axis = rng.random_range(1..dim);
        let (rho, rho_prime) = (rng.random_range(0.0..0.95), rng.random_range(0.0..0.95));
        let model = FluctuationModel::between_frames(rho, rho_prime, axis, dim, 1.0, 0.01, 0)?;
        let pop = model.population_moments();
        let inverse = estimate_inverse_form(&pop.moments, &model.g, model.s2)?;
        let adjugate = estimate_adjugate_form(&pop.moments)?;
        c.record(inverse.max_abs_error(&model.n_true).max(adjugate.max_abs_error(&model.n_true)));
    }
    Ok(c)
}

fn sampled_estimator_agreement(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut c = Check::new();
    for _ in 0..4 {
        let model = FluctuationModel::from_sigma(0.0, 0.5, 1, 4, 1.0, 0.01, rng.random())?;
        let m = accumulate_moments(&model, 20_000, 4)?.moments;
        c.record(relative_gap(&estimate_adjugate_form(&m)?.n_hat, &estimate_by_inversion(&m)?.n_hat));
    }
    Ok(c)
}
