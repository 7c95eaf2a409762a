//! Boost recovery from metric-correlated coordinate fluctuations.
//!
//! Microscopic coordinates `x` fluctuate with `⟨x xᵀ⟩ = s²·g_lower`, where
//! `g_lower` is the covariant metric of the observer frame. The primed
//! coordinates are `x′ = N x + ζ` with independent noise
//! `⟨ζ ζᵀ⟩ = e²·g′_lower`. Since `⟨x′ xᵀ⟩ = N ⟨x xᵀ⟩`, the boost is
//! recovered either by contracting with the contravariant metric,
//! `N̂ = s⁻² ⟨x′ xᵀ⟩ g^{upper}`, or by the determinant/Levi-Civita form of
//! `⟨x xᵀ⟩⁻¹`, which needs no metric at all.
//!
//! Sampling is split into independently seeded streams (one ChaCha stream
//! per partition, all sharing the model seed), so results are reproducible
//! for a given `(seed, n, streams)` regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kinematics::{
    invariance_residual, rho_from_sigma, sigma0_from_rho, sigma_between_frames, Branch,
    BoostNES, MetricNES,
};
use crate::linalg::{leibniz_determinant, max_abs_diff, signed_permutations, symmetric_sqrt, Matrix};
use crate::{NesError, Result};

/// Largest tolerated `max|Nᵀg′N − g|` for a model to count as consistent.
pub const MODEL_CONSISTENCY_TOLERANCE: f64 = 1e-10;

type Block = [[f64; 4]; 4];

fn to_block(m: &Matrix) -> Block {
    let mut b = [[0.0; 4]; 4];
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            b[i][j] = m[(i, j)];
        }
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationModel {
    pub g: MetricNES,
    pub g_prime: MetricNES,
    pub n_true: BoostNES,
    pub s2: f64,
    pub e2: f64,
    pub seed: u64,
}

impl FluctuationModel {
    pub fn new(
        g: MetricNES,
        g_prime: MetricNES,
        n_true: BoostNES,
        s2: f64,
        e2: f64,
        seed: u64,
    ) -> Result<Self> {
        if g.dim() != g_prime.dim() || g.dim() != n_true.dim() {
            return Err(NesError::Model("metrics and boost differ in dimension".into()));
        }
        if !(s2 > 0.0) || !s2.is_finite() {
            return Err(NesError::Model(format!("s2 = {s2} must be > 0")));
        }
        if !(e2 >= 0.0) || !e2.is_finite() {
            return Err(NesError::Model(format!("e2 = {e2} must be >= 0")));
        }
        let residual = invariance_residual(&g, &g_prime, &n_true);
        if !(residual < MODEL_CONSISTENCY_TOLERANCE) {
            return Err(NesError::Model(format!(
                "metrics and boost violate g = N^T g' N (residual {residual:e})"
            )));
        }
        Ok(FluctuationModel { g, g_prime, n_true, s2, e2, seed })
    }

    /// Observer frame `ρ`, particle frame `ρ′`, boost from the subluminal
    /// solution between them.
    pub fn between_frames(
        rho: f64,
        rho_prime: f64,
        axis: usize,
        dim: usize,
        s2: f64,
        e2: f64,
        seed: u64,
    ) -> Result<Self> {
        let g = MetricNES::from_rho(rho, axis, dim)?;
        let g_prime = MetricNES::from_rho(rho_prime, axis, dim)?;
        let sigma = sigma_between_frames(rho, rho_prime)?.sigma;
        Self::new(g, g_prime, BoostNES::from_ratio(sigma, axis, dim)?, s2, e2, seed)
    }

    /// Observer frame `ρ` and relative velocity ratio `σ`; the particle
    /// frame follows from adding `σ` to the observer's own ratio.
    pub fn from_sigma(
        rho: f64,
        sigma: f64,
        axis: usize,
        dim: usize,
        s2: f64,
        e2: f64,
        seed: u64,
    ) -> Result<Self> {
        let s0 = sigma0_from_rho(rho, Branch::Subluminal)?.sigma();
        let sp0 = (sigma + s0) / (1.0 + sigma * s0);
        if !(sp0 >= 0.0) {
            return Err(NesError::Domain(format!(
                "sigma = {sigma} would require a particle frame with negative rho"
            )));
        }
        let rho_prime = rho_from_sigma(sp0)?.rho;
        let g = MetricNES::from_rho(rho, axis, dim)?;
        let g_prime = MetricNES::from_rho(rho_prime, axis, dim)?;
        Self::new(g, g_prime, BoostNES::from_sigma(sigma, axis, dim)?, s2, e2, seed)
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Exact moments of the model.
    pub fn population_moments(&self) -> SampleMoments {
        let n = self.n_true.matrix();
        let cxx = self.g.lower() * self.s2;
        let cxpx = &n * &cxx;
        let cxpxp = &n * &cxx * n.transpose() + self.g_prime.lower() * self.e2;
        SampleMoments {
            moments: MomentMatrix { cxx, cxpx, n_samples: usize::MAX },
            cxpxp,
        }
    }

    fn factors(&self) -> Result<(Block, Block, Block)> {
        let a = symmetric_sqrt(&(self.g.lower() * self.s2))
            .ok_or_else(|| NesError::Model("s2 * g_lower is not positive definite".into()))?;
        let b = if self.e2 == 0.0 {
            Matrix::zeros(self.dim(), self.dim())
        } else {
            symmetric_sqrt(&(self.g_prime.lower() * self.e2))
                .ok_or_else(|| NesError::Model("e2 * g'_lower is not positive definite".into()))?
        };
        Ok((to_block(&a), to_block(&b), to_block(&self.n_true.matrix())))
    }
}

/// Paired samples `(x, x′)` and the noise `ζ` that produced them. Only the
/// leading `dim` entries of each array are meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationEnsemble {
    pub dim: usize,
    pub x: Vec<[f64; 4]>,
    pub x_prime: Vec<[f64; 4]>,
    pub zeta: Vec<[f64; 4]>,
}

/// Sample second moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    /// `⟨x_α x_β⟩`.
    pub cxx: Matrix,
    /// `⟨x′_μ x_α⟩`.
    pub cxpx: Matrix,
    pub n_samples: usize,
}

impl MomentMatrix {
    pub fn new(cxx: Matrix, cxpx: Matrix, n_samples: usize) -> Result<Self> {
        if !cxx.is_square() || cxx.shape() != cxpx.shape() || !(2..=4).contains(&cxx.nrows()) {
            return Err(NesError::Domain("moment matrices must be matching DxD, D in 2..=4".into()));
        }
        let asym = max_abs_diff(&cxx, &cxx.transpose());
        if asym > 1e-12 * cxx.amax().max(1.0) {
            return Err(NesError::Domain(format!("<x x> not symmetric (asymmetry {asym:e})")));
        }
        Ok(MomentMatrix { cxx, cxpx, n_samples })
    }

    pub fn dim(&self) -> usize {
        self.cxx.nrows()
    }
}

/// Moments of `x` and `x′`, including `⟨x′ x′ᵀ⟩` for the residual check.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMoments {
    pub moments: MomentMatrix,
    pub cxpxp: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedTransform {
    pub n_hat: Matrix,
}

impl EstimatedTransform {
    pub fn max_abs_error(&self, truth: &BoostNES) -> f64 {
        max_abs_diff(&self.n_hat, &truth.matrix())
    }
}

fn stream_sizes(n: usize, streams: usize) -> Vec<usize> {
    (0..streams)
        .map(|k| n / streams + usize::from(k < n % streams))
        .collect()
}

fn stream_rng(seed: u64, stream: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// One draw: `(x, ζ, x′)`.
#[inline]
fn draw(rng: &mut ChaCha8Rng, d: usize, a: &Block, b: &Block, n: &Block) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let mut z = [0.0; 4];
    let mut w = [0.0; 4];
    for zi in &mut z[..d] {
        *zi = StandardNormal.sample(rng);
    }
    for wi in &mut w[..d] {
        *wi = StandardNormal.sample(rng);
    }
    let mut x = [0.0; 4];
    let mut zeta = [0.0; 4];
    for i in 0..d {
        for k in 0..d {
            x[i] += a[i][k] * z[k];
            zeta[i] += b[i][k] * w[k];
        }
    }
    let mut xp = zeta;
    for i in 0..d {
        for k in 0..d {
            xp[i] += n[i][k] * x[k];
        }
    }
    (x, zeta, xp)
}

/// `n` draws in a single stream.
pub fn sample_fluctuations(model: &FluctuationModel, n: usize) -> Result<FluctuationEnsemble> {
    sample_fluctuations_partitioned(model, n, 1)
}

/// `n` draws split over `streams` independent streams, concatenated in
/// stream order.
pub fn sample_fluctuations_partitioned(
    model: &FluctuationModel,
    n: usize,
    streams: usize,
) -> Result<FluctuationEnsemble> {
    if n == 0 || streams == 0 {
        return Err(NesError::Domain("need n >= 1 samples and at least one stream".into()));
    }
    let (a, b, nm) = model.factors()?;
    let d = model.dim();
    let parts: Vec<FluctuationEnsemble> = stream_sizes(n, streams)
        .into_par_iter()
        .enumerate()
        .map(|(k, len)| {
            let mut rng = stream_rng(model.seed, k);
            let mut part = FluctuationEnsemble {
                dim: d,
                x: Vec::with_capacity(len),
                x_prime: Vec::with_capacity(len),
                zeta: Vec::with_capacity(len),
            };
            for _ in 0..len {
                let (x, zeta, xp) = draw(&mut rng, d, &a, &b, &nm);
                part.x.push(x);
                part.zeta.push(zeta);
                part.x_prime.push(xp);
            }
            part
        })
        .collect();

    let mut out = FluctuationEnsemble {
        dim: d,
        x: Vec::with_capacity(n),
        x_prime: Vec::with_capacity(n),
        zeta: Vec::with_capacity(n),
    };
    for p in parts {
        out.x.extend(p.x);
        out.x_prime.extend(p.x_prime);
        out.zeta.extend(p.zeta);
    }
    Ok(out)
}

#[derive(Default, Clone, Copy)]
struct Accumulator {
    xx: Block,
    xpx: Block,
    xpxp: Block,
    count: usize,
}

impl Accumulator {
    #[inline]
    fn push(&mut self, d: usize, x: &[f64; 4], xp: &[f64; 4]) {
        for i in 0..d {
            for j in 0..d {
                self.xx[i][j] += x[i] * x[j];
                self.xpx[i][j] += xp[i] * x[j];
                self.xpxp[i][j] += xp[i] * xp[j];
            }
        }
        self.count += 1;
    }

    fn merge(mut self, other: &Accumulator) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.xx[i][j] += other.xx[i][j];
                self.xpx[i][j] += other.xpx[i][j];
                self.xpxp[i][j] += other.xpxp[i][j];
            }
        }
        self.count += other.count;
        self
    }

    fn finish(&self, d: usize) -> SampleMoments {
        let n = self.count as f64;
        let mat = |b: &Block| Matrix::from_fn(d, d, |i, j| b[i][j] / n);
        SampleMoments {
            moments: MomentMatrix {
                cxx: mat(&self.xx),
                cxpx: mat(&self.xpx),
                n_samples: self.count,
            },
            cxpxp: mat(&self.xpxp),
        }
    }
}

impl FluctuationEnsemble {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn sample_moments(&self) -> SampleMoments {
        let mut acc = Accumulator::default();
        for (x, xp) in self.x.iter().zip(&self.x_prime) {
            acc.push(self.dim, x, xp);
        }
        acc.finish(self.dim)
    }

    pub fn moments(&self) -> MomentMatrix {
        self.sample_moments().moments
    }

    /// `⟨x_μ ζ_ν⟩`, which vanishes in expectation.
    pub fn cross_noise_moment(&self) -> Matrix {
        let d = self.dim;
        let n = self.len() as f64;
        let mut m = Matrix::zeros(d, d);
        for (x, z) in self.x.iter().zip(&self.zeta) {
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += x[i] * z[j];
                }
            }
        }
        m / n
    }
}

/// Moments of `n` draws computed on the fly, without keeping the ensemble.
/// Uses the same streams as [`sample_fluctuations_partitioned`]; partial
/// sums are merged in stream order.
pub fn accumulate_moments(model: &FluctuationModel, n: usize, streams: usize) -> Result<SampleMoments> {
    if n == 0 || streams == 0 {
        return Err(NesError::Domain("need n >= 1 samples and at least one stream".into()));
    }
    let (a, b, nm) = model.factors()?;
    let d = model.dim();
    let partials: Vec<Accumulator> = stream_sizes(n, streams)
        .into_par_iter()
        .enumerate()
        .map(|(k, len)| {
            let mut rng = stream_rng(model.seed, k);
            let mut acc = Accumulator::default();
            for _ in 0..len {
                let (x, _, xp) = draw(&mut rng, d, &a, &b, &nm);
                acc.push(d, &x, &xp);
            }
            acc
        })
        .collect();
    let total = partials
        .iter()
        .fold(Accumulator::default(), |acc, p| acc.merge(p));
    Ok(total.finish(d))
}

/// `N̂ = s⁻² ⟨x′ xᵀ⟩ g^{upper}`.
pub fn estimate_inverse_form(m: &MomentMatrix, g: &MetricNES, s2: f64) -> Result<EstimatedTransform> {
    if m.dim() != g.dim() {
        return Err(NesError::Domain("moment and metric dimensions differ".into()));
    }
    if m.n_samples < m.dim() {
        return Err(NesError::Domain(format!(
            "{} samples cannot determine a {}x{} transform",
            m.n_samples,
            m.dim(),
            m.dim()
        )));
    }
    if !(s2 > 0.0) {
        return Err(NesError::Domain(format!("s2 = {s2} must be > 0")));
    }
    Ok(EstimatedTransform {
        n_hat: &m.cxpx * g.upper() / s2,
    })
}

/// `Q^{αβ} = ε^{ασκ…} C_{στ} C_{κλ} ⋯ ε^{τλ…β}`, enumerating only the
/// non-vanishing Levi-Civita entries.
pub fn levi_civita_contraction(c: &Matrix) -> Matrix {
    let d = c.nrows();
    let perms = signed_permutations(d);
    let mut q = Matrix::zeros(d, d);
    for (p, sp) in &perms {
        for (r, sr) in &perms {
            let mut prod = sp * sr;
            for i in 0..d - 1 {
                prod *= c[(p[i + 1], r[i])];
            }
            q[(p[0], r[d - 1])] += prod;
        }
    }
    q
}

/// `N̂ = (−1)^{D−1}/(D−1)! · det⁻¹⟨x xᵀ⟩ · ⟨x′ xᵀ⟩ · Q`.
pub fn estimate_adjugate_form(m: &MomentMatrix) -> Result<EstimatedTransform> {
    let d = m.dim();
    let det = leibniz_determinant(&m.cxx);
    // Hadamard: |det| ≤ Π C_ii for a PSD matrix
    let scale: f64 = (0..d).map(|i| m.cxx[(i, i)].abs()).product();
    if !(det.abs() > 1e-13 * scale) || !det.is_finite() {
        return Err(NesError::Rank(det));
    }
    let sign = if d.is_multiple_of(2) { -1.0 } else { 1.0 };
    let factorial: f64 = (1..d).map(|k| k as f64).product();
    let q = levi_civita_contraction(&m.cxx);
    Ok(EstimatedTransform {
        n_hat: &m.cxpx * q * (sign / (factorial * det)),
    })
}

/// `N̂ = ⟨x′ xᵀ⟩ ⟨x xᵀ⟩⁻¹` by LU inversion.
pub fn estimate_by_inversion(m: &MomentMatrix) -> Result<EstimatedTransform> {
    let inv = m
        .cxx
        .clone()
        .try_inverse()
        .ok_or_else(|| NesError::Rank(m.cxx.determinant()))?;
    Ok(EstimatedTransform { n_hat: &m.cxpx * inv })
}

/// Residual-variance relations for the primed frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualVarianceReport {
    pub dim: usize,
    pub s2: f64,
    pub e2: f64,
    /// `s′² = g′^{μν}⟨x′_μ x′_ν⟩ / Tr(g′^{upper})`.
    pub s_prime2_hat: f64,
    pub trace_g_prime_upper: f64,
    /// `s′² − s²`.
    pub e2_difference_relation: f64,
    /// `s′² − s²·D/Tr(g′)`, contracting only the boost term.
    pub e2_trace_relation: f64,
    /// `s′²·Tr(g′)/D − s²`, contracting both terms against the sampled
    /// covariances.
    pub e2_covariance_relation: f64,
    /// `e2_difference_relation − e2_trace_relation`; zero when `Tr(g′) = D`.
    pub discrepancy: f64,
}

pub fn residual_variance_from_moment(model: &FluctuationModel, cxpxp: &Matrix) -> ResidualVarianceReport {
    let gp = model.g_prime.upper();
    let d = model.dim();
    let contracted = gp.component_mul(cxpxp).sum();
    let trace = model.g_prime.trace_upper();
    let s_prime2 = contracted / trace;
    let dim = d as f64;
    let e2_difference = s_prime2 - model.s2;
    let e2_trace = s_prime2 - model.s2 * dim / trace;
    ResidualVarianceReport {
        dim: d,
        s2: model.s2,
        e2: model.e2,
        s_prime2_hat: s_prime2,
        trace_g_prime_upper: trace,
        e2_difference_relation: e2_difference,
        e2_trace_relation: e2_trace,
        e2_covariance_relation: s_prime2 * trace / dim - model.s2,
        discrepancy: e2_difference - e2_trace,
    }
}

pub fn residual_variance_check(model: &FluctuationModel, ens: &FluctuationEnsemble) -> ResidualVarianceReport {
    residual_variance_from_moment(model, &ens.sample_moments().cxpxp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn no_noise_identity_boost_copies_x() {
        let m = FluctuationModel::between_frames(0.4, 0.4, 1, 4, 1.0, 0.0, 7).unwrap();
        assert_eq!(m.n_true.sigma().sigma(), 0.0);
        let ens = sample_fluctuations(&m, 100).unwrap();
        assert_eq!(ens.x, ens.x_prime);
    }

    #[test]
    fn deterministic_per_seed() {
        let m = FluctuationModel::from_sigma(0.2, 0.5, 1, 4, 1.0, 0.01, 42).unwrap();
        let a = sample_fluctuations_partitioned(&m, 1000, 3).unwrap();
        let b = sample_fluctuations_partitioned(&m, 1000, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1000);
        let c = accumulate_moments(&m, 1000, 3).unwrap();
        let d = accumulate_moments(&m, 1000, 3).unwrap();
        assert_eq!(c, d);
        // both paths see the same draws
        let via_ens = a.sample_moments();
        assert!(max_abs_diff(&via_ens.moments.cxpx, &c.moments.cxpx) < 1e-12);
        let other = FluctuationModel { seed: 43, ..m };
        assert_ne!(sample_fluctuations(&other, 10).unwrap(), sample_fluctuations(&m, 10).unwrap());
    }

    #[test]
    fn from_sigma_recovers_sigma() {
        for rho in [0.0, 0.3, 0.7] {
            let m = FluctuationModel::from_sigma(rho, 0.5, 1, 4, 1.0, 0.0, 1).unwrap();
            let sol = sigma_between_frames(rho, m.g_prime.rho()).unwrap();
            assert_abs_diff_eq!(sol.sigma.sigma(), 0.5, epsilon = 1e-12);
        }
        assert!(FluctuationModel::from_sigma(0.0, -0.5, 1, 4, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn inconsistent_model_rejected() {
        let g = MetricNES::from_rho(0.0, 1, 4).unwrap();
        let gp = MetricNES::from_rho(0.5, 1, 4).unwrap();
        let n = BoostNES::from_sigma(0.5, 1, 4).unwrap();
        assert!(matches!(FluctuationModel::new(g, gp, n, 1.0, 0.0, 0), Err(NesError::Model(_))));
        let n = BoostNES::from_sigma(0.0, 1, 4).unwrap();
        assert!(matches!(FluctuationModel::new(g, g, n, 0.0, 0.0, 0), Err(NesError::Model(_))));
        assert!(matches!(FluctuationModel::new(g, g, n, 1.0, -1.0, 0), Err(NesError::Model(_))));
    }

    #[test]
    fn exact_moments_give_exact_boost() {
        for dim in 2..=4 {
            let m = FluctuationModel::between_frames(0.3, 0.75, 1, dim, 2.5, 0.0, 0).unwrap();
            let pop = m.population_moments();
            let inv = estimate_inverse_form(&pop.moments, &m.g, m.s2).unwrap();
            let adj = estimate_adjugate_form(&pop.moments).unwrap();
            assert!(inv.max_abs_error(&m.n_true) < 1e-12);
            assert!(adj.max_abs_error(&m.n_true) < 1e-12);
        }
    }

    #[test]
    fn diagonal_adjugate() {
        let cxx = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 5.0]));
        let cxpx = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let m = MomentMatrix::new(cxx, cxpx.clone(), 10).unwrap();
        let adj = estimate_adjugate_form(&m).unwrap();
        let expected = Matrix::from_row_slice(2, 2, &[0.5, 0.4, 1.5, 0.8]);
        assert!(max_abs_diff(&adj.n_hat, &expected) < 1e-15);
    }

    #[test]
    fn contraction_is_scaled_adjugate() {
        // Q = (−1)^{D−1}(D−1)!·adj(C)
        let c = Matrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.0, -0.3, 0.1, -0.3, 1.5]);
        let q = levi_civita_contraction(&c);
        let adj = c.clone().try_inverse().unwrap() * c.determinant();
        assert!(max_abs_diff(&(q / 2.0), &adj) < 1e-13);
    }

    #[test]
    fn singular_moments_rejected() {
        let cxx = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let m = MomentMatrix::new(cxx, Matrix::identity(2, 2), 10).unwrap();
        assert!(matches!(estimate_adjugate_form(&m), Err(NesError::Rank(_))));
        assert!(MomentMatrix::new(
            Matrix::from_row_slice(2, 2, &[1.0, 0.2, 0.3, 1.0]),
            Matrix::identity(2, 2),
            5
        )
        .is_err());
    }

    #[test]
    fn too_few_samples_rejected() {
        let m = FluctuationModel::between_frames(0.0, 0.5, 1, 4, 1.0, 0.0, 0).unwrap();
        let ens = sample_fluctuations(&m, 3).unwrap();
        assert!(estimate_inverse_form(&ens.moments(), &m.g, 1.0).is_err());
    }

    #[test]
    fn population_residual_relations() {
        // orthogonal primed frame: all three relations coincide
        let m = FluctuationModel::between_frames(0.6, 0.0, 1, 4, 1.0, 0.01, 0).unwrap();
        assert_abs_diff_eq!(m.n_true.sigma().sigma(), -1.0 / 3.0, epsilon = 1e-15);
        let r = residual_variance_from_moment(&m, &m.population_moments().cxpxp);
        assert_abs_diff_eq!(r.s_prime2_hat, 1.01, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e2_difference_relation, 0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(r.discrepancy, 0.0, epsilon = 1e-15);

        // tilted primed frame without noise: s'^2 = s^2 D / Tr
        let m = FluctuationModel::between_frames(0.0, 0.8, 1, 4, 1.5, 0.0, 0).unwrap();
        let r = residual_variance_from_moment(&m, &m.population_moments().cxpxp);
        assert_abs_diff_eq!(r.s_prime2_hat, 1.5 * 4.0 / r.trace_g_prime_upper, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e2_trace_relation, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e2_covariance_relation, 0.0, epsilon = 1e-12);
        assert!(r.discrepancy.abs() > 0.1);

        // tilted primed frame with noise: only the covariance relation is exact
        let m = FluctuationModel::between_frames(0.0, 0.8, 1, 4, 1.0, 0.02, 0).unwrap();
        let r = residual_variance_from_moment(&m, &m.population_moments().cxpxp);
        assert_abs_diff_eq!(r.e2_covariance_relation, 0.02, epsilon = 1e-12);
    }
}
