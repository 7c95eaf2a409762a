//! Metrics, boosts and relativistic kinematics in the non-orthogonal
//! Euclidean space.
//!
//! A frame is described by a single spatial axis `j` that leans toward the
//! time axis `τ = ct`. The cosine of the angle between them is `ρ`, and
//! `λ = √(1 − ρ²)`. The contravariant metric is
//!
//! ```text
//! g⁰⁰ = gʲʲ = 1/λ,   g⁰ʲ = gʲ⁰ = ρ/λ,   gᵏᵏ = 1 (k ≠ j)
//! ```
//!
//! with unit determinant. Boosts along `j` are parametrized by the velocity
//! ratio `σ` and `ω = |1 − σ²|^{-1/2}`; both the subluminal (`|σ| < 1`) and
//! the superluminal (`|σ| > 1`) branches preserve the positive-definite
//! inner product.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::linalg::{leibniz_determinant, Matrix};
use crate::{NesError, Result};

/// `|1 − σ²|` below this is treated as the light cone.
pub const LIGHT_CONE_GUARD: f64 = 1e-15;

fn light_cone_gap(sigma: f64) -> Result<f64> {
    if !sigma.is_finite() {
        return Err(NesError::Domain(format!("velocity ratio {sigma} is not finite")));
    }
    let gap = (1.0 - sigma * sigma).abs();
    if gap < LIGHT_CONE_GUARD {
        return Err(NesError::Singularity(format!(
            "velocity ratio {sigma} lies on the light cone |sigma| = 1"
        )));
    }
    Ok(gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Subluminal,
    Superluminal,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Subluminal => "subluminal",
            Branch::Superluminal => "superluminal",
        })
    }
}

/// A velocity ratio `σ = V/c` tagged with the side of the light cone it
/// lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityRatio {
    sigma: f64,
    branch: Branch,
}

impl VelocityRatio {
    pub fn new(sigma: f64, branch: Branch) -> Result<Self> {
        let found = Self::classify(sigma)?;
        if found.branch != branch {
            return Err(NesError::BranchViolation(format!(
                "sigma = {sigma} is {} but {branch} was required",
                found.branch
            )));
        }
        Ok(found)
    }

    /// Tags `sigma` with the branch implied by its magnitude.
    pub fn classify(sigma: f64) -> Result<Self> {
        light_cone_gap(sigma)?;
        let branch = if sigma.abs() < 1.0 {
            Branch::Subluminal
        } else {
            Branch::Superluminal
        };
        Ok(VelocityRatio { sigma, branch })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// `ω = |1 − σ²|^{-1/2}`.
    pub fn omega(&self) -> f64 {
        (1.0 - self.sigma * self.sigma).abs().sqrt().recip()
    }
}

/// The pair `(ρ, λ)` with `ρ² + λ² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub rho: f64,
    pub lam: f64,
}

impl MetricParams {
    /// `1 − ρ`, evaluated as `λ²/(1 + ρ)` so it stays accurate as `ρ → 1`.
    pub fn one_minus_rho(&self) -> f64 {
        self.lam * self.lam / (1.0 + self.rho)
    }
}

fn check_dim_axis(dim: usize, axis: usize) -> Result<()> {
    if !(2..=4).contains(&dim) {
        return Err(NesError::Domain(format!("dimension {dim} not in 2..=4")));
    }
    if axis == 0 || axis >= dim {
        return Err(NesError::Domain(format!(
            "boost axis {axis} must be a spatial axis in 1..{dim}"
        )));
    }
    Ok(())
}

/// NES metric with one tilted spatial axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricNES {
    axis: usize,
    rho: f64,
    lam: f64,
    dim: usize,
}

impl MetricNES {
    /// Builds the metric for `ρ ∈ [0, 1)`.
    pub fn from_rho(rho: f64, axis: usize, dim: usize) -> Result<Self> {
        check_dim_axis(dim, axis)?;
        if !(0.0..1.0).contains(&rho) {
            return Err(NesError::Domain(format!(
                "rho = {rho} outside [0, 1): metric is not positive definite"
            )));
        }
        let lam = ((1.0 - rho) * (1.0 + rho)).sqrt();
        Ok(MetricNES { axis, rho, lam, dim })
    }

    pub fn orthogonal(dim: usize) -> Result<Self> {
        Self::from_rho(0.0, 1, dim)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> MetricParams {
        MetricParams {
            rho: self.rho,
            lam: self.lam,
        }
    }

    /// The contravariant matrix `g^{μν}`.
    pub fn upper(&self) -> Matrix {
        let mut g = Matrix::identity(self.dim, self.dim);
        let j = self.axis;
        g[(0, 0)] = self.lam.recip();
        g[(j, j)] = self.lam.recip();
        g[(0, j)] = self.rho / self.lam;
        g[(j, 0)] = self.rho / self.lam;
        g
    }

    /// The covariant matrix `g_{μν}`, i.e. the inverse of [`Self::upper`].
    /// The tilted 2×2 block has unit determinant, so its inverse only flips
    /// the sign of the off-diagonal entry.
    pub fn lower(&self) -> Matrix {
        let mut g = self.upper();
        let j = self.axis;
        g[(0, j)] = -g[(0, j)];
        g[(j, 0)] = -g[(j, 0)];
        g
    }

    /// `Tr(g^{μν}) = 2/λ + (D − 2)`.
    pub fn trace_upper(&self) -> f64 {
        2.0 / self.lam + (self.dim - 2) as f64
    }

    /// Determinant of the realized matrix, by explicit expansion.
    pub fn determinant(&self) -> f64 {
        leibniz_determinant(&self.upper())
    }

    /// `x_μ g^{μν} y_ν` over the first `dim` components.
    pub fn inner_product(&self, x: &FourVector, y: &FourVector) -> f64 {
        let j = self.axis;
        let mut acc = (x[0] * y[0] + x[j] * y[j] + self.rho * (x[0] * y[j] + x[j] * y[0])) / self.lam;
        for k in 1..self.dim {
            if k != j {
                acc += x[k] * y[k];
            }
        }
        acc
    }
}

/// Metric with parameter `ρ` along `axis` in `dim` dimensions.
pub fn metric_from_rho(rho: f64, axis: usize, dim: usize) -> Result<MetricNES> {
    MetricNES::from_rho(rho, axis, dim)
}

/// `x·g·y`.
pub fn inner_product(g: &MetricNES, x: &FourVector, y: &FourVector) -> f64 {
    g.inner_product(x, y)
}

/// Contravariant coordinates `(τ, x₁, x₂, x₃)`. Lower-dimensional frames use
/// the leading components and leave the rest at zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        FourVector([x0, x1, x2, x3])
    }

    pub fn tau(&self) -> f64 {
        self.0[0]
    }

    pub fn components(&self) -> &[f64; 4] {
        &self.0
    }
}

impl Index<usize> for FourVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A boost along a single spatial axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostNES {
    axis: usize,
    sigma: VelocityRatio,
    dim: usize,
}

impl BoostNES {
    pub fn from_sigma(sigma: f64, axis: usize, dim: usize) -> Result<Self> {
        check_dim_axis(dim, axis)?;
        Ok(BoostNES {
            axis,
            sigma: VelocityRatio::classify(sigma)?,
            dim,
        })
    }

    pub fn from_ratio(sigma: VelocityRatio, axis: usize, dim: usize) -> Result<Self> {
        check_dim_axis(dim, axis)?;
        Ok(BoostNES { axis, sigma, dim })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_sigma(0.0, 1, dim)
    }

    pub fn sigma(&self) -> VelocityRatio {
        self.sigma
    }

    pub fn omega(&self) -> f64 {
        self.sigma.omega()
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N_μ^α` with row `μ` (primed frame) and column `α`.
    pub fn matrix(&self) -> Matrix {
        let mut n = Matrix::identity(self.dim, self.dim);
        let (j, w, s) = (self.axis, self.omega(), self.sigma.sigma());
        n[(0, 0)] = w;
        n[(j, j)] = w;
        n[(0, j)] = -s * w;
        n[(j, 0)] = -s * w;
        n
    }

    /// `+1` on the subluminal branch, `−1` on the superluminal one, since
    /// `det N = ω²(1 − σ²)`.
    pub fn determinant_sign(&self) -> f64 {
        match self.sigma.branch() {
            Branch::Subluminal => 1.0,
            Branch::Superluminal => -1.0,
        }
    }

    /// `x′_μ = N_μ^α x_α`.
    pub fn apply(&self, x: &FourVector) -> FourVector {
        let (j, w, s) = (self.axis, self.omega(), self.sigma.sigma());
        let mut out = *x;
        out.0[0] = w * (x[0] - s * x[j]);
        out.0[j] = w * (x[j] - s * x[0]);
        out
    }

    /// Two-dimensional action on `(τ, x)`:
    /// `τ′ = (τ − σx)/√|1 − σ²|`, `x′ = (x − στ)/√|1 − σ²|`.
    pub fn apply_2d(&self, tau: f64, x: f64) -> (f64, f64) {
        let s = self.sigma.sigma();
        let root = (1.0 - s * s).abs().sqrt();
        ((tau - s * x) / root, (x - s * tau) / root)
    }
}

pub fn boost_from_sigma(sigma: f64, axis: usize, dim: usize) -> Result<BoostNES> {
    BoostNES::from_sigma(sigma, axis, dim)
}

pub fn apply_boost(n: &BoostNES, x: &FourVector) -> FourVector {
    n.apply(x)
}

/// Largest entry of `Nᵀ g′ N − g`, i.e. how far `(g, g′, N)` are from
/// preserving the inner product.
pub fn invariance_residual(g: &MetricNES, g_prime: &MetricNES, n: &BoostNES) -> f64 {
    let nm = n.matrix();
    let pulled = nm.transpose() * g_prime.upper() * &nm;
    crate::linalg::max_abs_diff(&pulled, &g.upper())
}

/// Metric parameters of a frame moving with `σ ≥ 0` relative to an
/// orthogonal one: `ρ = 2σ/(1 + σ²)`, `λ = |1 − σ²|/(1 + σ²)`.
///
/// `σ` and `1/σ` map to the same `(ρ, λ)`.
pub fn rho_from_sigma(sigma: f64) -> Result<MetricParams> {
    if !(sigma >= 0.0) {
        return Err(NesError::Domain(format!(
            "sigma = {sigma} must be non-negative; negative velocities belong to the boost"
        )));
    }
    let gap = light_cone_gap(sigma)?;
    let denom = 1.0 + sigma * sigma;
    Ok(MetricParams {
        rho: 2.0 * sigma / denom,
        lam: gap / denom,
    })
}

/// Inverse of [`rho_from_sigma`] for a frame seen from rest:
/// `σ⁰ = ρ/(1 + λ)` or `σ̂⁰ = (1 + λ)/ρ`.
pub fn sigma0_from_rho(rho: f64, branch: Branch) -> Result<VelocityRatio> {
    if !(0.0..1.0).contains(&rho) {
        return Err(NesError::Domain(format!("rho = {rho} outside [0, 1)")));
    }
    let lam = ((1.0 - rho) * (1.0 + rho)).sqrt();
    match branch {
        Branch::Subluminal => VelocityRatio::new(rho / (1.0 + lam), branch),
        Branch::Superluminal => {
            if rho == 0.0 {
                return Err(NesError::Singularity(
                    "superluminal velocity ratio diverges at rho = 0".into(),
                ));
            }
            VelocityRatio::new((1.0 + lam) / rho, branch)
        }
    }
}

/// Both boost solutions relating an observer frame to a particle frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSolutions {
    pub sigma: VelocityRatio,
    /// `None` when `λ = λ′`, where the superluminal solution is undefined.
    pub sigma_hat: Option<VelocityRatio>,
}

impl FrameSolutions {
    pub fn sigma_hat(&self) -> Result<VelocityRatio> {
        self.sigma_hat.ok_or_else(|| {
            NesError::Singularity("superluminal solution undefined for identical lambda".into())
        })
    }
}

/// Velocity ratios between an observer frame (`ρ`) and a particle frame
/// (`ρ′`):
///
/// ```text
/// σ = (ρ′λ − ρλ′)/(λ + λ′),   σ̂ = (ρ′λ + ρλ′)/(λ − λ′)
/// ```
///
/// The branch of each solution is checked rather than assumed.
pub fn sigma_between_frames(rho_obs: f64, rho_part: f64) -> Result<FrameSolutions> {
    let obs = MetricNES::from_rho(rho_obs, 1, 2)?;
    let part = MetricNES::from_rho(rho_part, 1, 2)?;
    let (rho, lam) = (obs.rho(), obs.lam());
    let (rho_p, lam_p) = (part.rho(), part.lam());

    let sigma = VelocityRatio::new((rho_p * lam - rho * lam_p) / (lam + lam_p), Branch::Subluminal)?;
    let sigma_hat = if lam == lam_p {
        None
    } else {
        Some(VelocityRatio::new(
            (rho_p * lam + rho * lam_p) / (lam - lam_p),
            Branch::Superluminal,
        )?)
    };
    Ok(FrameSolutions { sigma, sigma_hat })
}

/// Relative velocity ratio of two frames each given by its ratio to a
/// common rest frame.
///
/// Subluminal: `σ = (σ′⁰ − σ⁰)/(1 − σ′⁰σ⁰)`.
/// Superluminal: `σ̂ = (1 − σ̂′⁰σ̂⁰)/(σ̂′⁰ − σ̂⁰)`.
pub fn compose_sigma(sigma_prime0: f64, sigma0: f64, branch: Branch) -> Result<VelocityRatio> {
    for s in [sigma_prime0, sigma0] {
        let ratio = VelocityRatio::classify(s)?;
        if ratio.branch() != branch {
            return Err(NesError::Domain(format!(
                "input sigma = {s} is not {branch}"
            )));
        }
    }
    let (num, den) = match branch {
        Branch::Subluminal => (sigma_prime0 - sigma0, 1.0 - sigma_prime0 * sigma0),
        Branch::Superluminal => (1.0 - sigma_prime0 * sigma0, sigma_prime0 - sigma0),
    };
    if den.abs() < LIGHT_CONE_GUARD {
        return Err(NesError::Singularity(format!(
            "velocity addition denominator vanishes for ({sigma_prime0}, {sigma0})"
        )));
    }
    VelocityRatio::new(num / den, branch)
}

/// `dt_e/dt = √(1 − σ⁰²)`.
pub fn eigenzeit_factor(sigma0: f64) -> Result<f64> {
    if !(sigma0.abs() < 1.0) {
        return Err(NesError::Domain(format!(
            "Eigenzeit requires |sigma0| < 1, got {sigma0}"
        )));
    }
    Ok(((1.0 - sigma0) * (1.0 + sigma0)).sqrt())
}

/// The same factor obtained from the line element of the moving frame,
/// `ds² = (dx₀² + dx_j² + 2ρ dx₀ dx_j)/λ` with `dx₀ = c dt`, `dx_j = −V dt`
/// and `(ρ, λ)` from [`rho_from_sigma`]. Requires `0 ≤ β < 1`.
pub fn eigenzeit_factor_from_metric(beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(NesError::Domain(format!(
            "metric route requires 0 <= beta < 1, got {beta}"
        )));
    }
    let p = rho_from_sigma(beta)?;
    let (dx0, dxj) = (1.0, -beta);
    Ok(((dx0 * dx0 + dxj * dxj + 2.0 * p.rho * dx0 * dxj) / p.lam).sqrt())
}

/// `E = m₀c²/√|1 − σ²|`.
pub fn energy_of(m0c2: f64, sigma: f64) -> Result<f64> {
    if !(m0c2 >= 0.0) || !m0c2.is_finite() {
        return Err(NesError::Domain(format!("rest energy {m0c2} must be >= 0")));
    }
    Ok(m0c2 / light_cone_gap(sigma)?.sqrt())
}

/// Metric parameters of the frame attached to a particle of total energy
/// `E`: `λ = m₀²c⁴/(2E² − m₀²c⁴)`.
pub fn lambda_of_energy(m0c2: f64, energy: f64) -> Result<MetricParams> {
    if !(m0c2 > 0.0) || !m0c2.is_finite() {
        return Err(NesError::Domain(format!("rest energy {m0c2} must be > 0")));
    }
    if !(energy >= m0c2) || !energy.is_finite() {
        return Err(NesError::Domain(format!(
            "total energy {energy} below rest energy {m0c2}"
        )));
    }
    let r = energy / m0c2;
    let lam = (2.0 * r * r - 1.0).recip();
    let rho = ((1.0 - lam) * (1.0 + lam)).sqrt();
    Ok(MetricParams { rho, lam })
}

/// Orthogonal Minkowski boost:
/// `τ′ = (τ − βx)/√(1 − β²)`, `x′ = (x − βτ)/√(1 − β²)`.
pub fn oms_lorentz(beta: f64, tau: f64, x: f64) -> Result<(f64, f64)> {
    if !(beta.abs() < 1.0) {
        return Err(NesError::Domain(format!("|beta| = {} >= 1", beta.abs())));
    }
    let root = (1.0 - beta * beta).sqrt();
    Ok(((tau - beta * x) / root, (x - beta * tau) / root))
}

/// Minkowski interval `τ² − x²`.
pub fn minkowski_interval(tau: f64, x: f64) -> f64 {
    tau * tau - x * x
}

/// Four-momentum of a particle, in units with `c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourMomentum {
    pub p: FourVector,
    pub rest_mass: f64,
}

impl FourMomentum {
    /// `p = m₀·u` with the two-velocity `u = ω(1, −σ)` placed on `axis`.
    pub fn on_shell(rest_mass: f64, sigma: f64, axis: usize) -> Result<Self> {
        check_dim_axis(4, axis)?;
        let ratio = VelocityRatio::classify(sigma)?;
        let w = ratio.omega();
        let mut p = FourVector::default();
        p.0[0] = rest_mass * w;
        p.0[axis] = -rest_mass * sigma * w;
        Ok(FourMomentum { p, rest_mass })
    }

    /// Total energy `p₀c` (with `c = 1`).
    pub fn energy(&self) -> f64 {
        self.p[0]
    }

    /// `g(p, p)`; equals `m₀²` on shell when `g` is the frame metric of `σ`.
    pub fn norm_sq(&self, g: &MetricNES) -> f64 {
        g.inner_product(&self.p, &self.p)
    }
}
