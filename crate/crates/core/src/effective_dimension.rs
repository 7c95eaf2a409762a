//! Entropy-based effective dimension of the metric spectrum.
//!
//! The metric eigenvalues are normalized by the trace and read as
//! probabilities `ē_α`; the effective dimension is the exponential of their
//! entropy, `q = exp(−Σ ē_α ln ē_α)`. An orthogonal frame gives `q = 4`,
//! and `q → 1` as the time and boost axes collapse onto each other.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::kinematics::{lambda_of_energy, rho_from_sigma, MetricNES, MetricParams};
use crate::linalg::symmetric_eigenvalues;
use crate::{NesError, PhysicalConstants, Result};

/// Tolerance on `Σ ē_α = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Normalized spectrum (probabilities summing to one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumWeights(Vec<f64>);

impl SpectrumWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(NesError::Domain("empty spectrum".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(NesError::Domain(format!("weight {w} outside [0, 1]")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(NesError::Domain(format!("weights sum to {sum}, not 1")));
        }
        Ok(SpectrumWeights(weights))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// Closed-form weights of the 4-D metric with parameters `(ρ, λ)`:
    /// `ē₀,₁ = (1 ± ρ)/[2(1 + λ)]`, `ē₂,₃ = λ/[2(1 + λ)]`.
    pub fn from_params(p: MetricParams) -> Self {
        let norm = 2.0 * (1.0 + p.lam);
        let side = p.lam / norm;
        SpectrumWeights(vec![(1.0 + p.rho) / norm, p.one_minus_rho() / norm, side, side])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Weights sorted in descending order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Trace-normalized eigenvalues of the metric, in closed form.
///
/// The tilted block contributes `(1 ± ρ)/λ`, every untouched axis `1`, and
/// the trace is `2/λ + D − 2`. For `D = 4` this is [`SpectrumWeights::from_params`].
pub fn normalized_eigenvalues(g: &MetricNES) -> SpectrumWeights {
    if g.dim() == 4 {
        return SpectrumWeights::from_params(g.params());
    }
    let p = g.params();
    let trace = g.trace_upper();
    let mut w = vec![(1.0 + p.rho) / p.lam / trace, p.one_minus_rho() / p.lam / trace];
    w.extend(std::iter::repeat_n(1.0 / trace, g.dim() - 2));
    SpectrumWeights(w)
}

/// Same weights from the iterative symmetric eigensolver, sorted descending.
pub fn numeric_normalized_eigenvalues(g: &MetricNES) -> Vec<f64> {
    let m = g.upper();
    let trace = m.trace();
    symmetric_eigenvalues(&m).into_iter().map(|e| e / trace).collect()
}

/// `exp(−Σ w ln w)` with `0·ln 0 = 0`.
pub fn effective_dim(w: &SpectrumWeights) -> f64 {
    let entropy: f64 = w
        .as_slice()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum();
    entropy.exp()
}

/// Rest and total energy of a particle, in GeV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyState {
    m0c2: f64,
    energy: f64,
}

impl EnergyState {
    pub fn new(m0c2: f64, energy: f64) -> Result<Self> {
        if !(m0c2 > 0.0) || !m0c2.is_finite() {
            return Err(NesError::Domain(format!("rest energy {m0c2} must be > 0")));
        }
        if !(energy >= m0c2) || !energy.is_finite() {
            return Err(NesError::Domain(format!(
                "total energy {energy} below rest energy {m0c2}"
            )));
        }
        Ok(EnergyState { m0c2, energy })
    }

    pub fn m0c2(&self) -> f64 {
        self.m0c2
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }
}

/// Smooth effective dimension: energy → `(ρ, λ)` → spectrum → `q`.
pub fn q_of_energy(s: &EnergyState) -> Result<f64> {
    let p = lambda_of_energy(s.m0c2, s.energy)?;
    Ok(effective_dim(&SpectrumWeights::from_params(p)))
}

/// Step approximation used inside the loop integral: 4 below the Planck
/// energy, 1 at or above it.
pub fn q_jump(energy_gev: f64, c: &PhysicalConstants) -> Result<f64> {
    if !(energy_gev > 0.0) {
        return Err(NesError::Domain(format!("energy {energy_gev} must be > 0")));
    }
    Ok(if energy_gev < c.planck_energy_gev { 4.0 } else { 1.0 })
}

/// `Ω^{1/M}` for the multinomial `Ω = M!/(q₁!⋯q_L!)`, evaluated exactly in
/// log space. Tends to `exp(−Σ (q_k/M) ln(q_k/M))` as `M` grows.
pub fn multinomial_entropy_oracle(occupations: &[u64]) -> Result<f64> {
    if occupations.is_empty() || occupations.contains(&0) {
        return Err(NesError::Domain("occupations must be non-empty and >= 1".into()));
    }
    let total: u64 = occupations.iter().sum();
    let ln_omega = ln_factorial(total) - occupations.iter().map(|&q| ln_factorial(q)).sum::<f64>();
    Ok((ln_omega / total as f64).exp())
}

/// Integer occupations summing to `total` that approximate `proportions`
/// (largest-remainder rounding).
pub fn counts_from_proportions(proportions: &[f64], total: u64) -> Vec<u64> {
    let scaled: Vec<f64> = proportions.iter().map(|p| p * total as f64).collect();
    let mut counts: Vec<u64> = scaled.iter().map(|s| s.floor() as u64).collect();
    let mut missing = total.saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..scaled.len()).collect();
    order.sort_by(|&a, &b| (scaled[b] - scaled[b].floor()).total_cmp(&(scaled[a] - scaled[a].floor())));
    for i in order.into_iter().cycle() {
        if missing == 0 {
            break;
        }
        counts[i] += 1;
        missing -= 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Panel {
    /// `σ⁰ < 1`.
    Left,
    /// `σ̂⁰ > 1`.
    Right,
}

impl Panel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Panel::Left => "left",
            Panel::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Figure2Row {
    pub panel: Panel,
    pub sigma: f64,
    pub rho: f64,
    pub lambda: f64,
}

/// Closest approach to the light cone on either panel.
pub const FIGURE2_EDGE: f64 = 1e-6;

/// Metric parameters against the velocity ratio on both sides of the light
/// cone: `σ⁰ ∈ [0, 1 − 10⁻⁶]` and `σ̂⁰ ∈ [1 + 10⁻⁶, sigma_max]`, `n_points`
/// each. The reference ratios `1/3` and `3`, both mapping to
/// `(ρ, λ) = (0.6, 0.8)`, are merged into the grids.
pub fn figure2_data(n_points: usize, sigma_max: f64) -> Result<Vec<Figure2Row>> {
    if n_points < 2 {
        return Err(NesError::Domain(format!("need at least 2 points, got {n_points}")));
    }
    let right_lo = 1.0 + FIGURE2_EDGE;
    if !(sigma_max > right_lo) || !sigma_max.is_finite() {
        return Err(NesError::Domain(format!(
            "sigma_max = {sigma_max} must exceed {right_lo}"
        )));
    }
    let left = merged_grid(0.0, 1.0 - FIGURE2_EDGE, n_points, 1.0 / 3.0);
    let right = merged_grid(right_lo, sigma_max, n_points, 3.0);

    let mut rows = Vec::with_capacity(left.len() + right.len());
    for (panel, grid) in [(Panel::Left, left), (Panel::Right, right)] {
        for sigma in grid {
            let p = rho_from_sigma(sigma)?;
            rows.push(Figure2Row {
                panel,
                sigma,
                rho: p.rho,
                lambda: p.lam,
            });
        }
    }
    Ok(rows)
}

fn merged_grid(lo: f64, hi: f64, n: usize, anchor: f64) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect();
    if anchor > lo && anchor < hi {
        grid.push(anchor);
        grid.sort_by(f64::total_cmp);
        // an anchor coinciding with a grid point must not create a flat step
        grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Figure3Row {
    pub mass_gev: f64,
    /// `E/E_p`.
    pub energy_ratio: f64,
    pub q: f64,
    /// `E/E_p` fell below the rest energy; the row is evaluated at rest.
    pub clamped: bool,
}

/// `q` at `E = ratio·E_p` for rest energy `m0c2`. Energies below the rest
/// energy are not reachable and are evaluated at rest (`q = 4`), flagged by
/// the returned boolean.
pub fn q_at_planck_ratio(m0c2: f64, ratio: f64, c: &PhysicalConstants) -> Result<(f64, bool)> {
    let energy = ratio * c.planck_energy_gev;
    let clamped = energy < m0c2;
    let state = EnergyState::new(m0c2, if clamped { m0c2 } else { energy })?;
    Ok((q_of_energy(&state)?, clamped))
}

/// Smooth `q(E)` per rest mass on a log-uniform grid of `E/E_p` over
/// `[lo, hi]` (endpoints included exactly).
pub fn figure3_data(
    masses_gev: &[f64],
    n_points: usize,
    ratio_range: (f64, f64),
    c: &PhysicalConstants,
) -> Result<Vec<Figure3Row>> {
    let (lo, hi) = ratio_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(NesError::Domain(format!("invalid ratio range ({lo}, {hi})")));
    }
    if n_points < 2 {
        return Err(NesError::Domain(format!("need at least 2 points, got {n_points}")));
    }
    if let Some(m) = masses_gev.iter().find(|m| !(**m > 0.0)) {
        return Err(NesError::Domain(format!("mass {m} must be > 0")));
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    let step = (lhi - llo) / (n_points - 1) as f64;
    let grid: Vec<f64> = (0..n_points)
        .map(|i| match i {
            0 => lo,
            i if i == n_points - 1 => hi,
            i => 10f64.powf(llo + step * i as f64),
        })
        .collect();

    let mut rows = Vec::with_capacity(masses_gev.len() * n_points);
    for &m in masses_gev {
        for &ratio in &grid {
            let (q, clamped) = q_at_planck_ratio(m, ratio, c)?;
            rows.push(Figure3Row {
                mass_gev: m,
                energy_ratio: ratio,
                q,
                clamped,
            });
        }
    }
    Ok(rows)
}
