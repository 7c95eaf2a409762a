//! The regularized coincident-point Green's function `D(0)` and the
//! first-order mass correction derived from it.
//!
//! With the effective dimension jumping from 4 to 1 at the Planck energy,
//! the scaled loop integral splits at `k* = E_p/m₀c²`:
//!
//! ```text
//! D(0) = 1/(8π²) ∫_0^{k*} k³ dk/(k² − 1 + iε) + 1/π ∫_{k*}^∞ dk/(k² − 1 + iε)
//! ```
//!
//! Two evaluations are provided and always labeled:
//!
//! * [`EvalMode::Paper`] is the reference closed form
//!   `(k*² + ln(k*² − 1) − iπ)/(16π²) + (arctan k* + iπ/2)/π`.
//! * [`EvalMode::Plemelj`] takes `ε → 0⁺` through Sokhotski–Plemelj: a
//!   principal value by adaptive quadrature plus `−iπ·k₀³/|2k₀|` at the pole
//!   `k₀ = 1` for the first segment, and the pole-free tail
//!   `ln((k* + 1)/(k* − 1))/(2π)` for the second.
//!
//! The two differ in the constant and imaginary parts; they share the
//! dominant `k*²/(16π²)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quadrature::{principal_value, Tolerance, DEFAULT_MAX_INTERVALS};
use crate::{NesError, PhysicalConstants, Result};

pub type ComplexScalar = Complex64;

/// Relative tolerance used when the caller does not pick one.
pub const DEFAULT_QUADRATURE_TOLERANCE: f64 = 1e-12;

/// `w·ħ·|D(0)|/2` at or above this is outside the weak-coupling regime and
/// triggers a warning.
pub const WEAK_COUPLING_WARN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Reference closed form.
    Paper,
    /// Principal value plus pole term.
    Plemelj,
}

impl EvalMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvalMode::Paper => "paper",
            EvalMode::Plemelj => "plemelj",
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvalMode {
    type Err = NesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper_closed_form" => Ok(EvalMode::Paper),
            "plemelj" | "plemelj_quadrature" => Ok(EvalMode::Plemelj),
            other => Err(NesError::Domain(format!("unknown evaluation mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopResult {
    pub d0: ComplexScalar,
    pub kstar: f64,
    pub mode: EvalMode,
    /// `∫_0^{k*}` contribution.
    pub segment1: ComplexScalar,
    /// `∫_{k*}^∞` contribution.
    pub segment2: ComplexScalar,
    /// Absolute error estimate of the quadrature (Plemelj mode only).
    pub quadrature_error: Option<f64>,
}

/// `k* = E_p/m₀c²`.
pub fn kstar(m0c2_gev: f64, c: &PhysicalConstants) -> Result<f64> {
    if !(m0c2_gev > 0.0) || !m0c2_gev.is_finite() {
        return Err(NesError::Domain(format!("rest energy {m0c2_gev} must be > 0")));
    }
    Ok(c.planck_energy_gev / m0c2_gev)
}

/// `Γ(n/2)` for a positive integer `n`, from `Γ(1) = 1`, `Γ(1/2) = √π` and
/// `Γ(x + 1) = xΓ(x)`.
fn gamma_half_integer(n: u32) -> f64 {
    let (mut x, mut g) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = n as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Angular prefactor `2/[(4π)^{q/2} Γ(q/2)]` of a radial integral in `q`
/// dimensions.
pub fn surface_factor(q: f64) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(NesError::Domain(format!("dimension q = {q} must be > 0")));
    }
    let gamma = if q.fract() == 0.0 && q <= 340.0 {
        gamma_half_integer(q as u32)
    } else {
        statrs::function::gamma::gamma(q / 2.0)
    };
    Ok(2.0 / ((4.0 * PI).powf(q / 2.0) * gamma))
}

fn check_kstar(kstar: f64) -> Result<()> {
    if !(kstar > 1.0) || !kstar.is_finite() {
        return Err(NesError::Domain(format!(
            "k* = {kstar} must exceed 1 (log argument k*^2 - 1 > 0)"
        )));
    }
    Ok(())
}

/// The reference closed form, term by term.
pub fn dzero_paper_closed_form(kstar: f64) -> Result<LoopResult> {
    check_kstar(kstar)?;
    let k2 = kstar * kstar;
    let segment1 = Complex64::new(k2 + (k2 - 1.0).ln(), -PI) / (16.0 * PI * PI);
    let segment2 = Complex64::new(kstar.atan(), PI / 2.0) / PI;
    Ok(LoopResult {
        d0: segment1 + segment2,
        kstar,
        mode: EvalMode::Paper,
        segment1,
        segment2,
        quadrature_error: None,
    })
}

/// Analytic principal value `PV ∫_0^{k*} k³/(k² − 1) dk = k*²/2 + ½ ln(k*² − 1)`.
pub fn pv_first_segment_analytic(kstar: f64) -> Result<f64> {
    check_kstar(kstar)?;
    Ok(0.5 * kstar * kstar + 0.5 * (kstar * kstar - 1.0).ln())
}

/// `(1/π) ∫_{k*}^∞ dk/(k² − 1) = ln((k* + 1)/(k* − 1))/(2π)`; no pole lies
/// in the range so `ε` drops out.
pub fn tail_segment_analytic(kstar: f64) -> Result<f64> {
    check_kstar(kstar)?;
    Ok((2.0 / (kstar - 1.0)).ln_1p() / (2.0 * PI))
}

/// Sokhotski–Plemelj evaluation. `tolerance` is relative, applied to the
/// principal-value quadrature.
pub fn dzero_quadrature(kstar: f64, tolerance: f64) -> Result<LoopResult> {
    check_kstar(kstar)?;
    if !(tolerance > 0.0) {
        return Err(NesError::Domain(format!("tolerance {tolerance} must be > 0")));
    }
    // k³/(k² − 1) = h(k)/(k − 1) with h(k) = k³/(k + 1)
    let h = |k: f64| k * k * k / (k + 1.0);
    let pv = principal_value(
        h,
        1.0,
        0.0,
        kstar,
        Tolerance { rel: tolerance, abs: 0.0 },
        DEFAULT_MAX_INTERVALS,
    )?;
    // residue term −iπ f(k₀)/|g′(k₀)| with f = k³, g = k² − 1, k₀ = 1
    let pole = -PI * 1.0 / 2.0;
    let scale = 8.0 * PI * PI;
    let segment1 = Complex64::new(pv.value, pole) / scale;
    let segment2 = Complex64::new(tail_segment_analytic(kstar)?, 0.0);
    Ok(LoopResult {
        d0: segment1 + segment2,
        kstar,
        mode: EvalMode::Plemelj,
        segment1,
        segment2,
        quadrature_error: Some(pv.error / scale),
    })
}

/// `D(0)` in the requested mode with the default quadrature tolerance.
pub fn dzero(kstar: f64, mode: EvalMode) -> Result<LoopResult> {
    match mode {
        EvalMode::Paper => dzero_paper_closed_form(kstar),
        EvalMode::Plemelj => dzero_quadrature(kstar, DEFAULT_QUADRATURE_TOLERANCE),
    }
}

/// First-order dressed propagator in scaled momentum,
/// `1/(q² − [1 + wħ Re D(0)/2] + i[ε − wħ Im D(0)/2])` with `ε → 0⁺`.
pub fn dressed_propagator(
    q2: f64,
    coupling: f64,
    d0: ComplexScalar,
    c: &PhysicalConstants,
) -> Result<ComplexScalar> {
    let half = coupling * c.hbar_js / 2.0;
    let strength = half * d0.norm();
    if strength >= WEAK_COUPLING_WARN {
        log::warn!("w*hbar*|D(0)|/2 = {strength} is not small; first-order result unreliable");
    }
    let denom = Complex64::new(q2 - (1.0 + half * d0.re), -half * d0.im);
    if denom == Complex64::new(0.0, 0.0) {
        return Err(NesError::Pole(q2));
    }
    Ok(denom.inv())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassCorrection {
    pub m0c2_gev: f64,
    /// `w` in 1/(J·s).
    pub coupling: f64,
    pub mode: EvalMode,
    pub kstar: f64,
    pub d0: ComplexScalar,
    /// `Θ = ħ Re D(0)/2` in J·s.
    pub theta_js: f64,
    /// Scaled corrected mass `μ* = √(1 + wΘ)`.
    pub mu_star: f64,
    /// Lifetime in seconds; `None` when no finite decay width exists (zero
    /// coupling or non-positive `Im D(0)`).
    pub tau_l_s: Option<f64>,
}

/// Scaled lifetime `τ_L* = √(2/(wħ Im D(0)))`.
pub fn scaled_lifetime(coupling: f64, im_d0: f64, c: &PhysicalConstants) -> Option<f64> {
    let width = coupling * c.hbar_js * im_d0;
    (width > 0.0).then(|| (2.0 / width).sqrt())
}

/// Mass correction, `Θ`, and lifetime `τ_L = (ħ/m₀c²)·τ_L*`.
pub fn mass_correction(
    m0c2_gev: f64,
    coupling: f64,
    mode: EvalMode,
    c: &PhysicalConstants,
) -> Result<MassCorrection> {
    if !(coupling >= 0.0) || !coupling.is_finite() {
        return Err(NesError::Domain(format!("coupling {coupling} must be >= 0")));
    }
    let k = kstar(m0c2_gev, c)?;
    let loop_result = dzero(k, mode)?;
    let theta = c.hbar_js * loop_result.d0.re / 2.0;
    let w_theta = coupling * theta;
    if w_theta >= 1.0 {
        return Err(NesError::WeakCoupling(w_theta));
    }
    if w_theta >= WEAK_COUPLING_WARN {
        log::warn!("w*theta = {w_theta}: coupling is not small against 1/theta");
    }
    let tau_l_s = scaled_lifetime(coupling, loop_result.d0.im, c)
        .map(|scaled| c.hbar_js / (m0c2_gev * c.gev_to_joule) * scaled);
    Ok(MassCorrection {
        m0c2_gev,
        coupling,
        mode,
        kstar: k,
        d0: loop_result.d0,
        theta_js: theta,
        mu_star: (1.0 + w_theta).sqrt(),
        tau_l_s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub m0c2_gev: f64,
    pub kstar: f64,
    pub theta_js: f64,
    pub theta_inv_per_js: f64,
}

/// `Θ` and `Θ⁻¹` per rest energy, closed-form mode.
pub fn theta_table(masses_gev: &[f64], c: &PhysicalConstants) -> Result<Vec<ThetaRow>> {
    masses_gev
        .iter()
        .map(|&m| {
            let k = kstar(m, c)?;
            let theta = c.hbar_js * dzero_paper_closed_form(k)?.d0.re / 2.0;
            Ok(ThetaRow {
                m0c2_gev: m,
                kstar: k,
                theta_js: theta,
                theta_inv_per_js: theta.recip(),
            })
        })
        .collect()
}
