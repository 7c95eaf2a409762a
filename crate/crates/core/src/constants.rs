use serde::{Deserialize, Serialize};

/// Physical constants at the boundary between the scaled numerics and SI /
/// GeV units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Planck energy in GeV.
    pub planck_energy_gev: f64,
    /// Reduced Planck constant in J·s.
    pub hbar_js: f64,
    /// Joules per GeV.
    pub gev_to_joule: f64,
}

impl PhysicalConstants {
    pub const DEFAULT: PhysicalConstants = PhysicalConstants {
        planck_energy_gev: 1.2e19,
        hbar_js: 1.054_571_817e-34,
        gev_to_joule: 1.602_176_634e-10,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Reference rest energies (GeV) used by the mass tables.
pub mod masses {
    /// Higgs-like scalar whose Planck ratio is `k* = 9.375e16`.
    pub const HIGGS_LIKE_GEV: f64 = 128.0;
    pub const ELECTRON_GEV: f64 = 5.1e-4;
    pub const PROTON_GEV: f64 = 0.94;
    /// The upper Higgs bound quoted alongside the loop integral.
    pub const HIGGS_BOUND_GEV: f64 = 190.0;
}
