//! Physical constants shared by the whole workspace.  Frequencies cross public
//! boundaries as photon energies in eV and are converted to rad/s exactly once
//! via [`HBAR_EVS`].

/// Reduced Planck constant, eV·s.
pub const HBAR_EVS: f64 = 6.582119569e-16;
/// Reduced Planck constant, J·s (SI, exact).
pub const HBAR_SI: f64 = 1.054571817e-34;
/// `hbar * c`, eV·m.
pub const HBAR_C_EVM: f64 = 197.3269804e-9;
/// Speed of light in vacuum, m/s (exact).
pub const C_LIGHT: f64 = 299792458.0;
/// Boltzmann constant, eV/K (exact).
pub const KB_EV: f64 = 8.617333262e-5;
/// Boltzmann constant, J/K (SI, exact).
pub const KB_SI: f64 = 1.380649e-23;
/// Vacuum permittivity, F/m.
pub const EPS0_SI: f64 = 8.8541878128e-12;
/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// Stefan–Boltzmann constant `pi^2 kB^4 / (60 hbar^3 c^2)`, W·m⁻²·K⁻⁴.
pub fn sigma_sb() -> f64 {
    let pi = std::f64::consts::PI;
    pi * pi * KB_SI.powi(4) / (60.0 * HBAR_SI.powi(3) * C_LIGHT * C_LIGHT)
}

/// Angular frequency (rad/s) for a photon energy in eV.
pub fn omega_rad_per_s(omega_ev: f64) -> f64 {
    omega_ev / HBAR_EVS
}

/// Vacuum wavelength (m) for a photon energy in eV.
pub fn wavelength_m(omega_ev: f64) -> f64 {
    2.0 * std::f64::consts::PI * HBAR_C_EVM / omega_ev
}

/// Bose–Einstein occupation `1/(exp(E/kB T) - 1)` for a photon energy in eV;
/// 0 for non-positive temperature or when the exponent would overflow.
pub fn bose_occupation(omega_ev: f64, t_kelvin: f64) -> f64 {
    if t_kelvin <= 0.0 {
        return 0.0;
    }
    let x = omega_ev / (KB_EV * t_kelvin);
    if x > 700.0 {
        return 0.0;
    }
    1.0 / x.exp_m1()
}
