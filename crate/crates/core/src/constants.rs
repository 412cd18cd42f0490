//! Physical constants (CODATA 2018 exact/recommended values) and unit conversions.

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Molar gas constant, J/(mol·K).
pub const GAS_CONSTANT: f64 = 8.314_462_618;

/// Pascals per Torr.
pub const PA_PER_TORR: f64 = 133.322;

pub fn torr_to_pa(torr: f64) -> f64 {
    torr * PA_PER_TORR
}

pub fn pa_to_torr(pa: f64) -> f64 {
    pa / PA_PER_TORR
}

/// Ordinary frequency in Hz to angular frequency in rad/s.
pub fn hz_to_rad_s(hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * hz
}

pub fn rad_s_to_hz(omega: f64) -> f64 {
    omega / (2.0 * std::f64::consts::PI)
}
