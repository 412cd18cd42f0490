//! Doppler force model near a narrow WGM line.
//!
//! Near resonance the force from one beam is a Lorentzian in the detuning
//! `Delta = omega_laser - omega_0` on top of a constant background:
//! `F = P0/c + (Pp/c) delta^2 / ((Delta - s k v)^2 + delta^2)` for a beam
//! travelling along `s = +-1`. A sphere moving into the beam sees the light
//! blue shifted. Red detuning (`Delta < 0`) therefore damps the motion, and
//! every damping coefficient here is signed so that `beta > 0` means damping.

use std::f64::consts::PI;

use crate::constants::{BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Error, Result};

/// Propagation direction of a beam along the cooling axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeamSign {
    Plus,
    Minus,
}

impl BeamSign {
    pub fn value(self) -> f64 {
        match self {
            BeamSign::Plus => 1.0,
            BeamSign::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            BeamSign::Plus => BeamSign::Minus,
            BeamSign::Minus => BeamSign::Plus,
        }
    }
}

/// Parameters of the Lorentzian force model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingParams {
    p_background: f64,
    p_peak: f64,
    delta: f64,
    detuning: f64,
    wavenumber: f64,
    omega: f64,
}

impl CoolingParams {
    /// `p_background`, `p_peak` in W; `delta` (HWHM) and `detuning` in rad/s;
    /// `wavelength` in m. The optical frequency is `c k`.
    pub fn new(p_background: f64, p_peak: f64, delta: f64, detuning: f64, wavelength: f64) -> Result<Self> {
        ensure_positive("wavelength", wavelength)?;
        let wavenumber = 2.0 * PI / wavelength;
        Self::from_parts(p_background, p_peak, delta, detuning, wavenumber, SPEED_OF_LIGHT * wavenumber)
    }

    pub fn from_parts(
        p_background: f64,
        p_peak: f64,
        delta: f64,
        detuning: f64,
        wavenumber: f64,
        omega: f64,
    ) -> Result<Self> {
        ensure_non_negative("background power", p_background)?;
        ensure_non_negative("peak power", p_peak)?;
        ensure_positive("linewidth delta", delta)?;
        ensure_finite(&[("detuning", detuning)])?;
        ensure_positive("wavenumber", wavenumber)?;
        ensure_positive("optical angular frequency", omega)?;
        Ok(Self {
            p_background,
            p_peak,
            delta,
            detuning,
            wavenumber,
            omega,
        })
    }

    pub fn with_detuning(self, detuning: f64) -> Result<Self> {
        Self::from_parts(
            self.p_background,
            self.p_peak,
            self.delta,
            detuning,
            self.wavenumber,
            self.omega,
        )
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::from_parts(
            self.p_background,
            self.p_peak,
            delta,
            self.detuning,
            self.wavenumber,
            self.omega,
        )
    }

    pub fn p_background(&self) -> f64 {
        self.p_background
    }

    pub fn p_peak(&self) -> f64 {
        self.p_peak
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `delta^2 / (Delta_eff^2 + delta^2)` at an effective detuning.
    fn line_shape(&self, effective_detuning: f64) -> f64 {
        let d2 = self.delta * self.delta;
        d2 / (effective_detuning * effective_detuning + d2)
    }

    /// `k Delta delta^2 / (c (Delta^2 + delta^2)^2)`, the common factor of
    /// every damping coefficient.
    fn slope_factor(&self) -> f64 {
        let d2 = self.delta * self.delta;
        let den = self.detuning * self.detuning + d2;
        self.wavenumber * self.p_peak * self.detuning * d2 / (SPEED_OF_LIGHT * den * den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    MolassesTwoBeam,
    SingleBeam,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::MolassesTwoBeam => "molasses_two_beam",
            Regime::SingleBeam => "single_beam",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingResult {
    /// Damping coefficient, kg/s; the force is `-beta v`.
    pub beta: f64,
    /// Velocity-independent force of one beam, N.
    pub f0_offset: f64,
    pub regime: Regime,
}

/// Force magnitude from one beam on a sphere moving at `v` along the axis.
pub fn lorentzian_force(params: &CoolingParams, v: f64, beam: BeamSign) -> f64 {
    let effective = params.detuning - beam.value() * params.wavenumber * v;
    (params.p_background + params.p_peak * params.line_shape(effective)) / SPEED_OF_LIGHT
}

/// Signed force along the axis from one beam (pushes along its direction).
pub fn beam_force(params: &CoolingParams, v: f64, beam: BeamSign) -> f64 {
    beam.value() * lorentzian_force(params, v, beam)
}

/// Net force of two equal counter-propagating beams.
pub fn molasses_force(params: &CoolingParams, v: f64) -> f64 {
    beam_force(params, v, BeamSign::Plus) + beam_force(params, v, BeamSign::Minus)
}

/// `P0/c + (Pp/c) delta^2 / (Delta^2 + delta^2)`: one beam's force at rest.
pub fn offset_force(params: &CoolingParams) -> f64 {
    lorentzian_force(params, 0.0, BeamSign::Plus)
}

/// Two-beam molasses: `beta = -4 k Pp Delta delta^2 / (c (Delta^2 + delta^2)^2)`.
pub fn molasses_beta(params: &CoolingParams) -> DampingResult {
    DampingResult {
        beta: -4.0 * params.slope_factor(),
        f0_offset: offset_force(params),
        regime: Regime::MolassesTwoBeam,
    }
}

/// Single beam: `beta_t = -2 k Pp Delta delta^2 / (c (Delta^2 + delta^2)^2)`.
pub fn single_beam_beta(params: &CoolingParams) -> DampingResult {
    DampingResult {
        beta: -2.0 * params.slope_factor(),
        f0_offset: offset_force(params),
        regime: Regime::SingleBeam,
    }
}

/// `1/e` velocity damping time `m / beta`.
pub fn cooling_time(mass: f64, beta: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!(
            "cooling time needs a damping coefficient > 0, got {beta}"
        )));
    }
    Ok(mass / beta)
}

/// Photon scattering rate `Pp/(hbar omega) delta^2 / ((Delta + k v)^2 + delta^2)`,
/// with `v` the speed towards the beam source.
pub fn scattering_rate(params: &CoolingParams, v_toward: f64) -> f64 {
    let effective = params.detuning + params.wavenumber * v_toward;
    params.p_peak / (HBAR * params.omega) * params.line_shape(effective)
}

/// Scattering rate from a beam travelling along `beam` for axial velocity `v`.
pub fn beam_scattering_rate(params: &CoolingParams, v: f64, beam: BeamSign) -> f64 {
    scattering_rate(params, -beam.value() * v)
}

/// Momentum diffusion `D = hbar^2 k^2 Gamma_sc`, kg^2 m^2 / s^3.
pub fn recoil_diffusion(wavenumber: f64, gamma_sc: f64) -> Result<f64> {
    ensure_positive("wavenumber", wavenumber)?;
    ensure_non_negative("scattering rate", gamma_sc)?;
    Ok(HBAR * HBAR * wavenumber * wavenumber * gamma_sc)
}

/// Doppler temperature `T = hbar (Delta^2 + delta^2) / (4 k_B |Delta|)`.
///
/// Balances molasses damping against recoil diffusion from both beams; at
/// `|Delta| = delta` this is the minimum `hbar delta / (2 k_B)`.
pub fn doppler_limit(delta: f64, detuning: f64) -> Result<f64> {
    ensure_positive("linewidth delta", delta)?;
    ensure_finite(&[("detuning", detuning)])?;
    if detuning == 0.0 {
        return Err(Error::NoDamping);
    }
    Ok(HBAR * (detuning * detuning + delta * delta) / (4.0 * BOLTZMANN * detuning.abs()))
}

/// First-order expansion of the force about `v = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedForce {
    /// Velocity-independent part, N (zero for balanced molasses).
    pub f0: f64,
    /// Velocity-dependent part `-beta v`, N.
    pub minus_beta_v: f64,
    /// False when `|k v| >= delta / 10`, where the expansion degrades.
    pub in_range: bool,
}

impl LinearizedForce {
    pub fn total(&self) -> f64 {
        self.f0 + self.minus_beta_v
    }
}

/// Linearised force of a single `+` beam or a balanced molasses.
pub fn linearized_force(params: &CoolingParams, v: f64, regime: Regime) -> LinearizedForce {
    let (f0, beta) = match regime {
        Regime::SingleBeam => (offset_force(params), single_beam_beta(params).beta),
        Regime::MolassesTwoBeam => (0.0, molasses_beta(params).beta),
    };
    LinearizedForce {
        f0,
        minus_beta_v: -beta * v,
        in_range: (params.wavenumber * v).abs() < params.delta / 10.0,
    }
}

/// Figures of merit for one cooling configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingLimits {
    pub beta_molasses: f64,
    pub beta_single: f64,
    pub tau_molasses: Option<f64>,
    pub tau_single: Option<f64>,
    /// Scattering rate per beam at rest, 1/s.
    pub gamma_sc: f64,
    /// Diffusion per beam at rest, kg^2 m^2 / s^3.
    pub diffusion: f64,
    pub doppler_temperature: Option<f64>,
    pub f0_offset: f64,
}

pub fn cooling_limits(params: &CoolingParams, mass: f64) -> Result<CoolingLimits> {
    ensure_positive("mass", mass)?;
    let beta_molasses = molasses_beta(params).beta;
    let beta_single = single_beam_beta(params).beta;
    let gamma_sc = scattering_rate(params, 0.0);
    Ok(CoolingLimits {
        beta_molasses,
        beta_single,
        tau_molasses: cooling_time(mass, beta_molasses).ok(),
        tau_single: cooling_time(mass, beta_single).ok(),
        gamma_sc,
        diffusion: recoil_diffusion(params.wavenumber, gamma_sc)?,
        doppler_temperature: doppler_limit(params.delta, params.detuning).ok(),
        f0_offset: offset_force(params),
    })
}
