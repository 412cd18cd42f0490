//! Two cavity toy models with opposite force lineshapes.
//!
//! A lossless Fabry-Perot cavity transmits everything on resonance, so the
//! radiation force drops to zero there. A ring cavity fed through two side
//! mirrors reflects least on resonance, so its force peaks there like the
//! force on an atom.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{ensure_non_negative, Error, Result};

fn ensure_reflectivity(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("amplitude reflectivity must lie in (0, 1), got {r}")));
    }
    Ok(())
}

/// Transmitted and reflected power of a lossless two-mirror cavity with
/// amplitude reflectivity `r` and single-pass phase `kL`.
pub fn fabry_perot_powers(p_incident: f64, r: f64, phase: f64) -> Result<(f64, f64)> {
    ensure_reflectivity(r)?;
    ensure_non_negative("incident power", p_incident)?;
    let r2 = r * r;
    let den = (Complex64::new(1.0, 0.0) - r2 * Complex64::from_polar(1.0, 2.0 * phase)).norm_sqr();
    let transmitted = p_incident * (1.0 - r2).powi(2) / den;
    Ok((p_incident - transmitted, transmitted))
}

/// `F = (P_i - P_r - P_t) / c` with the reflected beam counted backwards.
pub fn fabry_perot_force(p_incident: f64, r: f64, phase: f64) -> Result<f64> {
    let (reflected, transmitted) = fabry_perot_powers(p_incident, r, phase)?;
    Ok((p_incident + reflected - transmitted) / SPEED_OF_LIGHT)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingCavity {
    n_mirrors: u32,
    r: f64,
    phase: f64,
}

impl RingCavity {
    pub fn new(n_mirrors: u32, r: f64, phase: f64) -> Result<Self> {
        if n_mirrors < 3 {
            return Err(Error::Domain(format!("a ring needs at least 3 mirrors, got {n_mirrors}")));
        }
        ensure_reflectivity(r)?;
        if !phase.is_finite() {
            return Err(Error::Domain(format!("round-trip phase must be finite, got {phase}")));
        }
        Ok(Self { n_mirrors, r, phase })
    }

    pub fn with_phase(self, phase: f64) -> Result<Self> {
        Self::new(self.n_mirrors, self.r, phase)
    }

    pub fn n_mirrors(&self) -> u32 {
        self.n_mirrors
    }

    pub fn reflectivity(&self) -> f64 {
        self.r
    }

    /// Amplitude transmissivity `sqrt(1 - r^2)`.
    pub fn transmissivity(&self) -> f64 {
        (1.0 - self.r * self.r).sqrt()
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Unit vectors of the incident and reflected ray at the right-hand side
    /// mirror, whose outward normal is `+x`. The ray meets the mirror at the
    /// ring's angle of incidence `pi/2 - pi/n`.
    pub fn ray_directions(&self) -> ([f64; 2], [f64; 2]) {
        let (s, c) = (PI / self.n_mirrors as f64).sin_cos();
        ([-s, c], [s, c])
    }
}

/// Field reflection of a ring whose coupling mirror and `n - 1` other mirrors
/// all have amplitude reflectivity `r`.
fn ring_reflection(n: u32, r: f64, phase: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, -phase);
    let a = r.powi(n as i32 - 1);
    r - (a - a * r * r) * e / (1.0 - r * a * e)
}

/// Reflected power per coupled ray.
pub fn ring_reflected_power(cavity: &RingCavity, p_incident: f64) -> Result<f64> {
    ensure_non_negative("incident power", p_incident)?;
    Ok(p_incident * ring_reflection(cavity.n_mirrors, cavity.r, cavity.phase).norm_sqr())
}

/// Force vector `(P_i d_i - P_r d_r) / c` from the ray on the side mirror at
/// `side = +1` (right) or `-1` (left).
pub fn ring_ray_force(cavity: &RingCavity, p_incident: f64, side: f64) -> Result<[f64; 2]> {
    let reflected = ring_reflected_power(cavity, p_incident)?;
    let (di, dr) = cavity.ray_directions();
    Ok([
        side * (p_incident * di[0] - reflected * dr[0]) / SPEED_OF_LIGHT,
        (p_incident * di[1] - reflected * dr[1]) / SPEED_OF_LIGHT,
    ])
}

/// `y` force from two equal rays coupled at mirror-image side mirrors.
pub fn ring_force_y(cavity: &RingCavity, p_incident: f64) -> Result<f64> {
    let right = ring_ray_force(cavity, p_incident, 1.0)?;
    let left = ring_ray_force(cavity, p_incident, -1.0)?;
    Ok(right[1] + left[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToyModel {
    FabryPerot { r: f64 },
    Ring { n_mirrors: u32, r: f64 },
}

impl ToyModel {
    pub fn force(&self, p_incident: f64, phase: f64) -> Result<f64> {
        match *self {
            ToyModel::FabryPerot { r } => fabry_perot_force(p_incident, r, phase),
            ToyModel::Ring { n_mirrors, r } => ring_force_y(&RingCavity::new(n_mirrors, r, phase)?, p_incident),
        }
    }
}

/// `points` phases evenly covering `[start, start + 2 pi)`.
pub fn phase_grid(start: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| start + 2.0 * PI * i as f64 / points as f64).collect()
}

/// `(phase, force)` pairs over the given phases.
pub fn sweep(model: ToyModel, p_incident: f64, phases: &[f64]) -> Result<Vec<(f64, f64)>> {
    phases.iter().map(|&p| Ok((p, model.force(p_incident, p)?))).collect()
}
