//! Gas damping in the viscous and free-molecular regimes.

use std::f64::consts::PI;

use crate::constants::{pa_to_torr, BOLTZMANN, GAS_CONSTANT};
use crate::error::{ensure_non_negative, ensure_positive, Result};

/// Kinetic diameter of an air molecule, m.
pub const AIR_MOLECULE_DIAMETER: f64 = 3.7e-10;
pub const AIR_VISCOSITY: f64 = 1.81e-5;
pub const AIR_MOLAR_MASS: f64 = 0.02897;
pub const ROOM_TEMPERATURE: f64 = 288.0;

/// Above this Knudsen number the Epstein formula is used alone.
pub const KNUDSEN_FREE_MOLECULAR: f64 = 10.0;
/// Below this Knudsen number the Stokes formula is used alone.
pub const KNUDSEN_CONTINUUM: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasEnvironment {
    pressure: f64,
    temperature: f64,
    viscosity: f64,
    molar_mass: f64,
    molecule_diameter: f64,
}

impl GasEnvironment {
    /// Air at 288 K and the given pressure (Pa).
    pub fn air(pressure: f64) -> Result<Self> {
        Self::new(pressure, ROOM_TEMPERATURE, AIR_VISCOSITY, AIR_MOLAR_MASS)
    }

    /// Zero pressure is allowed and gives no free-molecular drag.
    pub fn new(pressure: f64, temperature: f64, viscosity: f64, molar_mass: f64) -> Result<Self> {
        ensure_non_negative("pressure", pressure)?;
        ensure_positive("temperature", temperature)?;
        ensure_non_negative("viscosity", viscosity)?;
        ensure_positive("molar mass", molar_mass)?;
        Ok(Self {
            pressure,
            temperature,
            viscosity,
            molar_mass,
            molecule_diameter: AIR_MOLECULE_DIAMETER,
        })
    }

    pub fn with_pressure(self, pressure: f64) -> Result<Self> {
        ensure_non_negative("pressure", pressure)?;
        Ok(Self { pressure, ..self })
    }

    pub fn with_molecule_diameter(self, diameter: f64) -> Result<Self> {
        ensure_positive("molecule diameter", diameter)?;
        Ok(Self {
            molecule_diameter: diameter,
            ..self
        })
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }

    pub fn pressure_torr(&self) -> f64 {
        pa_to_torr(self.pressure)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }

    pub fn molar_mass(&self) -> f64 {
        self.molar_mass
    }

    pub fn molecule_diameter(&self) -> f64 {
        self.molecule_diameter
    }

    /// Mass density `p M / (R T)`, kg/m^3.
    pub fn density(&self) -> f64 {
        self.pressure * self.molar_mass / (GAS_CONSTANT * self.temperature)
    }

    /// Mean free path `k_B T / (sqrt(2) pi d^2 p)`, infinite in vacuum.
    pub fn mean_free_path(&self) -> f64 {
        let d = self.molecule_diameter;
        BOLTZMANN * self.temperature / (2f64.sqrt() * PI * d * d * self.pressure)
    }
}

/// Stokes drag `6 pi eta a`.
pub fn viscous_drag(env: &GasEnvironment, radius: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    Ok(6.0 * PI * env.viscosity * radius)
}

/// Mean speed `sqrt(8 R T / (pi M))` of the gas molecules.
pub fn mean_thermal_speed(temperature: f64, molar_mass: f64) -> Result<f64> {
    ensure_non_negative("temperature", temperature)?;
    ensure_positive("molar mass", molar_mass)?;
    Ok((8.0 * GAS_CONSTANT * temperature / (PI * molar_mass)).sqrt())
}

fn epstein_prefactor(env: &GasEnvironment, radius: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    let speed = mean_thermal_speed(env.temperature, env.molar_mass)?;
    let rho_per_pa = env.molar_mass / (GAS_CONSTANT * env.temperature);
    Ok((4.0 / 3.0 + 3.0 * PI / 16.0) * PI * rho_per_pa * speed * radius * radius)
}

/// Free-molecular drag `(4/3 + 3 pi/16) pi rho <v> a^2`.
pub fn epstein_drag(env: &GasEnvironment, radius: f64) -> Result<f64> {
    Ok(epstein_prefactor(env, radius)? * env.pressure)
}

/// Pressure (Pa) at which the Epstein drag equals `beta_target`.
pub fn crossover_pressure(beta_target: f64, env: &GasEnvironment, radius: f64) -> Result<f64> {
    ensure_positive("target damping", beta_target)?;
    Ok(beta_target / epstein_prefactor(env, radius)?)
}

pub fn knudsen_number(env: &GasEnvironment, radius: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    Ok(env.mean_free_path() / radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DragRegime {
    Viscous,
    FreeMolecular,
    /// Transition band, where the smaller coefficient is used.
    Transition,
}

impl DragRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            DragRegime::Viscous => "viscous",
            DragRegime::FreeMolecular => "free_molecular",
            DragRegime::Transition => "transition",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasDrag {
    pub viscous: f64,
    pub epstein: f64,
    pub knudsen: f64,
    pub regime: DragRegime,
    /// Coefficient used for the selected regime, kg/s.
    pub selected: f64,
}

/// Both drag coefficients plus the regime picked from the Knudsen number.
pub fn gas_drag(env: &GasEnvironment, radius: f64) -> Result<GasDrag> {
    let viscous = viscous_drag(env, radius)?;
    let epstein = epstein_drag(env, radius)?;
    let knudsen = knudsen_number(env, radius)?;
    let (regime, selected) = if knudsen > KNUDSEN_FREE_MOLECULAR {
        (DragRegime::FreeMolecular, epstein)
    } else if knudsen < KNUDSEN_CONTINUUM {
        (DragRegime::Viscous, viscous)
    } else {
        (DragRegime::Transition, viscous.min(epstein))
    };
    Ok(GasDrag {
        viscous,
        epstein,
        knudsen,
        regime,
        selected,
    })
}
