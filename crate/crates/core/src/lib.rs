//! Radiation pressure on dielectric microspheres, whispering-gallery-mode
//! line finding and Doppler cooling of the sphere's centre-of-mass motion.
//!
//! All quantities are SI. Frequencies are angular (rad/s) unless a name says
//! otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod doppler;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod gas;
pub mod mie;
pub mod toy;
pub mod wgm;

pub use doppler::{BeamSign, CoolingLimits, CoolingParams, DampingResult, Regime};
pub use dynamics::{Beam, SimConfig, Trajectory, TrajectoryMetadata, TrapConfig, TrapKind};
pub use error::{Error, Result};
pub use fit::LorentzianFit;
pub use gas::{DragRegime, GasDrag, GasEnvironment};
pub use mie::{Efficiencies, MieSeries, ModeKind, RefractiveIndex, SizeParameter, Sphere};
pub use toy::{RingCavity, ToyModel};
pub use wgm::{ResonanceLine, ResonanceSearch, SpectrumSample, WidthSource};
