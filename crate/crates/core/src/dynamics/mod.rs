//! Stochastic 1-D centre-of-mass dynamics.
//!
//! `m x'' = -kappa x - Gamma x' + F_opt(x') + F_f(t)`, where `F_opt` is the
//! full Lorentzian force of each cooling beam (including its constant part)
//! and `F_f` collects thermal gas noise and photon-recoil kicks.
//!
//! Each step is a kick / drift / damp / drift / kick splitting. The linear
//! drag and its thermal noise are integrated exactly as an Ornstein-Uhlenbeck
//! process in the middle of the step, recoil kicks follow it, and the
//! position-dependent trap force plus the nonlinear optical force enter the
//! two half kicks.

mod analysis;

pub use analysis::{
    energies, estimate_temperature, fit_energy_decay, fit_energy_decay_window, oscillation_frequency, temperature_estimate,
    TemperatureEstimate, DEFAULT_TEMPERATURE_BLOCKS, MIN_WINDOW_PERIODS,
};

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::constants::BOLTZMANN;
use crate::doppler::{beam_force, beam_scattering_rate, offset_force, recoil_diffusion, single_beam_beta, BeamSign, CoolingParams};
use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Error, Result};
use crate::gas::{gas_drag, GasEnvironment};

/// Relative mismatch above which an over-specified trap is flagged.
pub const TRAP_CONSISTENCY_TOLERANCE: f64 = 1e-6;
/// The timestep must resolve the fastest time scale by this factor.
pub const STEPS_PER_TIMESCALE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrapKind {
    OpticalTrap,
    Cantilever,
}

impl TrapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TrapKind::OpticalTrap => "optical_trap",
            TrapKind::Cantilever => "cantilever",
        }
    }
}

impl std::str::FromStr for TrapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optical_trap" => Ok(TrapKind::OpticalTrap),
            "cantilever" => Ok(TrapKind::Cantilever),
            other => Err(Error::Domain(format!(
                "unknown trap kind '{other}' (expected optical_trap or cantilever)"
            ))),
        }
    }
}

/// Harmonic confinement. Any two of stiffness, mass and frequency fix the third.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    kind: TrapKind,
    spring_constant: f64,
    mass: f64,
    omega0: f64,
    /// Relative mismatch of a supplied frequency against `sqrt(kappa/m)`.
    inconsistency: Option<f64>,
}

impl TrapConfig {
    /// When all three are given, `kappa` and `mass` win and the supplied
    /// frequency is only checked.
    pub fn new(kind: TrapKind, spring_constant: Option<f64>, mass: Option<f64>, omega0: Option<f64>) -> Result<Self> {
        for (name, v) in [("spring constant", spring_constant), ("mass", mass), ("trap frequency", omega0)] {
            if let Some(v) = v {
                ensure_positive(name, v)?;
            }
        }
        let (spring_constant, mass, omega0, inconsistency) = match (spring_constant, mass, omega0) {
            (Some(k), Some(m), w) => {
                let derived = (k / m).sqrt();
                let mismatch = w.map(|w| (w - derived).abs() / derived).filter(|&r| r > TRAP_CONSISTENCY_TOLERANCE);
                (k, m, derived, mismatch)
            }
            (Some(k), None, Some(w)) => (k, k / (w * w), w, None),
            (None, Some(m), Some(w)) => (m * w * w, m, w, None),
            _ => {
                return Err(Error::Domain(
                    "trap needs two of spring constant, mass and trap frequency".into(),
                ))
            }
        };
        Ok(Self {
            kind,
            spring_constant,
            mass,
            omega0,
            inconsistency,
        })
    }

    pub fn from_stiffness_and_mass(kind: TrapKind, spring_constant: f64, mass: f64) -> Result<Self> {
        Self::new(kind, Some(spring_constant), Some(mass), None)
    }

    /// Cantilever with `k = 77 N/m` and effective mass `2e-12 kg`.
    pub fn cantilever() -> Self {
        Self::from_stiffness_and_mass(TrapKind::Cantilever, 77.0, 2e-12).expect("valid constants")
    }

    pub fn kind(&self) -> TrapKind {
        self.kind
    }

    pub fn spring_constant(&self) -> f64 {
        self.spring_constant
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega0
    }

    pub fn inconsistency(&self) -> Option<f64> {
        self.inconsistency
    }

    pub fn warning(&self) -> Option<String> {
        self.inconsistency.map(|r| {
            format!(
                "trap over-specified: supplied frequency differs from sqrt(kappa/m) = {:.6e} rad/s by {:.3}%; using the derived value",
                self.omega0,
                100.0 * r
            )
        })
    }
}

/// One cooling beam along the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beam {
    pub params: CoolingParams,
    pub sign: BeamSign,
}

/// Damping contributions, kg/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingBudget {
    pub gas: f64,
    pub extra: f64,
    /// Linearised optical damping summed over beams (negative means heating).
    pub optical: f64,
}

impl DampingBudget {
    pub fn total(&self) -> f64 {
        self.gas + self.extra + self.optical
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub trap: TrapConfig,
    /// Sphere radius, m; only used for gas drag.
    pub sphere_radius: f64,
    pub gas: Option<GasEnvironment>,
    /// Draw the Langevin force of the gas (drag is applied either way).
    pub thermal_noise: bool,
    /// Additional noiseless linear damping, kg/s.
    pub extra_damping: f64,
    pub beams: Vec<Beam>,
    pub recoil_noise: bool,
    pub initial_position: f64,
    pub initial_velocity: f64,
    pub duration: f64,
    pub timestep: f64,
    pub seed: u64,
    pub record_stride: usize,
}

impl SimConfig {
    /// No gas, no beams, sphere at rest at the origin, radius 10 um.
    pub fn new(trap: TrapConfig, duration: f64, timestep: f64) -> Self {
        Self {
            trap,
            sphere_radius: 10e-6,
            gas: None,
            thermal_noise: true,
            extra_damping: 0.0,
            beams: Vec::new(),
            recoil_noise: true,
            initial_position: 0.0,
            initial_velocity: 0.0,
            duration,
            timestep,
            seed: 0,
            record_stride: 1,
        }
    }

    /// Two counter-propagating beams sharing `params`.
    pub fn with_molasses(mut self, params: CoolingParams) -> Self {
        self.beams = vec![
            Beam { params, sign: BeamSign::Plus },
            Beam { params, sign: BeamSign::Minus },
        ];
        self
    }

    pub fn damping(&self) -> Result<DampingBudget> {
        let gas = match &self.gas {
            Some(env) => gas_drag(env, self.sphere_radius)?.selected,
            None => 0.0,
        };
        let optical = self.beams.iter().map(|b| single_beam_beta(&b.params).beta).sum();
        Ok(DampingBudget {
            gas,
            extra: self.extra_damping,
            optical,
        })
    }

    /// Net velocity-independent optical force, N.
    pub fn offset_force(&self) -> f64 {
        self.beams.iter().map(|b| b.sign.value() * offset_force(&b.params)).sum()
    }

    pub fn equilibrium_position(&self) -> f64 {
        self.offset_force() / self.trap.spring_constant
    }

    /// `min(2 pi / omega0, m / Gamma_total) / 50` and the time scale that sets it.
    pub fn stability_bound(&self) -> Result<(f64, &'static str)> {
        let period = self.trap.period();
        let rate = self.damping()?.total().abs();
        let damping_time = if rate > 0.0 { self.trap.mass / rate } else { f64::INFINITY };
        Ok(if damping_time < period {
            (damping_time / STEPS_PER_TIMESCALE, "damping time m/Gamma_total")
        } else {
            (period / STEPS_PER_TIMESCALE, "trap period 2pi/omega0")
        })
    }

    /// `Some(delta < omega0)` for every beam, `None` without beams.
    pub fn sideband_resolved(&self) -> Option<bool> {
        (!self.beams.is_empty()).then(|| self.beams.iter().all(|b| b.params.delta() < self.trap.omega0))
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.timestep).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("duration", self.duration)?;
        ensure_positive("timestep", self.timestep)?;
        ensure_positive("sphere radius", self.sphere_radius)?;
        ensure_non_negative("extra damping", self.extra_damping)?;
        ensure_finite(&[
            ("initial position", self.initial_position),
            ("initial velocity", self.initial_velocity),
        ])?;
        if self.record_stride == 0 {
            return Err(Error::Domain("record stride must be at least 1".into()));
        }
        match self.beams.as_slice() {
            [] | [_] => {}
            [a, b] if a.sign == b.sign.opposite() => {}
            [_, _] => return Err(Error::Domain("two beams must counter-propagate".into())),
            _ => return Err(Error::Domain(format!("at most two beams, got {}", self.beams.len()))),
        }
        if self.timestep > self.duration {
            return Err(Error::Domain("timestep exceeds duration".into()));
        }
        let (bound, which) = self.stability_bound()?;
        if self.timestep > bound {
            return Err(Error::UnstableTimestep {
                timestep: self.timestep,
                bound,
                which,
            });
        }
        Ok(())
    }

    /// SHA-256 of the canonical debug rendering, first 16 hex digits.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(format!("{self:?}").as_bytes());
        hash.iter().take(8).fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMetadata {
    pub seed: u64,
    pub trajectory_index: u64,
    pub timestep: f64,
    pub record_stride: usize,
    pub config_digest: String,
    pub mass: f64,
    pub spring_constant: f64,
    pub omega0: f64,
    /// Shift of the rest position caused by the constant optical force, m.
    pub equilibrium_position: f64,
    pub sideband_resolved: Option<bool>,
}

impl TrajectoryMetadata {
    /// Metadata for samples that did not come from [`simulate`].
    pub fn external(mass: f64, spring_constant: f64, timestep: f64) -> Result<Self> {
        ensure_positive("mass", mass)?;
        ensure_positive("spring constant", spring_constant)?;
        ensure_positive("timestep", timestep)?;
        Ok(Self {
            seed: 0,
            trajectory_index: 0,
            timestep,
            record_stride: 1,
            config_digest: String::new(),
            mass,
            spring_constant,
            omega0: (spring_constant / mass).sqrt(),
            equilibrium_position: 0.0,
            sideband_resolved: None,
        })
    }

    pub fn sample_interval(&self) -> f64 {
        self.timestep * self.record_stride as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    positions: Vec<f64>,
    velocities: Vec<f64>,
    metadata: TrajectoryMetadata,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, positions: Vec<f64>, velocities: Vec<f64>, metadata: TrajectoryMetadata) -> Result<Self> {
        if times.len() != positions.len() || times.len() != velocities.len() {
            return Err(Error::Domain(format!(
                "trajectory columns differ in length: {} / {} / {}",
                times.len(),
                positions.len(),
                velocities.len()
            )));
        }
        if times.iter().chain(&positions).chain(&velocities).any(|v| !v.is_finite()) {
            return Err(Error::Domain("trajectory contains non-finite values".into()));
        }
        Ok(Self {
            times,
            positions,
            velocities,
            metadata,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn metadata(&self) -> &TrajectoryMetadata {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Positions relative to the displaced rest point.
    pub fn shifted_positions(&self) -> impl Iterator<Item = f64> + '_ {
        let eq = self.metadata.equilibrium_position;
        self.positions.iter().map(move |x| x - eq)
    }

    /// `t_s,x_m,v_m_per_s` rows with shortest round-trip float formatting.
    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t_s,x_m,v_m_per_s")?;
        for i in 0..self.len() {
            writeln!(w, "{:e},{:e},{:e}", self.times[i], self.positions[i], self.velocities[i])?;
        }
        Ok(())
    }
}

/// Runs trajectory 0 of `config`.
pub fn simulate(config: &SimConfig) -> Result<Trajectory> {
    simulate_indexed(config, 0)
}

/// Runs `count` trajectories in parallel with independent noise streams.
pub fn simulate_ensemble(config: &SimConfig, count: u64) -> Result<Vec<Trajectory>> {
    config.validate()?;
    (0..count).into_par_iter().map(|i| simulate_indexed(config, i)).collect()
}

/// Runs one trajectory; the noise stream is `(seed, index)`.
pub fn simulate_indexed(config: &SimConfig, index: u64) -> Result<Trajectory> {
    config.validate()?;
    let trap = &config.trap;
    let m = trap.mass;
    let kappa = trap.spring_constant;
    let dt = config.timestep;
    let damping = config.damping()?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    let mut gauss = move || -> f64 { StandardNormal.sample(&mut rng) };

    let linear_rate = (damping.gas + damping.extra) / m;
    let decay = (-linear_rate * dt).exp();
    let thermal_sd = match (&config.gas, config.thermal_noise) {
        (Some(env), true) if damping.gas > 0.0 => {
            let variance = damping.gas * BOLTZMANN * env.temperature() / (m * m * linear_rate);
            (variance * -(-2.0 * linear_rate * dt).exp_m1()).sqrt()
        }
        _ => 0.0,
    };
    let wavenumbers: Vec<f64> = config.beams.iter().map(|b| b.params.wavenumber()).collect();

    let force = |x: f64, v: f64| -> f64 {
        -kappa * x + config.beams.iter().map(|b| beam_force(&b.params, v, b.sign)).sum::<f64>()
    };

    let steps = config.steps();
    let stride = config.record_stride;
    let capacity = steps / stride + 1;
    let mut times = Vec::with_capacity(capacity);
    let mut positions = Vec::with_capacity(capacity);
    let mut velocities = Vec::with_capacity(capacity);

    let (mut x, mut v) = (config.initial_position, config.initial_velocity);
    times.push(0.0);
    positions.push(x);
    velocities.push(v);

    let half = 0.5 * dt;
    for step in 1..=steps {
        v += half / m * force(x, v);
        x += half * v;
        v *= decay;
        if thermal_sd > 0.0 {
            v += thermal_sd * gauss();
        }
        if config.recoil_noise {
            for (beam, &k) in config.beams.iter().zip(&wavenumbers) {
                let rate = beam_scattering_rate(&beam.params, v, beam.sign);
                let d = recoil_diffusion(k, rate)?;
                v += (d * dt).sqrt() / m * gauss();
            }
        }
        x += half * v;
        v += half / m * force(x, v);

        if !(x.is_finite() && v.is_finite()) {
            return Err(Error::Domain(format!("trajectory diverged at t = {:e} s", step as f64 * dt)));
        }
        if step % stride == 0 {
            times.push(step as f64 * dt);
            positions.push(x);
            velocities.push(v);
        }
    }

    let metadata = TrajectoryMetadata {
        seed: config.seed,
        trajectory_index: index,
        timestep: dt,
        record_stride: stride,
        config_digest: config.digest(),
        mass: m,
        spring_constant: kappa,
        omega0: trap.omega0,
        equilibrium_position: config.equilibrium_position(),
        sideband_resolved: config.sideband_resolved(),
    };
    Trajectory::new(times, positions, velocities, metadata)
}
