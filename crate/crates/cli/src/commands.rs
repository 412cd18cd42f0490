use std::f64::consts::PI;
use std::fmt::Write as _;

use sphercool::constants::{hz_to_rad_s, pa_to_torr, torr_to_pa, SPEED_OF_LIGHT};
use sphercool::doppler::{self, BeamSign, CoolingParams};
use sphercool::dynamics::{self, Beam, SimConfig, TrapConfig, TrapKind, DEFAULT_TEMPERATURE_BLOCKS};
use sphercool::gas::{self, GasEnvironment};
use sphercool::mie::ModeKind;
use sphercool::toy::{self, ToyModel};
use sphercool::wgm::{self, ResonanceSearch};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::Report;

/// What a command produced: an optional CSV table and a report.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv: Option<String>,
    pub report: Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Resonance,
    Limits,
    Gas,
    Cool,
    Toy,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Resonance => "resonance",
            CommandKind::Limits => "limits",
            CommandKind::Gas => "gas",
            CommandKind::Cool => "cool",
            CommandKind::Toy => "toy",
        }
    }
}

pub fn execute(kind: CommandKind, cfg: &RunConfig) -> Result<Artifacts, CliError> {
    match kind {
        CommandKind::Spectrum => spectrum(cfg),
        CommandKind::Resonance => resonance(cfg),
        CommandKind::Limits => limits(cfg),
        CommandKind::Gas => gas_report(cfg),
        CommandKind::Cool => cool(cfg),
        CommandKind::Toy => toy_sweep(cfg),
    }
}

fn float(cfg: &RunConfig, key: &str) -> f64 {
    cfg.float(key).unwrap_or_else(|| panic!("{key} checked by require"))
}

fn int(cfg: &RunConfig, key: &str) -> i64 {
    cfg.int(key).unwrap_or_else(|| panic!("{key} checked by require"))
}

fn text<'a>(cfg: &'a RunConfig, key: &str) -> &'a str {
    cfg.text(key).unwrap_or_else(|| panic!("{key} checked by require"))
}

fn both_or_neither(cfg: &RunConfig, a: &str, b: &str) -> Result<Option<(f64, f64)>, CliError> {
    match (cfg.float(a), cfg.float(b)) {
        (Some(x), Some(y)) => Ok(Some((x, y))),
        (None, None) => Ok(None),
        _ => Err(CliError::Usage(format!("set both {a} and {b}, or neither"))),
    }
}

const BEAM_KEYS: &[&str] = &["beam.wavelength_m", "beam.power_w", "beam.linewidth_hz"];

fn has_beam(cfg: &RunConfig) -> bool {
    BEAM_KEYS.iter().all(|k| cfg.contains(k))
}

/// Detuning in rad/s from exactly one of the two detuning keys.
fn detuning(cfg: &RunConfig, delta: f64) -> Result<f64, CliError> {
    match (cfg.float("beam.detuning_hz"), cfg.float("beam.detuning_linewidths")) {
        (Some(hz), None) => Ok(hz_to_rad_s(hz)),
        (None, Some(units)) => Ok(units * delta),
        (Some(_), Some(_)) => Err(CliError::Usage(
            "set only one of beam.detuning_hz and beam.detuning_linewidths".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "missing required config keys: beam.detuning_hz or beam.detuning_linewidths".into(),
        )),
    }
}

fn cooling_params(cfg: &RunConfig, command: &str) -> Result<CoolingParams, CliError> {
    cfg.require(command, BEAM_KEYS)?;
    let delta = hz_to_rad_s(float(cfg, "beam.linewidth_hz"));
    let detuning = detuning(cfg, delta)?;
    Ok(CoolingParams::new(
        float(cfg, "beam.background_power_w"),
        float(cfg, "beam.power_w"),
        delta,
        detuning,
        float(cfg, "beam.wavelength_m"),
    )?)
}

fn trap(cfg: &RunConfig) -> Result<TrapConfig, CliError> {
    let kind: TrapKind = text(cfg, "trap.kind").parse()?;
    let k = cfg.float("trap.spring_constant_n_per_m");
    let m = cfg.float("trap.mass_kg");
    let w = cfg.float("trap.frequency_hz").map(hz_to_rad_s);
    if [k, m, w].iter().filter(|v| v.is_some()).count() < 2 {
        return Err(CliError::Usage(
            "trap needs two of trap.spring_constant_n_per_m, trap.mass_kg, trap.frequency_hz".into(),
        ));
    }
    Ok(TrapConfig::new(kind, k, m, w)?)
}

fn gas_env(cfg: &RunConfig) -> Result<GasEnvironment, CliError> {
    Ok(GasEnvironment::new(
        float(cfg, "gas.pressure_pa"),
        float(cfg, "gas.temperature_k"),
        float(cfg, "gas.viscosity_pa_s"),
        float(cfg, "gas.molar_mass_kg_per_mol"),
    )?)
}

fn spectrum(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    cfg.require("spectrum", &["sphere.index", "spectrum.x_min", "spectrum.x_max", "spectrum.step"])?;
    let m = float(cfg, "sphere.index");
    let power = float(cfg, "spectrum.power_w");
    let samples = wgm::scan_spectrum(
        float(cfg, "spectrum.x_min"),
        float(cfg, "spectrum.x_max"),
        float(cfg, "spectrum.step"),
        m,
        power,
    )?;
    let mut csv = String::from("x,q_ext,q_rad,force_N\n");
    for s in &samples {
        let _ = writeln!(csv, "{:e},{:e},{:e},{:e}", s.x, s.q_ext, s.q_rad, s.force);
    }
    let max = samples.iter().max_by(|a, b| a.force.total_cmp(&b.force)).expect("non-empty scan");
    let min = samples.iter().min_by(|a, b| a.force.total_cmp(&b.force)).expect("non-empty scan");
    let mut report = Report::new("spectrum", cfg);
    report
        .add("samples", samples.len())
        .num("force_max_N", max.force)
        .num("x_at_force_max", max.x)
        .num("force_min_N", min.force)
        .num("x_at_force_min", min.x)
        .num("force_mean_N", samples.iter().map(|s| s.force).sum::<f64>() / samples.len() as f64);
    Ok(Artifacts { csv: Some(csv), report })
}

fn resonance(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    cfg.require("resonance", &["sphere.index", "resonance.n"])?;
    let kind: ModeKind = text(cfg, "resonance.kind").parse()?;
    let n = int(cfg, "resonance.n") as usize;
    let l = int(cfg, "resonance.l") as usize;
    let mut search = ResonanceSearch::new(kind, n, l, float(cfg, "sphere.index")).power(float(cfg, "resonance.power_w"));
    if let Some((lo, hi)) = both_or_neither(cfg, "resonance.x_min", "resonance.x_max")? {
        search = search.bracket(lo, hi);
    }
    let line = search.locate()?;
    let mut report = Report::new("resonance", cfg);
    report
        .add("mode", format!("{} n={} l={}", line.mode_kind, line.mode_number, line.mode_order))
        .num("x0", line.x0)
        .num("x0_fit", line.x0_fit)
        .num("half_width_x", line.half_width_x)
        .num("half_width_estimate_x", line.half_width_estimate)
        .num("q_factor", line.q_factor())
        .num("peak_force_N", line.peak_force)
        .num("offset_force_N", line.offset_force)
        .num("fit_quality", line.fit_quality)
        .add("width_source", line.width_source.as_str())
        .num("reference_power_W", line.reference_power);
    if line.width_source != wgm::WidthSource::Force {
        report.warn("force lineshape contaminated by neighbouring lines; width fitted to the partial wave alone");
    }
    if let Some(lambda) = cfg.float("beam.wavelength_m") {
        let nu = SPEED_OF_LIGHT / lambda;
        report
            .num("radius_at_wavelength_m", line.x0 * lambda / (2.0 * PI))
            .num("linewidth_hz", nu * line.half_width_x / line.x0);
    }
    Ok(Artifacts { csv: None, report })
}

fn limits(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let params = cooling_params(cfg, "limits")?;
    let trap = trap(cfg)?;
    let lim = doppler::cooling_limits(&params, trap.mass())?;
    let mut report = Report::new("limits", cfg);
    report
        .num("delta_rad_s", params.delta())
        .num("detuning_rad_s", params.detuning())
        .num("mass_kg", trap.mass())
        .num("beta_molasses_kg_per_s", lim.beta_molasses)
        .num("beta_single_kg_per_s", lim.beta_single)
        .opt("tau_molasses_s", lim.tau_molasses)
        .opt("tau_single_s", lim.tau_single)
        .num("gamma_sc_per_beam_per_s", lim.gamma_sc)
        .num("diffusion_per_beam", lim.diffusion)
        .opt("doppler_temperature_K", lim.doppler_temperature)
        .num("f0_offset_per_beam_N", lim.f0_offset)
        .add("sideband_resolved", params.delta() < trap.omega0());
    if let Some(w) = trap.warning() {
        report.warn(w);
    }
    if lim.beta_molasses <= 0.0 {
        report.warn("detuning is not red of resonance: no optical damping");
    }
    Ok(Artifacts { csv: None, report })
}

/// Pressure at which optical damping is compared against gas damping.
const HIGH_VACUUM_TORR: f64 = 1e-6;

fn gas_report(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    cfg.require("gas", &["sphere.radius_m", "gas.pressure_pa"])?;
    let env = gas_env(cfg)?;
    let radius = float(cfg, "sphere.radius_m");
    let drag = gas::gas_drag(&env, radius)?;
    let mut report = Report::new("gas", cfg);
    report
        .num("pressure_pa", env.pressure())
        .num("pressure_mtorr", 1e3 * pa_to_torr(env.pressure()))
        .num("density_kg_m3", env.density())
        .num("mean_thermal_speed_m_per_s", gas::mean_thermal_speed(env.temperature(), env.molar_mass())?)
        .num("gamma_viscous_kg_per_s", drag.viscous)
        .num("gamma_epstein_kg_per_s", drag.epstein)
        .num("knudsen_number", drag.knudsen)
        .add("regime", drag.regime.as_str())
        .num("gamma_selected_kg_per_s", drag.selected);

    let target = match cfg.float("gas.target_damping_kg_per_s") {
        Some(t) => Some((t, "gas.target_damping_kg_per_s")),
        None if has_beam(cfg) => Some((doppler::single_beam_beta(&cooling_params(cfg, "gas")?).beta, "beta_single")),
        None => None,
    };
    match target {
        Some((beta, source)) if beta > 0.0 => {
            let p = gas::crossover_pressure(beta, &env, radius)?;
            let vacuum = gas::epstein_drag(&env.with_pressure(torr_to_pa(HIGH_VACUUM_TORR))?, radius)?;
            report
                .add("crossover_target", source)
                .num("crossover_target_kg_per_s", beta)
                .num("crossover_pressure_pa", p)
                .num("crossover_pressure_mtorr", 1e3 * pa_to_torr(p))
                .num("gamma_epstein_at_1e-6_torr_kg_per_s", vacuum)
                .num("optical_over_gas_orders_at_1e-6_torr", (beta / vacuum).log10());
        }
        Some(_) => {
            report.warn("optical damping is not positive; no crossover pressure");
        }
        None => {
            report.warn("no crossover target: set gas.target_damping_kg_per_s or the beam.* keys");
        }
    }
    Ok(Artifacts { csv: None, report })
}

fn cool(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    cfg.require("cool", &["sim.duration_s", "sim.timestep_s"])?;
    let trap = trap(cfg)?;
    let mut sim = SimConfig::new(trap, float(cfg, "sim.duration_s"), float(cfg, "sim.timestep_s"));
    sim.seed = int(cfg, "sim.seed") as u64;
    sim.record_stride = int(cfg, "sim.record_stride") as usize;
    sim.initial_position = float(cfg, "sim.x0_m");
    sim.initial_velocity = float(cfg, "sim.v0_m_per_s");
    sim.recoil_noise = cfg.bool("sim.recoil_noise").unwrap_or(true);
    sim.thermal_noise = cfg.bool("sim.thermal_noise").unwrap_or(true);
    sim.extra_damping = float(cfg, "sim.extra_damping_kg_per_s");
    if let Some(r) = cfg.float("sphere.radius_m") {
        sim.sphere_radius = r;
    }
    if cfg.bool("sim.include_gas") == Some(true) {
        cfg.require("cool", &["sphere.radius_m", "gas.pressure_pa"])?;
        sim.gas = Some(gas_env(cfg)?);
    }
    let beams = int(cfg, "beam.count");
    let params = if beams > 0 { Some(cooling_params(cfg, "cool")?) } else { None };
    if let Some(params) = params {
        sim = match beams {
            2 => sim.with_molasses(params),
            _ => {
                let sign = if text(cfg, "beam.sign") == "minus" { BeamSign::Minus } else { BeamSign::Plus };
                sim.beams = vec![Beam { params, sign }];
                sim
            }
        };
    }

    let traj = dynamics::simulate(&sim)?;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).expect("writing to memory");
    let csv = String::from_utf8(csv).expect("ASCII output");

    let meta = traj.metadata();
    let damping = sim.damping()?;
    let mut report = Report::new("cool", cfg);
    report
        .add("config_digest", &meta.config_digest)
        .add("seed", meta.seed)
        .add("steps", sim.steps())
        .add("samples", traj.len())
        .num("omega0_rad_s", meta.omega0)
        .num("damping_gas_kg_per_s", damping.gas)
        .num("damping_optical_kg_per_s", damping.optical)
        .num("damping_extra_kg_per_s", damping.extra)
        .num("equilibrium_position_m", meta.equilibrium_position);
    match meta.sideband_resolved {
        Some(flag) => report.add("sideband_resolved", flag),
        None => report.add("sideband_resolved", "n/a"),
    };
    let last = traj.len() - 1;
    report
        .num("final_x_m", traj.positions()[last])
        .num("final_x_shifted_m", traj.positions()[last] - meta.equilibrium_position)
        .num("final_v_m_per_s", traj.velocities()[last]);

    let end = *traj.times().last().expect("non-empty");
    let start = cfg.float("sim.window_start_s").unwrap_or(0.5 * end);
    match dynamics::temperature_estimate(&traj, (start, end), DEFAULT_TEMPERATURE_BLOCKS) {
        Ok(est) => {
            report
                .num("window_start_s", start)
                .num("temperature_K", est.temperature)
                .num("temperature_std_error_K", est.std_error)
                .num("position_temperature_K", est.position_temperature);
        }
        Err(e) => {
            report.add("temperature_K", "n/a");
            report.warn(format!("temperature not estimated: {e}"));
        }
    }
    if let Some(p) = params {
        report.opt("doppler_limit_K", doppler::doppler_limit(p.delta(), p.detuning()).ok());
    }
    let total = damping.total();
    if total > 0.0 {
        report.num("expected_energy_decay_per_s", total / trap.mass());
    }
    let decay_end = cfg.float("sim.decay_end_s").unwrap_or(f64::INFINITY);
    match dynamics::fit_energy_decay_window(&traj, (0.0, decay_end)) {
        Ok(rate) => report.num("energy_decay_rate_per_s", rate),
        Err(_) => report.add("energy_decay_rate_per_s", "n/a"),
    };
    if let Some(w) = trap.warning() {
        report.warn(w);
    }
    Ok(Artifacts { csv: Some(csv), report })
}

fn toy_sweep(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    cfg.require("toy", &["toy.model"])?;
    let r = match (cfg.float("toy.reflectivity"), cfg.float("toy.reflectivity2")) {
        (Some(r), None) => r,
        (None, Some(r2)) => r2.sqrt(),
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("set only one of toy.reflectivity and toy.reflectivity2".into()))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "'toy' is missing required config keys: toy.reflectivity or toy.reflectivity2".into(),
            ))
        }
    };
    let model = match text(cfg, "toy.model") {
        "fp" => ToyModel::FabryPerot { r },
        _ => ToyModel::Ring {
            n_mirrors: u32::try_from(int(cfg, "toy.mirrors")).map_err(|_| CliError::Usage("toy.mirrors too large".into()))?,
            r,
        },
    };
    let power = float(cfg, "toy.power_w");
    let phases = toy::phase_grid(-PI, int(cfg, "toy.points") as usize);
    let rows = toy::sweep(model, power, &phases)?;
    let mut csv = String::from("phase_rad,force_N\n");
    for (p, f) in &rows {
        let _ = writeln!(csv, "{p:e},{f:e}");
    }
    let max = rows.iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("points >= 8");
    let min = rows.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("points >= 8");
    let mut report = Report::new("toy", cfg);
    report
        .num("amplitude_reflectivity", r)
        .num("force_on_resonance_N", model.force(power, 0.0)?)
        .num("force_max_N", max.1)
        .num("phase_at_max_rad", max.0)
        .num("force_min_N", min.1)
        .num("phase_at_min_rad", min.0)
        .num("two_p_over_c_N", 2.0 * power / SPEED_OF_LIGHT);
    Ok(Artifacts { csv: Some(csv), report })
}
