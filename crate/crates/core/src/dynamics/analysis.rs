use crate::constants::BOLTZMANN;
use crate::error::{Error, Result};

use super::Trajectory;

/// Temperature windows must span at least this many trap periods.
pub const MIN_WINDOW_PERIODS: f64 = 100.0;
pub const DEFAULT_TEMPERATURE_BLOCKS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureEstimate {
    /// `m <v^2> / k_B`, K.
    pub temperature: f64,
    /// Block-averaged standard error of `temperature`, K.
    pub std_error: f64,
    /// `kappa <(x - x_eq)^2> / k_B`, K.
    pub position_temperature: f64,
    pub samples: usize,
}

fn window_indices(traj: &Trajectory, window: (f64, f64)) -> Result<std::ops::Range<usize>> {
    let (start, end) = window;
    let meta = traj.metadata();
    let min = MIN_WINDOW_PERIODS * 2.0 * std::f64::consts::PI / meta.omega0;
    if !(start.is_finite() && end.is_finite()) || end <= start {
        return Err(Error::Domain(format!("invalid window [{start}, {end}]")));
    }
    if end - start < min * (1.0 - 1e-12) {
        return Err(Error::WindowTooShort { got: end - start, min });
    }
    let times = traj.times();
    let slack = meta.sample_interval();
    match (times.first(), times.last()) {
        (Some(&t0), Some(&t1)) if start >= t0 - slack && end <= t1 + slack => {}
        _ => {
            return Err(Error::Domain(format!(
                "window [{start:e}, {end:e}] lies outside the trajectory"
            )))
        }
    }
    let lo = times.partition_point(|&t| t < start);
    let hi = times.partition_point(|&t| t <= end);
    Ok(lo..hi)
}

/// `T = m <v^2> / k_B` over the samples with `t` in `window`.
pub fn estimate_temperature(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    Ok(temperature_estimate(traj, window, 1)?.temperature)
}

/// Temperature with a standard error from `blocks` contiguous sub-windows.
pub fn temperature_estimate(traj: &Trajectory, window: (f64, f64), blocks: usize) -> Result<TemperatureEstimate> {
    let range = window_indices(traj, window)?;
    let meta = traj.metadata();
    let v = &traj.velocities()[range.clone()];
    let x = &traj.positions()[range];
    let blocks = blocks.max(1);
    if v.len() < blocks.max(2) {
        return Err(Error::Domain(format!("only {} samples in the window", v.len())));
    }
    let mean_sq = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64;
    let temperature = meta.mass * mean_sq(v) / BOLTZMANN;
    let eq = meta.equilibrium_position;
    let position_temperature =
        meta.spring_constant * x.iter().map(|x| (x - eq) * (x - eq)).sum::<f64>() / x.len() as f64 / BOLTZMANN;

    let std_error = if blocks > 1 {
        let size = v.len() / blocks;
        let temps: Vec<f64> = v
            .chunks_exact(size)
            .take(blocks)
            .map(|c| meta.mass * mean_sq(c) / BOLTZMANN)
            .collect();
        let mean = temps.iter().sum::<f64>() / blocks as f64;
        let var = temps.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (blocks - 1) as f64;
        (var / blocks as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(TemperatureEstimate {
        temperature,
        std_error,
        position_temperature,
        samples: v.len(),
    })
}

/// `E = m v^2 / 2 + kappa (x - x_eq)^2 / 2` at each sample.
pub fn energies(traj: &Trajectory) -> Vec<f64> {
    let meta = traj.metadata();
    traj.shifted_positions()
        .zip(traj.velocities())
        .map(|(x, v)| 0.5 * meta.mass * v * v + 0.5 * meta.spring_constant * x * x)
        .collect()
}

/// Decay rate `r` of `E(t) ~ E0 exp(-r t)` from a least-squares line
/// through `ln E`. For linear damping `Gamma` this is `Gamma / m`.
pub fn fit_energy_decay(traj: &Trajectory) -> Result<f64> {
    fit_energy_decay_window(traj, (f64::NEG_INFINITY, f64::INFINITY))
}

/// [`fit_energy_decay`] restricted to samples with `t` in `window`, e.g. to
/// stop before the energy reaches its noise floor.
pub fn fit_energy_decay_window(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = traj
        .times()
        .iter()
        .zip(energies(traj))
        .filter(|(t, e)| *e > 0.0 && (window.0..=window.1).contains(*t))
        .map(|(&t, e)| (t, e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::NotDecaying);
    }
    let n = pts.len() as f64;
    let (mt, my) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(sxy, sxx), (t, y)| (sxy + (t - mt) * (y - my), sxx + (t - mt) * (t - mt)));
    let slope = sxy / sxx;
    if !(slope.is_finite() && slope < 0.0) {
        return Err(Error::NotDecaying);
    }
    Ok(-slope)
}

/// Oscillation frequency (Hz) from upward crossings of the rest position.
pub fn oscillation_frequency(traj: &Trajectory) -> Result<f64> {
    let x: Vec<f64> = traj.shifted_positions().collect();
    let t = traj.times();
    let crossings: Vec<f64> = (1..x.len())
        .filter(|&i| x[i - 1] < 0.0 && x[i] >= 0.0)
        .map(|i| t[i - 1] + (t[i] - t[i - 1]) * x[i - 1] / (x[i - 1] - x[i]))
        .collect();
    match (crossings.first(), crossings.last()) {
        (Some(first), Some(last)) if crossings.len() >= 2 => Ok((crossings.len() - 1) as f64 / (last - first)),
        _ => Err(Error::Domain("fewer than two zero crossings".into())),
    }
}
