//! Whispering-gallery (Mie) resonances: spectra over size parameter,
//! location of individual partial-wave lines and their Lorentzian widths.
//!
//! Writing a partial wave as `c_n = N / (N - i G)` with real `N`, `G`, the
//! line centre is a zero of the smooth function `G(x)`: there `c_n = 1`,
//! the top of the unitarity circle, so `|c_n|^2` is maximal and `Im c_n`
//! changes sign. Zeros of `G` are bracketed on a coarse grid and refined by
//! bisection; sign changes caused by poles of `D_n(mx)` are rejected because
//! `|c_n|^2` is small there.

pub mod calibration;

use rayon::prelude::*;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{ensure_positive, Error, Result};
use crate::fit::{fit_lorentzian, LorentzianFit};
use crate::mie::{self, partial_wave, ModeKind, RefractiveIndex, SizeParameter};

/// Power at which line force levels are reported unless overridden (10 mW).
pub const REFERENCE_POWER: f64 = 10e-3;

/// Default cap on the number of samples in one spectrum scan.
pub const DEFAULT_SAMPLE_BUDGET: usize = 2_000_000;

/// Coarse grid step used to bracket zeros of `G(x)`.
pub const BRACKET_STEP: f64 = 2e-4;

/// Fit window half-extent in units of the estimated HWHM (8 HWHM in total).
pub const FIT_WINDOW_HALF_WIDTHS: f64 = 4.0;

/// Samples taken across the fit window.
pub const FIT_SAMPLES: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub x: f64,
    pub q_ext: f64,
    pub q_rad: f64,
    /// Force at the scan's reference power, N.
    pub force: f64,
}

/// Samples `Q_ext`, `Q_rad` and the force on a uniform grid `x_min + i*step`.
pub fn scan_spectrum(x_min: f64, x_max: f64, step: f64, m: f64, power: f64) -> Result<Vec<SpectrumSample>> {
    scan_spectrum_with_budget(x_min, x_max, step, m, power, DEFAULT_SAMPLE_BUDGET)
}

pub fn scan_spectrum_with_budget(
    x_min: f64,
    x_max: f64,
    step: f64,
    m: f64,
    power: f64,
    budget: usize,
) -> Result<Vec<SpectrumSample>> {
    ensure_positive("x_min", x_min)?;
    ensure_positive("step", step)?;
    if !(x_max > x_min) || !x_max.is_finite() {
        return Err(Error::Domain(format!("x_max ({x_max}) must exceed x_min ({x_min})")));
    }
    let m = RefractiveIndex::new(m)?;
    let ratio = (x_max - x_min) / step;
    // Treat ratios within rounding of an integer as exact so x_max is kept.
    let intervals = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
        ratio.round()
    } else {
        ratio.floor()
    };
    if intervals + 1.0 > budget as f64 {
        return Err(Error::SampleBudget {
            requested: (intervals + 1.0).min(usize::MAX as f64) as usize,
            budget,
        });
    }
    let count = intervals as usize + 1;
    (0..count)
        .into_par_iter()
        .map(|i| sample_at(x_min + i as f64 * step, m, power))
        .collect()
}

fn sample_at(x: f64, m: RefractiveIndex, power: f64) -> Result<SpectrumSample> {
    let eff = mie::efficiencies(SizeParameter::new(x)?, m)?;
    Ok(SpectrumSample {
        x,
        q_ext: eff.q_ext,
        q_rad: eff.q_rad,
        force: mie::radiation_force(power, eff.q_rad)?,
    })
}

/// Force on the sphere at size parameter `x`, N.
pub fn force_at(x: f64, m: f64, power: f64) -> Result<f64> {
    Ok(sample_at(x, RefractiveIndex::new(m)?, power)?.force)
}

/// Range of `x` holding the internally trapped resonances of partial wave
/// `n`: from `(n + 1/2)/m` up to `n + 1/2`. Counting radial orders from the
/// bottom of this range makes `l` absolute.
pub fn trapped_bracket(n: usize, m: f64) -> (f64, f64) {
    let nu = n as f64 + 0.5;
    (nu / m, nu)
}

/// A located WGM line of one partial wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceLine {
    pub mode_kind: ModeKind,
    pub mode_number: usize,
    pub mode_order: usize,
    pub refractive_index: f64,
    /// Line centre from the zero of `G(x)`.
    pub x0: f64,
    /// HWHM in `x` from the Lorentzian fit of the force.
    pub half_width_x: f64,
    /// HWHM predicted from the single partial wave, `|N / G'(x0)|`.
    pub half_width_estimate: f64,
    /// Centre of the Lorentzian fit of the force.
    pub x0_fit: f64,
    /// Resonant (Lorentzian) part of the force at `reference_power`, N.
    pub peak_force: f64,
    /// Non-resonant background force at `reference_power`, N.
    pub offset_force: f64,
    pub fit_quality: f64,
    pub reference_power: f64,
    pub width_source: WidthSource,
}

/// Which lineshape the width and force levels were fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthSource {
    /// The full radiation-pressure force.
    Force,
    /// The single partial wave's share of the force, used when neighbouring
    /// lines contaminate the window.
    PartialWave,
}

impl WidthSource {
    pub fn as_str(self) -> &'static str {
        match self {
            WidthSource::Force => "force",
            WidthSource::PartialWave => "partial_wave",
        }
    }
}

impl ResonanceLine {
    /// Quality factor `x0 / (2 HWHM)`.
    pub fn q_factor(&self) -> f64 {
        self.x0 / (2.0 * self.half_width_x)
    }

    /// Centre and HWHM as angular frequencies for a sphere of `radius`.
    pub fn angular(&self, radius: f64) -> Result<(f64, f64)> {
        to_angular_frequency(self, radius)
    }
}

/// Converts the line centre and HWHM from size parameter to angular
/// frequency, `omega = c x / a`.
pub fn to_angular_frequency(line: &ResonanceLine, radius: f64) -> Result<(f64, f64)> {
    Ok((
        size_to_angular_frequency(line.x0, radius)?,
        size_to_angular_frequency(line.half_width_x, radius)?,
    ))
}

pub fn size_to_angular_frequency(x: f64, radius: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    Ok(SPEED_OF_LIGHT * x / radius)
}

pub fn angular_frequency_to_size(omega: f64, radius: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    Ok(omega * radius / SPEED_OF_LIGHT)
}

/// Search for the `l`-th resonance (ascending `x`) of one partial wave.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceSearch {
    kind: ModeKind,
    n: usize,
    l: usize,
    m: f64,
    bracket: (f64, f64),
    power: f64,
    grid_step: f64,
}

impl ResonanceSearch {
    /// Search over [`trapped_bracket`] at the reference power.
    pub fn new(kind: ModeKind, n: usize, l: usize, m: f64) -> Self {
        Self {
            kind,
            n,
            l,
            m,
            bracket: trapped_bracket(n, m),
            power: REFERENCE_POWER,
            grid_step: BRACKET_STEP,
        }
    }

    pub fn bracket(mut self, lo: f64, hi: f64) -> Self {
        self.bracket = (lo, hi);
        self
    }

    pub fn power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    pub fn grid_step(mut self, step: f64) -> Self {
        self.grid_step = step;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.l == 0 {
            return Err(Error::Domain("mode number and order start at 1".into()));
        }
        RefractiveIndex::new(self.m)?;
        ensure_positive("grid step", self.grid_step)?;
        ensure_positive("power", self.power)?;
        let (lo, hi) = self.bracket;
        ensure_positive("bracket start", lo)?;
        if !(hi > lo) || !hi.is_finite() {
            return Err(Error::Domain(format!("empty bracket [{lo}, {hi}]")));
        }
        Ok(())
    }

    fn g(&self, x: f64) -> f64 {
        partial_wave(self.kind, self.n, x, self.m).resonance_function
    }

    /// All line centres of this partial wave inside the bracket, ascending.
    pub fn centres(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let (lo, hi) = self.bracket;
        let cells = ((hi - lo) / self.grid_step).ceil().max(1000.0) as usize;
        let h = (hi - lo) / cells as f64;
        let values: Vec<f64> = (0..=cells)
            .into_par_iter()
            .map(|i| self.g(if i == cells { hi } else { lo + i as f64 * h }))
            .collect();

        let mut centres = Vec::new();
        for i in 0..cells {
            let (g0, g1) = (values[i], values[i + 1]);
            if g0 == 0.0 || g0.signum() == g1.signum() {
                continue;
            }
            let x = self.refine(lo + i as f64 * h, if i + 1 == cells { hi } else { lo + (i + 1) as f64 * h }, g0);
            if self.is_line_centre(x) {
                centres.push(x);
            }
        }
        Ok(centres)
    }

    /// Bisection on `G` down to adjacent floating-point values.
    fn refine(&self, mut a: f64, mut b: f64, ga: f64) -> f64 {
        let sa = ga.signum();
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let gm = self.g(mid);
            if gm == 0.0 {
                return mid;
            }
            if gm.signum() == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    /// A genuine line: `|c_n|^2` near 1 and `Im c_n` changing sign.
    fn is_line_centre(&self, x: f64) -> bool {
        let pw = partial_wave(self.kind, self.n, x, self.m);
        if pw.intensity() < 0.5 {
            return false;
        }
        let hw = self.width_estimate(x);
        if !(hw.is_finite() && hw > 0.0) {
            return false;
        }
        let below = partial_wave(self.kind, self.n, x - 0.5 * hw, self.m).coefficient().im;
        let above = partial_wave(self.kind, self.n, x + 0.5 * hw, self.m).coefficient().im;
        below.signum() != above.signum()
    }

    /// HWHM of `|c_n|^2 = N^2 / (N^2 + G^2)` from the slope of `G`.
    fn width_estimate(&self, x0: f64) -> f64 {
        let h = 1e-5 * x0.max(1.0);
        let slope = (self.g(x0 + h) - self.g(x0 - h)) / (2.0 * h);
        let numerator = partial_wave(self.kind, self.n, x0, self.m).numerator;
        (numerator / slope).abs()
    }

    /// Locates the `l`-th line centre and fits the force lineshape around it.
    pub fn locate(&self) -> Result<ResonanceLine> {
        let centres = self.centres()?;
        let Some(&x0) = centres.get(self.l - 1) else {
            return Err(Error::ResonanceNotFound {
                kind: self.kind.to_string(),
                n: self.n,
                l: self.l,
                lo: self.bracket.0,
                hi: self.bracket.1,
                seen: centres,
            });
        };
        let estimate = self.width_estimate(x0);
        let mut width_source = WidthSource::Force;
        let fit = match fit_line_force(x0, estimate, self.m, self.power) {
            Ok(fit) if is_clean(&fit, x0, estimate) => fit,
            _ => {
                width_source = WidthSource::PartialWave;
                self.fit_partial_wave(x0, estimate)?
            }
        };
        Ok(ResonanceLine {
            mode_kind: self.kind,
            mode_number: self.n,
            mode_order: self.l,
            refractive_index: self.m,
            x0,
            half_width_x: fit.half_width,
            half_width_estimate: estimate,
            x0_fit: fit.x0,
            peak_force: fit.peak,
            offset_force: fit.offset,
            fit_quality: fit.fit_quality,
            reference_power: self.power,
            width_source,
        })
    }

    /// Fits `F(x0) - F_n(x0) + F_n(x)`, where `F_n = (P/c)(2/x^2)(2n+1)|c_n|^2`
    /// is the partial wave's own extinction share of the force.
    fn fit_partial_wave(&self, x0: f64, half_width: f64) -> Result<LorentzianFit> {
        let share = |x: f64| {
            let c = partial_wave(self.kind, self.n, x, self.m).intensity();
            self.power / SPEED_OF_LIGHT * 2.0 / (x * x) * (2 * self.n + 1) as f64 * c
        };
        let background = force_at(x0, self.m, self.power)? - share(x0);
        let span = FIT_WINDOW_HALF_WIDTHS * half_width;
        let xs: Vec<f64> = (0..FIT_SAMPLES)
            .map(|i| x0 - span + 2.0 * span * i as f64 / (FIT_SAMPLES - 1) as f64)
            .collect();
        let ys: Vec<f64> = xs.iter().map(|&x| background + share(x)).collect();
        fit_lorentzian(&xs, &ys)
    }
}

/// A force fit is trusted when it is a good Lorentzian centred on the located
/// line with a width near the single-wave estimate.
fn is_clean(fit: &LorentzianFit, x0: f64, estimate: f64) -> bool {
    fit.fit_quality >= 0.99
        && (fit.x0 - x0).abs() < fit.half_width / 10.0
        && (fit.half_width / estimate - 1.0).abs() < 0.5
}

/// Locates the `l`-th resonance of partial wave `n` inside `bracket`
/// (counted in ascending `x` from the bracket start) at the reference power.
pub fn locate_resonance(kind: ModeKind, n: usize, l: usize, m: f64, bracket: (f64, f64)) -> Result<ResonanceLine> {
    ResonanceSearch::new(kind, n, l, m).bracket(bracket.0, bracket.1).locate()
}

/// Samples the force over `x0 +- 4 HWHM` and fits a Lorentzian to it.
pub fn line_window(x0: f64, half_width: f64, m: f64, power: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let span = FIT_WINDOW_HALF_WIDTHS * half_width;
    let xs: Vec<f64> = (0..FIT_SAMPLES)
        .map(|i| x0 - span + 2.0 * span * i as f64 / (FIT_SAMPLES - 1) as f64)
        .collect();
    let m_index = RefractiveIndex::new(m)?;
    let ys = xs
        .par_iter()
        .map(|&x| sample_at(x, m_index, power).map(|s| s.force))
        .collect::<Result<Vec<f64>>>()?;
    Ok((xs, ys))
}

fn fit_line_force(x0: f64, half_width: f64, m: f64, power: f64) -> Result<LorentzianFit> {
    let (xs, ys) = line_window(x0, half_width, m, power)?;
    fit_lorentzian(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn two_sample_scan() {
        let s = scan_spectrum(40.999, 41.0, 1e-3, 1.45, 10e-3).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].x, 40.999);
    }

    #[test]
    fn index_matched_scan_is_zero() {
        let s = scan_spectrum(1.0, 1.2, 1e-2, 1.0, 0.3).unwrap();
        assert_eq!(s.len(), 21);
        assert!(s.iter().all(|p| p.q_rad == 0.0 && p.force == 0.0));
        assert!(s.windows(2).all(|w| w[1].x > w[0].x));
    }

    #[test]
    fn scan_budget_is_enforced() {
        match scan_spectrum_with_budget(1.0, 2.0, 1e-6, 1.45, 1e-3, 1000) {
            Err(Error::SampleBudget { budget, requested }) => {
                assert_eq!(budget, 1000);
                assert!(requested > 1000);
            }
            other => panic!("{other:?}"),
        }
        assert!(scan_spectrum(2.0, 1.0, 0.1, 1.45, 1e-3).is_err());
        assert!(scan_spectrum(1.0, 2.0, 0.0, 1.45, 1e-3).is_err());
    }

    #[test]
    fn index_matched_sphere_has_no_lines() {
        let err = locate_resonance(ModeKind::Electric, 10, 1, 1.0, (5.0, 12.0)).unwrap_err();
        assert!(matches!(err, Error::ResonanceNotFound { ref seen, .. } if seen.is_empty()));
    }

    #[test]
    fn angular_frequency_conversion() {
        let lambda = 773e-9;
        let x0 = 40.62425;
        let radius = x0 * lambda / (2.0 * PI);
        let omega = size_to_angular_frequency(x0, radius).unwrap();
        assert_relative_eq!(omega, 2.0 * PI * SPEED_OF_LIGHT / lambda, max_relative = 1e-4);

        let delta = 2.0 * PI * 32e6;
        let radius = 5.0e-6;
        let hw = angular_frequency_to_size(delta, radius).unwrap();
        assert_relative_eq!(size_to_angular_frequency(hw, radius).unwrap(), delta, max_relative = 1e-15);

        let w1 = size_to_angular_frequency(x0, radius).unwrap();
        let w2 = size_to_angular_frequency(2.0 * x0, radius).unwrap();
        assert_eq!(w2, 2.0 * w1);
        assert!(size_to_angular_frequency(x0, 0.0).is_err());
    }

    #[test]
    fn small_sphere_line_is_on_unitarity_maximum() {
        let m = 1.45;
        let search = ResonanceSearch::new(ModeKind::Magnetic, 25, 1, m);
        let line = search.locate().unwrap();
        let c = partial_wave(ModeKind::Magnetic, 25, line.x0, m).coefficient();
        assert!((c.norm_sqr() - 1.0).abs() < 1e-6);
        assert!((line.x0_fit - line.x0).abs() < line.half_width_x / 10.0, "{line:?}");
        let l2 = ResonanceSearch::new(ModeKind::Magnetic, 25, 2, m).locate().unwrap();
        assert!(l2.x0 > line.x0);
        assert!(l2.half_width_x > line.half_width_x);
    }
}
