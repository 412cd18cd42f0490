//! Lorenz-Mie coefficients and radiation-pressure efficiency for a
//! homogeneous, non-absorbing sphere illuminated by a plane wave.
//!
//! The logarithmic derivative `D_n(mx)` is obtained by downward recurrence
//! and the Riccati-Bessel functions `psi_n(x)`, `chi_n(x)` by upward
//! recurrence from their closed-form low orders (Bohren & Huffman, ch. 4).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Error, Result};

/// Trailing-term magnitude below which a series counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-14;

/// Extra partial waves kept beyond the Wiscombe cutoff by default.
pub const DEFAULT_EXTRA_TERMS: usize = 15;

/// A homogeneous dielectric sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    radius: f64,
    refractive_index: f64,
    mass_density: f64,
    mass: f64,
    mass_overridden: bool,
}

impl Sphere {
    /// Sphere whose mass follows from its radius and density.
    pub fn new(radius: f64, refractive_index: f64, mass_density: f64) -> Result<Self> {
        ensure_positive("radius", radius)?;
        ensure_positive("refractive index", refractive_index)?;
        ensure_positive("mass density", mass_density)?;
        Ok(Self {
            radius,
            refractive_index,
            mass_density,
            mass: 4.0 / 3.0 * PI * radius.powi(3) * mass_density,
            mass_overridden: false,
        })
    }

    /// Replaces the derived mass with an explicit value.
    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        ensure_positive("mass", mass)?;
        self.mass = mass;
        self.mass_overridden = true;
        Ok(self)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn refractive_index(&self) -> f64 {
        self.refractive_index
    }

    pub fn mass_density(&self) -> f64 {
        self.mass_density
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn mass_overridden(&self) -> bool {
        self.mass_overridden
    }

    /// Size parameter `2 pi a / lambda` at the given vacuum wavelength.
    pub fn size_parameter(&self, wavelength: f64) -> Result<SizeParameter> {
        SizeParameter::from_radius(self.radius, wavelength)
    }
}

/// The dimensionless size parameter `x = 2 pi a / lambda`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SizeParameter(f64);

impl SizeParameter {
    pub fn new(x: f64) -> Result<Self> {
        ensure_positive("size parameter", x)?;
        Ok(Self(x))
    }

    pub fn from_radius(radius: f64, wavelength: f64) -> Result<Self> {
        ensure_positive("radius", radius)?;
        ensure_positive("wavelength", wavelength)?;
        Self::new(2.0 * PI * radius / wavelength)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Real refractive index of the sphere relative to the surrounding vacuum.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RefractiveIndex(f64);

impl RefractiveIndex {
    pub fn new(m: f64) -> Result<Self> {
        ensure_positive("refractive index", m)?;
        Ok(Self(m))
    }

    /// Accepts a complex index only when its imaginary part vanishes.
    pub fn from_complex(m: Complex64) -> Result<Self> {
        if m.im != 0.0 {
            return Err(Error::ComplexIndex { re: m.re, im: m.im });
        }
        Self::new(m.re)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Electric (`a_n`, TM) or magnetic (`b_n`, TE) partial wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Electric,
    Magnetic,
}

impl ModeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Electric => "electric_a",
            ModeKind::Magnetic => "magnetic_b",
        }
    }
}

impl std::fmt::Display for ModeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "electric_a" | "a" | "electric" | "tm" => Ok(ModeKind::Electric),
            "magnetic_b" | "b" | "magnetic" | "te" => Ok(ModeKind::Magnetic),
            other => Err(Error::Domain(format!("unknown mode kind '{other}'"))),
        }
    }
}

/// Wiscombe's criterion for the number of partial waves needed at size `x`.
pub fn wiscombe_cutoff(x: f64) -> usize {
    (x + 4.0 * x.cbrt() + 2.0).ceil() as usize
}

/// Default series length: the Wiscombe cutoff plus a safety margin, which
/// leaves the trailing terms below [`CONVERGENCE_THRESHOLD`].
pub fn default_n_max(x: f64) -> usize {
    wiscombe_cutoff(x) + DEFAULT_EXTRA_TERMS
}

/// Mie coefficients `a_n`, `b_n` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MieSeries {
    x: f64,
    m: f64,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    below_cutoff: bool,
}

impl MieSeries {
    pub fn size_parameter(&self) -> f64 {
        self.x
    }

    pub fn refractive_index(&self) -> f64 {
        self.m
    }

    pub fn n_max(&self) -> usize {
        self.a.len()
    }

    /// `a_n` for 1-based `n`.
    pub fn a(&self, n: usize) -> Complex64 {
        self.a[n - 1]
    }

    /// `b_n` for 1-based `n`.
    pub fn b(&self, n: usize) -> Complex64 {
        self.b[n - 1]
    }

    pub fn coefficient(&self, kind: ModeKind, n: usize) -> Complex64 {
        match kind {
            ModeKind::Electric => self.a(n),
            ModeKind::Magnetic => self.b(n),
        }
    }

    pub fn a_coeffs(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b_coeffs(&self) -> &[Complex64] {
        &self.b
    }

    /// Set when `n_max` was below the Wiscombe cutoff for this `x`.
    pub fn below_cutoff(&self) -> bool {
        self.below_cutoff
    }

    /// Largest magnitude among the final `a_n`, `b_n` pair.
    pub fn last_term_magnitude(&self) -> f64 {
        let n = self.a.len();
        self.a[n - 1].norm().max(self.b[n - 1].norm())
    }

    fn ensure_converged(&self) -> Result<()> {
        let last = self.last_term_magnitude();
        if last >= CONVERGENCE_THRESHOLD {
            return Err(Error::Unconverged {
                n_max: self.n_max(),
                last_term: last,
            });
        }
        Ok(())
    }
}

/// Extinction and radiation-pressure efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiencies {
    pub q_ext: f64,
    pub q_rad: f64,
}

/// Downward recurrence for `D_n(z) = psi_n'(z)/psi_n(z)`, `n = 0..=n_max`.
fn log_derivative(z: f64, n_max: usize, n_start: usize) -> Vec<f64> {
    let mut d = vec![0.0; n_max + 1];
    let mut current = 0.0;
    for n in (1..=n_start).rev() {
        let nz = n as f64 / z;
        let prev = nz - 1.0 / (current + nz);
        if n - 1 <= n_max {
            d[n - 1] = prev;
        }
        if n <= n_max {
            d[n] = current;
        }
        current = prev;
    }
    d
}

/// Order at which the downward `D_n(mx)` recurrence is seeded with zero.
///
/// The seed error only contracts once `n` exceeds `mx`, so the start sits a
/// Wiscombe margin above `mx` rather than a fixed offset.
fn recurrence_start(x: f64, m: f64, n_max: usize) -> usize {
    wiscombe_cutoff(x).max(wiscombe_cutoff(m * x)).max(n_max) + 15
}

/// Real and imaginary parts of the Riccati-Bessel pair at order `n`,
/// reused by [`partial_wave`] and [`mie_coefficients`].
struct RiccatiBessel {
    psi_prev: f64,
    chi_prev: f64,
    psi: f64,
    chi: f64,
}

impl RiccatiBessel {
    fn start(x: f64) -> Self {
        let (s, c) = x.sin_cos();
        // psi_{-1}, chi_{-1} then psi_0, chi_0
        Self {
            psi_prev: c,
            chi_prev: -s,
            psi: s,
            chi: c,
        }
    }

    /// Advances from order `n-1` to order `n`.
    fn step(&mut self, n: usize, x: f64) {
        let f = (2 * n - 1) as f64 / x;
        let psi = f * self.psi - self.psi_prev;
        let chi = f * self.chi - self.chi_prev;
        self.psi_prev = self.psi;
        self.chi_prev = self.chi;
        self.psi = psi;
        self.chi = chi;
    }
}

/// A single partial wave written as `c_n = N / (N - i G)` with real `N`, `G`.
///
/// For a real index `c_n` lies on the circle `|c - 1/2| = 1/2`; it reaches
/// the top of the circle (`c_n = 1`) exactly where `G` vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialWave {
    pub numerator: f64,
    pub resonance_function: f64,
}

impl PartialWave {
    pub fn coefficient(&self) -> Complex64 {
        let (n, g) = (self.numerator, self.resonance_function);
        let denom = n * n + g * g;
        if denom == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(n * n / denom, n * g / denom)
    }

    /// `|c_n|^2`, which equals `Re(c_n)` for a real index.
    pub fn intensity(&self) -> f64 {
        let (n, g) = (self.numerator, self.resonance_function);
        let denom = n * n + g * g;
        if denom == 0.0 {
            0.0
        } else {
            n * n / denom
        }
    }
}

fn combine(kind: ModeKind, d: f64, n: usize, x: f64, m: f64, rb: &RiccatiBessel) -> PartialWave {
    let nx = n as f64 / x;
    let factor = match kind {
        ModeKind::Electric => d / m + nx,
        ModeKind::Magnetic => m * d + nx,
    };
    PartialWave {
        numerator: factor * rb.psi - rb.psi_prev,
        resonance_function: factor * rb.chi - rb.chi_prev,
    }
}

/// Evaluates one partial wave `a_n` or `b_n` without building the full series.
pub fn partial_wave(kind: ModeKind, n: usize, x: f64, m: f64) -> PartialWave {
    let mx = m * x;
    let n_start = recurrence_start(x, m, n);
    let mut d = 0.0;
    for k in ((n + 1)..=n_start).rev() {
        let kz = k as f64 / mx;
        d = kz - 1.0 / (d + kz);
    }
    let mut rb = RiccatiBessel::start(x);
    for k in 1..=n {
        rb.step(k, x);
    }
    combine(kind, d, n, x, m, &rb)
}

/// Computes `a_n`, `b_n` for `n = 1..=n_max`.
pub fn mie_coefficients(x: SizeParameter, m: RefractiveIndex, n_max: usize) -> Result<MieSeries> {
    let (x, m) = (x.value(), m.value());
    ensure_finite(&[("size parameter", x), ("refractive index", m)])?;
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let below_cutoff = n_max < wiscombe_cutoff(x);

    if m == 1.0 {
        let zero = vec![Complex64::new(0.0, 0.0); n_max];
        return Ok(MieSeries {
            x,
            m,
            a: zero.clone(),
            b: zero,
            below_cutoff,
        });
    }

    let d = log_derivative(m * x, n_max, recurrence_start(x, m, n_max));
    let mut rb = RiccatiBessel::start(x);
    let mut a = Vec::with_capacity(n_max);
    let mut b = Vec::with_capacity(n_max);
    for (n, &dn) in d.iter().enumerate().take(n_max + 1).skip(1) {
        rb.step(n, x);
        a.push(combine(ModeKind::Electric, dn, n, x, m, &rb).coefficient());
        b.push(combine(ModeKind::Magnetic, dn, n, x, m, &rb).coefficient());
    }
    Ok(MieSeries {
        x,
        m,
        a,
        b,
        below_cutoff,
    })
}

/// `Q_ext = (2/x^2) sum (2n+1) Re(a_n + b_n)`.
pub fn q_ext(series: &MieSeries) -> Result<f64> {
    series.ensure_converged()?;
    let x = series.x;
    let sum: f64 = series
        .a
        .iter()
        .zip(&series.b)
        .enumerate()
        .map(|(i, (a, b))| (2 * i + 3) as f64 * (a.re + b.re))
        .sum();
    Ok(2.0 / (x * x) * sum)
}

/// Radiation-pressure efficiency
/// `Q_rad = Q_ext - (4/x^2) sum [ n(n+2)/(n+1) Re(a_n a*_{n+1} + b_n b*_{n+1})
///                                + (2n+1)/(n(n+1)) Re(a_n b*_n) ]`.
pub fn q_rad(series: &MieSeries) -> Result<f64> {
    let ext = q_ext(series)?;
    Ok(ext - asymmetry_term(series))
}

/// The `g Q_sca` part of `Q_rad`, summed from `n = 1`.
fn asymmetry_term(series: &MieSeries) -> f64 {
    let (a, b) = (&series.a, &series.b);
    let n_max = a.len();
    let mut sum = 0.0;
    for i in 0..n_max {
        let n = (i + 1) as f64;
        if i + 1 < n_max {
            let cross = a[i] * a[i + 1].conj() + b[i] * b[i + 1].conj();
            sum += n * (n + 2.0) / (n + 1.0) * cross.re;
        }
        sum += (2.0 * n + 1.0) / (n * (n + 1.0)) * (a[i] * b[i].conj()).re;
    }
    4.0 / (series.x * series.x) * sum
}

/// Both efficiencies at the default series length.
pub fn efficiencies(x: SizeParameter, m: RefractiveIndex) -> Result<Efficiencies> {
    let series = mie_coefficients(x, m, default_n_max(x.value()))?;
    Ok(Efficiencies {
        q_ext: q_ext(&series)?,
        q_rad: q_rad(&series)?,
    })
}

/// Force `F = (P/c) Q_rad` on the sphere, in newtons.
pub fn radiation_force(power: f64, q_rad: f64) -> Result<f64> {
    ensure_non_negative("power", power)?;
    ensure_finite(&[("q_rad", q_rad)])?;
    Ok(power / SPEED_OF_LIGHT * q_rad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn series(x: f64, m: f64) -> MieSeries {
        mie_coefficients(
            SizeParameter::new(x).unwrap(),
            RefractiveIndex::new(m).unwrap(),
            default_n_max(x),
        )
        .unwrap()
    }

    #[test]
    fn index_matched_sphere_scatters_nothing() {
        let s = mie_coefficients(
            SizeParameter::new(10.0).unwrap(),
            RefractiveIndex::new(1.0).unwrap(),
            20,
        )
        .unwrap();
        assert!(s.a_coeffs().iter().chain(s.b_coeffs()).all(|c| c.re == 0.0 && c.im == 0.0));
        assert_eq!(q_ext(&series(7.0, 1.0)).unwrap(), 0.0);
        assert_eq!(q_rad(&series(7.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn coefficients_lie_on_unitarity_circle() {
        let s = mie_coefficients(
            SizeParameter::new(40.0).unwrap(),
            RefractiveIndex::new(1.45).unwrap(),
            60,
        )
        .unwrap();
        for c in s.a_coeffs().iter().chain(s.b_coeffs()) {
            assert!(((c - 0.5).norm() - 0.5).abs() < 1e-8, "{c}");
        }
    }

    #[test]
    fn rayleigh_limit() {
        let (x, m): (f64, f64) = (0.1, 1.5);
        let oracle = 8.0 / 3.0 * x.powi(4) * ((m * m - 1.0) / (m * m + 2.0)).powi(2);
        assert_relative_eq!(oracle, 2.31e-5, max_relative = 5e-3);
        let s = series(x, m);
        assert_relative_eq!(q_ext(&s).unwrap(), oracle, max_relative = 0.02);
        assert_relative_eq!(q_rad(&s).unwrap(), oracle, max_relative = 0.02);
    }

    #[test]
    fn tail_terms_are_negligible() {
        for &x in &[1.0, 10.0, 40.5] {
            let s = series(x, 1.5);
            for n in (wiscombe_cutoff(x) + 10)..=s.n_max() {
                assert!(s.a(n).norm() < 1e-14 && s.b(n).norm() < 1e-14, "x={x} n={n}");
            }
        }
    }

    #[test]
    fn short_series_is_flagged_and_rejected() {
        let s = mie_coefficients(
            SizeParameter::new(20.0).unwrap(),
            RefractiveIndex::new(1.5).unwrap(),
            10,
        )
        .unwrap();
        assert!(s.below_cutoff());
        match q_ext(&s) {
            Err(Error::Unconverged { n_max, last_term }) => {
                assert_eq!(n_max, 10);
                assert!(last_term > 1e-14);
            }
            other => panic!("expected unconverged error, got {other:?}"),
        }
        assert!(matches!(q_rad(&s), Err(Error::Unconverged { .. })));
    }

    #[test]
    fn partial_wave_matches_series() {
        let s = series(12.3, 1.45);
        for n in [1, 5, 12, 18] {
            let a = partial_wave(ModeKind::Electric, n, 12.3, 1.45).coefficient();
            let b = partial_wave(ModeKind::Magnetic, n, 12.3, 1.45).coefficient();
            assert!((a - s.a(n)).norm() < 1e-13);
            assert!((b - s.b(n)).norm() < 1e-13);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(SizeParameter::new(f64::NAN).is_err());
        assert!(SizeParameter::new(-1.0).is_err());
        assert!(RefractiveIndex::new(f64::INFINITY).is_err());
        assert!(matches!(
            RefractiveIndex::from_complex(Complex64::new(1.45, 1e-6)),
            Err(Error::ComplexIndex { .. })
        ));
        assert!(RefractiveIndex::from_complex(Complex64::new(1.45, 0.0)).is_ok());
        assert!(radiation_force(-1.0, 0.5).is_err());
        assert_eq!(radiation_force(0.0, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn sphere_mass_from_density() {
        let s = Sphere::new(10e-6, 1.45, 2200.0).unwrap();
        let expected = 4.0 / 3.0 * PI * 1e-15 * 2200.0;
        assert_relative_eq!(s.mass(), expected, max_relative = 1e-12);
        assert!(!s.mass_overridden());
        let s = s.with_mass(4e-12).unwrap();
        assert_eq!(s.mass(), 4e-12);
        assert!(Sphere::new(0.0, 1.45, 2200.0).is_err());
        let x = Sphere::new(5e-6, 1.45, 2200.0).unwrap().size_parameter(773e-9).unwrap();
        assert_relative_eq!(x.value(), 2.0 * PI * 5e-6 / 773e-9);
    }

    #[test]
    fn efficiencies_bounded() {
        for &x in &[0.5, 3.0, 15.0, 39.7] {
            let e = efficiencies(SizeParameter::new(x).unwrap(), RefractiveIndex::new(1.45).unwrap()).unwrap();
            assert!(e.q_ext >= 0.0);
            assert!(e.q_rad >= 0.0 && e.q_rad <= e.q_ext * (1.0 + 1e-9), "x={x} {e:?}");
        }
    }
}
