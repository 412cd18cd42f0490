use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input was non-finite or outside its physical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Mie series had not decayed below the convergence threshold.
    #[error("Mie series not converged: last term magnitude {last_term:e} (n_max = {n_max})")]
    Unconverged { n_max: usize, last_term: f64 },

    /// Only real refractive indices are supported.
    #[error("complex refractive index {re} + {im}i is not supported (non-absorbing spheres only)")]
    ComplexIndex { re: f64, im: f64 },

    #[error("scan of {requested} samples exceeds the sample budget of {budget}")]
    SampleBudget { requested: usize, budget: usize },

    #[error("resonance {kind} n={n} l={l} not found in [{lo}, {hi}]; peaks seen at {seen:?}")]
    ResonanceNotFound {
        kind: String,
        n: usize,
        l: usize,
        lo: f64,
        hi: f64,
        seen: Vec<f64>,
    },

    #[error("fit did not converge after {iterations} iterations (residual norm {residual_norm:e})")]
    FitNotConverged { iterations: usize, residual_norm: f64 },

    #[error("no peak in the fit window")]
    NoPeak,

    #[error("timestep {timestep:e} s violates the stability bound {bound:e} s ({which})")]
    UnstableTimestep {
        timestep: f64,
        bound: f64,
        which: &'static str,
    },

    #[error("averaging window of {got:e} s is shorter than the minimum {min:e} s")]
    WindowTooShort { got: f64, min: f64 },

    #[error("energy envelope is not decaying")]
    NotDecaying,

    #[error("no damping at zero detuning, Doppler limit undefined")]
    NoDamping,
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that every value is finite, naming the first offender.
pub(crate) fn ensure_finite(values: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in values {
        if !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be finite, got {v}")));
        }
    }
    Ok(())
}

pub(crate) fn ensure_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Domain(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

pub(crate) fn ensure_non_negative(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
    }
    Ok(())
}
