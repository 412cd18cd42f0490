//! Flat `key = value` configuration with dotted namespaces.
//!
//! Lines are `key = value`; `#` starts a comment. `[section]` headers are
//! allowed so that a report can be fed back as a config: only keys before
//! the first header or inside `[config]` are read.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Float,
    Int,
    Bool,
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Any,
    Positive,
    NonNegative,
    /// Open interval `(0, 1)`.
    UnitOpen,
    AtLeast(i64),
    Between(i64, i64),
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    pub bound: Bound,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn spec(key: &'static str, kind: Kind, bound: Bound, default: Option<&'static str>, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        kind,
        bound,
        default,
        help,
    }
}

use Bound::*;
use Kind::*;

pub const MODE_KINDS: &[&str] = &["electric_a", "magnetic_b"];
pub const TRAP_KINDS: &[&str] = &["optical_trap", "cantilever"];
pub const BEAM_SIGNS: &[&str] = &["plus", "minus"];
pub const TOY_MODELS: &[&str] = &["fp", "ring"];

pub const SCHEMA: &[KeySpec] = &[
    spec("sphere.radius_m", Float, Positive, None, "sphere radius"),
    spec("sphere.index", Float, Positive, None, "real refractive index"),
    spec("beam.wavelength_m", Float, Positive, None, "vacuum wavelength"),
    spec("beam.power_w", Float, NonNegative, None, "resonant (peak) power P_p per beam"),
    spec("beam.background_power_w", Float, NonNegative, Some("0"), "non-resonant power P_0 per beam"),
    spec("beam.linewidth_hz", Float, Positive, None, "resonance HWHM delta / 2pi"),
    spec("beam.detuning_hz", Float, Any, None, "laser minus resonance, / 2pi"),
    spec("beam.detuning_linewidths", Float, Any, None, "detuning in units of the linewidth"),
    spec("beam.count", Int, Between(0, 2), Some("2"), "number of cooling beams"),
    spec("beam.sign", Choice(BEAM_SIGNS), Any, Some("plus"), "direction of a single beam"),
    spec("trap.kind", Choice(TRAP_KINDS), Any, Some("optical_trap"), "trap type"),
    spec("trap.spring_constant_n_per_m", Float, Positive, None, "trap stiffness"),
    spec("trap.mass_kg", Float, Positive, None, "(effective) mass"),
    spec("trap.frequency_hz", Float, Positive, None, "trap frequency omega_0 / 2pi"),
    spec("gas.pressure_pa", Float, NonNegative, None, "gas pressure"),
    spec("gas.temperature_k", Float, Positive, Some("288"), "gas temperature"),
    spec("gas.viscosity_pa_s", Float, NonNegative, Some("1.81e-5"), "dynamic viscosity"),
    spec("gas.molar_mass_kg_per_mol", Float, Positive, Some("0.02897"), "molar mass"),
    spec("gas.target_damping_kg_per_s", Float, Positive, None, "damping to match for the crossover pressure"),
    spec("sim.include_gas", Bool, Any, Some("false"), "add gas drag and noise"),
    spec("sim.duration_s", Float, Positive, None, "simulated time"),
    spec("sim.timestep_s", Float, Positive, None, "integration step"),
    spec("sim.seed", Int, AtLeast(0), Some("0"), "noise seed"),
    spec("sim.record_stride", Int, AtLeast(1), Some("1"), "record every n-th step"),
    spec("sim.x0_m", Float, Any, Some("0"), "initial position"),
    spec("sim.v0_m_per_s", Float, Any, Some("0"), "initial velocity"),
    spec("sim.recoil_noise", Bool, Any, Some("true"), "photon recoil kicks"),
    spec("sim.thermal_noise", Bool, Any, Some("true"), "gas Langevin force"),
    spec("sim.extra_damping_kg_per_s", Float, NonNegative, Some("0"), "noiseless linear damping"),
    spec("sim.window_start_s", Float, NonNegative, None, "start of the temperature window"),
    spec("sim.decay_end_s", Float, Positive, None, "end of the energy-decay fit window"),
    spec("spectrum.x_min", Float, Positive, None, "first size parameter"),
    spec("spectrum.x_max", Float, Positive, None, "last size parameter"),
    spec("spectrum.step", Float, Positive, None, "size-parameter step"),
    spec("spectrum.power_w", Float, NonNegative, Some("0.01"), "incident power for the force column"),
    spec("resonance.kind", Choice(MODE_KINDS), Any, Some("electric_a"), "partial-wave family"),
    spec("resonance.n", Int, AtLeast(1), None, "partial-wave number"),
    spec("resonance.l", Int, AtLeast(1), Some("1"), "radial order"),
    spec("resonance.x_min", Float, Positive, None, "search bracket start"),
    spec("resonance.x_max", Float, Positive, None, "search bracket end"),
    spec("resonance.power_w", Float, NonNegative, Some("0.01"), "power for the force levels"),
    spec("toy.model", Choice(TOY_MODELS), Any, None, "fp or ring"),
    spec("toy.reflectivity", Float, UnitOpen, None, "mirror amplitude reflectivity r"),
    spec("toy.reflectivity2", Float, UnitOpen, None, "mirror power reflectivity r^2"),
    spec("toy.mirrors", Int, AtLeast(3), Some("8"), "ring mirror count"),
    spec("toy.points", Int, AtLeast(8), Some("2000"), "phases per sweep"),
    spec("toy.power_w", Float, NonNegative, Some("1"), "incident power per ray"),
];

pub fn lookup(key: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|s| s.key == key)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(v) => write!(f, "{v:e}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Text(v) => f.write_str(v),
        }
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

/// Parses and range-checks `raw` for `key`.
pub fn parse_value(key: &str, raw: &str) -> Result<Value, CliError> {
    let spec = lookup(key).ok_or_else(|| usage(format!("unknown config key '{key}'")))?;
    let raw = raw.trim();
    let bad = |what: &str| usage(format!("{key}: {what}, got '{raw}'"));
    let value = match spec.kind {
        Float => {
            let v: f64 = raw.parse().map_err(|_| bad("expected a number"))?;
            if !v.is_finite() {
                return Err(bad("expected a finite number"));
            }
            let ok = match spec.bound {
                Positive => v > 0.0,
                NonNegative => v >= 0.0,
                UnitOpen => v > 0.0 && v < 1.0,
                _ => true,
            };
            if !ok {
                return Err(bad(match spec.bound {
                    Positive => "must be > 0",
                    NonNegative => "must be >= 0",
                    _ => "must lie in (0, 1)",
                }));
            }
            Value::Float(v)
        }
        Int => {
            let v: i64 = raw.parse().map_err(|_| bad("expected an integer"))?;
            let ok = match spec.bound {
                AtLeast(lo) => v >= lo,
                Between(lo, hi) => (lo..=hi).contains(&v),
                _ => true,
            };
            if !ok {
                return Err(bad(&match spec.bound {
                    AtLeast(lo) => format!("must be >= {lo}"),
                    Between(lo, hi) => format!("must lie in {lo}..={hi}"),
                    _ => unreachable!(),
                }));
            }
            Value::Int(v)
        }
        Bool => Value::Bool(match raw {
            "true" => true,
            "false" => false,
            _ => return Err(bad("expected true or false")),
        }),
        Choice(options) => {
            if !options.contains(&raw) {
                return Err(bad(&format!("expected one of {}", options.join(", "))));
            }
            Value::Text(raw.to_string())
        }
    };
    Ok(value)
}

/// A resolved configuration: defaults plus every override, keyed by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    values: BTreeMap<&'static str, Value>,
}

impl RunConfig {
    pub fn with_defaults() -> Self {
        let mut cfg = Self::default();
        for s in SCHEMA {
            if let Some(d) = s.default {
                cfg.values.insert(s.key, parse_value(s.key, d).expect("schema defaults are valid"));
            }
        }
        cfg
    }

    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), CliError> {
        let value = parse_value(key, raw)?;
        let key = lookup(key).expect("checked by parse_value").key;
        self.values.insert(key, value);
        Ok(())
    }

    /// Applies every `key = value` line of `text`. `origin` names the source
    /// in error messages.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        let mut reading = true;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(section) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                reading = section.trim() == "config";
                continue;
            }
            if !reading {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{origin}:{}: expected 'key = value', got '{line}'", i + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| usage(format!("{origin}:{}: {}", i + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::with_defaults();
        cfg.apply_text(text, "<config>")?;
        Ok(cfg)
    }

    pub fn remove(&mut self, key: &str) {
        self.values.remove(key);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        debug_assert!(lookup(key).is_some(), "unknown key {key}");
        self.values.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some(Value::Float(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn int(&self, key: &str) -> Option<i64> {
        match self.get(key) {
            Some(Value::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn bool(&self, key: &str) -> Option<bool> {
        match self.get(key) {
            Some(Value::Bool(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.get(key) {
            Some(Value::Text(v)) => Some(v),
            _ => None,
        }
    }

    /// Fails with a usage error naming every absent key.
    pub fn require(&self, command: &str, keys: &[&str]) -> Result<(), CliError> {
        let missing: Vec<&str> = keys.iter().copied().filter(|k| !self.contains(k)).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(usage(format!(
                "'{command}' is missing required config keys: {}",
                missing.join(", ")
            )))
        }
    }

    /// Canonical `key = value` lines in key order.
    pub fn render(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = RunConfig::parse("# comment\nsphere.index = 1.45  # trailing\nbeam.count=1\n").unwrap();
        assert_eq!(cfg.float("sphere.index"), Some(1.45));
        assert_eq!(cfg.int("beam.count"), Some(1));
        assert_eq!(cfg.float("gas.temperature_k"), Some(288.0));
        assert!(!cfg.contains("sphere.radius_m"));
    }

    #[test]
    fn unknown_key_named() {
        let err = RunConfig::parse("sphere.colour = red\n").unwrap_err();
        assert!(err.message().contains("sphere.colour"), "{}", err.message());
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn values_validated() {
        for bad in [
            "sphere.radius_m = -1",
            "sphere.radius_m = abc",
            "beam.count = 3",
            "toy.reflectivity2 = 1",
            "toy.model = prism",
            "sim.include_gas = yes",
            "sphere.index = inf",
            "just text",
        ] {
            assert!(RunConfig::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn render_round_trips() {
        let mut cfg = RunConfig::with_defaults();
        cfg.set("sphere.index", "1.4496314079440127").unwrap();
        cfg.set("beam.detuning_hz", "-3.2e7").unwrap();
        cfg.set("toy.model", "ring").unwrap();
        let text = format!("[config]\n{}[results]\nanything = goes\n", cfg.render());
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn missing_keys_listed() {
        let cfg = RunConfig::with_defaults();
        let err = cfg.require("gas", &["sphere.radius_m", "gas.pressure_pa"]).unwrap_err();
        assert!(err.message().contains("sphere.radius_m, gas.pressure_pa"));
    }

    #[test]
    fn schema_defaults_parse() {
        RunConfig::with_defaults();
        let mut keys: Vec<_> = SCHEMA.iter().map(|s| s.key).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), SCHEMA.len());
    }
}
