use std::fmt::Display;

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Plain-text run report: header, resolved config, results, warnings.
#[derive(Debug, Clone)]
pub struct Report {
    command: &'static str,
    config: String,
    results: Vec<(String, String)>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, config: &RunConfig) -> Self {
        Self {
            command,
            config: config.render(),
            results: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn add(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.results.push((key.to_string(), value.to_string()));
        self
    }

    /// Floats in shortest round-trip exponent form.
    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.add(key, format!("{value:e}"))
    }

    pub fn opt(&mut self, key: &str, value: Option<f64>) -> &mut Self {
        match value {
            Some(v) => self.num(key, v),
            None => self.add(key, "n/a"),
        }
    }

    pub fn warn(&mut self, message: impl Into<String>) -> &mut Self {
        self.warnings.push(message.into());
        self
    }

    pub fn result(&self, key: &str) -> Option<&str> {
        self.results.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = format!("# sphercool {VERSION} {}\n[config]\n{}[results]\n", self.command, self.config);
        for (k, v) in &self.results {
            out.push_str(&format!("{k} = {v}\n"));
        }
        if !self.warnings.is_empty() {
            out.push_str("[warnings]\n");
            for w in &self.warnings {
                out.push_str(&format!("warning = {w}\n"));
            }
        }
        out
    }
}
