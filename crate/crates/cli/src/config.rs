//! Run configuration: a flat TOML file, then command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;
use sympoctl_core::optimizer::{Algorithm, InitKind, LineSearchOptions, OptimizerOptions};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: String,
    pub gate: String,
    pub t_f: f64,
    pub steps: usize,
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    pub j_tolerance: f64,
    pub gradient_tolerance: f64,
    pub restart_interval: Option<usize>,
    pub instability_cap: f64,
    pub line_search_growth: f64,
    pub line_search_tolerance: f64,
    pub line_search_max_evaluations: usize,
    pub line_search_initial_step: f64,
    pub init: InitKind,
    pub amplitude: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let opts = OptimizerOptions::default();
        let ls = LineSearchOptions::default();
        Self {
            model: "photon:2".into(),
            gate: "sum".into(),
            t_f: 1.0,
            steps: 21,
            algorithm: opts.algorithm,
            max_iterations: opts.max_iterations,
            j_tolerance: opts.j_tolerance,
            gradient_tolerance: opts.gradient_tolerance,
            restart_interval: opts.restart_interval,
            instability_cap: opts.instability_cap,
            line_search_growth: ls.growth,
            line_search_tolerance: ls.tolerance,
            line_search_max_evaluations: ls.max_evaluations,
            line_search_initial_step: ls.initial_step,
            init: InitKind::Random,
            amplitude: 0.5,
            seed: 0,
            out: None,
        }
    }
}

/// Values given on the command line; each one replaces the config entry.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub gate: Option<String>,
    pub seed: Option<u64>,
    pub t_f: Option<f64>,
    pub steps: Option<usize>,
    pub algorithm: Option<Algorithm>,
    pub init: Option<InitKind>,
    pub amplitude: Option<f64>,
    pub max_iterations: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        // The TOML error already carries the offending line and a caret.
        Self::parse(&text).map_err(|e| anyhow::anyhow!("invalid config {}:\n{e}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.model {
            self.model = v.clone();
        }
        if let Some(v) = &o.gate {
            self.gate = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.t_f {
            self.t_f = v;
        }
        if let Some(v) = o.steps {
            self.steps = v;
        }
        if let Some(v) = o.algorithm {
            self.algorithm = v;
        }
        if let Some(v) = o.init {
            self.init = v;
        }
        if let Some(v) = o.amplitude {
            self.amplitude = v;
        }
        if let Some(v) = o.max_iterations {
            self.max_iterations = v;
        }
    }

    pub fn optimizer_options(&self) -> OptimizerOptions {
        OptimizerOptions {
            algorithm: self.algorithm,
            max_iterations: self.max_iterations,
            j_tolerance: self.j_tolerance,
            gradient_tolerance: self.gradient_tolerance,
            line_search: LineSearchOptions {
                growth: self.line_search_growth,
                tolerance: self.line_search_tolerance,
                max_evaluations: self.line_search_max_evaluations,
                initial_step: self.line_search_initial_step,
            },
            restart_interval: self.restart_interval,
            instability_cap: self.instability_cap,
        }
    }
}
