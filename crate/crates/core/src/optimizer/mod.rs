//! Control-field search.
//!
//! [`optimize`] runs Polak–Ribière conjugate gradients (or plain steepest
//! descent) on the sampled field. Gradients come from
//! [`crate::landscape::evaluate_with_gradient`] scaled by `Δt`, and each
//! iteration does a bracketed Brent line minimization along the direction.

mod analysis;
mod field;
mod line_search;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::GateTarget;
use crate::landscape::{evaluate, evaluate_with_gradient};
use crate::models::ControlSystem;
use crate::scalar::{lit, to_f64, Real};
use crate::symplectic::{cfrobenius, frobenius, Propagator};

pub use analysis::{fluence, fourier_spectrum, Spectrum};
pub use field::{initial_field, ControlField, InitKind};
pub use line_search::{line_minimize, LineMinimum, LineSearchOptions};

/// Search direction rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "cg-pr", alias = "cg")]
    CgPr,
    #[serde(rename = "steepest", alias = "sd")]
    Steepest,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cg" | "cg-pr" => Ok(Algorithm::CgPr),
            "sd" | "steepest" => Ok(Algorithm::Steepest),
            other => Err(Error::InvalidArgument(format!("unknown algorithm '{other}' (expected cg or sd)"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::CgPr => "cg-pr",
            Algorithm::Steepest => "steepest",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    pub j_tolerance: f64,
    pub gradient_tolerance: f64,
    pub line_search: LineSearchOptions,
    /// Iterations between forced steepest-descent restarts; `None` uses the
    /// number of field parameters.
    pub restart_interval: Option<usize>,
    /// Propagators with Frobenius norm above this count as blown up.
    pub instability_cap: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::CgPr,
            max_iterations: 5000,
            j_tolerance: 1e-4,
            gradient_tolerance: 1e-8,
            line_search: LineSearchOptions::default(),
            restart_interval: None,
            instability_cap: 1e6,
        }
    }
}

impl OptimizerOptions {
    fn validate(&self) -> Result<()> {
        let ls = &self.line_search;
        let ok = self.j_tolerance > 0.0
            && self.gradient_tolerance > 0.0
            && self.instability_cap > 0.0
            && ls.tolerance > 0.0
            && ls.initial_step > 0.0
            && ls.growth > 1.0
            && self.restart_interval != Some(0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("optimizer tolerances, step and cap must be positive".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationReason {
    /// `J` reached the tolerance.
    Converged,
    /// The gradient vanished with `J` still above tolerance.
    Stationary,
    MaxIter,
    LineSearchFailure,
    /// The propagator blew up or lost symplecticity.
    Instability,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::Converged => "converged",
            TerminationReason::Stationary => "stationary",
            TerminationReason::MaxIter => "max-iter",
            TerminationReason::LineSearchFailure => "line-search-failure",
            TerminationReason::Instability => "instability",
        }
    }
}

impl std::fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the optimization trace; iteration 0 is the initial field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub value: f64,
    pub gradient_norm: f64,
    pub step: f64,
    pub fluence: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizationTrace<T: Real> {
    pub records: Vec<IterationRecord>,
    pub final_field: ControlField<T>,
    /// `None` only when the initial field could not be propagated.
    pub final_propagator: Option<Propagator<T>>,
    pub termination: TerminationReason,
}

impl<T: Real> OptimizationTrace<T> {
    pub fn final_value(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.value)
    }

    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iteration)
    }

    pub fn converged(&self) -> bool {
        self.termination == TerminationReason::Converged
    }

    /// First iteration at which `J ≤ level`.
    pub fn iterations_to(&self, level: f64) -> Option<usize> {
        self.records.iter().find(|r| r.value <= level).map(|r| r.iteration)
    }
}

fn propagator_norm<T: Real>(p: &Propagator<T>) -> T {
    match p {
        Propagator::Symplectic(s) => frobenius(s.matrix()),
        Propagator::Unitary(u) => cfrobenius(u.matrix()),
    }
}

fn is_instability(e: &Error) -> bool {
    matches!(e, Error::SymplecticDrift { .. } | Error::NonFinite(_) | Error::Eigen(_))
}

fn dot<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.dot(b)
}

/// Searches for a field that steers `system` to `target`, starting from `init`.
pub fn optimize<T: Real>(
    system: &ControlSystem<T>,
    target: &GateTarget<T>,
    options: &OptimizerOptions,
    init: ControlField<T>,
) -> Result<OptimizationTrace<T>> {
    options.validate()?;
    if init.n_controls() != system.n_controls() {
        return Err(Error::DimensionMismatch { expected: system.n_controls(), found: init.n_controls() });
    }
    let cap = lit::<T>(options.instability_cap);
    let dt = init.dt();
    let restart = options.restart_interval.unwrap_or(init.n_controls() * init.n_steps());
    let j_tol = lit::<T>(options.j_tolerance);
    let g_tol = lit::<T>(options.gradient_tolerance);

    let mut field = init;
    let mut records = Vec::new();
    let record = |iteration: usize, value: T, grad: &DMatrix<T>, step: T, field: &ControlField<T>| IterationRecord {
        iteration,
        value: to_f64(value),
        gradient_norm: to_f64(grad.norm()),
        step: to_f64(step),
        fluence: to_f64(fluence(field)),
    };

    let mut eval = match evaluate_with_gradient(system, &field, target) {
        Ok(e) => e,
        Err(e) if is_instability(&e) => {
            return Ok(OptimizationTrace {
                records,
                final_field: field,
                final_propagator: None,
                termination: TerminationReason::Instability,
            });
        }
        Err(e) => return Err(e),
    };
    let mut grad = &eval.gradient * dt;
    records.push(record(0, eval.value, &grad, T::zero(), &field));
    let finish = |records: Vec<IterationRecord>, field, eval: crate::landscape::Evaluation<T>, reason| {
        Ok(OptimizationTrace { records, final_field: field, final_propagator: Some(eval.propagator), termination: reason })
    };
    if propagator_norm(&eval.propagator) > cap || !eval.value.is_finite() {
        return finish(records, field, eval, TerminationReason::Instability);
    }
    if eval.value <= j_tol {
        return finish(records, field, eval, TerminationReason::Converged);
    }
    if grad.norm() <= g_tol {
        return finish(records, field, eval, TerminationReason::Stationary);
    }

    let mut direction = -&grad;
    let mut since_restart = 0usize;
    let mut last_alpha: Option<T> = None;
    let mut guard_tripped = false;
    for iteration in 1..=options.max_iterations {
        if dot(&direction, &grad) >= T::zero() {
            direction = -&grad;
            since_restart = 0;
        }
        let mut attempt = 0;
        let minimum = loop {
            let dnorm = direction.norm();
            let trial = last_alpha.unwrap_or(lit::<T>(options.line_search.initial_step) / dnorm);
            let phi = |alpha: T| -> T {
                let Ok(candidate) = field.stepped(&direction, alpha) else {
                    return T::max_value().unwrap_or(T::one());
                };
                match evaluate(system, &candidate, target) {
                    Ok((v, p)) if propagator_norm(&p) <= cap => v,
                    Ok(_) | Err(_) => {
                        guard_tripped = true;
                        T::max_value().unwrap_or(T::one())
                    }
                }
            };
            let m = line_minimize(phi, eval.value, trial, &options.line_search);
            if m.value < eval.value || attempt > 0 {
                break m;
            }
            // Retry once along the raw gradient with a fresh trial step.
            attempt += 1;
            direction = -&grad;
            since_restart = 0;
            last_alpha = None;
        };
        if !(minimum.value < eval.value) {
            let reason =
                if guard_tripped { TerminationReason::Instability } else { TerminationReason::LineSearchFailure };
            return finish(records, field, eval, reason);
        }
        field = field.stepped(&direction, minimum.alpha)?;
        last_alpha = Some(minimum.alpha);
        eval = match evaluate_with_gradient(system, &field, target) {
            Ok(e) => e,
            Err(e) if is_instability(&e) => {
                return Ok(OptimizationTrace {
                    records,
                    final_field: field,
                    final_propagator: None,
                    termination: TerminationReason::Instability,
                });
            }
            Err(e) => return Err(e),
        };
        let new_grad = &eval.gradient * dt;
        records.push(record(iteration, eval.value, &new_grad, minimum.alpha, &field));
        if eval.value <= j_tol {
            return finish(records, field, eval, TerminationReason::Converged);
        }
        if new_grad.norm() <= g_tol {
            return finish(records, field, eval, TerminationReason::Stationary);
        }
        since_restart += 1;
        let beta = match options.algorithm {
            Algorithm::Steepest => T::zero(),
            Algorithm::CgPr if since_restart >= restart => {
                since_restart = 0;
                T::zero()
            }
            Algorithm::CgPr => {
                let denom = dot(&grad, &grad);
                (dot(&new_grad, &(&new_grad - &grad)) / denom).max(T::zero())
            }
        };
        direction = &direction * beta - &new_grad;
        grad = new_grad;
    }
    finish(records, field, eval, TerminationReason::MaxIter)
}
