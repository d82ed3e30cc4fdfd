//! Strategies and property bodies shared by the randomized suites and the
//! acceptance runner.
#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use sympoctl_core::gates::parse_gate;
use sympoctl_core::landscape::{flow_start, gradient_flow, FlowOptions, FlowStart};
use sympoctl_core::models::{parse_model, ControlSystem};
use sympoctl_core::optimizer::{initial_field, optimize, Algorithm, ControlField, InitKind, OptimizerOptions};
use sympoctl_core::symplectic::{expm, propagate_symplectic, symplectic_form};

pub type Outcome = Result<(), TestCaseError>;

pub const SYMPLECTIC_MODELS: [&str; 6] = ["photon:2", "photon:3", "strong", "iontrap", "swap:squeezing", "swap:linear"];

pub fn model(name: &str) -> ControlSystem<f64> {
    parse_model(name).unwrap()
}

/// Model, final time, grid size and a field with entries in `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct FieldCase {
    pub model: String,
    pub t_f: f64,
    pub q: usize,
    pub values: Vec<f64>,
}

impl FieldCase {
    pub fn system(&self) -> ControlSystem<f64> {
        model(&self.model)
    }

    pub fn field(&self) -> ControlField<f64> {
        let m = self.system().n_controls();
        ControlField::new(self.t_f, DMatrix::from_column_slice(m, self.q, &self.values)).unwrap()
    }
}

pub fn field_case() -> impl Strategy<Value = FieldCase> {
    (0..SYMPLECTIC_MODELS.len(), 0.1f64..2.0, 2usize..40).prop_flat_map(|(m, t_f, q)| {
        let name = SYMPLECTIC_MODELS[m];
        let n = model(name).n_controls() * q;
        prop::collection::vec(-1.0f64..1.0, n).prop_map(move |values| FieldCase { model: name.to_string(), t_f, q, values })
    })
}

pub fn symplecticity(c: &FieldCase) -> Outcome {
    let sys = c.system();
    let states = propagate_symplectic(&sys, &c.field()).unwrap();
    prop_assert_eq!(states.len(), c.q);
    let j = symplectic_form::<f64>(sys.n_modes().unwrap()).unwrap();
    for s in &states {
        let r = (s.matrix().transpose() * j.matrix() * s.matrix() - j.matrix()).norm();
        prop_assert!(r <= 1e-8 * c.q as f64, "residual {r}");
    }
    Ok(())
}

pub fn unit_determinant(c: &FieldCase) -> Outcome {
    for s in propagate_symplectic(&c.system(), &c.field()).unwrap() {
        prop_assert!((s.determinant() - 1.0).abs() <= 1e-8, "det {}", s.determinant());
    }
    Ok(())
}

/// Propagating `[0, t_k]` then `[t_k, t_f]` reproduces the single pass.
pub fn composition(c: &FieldCase, cut: f64) -> Outcome {
    let sys = c.system();
    let f = c.field();
    let q = c.q;
    let k = 1 + ((q.saturating_sub(2)) as f64 * cut).round() as usize;
    prop_assume!(q >= 3 && k < q - 1);
    let whole = propagate_symplectic(&sys, &f).unwrap().pop().unwrap();
    let a = f.amplitudes();
    let head = ControlField::new(f.dt() * k as f64, a.columns(0, k + 1).into_owned()).unwrap();
    let tail = ControlField::new(f.dt() * (q - 1 - k) as f64, a.columns(k, q - k).into_owned()).unwrap();
    let s1 = propagate_symplectic(&sys, &head).unwrap().pop().unwrap();
    let s2 = propagate_symplectic(&sys, &tail).unwrap().pop().unwrap();
    let err = (s2.matrix() * s1.matrix() - whole.matrix()).norm();
    prop_assert!(err <= 1e-10 * (1.0 + whole.matrix().norm_squared()), "err {err}");
    Ok(())
}

/// Generator of dimension `2n` with Frobenius norm `scale ≤ 10`.
pub fn generator() -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..5, prop::collection::vec(-1.0f64..1.0, 64), 0.0f64..10.0).prop_filter_map("zero matrix", |(n, e, scale)| {
        let d = 2 * n;
        let raw = DMatrix::from_column_slice(d, d, &e[..d * d]);
        let norm = raw.norm();
        (norm > 0.0).then(|| raw * (scale / norm))
    })
}

/// `expm(A) expm(−A) = I`, to `1e−10` relative to the conditioning of the pair.
pub fn expm_inverse(a: &DMatrix<f64>) -> Outcome {
    let d = a.nrows();
    let (e, f) = (expm(a).unwrap(), expm(&(-a)).unwrap());
    let err = (&e * &f - DMatrix::identity(d, d)).norm();
    let cond = (e.norm() * f.norm() / d as f64).max(1.0);
    prop_assert!(err <= 1e-10 * cond, "err {err}, cond {cond}");
    Ok(())
}

pub const FLOW_GATES: [&str; 8] = ["sum", "swap", "fourier", "squeeze:2", "phase:1", "sum3", "cnot", "toffoli"];

pub fn flow_case() -> impl Strategy<Value = (usize, bool, f64, u64)> {
    (0..FLOW_GATES.len(), any::<bool>(), 0.01f64..0.8, any::<u64>())
}

pub fn flow_monotone(&(g, perturbed, scale, seed): &(usize, bool, f64, u64)) -> Outcome {
    let target = parse_gate::<f64>(FLOW_GATES[g]).unwrap();
    let start = if perturbed { FlowStart::Perturbed } else { FlowStart::Random };
    let s0 = flow_start(&target, start, scale, seed).unwrap();
    let traj = gradient_flow(&s0, &target, &FlowOptions { s_max: 3.0, ..FlowOptions::default() }).unwrap();
    prop_assert!(traj.len() >= 2);
    for w in traj.windows(2) {
        prop_assert!(w[1].s > w[0].s);
        prop_assert!(w[1].value <= w[0].value + 1e-10, "{} -> {}", w[0].value, w[1].value);
    }
    Ok(())
}

pub const PROBLEMS: [(&str, &str); 6] = [
    ("photon:2", "sum"),
    ("strong", "sum"),
    ("swap:linear", "swap"),
    ("swap:squeezing", "swap"),
    ("nmr:2", "cnot"),
    ("photon:3", "sum3"),
];

/// Problem index, CG or steepest descent, `t_f`, `q`, amplitude, seed.
pub type ProblemCase = (usize, bool, f64, usize, f64, u64);

pub fn problem_case() -> impl Strategy<Value = ProblemCase> {
    (0..PROBLEMS.len(), any::<bool>(), 0.5f64..3.0, 4usize..16, 0.0f64..1.0, any::<u64>())
}

pub fn options(cg: bool, max_iterations: usize) -> OptimizerOptions {
    OptimizerOptions {
        algorithm: if cg { Algorithm::CgPr } else { Algorithm::Steepest },
        max_iterations,
        ..OptimizerOptions::default()
    }
}

pub fn run_problem(&(p, cg, t_f, q, amp, seed): &ProblemCase, max_iterations: usize) -> sympoctl_core::optimizer::OptimizationTrace<f64> {
    let (m, g) = PROBLEMS[p];
    let sys = model(m);
    let target = parse_gate::<f64>(g).unwrap();
    let init = initial_field(InitKind::Random, sys.n_controls(), q, t_f, amp, seed).unwrap();
    optimize(&sys, &target, &options(cg, max_iterations), init).unwrap()
}

pub fn descent(case: &ProblemCase) -> Outcome {
    let trace = run_problem(case, 8);
    for w in trace.records.windows(2) {
        prop_assert!(w[1].value <= w[0].value, "{} -> {}", w[0].value, w[1].value);
    }
    for r in &trace.records {
        prop_assert!(r.gradient_norm >= 0.0 && r.fluence >= 0.0);
    }
    Ok(())
}

pub fn determinism(case: &ProblemCase) -> Outcome {
    let (a, b) = (run_problem(case, 4), run_problem(case, 4));
    prop_assert_eq!(&a.records, &b.records);
    prop_assert_eq!(a.final_field.amplitudes(), b.final_field.amplitudes());
    prop_assert_eq!(a.termination, b.termination);
    Ok(())
}
