//! Descent, determinism and gradient-consistency properties of the optimizer.

mod support;

use proptest::prelude::*;
use sympoctl_core::gates::parse_gate;
use sympoctl_core::landscape::field_gradient;
use sympoctl_core::optimizer::{initial_field, optimize, Algorithm, InitKind, OptimizerOptions, TerminationReason};
use support::{descent, determinism, model, options, problem_case, PROBLEMS};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn accepted_steps_never_increase_the_objective(case in problem_case()) {
        descent(&case)?;
    }

    #[test]
    fn identical_inputs_give_identical_traces(case in problem_case()) {
        determinism(&case)?;
    }

    #[test]
    fn recorded_gradient_is_the_field_gradient_times_dt((p, _cg, t_f, q, amp, seed) in problem_case()) {
        let (m, g) = PROBLEMS[p];
        let sys = model(m);
        let target = parse_gate::<f64>(g).unwrap();
        let init = initial_field(InitKind::Random, sys.n_controls(), q, t_f, amp, seed).unwrap();
        let expected = (field_gradient(&sys, &init, &target).unwrap() * init.dt()).norm();
        let trace = optimize(&sys, &target, &options(true, 0), init).unwrap();
        prop_assert_eq!(trace.records[0].gradient_norm, expected);
    }
}

#[test]
fn conjugate_gradients_beat_steepest_descent_on_compact_swap() {
    let sys = model("swap:linear");
    let target = parse_gate::<f64>("swap").unwrap();
    for seed in 1..=5 {
        let run = |algorithm| {
            let init = initial_field(InitKind::Random, sys.n_controls(), 41, 4.0, 0.5, seed).unwrap();
            let opts = OptimizerOptions { algorithm, j_tolerance: 1e-6, max_iterations: 5000, ..OptimizerOptions::default() };
            optimize(&sys, &target, &opts, init).unwrap()
        };
        let cg = run(Algorithm::CgPr);
        let sd = run(Algorithm::Steepest);
        assert_eq!(cg.termination, TerminationReason::Converged, "seed {seed}");
        let sd_iters = sd.iterations_to(1e-6).unwrap_or(usize::MAX);
        assert!(cg.iterations() < sd_iters, "seed {seed}: cg {} vs sd {sd_iters}", cg.iterations());
    }
}
