//! Fidelity landscape: objective, exact field gradient, critical topology and
//! gradient flow.

mod counting;
mod critical;
mod fidelity;
mod flow;
mod gradient;
mod report;

pub use counting::{attraction_ratio_bound, count_critical_bound, count_critical_degenerate, critical_radius};
pub use critical::{
    enumerate_critical, hessian_eigenvalues, hessian_signature, singular_value_clusters, symplectic_svd, Cluster,
    CriticalLabels, CriticalSubmanifold, Domain, PairCount, SymplecticSvd, TOL_CLUSTER, TOL_HESSIAN_ZERO,
};
pub use fidelity::{
    critical_condition_residual, critical_condition_residual_unitary, fidelity, fidelity_affine, fidelity_symplectic,
    fidelity_unitary,
};
pub use flow::{flow_start, gradient_flow, log_decay_rate, FlowOptions, FlowPoint, FlowStart};
pub use gradient::{evaluate, evaluate_with_gradient, field_gradient, Evaluation};
pub use report::{landscape_report, propagator_entries, ComponentReport, LandscapeReport, MatrixEntry, Signature};
