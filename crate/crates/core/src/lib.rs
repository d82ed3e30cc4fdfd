//! Optimal control of continuous-variable quantum gates.
//!
//! Gaussian operations on `N` bosonic modes act on the quadrature vector
//! `(q_1..q_N, p_1..p_N)` as real symplectic matrices. This crate propagates
//! bilinear control systems in that representation (and in the ordinary
//! unitary one for qubit registers), analyses the critical points of the
//! gate-fidelity landscape, and searches control fields with conjugate
//! gradients.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `…64` aliases below fix the common double-precision case.

pub mod error;
pub mod gates;
pub mod landscape;
pub mod models;
pub mod optimizer;
pub mod scalar;
pub mod symplectic;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SymplecticMatrix64 = symplectic::SymplecticMatrix<f64>;
pub type AffineSymplectic64 = symplectic::AffineSymplectic<f64>;
pub type QuadraticHamiltonian64 = symplectic::QuadraticHamiltonian<f64>;
pub type UnitaryMatrix64 = symplectic::UnitaryMatrix<f64>;
pub type HermitianMatrix64 = symplectic::HermitianMatrix<f64>;
pub type ControlSystem64 = models::ControlSystem<f64>;
pub type ControlField64 = optimizer::ControlField<f64>;
pub type GateTarget64 = gates::GateTarget<f64>;
