//! Exact gradient of the discretized objective with respect to the field.
//!
//! With `S_f = P_{q−2} ⋯ P_0`, `P_k = exp(X_k)` and `X_k = J H(t_k) Δt`, the
//! chain rule gives `∂J/∂C_ik = ⟨Dexp(X_kᵀ)[Λ_k], J H_i⟩ Δt` where
//! `Λ_k = L_kᵀ ∂J/∂S_f S_kᵀ` and `L_k = P_{q−2} ⋯ P_{k+1}`. The unitary case is
//! identical with adjoints and the exponential derivative taken in the
//! eigenbasis of `H(t_k)`.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::gates::GateTarget;
use crate::models::{ControlSystem, Flavor, Hamiltonians};
use crate::optimizer::ControlField;
use crate::scalar::{cplx, lit, Real};
use crate::symplectic::{
    expm_frechet, frob_inner,
    propagate::{symplectic_steps, unitary_step_hamiltonians, unitary_steps},
    Propagator, SymplecticMatrix, UnitaryMatrix,
};

use super::fidelity::{fidelity_symplectic, fidelity_unitary};

/// Objective, gradient density and final propagator from one propagation.
#[derive(Debug, Clone)]
pub struct Evaluation<T: Real> {
    pub value: T,
    /// `m × q` grid; entry `(i, k)` times `Δt` is `∂J/∂C_i(t_k)`.
    pub gradient: DMatrix<T>,
    pub propagator: Propagator<T>,
}

fn check_flavors<T: Real>(system: &ControlSystem<T>, target: &GateTarget<T>) -> Result<()> {
    if system.flavor() != target.flavor() {
        return Err(Error::FlavorMismatch(format!(
            "{} system '{}' cannot target {} gate '{}'",
            system.flavor(),
            system.label(),
            target.flavor(),
            target.label()
        )));
    }
    if system.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: system.dim(), found: target.dim() });
    }
    Ok(())
}

/// Objective only, skipping the gradient.
pub fn evaluate<T: Real>(system: &ControlSystem<T>, field: &ControlField<T>, target: &GateTarget<T>) -> Result<(T, Propagator<T>)> {
    check_flavors(system, target)?;
    match system.flavor() {
        Flavor::Symplectic => {
            let (_, _, states) = symplectic_steps(system, field)?;
            let s = states.into_iter().last().expect("non-empty");
            let v = fidelity_symplectic(&s, target)?;
            Ok((v, Propagator::Symplectic(SymplecticMatrix::from_trusted(s))))
        }
        Flavor::Unitary => {
            let (_, states) = unitary_steps(system, field)?;
            let u = states.into_iter().last().expect("non-empty");
            let v = fidelity_unitary(&u, target)?;
            Ok((v, Propagator::Unitary(UnitaryMatrix::from_trusted(u))))
        }
    }
}

/// Objective together with its exact field gradient.
pub fn evaluate_with_gradient<T: Real>(
    system: &ControlSystem<T>,
    field: &ControlField<T>,
    target: &GateTarget<T>,
) -> Result<Evaluation<T>> {
    check_flavors(system, target)?;
    match system.hamiltonians() {
        Hamiltonians::Symplectic { controls, .. } => {
            let (gens, steps, states) = symplectic_steps(system, field)?;
            let s_f = states.last().expect("non-empty").clone();
            let w = target.symplectic_matrix()?.matrix();
            let value = fidelity_symplectic(&s_f, target)?;
            let control_gens: Vec<DMatrix<T>> = controls.iter().map(|h| h.generator()).collect();
            let mut grad = DMatrix::zeros(field.n_controls(), field.n_steps());
            let mut costate = (&s_f - w) * lit::<T>(2.0);
            for k in (0..steps.len()).rev() {
                let lambda = &costate * states[k].transpose();
                let gamma = expm_frechet(&gens[k].transpose(), &lambda)?;
                for (i, g) in control_gens.iter().enumerate() {
                    grad[(i, k)] = frob_inner(&gamma, g);
                }
                costate = steps[k].transpose() * costate;
            }
            Ok(Evaluation { value, gradient: grad, propagator: Propagator::Symplectic(SymplecticMatrix::from_trusted(s_f)) })
        }
        Hamiltonians::Unitary { controls, .. } => {
            let hs = unitary_step_hamiltonians(system, field)?;
            let (steps, states) = unitary_steps(system, field)?;
            let u_f = states.last().expect("non-empty").clone();
            let w = target.unitary_matrix()?.matrix();
            let value = fidelity_unitary(&u_f, target)?;
            let dt = field.dt();
            let mut grad = DMatrix::zeros(field.n_controls(), field.n_steps());
            let mut costate = w.clone();
            for k in (0..steps.len()).rev() {
                let lambda = (&costate * states[k].adjoint()).map(|z| z * lit::<T>(-2.0));
                let gamma = dexp_hermitian_adjoint(&hs[k].eigen()?, dt, &lambda);
                for (i, h) in controls.iter().enumerate() {
                    // Re Tr(Γ† (−i H_i)).
                    let t = gamma.iter().zip(h.matrix().iter()).fold(T::zero(), |acc, (g, x)| {
                        let e = cplx(x.im, -x.re);
                        acc + g.re * e.re + g.im * e.im
                    });
                    grad[(i, k)] = t;
                }
                costate = steps[k].adjoint() * costate;
            }
            Ok(Evaluation { value, gradient: grad, propagator: Propagator::Unitary(UnitaryMatrix::from_trusted(u_f)) })
        }
    }
}

/// `Dexp(i H Δt)[Λ]` from the eigendecomposition of `H`, using
/// `(e^a − e^b)/(a − b) = e^{(a+b)/2} sinc((α − β)/2)` for `a = iα`, `b = iβ`.
fn dexp_hermitian_adjoint<T: Real>(
    eig: &(Vec<T>, DMatrix<Complex<T>>),
    dt: T,
    lambda: &DMatrix<Complex<T>>,
) -> DMatrix<Complex<T>> {
    let (vals, v) = eig;
    let rotated = v.adjoint() * lambda * v;
    let half = lit::<T>(0.5);
    let weighted = DMatrix::from_fn(rotated.nrows(), rotated.ncols(), |a, b| {
        let mean = (vals[a] + vals[b]) * dt * half;
        let diff = (vals[a] - vals[b]) * dt * half;
        let sinc = if diff.abs() < lit(1e-8) { T::one() - diff * diff / lit(6.0) } else { diff.sin() / diff };
        rotated[(a, b)] * cplx(mean.cos() * sinc, mean.sin() * sinc)
    });
    v * weighted * v.adjoint()
}

/// Gradient density of the objective on the field grid. Multiply by `Δt`
/// for the partial derivatives with respect to the grid amplitudes.
pub fn field_gradient<T: Real>(system: &ControlSystem<T>, field: &ControlField<T>, target: &GateTarget<T>) -> Result<DMatrix<T>> {
    evaluate_with_gradient(system, field, target).map(|e| e.gradient)
}
