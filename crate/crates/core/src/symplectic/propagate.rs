//! Piecewise-constant propagation `S(t_{k+1}) = exp(J H(t_k) Δt) S(t_k)`.

use nalgebra::{Complex, DMatrix};

use super::{expm, frobenius, j_matrix, HermitianMatrix, SymplecticForm, SymplecticMatrix, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::models::{ControlSystem, Flavor, Hamiltonians};
use crate::optimizer::ControlField;
use crate::scalar::{scaled_tol, to_f64, Real};

/// Relative drift from the group manifold that aborts a propagation.
pub const TOL_DRIFT: f64 = 1e-6;

/// Final propagator of either flavor.
#[derive(Debug, Clone, PartialEq)]
pub enum Propagator<T: Real> {
    Symplectic(SymplecticMatrix<T>),
    Unitary(UnitaryMatrix<T>),
}

impl<T: Real> Propagator<T> {
    pub fn flavor(&self) -> Flavor {
        match self {
            Propagator::Symplectic(_) => Flavor::Symplectic,
            Propagator::Unitary(_) => Flavor::Unitary,
        }
    }
}

/// Propagators at every grid point, starting from the identity.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory<T: Real> {
    Symplectic(Vec<SymplecticMatrix<T>>),
    Unitary(Vec<UnitaryMatrix<T>>),
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        match self {
            Trajectory::Symplectic(v) => v.len(),
            Trajectory::Unitary(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn final_propagator(&self) -> Propagator<T> {
        match self {
            Trajectory::Symplectic(v) => Propagator::Symplectic(v.last().expect("non-empty trajectory").clone()),
            Trajectory::Unitary(v) => Propagator::Unitary(v.last().expect("non-empty trajectory").clone()),
        }
    }
}

fn check_field<T: Real>(system: &ControlSystem<T>, field: &ControlField<T>) -> Result<()> {
    if field.n_controls() != system.n_controls() {
        return Err(Error::DimensionMismatch { expected: system.n_controls(), found: field.n_controls() });
    }
    Ok(())
}

/// Real step generators `J H(t_k) Δt`, one per interval.
pub(crate) fn symplectic_step_generators<T: Real>(system: &ControlSystem<T>, field: &ControlField<T>) -> Result<Vec<DMatrix<T>>> {
    check_field(system, field)?;
    let Hamiltonians::Symplectic { drift, controls } = system.hamiltonians() else {
        return Err(Error::FlavorMismatch("symplectic propagation needs a symplectic system".into()));
    };
    let j = j_matrix::<T>(drift.n_modes());
    let dt = field.dt();
    Ok((0..field.n_steps() - 1)
        .map(|k| {
            let mut h = drift.matrix().clone();
            for (i, c) in controls.iter().enumerate() {
                h += c.matrix() * field.amplitude(i, k);
            }
            &j * h * dt
        })
        .collect())
}

/// Hamiltonians `H(t_k)` per interval for the unitary flavor.
pub(crate) fn unitary_step_hamiltonians<T: Real>(system: &ControlSystem<T>, field: &ControlField<T>) -> Result<Vec<HermitianMatrix<T>>> {
    check_field(system, field)?;
    let Hamiltonians::Unitary { drift, controls } = system.hamiltonians() else {
        return Err(Error::FlavorMismatch("unitary propagation needs a unitary system".into()));
    };
    Ok((0..field.n_steps() - 1)
        .map(|k| {
            let mut h = drift.clone();
            for (i, c) in controls.iter().enumerate() {
                h.add_scaled(c, field.amplitude(i, k));
            }
            h
        })
        .collect())
}

/// Step generators, their exponentials and the running products
/// `states[k] = S(t_k)`.
#[allow(clippy::type_complexity)]
pub(crate) fn symplectic_steps<T: Real>(
    system: &ControlSystem<T>,
    field: &ControlField<T>,
) -> Result<(Vec<DMatrix<T>>, Vec<DMatrix<T>>, Vec<DMatrix<T>>)> {
    let gens = symplectic_step_generators(system, field)?;
    let d = system.dim();
    let form = SymplecticForm::<T>::new(d / 2)?;
    let tol: T = scaled_tol(TOL_DRIFT);
    let mut steps = Vec::with_capacity(gens.len());
    let mut states = Vec::with_capacity(gens.len() + 1);
    let mut s = DMatrix::<T>::identity(d, d);
    states.push(s.clone());
    for (k, g) in gens.iter().enumerate() {
        let p = expm(g)?;
        s = &p * &s;
        let norm = frobenius(&s);
        let residual = form.residual(&s) / T::one().max(norm * norm);
        if !(residual <= tol) {
            return Err(Error::SymplecticDrift { step: k + 1, residual: to_f64(residual) });
        }
        steps.push(p);
        states.push(s.clone());
    }
    Ok((gens, steps, states))
}

/// Heisenberg-picture propagators `S(t_0) = I, …, S(t_{q−1})`.
///
/// Aborts with [`Error::SymplecticDrift`] when `|SᵀJS − J|_F / max(1, |S|²_F)`
/// exceeds `1e−6`.
pub fn propagate_symplectic<T: Real>(system: &ControlSystem<T>, field: &ControlField<T>) -> Result<Vec<SymplecticMatrix<T>>> {
    let (_, _, states) = symplectic_steps(system, field)?;
    Ok(states.into_iter().map(SymplecticMatrix::from_trusted).collect())
}

/// Step unitaries and running products for the unitary flavor.
pub(crate) fn unitary_steps<T: Real>(
    system: &ControlSystem<T>,
    field: &ControlField<T>,
) -> Result<(Vec<DMatrix<Complex<T>>>, Vec<DMatrix<Complex<T>>>)> {
    let hs = unitary_step_hamiltonians(system, field)?;
    let d = system.dim();
    let dt = field.dt();
    let tol: T = scaled_tol(TOL_DRIFT);
    let mut steps = Vec::with_capacity(hs.len());
    let mut states = Vec::with_capacity(hs.len() + 1);
    let mut u = DMatrix::<Complex<T>>::identity(d, d);
    states.push(u.clone());
    for (k, h) in hs.iter().enumerate() {
        let p = super::expm_hermitian_prop(h, dt)?.matrix().clone();
        u = &p * &u;
        let residual = super::cfrobenius(&(u.adjoint() * &u - DMatrix::identity(d, d)));
        if !(residual <= tol) {
            return Err(Error::SymplecticDrift { step: k + 1, residual: to_f64(residual) });
        }
        steps.push(p);
        states.push(u.clone());
    }
    Ok((steps, states))
}

/// Schrödinger-picture propagators `U(t_0) = I, …, U(t_{q−1})`.
pub fn propagate_unitary<T: Real>(system: &ControlSystem<T>, field: &ControlField<T>) -> Result<Vec<UnitaryMatrix<T>>> {
    let (_, states) = unitary_steps(system, field)?;
    Ok(states.into_iter().map(UnitaryMatrix::from_trusted).collect())
}

/// Dispatches on the flavor of `system`.
pub fn propagate<T: Real>(system: &ControlSystem<T>, field: &ControlField<T>) -> Result<Trajectory<T>> {
    match system.flavor() {
        Flavor::Symplectic => propagate_symplectic(system, field).map(Trajectory::Symplectic),
        Flavor::Unitary => propagate_unitary(system, field).map(Trajectory::Unitary),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{photon_model, strongly_controllable_model, ControlSystem};
    use crate::symplectic::QuadraticHamiltonian;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    fn sum_matrix() -> DMatrix<f64> {
        dmatrix![1.0, 0.0, 0.0, 0.0; 1.0, 1.0, 0.0, 0.0; 0.0, 0.0, 1.0, -1.0; 0.0, 0.0, 0.0, 1.0]
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let sys = ControlSystem::symplectic("free", QuadraticHamiltonian::<f64>::zero(2), vec![]).unwrap();
        let f = ControlField::zeros(0, 5, 1.0).unwrap();
        let traj = propagate_symplectic(&sys, &f).unwrap();
        assert_eq!(traj.len(), 5);
        assert_eq!(traj[4].matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn photon_free_evolution_is_sum() {
        let sys = photon_model(1.0, 2).unwrap();
        let f = ControlField::zeros(2, 21, 1.0).unwrap();
        let traj = propagate_symplectic(&sys, &f).unwrap();
        assert_relative_eq!(traj.last().unwrap().matrix().clone(), sum_matrix(), epsilon = 1e-13);
    }

    #[test]
    fn photon_kappa_scales_time() {
        let sys = photon_model(2.0, 2).unwrap();
        let f = ControlField::zeros(2, 11, 0.5).unwrap();
        let s = propagate_symplectic(&sys, &f).unwrap().pop().unwrap();
        assert_relative_eq!(s.into_matrix(), sum_matrix(), epsilon = 1e-13);
    }

    #[test]
    fn oscillator_full_period() {
        let sys = strongly_controllable_model::<f64>().unwrap();
        let f = ControlField::zeros(2, 101, 2.0 * std::f64::consts::PI).unwrap();
        let s = propagate_symplectic(&sys, &f).unwrap().pop().unwrap();
        assert_relative_eq!(s.into_matrix(), DMatrix::identity(4, 4), epsilon = 1e-9);
    }

    #[test]
    fn single_qubit_closed_form() {
        let w: f64 = 0.7;
        let h0 = HermitianMatrix::from_real(dmatrix![w, 0.0; 0.0, -w]).unwrap();
        let sys = ControlSystem::unitary("qubit", h0, vec![]).unwrap();
        let t_f: f64 = 1.3;
        let f = ControlField::zeros(0, 7, t_f).unwrap();
        let u = propagate_unitary(&sys, &f).unwrap().pop().unwrap();
        let m = u.matrix();
        assert!((m[(0, 0)] - Complex::new((w * t_f).cos(), -(w * t_f).sin())).norm() < 1e-12);
        assert!((m[(1, 1)] - Complex::new((w * t_f).cos(), (w * t_f).sin())).norm() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn flavor_and_shape_checks() {
        let sys = photon_model(1.0, 2).unwrap();
        let f = ControlField::zeros(3, 5, 1.0).unwrap();
        assert!(matches!(propagate_symplectic(&sys, &f), Err(Error::DimensionMismatch { .. })));
        let f = ControlField::zeros(2, 5, 1.0).unwrap();
        assert!(matches!(propagate_unitary(&sys, &f), Err(Error::FlavorMismatch(_))));
        assert!(matches!(propagate(&sys, &f).unwrap(), Trajectory::Symplectic(_)));
    }
}
