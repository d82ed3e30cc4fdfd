use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::gates::GateTarget;
use crate::scalar::{lit, Real};
use crate::symplectic::{cfrobenius, frobenius, j_matrix, AffineSymplectic, Propagator};

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `|S − W|²_F + |w|²`: a propagator generated by quadratic Hamiltonians
/// carries no translation, so any target translation adds a constant.
pub fn fidelity_symplectic<T: Real>(s: &DMatrix<T>, target: &GateTarget<T>) -> Result<T> {
    let w = target.symplectic_matrix()?;
    check_dim(w.dim(), s.nrows())?;
    check_dim(w.dim(), s.ncols())?;
    let d = frobenius(&(s - w.matrix()));
    let shift = target.translation().map_or(T::zero(), |c| c.norm_squared());
    Ok(d * d + shift)
}

/// `|S − W|²_F + |s − w|²` for an affine element.
pub fn fidelity_affine<T: Real>(g: &AffineSymplectic<T>, target: &GateTarget<T>) -> Result<T> {
    let w = target.symplectic_matrix()?;
    check_dim(w.dim(), g.homogeneous().dim())?;
    let d = frobenius(&(g.homogeneous().matrix() - w.matrix()));
    let shift = match target.translation() {
        Some(c) => (g.translation() - c).norm_squared(),
        None => g.translation().norm_squared(),
    };
    Ok(d * d + shift)
}

/// `|U − W|²_F = 2d − 2 Re Tr(W†U)`.
pub fn fidelity_unitary<T: Real>(u: &DMatrix<Complex<T>>, target: &GateTarget<T>) -> Result<T> {
    let w = target.unitary_matrix()?;
    check_dim(w.dim(), u.nrows())?;
    check_dim(w.dim(), u.ncols())?;
    let overlap = (w.matrix().adjoint() * u).trace().re;
    Ok(lit::<T>(2.0 * w.dim() as f64) - overlap * lit(2.0))
}

/// Distance of a propagator from the target gate.
pub fn fidelity<T: Real>(propagator: &Propagator<T>, target: &GateTarget<T>) -> Result<T> {
    match propagator {
        Propagator::Symplectic(s) => fidelity_symplectic(s.matrix(), target),
        Propagator::Unitary(u) => fidelity_unitary(u.matrix(), target),
    }
}

/// `|(SᵀS − WᵀS)J − J(SᵀS − SᵀW)|_F`, which vanishes exactly at critical
/// points of the symplectic landscape.
pub fn critical_condition_residual<T: Real>(s: &DMatrix<T>, target: &GateTarget<T>) -> Result<T> {
    let w = target.symplectic_matrix()?.matrix();
    check_dim(w.nrows(), s.nrows())?;
    let j = j_matrix::<T>(s.nrows() / 2);
    let sts = s.transpose() * s;
    let left = (&sts - w.transpose() * s) * &j;
    let right = &j * (&sts - s.transpose() * w);
    Ok(frobenius(&(left - right)))
}

/// `|UW† − WU†|_F`, the unitary analogue of [`critical_condition_residual`].
pub fn critical_condition_residual_unitary<T: Real>(u: &DMatrix<Complex<T>>, target: &GateTarget<T>) -> Result<T> {
    let w = target.unitary_matrix()?.matrix();
    check_dim(w.nrows(), u.nrows())?;
    let m = u * w.adjoint();
    Ok(cfrobenius(&(&m - m.adjoint())))
}
