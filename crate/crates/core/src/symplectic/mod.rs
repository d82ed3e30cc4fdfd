//! Symplectic and unitary matrix types, the symplectic form, matrix
//! exponentials, and time propagation of controlled dynamics.
//!
//! Phase-space vectors are ordered `(q_1..q_N, p_1..p_N)`, so the symplectic
//! form is `J = [[0, I], [-I, 0]]`. A quadratic Hamiltonian is stored as the
//! symmetric matrix `H` with `Ĥ = ½ ẑᵀ H ẑ` (ħ = 1); the Heisenberg-picture
//! generator is then `J H` and propagators obey `dS/dt = J H(t) S`.

mod expm;
pub(crate) mod propagate;
mod unitary;

pub use expm::{expm, expm_frechet, expm_pade, PadeOrder, SCALING_THRESHOLD};
pub use propagate::{propagate, propagate_symplectic, propagate_unitary, Propagator, Trajectory};
pub(crate) use unitary::cfrobenius;
pub use unitary::{expm_hermitian_prop, real_embedding, HermitianMatrix, UnitaryMatrix};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, scaled_tol, Real};

/// Default tolerance of the symplectic constraint check.
pub const TOL_SYMPLECTIC: f64 = 1e-9;

pub(crate) fn frobenius<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

pub(crate) fn frob_inner<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn sym_part<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * lit::<T>(0.5)
}

/// Block matrix `J = [[0, I_N], [-I_N, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm<T: Real> {
    n_modes: usize,
    matrix: DMatrix<T>,
}

impl<T: Real> SymplecticForm<T> {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("symplectic form needs at least one mode".into()));
        }
        let n = n_modes;
        let mut matrix = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            matrix[(i, n + i)] = T::one();
            matrix[(n + i, i)] = -T::one();
        }
        Ok(Self { n_modes, matrix })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    /// `|SᵀJS − J|_F`.
    pub fn residual(&self, s: &DMatrix<T>) -> T {
        frobenius(&(s.transpose() * &self.matrix * s - &self.matrix))
    }
}

/// Returns `J` for `n_modes` qunits.
pub fn symplectic_form<T: Real>(n_modes: usize) -> Result<SymplecticForm<T>> {
    SymplecticForm::new(n_modes)
}

pub(crate) fn j_matrix<T: Real>(n_modes: usize) -> DMatrix<T> {
    let n = n_modes;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = T::one();
        m[(n + i, i)] = -T::one();
    }
    m
}

pub(crate) fn modes_of(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("phase-space dimension {dim} is not a positive even number")));
    }
    Ok(dim / 2)
}

/// A real `2N x 2N` matrix satisfying `SᵀJS = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix<T: Real> {
    n_modes: usize,
    matrix: DMatrix<T>,
}

impl<T: Real> SymplecticMatrix<T> {
    /// Validates the symplectic constraint with the default tolerance.
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, scaled_tol(TOL_SYMPLECTIC))
    }

    pub fn with_tolerance(matrix: DMatrix<T>, tol: T) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        let n_modes = modes_of(matrix.nrows())?;
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("symplectic matrix"));
        }
        let residual = SymplecticForm::new(n_modes)?.residual(&matrix);
        if !(residual <= tol) {
            return Err(Error::NotSymplectic { residual: crate::scalar::to_f64(residual) });
        }
        Ok(Self { n_modes, matrix })
    }

    /// Wraps a matrix whose symplecticity the caller has already established.
    pub(crate) fn from_trusted(matrix: DMatrix<T>) -> Self {
        let n_modes = matrix.nrows() / 2;
        Self { n_modes, matrix }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self { n_modes, matrix: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    /// `|SᵀJS − J|_F`.
    pub fn symplectic_residual(&self) -> T {
        frobenius(&(self.matrix.transpose() * j_matrix::<T>(self.n_modes) * &self.matrix - j_matrix::<T>(self.n_modes)))
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self::from_trusted(&self.matrix * &other.matrix))
    }

    /// `S⁻¹ = −J Sᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = j_matrix::<T>(self.n_modes);
        Self::from_trusted(-(&j * self.matrix.transpose() * &j))
    }

    pub fn transpose(&self) -> Self {
        Self::from_trusted(self.matrix.transpose())
    }

    /// True when `SᵀS = I` within `tol`, i.e. `S` lies in the compact subgroup.
    pub fn is_orthogonal(&self, tol: T) -> bool {
        let d = self.dim();
        frobenius(&(self.matrix.transpose() * &self.matrix - DMatrix::identity(d, d))) <= tol
    }

    pub fn determinant(&self) -> T {
        self.matrix.clone().determinant()
    }

    /// Image of the unitary `X − iY` under `X − iY ↦ [[X, Y], [−Y, X]]`.
    pub fn from_unitary(u: &UnitaryMatrix<T>) -> Self {
        Self::from_trusted(real_embedding(u.matrix()))
    }
}

/// Affine symplectic element `z ↦ S z + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSymplectic<T: Real> {
    homogeneous: SymplecticMatrix<T>,
    translation: DVector<T>,
}

impl<T: Real> AffineSymplectic<T> {
    pub fn new(homogeneous: SymplecticMatrix<T>, translation: DVector<T>) -> Result<Self> {
        if translation.len() != homogeneous.dim() {
            return Err(Error::DimensionMismatch { expected: homogeneous.dim(), found: translation.len() });
        }
        Ok(Self { homogeneous, translation })
    }

    pub fn linear(homogeneous: SymplecticMatrix<T>) -> Self {
        let d = homogeneous.dim();
        Self { homogeneous, translation: DVector::zeros(d) }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::linear(SymplecticMatrix::identity(n_modes))
    }

    pub fn homogeneous(&self) -> &SymplecticMatrix<T> {
        &self.homogeneous
    }

    pub fn translation(&self) -> &DVector<T> {
        &self.translation
    }

    pub fn n_modes(&self) -> usize {
        self.homogeneous.n_modes()
    }

    /// `(2N+1) x (2N+1)` block form `[[S, c], [0, 1]]` acting on `(z; 1)`.
    pub fn to_block(&self) -> DMatrix<T> {
        let d = self.homogeneous.dim();
        let mut m = DMatrix::zeros(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(self.homogeneous.matrix());
        m.view_mut((0, d), (d, 1)).copy_from(&self.translation);
        m[(d, d)] = T::one();
        m
    }

    pub fn from_block(block: &DMatrix<T>) -> Result<Self> {
        if block.nrows() != block.ncols() || block.nrows() < 3 {
            return Err(Error::NotSquare { rows: block.nrows(), cols: block.ncols() });
        }
        let d = block.nrows() - 1;
        let s = SymplecticMatrix::new(block.view((0, 0), (d, d)).into_owned())?;
        let c = block.view((0, d), (d, 1)).column(0).into_owned();
        Self::new(s, c)
    }

    pub fn apply(&self, z: &DVector<T>) -> DVector<T> {
        self.homogeneous.matrix() * z + &self.translation
    }
}

/// `(S_a, c_a) ∘ (S_b, c_b) = (S_a S_b, S_a c_b + c_a)`.
pub fn compose_affine<T: Real>(a: &AffineSymplectic<T>, b: &AffineSymplectic<T>) -> Result<AffineSymplectic<T>> {
    let s = a.homogeneous.compose(&b.homogeneous)?;
    let c = a.homogeneous.matrix() * &b.translation + &a.translation;
    AffineSymplectic::new(s, c)
}

/// Symmetric `2N x 2N` matrix of a quadratic Hamiltonian, `Ĥ = ½ ẑᵀ H ẑ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian<T: Real> {
    n_modes: usize,
    matrix: DMatrix<T>,
}

impl<T: Real> QuadraticHamiltonian<T> {
    /// Symmetrizes the input.
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        let n_modes = modes_of(matrix.nrows())?;
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Hamiltonian"));
        }
        Ok(Self { n_modes, matrix: sym_part(&matrix) })
    }

    pub fn zero(n_modes: usize) -> Self {
        Self { n_modes, matrix: DMatrix::zeros(2 * n_modes, 2 * n_modes) }
    }

    /// Builds `H` from the monomials of `Ĥ`: each `(i, j, c)` contributes
    /// `c ẑ_i ẑ_j` (symmetrized when `i != j`).
    pub fn from_monomials(n_modes: usize, terms: &[(usize, usize, T)]) -> Result<Self> {
        let d = 2 * n_modes;
        let mut m = DMatrix::zeros(d, d);
        for &(i, j, c) in terms {
            if i >= d || j >= d {
                return Err(Error::InvalidArgument(format!("quadrature index out of range in ({i}, {j})")));
            }
            if i == j {
                m[(i, i)] += c * lit(2.0);
            } else {
                m[(i, j)] += c;
                m[(j, i)] += c;
            }
        }
        Self::new(m)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    /// Generator `J H` of the Heisenberg flow.
    pub fn generator(&self) -> DMatrix<T> {
        j_matrix::<T>(self.n_modes) * &self.matrix
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { n_modes: self.n_modes, matrix: &self.matrix * c }
    }

    pub fn add_scaled(&mut self, other: &Self, c: T) {
        self.matrix += &other.matrix * c;
    }
}

/// Row index of `q_i` in the `(q…, p…)` ordering.
pub fn q_index(_n_modes: usize, mode: usize) -> usize {
    mode
}

/// Row index of `p_i` in the `(q…, p…)` ordering.
pub fn p_index(n_modes: usize, mode: usize) -> usize {
    n_modes + mode
}
