use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{cplx, scaled_tol, to_f64, Real};

/// Default tolerance of the unitarity check.
pub const TOL_UNITARY: f64 = 1e-9;

fn check_square<T>(m: &DMatrix<T>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

pub(crate) fn cfrobenius<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Complex `d x d` unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> UnitaryMatrix<T> {
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        check_square(&matrix)?;
        let residual = unitarity_residual(&matrix);
        if !(residual <= scaled_tol(TOL_UNITARY)) {
            return Err(Error::NotUnitary { residual: to_f64(residual) });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: DMatrix<Complex<T>>) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim) }
    }

    /// Permutation unitary sending basis state `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut m = DMatrix::zeros(d, d);
        for (j, &i) in perm.iter().enumerate() {
            if i >= d {
                return Err(Error::InvalidArgument(format!("permutation target {i} out of range")));
            }
            m[(i, j)] = Complex::new(T::one(), T::zero());
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    /// `|U†U − I|_F`.
    pub fn unitarity_residual(&self) -> T {
        unitarity_residual(&self.matrix)
    }
}

fn unitarity_residual<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let d = m.nrows();
    cfrobenius(&(m.adjoint() * m - DMatrix::identity(d, d)))
}

/// Complex Hermitian matrix; Hermiticity is enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Replaces the input with its Hermitian part `(H + H†)/2`.
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        check_square(&matrix)?;
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("Hermitian matrix"));
        }
        let half = crate::scalar::lit::<T>(0.5);
        let h = (&matrix + matrix.adjoint()).map(|z| z * half);
        Ok(Self { matrix: h })
    }

    pub fn from_real(matrix: DMatrix<T>) -> Result<Self> {
        Self::new(matrix.map(|x| cplx(x, T::zero())))
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: DMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { matrix: self.matrix.map(|z| z * c) }
    }

    pub fn add_scaled(&mut self, other: &Self, c: T) {
        self.matrix += other.matrix.map(|z| z * c);
    }

    /// Eigenvalues and unitary eigenvectors (as columns).
    pub fn eigen(&self) -> Result<(Vec<T>, DMatrix<Complex<T>>)> {
        let eig = SymmetricEigen::try_new(self.matrix.clone(), T::default_epsilon(), 10_000)
            .ok_or_else(|| Error::Eigen("Hermitian eigensolver did not converge".into()))?;
        Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
    }
}

/// `exp(−i H dt)` through the eigendecomposition of `H`.
pub fn expm_hermitian_prop<T: Real>(h: &HermitianMatrix<T>, dt: T) -> Result<UnitaryMatrix<T>> {
    if !dt.is_finite() {
        return Err(Error::InvalidArgument("time step must be finite".into()));
    }
    let (vals, vecs) = h.eigen()?;
    let phases: Vec<Complex<T>> = vals.iter().map(|&l| {
        let th = -l * dt;
        cplx(th.cos(), th.sin())
    }).collect();
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(UnitaryMatrix::from_trusted(scaled * vecs.adjoint()))
}

/// Real representation `A + iB ↦ [[A, −B], [B, A]]` of a complex matrix.
///
/// Applied to a unitary `X − iY` it yields `[[X, Y], [−Y, X]]`, an
/// orthogonal symplectic matrix; the map is a group homomorphism.
pub fn real_embedding<T: Real>(m: &DMatrix<Complex<T>>) -> DMatrix<T> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + r, j + c)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
        }
    }
    out
}
