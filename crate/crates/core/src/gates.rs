//! Target gates: Gaussian Clifford primitives as (affine) symplectic maps and
//! their qubit counterparts as unitaries.
//!
//! Two-mode gates use the block ordering `(q₁, q₂, p₁, p₂)`. Translations
//! are carried as data only; controlled dynamics never generate them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::models::Flavor;
use crate::scalar::{lit, scaled_tol, Real};
use crate::symplectic::{AffineSymplectic, SymplecticMatrix, UnitaryMatrix};

/// Homogeneous part of a target.
#[derive(Debug, Clone, PartialEq)]
pub enum GateMatrix<T: Real> {
    Symplectic(SymplecticMatrix<T>),
    Unitary(UnitaryMatrix<T>),
}

/// A gate `W` (plus an optional phase-space translation `w`).
#[derive(Debug, Clone, PartialEq)]
pub struct GateTarget<T: Real> {
    label: String,
    homogeneous: GateMatrix<T>,
    translation: Option<DVector<T>>,
}

impl<T: Real> GateTarget<T> {
    pub fn symplectic(label: impl Into<String>, w: SymplecticMatrix<T>) -> Self {
        Self { label: label.into(), homogeneous: GateMatrix::Symplectic(w), translation: None }
    }

    pub fn affine(label: impl Into<String>, g: AffineSymplectic<T>) -> Self {
        Self {
            label: label.into(),
            homogeneous: GateMatrix::Symplectic(g.homogeneous().clone()),
            translation: Some(g.translation().clone()),
        }
    }

    pub fn unitary(label: impl Into<String>, w: UnitaryMatrix<T>) -> Self {
        Self { label: label.into(), homogeneous: GateMatrix::Unitary(w), translation: None }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn flavor(&self) -> Flavor {
        match self.homogeneous {
            GateMatrix::Symplectic(_) => Flavor::Symplectic,
            GateMatrix::Unitary(_) => Flavor::Unitary,
        }
    }

    pub fn homogeneous(&self) -> &GateMatrix<T> {
        &self.homogeneous
    }

    pub fn symplectic_matrix(&self) -> Result<&SymplecticMatrix<T>> {
        match &self.homogeneous {
            GateMatrix::Symplectic(w) => Ok(w),
            GateMatrix::Unitary(_) => Err(Error::FlavorMismatch(format!("gate '{}' is unitary", self.label))),
        }
    }

    pub fn unitary_matrix(&self) -> Result<&UnitaryMatrix<T>> {
        match &self.homogeneous {
            GateMatrix::Unitary(w) => Ok(w),
            GateMatrix::Symplectic(_) => Err(Error::FlavorMismatch(format!("gate '{}' is symplectic", self.label))),
        }
    }

    pub fn translation(&self) -> Option<&DVector<T>> {
        self.translation.as_ref()
    }

    /// Affine form; a missing translation is zero.
    pub fn to_affine(&self) -> Result<AffineSymplectic<T>> {
        let w = self.symplectic_matrix()?.clone();
        match &self.translation {
            Some(c) => AffineSymplectic::new(w, c.clone()),
            None => Ok(AffineSymplectic::linear(w)),
        }
    }

    /// Matrix dimension of the homogeneous part.
    pub fn dim(&self) -> usize {
        match &self.homogeneous {
            GateMatrix::Symplectic(w) => w.dim(),
            GateMatrix::Unitary(u) => u.dim(),
        }
    }
}

fn sym<T: Real>(rows: usize, entries: &[f64]) -> SymplecticMatrix<T> {
    let m = DMatrix::from_row_slice(rows, rows, &entries.iter().map(|&x| lit::<T>(x)).collect::<Vec<_>>());
    SymplecticMatrix::new(m).expect("catalog gate is symplectic")
}

/// `(q, p) → (p, −q)`.
pub fn gate_fourier<T: Real>() -> GateTarget<T> {
    GateTarget::symplectic("fourier", sym(2, &[0.0, 1.0, -1.0, 0.0]))
}

/// `(q, p) → (q, p − ηq)`.
pub fn gate_phase<T: Real>(eta: T) -> Result<GateTarget<T>> {
    if !eta.is_finite() {
        return Err(Error::NonFinite("phase gate parameter"));
    }
    let m = DMatrix::from_row_slice(2, 2, &[T::one(), T::zero(), -eta, T::one()]);
    Ok(GateTarget::symplectic(format!("phase:{}", crate::scalar::to_f64(eta)), SymplecticMatrix::new(m)?))
}

/// Position displacement `q → q + shift`.
pub fn gate_pauli_x<T: Real>(shift: T) -> Result<GateTarget<T>> {
    if !shift.is_finite() {
        return Err(Error::NonFinite("displacement"));
    }
    let g = AffineSymplectic::new(SymplecticMatrix::identity(1), DVector::from_vec(vec![shift, T::zero()]))?;
    Ok(GateTarget::affine(format!("x:{}", crate::scalar::to_f64(shift)), g))
}

/// Momentum displacement with translation `(0, −shift)`.
pub fn gate_pauli_z<T: Real>(shift: T) -> Result<GateTarget<T>> {
    if !shift.is_finite() {
        return Err(Error::NonFinite("displacement"));
    }
    let g = AffineSymplectic::new(SymplecticMatrix::identity(1), DVector::from_vec(vec![T::zero(), -shift]))?;
    Ok(GateTarget::affine(format!("z:{}", crate::scalar::to_f64(shift)), g))
}

/// `q₂ → q₁ + q₂`, `p₁ → p₁ − p₂`.
pub fn gate_sum<T: Real>() -> GateTarget<T> {
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0, 0.0,
        1.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, -1.0,
        0.0, 0.0, 0.0, 1.0,
    ];
    GateTarget::symplectic("sum", sym(4, &m))
}

/// Three-qunit SUM, the product `SUM(2,3) · SUM(1,2)`.
pub fn gate_sum3<T: Real>() -> GateTarget<T> {
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        1.0, 1.0, 0.0, 0.0, 0.0, 0.0,
        1.0, 1.0, 1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 1.0, -1.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
    ];
    GateTarget::symplectic("sum3", sym(6, &m))
}

/// Exchange of two qunits.
pub fn gate_swap<T: Real>() -> GateTarget<T> {
    #[rustfmt::skip]
    let m = [
        0.0, 1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
    ];
    GateTarget::symplectic("swap", sym(4, &m))
}

/// Single-mode squeezer `diag(λ, 1/λ)`.
pub fn gate_squeeze<T: Real>(lambda: T) -> Result<GateTarget<T>> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidArgument("squeezing factor must be positive".into()));
    }
    let m = DMatrix::from_diagonal(&DVector::from_vec(vec![lambda, T::one() / lambda]));
    Ok(GateTarget::symplectic(format!("squeeze:{}", crate::scalar::to_f64(lambda)), SymplecticMatrix::new(m)?))
}

/// Identity on `n_modes` qunits.
pub fn gate_identity<T: Real>(n_modes: usize) -> Result<GateTarget<T>> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("identity gate needs at least one mode".into()));
    }
    Ok(GateTarget::symplectic(format!("identity:{n_modes}"), SymplecticMatrix::identity(n_modes)))
}

/// Controlled NOT on basis states `|c t⟩`, control being the high bit.
pub fn gate_cnot<T: Real>() -> GateTarget<T> {
    GateTarget::unitary("cnot", UnitaryMatrix::permutation(&[0, 1, 3, 2]).expect("valid permutation"))
}

pub fn gate_toffoli<T: Real>() -> GateTarget<T> {
    GateTarget::unitary("toffoli", UnitaryMatrix::permutation(&[0, 1, 2, 3, 4, 5, 7, 6]).expect("valid permutation"))
}

/// True when the symplectic part of `g` is orthogonal, i.e. reachable by
/// passive linear optics.
pub fn compact_part_check<T: Real>(g: &GateTarget<T>) -> Result<bool> {
    let w = g.symplectic_matrix()?;
    Ok(w.is_orthogonal(scaled_tol(1e-10)))
}

/// Names accepted by [`parse_gate`].
pub fn gate_names() -> &'static [(&'static str, &'static str)] {
    &[
        ("fourier", "one-qunit quarter rotation (q, p) -> (p, -q)"),
        ("phase:ETA", "one-qunit shear p -> p - ETA q"),
        ("squeeze:LAMBDA", "one-qunit squeezer diag(LAMBDA, 1/LAMBDA)"),
        ("x:Q", "position displacement by Q"),
        ("z:P", "momentum displacement, translation (0, -P)"),
        ("sum", "two-qunit SUM q2 -> q1 + q2, p1 -> p1 - p2"),
        ("sum3", "three-qunit SUM(2,3) SUM(1,2)"),
        ("swap", "two-qunit exchange"),
        ("identity:N", "identity on N qunits"),
        ("cnot", "two-qubit controlled NOT"),
        ("toffoli", "three-qubit controlled-controlled NOT"),
    ]
}

fn param<T: Real>(name: &str, s: &str) -> Result<T> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(lit)
        .ok_or_else(|| Error::UnknownGate(format!("{name}: cannot parse parameter '{s}'")))
}

/// Resolves a catalog name such as `sum`, `phase:0.5` or `squeeze:2`.
pub fn parse_gate<T: Real>(name: &str) -> Result<GateTarget<T>> {
    let parts: Vec<&str> = name.trim().split(':').collect();
    let g = match parts.as_slice() {
        ["fourier"] => Ok(gate_fourier()),
        ["phase", eta] => gate_phase(param(name, eta)?),
        ["squeeze", l] => gate_squeeze(param(name, l)?),
        ["x", q] => gate_pauli_x(param(name, q)?),
        ["z", p] => gate_pauli_z(param(name, p)?),
        ["sum"] => Ok(gate_sum()),
        ["sum3"] => Ok(gate_sum3()),
        ["swap"] => Ok(gate_swap()),
        ["identity", n] => gate_identity(n.parse().map_err(|_| Error::UnknownGate(name.to_string()))?),
        ["cnot"] => Ok(gate_cnot()),
        ["toffoli"] => Ok(gate_toffoli()),
        _ => return Err(Error::UnknownGate(name.to_string())),
    };
    g.map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::UnknownGate(format!("{name}: {msg}")),
        other => other,
    })
}
