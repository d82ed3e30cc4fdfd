//! Physical control systems and Lie-algebraic controllability analysis.
//!
//! Bosonic models are written in quadrature form with the standard
//! convention `q = (a + a†)/√2`, `p = (a − a†)/(i√2)`, which keeps every
//! Hamiltonian matrix real symmetric. Constant energy offsets are dropped
//! because they act trivially on the symplectic propagator.

mod lie;
mod registry;

pub use lie::{drift_generates_compact_flow, lie_closure, lie_closure_with, Classification, ControllabilityReport, TOL_CLOSURE};
pub use registry::{model_names, parse_model};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::{cplx, lit, Real};
use crate::symplectic::{p_index, q_index, HermitianMatrix, QuadraticHamiltonian};

/// Which group the propagator lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Symplectic,
    Unitary,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Flavor::Symplectic => f.write_str("symplectic"),
            Flavor::Unitary => f.write_str("unitary"),
        }
    }
}

/// Drift and control Hamiltonians of one flavor.
#[derive(Debug, Clone, PartialEq)]
pub enum Hamiltonians<T: Real> {
    Symplectic { drift: QuadraticHamiltonian<T>, controls: Vec<QuadraticHamiltonian<T>> },
    Unitary { drift: HermitianMatrix<T>, controls: Vec<HermitianMatrix<T>> },
}

/// Bilinear control system `H(t) = H_0 + Σ_i C_i(t) H_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSystem<T: Real> {
    label: String,
    hamiltonians: Hamiltonians<T>,
}

impl<T: Real> ControlSystem<T> {
    pub fn symplectic(
        label: impl Into<String>,
        drift: QuadraticHamiltonian<T>,
        controls: Vec<QuadraticHamiltonian<T>>,
    ) -> Result<Self> {
        for c in &controls {
            if c.n_modes() != drift.n_modes() {
                return Err(Error::DimensionMismatch { expected: 2 * drift.n_modes(), found: 2 * c.n_modes() });
            }
        }
        Ok(Self { label: label.into(), hamiltonians: Hamiltonians::Symplectic { drift, controls } })
    }

    pub fn unitary(label: impl Into<String>, drift: HermitianMatrix<T>, controls: Vec<HermitianMatrix<T>>) -> Result<Self> {
        for c in &controls {
            if c.dim() != drift.dim() {
                return Err(Error::DimensionMismatch { expected: drift.dim(), found: c.dim() });
            }
        }
        Ok(Self { label: label.into(), hamiltonians: Hamiltonians::Unitary { drift, controls } })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hamiltonians(&self) -> &Hamiltonians<T> {
        &self.hamiltonians
    }

    pub fn flavor(&self) -> Flavor {
        match self.hamiltonians {
            Hamiltonians::Symplectic { .. } => Flavor::Symplectic,
            Hamiltonians::Unitary { .. } => Flavor::Unitary,
        }
    }

    pub fn n_controls(&self) -> usize {
        match &self.hamiltonians {
            Hamiltonians::Symplectic { controls, .. } => controls.len(),
            Hamiltonians::Unitary { controls, .. } => controls.len(),
        }
    }

    /// Matrix dimension of the propagator (`2N` or `2^n`).
    pub fn dim(&self) -> usize {
        match &self.hamiltonians {
            Hamiltonians::Symplectic { drift, .. } => 2 * drift.n_modes(),
            Hamiltonians::Unitary { drift, .. } => drift.dim(),
        }
    }

    /// Number of qunits for symplectic systems.
    pub fn n_modes(&self) -> Option<usize> {
        match &self.hamiltonians {
            Hamiltonians::Symplectic { drift, .. } => Some(drift.n_modes()),
            Hamiltonians::Unitary { .. } => None,
        }
    }

    /// Generators of motion: `J H` for symplectic systems, `−i H` for unitary
    /// ones, drift first.
    pub fn generators(&self) -> Vec<DMatrix<Complex<T>>> {
        match &self.hamiltonians {
            Hamiltonians::Symplectic { drift, controls } => std::iter::once(drift)
                .chain(controls.iter())
                .map(|h| h.generator().map(|x| cplx(x, T::zero())))
                .collect(),
            Hamiltonians::Unitary { drift, controls } => std::iter::once(drift)
                .chain(controls.iter())
                .map(|h| h.matrix().map(|z| cplx(z.im, -z.re)))
                .collect(),
        }
    }
}

fn oscillator<T: Real>(n_modes: usize, mode: usize, c: T) -> [(usize, usize, T); 2] {
    [(q_index(n_modes, mode), q_index(n_modes, mode), c), (p_index(n_modes, mode), p_index(n_modes, mode), c)]
}

/// Local phase-shift control `x_j² + p_j²`.
fn local_phase<T: Real>(n_modes: usize, mode: usize) -> Result<QuadraticHamiltonian<T>> {
    QuadraticHamiltonian::from_monomials(n_modes, &oscillator(n_modes, mode, T::one()))
}

/// Light–collective-spin model: drift `κ x₁p₂` (plus `κ x₂p₃` for three
/// qunits) with one local phase control per qunit.
pub fn photon_model<T: Real>(kappa: T, n_qunits: usize) -> Result<ControlSystem<T>> {
    if kappa == T::zero() || !kappa.is_finite() {
        return Err(Error::InvalidArgument("photon model coupling must be finite and nonzero".into()));
    }
    if !(2..=3).contains(&n_qunits) {
        return Err(Error::InvalidArgument(format!("photon model supports 2 or 3 qunits, got {n_qunits}")));
    }
    let n = n_qunits;
    let terms: Vec<_> = (0..n - 1).map(|j| (q_index(n, j), p_index(n, j + 1), kappa)).collect();
    let drift = QuadraticHamiltonian::from_monomials(n, &terms)?;
    let controls = (0..n).map(|j| local_phase(n, j)).collect::<Result<Vec<_>>>()?;
    ControlSystem::symplectic(format!("photon:{n}"), drift, controls)
}

/// Two-qunit system whose control Hamiltonians alone generate `sp(4, R)`.
///
/// Drift `a₁†a₁ + a₂†a₂`; controls `i(a₁†² − a₁² + a₂†² − a₂²) = Σ_j (q_j p_j + p_j q_j)`
/// and `a₁†a₁ − a₂†a₂ + i(a₁† + a₁)(a₂† − a₂) = ½(q₁² + p₁² − q₂² − p₂²) + 2 q₁p₂`.
pub fn strongly_controllable_model<T: Real>() -> Result<ControlSystem<T>> {
    let n = 2;
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let mut drift_terms = Vec::new();
    for j in 0..n {
        drift_terms.extend(oscillator(n, j, half));
    }
    let drift = QuadraticHamiltonian::from_monomials(n, &drift_terms)?;
    let squeeze = QuadraticHamiltonian::from_monomials(
        n,
        &[(q_index(n, 0), p_index(n, 0), two), (q_index(n, 1), p_index(n, 1), two)],
    )?;
    let mut mixer_terms = Vec::new();
    mixer_terms.extend(oscillator(n, 0, half));
    mixer_terms.extend(oscillator(n, 1, -half));
    mixer_terms.push((q_index(n, 0), p_index(n, 1), two));
    let mixer = QuadraticHamiltonian::from_monomials(n, &mixer_terms)?;
    ControlSystem::symplectic("strong", drift, vec![squeeze, mixer])
}

/// Cavity mode `a` coupled to two ion vibrational modes `b₁`, `b₂`.
///
/// Drift `2ν(b₁†b₁ + b₂†b₂)`; controls are the beamsplitter
/// `r₁₁(a†b₁ + ab₁†) = r₁₁(q_a q₁ + p_a p₁)` and the two-mode squeezer
/// `r₂₁(a†b₂† + ab₂) = r₂₁(q_a q₂ − p_a p₂)`. Mode order is `(a, b₁, b₂)`.
pub fn ion_trap_model<T: Real>(nu: T, r11: T, r21: T) -> Result<ControlSystem<T>> {
    let n = 3;
    let mut drift_terms = Vec::new();
    drift_terms.extend(oscillator(n, 1, nu));
    drift_terms.extend(oscillator(n, 2, nu));
    let drift = QuadraticHamiltonian::from_monomials(n, &drift_terms)?;
    let beamsplitter = QuadraticHamiltonian::from_monomials(
        n,
        &[(q_index(n, 0), q_index(n, 1), r11), (p_index(n, 0), p_index(n, 1), r11)],
    )?;
    let two_mode_squeeze = QuadraticHamiltonian::from_monomials(
        n,
        &[(q_index(n, 0), q_index(n, 2), r21), (p_index(n, 0), p_index(n, 2), -r21)],
    )?;
    ControlSystem::symplectic("iontrap", drift, vec![beamsplitter, two_mode_squeeze])
}

/// Free Hamiltonian used for the two-qunit SWAP experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapVariant {
    /// `x₁p₂`, which involves squeezing.
    Squeezing,
    /// `x₁p₂ − x₂p₁`, passive linear optics only.
    Linear,
}

pub fn swap_model<T: Real>(variant: SwapVariant) -> Result<ControlSystem<T>> {
    let n = 2;
    let mut terms = vec![(q_index(n, 0), p_index(n, 1), T::one())];
    let label = match variant {
        SwapVariant::Squeezing => "swap:squeezing",
        SwapVariant::Linear => {
            terms.push((q_index(n, 1), p_index(n, 0), -T::one()));
            "swap:linear"
        }
    };
    let drift = QuadraticHamiltonian::from_monomials(n, &terms)?;
    let controls = (0..n).map(|j| local_phase(n, j)).collect::<Result<Vec<_>>>()?;
    ControlSystem::symplectic(label, drift, controls)
}

/// Pauli axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Two-qubit coupling `strength · σ_i^α ⊗ σ_j^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmrCoupling<T> {
    pub i: usize,
    pub j: usize,
    pub alpha: Axis,
    pub beta: Axis,
    pub strength: T,
}

fn pauli<T: Real>(axis: Axis) -> DMatrix<Complex<T>> {
    let (o, z) = (T::one(), T::zero());
    match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[cplx(z, z), cplx(o, z), cplx(o, z), cplx(z, z)]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[cplx(z, z), cplx(z, -o), cplx(z, o), cplx(z, z)]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[cplx(o, z), cplx(z, z), cplx(z, z), cplx(-o, z)]),
    }
}

/// `σ^axis` acting on qubit `site` of `n` (qubit 0 is the most significant).
fn pauli_on<T: Real>(n: usize, ops: &[(usize, Axis)]) -> DMatrix<Complex<T>> {
    let mut out = DMatrix::from_element(1, 1, cplx(T::one(), T::zero()));
    for site in 0..n {
        let factor = ops
            .iter()
            .find(|(s, _)| *s == site)
            .map(|&(_, a)| pauli::<T>(a))
            .unwrap_or_else(|| DMatrix::identity(2, 2));
        out = out.kronecker(&factor);
    }
    out
}

/// NMR spin register: `H₀ = Σ ωᵢσᵢᶻ + Σ J σᵢ^α σⱼ^β`, controls `σᵢˣ`.
pub fn nmr_model<T: Real>(n_qubits: usize, omegas: &[T], couplings: &[NmrCoupling<T>]) -> Result<ControlSystem<T>> {
    if !(2..=3).contains(&n_qubits) {
        return Err(Error::InvalidArgument(format!("NMR model supports 2 or 3 qubits, got {n_qubits}")));
    }
    if omegas.len() != n_qubits {
        return Err(Error::DimensionMismatch { expected: n_qubits, found: omegas.len() });
    }
    let d = 1 << n_qubits;
    let mut h0 = DMatrix::<Complex<T>>::zeros(d, d);
    for (i, &w) in omegas.iter().enumerate() {
        h0 += pauli_on::<T>(n_qubits, &[(i, Axis::Z)]).map(|z| z * w);
    }
    for c in couplings {
        if c.i >= c.j || c.j >= n_qubits {
            return Err(Error::InvalidArgument(format!(
                "coupling must address a pair i < j < {n_qubits}, got ({}, {})",
                c.i, c.j
            )));
        }
        h0 += pauli_on::<T>(n_qubits, &[(c.i, c.alpha), (c.j, c.beta)]).map(|z| z * c.strength);
    }
    let controls = (0..n_qubits)
        .map(|i| HermitianMatrix::new(pauli_on(n_qubits, &[(i, Axis::X)])))
        .collect::<Result<Vec<_>>>()?;
    ControlSystem::unitary(format!("nmr:{n_qubits}"), HermitianMatrix::new(h0)?, controls)
}

/// NMR register with frequencies evenly spaced in `[1, 2]` and
/// nearest-neighbour `zz` couplings of strength 0.5.
pub fn nmr_default<T: Real>(n_qubits: usize) -> Result<ControlSystem<T>> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument("NMR model needs at least two qubits".into()));
    }
    let omegas: Vec<T> = (0..n_qubits).map(|i| lit(1.0 + i as f64 / (n_qubits - 1) as f64)).collect();
    let couplings: Vec<_> = (0..n_qubits - 1)
        .map(|i| NmrCoupling { i, j: i + 1, alpha: Axis::Z, beta: Axis::Z, strength: lit(0.5) })
        .collect();
    nmr_model(n_qubits, &omegas, &couplings)
}
