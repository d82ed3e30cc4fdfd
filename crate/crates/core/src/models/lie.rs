//! Commutator closure of control generators.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use super::{ControlSystem, Flavor, Hamiltonians};
use crate::error::{Error, Result};
use crate::scalar::{lit, scaled_tol, to_f64, Real};
use crate::symplectic::{cfrobenius, frobenius};

/// Relative cutoff below which a new commutator counts as dependent.
pub const TOL_CLOSURE: f64 = 1e-9;

const MAX_ROUNDS: usize = 64;

/// Controllability verdict, ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Uncontrollable,
    RankMetNoncompactDrift,
    Controllable,
    StronglyControllable,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Uncontrollable => "uncontrollable",
            Classification::RankMetNoncompactDrift => "rank-met-noncompact-drift",
            Classification::Controllable => "controllable",
            Classification::StronglyControllable => "strongly-controllable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControllabilityReport {
    pub model: String,
    pub flavor: Flavor,
    /// Name of the reference algebra, e.g. `sp(4)`, `osp(4)` or `su(4)`.
    pub ambient: String,
    pub lie_dimension: usize,
    pub ambient_dimension: usize,
    pub rank_condition_met: bool,
    pub drift_compact: bool,
    /// Dimension reached by the control generators without the drift.
    pub controls_dimension: usize,
    /// Proxy for strong controllability: the controls alone span the algebra.
    pub controls_span_algebra: bool,
    pub classification: Classification,
}

/// Orthonormal basis of a real vector space of complex matrices, with the
/// matrices kept alongside their coordinates.
struct Span<T: Real> {
    vectors: Vec<Vec<T>>,
    elements: Vec<DMatrix<Complex<T>>>,
    tol: T,
}

impl<T: Real> Span<T> {
    fn new(tol: T) -> Self {
        Self { vectors: Vec::new(), elements: Vec::new(), tol }
    }

    fn coords(m: &DMatrix<Complex<T>>) -> Vec<T> {
        m.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Adds `m` if it is independent; returns whether it was added.
    fn insert(&mut self, m: DMatrix<Complex<T>>) -> bool {
        let mut v = Self::coords(&m);
        let norm0 = v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        if norm0 == T::zero() {
            return false;
        }
        // Two Gram-Schmidt passes keep the basis orthonormal to working precision.
        for _ in 0..2 {
            for b in &self.vectors {
                let dot = b.iter().zip(&v).fold(T::zero(), |a, (&x, &y)| a + x * y);
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm = v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        if norm <= self.tol * norm0 {
            return false;
        }
        for x in &mut v {
            *x /= norm;
        }
        self.vectors.push(v);
        let scale = T::one() / norm0;
        self.elements.push(m.map(|z| z * scale));
        true
    }

    fn dim(&self) -> usize {
        self.vectors.len()
    }
}

fn commutator<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    a * b - b * a
}

/// Dimension of the real Lie algebra generated by `gens`.
fn closure_dimension<T: Real>(gens: &[DMatrix<Complex<T>>], tol: T, cap: usize) -> Result<usize> {
    let mut span = Span::new(tol);
    let mut frontier = Vec::new();
    for g in gens {
        if span.insert(g.clone()) {
            frontier.push(span.dim() - 1);
        }
    }
    for _ in 0..MAX_ROUNDS {
        if frontier.is_empty() {
            return Ok(span.dim());
        }
        let mut next = Vec::new();
        for &i in &frontier {
            let mut j = 0;
            while j < span.dim() {
                let c = commutator(&span.elements[i], &span.elements[j]);
                if span.insert(c) {
                    next.push(span.dim() - 1);
                    if span.dim() > cap {
                        return Err(Error::ClosureNotConverged(span.dim()));
                    }
                }
                j += 1;
            }
        }
        frontier = next;
    }
    Err(Error::ClosureNotConverged(span.dim()))
}

fn is_skew<T: Real>(m: &DMatrix<T>, tol: T) -> bool {
    frobenius(&(m + m.transpose())) <= tol * (T::one() + frobenius(m))
}

/// Eigenvalue test of compactness for a real generator `A`: the flow
/// `exp(sA)` stays bounded iff the spectrum is imaginary and `A` is
/// diagonalizable, checked via the minimal polynomial being squarefree.
pub fn drift_generates_compact_flow<T: Real>(a: &DMatrix<T>) -> Result<bool> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::NotSquare { rows: n, cols: a.ncols() });
    }
    let scale = T::one().max(frobenius(a));
    let tol: T = lit::<T>(1e-6) * scale;
    // The shift keeps the diagonal away from zero, which the Schur
    // convergence test needs for nilpotent and rotation-like inputs.
    let shift = scale;
    let shifted = a + DMatrix::<T>::identity(n, n) * shift;
    let eig: Vec<Complex<T>> = nalgebra::Schur::try_new(shifted, T::default_epsilon(), 10_000)
        .ok_or_else(|| Error::Eigen("Schur decomposition did not converge".into()))?
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex::new(z.re - shift, z.im))
        .collect();
    if eig.iter().any(|z| z.re.abs() > tol) {
        return Ok(false);
    }
    let mut distinct: Vec<Complex<T>> = Vec::new();
    for z in eig.iter() {
        if !distinct.iter().any(|d| (d - z).norm_sqr().sqrt() <= tol) {
            distinct.push(*z);
        }
    }
    let ac = a.map(|x| Complex::new(x, T::zero()));
    let mut poly = DMatrix::<Complex<T>>::identity(n, n);
    for d in &distinct {
        poly = &poly * (&ac - DMatrix::<Complex<T>>::identity(n, n) * *d);
    }
    let pnorm = poly.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
    let bound = lit::<T>(1e-6) * scale.powi(distinct.len() as i32);
    Ok(pnorm <= bound)
}

/// [`lie_closure_with`] at the default cutoff.
pub fn lie_closure<T: Real>(system: &ControlSystem<T>) -> Result<ControllabilityReport> {
    lie_closure_with(system, lit(TOL_CLOSURE))
}

/// Commutator closure of the generators of `system`.
///
/// Symplectic systems are compared against `sp(2N)`, or against `osp(2N)`
/// (dimension `N²`) when every generator is passive. Unitary systems are
/// compared against `su(d)` when every Hamiltonian is traceless and `u(d)`
/// otherwise.
pub fn lie_closure_with<T: Real>(system: &ControlSystem<T>, tol: T) -> Result<ControllabilityReport> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("closure tolerance must be positive".into()));
    }
    let tol = tol.max(scaled_tol(0.0));
    let gens = system.generators();
    let d = system.dim();
    let (ambient, ambient_dimension, drift_compact) = match system.hamiltonians() {
        Hamiltonians::Symplectic { drift, controls } => {
            let n = drift.n_modes();
            let skew_tol = lit::<T>(1e-12).max(scaled_tol(0.0));
            let drift_compact = is_skew(&drift.generator(), skew_tol);
            let passive = drift_compact && controls.iter().all(|h| is_skew(&h.generator(), skew_tol));
            if passive {
                (format!("osp({})", 2 * n), n * n, drift_compact)
            } else {
                (format!("sp({})", 2 * n), n * (2 * n + 1), drift_compact)
            }
        }
        Hamiltonians::Unitary { .. } => {
            let traceless = gens.iter().all(|g| {
                let tr = g.trace();
                to_f64(tr.norm_sqr().sqrt()) <= 1e-12 * (1.0 + to_f64(cfrobenius(g)))
            });
            if traceless {
                (format!("su({d})"), d * d - 1, true)
            } else {
                (format!("u({d})"), d * d, true)
            }
        }
    };
    let cap = 2 * d * d;
    let lie_dimension = closure_dimension(&gens, tol, cap)?;
    let controls_dimension = closure_dimension(&gens[1..], tol, cap)?;
    let rank_condition_met = lie_dimension == ambient_dimension;
    let controls_span_algebra = controls_dimension == ambient_dimension;
    let classification = if !rank_condition_met {
        Classification::Uncontrollable
    } else if controls_span_algebra {
        Classification::StronglyControllable
    } else if drift_compact {
        Classification::Controllable
    } else {
        Classification::RankMetNoncompactDrift
    };
    Ok(ControllabilityReport {
        model: system.label().to_string(),
        flavor: system.flavor(),
        ambient,
        lie_dimension,
        ambient_dimension,
        rank_condition_met,
        drift_compact,
        controls_dimension,
        controls_span_algebra,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;

    #[test]
    fn photon_rank_met_noncompact() {
        let r = lie_closure(&photon_model(1.0f64, 2).unwrap()).unwrap();
        assert_eq!(r.lie_dimension, 10);
        assert_eq!(r.ambient_dimension, 10);
        assert!(!r.drift_compact);
        assert_eq!(r.classification, Classification::RankMetNoncompactDrift);
    }

    #[test]
    fn photon_three_qunits_full() {
        let r = lie_closure(&photon_model(1.0f64, 3).unwrap()).unwrap();
        assert_eq!(r.lie_dimension, 21);
    }

    #[test]
    fn ion_trap_uncontrollable() {
        let r = lie_closure(&ion_trap_model(1.0f64, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.ambient_dimension, 21);
        assert!(r.lie_dimension < 21);
        assert_eq!(r.classification, Classification::Uncontrollable);
    }

    #[test]
    fn strong_model() {
        let r = lie_closure(&strongly_controllable_model::<f64>().unwrap()).unwrap();
        assert_eq!(r.controls_dimension, 10);
        assert_eq!(r.classification, Classification::StronglyControllable);
    }

    #[test]
    fn swap_variants() {
        let lin = lie_closure(&swap_model::<f64>(SwapVariant::Linear).unwrap()).unwrap();
        assert_eq!(lin.ambient, "osp(4)");
        assert_eq!(lin.lie_dimension, 4);
        assert_eq!(lin.classification, Classification::Controllable);
        let sq = lie_closure(&swap_model::<f64>(SwapVariant::Squeezing).unwrap()).unwrap();
        assert_eq!(sq.lie_dimension, 10);
    }

    #[test]
    fn nmr_reaches_su() {
        for n in [2, 3] {
            let r = lie_closure(&nmr_default::<f64>(n).unwrap()).unwrap();
            let d = 1usize << n;
            assert_eq!(r.lie_dimension, d * d - 1);
            assert!(r.rank_condition_met);
            assert_eq!(r.classification, Classification::Controllable);
        }
    }

    #[test]
    fn compactness_tests_agree_on_catalog() {
        let systems = vec![
            photon_model(1.0f64, 2).unwrap(),
            photon_model(1.0f64, 3).unwrap(),
            strongly_controllable_model().unwrap(),
            ion_trap_model(1.0, 1.0, 1.0).unwrap(),
            swap_model(SwapVariant::Linear).unwrap(),
            swap_model(SwapVariant::Squeezing).unwrap(),
        ];
        for s in systems {
            let Hamiltonians::Symplectic { drift, .. } = s.hamiltonians() else { unreachable!() };
            let r = lie_closure(&s).unwrap();
            assert_eq!(r.drift_compact, drift_generates_compact_flow(&drift.generator()).unwrap(), "{}", s.label());
        }
    }

    #[test]
    fn eigen_test_cases() {
        // Hyperbolic, nilpotent, rotation.
        let hyp = nalgebra::dmatrix![1.0, 0.0; 0.0, -1.0];
        let nil = nalgebra::dmatrix![0.0, 1.0; 0.0, 0.0];
        let rot = nalgebra::dmatrix![0.0, 2.0; -0.5, 0.0];
        assert!(!drift_generates_compact_flow(&hyp).unwrap());
        assert!(!drift_generates_compact_flow(&nil).unwrap());
        assert!(drift_generates_compact_flow(&rot).unwrap());
        assert!(drift_generates_compact_flow(&DMatrix::<f64>::zeros(2, 2)).unwrap());
    }
}
