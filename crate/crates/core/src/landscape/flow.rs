//! Kinematic gradient flow on the propagator group.
//!
//! The flow is written as `dY/ds = A(Y) Y` with `A(Y)` in the Lie algebra and
//! integrated by Runge–Kutta–Munthe-Kaas: the Dormand–Prince 5(4) pair runs
//! in algebra coordinates `Y = exp(Ω) Y₀` and every step is retracted with the
//! matrix exponential, so the iterates stay on the group.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::gates::GateTarget;
use crate::scalar::{eps, lit, to_f64, Real};
use crate::symplectic::{expm, j_matrix, sym_part, Propagator, SymplecticMatrix, UnitaryMatrix};

use super::fidelity::{fidelity_symplectic, fidelity_unitary};

/// Integration controls for [`gradient_flow`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub s_max: f64,
    /// Relative local error allowed per step, measured on `Ω`.
    pub tol: f64,
    pub initial_step: f64,
    /// Steps below this size signal stiffness.
    pub min_step: f64,
    /// Integration stops once `J` drops below this value.
    pub j_floor: f64,
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { s_max: 20.0, tol: 1e-8, initial_step: 1e-2, min_step: 1e-12, j_floor: 1e-26, max_steps: 200_000 }
    }
}

/// One accepted point of a flow trajectory.
#[derive(Debug, Clone)]
pub struct FlowPoint<T: Real> {
    pub s: T,
    pub value: T,
    pub propagator: Propagator<T>,
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn bracket<N: ComplexField + Copy>(x: &DMatrix<N>, y: &DMatrix<N>) -> DMatrix<N> {
    x * y - y * x
}

/// Truncated `dexp⁻¹_Ω(A) = A − ½[Ω,A] + ⅟₁₂[Ω,[Ω,A]] − ⅟₇₂₀ ad⁴_Ω(A)`.
fn dexp_inv<N, T>(omega: &DMatrix<N>, a: &DMatrix<N>) -> DMatrix<N>
where
    N: ComplexField<RealField = T> + Copy,
    T: Real,
{
    let ad1 = bracket(omega, a);
    let ad2 = bracket(omega, &ad1);
    let ad4 = bracket(omega, &bracket(omega, &ad2));
    let c = |x: f64| N::from_real(lit::<T>(x));
    a - ad1 * c(0.5) + ad2 * c(1.0 / 12.0) - ad4 * c(1.0 / 720.0)
}

fn rkmk<N, T, F, J>(y0: DMatrix<N>, field: F, objective: J, opts: &FlowOptions) -> Result<Vec<(T, T, DMatrix<N>)>>
where
    N: ComplexField<RealField = T> + Copy,
    T: Real,
    F: Fn(&DMatrix<N>) -> DMatrix<N>,
    J: Fn(&DMatrix<N>) -> Result<T>,
{
    if !(opts.s_max >= 0.0 && opts.tol > 0.0 && opts.initial_step > 0.0 && opts.min_step > 0.0) {
        return Err(Error::InvalidArgument("flow options must be positive".into()));
    }
    let scal = |x: T| N::from_real(x);
    let e = eps::<T>();
    let floor = lit::<T>(opts.j_floor).max(e * e * lit(1e4));
    let s_max = lit::<T>(opts.s_max);
    let tol = lit::<T>(opts.tol);

    let mut y = y0;
    let mut j = objective(&y)?;
    let mut s = T::zero();
    let mut h = lit::<T>(opts.initial_step);
    let mut out = vec![(s, j, y.clone())];
    let mut a0 = field(&y);
    if a0.norm() == T::zero() {
        return Ok(out);
    }
    let mut steps = 0usize;
    while s < s_max && j > floor && steps < opts.max_steps {
        h = h.min(s_max - s);
        let mut k: Vec<DMatrix<N>> = Vec::with_capacity(7);
        k.push(a0.clone());
        let mut omega5 = None;
        let mut y_new = None;
        let mut failed = false;
        for i in 1..7 {
            let mut omega = DMatrix::zeros(y.nrows(), y.ncols());
            for (jdx, kj) in k.iter().enumerate() {
                if A[i][jdx] != 0.0 {
                    omega += kj * scal(h * lit(A[i][jdx]));
                }
            }
            let yi = match expm(&omega) {
                Ok(ex) => ex * &y,
                Err(_) => {
                    failed = true;
                    break;
                }
            };
            let ai = field(&yi);
            k.push(dexp_inv(&omega, &ai));
            if i == 6 {
                omega5 = Some(omega);
                y_new = Some((yi, ai));
            }
        }
        let accepted = if failed {
            None
        } else {
            let omega5 = omega5.expect("stage six");
            let mut delta = DMatrix::zeros(y.nrows(), y.ncols());
            for (i, ki) in k.iter().enumerate() {
                let w = B5[i] - B4[i];
                if w != 0.0 {
                    delta += ki * scal(h * lit(w));
                }
            }
            let err = delta.norm() / (tol * omega5.norm() + e * e);
            let (yn, an) = y_new.expect("stage six");
            let jn = objective(&yn).unwrap_or(T::max_value().unwrap_or(T::one() / e));
            let monotone = jn <= j + lit::<T>(10.0) * e * (T::one() + j);
            let finite = to_f64(jn).is_finite();
            let factor = if err > T::zero() {
                (lit::<T>(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
            } else {
                lit(5.0)
            };
            if err <= T::one() && monotone && finite {
                Some((yn, an, jn, factor))
            } else {
                h *= if err <= T::one() { lit(0.5) } else { factor.min(lit(0.9)) };
                None
            }
        };
        match accepted {
            Some((yn, an, jn, factor)) => {
                s += h;
                y = yn;
                a0 = an;
                j = jn;
                out.push((s, j, y.clone()));
                h *= factor;
                steps += 1;
            }
            None => {
                if failed {
                    h *= lit(0.25);
                }
                if h < lit::<T>(opts.min_step) * (T::one() + s) {
                    return Err(Error::Stiffness { s: to_f64(s) });
                }
            }
        }
    }
    Ok(out)
}

/// Integrates the steepest-descent flow of `J` from `start` toward `target`.
///
/// Symplectic: `dS/ds = −½ J K S` with `K = sym(S Gᵀ J)`, `G = 2(S − W)`.
/// Unitary: `dU/ds = −½ (U W† − W U†) U`. Both make `J` non-increasing, and
/// near a non-degenerate minimum `J` decays like `e^{−2λs}` with `λ` the
/// smallest relevant curvature.
pub fn gradient_flow<T: Real>(
    start: &Propagator<T>,
    target: &GateTarget<T>,
    opts: &FlowOptions,
) -> Result<Vec<FlowPoint<T>>> {
    let half = lit::<T>(0.5);
    match start {
        Propagator::Symplectic(s0) => {
            let w = target.symplectic_matrix()?.matrix().clone();
            if w.nrows() != s0.dim() {
                return Err(Error::DimensionMismatch { expected: w.nrows(), found: s0.dim() });
            }
            let jm = j_matrix::<T>(s0.n_modes());
            let field = |s: &DMatrix<T>| {
                let g = (s - &w) * lit::<T>(2.0);
                let k = sym_part(&(s * g.transpose() * &jm));
                &jm * k * (-half)
            };
            let traj = rkmk(s0.matrix().clone(), field, |s| fidelity_symplectic(s, target), opts)?;
            Ok(traj
                .into_iter()
                .map(|(s, value, m)| FlowPoint { s, value, propagator: Propagator::Symplectic(SymplecticMatrix::from_trusted(m)) })
                .collect())
        }
        Propagator::Unitary(u0) => {
            let w = target.unitary_matrix()?.matrix().clone();
            if w.nrows() != u0.dim() {
                return Err(Error::DimensionMismatch { expected: w.nrows(), found: u0.dim() });
            }
            let field = |u: &DMatrix<nalgebra::Complex<T>>| {
                let m = u * w.adjoint();
                (&m - m.adjoint()).map(|z| z * (-half))
            };
            let traj = rkmk(u0.matrix().clone(), field, |u| fidelity_unitary(u, target), opts)?;
            Ok(traj
                .into_iter()
                .map(|(s, value, m)| FlowPoint { s, value, propagator: Propagator::Unitary(UnitaryMatrix::from_trusted(m)) })
                .collect())
        }
    }
}

/// Starting point of a flow run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStart {
    /// The target itself, a stationary point.
    Target,
    /// `exp(εX) W` for a random algebra element `X`.
    Perturbed,
    /// `exp(εX)` with no reference to the target.
    Random,
}

impl std::str::FromStr for FlowStart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "target" => Ok(FlowStart::Target),
            "perturbed" => Ok(FlowStart::Perturbed),
            "random" => Ok(FlowStart::Random),
            other => Err(Error::InvalidArgument(format!("unknown flow start '{other}' (target, perturbed, random)"))),
        }
    }
}

/// Seeded starting propagator for [`gradient_flow`]. The random algebra
/// element has i.i.d. uniform `[−1, 1]` coordinates scaled by `scale`.
pub fn flow_start<T: Real>(target: &GateTarget<T>, start: FlowStart, scale: f64, seed: u64) -> Result<Propagator<T>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = target.dim();
    let mut draw = |_: usize, _: usize| lit::<T>(scale * rng.random_range(-1.0..=1.0));
    match target.flavor() {
        crate::models::Flavor::Symplectic => {
            let w = target.symplectic_matrix()?;
            let k = sym_part(&DMatrix::from_fn(d, d, &mut draw));
            let e = expm(&(j_matrix::<T>(d / 2) * k))?;
            let m = match start {
                FlowStart::Target => w.matrix().clone(),
                FlowStart::Perturbed => e * w.matrix(),
                FlowStart::Random => e,
            };
            Ok(Propagator::Symplectic(SymplecticMatrix::new(m)?))
        }
        crate::models::Flavor::Unitary => {
            let w = target.unitary_matrix()?;
            let re = sym_part(&DMatrix::from_fn(d, d, &mut draw));
            let raw = DMatrix::from_fn(d, d, &mut draw);
            let im = (&raw - raw.transpose()) * lit::<T>(0.5);
            // exp(−iH) with H = re + i·im Hermitian.
            let x = DMatrix::from_fn(d, d, |i, j| nalgebra::Complex::new(im[(i, j)], -re[(i, j)]));
            let e = expm(&x)?;
            let m = match start {
                FlowStart::Target => w.matrix().clone(),
                FlowStart::Perturbed => e * w.matrix(),
                FlowStart::Random => e,
            };
            Ok(Propagator::Unitary(UnitaryMatrix::new(m)?))
        }
    }
}

/// Least-squares decay rate `−d ln J / ds` over trajectory points with
/// `j_lo < J < j_hi`. `None` when fewer than three points qualify.
pub fn log_decay_rate<T: Real>(trajectory: &[FlowPoint<T>], j_lo: f64, j_hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = trajectory
        .iter()
        .map(|p| (to_f64(p.s), to_f64(p.value)))
        .filter(|&(_, j)| j > j_lo && j < j_hi)
        .map(|(s, j)| (s, j.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (ms, mj) = pts.iter().fold((0.0, 0.0), |(a, b), (s, j)| (a + s / n, b + j / n));
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (s, j)| (a + (s - ms) * (j - mj), b + (s - ms) * (s - ms)));
    if den == 0.0 {
        return None;
    }
    Some(-num / den)
}
