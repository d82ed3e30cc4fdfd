use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Control amplitudes `C_i(t_k)` on a uniform grid of `q` points over `[0, t_f]`.
///
/// Rows index controls, columns index time points. Propagation holds each
/// column constant on `[t_k, t_{k+1})`, so the last column only matters for
/// diagnostics such as the fluence.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField<T: Real> {
    t_f: T,
    amplitudes: DMatrix<T>,
}

impl<T: Real> ControlField<T> {
    pub fn new(t_f: T, amplitudes: DMatrix<T>) -> Result<Self> {
        if !(t_f > T::zero()) || !t_f.is_finite() {
            return Err(Error::InvalidArgument("final time must be positive and finite".into()));
        }
        if amplitudes.ncols() < 2 {
            return Err(Error::InvalidArgument(format!("field needs at least 2 time points, got {}", amplitudes.ncols())));
        }
        if amplitudes.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("control field"));
        }
        Ok(Self { t_f, amplitudes })
    }

    pub fn zeros(n_controls: usize, n_steps: usize, t_f: T) -> Result<Self> {
        Self::new(t_f, DMatrix::zeros(n_controls, n_steps))
    }

    pub fn n_controls(&self) -> usize {
        self.amplitudes.nrows()
    }

    /// Number of grid points `q`.
    pub fn n_steps(&self) -> usize {
        self.amplitudes.ncols()
    }

    pub fn t_f(&self) -> T {
        self.t_f
    }

    /// `Δt = t_f / (q − 1)`.
    pub fn dt(&self) -> T {
        self.t_f / lit::<T>((self.n_steps() - 1) as f64)
    }

    pub fn time(&self, k: usize) -> T {
        self.dt() * lit::<T>(k as f64)
    }

    pub fn amplitudes(&self) -> &DMatrix<T> {
        &self.amplitudes
    }

    pub fn amplitude(&self, control: usize, k: usize) -> T {
        self.amplitudes[(control, k)]
    }

    /// Returns a field with `amplitudes + alpha * direction`.
    pub fn stepped(&self, direction: &DMatrix<T>, alpha: T) -> Result<Self> {
        if direction.shape() != self.amplitudes.shape() {
            return Err(Error::DimensionMismatch { expected: self.amplitudes.len(), found: direction.len() });
        }
        Self::new(self.t_f, &self.amplitudes + direction * alpha)
    }

    /// Same amplitudes on a different horizon.
    pub fn with_final_time(&self, t_f: T) -> Result<Self> {
        Self::new(t_f, self.amplitudes.clone())
    }
}

/// Initial-guess shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Random,
    Constant,
    Sine,
}

impl std::str::FromStr for InitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InitKind::Random),
            "constant" => Ok(InitKind::Constant),
            "sine" | "sin" => Ok(InitKind::Sine),
            other => Err(Error::InvalidArgument(format!("unknown initial field kind '{other}'"))),
        }
    }
}

/// Initial control field: uniform noise in `[−A, A]` from a seeded ChaCha
/// stream, the constant `A`, or `A sin(2π t / t_f)`.
pub fn initial_field<T: Real>(
    kind: InitKind,
    n_controls: usize,
    n_steps: usize,
    t_f: T,
    amplitude: T,
    seed: u64,
) -> Result<ControlField<T>> {
    if !(amplitude >= T::zero()) {
        return Err(Error::InvalidArgument("amplitude must be non-negative".into()));
    }
    if n_steps < 2 {
        return Err(Error::InvalidArgument(format!("field needs at least 2 time points, got {n_steps}")));
    }
    let amplitudes = match kind {
        InitKind::Constant => DMatrix::from_element(n_controls, n_steps, amplitude),
        InitKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = crate::scalar::to_f64(amplitude);
            // Column-major fill so the stream order is fixed by (i, k).
            DMatrix::from_fn(n_controls, n_steps, |_, _| lit::<T>(if a > 0.0 { rng.random_range(-a..=a) } else { 0.0 }))
        }
        InitKind::Sine => {
            let two_pi = lit::<T>(2.0) * T::pi();
            let last = lit::<T>((n_steps - 1) as f64);
            DMatrix::from_fn(n_controls, n_steps, |_, k| {
                let frac = lit::<T>(k as f64) / last;
                // Exact zeros at both ends rather than sin(2π) ≈ −2.4e−16.
                if k == 0 || k == n_steps - 1 {
                    T::zero()
                } else {
                    amplitude * (two_pi * frac).sin()
                }
            })
        }
    };
    ControlField::new(t_f, amplitudes)
}
