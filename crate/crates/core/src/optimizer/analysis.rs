use nalgebra::DMatrix;
use rustfft::{num_complex::Complex as FftComplex, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

use super::ControlField;

/// `Σ_i ∫ C_i(t)² dt` for the piecewise-constant field: each of the first
/// `q − 1` samples is held for `Δt`.
pub fn fluence<T: Real>(field: &ControlField<T>) -> T {
    let active = field.n_steps() - 1;
    let a = field.amplitudes();
    a.columns(0, active).iter().fold(T::zero(), |acc, &c| acc + c * c) * field.dt()
}

/// Discrete Fourier magnitudes of each control over the `q − 1` samples that
/// act during propagation (the last grid point closes the interval).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Frequency of each bin in units of `1/t_f`, negative above Nyquist.
    pub frequencies: Vec<f64>,
    /// `n_controls × bins` magnitudes `|X_j|`.
    pub magnitudes: DMatrix<f64>,
}

impl Spectrum {
    /// Index of the largest non-negative-frequency bin of a control.
    pub fn peak_bin(&self, control: usize) -> usize {
        let half = self.frequencies.len() / 2;
        (0..=half)
            .max_by(|&a, &b| self.magnitudes[(control, a)].total_cmp(&self.magnitudes[(control, b)]))
            .unwrap_or(0)
    }
}

pub fn fourier_spectrum<T: Real>(field: &ControlField<T>) -> Result<Spectrum> {
    let q = field.n_steps();
    if q < 4 {
        return Err(Error::InvalidArgument(format!("spectrum needs at least 4 time points, got {q}")));
    }
    let n = q - 1;
    let t_f = to_f64(field.t_f());
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut magnitudes = DMatrix::zeros(field.n_controls(), n);
    for (i, row) in field.amplitudes().row_iter().enumerate() {
        let mut buf: Vec<FftComplex<f64>> = row.iter().take(n).map(|&c| FftComplex::new(to_f64(c), 0.0)).collect();
        fft.process(&mut buf);
        for (j, z) in buf.iter().enumerate() {
            magnitudes[(i, j)] = z.norm();
        }
    }
    let frequencies = (0..n)
        .map(|j| {
            let j = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            j / t_f
        })
        .collect();
    Ok(Spectrum { frequencies, magnitudes })
}
