//! Matrix exponential by Padé approximation with scaling and squaring.
//!
//! The routines are generic over the entry type so the same code serves the
//! real symplectic generators `J H dt` and complex anti-Hermitian generators.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Degrees `(p, q)` of the numerator and denominator of a Padé approximant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadeOrder {
    pub p: usize,
    pub q: usize,
}

impl PadeOrder {
    pub const fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }
}

impl Default for PadeOrder {
    fn default() -> Self {
        Self { p: 6, q: 6 }
    }
}

/// The scaled argument is driven below this 1-norm before the rational
/// approximant is evaluated.
pub const SCALING_THRESHOLD: f64 = 0.5;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Coefficients of the `(p, q)` Padé numerator; the denominator uses
/// `pade_coefficients(q, p)` with alternating signs.
fn pade_coefficients(p: usize, q: usize) -> Vec<f64> {
    let pq = factorial(p + q);
    (0..=p)
        .map(|j| factorial(p + q - j) * factorial(p) / (pq * factorial(j) * factorial(p - j)))
        .collect()
}

pub(crate) fn norm1<N, T>(a: &DMatrix<N>) -> T
where
    N: ComplexField<RealField = T> + Copy,
    T: Real,
{
    let mut best = T::zero();
    for col in a.column_iter() {
        let s = col.iter().fold(T::zero(), |acc, x| acc + x.abs());
        if s > best {
            best = s;
        }
    }
    best
}

fn check_square<N>(a: &DMatrix<N>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(())
}

/// `e^A` with the default `(6, 6)` approximant.
pub fn expm<N, T>(a: &DMatrix<N>) -> Result<DMatrix<N>>
where
    N: ComplexField<RealField = T> + Copy,
    T: Real,
{
    expm_pade(a, PadeOrder::default())
}

/// `e^A` using a `(p, q)` Padé approximant combined with scaling and
/// squaring so that `|A / 2^s|_1 <= 0.5`.
pub fn expm_pade<N, T>(a: &DMatrix<N>, order: PadeOrder) -> Result<DMatrix<N>>
where
    N: ComplexField<RealField = T> + Copy,
    T: Real,
{
    check_square(a)?;
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix exponential argument"));
    }
    let n = a.nrows();
    let norm: T = norm1(a);
    let threshold: T = lit(SCALING_THRESHOLD);
    let mut squarings = 0u32;
    let mut scale = T::one();
    let two: T = lit(2.0);
    while norm * scale > threshold {
        scale /= two;
        squarings += 1;
        if squarings > 1100 {
            return Err(Error::NonFinite("matrix exponential argument"));
        }
    }
    let x = a.map(|v| v.scale(scale));

    let num_c = pade_coefficients(order.p, order.q);
    let den_c = pade_coefficients(order.q, order.p);
    let deg = order.p.max(order.q);

    let mut num = DMatrix::<N>::zeros(n, n);
    let mut den = DMatrix::<N>::zeros(n, n);
    let mut power = DMatrix::<N>::identity(n, n);
    for k in 0..=deg {
        if k > 0 {
            power = &power * &x;
        }
        if k < num_c.len() {
            num += power.map(|v| v.scale(lit(num_c[k])));
        }
        if k < den_c.len() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            den += power.map(|v| v.scale(lit(sign * den_c[k])));
        }
    }

    let mut r = den
        .lu()
        .solve(&num)
        .ok_or_else(|| Error::Eigen("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix exponential result"));
    }
    Ok(r)
}

/// Fréchet derivative of the exponential at `A` in direction `E`, read off
/// the upper-right block of `exp([[A, E], [0, A]])`.
pub fn expm_frechet<N, T>(a: &DMatrix<N>, e: &DMatrix<N>) -> Result<DMatrix<N>>
where
    N: ComplexField<RealField = T> + Copy,
    T: Real,
{
    check_square(a)?;
    if e.shape() != a.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: e.nrows() });
    }
    let n = a.nrows();
    let mut block = DMatrix::<N>::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(a);
    block.view_mut((n, n), (n, n)).copy_from(a);
    block.view_mut((0, n), (n, n)).copy_from(e);
    let big = expm(&block)?;
    Ok(big.view((0, n), (n, n)).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, Complex};

    #[test]
    fn zero_gives_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(expm(&z).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn rotation_closed_form() {
        let th = std::f64::consts::FRAC_PI_4;
        let a = dmatrix![0.0, th; -th, 0.0];
        let r = expm(&a).unwrap();
        let expect = dmatrix![th.cos(), th.sin(); -th.sin(), th.cos()];
        assert_relative_eq!(r, expect, epsilon = 1e-12);
    }

    #[test]
    fn nilpotent_series_truncates() {
        // SUM generator: q2 += t q1, p1 -= t p2.
        let mut g = DMatrix::<f64>::zeros(4, 4);
        g[(1, 0)] = 1.0;
        g[(2, 3)] = -1.0;
        for &t in &[0.3, 1.0, 7.5] {
            let r = expm(&(&g * t)).unwrap();
            let expect = DMatrix::identity(4, 4) + &g * t;
            assert_relative_eq!(r, expect, epsilon = 1e-12 * (1.0 + t));
        }
    }

    #[test]
    fn large_norm_scalar_matches_exp() {
        let a = dmatrix![9.5];
        assert_relative_eq!(expm(&a).unwrap()[(0, 0)], 9.5f64.exp(), max_relative = 1e-13);
        let b = dmatrix![-9.5];
        assert_relative_eq!(expm(&b).unwrap()[(0, 0)], (-9.5f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn off_diagonal_orders_are_supported() {
        let a = dmatrix![0.2, 0.1; -0.3, 0.05];
        let reference = expm(&a).unwrap();
        for order in [PadeOrder::new(3, 3), PadeOrder::new(4, 6), PadeOrder::new(8, 2)] {
            let r = expm_pade(&a, order).unwrap();
            assert_relative_eq!(r, reference, epsilon = 1e-6);
        }
    }

    #[test]
    fn complex_phase() {
        let a = DMatrix::from_element(1, 1, Complex::new(0.0, std::f64::consts::PI));
        let r = expm(&a).unwrap();
        assert_relative_eq!(r[(0, 0)].re, -1.0, epsilon = 1e-13);
        assert_relative_eq!(r[(0, 0)].im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn single_precision_rotation() {
        let th = 0.7f32;
        let a = dmatrix![0.0f32, th; -th, 0.0];
        let r = expm(&a).unwrap();
        assert!((r[(0, 0)] - th.cos()).abs() < 1e-6);
        assert!((r[(0, 1)] - th.sin()).abs() < 1e-6);
    }

    #[test]
    fn non_square_rejected() {
        let a = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(expm(&a), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn overflow_reported() {
        let a = dmatrix![800.0f64];
        assert!(matches!(expm(&a), Err(Error::NonFinite(_))));
    }

    #[test]
    fn frechet_matches_finite_difference() {
        let a = dmatrix![0.1, 0.7, -0.2; 0.3, -0.4, 0.5; 0.0, 0.2, 0.3];
        let e = dmatrix![0.5, -0.1, 0.2; 0.0, 0.3, 0.1; -0.6, 0.2, 0.4];
        let h = 1e-6;
        let fd = (expm(&(&a + &e * h)).unwrap() - expm(&(&a - &e * h)).unwrap()) / (2.0 * h);
        let l = expm_frechet(&a, &e).unwrap();
        assert_relative_eq!(l, fd, epsilon = 1e-8);
    }
}
