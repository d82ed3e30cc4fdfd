//! Counting estimates for critical submanifolds and the attraction bound.

use crate::error::{Error, Result};
use crate::gates::GateTarget;
use crate::scalar::{lit, Real};

use super::critical::symplectic_svd;

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn double_factorial_odd(m: u64) -> u128 {
    // (2m − 1)!!
    (1..=m).fold(1u128, |acc, i| acc * (2 * i - 1) as u128)
}

/// Number of critical submanifolds when all singular values coincide in one
/// non-compact cluster, counted by type-I, type-II and type-III multiplicities
/// (with both type-III branches).
pub fn count_critical_degenerate(n: usize) -> u128 {
    let n = n as u128;
    if n.is_multiple_of(2) {
        (n + 2) * (n + 2) / 2
    } else {
        (n + 1) * (n + 3) / 2
    }
}

/// Upper bound on the number of type-III configurations for `N` modes with
/// pairwise distinct, admissible singular values: choose `2m` modes, pair them
/// up, and for each of the remaining `N − 2m` modes pick type I or II.
pub fn count_critical_bound(n: usize) -> u128 {
    let n = n as u64;
    (1..=n / 2).map(|m| (1u128 << (n - 2 * m)) * binomial(n, 2 * m) * double_factorial_odd(m)).sum()
}

/// Radius `R` with `R² = Σ_i (e_i² + e_i⁻² + 3 e_i^{2/3} + 3 e_i^{−2/3})`; every
/// suboptimal critical point lies within `R` of the target.
pub fn critical_radius<T: Real>(target: &GateTarget<T>) -> Result<T> {
    let svd = symplectic_svd(target.symplectic_matrix()?)?;
    let three = lit::<T>(3.0);
    let r2 = svd.e.iter().fold(T::zero(), |acc, &e| {
        let c = e.cbrt();
        acc + e * e + T::one() / (e * e) + three * c * c + three / (c * c)
    });
    Ok(r2.sqrt())
}

/// Volume-ratio bound `N₁ (r/R)^{2N² + N}` on the fraction of a ball of
/// radius `R` occupied by attraction regions of radius `r`.
pub fn attraction_ratio_bound<T: Real>(r: T, target: &GateTarget<T>) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument("attraction radius must be positive".into()));
    }
    let n = target.dim() / 2;
    let big_r = critical_radius(target)?;
    let exponent = (2 * n * n + n) as i32;
    Ok(lit::<T>(count_critical_bound(n) as f64) * (r / big_r).powi(exponent))
}
