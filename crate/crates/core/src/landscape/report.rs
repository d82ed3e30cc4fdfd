use serde::Serialize;

use crate::error::Result;
use crate::gates::GateTarget;
use crate::scalar::{to_f64, Real};
use crate::symplectic::Propagator;

use super::critical::{enumerate_critical, singular_value_clusters, Cluster, CriticalLabels, Domain};

/// `(n_zero, n_plus, n_minus)` as named fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub n_zero: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub labels: CriticalLabels,
    pub critical_value: f64,
    pub hessian: Signature,
    pub dimension: usize,
    pub is_minimum: bool,
    pub residual: f64,
    /// Representative propagator; unitary entries are `[re, im]` pairs.
    pub representative: Vec<Vec<MatrixEntry>>,
}

/// Serializable summary of the critical topology of one landscape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeReport {
    pub gate: String,
    pub domain: Domain,
    /// Singular-value clusters (symplectic targets only).
    pub clusters: Vec<Cluster>,
    pub component_count: usize,
    pub components: Vec<ComponentReport>,
}

/// Matrix entry serialized as a bare number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MatrixEntry {
    Real(f64),
    Complex([f64; 2]),
}

/// Row-major entries of a propagator.
pub fn propagator_entries<T: Real>(p: &Propagator<T>) -> Vec<Vec<MatrixEntry>> {
    match p {
        Propagator::Symplectic(s) => s.matrix().row_iter().map(|r| r.iter().map(|&x| MatrixEntry::Real(to_f64(x))).collect()).collect(),
        Propagator::Unitary(u) => u
            .matrix()
            .row_iter()
            .map(|r| r.iter().map(|z| MatrixEntry::Complex([to_f64(z.re), to_f64(z.im)])).collect())
            .collect(),
    }
}

/// Enumerates the landscape of `target` over `domain` and collects the result.
pub fn landscape_report<T: Real>(target: &GateTarget<T>, domain: Domain) -> Result<LandscapeReport> {
    let points = enumerate_critical(target, domain)?;
    let clusters = if domain == Domain::U { Vec::new() } else { singular_value_clusters(target)? };
    let components: Vec<ComponentReport> = points
        .iter()
        .map(|p| {
            let (n_zero, n_plus, n_minus) = p.hessian_signature;
            ComponentReport {
                labels: p.labels.clone(),
                critical_value: to_f64(p.critical_value),
                hessian: Signature { n_zero, n_plus, n_minus },
                dimension: p.dimension,
                is_minimum: p.is_minimum(),
                residual: to_f64(p.residual),
                representative: propagator_entries(&p.representative),
            }
        })
        .collect();
    Ok(LandscapeReport {
        gate: target.label().to_string(),
        domain,
        clusters,
        component_count: components.len(),
        components,
    })
}
