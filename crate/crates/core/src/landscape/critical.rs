//! Critical points of `J(S) = |S − W|²` over `Sp(2N)`, `OSp(2N)` or `U(d)`.
//!
//! In the frame `W = U E V` with `U, V` orthogonal-symplectic and
//! `E = diag(e_1..e_N, 1/e_1..1/e_N)`, every critical point is `U Rᵀ D R V`
//! with `R` in the stabilizer of `E` and `D` assembled from per-mode blocks:
//!
//! * type I keeps the mode, `(e, 1/e)`;
//! * type II reverses and rescales it, `(−e^{−1/3}, −e^{1/3})`;
//! * type III couples `q_γ` with `p_δ` (and `p_γ` with `q_δ`) for modes with
//!   `e_δ^{1/3} < e_γ ≤ e_δ`, in two mirror-image branches;
//! * modes with `e = 1` are either kept or reversed.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::GateTarget;
use crate::scalar::{cplx, lit, scaled_tol, to_f64, Real};
use crate::symplectic::{frob_inner, frobenius, j_matrix, Propagator, SymplecticMatrix, UnitaryMatrix};

use super::fidelity::{
    critical_condition_residual, critical_condition_residual_unitary, fidelity_symplectic, fidelity_unitary,
};

/// Relative gap below which singular values are treated as equal.
pub const TOL_CLUSTER: f64 = 1e-8;
/// Hessian eigenvalues below this fraction of the largest one count as zero.
pub const TOL_HESSIAN_ZERO: f64 = 1e-7;

/// Group over which the landscape is explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum Domain {
    /// Full symplectic group, linear optics plus squeezing.
    Sp,
    /// Orthogonal symplectic subgroup, passive linear optics.
    OSp,
    /// Unitary group of a qubit register.
    U,
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sp" => Ok(Domain::Sp),
            "osp" => Ok(Domain::OSp),
            "u" => Ok(Domain::U),
            other => Err(Error::InvalidArgument(format!("unknown landscape domain '{other}'"))),
        }
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Domain::Sp => "Sp",
            Domain::OSp => "OSp",
            Domain::U => "U",
        })
    }
}

/// `W = U E V` with `U, V ∈ OSp(2N)`; `e` holds the `N` singular values
/// `≥ 1` in ascending order, one per mode.
#[derive(Debug, Clone)]
pub struct SymplecticSvd<T: Real> {
    pub u: DMatrix<T>,
    pub e: Vec<T>,
    pub v: DMatrix<T>,
}

impl<T: Real> SymplecticSvd<T> {
    /// `diag(e_1..e_N, 1/e_1..1/e_N)`.
    pub fn e_matrix(&self) -> DMatrix<T> {
        diag_from_modes(&self.e)
    }
}

fn diag_from_modes<T: Real>(e: &[T]) -> DMatrix<T> {
    let n = e.len();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, &x) in e.iter().enumerate() {
        m[(i, i)] = x;
        m[(n + i, n + i)] = T::one() / x;
    }
    m
}

fn orthogonalize<T: Real>(v: &mut DVector<T>, basis: &[DVector<T>]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(v);
            v.axpy(-c, b, T::one());
        }
    }
}

/// Symplectic singular value decomposition with clustered values snapped to
/// their mean (and to exactly 1 for the compact cluster).
pub fn symplectic_svd<T: Real>(w: &SymplecticMatrix<T>) -> Result<SymplecticSvd<T>> {
    let n = w.n_modes();
    let wm = w.matrix();
    let j = j_matrix::<T>(n);
    let eig = SymmetricEigen::try_new(wm * wm.transpose(), T::default_epsilon(), 10_000)
        .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let tol_mu: T = lit(2.0 * TOL_CLUSTER);

    // Chosen vectors u_i and their partners J u_i, kept orthonormal together.
    let mut chosen: Vec<(T, DVector<T>)> = Vec::new();
    let mut basis: Vec<DVector<T>> = Vec::new();
    let push = |mu: T, v: DVector<T>, chosen: &mut Vec<(T, DVector<T>)>, basis: &mut Vec<DVector<T>>| {
        let jv = &j * &v;
        basis.push(v.clone());
        basis.push(jv);
        chosen.push((mu, v));
    };
    let mut unit = Vec::new();
    for &idx in &order {
        let mu = eig.eigenvalues[idx];
        if mu > T::one() + tol_mu {
            let mut v = eig.eigenvectors.column(idx).into_owned();
            orthogonalize(&mut v, &basis);
            let norm = v.norm();
            if norm < lit(0.5) {
                return Err(Error::NonReciprocalSpectrum);
            }
            push(mu, v / norm, &mut chosen, &mut basis);
        } else if (mu - T::one()).abs() <= tol_mu {
            unit.push(eig.eigenvectors.column(idx).into_owned());
        }
    }
    // The compact cluster is J-invariant; pick a Lagrangian frame greedily.
    while chosen.len() < n {
        let mut best: Option<(T, DVector<T>)> = None;
        for c in &unit {
            let mut v = c.clone();
            orthogonalize(&mut v, &basis);
            let norm = v.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        match best {
            Some((norm, v)) if norm > lit(1e-3) => push(T::one(), v / norm, &mut chosen, &mut basis),
            _ => return Err(Error::NonReciprocalSpectrum),
        }
    }
    if chosen.len() != n {
        return Err(Error::NonReciprocalSpectrum);
    }
    chosen.reverse();

    let mut e: Vec<T> = chosen.iter().map(|(mu, _)| mu.sqrt()).collect();
    snap_clusters(&mut e);
    let mut u = DMatrix::zeros(2 * n, 2 * n);
    for (i, (_, v)) in chosen.iter().enumerate() {
        u.set_column(i, v);
        u.set_column(n + i, &(-(&j * v)));
    }
    let e_inv = diag_from_modes(&e.iter().map(|&x| T::one() / x).collect::<Vec<_>>());
    let v = e_inv * u.transpose() * wm;
    Ok(SymplecticSvd { u, e, v })
}

fn same_cluster<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= lit::<T>(TOL_CLUSTER) * a.abs().max(b.abs())
}

fn snap_clusters<T: Real>(e: &mut [T]) {
    let mut start = 0;
    while start < e.len() {
        let mut end = start + 1;
        while end < e.len() && same_cluster(e[start], e[end]) {
            end += 1;
        }
        let mean = e[start..end].iter().fold(T::zero(), |a, &x| a + x) / lit((end - start) as f64);
        let snapped = if same_cluster(mean, T::one()) { T::one() } else { mean };
        for x in &mut e[start..end] {
            *x = snapped;
        }
        start = end;
    }
}

/// Distinct singular values `≥ 1` with their mode counts, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub value: f64,
    pub modes: usize,
}

fn clusters_of<T: Real>(e: &[T]) -> Vec<(T, usize, usize)> {
    let mut out: Vec<(T, usize, usize)> = Vec::new();
    for (i, &x) in e.iter().enumerate() {
        match out.last_mut() {
            Some((v, _, len)) if *v == x => *len += 1,
            _ => out.push((x, i, 1)),
        }
    }
    out
}

/// Number of type-III pairs joining two singular-value clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCount {
    /// Cluster index of the smaller singular value.
    pub gamma: usize,
    pub delta: usize,
    pub count: usize,
}

/// Index set of a critical submanifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalLabels {
    /// Compact modes left unchanged (for `U`: eigenvalues `+1`).
    pub kept_modes: usize,
    /// Compact modes reversed (for `U`: eigenvalues `−1`).
    pub reversed_modes: usize,
    /// Per non-compact cluster, modes of type I.
    pub type_i: Vec<usize>,
    /// Per non-compact cluster, modes of type II.
    pub type_ii: Vec<usize>,
    pub type_iii: Vec<PairCount>,
    /// `±1` for the two mirror branches when type-III blocks are present, else 0.
    pub branch: i8,
}

/// One critical submanifold with its invariants.
#[derive(Debug, Clone)]
pub struct CriticalSubmanifold<T: Real> {
    pub domain: Domain,
    pub labels: CriticalLabels,
    /// `D` in the canonical frame of the target.
    pub characteristic: DMatrix<T>,
    pub representative: Propagator<T>,
    pub critical_value: T,
    pub residual: T,
    pub hessian_signature: (usize, usize, usize),
    pub dimension: usize,
}

impl<T: Real> CriticalSubmanifold<T> {
    /// Minimum in the sense of the Hessian: no descending direction.
    pub fn is_minimum(&self) -> bool {
        self.hessian_signature.2 == 0
    }
}

fn type_iii_blocks<T: Real>(eg: T, ed: T, sigma: T) -> ([[T; 2]; 2], [[T; 2]; 2]) {
    let prod = (eg * ed).sqrt();
    let cos_x = ((eg / ed - ed / eg) / (prod - T::one() / prod)).max(-T::one()).min(T::one());
    let sin_x = (T::one() - cos_x * cos_x).max(T::zero()).sqrt();
    let c = (ed / eg).sqrt();
    let a = [[-c * cos_x, c * sigma * sin_x], [c * sigma * sin_x, c * cos_x]];
    // B = T A^{−T} T with T = diag(1, −1).
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let inv_t = [[a[1][1] / det, -a[1][0] / det], [-a[0][1] / det, a[0][0] / det]];
    let b = [[inv_t[0][0], -inv_t[0][1]], [-inv_t[1][0], inv_t[1][1]]];
    (a, b)
}

fn type_iii_admissible<T: Real>(eg: T, ed: T) -> bool {
    // The lower end of the window coincides with a type I/II combination.
    eg > T::one() && eg <= ed && ed.cbrt() < eg * (T::one() - lit(1e-9))
}

/// Per-cluster assignment used while enumerating.
struct Assignment {
    flips: usize,
    type_iii: Vec<PairCount>,
    type_i: Vec<usize>,
    type_ii: Vec<usize>,
}

fn enumerate_pairs(
    admissible: &[(usize, usize)],
    budget: &mut Vec<usize>,
    at: usize,
    current: &mut Vec<PairCount>,
    out: &mut Vec<(Vec<PairCount>, Vec<usize>)>,
) {
    if at == admissible.len() {
        out.push((current.clone(), budget.clone()));
        return;
    }
    let (g, d) = admissible[at];
    let per = |budget: &Vec<usize>| if g == d { budget[g] / 2 } else { budget[g].min(budget[d]) };
    let max = per(budget);
    for count in 0..=max {
        if g == d {
            budget[g] -= 2 * count;
        } else {
            budget[g] -= count;
            budget[d] -= count;
        }
        if count > 0 {
            current.push(PairCount { gamma: g, delta: d, count });
        }
        enumerate_pairs(admissible, budget, at + 1, current, out);
        if count > 0 {
            current.pop();
        }
        if g == d {
            budget[g] += 2 * count;
        } else {
            budget[g] += count;
            budget[d] += count;
        }
    }
}

fn split_remaining(remaining: &[usize], at: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if at == remaining.len() {
        out.push(acc.clone());
        return;
    }
    for t in 0..=remaining[at] {
        acc.push(t);
        split_remaining(remaining, at + 1, acc, out);
        acc.pop();
    }
}

/// Builds `D` for an assignment; `clusters` lists `(value, first mode, size)`.
fn build_characteristic<T: Real>(
    n: usize,
    e0_modes: usize,
    clusters: &[(T, usize, usize)],
    a: &Assignment,
    sigma: T,
) -> DMatrix<T> {
    let mut d = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..e0_modes {
        let s = if i < e0_modes - a.flips { T::one() } else { -T::one() };
        d[(i, i)] = s;
        d[(n + i, n + i)] = s;
    }
    let mut cursor: Vec<usize> = clusters.iter().map(|c| c.1).collect();
    let take = |c: usize, cursor: &mut Vec<usize>| {
        let m = cursor[c];
        cursor[c] += 1;
        m
    };
    for p in &a.type_iii {
        let (eg, ed) = (clusters[p.gamma].0, clusters[p.delta].0);
        let (ba, bb) = type_iii_blocks(eg, ed, sigma);
        for _ in 0..p.count {
            let gm = take(p.gamma, &mut cursor);
            let dm = take(p.delta, &mut cursor);
            let (qg, pd) = (gm, n + dm);
            d[(qg, qg)] = ba[0][0];
            d[(qg, pd)] = ba[0][1];
            d[(pd, qg)] = ba[1][0];
            d[(pd, pd)] = ba[1][1];
            let (pg, qd) = (n + gm, dm);
            d[(pg, pg)] = bb[0][0];
            d[(pg, qd)] = bb[0][1];
            d[(qd, pg)] = bb[1][0];
            d[(qd, qd)] = bb[1][1];
        }
    }
    for (c, &(e, _, _)) in clusters.iter().enumerate() {
        for _ in 0..a.type_i[c] {
            let m = take(c, &mut cursor);
            d[(m, m)] = e;
            d[(n + m, n + m)] = T::one() / e;
        }
        for _ in 0..a.type_ii[c] {
            let m = take(c, &mut cursor);
            let r = e.cbrt();
            d[(m, m)] = -T::one() / r;
            d[(n + m, n + m)] = -r;
        }
    }
    d
}

/// Enumerates the critical submanifolds of the landscape of `target`.
///
/// The `OSp` domain requires a compact target; `U` requires a unitary one.
pub fn enumerate_critical<T: Real>(target: &GateTarget<T>, domain: Domain) -> Result<Vec<CriticalSubmanifold<T>>> {
    match domain {
        Domain::U => enumerate_unitary(target),
        Domain::Sp | Domain::OSp => enumerate_symplectic(target, domain),
    }
}

fn enumerate_symplectic<T: Real>(target: &GateTarget<T>, domain: Domain) -> Result<Vec<CriticalSubmanifold<T>>> {
    let w = target.symplectic_matrix()?;
    let n = w.n_modes();
    let svd = if domain == Domain::OSp {
        if !w.is_orthogonal(scaled_tol(1e-8)) {
            return Err(Error::InvalidArgument(format!(
                "gate '{}' is not orthogonal, so its landscape over OSp is not the compact one",
                target.label()
            )));
        }
        SymplecticSvd { u: DMatrix::identity(2 * n, 2 * n), e: vec![T::one(); n], v: w.matrix().clone() }
    } else {
        symplectic_svd(w)?
    };
    let e0_modes = svd.e.iter().take_while(|&&x| x == T::one()).count();
    let clusters = clusters_of(&svd.e[e0_modes..]);
    let clusters: Vec<(T, usize, usize)> = clusters.into_iter().map(|(v, s, l)| (v, s + e0_modes, l)).collect();
    let admissible: Vec<(usize, usize)> = (0..clusters.len())
        .flat_map(|g| (g..clusters.len()).map(move |d| (g, d)))
        .filter(|&(g, d)| {
            let needs = if g == d { 2 } else { 1 };
            clusters[g].2 >= needs && type_iii_admissible(clusters[g].0, clusters[d].0)
        })
        .collect();

    let mut pairings = Vec::new();
    let mut budget: Vec<usize> = clusters.iter().map(|c| c.2).collect();
    enumerate_pairs(&admissible, &mut budget, 0, &mut Vec::new(), &mut pairings);

    let mut assignments = Vec::new();
    for flips in 0..=e0_modes {
        for (pairs, remaining) in &pairings {
            let mut splits = Vec::new();
            split_remaining(remaining, 0, &mut Vec::new(), &mut splits);
            for type_ii in splits {
                let type_i: Vec<usize> = remaining.iter().zip(&type_ii).map(|(r, t)| r - t).collect();
                assignments.push(Assignment { flips, type_iii: pairs.clone(), type_i, type_ii });
            }
        }
    }

    let e_full = svd.e_matrix();
    let stab = stabilizer_algebra(&e_full, n);
    let mut out = Vec::new();
    for a in assignments {
        let branches: &[i8] = if a.type_iii.is_empty() { &[0] } else { &[1, -1] };
        for &branch in branches {
            let sigma: T = if branch < 0 { -T::one() } else { T::one() };
            let d = build_characteristic(n, e0_modes, &clusters, &a, sigma);
            let rep = &svd.u * &d * &svd.v;
            let critical_value = fidelity_symplectic(&rep, target)?
                - target.translation().map_or(T::zero(), |c| c.norm_squared());
            let residual = critical_condition_residual(&rep, target)?;
            let dimension = orbit_dimension(&stab, &d);
            let labels = CriticalLabels {
                kept_modes: e0_modes - a.flips,
                reversed_modes: a.flips,
                type_i: a.type_i.clone(),
                type_ii: a.type_ii.clone(),
                type_iii: a.type_iii.clone(),
                branch,
            };
            let mut point = CriticalSubmanifold {
                domain,
                labels,
                characteristic: d,
                representative: Propagator::Symplectic(SymplecticMatrix::from_trusted(rep)),
                critical_value,
                residual,
                hessian_signature: (0, 0, 0),
                dimension,
            };
            point.hessian_signature = hessian_signature(&point, target)?;
            out.push(point);
        }
    }
    Ok(out)
}

fn enumerate_unitary<T: Real>(target: &GateTarget<T>) -> Result<Vec<CriticalSubmanifold<T>>> {
    let w = target.unitary_matrix()?.matrix();
    let d = w.nrows();
    let basis = hermitian_basis::<T>(d);
    let mut out = Vec::new();
    for flips in 0..=d {
        let signs = DMatrix::from_fn(d, d, |i, j| if i == j && i >= d - flips { -T::one() } else if i == j { T::one() } else { T::zero() });
        let sc = signs.map(|x| cplx(x, T::zero()));
        let rep = w * &sc;
        let critical_value = fidelity_unitary(&rep, target)?;
        let residual = critical_condition_residual_unitary(&rep, target)?;
        // Orbit of diag(±1) under conjugation by U(d).
        let images: Vec<DMatrix<Complex<T>>> = basis.iter().map(|h| {
            let x = h.map(|z| cplx(-z.im, z.re));
            &x * &sc - &sc * &x
        }).collect();
        let dimension = rank_complex(&images);
        let labels = CriticalLabels {
            kept_modes: d - flips,
            reversed_modes: flips,
            type_i: vec![],
            type_ii: vec![],
            type_iii: vec![],
            branch: 0,
        };
        let mut point = CriticalSubmanifold {
            domain: Domain::U,
            labels,
            characteristic: signs,
            representative: Propagator::Unitary(UnitaryMatrix::from_trusted(rep)),
            critical_value,
            residual,
            hessian_signature: (0, 0, 0),
            dimension,
        };
        point.hessian_signature = hessian_signature(&point, target)?;
        out.push(point);
    }
    Ok(out)
}

/// Orthonormal basis of real symmetric `d × d` matrices.
fn symmetric_basis<T: Real>(d: usize) -> Vec<DMatrix<T>> {
    let r = T::one() / lit::<T>(2.0).sqrt();
    let mut out = Vec::new();
    for i in 0..d {
        for j in i..d {
            let mut k = DMatrix::zeros(d, d);
            if i == j {
                k[(i, i)] = T::one();
            } else {
                k[(i, j)] = r;
                k[(j, i)] = r;
            }
            out.push(k);
        }
    }
    out
}

/// Orthonormal basis (real inner product) of `d × d` Hermitian matrices.
fn hermitian_basis<T: Real>(d: usize) -> Vec<DMatrix<Complex<T>>> {
    let r = T::one() / lit::<T>(2.0).sqrt();
    let mut out = Vec::new();
    for i in 0..d {
        for j in i..d {
            if i == j {
                let mut h = DMatrix::zeros(d, d);
                h[(i, i)] = cplx(T::one(), T::zero());
                out.push(h);
            } else {
                let mut h = DMatrix::zeros(d, d);
                h[(i, j)] = cplx(r, T::zero());
                h[(j, i)] = cplx(r, T::zero());
                out.push(h);
                let mut h = DMatrix::zeros(d, d);
                h[(i, j)] = cplx(T::zero(), -r);
                h[(j, i)] = cplx(T::zero(), r);
                out.push(h);
            }
        }
    }
    out
}

/// Orthonormal basis of symmetric `K` with `J K = K J`, so `J K ∈ osp(2N)`.
fn passive_symmetric_basis<T: Real>(n: usize) -> Vec<DMatrix<T>> {
    let j = j_matrix::<T>(n);
    let half = lit::<T>(0.5);
    let mut out: Vec<DMatrix<T>> = Vec::new();
    for k in symmetric_basis::<T>(2 * n) {
        let mut p = (&k - &j * &k * &j) * half;
        for _ in 0..2 {
            for b in &out {
                let c = frob_inner(b, &p);
                p -= b * c;
            }
        }
        let norm = frobenius(&p);
        if norm > lit(1e-6) {
            out.push(p / norm);
        }
    }
    out
}

fn rank_of_columns<T: Real>(cols: &[Vec<T>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i]);
    let sv = m.singular_values();
    let max = sv.max();
    if max == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > max * lit(1e-9)).count()
}

fn rank_complex<T: Real>(images: &[DMatrix<Complex<T>>]) -> usize {
    let cols: Vec<Vec<T>> = images.iter().map(|m| m.iter().flat_map(|z| [z.re, z.im]).collect()).collect();
    rank_of_columns(&cols)
}

/// Basis of the Lie algebra of `{R ∈ OSp(2N) : Rᵀ E R = E}`.
fn stabilizer_algebra<T: Real>(e: &DMatrix<T>, n: usize) -> Vec<DMatrix<T>> {
    let j = j_matrix::<T>(n);
    let osp: Vec<DMatrix<T>> = passive_symmetric_basis::<T>(n).into_iter().map(|k| &j * k).collect();
    if osp.is_empty() {
        return osp;
    }
    let images = DMatrix::from_fn(4 * n * n, osp.len(), |i, c| {
        let x = &osp[c];
        let m = x * e - e * x;
        m[(i % (2 * n), i / (2 * n))]
    });
    let svd = images.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let max = svd.singular_values.max().max(T::one());
    let mut out = Vec::new();
    for (r, s) in svd.singular_values.iter().enumerate() {
        if *s <= max * lit(1e-9) {
            let mut x = DMatrix::zeros(2 * n, 2 * n);
            for (c, b) in osp.iter().enumerate() {
                x += b * vt[(r, c)];
            }
            out.push(x);
        }
    }
    // Rows of V_t beyond the rank (thin SVD) are not returned; the map is
    // tall here (4N² rows vs N² columns) so every null direction appears.
    out
}

fn orbit_dimension<T: Real>(stab: &[DMatrix<T>], d: &DMatrix<T>) -> usize {
    let cols: Vec<Vec<T>> = stab.iter().map(|x| (x * d - d * x).iter().copied().collect()).collect();
    rank_of_columns(&cols)
}

fn count_signs<T: Real>(h: DMatrix<T>) -> Result<(usize, usize, usize)> {
    let eig = SymmetricEigen::try_new(h, T::default_epsilon(), 10_000)
        .ok_or_else(|| Error::Eigen("Hessian eigensolver did not converge".into()))?;
    let max = eig.eigenvalues.iter().fold(T::zero(), |a, x| a.max(x.abs()));
    let thr = max * lit(TOL_HESSIAN_ZERO);
    let mut sig = (0, 0, 0);
    for &x in eig.eigenvalues.iter() {
        if x.abs() <= thr {
            sig.0 += 1;
        } else if x > T::zero() {
            sig.1 += 1;
        } else {
            sig.2 += 1;
        }
    }
    Ok(sig)
}

/// Eigenvalues of the landscape Hessian at a critical point, for callers that
/// need more than the sign counts.
pub fn hessian_eigenvalues<T: Real>(point: &CriticalSubmanifold<T>, target: &GateTarget<T>) -> Result<Vec<T>> {
    let h = hessian_matrix(point, target)?;
    let eig = SymmetricEigen::try_new(h, T::default_epsilon(), 10_000)
        .ok_or_else(|| Error::Eigen("Hessian eigensolver did not converge".into()))?;
    let mut v: Vec<T> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(v)
}

fn hessian_matrix<T: Real>(point: &CriticalSubmanifold<T>, target: &GateTarget<T>) -> Result<DMatrix<T>> {
    let two = lit::<T>(2.0);
    match &point.representative {
        Propagator::Symplectic(s) => {
            let s = s.matrix();
            let w = target.symplectic_matrix()?.matrix();
            let n = s.nrows() / 2;
            let scale = T::one() + frobenius(s) * frobenius(s);
            let residual = critical_condition_residual(s, target)?;
            if residual > lit::<T>(1e-6) * scale {
                return Err(Error::NotCritical(to_f64(residual)));
            }
            let j = j_matrix::<T>(n);
            let ks = match point.domain {
                Domain::OSp => passive_symmetric_basis::<T>(n),
                _ => symmetric_basis::<T>(2 * n),
            };
            let xs: Vec<DMatrix<T>> = ks.iter().map(|k| &j * k).collect();
            let xs_s: Vec<DMatrix<T>> = xs.iter().map(|x| x * s).collect();
            let diff = s - w;
            let m = xs.len();
            let t = 2 * n;
            let mut h = DMatrix::zeros(m + t, m + t);
            for a in 0..m {
                for b in a..m {
                    let sym = (&xs[a] * &xs_s[b] + &xs[b] * &xs_s[a]) * lit::<T>(0.5);
                    let v = two * (frob_inner(&xs_s[a], &xs_s[b]) + frob_inner(&diff, &sym));
                    h[(a, b)] = v;
                    h[(b, a)] = v;
                }
            }
            for i in 0..t {
                h[(m + i, m + i)] = two;
            }
            Ok(h)
        }
        Propagator::Unitary(u) => {
            let u = u.matrix();
            let w = target.unitary_matrix()?.matrix();
            let residual = critical_condition_residual_unitary(u, target)?;
            if residual > lit::<T>(1e-6) {
                return Err(Error::NotCritical(to_f64(residual)));
            }
            let xs: Vec<DMatrix<Complex<T>>> =
                hermitian_basis::<T>(u.nrows()).iter().map(|h| h.map(|z| cplx(-z.im, z.re))).collect();
            let xs_u: Vec<DMatrix<Complex<T>>> = xs.iter().map(|x| x * u).collect();
            let diff = u - w;
            let re_inner = |a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>| {
                a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc + x.re * y.re + x.im * y.im)
            };
            let m = xs.len();
            let mut h = DMatrix::zeros(m, m);
            for a in 0..m {
                for b in a..m {
                    let sym = (&xs[a] * &xs_u[b] + &xs[b] * &xs_u[a]).map(|z| z * lit::<T>(0.5));
                    let v = two * (re_inner(&xs_u[a], &xs_u[b]) + re_inner(&diff, &sym));
                    h[(a, b)] = v;
                    h[(b, a)] = v;
                }
            }
            Ok(h)
        }
    }
}

/// `(n_zero, n_plus, n_minus)` of the Hessian over the tangent space of the
/// domain. For `Sp` and `OSp` the `2N` translation directions are included,
/// each contributing a positive curvature.
pub fn hessian_signature<T: Real>(point: &CriticalSubmanifold<T>, target: &GateTarget<T>) -> Result<(usize, usize, usize)> {
    count_signs(hessian_matrix(point, target)?)
}

/// Singular-value clusters of a symplectic target, the compact cluster first.
pub fn singular_value_clusters<T: Real>(target: &GateTarget<T>) -> Result<Vec<Cluster>> {
    let svd = symplectic_svd(target.symplectic_matrix()?)?;
    Ok(clusters_of(&svd.e).into_iter().map(|(v, _, l)| Cluster { value: to_f64(v), modes: l }).collect())
}
