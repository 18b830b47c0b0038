//! Small dense linear-algebra helpers shared by the analysis modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Singular values below `RANK_TOL` times the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-8;

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with the crate-wide relative tolerance.
pub fn rank(m: &DMatrix<f64>) -> usize {
    rank_with_tol(m, RANK_TOL)
}

pub fn rank_with_tol(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    count_above(&singular_values(m), rel_tol)
}

/// Count entries of a descending non-negative spectrum above `rel_tol * max`.
pub fn count_above(desc: &[f64], rel_tol: f64) -> usize {
    match desc.first() {
        Some(&top) if top > 0.0 => desc.iter().filter(|&&s| s > rel_tol * top).count(),
        _ => 0,
    }
}

/// Eigenvalues (ascending) and matching eigenvectors of a symmetric matrix.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Orthonormal basis (as columns) for the column space of `m`.
pub fn column_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    // Work on the Gram side when the matrix is very tall is not needed at our sizes.
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let s = &svd.singular_values;
    let top = s.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| top > 0.0 && s[i] > RANK_TOL * top).collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis for the orthogonal complement of the column space of `m`.
pub fn orthogonal_complement(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let q = column_space(m);
    // Project the identity off the span and re-orthonormalize.
    let proj = DMatrix::identity(n, n) - &q * q.transpose();
    let full = proj.clone().svd(true, false);
    let u = full.u.expect("requested U");
    let keep: Vec<usize> = (0..full.singular_values.len())
        .filter(|&i| full.singular_values[i] > 0.5)
        .collect();
    DMatrix::from_fn(n, keep.len(), |r, c| u[(r, keep[c])])
}

/// Largest principal angle between `v` and the span of the orthonormal columns of `q`.
pub fn angle_to_span(v: &DVector<f64>, q: &DMatrix<f64>) -> f64 {
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let inside = (q.transpose() * v).norm() / norm;
    inside.clamp(-1.0, 1.0).acos()
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Sum a list of equally shaped matrices by pairwise (tree) reduction.
///
/// The grouping depends only on the list length, so results are reproducible
/// regardless of how the terms were produced.
pub fn pairwise_sum(mut terms: Vec<DMatrix<f64>>, nrows: usize, ncols: usize) -> DMatrix<f64> {
    if terms.is_empty() {
        return DMatrix::zeros(nrows, ncols);
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
