//! Small dense helpers shared by the cone and Lorentz modules.

use nalgebra::{DMatrix, DVector};

/// Relative cutoff on singular values when deciding numerical rank.
pub const RANK_TOL: f64 = 1e-10;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    if n == 0.0 {
        a.to_vec()
    } else {
        scale(a, 1.0 / n)
    }
}

pub fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

/// Matrix whose columns are the given vectors.
pub fn columns(dim: usize, vs: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(dim, vs.len(), |i, j| vs[j][i])
}

/// Matrix whose rows are the given vectors.
pub fn rows(dim: usize, vs: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(vs.len(), dim, |i, j| vs[i][j])
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Orthonormal bases of the row space and null space of `a` (m x n),
/// returned as lists of n-vectors.
pub fn row_and_null_space(a: &DMatrix<f64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = a.ncols();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    // Pad with zero rows so the thin SVD yields a full right basis.
    let m = a.nrows().max(n);
    let mut padded = DMatrix::zeros(m, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = RANK_TOL * smax.max(f64::MIN_POSITIVE);
    let mut row_space = Vec::new();
    let mut null_space = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        let v: Vec<f64> = v_t.row(k).iter().cloned().collect();
        if *s > cut && smax > 0.0 {
            row_space.push(v);
        } else {
            null_space.push(v);
        }
    }
    (row_space, null_space)
}

/// Orthonormal basis of the span of the given vectors.
pub fn span_basis(dim: usize, vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if vs.is_empty() {
        return Vec::new();
    }
    row_and_null_space(&rows(dim, vs)).0
}

pub fn rank(dim: usize, vs: &[Vec<f64>]) -> usize {
    span_basis(dim, vs).len()
}

/// Orthonormal basis of the orthogonal complement of span(vs).
pub fn orthogonal_complement(dim: usize, vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if vs.is_empty() {
        return (0..dim).map(|i| unit(dim, i)).collect();
    }
    row_and_null_space(&rows(dim, vs)).1
}

pub fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}
