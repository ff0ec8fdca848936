//! SVD-based numerical rank and orthonormal range helpers.

use faer::Mat;
use nalgebra::DMatrix;

/// Singular-value cutoff of the standard numerical-rank rule:
/// `max(rows, cols) * eps * sigma_max`.
pub fn default_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in descending order together with the matching left
/// singular vectors (as columns).
pub fn left_svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    if m.ncols() == 0 || m.nrows() == 0 {
        return (Vec::new(), DMatrix::zeros(m.nrows(), 0));
    }
    let svd = to_faer(m).thin_svd().expect("SVD converges");
    let (s, u) = (svd.S(), svd.U());
    let values = (0..s.dim()).map(|i| s[i]).collect();
    (values, DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]))
}

/// Numerical rank with an absolute cutoff, or the default rule when `tol` is
/// `None`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: Option<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = to_faer(m).singular_values().expect("SVD converges");
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol.unwrap_or_else(|| default_cutoff(m.nrows(), m.ncols(), sigma_max));
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Orthonormal basis of the numerical range of `m`.
pub fn orthonormal_range(m: &DMatrix<f64>, tol: Option<f64>) -> DMatrix<f64> {
    let (values, u) = left_svd(m);
    let sigma_max = values.first().copied().unwrap_or(0.0);
    let cutoff = tol.unwrap_or_else(|| default_cutoff(m.nrows(), m.ncols(), sigma_max));
    let r = values.iter().filter(|&&s| s > cutoff).count();
    u.columns(0, r).into_owned()
}

/// Largest singular value via the eigenvalues of `M M^T`, accumulated from
/// column slices. Accurate enough for scaling a cutoff.
pub fn sigma_max_of_columns<'a, I>(rows: usize, cols: I) -> f64
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut gram = DMatrix::<f64>::zeros(rows, rows);
    for c in cols {
        for i in 0..rows {
            if c[i] == 0.0 {
                continue;
            }
            for j in 0..rows {
                gram[(i, j)] += c[i] * c[j];
            }
        }
    }
    let eig = gram.symmetric_eigenvalues();
    eig.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
