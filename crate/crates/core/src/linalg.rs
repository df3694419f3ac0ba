//! Small dense linear-algebra helpers shared by the algebraic modules.

use nalgebra::{DMatrix, DVector};

/// Absolute tolerance for exact algebraic identities on unit-scale input.
pub const ALGEBRA_TOL: f64 = 1e-9;

/// Tolerance scaled by the ∞-norm of the input, never below the absolute floor.
pub fn scaled_tol(scale: f64) -> f64 {
    ALGEBRA_TOL * scale.max(1.0)
}

fn padded(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() >= m.ncols() {
        return m.clone();
    }
    let mut out = DMatrix::zeros(m.ncols(), m.ncols());
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

/// Singular values in decreasing order (sorted copy).
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > tol).count()
}

/// Orthonormal basis of the column space.
pub fn column_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut cols: Vec<(f64, DVector<f64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol)
        .map(|(i, &s)| (s, u.column(i).into_owned()))
        .collect();
    cols.sort_by(|a, b| b.0.total_cmp(&a.0));
    cols.into_iter().map(|(_, c)| c).collect()
}

/// Orthonormal basis of the kernel.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    let svd = padded(m).svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(i, _)| vt.row(i).transpose())
        .collect()
}

pub fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Gram–Schmidt against `basis`, returning the residual component.
pub fn reject(v: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut r = v.clone();
    for b in basis {
        let c = r.dot(b);
        r -= b * c;
    }
    r
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
        }
        assert!(ns[0].dot(&ns[1]).abs() < 1e-12);
    }

    #[test]
    fn rank_and_column_space_agree() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        assert_eq!(rank(&m, 1e-12), 2);
        assert_eq!(column_space(&m, 1e-12).len(), 2);
        assert_eq!(null_space(&m, 1e-12).len(), 1);
    }

    #[test]
    fn empty_row_matrix_has_full_kernel() {
        let m = DMatrix::<f64>::zeros(0, 3);
        assert_eq!(null_space(&m, 1e-12).len(), 3);
        assert_eq!(rank(&m, 1e-12), 0);
    }
}
