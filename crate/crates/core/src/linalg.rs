//! Dense 4x4 helpers; the geometry never needs anything larger.

use crate::scalar::Real;

pub type Vec4<T> = [T; 4];
pub type Mat4<T> = [[T; 4]; 4];

pub fn zeros<T: Real>() -> Mat4<T> {
    [[T::zero(); 4]; 4]
}

pub fn identity<T: Real>() -> Mat4<T> {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn basis<T: Real>(i: usize) -> Vec4<T> {
    let mut v = [T::zero(); 4];
    v[i] = T::one();
    v
}

pub fn matmul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out = zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).fold(T::zero(), |s, k| s + a[i][k] * b[k][j]);
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting. Returns the determinant alongside.
pub fn inverse<T: Real>(m: &Mat4<T>) -> (Mat4<T>, T) {
    let mut a = *m;
    let mut inv = identity();
    let mut det = T::one();
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == T::zero() {
            return (inv, T::zero());
        }
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det = det * p;
        for j in 0..4 {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                if f != T::zero() {
                    for j in 0..4 {
                        a[r][j] = a[r][j] - f * a[col][j];
                        inv[r][j] = inv[r][j] - f * inv[col][j];
                    }
                }
            }
        }
    }
    (inv, det)
}

pub fn max_abs_diff<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> T {
    let mut m = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_triangular_template() {
        let m = [
            [1.0, 0.0, 0.0, 0.0],
            [0.5, 1.0, 0.0, 0.0],
            [-2.0, 3.0, 1.0, 0.0],
            [1.0, 1.0, 1.0, 1.0],
        ];
        let (inv, det) = inverse(&m);
        assert!((det - 1.0_f64).abs() < 1e-15);
        assert!(max_abs_diff(&matmul(&m, &inv), &identity()) < 1e-14);
    }

    #[test]
    fn singular_matrix_reports_zero_det() {
        let m = [
            [1.0_f64, 2.0, 0.0, 0.0],
            [2.0, 4.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let (_, det) = inverse(&m);
        assert!(det.abs() < 1e-15_f64);
    }
}
