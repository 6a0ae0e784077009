//! Small dense kernels for the fixed-size systems that appear per grid cell.
//!
//! Everything here works on row-major slices so that callers can keep their
//! buffers on the stack.

/// Largest supported dimension of the underlying manifold.
pub const MAX_DIM: usize = 8;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `m * x = rhs` for a symmetric positive definite `m` (n×n, row-major).
///
/// Returns `false` when the Cholesky factorisation breaks down, i.e. when `m`
/// is not numerically positive definite. `m` is left untouched.
pub(crate) fn cholesky_solve(m: &[f64], n: usize, rhs: &[f64], x: &mut [f64]) -> bool {
    let mut l = [0.0; MAX_DIM * MAX_DIM];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut z = [0.0; MAX_DIM];
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i * n + k] * z[k];
        }
        z[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    true
}

/// Gaussian elimination with partial pivoting for a general square system of
/// size up to `MAX_DIM + 1`. Returns `false` on a (numerically) singular matrix.
pub(crate) fn lu_solve(m: &[f64], n: usize, rhs: &[f64], x: &mut [f64]) -> bool {
    const CAP: usize = MAX_DIM + 1;
    let mut a = [0.0; CAP * CAP];
    let mut b = [0.0; CAP];
    a[..n * n].copy_from_slice(&m[..n * n]);
    b[..n].copy_from_slice(&rhs[..n]);
    let scale = a[..n * n].iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return false;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col].abs() <= 1e-300_f64.max(scale * 1e-15) {
            return false;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i * n + k] * x[k];
        }
        x[i] = s / a[i * n + i];
    }
    true
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &[f64], n: usize) -> f64 {
    let mat = nalgebra::DMatrix::from_row_slice(n, n, &m[..n * n]);
    let sym = (&mat + mat.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// Pairwise (cascade) summation. The split points depend only on the length,
/// so the result is independent of how the caller produced the terms.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
