//! Least-norm linear least squares via one-sided Jacobi SVD.

use alloc::vec;
use alloc::vec::Vec;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    fn row(&self, i: usize) -> Vec<f64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
}

/// Thin SVD `M = U Σ Vᵀ` of a matrix given by its columns (rows ≥ columns).
struct Svd {
    /// Left singular vectors scaled by their singular values.
    us: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    sigma: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn jacobi_svd(mut cols: Vec<Vec<f64>>) -> Svd {
    let n = cols.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = cols.iter().map(|c| libm::sqrt(dot(c, c))).collect();
    Svd { us: cols, v, sigma }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Minimizes `‖A x − b‖₂`, returning the minimum-norm minimizer.
///
/// Singular values below `rcond · σ_max` are treated as zero, so
/// rank-deficient systems are fine.
pub fn lstsq_min_norm(a: &Matrix, b: &[f64], rcond: f64) -> Vec<f64> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    if a.cols() == 0 {
        return Vec::new();
    }
    if a.rows() >= a.cols() {
        // A = U Σ Vᵀ, x = V Σ⁺ Uᵀ b
        let svd = jacobi_svd((0..a.cols()).map(|j| a.column(j)).collect());
        let cutoff = rcond * svd.sigma.iter().cloned().fold(0.0, f64::max);
        let mut x = vec![0.0; a.cols()];
        for (k, &s) in svd.sigma.iter().enumerate() {
            if s <= cutoff || s == 0.0 {
                continue;
            }
            // us[k] = σ_k u_k, so u_kᵀ b / σ_k = us[k]ᵀ b / σ_k².
            let coef = dot(&svd.us[k], b) / (s * s);
            for (xi, vi) in x.iter_mut().zip(&svd.v[k]) {
                *xi += coef * vi;
            }
        }
        x
    } else {
        // Aᵀ = U Σ Vᵀ, so A = V Σ Uᵀ and x = U Σ⁺ Vᵀ b.
        let svd = jacobi_svd((0..a.rows()).map(|i| a.row(i)).collect());
        let cutoff = rcond * svd.sigma.iter().cloned().fold(0.0, f64::max);
        let mut x = vec![0.0; a.cols()];
        for (k, &s) in svd.sigma.iter().enumerate() {
            if s <= cutoff || s == 0.0 {
                continue;
            }
            let coef = dot(&svd.v[k], b) / (s * s);
            for (xi, ui) in x.iter_mut().zip(&svd.us[k]) {
                *xi += coef * ui;
            }
        }
        x
    }
}

/// Orthogonal projection of `b` onto the span of `columns`, built one column
/// at a time.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    /// `b` minus its projection.
    pub residual: Vec<f64>,
    /// Number of columns that added a new direction.
    pub rank: usize,
}

/// Projects `b` onto the columns in the given order by modified Gram–Schmidt
/// with one reorthogonalization pass.
///
/// A column is skipped when less than `tol` of its norm is new. Because each
/// accepted column only ever removes more of `b`, appending columns can never
/// increase the residual norm, which makes the result monotone over nested
/// column lists.
pub fn project_in_order(columns: &[Vec<f64>], b: &[f64], tol: f64) -> Projection {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut residual = b.to_vec();
    for col in columns {
        assert_eq!(col.len(), b.len(), "column length mismatch");
        let norm = libm::sqrt(dot(col, col));
        if norm == 0.0 || !norm.is_finite() {
            continue;
        }
        let mut v: Vec<f64> = col.iter().map(|x| x / norm).collect();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let left = libm::sqrt(dot(&v, &v));
        if left <= tol {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= left;
        }
        let c = dot(&v, &residual);
        for (ri, vi) in residual.iter_mut().zip(&v) {
            *ri -= c * vi;
        }
        basis.push(v);
    }
    Projection { rank: basis.len(), residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        let a = Matrix::from_columns(2, &[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = lstsq_min_norm(&a, &[3.0, 5.0], 1e-13);
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn overdetermined_fit() {
        // Best line through (0,0), (1,1), (2,1): slope 1/2, intercept 1/6.
        let a = Matrix::from_columns(3, &[vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let x = lstsq_min_norm(&a, &[0.0, 1.0, 1.0], 1e-13);
        assert!((x[0] - 1.0 / 6.0).abs() < 1e-14 && (x[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn least_norm_for_duplicate_columns() {
        let a = Matrix::from_columns(2, &[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let x = lstsq_min_norm(&a, &[2.0, 2.0], 1e-13);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projection_skips_dependent_columns() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let p = project_in_order(&cols, &[1.0, 2.0, 3.0], 1e-12);
        assert_eq!(p.rank, 2);
        assert!(p.residual[0].abs() < 1e-15 && p.residual[1].abs() < 1e-15);
        assert!((p.residual[2] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn underdetermined_least_norm() {
        let a = Matrix::from_columns(1, &[vec![3.0], vec![4.0]]);
        let x = lstsq_min_norm(&a, &[5.0], 1e-13);
        assert!((x[0] - 0.6).abs() < 1e-14 && (x[1] - 0.8).abs() < 1e-14);
    }
}
