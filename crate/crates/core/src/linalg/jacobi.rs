//! Cyclic Jacobi kernels shared by the real and complex code paths.
//!
//! Both routines work on row-major slices. The eigen solver diagonalizes a
//! Hermitian matrix by a sequence of 2x2 unitary rotations; the singular value
//! routine is the one-sided (Hestenes) variant, which orthogonalizes columns
//! and never forms `A* A`, so small singular values keep full relative accuracy.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// Scalar field the Jacobi kernels are generic over (`f64` or `Complex64`).
pub trait Scalar:
    Copy
    + Default
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn re(self) -> f64;
    fn from_re(x: f64) -> Self;
    fn scale(self, x: f64) -> Self;
    /// `self / |self|`, or one when `self` is zero.
    fn phase(self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn from_re(x: f64) -> Self {
        x
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn abs(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn phase(self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / r
        }
    }
}

const MAX_SWEEPS: usize = 100;

/// Unitary 2x2 block `[[pp, pq], [qp, qq]]` that zeroes the off-diagonal of
/// `[[a, h], [conj(h), b]]` under `G* H G`. Returns the block and `t` with the
/// updated diagonal `(a - t|h|, b + t|h|)`.
#[inline]
fn rotation<S: Scalar>(a: f64, b: f64, h: S) -> ([S; 4], f64) {
    let g = h.abs();
    let e = h.phase().conj();
    let theta = (b - a) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    (
        [S::from_re(c), S::from_re(s), -(e.scale(s)), e.scale(c)],
        t,
    )
}

/// Eigendecomposition of a Hermitian `n x n` row-major matrix.
///
/// Returns eigenvalues in ascending order and the row-major eigenvector matrix
/// whose columns match them. Only the Hermitian part of `a` is used.
pub fn hermitian_eig<S: Scalar>(a: &[S], n: usize) -> (Vec<f64>, Vec<S>) {
    debug_assert_eq!(a.len(), n * n);
    let mut m = vec![S::default(); n * n];
    for i in 0..n {
        for j in 0..n {
            let v = (a[i * n + j] + a[j * n + i].conj()).scale(0.5);
            m[i * n + j] = if i == j { S::from_re(v.re()) } else { v };
        }
    }
    let mut v = vec![S::default(); n * n];
    for i in 0..n {
        v[i * n + i] = S::from_re(1.0);
    }
    let norm: f64 = m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || n < 2 {
        let evals = (0..n).map(|i| m[i * n + i].re()).collect();
        return (evals, v);
    }
    let target = 1e-15 * norm;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let h = m[p * n + q];
                if h.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = m[p * n + p].re();
                let aqq = m[q * n + q].re();
                let (g, t) = rotation(app, aqq, h);
                let [gpp, gpq, gqp, gqq] = g;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * gpp + akq * gqp;
                    m[k * n + q] = akp * gpq + akq * gqq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = gpp.conj() * apk + gqp.conj() * aqk;
                    m[q * n + k] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                let habs = h.abs();
                m[p * n + p] = S::from_re(app - t * habs);
                m[q * n + q] = S::from_re(aqq + t * habs);
                m[p * n + q] = S::default();
                m[q * n + p] = S::default();
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * gpp + vkq * gqp;
                    v[k * n + q] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re().total_cmp(&m[j * n + j].re()));
    let evals = order.iter().map(|&i| m[i * n + i].re()).collect();
    let mut vecs = vec![S::default(); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + new_col] = v[k * n + old_col];
        }
    }
    (evals, vecs)
}

/// Singular values (descending) of a `rows x cols` row-major matrix.
pub fn singular_values<S: Scalar>(a: &[S], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), rows * cols);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    // Work column-major on whichever orientation has fewer columns.
    let (m, n, mut cm) = if cols <= rows {
        let mut cm = vec![S::default(); rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                cm[j * rows + i] = a[i * cols + j];
            }
        }
        (rows, cols, cm)
    } else {
        // Columns of A* are the conjugated rows of A.
        let cm = a.iter().map(|x| x.conj()).collect();
        (cols, rows, cm)
    };

    let scale: f64 = cm.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    let eps = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (cp, cq) = (&cm[p * m..(p + 1) * m], &cm[q * m..(q + 1) * m]);
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = S::default();
                for k in 0..m {
                    alpha += cp[k].norm_sqr();
                    beta += cq[k].norm_sqr();
                    gamma = gamma + cp[k].conj() * cq[k];
                }
                let g = gamma.abs();
                if g <= eps * (alpha * beta).sqrt() || g <= f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let ([gpp, gpq, gqp, gqq], _) = rotation(alpha, beta, gamma);
                for k in 0..m {
                    let xp = cm[p * m + k];
                    let xq = cm[q * m + k];
                    cm[p * m + k] = xp * gpp + xq * gqp;
                    cm[q * m + k] = xp * gpq + xq * gqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n)
        .map(|j| cm[j * m..(j + 1) * m].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct<S: Scalar>(evals: &[f64], v: &[S], n: usize) -> Vec<S> {
        let mut out = vec![S::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::default();
                for k in 0..n {
                    acc = acc + v[i * n + k].scale(evals[k]) * v[j * n + k].conj();
                }
                out[i * n + j] = acc;
            }
        }
        out
    }

    #[test]
    fn real_symmetric_reconstructs() {
        let a = [4.0, 1.0, -2.0, 1.0, 2.0, 0.5, -2.0, 0.5, 3.0];
        let (l, v) = hermitian_eig(&a, 3);
        assert!(l.windows(2).all(|w| w[0] <= w[1]));
        let r = reconstruct(&l, &v, 3);
        for (x, y) in r.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let c = Complex64::new;
        let a = [
            c(2.0, 0.0),
            c(1.0, -1.0),
            c(0.0, 0.5),
            c(1.0, 1.0),
            c(-1.0, 0.0),
            c(0.3, 0.2),
            c(0.0, -0.5),
            c(0.3, -0.2),
            c(0.7, 0.0),
        ];
        let (l, v) = hermitian_eig(&a, 3);
        let r = reconstruct(&l, &v, 3);
        for (x, y) in r.iter().zip(a.iter()) {
            assert!((x - y).norm() < 1e-13, "{x} vs {y}");
        }
    }

    #[test]
    fn singular_values_of_rank_one() {
        // outer product (1,2,3)(1,1)^T has single singular value |u||v|
        let a = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        let s = singular_values(&a, 3, 2);
        assert!((s[0] - (14.0f64).sqrt() * 2f64.sqrt()).abs() < 1e-13);
        assert!(s[1] < 1e-14);
        let s_wide = singular_values(&[1.0, 2.0, 3.0, 1.0, 2.0, 3.0], 2, 3);
        assert!((s_wide[0] - s[0]).abs() < 1e-13);
    }
}
