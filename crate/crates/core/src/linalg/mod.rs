//! Dense real/complex matrix kernels.

pub mod jacobi;
mod matrix;

pub use matrix::{DenseMatrix, Field};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Numerical thresholds used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise equality.
    pub eq_tol: f64,
    /// Eigenvalue floor for PSD tests, relative to `max(1, ||A||_inf)`.
    pub psd_tol: f64,
    /// Relative singular value cutoff for numerical rank.
    pub rank_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eq_tol: 1e-9,
            psd_tol: 1e-9,
            rank_tol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(eq_tol: f64, psd_tol: f64, rank_tol: f64) -> Result<Self> {
        let t = Self {
            eq_tol,
            psd_tol,
            rank_tol,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eq_tol", self.eq_tol),
            ("psd_tol", self.psd_tol),
            ("rank_tol", self.rank_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_eq_tol(mut self, eq_tol: f64) -> Self {
        self.eq_tol = eq_tol;
        self
    }
}

/// Spectral decomposition `A = V diag(values) V*` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl HermEig {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(lambda)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.values.len();
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &l) in self.values.iter().enumerate() {
                    let fl = f(l);
                    if fl != 0.0 {
                        acc += self.vectors.get(i, k) * self.vectors.get(j, k).conj() * fl;
                    }
                }
                out.set(i, j, acc);
            }
        }
        if self.vectors.field() == Field::Real {
            out = out.real_part();
        }
        out
    }
}

/// Hermitian eigendecomposition with the default tolerances.
pub fn herm_eig(a: &DenseMatrix) -> Result<HermEig> {
    herm_eig_with(a, &Tolerances::default())
}

pub fn herm_eig_with(a: &DenseMatrix, tol: &Tolerances) -> Result<HermEig> {
    a.require_square()?;
    let dev = a.hermitian_deviation()?;
    if dev > tol.eq_tol * a.max_abs().max(1.0) {
        return Err(Error::NonHermitian { deviation: dev });
    }
    Ok(herm_eig_unchecked(a))
}

/// Eigendecomposition of the Hermitian part of a square matrix, no checks.
pub(crate) fn herm_eig_unchecked(a: &DenseMatrix) -> HermEig {
    let n = a.rows();
    if a.field() == Field::Real {
        let (values, v) = jacobi::hermitian_eig(&a.real_parts(), n);
        HermEig {
            values,
            vectors: DenseMatrix::from_real(n, n, &v),
        }
    } else {
        let (values, v) = jacobi::hermitian_eig(a.entries(), n);
        HermEig {
            values,
            vectors: DenseMatrix::from_complex(n, n, v).into_complex_field(),
        }
    }
}

/// True iff the smallest eigenvalue is at least `-psd_tol * max(1, ||A||_inf)`.
pub fn is_psd(a: &DenseMatrix, tol: &Tolerances) -> Result<bool> {
    Ok(min_eigenvalue(a)? >= -tol.psd_tol * a.inf_norm().max(1.0))
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(a: &DenseMatrix) -> Result<f64> {
    a.require_square()?;
    if a.rows() == 0 {
        return Ok(0.0);
    }
    Ok(herm_eig_unchecked(a).min())
}

pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    if a.field() == Field::Real {
        jacobi::singular_values(&a.real_parts(), a.rows(), a.cols())
    } else {
        jacobi::singular_values(a.entries(), a.rows(), a.cols())
    }
}

/// Number of singular values above `rank_tol * sigma_max`.
pub fn numerical_rank(a: &DenseMatrix, tol: &Tolerances) -> usize {
    let sv = singular_values(a);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank_tol * top).count()
}

pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (ar, ac) = a.dims();
    let (br, bc) = b.dims();
    let mut data = vec![Complex64::new(0.0, 0.0); ar * br * ac * bc];
    let cols = ac * bc;
    for i in 0..ar {
        for j in 0..ac {
            let x = a.get(i, j);
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    data[(i * br + k) * cols + j * bc + l] = x * b.get(k, l);
                }
            }
        }
    }
    let out = DenseMatrix::from_complex(ar * br, cols, data);
    if a.field().join(b.field()) == Field::Complex {
        out.into_complex_field()
    } else {
        out
    }
}

/// Kronecker product of a sequence of factors (the empty product is `[1]`).
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a DenseMatrix>) -> DenseMatrix {
    factors
        .into_iter()
        .fold(DenseMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// `Tr(A* B)`.
pub fn trace_inner(a: &DenseMatrix, b: &DenseMatrix) -> Result<Complex64> {
    a.require_same_dims(b)?;
    Ok(a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Gram matrix of a factor family with its worst imaginary residue.
#[derive(Debug, Clone)]
pub struct Gram {
    /// Real symmetric matrix of `Re <F_i, F_j>`.
    pub matrix: DenseMatrix,
    /// `max |Im <F_i, F_j>|`.
    pub max_imag: f64,
}

pub fn gram(factors: &[DenseMatrix]) -> Result<Gram> {
    let n = factors.len();
    if let Some(first) = factors.first() {
        for f in &factors[1..] {
            first.require_same_dims(f)?;
        }
    }
    let mut g = DenseMatrix::zeros(n, n);
    let mut max_imag: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let z = trace_inner(&factors[i], &factors[j])?;
            max_imag = max_imag.max(z.im.abs());
            g.set_re(i, j, z.re);
            g.set_re(j, i, z.re);
        }
    }
    Ok(Gram {
        matrix: g,
        max_imag,
    })
}

/// Dimension of the span of `{z z^T}` for real vectors `z`.
pub fn sym_span_dim(vectors: &[Vec<f64>], tol: &Tolerances) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let r = first.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != r) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} among vectors of length {r}",
            v.len()
        )));
    }
    // Isometric coordinates of S^r: diagonal entries, then sqrt(2) * upper triangle.
    let width = r * (r + 1) / 2;
    let mut rows = Vec::with_capacity(vectors.len() * width);
    for z in vectors {
        for i in 0..r {
            rows.push(z[i] * z[i]);
        }
        for i in 0..r {
            for j in i + 1..r {
                rows.push(std::f64::consts::SQRT_2 * z[i] * z[j]);
            }
        }
    }
    let m = DenseMatrix::from_real(vectors.len(), width, &rows);
    Ok(numerical_rank(&m, tol))
}

/// `(1/sqrt 2) [[Re X, Im X], [Im X^T, Re X]]`, an isometry from Hermitian
/// `d x d` matrices into real symmetric `2d x 2d` matrices preserving PSD-ness.
pub fn complex_to_real_embed(x: &DenseMatrix, tol: &Tolerances) -> Result<DenseMatrix> {
    x.require_square()?;
    let dev = x.hermitian_deviation()?;
    if dev > tol.eq_tol * x.max_abs().max(1.0) {
        return Err(Error::NonHermitian { deviation: dev });
    }
    Ok(embed_unchecked(x))
}

pub(crate) fn embed_unchecked(x: &DenseMatrix) -> DenseMatrix {
    let d = x.rows();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DenseMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let (bi, ii) = (i / d, i % d);
        let (bj, jj) = (j / d, j % d);
        let z = x.get(ii, jj);
        s * match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => z.im,
            _ => x.get(jj, ii).im,
        }
    })
}

/// Inverse of [`complex_to_real_embed`] on matrices with the embedded block
/// structure; reads the top blocks only.
pub fn real_to_complex_unembed(y: &DenseMatrix) -> Result<DenseMatrix> {
    y.require_square()?;
    if y.rows() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "embedded matrix must have even size, got {}",
            y.rows()
        )));
    }
    let d = y.rows() / 2;
    let s = std::f64::consts::SQRT_2;
    let out = DenseMatrix::from_fn_complex(d, d, |i, j| {
        Complex64::new(s * y.re(i, j), s * y.re(i, j + d))
    });
    Ok(out.into_complex_field())
}

/// Orthonormal basis (as columns) of the range of a Hermitian PSD matrix,
/// keeping eigenvalues above `rank_tol * lambda_max`.
pub fn range_basis(a: &DenseMatrix, tol: &Tolerances) -> Result<DenseMatrix> {
    let eig = herm_eig_with(a, tol)?;
    let n = a.rows();
    let top = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let keep: Vec<usize> = (0..n)
        .rev()
        .filter(|&k| top > 0.0 && eig.values[k] > tol.rank_tol * top)
        .collect();
    let mut basis = DenseMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        for i in 0..n {
            basis.set(i, c, eig.vectors.get(i, k));
        }
    }
    if a.field() == Field::Complex {
        basis = basis.into_complex_field();
    }
    Ok(basis)
}

/// Real vectors `z_i` (rows) with `Gram(z_i) = E`, using the `rank` largest
/// eigenpairs of a real symmetric PSD matrix.
pub fn gram_vectors(e: &DenseMatrix, rank: usize) -> Result<Vec<Vec<f64>>> {
    e.require_square()?;
    let n = e.rows();
    let eig = herm_eig_unchecked(&e.real_part());
    let cols: Vec<usize> = (0..n).rev().take(rank).collect();
    Ok((0..n)
        .map(|i| {
            cols.iter()
                .map(|&k| eig.values[k].max(0.0).sqrt() * eig.vectors.re(i, k))
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> DenseMatrix {
        DenseMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    fn pauli_y() -> DenseMatrix {
        let i = Complex64::new(0.0, 1.0);
        DenseMatrix::from_complex(2, 2, vec![0.0.into(), -i, i, 0.0.into()])
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn eig_examples() {
        let e = herm_eig(&DenseMatrix::identity(3)).unwrap();
        assert!(close(&e.values, &[1.0, 1.0, 1.0], 1e-15));
        let e = herm_eig(&pauli_x()).unwrap();
        assert!(close(&e.values, &[-1.0, 1.0], 1e-14));
        let e = herm_eig(&DenseMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert!(close(&e.values, &[1.0, 2.0, 3.0], 1e-15));
        let e = herm_eig(&pauli_y()).unwrap();
        assert!(close(&e.values, &[-1.0, 1.0], 1e-14));
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(
            herm_eig(&DenseMatrix::zeros(2, 3)),
            Err(Error::NonSquare { .. })
        ));
        let a = DenseMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(herm_eig(&a), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn psd_examples() {
        let t = Tolerances::default();
        assert!(is_psd(&DenseMatrix::identity(2), &t).unwrap());
        let a = DenseMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(!is_psd(&a, &t).unwrap());
        assert!(is_psd(&DenseMatrix::zeros(2, 3), &t).is_err());
    }

    #[test]
    fn rank_examples() {
        let t = Tolerances::default();
        let j3 = DenseMatrix::from_fn(3, 3, |_, _| 1.0);
        assert_eq!(numerical_rank(&j3, &t), 1);
        assert_eq!(numerical_rank(&DenseMatrix::zeros(3, 2), &t), 0);
        assert_eq!(numerical_rank(&DenseMatrix::identity(4), &t), 4);
    }

    #[test]
    fn kron_examples() {
        let i2 = DenseMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), DenseMatrix::identity(4));
        let z = DenseMatrix::diag(&[1.0, -1.0]);
        let zx = kron(&z, &pauli_x());
        let expected = DenseMatrix::from_real(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, -1.0, 0.0,
            ],
        );
        assert_eq!(zx, expected);
    }

    #[test]
    fn trace_inner_examples() {
        let i3 = DenseMatrix::identity(3);
        assert_eq!(trace_inner(&i3, &i3).unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(trace_inner(&pauli_x(), &pauli_y()).unwrap().norm(), 0.0);
        assert!(trace_inner(&i3, &DenseMatrix::identity(2)).is_err());
    }

    #[test]
    fn gram_examples() {
        let mut p1 = DenseMatrix::zeros(2, 2);
        p1.set_re(0, 0, 1.0);
        let mut p2 = DenseMatrix::zeros(2, 2);
        p2.set_re(1, 1, 1.0);
        let g = gram(&[p1, p2]).unwrap();
        assert_eq!(g.matrix, DenseMatrix::identity(2));
        assert_eq!(g.max_imag, 0.0);

        let f = DenseMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let g = gram(std::slice::from_ref(&f)).unwrap();
        assert_eq!(g.matrix.re(0, 0), 30.0);

        assert!(gram(&[DenseMatrix::identity(2), DenseMatrix::identity(3)]).is_err());
    }

    #[test]
    fn sym_span_examples() {
        let t = Tolerances::default();
        assert_eq!(sym_span_dim(&[vec![1.0, 0.0], vec![0.0, 1.0]], &t).unwrap(), 2);
        assert_eq!(sym_span_dim(&[vec![1.0, 0.0], vec![2.0, 0.0]], &t).unwrap(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [vec![1.0, 0.0], vec![0.0, 1.0], vec![s, s]];
        assert_eq!(sym_span_dim(&v, &t).unwrap(), 3);
        assert!(sym_span_dim(&[vec![1.0], vec![1.0, 0.0]], &t).is_err());
    }

    #[test]
    fn embed_examples() {
        let t = Tolerances::default();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = complex_to_real_embed(&DenseMatrix::identity(3), &t).unwrap();
        assert_eq!(e, DenseMatrix::identity(6).scale(s));
        assert!((trace_inner(&e, &e).unwrap().re - 3.0).abs() < 1e-15);

        let ey = complex_to_real_embed(&pauli_y(), &t).unwrap();
        let expected = DenseMatrix::from_real(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                -1.0, 0.0, 0.0, 0.0,
            ],
        )
        .scale(s);
        assert!(ey.max_abs_diff(&expected).unwrap() < 1e-16);

        let back = real_to_complex_unembed(&ey).unwrap();
        assert!(back.max_abs_diff(&pauli_y()).unwrap() < 1e-15);

        let bad = DenseMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            complex_to_real_embed(&bad, &t),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn range_basis_of_projector() {
        let t = Tolerances::default();
        let p = DenseMatrix::from_fn(3, 3, |i, j| if i < 2 && j < 2 { 0.5 } else { 0.0 });
        let u = range_basis(&p, &t).unwrap();
        assert_eq!(u.dims(), (3, 1));
        assert!((u.re(0, 0).abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }
}
