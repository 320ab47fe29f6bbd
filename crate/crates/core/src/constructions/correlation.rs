//! Extreme points of the elliptope and of the bipartite correlation set.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::types::{CSystem, ExtremalCertificate};

/// Pairs `(i, j)`, `i < j < r`, in lexicographic order.
pub fn pairs(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `r x C(r,2)` incidence matrix with `+1` at row `i` and `-1` at row `j` in
/// the column of pair `(i, j)`.
pub fn b_hat(r: usize) -> DenseMatrix {
    let ps = pairs(r);
    let mut b = DenseMatrix::zeros(r, ps.len());
    for (c, &(i, j)) in ps.iter().enumerate() {
        b.set_re(i, c, 1.0);
        b.set_re(j, c, -1.0);
    }
    b
}

fn unit(r: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; r];
    v[i] = 1.0;
    v
}

fn gram_of(vectors: &[Vec<f64>]) -> DenseMatrix {
    DenseMatrix::from_fn(vectors.len(), vectors.len(), |i, j| {
        vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum()
    })
}

/// `e_1..e_r` followed by `(e_i + e_j)/sqrt 2` for `i < j`.
pub fn elliptope_extreme_vectors(r: usize) -> Result<Vec<Vec<f64>>> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v: Vec<Vec<f64>> = (0..r).map(|i| unit(r, i)).collect();
    for (i, j) in pairs(r) {
        let mut z = vec![0.0; r];
        z[i] = s;
        z[j] = s;
        v.push(z);
    }
    Ok(v)
}

/// Rank-`r` extreme point of the elliptope of size `C(r+1, 2)`.
pub fn elliptope_extreme_example(r: usize) -> Result<DenseMatrix> {
    Ok(gram_of(&elliptope_extreme_vectors(r)?))
}

fn require_r(r: usize) -> Result<()> {
    if r < 2 {
        Err(Error::InvalidArgument(format!("r must be at least 2, got {r}")))
    } else {
        Ok(())
    }
}

/// Extreme point `C_1` of `Cor(r, C(r,2)+1)` of rank `r` with its certificate.
///
/// `E_1` is the Gram matrix of `e_1..e_r`, `(e_i - e_j)/sqrt 2` and
/// `(e_1 + ... + e_r)/sqrt r`; `Omega_1` has bipartite support, rank `n` and
/// `Omega_1 E_1 = 0`.
pub fn build_c1(r: usize) -> Result<(ExtremalCertificate, CSystem)> {
    require_r(r)?;
    let np = binomial(r, 2);
    let n = np + 1;
    let size = r + n;
    let (rf, nf) = (r as f64, n as f64);

    let bh = b_hat(r);
    let mut b = DenseMatrix::zeros(r, n);
    b.set_block(0, 0, &bh);
    for i in 0..r {
        b.set_re(i, np, 1.0);
    }
    let btb = &b.transpose() * &b;

    let mut omega_p = DenseMatrix::zeros(size, size);
    omega_p.set_block(0, 0, &DenseMatrix::identity(r).scale(nf));
    omega_p.set_block(0, r, &b.scale(nf.sqrt()));
    omega_p.set_block(r, 0, &b.transpose().scale(nf.sqrt()));
    omega_p.set_block(r, r, &DenseMatrix::identity(n).scale(rf));

    let mut e_p = DenseMatrix::zeros(size, size);
    e_p.set_block(0, 0, &DenseMatrix::identity(r));
    e_p.set_block(0, r, &b.scale(-nf.sqrt() / rf));
    e_p.set_block(r, 0, &b.transpose().scale(-nf.sqrt() / rf));
    e_p.set_block(r, r, &btb.scale(nf / (rf * rf)));

    // D rescales to a unit diagonal; the sign flip on the second party makes
    // pi(E_1) have columns (e_i - e_j)/sqrt 2 and e/sqrt r.
    let mut dscale = vec![1.0; size];
    for v in dscale.iter_mut().skip(r).take(np) {
        *v = -rf / (2.0 * nf).sqrt();
    }
    dscale[size - 1] = -(rf / nf).sqrt();
    let e1 = DenseMatrix::from_fn(size, size, |i, j| dscale[i] * e_p.re(i, j) * dscale[j]);
    let omega1 =
        DenseMatrix::from_fn(size, size, |i, j| omega_p.re(i, j) / (dscale[i] * dscale[j]));
    let c1 = e1.block(0, r, r, n);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let xs: Vec<Vec<f64>> = (0..r).map(|i| unit(r, i)).collect();
    let mut ys: Vec<Vec<f64>> = pairs(r)
        .into_iter()
        .map(|(i, j)| {
            let mut v = vec![0.0; r];
            v[i] = s;
            v[j] = -s;
            v
        })
        .collect();
    ys.push(vec![1.0 / rf.sqrt(); r]);

    Ok((
        ExtremalCertificate {
            c: c1,
            e: e1,
            omega: omega1,
        },
        CSystem::new(r, xs, ys)?,
    ))
}

/// Orthonormal basis of `R^r` whose last vector is `e / sqrt r` (Helmert).
/// Returned as rows `p_1..p_r`.
fn helmert_basis(r: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(r);
    for i in 1..r {
        let norm = ((i * (i + 1)) as f64).sqrt();
        let mut p = vec![0.0; r];
        for v in p.iter_mut().take(i) {
            *v = 1.0 / norm;
        }
        p[i] = -(i as f64) / norm;
        rows.push(p);
    }
    rows.push(vec![1.0 / (r as f64).sqrt(); r]);
    rows
}

/// Extreme point `C_2` of `Cor(r, C(r,2))` of rank `r - 1` with its
/// certificate and a C-system in `R^{r-1}`.
pub fn build_c2(r: usize) -> Result<(ExtremalCertificate, CSystem)> {
    require_r(r)?;
    let n = binomial(r, 2);
    let size = r + n;
    let (rf, nf) = (r as f64, n as f64);
    let bh = b_hat(r);
    let bbt = &bh * &bh.transpose();
    let btb = &bh.transpose() * &bh;

    let mut omega = DenseMatrix::zeros(size, size);
    omega.set_block(0, 0, &DenseMatrix::identity(r).scale(nf.sqrt()));
    omega.set_block(0, r, &bh);
    omega.set_block(r, 0, &bh.transpose());
    omega.set_block(r, r, &DenseMatrix::identity(n).scale(rf / nf.sqrt()));

    let off = -rf / (2.0 * nf.sqrt());
    let mut e = DenseMatrix::zeros(size, size);
    e.set_block(0, 0, &bbt.scale(1.0 / (rf - 1.0)));
    e.set_block(0, r, &bh.scale(off));
    e.set_block(r, 0, &bh.transpose().scale(off));
    e.set_block(r, r, &btb.scale(0.5));
    let c = e.block(0, r, r, n);

    // u_k = (e - r e_k)/sqrt(2n), v_ij = (e_i - e_j)/sqrt 2, rotated so that
    // e/sqrt r becomes the last axis, which is then dropped.
    let basis = helmert_basis(r);
    let reduce = |v: &[f64]| -> Vec<f64> {
        basis[..r - 1]
            .iter()
            .map(|p| p.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    };
    let xs: Vec<Vec<f64>> = (0..r)
        .map(|k| {
            let mut u = vec![1.0 / (2.0 * nf).sqrt(); r];
            u[k] -= rf / (2.0 * nf).sqrt();
            reduce(&u)
        })
        .collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ys: Vec<Vec<f64>> = pairs(r)
        .into_iter()
        .map(|(i, j)| {
            let mut v = vec![0.0; r];
            v[i] = s;
            v[j] = -s;
            reduce(&v)
        })
        .collect();

    Ok((
        ExtremalCertificate { c, e, omega },
        CSystem::new(r - 1, xs, ys)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_psd, numerical_rank, sym_span_dim, Tolerances};

    #[test]
    fn elliptope_example_r2() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = elliptope_extreme_example(2).unwrap();
        let expected = DenseMatrix::from_real(3, 3, &[1.0, 0.0, s, 0.0, 1.0, s, s, s, 1.0]);
        assert!(e.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn elliptope_example_rank_and_span() {
        let t = Tolerances::default();
        for r in 1..=8 {
            let e = elliptope_extreme_example(r).unwrap();
            assert_eq!(e.rows(), binomial(r + 1, 2));
            assert_eq!(numerical_rank(&e, &t), r);
            let v = elliptope_extreme_vectors(r).unwrap();
            assert_eq!(sym_span_dim(&v, &t).unwrap(), binomial(r + 1, 2));
        }
    }

    #[test]
    fn c1_r2_matches_column_description() {
        let (cert, _) = build_c1(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = DenseMatrix::from_real(2, 2, &[s, s, -s, s]);
        assert!(cert.c.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn c1_extension_is_gram_of_system() {
        for r in 2..=8 {
            let (cert, sys) = build_c1(r).unwrap();
            assert!(sys.max_norm_error() < 1e-12);
            assert!(cert.e.max_abs_diff(&sys.extension()).unwrap() < 1e-12, "r={r}");
            assert!(cert.c.max_abs_diff(&sys.correlation()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn c1_certificate_algebra() {
        let t = Tolerances::default();
        for r in 2..=8 {
            let (cert, _) = build_c1(r).unwrap();
            let n = binomial(r, 2) + 1;
            assert!((&cert.omega * &cert.e).frobenius_norm() < 1e-12);
            assert_eq!(numerical_rank(&cert.e, &t), r);
            assert_eq!(numerical_rank(&cert.omega, &t), n);
            assert!(is_psd(&cert.e, &t).unwrap());
            assert!(is_psd(&cert.omega, &t).unwrap());
            assert_eq!(binomial(r + 1, 2), r + n - 1);
        }
    }

    #[test]
    fn c2_r3_columns() {
        let (cert, _) = build_c2(3).unwrap();
        let h = 3f64.sqrt() / 2.0;
        // pairs (0,1), (0,2), (1,2); column = -(sqrt 3 / 2)(e_i - e_j)
        let expected = DenseMatrix::from_real(3, 3, &[-h, -h, 0.0, h, 0.0, -h, 0.0, h, h]);
        assert!(cert.c.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn c2_system_and_certificate() {
        let t = Tolerances::default();
        for r in 2..=8 {
            let (cert, sys) = build_c2(r).unwrap();
            let n = binomial(r, 2);
            assert_eq!(sys.r, r - 1);
            assert!(sys.max_norm_error() < 1e-12);
            assert!(cert.e.max_abs_diff(&sys.extension()).unwrap() < 1e-12, "r={r}");
            assert!((&cert.omega * &cert.e).frobenius_norm() < 1e-12);
            assert_eq!(numerical_rank(&cert.e, &t), r - 1);
            assert_eq!(numerical_rank(&cert.omega, &t), n + 1);
            let all: Vec<Vec<f64>> = sys.xs.iter().chain(&sys.ys).cloned().collect();
            assert_eq!(sym_span_dim(&all, &t).unwrap(), binomial(r, 2));
        }
    }

    #[test]
    fn rejects_small_r() {
        assert!(build_c1(1).is_err());
        assert!(build_c2(1).is_err());
        assert!(elliptope_extreme_example(0).is_err());
    }
}
