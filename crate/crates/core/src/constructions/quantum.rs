//! Tensor operator representations, binary quantum correlations and the
//! completely positive semidefinite matrices built from them.

use num_complex::Complex64;

use super::clifford::clifford_irreducible;
use super::correlation::build_c1;
use crate::error::{Error, Result};
use crate::linalg::{gram, numerical_rank, DenseMatrix, Field, Tolerances};
use crate::types::{
    CSystem, ExtremalCertificate, OperatorRepresentation, PsdFactorization, QuantumCorrelation,
};

fn combine(coeffs: &[f64], gens: &[DenseMatrix]) -> DenseMatrix {
    let n = gens[0].rows();
    let mut out = DenseMatrix::zeros(n, n).into_complex_field();
    for (c, g) in coeffs.iter().zip(gens) {
        if *c != 0.0 {
            out = &out + &g.scale(*c);
        }
    }
    out
}

/// Maximally entangled vector `(1/sqrt d) sum_i e_i (x) e_i`.
pub fn maximally_entangled(d: usize) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    let s = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        psi[i * d + i] = Complex64::new(s, 0.0);
    }
    psi
}

/// `X_s = sum_i (x_s)_i pi(a_i)`, `Y_t = sum_i (y_t)_i pi(a_i)^T` with `pi`
/// the irreducible Clifford representation of size `2^{floor(r/2)}`.
pub fn tensor_op_rep(system: &CSystem) -> Result<OperatorRepresentation> {
    let r = system.r;
    if r == 0 {
        return Err(Error::DegenerateSystem { dim: 0, rank: 0 });
    }
    let rank = numerical_rank(&system.stacked(), &Tolerances::default());
    if rank < r {
        return Err(Error::DegenerateSystem { dim: r, rank });
    }
    let pi = clifford_irreducible(r)?;
    let pi_t: Vec<DenseMatrix> = pi.iter().map(DenseMatrix::transpose).collect();
    let d = pi[0].rows();
    Ok(OperatorRepresentation {
        d,
        xs: system.xs.iter().map(|x| combine(x, &pi)).collect(),
        ys: system.ys.iter().map(|y| combine(y, &pi_t)).collect(),
        psi: maximally_entangled(d),
    })
}

/// `(I + (-1)^a X) / 2`.
pub fn binarize(x: &DenseMatrix, a: usize) -> DenseMatrix {
    let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
    let id = DenseMatrix::identity(x.rows());
    (&id + &x.scale(sign)).scale(0.5)
}

/// `p(a, b | s, t) = psi^* (X_s^a (x) Y_t^b) psi` with binary outcomes.
pub fn quantum_correlation_from_rep(rep: &OperatorRepresentation) -> QuantumCorrelation {
    let (m, n) = (rep.xs.len(), rep.ys.len());
    let mut p = QuantumCorrelation::zeros(2, 2, m, n);
    let xa: Vec<[DenseMatrix; 2]> = rep.xs.iter().map(|x| [binarize(x, 0), binarize(x, 1)]).collect();
    let yb: Vec<[DenseMatrix; 2]> = rep.ys.iter().map(|y| [binarize(y, 0), binarize(y, 1)]).collect();
    for s in 0..m {
        for t in 0..n {
            for a in 0..2 {
                for b in 0..2 {
                    p.set(a, b, s, t, rep.expectation(&xa[s][a], &yb[t][b]).re);
                }
            }
        }
    }
    p
}

/// Deviation of `psi` from the maximally entangled vector.
pub fn entanglement_deviation(rep: &OperatorRepresentation) -> f64 {
    maximally_entangled(rep.d)
        .iter()
        .zip(&rep.psi)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Factors `X_s^a / sqrt d` for rows `(a, s)` and `(Y_t^b)^T / sqrt d` for
/// rows `(b, t)`; Alice's rows come first, row `(a, s)` at `s * 2 + a`.
pub fn csplus_from_rep(rep: &OperatorRepresentation) -> Result<(DenseMatrix, PsdFactorization)> {
    if rep.psi.len() != rep.d * rep.d {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} for local dimension {}",
            rep.psi.len(),
            rep.d
        )));
    }
    let deviation = entanglement_deviation(rep);
    if deviation > Tolerances::default().eq_tol {
        return Err(Error::NotMaximallyEntangled { deviation });
    }
    let s = 1.0 / (rep.d as f64).sqrt();
    let mut factors = Vec::with_capacity(2 * (rep.xs.len() + rep.ys.len()));
    for x in &rep.xs {
        for a in 0..2 {
            factors.push(binarize(x, a).scale(s));
        }
    }
    for y in &rep.ys {
        for b in 0..2 {
            factors.push(binarize(y, b).transpose().scale(s));
        }
    }
    let field = factors
        .iter()
        .fold(Field::Real, |f, x| f.join(x.field()));
    let m = gram(&factors)?.matrix;
    Ok((
        m.clone(),
        PsdFactorization {
            field,
            d: rep.d,
            factors,
            target: m,
        },
    ))
}

/// Largest supported `k`; the factors have size `2^k`.
pub const MAX_MAIN_THEOREM_K: usize = 6;

/// Matrix of size `4k^2 + 2k + 2` with Hermitian PSD factors of size `2^k`,
/// built from the extreme correlation `C_1` with `r = 2k`, together with
/// the certificate of `C_1`.
pub fn main_theorem_matrix(
    k: usize,
) -> Result<(DenseMatrix, PsdFactorization, ExtremalCertificate)> {
    if k == 0 || k > MAX_MAIN_THEOREM_K {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={MAX_MAIN_THEOREM_K}, got {k}"
        )));
    }
    let (cert, system) = build_c1(2 * k)?;
    let rep = tensor_op_rep(&system)?;
    let (m, f) = csplus_from_rep(&rep)?;
    Ok((m, f, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::herm_eig;

    #[test]
    fn two_dimensional_example() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sys = CSystem::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![s, -s]]).unwrap();
        let rep = tensor_op_rep(&sys).unwrap();
        assert_eq!(rep.d, 2);
        assert_eq!(rep.xs[0].real_part(), DenseMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let c = (&rep.xs[0] * &rep.ys[0].transpose()).trace().re / 2.0;
        assert!((c - s).abs() < 1e-15);
        assert!((rep.correlation().re(0, 0) - s).abs() < 1e-15);
    }

    #[test]
    fn degenerate_system() {
        let sys = CSystem::new(2, vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            tensor_op_rep(&sys),
            Err(Error::DegenerateSystem { dim: 2, rank: 1 })
        ));
    }

    #[test]
    fn c1_representation() {
        for r in 2..=6 {
            let (cert, sys) = build_c1(r).unwrap();
            let rep = tensor_op_rep(&sys).unwrap();
            assert_eq!(rep.d, 1 << (r / 2));
            assert!(rep.correlation().max_abs_diff(&cert.c).unwrap() < 1e-10);
            for x in rep.xs.iter().chain(&rep.ys) {
                let e = herm_eig(x).unwrap();
                assert!(e.values.iter().all(|v| (v.abs() - 1.0).abs() < 1e-10));
            }
            let p = quantum_correlation_from_rep(&rep);
            assert!(p.normalization_error() < 1e-12);
            assert!(p.signaling() < 1e-12);
            for s in 0..sys.m() {
                for t in 0..sys.n() {
                    for a in 0..2 {
                        for b in 0..2 {
                            let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                            let expect = (1.0 + sign * cert.c.re(s, t)) / 4.0;
                            assert!((p.get(a, b, s, t) - expect).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn main_theorem_sizes() {
        for (k, size) in [(1, 8), (2, 22), (3, 44)] {
            let (m, f, _) = main_theorem_matrix(k).unwrap();
            assert_eq!(m.rows(), size);
            assert_eq!(f.d, 1 << k);
            assert_eq!(f.len(), size);
        }
        assert!(main_theorem_matrix(0).is_err());
        assert!(main_theorem_matrix(7).is_err());
    }

    #[test]
    fn rejects_other_states() {
        let (_, sys) = build_c1(2).unwrap();
        let mut rep = tensor_op_rep(&sys).unwrap();
        rep.psi = vec![1.0.into(), 0.0.into(), 0.0.into(), 0.0.into()];
        assert!(matches!(
            csplus_from_rep(&rep),
            Err(Error::NotMaximallyEntangled { .. })
        ));
    }
}
