//! The matrices `M_k = [[I_k, J_k/k], [J_k/k, I_k]]` and their factorizations.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Field};
use crate::types::PsdFactorization;

fn require_positive(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidArgument("order must be at least 1".into()))
    } else {
        Ok(())
    }
}

pub fn build_mk(k: usize) -> Result<DenseMatrix> {
    require_positive(k)?;
    let kf = k as f64;
    Ok(DenseMatrix::from_fn(2 * k, 2 * k, |i, j| {
        let same_side = (i < k) == (j < k);
        match (same_side, i == j) {
            (true, true) => 1.0,
            (true, false) => 0.0,
            (false, _) => 1.0 / kf,
        }
    }))
}

/// Nonnegative vectors `v_i = e_i (x) 1 / sqrt k` and `u_i = 1 (x) e_i / sqrt k`
/// in `R^{k^2}`, in the order `v_1..v_k, u_1..u_k`.
pub fn cp_factorization_mk(k: usize) -> Result<Vec<Vec<f64>>> {
    require_positive(k)?;
    let s = (1.0 / k as f64).sqrt();
    let mut out = Vec::with_capacity(2 * k);
    for i in 0..k {
        let mut v = vec![0.0; k * k];
        for j in 0..k {
            v[i * k + j] = s;
        }
        out.push(v);
    }
    for i in 0..k {
        let mut u = vec![0.0; k * k];
        for j in 0..k {
            u[j * k + i] = s;
        }
        out.push(u);
    }
    Ok(out)
}

/// Fourier matrix `(H_k)_{ij} = exp(2 pi i (i-1)(j-1) / k)`.
pub fn complex_hadamard(k: usize) -> Result<DenseMatrix> {
    require_positive(k)?;
    let m = DenseMatrix::from_fn_complex(k, k, |i, j| {
        // Reduce the exponent mod k so that entries at quarter turns are exact.
        let e = (i * j) % k;
        match (4 * e) % k {
            0 => match 4 * e / k {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            },
            _ => Complex64::from_polar(1.0, 2.0 * PI * e as f64 / k as f64),
        }
    });
    Ok(m.into_complex_field())
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

fn sylvester(k: usize) -> Vec<i64> {
    let mut h = vec![1i64];
    let mut n = 1;
    while n < k {
        let mut next = vec![0i64; 4 * n * n];
        for i in 0..n {
            for j in 0..n {
                let v = h[i * n + j];
                next[i * 2 * n + j] = v;
                next[i * 2 * n + j + n] = v;
                next[(i + n) * 2 * n + j] = v;
                next[(i + n) * 2 * n + j + n] = -v;
            }
        }
        h = next;
        n *= 2;
    }
    h
}

/// Paley type I construction of order `q + 1` for a prime `q = 3 mod 4`.
fn paley_one(q: usize) -> Vec<i64> {
    let mut is_square = vec![false; q];
    for x in 1..q {
        is_square[(x * x) % q] = true;
    }
    let chi = |x: usize| -> i64 {
        if x == 0 {
            0
        } else if is_square[x] {
            1
        } else {
            -1
        }
    };
    let n = q + 1;
    let mut h = vec![0i64; n * n];
    for j in 1..n {
        h[j] = 1;
        h[j * n] = -1;
    }
    for i in 0..q {
        for j in 0..q {
            h[(i + 1) * n + j + 1] = chi((j + q - i) % q);
        }
    }
    for i in 0..n {
        h[i * n + i] += 1;
    }
    h
}

fn kron_int(a: &[i64], na: usize, b: &[i64], nb: usize) -> Vec<i64> {
    let n = na * nb;
    let mut out = vec![0i64; n * n];
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k) * n + j * nb + l] = a[i * na + j] * b[k * nb + l];
                }
            }
        }
    }
    out
}

fn hadamard_recipe(k: usize) -> Option<Vec<i64>> {
    if k.is_power_of_two() {
        return Some(sylvester(k));
    }
    if k >= 4 && is_prime(k - 1) && (k - 1) % 4 == 3 {
        return Some(paley_one(k - 1));
    }
    (2..k)
        .filter(|a| k % a == 0 && a * a <= k)
        .find_map(|a| {
            let b = k / a;
            let ha = hadamard_recipe(a)?;
            let hb = hadamard_recipe(b)?;
            Some(kron_int(&ha, a, &hb, b))
        })
}

/// Integer `+-1` matrix with `H^T H = k I`, from Sylvester doubling, Paley
/// type I, and Kronecker products of those.
pub fn real_hadamard_int(k: usize) -> Result<Vec<i64>> {
    require_positive(k)?;
    if k > 1 && k % 2 == 1 {
        return Err(Error::NotConstructible(format!(
            "odd order > 1 ({k}): two +-1 columns of odd length cannot be orthogonal"
        )));
    }
    if k > 2 && k % 4 == 2 {
        return Err(Error::NotConstructible(format!(
            "order {k} = 2 mod 4 greater than 2 admits no real Hadamard matrix"
        )));
    }
    hadamard_recipe(k)
        .ok_or_else(|| Error::NotConstructible(format!("no recipe for order {k}")))
}

pub fn real_hadamard(k: usize) -> Result<DenseMatrix> {
    let h = real_hadamard_int(k)?;
    let v: Vec<f64> = h.iter().map(|&x| x as f64).collect();
    Ok(DenseMatrix::from_real(k, k, &v))
}

/// Factors `X_i = e_i e_i^T` and `Y_i = u_i u_i^* / k` (`u_i` the Hadamard
/// columns) whose Gram matrix is `M_k`.
pub fn hadamard_factorization_mk(k: usize, field: Field) -> Result<PsdFactorization> {
    let h = match field {
        Field::Complex => complex_hadamard(k)?,
        Field::Real => real_hadamard(k)?,
    };
    let mut factors = Vec::with_capacity(2 * k);
    for i in 0..k {
        let mut x = DenseMatrix::zeros(k, k);
        x.set_re(i, i, 1.0);
        if field == Field::Complex {
            x = x.into_complex_field();
        }
        factors.push(x);
    }
    let kf = k as f64;
    for i in 0..k {
        let u = h.col(i);
        let y = (&u * &u.adjoint()).scale(1.0 / kf);
        factors.push(if field == Field::Complex {
            y.into_complex_field()
        } else {
            y
        });
    }
    Ok(PsdFactorization {
        field,
        d: k,
        factors,
        target: build_mk(k)?,
    })
}
