//! Pauli-word representations of the Clifford algebra on `r` generators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, DenseMatrix};

pub fn pauli_x() -> DenseMatrix {
    DenseMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> DenseMatrix {
    let i = Complex64::new(0.0, 1.0);
    DenseMatrix::from_complex(2, 2, vec![0.0.into(), -i, i, 0.0.into()])
}

pub fn pauli_z() -> DenseMatrix {
    DenseMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `Z^{(x) zs} (x) P (x) I^{(x) ids}`.
fn word(zs: usize, p: &DenseMatrix, ids: usize) -> DenseMatrix {
    let (z, id) = (pauli_z(), DenseMatrix::identity(2));
    let parts: Vec<&DenseMatrix> = std::iter::repeat_n(&z, zs)
        .chain(std::iter::once(p))
        .chain(std::iter::repeat_n(&id, ids))
        .collect();
    kron_all(parts)
}

fn require_r(r: usize) -> Result<()> {
    if r == 0 {
        Err(Error::InvalidArgument("Clifford algebra needs r >= 1".into()))
    } else {
        Ok(())
    }
}

/// Generators `phi_r(a_1), ..., phi_r(a_r)` of size `2^{ceil(r/2)}`: odd
/// generators are `Z..Z X I..I`, even ones `Z..Z Y I..I`.
pub fn clifford_phi(r: usize) -> Result<Vec<DenseMatrix>> {
    require_r(r)?;
    let q = r.div_ceil(2);
    let (x, y) = (pauli_x(), pauli_y());
    Ok((1..=r)
        .map(|i| {
            let k = (i - 1) / 2;
            let p = if i % 2 == 1 { &x } else { &y };
            word(k, p, q - k - 1).into_complex_field()
        })
        .collect())
}

/// Irreducible representation of size `2^{floor(r/2)}`. For odd `r` the last
/// generator is the chirality word `Z^{(x)(r-1)/2}`.
pub fn clifford_irreducible(r: usize) -> Result<Vec<DenseMatrix>> {
    require_r(r)?;
    if r % 2 == 0 {
        return clifford_phi(r);
    }
    let mut gens = if r == 1 { Vec::new() } else { clifford_phi(r - 1)? };
    let z = pauli_z();
    let chirality = kron_all(std::iter::repeat_n(&z, (r - 1) / 2));
    gens.push(chirality.into_complex_field());
    Ok(gens)
}
