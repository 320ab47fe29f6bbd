//! Certificate checks: Gram representations, PSD families, extremality
//! certificates, Clifford relations, quantum-correlation sums and bounds.
//!
//! Each check returns a [`CheckReport`] listing named residuals against their
//! thresholds. A passing extension certificate means the certificate was
//! verified; extremality of the correlation is the mathematical consequence.

mod tsirelson;

pub use tsirelson::{tsirelson_weights, TsirelsonWeights};

use std::fmt;

use crate::constructions::binomial;
use crate::error::{Error, Result};
use crate::linalg::{
    gram, gram_vectors, herm_eig_unchecked, numerical_rank, range_basis, sym_span_dim,
    DenseMatrix, Tolerances,
};
use crate::types::{ExtremalCertificate, PsdFactorization, QuantumCorrelation};

pub const DEFAULT_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
}

impl CheckItem {
    pub fn passed(&self) -> bool {
        self.residual <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    pub max_violation: f64,
    pub detail: Vec<CheckItem>,
}

impl CheckReport {
    fn from_items(detail: Vec<CheckItem>) -> Self {
        let passed = detail.iter().all(CheckItem::passed);
        let max_violation = detail.iter().map(|c| c.residual).fold(0.0, f64::max);
        Self {
            passed,
            max_violation,
            detail,
        }
    }

    pub fn item(&self, name: &str) -> Option<&CheckItem> {
        self.detail.iter().find(|c| c.name == name)
    }

    /// First failing check, if any.
    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.detail.iter().find(|c| !c.passed())
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} (max violation {:.3e})",
            if self.passed { "PASSED" } else { "FAILED" },
            self.max_violation
        )?;
        for c in &self.detail {
            writeln!(
                f,
                "  [{}] {}: residual {:.3e}, threshold {:.3e}",
                if c.passed() { "ok" } else { "FAIL" },
                c.name,
                c.residual,
                c.threshold
            )?;
        }
        Ok(())
    }
}

fn item(name: &str, residual: f64, threshold: f64) -> CheckItem {
    CheckItem {
        name: name.to_string(),
        residual,
        threshold,
    }
}

fn tolerances(tol: f64) -> Result<Tolerances> {
    Tolerances::new(tol, tol, Tolerances::default().rank_tol)
}

/// Negative part of the smallest eigenvalue, relative to `max(1, ||A||_inf)`.
fn psd_violation(a: &DenseMatrix) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    let lmin = herm_eig_unchecked(a).min();
    (-lmin).max(0.0) / a.inf_norm().max(1.0)
}

/// Compares `Re <F_i, F_j>` against `M_ij` and reports the imaginary residue.
pub fn check_gram(m: &DenseMatrix, f: &PsdFactorization, tol: f64) -> Result<CheckReport> {
    m.require_square()?;
    if f.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} factors for a {}x{} matrix",
            f.len(),
            m.rows(),
            m.cols()
        )));
    }
    let g = gram(&f.factors)?;
    Ok(CheckReport::from_items(vec![
        item("gram", g.matrix.max_abs_diff(&m.real_part())?, tol),
        item("imaginary residue", g.max_imag.max(m.max_imag()), tol),
    ]))
}

/// Every factor must be square, Hermitian and PSD.
pub fn check_psd_family(f: &PsdFactorization, tol: f64) -> Result<CheckReport> {
    let mut herm: f64 = 0.0;
    let mut neg: f64 = 0.0;
    let mut shape = 0.0;
    for x in &f.factors {
        if !x.is_square() || x.rows() != f.d {
            shape = 1.0;
            continue;
        }
        herm = herm.max(x.hermitian_deviation()? / x.max_abs().max(1.0));
        neg = neg.max(psd_violation(x));
    }
    Ok(CheckReport::from_items(vec![
        item("square of declared size", shape, 0.0),
        item("hermitian", herm, tol),
        item("psd", neg, tol),
    ]))
}

/// Checks the conditions making `(E, Omega)` a certificate that `E` is the
/// unique extension of `C` and that `C` is extreme.
pub fn check_extension_certificate(cert: &ExtremalCertificate, tol: f64) -> Result<CheckReport> {
    let (m, n) = cert.c.dims();
    let size = m + n;
    for (what, x) in [("E", &cert.e), ("Omega", &cert.omega)] {
        if x.dims() != (size, size) {
            return Err(Error::DimensionMismatch(format!(
                "{what} is {}x{}, expected {size}x{size} for a {m}x{n} correlation",
                x.rows(),
                x.cols()
            )));
        }
    }
    let t = tolerances(tol)?;
    let (e, omega) = (cert.e.real_part(), cert.omega.real_part());

    let diag = (0..size).map(|i| (e.re(i, i) - 1.0).abs()).fold(0.0, f64::max);
    let sym = e.hermitian_deviation()?.max(omega.hermitian_deviation()?);
    let omega_scale = omega.max_abs().max(1.0);
    let mut support: f64 = 0.0;
    for i in 0..size {
        for j in 0..size {
            if i != j && ((i < m) == (j < m)) {
                support = support.max(omega.re(i, j).abs());
            }
        }
    }
    let proj = e.block(0, m, m, n).max_abs_diff(&cert.c.real_part())?;
    let oe = (&omega * &e).frobenius_norm();

    let rank_e = numerical_rank(&e, &t);
    let rank_c = numerical_rank(&cert.c, &t);
    let rank_o = numerical_rank(&omega, &t);
    let span = sym_span_dim(&gram_vectors(&e, rank_e)?, &t)?;
    let rank_gap = |a: usize, b: usize| (a as f64 - b as f64).abs();

    Ok(CheckReport::from_items(vec![
        item("diag(E) = 1", diag, tol),
        item("symmetric", sym, tol * omega_scale),
        item("E psd", psd_violation(&e), tol),
        item("Omega psd", psd_violation(&omega), tol),
        item("Omega bipartite support", support, tol * omega_scale),
        item("pi(E) = C", proj, tol),
        item("Omega E = 0", oe, tol * omega.frobenius_norm().max(1.0)),
        item("rank(E) = rank(C)", rank_gap(rank_e, rank_c), 0.0),
        item("rank(E) + rank(Omega) = m + n", rank_gap(rank_e + rank_o, size), 0.0),
        item("Li-Tam span", rank_gap(span, binomial(rank_e + 1, 2)), 0.0),
    ]))
}

fn require_correlation_matrix(e: &DenseMatrix, tol: f64) -> Result<()> {
    e.require_square()?;
    if e.max_imag() > tol || e.hermitian_deviation()? > tol {
        return Err(Error::NotCorrelationMatrix("not real symmetric".into()));
    }
    if let Some(i) = (0..e.rows()).find(|&i| (e.re(i, i) - 1.0).abs() > tol) {
        return Err(Error::NotCorrelationMatrix(format!(
            "diagonal entry {i} is {}",
            e.re(i, i)
        )));
    }
    let neg = psd_violation(e);
    if neg > tol {
        return Err(Error::NotCorrelationMatrix(format!(
            "negative eigenvalue of size {neg:.3e}"
        )));
    }
    Ok(())
}

/// Li-Tam test: `E = Gram(z_i)` of rank `r` is extreme in the elliptope iff
/// the `z_i z_i^T` span a space of dimension `C(r+1, 2)`.
pub fn check_elliptope_extreme(e: &DenseMatrix, tol: f64) -> Result<CheckReport> {
    require_correlation_matrix(e, tol)?;
    let t = tolerances(tol)?;
    let r = numerical_rank(e, &t);
    let span = sym_span_dim(&gram_vectors(e, r)?, &t)?;
    Ok(CheckReport::from_items(vec![item(
        "Li-Tam span",
        (binomial(r + 1, 2) as f64 - span as f64).abs(),
        0.0,
    )]))
}

/// `A_i^2 = I` and `A_i A_j + A_j A_i = 0` for `i != j`.
pub fn check_clifford_relations(mats: &[DenseMatrix], tol: f64) -> Result<CheckReport> {
    let Some(first) = mats.first() else {
        return Ok(CheckReport::from_items(Vec::new()));
    };
    first.require_square()?;
    for x in &mats[1..] {
        first.require_same_dims(x)?;
    }
    let n = first.rows();
    let id = DenseMatrix::identity(n);
    let mut herm: f64 = 0.0;
    let mut square: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for (i, a) in mats.iter().enumerate() {
        herm = herm.max(a.hermitian_deviation()?);
        square = square.max((a * a).max_abs_diff(&id)?);
        for b in &mats[i + 1..] {
            anti = anti.max((&(a * b) + &(b * a)).max_abs());
        }
    }
    Ok(CheckReport::from_items(vec![
        item("hermitian", herm, tol),
        item("A_i^2 = I", square, tol),
        item("A_i A_j + A_j A_i = 0", anti, tol),
    ]))
}

/// Outcome and setting counts `(|A|, |B|, |S|, |T|)`.
pub type Sizes = (usize, usize, usize, usize);

/// Row of `(a, s)` on Alice's side.
pub fn alice_index(sizes: Sizes, a: usize, s: usize) -> usize {
    s * sizes.0 + a
}

/// Row of `(b, t)` on Bob's side.
pub fn bob_index(sizes: Sizes, b: usize, t: usize) -> usize {
    sizes.0 * sizes.2 + t * sizes.1 + b
}

/// Checks that `M` is symmetric PSD, that the three families of block sums
/// equal one and that the cross block holds probabilities.
pub fn check_quantum_consistency(m: &DenseMatrix, sizes: Sizes, tol: f64) -> Result<CheckReport> {
    let (na, nb, ns, nt) = sizes;
    let size = na * ns + nb * nt;
    if m.dims() != (size, size) {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, sizes {sizes:?} require {size}x{size}",
            m.rows(),
            m.cols()
        )));
    }
    let sym = m.hermitian_deviation()?.max(m.max_imag());
    let mut cross: f64 = 0.0;
    let mut range: f64 = 0.0;
    for s in 0..ns {
        for t in 0..nt {
            let mut total = 0.0;
            for a in 0..na {
                for b in 0..nb {
                    let v = m.re(alice_index(sizes, a, s), bob_index(sizes, b, t));
                    total += v;
                    range = range.max((-v).max(v - 1.0)).max(0.0);
                }
            }
            cross = cross.max((total - 1.0).abs());
        }
    }
    let mut alice: f64 = 0.0;
    for s in 0..ns {
        for s2 in 0..ns {
            let total: f64 = (0..na)
                .flat_map(|a| (0..na).map(move |a2| (a, a2)))
                .map(|(a, a2)| m.re(alice_index(sizes, a, s), alice_index(sizes, a2, s2)))
                .sum();
            alice = alice.max((total - 1.0).abs());
        }
    }
    let mut bob: f64 = 0.0;
    for t in 0..nt {
        for t2 in 0..nt {
            let total: f64 = (0..nb)
                .flat_map(|b| (0..nb).map(move |b2| (b, b2)))
                .map(|(b, b2)| m.re(bob_index(sizes, b, t), bob_index(sizes, b2, t2)))
                .sum();
            bob = bob.max((total - 1.0).abs());
        }
    }
    Ok(CheckReport::from_items(vec![
        item("symmetric", sym, tol),
        item("psd", psd_violation(m), tol),
        item("sum over (a, b) of M[(a,s),(b,t)] = 1", cross, tol),
        item("sum over (a, a') of M[(a,s),(a',s')] = 1", alice, tol),
        item("sum over (b, b') of M[(b,t),(b',t')] = 1", bob, tol),
        item("cross entries in [0, 1]", range, tol),
    ]))
}

/// `C_st = p(0,0) + p(1,1) - p(0,1) - p(1,0)`.
pub fn recover_bipartite_from_p(p: &QuantumCorrelation) -> Result<DenseMatrix> {
    if p.outcomes_a != 2 || p.outcomes_b != 2 {
        return Err(Error::WrongOutcomeCount {
            a: p.outcomes_a,
            b: p.outcomes_b,
        });
    }
    Ok(DenseMatrix::from_fn(p.settings_s, p.settings_t, |s, t| {
        p.get(0, 0, s, t) + p.get(1, 1, s, t) - p.get(0, 1, s, t) - p.get(1, 0, s, t)
    }))
}

/// Replaces every factor `X_i` by `U^* X_i U`, with `U` an orthonormal basis
/// of the range of `sum_i X_i`. The Gram matrix is unchanged.
pub fn compress_factorization(f: &PsdFactorization, tol: f64) -> Result<PsdFactorization> {
    let Some(first) = f.factors.first() else {
        return Ok(f.clone());
    };
    let mut sum = DenseMatrix::zeros(first.rows(), first.cols());
    for x in &f.factors {
        sum = sum.try_add(x)?;
    }
    let t = Tolerances::default().with_eq_tol(tol.max(Tolerances::default().eq_tol));
    let u = range_basis(&sum.hermitian_part()?, &t)?;
    let ua = u.adjoint();
    let factors: Vec<DenseMatrix> = f
        .factors
        .iter()
        .map(|x| {
            let y = (&(&ua * x) * &u).hermitian_part().expect("square");
            if f.field == crate::linalg::Field::Real {
                y.real_part()
            } else {
                y.into_complex_field()
            }
        })
        .collect();
    Ok(PsdFactorization {
        field: f.field,
        d: u.cols(),
        factors,
        target: f.target.clone(),
    })
}

/// `(real, complex)` lower bounds on the cpsd ranks from `rank(M)`:
/// the least `r` with `C(r+1, 2) >= rank` and `ceil(sqrt(rank))`.
pub fn cpsd_lower_bounds(m: &DenseMatrix, tol: f64) -> Result<(usize, usize)> {
    m.require_square()?;
    let rank = numerical_rank(m, &tolerances(tol.max(f64::EPSILON))?);
    Ok(bounds_from_rank(rank))
}

pub fn bounds_from_rank(rank: usize) -> (usize, usize) {
    let real = (0..).find(|&r| binomial(r + 1, 2) >= rank).unwrap_or(0);
    let complex = (0..).find(|&c: &usize| c * c >= rank).unwrap_or(0);
    (real, complex)
}

/// Tsirelson bound `C(rank(C)+1, 2) <= m + n - 1`, a necessary condition for
/// extremality. The slack is `m + n - 1 - C(rank+1, 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TsirelsonBound {
    pub rank: usize,
    pub slack: i64,
    pub report: CheckReport,
}

pub fn check_tsirelson_bound(c: &DenseMatrix, tol: f64) -> Result<TsirelsonBound> {
    let (m, n) = c.dims();
    let rank = numerical_rank(c, &tolerances(tol)?);
    let slack = (m + n) as i64 - 1 - binomial(rank + 1, 2) as i64;
    let entries = c.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let report = CheckReport::from_items(vec![
        item("|C_st| <= 1", (entries - 1.0).max(0.0), tol),
        item("C(rank+1, 2) <= m + n - 1", (-slack).max(0) as f64, 0.0),
    ]);
    Ok(TsirelsonBound {
        rank,
        slack,
        report,
    })
}
