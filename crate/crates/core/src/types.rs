//! Domain objects shared by the construction, verification and search code.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{gram, DenseMatrix, Field};

/// Unit vectors `x_1..x_m`, `y_1..y_n` in `R^r` realizing the bipartite
/// correlation `C_st = <x_s, y_t>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CSystem {
    pub r: usize,
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl CSystem {
    pub fn new(r: usize, xs: Vec<Vec<f64>>, ys: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(v) = xs.iter().chain(&ys).find(|v| v.len() != r) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a C-system of dimension {r}",
                v.len()
            )));
        }
        Ok(Self { r, xs, ys })
    }

    pub fn m(&self) -> usize {
        self.xs.len()
    }

    pub fn n(&self) -> usize {
        self.ys.len()
    }

    /// `m x n` matrix of inner products.
    pub fn correlation(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.m(), self.n(), |s, t| dot(&self.xs[s], &self.ys[t]))
    }

    /// Gram matrix of `x_1..x_m, y_1..y_n`; an extension of the correlation.
    pub fn extension(&self) -> DenseMatrix {
        let all: Vec<&Vec<f64>> = self.xs.iter().chain(&self.ys).collect();
        DenseMatrix::from_fn(all.len(), all.len(), |i, j| dot(all[i], all[j]))
    }

    /// Largest deviation of a vector norm from one.
    pub fn max_norm_error(&self) -> f64 {
        self.xs
            .iter()
            .chain(&self.ys)
            .map(|v| (dot(v, v).sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// All vectors as the rows of an `(m + n) x r` matrix.
    pub fn stacked(&self) -> DenseMatrix {
        let rows: Vec<f64> = self.xs.iter().chain(&self.ys).flatten().copied().collect();
        DenseMatrix::from_real(self.m() + self.n(), self.r, &rows)
    }
}

/// Correlation `C`, an extension `E` of it into the elliptope, and a dual
/// matrix `Omega` witnessing that `E` is the unique extension.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalCertificate {
    pub c: DenseMatrix,
    pub e: DenseMatrix,
    pub omega: DenseMatrix,
}

impl ExtremalCertificate {
    pub fn m(&self) -> usize {
        self.c.rows()
    }

    pub fn n(&self) -> usize {
        self.c.cols()
    }
}

/// `C_st = psi^* (X_s (x) Y_t) psi` in local dimension `d`.
#[derive(Debug, Clone)]
pub struct OperatorRepresentation {
    pub d: usize,
    pub xs: Vec<DenseMatrix>,
    pub ys: Vec<DenseMatrix>,
    /// Length `d^2`, index `i * d + j` for `e_i (x) e_j`.
    pub psi: Vec<Complex64>,
}

impl OperatorRepresentation {
    /// The state as a `d x d` matrix `Psi` with `psi = vec(Psi)` row-major.
    pub fn psi_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_complex(self.d, self.d, self.psi.clone())
    }

    /// `psi^* (A (x) B) psi = Tr(Psi^* A Psi B^T)`.
    pub fn expectation(&self, a: &DenseMatrix, b: &DenseMatrix) -> Complex64 {
        let psi = self.psi_matrix();
        let left = &(&psi.adjoint() * a) * &psi;
        (&left * &b.transpose()).trace()
    }

    /// Correlation matrix realized by the representation.
    pub fn correlation(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.xs.len(), self.ys.len(), |s, t| {
            self.expectation(&self.xs[s], &self.ys[t]).re
        })
    }
}

/// Table `p(a, b | s, t)` with binary or general outcome sets.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCorrelation {
    pub outcomes_a: usize,
    pub outcomes_b: usize,
    pub settings_s: usize,
    pub settings_t: usize,
    /// Indexed `((s * T + t) * A + a) * B + b`.
    pub table: Vec<f64>,
}

impl QuantumCorrelation {
    pub fn zeros(a: usize, b: usize, s: usize, t: usize) -> Self {
        Self {
            outcomes_a: a,
            outcomes_b: b,
            settings_s: s,
            settings_t: t,
            table: vec![0.0; a * b * s * t],
        }
    }

    #[inline]
    fn index(&self, a: usize, b: usize, s: usize, t: usize) -> usize {
        ((s * self.settings_t + t) * self.outcomes_a + a) * self.outcomes_b + b
    }

    pub fn get(&self, a: usize, b: usize, s: usize, t: usize) -> f64 {
        self.table[self.index(a, b, s, t)]
    }

    pub fn set(&mut self, a: usize, b: usize, s: usize, t: usize, v: f64) {
        let i = self.index(a, b, s, t);
        self.table[i] = v;
    }

    /// Largest deviation of `sum_{a,b} p(a,b|s,t)` from one.
    pub fn normalization_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..self.settings_s {
            for t in 0..self.settings_t {
                let mut total = 0.0;
                for a in 0..self.outcomes_a {
                    for b in 0..self.outcomes_b {
                        total += self.get(a, b, s, t);
                    }
                }
                worst = worst.max((total - 1.0).abs());
            }
        }
        worst
    }

    /// Largest dependence of a marginal on the other party's setting.
    pub fn signaling(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..self.settings_s {
            for a in 0..self.outcomes_a {
                let marg: Vec<f64> = (0..self.settings_t)
                    .map(|t| (0..self.outcomes_b).map(|b| self.get(a, b, s, t)).sum())
                    .collect();
                for w in marg.windows(2) {
                    worst = worst.max((w[0] - w[1]).abs());
                }
            }
        }
        for t in 0..self.settings_t {
            for b in 0..self.outcomes_b {
                let marg: Vec<f64> = (0..self.settings_s)
                    .map(|s| (0..self.outcomes_a).map(|a| self.get(a, b, s, t)).sum())
                    .collect();
                for w in marg.windows(2) {
                    worst = worst.max((w[0] - w[1]).abs());
                }
            }
        }
        worst
    }
}

/// Gram representation of `target` by PSD `d x d` factors.
#[derive(Debug, Clone)]
pub struct PsdFactorization {
    pub field: Field,
    pub d: usize,
    pub factors: Vec<DenseMatrix>,
    pub target: DenseMatrix,
}

impl PsdFactorization {
    /// Factorization whose target is the Gram matrix of the factors.
    pub fn from_factors(field: Field, factors: Vec<DenseMatrix>) -> Result<Self> {
        let d = factors.first().map_or(0, |f| f.rows());
        let target = gram(&factors)?.matrix;
        Ok(Self {
            field,
            d,
            factors,
            target,
        })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}
