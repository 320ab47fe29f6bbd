//! Small dense semidefinite programs over one PSD block.
//!
//! [`solve`] handles `min <Obj, X>` subject to affine constraints with
//! relations `=`, `<=`, `>=`. Inequalities get a nonnegative slack each, which
//! the interior-point backend treats as extra 1x1 PSD blocks.

pub(crate) mod ipm;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use ipm::{BlockProblem, Coef, Row, Settings, Solver, Termination};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coef: DenseMatrix,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_size: usize,
    /// Minimized as `<objective, X>`.
    pub objective: DenseMatrix,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    /// The objective is unbounded below (dual infeasible).
    Unbounded,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: DenseMatrix,
    pub objective_value: f64,
    pub dual_objective: f64,
    /// Largest constraint violation scaled by `max(1, |b_i|)`.
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub relative_gap: f64,
    /// Dual slack `S = Obj - sum_k y_k A_k` on the main block.
    pub dual_slack: DenseMatrix,
    /// Dual multipliers, one per constraint.
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    pub status: SdpStatus,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

impl SdpProblem {
    pub fn new(objective: DenseMatrix) -> Self {
        Self {
            block_size: objective.rows(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coef: DenseMatrix, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coef, relation, rhs });
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.block_size;
        let check = |m: &DenseMatrix, what: &str| -> Result<()> {
            if m.dims() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "{what} is {}x{}, block is {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            let dev = m.hermitian_deviation()?;
            if dev > 1e-12 * m.max_abs().max(1.0) || m.max_imag() != 0.0 {
                return Err(Error::NonHermitian { deviation: dev });
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, c) in self.constraints.iter().enumerate() {
            check(&c.coef, &format!("constraint {i}"))?;
        }
        Ok(())
    }
}

/// Converts a real symmetric matrix to the solver's coefficient form, using
/// the sparse layout when at most a quarter of the entries are nonzero.
pub(crate) fn to_coef(m: &DenseMatrix) -> Option<Coef> {
    let n = m.rows();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * (m.re(i, j) + m.re(j, i));
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    if entries.is_empty() {
        None
    } else if 4 * entries.len() <= n * n {
        Some(Coef::Sparse(entries))
    } else {
        let mut dense = vec![0.0; n * n];
        for (i, j, v) in entries {
            dense[i * n + j] = v;
            dense[j * n + i] = v;
        }
        Some(Coef::Dense(dense))
    }
}

pub fn solve(problem: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    problem.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = problem.block_size;
    let mut bp = BlockProblem::new(vec![n]);
    bp.objective[0] = to_coef(&problem.objective);
    for c in &problem.constraints {
        let mut terms = Vec::with_capacity(2);
        if let Some(coef) = to_coef(&c.coef) {
            terms.push((0, coef));
        }
        match c.relation {
            Relation::Eq => {}
            Relation::Le => {
                let b = bp.add_block(1);
                terms.push((b, Coef::Dense(vec![1.0])));
            }
            Relation::Ge => {
                let b = bp.add_block(1);
                terms.push((b, Coef::Dense(vec![-1.0])));
            }
        }
        bp.rows.push(Row { terms, rhs: c.rhs });
    }
    let out = Solver::new(&bp).solve(Settings { tol, max_iter });
    Ok(SdpSolution {
        x: DenseMatrix::from_real(n, n, &out.x[0]),
        objective_value: out.primal_objective,
        dual_objective: out.dual_objective,
        primal_residual: out.primal_residual,
        dual_residual: out.dual_residual,
        relative_gap: out.relative_gap,
        dual_slack: DenseMatrix::from_real(n, n, &out.s[0]),
        multipliers: out.y,
        iterations: out.iterations,
        status: match out.status {
            Termination::Optimal => SdpStatus::Optimal,
            Termination::Infeasible => SdpStatus::Infeasible,
            Termination::Unbounded => SdpStatus::Unbounded,
            Termination::MaxIterations => SdpStatus::MaxIterations,
        },
    })
}

fn unit_entry(n: usize, i: usize, j: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    if i == j {
        m.set_re(i, i, 1.0);
    } else {
        m.set_re(i, j, 0.5);
        m.set_re(j, i, 0.5);
    }
    m
}

/// `min { <omega, E> : E PSD, E_ii = 1 }`, i.e. linear minimization over the
/// elliptope.
pub fn solve_elliptope_min(omega: &DenseMatrix, tol: f64) -> Result<SdpSolution> {
    omega.require_square()?;
    let n = omega.rows();
    let mut p = SdpProblem::new(omega.real_part());
    for i in 0..n {
        p.push(unit_entry(n, i, i), Relation::Eq, 1.0);
    }
    solve(&p, tol, DEFAULT_MAX_ITER)
}

/// Looks for `E` in the elliptope of size `m + n` whose off-diagonal
/// `m x n` block equals `c`.
pub fn find_extension(c: &DenseMatrix, tol: f64) -> Result<SdpSolution> {
    let (m, n) = c.dims();
    let size = m + n;
    let mut p = SdpProblem::new(DenseMatrix::zeros(size, size));
    for i in 0..size {
        p.push(unit_entry(size, i, i), Relation::Eq, 1.0);
    }
    for s in 0..m {
        for t in 0..n {
            p.push(unit_entry(size, s, m + t), Relation::Eq, c.re(s, t));
        }
    }
    solve(&p, tol, DEFAULT_MAX_ITER)
}
