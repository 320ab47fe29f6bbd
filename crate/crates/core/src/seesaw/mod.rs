//! Seesaw search for Gram representations by PSD `d x d` factors.
//!
//! Each iteration fixes the current factors `X_i`, solves
//! `min { delta : Y_j PSD, |<X_i, Y_j> - M_ij| <= delta }` and moves to the
//! best point of the segment `(1 - r) X + r Y`, `r in [0, 1]`. Complex
//! factors are handled through the real embedding of size `2d`: the SDP is
//! solved over real symmetric `2d x 2d` blocks and the solution is projected
//! back onto the embedded subspace, which preserves both the inner products
//! with embedded `X_i` and positivity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{embed_unchecked, gram, real_to_complex_unembed, DenseMatrix, Field};
use crate::sdp::ipm::{BlockProblem, Coef, Row, Settings, Solver, Termination};
use crate::types::PsdFactorization;

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawConfig {
    pub d: usize,
    pub field: Field,
    pub restarts: usize,
    pub max_iter: usize,
    pub target_error: f64,
    pub seed: u64,
    pub line_search_grid: usize,
    /// Finest accuracy requested from the inner SDP solves.
    pub sdp_tol: f64,
}

impl SeesawConfig {
    pub fn new(d: usize, field: Field) -> Self {
        Self {
            d,
            field,
            restarts: 20,
            max_iter: 500,
            target_error: 1e-8,
            seed: 0,
            line_search_grid: 33,
            sdp_tol: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidArgument("factor size d must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("at least one restart is required".into()));
        }
        if self.line_search_grid < 2 {
            return Err(Error::InvalidArgument("line search grid needs at least 2 points".into()));
        }
        if !(self.target_error >= 0.0) || !(self.sdp_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeesawStatus {
    Converged,
    NotConverged,
}

/// Summary of one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct SeesawRun {
    pub seed: u64,
    pub final_error: f64,
    pub error_trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub best: PsdFactorization,
    pub final_error: f64,
    /// `E` after initialization and after every iteration of the best restart.
    pub error_trace: Vec<f64>,
    pub status: SeesawStatus,
    pub best_restart: usize,
    pub runs: Vec<SeesawRun>,
}

/// `max_{i,j} |<X_i, X_j> - M_ij|`.
pub fn error_e(factors: &[DenseMatrix], m: &DenseMatrix) -> Result<f64> {
    m.require_square()?;
    if factors.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} factors for a {}x{} matrix",
            factors.len(),
            m.rows(),
            m.cols()
        )));
    }
    let g = gram(factors)?;
    let mut worst: f64 = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.rows() {
            worst = worst.max((g.matrix.re(i, j) - m.re(i, j)).abs());
        }
    }
    Ok(worst)
}

fn require_positive_diagonal(m: &DenseMatrix) -> Result<()> {
    m.require_square()?;
    for i in 0..m.rows() {
        let v = m.re(i, i);
        if !(v > 0.0) {
            return Err(Error::NonPositiveDiagonal { index: i, value: v });
        }
    }
    Ok(())
}

/// Factors `X_i = G_i G_i^*` with standard normal `G_i` (complex normal for
/// `Field::Complex`), rescaled to `||X_i||_F^2 = M_ii`.
pub fn random_init<R: Rng>(
    m: &DenseMatrix,
    d: usize,
    field: Field,
    rng: &mut R,
) -> Result<Vec<DenseMatrix>> {
    require_positive_diagonal(m)?;
    let mut out = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let g = match field {
            Field::Real => {
                let v: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
                DenseMatrix::from_real(d, d, &v)
            }
            Field::Complex => {
                let v: Vec<Complex64> = (0..d * d)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                DenseMatrix::from_complex(d, d, v).into_complex_field()
            }
        };
        let x = (&g * &g.adjoint()).hermitian_part()?;
        let x = if field == Field::Real { x.real_part() } else { x.into_complex_field() };
        let norm = x.frobenius_norm();
        out.push(x.scale(m.re(i, i).sqrt() / norm));
    }
    Ok(out)
}

/// Real symmetric factors as flat row-major arrays.
#[derive(Clone)]
struct Flat {
    dim: usize,
    mats: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Flat {
    fn from_dense(factors: &[DenseMatrix]) -> Result<Self> {
        let complex = factors.iter().any(|f| f.field() == Field::Complex);
        let mut mats = Vec::with_capacity(factors.len());
        let mut dim = 0;
        for f in factors {
            f.require_square()?;
            let x = if complex { embed_unchecked(f) } else { f.real_part() };
            dim = x.rows();
            mats.push(x.real_parts());
        }
        Ok(Self { dim, mats })
    }

    fn to_dense(&self, field: Field) -> Result<Vec<DenseMatrix>> {
        self.mats
            .iter()
            .map(|v| {
                let x = DenseMatrix::from_real(self.dim, self.dim, v);
                match field {
                    Field::Real => Ok(x),
                    Field::Complex => real_to_complex_unembed(&x),
                }
            })
            .collect()
    }

    fn cross(&self, other: &Flat) -> Vec<f64> {
        let n = self.mats.len();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = dot(&self.mats[i], &other.mats[j]);
            }
        }
        g
    }

    fn error(&self, m: &[f64]) -> f64 {
        max_dev(&self.cross(self), m)
    }

    fn combine(&self, other: &Flat, r: f64) -> Flat {
        Flat {
            dim: self.dim,
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(x, y)| x.iter().zip(y).map(|(a, b)| (1.0 - r) * a + r * b).collect())
                .collect(),
        }
    }
}

fn max_dev(g: &[f64], m: &[f64]) -> f64 {
    g.iter().zip(m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Orthogonal projection `(Y + J Y J^T) / 2` onto embedded Hermitian matrices,
/// `J = [[0, -I], [I, 0]]`.
fn project_embedded(y: &mut [f64], dim: usize) {
    let d = dim / 2;
    let src = y.to_vec();
    let at = |i: usize, j: usize| src[i * dim + j];
    for i in 0..d {
        for j in 0..d {
            let a = 0.5 * (at(i, j) + at(i + d, j + d));
            let b = 0.5 * (at(i, j + d) - at(j, i + d));
            y[i * dim + j] = a;
            y[(i + d) * dim + j + d] = a;
            y[i * dim + j + d] = b;
            y[(j + d) * dim + i] = b;
        }
    }
}

/// Solves the step-(1) SDP for fixed real factors. Returns the `Y_j` and the
/// achieved `max |<X_i, Y_j> - M_ij|`.
fn step_flat(x: &Flat, m: &[f64], tol: f64, embedded: bool) -> Result<(Flat, f64)> {
    let n = x.mats.len();
    let dim = x.dim;
    let mut bp = BlockProblem::new(vec![dim; n]);
    let delta = bp.add_block(1);
    bp.objective[delta] = Some(Coef::Dense(vec![1.0]));
    for i in 0..n {
        for j in 0..n {
            for sign in [-1.0, 1.0] {
                let slack = bp.add_block(1);
                bp.rows.push(Row {
                    terms: vec![
                        (j, Coef::Dense(x.mats[i].clone())),
                        (delta, Coef::Dense(vec![sign])),
                        (slack, Coef::Dense(vec![-sign])),
                    ],
                    rhs: m[i * n + j],
                });
            }
        }
    }
    let out = Solver::new(&bp).solve(Settings { tol, max_iter: 100 });
    match out.status {
        Termination::Optimal | Termination::MaxIterations => {}
        other => {
            return Err(Error::SolverFailure(format!("seesaw step SDP ended as {other:?}")));
        }
    }
    let mut mats: Vec<Vec<f64>> = out.x.into_iter().take(n).collect();
    if embedded {
        for y in &mut mats {
            project_embedded(y, dim);
        }
    }
    let y = Flat { dim, mats };
    let achieved = max_dev(&x.cross(&y), m);
    Ok((y, achieved))
}

fn flat_target(m: &DenseMatrix) -> Vec<f64> {
    m.real_parts()
}

/// Step (1): for fixed PSD factors `X_i`, finds PSD `Y_j` minimizing
/// `max |<X_i, Y_j> - M_ij|`. Returns the `Y_j` (same field as the input) and
/// that maximum.
pub fn seesaw_step(
    current: &[DenseMatrix],
    m: &DenseMatrix,
    tol: f64,
) -> Result<(Vec<DenseMatrix>, f64)> {
    m.require_square()?;
    if current.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} factors for a {}x{} matrix",
            current.len(),
            m.rows(),
            m.cols()
        )));
    }
    let field = current
        .iter()
        .fold(Field::Real, |f, x| f.join(x.field()));
    let x = Flat::from_dense(current)?;
    let (y, delta) = step_flat(&x, &flat_target(m), tol, field == Field::Complex)?;
    Ok((y.to_dense(field)?, delta))
}

/// Gram data of the segment `Z(r) = (1 - r) X + r Y`.
struct Segment<'a> {
    xx: Vec<f64>,
    xy: Vec<f64>,
    yy: Vec<f64>,
    m: &'a [f64],
    n: usize,
}

impl Segment<'_> {
    fn error(&self, r: f64) -> f64 {
        let (a, b, c) = ((1.0 - r) * (1.0 - r), r * (1.0 - r), r * r);
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g = a * self.xx[i * n + j]
                    + b * (self.xy[i * n + j] + self.xy[j * n + i])
                    + c * self.yy[i * n + j];
                worst = worst.max((g - self.m[i * n + j]).abs());
            }
        }
        worst
    }

    /// Uniform grid on `[0, 1]` followed by golden-section refinement around
    /// the best grid point down to width `1e-6`.
    fn search(&self, grid: usize) -> (f64, f64) {
        let h = 1.0 / (grid - 1) as f64;
        let mut best = (0.0, self.error(0.0));
        for k in 1..grid {
            let r = k as f64 * h;
            let e = self.error(r);
            if e < best.1 {
                best = (r, e);
            }
        }
        let (mut lo, mut hi) = ((best.0 - h).max(0.0), (best.0 + h).min(1.0));
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = hi - phi * (hi - lo);
        let mut d = lo + phi * (hi - lo);
        let (mut fc, mut fd) = (self.error(c), self.error(d));
        while hi - lo > 1e-6 {
            if fc <= fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - phi * (hi - lo);
                fc = self.error(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + phi * (hi - lo);
                fd = self.error(d);
            }
        }
        for (r, e) in [(c, fc), (d, fd)] {
            if e < best.1 {
                best = (r, e);
            }
        }
        best
    }
}

fn segment<'a>(x: &Flat, y: &Flat, m: &'a [f64]) -> Segment<'a> {
    Segment {
        xx: x.cross(x),
        xy: x.cross(y),
        yy: y.cross(y),
        m,
        n: x.mats.len(),
    }
}

/// Step (2): `r` in `[0, 1]` minimizing `E((1 - r) X + r Y)` and the error
/// there. `r = 0` is always a candidate, so the error never exceeds `E(X)`.
pub fn line_search(
    x_prev: &[DenseMatrix],
    y: &[DenseMatrix],
    m: &DenseMatrix,
    grid: usize,
) -> Result<(f64, f64)> {
    if x_prev.len() != y.len() || x_prev.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} and {} factors for a {}x{} matrix",
            x_prev.len(),
            y.len(),
            m.rows(),
            m.cols()
        )));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument("line search grid needs at least 2 points".into()));
    }
    let x = Flat::from_dense(x_prev)?;
    let yf = Flat::from_dense(y)?;
    if x.dim != yf.dim {
        return Err(Error::DimensionMismatch("factor sizes differ".into()));
    }
    let target = flat_target(m);
    let (r, _) = segment(&x, &yf, &target).search(grid);
    let e0 = x.error(&target);
    if r > 0.0 {
        let e = x.combine(&yf, r).error(&target);
        if e < e0 {
            return Ok((r, e));
        }
    }
    Ok((0.0, e0))
}

const STAGNATION_WINDOW: usize = 25;
const STAGNATION_RATIO: f64 = 1e-12;

fn single_run(
    m: &[f64],
    start: Flat,
    config: &SeesawConfig,
    embedded: bool,
) -> Result<(Flat, Vec<f64>)> {
    let mut x = start;
    let mut err = x.error(m);
    let mut trace = vec![err];
    for _ in 0..config.max_iter {
        if err <= config.target_error {
            break;
        }
        let tol = (1e-3 * err).clamp(config.sdp_tol, 1e-6);
        let (y, _) = step_flat(&x, m, tol, embedded)?;
        let (r, _) = segment(&x, &y, m).search(config.line_search_grid);
        if r > 0.0 {
            let cand = x.combine(&y, r);
            let e = cand.error(m);
            if e < err {
                x = cand;
                err = e;
            }
        }
        trace.push(err);
        let k = trace.len();
        if k > STAGNATION_WINDOW {
            let old = trace[k - 1 - STAGNATION_WINDOW];
            if old - err <= STAGNATION_RATIO * old {
                break;
            }
        }
    }
    Ok((x, trace))
}

/// Runs `config.restarts` independent seesaw searches (restart `i` seeded
/// with `seed + i`) and returns the best one, re-verified from scratch.
pub fn run_seesaw(m: &DenseMatrix, config: &SeesawConfig) -> Result<SeesawResult> {
    config.validate()?;
    require_positive_diagonal(m)?;
    let dev = m.hermitian_deviation()?;
    if dev > 1e-12 * m.max_abs().max(1.0) || m.max_imag() != 0.0 {
        return Err(Error::NonHermitian { deviation: dev });
    }
    let target = flat_target(m);
    let embedded = config.field == Field::Complex;
    let mut runs = Vec::with_capacity(config.restarts);
    let mut best: Option<(usize, f64, Flat)> = None;
    for i in 0..config.restarts {
        let seed = config.seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init = random_init(m, config.d, config.field, &mut rng)?;
        let (x, trace) = single_run(&target, Flat::from_dense(&init)?, config, embedded)?;
        let final_error = *trace.last().expect("trace starts with the initial error");
        let better = best.as_ref().is_none_or(|(_, e, _)| final_error < *e);
        runs.push(SeesawRun {
            seed,
            final_error,
            error_trace: trace,
        });
        if better {
            best = Some((i, final_error, x));
        }
        if final_error <= config.target_error {
            break;
        }
    }
    let (best_restart, _, x) = best.expect("at least one restart");
    let factors = x.to_dense(config.field)?;
    let final_error = error_e(&factors, m)?;
    let status = if final_error <= config.target_error {
        SeesawStatus::Converged
    } else {
        SeesawStatus::NotConverged
    };
    Ok(SeesawResult {
        best: PsdFactorization {
            field: config.field,
            d: config.d,
            factors,
            target: m.clone(),
        },
        final_error,
        error_trace: runs[best_restart].error_trace.clone(),
        status,
        best_restart,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_to_real_embed, is_psd, Tolerances};

    #[test]
    fn error_e_hand_example() {
        let m = DenseMatrix::from_fn(2, 2, |_, _| 1.0);
        let f = vec![DenseMatrix::identity(1), DenseMatrix::from_real(1, 1, &[0.5])];
        assert!((error_e(&f, &m).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn init_normalization_and_determinism() {
        let m = DenseMatrix::diag(&[1.0, 2.0, 0.5]);
        for field in [Field::Real, Field::Complex] {
            let a = random_init(&m, 3, field, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
            let b = random_init(&m, 3, field, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
            assert_eq!(a, b);
            for (i, x) in a.iter().enumerate() {
                assert!((x.frobenius_norm().powi(2) - m.re(i, i)).abs() < 1e-12);
                assert!(is_psd(x, &Tolerances::default()).unwrap());
            }
        }
        let one = random_init(&m, 1, Field::Real, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!((one[1].re(0, 0) - 2f64.sqrt()).abs() < 1e-15);
        let bad = DenseMatrix::diag(&[1.0, 0.0]);
        assert!(matches!(
            random_init(&bad, 2, Field::Real, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(Error::NonPositiveDiagonal { index: 1, .. })
        ));
    }

    #[test]
    fn embedded_projection_is_identity_on_embedded() {
        let x = DenseMatrix::from_complex(
            2,
            2,
            vec![2.0.into(), Complex64::new(0.5, -1.0), Complex64::new(0.5, 1.0), 3.0.into()],
        );
        let e = complex_to_real_embed(&x, &Tolerances::default()).unwrap();
        let mut v = e.real_parts();
        project_embedded(&mut v, 4);
        assert_eq!(v, e.real_parts());
    }

    #[test]
    fn step_on_trivial_problem() {
        let m = DenseMatrix::identity(1);
        let (y, delta) = seesaw_step(&[DenseMatrix::identity(1)], &m, 1e-10).unwrap();
        assert!(delta < 1e-8);
        assert!((y[0].re(0, 0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn line_search_keeps_exact_point() {
        let m = DenseMatrix::identity(2);
        let x = vec![DenseMatrix::diag(&[1.0, 0.0]), DenseMatrix::diag(&[0.0, 1.0])];
        let (_, e) = line_search(&x, &x, &m, 33).unwrap();
        assert_eq!(e, 0.0);
        let y = vec![DenseMatrix::identity(2), DenseMatrix::identity(2)];
        let (r, e) = line_search(&x, &y, &m, 33).unwrap();
        assert_eq!((r, e), (0.0, 0.0));
    }
}
