//! Primal-dual path-following interior-point method for block-diagonal SDPs.
//!
//! Standard form over symmetric blocks `X_1, ..., X_p` (a block of size one is
//! a nonnegative scalar):
//!
//! ```text
//! min  sum_b <C_b, X_b>
//! s.t. sum_b <A_kb, X_b> = b_k   for every row k
//!      X_b PSD
//! ```
//!
//! Search directions use Nesterov-Todd scaling. With `W = G G^T` chosen so that
//! `G^-1 X G^-T = G^T S G = V` is diagonal, the complementarity equation is
//! linearized in V-space and solved elementwise, so no inverse of `X` or `S`
//! is ever formed. Each iteration does a predictor (affine) solve and a
//! corrector with Mehrotra's centering heuristic and second-order term.

use crate::linalg::jacobi::hermitian_eig;

/// Symmetric coefficient matrix on one block.
#[derive(Debug, Clone)]
pub enum Coef {
    /// Row-major dense matrix, assumed symmetric.
    Dense(Vec<f64>),
    /// Entries `(i, j, v)` with `i <= j`, standing for `A_ij = A_ji = v`.
    Sparse(Vec<(usize, usize, f64)>),
}

impl Coef {
    fn inner(&self, x: &[f64], d: usize) -> f64 {
        match self {
            Coef::Dense(a) => a.iter().zip(x).map(|(p, q)| p * q).sum(),
            Coef::Sparse(e) => e
                .iter()
                .map(|&(i, j, v)| {
                    if i == j {
                        v * x[i * d + i]
                    } else {
                        2.0 * v * x[i * d + j]
                    }
                })
                .sum(),
        }
    }

    fn add_scaled_to(&self, out: &mut [f64], s: f64, d: usize) {
        match self {
            Coef::Dense(a) => {
                for (o, v) in out.iter_mut().zip(a) {
                    *o += s * v;
                }
            }
            Coef::Sparse(e) => {
                for &(i, j, v) in e {
                    out[i * d + j] += s * v;
                    if i != j {
                        out[j * d + i] += s * v;
                    }
                }
            }
        }
    }

    fn frobenius_sq(&self) -> f64 {
        match self {
            Coef::Dense(a) => a.iter().map(|v| v * v).sum(),
            Coef::Sparse(e) => e
                .iter()
                .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
                .sum(),
        }
    }

    /// `W A W` for symmetric `W`.
    fn sandwich(&self, w: &[f64], d: usize) -> Vec<f64> {
        match self {
            Coef::Dense(a) => {
                let t = matmul(w, a, d);
                matmul(&t, w, d)
            }
            Coef::Sparse(e) => {
                let mut out = vec![0.0; d * d];
                for &(i, j, v) in e {
                    let wi = &w[i * d..(i + 1) * d];
                    let wj = &w[j * d..(j + 1) * d];
                    for p in 0..d {
                        for q in 0..d {
                            let term = if i == j {
                                wi[p] * wi[q]
                            } else {
                                wi[p] * wj[q] + wj[p] * wi[q]
                            };
                            out[p * d + q] += v * term;
                        }
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub terms: Vec<(usize, Coef)>,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct BlockProblem {
    pub blocks: Vec<usize>,
    /// Objective per block; `None` is the zero matrix.
    pub objective: Vec<Option<Coef>>,
    pub rows: Vec<Row>,
}

impl BlockProblem {
    pub fn new(blocks: Vec<usize>) -> Self {
        let objective = vec![None; blocks.len()];
        Self {
            blocks,
            objective,
            rows: Vec::new(),
        }
    }

    /// Appends a block and returns its index.
    pub fn add_block(&mut self, size: usize) -> usize {
        self.blocks.push(size);
        self.objective.push(None);
        self.blocks.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `max_k |b_k - <A_k, X>| / max(1, |b_k|)`.
    pub primal_residual: f64,
    /// `||C - A^*(y) - S||_F / (1 + ||C||_F)`.
    pub dual_residual: f64,
    pub relative_gap: f64,
    pub iterations: usize,
    pub status: Termination,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: f64,
    pub max_iter: usize,
}

const DIVERGENCE_RATIO: f64 = 1e6;

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

/// `G^T M G`.
fn congruence_t(g: &[f64], m: &[f64], n: usize) -> Vec<f64> {
    let mg = matmul(m, g, n);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = g[k * n + i];
            if x == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * mg[k * n + j];
            }
        }
    }
    symmetrize(&mut out, n);
    out
}

/// `G M G^T`.
fn congruence(g: &[f64], m: &[f64], n: usize) -> Vec<f64> {
    let gm = matmul(g, m, n);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += gm[i * n + k] * g[j * n + k];
            }
            out[i * n + j] = acc;
        }
    }
    symmetrize(&mut out, n);
    out
}

fn symmetrize(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// NT scaling data for one block.
struct Scaling {
    g: Vec<f64>,
    w: Vec<f64>,
    v: Vec<f64>,
}

fn nt_scaling(x: &[f64], s: &[f64], d: usize) -> Scaling {
    if d == 1 {
        let (x, s) = (x[0].max(f64::MIN_POSITIVE), s[0].max(f64::MIN_POSITIVE));
        let w = (x / s).sqrt();
        return Scaling {
            g: vec![w.sqrt()],
            w: vec![w],
            v: vec![(x * s).sqrt()],
        };
    }
    let (lx, qx) = hermitian_eig(x, d);
    let mut xh = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += qx[i * d + k] * lx[k].max(0.0).sqrt() * qx[j * d + k];
            }
            xh[i * d + j] = acc;
        }
    }
    let t = congruence(&xh, s, d);
    let (om, p) = hermitian_eig(&t, d);
    let floor = om.iter().fold(0.0f64, |m, v| m.max(v.abs())) * 1e-300 + f64::MIN_POSITIVE;
    let om: Vec<f64> = om.iter().map(|&w| w.max(floor)).collect();
    let xp = matmul(&xh, &p, d);
    let mut g = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            g[i * d + j] = xp[i * d + j] * om[j].powf(-0.25);
        }
    }
    let mut w = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            w[i * d + j] = dot(&g[i * d..(i + 1) * d], &g[j * d..(j + 1) * d]);
        }
    }
    symmetrize(&mut w, d);
    Scaling {
        g,
        w,
        v: om.iter().map(|w| w.sqrt()).collect(),
    }
}

/// Largest step `alpha` with `V + alpha * dV` PSD (infinite if unbounded).
fn max_step(v: &[f64], dv: &[f64], d: usize) -> f64 {
    if d == 1 {
        return if dv[0] < 0.0 { -v[0] / dv[0] } else { f64::INFINITY };
    }
    let mut k = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            k[i * d + j] = dv[i * d + j] / (v[i] * v[j]).sqrt();
        }
    }
    symmetrize(&mut k, d);
    let (l, _) = hermitian_eig(&k, d);
    if l[0] < 0.0 {
        -1.0 / l[0]
    } else {
        f64::INFINITY
    }
}

fn cholesky(m: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut djj = m[j * n + j];
        for k in 0..j {
            djj -= m[j * n + k] * m[j * n + k];
        }
        if djj <= 0.0 || !djj.is_finite() {
            return false;
        }
        let ljj = djj.sqrt();
        m[j * n + j] = ljj;
        for i in j + 1..n {
            let mut v = m[i * n + j];
            for k in 0..j {
                v -= m[i * n + k] * m[j * n + k];
            }
            m[i * n + j] = v / ljj;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    y
}

struct Iterate {
    x: Vec<Vec<f64>>,
    s: Vec<Vec<f64>>,
    y: Vec<f64>,
}

struct Residuals {
    rp: Vec<f64>,
    rd: Vec<Vec<f64>>,
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
    relgap: f64,
}

pub struct Solver<'a> {
    p: &'a BlockProblem,
    /// Per block: rows touching it, as (row index, term index).
    incidence: Vec<Vec<(usize, usize)>>,
    c_norm: f64,
    b_norm: f64,
    a_norm_max: f64,
}

impl<'a> Solver<'a> {
    pub fn new(p: &'a BlockProblem) -> Self {
        let mut incidence = vec![Vec::new(); p.blocks.len()];
        for (k, row) in p.rows.iter().enumerate() {
            for (t, (b, _)) in row.terms.iter().enumerate() {
                incidence[*b].push((k, t));
            }
        }
        let c_norm = p
            .objective
            .iter()
            .flatten()
            .map(Coef::frobenius_sq)
            .sum::<f64>()
            .sqrt();
        let b_norm = p.rows.iter().map(|r| r.rhs * r.rhs).sum::<f64>().sqrt();
        let a_norm_max = p
            .rows
            .iter()
            .map(|r| r.terms.iter().map(|(_, c)| c.frobenius_sq()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        Self {
            p,
            incidence,
            c_norm,
            b_norm,
            a_norm_max,
        }
    }

    fn apply_a(&self, x: &[Vec<f64>]) -> Vec<f64> {
        self.p
            .rows
            .iter()
            .map(|row| {
                row.terms
                    .iter()
                    .map(|(b, c)| c.inner(&x[*b], self.p.blocks[*b]))
                    .sum()
            })
            .collect()
    }

    fn apply_at(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = self.p.blocks.iter().map(|&d| vec![0.0; d * d]).collect();
        for (row, &yk) in self.p.rows.iter().zip(y) {
            if yk == 0.0 {
                continue;
            }
            for (b, c) in &row.terms {
                c.add_scaled_to(&mut out[*b], yk, self.p.blocks[*b]);
            }
        }
        out
    }

    fn residuals(&self, it: &Iterate) -> Residuals {
        let ax = self.apply_a(&it.x);
        let rp: Vec<f64> = self.p.rows.iter().zip(&ax).map(|(r, a)| r.rhs - a).collect();
        let aty = self.apply_at(&it.y);
        let mut rd = Vec::with_capacity(self.p.blocks.len());
        let mut pobj = 0.0;
        for (b, &d) in self.p.blocks.iter().enumerate() {
            let mut r = vec![0.0; d * d];
            if let Some(c) = &self.p.objective[b] {
                c.add_scaled_to(&mut r, 1.0, d);
                pobj += c.inner(&it.x[b], d);
            }
            for ((ri, a), s) in r.iter_mut().zip(&aty[b]).zip(&it.s[b]) {
                *ri -= a + s;
            }
            rd.push(r);
        }
        let dobj: f64 = self.p.rows.iter().zip(&it.y).map(|(r, y)| r.rhs * y).sum();
        let pinf = self
            .p
            .rows
            .iter()
            .zip(&rp)
            .map(|(r, v)| v.abs() / r.rhs.abs().max(1.0))
            .fold(0.0, f64::max);
        let dinf = rd.iter().map(|r| dot(r, r)).sum::<f64>().sqrt() / (1.0 + self.c_norm);
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        Residuals {
            rp,
            rd,
            pobj,
            dobj,
            pinf,
            dinf,
            relgap,
        }
    }

    /// Primal infeasibility certificate: `b^T y > 0` with `A^*(y) <= 0`.
    fn farkas_holds(&self, it: &Iterate, dobj: f64) -> bool {
        if dobj <= DIVERGENCE_RATIO * (1.0 + self.c_norm) {
            return false;
        }
        let yhat: Vec<f64> = it.y.iter().map(|v| v / dobj).collect();
        let aty = self.apply_at(&yhat);
        let worst = self
            .p
            .blocks
            .iter()
            .zip(&aty)
            .map(|(&d, m)| {
                let (l, _) = hermitian_eig(m, d);
                l.last().copied().unwrap_or(0.0)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst <= 1e-5 * (1.0 + self.a_norm_max)
    }

    /// Dual infeasibility certificate: `<C, X>` diverging with `A(X)` relatively small.
    fn unbounded_ray(&self, it: &Iterate, res: &Residuals) -> bool {
        if -res.pobj <= DIVERGENCE_RATIO * (1.0 + self.b_norm) {
            return false;
        }
        let ax = self.apply_a(&it.x);
        let axn = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
        axn / res.pobj.abs() <= 1e-5 * (1.0 + self.a_norm_max)
    }

    fn schur(&self, sc: &[Scaling]) -> Vec<f64> {
        let m = self.p.rows.len();
        let mut mat = vec![0.0; m * m];
        for (b, inc) in self.incidence.iter().enumerate() {
            let d = self.p.blocks[b];
            for (pos, &(k, tk)) in inc.iter().enumerate() {
                let wkw = self.p.rows[k].terms[tk].1.sandwich(&sc[b].w, d);
                for &(l, tl) in &inc[pos..] {
                    let v = self.p.rows[l].terms[tl].1.inner(&wkw, d);
                    mat[k * m + l] += v;
                    if k != l {
                        mat[l * m + k] += v;
                    }
                }
            }
        }
        mat
    }

    /// Solves for `(dy, dS~, dX~)` given V-space complementarity target `D`
    /// (stored dense per block).
    fn direction(
        &self,
        chol: &[f64],
        sc: &[Scaling],
        res: &Residuals,
        dmat: &[Vec<f64>],
    ) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let m = self.p.rows.len();
        // rhs = rp - A(Rc - W Rd W), Rc = G D G^T.
        let mut tmp = Vec::with_capacity(self.p.blocks.len());
        for (b, &d) in self.p.blocks.iter().enumerate() {
            let rc = congruence(&sc[b].g, &dmat[b], d);
            let wrw = {
                let t = matmul(&sc[b].w, &res.rd[b], d);
                matmul(&t, &sc[b].w, d)
            };
            tmp.push(rc.iter().zip(&wrw).map(|(a, c)| a - c).collect::<Vec<f64>>());
        }
        let at = self.apply_a(&tmp);
        let rhs: Vec<f64> = res.rp.iter().zip(&at).map(|(r, a)| r - a).collect();
        let dy = cholesky_solve(chol, m, &rhs);
        let atdy = self.apply_at(&dy);
        let mut ds_tilde = Vec::with_capacity(self.p.blocks.len());
        let mut dx_tilde = Vec::with_capacity(self.p.blocks.len());
        for (b, &d) in self.p.blocks.iter().enumerate() {
            let ds: Vec<f64> = res.rd[b].iter().zip(&atdy[b]).map(|(r, a)| r - a).collect();
            let dst = congruence_t(&sc[b].g, &ds, d);
            let dxt: Vec<f64> = dmat[b].iter().zip(&dst).map(|(a, c)| a - c).collect();
            ds_tilde.push(dst);
            dx_tilde.push(dxt);
        }
        (dy, ds_tilde, dx_tilde)
    }

    fn step_lengths(&self, sc: &[Scaling], dx: &[Vec<f64>], ds: &[Vec<f64>]) -> (f64, f64) {
        let mut ap = f64::INFINITY;
        let mut ad = f64::INFINITY;
        for (b, &d) in self.p.blocks.iter().enumerate() {
            ap = ap.min(max_step(&sc[b].v, &dx[b], d));
            ad = ad.min(max_step(&sc[b].v, &ds[b], d));
        }
        (ap, ad)
    }

    pub fn solve(&self, settings: Settings) -> Outcome {
        let p = self.p;
        let nblocks = p.blocks.len();
        let m = p.rows.len();
        let ntot: usize = p.blocks.iter().sum();
        let nmax = p.blocks.iter().copied().max().unwrap_or(1) as f64;

        let xi = (10.0f64).max(nmax.sqrt()).max(
            nmax * p
                .rows
                .iter()
                .map(|r| {
                    let an = r.terms.iter().map(|(_, c)| c.frobenius_sq()).sum::<f64>().sqrt();
                    (1.0 + r.rhs.abs()) / (1.0 + an)
                })
                .fold(0.0, f64::max),
        );
        let eta = (10.0f64)
            .max(nmax.sqrt())
            .max(self.a_norm_max)
            .max(self.c_norm);
        let ident = |d: usize, s: f64| {
            let mut v = vec![0.0; d * d];
            for i in 0..d {
                v[i * d + i] = s;
            }
            v
        };
        let mut it = Iterate {
            x: p.blocks.iter().map(|&d| ident(d, xi)).collect(),
            s: p.blocks.iter().map(|&d| ident(d, eta)).collect(),
            y: vec![0.0; m],
        };

        let merit = |r: &Residuals| {
            let v = [r.pinf, r.dinf, r.relgap, r.pobj, r.dobj];
            if v.iter().all(|x| x.is_finite()) {
                r.pinf.max(r.dinf).max(r.relgap)
            } else {
                f64::INFINITY
            }
        };
        let mut best: Option<(f64, Outcome)> = None;
        let make = |it: &Iterate, r: &Residuals, iters: usize, status: Termination| Outcome {
            x: it.x.clone(),
            s: it.s.clone(),
            y: it.y.clone(),
            primal_objective: r.pobj,
            dual_objective: r.dobj,
            primal_residual: r.pinf,
            dual_residual: r.dinf,
            relative_gap: r.relgap,
            iterations: iters,
            status,
        };

        let mut stalled = 0usize;
        for iter in 0..settings.max_iter {
            let res = self.residuals(&it);
            if ![res.pobj, res.dobj, res.pinf, res.dinf, res.relgap].iter().all(|v| v.is_finite()) {
                break;
            }
            let mval = merit(&res);
            if best.as_ref().is_none_or(|(v, _)| mval < *v) {
                best = Some((mval, make(&it, &res, iter, Termination::MaxIterations)));
            }
            if res.pinf <= settings.tol && res.dinf <= settings.tol && res.relgap <= settings.tol {
                return make(&it, &res, iter, Termination::Optimal);
            }
            if res.pinf > settings.tol && self.farkas_holds(&it, res.dobj) {
                return make(&it, &res, iter, Termination::Infeasible);
            }
            if res.dinf > settings.tol && self.unbounded_ray(&it, &res) {
                return make(&it, &res, iter, Termination::Unbounded);
            }

            let sc: Vec<Scaling> = (0..nblocks)
                .map(|b| nt_scaling(&it.x[b], &it.s[b], p.blocks[b]))
                .collect();
            let mu: f64 = sc.iter().map(|s| s.v.iter().map(|v| v * v).sum::<f64>()).sum::<f64>()
                / ntot as f64;

            let schur = self.schur(&sc);
            let diag_max = (0..m).map(|k| schur[k * m + k].abs()).fold(0.0, f64::max);
            let mut chol = schur.clone();
            let mut factored = cholesky(&mut chol, m);
            let mut reg = 1e-14 * diag_max.max(f64::MIN_POSITIVE);
            while !factored && reg < 1e-4 * diag_max.max(1.0) {
                chol.copy_from_slice(&schur);
                for k in 0..m {
                    chol[k * m + k] += reg;
                }
                factored = cholesky(&mut chol, m);
                reg *= 100.0;
            }
            if !factored {
                break;
            }

            // Predictor: D = -V.
            let d_aff: Vec<Vec<f64>> = (0..nblocks)
                .map(|b| {
                    let d = p.blocks[b];
                    let mut dm = vec![0.0; d * d];
                    for i in 0..d {
                        dm[i * d + i] = -sc[b].v[i];
                    }
                    dm
                })
                .collect();
            let (_, ds_a, dx_a) = self.direction(&chol, &sc, &res, &d_aff);
            let (ap, ad) = self.step_lengths(&sc, &dx_a, &ds_a);
            let (ap, ad) = (ap.min(1.0), ad.min(1.0));
            let mut mu_aff = 0.0;
            for b in 0..nblocks {
                let d = p.blocks[b];
                for i in 0..d {
                    for j in 0..d {
                        let xv = if i == j { sc[b].v[i] } else { 0.0 } + ap * dx_a[b][i * d + j];
                        let sv = if i == j { sc[b].v[i] } else { 0.0 } + ad * ds_a[b][i * d + j];
                        mu_aff += xv * sv;
                    }
                }
            }
            mu_aff /= ntot as f64;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // Corrector: L_V(D) = sigma mu I - V^2 - sym(dX~ dS~).
            let d_cor: Vec<Vec<f64>> = (0..nblocks)
                .map(|b| {
                    let d = p.blocks[b];
                    let v = &sc[b].v;
                    let prod = matmul(&dx_a[b], &ds_a[b], d);
                    let mut dm = vec![0.0; d * d];
                    for i in 0..d {
                        for j in 0..d {
                            let mut r = -0.5 * (prod[i * d + j] + prod[j * d + i]);
                            if i == j {
                                r += sigma * mu - v[i] * v[i];
                            }
                            dm[i * d + j] = 2.0 * r / (v[i] + v[j]);
                        }
                    }
                    dm
                })
                .collect();
            let (dy, ds_t, dx_t) = self.direction(&chol, &sc, &res, &d_cor);
            if !dy.iter().all(|v| v.is_finite()) {
                break;
            }
            let (ap_max, ad_max) = self.step_lengths(&sc, &dx_t, &ds_t);
            let gamma = 0.9 + 0.09 * ap.min(ad);
            let ap = (gamma * ap_max).min(1.0);
            let ad = (gamma * ad_max).min(1.0);

            if ap < 1e-10 && ad < 1e-10 {
                stalled += 1;
                if stalled > 3 {
                    break;
                }
            } else {
                stalled = 0;
            }

            for b in 0..nblocks {
                let d = p.blocks[b];
                let v = &sc[b].v;
                let mut xt: Vec<f64> = dx_t[b].iter().map(|z| ap * z).collect();
                for i in 0..d {
                    xt[i * d + i] += v[i];
                }
                it.x[b] = congruence(&sc[b].g, &xt, d);
            }
            // dS = Rd - A^*(dy) in the original coordinates.
            let atdy = self.apply_at(&dy);
            for b in 0..nblocks {
                let d = p.blocks[b];
                for ((s, r), a) in it.s[b].iter_mut().zip(&res.rd[b]).zip(&atdy[b]) {
                    *s += ad * (r - a);
                }
                symmetrize(&mut it.s[b], d);
            }
            for (y, v) in it.y.iter_mut().zip(&dy) {
                *y += ad * v;
            }
        }

        let res = self.residuals(&it);
        let mval = merit(&res);
        if best.as_ref().is_none_or(|(v, _)| mval < *v) {
            best = Some((mval, make(&it, &res, settings.max_iter, Termination::MaxIterations)));
        }
        let mut out = best.map(|(_, o)| o).expect("the starting point is finite");
        out.status = Termination::MaxIterations;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_in_scalar_blocks() {
        // min x1 + 2 x2 s.t. x1 + x2 = 1, x >= 0  ->  x = (1, 0), value 1
        let mut p = BlockProblem::new(vec![1, 1]);
        p.objective[0] = Some(Coef::Dense(vec![1.0]));
        p.objective[1] = Some(Coef::Dense(vec![2.0]));
        p.rows.push(Row {
            terms: vec![(0, Coef::Dense(vec![1.0])), (1, Coef::Dense(vec![1.0]))],
            rhs: 1.0,
        });
        let out = Solver::new(&p).solve(Settings {
            tol: 1e-9,
            max_iter: 100,
        });
        assert_eq!(out.status, Termination::Optimal);
        assert!((out.primal_objective - 1.0).abs() < 1e-8);
        assert!(out.x[1][0].abs() < 1e-8);
    }

    #[test]
    fn max_eigenvalue_as_sdp() {
        // min <-A, X> s.t. tr X = 1 gives -lambda_max(A)
        let a = vec![2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 1.0];
        let mut p = BlockProblem::new(vec![3]);
        p.objective[0] = Some(Coef::Dense(a.iter().map(|v| -v).collect()));
        p.rows.push(Row {
            terms: vec![(0, Coef::Sparse(vec![(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]))],
            rhs: 1.0,
        });
        let out = Solver::new(&p).solve(Settings {
            tol: 1e-10,
            max_iter: 100,
        });
        assert_eq!(out.status, Termination::Optimal);
        assert!((out.primal_objective + 3.0).abs() < 1e-8, "{}", out.primal_objective);
    }
}
