//! Nonnegative weights balancing `sum lambda_s x_s x_s^T` against
//! `sum mu_t y_t y_t^T`.

use crate::linalg::jacobi;
use crate::types::CSystem;

#[derive(Debug, Clone, PartialEq)]
pub struct TsirelsonWeights {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    /// `||sum lambda_s x_s x_s^T - sum mu_t y_t y_t^T||_F`.
    pub residual: f64,
}

impl TsirelsonWeights {
    pub fn min_weight(&self) -> f64 {
        self.lambdas
            .iter()
            .chain(&self.mus)
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

const MAX_ITER: usize = 20_000;

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn quad(q: &[f64], w: &[f64]) -> f64 {
    let n = w.len();
    let mut acc = 0.0;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| q[i * n + j] * w[j]).sum();
        acc += w[i] * row;
    }
    acc.max(0.0)
}

fn grad(q: &[f64], w: &[f64]) -> Vec<f64> {
    let n = w.len();
    (0..n)
        .map(|i| 2.0 * (0..n).map(|j| q[i * n + j] * w[j]).sum::<f64>())
        .collect()
}

/// Minimizes `w^T Q w` on the face `{w_k = 0, k not in support}` of the
/// simplex via the KKT system, solved by a spectral pseudo-inverse.
fn polish(q: &[f64], w: &[f64]) -> Option<Vec<f64>> {
    let n = w.len();
    let support: Vec<usize> = (0..n).filter(|&k| w[k] > 1e-12).collect();
    let s = support.len();
    if s == 0 {
        return None;
    }
    let k = s + 1;
    let mut kkt = vec![0.0; k * k];
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            kkt[a * k + b] = 2.0 * q[i * n + j];
        }
        kkt[a * k + s] = 1.0;
        kkt[s * k + a] = 1.0;
    }
    let mut rhs = vec![0.0; k];
    rhs[s] = 1.0;
    let (vals, vecs) = jacobi::hermitian_eig(&kkt, k);
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut sol = vec![0.0; k];
    for (c, &l) in vals.iter().enumerate() {
        if l.abs() <= 1e-12 * top {
            continue;
        }
        let coef: f64 = (0..k).map(|i| vecs[i * k + c] * rhs[i]).sum::<f64>() / l;
        for i in 0..k {
            sol[i] += coef * vecs[i * k + c];
        }
    }
    let mut out = vec![0.0; n];
    for (a, &i) in support.iter().enumerate() {
        if sol[a] < 0.0 {
            return None;
        }
        out[i] = sol[a];
    }
    let total: f64 = out.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    Some(out.into_iter().map(|x| x / total).collect())
}

/// Projected gradient with Armijo backtracking from uniform weights, followed
/// by an exact solve on the detected support. Stops once the residual drops
/// below `tol * 1e-3`.
pub fn tsirelson_weights(system: &CSystem, tol: f64) -> TsirelsonWeights {
    let (m, n) = (system.m(), system.n());
    let total = m + n;
    if total == 0 {
        return TsirelsonWeights {
            lambdas: Vec::new(),
            mus: Vec::new(),
            residual: 0.0,
        };
    }
    let vecs: Vec<&Vec<f64>> = system.xs.iter().chain(&system.ys).collect();
    let sign = |k: usize| if k < m { 1.0 } else { -1.0 };
    let mut q = vec![0.0; total * total];
    for i in 0..total {
        for j in 0..total {
            let d: f64 = vecs[i].iter().zip(vecs[j]).map(|(a, b)| a * b).sum();
            q[i * total + j] = sign(i) * sign(j) * d * d;
        }
    }

    let target = (tol * 1e-3).powi(2);
    let mut w = vec![1.0 / total as f64; total];
    let mut f = quad(&q, &w);
    let mut step = 1.0;
    for _ in 0..MAX_ITER {
        if f <= target {
            break;
        }
        let g = grad(&q, &w);
        let mut accepted = None;
        for _ in 0..60 {
            let trial = project_simplex(
                &w.iter().zip(&g).map(|(x, gx)| x - step * gx).collect::<Vec<_>>(),
            );
            let ft = quad(&q, &trial);
            let decrease: f64 = g.iter().zip(trial.iter().zip(&w)).map(|(gx, (t, x))| gx * (t - x)).sum();
            if ft <= f + 1e-4 * decrease {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, ft)) = accepted else { break };
        let moved = trial.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        w = trial;
        let converged = f - ft <= 1e-16 * f.max(1e-300) || moved < 1e-16;
        f = ft;
        step *= 2.0;
        if converged {
            break;
        }
    }
    if let Some(p) = polish(&q, &w) {
        let fp = quad(&q, &p);
        if fp < f {
            w = p;
            f = fp;
        }
    }
    TsirelsonWeights {
        lambdas: w[..m].to_vec(),
        mus: w[m..].to_vec(),
        residual: f.sqrt(),
    }
}
