//! One-dimensional Gauss rules from their Jacobi matrices.
//!
//! Nodes come from the eigenvalues of the symmetric tridiagonal Jacobi
//! matrix and are polished by Newton steps on the orthonormal recurrence.
//! Weights use `w_i = 1 / sum_k p_k(x_i)^2`, evaluated with a running
//! log-scale so that rules with several hundred nodes keep full relative
//! accuracy in their smallest weights.

use nalgebra::DMatrix;

/// A one-dimensional Gauss rule. `log_weights[i] = ln(weights[i])`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub log_weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Recurrence `b_{j} p_j = (x - a_{j-1}) p_{j-1} - b_{j-1} p_{j-2}` with
/// `p_0 = 1 / sqrt(mu0)`.
struct Jacobi {
    diag: Vec<f64>,
    // off[j] couples j and j + 1; length m (the last entry is b_m).
    off: Vec<f64>,
    mu0: f64,
}

struct Evaluation {
    p: f64,
    dp: f64,
    log_sum_sq: f64,
}

const RESCALE: f64 = 1e150;

impl Jacobi {
    fn eval(&self, x: f64, m: usize) -> Evaluation {
        let mut p_prev = 0.0;
        let mut dp_prev = 0.0;
        let mut p = 1.0 / self.mu0.sqrt();
        let mut dp = 0.0;
        let mut sum_sq = p * p;
        let mut log_scale = 0.0;
        for j in 1..=m {
            let b_prev = if j >= 2 { self.off[j - 2] } else { 0.0 };
            let b = self.off[j - 1];
            let a = self.diag[j - 1];
            let p_next = ((x - a) * p - b_prev * p_prev) / b;
            let dp_next = (p + (x - a) * dp - b_prev * dp_prev) / b;
            p_prev = p;
            dp_prev = dp;
            p = p_next;
            dp = dp_next;
            if j < m {
                sum_sq += p * p;
            }
            if p.abs() > RESCALE || dp.abs() > RESCALE {
                p /= RESCALE;
                dp /= RESCALE;
                p_prev /= RESCALE;
                dp_prev /= RESCALE;
                sum_sq /= RESCALE * RESCALE;
                log_scale += RESCALE.ln();
            }
        }
        Evaluation { p, dp, log_sum_sq: sum_sq.ln() + 2.0 * log_scale }
    }

    fn rule(&self, m: usize) -> GaussRule {
        let mut jm = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            jm[(i, i)] = self.diag[i];
            if i + 1 < m {
                jm[(i, i + 1)] = self.off[i];
                jm[(i + 1, i)] = self.off[i];
            }
        }
        let mut nodes: Vec<f64> = jm.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut log_weights = Vec::with_capacity(m);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let e = self.eval(*x, m);
                if e.dp == 0.0 {
                    break;
                }
                let step = e.p / e.dp;
                *x -= step;
                if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                    break;
                }
            }
            log_weights.push(-self.eval(*x, m).log_sum_sq);
        }
        let weights = log_weights.iter().map(|l| l.exp()).collect();
        GaussRule { nodes, weights, log_weights }
    }
}

/// Gauss-Hermite rule for the weight `e^{-x^2}` on the real line.
pub fn gauss_hermite(m: usize) -> GaussRule {
    let jac = Jacobi {
        diag: vec![0.0; m],
        off: (1..=m).map(|j| (j as f64 / 2.0).sqrt()).collect(),
        mu0: std::f64::consts::PI.sqrt(),
    };
    let mut rule = jac.rule(m);
    // Symmetrize to remove the last ulp of asymmetry from the eigensolver.
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        let lw = 0.5 * (rule.log_weights[i] + rule.log_weights[j]);
        rule.log_weights[i] = lw;
        rule.log_weights[j] = lw;
        rule.weights[i] = lw.exp();
        rule.weights[j] = lw.exp();
    }
    if m % 2 == 1 {
        rule.nodes[m / 2] = 0.0;
    }
    rule
}

/// Gauss-Laguerre rule for the weight `e^{-x}` on `[0, inf)`.
pub fn gauss_laguerre(m: usize) -> GaussRule {
    let jac = Jacobi {
        diag: (0..m).map(|j| (2 * j + 1) as f64).collect(),
        off: (1..=m).map(|j| j as f64).collect(),
        mu0: 1.0,
    };
    jac.rule(m)
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> GaussRule {
    let jac = Jacobi {
        diag: vec![0.0; m],
        off: (1..=m)
            .map(|j| {
                let j = j as f64;
                j / (4.0 * j * j - 1.0).sqrt()
            })
            .collect(),
        mu0: 2.0,
    };
    jac.rule(m)
}

/// `ln(k!)` for `k = 0..=max`.
pub fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}
