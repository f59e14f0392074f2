//! Weighted `L^p` norms and the small analytic criteria attached to the
//! Gaussian measures.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::C64;
use crate::error::{FockError, Result};
use crate::grid::QuadratureGrid;
use crate::params::FockParams;
use crate::quadrature::gauss_legendre;

/// `(sum w_i |f_i|^p)^{1/p}` on a grid for `dmu_{p alpha / 2}`.
pub fn lp_norm(samples: &[C64], grid: &QuadratureGrid, params: &FockParams) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(FockError::LengthMismatch { expected: grid.len(), got: samples.len() });
    }
    grid.require_measure(params.measure_weight())?;
    let p = params.p;
    // Scale by the largest term so far-out nodes with tiny weights and large
    // values neither overflow nor vanish.
    let logs: Vec<f64> = samples
        .iter()
        .zip(grid.log_weights())
        .map(|(f, lw)| lw + p * f.norm().ln())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok(((top + sum.ln()) / p).exp())
}

/// `2^n / (p^{n/p} q^{n/q})`, the norm constant of the dual pairing.
pub fn duality_constant(params: &FockParams) -> f64 {
    let (n, p, q) = (params.n as f64, params.p, params.q);
    if params.is_hilbert() {
        return 1.0;
    }
    (n * (2f64.ln() - p.ln() / p - q.ln() / q)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundedness {
    Bounded,
    Unbounded,
}

/// Ray `w = ratio * z` along which `|e^{a<z,w> - b|z|^2 - c|w|^2}| = e^{growth |z|^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub ratio: f64,
    pub growth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub verdict: Boundedness,
    pub discriminant: f64,
    pub witness: Option<Witness>,
}

/// Decides whether `(z, w) -> e^{a<z,w> - b|z|^2 - c|w|^2}` is bounded.
pub fn boundedness_criterion(a: f64, b: f64, c: f64) -> Result<BoundednessReport> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(FockError::InvalidParams(format!("coefficients ({a}, {b}, {c}) must be positive")));
    }
    let discriminant = 4.0 * b * c - a * a;
    if discriminant >= 0.0 {
        return Ok(BoundednessReport { verdict: Boundedness::Bounded, discriminant, witness: None });
    }
    let ratio = (b / c).sqrt();
    Ok(BoundednessReport {
        verdict: Boundedness::Unbounded,
        discriminant,
        witness: Some(Witness { ratio, growth: a * ratio - 2.0 * b }),
    })
}

/// Relative change under refinement above which an integral is rejected.
pub const REFINEMENT_TOL: f64 = 0.01;

/// Outer radial nodes used for the ball integral.
const RADIAL_NODES: usize = 48;

fn ht_inner(grid: &QuadratureGrid, params: &FockParams, r: f64) -> f64 {
    // int |e^{alpha<z,w> - (2 - p) alpha |w|^2 / 2}|^q dmu_{p alpha/2}(z) at w = (r, 0, ..).
    let (p, q, alpha) = (params.p, params.q, params.alpha);
    let shift = -q * (2.0 - p) * alpha * r * r / 2.0;
    grid.nodes()
        .iter()
        .zip(grid.log_weights())
        .map(|(z, lw)| (lw + q * alpha * r * z[0].re + shift).exp())
        .sum()
}

fn ht_value(grid: &QuadratureGrid, params: &FockParams, radius: f64) -> f64 {
    let n = params.n as f64;
    let nu = params.measure_weight();
    let (p, q) = (params.p, params.q);
    // The inner integral depends on |w| only, so the outer integral over the
    // ball reduces to a radial one.
    let sphere = 2.0 * PI.powf(n) / gamma_int(params.n);
    let rule = gauss_legendre(RADIAL_NODES);
    let half = radius / 2.0;
    let mut sum = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let r = half * (x + 1.0);
        let inner = ht_inner(grid, params, r);
        sum += w * half * inner.powf(p / q) * (-nu * r * r).exp() * r.powf(2.0 * n - 1.0);
    }
    (nu / PI).powf(n) * sphere * sum
}

/// `Gamma(n)` for a positive integer.
fn gamma_int(n: usize) -> f64 {
    (1..n).map(|k| k as f64).product()
}

/// The double integral that certifies compactness of `P_alpha M_{chi_D}`
/// for `D = B(0, radius)`, with the inner integral evaluated on `grid` and
/// checked against a refined grid.
pub fn hille_tamarkin_integral(radius: f64, params: &FockParams, grid: &QuadratureGrid) -> Result<f64> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(FockError::InvalidParams(format!("radius {radius} must be nonnegative")));
    }
    grid.require_measure(params.measure_weight())?;
    if radius == 0.0 {
        return Ok(0.0);
    }
    let value = ht_value(grid, params, radius);
    let fine = ht_value(&grid.refined()?, params, radius);
    let change = (fine - value).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if !(change <= REFINEMENT_TOL) {
        return Err(FockError::GridTooCoarse { relative_change: change });
    }
    Ok(fine)
}

/// Both sides of `(sum x_j)^p <= k^p sum x_j^p` for nonnegative `x`.
pub fn power_sum_sides(xs: &[f64], p: f64) -> (f64, f64) {
    let k = xs.len() as f64;
    let lhs = xs.iter().sum::<f64>().powf(p);
    let rhs = k.powf(p) * xs.iter().map(|x| x.powf(p)).sum::<f64>();
    (lhs, rhs)
}
