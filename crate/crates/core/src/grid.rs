//! Quadrature grids for the Gaussian measures `dmu_nu(z) = (nu/pi)^n e^{-nu|z|^2} dz`.
//!
//! Every grid is a tensor product over the `n` complex coordinates of a
//! planar rule for `mu_nu` on `C`. Grids are immutable; refinement builds a
//! new grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::{self, C64};
use crate::error::{FockError, Result};
use crate::params::FockParams;
use crate::quadrature::{gauss_hermite, gauss_laguerre, gauss_legendre, ln_factorials};

/// Largest number of nodes a grid may have.
pub const MAX_NODES: usize = 4_000_000;

/// Relative tolerance used to certify polynomial exactness.
pub const EXACTNESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scheme {
    /// Gauss-Hermite rule in each of the `2n` real coordinates.
    HermiteTensor,
    /// Gauss-Laguerre in `|z_i|^2` times a uniform angular rule in each
    /// complex coordinate. `breaks` lists radii where the integrand may jump;
    /// the radial rule is split there (Gauss-Legendre on finite pieces).
    Polar {
        #[serde(default)]
        breaks: Vec<f64>,
    },
    /// Uniform lattice on `[-extent, extent]^{2n}` with normalized Gaussian
    /// weights. Meant for grid operators, not for moment-exact integration.
    Uniform { extent: f64 },
}

impl Scheme {
    pub fn polar() -> Self {
        Scheme::Polar { breaks: Vec::new() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::HermiteTensor => "hermite-tensor",
            Scheme::Polar { .. } => "polar",
            Scheme::Uniform { .. } => "uniform",
        }
    }
}

/// Planar rule for `mu_nu` on `C`.
struct PlanarRule {
    nodes: Vec<C64>,
    log_weights: Vec<f64>,
    analytic_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureGrid {
    n: usize,
    #[serde(with = "cplx::nested")]
    nodes: Vec<Vec<C64>>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
    measure_weight: f64,
    exactness_degree: usize,
    scheme: Scheme,
    size: usize,
}

#[derive(Deserialize)]
struct GridRaw {
    n: usize,
    #[serde(with = "cplx::nested")]
    nodes: Vec<Vec<C64>>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
    measure_weight: f64,
    exactness_degree: usize,
    scheme: Scheme,
    size: usize,
}

impl<'de> Deserialize<'de> for QuadratureGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GridRaw::deserialize(d)?;
        let grid = QuadratureGrid {
            n: raw.n,
            nodes: raw.nodes,
            weights: raw.weights,
            log_weights: raw.log_weights,
            measure_weight: raw.measure_weight,
            exactness_degree: raw.exactness_degree,
            scheme: raw.scheme,
            size: raw.size,
        };
        grid.validate().map_err(serde::de::Error::custom)?;
        Ok(grid)
    }
}

/// Builds the grid for `dmu_{p alpha / 2}`, the measure of `L_alpha^p`.
pub fn build_grid(params: &FockParams, scheme: &Scheme, size: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::for_measure(params.n, params.measure_weight(), scheme, size)
}

impl QuadratureGrid {
    /// Builds a grid for `dmu_nu` on `C^n`.
    pub fn for_measure(n: usize, nu: f64, scheme: &Scheme, size: usize) -> Result<Self> {
        if n == 0 {
            return Err(FockError::InvalidParams("dimension must be positive".into()));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(FockError::InvalidParams(format!("measure weight {nu} must be positive")));
        }
        if size < 2 {
            return Err(FockError::InvalidParams(format!("grid size {size} must be at least 2")));
        }
        let planar = match scheme {
            Scheme::HermiteTensor => hermite_planar(nu, size)?,
            Scheme::Polar { breaks } => polar_planar(nu, size, breaks)?,
            Scheme::Uniform { extent } => uniform_planar(nu, size, *extent)?,
        };
        let per = planar.nodes.len();
        let total = (per as f64).powi(n as i32);
        if total > MAX_NODES as f64 {
            return Err(FockError::UnsupportedScheme(format!(
                "{} with size {size} in dimension {n} needs {total:.0} nodes (limit {MAX_NODES})",
                scheme.name()
            )));
        }
        let exactness_degree = certify(&planar, nu);
        let total = total as usize;
        let mut nodes = Vec::with_capacity(total);
        let mut log_weights = Vec::with_capacity(total);
        let mut index = vec![0usize; n];
        for _ in 0..total {
            nodes.push(index.iter().map(|&i| planar.nodes[i]).collect::<Vec<_>>());
            log_weights.push(index.iter().map(|&i| planar.log_weights[i]).sum::<f64>());
            for slot in index.iter_mut().rev() {
                *slot += 1;
                if *slot < per {
                    break;
                }
                *slot = 0;
            }
        }
        let weights = log_weights.iter().map(|l: &f64| l.exp()).collect();
        Ok(Self {
            n,
            nodes,
            weights,
            log_weights,
            measure_weight: nu,
            exactness_degree,
            scheme: scheme.clone(),
            size,
        })
    }

    /// The same scheme at roughly 1.5 times the size.
    pub fn refined(&self) -> Result<Self> {
        let size = self.size + self.size.div_ceil(2);
        Self::for_measure(self.n, self.measure_weight, &self.scheme, size)
    }

    fn validate(&self) -> Result<()> {
        let len = self.nodes.len();
        if self.weights.len() != len || self.log_weights.len() != len {
            return Err(FockError::LengthMismatch { expected: len, got: self.weights.len() });
        }
        if self.nodes.iter().any(|z| z.len() != self.n) {
            return Err(FockError::InvalidParams("node dimension mismatch".into()));
        }
        if self.log_weights.iter().any(|l| !l.is_finite()) {
            return Err(FockError::InvalidParams("weights must be positive".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec<C64>] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &[C64] {
        &self.nodes[i]
    }

    /// Weights; far nodes of wide uniform grids may underflow here, so
    /// prefer [`QuadratureGrid::log_weights`] in numerics.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn measure_weight(&self) -> f64 {
        self.measure_weight
    }

    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Largest sup-norm of a real coordinate over all nodes.
    pub fn extent(&self) -> f64 {
        self.nodes
            .iter()
            .flat_map(|z| z.iter().map(|c| c.re.abs().max(c.im.abs())))
            .fold(0.0, f64::max)
    }

    pub fn require_exactness(&self, degree: usize) -> Result<()> {
        if self.exactness_degree < degree {
            return Err(FockError::ExactnessShortfall {
                required: degree,
                available: self.exactness_degree,
            });
        }
        Ok(())
    }

    pub fn require_measure(&self, nu: f64) -> Result<()> {
        if (self.measure_weight - nu).abs() > 1e-14 * nu.max(1.0) {
            return Err(FockError::MeasureMismatch { grid: self.measure_weight, required: nu });
        }
        Ok(())
    }

    pub fn integrate(&self, f: impl Fn(&[C64]) -> C64) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(z, &w)| f(z) * w).sum()
    }

    pub fn integrate_real(&self, f: impl Fn(&[C64]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, &w)| f(z) * w).sum()
    }

    pub fn sample(&self, f: impl Fn(&[C64]) -> C64) -> Vec<C64> {
        self.nodes.iter().map(|z| f(z)).collect()
    }
}

fn hermite_planar(nu: f64, m: usize) -> Result<PlanarRule> {
    if m > 600 {
        return Err(FockError::UnsupportedScheme(format!("hermite size {m} exceeds 600")));
    }
    let rule = gauss_hermite(m);
    let scale = 1.0 / nu.sqrt();
    let mut nodes = Vec::with_capacity(m * m);
    let mut log_weights = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            nodes.push(C64::new(rule.nodes[a] * scale, rule.nodes[b] * scale));
            log_weights.push(rule.log_weights[a] + rule.log_weights[b] - PI.ln());
        }
    }
    Ok(PlanarRule { nodes, log_weights, analytic_degree: 2 * m - 1 })
}

/// Radial rule for `int_0^inf e^{-u} g(u) du`, split at the given points.
fn radial_pieces(l: usize, cuts: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut us = Vec::new();
    let mut lws = Vec::new();
    let mut lo = 0.0;
    let legendre = gauss_legendre(l);
    for &hi in cuts {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, lw) in legendre.nodes.iter().zip(&legendre.log_weights) {
            let u = mid + half * x;
            us.push(u);
            lws.push(lw + half.ln() - u);
        }
        lo = hi;
    }
    let laguerre = gauss_laguerre(l);
    for (x, lw) in laguerre.nodes.iter().zip(&laguerre.log_weights) {
        us.push(x + lo);
        lws.push(lw - lo);
    }
    (us, lws)
}

fn polar_planar(nu: f64, l: usize, breaks: &[f64]) -> Result<PlanarRule> {
    if l > 600 {
        return Err(FockError::UnsupportedScheme(format!("polar size {l} exceeds 600")));
    }
    let mut cuts: Vec<f64> = Vec::new();
    for &r in breaks {
        if !(r.is_finite() && r > 0.0) {
            return Err(FockError::InvalidParams(format!("radial break {r} must be positive")));
        }
        cuts.push(nu * r * r);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let (us, lws) = radial_pieces(l, &cuts);
    let m_ang = 4 * l;
    let mut nodes = Vec::with_capacity(us.len() * m_ang);
    let mut log_weights = Vec::with_capacity(us.len() * m_ang);
    let ang_lw = -(m_ang as f64).ln();
    for (u, lw) in us.iter().zip(&lws) {
        let r = (u / nu).sqrt();
        for k in 0..m_ang {
            let theta = 2.0 * PI * k as f64 / m_ang as f64;
            nodes.push(C64::from_polar(r, theta));
            log_weights.push(lw + ang_lw);
        }
    }
    Ok(PlanarRule { nodes, log_weights, analytic_degree: (4 * l - 1).min(m_ang - 1) })
}

fn uniform_planar(nu: f64, m: usize, extent: f64) -> Result<PlanarRule> {
    if !(extent.is_finite() && extent > 0.0) {
        return Err(FockError::InvalidParams(format!("uniform extent {extent} must be positive")));
    }
    let axis: Vec<f64> = (0..m).map(|a| -extent + 2.0 * extent * a as f64 / (m - 1) as f64).collect();
    let mut nodes = Vec::with_capacity(m * m);
    let mut raw = Vec::with_capacity(m * m);
    for &x in &axis {
        for &y in &axis {
            nodes.push(C64::new(x, y));
            raw.push(-nu * (x * x + y * y));
        }
    }
    let top = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_total = top + raw.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    let log_weights = raw.iter().map(|l| l - log_total).collect();
    Ok(PlanarRule { nodes, log_weights, analytic_degree: 2 * m - 1 })
}

/// Largest total degree `d <= analytic_degree` such that every moment
/// `int |z|^{2k} dmu_nu = k!/nu^k` with `2k <= d` is reproduced to
/// [`EXACTNESS_TOL`]; monomials with unequal powers vanish by symmetry.
fn certify(planar: &PlanarRule, nu: f64) -> usize {
    let kmax = planar.analytic_degree / 2;
    let lf = ln_factorials(kmax);
    let logs: Vec<f64> = planar.nodes.iter().map(|z| (nu * z.norm_sqr()).ln()).collect();
    for k in 0..=kmax {
        let got: f64 = planar
            .log_weights
            .iter()
            .zip(&logs)
            .map(|(lw, ls)| if k == 0 { lw.exp() } else { (lw + k as f64 * ls - lf[k]).exp() })
            .sum();
        if (got - 1.0).abs() > EXACTNESS_TOL {
            return if k == 0 { 0 } else { 2 * k - 1 };
        }
    }
    planar.analytic_degree
}
