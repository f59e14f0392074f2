//! The projection `P_alpha`, Toeplitz truncations and the Berezin transform,
//! all evaluated by quadrature on a grid for `dmu_alpha`.

use nalgebra::DMatrix;

use crate::basis::{enumerate_indices, weighted_basis, BasisMatrix};
use crate::cplx::{self, C64};
use crate::error::{FockError, Result};
use crate::grid::{QuadratureGrid, Scheme};
use crate::params::FockParams;
use crate::quadrature::gauss_legendre;
use crate::symbol::{SymbolFunction, SymbolTag};

/// Gaussian tail mass a uniform grid may drop before the Berezin transform
/// refuses to use it.
pub const COVERAGE_TOL: f64 = 1e-12;

fn check_samples(samples: &[C64], grid: &QuadratureGrid) -> Result<()> {
    if samples.len() != grid.len() {
        return Err(FockError::LengthMismatch { expected: grid.len(), got: samples.len() });
    }
    Ok(())
}

/// `(P_alpha f)(z) = int e^{alpha <z,w>} f(w) dmu_alpha(w)` at every target.
pub fn apply_projection(
    samples: &[C64],
    grid: &QuadratureGrid,
    params: &FockParams,
    targets: &[Vec<C64>],
) -> Result<Vec<C64>> {
    check_samples(samples, grid)?;
    grid.require_measure(params.alpha)?;
    let alpha = params.alpha;
    Ok(targets
        .iter()
        .map(|z| {
            grid.nodes()
                .iter()
                .zip(grid.log_weights())
                .zip(samples)
                .map(|((w, lw), f)| {
                    let e = alpha * cplx::inner(z, w);
                    C64::from_polar((lw + e.re).exp(), e.im) * f
                })
                .sum()
        })
        .collect())
}

/// Truncation of `T_f` to degrees `<= degree`: entry `(j, k)` is
/// `int f e_k conj(e_j) dmu_alpha`. Requires exactness `2 degree + 2`.
pub fn assemble_toeplitz(
    f: &SymbolFunction,
    degree: usize,
    params: &FockParams,
    grid: &QuadratureGrid,
) -> Result<BasisMatrix> {
    grid.require_measure(params.alpha)?;
    grid.require_exactness(2 * degree + 2)?;
    if grid.dim() != params.n {
        return Err(FockError::InvalidParams(format!(
            "grid dimension {} differs from n = {}",
            grid.dim(),
            params.n
        )));
    }
    let values = f.sample_checked(grid.nodes())?;
    let indices = enumerate_indices(params.n, degree);
    let (a, b) = weighted_basis(grid, &indices, params.alpha);
    let real = f.is_real_on(&values);
    // T = E^H diag(f) E with E = A + iB split into real products.
    let mut c = a.clone();
    let mut d = b.clone();
    for (i, v) in values.iter().enumerate() {
        c.row_mut(i).scale_mut(v.re);
        d.row_mut(i).scale_mut(v.re);
        if v.im != 0.0 {
            for j in 0..a.ncols() {
                c[(i, j)] -= v.im * b[(i, j)];
                d[(i, j)] += v.im * a[(i, j)];
            }
        }
    }
    let re = a.tr_mul(&c) + b.tr_mul(&d);
    let im = a.tr_mul(&d) - b.tr_mul(&c);
    let k = indices.len();
    let mut t = DMatrix::<C64>::from_fn(k, k, |r, s| C64::new(re[(r, s)], im[(r, s)]));
    if real {
        t = (&t + t.adjoint()).scale(0.5);
    }
    Ok(BasisMatrix::new(t, *params, degree))
}

/// Diagonal of `T_f` for a radial symbol `f(z) = g(|z|^2)`, indexed by total
/// degree `m = 0..=degree`. Under `|e_k|^2 dmu_alpha` the variable
/// `alpha |z|^2` is Gamma(m + n) distributed, so each entry is a
/// one-dimensional integral, done here with composite Gauss-Legendre panels
/// split at the symbol's radial breaks.
pub fn radial_toeplitz_diagonal(f: &SymbolFunction, degree: usize, params: &FockParams) -> Result<Vec<C64>> {
    if f.tag() != SymbolTag::Radial {
        return Err(FockError::InvalidParams(format!("symbol '{}' is not declared radial", f.label())));
    }
    let n = params.n;
    let alpha = params.alpha;
    let rule = gauss_legendre(RADIAL_PANEL_NODES);
    let cuts: Vec<f64> = f.radial_breaks().iter().map(|r| alpha * r * r).collect();
    let mut z = vec![C64::new(0.0, 0.0); n];
    let mut out = Vec::with_capacity(degree + 1);
    for m in 0..=degree {
        let shape = (m + n) as f64;
        let half = 12.0 * shape.sqrt() + 40.0;
        let (lo, hi) = ((shape - half).max(0.0), shape + half);
        let mut edges = vec![lo, hi];
        edges.extend(cuts.iter().copied().filter(|&c| c > lo && c < hi));
        edges.sort_by(f64::total_cmp);
        let log_norm = ln_gamma_int(m + n);
        let mut acc = C64::new(0.0, 0.0);
        for w in edges.windows(2) {
            let pieces = ((w[1] - w[0]) / RADIAL_PANEL_WIDTH).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / pieces as f64;
            for piece in 0..pieces {
                let a = w[0] + piece as f64 * h;
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    let u = a + 0.5 * h * (x + 1.0);
                    z[0] = C64::new((u / alpha).sqrt(), 0.0);
                    let v = f.eval(&z);
                    if !(v.norm() <= f.sup_bound() * (1.0 + 1e-12) + 1e-300) {
                        return Err(FockError::SymbolBoundViolated { node: m, value: v.norm(), bound: f.sup_bound() });
                    }
                    let density = ((shape - 1.0) * u.ln() - u - log_norm).exp();
                    acc += v * (0.5 * h * wt * density);
                }
            }
        }
        out.push(acc);
    }
    Ok(out)
}

const RADIAL_PANEL_NODES: usize = 20;
const RADIAL_PANEL_WIDTH: f64 = 1.0;

fn ln_gamma_int(k: usize) -> f64 {
    (1..k).map(|j| (j as f64).ln()).sum()
}

fn check_coverage(grid: &QuadratureGrid, alpha: f64) -> Result<()> {
    if let Scheme::Uniform { extent } = grid.scheme() {
        // Mass of the one-dimensional Gaussian beyond the box, per coordinate.
        let tail = (-alpha * extent * extent).exp() / (alpha.sqrt() * extent * std::f64::consts::PI.sqrt());
        let lost = 2.0 * grid.dim() as f64 * tail;
        if lost > COVERAGE_TOL {
            return Err(FockError::ExtentTooSmall {
                extent: *extent,
                reason: format!("Gaussian mass {lost:.3e} outside the grid"),
            });
        }
    }
    Ok(())
}

/// `f~(z) = int f(w) (alpha/pi)^n e^{-alpha |w - z|^2} dw = int f(z + u) dmu_alpha(u)`.
pub fn berezin_transform(f: &SymbolFunction, z: &[C64], params: &FockParams, grid: &QuadratureGrid) -> Result<C64> {
    grid.require_measure(params.alpha)?;
    check_coverage(grid, params.alpha)?;
    let mut w = vec![C64::new(0.0, 0.0); z.len()];
    let mut total = C64::new(0.0, 0.0);
    for (u, wt) in grid.nodes().iter().zip(grid.weights()) {
        for i in 0..z.len() {
            w[i] = z[i] + u[i];
        }
        total += f.eval(&w) * *wt;
    }
    Ok(total)
}

/// The Berezin transform as a symbol, backed by quadrature on `grid`.
pub fn berezin_symbol(f: &SymbolFunction, params: &FockParams, grid: &QuadratureGrid) -> Result<SymbolFunction> {
    grid.require_measure(params.alpha)?;
    check_coverage(grid, params.alpha)?;
    let g = f.clone();
    let nodes = grid.nodes().to_vec();
    let weights = grid.weights().to_vec();
    let out = SymbolFunction::new(format!("berezin({})", f.label()), f.sup_bound(), f.tag(), move |z| {
        let mut w = vec![C64::new(0.0, 0.0); z.len()];
        let mut total = C64::new(0.0, 0.0);
        for (u, wt) in nodes.iter().zip(&weights) {
            for i in 0..z.len() {
                w[i] = z[i] + u[i];
            }
            total += g.eval(&w) * *wt;
        }
        total
    });
    Ok(out.with_limit(f.declared_limit()))
}
