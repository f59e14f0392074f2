//! Dense operators acting on node-value sequences of a quadrature grid.
//!
//! The matrix is stored in the isometric frame `S = W^{1/2} A W^{-1/2}`,
//! where `A` acts on node values and `W` holds the quadrature weights, so
//! that the spectral norm of `S` is the discrete `L^2(mu)` operator norm.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::cplx::{self, C64};
use crate::error::{FockError, Result};
use crate::grid::{QuadratureGrid, Scheme};
use crate::params::FockParams;
use crate::symbol::SymbolFunction;

/// Largest grid a dense operator may live on.
pub const MAX_DENSE_NODES: usize = 5000;

/// Dimension up to which norms use a full singular value decomposition.
const SVD_LIMIT: usize = 400;

const LANCZOS_STEPS: usize = 100;
const LANCZOS_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GridOperator {
    frame: DMatrix<C64>,
    grid: Arc<QuadratureGrid>,
    params: FockParams,
}

fn check_size(grid: &QuadratureGrid) -> Result<()> {
    if grid.len() > MAX_DENSE_NODES {
        return Err(FockError::TooLarge(grid.len()));
    }
    Ok(())
}

impl GridOperator {
    pub fn from_frame(grid: Arc<QuadratureGrid>, params: FockParams, frame: DMatrix<C64>) -> Result<Self> {
        check_size(&grid)?;
        if frame.nrows() != grid.len() || frame.ncols() != grid.len() {
            return Err(FockError::LengthMismatch { expected: grid.len(), got: frame.nrows() });
        }
        Ok(Self { frame, grid, params })
    }

    /// Operator `(Af)(z_i) = sum_k K(z_i, z_k) w_k f(z_k)` given `log K`.
    pub fn from_log_kernel(
        grid: Arc<QuadratureGrid>,
        params: FockParams,
        log_kernel: impl Fn(&[C64], &[C64]) -> C64,
    ) -> Result<Self> {
        check_size(&grid)?;
        let lw = grid.log_weights();
        let nodes = grid.nodes();
        let frame = DMatrix::from_fn(grid.len(), grid.len(), |i, k| {
            let l = log_kernel(&nodes[i], &nodes[k]);
            C64::from_polar((0.5 * lw[i] + 0.5 * lw[k] + l.re).exp(), l.im)
        });
        Ok(Self { frame, grid, params })
    }

    /// Discretized `P_alpha` with kernel `e^{alpha <z, w>}`.
    pub fn projection(grid: Arc<QuadratureGrid>, params: FockParams) -> Result<Self> {
        grid.require_measure(params.alpha)?;
        let alpha = params.alpha;
        Self::from_log_kernel(grid, params, move |z, w| alpha * cplx::inner(z, w))
    }

    pub fn identity(grid: Arc<QuadratureGrid>, params: FockParams) -> Result<Self> {
        let k = grid.len();
        Self::from_frame(grid, params, DMatrix::identity(k, k))
    }

    pub fn multiplication_by_samples(grid: Arc<QuadratureGrid>, params: FockParams, values: &[C64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FockError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        let d = DVector::from_column_slice(values);
        Self::from_frame(grid, params, DMatrix::from_diagonal(&d))
    }

    pub fn multiplication(grid: Arc<QuadratureGrid>, params: FockParams, f: &SymbolFunction) -> Result<Self> {
        let values = f.sample_checked(grid.nodes())?;
        Self::multiplication_by_samples(grid, params, &values)
    }

    /// `C_z` on a uniform grid, for shifts that map the lattice to itself.
    /// Values shifted in from outside the grid are zero.
    pub fn shift(grid: Arc<QuadratureGrid>, params: FockParams, z: &[C64]) -> Result<Self> {
        check_size(&grid)?;
        let extent = match grid.scheme() {
            Scheme::Uniform { extent } => *extent,
            other => {
                return Err(FockError::UnsupportedScheme(format!(
                    "grid shifts need a uniform grid, not {}",
                    other.name()
                )))
            }
        };
        let m = grid.size();
        let h = 2.0 * extent / (m - 1) as f64;
        let lattice = |x: f64| -> Option<i64> {
            let s = x / h;
            let r = s.round();
            ((s - r).abs() < 1e-9).then_some(r as i64)
        };
        let mut steps = Vec::with_capacity(2 * z.len());
        for c in z {
            match (lattice(c.re), lattice(c.im)) {
                (Some(a), Some(b)) => steps.extend([a, b]),
                _ => {
                    return Err(FockError::InvalidParams(format!(
                        "shift {c} is not a multiple of the grid spacing {h}"
                    )))
                }
            }
        }
        let n = grid.dim();
        let index_of = |coords: &[i64]| -> Option<usize> {
            let mut idx = 0usize;
            for &a in coords {
                if a < 0 || a >= m as i64 {
                    return None;
                }
                idx = idx * m + a as usize;
            }
            Some(idx)
        };
        let alpha = params.alpha;
        let z_sq = cplx::norm_sqr(z);
        let lw = grid.log_weights();
        let mut frame = DMatrix::<C64>::zeros(grid.len(), grid.len());
        let mut coords = vec![0i64; 2 * n];
        for i in 0..grid.len() {
            // Decode the node index into lattice coordinates (x then y per complex coordinate).
            let mut rest = i;
            for slot in coords.iter_mut().rev() {
                *slot = (rest % m) as i64;
                rest /= m;
            }
            let source: Vec<i64> = coords.iter().zip(&steps).map(|(a, s)| a - s).collect();
            if let Some(k) = index_of(&source) {
                let w = grid.node(i);
                let e = alpha * cplx::inner(w, z) - alpha * z_sq / 2.0;
                frame[(i, k)] = C64::from_polar((0.5 * lw[i] - 0.5 * lw[k] + e.re).exp(), e.im);
            }
        }
        Ok(Self { frame, grid, params })
    }

    pub fn frame(&self) -> &DMatrix<C64> {
        &self.frame
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn params(&self) -> &FockParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    /// Applies the operator to node values.
    pub fn apply(&self, samples: &[C64]) -> Result<Vec<C64>> {
        if samples.len() != self.dim() {
            return Err(FockError::LengthMismatch { expected: self.dim(), got: samples.len() });
        }
        let lw = self.grid.log_weights();
        let v = DVector::from_iterator(self.dim(), samples.iter().zip(lw).map(|(f, l)| f * (0.5 * l).exp()));
        let out = &self.frame * v;
        Ok(out.iter().zip(lw).map(|(g, l)| g * (-0.5 * l).exp()).collect())
    }

    /// Node-value samples of a unit vector given in the isometric frame.
    pub fn samples_from_frame(&self, v: &[C64]) -> Vec<C64> {
        v.iter().zip(self.grid.log_weights()).map(|(x, l)| x * (-0.5 * l).exp()).collect()
    }

    fn with_frame(&self, frame: DMatrix<C64>) -> Self {
        Self { frame, grid: self.grid.clone(), params: self.params }
    }

    fn same_grid(&self, other: &GridOperator) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && *self.grid != *other.grid {
            return Err(FockError::InvalidParams("operators live on different grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &GridOperator) -> Result<Self> {
        self.same_grid(other)?;
        Ok(self.with_frame(&self.frame + &other.frame))
    }

    pub fn sub(&self, other: &GridOperator) -> Result<Self> {
        self.same_grid(other)?;
        Ok(self.with_frame(&self.frame - &other.frame))
    }

    /// `self * other`.
    pub fn compose(&self, other: &GridOperator) -> Result<Self> {
        self.same_grid(other)?;
        Ok(self.with_frame(&self.frame * &other.frame))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.with_frame(self.frame.map(|x| x * c))
    }

    pub fn adjoint(&self) -> Self {
        self.with_frame(self.frame.adjoint())
    }

    /// `M_a A M_b` for node-value multipliers `a`, `b`.
    pub fn sandwich(&self, a: &[f64], b: &[f64]) -> Self {
        let mut frame = self.frame.clone();
        for i in 0..frame.nrows() {
            for k in 0..frame.ncols() {
                frame[(i, k)] *= a[i] * b[k];
            }
        }
        self.with_frame(frame)
    }

    /// Copy with entries coupling nodes farther apart than `radius` removed.
    pub fn truncated(&self, radius: f64) -> Self {
        let nodes = self.grid.nodes();
        let mut frame = self.frame.clone();
        for i in 0..frame.nrows() {
            for k in 0..frame.ncols() {
                if cplx::dist(&nodes[i], &nodes[k]) > radius {
                    frame[(i, k)] = C64::new(0.0, 0.0);
                }
            }
        }
        self.with_frame(frame)
    }

    /// Spectral norm of the frame matrix.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.frame)
    }
}

/// Largest singular value; full decomposition for small matrices, Lanczos
/// otherwise.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    let s = m.map(|x| x / scale);
    let value = if s.nrows().max(s.ncols()) <= SVD_LIMIT {
        s.singular_values().iter().copied().fold(0.0, f64::max)
    } else {
        lanczos_norm(&s)
    };
    value * scale
}

/// Largest singular value by Lanczos on `S^H S` with full
/// reorthogonalization, run on the real form `[[Re, -Im], [Im, Re]]`.
/// Ritz values increase towards the true value, so the result is a lower
/// bound; discretized integral operators have densely packed top spectra,
/// where the last digits converge slowly.
fn lanczos_norm(s: &DMatrix<C64>) -> f64 {
    let (rows, cols) = s.shape();
    let b = DMatrix::<f64>::from_fn(2 * rows, 2 * cols, |i, j| {
        let z = s[(i % rows, j % cols)];
        match (i < rows, j < cols) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let k = 2 * cols;
    let steps = k.min(LANCZOS_STEPS);
    // Deterministic start with no special alignment to the grid.
    let mut v = DVector::from_fn(k, |i, _| 1.0 + 0.37 * ((i * 7919) % 101) as f64 / 101.0);
    v /= v.norm();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut diag: Vec<f64> = Vec::with_capacity(steps);
    let mut off: Vec<f64> = Vec::with_capacity(steps);
    let mut tmp = DVector::<f64>::zeros(2 * rows);
    let mut w = DVector::<f64>::zeros(k);
    let mut last = 0.0;
    for step in 0..steps {
        tmp.gemv(1.0, &b, &v, 0.0);
        w.gemv_tr(1.0, &b, &tmp, 0.0);
        diag.push(v.dot(&w));
        basis.push(v.clone());
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let beta = w.norm();
        let t = DMatrix::from_fn(diag.len(), diag.len(), |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j || j + 1 == i {
                off[i.min(j)]
            } else {
                0.0
            }
        });
        let top = t.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max);
        if beta <= 1e-14 * top.max(f64::MIN_POSITIVE) || (step > 2 && (top - last).abs() <= LANCZOS_TOL * top) {
            return top.sqrt();
        }
        last = top;
        off.push(beta);
        v = &w / beta;
    }
    last.sqrt()
}
