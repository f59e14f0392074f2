//! Weighted shifts `(C_z f)(w) = f(w - z) e^{alpha <w,z> - alpha |z|^2 / 2}`.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::{enumerate_indices, BasisMatrix};
use crate::cplx::{self, C64};
use crate::error::{FockError, Result};
use crate::grid::QuadratureGrid;
use crate::grid_operator::GridOperator;
use crate::params::FockParams;
use crate::quadrature::ln_factorials;

/// Column-0 leakage above which a basis shift is rejected by default.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-6;

/// `C_z f` as a function, for any `f` given pointwise.
pub fn shifted_function<F>(f: F, z: Vec<C64>, alpha: f64) -> impl Fn(&[C64]) -> C64
where
    F: Fn(&[C64]) -> C64,
{
    let z_sq = cplx::norm_sqr(&z);
    move |w: &[C64]| {
        let moved: Vec<C64> = w.iter().zip(&z).map(|(a, b)| a - b).collect();
        f(&moved) * (alpha * cplx::inner(w, &z) - alpha * z_sq / 2.0).exp()
    }
}

/// Matrix of `C_z` on `F_alpha^2` in one variable, degrees `0..=degree`.
///
/// With `b = sqrt(alpha) z`, `C_z` maps `e_0` to the normalized kernel
/// `e^{-|b|^2/2} sum_j conj(b)^j / sqrt(j!) e_j` and intertwines raising
/// with `sqrt(alpha) w - b`, so it is the displacement with parameter
/// `conj(b)`. Its entries are
/// `sqrt(k!/j!) conj(b)^{j-k} e^{-|b|^2/2} L_k^{(j-k)}(|b|^2)` for `j >= k`
/// and `sqrt(j!/k!) (-b)^{k-j} e^{-|b|^2/2} L_j^{(k-j)}(|b|^2)` otherwise.
pub fn shift_matrix_1d(z: C64, alpha: f64, degree: usize) -> DMatrix<C64> {
    let b = z * alpha.sqrt();
    let x = b.norm_sqr();
    let lf = ln_factorials(degree);
    let size = degree + 1;
    let mut m = DMatrix::<C64>::zeros(size, size);
    for d in 0..size {
        // L_n^{(d)}(x) for n = 0..size-d by the three-term recurrence.
        let count = size - d;
        let mut lag = Vec::with_capacity(count);
        lag.push(1.0);
        if count > 1 {
            lag.push(1.0 + d as f64 - x);
        }
        for n in 1..count.saturating_sub(1) {
            let next = ((2 * n + 1 + d) as f64 - x) * lag[n] - (n + d) as f64 * lag[n - 1];
            lag.push(next / (n + 1) as f64);
        }
        let below = if d == 0 { C64::new(1.0, 0.0) } else { b.conj().powu(d as u32) };
        let above = if d == 0 { C64::new(1.0, 0.0) } else { (-b).powu(d as u32) };
        for (lo, l) in lag.iter().enumerate() {
            let hi = lo + d;
            let scale = (-x / 2.0 + 0.5 * (lf[lo] - lf[hi])).exp() * l;
            m[(hi, lo)] = below * scale;
            if d > 0 {
                m[(lo, hi)] = above * scale;
            }
        }
    }
    m
}

/// Basis truncation of `C_z` with its leakage report.
#[derive(Debug, Clone, Serialize)]
pub struct BasisShift {
    pub matrix: BasisMatrix,
    /// `1 - ||column k||^2` for every column of the truncation.
    pub column_leakage: Vec<f64>,
}

impl BasisShift {
    /// Leakage of the image of the constant function, the quantity checked
    /// against the threshold.
    pub fn leakage(&self) -> f64 {
        self.column_leakage[0]
    }
}

/// Compression of `C_z` to degrees `<= degree`, rejected when more than
/// `threshold` of the mass of `C_z 1` falls outside the truncation.
pub fn basis_shift(z: &[C64], degree: usize, params: &FockParams, threshold: f64) -> Result<BasisShift> {
    if z.len() != params.n {
        return Err(FockError::LengthMismatch { expected: params.n, got: z.len() });
    }
    let factors: Vec<DMatrix<C64>> = z.iter().map(|&zc| shift_matrix_1d(zc, params.alpha, degree)).collect();
    let indices = enumerate_indices(params.n, degree);
    let k = indices.len();
    let entries = DMatrix::from_fn(k, k, |r, s| {
        let (a, b) = (&indices[r].0, &indices[s].0);
        factors
            .iter()
            .enumerate()
            .map(|(c, f)| f[(a[c] as usize, b[c] as usize)])
            .product()
    });
    let column_leakage: Vec<f64> = (0..k).map(|s| 1.0 - entries.column(s).norm_squared()).collect();
    if column_leakage[0] > threshold {
        return Err(FockError::TruncationLeakage { leakage: column_leakage[0], threshold });
    }
    Ok(BasisShift { matrix: BasisMatrix::new(entries, *params, degree), column_leakage })
}

/// `A_z = C_z A C_{-z}` compressed from `a`'s degree to `out_degree`.
pub fn conjugate_by_shift(a: &BasisMatrix, z: &[C64], out_degree: usize, threshold: f64) -> Result<BasisMatrix> {
    if out_degree > a.truncation_degree {
        return Err(FockError::InvalidParams(format!(
            "output degree {out_degree} exceeds the input degree {}",
            a.truncation_degree
        )));
    }
    let minus: Vec<C64> = z.iter().map(|c| -c).collect();
    let cz = basis_shift(z, a.truncation_degree, &a.params, threshold)?.matrix.entries;
    let cmz = basis_shift(&minus, a.truncation_degree, &a.params, threshold)?.matrix.entries;
    let k = crate::basis::basis_count(a.params.n, out_degree);
    let left = cz.rows(0, k);
    let right = cmz.columns(0, k);
    Ok(BasisMatrix::new(left * &a.entries * right, a.params, out_degree))
}

/// Requested representation for [`shift_operator`].
#[derive(Debug, Clone)]
pub enum ShiftRep {
    Basis { degree: usize, threshold: f64 },
    Grid(Arc<QuadratureGrid>),
}

#[derive(Debug, Clone)]
pub enum ShiftOperator {
    Basis(BasisShift),
    Grid(GridOperator),
}

pub fn shift_operator(z: &[C64], rep: &ShiftRep, params: &FockParams) -> Result<ShiftOperator> {
    match rep {
        ShiftRep::Basis { degree, threshold } => Ok(ShiftOperator::Basis(basis_shift(z, *degree, params, *threshold)?)),
        ShiftRep::Grid(grid) => Ok(ShiftOperator::Grid(GridOperator::shift(grid.clone(), *params, z)?)),
    }
}

/// Phase `e^{(alpha/2)(<w2,w1> - <w1,w2>)}` in `C_{w1} C_{w2} = phase * C_{w1+w2}`.
pub fn composition_phase(w1: &[C64], w2: &[C64], alpha: f64) -> C64 {
    (alpha / 2.0 * (cplx::inner(w2, w1) - cplx::inner(w1, w2))).exp()
}
