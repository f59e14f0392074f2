//! Orthonormal monomials `e_k(z) = sqrt(alpha^|k| / k!) z^k` of `F_alpha^2`
//! and matrices indexed by them.

use nalgebra::DMatrix;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::cplx::{ReIm, C64};
use crate::grid::QuadratureGrid;
use crate::params::FockParams;
use crate::quadrature::ln_factorials;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex(pub Vec<u32>);

impl BasisIndex {
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// All multi-indices in `n` variables of total degree `<= max_degree`,
/// ordered by degree and then lexicographically.
pub fn enumerate_indices(n: usize, max_degree: usize) -> Vec<BasisIndex> {
    let mut out = Vec::with_capacity(basis_count(n, max_degree));
    for d in 0..=max_degree {
        let mut current = vec![0u32; n];
        push_compositions(&mut out, &mut current, 0, d as u32);
    }
    out
}

fn push_compositions(out: &mut Vec<BasisIndex>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(BasisIndex(current.clone()));
        return;
    }
    for k in 0..=remaining {
        current[pos] = k;
        push_compositions(out, current, pos + 1, remaining - k);
    }
}

/// `C(N + n, n)`, the number of multi-indices of degree at most `N`.
pub fn basis_count(n: usize, max_degree: usize) -> usize {
    let mut c: u128 = 1;
    for i in 1..=n as u128 {
        c = c * (max_degree as u128 + i) / i;
    }
    c as usize
}

/// Position of a multi-index in [`enumerate_indices`] order.
pub fn index_position(indices: &[BasisIndex], k: &BasisIndex) -> Option<usize> {
    let start = if k.degree() == 0 { 0 } else { basis_count(k.dim(), k.degree() - 1) };
    indices[start..].iter().position(|x| x == k).map(|p| p + start)
}

pub fn basis_eval(k: &BasisIndex, z: &[C64], params: &FockParams) -> C64 {
    let mut v = C64::new(1.0, 0.0);
    for (&kc, zc) in k.0.iter().zip(z) {
        let mut term = C64::new(1.0, 0.0);
        for j in 1..=kc {
            term *= zc * (params.alpha / j as f64).sqrt();
        }
        v *= term;
    }
    v
}

/// Nodes-by-basis matrix `sqrt(w_i) e_k(z_i)` split into real and imaginary
/// parts. Evaluated in log space so that high degrees at far nodes neither
/// overflow nor lose the tiny weights.
pub(crate) fn weighted_basis(
    grid: &QuadratureGrid,
    indices: &[BasisIndex],
    alpha: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let max_k = indices
        .iter()
        .flat_map(|k| k.0.iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let lf = ln_factorials(max_k);
    let ln_alpha = alpha.ln();
    let rows = grid.len();
    let cols = indices.len();
    let mut re = DMatrix::<f64>::zeros(rows, cols);
    let mut im = DMatrix::<f64>::zeros(rows, cols);
    let n = grid.dim();
    let mut ln_r = vec![0.0; n];
    let mut arg = vec![0.0; n];
    for (i, (z, lw)) in grid.nodes().iter().zip(grid.log_weights()).enumerate() {
        for c in 0..n {
            ln_r[c] = z[c].norm().ln();
            arg[c] = z[c].arg();
        }
        for (j, k) in indices.iter().enumerate() {
            let mut log_mag = 0.5 * lw;
            let mut phase = 0.0;
            let mut zero = false;
            for c in 0..n {
                let kc = k.0[c] as usize;
                if kc == 0 {
                    continue;
                }
                if ln_r[c] == f64::NEG_INFINITY {
                    zero = true;
                    break;
                }
                log_mag += kc as f64 * (0.5 * ln_alpha + ln_r[c]) - 0.5 * lf[kc];
                phase += kc as f64 * arg[c];
            }
            if zero {
                continue;
            }
            let mag = log_mag.exp();
            re[(i, j)] = mag * phase.cos();
            im[(i, j)] = mag * phase.sin();
        }
    }
    (re, im)
}

/// A truncation of an operator on `F_alpha^2` to degrees `<= truncation_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    pub entries: DMatrix<C64>,
    pub params: FockParams,
    pub truncation_degree: usize,
    pub indices: Vec<BasisIndex>,
}

impl BasisMatrix {
    pub fn new(entries: DMatrix<C64>, params: FockParams, truncation_degree: usize) -> Self {
        let indices = enumerate_indices(params.n, truncation_degree);
        assert_eq!(entries.nrows(), indices.len(), "basis matrix rows must match the index count");
        assert_eq!(entries.ncols(), indices.len(), "basis matrix columns must match the index count");
        Self { entries, params, truncation_degree, indices }
    }

    pub fn identity(params: FockParams, truncation_degree: usize) -> Self {
        let k = basis_count(params.n, truncation_degree);
        Self::new(DMatrix::identity(k, k), params, truncation_degree)
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Compression to a smaller truncation degree (a leading block).
    pub fn compress(&self, degree: usize) -> BasisMatrix {
        assert!(degree <= self.truncation_degree);
        let k = basis_count(self.params.n, degree);
        BasisMatrix::new(self.entries.view((0, 0), (k, k)).into_owned(), self.params, degree)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.entries.diagonal().iter().copied().collect()
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).camax()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                if j != k {
                    m = m.max(self.entries[(j, k)].norm());
                }
            }
        }
        m
    }

    pub fn frobenius_distance(&self, other: &BasisMatrix) -> f64 {
        (&self.entries - &other.entries).norm()
    }
}

impl Serialize for BasisMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<ReIm>> = (0..self.entries.nrows())
            .map(|j| (0..self.entries.ncols()).map(|k| self.entries[(j, k)].into()).collect())
            .collect();
        let mut st = s.serialize_struct("BasisMatrix", 4)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("truncation_degree", &self.truncation_degree)?;
        st.serialize_field("indices", &self.indices)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}
