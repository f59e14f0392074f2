//! Lower norms `nu(A|_F)` and their localized versions `nu_t(A|_F)`.

use nalgebra::{DMatrix, DVector, SVD};
use serde::Serialize;

use crate::basis::BasisMatrix;
use crate::cplx::{self, C64};
use crate::error::{FockError, Result};
use crate::grid_operator::GridOperator;

/// An operator with an orthonormal frame, so that singular values of the
/// frame matrix are the `p = 2` quantities.
pub trait FramedOperator {
    fn frame(&self) -> &DMatrix<C64>;
    /// Locations of the frame coordinates, when they have any.
    fn points(&self) -> Option<&[Vec<C64>]>;
    /// Converts a frame vector to the natural representation (node values
    /// or basis coefficients).
    fn to_samples(&self, v: &[C64]) -> Vec<C64>;
}

impl FramedOperator for BasisMatrix {
    fn frame(&self) -> &DMatrix<C64> {
        &self.entries
    }

    fn points(&self) -> Option<&[Vec<C64>]> {
        None
    }

    fn to_samples(&self, v: &[C64]) -> Vec<C64> {
        v.to_vec()
    }
}

impl FramedOperator for GridOperator {
    fn frame(&self) -> &DMatrix<C64> {
        GridOperator::frame(self)
    }

    fn points(&self) -> Option<&[Vec<C64>]> {
        Some(self.grid().nodes())
    }

    fn to_samples(&self, v: &[C64]) -> Vec<C64> {
        self.samples_from_frame(v)
    }
}

/// Support mask `F` over the frame coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportMask(pub Vec<bool>);

impl SupportMask {
    pub fn full(dim: usize) -> Self {
        Self(vec![true; dim])
    }

    /// Nodes inside the closed ball `B(center, radius)`.
    pub fn ball(points: &[Vec<C64>], center: &[C64], radius: f64) -> Self {
        Self(points.iter().map(|z| cplx::dist(z, center) <= radius).collect())
    }

    pub fn intersect(&self, other: &SupportMask) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| *a && *b).collect())
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_subset_of(&self, other: &SupportMask) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| !*a || *b)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerNormReport {
    pub value: f64,
    pub support: SupportMask,
    /// Unit-norm minimizer in the natural representation of the operator.
    #[serde(with = "cplx::vec")]
    pub minimizer: Vec<C64>,
    /// `||A f||` for the minimizer, recomputed in the frame.
    pub residual: f64,
    pub method: String,
    /// Center of the ball that attained a localized minimum.
    #[serde(with = "cplx::opt_vec")]
    pub center: Option<Vec<C64>>,
}

fn smallest_singular(sub: DMatrix<C64>) -> (f64, DVector<C64>) {
    let cols = sub.ncols();
    // Reduce tall matrices to their triangular factor first.
    let square = if sub.nrows() > cols { sub.qr().r() } else { sub };
    let svd = SVD::new(square, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    if sv.len() < cols {
        // Fewer rows than columns: the compression has a kernel.
        let k = kernel_vector(&v_t, cols);
        return (0.0, k);
    }
    let (idx, &value) = sv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("nonempty support");
    let v = v_t.row(idx).adjoint();
    (value, v.into_owned())
}

/// Unit vector orthogonal to the rows of `v_t`.
fn kernel_vector(v_t: &DMatrix<C64>, cols: usize) -> DVector<C64> {
    for e in 0..cols {
        let mut x = DVector::<C64>::zeros(cols);
        x[e] = C64::new(1.0, 0.0);
        for r in 0..v_t.nrows() {
            let row = v_t.row(r).adjoint();
            let c = row.dotc(&x);
            x -= row * c;
        }
        let n = x.norm();
        if n > 1e-8 {
            return x / C64::new(n, 0.0);
        }
    }
    unreachable!("a wide matrix has a nontrivial kernel")
}

/// `nu(A|_F) = inf { ||A f|| : ||f|| = 1, supp f in F }` at `p = 2`.
pub fn lower_norm<A: FramedOperator + ?Sized>(a: &A, mask: &SupportMask) -> Result<LowerNormReport> {
    let frame = a.frame();
    if mask.0.len() != frame.ncols() {
        return Err(FockError::LengthMismatch { expected: frame.ncols(), got: mask.0.len() });
    }
    let cols: Vec<usize> = (0..frame.ncols()).filter(|&k| mask.0[k]).collect();
    if cols.is_empty() {
        return Err(FockError::EmptySupport);
    }
    let sub = frame.select_columns(&cols);
    let (value, v) = smallest_singular(sub);
    let mut full = vec![C64::new(0.0, 0.0); frame.ncols()];
    for (slot, x) in cols.iter().zip(v.iter()) {
        full[*slot] = *x;
    }
    let residual = (frame * DVector::from_column_slice(&full)).norm();
    Ok(LowerNormReport {
        value,
        support: mask.clone(),
        minimizer: a.to_samples(&full),
        residual,
        method: "smallest singular value of the column compression".into(),
        center: None,
    })
}

/// `r_t = 8 sqrt(2n) / t`.
pub fn localization_radius(n: usize, t: f64) -> f64 {
    8.0 * ((2 * n) as f64).sqrt() / t
}

/// Square lattice of search centers with a given spacing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterLattice {
    pub spacing: f64,
    #[serde(with = "cplx::nested")]
    pub points: Vec<Vec<C64>>,
}

impl CenterLattice {
    /// Centers `spacing * Z^{2n}` inside `[-extent, extent]^{2n}`.
    pub fn covering(n: usize, extent: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && extent >= 0.0) {
            return Err(FockError::InvalidParams("spacing must be positive".into()));
        }
        let reach = (extent / spacing).floor() as i64;
        let side = (2 * reach + 1) as usize;
        let dims = 2 * n;
        let total = side.pow(dims as u32);
        let mut points = Vec::with_capacity(total);
        for code in 0..total {
            let mut rest = code;
            let mut coords = vec![0.0; dims];
            for c in coords.iter_mut().rev() {
                *c = ((rest % side) as i64 - reach) as f64 * spacing;
                rest /= side;
            }
            points.push((0..n).map(|i| C64::new(coords[2 * i], coords[2 * i + 1])).collect());
        }
        Ok(Self { spacing, points })
    }
}

/// `nu_t(A|_F) = min_w nu(A|_{F cap B(w, r_t)})` over the given centers.
pub fn localized_lower_norm<A: FramedOperator + ?Sized>(
    a: &A,
    mask: &SupportMask,
    t: f64,
    centers: &CenterLattice,
) -> Result<LowerNormReport> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(FockError::InvalidParams(format!("scale t = {t} must lie in (0, 1]")));
    }
    let points = a
        .points()
        .ok_or_else(|| FockError::InvalidParams("localization needs an operator with node positions".into()))?;
    if mask.count() == 0 {
        return Err(FockError::EmptySupport);
    }
    let n = points.first().map_or(1, |z| z.len());
    let r = localization_radius(n, t);
    if centers.spacing > r / 2.0 {
        return Err(FockError::CentersTooSparse { spacing: centers.spacing, limit: r / 2.0 });
    }
    let mut best: Option<LowerNormReport> = None;
    for w in &centers.points {
        let local = mask.intersect(&SupportMask::ball(points, w, r));
        if local.count() == 0 {
            continue;
        }
        let mut rep = lower_norm(a, &local)?;
        if best.as_ref().is_none_or(|b| rep.value < b.value) {
            rep.center = Some(w.clone());
            best = Some(rep);
        }
    }
    let mut rep = best.ok_or(FockError::EmptySupport)?;
    rep.method = format!("minimum over {} centers of balls with radius {r}", centers.points.len());
    Ok(rep)
}
