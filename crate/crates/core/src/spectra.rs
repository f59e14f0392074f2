//! Boundary values, essential spectra and essential norms of Toeplitz
//! operators with vanishing-oscillation symbols.
//!
//! Points at infinity are represented by escape schedules: sequences of
//! base points `z_m` with `|z_m|` increasing. Boundary values are read off
//! spheres through the base points.

use nalgebra::{Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::cplx::{self, C64};
use crate::error::{FockError, Result};
use crate::export::{fmt_csv, table_to_csv};
use crate::grid::QuadratureGrid;
use crate::oscillation::{vo_verdict, VoReport, VoSampling, VoVerdict};
use crate::params::FockParams;
use crate::sampling::{ball_samples, sphere_directions};
use crate::symbol::{SymbolFunction, SymbolTag};
use crate::basis::basis_count;
use crate::toeplitz::{assemble_toeplitz, radial_toeplitz_diagonal};

/// Finite set of complex points with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    #[serde(with = "cplx::vec")]
    pub points: Vec<C64>,
    pub multiplicity: Vec<usize>,
}

/// Hausdorff distance between two finite sets of complex numbers.
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let one_way = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

impl PointSet {
    /// Greedy clustering: each value joins the first center within `tol`,
    /// otherwise it opens a new center. Centers are sorted by real then
    /// imaginary part.
    pub fn cluster(values: &[C64], tol: f64) -> Self {
        let mut points: Vec<C64> = Vec::new();
        let mut multiplicity: Vec<usize> = Vec::new();
        for v in values {
            match points.iter().position(|p| (p - v).norm() <= tol) {
                Some(i) => multiplicity[i] += 1,
                None => {
                    points.push(*v);
                    multiplicity.push(1);
                }
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&i, &j| points[i].re.total_cmp(&points[j].re).then(points[i].im.total_cmp(&points[j].im)));
        Self {
            points: order.iter().map(|&i| points[i]).collect(),
            multiplicity: order.iter().map(|&i| multiplicity[i]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hausdorff(&self, other: &[C64]) -> f64 {
        hausdorff(&self.points, other)
    }

    pub fn distance_to(&self, z: C64) -> f64 {
        self.points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> Result<String> {
        table_to_csv(
            &["re", "im", "multiplicity"],
            self.points
                .iter()
                .zip(&self.multiplicity)
                .map(|(p, m)| vec![fmt_csv(p.re), fmt_csv(p.im), m.to_string()]),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleKind {
    Ray,
    Spiral { turns_per_unit: f64 },
    Custom,
}

/// Base points escaping to infinity and the window used to compare limit
/// symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeSchedule {
    pub kind: ScheduleKind,
    #[serde(with = "cplx::nested")]
    pub base_points: Vec<Vec<C64>>,
    pub window_radius: f64,
}

impl EscapeSchedule {
    pub fn custom(base_points: Vec<Vec<C64>>, window_radius: f64) -> Result<Self> {
        Self::validated(ScheduleKind::Custom, base_points, window_radius)
    }

    /// `z_m = radius_m * direction / |direction|`.
    pub fn ray(direction: &[C64], radii: &[f64], window_radius: f64) -> Result<Self> {
        let norm = cplx::norm_sqr(direction).sqrt();
        if norm == 0.0 {
            return Err(FockError::InvalidParams("ray direction must be nonzero".into()));
        }
        let pts = radii.iter().map(|r| direction.iter().map(|c| c * (r / norm)).collect()).collect();
        Self::validated(ScheduleKind::Ray, pts, window_radius)
    }

    /// `z_m = radius_m e^{2 pi i turns * radius_m}` in the first coordinate.
    pub fn spiral(n: usize, radii: &[f64], turns_per_unit: f64, window_radius: f64) -> Result<Self> {
        let pts = radii
            .iter()
            .map(|&r| {
                let mut z = vec![C64::new(0.0, 0.0); n];
                z[0] = C64::from_polar(r, 2.0 * std::f64::consts::PI * turns_per_unit * r);
                z
            })
            .collect();
        Self::validated(ScheduleKind::Spiral { turns_per_unit }, pts, window_radius)
    }

    fn validated(kind: ScheduleKind, base_points: Vec<Vec<C64>>, window_radius: f64) -> Result<Self> {
        if base_points.is_empty() {
            return Err(FockError::InvalidParams("schedule needs at least one base point".into()));
        }
        let n = base_points[0].len();
        if base_points.iter().any(|z| z.len() != n) || n == 0 {
            return Err(FockError::InvalidParams("base points must share a positive dimension".into()));
        }
        let s = Self { kind, base_points, window_radius };
        if s.radii().windows(2).any(|w| w[1] <= w[0]) {
            return Err(FockError::InvalidParams("base point magnitudes must strictly increase".into()));
        }
        if !(window_radius > 0.0) {
            return Err(FockError::InvalidParams("window radius must be positive".into()));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.base_points[0].len()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.base_points.iter().map(|z| cplx::norm_sqr(z).sqrt()).collect()
    }

    pub fn last(&self) -> &[C64] {
        self.base_points.last().expect("validated nonempty")
    }
}

/// Samples of the limit symbol `w -> f(z_m + w)` on the window at the last
/// base point.
pub fn limit_symbol_samples(f: &SymbolFunction, schedule: &EscapeSchedule, samples: usize) -> Vec<C64> {
    let origin = vec![C64::new(0.0, 0.0); schedule.dim()];
    ball_samples(&origin, schedule.window_radius, samples)
        .iter()
        .map(|w| {
            let z: Vec<C64> = schedule.last().iter().zip(w).map(|(a, b)| a + b).collect();
            f.eval(&z)
        })
        .collect()
}

/// Whether two schedules see the same limit symbol on the window.
pub fn schedules_equivalent(
    f: &SymbolFunction,
    a: &EscapeSchedule,
    b: &EscapeSchedule,
    samples: usize,
    tol: f64,
) -> bool {
    let sa = limit_symbol_samples(f, a, samples);
    let sb = limit_symbol_samples(f, b, samples);
    sa.iter().zip(&sb).all(|(x, y)| (x - y).norm() <= tol)
}

/// Clustered boundary values with stabilization diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySet {
    pub points: PointSet,
    /// Hausdorff distance between the value sets of the last two shells.
    pub drift: f64,
    /// Hausdorff distances between consecutive shells.
    pub shell_drifts: Vec<f64>,
    pub radii: Vec<f64>,
    pub cluster_tol: f64,
    /// False when the drift exceeds `cluster_tol`; the points are then a
    /// partial result.
    pub stabilized: bool,
}

impl BoundarySet {
    pub fn require_stable(&self) -> Result<&Self> {
        if !self.stabilized {
            return Err(FockError::NotStabilized { drift: self.drift, tolerance: self.cluster_tol });
        }
        Ok(self)
    }
}

/// Values of `f` on the spheres `|z| = |z_m|` of the schedule, clustered on
/// the outermost sphere.
pub fn boundary_value_set(
    f: &SymbolFunction,
    schedule: &EscapeSchedule,
    angular_samples: usize,
    cluster_tol: f64,
) -> Result<BoundarySet> {
    if angular_samples == 0 {
        return Err(FockError::InvalidParams("angular samples must be positive".into()));
    }
    if !(cluster_tol > 0.0) {
        return Err(FockError::InvalidParams("cluster tolerance must be positive".into()));
    }
    let radii = schedule.radii();
    let dirs = sphere_directions(schedule.dim(), angular_samples);
    let shells: Vec<Vec<C64>> = radii
        .iter()
        .map(|&r| {
            dirs.iter()
                .map(|d| f.eval(&d.iter().map(|c| c * r).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let shell_drifts: Vec<f64> = shells.windows(2).map(|w| hausdorff(&w[0], &w[1])).collect();
    let drift = shell_drifts.last().copied().unwrap_or(0.0);
    let points = PointSet::cluster(shells.last().expect("nonempty schedule"), cluster_tol);
    Ok(BoundarySet { points, drift, shell_drifts, radii, cluster_tol, stabilized: drift < cluster_tol })
}

/// Tolerances shared by the essential-spectrum estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub angular_samples: usize,
    pub cluster_tol: f64,
    /// Ball radius for the oscillation check.
    pub vo_radius: f64,
    pub vo_threshold: f64,
    pub vo_sampling: VoSampling,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            angular_samples: 256,
            cluster_tol: 1e-2,
            vo_radius: 1.0,
            vo_threshold: 0.05,
            vo_sampling: VoSampling::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialSpectrum {
    pub boundary: BoundarySet,
    pub vo: VoReport,
    /// True only when the symbol passed the oscillation check and the
    /// boundary values stabilized.
    pub is_essential_spectrum: bool,
    pub caveat: Option<String>,
}

fn check_vo(f: &SymbolFunction, schedule: &EscapeSchedule, opts: &SpectrumOptions) -> Result<VoReport> {
    vo_verdict(f, schedule.dim(), &schedule.radii(), opts.vo_radius, opts.vo_threshold, opts.vo_sampling)
}

pub fn essential_spectrum_vo(
    f: &SymbolFunction,
    schedule: &EscapeSchedule,
    opts: &SpectrumOptions,
) -> Result<EssentialSpectrum> {
    let vo = check_vo(f, schedule, opts)?;
    let boundary = boundary_value_set(f, schedule, opts.angular_samples, opts.cluster_tol)?;
    let caveat = if vo.verdict != VoVerdict::Vo {
        Some(format!("oscillation check returned {:?}; boundary values are not the essential spectrum", vo.verdict))
    } else if !boundary.stabilized {
        Some(format!("boundary values drift by {:.3e} between the last shells", boundary.drift))
    } else {
        None
    };
    Ok(EssentialSpectrum { is_essential_spectrum: caveat.is_none(), boundary, vo, caveat })
}

fn require_vo(f: &SymbolFunction, schedule: &EscapeSchedule, opts: &SpectrumOptions) -> Result<BoundarySet> {
    let spec = essential_spectrum_vo(f, schedule, opts)?;
    if spec.vo.verdict != VoVerdict::Vo {
        return Err(FockError::NotVanishingOscillation(format!("{:?}", spec.vo.verdict)));
    }
    Ok(spec.boundary)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialNormBounds {
    pub lower: f64,
    pub upper: f64,
    pub drift: f64,
    /// Set when `p != 2` and no norm of `P_alpha` was supplied, so the
    /// `p = 2` value 1 was used.
    pub p2_disclaimer: bool,
}

/// `[S, ||P_alpha|| S]` with `S` the largest boundary modulus; degenerate
/// at `p = 2`.
pub fn essential_norm_bounds(
    f: &SymbolFunction,
    params: &FockParams,
    schedule: &EscapeSchedule,
    opts: &SpectrumOptions,
    projection_norm: Option<f64>,
) -> Result<EssentialNormBounds> {
    let boundary = require_vo(f, schedule, opts)?;
    let s = boundary.points.max_modulus();
    let (factor, disclaimer) = if params.is_hilbert() {
        (1.0, false)
    } else {
        match projection_norm {
            Some(p) if p >= 1.0 => (p, false),
            Some(p) => return Err(FockError::InvalidParams(format!("projection norm {p} must be at least 1"))),
            None => (1.0, true),
        }
    };
    Ok(EssentialNormBounds { lower: s, upper: factor * s, drift: boundary.drift, p2_disclaimer: disclaimer })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FredholmVerdict {
    Fredholm,
    NotFredholm,
    Uncertain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FredholmReport {
    pub verdict: FredholmVerdict,
    pub distance: f64,
    pub margin: f64,
    pub drift: f64,
}

/// Default margin: ten times the drift, but never below the clustering
/// tolerance.
pub fn default_margin(boundary: &BoundarySet) -> f64 {
    (10.0 * boundary.drift).max(boundary.cluster_tol)
}

/// Decides whether `T_f - lambda` is Fredholm from the distance of `lambda`
/// to the boundary values.
pub fn fredholm_test_vo(
    f: &SymbolFunction,
    lambda: C64,
    schedule: &EscapeSchedule,
    opts: &SpectrumOptions,
    margin: Option<f64>,
) -> Result<FredholmReport> {
    let boundary = require_vo(f, schedule, opts)?;
    Ok(classify_fredholm(&boundary, lambda, margin))
}

pub fn classify_fredholm(boundary: &BoundarySet, lambda: C64, margin: Option<f64>) -> FredholmReport {
    let margin = margin.unwrap_or_else(|| default_margin(boundary));
    let drift = boundary.drift;
    let distance = boundary.points.distance_to(lambda);
    let verdict = if distance > margin + drift {
        FredholmVerdict::Fredholm
    } else if distance < margin - drift && distance <= boundary.cluster_tol {
        FredholmVerdict::NotFredholm
    } else {
        FredholmVerdict::Uncertain
    };
    FredholmReport { verdict, distance, margin, drift }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub degree: usize,
    #[serde(with = "cplx::vec")]
    pub eigenvalues: Vec<C64>,
    /// Fraction of eigenvalues within `delta` of the target set.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub delta: f64,
    pub method: String,
    pub entries: Vec<ClusterEntry>,
    pub nondecreasing: bool,
    /// Finite sections of non-radial symbols may have spurious eigenvalues.
    pub pollution_warning: bool,
}

/// Eigenvalues of Toeplitz truncations and their clustering at `target`.
/// Radial symbols use the exact diagonal from one-dimensional radial
/// integrals; other symbols need `grid` and are assembled densely.
pub fn truncation_eigen_cluster(
    f: &SymbolFunction,
    degrees: &[usize],
    params: &FockParams,
    grid: Option<&QuadratureGrid>,
    target: &PointSet,
    delta: f64,
) -> Result<ClusterReport> {
    if !(delta > 0.0) {
        return Err(FockError::InvalidParams("delta must be positive".into()));
    }
    let radial = f.tag() == SymbolTag::Radial;
    let max = degrees.iter().copied().max().unwrap_or(0);
    let diagonal = if radial { Some(radial_toeplitz_diagonal(f, max, params)?) } else { None };
    if !radial {
        grid.ok_or_else(|| FockError::InvalidParams("non-radial symbols need a quadrature grid".into()))?
            .require_exactness(2 * max + 2)?;
    }
    let mut entries = Vec::with_capacity(degrees.len());
    for &degree in degrees {
        let mut eigenvalues: Vec<C64> = match (&diagonal, grid) {
            (Some(d), _) => (0..=degree)
                .flat_map(|m| {
                    let count = basis_count(params.n, m) - if m == 0 { 0 } else { basis_count(params.n, m - 1) };
                    std::iter::repeat_n(d[m], count)
                })
                .collect(),
            (None, Some(grid)) => {
                let t = assemble_toeplitz(f, degree, params, grid)?;
                if t.hermitian_defect() == 0.0 {
                    SymmetricEigen::new(t.entries.clone()).eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect()
                } else {
                    Schur::new(t.entries.clone()).eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
                }
            }
            (None, None) => unreachable!("checked above"),
        };
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let close = eigenvalues.iter().filter(|&&e| target.distance_to(e) <= delta).count();
        let fraction = close as f64 / eigenvalues.len().max(1) as f64;
        entries.push(ClusterEntry { degree, eigenvalues, fraction });
    }
    let nondecreasing = entries.windows(2).all(|w| w[1].fraction >= w[0].fraction);
    let method = if radial { "radial-diagonal" } else { "dense" }.to_string();
    Ok(ClusterReport { delta, method, entries, nondecreasing, pollution_warning: !radial })
}
