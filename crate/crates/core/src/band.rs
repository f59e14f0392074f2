//! Cube lattice, trapezoid partition of unity and band diagnostics for grid
//! operators.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cplx::{self, C64};
use crate::error::{FockError, Result};
use crate::grid_operator::{spectral_norm, GridOperator};

/// Half side of a lattice cube.
const HALF: f64 = 3.0;
/// Lattice period.
const PERIOD: f64 = 6.0;

/// The trapezoid: 1 on `[-2, 2]`, 0 outside `[-4, 4]`, linear in between.
pub fn trapezoid(x: f64) -> f64 {
    ((4.0 - x.abs()) / 2.0).clamp(0.0, 1.0)
}

/// The widened trapezoid: 1 on `[-5, 5]`, 0 outside `[-6, 6]`.
pub fn wide_trapezoid(x: f64) -> f64 {
    (6.0 - x.abs()).clamp(0.0, 1.0)
}

fn real_coords(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// The cubes `[-3,3)^{2n} + sigma`, `sigma in 6 Z^{2n}`, whose inflation
/// `Omega_3` meets `[-extent, extent]^{2n}`; these are the only cubes whose
/// cutoff functions are nonzero on that box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeLattice {
    pub n: usize,
    pub extent: f64,
    /// Lattice offsets `sigma_j / 6`, ordered by `|sigma_j|` then lexicographically.
    pub offsets: Vec<Vec<i64>>,
}

pub fn cube_lattice(n: usize, extent: f64) -> Result<CubeLattice> {
    if n == 0 {
        return Err(FockError::InvalidParams("dimension must be positive".into()));
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err(FockError::InvalidParams(format!("lattice extent {extent} must be positive")));
    }
    // sigma + [-6, 6] meets [-extent, extent] iff |sigma| <= extent + 6.
    let reach = ((extent + HALF + 3.0) / PERIOD).floor() as i64;
    let side = (2 * reach + 1) as usize;
    let dims = 2 * n;
    let total = side.checked_pow(dims as u32).filter(|&t| t <= 2_000_000).ok_or_else(|| {
        FockError::TooLarge(usize::MAX)
    })?;
    let mut offsets = Vec::with_capacity(total);
    for code in 0..total {
        let mut rest = code;
        let mut v = vec![0i64; dims];
        for slot in v.iter_mut().rev() {
            *slot = (rest % side) as i64 - reach;
            rest /= side;
        }
        offsets.push(v);
    }
    offsets.sort_by(|a, b| {
        let na: i64 = a.iter().map(|x| x * x).sum();
        let nb: i64 = b.iter().map(|x| x * x).sum();
        na.cmp(&nb).then_with(|| a.cmp(b))
    });
    Ok(CubeLattice { n, extent, offsets })
}

impl CubeLattice {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn sigma(&self, j: usize) -> Vec<f64> {
        self.offsets[j].iter().map(|&k| k as f64 * PERIOD).collect()
    }

    /// Euclidean diameter `6 sqrt(2n)` of every cube.
    pub fn diameter(&self) -> f64 {
        2.0 * HALF * ((2 * self.n) as f64).sqrt()
    }

    /// Lattice offset of the cube containing `x` (real coordinates).
    pub fn offset_of(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|&c| ((c + HALF) / PERIOD).floor() as i64).collect()
    }

    /// Index `j` of the cube containing `z`, if it is enumerated.
    pub fn cube_of(&self, z: &[C64]) -> Option<usize> {
        let key = self.offset_of(&real_coords(z));
        self.position(&key)
    }

    fn position(&self, key: &[i64]) -> Option<usize> {
        self.offsets.iter().position(|o| o == key)
    }

    pub fn in_cube(&self, j: usize, z: &[C64]) -> bool {
        let x = real_coords(z);
        self.sigma(j).iter().zip(&x).all(|(s, c)| *c >= s - HALF && *c < s + HALF)
    }

    /// Whether `z` lies in `Omega_k(B_j)`, the closed sup-norm `k`-neighbourhood.
    pub fn in_omega(&self, j: usize, k: u32, z: &[C64]) -> bool {
        let x = real_coords(z);
        let r = HALF + k as f64;
        self.sigma(j).iter().zip(&x).all(|(s, c)| (c - s).abs() <= r)
    }
}

/// `phi_{j,t}` and `psi_{j,t}` over a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionFamily {
    pub lattice: CubeLattice,
    pub t: f64,
}

pub fn partition_functions(lattice: &CubeLattice, t: f64) -> Result<PartitionFamily> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(FockError::InvalidParams(format!("scale t = {t} must lie in (0, 1]")));
    }
    Ok(PartitionFamily { lattice: lattice.clone(), t })
}

fn product_profile(x: &[f64], sigma: &[i64], profile: fn(f64) -> f64) -> f64 {
    x.iter().zip(sigma).map(|(c, &s)| profile(c - s as f64 * PERIOD)).product()
}

impl PartitionFamily {
    fn scaled(&self, z: &[C64]) -> Vec<f64> {
        real_coords(z).iter().map(|c| c * self.t).collect()
    }

    pub fn phi_offset(&self, sigma: &[i64], z: &[C64]) -> f64 {
        product_profile(&self.scaled(z), sigma, trapezoid)
    }

    pub fn psi_offset(&self, sigma: &[i64], z: &[C64]) -> f64 {
        product_profile(&self.scaled(z), sigma, wide_trapezoid)
    }

    pub fn phi(&self, j: usize, z: &[C64]) -> f64 {
        self.phi_offset(&self.lattice.offsets[j], z)
    }

    pub fn psi(&self, j: usize, z: &[C64]) -> f64 {
        self.psi_offset(&self.lattice.offsets[j], z)
    }

    /// Lattice offsets with `phi_{j,t}(z) > 0`, with the values. At most two
    /// candidates per real coordinate.
    pub fn phi_support(&self, z: &[C64]) -> Vec<(Vec<i64>, f64)> {
        let x = self.scaled(z);
        let mut out: Vec<(Vec<i64>, f64)> = vec![(Vec::new(), 1.0)];
        for &c in &x {
            let base = (c / PERIOD).floor() as i64;
            let mut next = Vec::with_capacity(out.len() * 2);
            for (prefix, v) in &out {
                for s in [base, base + 1] {
                    let f = trapezoid(c - s as f64 * PERIOD);
                    if f > 0.0 {
                        let mut key = prefix.clone();
                        key.push(s);
                        next.push((key, v * f));
                    }
                }
            }
            out = next;
        }
        out
    }

    /// `sum_j phi_{j,t}(z)`.
    pub fn phi_sum(&self, z: &[C64]) -> f64 {
        self.phi_support(z).iter().map(|(_, v)| v).sum()
    }

    /// `r_t = 8 sqrt(2n) / t`, the diameter of `supp phi_{j,t}`.
    pub fn support_diameter(&self) -> f64 {
        8.0 * ((2 * self.lattice.n) as f64).sqrt() / self.t
    }

    /// Coupling `G_ik = sum_j phi_{j,t}(z_i) * weight(psi_{j,t}(z_k))`.
    fn coupling(&self, nodes: &[Vec<C64>], psi_weight: fn(f64) -> f64) -> DMatrix<f64> {
        let m = nodes.len();
        let mut g = DMatrix::<f64>::zeros(m, m);
        let scaled: Vec<Vec<f64>> = nodes.iter().map(|z| self.scaled(z)).collect();
        for i in 0..m {
            for (sigma, a) in self.phi_support(&nodes[i]) {
                for k in 0..m {
                    let b = psi_weight(product_profile(&scaled[k], &sigma, wide_trapezoid));
                    if b != 0.0 {
                        g[(i, k)] += a * b;
                    }
                }
            }
        }
        g
    }
}

/// Largest node distance coupled by an entry of magnitude above
/// `threshold * ||A||`.
pub fn band_width(a: &GridOperator, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(FockError::InvalidParams(format!("threshold {threshold} must be positive")));
    }
    let cut = threshold * a.norm();
    let nodes = a.grid().nodes();
    let s = a.frame();
    let mut width: f64 = 0.0;
    for i in 0..s.nrows() {
        for k in 0..s.ncols() {
            if s[(i, k)].norm() > cut {
                width = width.max(cplx::dist(&nodes[i], &nodes[k]));
            }
        }
    }
    Ok(width)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub x: f64,
    pub value: f64,
    /// Largest single term `||M_phi A M_{1-psi}||`, when measured.
    pub sup_term: Option<f64>,
}

/// Sampled decay curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    /// Name of the sample variable (`t` or `m`).
    pub variable: String,
    pub points: Vec<DecayPoint>,
    /// Values strictly decrease along the listed order.
    pub strictly_decreasing: bool,
    /// Set when `p != 2`: norms are the `p = 2` values.
    pub p2_norm_disclaimer: bool,
}

impl DecayProfile {
    fn new(variable: &str, points: Vec<DecayPoint>, p: f64) -> Self {
        let strictly_decreasing = points.windows(2).all(|w| w[1].value < w[0].value);
        Self { variable: variable.into(), points, strictly_decreasing, p2_norm_disclaimer: p != 2.0 }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| FockError::Parse(e.to_string());
        w.write_record([self.variable.as_str(), "value", "sup_term"]).map_err(csv_err)?;
        for p in &self.points {
            w.write_record([
                crate::export::fmt_csv(p.x),
                crate::export::fmt_csv(p.value),
                p.sup_term.map(crate::export::fmt_csv).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| FockError::Parse(e.to_string()))?)
            .map_err(|e| FockError::Parse(e.to_string()))
    }
}

fn check_extent(a: &GridOperator, lattice: &CubeLattice, t: f64) -> Result<()> {
    let extent = a.grid().extent();
    if extent < HALF / t {
        return Err(FockError::ExtentTooSmall {
            extent,
            reason: format!("the scaled central cube at t = {t} reaches {}", HALF / t),
        });
    }
    if lattice.extent < t * extent {
        return Err(FockError::ExtentTooSmall {
            extent: lattice.extent,
            reason: format!("lattice must cover the scaled grid extent {}", t * extent),
        });
    }
    Ok(())
}

fn sandwich_sum(a: &GridOperator, family: &PartitionFamily, psi_weight: fn(f64) -> f64) -> DMatrix<C64> {
    let g = family.coupling(a.grid().nodes(), psi_weight);
    a.frame().zip_map(&g, |s, c| s * c)
}

/// Norm of the single term `M_{phi_j} A M_{1 - psi_j}`, restricted to its
/// nonzero rows and columns.
fn term_norm(a: &GridOperator, family: &PartitionFamily, sigma: &[i64]) -> f64 {
    let nodes = a.grid().nodes();
    let rows: Vec<(usize, f64)> = nodes
        .iter()
        .enumerate()
        .map(|(i, z)| (i, family.phi_offset(sigma, z)))
        .filter(|(_, v)| *v > 0.0)
        .collect();
    let cols: Vec<(usize, f64)> = nodes
        .iter()
        .enumerate()
        .map(|(k, z)| (k, 1.0 - family.psi_offset(sigma, z)))
        .filter(|(_, v)| *v > 0.0)
        .collect();
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    let s = a.frame();
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| s[(rows[r].0, cols[c].0)] * (rows[r].1 * cols[c].1));
    spectral_norm(&(&sub * sub.adjoint())).sqrt()
}

/// `D(t) = ||sum_j M_{phi_{j,t}} A M_{1 - psi_{j,t}}||` for each `t`.
pub fn band_decay_profile(a: &GridOperator, t_values: &[f64], lattice: &CubeLattice, p: f64) -> Result<DecayProfile> {
    if t_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(FockError::InvalidParams("t values must be strictly descending".into()));
    }
    let mut points = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let family = partition_functions(lattice, t)?;
        check_extent(a, lattice, t)?;
        let d = spectral_norm(&sandwich_sum(a, &family, |psi| 1.0 - psi));
        let mut sup_term: f64 = 0.0;
        let mut seen: Vec<Vec<i64>> = Vec::new();
        for z in a.grid().nodes() {
            for (sigma, _) in family.phi_support(z) {
                if !seen.contains(&sigma) {
                    sup_term = sup_term.max(term_norm(a, &family, &sigma));
                    seen.push(sigma);
                }
            }
        }
        points.push(DecayPoint { x: t, value: d, sup_term: Some(sup_term) });
    }
    Ok(DecayProfile::new("t", points, p))
}

/// `A_m = sum_j M_{phi_{j,1/m}} A M_{psi_{j,1/m}}`.
pub fn band_truncation(a: &GridOperator, m: usize, lattice: &CubeLattice) -> Result<GridOperator> {
    if m == 0 {
        return Err(FockError::InvalidParams("m must be positive".into()));
    }
    let t = 1.0 / m as f64;
    check_extent(a, lattice, t)?;
    let family = partition_functions(lattice, t)?;
    let frame = sandwich_sum(a, &family, |psi| psi);
    GridOperator::from_frame(a.grid().clone(), *a.params(), frame)
}

/// `||A - A_m||` for each `m`, as a profile in `m`.
pub fn truncation_error_profile(a: &GridOperator, ms: &[usize], lattice: &CubeLattice) -> Result<DecayProfile> {
    let mut points = Vec::with_capacity(ms.len());
    for &m in ms {
        let am = band_truncation(a, m, lattice)?;
        points.push(DecayPoint { x: m as f64, value: a.sub(&am)?.norm(), sup_term: None });
    }
    Ok(DecayProfile::new("m", points, a.params().p))
}
