//! Local oscillation `Osc_z^r(f) = sup { |f(z) - f(w)| : |z - w| <= r }`,
//! vanishing-oscillation verdicts and the Berezin-transform route.

use serde::{Deserialize, Serialize};

use crate::cplx::C64;
use crate::error::{FockError, Result};
use crate::export::{fmt_csv, table_to_csv};
use crate::grid::QuadratureGrid;
use crate::params::FockParams;
use crate::sampling::{ball_samples, ball_volume, sphere_directions};
use crate::spectra::{boundary_value_set, BoundarySet, EscapeSchedule};
use crate::symbol::SymbolFunction;
use crate::toeplitz::berezin_symbol;

/// Fewest ball samples accepted by [`oscillation`].
pub const MIN_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationSample {
    /// Largest sampled `|f(z) - f(w)|`, a lower bound for the supremum.
    pub value: f64,
    pub samples: usize,
    /// Samples per unit volume of the ball.
    pub density: f64,
}

/// Oscillation over a given point set.
pub fn oscillation_on(f: &SymbolFunction, z: &[C64], points: &[Vec<C64>]) -> f64 {
    let fz = f.eval(z);
    points.iter().map(|w| (fz - f.eval(w)).norm()).fold(0.0, f64::max)
}

pub fn oscillation(f: &SymbolFunction, z: &[C64], r: f64, samples: usize) -> Result<OscillationSample> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(FockError::InvalidParams(format!("radius {r} must be positive")));
    }
    if samples < MIN_SAMPLES {
        return Err(FockError::InvalidParams(format!("at least {MIN_SAMPLES} samples required, got {samples}")));
    }
    let pts = ball_samples(z, r, samples);
    Ok(OscillationSample {
        value: oscillation_on(f, z, &pts),
        samples,
        density: samples as f64 / ball_volume(z.len(), r),
    })
}

/// Worst oscillation over base points on expanding spheres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationCurve {
    pub r: f64,
    pub magnitudes: Vec<f64>,
    pub values: Vec<f64>,
    pub samples_per_ball: usize,
    pub base_points_per_shell: usize,
}

impl OscillationCurve {
    pub fn to_csv(&self) -> Result<String> {
        table_to_csv(
            &["abs_z", "osc"],
            self.magnitudes.iter().zip(&self.values).map(|(m, v)| vec![fmt_csv(*m), fmt_csv(*v)]),
        )
    }

    pub fn tail(&self, k: usize) -> &[f64] {
        &self.values[self.values.len().saturating_sub(k)..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoVerdict {
    Vo,
    NotVo,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoReport {
    pub verdict: VoVerdict,
    pub threshold: f64,
    pub curve: OscillationCurve,
}

/// Sampling density used by [`vo_verdict`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoSampling {
    pub samples_per_ball: usize,
    pub base_points_per_shell: usize,
}

impl Default for VoSampling {
    fn default() -> Self {
        Self { samples_per_ball: 128, base_points_per_shell: 16 }
    }
}

pub fn oscillation_curve(
    f: &SymbolFunction,
    n: usize,
    radii: &[f64],
    r: f64,
    sampling: VoSampling,
) -> Result<OscillationCurve> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 0.0 {
        return Err(FockError::InvalidParams("radii must be nonnegative and strictly increasing".into()));
    }
    let dirs = sphere_directions(n, sampling.base_points_per_shell);
    let mut values = Vec::with_capacity(radii.len());
    for &big_r in radii {
        let mut worst: f64 = 0.0;
        for d in &dirs {
            let z: Vec<C64> = d.iter().map(|c| c * big_r).collect();
            worst = worst.max(oscillation(f, &z, r, sampling.samples_per_ball)?.value);
        }
        values.push(worst);
    }
    Ok(OscillationCurve {
        r,
        magnitudes: radii.to_vec(),
        values,
        samples_per_ball: sampling.samples_per_ball,
        base_points_per_shell: sampling.base_points_per_shell,
    })
}

/// Three-way classification from the last three shells: `vo` when the last
/// value is below `threshold` and the tail does not increase, `not-vo` when
/// the whole tail exceeds `10 * threshold`.
pub fn vo_verdict(
    f: &SymbolFunction,
    n: usize,
    radii: &[f64],
    r: f64,
    threshold: f64,
    sampling: VoSampling,
) -> Result<VoReport> {
    if !(threshold > 0.0) {
        return Err(FockError::InvalidParams(format!("threshold {threshold} must be positive")));
    }
    let curve = oscillation_curve(f, n, radii, r, sampling)?;
    let tail = curve.tail(3);
    let last = *tail.last().expect("nonempty radii");
    let settling = tail.windows(2).all(|w| w[1] <= w[0]);
    let verdict = if last < threshold && settling {
        VoVerdict::Vo
    } else if tail.iter().all(|&v| v > 10.0 * threshold) {
        VoVerdict::NotVo
    } else {
        VoVerdict::Inconclusive
    };
    Ok(VoReport { verdict, threshold, curve })
}

/// Shell statistics of the Berezin route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmoReport {
    pub magnitudes: Vec<f64>,
    /// Largest `|f~(z) - f~(z')|` between base points of each shell.
    pub berezin_spread: Vec<f64>,
    /// Largest value of the Berezin transform of `|f - f~|^2` on each shell.
    pub mean_oscillation: Vec<f64>,
    /// Boundary values of `f~`, the essential-spectrum proxy.
    pub proxy: BoundarySet,
}

impl VmoReport {
    pub fn to_csv(&self) -> Result<String> {
        table_to_csv(
            &["abs_z", "berezin_spread", "mean_oscillation"],
            (0..self.magnitudes.len()).map(|i| {
                vec![fmt_csv(self.magnitudes[i]), fmt_csv(self.berezin_spread[i]), fmt_csv(self.mean_oscillation[i])]
            }),
        )
    }
}

pub fn vmo_via_berezin(
    f: &SymbolFunction,
    schedule: &EscapeSchedule,
    params: &FockParams,
    grid: &QuadratureGrid,
    base_points_per_shell: usize,
    angular_samples: usize,
    cluster_tol: f64,
) -> Result<VmoReport> {
    let radii = schedule.radii();
    let ft = berezin_symbol(f, params, grid)?;
    let mo = berezin_symbol(&f.abs_diff_sq(&ft), params, grid)?;
    let dirs = sphere_directions(params.n, base_points_per_shell);
    let mut spread = Vec::with_capacity(radii.len());
    let mut mean_osc = Vec::with_capacity(radii.len());
    for &big_r in &radii {
        let zs: Vec<Vec<C64>> = dirs.iter().map(|d| d.iter().map(|c| c * big_r).collect()).collect();
        let vals: Vec<C64> = zs.iter().map(|z| ft.eval(z)).collect();
        let mut s: f64 = 0.0;
        for a in &vals {
            for b in &vals {
                s = s.max((a - b).norm());
            }
        }
        spread.push(s);
        mean_osc.push(zs.iter().map(|z| mo.eval(z).norm()).fold(0.0, f64::max));
    }
    let proxy = boundary_value_set(&ft, schedule, angular_samples, cluster_tol)?;
    Ok(VmoReport { magnitudes: radii, berezin_spread: spread, mean_oscillation: mean_osc, proxy })
}
