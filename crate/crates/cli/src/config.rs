//! Run configuration: what to compute, on which grid, and where reports go.

use fock_core::cplx::ReIm;
use fock_core::oscillation::VoSampling;
use fock_core::spectra::{EscapeSchedule, SpectrumOptions};
use fock_core::{parse_symbol, FockParams, Scheme, SymbolFunction, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamSpec,
    #[serde(default)]
    pub grid: GridSpec,
    /// Symbol in the mini-language of [`fock_core::parse_symbol`].
    #[serde(default)]
    pub symbol: String,
    #[serde(default)]
    pub options: CommandOptions,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
}

impl Default for ParamSpec {
    fn default() -> Self {
        Self { n: 1, p: 2.0, alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `hermite-tensor`, `polar` or `uniform`.
    pub scheme: String,
    pub size: usize,
    /// Half-width of the uniform lattice; ignored by the other schemes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    /// Radii where a polar rule is split.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breaks: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { scheme: "hermite-tensor".into(), size: 40, extent: None, breaks: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommandOptions {
    /// Truncation degree `N` for `assemble`.
    pub degree: usize,
    /// Scales for `band-profile`.
    pub t_values: Vec<f64>,
    /// Escape radii, strictly increasing.
    pub radii: Vec<f64>,
    /// Escape direction; defaults to the first coordinate axis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<ReIm>>,
    pub window_radius: f64,
    pub angular_samples: usize,
    pub cluster_tol: f64,
    pub vo_radius: f64,
    pub vo_threshold: f64,
    pub samples_per_ball: usize,
    pub base_points_per_shell: usize,
    pub lambda: ReIm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection_norm: Option<f64>,
    /// `projection` or `multiplication` (by the symbol).
    pub band_operator: String,
    pub band_p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_extent: Option<f64>,
    pub berezin_base_points: usize,
    pub berezin_angular_samples: usize,
}

impl Default for CommandOptions {
    fn default() -> Self {
        let spec = SpectrumOptions::default();
        Self {
            degree: 20,
            t_values: vec![1.0, 0.5, 0.25, 0.125],
            radii: vec![10.0, 20.0, 40.0, 80.0],
            direction: None,
            window_radius: 1.0,
            angular_samples: spec.angular_samples,
            cluster_tol: spec.cluster_tol,
            vo_radius: spec.vo_radius,
            vo_threshold: spec.vo_threshold,
            samples_per_ball: spec.vo_sampling.samples_per_ball,
            base_points_per_shell: spec.vo_sampling.base_points_per_shell,
            lambda: ReIm { re: 0.0, im: 0.0 },
            margin: None,
            projection_norm: None,
            band_operator: "projection".into(),
            band_p: 2.0,
            lattice_extent: None,
            berezin_base_points: 8,
            berezin_angular_samples: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamSpec::default(),
            grid: GridSpec::default(),
            symbol: String::new(),
            options: CommandOptions::default(),
            output: OutputSpec::default(),
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked without running a command.
    /// The symbol is parsed only when present.
    pub fn validate(&self) -> Result<(), CliError> {
        self.fock_params()?;
        self.scheme()?;
        if self.grid.size == 0 {
            return Err(bad("grid size must be positive"));
        }
        let o = &self.options;
        for (name, v) in [
            ("window_radius", o.window_radius),
            ("cluster_tol", o.cluster_tol),
            ("vo_radius", o.vo_radius),
            ("vo_threshold", o.vo_threshold),
            ("band_p", o.band_p),
        ] {
            positive(name, v)?;
        }
        if let Some(m) = o.margin {
            positive("margin", m)?;
        }
        if let Some(e) = o.lattice_extent {
            positive("lattice_extent", e)?;
        }
        if o.radii.is_empty() || o.radii[0] < 0.0 || o.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("radii must be nonnegative and strictly increasing"));
        }
        if o.t_values.is_empty() || o.t_values.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(bad("t_values must lie in (0, 1]"));
        }
        for (name, v) in [
            ("angular_samples", o.angular_samples),
            ("samples_per_ball", o.samples_per_ball),
            ("base_points_per_shell", o.base_points_per_shell),
            ("berezin_base_points", o.berezin_base_points),
            ("berezin_angular_samples", o.berezin_angular_samples),
        ] {
            if v == 0 {
                return Err(bad(format!("{name} must be positive")));
            }
        }
        if !["projection", "multiplication"].contains(&o.band_operator.as_str()) {
            return Err(bad(format!("unknown band operator {:?}", o.band_operator)));
        }
        self.direction()?;
        if !self.symbol.is_empty() {
            self.symbol()?;
        }
        Ok(())
    }

    pub fn fock_params(&self) -> Result<FockParams, CliError> {
        FockParams::new(self.params.n, self.params.p, self.params.alpha).map_err(CliError::from)
    }

    pub fn scheme(&self) -> Result<Scheme, CliError> {
        match self.grid.scheme.as_str() {
            "hermite-tensor" => Ok(Scheme::HermiteTensor),
            "polar" => Ok(Scheme::Polar { breaks: self.grid.breaks.clone() }),
            "uniform" => {
                let extent = self.grid.extent.ok_or_else(|| bad("uniform grid needs an extent"))?;
                positive("extent", extent)?;
                Ok(Scheme::Uniform { extent })
            }
            other => Err(bad(format!("unknown grid scheme {other:?}"))),
        }
    }

    pub fn symbol(&self) -> Result<SymbolFunction, CliError> {
        if self.symbol.is_empty() {
            return Err(bad("this command needs a symbol"));
        }
        parse_symbol(&self.symbol, self.params.n).map_err(|e| bad(format!("symbol: {e}")))
    }

    pub fn direction(&self) -> Result<Vec<C64>, CliError> {
        let n = self.params.n;
        let dir: Vec<C64> = match &self.options.direction {
            Some(d) => d.iter().map(|&z| C64::from(z)).collect(),
            None => (0..n).map(|i| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
        };
        if dir.len() != n || dir.iter().all(|z| z.norm() == 0.0) {
            return Err(bad(format!("direction must be a nonzero vector with {n} entries")));
        }
        Ok(dir)
    }

    pub fn schedule(&self) -> Result<EscapeSchedule, CliError> {
        EscapeSchedule::ray(&self.direction()?, &self.options.radii, self.options.window_radius).map_err(CliError::from)
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        let o = &self.options;
        SpectrumOptions {
            angular_samples: o.angular_samples,
            cluster_tol: o.cluster_tol,
            vo_radius: o.vo_radius,
            vo_threshold: o.vo_threshold,
            vo_sampling: self.vo_sampling(),
        }
    }

    pub fn vo_sampling(&self) -> VoSampling {
        VoSampling {
            samples_per_ball: self.options.samples_per_ball,
            base_points_per_shell: self.options.base_points_per_shell,
        }
    }
}
