use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fock_core::band::{band_decay_profile, cube_lattice};
use fock_core::cplx::ReIm;
use fock_core::export::{fmt_csv, matrix_to_csv, table_to_csv, to_json};
use fock_core::oscillation::{oscillation_curve, vmo_via_berezin};
use fock_core::spectra::{essential_norm_bounds, essential_spectrum_vo, fredholm_test_vo, PointSet};
use fock_core::{assemble_toeplitz, build_grid, GridOperator, QuadratureGrid, C64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::verify;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Assemble,
    EssSpec,
    EssNorm,
    Fredholm,
    BandProfile,
    Osc,
    Vmo,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Assemble => "assemble",
            Command::EssSpec => "ess-spec",
            Command::EssNorm => "ess-norm",
            Command::Fredholm => "fredholm",
            Command::BandProfile => "band-profile",
            Command::Osc => "osc",
            Command::Vmo => "vmo",
            Command::Verify => "verify",
        }
    }
}

/// What a command produced: the JSON result and named CSV payloads.
#[derive(Debug, Clone)]
pub struct Report {
    pub result: Value,
    pub csv: Vec<(String, String)>,
    /// Failing checks, for `verify`.
    pub failures: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    config: &'a RunConfig,
    result: &'a Value,
    files: Vec<String>,
}

/// Runs `command`, writes `<out>/<command>.json` and the CSV payloads, and
/// returns the paths written. `verify` failures are reported after the files
/// are on disk.
pub fn dispatch(command: Command, config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    config.validate()?;
    let report = run(command, config)?;
    let dir = Path::new(&config.output.dir);
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut files = Vec::new();
    for (suffix, body) in &report.csv {
        let name = format!("{}_{suffix}.csv", command.name());
        let path = dir.join(&name);
        fs::write(&path, body)?;
        files.push(name);
        written.push(path);
    }
    let summary = Summary { command: command.name(), config, result: &report.result, files };
    let path = dir.join(format!("{}.json", command.name()));
    fs::write(&path, to_json(&summary)?)?;
    written.push(path);
    if report.failures > 0 {
        return Err(CliError::VerifyFailed(report.failures));
    }
    Ok(written)
}

fn grid(config: &RunConfig) -> Result<QuadratureGrid, CliError> {
    Ok(build_grid(&config.fock_params()?, &config.scheme()?, config.grid.size)?)
}

fn reim(v: &[C64]) -> Vec<ReIm> {
    v.iter().copied().map(ReIm::from).collect()
}

fn plain(result: Value, csv: Vec<(String, String)>) -> Report {
    Report { result, csv, failures: 0 }
}

pub fn run(command: Command, config: &RunConfig) -> Result<Report, CliError> {
    let o = &config.options;
    Ok(match command {
        Command::Assemble => {
            let params = config.fock_params()?;
            let t = assemble_toeplitz(&config.symbol()?, o.degree, &params, &grid(config)?)?;
            let diag = t.diagonal();
            let rows = t.indices.iter().zip(&diag).map(|(k, d)| {
                let idx: Vec<String> = k.0.iter().map(|v| v.to_string()).collect();
                vec![idx.join(" "), fmt_csv(d.re), fmt_csv(d.im)]
            });
            let diag_csv = table_to_csv(&["index", "re", "im"], rows)?;
            plain(
                json!({
                    "dim": t.dim(),
                    "truncation_degree": t.truncation_degree,
                    "hermitian_defect": t.hermitian_defect(),
                    "max_off_diagonal": t.max_off_diagonal(),
                    "diagonal": reim(&diag),
                }),
                vec![("matrix".into(), matrix_to_csv(&t.entries)?), ("diagonal".into(), diag_csv)],
            )
        }
        Command::EssSpec => {
            let spec = essential_spectrum_vo(&config.symbol()?, &config.schedule()?, &config.spectrum_options())?;
            let b = &spec.boundary;
            plain(
                json!({
                    "points": reim(&b.points.points),
                    "multiplicity": b.points.multiplicity,
                    "is_essential_spectrum": spec.is_essential_spectrum,
                    "caveat": spec.caveat,
                    "drift": b.drift,
                    "stabilized": b.stabilized,
                    "vo_verdict": spec.vo.verdict,
                }),
                vec![("points".into(), b.points.to_csv()?)],
            )
        }
        Command::EssNorm => {
            let bounds = essential_norm_bounds(
                &config.symbol()?,
                &config.fock_params()?,
                &config.schedule()?,
                &config.spectrum_options(),
                o.projection_norm,
            )?;
            plain(serde_json::to_value(bounds).map_err(|e| CliError::Io(e.to_string()))?, Vec::new())
        }
        Command::Fredholm => {
            let rep = fredholm_test_vo(
                &config.symbol()?,
                C64::from(o.lambda),
                &config.schedule()?,
                &config.spectrum_options(),
                o.margin,
            )?;
            plain(serde_json::to_value(rep).map_err(|e| CliError::Io(e.to_string()))?, Vec::new())
        }
        Command::BandProfile => {
            let params = config.fock_params()?;
            let g = Arc::new(grid(config)?);
            let op = match o.band_operator.as_str() {
                "multiplication" => GridOperator::multiplication(g.clone(), params, &config.symbol()?)?,
                _ => GridOperator::projection(g.clone(), params)?,
            };
            let lattice = cube_lattice(params.n, o.lattice_extent.unwrap_or_else(|| g.extent()))?;
            let prof = band_decay_profile(&op, &o.t_values, &lattice, o.band_p)?;
            plain(
                json!({
                    "operator": o.band_operator,
                    "t": prof.points.iter().map(|p| p.x).collect::<Vec<_>>(),
                    "decay": prof.points.iter().map(|p| p.value).collect::<Vec<_>>(),
                    "sup_term": prof.points.iter().map(|p| p.sup_term).collect::<Vec<_>>(),
                    "strictly_decreasing": prof.strictly_decreasing,
                    "p2_norm_disclaimer": prof.p2_norm_disclaimer,
                }),
                vec![("decay".into(), prof.to_csv()?)],
            )
        }
        Command::Osc => {
            let curve =
                oscillation_curve(&config.symbol()?, config.params.n, &o.radii, o.vo_radius, config.vo_sampling())?;
            plain(
                json!({ "r": curve.r, "magnitudes": curve.magnitudes, "values": curve.values }),
                vec![("curve".into(), curve.to_csv()?)],
            )
        }
        Command::Vmo => {
            let rep = vmo_via_berezin(
                &config.symbol()?,
                &config.schedule()?,
                &config.fock_params()?,
                &grid(config)?,
                o.berezin_base_points,
                o.berezin_angular_samples,
                o.cluster_tol,
            )?;
            let proxy: &PointSet = &rep.proxy.points;
            plain(
                json!({
                    "magnitudes": rep.magnitudes,
                    "berezin_spread": rep.berezin_spread,
                    "mean_oscillation": rep.mean_oscillation,
                    "proxy_points": reim(&proxy.points),
                    "proxy_stabilized": rep.proxy.stabilized,
                }),
                vec![("shells".into(), rep.to_csv()?), ("proxy".into(), proxy.to_csv()?)],
            )
        }
        Command::Verify => verify::battery()?,
    })
}
