//! Browser bindings for three `fock-core` operations on `C` with `alpha = 1`.
//!
//! The `*_json` functions are plain Rust so they run in native tests; the
//! `#[wasm_bindgen]` wrappers only convert errors for JavaScript.

use fock_core::cplx::ReIm;
use fock_core::oscillation::{oscillation_curve, VoSampling};
use fock_core::spectra::{essential_spectrum_vo, EscapeSchedule, SpectrumOptions};
use fock_core::toeplitz::radial_toeplitz_diagonal;
use fock_core::{parse_symbol, FockParams, C64};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest radius the page may request; beyond it sampling costs more than a
/// frame budget.
const MAX_RADIUS: f64 = 1e4;
const MAX_DEGREE: usize = 400;

fn radii(max_radius: f64) -> Result<Vec<f64>, String> {
    if !(max_radius >= 1.0 && max_radius <= MAX_RADIUS) {
        return Err(format!("radius must lie in [1, {MAX_RADIUS}]"));
    }
    Ok((0..6).map(|k| max_radius / 2f64.powi(5 - k)).collect())
}

/// Boundary values of the symbol along the positive real axis, with the
/// oscillation verdict that decides whether they form the essential spectrum.
pub fn boundary_json(symbol: &str, max_radius: f64) -> Result<String, String> {
    let f = parse_symbol(symbol, 1).map_err(|e| e.to_string())?;
    let schedule = EscapeSchedule::ray(&[C64::new(1.0, 0.0)], &radii(max_radius)?, 1.0).map_err(|e| e.to_string())?;
    let opts = SpectrumOptions { angular_samples: 128, ..SpectrumOptions::default() };
    let spec = essential_spectrum_vo(&f, &schedule, &opts).map_err(|e| e.to_string())?;
    let points: Vec<ReIm> = spec.boundary.points.points.iter().copied().map(ReIm::from).collect();
    Ok(json!({
        "points": points,
        "multiplicity": spec.boundary.points.multiplicity,
        "drift": spec.boundary.drift,
        "is_essential_spectrum": spec.is_essential_spectrum,
        "caveat": spec.caveat,
    })
    .to_string())
}

/// Worst oscillation on balls of radius `r` centred on circles `|z| = R`.
pub fn oscillation_json(symbol: &str, max_radius: f64, r: f64) -> Result<String, String> {
    let f = parse_symbol(symbol, 1).map_err(|e| e.to_string())?;
    let sampling = VoSampling { samples_per_ball: 64, base_points_per_shell: 8 };
    let curve = oscillation_curve(&f, 1, &radii(max_radius)?, r, sampling).map_err(|e| e.to_string())?;
    Ok(json!({ "r": curve.r, "magnitudes": curve.magnitudes, "values": curve.values }).to_string())
}

/// Diagonal `<T_f e_k, e_k>` for `k <= degree` of a radial symbol.
pub fn radial_diagonal_json(symbol: &str, degree: usize) -> Result<String, String> {
    if degree > MAX_DEGREE {
        return Err(format!("degree must be at most {MAX_DEGREE}"));
    }
    let f = parse_symbol(symbol, 1).map_err(|e| e.to_string())?;
    let params = FockParams::hilbert(1, 1.0).map_err(|e| e.to_string())?;
    let diag = radial_toeplitz_diagonal(&f, degree, &params).map_err(|e| e.to_string())?;
    let values: Vec<ReIm> = diag.into_iter().map(ReIm::from).collect();
    Ok(json!({ "diagonal": values }).to_string())
}

#[wasm_bindgen]
pub fn boundary(symbol: &str, max_radius: f64) -> Result<String, JsValue> {
    boundary_json(symbol, max_radius).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn oscillation(symbol: &str, max_radius: f64, r: f64) -> Result<String, JsValue> {
    oscillation_json(symbol, max_radius, r).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn radial_diagonal(symbol: &str, degree: usize) -> Result<String, JsValue> {
    radial_diagonal_json(symbol, degree).map_err(|e| JsValue::from_str(&e))
}
