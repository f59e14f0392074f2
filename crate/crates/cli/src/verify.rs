//! Invariant battery behind `fock verify`. Each check records the measured
//! value, its tolerance and whether it passed; a library error counts as a
//! failure of that check rather than aborting the battery.

use std::f64::consts::TAU;
use std::sync::Arc;

use fock_core::band::{band_decay_profile, cube_lattice, partition_functions};
use fock_core::export::{fmt_csv, table_to_csv};
use fock_core::grid_operator::spectral_norm;
use fock_core::lower_norm::{lower_norm, SupportMask};
use fock_core::measure::Boundedness;
use fock_core::oscillation::{vmo_via_berezin, vo_verdict, VoSampling, VoVerdict};
use fock_core::shift::{basis_shift, composition_phase, shifted_function};
use fock_core::spectra::{
    essential_norm_bounds, essential_spectrum_vo, fredholm_test_vo, EscapeSchedule, FredholmVerdict, SpectrumOptions,
};
use fock_core::toeplitz::radial_toeplitz_diagonal;
use fock_core::{
    apply_projection, assemble_toeplitz, basis_eval, boundedness_criterion, build_grid, duality_constant,
    hille_tamarkin_integral, lp_norm, parse_symbol, BasisIndex, BasisMatrix, FockParams, GridOperator, Result, Scheme,
    SymbolFunction, C64,
};
use nalgebra::DMatrix;
use serde_json::json;

use crate::dispatch::Report;
use crate::CliError;

struct Outcome {
    name: &'static str,
    value: f64,
    tolerance: f64,
    passed: bool,
}

/// `value <= tolerance`.
fn at_most(name: &'static str, value: Result<f64>, tolerance: f64) -> Outcome {
    match value {
        Ok(v) => Outcome { name, value: v, tolerance, passed: v <= tolerance },
        Err(_) => Outcome { name, value: f64::NAN, tolerance, passed: false },
    }
}

/// A yes/no check; the value is 0 on success and 1 otherwise.
fn holds(name: &'static str, ok: Result<bool>) -> Outcome {
    let passed = ok.unwrap_or(false);
    Outcome { name, value: if passed { 0.0 } else { 1.0 }, tolerance: 0.0, passed }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ray() -> Result<EscapeSchedule> {
    EscapeSchedule::ray(&[c(1.0, 0.0)], &[10.0, 20.0, 40.0, 80.0], 1.0)
}

/// Deterministic points of the disk of radius `r`, spread by the golden angle.
fn disk_points(count: usize, r: f64) -> Vec<Vec<C64>> {
    let golden = TAU * (1.0 - 1.0 / 1.618_033_988_749_895);
    (0..count)
        .map(|k| vec![C64::from_polar(r * ((k as f64 + 0.5) / count as f64).sqrt(), golden * k as f64)])
        .collect()
}

fn projection_checks(params: &FockParams) -> Result<(f64, f64)> {
    let grid = build_grid(params, &Scheme::HermiteTensor, 40)?;
    let targets = disk_points(12, 2.0);
    let mut fix: f64 = 0.0;
    for k in 0..=10u32 {
        let idx = BasisIndex(vec![k]);
        let got = apply_projection(&grid.sample(|z| basis_eval(&idx, z, params)), &grid, params, &targets)?;
        for (t, g) in targets.iter().zip(&got) {
            fix = fix.max((g - basis_eval(&idx, t, params)).norm());
        }
    }
    let samples: Vec<C64> = grid.nodes().iter().map(|z| c((3.0 * z[0].re).sin(), z[0].im.cos())).collect();
    let on_nodes = apply_projection(&samples, &grid, params, grid.nodes())?;
    let once = apply_projection(&samples, &grid, params, &targets)?;
    let twice = apply_projection(&on_nodes, &grid, params, &targets)?;
    let scale = once.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let gap = once.iter().zip(&twice).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    Ok((fix, gap))
}

fn shift_isometry(params: &FockParams) -> Result<f64> {
    let grid = build_grid(params, &Scheme::HermiteTensor, 100)?;
    let f = |w: &[C64]| (w[0] + c(0.5, -1.0) * w[0].conj()) * (-w[0].norm_sqr() / 4.0).exp();
    let a = lp_norm(&grid.sample(f), &grid, params)?;
    let mut worst: f64 = 0.0;
    for z in [c(3.0, 0.0), c(-1.2, 2.1), c(0.0, -2.5)] {
        let g = shifted_function(f, vec![z], params.alpha);
        worst = worst.max((lp_norm(&grid.sample(&g), &grid, params)? - a).abs() / a);
    }
    Ok(worst)
}

fn composition(params: &FockParams) -> Result<f64> {
    let (w1, w2) = (c(1.0, 0.0), c(0.0, 1.0));
    let a = basis_shift(&[w1], 70, params, 1e-6)?.matrix.entries;
    let b = basis_shift(&[w2], 70, params, 1e-6)?.matrix.entries;
    let ab = basis_shift(&[w1 + w2], 70, params, 1e-6)?.matrix.entries;
    let phase = composition_phase(&[w1], &[w2], params.alpha);
    let comp = ((&a * &b).view((0, 0), (21, 21)) - ab.view((0, 0), (21, 21)) * phase).camax();
    Ok(comp.max((phase - C64::from_polar(1.0, params.alpha)).norm()))
}

fn radial_routes(params: &FockParams) -> Result<(f64, f64)> {
    let f = parse_symbol("indicator(R=1)", 1)?;
    let grid = build_grid(params, &Scheme::Polar { breaks: vec![1.0] }, 48)?;
    let t = assemble_toeplitz(&f, 30, params, &grid)?;
    let exact = radial_toeplitz_diagonal(&f, 30, params)?;
    let diag = t.diagonal().iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok((diag, t.max_off_diagonal()))
}

fn partition_sum() -> Result<f64> {
    let lat = cube_lattice(1, 30.0)?;
    let fam = partition_functions(&lat, 1.0)?;
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        for k in 0..100 {
            let z = [c(-30.0 + 0.6 * i as f64 + 0.173, -30.0 + 0.6 * k as f64 + 0.291)];
            worst = worst.max((fam.phi_sum(&z) - 1.0).abs());
        }
    }
    Ok(worst)
}

fn band_decay(params: &FockParams) -> Result<(bool, bool)> {
    let grid = Arc::new(build_grid(params, &Scheme::Uniform { extent: 24.0 }, 33)?);
    let lat = cube_lattice(1, 24.0)?;
    let ts = [1.0, 0.5, 0.25, 0.125];
    let p = band_decay_profile(&GridOperator::projection(grid.clone(), *params)?, &ts, &lat, 2.0)?;
    let m = GridOperator::multiplication(grid, *params, &SymbolFunction::angular_unit())?;
    let zero = band_decay_profile(&m, &ts, &lat, 2.0)?;
    let decays = p.strictly_decreasing && p.points[3].value < 0.1 * p.points[0].value;
    Ok((decays, zero.points.iter().all(|q| q.value == 0.0)))
}

fn inverse_law(params: &FockParams) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 2..12usize {
        let m = DMatrix::from_fn(k, k, |i, j| {
            let x = (i * 7 + j * 3 + k) as f64;
            c(x.sin() + if i == j { 2.0 } else { 0.0 }, (0.5 * x).cos())
        });
        let inv = m.clone().try_inverse().ok_or_else(|| fock_core::FockError::InvalidParams("singular".into()))?;
        let nu = lower_norm(&BasisMatrix::new(m, *params, k - 1), &SupportMask::full(k))?.value;
        worst = worst.max((nu * spectral_norm(&inv) - 1.0).abs());
    }
    Ok(worst)
}

fn spectral_checks(params: &FockParams) -> Result<(f64, f64, bool)> {
    let opts = SpectrumOptions::default();
    let f = parse_symbol("const(1)+bump(0,1,0.5)", 1)?;
    let spec = essential_spectrum_vo(&f, &ray()?, &opts)?;
    let d = if spec.is_essential_spectrum { spec.boundary.points.hausdorff(&[c(1.0, 0.0)]) } else { f64::INFINITY };
    let norm = essential_norm_bounds(&SymbolFunction::angular_unit(), params, &ray()?, &opts, None)?;
    let norm_gap = (norm.lower - 1.0).abs().max((norm.upper - 1.0).abs());
    let away = fredholm_test_vo(&f, c(0.0, 0.0), &ray()?, &opts, None)?.verdict == FredholmVerdict::Fredholm;
    let on = fredholm_test_vo(&f, c(1.0, 0.0), &ray()?, &opts, None)?.verdict == FredholmVerdict::NotFredholm;
    Ok((d, norm_gap, away && on))
}

fn vo_checks(params: &FockParams) -> Result<(bool, f64)> {
    let radii = [10.0, 20.0, 40.0, 80.0];
    let s = VoSampling::default();
    let verdicts = [
        vo_verdict(&SymbolFunction::constant(c(1.0, 0.0)), 1, &radii, 1.0, 0.05, s)?.verdict,
        vo_verdict(&SymbolFunction::angular_unit(), 1, &radii, 1.0, 0.05, s)?.verdict,
        vo_verdict(&parse_symbol("sin(s)", 1)?, 1, &radii, 1.0, 0.05, s)?.verdict,
    ];
    let grid = build_grid(params, &Scheme::HermiteTensor, 30)?;
    let f = parse_symbol("const(1)+bump(0,1,0.5)", 1)?;
    let rep = vmo_via_berezin(&f, &ray()?, params, &grid, 8, 64, 1e-2)?;
    Ok((verdicts == [VoVerdict::Vo, VoVerdict::Vo, VoVerdict::NotVo], rep.proxy.points.hausdorff(&[c(1.0, 0.0)])))
}

pub fn battery() -> std::result::Result<Report, CliError> {
    let params = FockParams::hilbert(1, 1.0)?;
    let proj = projection_checks(&params);
    let radial = radial_routes(&params);
    let band = band_decay(&params);
    let spectral = spectral_checks(&params);
    let vo = vo_checks(&params);
    let identity = build_grid(&params, &Scheme::HermiteTensor, 32).and_then(|g| {
        let t = assemble_toeplitz(&SymbolFunction::constant(c(1.0, 0.0)), 30, &params, &g)?;
        Ok((&t.entries - DMatrix::<C64>::identity(31, 31)).camax())
    });
    let outcomes = vec![
        at_most("projection fixes e_k, k <= 10", proj.as_ref().map(|p| p.0).map_err(Clone::clone), 1e-9),
        at_most("projection idempotence gap", proj.as_ref().map(|p| p.1).map_err(Clone::clone), 2e-9),
        at_most("toeplitz of 1 is the identity, N = 30", identity, 1e-10),
        at_most("radial diagonal, quadrature vs 1-D route", radial.as_ref().map(|r| r.0).map_err(Clone::clone), 1e-8),
        at_most("radial off-diagonal", radial.as_ref().map(|r| r.1).map_err(Clone::clone), 1e-10),
        at_most("shift isometry, |z| <= 3", shift_isometry(&params), 1e-10),
        at_most("shift composition phase", composition(&params), 1e-10),
        at_most("partition of unity", partition_sum(), 1e-14),
        holds("projection band decay", band.as_ref().map(|b| b.0).map_err(Clone::clone)),
        holds("multiplication band decay vanishes", band.as_ref().map(|b| b.1).map_err(Clone::clone)),
        at_most("lower norm of invertible matrices", inverse_law(&params), 1e-9),
        at_most("boundary values of 1 + bump", spectral.as_ref().map(|s| s.0).map_err(Clone::clone), 1e-3),
        at_most("essential norm of the angular symbol", spectral.as_ref().map(|s| s.1).map_err(Clone::clone), 1e-2),
        holds("fredholm verdicts for 1 + bump", spectral.as_ref().map(|s| s.2).map_err(Clone::clone)),
        holds("oscillation verdicts", vo.as_ref().map(|v| v.0).map_err(Clone::clone)),
        at_most("berezin proxy of 1 + bump", vo.as_ref().map(|v| v.1).map_err(Clone::clone), 1e-3),
        holds(
            "boundedness at the equality case",
            boundedness_criterion(2.0, 1.0, 1.0).map(|r| r.verdict == Boundedness::Bounded),
        ),
        at_most("duality constant at p = 2", Ok((duality_constant(&params) - 1.0).abs()), 0.0),
        holds(
            "hille-tamarkin integral is refinement stable",
            build_grid(&params, &Scheme::HermiteTensor, 40)
                .and_then(|g| hille_tamarkin_integral(1.0, &params, &g))
                .map(f64::is_finite),
        ),
    ];
    let failures = outcomes.iter().filter(|o| !o.passed).count();
    let rows = outcomes
        .iter()
        .map(|o| vec![o.name.to_string(), fmt_csv(o.value), fmt_csv(o.tolerance), o.passed.to_string()]);
    let csv = table_to_csv(&["check", "value", "tolerance", "passed"], rows)?;
    let checks: Vec<_> = outcomes
        .iter()
        .map(|o| {
            json!({
                "name": o.name,
                "value": if o.value.is_finite() { Some(o.value) } else { None },
                "tolerance": o.tolerance,
                "passed": o.passed,
            })
        })
        .collect();
    Ok(Report { result: json!({ "checks": checks, "failures": failures }), csv: vec![("checks".into(), csv)], failures })
}
