//! Acceptance battery: one line per criterion with the measured numbers, the
//! pinned tolerance and the runtime budget. Exits nonzero if any line fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use fock_core::band::{band_decay_profile, cube_lattice, partition_functions};
use fock_core::grid_operator::{spectral_norm, GridOperator};
use fock_core::lower_norm::{localized_lower_norm, lower_norm, CenterLattice, SupportMask};
use fock_core::measure::Boundedness;
use fock_core::oscillation::{vmo_via_berezin, vo_verdict, VoSampling, VoVerdict};
use fock_core::shift::{basis_shift, composition_phase, conjugate_by_shift};
use fock_core::spectra::{
    essential_norm_bounds, essential_spectrum_vo, truncation_eigen_cluster, EscapeSchedule, PointSet, SpectrumOptions,
};
use fock_core::{
    apply_projection, assemble_toeplitz, basis_eval, boundedness_criterion, build_grid, duality_constant,
    hille_tamarkin_integral, lp_norm, parse_symbol, BasisIndex, BasisMatrix, FockParams, Scheme, SymbolFunction, C64,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma_lr;

type Check = Result<String, String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Debug>(e: E) -> String {
    format!("error: {e:?}")
}

fn hilbert() -> FockParams {
    FockParams::hilbert(1, 1.0).unwrap()
}

fn ray() -> EscapeSchedule {
    EscapeSchedule::ray(&[c(1.0, 0.0)], &[10.0, 20.0, 40.0, 80.0], 1.0).unwrap()
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn gauss_poly(rng: &mut ChaCha8Rng) -> impl Fn(C64) -> C64 {
    let terms: Vec<(C64, i32, i32)> = (0..4)
        .map(|_| (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), rng.gen_range(0..3), rng.gen_range(0..3)))
        .collect();
    move |w: C64| terms.iter().map(|(k, a, b)| k * w.powi(*a) * w.conj().powi(*b)).sum::<C64>() * (-w.norm_sqr() / 4.0).exp()
}

fn shifted(f: impl Fn(C64) -> C64, z: C64) -> impl Fn(C64) -> C64 {
    move |w| f(w - z) * (w * z.conj() - z.norm_sqr() / 2.0).exp()
}

fn projection_identity() -> Check {
    let params = hilbert();
    let grid = build_grid(&params, &Scheme::HermiteTensor, 40).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let targets: Vec<Vec<C64>> = (0..16).map(|_| vec![random_disk(&mut rng, 2.0)]).collect();
    let mut fix = 0.0f64;
    for k in 0..=10u32 {
        let idx = BasisIndex(vec![k]);
        let samples = grid.sample(|z| basis_eval(&idx, z, &params));
        let got = apply_projection(&samples, &grid, &params, &targets).map_err(fail)?;
        for (t, g) in targets.iter().zip(&got) {
            fix = fix.max((g - basis_eval(&idx, t, &params)).norm());
        }
    }
    let samples: Vec<C64> = (0..grid.len()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let on_nodes = apply_projection(&samples, &grid, &params, grid.nodes()).map_err(fail)?;
    let twice = apply_projection(&on_nodes, &grid, &params, &targets).map_err(fail)?;
    let once = apply_projection(&samples, &grid, &params, &targets).map_err(fail)?;
    let scale = once.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let gap = once.iter().zip(&twice).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    ensure(
        fix <= 1e-9 && gap <= 2e-9,
        format!("max |P e_k - e_k| = {fix:.2e} (tol 1e-9), idempotence gap = {gap:.2e} (tol 2e-9)"),
    )
}

fn toeplitz_identity() -> Check {
    let params = hilbert();
    let grid = build_grid(&params, &Scheme::HermiteTensor, 32).map_err(fail)?;
    let t = assemble_toeplitz(&SymbolFunction::constant(c(1.0, 0.0)), 30, &params, &grid).map_err(fail)?;
    let gap = (&t.entries - DMatrix::<C64>::identity(31, 31)).camax();
    ensure(gap <= 1e-10, format!("max |T_1 - I| = {gap:.2e} at N = 30 (tol 1e-10)"))
}

fn radial_oracle() -> Check {
    let params = hilbert();
    let f = parse_symbol("indicator(R=1)", 1).map_err(fail)?;
    let grid = build_grid(&params, &Scheme::Polar { breaks: vec![1.0] }, 48).map_err(fail)?;
    let t = assemble_toeplitz(&f, 30, &params, &grid).map_err(fail)?;
    let diag = (0..=30).map(|k| (t.entries[(k, k)] - c(gamma_lr(k as f64 + 1.0, 1.0), 0.0)).norm()).fold(0.0, f64::max);
    let off = t.max_off_diagonal();
    ensure(
        diag <= 1e-8 && off < 1e-10,
        format!("max diagonal error vs P(k+1, 1) = {diag:.2e} (tol 1e-8), max off-diagonal = {off:.2e} (tol 1e-10)"),
    )
}

fn shift_algebra() -> Check {
    let params = hilbert();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let grid = build_grid(&params, &Scheme::HermiteTensor, 100).map_err(fail)?;
    let mut iso = 0.0f64;
    for _ in 0..6 {
        let f = gauss_poly(&mut rng);
        let z = random_disk(&mut rng, 3.0);
        let a = lp_norm(&grid.sample(|w| f(w[0])), &grid, &params).map_err(fail)?;
        let g = shifted(&f, z);
        let b = lp_norm(&grid.sample(|w| g(w[0])), &grid, &params).map_err(fail)?;
        iso = iso.max((a - b).abs() / a.max(1.0));
    }
    let (w1, w2) = (c(1.0, 0.0), c(0.0, 1.0));
    let a = basis_shift(&[w1], 70, &params, 1e-6).map_err(fail)?.matrix.entries;
    let b = basis_shift(&[w2], 70, &params, 1e-6).map_err(fail)?.matrix.entries;
    let ab = basis_shift(&[w1 + w2], 70, &params, 1e-6).map_err(fail)?.matrix.entries;
    let phase = composition_phase(&[w1], &[w2], params.alpha);
    let k = 21;
    let comp = ((&a * &b).view((0, 0), (k, k)) - ab.view((0, 0), (k, k)) * phase).camax();
    let phase_err = (phase - C64::from_polar(1.0, params.alpha)).norm();
    let pgrid = build_grid(&params, &Scheme::HermiteTensor, 80).map_err(fail)?;
    let mut inter = 0.0f64;
    for _ in 0..5 {
        let f = gauss_poly(&mut rng);
        let z = random_disk(&mut rng, 1.5);
        let targets: Vec<Vec<C64>> = (0..8).map(|_| vec![random_disk(&mut rng, 1.5)]).collect();
        let czf = shifted(&f, z);
        let lhs = apply_projection(&pgrid.sample(|w| czf(w[0])), &pgrid, &params, &targets).map_err(fail)?;
        let moved: Vec<Vec<C64>> = targets.iter().map(|t| vec![t[0] - z]).collect();
        let pf = apply_projection(&pgrid.sample(|w| f(w[0])), &pgrid, &params, &moved).map_err(fail)?;
        for ((t, l), v) in targets.iter().zip(&lhs).zip(&pf) {
            let rhs = v * (t[0] * z.conj() - z.norm_sqr() / 2.0).exp();
            inter = inter.max((l - rhs).norm() / rhs.norm().max(1.0));
        }
    }
    ensure(
        iso <= 1e-10 && comp <= 1e-10 && phase_err <= 1e-10 && inter <= 1e-8,
        format!(
            "isometry {iso:.2e} (tol 1e-10), composition {comp:.2e} with phase error {phase_err:.2e} (tol 1e-10), \
             intertwining {inter:.2e} (tol 1e-8)"
        ),
    )
}

fn covariance() -> Check {
    let params = hilbert();
    let grid = build_grid(&params, &Scheme::HermiteTensor, 96).map_err(fail)?;
    let families = [
        parse_symbol("radial(1/(1+s))", 1).map_err(fail)?,
        SymbolFunction::angular_unit(),
        parse_symbol("exp(-s/2)*(1+i*x)", 1).map_err(fail)?,
    ];
    let mut worst = 0.0f64;
    for f in &families {
        let base = assemble_toeplitz(f, 70, &params, &grid).map_err(fail)?;
        for z in [c(2.0, 0.0), c(1.2, -1.6), c(-0.5, 1.0)] {
            let conj = conjugate_by_shift(&base, &[z], 20, 1e-6).map_err(fail)?;
            let direct = assemble_toeplitz(&f.translated(&[z]), 20, &params, &grid).map_err(fail)?;
            worst = worst.max(conj.frobenius_distance(&direct));
        }
    }
    ensure(worst <= 1e-6, format!("max Frobenius gap = {worst:.2e} over 3 families x 3 shifts, N = 20 (tol 1e-6)"))
}

fn partition_invariants() -> Check {
    let lat = cube_lattice(1, 30.0).map_err(fail)?;
    let fam = partition_functions(&lat, 1.0).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let (mut sum_err, mut o1, mut o3, mut lip, mut single) = (0.0f64, 0usize, 0usize, 0.0f64, true);
    for _ in 0..10_000 {
        let z = [c(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0))];
        sum_err = sum_err.max((fam.phi_sum(&z) - 1.0).abs());
        single &= (0..lat.len()).filter(|&j| lat.in_cube(j, &z)).count() == 1;
        o1 = o1.max((0..lat.len()).filter(|&j| lat.in_omega(j, 1, &z)).count());
        o3 = o3.max((0..lat.len()).filter(|&j| lat.in_omega(j, 3, &z)).count());
        let d = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let w = [z[0] + d];
        for (sigma, _) in fam.phi_support(&z) {
            lip = lip.max((fam.phi_offset(&sigma, &z) - fam.phi_offset(&sigma, &w)).abs() / d.norm());
        }
    }
    let diam = lat.diameter();
    ensure(
        sum_err <= 1e-14 && single && o1 <= 4 && o3 <= 16 && lip <= 1.0 + 1e-9 && diam == 6.0 * 2f64.sqrt(),
        format!(
            "|sum phi_j - 1| = {sum_err:.1e} (tol 1e-14), max overlaps {o1}/4 and {o3}/16, \
             Lipschitz {lip:.4} (bound 1), diam = {diam} = 6 sqrt(2)"
        ),
    )
}

fn band_decay() -> Check {
    let params = hilbert();
    let grid = Arc::new(build_grid(&params, &Scheme::Uniform { extent: 24.0 }, 33).map_err(fail)?);
    let lat = cube_lattice(1, 24.0).map_err(fail)?;
    let ts = [1.0, 0.5, 0.25, 0.125];
    let p = GridOperator::projection(grid.clone(), params).map_err(fail)?;
    let prof = band_decay_profile(&p, &ts, &lat, 2.0).map_err(fail)?;
    let m = GridOperator::multiplication(grid, params, &SymbolFunction::angular_unit()).map_err(fail)?;
    let zero = band_decay_profile(&m, &ts, &lat, 2.0).map_err(fail)?;
    let d: Vec<f64> = prof.points.iter().map(|q| q.value).collect();
    let mz = zero.points.iter().map(|q| q.value).fold(0.0, f64::max);
    ensure(
        prof.strictly_decreasing && d[3] < 0.1 * d[0] && mz == 0.0,
        format!(
            "D(t) = {:.3e}, {:.3e}, {:.3e}, {:.3e} on a 33x33 grid; D(1/8)/D(1) = {:.1e} (tol 0.1); multiplication D = {mz}",
            d[0],
            d[1],
            d[2],
            d[3],
            d[3] / d[0]
        ),
    )
}

fn lower_norm_laws() -> Check {
    let params = hilbert();
    let grid = Arc::new(build_grid(&params, &Scheme::Uniform { extent: 20.0 }, 9).map_err(fail)?);
    let dim = grid.len();
    let centers = CenterLattice::covering(1, 20.0, 5.0).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let random = |rng: &mut ChaCha8Rng, k: usize| DMatrix::from_fn(k, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let (mut s411i, mut s411ii, mut s412, mut inv) = (f64::INFINITY, f64::INFINITY, f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let a = GridOperator::from_frame(grid.clone(), params, random(&mut rng, dim)).map_err(fail)?;
        let eps = rng.gen_range(0.0..0.5);
        let b = GridOperator::from_frame(grid.clone(), params, a.frame() + random(&mut rng, dim) * c(eps, 0.0))
            .map_err(fail)?;
        let gap = spectral_norm(&(a.frame() - b.frame()));
        let mut mask: Vec<bool> = (0..dim).map(|_| rng.gen_bool(0.6)).collect();
        mask[rng.gen_range(0..dim)] = true;
        let f = SupportMask(mask);
        let t = rng.gen_range(0.5..=1.0);
        let na = lower_norm(&a, &f).map_err(fail)?.value;
        let nb = lower_norm(&b, &f).map_err(fail)?.value;
        let ta = localized_lower_norm(&a, &f, t, &centers).map_err(fail)?.value;
        let tb = localized_lower_norm(&b, &f, t, &centers).map_err(fail)?.value;
        s411i = s411i.min(gap - (na - nb).abs());
        s411ii = s411ii.min(gap - (ta - tb).abs());
        s412 = s412.min(ta - na);
        let k = rng.gen_range(2..12);
        let m = random(&mut rng, k);
        let minv = m.clone().try_inverse().ok_or("singular random matrix")?;
        let nu = lower_norm(&BasisMatrix::new(m, params, k - 1), &SupportMask::full(k)).map_err(fail)?.value;
        inv = inv.max((nu * spectral_norm(&minv) - 1.0).abs());
    }
    ensure(
        s411i >= -1e-9 && s411ii >= -1e-9 && s412 >= -1e-9 && inv <= 1e-9,
        format!(
            "min slack: |nu_A - nu_B| <= |A-B| {s411i:.2e}, localized {s411ii:.2e}, nu <= nu_t {s412:.2e} (tol -1e-9); \
             max |nu(B) ||B^-1|| - 1| = {inv:.1e} (tol 1e-9); 100 instances each"
        ),
    )
}

fn essential_spectrum() -> Check {
    let opts = SpectrumOptions::default();
    let f = parse_symbol("1+bump(0,1,0.5)", 1).map_err(fail)?;
    let one = essential_spectrum_vo(&f, &ray(), &opts).map_err(fail)?;
    let d1 = one.boundary.points.hausdorff(&[c(1.0, 0.0)]);
    let ang = essential_spectrum_vo(&SymbolFunction::angular_unit(), &ray(), &opts).map_err(fail)?;
    let circle: Vec<C64> = (0..256).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 256.0)).collect();
    let d2 = ang.boundary.points.hausdorff(&circle);
    let g = parse_symbol("radial(1/(1+s))", 1).map_err(fail)?;
    let target = PointSet::cluster(&[c(0.0, 0.0)], 1e-2);
    let rep = truncation_eigen_cluster(&g, &[40, 80, 160], &hilbert(), None, &target, 0.05).map_err(fail)?;
    let fr: Vec<f64> = rep.entries.iter().map(|e| e.fraction).collect();
    ensure(
        one.is_essential_spectrum && ang.is_essential_spectrum && d1 <= 1e-3 && d2 <= 1e-2 && fr[2] > 0.8 && rep.nondecreasing,
        format!(
            "1+bump: Hausdorff to {{1}} = {d1:.1e} (tol 1e-3); angular: Hausdorff to circle = {d2:.2e} (tol 1e-2); \
             cluster fractions at N = 40, 80, 160: {:.3}, {:.3}, {:.3} (need > 0.8, nondecreasing)",
            fr[0], fr[1], fr[2]
        ),
    )
}

fn essential_norm() -> Check {
    let opts = SpectrumOptions::default();
    let params = hilbert();
    let f = parse_symbol("const(-0.6+0.8i)+bump([1],2,3)", 1).map_err(fail)?;
    let a = essential_norm_bounds(&f, &params, &ray(), &opts, None).map_err(fail)?;
    let b = essential_norm_bounds(&SymbolFunction::angular_unit(), &params, &ray(), &opts, None).map_err(fail)?;
    ensure(
        (a.lower - 1.0).abs() <= 1e-12 && a.upper == a.lower && (b.lower - 1.0).abs() <= 1e-2 && (b.upper - 1.0).abs() <= 1e-2,
        format!(
            "c + bump with |c| = 1: [{:.6}, {:.6}]; angular: [{:.6}, {:.6}] (tol 1e-2)",
            a.lower, a.upper, b.lower, b.upper
        ),
    )
}

fn vo_vmo() -> Check {
    let radii = [10.0, 20.0, 40.0, 80.0];
    let s = VoSampling::default();
    let verdicts = [
        vo_verdict(&SymbolFunction::constant(c(1.0, 0.0)), 1, &radii, 1.0, 0.05, s).map_err(fail)?.verdict,
        vo_verdict(&SymbolFunction::angular_unit(), 1, &radii, 1.0, 0.05, s).map_err(fail)?.verdict,
        vo_verdict(&parse_symbol("sin(s)", 1).map_err(fail)?, 1, &radii, 1.0, 0.05, s).map_err(fail)?.verdict,
    ];
    let ok_verdicts = verdicts == [VoVerdict::Vo, VoVerdict::Vo, VoVerdict::NotVo];
    let params = hilbert();
    let grid = build_grid(&params, &Scheme::HermiteTensor, 30).map_err(fail)?;
    let f = parse_symbol("1+bump(0,1,0.5)", 1).map_err(fail)?;
    let proxy = vmo_via_berezin(&f, &ray(), &params, &grid, 8, 64, 1e-2).map_err(fail)?;
    let d = proxy.proxy.points.hausdorff(&[c(1.0, 0.0)]);
    let sched = EscapeSchedule::ray(&[c(1.0, 0.0)], &[2.0, 4.0, 8.0, 16.0], 1.0).map_err(fail)?;
    let bump = parse_symbol("bump(0,1.5,1)", 1).map_err(fail)?;
    let curve = vmo_via_berezin(&bump, &sched, &params, &grid, 8, 64, 1e-2).map_err(fail)?;
    let tail = *curve.mean_oscillation.last().unwrap();
    ensure(
        ok_verdicts && d <= 1e-3 && tail < 1e-3,
        format!(
            "verdicts {verdicts:?} (want [Vo, Vo, NotVo]); Berezin proxy Hausdorff to {{1}} = {d:.1e} (tol 1e-3); \
             compact-support curve tail = {tail:.1e} (tol 1e-3)"
        ),
    )
}

fn analytic_criteria() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let mut triples = vec![(2.0, 1.0, 1.0)];
    while triples.len() < 100 {
        triples.push((rng.gen_range(0.1..4.0), rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)));
    }
    let mut mismatches = 0;
    for &(a, b, cc) in &triples {
        let want = if 4.0 * b * cc - a * a >= 0.0 { Boundedness::Bounded } else { Boundedness::Unbounded };
        if boundedness_criterion(a, b, cc).map_err(fail)?.verdict != want {
            mismatches += 1;
        }
    }
    let equality = boundedness_criterion(2.0, 1.0, 1.0).map_err(fail)?.verdict == Boundedness::Bounded;
    let d2 = duality_constant(&hilbert());
    let d4 = duality_constant(&FockParams::new(1, 4.0, 1.0).map_err(fail)?);
    let oracle = 2.0 / (4f64.powf(0.25) * (4.0f64 / 3.0).powf(0.75));
    let params = hilbert();
    let grid = build_grid(&params, &Scheme::HermiteTensor, 40).map_err(fail)?;
    let h1 = hille_tamarkin_integral(1.0, &params, &grid).map_err(fail)?;
    let h2 = hille_tamarkin_integral(2.0, &params, &grid).map_err(fail)?;
    ensure(
        mismatches == 0 && equality && d2 == 1.0 && (d4 - oracle).abs() <= 1e-4 && h1.is_finite() && h2 >= h1,
        format!(
            "{mismatches} verdict mismatches in 100 triples, (2,1,1) bounded: {equality}; duality p=2: {d2}, \
             p=4: {d4:.6} vs {oracle:.6} (tol 1e-4); HT(1) = {h1:.6}, HT(2) = {h2:.6}, each stable under refinement within 1%"
        ),
    )
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 12] = [
        ("projection identity", 5, projection_identity),
        ("toeplitz identity symbol", 5, toeplitz_identity),
        ("radial oracle", 10, radial_oracle),
        ("shift algebra", 10, shift_algebra),
        ("covariance", 30, covariance),
        ("partition invariants", 5, partition_invariants),
        ("band decay", 60, band_decay),
        ("lower-norm laws", 30, lower_norm_laws),
        ("essential spectrum", 120, essential_spectrum),
        ("essential norm", 30, essential_norm),
        ("vo/vmo battery", 60, vo_vmo),
        ("analytic criteria", 10, analytic_criteria),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*budget);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the time budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} {:>2} {name}: {detail}; {:.2} s (budget {budget} s)",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
