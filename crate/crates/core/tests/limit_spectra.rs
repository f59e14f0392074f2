use std::sync::Arc;

use fock_core::grid_operator::{spectral_norm, GridOperator};
use fock_core::lower_norm::{localization_radius, localized_lower_norm, lower_norm, CenterLattice, SupportMask};
use fock_core::oscillation::vmo_via_berezin;
use fock_core::spectra::{
    boundary_value_set, classify_fredholm, essential_norm_bounds, essential_spectrum_vo, fredholm_test_vo, hausdorff,
    schedules_equivalent, truncation_eigen_cluster, EscapeSchedule, FredholmVerdict, PointSet, SpectrumOptions,
};
use fock_core::toeplitz::berezin_symbol;
use fock_core::{build_grid, parse_symbol, BasisMatrix, FockParams, QuadratureGrid, Scheme, SymbolFunction, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma_lr;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ray(radii: &[f64]) -> EscapeSchedule {
    EscapeSchedule::ray(&[c(1.0, 0.0)], radii, 1.0).unwrap()
}

fn circle(count: usize) -> Vec<C64> {
    (0..count).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / count as f64)).collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, k: usize) -> DMatrix<C64> {
    DMatrix::from_fn(k, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn small_grid() -> (FockParams, Arc<QuadratureGrid>) {
    let params = FockParams::hilbert(1, 1.0).unwrap();
    (params, Arc::new(build_grid(&params, &Scheme::Uniform { extent: 20.0 }, 9).unwrap()))
}

fn random_mask(rng: &mut ChaCha8Rng, dim: usize) -> SupportMask {
    let mut m: Vec<bool> = (0..dim).map(|_| rng.gen_bool(0.6)).collect();
    m[rng.gen_range(0..dim)] = true;
    SupportMask(m)
}

#[test]
fn lower_norm_examples() {
    let params = FockParams::hilbert(1, 1.0).unwrap();
    let id = BasisMatrix::identity(params, 4);
    assert!((lower_norm(&id, &SupportMask::full(5)).unwrap().value - 1.0).abs() < 1e-14);
    let d = BasisMatrix::new(DMatrix::from_diagonal(&nalgebra::dvector![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]), params, 2);
    let rep = lower_norm(&d, &SupportMask::full(3)).unwrap();
    assert!((rep.value - 1.0).abs() < 1e-14);
    assert!((rep.residual - rep.value).abs() < 1e-9);
    assert!((localization_radius(1, 1.0) - 8.0 * 2f64.sqrt()).abs() < 1e-12);
    let (params, grid) = small_grid();
    let id = GridOperator::identity(grid.clone(), params).unwrap();
    let centers = CenterLattice::covering(1, 20.0, 5.0).unwrap();
    for t in [1.0, 0.7] {
        let rep = localized_lower_norm(&id, &SupportMask::full(grid.len()), t, &centers).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lower_norm_is_one_over_inverse_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let k = rng.gen_range(2..12);
        let a = random_matrix(&mut rng, k);
        let inv = a.clone().try_inverse().expect("random matrices are invertible");
        let b = BasisMatrix::new(a, FockParams::hilbert(1, 1.0).unwrap(), k - 1);
        let nu = lower_norm(&b, &SupportMask::full(k)).unwrap().value;
        assert!((nu * spectral_norm(&inv) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn lower_norm_laws_on_random_instances() {
    let (params, grid) = small_grid();
    let dim = grid.len();
    let centers = CenterLattice::covering(1, 20.0, 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let a = GridOperator::from_frame(grid.clone(), params, random_matrix(&mut rng, dim)).unwrap();
        let eps = rng.gen_range(0.0..0.5);
        let b = GridOperator::from_frame(grid.clone(), params, a.frame() + random_matrix(&mut rng, dim) * c(eps, 0.0))
            .unwrap();
        let gap = spectral_norm(&(a.frame() - b.frame()));
        let f = random_mask(&mut rng, dim);
        let t = rng.gen_range(0.5..=1.0);
        let (na, nb) = (lower_norm(&a, &f).unwrap().value, lower_norm(&b, &f).unwrap().value);
        assert!((na - nb).abs() <= gap + 1e-9);
        let (ta, tb) = (
            localized_lower_norm(&a, &f, t, &centers).unwrap().value,
            localized_lower_norm(&b, &f, t, &centers).unwrap().value,
        );
        assert!((ta - tb).abs() <= gap + 1e-9);
        assert!(na <= ta + 1e-9);
        let g = f.intersect(&random_mask(&mut rng, dim));
        if g.count() > 0 {
            assert!(na <= lower_norm(&a, &g).unwrap().value + 1e-9);
        }
    }
}

#[test]
fn boundary_sets_of_basic_symbols() {
    let opts = SpectrumOptions::default();
    let f = SymbolFunction::constant(c(0.25, 2.0));
    let b = boundary_value_set(&f, &ray(&[10.0, 20.0, 40.0]), 64, 1e-3).unwrap();
    assert_eq!(b.points.points, vec![c(0.25, 2.0)]);
    let g = parse_symbol("radial(1/(1+s))", 1).unwrap();
    let b = boundary_value_set(&g, &ray(&[10.0, 20.0, 40.0]), 64, 1e-2).unwrap();
    assert!(b.stabilized);
    assert!(b.points.hausdorff(&[c(0.0, 0.0)]) < 1e-3);
    let h = SymbolFunction::angular_unit();
    let spec = essential_spectrum_vo(&h, &ray(&[10.0, 20.0, 40.0, 80.0]), &opts).unwrap();
    assert!(spec.is_essential_spectrum);
    assert!(spec.boundary.points.hausdorff(&circle(256)) < 1e-2);
}

#[test]
fn compact_perturbations_do_not_move_the_essential_spectrum() {
    let opts = SpectrumOptions::default();
    let f = parse_symbol("const(1)+bump(0,1,0.5)", 1).unwrap();
    let sched = ray(&[10.0, 20.0, 40.0, 80.0]);
    let spec = essential_spectrum_vo(&f, &sched, &opts).unwrap();
    assert!(spec.is_essential_spectrum);
    assert!(spec.boundary.points.hausdorff(&[c(1.0, 0.0)]) < 1e-3);
    let params = FockParams::hilbert(1, 1.0).unwrap();
    let grid = build_grid(&params, &Scheme::HermiteTensor, 30).unwrap();
    let ft = berezin_symbol(&f, &params, &grid).unwrap();
    let spec_t = essential_spectrum_vo(&ft, &sched, &opts).unwrap();
    assert!(spec_t.boundary.points.hausdorff(&spec.boundary.points.points) < 1e-3);
    let vmo = vmo_via_berezin(&f, &sched, &params, &grid, 8, 64, 1e-2).unwrap();
    assert!(vmo.proxy.points.hausdorff(&[c(1.0, 0.0)]) < 1e-3);
}

#[test]
fn essential_norms() {
    let opts = SpectrumOptions::default();
    let params = FockParams::hilbert(1, 1.0).unwrap();
    let sched = ray(&[10.0, 20.0, 40.0, 80.0]);
    let zero = essential_norm_bounds(&SymbolFunction::constant(c(0.0, 0.0)), &params, &sched, &opts, None).unwrap();
    assert_eq!((zero.lower, zero.upper), (0.0, 0.0));
    let f = parse_symbol("const(-0.6+0.8i)+bump([1],2,3)", 1).unwrap();
    let b = essential_norm_bounds(&f, &params, &sched, &opts, None).unwrap();
    assert!((b.lower - 1.0).abs() < 1e-12 && b.lower == b.upper);
    let b = essential_norm_bounds(&SymbolFunction::angular_unit(), &params, &sched, &opts, None).unwrap();
    assert!((b.lower - 1.0).abs() < 1e-2 && (b.upper - 1.0).abs() < 1e-2);
    let p4 = FockParams::new(1, 4.0, 1.0).unwrap();
    let b = essential_norm_bounds(&f, &p4, &sched, &opts, None).unwrap();
    assert!(b.p2_disclaimer);
    let b = essential_norm_bounds(&f, &p4, &sched, &opts, Some(1.5)).unwrap();
    assert!(!b.p2_disclaimer && (b.upper - 1.5 * b.lower).abs() < 1e-12);
}

#[test]
fn fredholm_examples() {
    let opts = SpectrumOptions::default();
    let sched = ray(&[10.0, 20.0, 40.0, 80.0]);
    let f = parse_symbol("1+bump(0,1,0.5)", 1).unwrap();
    let r = fredholm_test_vo(&f, c(0.0, 0.0), &sched, &opts, None).unwrap();
    assert_eq!(r.verdict, FredholmVerdict::Fredholm);
    assert_eq!(fredholm_test_vo(&f, c(1.0, 0.0), &sched, &opts, None).unwrap().verdict, FredholmVerdict::NotFredholm);
    let g = SymbolFunction::angular_unit();
    assert_eq!(fredholm_test_vo(&g, c(0.0, 0.0), &sched, &opts, None).unwrap().verdict, FredholmVerdict::Fredholm);
    assert_eq!(fredholm_test_vo(&g, c(0.0, 1.0), &sched, &opts, None).unwrap().verdict, FredholmVerdict::NotFredholm);
    let b = boundary_value_set(&SymbolFunction::constant(c(2.0, 0.0)), &sched, 16, 1e-2).unwrap();
    assert_eq!(classify_fredholm(&b, c(2.5, 0.0), Some(0.5)).verdict, FredholmVerdict::Uncertain);
    let sin = parse_symbol("sin(s)", 1).unwrap();
    assert!(fredholm_test_vo(&sin, c(5.0, 0.0), &sched, &opts, None).is_err());
}

#[test]
fn radial_truncations_cluster_at_zero() {
    let params = FockParams::hilbert(1, 1.0).unwrap();
    let f = parse_symbol("radial(1/(1+s))", 1).unwrap();
    let target = PointSet::cluster(&[c(0.0, 0.0)], 1e-2);
    let rep = truncation_eigen_cluster(&f, &[40, 80, 160], &params, None, &target, 0.05).unwrap();
    assert!(rep.nondecreasing && !rep.pollution_warning);
    assert!(rep.entries[2].fraction > 0.8, "{}", rep.entries[2].fraction);
    let ind = SymbolFunction::indicator_ball(1.5);
    let rep = truncation_eigen_cluster(&ind, &[30], &params, None, &target, 0.05).unwrap();
    let mut want: Vec<f64> = (0..=30).map(|k| gamma_lr(k as f64 + 1.0, 2.25)).collect();
    want.sort_by(f64::total_cmp);
    for (e, w) in rep.entries[0].eigenvalues.iter().zip(&want) {
        assert!((e.re - w).abs() < 1e-12);
    }
}

#[test]
fn angular_truncations_carry_a_pollution_warning() {
    let params = FockParams::hilbert(1, 1.0).unwrap();
    let grid = build_grid(&params, &Scheme::polar(), 24).unwrap();
    let target = PointSet::cluster(&circle(256), 1e-2);
    let rep =
        truncation_eigen_cluster(&SymbolFunction::angular_unit(), &[10, 20], &params, Some(&grid), &target, 0.05).unwrap();
    assert!(rep.pollution_warning);
    // The truncations are nilpotent: every eigenvalue sits at 0, far from the circle.
    assert!(rep.entries.iter().all(|e| e.fraction == 0.0));
}

#[test]
fn boundary_values_are_translation_invariant() {
    let sched = ray(&[10.0, 20.0, 40.0, 80.0]);
    for f in [SymbolFunction::angular_unit(), parse_symbol("2+radial(exp(-s))", 1).unwrap()] {
        let g = f.translated(&[c(1.0, -1.0)]);
        let (a, b) = (boundary_value_set(&f, &sched, 1024, 1e-2).unwrap(), boundary_value_set(&g, &sched, 1024, 1e-2).unwrap());
        let d = hausdorff(&a.points.points, &b.points.points);
        assert!(d <= a.drift.max(b.drift) + 1e-2, "{}: {d}", f.label());
    }
}

#[test]
fn schedule_equivalence_follows_limit_symbols() {
    let radial = parse_symbol("radial(1/(1+s))", 1).unwrap();
    let a = ray(&[10.0, 100.0]);
    let b = EscapeSchedule::ray(&[c(0.0, 1.0)], &[10.0, 100.0], 1.0).unwrap();
    assert!(schedules_equivalent(&radial, &a, &b, 64, 1e-3));
    let ang = SymbolFunction::angular_unit();
    assert!(!schedules_equivalent(&ang, &a, &b, 64, 1e-3));
    let c2 = EscapeSchedule::ray(&[c(1.0, 1e-9)], &[10.0, 100.0], 1.0).unwrap();
    assert!(schedules_equivalent(&ang, &a, &c2, 64, 1e-3));
}

#[test]
fn boundary_sets_serialize_to_csv_and_json() {
    let b = boundary_value_set(&SymbolFunction::angular_unit(), &ray(&[10.0, 20.0]), 8, 1e-3).unwrap();
    let csv = b.points.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 9);
    let json = fock_core::export::to_json(&b).unwrap();
    let back: fock_core::spectra::BoundarySet = serde_json::from_str(&json).unwrap();
    assert_eq!(back.points.len(), 8);
}
