use fock_core::oscillation::{oscillation, oscillation_curve, oscillation_on, vmo_via_berezin, vo_verdict, VoSampling, VoVerdict};
use fock_core::sampling::ball_samples;
use fock_core::spectra::EscapeSchedule;
use fock_core::{build_grid, parse_symbol, FockParams, Scheme, SymbolFunction, SymbolTag, C64};
use proptest::prelude::*;

const RADII: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `sum_j a_j cos(k_j . x + b_j)` on `C = R^2`, Lipschitz with constant `sum |a_j| |k_j|`.
fn trig(terms: &[(f64, f64, f64, f64)]) -> (SymbolFunction, f64) {
    let t = terms.to_vec();
    let bound = t.iter().map(|x| x.0.abs()).sum::<f64>();
    let lip = t.iter().map(|x| x.0.abs() * x.1.hypot(x.2)).sum::<f64>();
    let f = SymbolFunction::new("trig", bound, SymbolTag::Generic, move |z| {
        c(t.iter().map(|(a, kx, ky, b)| a * (kx * z[0].re + ky * z[0].im + b).cos()).sum(), 0.0)
    });
    (f, lip)
}

fn term() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-1.0..1.0f64, -2.0..2.0f64, -2.0..2.0f64, 0.0..6.3f64)
}

#[test]
fn oscillation_examples() {
    let k = SymbolFunction::constant(c(3.0, -1.0));
    assert_eq!(oscillation(&k, &[c(5.0, 5.0)], 2.0, 64).unwrap().value, 0.0);
    let re = SymbolFunction::new("re", 1e3, SymbolTag::Generic, |z| c(z[0].re, 0.0));
    assert_eq!(oscillation(&re, &[c(0.0, 0.0)], 1.0, 64).unwrap().value, 1.0);
    let f = parse_symbol("radial(1/(1+s))", 1).unwrap();
    let o = oscillation(&f, &[c(10.0, 0.0)], 1.0, 256).unwrap().value;
    // The sup of |f(z) - f(w)| over |w - z| <= 1 is attained at w = 9.
    let exact = 1.0 / 82.0 - 1.0 / 101.0;
    assert!((o - exact).abs() < 0.1 * exact, "{o}");
}

#[test]
fn verdict_battery_at_two_radii() {
    let s = VoSampling::default();
    let battery = [
        (SymbolFunction::constant(c(2.0, 0.0)), VoVerdict::Vo),
        (SymbolFunction::angular_unit(), VoVerdict::Vo),
        (parse_symbol("sin(s)", 1).unwrap(), VoVerdict::NotVo),
    ];
    for (f, want) in &battery {
        for r in [1.0, 2.0] {
            let rep = vo_verdict(f, 1, &RADII, r, 0.05, s).unwrap();
            assert_eq!(rep.verdict, *want, "{} r={r} {:?}", f.label(), rep.curve.values);
        }
    }
    let sin = vo_verdict(&battery[2].0, 1, &RADII, 1.0, 0.05, s).unwrap();
    assert!(sin.curve.tail(2).iter().all(|&v| v >= 1.0));
}

#[test]
fn two_dimensional_symbols() {
    let s = VoSampling::default();
    let f = parse_symbol("z1/sqrt(1+s)", 2).unwrap();
    assert_eq!(vo_verdict(&f, 2, &RADII, 1.0, 0.05, s).unwrap().verdict, VoVerdict::Vo);
    let g = parse_symbol("cos(x2*x1)", 2).unwrap();
    assert_eq!(vo_verdict(&g, 2, &RADII, 1.0, 0.05, s).unwrap().verdict, VoVerdict::NotVo);
}

#[test]
fn curve_export() {
    let curve = oscillation_curve(&SymbolFunction::angular_unit(), 1, &RADII, 1.0, VoSampling::default()).unwrap();
    let csv = curve.to_csv().unwrap();
    assert!(csv.starts_with("abs_z,"));
    assert_eq!(csv.lines().count(), 5);
    assert!(oscillation_curve(&SymbolFunction::angular_unit(), 1, &[2.0, 1.0], 1.0, VoSampling::default()).is_err());
}

#[test]
fn berezin_route() {
    let params = FockParams::hilbert(1, 1.0).unwrap();
    let grid = build_grid(&params, &Scheme::HermiteTensor, 30).unwrap();
    let sched = EscapeSchedule::ray(&[c(1.0, 0.0)], &[2.0, 4.0, 8.0, 16.0], 1.0).unwrap();
    let k = vmo_via_berezin(&SymbolFunction::constant(c(0.5, 0.5)), &sched, &params, &grid, 8, 64, 1e-2).unwrap();
    assert!(k.berezin_spread.iter().all(|&v| v < 1e-12));
    assert!(k.mean_oscillation.iter().all(|&v| v < 1e-12));
    assert_eq!(k.proxy.points.len(), 1);
    assert!((k.proxy.points.points[0] - c(0.5, 0.5)).norm() < 1e-12);
    let bump = parse_symbol("bump(0,1.5,1)", 1).unwrap();
    let b = vmo_via_berezin(&bump, &sched, &params, &grid, 8, 64, 1e-2).unwrap();
    assert!(b.mean_oscillation.windows(2).all(|w| w[1] <= w[0]));
    assert!(*b.mean_oscillation.last().unwrap() < 1e-3);
    assert!(b.proxy.points.hausdorff(&[c(0.0, 0.0)]) < 1e-3);
    assert_eq!(b.to_csv().unwrap().lines().count(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oscillation_grows_with_the_radius(
        terms in prop::collection::vec(term(), 1..4),
        x in -20.0..20.0f64,
        y in -20.0..20.0f64,
        r1 in 0.1..2.0f64,
        extra in 0.0..2.0f64,
    ) {
        let (f, lip) = trig(&terms);
        let r2 = r1 + extra;
        let z = [c(x, y)];
        let o1 = oscillation(&f, &z, r1, 1024).unwrap().value;
        let o2 = oscillation(&f, &z, r2, 1024).unwrap().value;
        // Both values are sampled lower bounds; the slack is the Lipschitz
        // constant times a generous covering radius of 1024 points.
        prop_assert!(o1 <= o2 + lip * 0.1 * r2 + 1e-12, "{o1} > {o2}");
    }

    #[test]
    fn oscillation_is_subadditive(
        tf in prop::collection::vec(term(), 1..4),
        tg in prop::collection::vec(term(), 1..4),
        x in -20.0..20.0f64,
        y in -20.0..20.0f64,
        r in 0.1..3.0f64,
    ) {
        let (f, _) = trig(&tf);
        let (g, _) = trig(&tg);
        let z = [c(x, y)];
        let pts = ball_samples(&z, r, 128);
        let fg = oscillation_on(&f.sum(&g), &z, &pts);
        let of = oscillation_on(&f, &z, &pts);
        let og = oscillation_on(&g, &z, &pts);
        prop_assert!((fg - of).abs() <= og + 1e-12);
    }
}
