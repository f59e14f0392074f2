use fock_core::measure::{power_sum_sides, Boundedness};
use fock_core::{
    boundedness_criterion, build_grid, duality_constant, hille_tamarkin_integral, lp_norm, FockParams, QuadratureGrid,
    Scheme, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest value of `a<z,w> - b|z|^2 - c|w|^2` (real part) over a coarse grid in `C x C`.
fn exponent_sup(a: f64, b: f64, c: f64) -> f64 {
    let axis: Vec<f64> = (-6..=6).map(|k| k as f64 * 0.5).collect();
    let mut best = f64::NEG_INFINITY;
    for &zx in &axis {
        for &zy in &axis {
            for &wx in &axis {
                for &wy in &axis {
                    let (z, w) = (C64::new(zx, zy), C64::new(wx, wy));
                    let v = a * (z * w.conj()).re - b * z.norm_sqr() - c * w.norm_sqr();
                    best = best.max(v);
                }
            }
        }
    }
    best
}

#[test]
fn boundedness_examples() {
    assert_eq!(boundedness_criterion(2.0, 1.0, 1.0).unwrap().verdict, Boundedness::Bounded);
    let r = boundedness_criterion(3.0, 1.0, 1.0).unwrap();
    assert_eq!(r.verdict, Boundedness::Unbounded);
    assert_eq!(r.witness.unwrap().ratio, 1.0);
    assert!(r.witness.unwrap().growth > 0.0);
    let b = boundedness_criterion(1.0, 1.0, 1.0).unwrap();
    assert_eq!(b.verdict, Boundedness::Bounded);
    let sup = exponent_sup(1.0, 1.0, 1.0);
    assert!(sup.is_finite() && sup.exp() <= 1.0);
    assert!(boundedness_criterion(0.0, 1.0, 1.0).is_err());
}

#[test]
fn boundedness_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut triples = vec![(2.0, 1.0, 1.0)];
    while triples.len() < 100 {
        triples.push((rng.gen_range(0.1..4.0), rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)));
    }
    for (a, b, c) in triples {
        let r = boundedness_criterion(a, b, c).unwrap();
        let disc = 4.0 * b * c - a * a;
        let want = if disc >= 0.0 { Boundedness::Bounded } else { Boundedness::Unbounded };
        assert_eq!(r.verdict, want, "({a}, {b}, {c})");
        if let Some(w) = r.witness {
            // Along w = ratio * z the exponent equals growth * |z|^2.
            let z = C64::new(3.0, 0.0);
            let wz = z * w.ratio;
            let e = a * (z * wz.conj()).re - b * z.norm_sqr() - c * wz.norm_sqr();
            assert!((e - w.growth * 9.0).abs() < 1e-9 * e.abs().max(1.0));
            assert!(w.growth > 0.0);
        } else {
            assert!(exponent_sup(a, b, c) <= 1e-12);
        }
    }
}

#[test]
fn duality_constants() {
    for n in 1..=3 {
        assert_eq!(duality_constant(&FockParams::hilbert(n, 1.0).unwrap()), 1.0);
    }
    let p4 = duality_constant(&FockParams::new(1, 4.0, 1.0).unwrap());
    let oracle = 2.0 / (4f64.powf(0.25) * (4.0f64 / 3.0).powf(0.75));
    assert!((p4 - oracle).abs() < 1e-4 && (p4 - 1.1398).abs() < 1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..50 {
        let p = rng.gen_range(1.05..8.0);
        let n = rng.gen_range(1..4);
        let a = FockParams::new(n, p, 1.0).unwrap();
        let b = FockParams::new(n, a.q, 1.0).unwrap();
        assert!((duality_constant(&a) - duality_constant(&b)).abs() < 1e-12);
        assert!(duality_constant(&a) >= 1.0);
    }
}

/// Nested midpoint rules: inner over a box in `C`, outer over the disk in polar coordinates.
fn brute_force_ht(radius: f64, params: &FockParams) -> f64 {
    let (p, q, alpha) = (params.p, params.q, params.alpha);
    let nu = params.measure_weight();
    let pi = std::f64::consts::PI;
    let inner = |w: f64| {
        let (half, m) = (8.0 / nu.sqrt(), 400);
        let h = 2.0 * half / m as f64;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                let (x, y) = (-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h);
                let e = q * (alpha * x * w - (2.0 - p) * alpha * w * w / 2.0) - nu * (x * x + y * y);
                s += e.exp();
            }
        }
        s * h * h * nu / pi
    };
    let m = 200;
    let h = radius / m as f64;
    let mut s = 0.0;
    for k in 0..m {
        let r = (k as f64 + 0.5) * h;
        s += inner(r).powf(p / q) * (-nu * r * r).exp() * 2.0 * pi * r * h;
    }
    s * nu / pi
}

#[test]
fn hille_tamarkin_values() {
    for p in [2.0, 4.0] {
        let params = FockParams::new(1, p, 1.0).unwrap();
        let grid: QuadratureGrid = build_grid(&params, &Scheme::HermiteTensor, 40).unwrap();
        assert_eq!(hille_tamarkin_integral(0.0, &params, &grid).unwrap(), 0.0);
        let one = hille_tamarkin_integral(1.0, &params, &grid).unwrap();
        let two = hille_tamarkin_integral(2.0, &params, &grid).unwrap();
        assert!(one.is_finite() && two >= one);
        let oracle = brute_force_ht(1.0, &params);
        assert!((one - oracle).abs() < 1e-2 * oracle, "p={p}: {one} vs {oracle}");
        if p == 2.0 {
            assert!((one - 1.0).abs() < 1e-8 && (two - 4.0).abs() < 1e-8);
        }
    }
}

#[test]
fn lp_norm_examples_and_norm_laws() {
    let params = FockParams::hilbert(1, 1.0).unwrap();
    let grid = build_grid(&params, &Scheme::HermiteTensor, 40).unwrap();
    let ones = vec![C64::new(1.0, 0.0); grid.len()];
    assert!((lp_norm(&ones, &grid, &params).unwrap() - 1.0).abs() < 1e-12);
    let kernel = grid.sample(|z| (z[0]).exp());
    assert!((lp_norm(&kernel, &grid, &params).unwrap() - 0.5f64.exp()).abs() < 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for p in [1.5, 2.0, 3.0] {
        let params = FockParams::new(1, p, 1.0).unwrap();
        let grid = build_grid(&params, &Scheme::HermiteTensor, 20).unwrap();
        for _ in 0..20 {
            let f: Vec<C64> = (0..grid.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let g: Vec<C64> = (0..grid.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let sum: Vec<C64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
            let n = |v: &[C64]| lp_norm(v, &grid, &params).unwrap();
            assert!(n(&sum) <= n(&f) + n(&g) + 1e-12);
            let k = C64::new(3.0, 4.0);
            let scaled: Vec<C64> = f.iter().map(|a| a * k).collect();
            assert!((n(&scaled) - 5.0 * n(&f)).abs() < 1e-12 * n(&scaled));
        }
    }
    assert!(lp_norm(&ones[1..], &grid, &params).is_err());
}

#[test]
fn grid_moments_up_to_the_certified_degree() {
    let params = FockParams::hilbert(1, 1.0).unwrap();
    for (scheme, size) in [(Scheme::HermiteTensor, 40), (Scheme::polar(), 32)] {
        let grid = build_grid(&params, &scheme, size).unwrap();
        let mut fact = 1.0;
        for m in 0..=grid.exactness_degree() / 2 {
            if m > 0 {
                fact *= m as f64;
            }
            let got = grid.integrate_real(|z| z[0].norm_sqr().powi(m as i32));
            assert!((got - fact).abs() <= 1e-10 * fact, "{} m={m}", scheme.name());
        }
    }
    let h = build_grid(&params, &Scheme::HermiteTensor, 40).unwrap();
    let p = build_grid(&params, &Scheme::polar(), 64).unwrap();
    let m4 = |g: &QuadratureGrid| g.integrate_real(|z| z[0].norm_sqr().powi(2));
    assert!((m4(&h) - m4(&p)).abs() < 1e-8);
}

#[test]
fn power_sum_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..200 {
        let k = rng.gen_range(1..10);
        let xs: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..5.0)).collect();
        let p = rng.gen_range(1.0..5.0);
        let (lhs, rhs) = power_sum_sides(&xs, p);
        assert!(lhs <= rhs * (1.0 + 1e-12));
    }
}
