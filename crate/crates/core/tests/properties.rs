use fock_core::band::{cube_lattice, partition_functions};
use fock_core::basis::{basis_count, enumerate_indices};
use fock_core::export::{fmt_csv, matrix_from_csv, matrix_to_csv, to_json};
use fock_core::spectra::{hausdorff, PointSet};
use fock_core::{parse_symbol, FockParams, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = C64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_metric_on_finite_sets(
        a in prop::collection::vec(point(), 1..8),
        b in prop::collection::vec(point(), 1..8),
        c in prop::collection::vec(point(), 1..8),
    ) {
        prop_assert_eq!(hausdorff(&a, &a), 0.0);
        prop_assert_eq!(hausdorff(&a, &b), hausdorff(&b, &a));
        prop_assert!(hausdorff(&a, &c) <= hausdorff(&a, &b) + hausdorff(&b, &c) + 1e-12);
    }

    #[test]
    fn clusters_are_separated_and_cover_the_input(values in prop::collection::vec(point(), 1..40), tol in 0.01..2.0f64) {
        let set = PointSet::cluster(&values, tol);
        prop_assert_eq!(set.multiplicity.iter().sum::<usize>(), values.len());
        for (i, p) in set.points.iter().enumerate() {
            for q in &set.points[i + 1..] {
                prop_assert!((p - q).norm() > tol);
            }
        }
        prop_assert!(values.iter().all(|v| set.distance_to(*v) <= 2.0 * tol));
    }

    #[test]
    fn partition_of_unity(x in -40.0..40.0f64, y in -40.0..40.0f64, t in 0.05..1.0f64) {
        let fam = partition_functions(&cube_lattice(1, 40.0).unwrap(), t).unwrap();
        prop_assert!((fam.phi_sum(&[C64::new(x, y)]) - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn basis_counts(n in 1usize..4, degree in 0usize..12) {
        let idx = enumerate_indices(n, degree);
        prop_assert_eq!(idx.len(), basis_count(n, degree));
        prop_assert_eq!(idx.len(), binomial(degree + n, n));
        prop_assert!(idx.windows(2).all(|w| w[0].degree() <= w[1].degree()));
    }

    #[test]
    fn csv_cells_keep_nine_digits(x in -1e12..1e12f64, e in -12i32..12) {
        let v = x * 10f64.powi(e);
        let back: f64 = fmt_csv(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-9 * v.abs());
    }

    #[test]
    fn matrices_round_trip_through_csv(entries in prop::collection::vec(point(), 9)) {
        let m = DMatrix::from_row_slice(3, 3, &entries);
        let back = matrix_from_csv(&matrix_to_csv(&m).unwrap()).unwrap();
        prop_assert!((back - &m).camax() <= 1e-8 * m.camax().max(1.0));
    }

    #[test]
    fn json_floats_round_trip_exactly(x in prop::num::f64::NORMAL) {
        let text = to_json(&vec![x]).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back[0], x);
    }

    #[test]
    fn parsed_constants_and_sums(a in -3.0..3.0f64, b in -3.0..3.0f64, x in -10.0..10.0f64, y in -10.0..10.0f64) {
        let f = parse_symbol(&format!("const({a})+const({b})*i"), 1).unwrap();
        let z = [C64::new(x, y)];
        prop_assert!((f.eval(&z) - C64::new(a, b)).norm() < 1e-14);
        let g = parse_symbol(&format!("product(const({a}), radial(1/(1+s)))"), 1).unwrap();
        prop_assert!((g.eval(&z).re - a / (1.0 + x * x + y * y)).abs() < 1e-14);
        prop_assert!(g.eval(&z).norm() <= g.sup_bound() + 1e-14);
    }

    #[test]
    fn dual_exponents(p in 1.01..20.0f64) {
        let params = FockParams::new(1, p, 1.0).unwrap();
        prop_assert!((1.0 / params.p + 1.0 / params.q - 1.0).abs() < 1e-12);
        prop_assert!((params.dual().q - p).abs() < 1e-9 * p);
    }
}
