use alphamod::covering::{build_bapu, build_covering, check_covering};
use alphamod::grid::{dft1d, dft2d, Direction, Fn1D, Grid1D, Symbol2D};
use alphamod::quantize::{quantize_kn, OperatorMatrix, Provenance};
use alphamod::scalar::Real;
use alphamod::schatten::{schatten_norm, singular_values};
use alphamod::spaces::{alpha_mod_norm_1d, NormSpec};
use alphamod::Complex;
use ndarray::Array2;
use proptest::prelude::*;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex<f64>>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex::new(a, b)), len)
}

fn matrix(n: usize) -> impl Strategy<Value = OperatorMatrix<f64>> {
    complex_vec(n * n).prop_map(move |v| {
        let e = Array2::from_shape_vec((n, n), v).unwrap();
        OperatorMatrix::new(Grid1D::new(1.0, n).unwrap(), e, Provenance::Direct).unwrap()
    })
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![1.0..6.0f64, Just(1.0), Just(2.0), Just(f64::INFINITY)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trip_and_parseval(v in complex_vec(32), l in 0.5..20.0f64) {
        let g = Grid1D::new(l, 32).unwrap();
        let f = Fn1D::new(g, v).unwrap();
        let hat = dft1d(&f, Direction::Forward);
        let back = dft1d(&hat, Direction::Inverse);
        prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-12 * f.max_abs().max(1.0));
        let lhs = f.lp_norm(2.0).unwrap();
        let rhs = hat.lp_norm(2.0).unwrap() / (2.0 * std::f64::consts::PI).sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
    }

    #[test]
    fn hilbert_schmidt_identity(v in complex_vec(16 * 16), l in 1.0..10.0f64) {
        let g = Grid1D::new(l, 16).unwrap();
        let sigma = Symbol2D::new(g, g.dual(), Array2::from_shape_vec((16, 16), v).unwrap()).unwrap();
        let a = quantize_kn(&sigma).unwrap();
        let want = sigma.l2_sum() / 4.0;
        prop_assert!((a.frobenius() - want).abs() <= 1e-12 * want);
        // quantization of the transform-side round trip is unchanged
        let again = dft2d(&dft2d(&sigma, Direction::Forward), Direction::Inverse);
        let b = quantize_kn(&again).unwrap();
        prop_assert!(b.sub(&a).unwrap().frobenius() <= 1e-12 * want);
    }

    #[test]
    fn operator_norm_bounded_by_every_schatten_norm(a in matrix(8), p in exponent()) {
        let s = singular_values(&a).unwrap();
        prop_assert!(s.operator_norm() <= schatten_norm(&a, p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn schatten_norms_decrease_in_p(a in matrix(8), p in 1.0..4.0f64, dp in 0.0..4.0f64) {
        let lo = schatten_norm(&a, p + dp).unwrap();
        let hi = schatten_norm(&a, p).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn adjoint_has_same_norm(a in matrix(8), p in exponent()) {
        let x = schatten_norm(&a, p).unwrap();
        let y = schatten_norm(&a.adjoint(), p).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x);
    }

    #[test]
    fn triangle_and_homogeneity(a in matrix(6), b in matrix(6), p in exponent(), c in -3.0..3.0f64) {
        let sum = schatten_norm(&a.add(&b).unwrap(), p).unwrap();
        let (na, nb) = (schatten_norm(&a, p).unwrap(), schatten_norm(&b, p).unwrap());
        prop_assert!(sum <= (na + nb) * (1.0 + 1e-12));
        let scaled = schatten_norm(&a.scale(Complex::new(0.0, c)), p).unwrap();
        prop_assert!((scaled - c.abs() * na).abs() <= 1e-12 * na.max(1.0));
    }

    #[test]
    fn products_obey_mixed_bounds(a in matrix(6), b in matrix(6), p in exponent()) {
        let ab = schatten_norm(&a.matmul(&b).unwrap(), p).unwrap();
        let oa = singular_values(&a).unwrap().operator_norm();
        let ob = singular_values(&b).unwrap().operator_norm();
        prop_assert!(ab <= oa * schatten_norm(&b, p).unwrap() * (1.0 + 1e-12));
        prop_assert!(ab <= schatten_norm(&a, p).unwrap() * ob * (1.0 + 1e-12));
    }

    #[test]
    fn truncated_svd_is_best_low_rank(a in matrix(8), k in 0usize..8) {
        let svd = f64::dense_svd(a.entries()).unwrap();
        let mut trunc = Array2::zeros((8, 8));
        for r in 0..k {
            for i in 0..8 {
                for j in 0..8 {
                    trunc[[i, j]] += svd.u[[i, r]] * svd.v[[j, r]].conj() * svd.s[r];
                }
            }
        }
        let approx = OperatorMatrix::new(a.grid, trunc, Provenance::Direct).unwrap();
        let resid = singular_values(&a.sub(&approx).unwrap()).unwrap();
        prop_assert!((resid.operator_norm() - svd.s[k]).abs() <= 1e-10 * svd.s[0]);
        let tail: f64 = svd.s[k..].iter().map(|s| s * s).sum::<f64>().sqrt();
        prop_assert!((a.sub(&approx).unwrap().frobenius() - tail).abs() <= 1e-10 * svd.s[0]);
    }

    #[test]
    fn partition_of_unity_for_any_covering(alpha in 0.0..=1.0f64, omega in 3.0..16.0f64, rho in 0.05..0.45f64) {
        let cov = build_covering(alpha, omega, 1.0, 1.0).unwrap();
        let grid = Grid1D::new(4.0, 1024).unwrap();
        let bapu = build_bapu(&cov, grid, rho).unwrap();
        let rep = check_covering(&cov, &bapu, 2.0);
        prop_assert!(rep.unity_error <= 1e-8);
        prop_assert!(rep.support_violation <= 1e-12);
        prop_assert!(rep.comparability_ok);
    }

    #[test]
    fn covering_norm_is_a_norm(u in complex_vec(128), v in complex_vec(128), s in 0.0..2.0f64, p in exponent()) {
        let grid = Grid1D::new(6.0, 128).unwrap();
        let bapu = build_bapu(&build_covering(0.5, 20.0, 1.0, 1.0).unwrap(), grid, 0.25).unwrap();
        let spec = NormSpec::scalar(s, p, 1.0, 0.5).unwrap();
        let norm = |f: &Fn1D<f64>| alpha_mod_norm_1d(f, &bapu, &spec).unwrap().0;
        let (f, g) = (Fn1D::new(grid, u).unwrap(), Fn1D::new(grid, v).unwrap());
        let (nf, ng) = (norm(&f), norm(&g));
        prop_assert!(norm(&f.add(&g).unwrap()) <= (nf + ng) * (1.0 + 1e-10));
        prop_assert!((norm(&f.scale(Complex::new(-2.5, 0.0))) - 2.5 * nf).abs() <= 1e-10 * nf);
        let heavier = alpha_mod_norm_1d(&f, &bapu, &NormSpec::scalar(s + 0.5, p, 1.0, 0.5).unwrap()).unwrap().0;
        prop_assert!(heavier >= nf * (1.0 - 1e-12));
    }
}
