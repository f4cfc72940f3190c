mod common;

use proptest::prelude::*;
use spatreg_core::advisor::{select_model, CorrelationEvidence};
use spatreg_core::correlation::{cross_correlation, pearson_r};
use spatreg_core::data::zscore;
use spatreg_core::decomposition::{decompose_canonical, decompose_full, decompose_no_error};
use spatreg_core::weights::{normalize_global, spatial_weights, ContiguityMatrix, DistanceMatrix};
use spatreg_core::{CorrelationTest, DecompositionInput, Matrix, ModelVariant, SpatialCorrelationMatrix, TestMethod};

fn spread_vec(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, len).prop_filter("needs spread", |v| {
        let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        hi - lo > 1e-2
    })
}

fn symmetric_distances(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(0.01f64..1e4, n * (n - 1) / 2).prop_map(move |upper| {
        let mut m = Matrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, upper[k]);
                m.set(j, i, upper[k]);
                k += 1;
            }
        }
        m
    })
}

proptest! {
    #[test]
    fn zscore_moments(v in spread_vec(2..=60)) {
        let z = zscore(&v).unwrap();
        let n = z.len() as f64;
        let sum: f64 = z.as_slice().iter().sum();
        let ss: f64 = z.as_slice().iter().map(|x| x * x).sum();
        prop_assert!(sum.abs() <= 1e-12 * n);
        prop_assert!((ss / n - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zscore_idempotent(v in spread_vec(2..=60)) {
        let z = zscore(&v).unwrap();
        let zz = zscore(z.as_slice()).unwrap();
        for (a, b) in z.as_slice().iter().zip(zz.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn zscore_affine_invariance(v in spread_vec(2..=40), a in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0], c in -100.0f64..100.0) {
        let z = zscore(&v).unwrap();
        let t: Vec<f64> = v.iter().map(|x| a * x + c).collect();
        let zt = zscore(&t).unwrap();
        for (p, q) in z.as_slice().iter().zip(zt.as_slice()) {
            prop_assert!((a.signum() * p - q).abs() <= 1e-9);
        }
    }

    #[test]
    fn weights_are_normalized(m in (2usize..12).prop_flat_map(symmetric_distances)) {
        let w = spatial_weights(&DistanceMatrix::new(m).unwrap()).unwrap();
        let wm = w.matrix();
        prop_assert!((wm.sum() - 1.0).abs() <= 1e-12);
        for i in 0..wm.rows() {
            prop_assert_eq!(wm.get(i, i), 0.0);
            for j in 0..wm.cols() {
                prop_assert_eq!(wm.get(i, j), wm.get(j, i));
            }
        }
    }

    #[test]
    fn normalize_preserves_structure(upper in prop::collection::vec(0.0f64..5.0, 10)) {
        let n = 5;
        let mut m = Matrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, upper[k]);
                m.set(j, i, upper[k]);
                k += 1;
            }
        }
        prop_assume!(m.sum() > 0.0);
        let w = normalize_global(&ContiguityMatrix::new(m).unwrap()).unwrap();
        prop_assert!((w.matrix().sum() - 1.0).abs() <= 1e-12);
        prop_assert!(w.matrix().is_symmetric(0.0));
    }

    #[test]
    fn pearson_bounded_and_swap_symmetric(
        seed in any::<u64>(),
        n in 3usize..30,
    ) {
        let mut rng = common::rng(seed);
        let (x, y) = common::correlated_pair(&mut rng, n, 0.3);
        let w = common::random_weights(&mut rng, n);
        let r = pearson_r(&x, &y).unwrap();
        prop_assert!(r * r <= 1.0 + 1e-12);
        prop_assert_eq!(r, pearson_r(&y, &x).unwrap());
        let a = cross_correlation(&x, &y, &w).unwrap();
        let b = cross_correlation(&y, &x, &w).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn decomposition_modes_agree(
        r in -0.99f64..0.99,
        ix in -0.5f64..0.5,
        ixy in -0.5f64..0.5,
        iy in -0.5f64..0.5,
    ) {
        let c = SpatialCorrelationMatrix::new(ix, ixy, iy);
        prop_assume!(c.determinant().abs() > 1e-6);
        let can = decompose_canonical(r, c).unwrap();
        let ne = decompose_no_error(r, r, c).unwrap();
        let full = decompose_full(&DecompositionInput::new(r, r, 0.0, c).unwrap()).unwrap();
        let scale = 1.0f64.max(can.beta1.abs()).max(can.beta2.abs());
        prop_assert!((can.beta1 - ne.beta1).abs() <= 1e-12 * scale);
        prop_assert!((can.beta2 - ne.beta2).abs() <= 1e-12 * scale);
        prop_assert!((can.beta1 - full.beta1).abs() <= 1e-12 * scale);
        prop_assert!((can.beta2 - full.beta2).abs() <= 1e-12 * scale);

        // β₂ carries the sign of (1 − R²)·I_x / Q
        let q = ix * iy - ixy * ixy;
        let expected = (1.0 - r * r) * ix / q;
        prop_assert!(can.beta2 == 0.0 || can.beta2.signum() == expected.signum());
        prop_assert!((can.beta2 - expected).abs() <= 1e-12 * scale);
    }

    #[test]
    fn collinearity_override_is_monotone(
        p in prop::array::uniform4(0.0f64..1.0),
        corr in 0.9501f64..1.0,
        sign in prop::bool::ANY,
    ) {
        let t = |s: f64, p: f64| CorrelationTest { statistic: s, slope_se: 0.1, t_value: s / 0.1, p_value: p, method: TestMethod::RegressionT };
        let e = CorrelationEvidence {
            test_ix: t(-0.2, p[0]),
            test_iy: t(0.1, p[1]),
            test_ixy: t(0.05, p[2]),
            test_iyx: t(0.05, p[3]),
            q: -0.2 * 0.1 - 0.05 * 0.05,
            corr_lag_auto: if sign { corr } else { -corr },
            alpha: 0.05,
            collinearity_threshold: 0.95,
            sar_fit: None,
            slx_fit: None,
        };
        let d = select_model(&e);
        prop_assert!(d.collinearity_flag);
        prop_assert!(d.recommended == ModelVariant::Sar || d.recommended == ModelVariant::Slx);
        prop_assert_eq!(d, select_model(&e.clone()));
    }
}
