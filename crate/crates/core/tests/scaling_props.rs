use ndarray::{Array2, Axis};
use proptest::prelude::*;
use scalebench::scaling::{fit, fit_transform, inverse_normal_cdf, quantile, ScalerKind};
use statrs::distribution::{ContinuousCDF, Normal};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(-1000.0f64..1000.0, rows * cols)
        .prop_map(move |v| Array2::from_shape_vec((rows, cols), v).unwrap())
}

fn fold_pair() -> impl Strategy<Value = (Array2<f64>, Array2<f64>)> {
    (2usize..40, 1usize..20, 1usize..5).prop_flat_map(|(n, m, p)| (matrix(n, p), matrix(m, p)))
}

fn sorted(col: ndarray::ArrayView1<f64>) -> Vec<f64> {
    let mut v = col.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn all_kinds() -> Vec<ScalerKind> {
    ["NS", "MC", "SS", "PS", "VS", "MM", "MA", "RS", "QT"]
        .iter()
        .map(|c| c.parse().unwrap())
        .chain([ScalerKind::MinMax { lower: -1.0, upper: 1.0 }, ScalerKind::Quantile { n_quantiles: 10 }])
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standard_scaler_moments(x in matrix(30, 3)) {
        let (_, t) = fit_transform(ScalerKind::Standard, &x).unwrap();
        for c in t.columns() {
            let mean = c.mean().unwrap();
            let sd = c.mapv(|v| (v - mean) * (v - mean)).mean().unwrap().sqrt();
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((sd - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn min_max_hits_both_ends(x in matrix(25, 2), lo in -5.0f64..0.0, width in 0.5f64..5.0) {
        let kind = ScalerKind::MinMax { lower: lo, upper: lo + width };
        let (_, t) = fit_transform(kind, &x).unwrap();
        for c in t.columns() {
            let s = sorted(c);
            prop_assert!((s[0] - lo).abs() < 1e-12);
            prop_assert!((s[s.len() - 1] - (lo + width)).abs() < 1e-12);
        }
    }

    #[test]
    fn max_abs_and_robust(x in matrix(21, 2)) {
        let (_, t) = fit_transform(ScalerKind::MaxAbs, &x).unwrap();
        for c in t.columns() {
            let m = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            prop_assert!((m - 1.0).abs() < 1e-12);
        }
        let (_, t) = fit_transform(ScalerKind::Robust, &x).unwrap();
        for c in t.columns() {
            let s = sorted(c);
            prop_assert!(quantile(&s, 0.5).unwrap().abs() < 1e-9);
            let iqr = quantile(&s, 0.75).unwrap() - quantile(&s, 0.25).unwrap();
            prop_assert!((iqr - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn affine_kinds_follow_translation_and_scale((train, test) in fold_pair()) {
        for kind in all_kinds().into_iter().filter(ScalerKind::is_affine) {
            let f = fit(kind, &train).unwrap();
            let (t, s) = f.translation_scale().unwrap();
            let out = f.transform(&test).unwrap();
            for ((i, j), v) in out.indexed_iter() {
                let want = (test[[i, j]] - t[j]) / s[j];
                prop_assert!((v - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn quantile_transform_is_monotone((train, test) in fold_pair()) {
        let f = fit("QT".parse().unwrap(), &train).unwrap();
        let out = f.transform(&test).unwrap();
        let bound = inverse_normal_cdf(1.0 - 1e-7).unwrap();
        for j in 0..test.ncols() {
            let mut pairs: Vec<(f64, f64)> = test.column(j).iter().copied().zip(out.column(j).iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in pairs.windows(2) {
                prop_assert!(w[0].1 <= w[1].1);
            }
            prop_assert!(pairs.iter().all(|p| p.1.abs() <= bound + 1e-12));
        }
    }

    // The test-fold transform is row-wise: permuting, duplicating or
    // dropping test rows just permutes, duplicates or drops output rows.
    #[test]
    fn test_rows_never_influence_parameters(
        (train, test) in fold_pair(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..30),
    ) {
        let idx: Vec<usize> = picks.iter().map(|p| p.index(test.nrows())).collect();
        let reshuffled = test.select(Axis(0), &idx);
        for kind in all_kinds() {
            let f = fit(kind, &train).unwrap();
            let full = f.transform(&test).unwrap();
            let part = f.transform(&reshuffled).unwrap();
            prop_assert_eq!(part, full.select(Axis(0), &idx));
        }
    }

    #[test]
    fn inverse_normal_matches_reference(p in 1e-12f64..(1.0 - 1e-12)) {
        let want = Normal::new(0.0, 1.0).unwrap().inverse_cdf(p);
        let got = inverse_normal_cdf(p).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "p={p}: {got} vs {want}");
    }
}

#[test]
fn constant_columns_stay_finite() {
    let x = Array2::from_shape_vec((4, 2), vec![3.0, 0.0, 3.0, 0.0, 3.0, 0.0, 3.0, 0.0]).unwrap();
    for kind in all_kinds() {
        let (_, t) = fit_transform(kind, &x).unwrap();
        assert!(t.iter().all(|v| v.is_finite()), "{kind}");
    }
}

#[test]
fn inverse_normal_rejects_bounds() {
    assert!(inverse_normal_cdf(0.0).is_err());
    assert!(inverse_normal_cdf(1.0).is_err());
    assert_eq!(inverse_normal_cdf(0.5).unwrap(), 0.0);
}
