use gtdist::{evaluate_laplacian, normalize_distribution, GtError, LaplaceMode, B_MIN};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mass_equals_weight(d in 1usize..300, w in 1e-6f64..=1.0, mu_frac in 0.0f64..=1.0, b in 0.0f64..20.0) {
        let mu = mu_frac * (d - 1) as f64;
        let out = evaluate_laplacian(d, &LaplaceMode::new(w, mu, b)).unwrap();
        prop_assert_eq!(out.len(), d);
        prop_assert!((out.iter().sum::<f64>() - w).abs() <= 1e-9);
        prop_assert!(out.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn translation_consistent(b in 0.05f64..3.0, frac in 0.0f64..1.0, s in 1usize..20) {
        // The truncated tail mass must stay below the tolerance, so both
        // locations keep 25 scales of room to each border.
        let d = 400;
        let margin = (25.0 * b.max(B_MIN)).ceil();
        let mu = margin + frac;
        prop_assume!(mu + s as f64 + margin <= (d - 1) as f64);
        let a = evaluate_laplacian(d, &LaplaceMode::new(1.0, mu, b)).unwrap();
        let c = evaluate_laplacian(d, &LaplaceMode::new(1.0, mu + s as f64, b)).unwrap();
        for i in 0..d - s {
            prop_assert!((a[i] - c[i + s]).abs() <= 1e-9, "bin {}: {} vs {}", i, a[i], c[i + s]);
        }
    }

    #[test]
    fn symmetric_about_integer_centre(b in 0.0f64..10.0) {
        let out = evaluate_laplacian(5, &LaplaceMode::new(1.0, 2.0, b)).unwrap();
        prop_assert_eq!(out[1], out[3]);
        prop_assert_eq!(out[0], out[4]);
    }

    #[test]
    fn linear_in_weight(w in 1e-3f64..1.0, mu in 0.0f64..4.0, b in 0.1f64..5.0) {
        let one = evaluate_laplacian(5, &LaplaceMode::new(1.0, mu, b)).unwrap();
        let part = evaluate_laplacian(5, &LaplaceMode::new(w, mu, b)).unwrap();
        for (x, y) in one.iter().zip(&part) {
            prop_assert!((x * w - y).abs() <= 1e-15);
        }
    }
}

#[test]
fn reference_values() {
    let out = evaluate_laplacian(5, &LaplaceMode::new(1.0, 2.0, 1.0)).unwrap();
    let expected = [0.06745081, 0.1833503, 0.49839779, 0.1833503, 0.06745081];
    for (a, b) in out.iter().zip(expected) {
        assert!((a - b).abs() < 1e-8);
    }
    let half = evaluate_laplacian(5, &LaplaceMode::new(0.5, 2.0, 1.0)).unwrap();
    for (a, b) in out.iter().zip(&half) {
        assert_eq!(a * 0.5, *b);
    }
}

#[test]
fn minimum_scale_is_nearly_one_hot() {
    for mu in [0usize, 1, 17, 48, 95] {
        for b in [0.0, B_MIN / 2.0, B_MIN] {
            let out = evaluate_laplacian(96, &LaplaceMode::new(0.7, mu as f64, b)).unwrap();
            let argmax = (0..96).max_by(|&i, &j| out[i].partial_cmp(&out[j]).unwrap().then(j.cmp(&i))).unwrap();
            assert_eq!(argmax, mu);
            assert!(out[mu] >= 0.99 * 0.7);
        }
    }
}

#[test]
fn far_bins_underflow_but_the_peak_survives() {
    // With b clamped to 0.05, e^(-95 / 0.05) is below the smallest subnormal.
    let out = evaluate_laplacian(96, &LaplaceMode::new(1.0, 0.0, 0.0)).unwrap();
    assert!(out[0] > 1.0 - 1e-8);
    assert_eq!(out[95], 0.0);
}

#[test]
fn rejects_non_finite_parameters() {
    for m in [
        LaplaceMode::new(f64::NAN, 1.0, 1.0),
        LaplaceMode::new(1.0, f64::INFINITY, 1.0),
        LaplaceMode::new(1.0, 1.0, f64::NAN),
    ] {
        assert!(matches!(evaluate_laplacian(5, &m), Err(GtError::InvalidParameter(_))));
    }
}

#[test]
fn normalization_examples() {
    assert_eq!(normalize_distribution(vec![2.0, 2.0, 0.0, 0.0]).unwrap().probs(), &[0.5, 0.5, 0.0, 0.0]);
    assert_eq!(normalize_distribution(vec![1.0, 0.0, 0.0]).unwrap().probs(), &[1.0, 0.0, 0.0]);
    assert!(matches!(normalize_distribution(vec![0.0; 3]), Err(GtError::DegenerateDistribution(_))));
    assert!(normalize_distribution(vec![1.0, -0.5]).is_err());
}

#[test]
fn single_precision_matches_double_closely() {
    let a = evaluate_laplacian(64, &gtdist::distribution::LaplaceMode::new(1.0f32, 20.3, 1.7)).unwrap();
    let b = evaluate_laplacian(64, &LaplaceMode::new(1.0f64, 20.3, 1.7)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((*x as f64 - y).abs() < 1e-6);
    }
}
