use dyadic::dilation::{self, MatrixPair};
use dyadic::filters::FilterCoefficients;
use dyadic::jsr::{self, MatrixNorm};
use dyadic::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Four-tap filters with `sum c_k = 2` and `sum c_k c_{k-2} = 0` for every
/// angle; `theta = pi/3` gives d4, `theta = pi` the stretched box.
fn four_tap(theta: f64) -> FilterCoefficients {
    let (s, c) = theta.sin_cos();
    FilterCoefficients::new(
        vec![(1.0 - c + s) / 2.0, (1.0 + c + s) / 2.0, (1.0 + c - s) / 2.0, (1.0 - c - s) / 2.0],
        None,
    )
    .unwrap()
}

fn builtin(name: &str) -> FilterCoefficients {
    FilterCoefficients::builtin(name).unwrap()
}

#[test]
fn family_contains_d4_and_stretched_box() {
    let d4 = four_tap(std::f64::consts::PI / 3.0);
    for (a, b) in d4.coeffs().iter().zip(builtin("d4").coeffs()) {
        assert!((a - b).abs() < 1e-15);
    }
    let sb = four_tap(std::f64::consts::PI);
    for (a, b) in sb.coeffs().iter().zip(builtin("stretched-box").coeffs()) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn stretched_box_samples_are_flagged() {
    let phi = dilation::refine(&builtin("stretched-box"), 4).unwrap();
    assert!(phi.degenerate);
    assert!(phi.dilation_residual() < 1e-12);
}

#[test]
fn hat_samples_are_the_hat() {
    let phi = dilation::refine(&builtin("hat"), 6).unwrap();
    for (x, v) in phi.points() {
        assert!((v - (1.0 - (x - 1.0).abs())).abs() < 1e-14, "x = {x}");
    }
}

#[test]
fn phi_hat_matches_sampled_transform() {
    let d4 = builtin("d4");
    let phi = dilation::refine(&d4, 12).unwrap();
    for xi in [0.5, 1.0, 3.0, 7.0] {
        let a = dilation::phi_hat(&d4, xi, 40);
        let b = phi.discrete_transform(xi);
        assert!((a - b).norm() < 1e-4, "xi = {xi}: {a} vs {b}");
    }
}

#[test]
fn reduced_pair_needs_sum_rule() {
    let f = FilterCoefficients::new(vec![0.5, 1.0, 0.25, 0.25], None).unwrap();
    assert!(matches!(jsr::reduced_pair(&f), Err(Error::InvalidFilter(_))));
}

#[test]
fn jsr_norm_choices_bracket_the_same_radius() {
    let d4 = jsr::reduced_pair(&builtin("d4")).unwrap();
    let s = jsr::jsr_bounds(&d4.a, &d4.b, 10, MatrixNorm::Spectral).unwrap();
    let i = jsr::jsr_bounds(&d4.a, &d4.b, 10, MatrixNorm::Infinity).unwrap();
    assert_eq!(s.lower, i.lower);
    assert!(s.lower <= s.upper && i.lower <= i.upper);
    let c0 = builtin("d4").coeffs()[0];
    assert!((s.lower - c0).abs() < 1e-12);
}

fn pair_strategy() -> impl Strategy<Value = (DMatrix<f64>, DMatrix<f64>)> {
    (
        prop::collection::vec(-1.0..1.0f64, 9),
        prop::collection::vec(-1.0..1.0f64, 9),
    )
        .prop_map(|(a, b)| (DMatrix::from_row_slice(3, 3, &a), DMatrix::from_row_slice(3, 3, &b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn family_passes_condition_o(theta in -3.0..3.0f64) {
        let f = four_tap(theta);
        let (ok, residual) = f.check_orthogonality(1e-10);
        prop_assert!(ok, "residual {}", residual);
        prop_assert!(f.check_sums(1e-12));
        prop_assert!(f.mirror_identity_residual(256) < 1e-12);
    }

    #[test]
    fn refinement_routes_agree(theta in -3.0..3.0f64) {
        let f = four_tap(theta);
        if let Ok(a) = dilation::refine(&f, 6) {
            let b = dilation::refine_by_matrices(&f, 6).unwrap();
            let scale = a.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x - y).abs() < 1e-9 * scale);
            }
            prop_assert!(a.dilation_residual() < 1e-9 * scale);
            if !a.degenerate {
                prop_assert!(a.partition_of_unity_residual() < 1e-8 * scale);
            }
        }
    }

    #[test]
    fn jsr_bounds_are_ordered_and_tighten((a, b) in pair_strategy()) {
        let short = jsr::jsr_bounds(&a, &b, 3, MatrixNorm::Spectral).unwrap();
        let long = jsr::jsr_bounds(&a, &b, 6, MatrixNorm::Spectral).unwrap();
        prop_assert!(short.lower <= short.upper + 1e-12);
        prop_assert!(long.lower <= long.upper + 1e-12);
        prop_assert!(long.lower >= short.lower - 1e-12);
        prop_assert!(long.upper <= short.upper + 1e-12);
    }

    #[test]
    fn jsr_lower_bound_is_similarity_invariant((a, b) in pair_strategy(), t in prop::collection::vec(-1.0..1.0f64, 9)) {
        let s = DMatrix::from_row_slice(3, 3, &t) + DMatrix::identity(3, 3) * 4.0;
        let inv = s.clone().try_inverse().unwrap();
        let a2 = &s * &a * &inv;
        let b2 = &s * &b * &inv;
        let x = jsr::jsr_bounds(&a, &b, 5, MatrixNorm::Spectral).unwrap();
        let y = jsr::jsr_bounds(&a2, &b2, 5, MatrixNorm::Spectral).unwrap();
        prop_assert!((x.lower - y.lower).abs() < 1e-10 * x.lower.max(1.0));
    }

    #[test]
    fn jsr_is_homogeneous((a, b) in pair_strategy(), s in 0.1..5.0f64) {
        let x = jsr::jsr_bounds(&a, &b, 4, MatrixNorm::Infinity).unwrap();
        let y = jsr::jsr_bounds(&(&a * s), &(&b * s), 4, MatrixNorm::Infinity).unwrap();
        prop_assert!((y.lower - s * x.lower).abs() < 1e-9 * y.lower.max(1.0));
        prop_assert!((y.upper - s * x.upper).abs() < 1e-9 * y.upper.max(1.0));
    }

    #[test]
    fn full_pair_keeps_sum_row(theta in -3.0..3.0f64) {
        let pair = MatrixPair::from_filter(&four_tap(theta));
        let ones = DMatrix::from_element(1, 3, 1.0);
        prop_assert!((&ones * &pair.a - &ones).amax() < 1e-12);
        prop_assert!((&ones * &pair.b - &ones).amax() < 1e-12);
    }
}
