use proptest::prelude::*;
use spinpair::overlap::{overlap_from_ratio, terminating_hyp2f1, OverlapTable};
use spinpair::overlap_integral;
use spinpair_oracles::quadrature;

fn check_against_quadrature(n_max: usize, s: f64, tol: f64) {
    let q = quadrature::overlaps(n_max, s, 320, 1e-14, 1e-60);
    for n in 0..=n_max as u32 {
        for m in n..=n_max as u32 {
            let exact = overlap_from_ratio(n, m, s).unwrap();
            let reference = q.get(n as usize, m as usize);
            let err = (exact - reference).abs();
            assert!(
                err <= tol * reference.abs() + 1e-300,
                "I_({n},{m}) at s = {s}: {exact} vs {reference}"
            );
        }
    }
}

#[test]
fn matches_quadrature_wide_potential() {
    check_against_quadrature(24, 0.005, 1e-10);
}

#[test]
fn matches_quadrature_comparable_widths() {
    check_against_quadrature(24, 0.5, 1e-10);
}

#[test]
fn matches_quadrature_narrow_potential() {
    check_against_quadrature(24, 50.0, 1e-10);
}

#[test]
fn float_series_agrees_where_terms_do_not_cancel() {
    // z < 0 for s > 1: every term of the series has the same sign
    for (n, m) in [(4, 6), (10, 10), (3, 17)] {
        let s = 3.0f64;
        let alpha2 = 0.5 * (1.0 + s);
        let z = alpha2 / (2.0 * alpha2 - 1.0);
        let (value, terms) = terminating_hyp2f1(n, m, z);
        assert_eq!(terms, n.min(m) + 1);
        assert!(value.is_finite());
    }
}

proptest! {
    #[test]
    fn symmetric_and_parity_selected(n in 0u32..30, m in 0u32..30, r in 0.05f64..20.0) {
        let a = overlap_integral(n, m, r, 1.0).unwrap();
        let b = overlap_integral(m, n, r, 1.0).unwrap();
        prop_assert_eq!(a, b);
        if (n + m) % 2 == 1 {
            prop_assert_eq!(a, 0.0);
        }
    }

    #[test]
    fn bounded_by_one(n in 0u32..30, m in 0u32..30, s in 1e-3f64..100.0) {
        // exp(-s x^2) <= 1 and Cauchy-Schwarz bound the integral by one
        let v = overlap_from_ratio(n, m, s).unwrap();
        prop_assert!(v.abs() <= 1.0 + 1e-14);
        if n == m {
            prop_assert!(v > 0.0);
        }
    }

    #[test]
    fn diagonal_decreases_with_narrower_weight(n in 0u32..20, s in 1e-3f64..10.0) {
        let a = overlap_from_ratio(n, n, s).unwrap();
        let b = overlap_from_ratio(n, n, 1.5 * s).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn table_matches_pointwise(n in 0u32..12, m in 0u32..12, r in 0.1f64..5.0) {
        let t = OverlapTable::new(12, r, 1.0).unwrap();
        prop_assert_eq!(t.get(n, m), overlap_integral(n, m, r, 1.0).unwrap());
    }
}

#[test]
fn rejects_bad_lengths() {
    assert!(overlap_integral(0, 0, 0.0, 1.0).is_err());
    assert!(overlap_integral(0, 0, 1.0, f64::NAN).is_err());
    assert!(overlap_from_ratio(2, 2, -1.0).is_err());
}
