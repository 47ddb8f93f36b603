use proptest::prelude::*;
use wolfflab::verifier::fit::{estimate_constant, BoundDirection};
use wolfflab::verifier::{run_suite, Suite, SuiteConfig};

proptest! {
    #[test]
    fn enlarging_the_family_never_lowers_an_upper_constant(
        pairs in prop::collection::vec((0.0f64..10.0, 0.01f64..10.0), 1..20),
        extra in prop::collection::vec((0.0f64..10.0, 0.01f64..10.0), 0..10),
    ) {
        let (l, r): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
        let all: Vec<(f64, f64)> = pairs.iter().chain(&extra).cloned().collect();
        let (l2, r2): (Vec<f64>, Vec<f64>) = all.into_iter().unzip();
        let small = estimate_constant(&l, &r, BoundDirection::Upper).unwrap();
        let large = estimate_constant(&l2, &r2, BoundDirection::Upper).unwrap();
        prop_assert!(small <= large);
        let small = estimate_constant(&l, &r, BoundDirection::Lower).unwrap();
        let large = estimate_constant(&l2, &r2, BoundDirection::Lower).unwrap();
        prop_assert!(small >= large);
    }

    #[test]
    fn fitted_constant_satisfies_every_sample(pairs in prop::collection::vec((0.0f64..10.0, 0.01f64..10.0), 1..20)) {
        let (l, r): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
        let c = estimate_constant(&l, &r, BoundDirection::Upper).unwrap();
        prop_assert!(l.iter().zip(&r).all(|(a, b)| *a <= c * b));
        prop_assert_eq!(c.log2().fract(), 0.0);
    }
}

#[test]
fn trivial_fits() {
    assert_eq!(estimate_constant(&[1.0, 2.0], &[1.0, 2.0], BoundDirection::Upper).unwrap(), 1.0);
    assert_eq!(estimate_constant(&[2.0, 4.0], &[1.0, 2.0], BoundDirection::Upper).unwrap(), 2.0);
    assert_eq!(estimate_constant(&[3.0, 1.0], &[1.0, 1.0], BoundDirection::Upper).unwrap(), 4.0);
}

#[test]
fn suites_are_deterministic() {
    let cfg = SuiteConfig::default();
    for suite in [Suite::Appendix, Suite::Maximal] {
        let a = run_suite(suite, &cfg).unwrap();
        let b = run_suite(suite, &cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
