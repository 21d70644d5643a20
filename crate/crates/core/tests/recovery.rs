use effsym::linalg::{haar_unitary, ComplexMatrix};
use effsym::oracle::{Complemented, FnOracle};
use effsym::recover::{recover, recover_affine, recover_triple, RecoveryOptions, Verdict};
use effsym::suites::{self, SuiteConfig};
use effsym::symmetry::{Family, Kind, Sign, SymmetryDescriptor};
use effsym::Error;

#[test]
fn round_trip_in_larger_dimensions() {
    let cfg = SuiteConfig::new([7, 8], 100, 21);
    for outcome in [
        suites::affine_round_trip(&cfg),
        suites::triple_round_trip(&cfg),
        suites::hermitian_dichotomy(&cfg),
    ] {
        assert!(outcome.passed, "{}", outcome.summary());
        assert_eq!(outcome.samples, 200);
    }
}

#[test]
fn affine_family_in_dimension_two() {
    let outcome = suites::affine_round_trip(&SuiteConfig::new([2], 100, 22));
    assert!(outcome.passed, "{}", outcome.summary());
}

#[test]
fn canonical_verdicts_respect_tolerance() {
    let opts = RecoveryOptions::default().with_seed(5);
    for seed in 0..30 {
        let u = haar_unitary(4, seed).unwrap();
        let d = SymmetryDescriptor::new(Kind::Unitary, u.clone(), seed % 2 == 0, Sign::Plus).unwrap();
        let eps = suites::perturbed_oracle(u, 1e-2);
        for report in [recover_affine(&d, &opts).unwrap(), recover_affine(&eps, &opts).unwrap()] {
            match report.verdict {
                Verdict::Canonical => assert!(report.max_residual.unwrap() <= opts.tol),
                Verdict::Rejected => assert!(!report.reason.unwrap_or_default().is_empty()),
            }
        }
    }
}

#[test]
fn complemented_wrapper_recovers_as_complement() {
    let u = haar_unitary(5, 42).unwrap();
    let inner = SymmetryDescriptor::new(Kind::Antiunitary, u.clone(), false, Sign::Plus).unwrap();
    let report = recover_affine(&Complemented(&inner), &RecoveryOptions::default()).unwrap();
    assert!(report.is_canonical(), "{:?}", report.reason);
    let d = report.descriptor.unwrap();
    assert!(d.complement());
    assert_eq!(d.kind(), Kind::Antiunitary);
    assert!(d.u().distance(inner.u()) < 1e-7);
}

#[test]
fn triple_family_refuses_dimension_two() {
    let id = FnOracle::new(2, |a: &ComplexMatrix| a.clone());
    let err = recover_triple(&id, &RecoveryOptions::default()).unwrap_err();
    assert!(matches!(err, Error::DimensionTooSmall { dim: 2, min: 3 }));
    assert!(recover(Family::Affine, &id, &RecoveryOptions::default()).unwrap().is_canonical());
}

#[test]
fn oracle_failures_propagate() {
    let broken = FnOracle::new(3, |_: &ComplexMatrix| ComplexMatrix::zeros(4));
    assert!(recover_affine(&broken, &RecoveryOptions::default()).is_err());
}

#[test]
fn recovery_is_deterministic() {
    let u = haar_unitary(4, 3).unwrap();
    let eps = suites::perturbed_oracle(u, 1e-2);
    let opts = RecoveryOptions::default().with_seed(77);
    let a = recover_triple(&eps, &opts).unwrap();
    let b = recover_triple(&eps, &opts).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
