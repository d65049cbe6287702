mod common;

use alrep_core::algebraic::{dominant_root, fk_at_alpha, psi_eval};
use alrep_core::{Ball, BallOrdering};
use common::p;
use num_bigint::BigInt;
use proptest::prelude::*;

#[test]
fn alpha_and_fk_windows_up_to_470() {
    let prec = p(256);
    let two = Ball::from_int(2, prec);
    let half = Ball::from_rational(&1.into(), &2.into(), prec).unwrap();
    let three_q = Ball::from_rational(&3.into(), &4.into(), prec).unwrap();
    for k in 2u32..=470 {
        let root = dominant_root(k, prec).unwrap();
        let a = root.alpha();
        // 2(1 − 2^(−k)) = 2 − 2^(1−k)
        let lo = Ball::from_rational(&((BigInt::from(1) << k) - 1), &(BigInt::from(1) << (k - 1)), p(k as u64 + 64)).unwrap();
        assert_eq!(a.compare(&lo), BallOrdering::Greater, "k={k}");
        assert_eq!(a.compare(&two), BallOrdering::Less, "k={k}");
        let f = fk_at_alpha(k, &root).unwrap();
        assert_eq!(f.compare(&half), BallOrdering::Greater, "k={k}");
        assert_eq!(f.compare(&three_q), BallOrdering::Less, "k={k}");
    }
}

#[test]
fn alpha_increases_with_k() {
    let prec = p(256);
    let mut prev = dominant_root(2, prec).unwrap().alpha().clone();
    for k in 3u32..=100 {
        let a = dominant_root(k, prec).unwrap().alpha().clone();
        assert_eq!(a.compare(&prev), BallOrdering::Greater, "k={k}");
        prev = a;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn root_is_a_certified_zero(k in 2u32..200, bits in prop_oneof![Just(128u64), Just(512), Just(2048)]) {
        let prec = p(bits);
        let a = dominant_root(k, prec).unwrap().alpha().clone();
        let fine = p(2 * bits + 64);
        prop_assert!(psi_eval(k, &Ball::from_dyadic(a.lower(), fine)).is_negative());
        prop_assert!(psi_eval(k, &Ball::from_dyadic(a.upper(), fine)).is_positive());
        // the enclosure shrinks with the working precision
        let rad = Ball::from_dyadic(a.rad().clone(), prec);
        let tol = Ball::from_int(1, prec).mul_pow2(-(bits as i64) / 2);
        prop_assert_eq!(rad.compare(&tol), BallOrdering::Less);
    }
}
