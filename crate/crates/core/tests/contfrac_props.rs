mod common;

use alrep_core::arith::LazyReal;
use alrep_core::contfrac::{
    best_approximation_holds, best_approximation_on_prefix, determinant_identity_holds, expand_ball, max_partial_quotient, CfCache, CfSource,
};
use alrep_core::pipeline::reals::tau_2_10;
use alrep_core::{Ball, PrecisionPolicy};
use common::{p, sqrt_real};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Plain Euclid on `num/den`, `den > 0`.
fn euclid(mut num: BigInt, mut den: BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        out.push(a);
        num = std::mem::replace(&mut den, r);
    }
    out
}

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certified_prefix_matches_euclid(num in -1_000_000_000i64..1_000_000_000, den in 1i64..1_000_000_000, bits in 64u64..512) {
        let want = euclid(num.into(), den.into());
        let ball = Ball::from_rational(&num.into(), &den.into(), p(bits)).unwrap();
        let cf = expand_ball(&ball, "q", usize::MAX);
        prop_assert!(cf.certified_count() <= want.len());
        prop_assert_eq!(cf.quotients(), &want[..cf.certified_count()]);
        // a ball this tight around a rational loses at most the last quotient
        prop_assert!(cf.certified_count() + 1 >= want.len());
        prop_assert!(determinant_identity_holds(cf.convergents()));
    }

    #[test]
    fn dyadic_values_expand_completely(m in -1_000_000_000i64..1_000_000_000, e in 0u32..40) {
        let den = BigInt::one() << e;
        let want = euclid(m.into(), den.clone());
        let ball = Ball::from_rational(&m.into(), &den, p(128)).unwrap();
        let cf = expand_ball(&ball, "dyadic", usize::MAX);
        prop_assert!(cf.is_terminated());
        prop_assert_eq!(cf.quotients(), &want[..]);
        let last = cf.convergents().last().unwrap();
        prop_assert_eq!(BigInt::from(m) * &last.q, &last.p * &den);
    }

    #[test]
    fn quadratic_irrationals_satisfy_identities(d in 2u32..500, bits in prop_oneof![Just(256u64), Just(1024)]) {
        prop_assume!(d.isqrt() * d.isqrt() != d);
        let cf = expand_ball(&sqrt_real(d).eval(p(bits)).unwrap(), "sqrt", usize::MAX);
        let x = sqrt_real(d).eval(p(2 * bits)).unwrap();
        prop_assert!(cf.certified_count() > 10);
        prop_assert!(!cf.is_terminated());
        prop_assert!(determinant_identity_holds(cf.convergents()));
        prop_assert!(best_approximation_holds(&cf, &x));
        prop_assert!(best_approximation_on_prefix(&cf));
        // period ends with 2·a_0
        let a0 = &cf.quotients()[0];
        prop_assert!(cf.quotients()[1..].iter().all(|a| a <= &(a0 * 2)));
        prop_assert!(cf.quotients()[1..].contains(&(a0 * 2)));
    }

    #[test]
    fn refinement_extends_the_prefix(d in 2u32..200) {
        prop_assume!(d.isqrt() * d.isqrt() != d);
        let coarse = expand_ball(&sqrt_real(d).eval(p(256)).unwrap(), "c", usize::MAX);
        let fine = expand_ball(&sqrt_real(d).eval(p(2048)).unwrap(), "f", usize::MAX);
        prop_assert!(fine.certified_count() > coarse.certified_count());
        prop_assert_eq!(coarse.quotients(), &fine.quotients()[..coarse.certified_count()]);
    }
}

/// `Σ_{n ≤ 60} 1/n! − 2`, which agrees with `e − 2` far past the tenth quotient.
fn e_minus_2() -> LazyReal {
    let mut num = BigInt::zero();
    let mut fact = BigInt::one();
    for n in (1..=60u32).rev() {
        num += &fact;
        fact *= n;
    }
    // num = Σ_{1 ≤ n ≤ 60} 60!/n! and fact = 60!
    LazyReal::rational(num - &fact, fact)
}

#[test]
fn e_partial_quotients() {
    let cf = alrep_core::contfrac::expand(&e_minus_2(), 12, &policy()).unwrap();
    let want: Vec<BigInt> = [0, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8].iter().map(|&a| a.into()).collect();
    assert_eq!(&cf.quotients()[..12], &want[..]);
    assert_eq!(max_partial_quotient(&e_minus_2(), 9, &policy()).unwrap(), BigInt::from(6));
}

#[test]
fn log2_over_log10() {
    let x = tau_2_10();
    let cf = alrep_core::contfrac::expand(&x, 600, &policy()).unwrap();
    let head: Vec<BigInt> = [0, 3, 3, 9, 2, 2, 4, 6, 2, 1, 1, 3].iter().map(|&a| a.into()).collect();
    assert_eq!(&cf.quotients()[..12], &head[..]);
    assert!(determinant_identity_holds(cf.convergents()));
    let ball = x.eval(p(2 * cf.precision_bits())).unwrap();
    assert!(best_approximation_holds(&cf, &ball));
    assert_eq!(max_partial_quotient(&x, 589, &policy()).unwrap(), BigInt::from(5393));
}

#[test]
fn first_q_exceeding_is_minimal() {
    let src = CfSource::default();
    let x = sqrt_real(7);
    for bound in [1u64, 10, 1000, 123_456_789] {
        let b = BigInt::from(bound);
        let c = src.first_q_exceeding(&x, &b).unwrap();
        assert!(c.q > b);
        if c.index > 0 {
            let cf = src.expand(&x, c.index + 1).unwrap();
            assert!(cf.convergents()[c.index - 1].q <= b);
        }
    }
}

#[test]
fn cached_expansions_recertify() {
    let dir = tempfile::tempdir().unwrap();
    let cache = CfCache::new(dir.path()).unwrap();
    let src = CfSource::new(policy(), Some(cache.clone()));
    let reals = [sqrt_real(3), sqrt_real(19), tau_2_10(), e_minus_2()];
    for x in &reals {
        src.expand(x, 40).unwrap();
    }
    let entries = cache.entries().unwrap();
    assert_eq!(entries.len(), reals.len());
    assert!(entries.iter().all(best_approximation_on_prefix));
    for x in &reals {
        let cf = cache.load(x).unwrap().expect("entry written");
        assert!(cf.certified_count() >= 40 || cf.is_terminated());
        assert!(determinant_identity_holds(cf.convergents()));
        let ball = x.eval(p(2 * cf.precision_bits().max(256))).unwrap();
        assert!(best_approximation_holds(&cf, &ball), "{}", x.id());
    }
}

#[test]
fn tampered_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cache = CfCache::new(dir.path()).unwrap();
    let x = sqrt_real(5);
    CfSource::new(policy(), Some(cache.clone())).expand(&x, 30).unwrap();
    let path = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = std::fs::read_to_string(&path).unwrap();
    // √5 = [2; 4, 4, …]; claim a 5 instead
    let mut lines: Vec<&str> = text.lines().collect();
    lines[3] = "5";
    let forged = alrep_core::contfrac::expand_ball(
        &Ball::from_rational(&BigInt::from(2_207), &BigInt::from(987), p(64)).unwrap(),
        "forged",
        usize::MAX,
    );
    assert!(best_approximation_on_prefix(&forged));
    std::fs::write(&path, lines.join("\n")).unwrap();
    assert!(cache.load(&x).is_err());
}
