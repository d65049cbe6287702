//! Fixed-point logarithm kernel.
//!
//! `log x = e·log 2 + 2·atanh((t − 1)/(t + 1))` with `x = t·2^e` and
//! `t ∈ (1/√2, √2]`, so the atanh argument stays below 0.172 and the series
//! gains about five bits per term. Every truncation is counted in units of
//! the last fixed-point place and returned as an explicit error bound.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;

/// `atanh(z / 2^f)` in fixed point for `0 ≤ z < 2^f / 2`, with an error
/// bound in ulps.
fn atanh_fixed(z: &BigInt, f: u64) -> (BigInt, u64) {
    debug_assert!(!z.is_negative());
    let f = f as usize;
    let z2 = (z * z) >> f;
    let mut pow = z.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !pow.is_zero() {
        sum += &pow / BigInt::from(2 * k + 1);
        pow = (&pow * &z2) >> f;
        k += 1;
    }
    // each power picks up at most two ulps of drift, each quotient one more,
    // and the discarded tail is bounded by the last (vanished) power
    (sum, 8 * k + 8)
}

struct Ln2Cache {
    frac_bits: u64,
    value: BigInt,
    err: u64,
}

static LN2: OnceLock<RwLock<Option<Ln2Cache>>> = OnceLock::new();

/// `log 2` with `f` fractional bits and its error in ulps.
fn ln2_fixed(f: u64) -> (BigInt, u64) {
    let cell = LN2.get_or_init(|| RwLock::new(None));
    if let Some(c) = cell.read().expect("ln2 cache poisoned").as_ref() {
        if c.frac_bits >= f {
            let drop = (c.frac_bits - f) as usize;
            let v = &c.value >> drop;
            let err = c.err.checked_shr(drop as u32).unwrap_or(0) + 2;
            return (v, err);
        }
    }
    // log 2 = 2·atanh(1/3)
    let f_work = f + 32;
    let third = (BigInt::one() << (f_work as usize)) / BigInt::from(3);
    let (s, e) = atanh_fixed(&third, f_work);
    let value = s << 1usize;
    // the 1/3 truncation contributes at most 1.125·2 ulps
    let err = 2 * e + 4;
    let mut guard = cell.write().expect("ln2 cache poisoned");
    let keep = guard.as_ref().is_none_or(|c| c.frac_bits < f_work);
    if keep {
        *guard = Some(Ln2Cache {
            frac_bits: f_work,
            value: value.clone(),
            err,
        });
    }
    drop(guard);
    let drop_bits = (f_work - f) as usize;
    (&value >> drop_bits, err.checked_shr(drop_bits as u32).unwrap_or(0) + 2)
}

/// Natural logarithm of a positive dyadic, accurate to roughly `bits`
/// fractional bits. Returns `(value, error bound)`.
pub(crate) fn log_positive(x: &Dyadic, bits: u64) -> (Dyadic, Dyadic) {
    debug_assert!(x.is_positive());
    let m = x.mantissa();
    let n = m.bits();
    let mut e = x.exponent() + n as i64 - 1;
    let mut c = BigInt::one() << ((n - 1) as usize);
    if m * m > (&c * &c) << 1usize {
        c <<= 1usize;
        e += 1;
    }
    let e_bits = 64 - (e.unsigned_abs() + 1).leading_zeros() as u64;
    let f = bits + e_bits + 48;
    let num = m - &c;
    let den = m + &c;
    if num.is_zero() && e == 0 {
        return (Dyadic::zero(), Dyadic::zero());
    }
    let z = (num.abs() << (f as usize)) / &den;
    let (mut s, s_err) = atanh_fixed(&z, f);
    if num.is_negative() {
        s = -s;
    }
    let mut val = s << 1usize;
    // 2/(1 − z²) < 2.07: the truncated argument costs at most 3 ulps
    let mut err = BigInt::from(2 * s_err + 3);
    if e != 0 {
        let (l2, l2_err) = ln2_fixed(f);
        val += BigInt::from(e) * l2;
        err += BigInt::from(e.unsigned_abs()) * BigInt::from(l2_err);
    }
    let fe = -(f as i64);
    (Dyadic::new(val, fe), Dyadic::new(err, fe))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_matches_reference_digits() {
        let (v, err) = ln2_fixed(128);
        let d = Dyadic::new(v, -128);
        assert!(err < 1000);
        // log 2 = 0.693147180559945309417232121458176568...
        assert_eq!(&d.to_sci(30)[..31], "6.93147180559945309417232121458");
    }

    #[test]
    fn cache_truncation_stays_within_error() {
        let (hi, _) = ln2_fixed(512);
        let (lo, lo_err) = ln2_fixed(100);
        let diff = (&hi >> 412usize) - &lo;
        assert!(diff.abs() <= BigInt::from(lo_err));
    }

    #[test]
    fn log_of_one_is_exact_zero() {
        let (v, e) = log_positive(&Dyadic::from_int(1), 100);
        assert!(v.is_zero() && e.is_zero());
    }
}
