//! Exhaustive searches over small windows of indices.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebraic::{dominant_root, lucas_coefficient};
use crate::arith::{Ball, PrecisionPolicy};
use crate::digits::{decompose, digit_count, is_almost_repdigit, single_digit_power_of_ten, AlmostRepdigitForm};
use crate::error::{Error, Result};
use crate::sequences::{lucas_term, power_form_term, LucasIter, SequenceParams};

/// `L_n^{(k)}` together with its almost-repdigit readings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub k: u32,
    pub n: u64,
    #[serde(with = "crate::serde_big")]
    pub value: BigInt,
    pub forms: Vec<AlmostRepdigitForm>,
}

impl SolutionRecord {
    fn new(k: u32, n: u64, value: BigInt) -> Self {
        let forms = decompose(&value);
        SolutionRecord { k, n, value, forms }
    }

    pub fn key(&self) -> (u32, u64) {
        (self.k, self.n)
    }
}

/// `n ≤ min(k, 69)`, where `L_n = 3·2^(n−2)`.
pub fn case_small_n(k: u32) -> Result<Vec<SolutionRecord>> {
    SequenceParams::new(k)?;
    let top = k.min(69) as i64;
    let mut out = Vec::new();
    for n in 2..=top {
        let v = power_form_term(n)?;
        if digit_count(&v) >= 3 && is_almost_repdigit(&v) {
            out.push(SolutionRecord::new(k, n as u64, v));
        }
    }
    Ok(out)
}

/// Every `n ∈ [6, n_max]` with `L_n ≥ 100` an almost repdigit.
pub fn brute_search(k: u32, n_max: u64) -> Result<Vec<SolutionRecord>> {
    brute_search_range(k, 6, n_max)
}

/// [`brute_search`] restricted to `[n_min, n_max]`.
pub fn brute_search_range(k: u32, n_min: u64, n_max: u64) -> Result<Vec<SolutionRecord>> {
    let params = SequenceParams::new(k)?;
    if n_max < 6 {
        return Err(Error::InvalidInput("search window must reach n = 6".into()));
    }
    let hundred = BigInt::from(100);
    Ok(LucasIter::new(params)
        .take_while(|(n, _)| *n <= n_max)
        .filter(|(n, v)| *n >= n_min.max(6) && *v >= hundred && is_almost_repdigit(v))
        .map(|(n, v)| SolutionRecord::new(k, n, v))
        .collect())
}

/// Indices whose value is `b·10^d2` with `d2 ≥ 2`.
pub fn find_digit_times_power_of_ten(k: u32, terms: impl IntoIterator<Item = (u64, BigInt)>) -> Vec<SolutionRecord> {
    terms
        .into_iter()
        .filter(|(_, v)| matches!(single_digit_power_of_ten(v), Some((_, d2)) if d2 >= 2))
        .map(|(n, v)| SolutionRecord::new(k, n, v))
        .collect()
}

/// `L_n = b·10^d2` with at least three digits, `n ∈ [6, n_max]`.
pub fn case_a0(k: u32, n_max: u64) -> Result<Vec<SolutionRecord>> {
    let params = SequenceParams::new(k)?;
    if n_max < 6 {
        return Err(Error::InvalidInput("search window must reach n = 6".into()));
    }
    let terms = LucasIter::new(params).take_while(|(n, _)| *n <= n_max).filter(|(n, _)| *n >= 6);
    Ok(find_digit_times_power_of_ten(k, terms))
}

/// Result of re-validating a solution record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCheck {
    pub recurrence_ok: bool,
    pub forms_ok: bool,
    pub three_digits: bool,
    pub digit_window_ok: bool,
    pub linear_forms_nonzero: bool,
}

impl SolutionCheck {
    pub fn all_ok(&self) -> bool {
        self.recurrence_ok && self.forms_ok && self.three_digits && self.digit_window_ok && self.linear_forms_nonzero
    }
}

/// `0.2n − 0.6 < d1 < 0.31n + 2.31`, in exact integer arithmetic.
pub fn digit_window_ok(n: u64, d1: u32) -> bool {
    let (n, d1) = (n as i128, d1 as i128);
    // ×100: 20n − 60 < 100·d1 < 31n + 231
    20 * n - 60 < 100 * d1 && 100 * d1 < 31 * n + 231
}

/// `Λ₁ = α^(n−1)·10^(−d1)·c·9/a − 1` and
/// `Λ₂ = α^(−(n−1))·10^d1·c^(−1)·(a/9 + (b − a)10^(d2−d1)) − 1`
/// (`b·10^d2` in place of the bracket when `a = 0`), certified nonzero.
pub fn linear_forms_nonzero(k: u32, n: u64, f: &AlmostRepdigitForm, policy: &PrecisionPolicy) -> Result<bool> {
    if n < 1 {
        return Err(Error::InvalidInput("index must be positive".into()));
    }
    policy.run(|p| {
        let root = dominant_root(k, p)?;
        let c = lucas_coefficient(k, &root)?;
        let alpha = root.alpha();
        let one = Ball::from_int(1, p);
        let ten_d1 = Ball::from_int(num_traits::pow(BigInt::from(10), f.d1 as usize), p);
        let an = alpha.powi(n - 1);
        let mut forms = Vec::new();
        if f.a != 0 {
            let l1 = &an.mul_int(9).mul(&c).div(&ten_d1.mul_int(f.a))? - &one;
            forms.push(l1);
            let bracket = crate::pipeline::reals::digit_block(f.a, f.b, f.d1 - f.d2, p)?;
            let l2 = &ten_d1.mul(&bracket).div(&an.mul(&c))? - &one;
            forms.push(l2);
        } else {
            let v = Ball::from_int(BigInt::from(f.b) * num_traits::pow(BigInt::from(10), f.d2 as usize), p);
            forms.push(&v.div(&an.mul(&c))? - &one);
        }
        if forms.iter().all(|l| !l.contains_zero()) {
            Ok(true)
        } else {
            Err(Error::Undecidable("linear form encloses zero".into()))
        }
    })
    .or_else(|e| match e {
        Error::PrecisionCeiling { .. } => Ok(false),
        other => Err(other),
    })
}

/// Re-validates a record from scratch.
pub fn check_solution(rec: &SolutionRecord, policy: &PrecisionPolicy) -> Result<SolutionCheck> {
    let recurrence_ok = lucas_term(rec.k, rec.n as i64)? == rec.value;
    let fresh = decompose(&rec.value);
    let forms_ok = !fresh.is_empty() && fresh == rec.forms;
    let d1 = digit_count(&rec.value);
    let three_digits = d1 >= 3;
    let digit_window_ok = digit_window_ok(rec.n, d1);
    let mut nonzero = true;
    for f in &rec.forms {
        nonzero &= linear_forms_nonzero(rec.k, rec.n, f, policy)?;
    }
    Ok(SolutionCheck {
        recurrence_ok,
        forms_ok,
        three_digits,
        digit_window_ok,
        linear_forms_nonzero: nonzero,
    })
}
