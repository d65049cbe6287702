//! Almost repdigits: `a·(10^d1 − 1)/9 + (b − a)·10^d2`.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Digit `a` repeated `d1` times, with the digit at position `d2` (units
/// are position 0) replaced by `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlmostRepdigitForm {
    pub a: u8,
    pub b: u8,
    pub d1: u32,
    pub d2: u32,
}

impl AlmostRepdigitForm {
    /// A form satisfying every invariant, including that the encoded
    /// number has exactly `d1` digits.
    pub fn new(a: u8, b: u8, d1: u32, d2: u32) -> Result<Self> {
        let f = AlmostRepdigitForm { a, b, d1, d2 };
        if !f.is_valid() {
            return Err(Error::InvalidInput(format!("not a valid almost-repdigit form: {f}")));
        }
        Ok(f)
    }

    pub fn is_valid(&self) -> bool {
        if self.a > 9 || self.b > 9 || self.d1 == 0 || self.d2 >= self.d1 {
            return false;
        }
        self.leading_digit() != 0
    }

    fn leading_digit(&self) -> u8 {
        if self.d2 == self.d1 - 1 {
            self.b
        } else {
            self.a
        }
    }

    pub fn is_repdigit(&self) -> bool {
        self.a == self.b || self.d1 == 1
    }

    /// The representative used by [`decompose`]: repdigits collapse to
    /// `b = a`, `d2 = 0`.
    pub fn canonical(&self) -> Self {
        if self.is_repdigit() {
            let v = self.leading_digit();
            AlmostRepdigitForm {
                a: v,
                b: v,
                d1: self.d1,
                d2: 0,
            }
        } else {
            *self
        }
    }

    pub fn value(&self) -> BigInt {
        eval_form(self)
    }
}

impl fmt::Display for AlmostRepdigitForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a={}, b={}, d1={}, d2={})", self.a, self.b, self.d1, self.d2)
    }
}

/// Exact value of the form's formula; no invariants are checked.
pub fn eval_form(f: &AlmostRepdigitForm) -> BigInt {
    let ten = BigInt::from(10);
    let rep = (num_traits::pow(ten.clone(), f.d1 as usize) - 1) / 9;
    BigInt::from(f.a) * rep + (BigInt::from(f.b) - BigInt::from(f.a)) * num_traits::pow(ten, f.d2 as usize)
}

fn decimal_digits(n: &BigInt) -> Option<Vec<u8>> {
    if n.sign() != Sign::Plus {
        return None;
    }
    Some(n.to_str_radix(10).into_bytes().into_iter().map(|c| c - b'0').collect())
}

/// Number of decimal digits of a positive integer (0 for `n ≤ 0`).
pub fn digit_count(n: &BigInt) -> u32 {
    if n.is_positive() {
        n.to_str_radix(10).len() as u32
    } else {
        0
    }
}

/// All digits equal except for at most one.
pub fn is_almost_repdigit(n: &BigInt) -> bool {
    let Some(digits) = decimal_digits(n) else {
        return false;
    };
    let mut counts = [0usize; 10];
    for &d in &digits {
        counts[d as usize] += 1;
    }
    let mut present = counts.iter().filter(|&&c| c > 0);
    match (present.next(), present.next(), present.next()) {
        (Some(_), None, None) => true,
        (Some(&x), Some(&y), None) => x == 1 || y == 1,
        _ => false,
    }
}

/// Every valid form encoding `n`, sorted by `(a, b, d2)`. Repdigits yield
/// the single canonical form.
pub fn decompose(n: &BigInt) -> Vec<AlmostRepdigitForm> {
    let Some(digits) = decimal_digits(n) else {
        return Vec::new();
    };
    let d1 = digits.len() as u32;
    if digits.iter().all(|&d| d == digits[0]) {
        return vec![AlmostRepdigitForm {
            a: digits[0],
            b: digits[0],
            d1,
            d2: 0,
        }];
    }
    let mut out = Vec::new();
    // the exceptional position is one where removing it leaves a constant string
    for (i, &b) in digits.iter().enumerate() {
        let mut rest = digits.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &d)| d);
        let a = rest.next().expect("at least two digits");
        if rest.all(|d| d == a) {
            let f = AlmostRepdigitForm {
                a,
                b,
                d1,
                d2: d1 - 1 - i as u32,
            };
            if f.is_valid() {
                out.push(f);
            }
        }
    }
    out.sort_by_key(|f| (f.a, f.b, f.d2));
    out
}

/// `Some((b, d2))` if `n = b·10^d2` with `1 ≤ b ≤ 9`.
pub fn single_digit_power_of_ten(n: &BigInt) -> Option<(u8, u32)> {
    if !n.is_positive() {
        return None;
    }
    let ten = BigInt::from(10);
    let mut m = n.clone();
    let mut d2 = 0;
    while (&m % &ten).is_zero() {
        m /= &ten;
        d2 += 1;
    }
    (m < ten).then(|| (m.to_u32_digits().1.first().copied().unwrap_or(0) as u8, d2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: u64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_form(&AlmostRepdigitForm { a: 9, b: 1, d1: 3, d2: 2 }), n(199));
        assert_eq!(eval_form(&AlmostRepdigitForm { a: 7, b: 7, d1: 3, d2: 0 }), n(777));
        assert_eq!(eval_form(&AlmostRepdigitForm { a: 0, b: 1, d1: 3, d2: 2 }), n(100));
    }

    #[test]
    fn classification_examples() {
        assert!(is_almost_repdigit(&n(322)));
        assert!(!is_almost_repdigit(&n(1234)));
        assert!(is_almost_repdigit(&n(7)));
        assert!(is_almost_repdigit(&n(1211)));
        assert!(!is_almost_repdigit(&BigInt::from(-11)));
    }

    #[test]
    fn decompose_examples() {
        assert!(decompose(&n(199)).contains(&AlmostRepdigitForm { a: 9, b: 1, d1: 3, d2: 2 }));
        assert!(decompose(&n(100)).contains(&AlmostRepdigitForm { a: 0, b: 1, d1: 3, d2: 2 }));
        assert!(decompose(&n(118)).contains(&AlmostRepdigitForm { a: 1, b: 8, d1: 3, d2: 0 }));
        assert_eq!(decompose(&n(766)), vec![AlmostRepdigitForm { a: 6, b: 7, d1: 3, d2: 2 }]);
        assert_eq!(decompose(&n(999)), vec![AlmostRepdigitForm { a: 9, b: 9, d1: 3, d2: 0 }]);
        assert!(decompose(&n(1234)).is_empty());
    }

    #[test]
    fn two_digit_numbers_have_two_readings() {
        let forms = decompose(&n(10));
        assert_eq!(
            forms,
            vec![
                AlmostRepdigitForm { a: 0, b: 1, d1: 2, d2: 1 },
                AlmostRepdigitForm { a: 1, b: 0, d1: 2, d2: 0 },
            ]
        );
    }

    #[test]
    fn validity_rules() {
        assert!(AlmostRepdigitForm::new(0, 0, 3, 1).is_err());
        assert!(AlmostRepdigitForm::new(0, 5, 3, 1).is_err());
        assert!(AlmostRepdigitForm::new(3, 0, 3, 2).is_err());
        assert!(AlmostRepdigitForm::new(3, 1, 3, 3).is_err());
        assert!(AlmostRepdigitForm::new(0, 5, 4, 3).is_ok());
    }

    #[test]
    fn powers_of_ten() {
        assert_eq!(single_digit_power_of_ten(&n(500)), Some((5, 2)));
        assert_eq!(single_digit_power_of_ten(&n(7)), Some((7, 0)));
        assert_eq!(single_digit_power_of_ten(&n(510)), None);
    }
}
