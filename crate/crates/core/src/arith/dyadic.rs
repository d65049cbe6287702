//! Exact dyadic rationals `man · 2^exp` with directed rounding helpers.
//!
//! Everything in [`Ball`](super::Ball) is built on top of this type: the
//! midpoint is a dyadic rounded to the working precision and the radius is a
//! dyadic rounded upward to a short mantissa.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Round {
    Floor,
    Ceil,
    Nearest,
}

/// `man · 2^exp`, kept exact until explicitly rounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        Dyadic { man, exp }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic {
            man: n.into(),
            exp: 0,
        }
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: e,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.man.sign()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Exponent of the most significant bit, i.e. `floor(log2|x|)`.
    /// Undefined (returns `i64::MIN`) for zero.
    pub fn msb(&self) -> i64 {
        if self.man.is_zero() {
            i64::MIN
        } else {
            self.exp + self.man.bits() as i64 - 1
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.man.is_zero() {
            return other.clone();
        }
        if other.man.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << ((self.exp - e) as usize);
        let b = &other.man << ((other.exp - e) as usize);
        Dyadic { man: a + b, exp: e }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.man.is_zero() || other.man.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            man: &self.man * &other.man,
            exp: self.exp + other.exp,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        Dyadic {
            man: &self.man * k,
            exp: self.exp,
        }
    }

    /// Multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Dyadic {
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        match (self.man.sign(), other.man.sign()) {
            (Sign::Minus, Sign::NoSign | Sign::Plus) | (Sign::NoSign, Sign::Plus) => {
                return Ordering::Less
            }
            (Sign::Plus, Sign::NoSign | Sign::Minus) | (Sign::NoSign, Sign::Minus) => {
                return Ordering::Greater
            }
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        // Same nonzero sign: a cheap magnitude test before the exact one.
        let (ma, mb) = (self.msb(), other.msb());
        if ma != mb {
            let mag = ma.cmp(&mb);
            return if self.man.is_positive() {
                mag
            } else {
                mag.reverse()
            };
        }
        let d = self.sub(other);
        match d.man.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn max(&self, other: &Dyadic) -> Dyadic {
        if self.cmp_value(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, other: &Dyadic) -> Dyadic {
        if self.cmp_value(other) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Rounds the mantissa to at most `bits` significant bits.
    pub(crate) fn round(&self, bits: u64, mode: Round) -> Dyadic {
        let have = self.man.bits();
        if have <= bits {
            return self.clone();
        }
        let s = have - bits;
        let man = shr_round(&self.man, s, mode);
        Dyadic {
            man,
            exp: self.exp + s as i64,
        }
    }

    pub fn round_up(&self, bits: u64) -> Dyadic {
        self.round(bits, Round::Ceil)
    }

    pub fn round_down(&self, bits: u64) -> Dyadic {
        self.round(bits, Round::Floor)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << (self.exp as usize)
        } else {
            shr_round(&self.man, (-self.exp) as u64, Round::Floor)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << (self.exp as usize)
        } else {
            shr_round(&self.man, (-self.exp) as u64, Round::Ceil)
        }
    }

    /// Nearest integer, ties towards +∞.
    pub fn round_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << (self.exp as usize)
        } else {
            shr_round(&self.man, (-self.exp) as u64, Round::Nearest)
        }
    }

    /// Quotient `a / b` with at least `bits` significant bits. The returned
    /// error bound is one unit in the last place of the quotient.
    pub(crate) fn div_round(a: &Dyadic, b: &Dyadic, bits: u64, mode: Round) -> (Dyadic, Dyadic) {
        assert!(!b.is_zero(), "dyadic division by zero");
        if a.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let shift = (bits as i64 + b.man.bits() as i64 - a.man.bits() as i64 + 1).max(0);
        let num = &a.man << (shift as usize);
        let (q, r) = num.div_mod_floor(&b.man);
        let q = match mode {
            Round::Floor => q,
            Round::Ceil => {
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            }
            Round::Nearest => {
                let twice = &r << 1usize;
                // floor division leaves r with the sign of b
                if twice.abs() >= b.man.abs() {
                    q + 1
                } else {
                    q
                }
            }
        };
        let exp = a.exp - shift - b.exp;
        (Dyadic { man: q, exp }, Dyadic::pow2(exp))
    }

    pub fn to_f64(&self) -> f64 {
        if self.man.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            ((&self.man >> (s as usize)).to_f64().unwrap_or(0.0), self.exp + s as i64)
        } else {
            (self.man.to_f64().unwrap_or(0.0), self.exp)
        };
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        // split the scaling to avoid intermediate overflow
        let half = e / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// Decimal scientific rendering with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        if self.man.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let neg = self.man.is_negative();
        let abs = self.abs();
        // decimal exponent estimate from the binary one
        let mut e10 = ((abs.msb() as f64) * std::f64::consts::LOG10_2).floor() as i64;
        let scaled = loop {
            let shift = digits as i64 - 1 - e10;
            let v = scale_pow10(&abs, shift);
            let s = v.to_string();
            if s.len() > digits {
                e10 += 1;
                continue;
            }
            if s.len() < digits {
                e10 -= 1;
                continue;
            }
            break s;
        };
        let (head, tail) = scaled.split_at(1);
        let sign = if neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        }
    }
}

/// `floor(|x| · 10^shift)` for a non-negative dyadic.
fn scale_pow10(x: &Dyadic, shift: i64) -> BigInt {
    let ten = BigInt::from(10u32);
    let mut num = x.man.clone();
    let mut den = BigInt::one();
    if shift >= 0 {
        num *= num_traits::pow(ten, shift as usize);
    } else {
        den *= num_traits::pow(ten, (-shift) as usize);
    }
    if x.exp >= 0 {
        num <<= x.exp as usize;
    } else {
        den <<= (-x.exp) as usize;
    }
    num.div_floor(&den)
}

/// `x / 2^s` rounded according to `mode`.
fn shr_round(x: &BigInt, s: u64, mode: Round) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    let s = s as usize;
    match mode {
        // `>>` on BigInt rounds towards −∞.
        Round::Floor => x >> s,
        Round::Ceil => -((-x) >> s),
        Round::Nearest => (x + (BigInt::one() << (s - 1))) >> s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn shift_rounds_towards_negative_infinity() {
        assert_eq!(shr_round(&BigInt::from(-5), 1, Round::Floor), BigInt::from(-3));
        assert_eq!(shr_round(&BigInt::from(-5), 1, Round::Ceil), BigInt::from(-2));
        assert_eq!(shr_round(&BigInt::from(5), 1, Round::Nearest), BigInt::from(3));
        assert_eq!(shr_round(&BigInt::from(-5), 1, Round::Nearest), BigInt::from(-2));
    }

    #[test]
    fn add_and_compare() {
        let a = d(3, -1); // 1.5
        let b = d(1, 2); // 4
        assert_eq!(a.add(&b).cmp_value(&d(11, -1)), Ordering::Equal);
        assert_eq!(a.cmp_value(&b), Ordering::Less);
        assert_eq!(b.neg().cmp_value(&a.neg()), Ordering::Less);
        assert_eq!(d(0, 5).cmp_value(&d(-1, -100)), Ordering::Greater);
    }

    #[test]
    fn directed_rounding_brackets_value() {
        let x = d(0b1011_0111, -3);
        let lo = x.round(4, Round::Floor);
        let hi = x.round(4, Round::Ceil);
        assert_ne!(lo.cmp_value(&x), Ordering::Greater);
        assert_ne!(hi.cmp_value(&x), Ordering::Less);
        assert!(lo.bits() <= 4 && hi.bits() <= 5);
    }

    #[test]
    fn floor_and_ceil() {
        let x = d(-7, -1); // -3.5
        assert_eq!(x.floor(), BigInt::from(-4));
        assert_eq!(x.ceil(), BigInt::from(-3));
        assert_eq!(x.round_int(), BigInt::from(-3));
        assert_eq!(d(5, 3).floor(), BigInt::from(40));
    }

    #[test]
    fn division_error_is_one_ulp() {
        let (q, err) = Dyadic::div_round(&d(1, 0), &d(3, 0), 64, Round::Floor);
        let back = q.mul(&d(3, 0));
        assert_ne!(back.cmp_value(&d(1, 0)), Ordering::Greater);
        let gap = d(1, 0).sub(&back);
        assert_ne!(gap.cmp_value(&err.mul(&d(3, 0))), Ordering::Greater);
    }

    #[test]
    fn scientific_rendering() {
        assert_eq!(d(1, 0).to_sci(3), "1.00e0");
        assert_eq!(d(3, -1).to_sci(2), "1.5e0");
        assert_eq!(Dyadic::from_int(12345).to_sci(3), "1.23e4");
        assert_eq!(d(-1, -2).to_sci(1), "-2e-1");
        assert!((Dyadic::from_int(1_000_000).to_f64() - 1e6).abs() < 1e-9);
    }
}
