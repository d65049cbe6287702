use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dyadic::{Dyadic, Round};
use super::log::log_positive;
use super::precision::Precision;
use crate::error::{Error, Result};

/// Significant bits kept in a radius (always rounded upward).
const RAD_BITS: u64 = 64;

/// A certified real: the exact value lies in `[mid − rad, mid + rad]`.
#[derive(Clone, Debug)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic,
    prec: Precision,
}

/// Outcome of comparing two enclosures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallOrdering {
    Less,
    Greater,
    /// The intervals overlap; escalate precision and retry.
    Undecidable,
}

impl BallOrdering {
    pub fn reverse(self) -> Self {
        match self {
            BallOrdering::Less => BallOrdering::Greater,
            BallOrdering::Greater => BallOrdering::Less,
            BallOrdering::Undecidable => BallOrdering::Undecidable,
        }
    }
}

impl Ball {
    /// Rounds `mid` to `prec` bits and folds the rounding error and `err`
    /// into the radius.
    fn build(mid: Dyadic, err: Dyadic, prec: Precision) -> Ball {
        let rounded = mid.round(prec.bits(), Round::Nearest);
        let slack = mid.sub(&rounded).abs();
        let rad = err.add(&slack).round_up(RAD_BITS);
        Ball {
            mid: rounded,
            rad,
            prec,
        }
    }

    pub fn zero(prec: Precision) -> Ball {
        Ball {
            mid: Dyadic::zero(),
            rad: Dyadic::zero(),
            prec,
        }
    }

    /// A dyadic value, rounded to `prec` bits if it is longer.
    pub fn from_dyadic(d: Dyadic, prec: Precision) -> Ball {
        Ball::build(d, Dyadic::zero(), prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: Precision) -> Ball {
        Ball::from_dyadic(Dyadic::from_int(n), prec)
    }

    /// Encloses `p/q` with radius at most `2^(1−bits)·|p/q|`.
    pub fn from_rational(p: &BigInt, q: &BigInt, prec: Precision) -> Result<Ball> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if p.is_zero() {
            return Ok(Ball::zero(prec));
        }
        let (a, b) = (Dyadic::from_int(p.clone()), Dyadic::from_int(q.clone()));
        // two extra bits so the final nearest rounding dominates the error
        let (quot, err) = Dyadic::div_round(&a, &b, prec.bits() + 2, Round::Floor);
        let exact = quot.mul(&b).cmp_value(&a) == Ordering::Equal;
        let err = if exact { Dyadic::zero() } else { err };
        Ok(Ball::build(quot, err, prec))
    }

    /// Parses an exact decimal literal such as `1.8e291`, `0.029559` or `-3`.
    pub fn from_decimal(s: &str, prec: Precision) -> Result<Ball> {
        let (num, den) = parse_decimal(s)?;
        Ball::from_rational(&num, &den, prec)
    }

    /// A ball with an explicit radius (negative radii are made positive).
    pub fn with_radius(mid: Dyadic, rad: Dyadic, prec: Precision) -> Ball {
        Ball::build(mid, rad.abs(), prec)
    }

    /// Smallest ball with dyadic midpoint containing `[lo, hi]`.
    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic, prec: Precision) -> Ball {
        let mid = lo.add(hi).shl(-1);
        let rad = hi.sub(lo).abs().shl(-1);
        Ball::build(mid, rad, prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lower().cmp_value(x) != Ordering::Greater && self.upper().cmp_value(x) != Ordering::Less
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Dyadic::zero())
    }

    /// Certified strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    /// Certified strictly negative.
    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    /// Whether `other`'s interval lies inside this one.
    pub fn encloses(&self, other: &Ball) -> bool {
        self.lower().cmp_value(&other.lower()) != Ordering::Greater
            && self.upper().cmp_value(&other.upper()) != Ordering::Less
    }

    /// Upper bound on `|x|`, rounded up.
    pub fn mag_upper(&self) -> Dyadic {
        self.mid.abs().add(&self.rad).round_up(RAD_BITS)
    }

    /// Lower bound on `|x|` (zero if the ball contains zero), rounded down.
    pub fn mag_lower(&self) -> Dyadic {
        let m = self.mid.abs().sub(&self.rad);
        if m.is_positive() {
            m.round_down(RAD_BITS)
        } else {
            Dyadic::zero()
        }
    }

    pub fn with_precision(&self, prec: Precision) -> Ball {
        Ball::build(self.mid.clone(), self.rad.clone(), prec)
    }

    /// Widens the ball by `err`.
    pub fn add_error(&self, err: &Dyadic) -> Ball {
        Ball {
            mid: self.mid.clone(),
            rad: self.rad.add(&err.abs()).round_up(RAD_BITS),
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Ball {
        if self.mid.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        Ball::build(self.mid.add(&other.mid), self.rad.add(&other.rad), prec)
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        Ball::build(self.mid.sub(&other.mid), self.rad.add(&other.rad), prec)
    }

    pub fn mul(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        let mid = self.mid.mul(&other.mid);
        let err = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        Ball::build(mid, err, prec)
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Ball {
        let k = k.into();
        let mid = self.mid.mul_int(&k);
        let err = self.rad.mul_int(&k.abs());
        Ball::build(mid, err, self.prec)
    }

    /// Multiplication by `2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Ball {
        Ball {
            mid: self.mid.shl(k),
            rad: self.rad.shl(k),
            prec: self.prec,
        }
    }

    pub fn sqr(&self) -> Ball {
        self.mul(self)
    }

    pub fn powi(&self, mut n: u64) -> Ball {
        let mut base = self.clone();
        let mut acc = Ball::from_int(1, self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn div(&self, other: &Ball) -> Result<Ball> {
        if other.contains_zero() {
            return Err(if other.mid.is_zero() && other.rad.is_zero() {
                Error::ZeroDenominator
            } else {
                Error::Undecidable("divisor enclosure contains zero".into())
            });
        }
        let prec = self.prec.max(other.prec);
        let (q, q_err) = Dyadic::div_round(&self.mid, &other.mid, prec.bits() + 8, Round::Floor);
        // |x/y − mx/my| ≤ (rx + |mx/my|·ry) / (|my| − ry)
        let q_abs = q.abs().add(&q_err);
        let num = self.rad.add(&q_abs.mul(&other.rad));
        let prop = if num.is_zero() {
            Dyadic::zero()
        } else {
            let den = other.mag_lower();
            Dyadic::div_round(&num, &den, RAD_BITS, Round::Ceil).0
        };
        Ok(Ball::build(q, prop.add(&q_err), prec))
    }

    pub fn recip(&self) -> Result<Ball> {
        Ball::from_int(1, self.prec).div(self)
    }

    /// Natural logarithm; the ball must be certified positive.
    pub fn log(&self) -> Result<Ball> {
        let lo = self.lower();
        if !lo.is_positive() {
            return Err(if self.upper().is_positive() {
                Error::Undecidable("logarithm argument straddles zero".into())
            } else {
                Error::NonPositiveLog
            });
        }
        let (val, err) = log_positive(&self.mid, self.prec.bits() + 16);
        // mean value theorem: |log x − log m| ≤ r / (m − r)
        let prop = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::div_round(&self.rad, &lo.round_down(RAD_BITS), RAD_BITS, Round::Ceil).0
        };
        Ok(Ball::build(val, err.add(&prop), self.prec))
    }

    pub fn sqrt(&self) -> Result<Ball> {
        let lo = self.lower();
        if !lo.is_positive() {
            if self.mid.is_zero() && self.rad.is_zero() {
                return Ok(self.clone());
            }
            return Err(Error::Undecidable("square root argument not certified positive".into()));
        }
        let (root, root_err) = sqrt_dyadic(&self.mid, self.prec.bits() + 8);
        // |√x − √m| ≤ r / (2·√(m − r))
        let prop = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            let (lo_root, lo_err) = sqrt_dyadic(&lo, RAD_BITS + 8);
            let den = lo_root.sub(&lo_err).shl(1);
            if !den.is_positive() {
                return Err(Error::Undecidable("square root lower bound too coarse".into()));
            }
            Dyadic::div_round(&self.rad, &den.round_down(RAD_BITS), RAD_BITS, Round::Ceil).0
        };
        Ok(Ball::build(root, root_err.add(&prop), self.prec))
    }

    /// Distance to the nearest integer, `min_n |x − n|`, enclosed in
    /// `[0, 1/2]`.
    pub fn nearest_int_distance(&self) -> Result<Ball> {
        if self.rad.cmp_value(&Dyadic::pow2(-2)) != Ordering::Less {
            return Err(Error::AmbiguousNearestInteger {
                radius: self.rad.to_sci(3),
            });
        }
        let n = self.mid.round_int();
        let dm = self.mid.sub(&Dyadic::from_int(n)).abs();
        let lo = dm.sub(&self.rad).max(&Dyadic::zero());
        let hi = dm.add(&self.rad).min(&Dyadic::pow2(-1));
        // ||·|| is 1-Lipschitz, so [dm − r, dm + r] ∩ [0, 1/2] is an enclosure
        Ok(Ball {
            mid: lo.add(&hi).shl(-1),
            rad: hi.sub(&lo).shl(-1),
            prec: self.prec,
        })
    }

    /// The common floor of every point in the ball, if there is one.
    pub fn certified_floor(&self) -> Option<BigInt> {
        let a = self.lower().floor();
        let b = self.upper().floor();
        (a == b).then_some(a)
    }

    /// Nearest integer to the midpoint.
    pub fn round_mid(&self) -> BigInt {
        self.mid.round_int()
    }

    /// `⌈upper⌉`: an integer no smaller than any point of the ball.
    pub fn upper_ceil(&self) -> BigInt {
        self.upper().ceil()
    }

    /// `⌊lower⌋`: an integer no larger than any point of the ball.
    pub fn lower_floor(&self) -> BigInt {
        self.lower().floor()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn to_sci(&self, digits: usize) -> String {
        self.mid.to_sci(digits)
    }

    pub fn compare(&self, other: &Ball) -> BallOrdering {
        ball_compare(self, other)
    }
}

/// `Less` iff `x` lies entirely below `y`, `Greater` symmetrically.
pub fn ball_compare(x: &Ball, y: &Ball) -> BallOrdering {
    if x.upper().cmp_value(&y.lower()) == Ordering::Less {
        BallOrdering::Less
    } else if x.lower().cmp_value(&y.upper()) == Ordering::Greater {
        BallOrdering::Greater
    } else {
        BallOrdering::Undecidable
    }
}

/// `√x` for positive `x` with about `bits` significant bits; returns the
/// floor approximation and its one-ulp error.
fn sqrt_dyadic(x: &Dyadic, bits: u64) -> (Dyadic, Dyadic) {
    let m = x.mantissa();
    let mut shift = (2 * bits as i64 - m.bits() as i64).max(0);
    if (x.exponent() - shift) % 2 != 0 {
        shift += 1;
    }
    let scaled = m << (shift as usize);
    let r = num_integer::Roots::sqrt(&scaled);
    let exact = &r * &r == scaled;
    let exp = (x.exponent() - shift) / 2;
    let err = if exact { Dyadic::zero() } else { Dyadic::pow2(exp) };
    (Dyadic::new(r, exp), err)
}

/// `"1.8e291"` → `(18·10^290, 1)`; `"0.25"` → `(25, 100)`.
pub fn parse_decimal(s: &str) -> Result<(BigInt, BigInt)> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    if scale >= 0 {
        Ok((num * num_traits::pow(ten, scale as usize), BigInt::one()))
    } else {
        Ok((num, num_traits::pow(ten, (-scale) as usize)))
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(f, "[{} ± {}]", self.mid.to_sci(digits), self.rad.to_sci(3))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Ball> for &Ball {
            type Output = Ball;
            fn $method(self, rhs: &Ball) -> Ball {
                Ball::$method(self, rhs)
            }
        }
        impl $tr<Ball> for Ball {
            type Output = Ball;
            fn $method(self, rhs: Ball) -> Ball {
                Ball::$method(&self, &rhs)
            }
        }
        impl $tr<&Ball> for Ball {
            type Output = Ball;
            fn $method(self, rhs: &Ball) -> Ball {
                Ball::$method(&self, rhs)
            }
        }
        impl $tr<Ball> for &Ball {
            type Output = Ball;
            fn $method(self, rhs: Ball) -> Ball {
                Ball::$method(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball::neg(self)
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball::neg(&self)
    }
}
