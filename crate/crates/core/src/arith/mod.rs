//! Certified real arithmetic: dyadic midpoint-radius balls with explicit
//! precision control.

mod ball;
mod dyadic;
mod lazy;
mod log;
mod precision;

pub use ball::{ball_compare, parse_decimal, Ball, BallOrdering};
pub use dyadic::Dyadic;
pub use lazy::LazyReal;
pub use precision::{Precision, PrecisionPolicy};


/// `log 2` at precision `prec`.
pub fn ln2(prec: Precision) -> Ball {
    Ball::from_int(2, prec).log().expect("log 2 is positive")
}

/// `log 10` at precision `prec`.
pub fn ln10(prec: Precision) -> Ball {
    Ball::from_int(10, prec).log().expect("log 10 is positive")
}

/// `log x / log 10`.
pub fn log10(x: &Ball) -> crate::Result<Ball> {
    x.log()?.div(&ln10(x.precision()))
}
