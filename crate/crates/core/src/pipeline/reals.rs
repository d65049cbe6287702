//! The named reals fed to the reductions.

use num_bigint::BigInt;

use crate::algebraic::{dominant_root, lucas_coefficient};
use crate::arith::{ln10, ln2, Ball, LazyReal, Precision};
use crate::error::Result;

/// Guard bits added whenever a real is built from several operations.
const GUARD: u64 = 32;

fn guarded(p: Precision) -> Precision {
    p.at_least(p.bits() + GUARD)
}

pub fn ln10_real() -> LazyReal {
    LazyReal::memoized("log10", |p| Ok(ln10(p)))
}

/// `log 2 / log 10`.
pub fn tau_2_10() -> LazyReal {
    LazyReal::memoized("log2/log10", |p| {
        let w = guarded(p);
        Ok(ln2(w).div(&ln10(w))?.with_precision(p))
    })
}

pub fn alpha_real(k: u32) -> LazyReal {
    LazyReal::memoized(format!("alpha(k={k})"), move |p| {
        Ok(dominant_root(k, guarded(p))?.alpha().with_precision(p))
    })
}

/// `τ_k = log α / log 10`.
pub fn tau_real(k: u32) -> LazyReal {
    LazyReal::memoized(format!("tau(k={k})"), move |p| {
        let w = guarded(p);
        let a = dominant_root(k, w)?;
        Ok(a.alpha().log()?.div(&ln10(w))?.with_precision(p))
    })
}

/// `f_k(α)·(2α − 1)`.
pub fn coef_real(k: u32) -> LazyReal {
    LazyReal::memoized(format!("coef(k={k})"), move |p| {
        let w = guarded(p);
        let r = dominant_root(k, w)?;
        Ok(lucas_coefficient(k, &r)?.with_precision(p))
    })
}

/// `c / log 10` for an integer `c`.
pub fn over_ln10(c: i64) -> LazyReal {
    LazyReal::memoized(format!("{c}/log10"), move |p| {
        let w = guarded(p);
        Ok(Ball::from_int(c, w).div(&ln10(w))?.with_precision(p))
    })
}

/// `log(x)/log 10` for a ball-valued `x` computed at guarded precision.
fn log10_of(p: Precision, x: impl Fn(Precision) -> Result<Ball>) -> Result<Ball> {
    let w = guarded(p);
    Ok(x(w)?.log()?.div(&ln10(w))?.with_precision(p))
}

/// `(a/9 + (b − a)·10^(−g))` as an exact rational ball.
pub fn digit_block(a: u8, b: u8, g: u32, p: Precision) -> Result<Ball> {
    let ten_g = num_traits::pow(BigInt::from(10), g as usize);
    // (a·10^g + 9(b − a)) / (9·10^g)
    let num = BigInt::from(a) * &ten_g + BigInt::from(9) * (BigInt::from(b) - BigInt::from(a));
    Ball::from_rational(&num, &(ten_g * 9), p)
}

/// `μ` for Γ₁: `log(c·9/a)/log 10`.
pub fn mu_gamma1(k: u32, a: u8) -> LazyReal {
    let c = coef_real(k);
    LazyReal::new(format!("mu1(k={k},a={a})"), move |p| {
        log10_of(p, |w| c.eval(w)?.mul_int(9).div(&Ball::from_int(a, w)))
    })
}

/// `μ` for Γ₂: `−log((a/9 + (b − a)10^(−g))/c)/log 10`.
pub fn mu_gamma2(k: u32, g: u32, a: u8, b: u8) -> LazyReal {
    let c = coef_real(k);
    LazyReal::new(format!("mu2(k={k},g={g},a={a},b={b})"), move |p| {
        Ok(log10_of(p, |w| digit_block(a, b, g, w)?.div(&c.eval(w)?))?.neg())
    })
}

/// `μ` for `L_n = b·10^d2`: `−log(b/c)/log 10`.
pub fn mu_a0(k: u32, b: u8) -> LazyReal {
    let c = coef_real(k);
    LazyReal::new(format!("mu0(k={k},b={b})"), move |p| {
        Ok(log10_of(p, |w| Ball::from_int(b, w).div(&c.eval(w)?))?.neg())
    })
}

/// `μ_a = log(27/a)/log 10` for Γ₃.
pub fn mu_gamma3(a: u8) -> LazyReal {
    LazyReal::new(format!("mu3(a={a})"), move |p| {
        log10_of(p, |w| Ball::from_rational(&27.into(), &a.into(), w))
    })
}

/// `μ = −log((a/9 + (b − a)10^(−g))/3)/log 10` for Γ₄.
pub fn mu_gamma4(g: u32, a: u8, b: u8) -> LazyReal {
    LazyReal::new(format!("mu4(g={g},a={a},b={b})"), move |p| {
        Ok(log10_of(p, |w| digit_block(a, b, g, w)?.div(&Ball::from_int(3, w)))?.neg())
    })
}

/// `μ_b = −log(b/3)/log 10` for the large-k `a = 0` case.
pub fn mu_gamma4_a0(b: u8) -> LazyReal {
    LazyReal::new(format!("mu4a0(b={b})"), move |p| {
        Ok(log10_of(p, |w| Ball::from_rational(&b.into(), &3.into(), w))?.neg())
    })
}
