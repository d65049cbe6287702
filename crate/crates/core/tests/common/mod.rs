#![allow(dead_code)]

use alrep_core::arith::LazyReal;
use alrep_core::reduction::{dp_reduce, relation_bound, ReductionContext, ReductionInstance, ReductionResult};
use alrep_core::{Ball, BallOrdering, Precision};
use num_bigint::BigInt;

pub fn p(bits: u64) -> Precision {
    Precision::new(bits).unwrap()
}

/// String-based classifier: all digits equal except at most one.
pub fn digits_oracle(n: u64) -> bool {
    let s = n.to_string();
    let mut counts = [0usize; 10];
    for c in s.bytes() {
        counts[(c - b'0') as usize] += 1;
    }
    let used: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    match used.len() {
        1 => true,
        2 => used.contains(&1),
        _ => false,
    }
}

pub fn sqrt_real(d: u32) -> LazyReal {
    LazyReal::memoized(format!("sqrt({d})"), move |p| {
        Ok(Ball::from_int(d, p.at_least(p.bits() + 32)).sqrt()?.with_precision(p))
    })
}

/// `μ = s − r·√d + num/den`.
pub fn mu_real(d: u32, r: i64, s: i64, num: i64, den: i64) -> LazyReal {
    LazyReal::new(format!("mu(d={d},r={r},s={s},{num}/{den})"), move |p| {
        let w = p.at_least(p.bits() + 32);
        let root = Ball::from_int(d, w).sqrt()?;
        let frac = Ball::from_rational(&num.into(), &den.into(), w)?;
        Ok((&(&Ball::from_int(s, w) - &root.mul_int(r)) + &frac).with_precision(p))
    })
}

/// An instance `|u√d − v + μ| < A·B^(−w)`, `|u| ≤ M`.
#[derive(Clone, Debug)]
pub struct SmallInstance {
    pub d: u32,
    pub r: i64,
    pub s: i64,
    pub num: i64,
    pub den: i64,
    pub a: u32,
    pub b: u32,
    pub m: u32,
}

pub enum Verdict {
    /// Reduction succeeded and no `|u| ≤ M` beats the bound.
    Sound { kind: &'static str, w_bound: BigInt },
    /// The library declined (no usable convergent or relation).
    Declined(String),
}

impl SmallInstance {
    pub fn instance(&self) -> ReductionInstance {
        ReductionInstance::new(
            sqrt_real(self.d),
            mu_real(self.d, self.r, self.s, self.num, self.den),
            LazyReal::rational(self.a, 1),
            LazyReal::rational(self.b, 1),
            BigInt::from(self.m),
        )
        .unwrap()
    }

    /// Runs the reduction and checks its conclusion against every `u`.
    pub fn check(&self, ctx: &ReductionContext) -> Result<Verdict, String> {
        let inst = self.instance();
        let (kind, w) = match dp_reduce(&inst, ctx) {
            Ok(ReductionResult::Reduced { w_bound, .. }) => ("reduced", w_bound),
            Ok(ReductionResult::Degenerate { relation, .. }) => match relation_bound(&inst, &relation, ctx) {
                Ok(w) => ("relation", w),
                Err(e) => return Ok(Verdict::Declined(e.to_string())),
            },
            Err(e) => return Ok(Verdict::Declined(e.to_string())),
        };
        let w_u: u32 = w.clone().try_into().map_err(|_| format!("huge bound {w}"))?;
        let prec = p(256 + 8 * w_u as u64);
        let root = Ball::from_int(self.d, prec).sqrt().unwrap();
        let mu = inst.mu.eval(prec).unwrap();
        let threshold = Ball::from_int(self.a, prec)
            .div(&Ball::from_int(BigInt::from(self.b).pow(w_u), prec))
            .unwrap();
        let m = self.m as i64;
        for u in -m..=m {
            if u == self.r && self.num % self.den == 0 {
                continue; // the form vanishes, excluded by 0 < |…|
            }
            let x = &root.mul_int(u) + &mu;
            let v = x.round_mid();
            let dist = (&x - &Ball::from_int(v, prec)).abs();
            if dist.compare(&threshold) != BallOrdering::Greater {
                return Err(format!("u={u} gives {} not above A·B^-{w}", dist.to_sci(6)));
            }
        }
        Ok(Verdict::Sound { kind, w_bound: w })
    }
}
