//! Orders `k > 470`: the Lucas numbers are then `3·2^(n−2)` up to a tiny
//! relative error, and two rounds of reduction with base 2 push `k` back
//! below 470.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Pow;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::per_k::{settle, summarize, to_u64, InstanceBound, SweepSummary};
use super::reals::{mu_gamma3, mu_gamma4, mu_gamma4_a0, over_ln10, tau_2_10};
use crate::algebraic::{bound_n_a0, bound_n_initial, matveev_constant, BoundChain};
use crate::arith::{ln10, ln2, parse_decimal, Ball, BallOrdering, LazyReal, Precision};
use crate::error::{Error, Result};
use crate::reduction::{ReductionContext, ReductionInstance};

/// Largest order handled one `k` at a time.
pub const K_THRESHOLD: u32 = 470;

const PREC: u64 = 256;

fn prec() -> Precision {
    Precision::new(PREC).expect("constant precision is valid")
}

fn ball(n: impl Into<BigInt>) -> Ball {
    Ball::from_int(n, prec())
}

fn dec(s: &str) -> Ball {
    Ball::from_decimal(s, prec()).expect("literal parses")
}

fn sci(x: &BigInt) -> String {
    ball(x.clone()).to_sci(4)
}

/// Rounded moduli used whenever they dominate the computed bound on `n`.
pub mod reference {
    pub const K_INITIAL: &str = "3e31";
    pub const M_ROUND1: &str = "1.8e291";
    pub const M_ROUND2: &str = "8.5e60";
    pub const A0_K_INITIAL: &str = "4e14";
    pub const A0_M_ROUND1: &str = "6.9e81";
    pub const A0_M_ROUND2: &str = "4e31";
}

/// `⌈s⌉` for a decimal literal.
fn parse_int(s: &str) -> BigInt {
    let (num, den) = parse_decimal(s).expect("literal parses");
    num.div_ceil(&den)
}

/// The rounded modulus if it is at least the computed one, else the
/// computed one. The flag says whether the rounded value was kept.
pub fn pick_m(computed: &BigInt, rounded: &BigInt) -> (BigInt, bool) {
    if computed <= rounded {
        (rounded.clone(), true)
    } else {
        (computed.clone(), false)
    }
}

/// `x < c0 + c1·L + c2·L²` with `L = log x` and nonnegative coefficients.
#[derive(Clone, Debug)]
pub struct Implicit {
    pub c0: Ball,
    pub c1: Ball,
    pub c2: Ball,
}

impl Implicit {
    fn f(&self, x: &BigInt) -> Result<Ball> {
        let l = ball(x.clone()).log()?;
        Ok(&(&self.c0 + &(&self.c1 * &l)) + &(&self.c2 * &l.sqr()))
    }

    /// `F'(x) = (c1 + 2·c2·L)/x`.
    fn slope(&self, x: &BigInt) -> Result<Ball> {
        let l = ball(x.clone()).log()?;
        (&self.c1 + &self.c2.mul_int(2).mul(&l)).div(&ball(x.clone()))
    }

    /// An integer `X` such that every `x ≥ 3` with `x < F(x)` has `x < X`.
    ///
    /// Beyond `e`, `F'` decreases, so once `x > F(x)` and `F'(x) < 1` hold
    /// at some `x*` they hold for all larger `x`. Then `x < F(x) ≤ F(X)`
    /// for any valid `X`, which is iterated until it stalls.
    pub fn solve(&self) -> Result<BigInt> {
        let zero = Ball::zero(prec());
        for c in [&self.c0, &self.c1, &self.c2] {
            if c.compare(&zero) == BallOrdering::Less || c.contains_zero() && !c.is_exact() {
                return Err(Error::InvalidInput("implicit bound needs nonnegative coefficients".into()));
            }
        }
        let one = ball(1);
        let mut x = BigInt::from(16);
        loop {
            let above = ball(x.clone()).compare(&self.f(&x)?) == BallOrdering::Greater;
            let flat = self.slope(&x)?.compare(&one) == BallOrdering::Less;
            if above && flat {
                break;
            }
            if x.bits() > 4096 {
                return Err(Error::CertificationFailed("implicit bound diverged".into()));
            }
            x <<= 1;
        }
        for _ in 0..200 {
            let next = self.f(&x)?.upper_ceil();
            if next >= x {
                break;
            }
            x = next;
        }
        Ok(x)
    }
}

/// `2^(n−2)·27 = a·10^d1` and `2^(n−2) = (a/9)·10^d1 + (b − a)·10^d2` have
/// no solutions with at least three digits, so Λ₃ and Λ₄ are nonzero.
///
/// The second equation forces `9 | a·10^d1`, so `a = 9`. A factor 5 on
/// the right then forces `d2 = 0`, leaving `2^(n−2) = 10^d1 + b − 9`. For
/// `d1 = 3` this is checked directly; for `d1 ≥ 4` reduce modulo 16.
pub fn lambda34_nonzero() -> bool {
    let is_pow2 = |v: i32| v > 0 && (v as u32).is_power_of_two();
    // Λ₃: 27·2^(n−2) is prime to 5, a·10^d1 is not.
    let l3 = (0..4u32).all(|j| (27 << j) % 5 != 0);
    let forced_a = (1..=9u8).filter(|a| (BigInt::from(*a) * 10) % 9u8 == BigInt::from(0)).collect::<Vec<_>>();
    let d1_three = (0..=9i32).all(|b| !is_pow2(1000 + b - 9));
    let mod16 = (0..=9i32).filter(|b| (b - 9).rem_euclid(16) == 0).collect::<Vec<_>>();
    let ten4 = BigInt::from(10).pow(4u32) % 16u8 == BigInt::from(0);
    l3 && forced_a == [9] && d1_three && mod16 == [9] && ten4
}

/// `3·2^(n−2) = b·10^d2` with `d2 ≥ 2` is impossible: 5 divides the right side.
pub fn lambda4_a0_nonzero() -> bool {
    // 2^j mod 5 has period 4
    (0..4u32).all(|j| (3 << j) % 5 != 0)
}

/// One round of reductions of Γ₃ and Γ₄ at a given modulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionRound {
    pub label: String,
    #[serde(with = "crate::serde_big")]
    pub m: BigInt,
    #[serde(with = "crate::serde_big")]
    pub m_computed: BigInt,
    pub gamma3: Vec<InstanceBound>,
    /// `λ < lambda_bound`.
    pub lambda_bound: u64,
    /// `k < 2(λ + 5)` on the `λ = k/2 − 5` branch.
    pub k_from_lambda: u64,
    pub gap_max: u64,
    pub gamma4: SweepSummary,
    /// `k/2 < w_max(Γ₄)`.
    pub k_from_gamma4: u64,
    pub k_bound: u64,
}

/// One round of reductions for `L_n = b·10^d2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A0Round {
    pub label: String,
    #[serde(with = "crate::serde_big")]
    pub m: BigInt,
    #[serde(with = "crate::serde_big")]
    pub m_computed: BigInt,
    pub instances: SweepSummary,
    pub k_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeKReport {
    pub chain: BoundChain,
    pub rounds: Vec<ReductionRound>,
    pub a0_rounds: Vec<A0Round>,
    /// Strict bound on `k` for `a ≠ 0`.
    pub final_k_bound: u64,
    /// Strict bound on `k` for `a = 0`.
    pub a0_final_k_bound: u64,
    /// Both final bounds are at most 471, contradicting `k > 470`.
    pub contradiction: bool,
}

fn base2() -> LazyReal {
    LazyReal::rational(2, 1)
}

fn sweep(insts: Vec<(String, ReductionInstance)>, ctx: &ReductionContext) -> Result<SweepSummary> {
    let all = insts
        .into_par_iter()
        .map(|(label, inst)| settle(label, &inst, ctx))
        .collect::<Result<Vec<_>>>()?;
    summarize(all)
}

/// Γ₃ over `a`, then Γ₄ over `(d1 − d2, a, b)` with `d1 − d2` below the
/// Γ₃ bound.
pub fn reduction_round(label: &str, m_computed: &BigInt, rounded: &str, ctx: &ReductionContext) -> Result<ReductionRound> {
    let (m, _) = pick_m(m_computed, &parse_int(rounded));
    let tau = tau_2_10();
    let gamma3 = (1..=9u8)
        .into_par_iter()
        .map(|a| {
            let inst = ReductionInstance::new(tau.clone(), mu_gamma3(a), over_ln10(2), base2(), m.clone())?;
            settle(format!("gamma3({label},a={a})"), &inst, ctx)
        })
        .collect::<Result<Vec<_>>>()?;
    let w3 = gamma3
        .iter()
        .map(|b| to_u64(&b.w_bound, "lambda"))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .expect("nine instances");
    let k_from_lambda = 2 * (w3 + 5);
    // (d1 − d2)·log 10/log 2 − 8 < λ
    let tau_b = tau.eval(prec())?;
    let gap_ceil = to_u64(&ball(w3 + 8).mul(&tau_b).upper_ceil(), "d1-d2")?;
    let gap_max = gap_ceil.saturating_sub(1).max(1);

    let mut g4 = Vec::new();
    for g in 1..=gap_max as u32 {
        for a in 1..=9u8 {
            for b in 0..=9u8 {
                let inst = ReductionInstance::new(tau.clone(), mu_gamma4(g, a, b), over_ln10(4), base2(), m.clone())?;
                g4.push((format!("gamma4({label},a={a},b={b},g={g})"), inst));
            }
        }
    }
    let gamma4 = sweep(g4, ctx)?;
    let k_from_gamma4 = 2 * gamma4.w_max;
    Ok(ReductionRound {
        label: label.to_string(),
        m,
        m_computed: m_computed.clone(),
        gamma3,
        lambda_bound: w3,
        k_from_lambda,
        gap_max,
        k_from_gamma4,
        k_bound: k_from_lambda.max(k_from_gamma4),
        gamma4,
    })
}

/// `|(n−2)τ − d2 − log(b/3)/log 10| < 2/(2^(k/2)·log 10)` over `b`.
pub fn a0_round(label: &str, m_computed: &BigInt, rounded: &str, ctx: &ReductionContext) -> Result<A0Round> {
    let (m, _) = pick_m(m_computed, &parse_int(rounded));
    let tau = tau_2_10();
    let insts = (1..=9u8)
        .map(|b| {
            let inst = ReductionInstance::new(tau.clone(), mu_gamma4_a0(b), over_ln10(2), base2(), m.clone())?;
            Ok((format!("gamma4a0({label},b={b})"), inst))
        })
        .collect::<Result<Vec<_>>>()?;
    let instances = sweep(insts, ctx)?;
    Ok(A0Round {
        label: label.to_string(),
        m,
        m_computed: m_computed.clone(),
        k_bound: 2 * instances.w_max,
        instances,
    })
}

/// Certifies `φ(log k₀) > 0` for `φ(L) = c·L − d − e·log L` with `c > e`,
/// which is then increasing for `L ≥ 1`.
fn increasing_from(k0: u32, c: &Ball, d: &Ball, e: &Ball) -> Result<bool> {
    let l = ball(k0).log()?;
    let v = &(&c.mul(&l) - d) - &e.mul(&l.log()?);
    Ok(v.is_positive() && (c - e).is_positive())
}

/// The chain of bounds for symbolic `k > 470`.
///
/// With `report_only` the report is returned even when the chain fails to
/// close; otherwise that is an error.
pub fn large_k_analysis(report_only: bool, ctx: &ReductionContext) -> Result<LargeKReport> {
    let p = prec();
    let mut chain = BoundChain::for_k(None);
    let k0 = K_THRESHOLD + 1;
    let ln2b = ln2(p);
    let ln10b = ln10(p);
    let log_m_coef = dec("1.3e30").log()?;

    // n < 1.3e30·k^8·log^5 k < 2^(k/2): true at k₀, and the log-difference
    // has derivative log 2/2 − 8/k − 5/(k log k) > 0 from k₀ on.
    let lk0 = ball(k0).log()?;
    let lhs = &log_m_coef + &(&lk0.mul_int(8) + &lk0.log()?.mul_int(5));
    let rhs = ln2b.mul_int(k0).mul_pow2(-1);
    let slope = &ln2b.mul_pow2(-1) - &(&ball(8) + &ball(5).div(&lk0)?).div(&ball(k0))?;
    let below_pow2 = rhs.compare(&lhs) == BallOrdering::Greater && slope.is_positive();
    chain.push("n_below_2^(k/2)", "1.3e30*k^8*log(k)^5 < 2^(k/2) for k >= 471", "holds", below_pow2);

    // log n < 50 log k
    let log_n = increasing_from(k0, &ball(42), &log_m_coef, &ball(5))?;
    chain.push("log_n_vs_log_k", "log(1.3e30) + 8L + 5log(L) < 50L for L >= log 471", "holds", log_n);

    let nonzero = lambda34_nonzero();
    chain.push("lambda34_nonzero", "a=9, d2=0, then d1=3 directly and d1>=4 mod 16", "holds", nonzero);

    // Λ₃: λ·log 2 < |K|·log 2·log 10·log 27·(1 + log n)
    let k_abs = matveev_constant(3, p)?.abs();
    let c3 = k_abs.mul(&ln10b).mul(&ball(27).log()?);
    chain.push("lambda3_coefficient", "lambda < C3*(1+log n), C3 = 1.4*30^6*3^4.5*log10*log27", c3.to_sci(6), true);

    // λ = k/2 − 5: k < 10 + 2·C3 + 100·C3·L
    let branch_k = Implicit {
        c0: &ball(10) + &c3.mul_int(2),
        c1: c3.mul_int(100),
        c2: Ball::zero(p),
    }
    .solve()?;
    chain.push("k_lambda_branch", "k < 2(5 + C3(1 + 50 log k))", sci(&branch_k), true);

    // gap < (8 + C3(1 + 50L))·τ = g0 + g1·L
    let tau = ln2b.div(&ln10b)?;
    let g0 = (&ball(8) + &c3).mul(&tau);
    let g1 = c3.mul_int(50).mul(&tau);
    chain.push("dgap_symbolic", "d1-d2 < (8 + C3(1 + 50 log k))*log2/log10", format!("{} + {}*log k", g0.to_sci(4), g1.to_sci(4)), true);

    // Λ₄: k/2 − 1 < K·log 10·(1 + 50L)·(L + gap·log 10), using log 432 < L
    let c = g0.mul(&ln10b);
    let d = &ball(1) + &g1.mul(&ln10b);
    let scale = k_abs.mul(&ln10b).mul_int(2);
    let lambda4_k = Implicit {
        c0: &ball(2) + &scale.mul(&c),
        c1: scale.mul(&(&d + &c.mul_int(50))),
        c2: scale.mul(&d.mul_int(50)),
    }
    .solve()?;
    chain.push("k_lambda4", "k/2 - 1 < K*log10*(1 + 50L)*(L + (d1-d2)*log10)", sci(&lambda4_k), true);
    let k_initial = branch_k.clone().max(lambda4_k);
    let k_ref = parse_int(reference::K_INITIAL);
    chain.push("k_initial", "max of both branches", sci(&k_initial), k_initial <= k_ref);

    let m1_computed = bound_n_initial(&k_initial)?;
    let round1 = reduction_round("round1", &m1_computed, reference::M_ROUND1, ctx)?;
    chain.push("n_round1", "1.3e30*k^8*log(k)^5 at the initial k bound", sci(&round1.m), true);
    chain.push("lambda_round1", "max_a W(gamma3)", round1.lambda_bound, true);
    chain.push("dgap_round1", "(W + 8)*log2/log10", round1.gap_max, true);
    chain.push("k_round1", "max(2(W3 + 5), 2*W4)", round1.k_bound, true);

    let m2_computed = bound_n_initial(&BigInt::from(round1.k_bound))?;
    let round2 = reduction_round("round2", &m2_computed, reference::M_ROUND2, ctx)?;
    chain.push("n_round2", "1.3e30*k^8*log(k)^5 at the round-1 k bound", sci(&round2.m), true);
    chain.push("lambda_round2", "max_a W(gamma3)", round2.lambda_bound, true);
    chain.push("dgap_round2", "(W + 8)*log2/log10", round2.gap_max, true);
    chain.push("k_round2", "max(2(W3 + 5), 2*W4)", round2.k_bound, true);
    let final_k_bound = round2.k_bound;

    // a = 0: k/2·log 2 < |K|·log 2·log 10·log 8·(1 + log n), n < 2.1e17·k^4·log^4 k.
    // With log L ≤ L/32 + log 32 − 1:
    // 1 + log n < 1 + log 2.1e17 + 4 log 32 − 4 + (4 + 1/8)·L.
    let a0_nonzero = lambda4_a0_nonzero();
    chain.push("lambda4_a0_nonzero", "5 divides b*10^d2 but not 3*2^(n-2)", "holds", a0_nonzero);
    let c8 = k_abs.mul(&ln10b).mul(&ball(8).log()?).mul_int(2);
    let base = &(&ball(-3) + &dec("2.1e17").log()?) + &ball(32).log()?.mul_int(4);
    let a0_k = Implicit {
        c0: c8.mul(&base),
        c1: c8.mul(&dec("4.125")),
        c2: Ball::zero(p),
    }
    .solve()?;
    chain.push("k_a0_initial", "k < 2K*log10*log8*(1 + log n)", sci(&a0_k), a0_k <= parse_int(reference::A0_K_INITIAL));
    let a0_r1 = a0_round("a0_round1", &bound_n_a0(&a0_k)?, reference::A0_M_ROUND1, ctx)?;
    chain.push("k_a0_round1", "2*max_b W", a0_r1.k_bound, true);
    let a0_r2 = a0_round("a0_round2", &bound_n_a0(&BigInt::from(a0_r1.k_bound))?, reference::A0_M_ROUND2, ctx)?;
    chain.push("k_a0_round2", "2*max_b W", a0_r2.k_bound, true);
    let a0_final_k_bound = a0_r2.k_bound;

    let closes = final_k_bound <= K_THRESHOLD as u64 + 1 && a0_final_k_bound <= K_THRESHOLD as u64 + 1;
    chain.push("contradiction", "final k bounds <= 471", format!("{final_k_bound}, {a0_final_k_bound}"), closes);
    chain.k = None;
    chain.n_bound = Some(round2.m.clone());
    chain.dgap_bound = Some(BigInt::from(round2.gap_max));

    let contradiction = closes && chain.all_certified();
    if !contradiction && !report_only {
        let bad = chain
            .provenance
            .iter()
            .filter(|s| !s.certified)
            .map(|s| s.step.as_str())
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::CertificationFailed(format!("large-k chain does not close: {bad}")));
    }
    Ok(LargeKReport {
        chain,
        rounds: vec![round1, round2],
        a0_rounds: vec![a0_r1, a0_r2],
        final_k_bound,
        a0_final_k_bound,
        contradiction,
    })
}
