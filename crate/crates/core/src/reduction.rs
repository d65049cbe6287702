//! Dujella–Pethő reduction of `0 < |uγ − v + μ| < A·B^(−w)`, `u ≤ M`.
//!
//! Given a convergent `p/q` of `γ` with `q > 6M` and
//! `ε = ||μq|| − M||γq|| > 0`, every solution has
//! `w < log(Aq/ε)/log B`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{Ball, Dyadic, LazyReal, Precision, PrecisionPolicy};
use crate::contfrac::CfSource;
use crate::error::{Error, Result};

/// The data of one reduction: `γ`, `μ`, `A > 0`, `B > 1` and `M ≥ 1`.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub gamma: LazyReal,
    pub mu: LazyReal,
    pub a: LazyReal,
    pub b: LazyReal,
    pub m: BigInt,
}

impl ReductionInstance {
    pub fn new(gamma: LazyReal, mu: LazyReal, a: LazyReal, b: LazyReal, m: BigInt) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::InvalidInput("reduction bound M must be at least 1".into()));
        }
        let p = Precision::DEFAULT_START;
        if !a.eval(p)?.is_positive() {
            return Err(Error::InvalidInput("reduction constant A must be positive".into()));
        }
        if !(&b.eval(p)? - &Ball::from_int(1, p)).is_positive() {
            return Err(Error::InvalidInput("reduction base B must exceed 1".into()));
        }
        Ok(ReductionInstance { gamma, mu, a, b, m })
    }
}

/// `r·γ + μ = s + offset` with small `r` and integer `s`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub r: i64,
    pub s: BigInt,
    /// Enclosure of `rγ + μ − s`.
    pub offset: Ball,
    /// The offset still contains 0 at the confirmation precision.
    pub exact: bool,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}*gamma + mu = {}", self.r, self.s)
        } else {
            write!(
                f,
                "{}*gamma + mu = {} + {}",
                self.r,
                self.s,
                self.offset.to_sci(6)
            )
        }
    }
}

#[derive(Clone, Debug)]
pub enum ReductionResult {
    Reduced {
        convergent_index: usize,
        q: BigInt,
        epsilon: Ball,
        /// Every solution has `w < w_bound`.
        w_bound: BigInt,
    },
    Degenerate {
        convergent_index: usize,
        q: BigInt,
        relation: Relation,
    },
}

impl ReductionResult {
    pub fn q_used(&self) -> &BigInt {
        match self {
            ReductionResult::Reduced { q, .. } | ReductionResult::Degenerate { q, .. } => q,
        }
    }

    pub fn is_reduced(&self) -> bool {
        matches!(self, ReductionResult::Reduced { .. })
    }

    pub fn w_bound(&self) -> Option<&BigInt> {
        match self {
            ReductionResult::Reduced { w_bound, .. } => Some(w_bound),
            ReductionResult::Degenerate { .. } => None,
        }
    }

    pub fn epsilon(&self) -> Option<&Ball> {
        match self {
            ReductionResult::Reduced { epsilon, .. } => Some(epsilon),
            ReductionResult::Degenerate { .. } => None,
        }
    }

    pub fn summary(&self) -> ReductionSummary {
        match self {
            ReductionResult::Reduced {
                convergent_index,
                q,
                epsilon,
                w_bound,
            } => ReductionSummary {
                kind: "Reduced".into(),
                convergent_index: *convergent_index,
                q: q.to_string(),
                epsilon_lower: Some(epsilon.lower().to_sci(8)),
                w_bound: Some(w_bound.to_string()),
                note: None,
            },
            ReductionResult::Degenerate {
                convergent_index,
                q,
                relation,
            } => ReductionSummary {
                kind: "Degenerate".into(),
                convergent_index: *convergent_index,
                q: q.to_string(),
                epsilon_lower: None,
                w_bound: None,
                note: Some(relation.to_string()),
            },
        }
    }
}

/// Serializable view of a [`ReductionResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub kind: String,
    pub convergent_index: usize,
    pub q: String,
    pub epsilon_lower: Option<String>,
    pub w_bound: Option<String>,
    pub note: Option<String>,
}

/// Shared settings for reductions.
#[derive(Clone, Debug)]
pub struct ReductionContext {
    pub cf: CfSource,
    /// Further convergents to try after the first `q > 6M`.
    pub max_advance: usize,
    /// Largest `|r|` searched for integer relations.
    pub relation_max: i64,
    /// Precision at which a relation offset still containing 0 is called exact.
    pub confirm_bits: u64,
}

impl Default for ReductionContext {
    fn default() -> Self {
        ReductionContext {
            cf: CfSource::default(),
            max_advance: 10,
            relation_max: 16,
            confirm_bits: 4096,
        }
    }
}

impl ReductionContext {
    pub fn with_source(cf: CfSource) -> Self {
        ReductionContext {
            cf,
            ..Default::default()
        }
    }

    fn policy(&self) -> &PrecisionPolicy {
        self.cf.policy()
    }
}

enum EpsOutcome {
    Positive(Ball),
    NonPositive,
    Unknown,
}

fn epsilon_at(inst: &ReductionInstance, q: &BigInt, prec: Precision) -> Result<Ball> {
    let gamma = inst.gamma.eval(prec)?;
    let mu = inst.mu.eval(prec)?;
    let dmu = mu.mul_int(q.clone()).nearest_int_distance()?;
    let dg = gamma.mul_int(q.clone()).nearest_int_distance()?;
    Ok(&dmu - &dg.mul_int(inst.m.clone()))
}

fn classify_epsilon(inst: &ReductionInstance, q: &BigInt, ctx: &ReductionContext) -> Result<EpsOutcome> {
    let start = q.bits() + inst.m.bits() + 64;
    let policy = ctx.policy().starting_at(start);
    let out = policy.run(|prec| {
        let eps = epsilon_at(inst, q, prec)?;
        if eps.is_positive() {
            Ok(EpsOutcome::Positive(eps))
        } else if !eps.upper().is_positive() {
            Ok(EpsOutcome::NonPositive)
        } else {
            Err(Error::Undecidable("sign of epsilon".into()))
        }
    });
    match out {
        Err(Error::PrecisionCeiling { .. }) => Ok(EpsOutcome::Unknown),
        other => other,
    }
}

/// `⌈upper(log(x)/log B)⌉` for a positive ball `x`.
fn log_ratio_ceil(x: &Ball, b: &Ball) -> Result<BigInt> {
    Ok(x.log()?.div(&b.log()?)?.upper_ceil())
}

/// Looks for `|r| ≤ relation_max` with `rγ + μ − s` so small that it forces
/// `ε ≤ 0` at this `q`: `q·|δ| < (M − |r|)·||qγ||`.
fn find_relation(inst: &ReductionInstance, q: &BigInt, ctx: &ReductionContext) -> Result<Option<Relation>> {
    let prec = Precision::DEFAULT_START.at_least(q.bits() + inst.m.bits() + 64);
    let gamma = inst.gamma.eval(prec)?;
    let mu = inst.mu.eval(prec)?;
    let dg = gamma.mul_int(q.clone()).nearest_int_distance()?;
    let mut order: Vec<i64> = vec![0];
    for r in 1..=ctx.relation_max {
        order.push(r);
        order.push(-r);
    }
    for r in order {
        if BigInt::from(r.abs()) >= inst.m {
            continue;
        }
        let v = &gamma.mul_int(r) + &mu;
        let s = v.round_mid();
        let delta = &v - &Ball::from_int(s.clone(), prec);
        let lhs = delta.mag_upper().mul_int(q);
        let rhs = dg.lower().mul_int(&(&inst.m - r.abs()));
        if lhs.cmp_value(&rhs) == std::cmp::Ordering::Less {
            let exact_prec = Precision::new(ctx.confirm_bits.max(prec.bits()))?;
            let fine = &(&inst.gamma.eval(exact_prec)?.mul_int(r) + &inst.mu.eval(exact_prec)?)
                - &Ball::from_int(s.clone(), exact_prec);
            return Ok(Some(Relation {
                r,
                s,
                exact: fine.contains_zero(),
                offset: fine,
            }));
        }
    }
    Ok(None)
}

/// Lemma 1 with convergent advancement and relation detection.
pub fn dp_reduce(inst: &ReductionInstance, ctx: &ReductionContext) -> Result<ReductionResult> {
    let six_m = &inst.m * 6;
    let cf = ctx.cf.expand_beyond(&inst.gamma, &six_m, ctx.max_advance)?;
    let first = cf
        .first_q_exceeding(&six_m)
        .expect("expansion reaches 6M")
        .index;
    let mut relation = None;
    for idx in first..=first + ctx.max_advance {
        let q = cf.convergent(idx)?.q.clone();
        match classify_epsilon(inst, &q, ctx)? {
            EpsOutcome::Positive(eps) => {
                let p = eps.precision();
                let a = inst.a.eval(p)?;
                let b = inst.b.eval(p)?;
                let eps_lo = Ball::from_dyadic(eps.lower(), p);
                let x = a.mul_int(q.clone()).div(&eps_lo)?;
                let w_bound = log_ratio_ceil(&x, &b)?;
                return Ok(ReductionResult::Reduced {
                    convergent_index: idx,
                    q,
                    epsilon: eps,
                    w_bound,
                });
            }
            EpsOutcome::NonPositive | EpsOutcome::Unknown => {
                if relation.is_none() {
                    relation = find_relation(inst, &q, ctx)?;
                }
                if let Some(rel) = relation.take() {
                    return Ok(ReductionResult::Degenerate {
                        convergent_index: idx,
                        q,
                        relation: rel,
                    });
                }
            }
        }
    }
    Err(Error::ReductionFailed(format!(
        "no convergent with positive epsilon among indices {first}..={} (gamma {}, mu {})",
        first + ctx.max_advance,
        inst.gamma.id(),
        inst.mu.id()
    )))
}

/// `max a_{i+1}` over the convergents `p_i/q_i` with `q_i ≤ bound`.
pub fn max_quotient_below(gamma: &LazyReal, bound: &BigInt, cf: &CfSource) -> Result<BigInt> {
    let exp = cf.expand_beyond(gamma, bound, 1)?;
    let conv = exp.convergents();
    let qs = exp.quotients();
    let mut best = BigInt::zero();
    for c in conv.iter().take_while(|c| &c.q <= bound) {
        if let Some(a) = qs.get(c.index + 1) {
            best = best.max(a.clone());
        }
    }
    Ok(best)
}

/// Bound on `w` once `μ = s − rγ + δ` is substituted: with `u' = u − r`,
/// `|u'| ≤ M + |r|` and `|u'γ − v' + δ| < A·B^(−w)`.
///
/// * `u' = 0, v' ≠ 0` gives `w < log(A/(1 − |δ|))/log B`;
/// * `u' = 0, v' = 0` gives `w < log(A/|δ|)/log B` (impossible when `δ = 0`);
/// * `u' ≠ 0` gives `1/((a_max + 2)M') − |δ| < A·B^(−w)` by Legendre's
///   criterion and the lower bound `|qγ − p| > 1/((a_{i+1} + 2)q)`.
pub fn relation_bound(inst: &ReductionInstance, rel: &Relation, ctx: &ReductionContext) -> Result<BigInt> {
    let m2 = &inst.m + rel.r.abs();
    let a_max = max_quotient_below(&inst.gamma, &m2, &ctx.cf)?;
    let prec = Precision::DEFAULT_START.at_least(2 * m2.bits() + 128).max(rel.offset.precision());
    let a = inst.a.eval(prec)?;
    let b = inst.b.eval(prec)?;
    let one = Ball::from_int(1, prec);
    let delta_hi = Ball::from_dyadic(rel.offset.mag_upper(), prec);
    let mut w = BigInt::zero();

    let gap = &one - &delta_hi;
    if gap.is_positive() {
        let w0 = log_ratio_ceil(&a.div(&gap)?, &b)?;
        w = w.max(w0);
    } else {
        return Err(Error::ReductionFailed(format!("relation offset too large: {rel}")));
    }

    if !rel.exact {
        let delta_lo = Ball::from_dyadic(rel.offset.mag_lower(), prec);
        if !delta_lo.is_positive() {
            return Err(Error::Undecidable(format!("relation offset not separated from 0: {rel}")));
        }
        w = w.max(log_ratio_ceil(&a.div(&delta_lo)?, &b)?);
    }

    let den = BigInt::from(2u8) + &a_max;
    let legendre = Ball::from_rational(&BigInt::from(1), &(den * &m2), prec)?;
    let margin = if rel.exact { legendre } else { &legendre - &delta_hi };
    if !margin.is_positive() {
        return Err(Error::ReductionFailed(format!(
            "relation offset {} exceeds the Legendre margin",
            rel.offset.to_sci(6)
        )));
    }
    w = w.max(log_ratio_ceil(&a.div(&margin)?, &b)?);
    Ok(w)
}

/// `⌈log(A·(a_max + 2)·M)/log B⌉` with `a_max` the largest quotient
/// following a convergent of denominator at most `M`: solutions of
/// `0 < |γ − p/q| < (A/q)·B^(−w)`, `q ≤ M`, have `w` below it.
pub fn legendre_bound(gamma: &LazyReal, m: &BigInt, a: &LazyReal, b: &LazyReal, cf: &CfSource) -> Result<BigInt> {
    if !m.is_positive() {
        return Err(Error::InvalidInput("Legendre bound needs M >= 1".into()));
    }
    let a_max = max_quotient_below(gamma, m, cf)?;
    let prec = Precision::DEFAULT_START.at_least(m.bits() + 128);
    let x = a.eval(prec)?.mul_int((a_max + 2u8) * m);
    log_ratio_ceil(&x, &b.eval(prec)?)
}

/// Convenience: a `LazyReal` for an exact dyadic constant.
pub fn constant(id: &str, value: Dyadic) -> LazyReal {
    LazyReal::new(id.to_string(), move |p| Ok(Ball::from_dyadic(value.clone(), p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> LazyReal {
        LazyReal::new("sqrt(2)", |p| Ball::from_int(2, p.at_least(p.bits() + 16)).sqrt())
    }

    fn int(n: i64) -> LazyReal {
        LazyReal::rational(n, 1)
    }

    #[test]
    fn synthetic_instance_reduces() {
        let inst = ReductionInstance::new(sqrt2(), LazyReal::rational(1, 3), int(1), int(10), BigInt::from(1000)).unwrap();
        let res = dp_reduce(&inst, &ReductionContext::default()).unwrap();
        assert!(res.is_reduced());
        assert!(res.q_used() > &BigInt::from(6000));
        assert!(res.epsilon().unwrap().is_positive());
    }

    #[test]
    fn integer_relation_is_degenerate() {
        let g = sqrt2();
        let g2 = g.clone();
        let mu = LazyReal::new("1-sqrt(2)", move |p| Ok(&Ball::from_int(1, p) - &g2.eval(p)?));
        let inst = ReductionInstance::new(g, mu, int(1), int(10), BigInt::from(1000)).unwrap();
        let ctx = ReductionContext::default();
        match dp_reduce(&inst, &ctx).unwrap() {
            ReductionResult::Degenerate { relation, .. } => {
                assert_eq!(relation.r, 1);
                assert_eq!(relation.s, BigInt::from(1));
                assert!(relation.exact);
                let w = relation_bound(&inst, &relation, &ctx).unwrap();
                assert!(w.is_positive());
            }
            other => panic!("expected a degenerate result, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ReductionInstance::new(sqrt2(), int(0), int(0), int(10), BigInt::from(5)).is_err());
        assert!(ReductionInstance::new(sqrt2(), int(0), int(1), int(1), BigInt::from(5)).is_err());
        assert!(ReductionInstance::new(sqrt2(), int(0), int(1), int(2), BigInt::zero()).is_err());
    }

    #[test]
    fn legendre_bound_for_golden_ratio() {
        let phi = LazyReal::new("golden", |p| {
            let five = Ball::from_int(5, p.at_least(p.bits() + 16));
            Ok((&five.sqrt()? + &Ball::from_int(1, five.precision())).mul_pow2(-1))
        });
        let cf = CfSource::default();
        // a_max = 1, so the bound is ⌈log2(1·3·100)⌉ = 9
        let w = legendre_bound(&phi, &BigInt::from(100), &int(1), &int(2), &cf).unwrap();
        assert_eq!(w, BigInt::from(9));
        let w2 = legendre_bound(&phi, &BigInt::from(1000), &int(1), &int(2), &cf).unwrap();
        assert!(w2 >= w);
    }
}
