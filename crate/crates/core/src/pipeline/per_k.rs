//! The analysis for one fixed order `k`.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::reals::{mu_a0, mu_gamma1, mu_gamma2, over_ln10, tau_real, alpha_real};
use super::search::{brute_search, case_a0, case_small_n, check_solution, SolutionCheck, SolutionRecord};
use crate::algebraic::{bound_n_a0, initial_chain, BoundChain};
use crate::arith::LazyReal;
use crate::error::{Error, Result};
use crate::reduction::{dp_reduce, relation_bound, ReductionContext, ReductionInstance, ReductionResult, ReductionSummary};

/// One reduction together with the bound it yields: every solution of the
/// instance has `w < w_bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceBound {
    pub label: String,
    pub result: ReductionSummary,
    #[serde(with = "crate::serde_big")]
    pub w_bound: BigInt,
    /// Bound obtained from an integer relation instead of Lemma 1.
    pub via_relation: bool,
}

/// Runs the reduction, falling back to the relation bound when degenerate.
pub fn settle(label: String, inst: &ReductionInstance, ctx: &ReductionContext) -> Result<InstanceBound> {
    let res = dp_reduce(inst, ctx)?;
    let (w_bound, via_relation) = match &res {
        ReductionResult::Reduced { w_bound, .. } => (w_bound.clone(), false),
        ReductionResult::Degenerate { relation, .. } => (relation_bound(inst, relation, ctx)?, true),
    };
    Ok(InstanceBound {
        label,
        result: res.summary(),
        w_bound,
        via_relation,
    })
}

pub(crate) fn to_u64(x: &BigInt, what: &str) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| Error::CertificationFailed(format!("{what} bound {x} does not fit in 64 bits")))
}

fn ten() -> LazyReal {
    LazyReal::rational(10, 1)
}

/// Γ₁ for one digit `a`: bound on `d1 − d2` (as `w`, base 10).
pub fn reduce_gamma1(k: u32, a: u8, m: &BigInt, ctx: &ReductionContext) -> Result<InstanceBound> {
    let inst = ReductionInstance::new(tau_real(k), mu_gamma1(k, a), over_ln10(174), ten(), m.clone())?;
    settle(format!("gamma1(k={k},a={a})"), &inst, ctx)
}

/// `d1 − d2 ≤ G` over all `a`; the derivation assumes `d1 − d2 > 3`, so
/// `G ≥ 3`.
pub fn gamma1_gap_bound(k: u32, m: &BigInt, ctx: &ReductionContext) -> Result<(u64, Vec<InstanceBound>)> {
    let all = (1..=9u8)
        .into_par_iter()
        .map(|a| reduce_gamma1(k, a, m, ctx))
        .collect::<Result<Vec<_>>>()?;
    let w = all.iter().map(|b| b.w_bound.clone()).max().expect("nine instances");
    let g = to_u64(&w, "d1-d2")?.saturating_sub(1).max(3);
    Ok((g, all))
}

/// The extreme instances of a sweep of reductions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub instances: usize,
    /// Largest `w_bound`. For Γ₂ `n − 1 < w_max`, so the search runs to
    /// `n ≤ w_max`.
    pub w_max: u64,
    pub worst: Option<InstanceBound>,
    pub smallest_epsilon: Option<InstanceBound>,
    pub via_relation: Vec<InstanceBound>,
}

fn eps_value(b: &InstanceBound) -> Option<f64> {
    b.result.epsilon_lower.as_ref().and_then(|s| s.parse().ok())
}

pub(crate) fn summarize(all: Vec<InstanceBound>) -> Result<SweepSummary> {
    let worst = all.iter().max_by(|x, y| x.w_bound.cmp(&y.w_bound)).cloned();
    let w_max = match &worst {
        Some(b) => to_u64(&b.w_bound, "w")?,
        None => 0,
    };
    let smallest_epsilon = all
        .iter()
        .filter(|b| eps_value(b).is_some())
        .min_by(|x, y| eps_value(x).partial_cmp(&eps_value(y)).expect("finite epsilon"))
        .cloned();
    let via_relation = all.iter().filter(|b| b.via_relation).cloned().collect();
    Ok(SweepSummary {
        instances: all.len(),
        w_max,
        worst,
        smallest_epsilon,
        via_relation,
    })
}

/// Γ₂ over `d1 − d2 ∈ [1, dgap_max]`, `a ∈ [1, 9]`, `b ∈ [0, 9]`: the
/// largest bound on `n − 1`.
pub fn reduce_gamma2(k: u32, dgap_max: u64, m: &BigInt, ctx: &ReductionContext) -> Result<SweepSummary> {
    let alpha = alpha_real(k);
    let mut jobs = Vec::new();
    for g in 1..=dgap_max as u32 {
        for a in 1..=9u8 {
            for b in 0..=9u8 {
                jobs.push((g, a, b));
            }
        }
    }
    let all = jobs
        .into_par_iter()
        .map(|(g, a, b)| {
            let inst = ReductionInstance::new(tau_real(k), mu_gamma2(k, g, a, b), over_ln10(5), alpha.clone(), m.clone())?;
            settle(format!("gamma2(k={k},g={g},a={a},b={b})"), &inst, ctx)
        })
        .collect::<Result<Vec<_>>>()?;
    summarize(all)
}

/// `L_n = b·10^d2`: bound on `n − 1` over `b ∈ [1, 9]` with
/// `M = bound_n_a0(k)`.
pub fn reduce_a0(k: u32, ctx: &ReductionContext) -> Result<SweepSummary> {
    let m = bound_n_a0(&BigInt::from(k))?;
    let alpha = alpha_real(k);
    let all = (1..=9u8)
        .into_par_iter()
        .map(|b| {
            let inst = ReductionInstance::new(tau_real(k), mu_a0(k, b), over_ln10(5), alpha.clone(), m.clone())?;
            settle(format!("a0(k={k},b={b})"), &inst, ctx)
        })
        .collect::<Result<Vec<_>>>()?;
    summarize(all)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "reason")]
pub enum KStatus {
    /// Every index below the certified bound was searched.
    Complete,
    /// Bounds were certified but the search budget stopped short of them.
    BoundOnly,
    Failed(String),
}

/// One step of the per-k audit trail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseStep {
    pub case: String,
    pub inputs: String,
    pub outputs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub reduction_ms: u128,
    pub search_ms: u128,
    pub total_ms: u128,
}

/// Everything established for one `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KReport {
    pub k: u32,
    pub status: KStatus,
    pub chain: BoundChain,
    pub case_trace: Vec<CaseStep>,
    /// Inclusive `(n_min, n_max)` that must be searched.
    pub search_window: (u64, u64),
    pub searched_to: u64,
    pub gamma1: Vec<InstanceBound>,
    pub gamma2: SweepSummary,
    pub a0: SweepSummary,
    pub solutions: Vec<SolutionRecord>,
    pub solution_checks: Vec<SolutionCheck>,
    pub timings: Timings,
}

impl KReport {
    fn failed(k: u32, reason: String, trace: Vec<CaseStep>, chain: BoundChain) -> Self {
        KReport {
            k,
            status: KStatus::Failed(reason),
            chain,
            case_trace: trace,
            search_window: (0, 0),
            searched_to: 0,
            gamma1: Vec::new(),
            gamma2: SweepSummary::default(),
            a0: SweepSummary::default(),
            solutions: Vec::new(),
            solution_checks: Vec::new(),
            timings: Timings::default(),
        }
    }
}

/// Case split, bounds, reductions and searches for one `k`.
pub fn analyze_k(k: u32, budget: u64, ctx: &ReductionContext) -> KReport {
    let t0 = Instant::now();
    let mut trace = Vec::new();
    let mut chain = BoundChain::for_k(Some(k));
    match analyze_inner(k, budget, ctx, &mut trace, &mut chain, t0) {
        Ok(r) => r,
        Err(e) => KReport::failed(k, e.to_string(), trace, chain),
    }
}

fn analyze_inner(
    k: u32,
    budget: u64,
    ctx: &ReductionContext,
    trace: &mut Vec<CaseStep>,
    chain: &mut BoundChain,
    t0: Instant,
) -> Result<KReport> {
    let small = case_small_n(k)?;
    trace.push(CaseStep {
        case: "small_n".into(),
        inputs: format!("2 <= n <= {}", k.min(69)),
        outputs: format!("{} almost repdigits of the form 3*2^(n-2)", small.len()),
    });

    *chain = initial_chain(k)?;
    let m = chain.n_bound.clone().expect("initial chain sets n");

    let (g, gamma1) = gamma1_gap_bound(k, &m, ctx)?;
    chain.push("dgap_reduced", "max(3, max_a W(gamma1) - 1)", g, true);
    trace.push(CaseStep {
        case: "gamma1".into(),
        inputs: format!("M = {m}, a in 1..=9"),
        outputs: format!("d1 - d2 <= {g}"),
    });

    let gamma2 = reduce_gamma2(k, g, &m, ctx)?;
    chain.push("n_reduced", "max W(gamma2)", gamma2.w_max, true);
    trace.push(CaseStep {
        case: "gamma2".into(),
        inputs: format!("d1 - d2 in 1..={g}, a in 1..=9, b in 0..=9"),
        outputs: format!("n <= {} ({} instances)", gamma2.w_max, gamma2.instances),
    });

    let a0 = reduce_a0(k, ctx)?;
    chain.push("n_reduced_a0", "max_b W(a=0)", a0.w_max, true);
    trace.push(CaseStep {
        case: "a0_reduction".into(),
        inputs: "b in 1..=9".into(),
        outputs: format!("n <= {}", a0.w_max),
    });
    let reduction_ms = t0.elapsed().as_millis();

    let window_max = gamma2.w_max.max(a0.w_max).max(6);
    chain.n_bound = Some(BigInt::from(window_max));
    chain.dgap_bound = Some(BigInt::from(g));
    let searched_to = window_max.min(budget.max(6));
    let t1 = Instant::now();
    let mut solutions = small;
    solutions.extend(brute_search(k, searched_to)?);
    solutions.sort_by_key(|s| s.n);
    solutions.dedup_by_key(|s| s.n);
    let zeros = case_a0(k, searched_to)?;
    trace.push(CaseStep {
        case: "search".into(),
        inputs: format!("6 <= n <= {searched_to}"),
        outputs: format!(
            "{} almost repdigits, {} of the form b*10^d2",
            solutions.len(),
            zeros.len()
        ),
    });
    let search_ms = t1.elapsed().as_millis();

    let checks = solutions
        .iter()
        .map(|s| check_solution(s, ctx.cf.policy()))
        .collect::<Result<Vec<_>>>()?;
    let mut status = if searched_to >= window_max {
        KStatus::Complete
    } else {
        KStatus::BoundOnly
    };
    if let Some(bad) = solutions.iter().zip(&checks).find(|(_, c)| !c.all_ok()) {
        status = KStatus::Failed(format!("solution n={} failed re-validation", bad.0.n));
    }
    if let Some(s) = solutions.iter().find(|s| s.n > window_max) {
        status = KStatus::Failed(format!("solution n={} exceeds certified bound {window_max}", s.n));
    }
    if !zeros.is_empty() {
        status = KStatus::Failed(format!("unexpected b*10^d2 value at n={}", zeros[0].n));
    }

    Ok(KReport {
        k,
        status,
        chain: chain.clone(),
        case_trace: std::mem::take(trace),
        search_window: (6, window_max),
        searched_to,
        gamma1,
        gamma2,
        a0,
        solutions,
        solution_checks: checks,
        timings: Timings {
            reduction_ms,
            search_ms,
            total_ms: t0.elapsed().as_millis(),
        },
    })
}
