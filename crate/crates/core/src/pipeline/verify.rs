use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::per_k::{analyze_k, KReport, KStatus};
use super::search::SolutionRecord;
use crate::error::{Error, Result};
use crate::reduction::ReductionContext;

/// `(k, n, L_n)` for every almost repdigit with at least three digits.
pub const EXPECTED: [(u32, u64, u64); 6] = [
    (2, 11, 199),
    (2, 12, 322),
    (3, 8, 118),
    (3, 10, 399),
    (7, 10, 755),
    (9, 10, 766),
];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub k_min: u32,
    pub k_max: u32,
    /// Largest `n` searched per `k`.
    pub budget: u64,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    pub context: ReductionContext,
}

impl VerifyConfig {
    pub fn new(k_min: u32, k_max: u32, budget: u64) -> Self {
        VerifyConfig {
            k_min,
            k_max,
            budget,
            jobs: None,
            context: ReductionContext::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Overall {
    Verified,
    Mismatch,
    BoundOnly,
    Failed,
    Interrupted,
}

impl Overall {
    pub fn exit_code(self) -> i32 {
        match self {
            Overall::Verified => 0,
            Overall::Mismatch | Overall::BoundOnly | Overall::Interrupted => 1,
            Overall::Failed => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub k_min: u32,
    pub k_max: u32,
    pub budget: u64,
    pub overall: Overall,
    pub solutions: Vec<SolutionRecord>,
    /// Expected `(k, n, value)` triples in range that were not found.
    pub missing: Vec<(u32, u64, u64)>,
    pub unexpected: Vec<SolutionRecord>,
    pub reports: Vec<KReport>,
    pub elapsed_ms: u128,
}

impl TheoremReport {
    pub fn solution_triples(&self) -> Vec<(u32, u64, String)> {
        self.solutions.iter().map(|s| (s.k, s.n, s.value.to_string())).collect()
    }
}

/// Runs [`analyze_k`] for every `k` in range and compares the union of the
/// solutions with [`EXPECTED`].
///
/// Orders not started before `cancel` is raised are skipped and the report
/// is marked interrupted. `progress` sees each finished order.
pub fn verify_theorem(cfg: &VerifyConfig, cancel: &AtomicBool, progress: &(dyn Fn(&KReport) + Sync)) -> Result<TheoremReport> {
    if cfg.k_min < 2 || cfg.k_min > cfg.k_max {
        return Err(Error::InvalidInput(format!(
            "need 2 <= k_min <= k_max, got {}..={}",
            cfg.k_min, cfg.k_max
        )));
    }
    let t0 = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let mut reports: Vec<KReport> = pool.install(|| {
        (cfg.k_min..=cfg.k_max)
            .into_par_iter()
            .filter_map(|k| {
                if cancel.load(Ordering::Relaxed) {
                    return None;
                }
                let r = analyze_k(k, cfg.budget, &cfg.context);
                progress(&r);
                Some(r)
            })
            .collect()
    });
    reports.sort_by_key(|r| r.k);
    let interrupted = reports.len() as u64 != (cfg.k_max - cfg.k_min + 1) as u64;

    let solutions: Vec<SolutionRecord> = reports.iter().flat_map(|r| r.solutions.iter().cloned()).collect();
    let done: Vec<u32> = reports.iter().map(|r| r.k).collect();
    let missing = EXPECTED
        .iter()
        .filter(|(k, n, _)| done.contains(k) && !solutions.iter().any(|s| s.key() == (*k, *n)))
        .copied()
        .collect::<Vec<_>>();
    let unexpected = solutions
        .iter()
        .filter(|s| !EXPECTED.iter().any(|(k, n, v)| s.key() == (*k, *n) && s.value == (*v).into()))
        .cloned()
        .collect::<Vec<_>>();

    let overall = if reports.iter().any(|r| matches!(r.status, KStatus::Failed(_))) {
        Overall::Failed
    } else if !missing.is_empty() || !unexpected.is_empty() {
        Overall::Mismatch
    } else if interrupted {
        Overall::Interrupted
    } else if reports.iter().any(|r| r.status == KStatus::BoundOnly) {
        Overall::BoundOnly
    } else {
        Overall::Verified
    };
    Ok(TheoremReport {
        k_min: cfg.k_min,
        k_max: cfg.k_max,
        budget: cfg.budget,
        overall,
        solutions,
        missing,
        unexpected,
        reports,
        elapsed_ms: t0.elapsed().as_millis(),
    })
}
