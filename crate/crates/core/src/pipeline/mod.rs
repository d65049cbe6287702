//! The proof, one order at a time, plus the chain for large orders.

pub mod large_k;
pub mod per_k;
pub mod reals;
pub mod search;
mod verify;

pub use large_k::{large_k_analysis, LargeKReport};
pub use per_k::{analyze_k, reduce_a0, reduce_gamma1, reduce_gamma2, InstanceBound, KReport, KStatus, SweepSummary};
pub use search::{brute_search, case_a0, case_small_n, check_solution, SolutionCheck, SolutionRecord};
pub use verify::{verify_theorem, Overall, TheoremReport, VerifyConfig, EXPECTED};
