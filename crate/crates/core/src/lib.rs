//! Certified search for almost-repdigits among k-generalized Lucas numbers.

pub mod algebraic;
pub mod arith;
pub mod contfrac;
pub mod digits;
pub mod error;
pub mod pipeline;
pub mod reduction;
pub mod sequences;
pub(crate) mod serde_big;

pub use algebraic::{dominant_root, fk_at_alpha, BoundChain, DominantRoot};
pub use arith::{Ball, BallOrdering, Dyadic, Precision, PrecisionPolicy};
pub use digits::{decompose, eval_form, is_almost_repdigit, AlmostRepdigitForm};
pub use error::{Error, Result};
pub use pipeline::{analyze_k, large_k_analysis, verify_theorem, KReport, KStatus, LargeKReport, SolutionRecord, TheoremReport};
pub use sequences::{lucas_stream, lucas_term, power_form_term, TermWindow};
