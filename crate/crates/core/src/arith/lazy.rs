use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use super::{Ball, Precision};
use crate::error::Result;

type EvalFn = dyn Fn(Precision) -> Result<Ball> + Send + Sync;

/// A named real that can be re-evaluated at any precision.
///
/// The id must determine the value: expansion caches are keyed by it.
#[derive(Clone)]
pub struct LazyReal {
    id: Arc<str>,
    eval: Arc<EvalFn>,
}

impl LazyReal {
    pub fn new(id: impl Into<String>, f: impl Fn(Precision) -> Result<Ball> + Send + Sync + 'static) -> Self {
        LazyReal {
            id: Arc::from(id.into()),
            eval: Arc::new(f),
        }
    }

    /// Like [`LazyReal::new`] but remembers each precision's result.
    pub fn memoized(id: impl Into<String>, f: impl Fn(Precision) -> Result<Ball> + Send + Sync + 'static) -> Self {
        let memo: Mutex<HashMap<u64, Ball>> = Mutex::new(HashMap::new());
        LazyReal::new(id, move |p| {
            if let Some(b) = memo.lock().expect("memo poisoned").get(&p.bits()) {
                return Ok(b.clone());
            }
            let b = f(p)?;
            memo.lock().expect("memo poisoned").insert(p.bits(), b.clone());
            Ok(b)
        })
    }

    /// The exact rational `p/q`.
    pub fn rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        let (p, q) = (p.into(), q.into());
        LazyReal::new(format!("{p}/{q}"), move |prec| Ball::from_rational(&p, &q, prec))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, prec: Precision) -> Result<Ball> {
        (self.eval)(prec)
    }
}

impl fmt::Debug for LazyReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("LazyReal").field(&self.id).finish()
    }
}
