use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision of ball midpoints, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Precision(u64);

impl Precision {
    pub const MIN_BITS: u64 = 64;
    pub const DEFAULT_START: Precision = Precision(256);
    pub const DEFAULT_CAP: Precision = Precision(1 << 20);

    pub fn new(bits: u64) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidPrecision(bits));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// At least `bits`, rounded up to a multiple of 64.
    pub fn at_least(self, bits: u64) -> Precision {
        let b = bits.max(self.0);
        Precision(b.div_ceil(64) * 64)
    }

    pub fn doubled(self) -> Precision {
        Precision(self.0.saturating_mul(2))
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// Where to start and where to give up when escalating precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub start: Precision,
    pub cap: Precision,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start: Precision::DEFAULT_START,
            cap: Precision::DEFAULT_CAP,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start: Precision, cap: Precision) -> Result<Self> {
        if start > cap {
            return Err(Error::InvalidInput(format!(
                "precision start {start} exceeds cap {cap}"
            )));
        }
        Ok(PrecisionPolicy { start, cap })
    }

    /// Same cap, different starting point (never below the current start).
    pub fn starting_at(self, bits: u64) -> Self {
        let start = self.start.at_least(bits).min(self.cap);
        PrecisionPolicy { start, cap: self.cap }
    }

    /// Runs `f` at increasing precision, doubling whenever it fails with an
    /// error that more bits could resolve.
    pub fn run<T>(&self, mut f: impl FnMut(Precision) -> Result<T>) -> Result<T> {
        let mut prec = self.start;
        loop {
            match f(prec) {
                Err(e) if e.needs_precision() => {
                    if prec >= self.cap {
                        return Err(Error::PrecisionCeiling { bits: prec.bits() });
                    }
                    prec = prec.doubled().min(self.cap);
                }
                other => return other,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_precision() {
        assert!(Precision::new(63).is_err());
        assert_eq!(Precision::new(64).unwrap().bits(), 64);
    }

    #[test]
    fn escalation_doubles_until_success() {
        let policy = PrecisionPolicy::default();
        let mut seen = Vec::new();
        let out = policy
            .run(|p| {
                seen.push(p.bits());
                if p.bits() < 2048 {
                    Err(Error::Undecidable("test".into()))
                } else {
                    Ok(p.bits())
                }
            })
            .unwrap();
        assert_eq!(out, 2048);
        assert_eq!(seen, vec![256, 512, 1024, 2048]);
    }

    #[test]
    fn escalation_stops_at_cap() {
        let policy = PrecisionPolicy::new(Precision::new(256).unwrap(), Precision::new(1024).unwrap()).unwrap();
        let err = policy
            .run::<()>(|_| Err(Error::Undecidable("never".into())))
            .unwrap_err();
        assert!(matches!(err, Error::PrecisionCeiling { bits: 1024 }));
    }

    #[test]
    fn hard_errors_are_not_retried() {
        let mut calls = 0;
        let err = PrecisionPolicy::default()
            .run::<()>(|_| {
                calls += 1;
                Err(Error::ZeroDenominator)
            })
            .unwrap_err();
        assert!(matches!(err, Error::ZeroDenominator));
        assert_eq!(calls, 1);
    }
}
