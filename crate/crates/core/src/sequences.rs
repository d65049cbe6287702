//! Exact k-generalized Lucas numbers.
//!
//! `L_n = L_{n−1} + ⋯ + L_{n−k}` with `L_{2−k} = ⋯ = L_{−1} = 0`, `L_0 = 2`
//! and `L_1 = 1`.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Order of the recurrence, validated to be at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SequenceParams {
    k: u32,
}

impl SequenceParams {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidOrder(k as u64));
        }
        Ok(SequenceParams { k })
    }

    pub fn k(self) -> u32 {
        self.k
    }

    /// Smallest index at which the sequence is defined.
    pub fn first_index(self) -> i64 {
        2 - self.k as i64
    }
}

/// `k` consecutive terms `L_s, …, L_{s+k−1}` together with their sum, so
/// each step costs two big-integer additions regardless of `k`.
#[derive(Clone, Debug)]
pub struct TermWindow {
    k: u32,
    start_index: i64,
    values: VecDeque<BigInt>,
    sum: BigInt,
}

impl TermWindow {
    /// The window of initial values `L_{2−k}, …, L_1`.
    pub fn initial(params: SequenceParams) -> Self {
        let k = params.k() as usize;
        let mut values: VecDeque<BigInt> = std::iter::repeat_with(BigInt::zero).take(k - 2).collect();
        values.push_back(BigInt::from(2));
        values.push_back(BigInt::one());
        TermWindow {
            k: params.k(),
            start_index: params.first_index(),
            values,
            sum: BigInt::from(3),
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    /// Index of the newest term.
    pub fn last_index(&self) -> i64 {
        self.start_index + self.k as i64 - 1
    }

    pub fn last(&self) -> &BigInt {
        self.values.back().expect("window is never empty")
    }

    /// Sum of the window, which is the next term.
    pub fn sum(&self) -> &BigInt {
        &self.sum
    }

    pub fn values(&self) -> impl Iterator<Item = &BigInt> {
        self.values.iter()
    }

    /// `L_n` if `n` is inside the window.
    pub fn get(&self, n: i64) -> Option<&BigInt> {
        let off = n - self.start_index;
        if off < 0 {
            return None;
        }
        self.values.get(off as usize)
    }

    /// Slides one step forward and returns the new last term.
    pub fn advance(&mut self) -> &BigInt {
        let next = self.sum.clone();
        let evicted = self.values.pop_front().expect("window is never empty");
        self.sum = &next + &next - evicted;
        self.values.push_back(next);
        self.start_index += 1;
        self.last()
    }

    /// Advances until the newest term has index `n` (no-op if already past).
    pub fn advance_to(&mut self, n: i64) {
        while self.last_index() < n {
            self.advance();
        }
    }
}

/// Iterator over `(n, L_n)` for `n = 1, 2, …`.
#[derive(Clone, Debug)]
pub struct LucasIter {
    window: TermWindow,
    started: bool,
}

impl LucasIter {
    pub fn new(params: SequenceParams) -> Self {
        LucasIter {
            window: TermWindow::initial(params),
            started: false,
        }
    }
}

impl Iterator for LucasIter {
    type Item = (u64, BigInt);

    fn next(&mut self) -> Option<Self::Item> {
        if self.started {
            self.window.advance();
        }
        self.started = true;
        Some((self.window.last_index() as u64, self.window.last().clone()))
    }
}

/// `L_n^{(k)}`.
pub fn lucas_term(k: u32, n: i64) -> Result<BigInt> {
    let params = SequenceParams::new(k)?;
    let min = params.first_index();
    if n < min {
        return Err(Error::IndexOutOfRange { n, min });
    }
    let mut w = TermWindow::initial(params);
    if n <= w.last_index() {
        return Ok(w.get(n).expect("index inside the initial window").clone());
    }
    w.advance_to(n);
    Ok(w.last().clone())
}

/// `(n, L_n)` for `n` in `1..=n_max`.
pub fn lucas_stream(k: u32, n_max: u64) -> Result<Vec<(u64, BigInt)>> {
    let params = SequenceParams::new(k)?;
    if n_max < 1 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    Ok(LucasIter::new(params).take(n_max as usize).collect())
}

/// `3·2^(n−2)`, the value of `L_n` for `2 ≤ n ≤ k`.
pub fn power_form_term(n: i64) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::IndexOutOfRange { n, min: 2 });
    }
    Ok(BigInt::from(3) << ((n - 2) as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_lucas_numbers() {
        let want = [2, 1, 3, 4, 7, 11, 18, 29, 47, 76, 123, 199, 322];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(lucas_term(2, n as i64).unwrap(), BigInt::from(*w));
        }
    }

    #[test]
    fn spot_values() {
        assert_eq!(lucas_term(5, 0).unwrap(), BigInt::from(2));
        assert_eq!(lucas_term(3, 8).unwrap(), BigInt::from(118));
        assert_eq!(lucas_term(4, 3).unwrap(), BigInt::from(6));
        assert_eq!(lucas_term(6, -4).unwrap(), BigInt::zero());
    }

    #[test]
    fn index_and_order_errors() {
        assert!(matches!(lucas_term(1, 3), Err(Error::InvalidOrder(1))));
        assert!(matches!(lucas_term(4, -3), Err(Error::IndexOutOfRange { n: -3, min: -2 })));
        assert!(lucas_stream(3, 0).is_err());
        assert!(power_form_term(1).is_err());
    }

    #[test]
    fn streams_end_at_theorem_values() {
        let s = lucas_stream(2, 12).unwrap();
        assert_eq!(s[10], (11, BigInt::from(199)));
        assert_eq!(s[11], (12, BigInt::from(322)));
        assert_eq!(lucas_stream(9, 10).unwrap().last().unwrap().1, BigInt::from(766));
        assert_eq!(lucas_stream(7, 10).unwrap().last().unwrap().1, BigInt::from(755));
        assert_eq!(lucas_stream(3, 1).unwrap(), vec![(1, BigInt::one())]);
    }

    #[test]
    fn power_form() {
        assert_eq!(power_form_term(2).unwrap(), BigInt::from(3));
        assert_eq!(power_form_term(4).unwrap(), BigInt::from(12));
        assert_eq!(power_form_term(10).unwrap(), BigInt::from(768));
    }

    #[test]
    fn window_sum_tracks_contents() {
        let mut w = TermWindow::initial(SequenceParams::new(5).unwrap());
        for _ in 0..40 {
            let s: BigInt = w.values().sum();
            assert_eq!(&s, w.sum());
            w.advance();
        }
    }
}
