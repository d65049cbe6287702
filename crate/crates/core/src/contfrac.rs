//! Certified continued-fraction expansions.
//!
//! A quotient is accepted only when both endpoints of the enclosing ball
//! produce it; the set of reals sharing a quotient prefix is an interval, so
//! every value in the ball then shares the prefix.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{Ball, Dyadic, LazyReal, Precision, PrecisionPolicy};
use crate::error::{Error, Result};

/// `p_i/q_i`, the convergent built from `a_0, …, a_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub index: usize,
    #[serde(with = "crate::serde_big")]
    pub p: BigInt,
    #[serde(with = "crate::serde_big")]
    pub q: BigInt,
}

/// Certified partial quotients `a_0, a_1, …` of a real.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    value_id: String,
    quotients: Vec<BigInt>,
    certified_count: usize,
    precision_bits: u64,
    terminated: bool,
    convergents: Vec<Convergent>,
}

impl CfExpansion {
    fn from_quotients(value_id: &str, quotients: Vec<BigInt>, precision_bits: u64, terminated: bool) -> Self {
        let convergents = convergents_of(&quotients);
        CfExpansion {
            value_id: value_id.to_string(),
            certified_count: quotients.len(),
            quotients,
            precision_bits,
            terminated,
            convergents,
        }
    }

    pub fn value_id(&self) -> &str {
        &self.value_id
    }

    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    pub fn certified_count(&self) -> usize {
        self.certified_count
    }

    pub fn precision_bits(&self) -> u64 {
        self.precision_bits
    }

    /// The expanded value was rational and the expansion is complete.
    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn convergents(&self) -> &[Convergent] {
        &self.convergents
    }

    pub fn convergent(&self, i: usize) -> Result<&Convergent> {
        self.convergents.get(i).ok_or_else(|| self.too_short(i + 1))
    }

    /// Least-index convergent with `q > bound`, if the certified prefix
    /// reaches it.
    pub fn first_q_exceeding(&self, bound: &BigInt) -> Option<&Convergent> {
        self.convergents.iter().find(|c| &c.q > bound)
    }

    /// `max(a_1, …, a_{index_limit−1})`.
    pub fn max_partial_quotient(&self, index_limit: usize) -> Result<BigInt> {
        if index_limit > self.certified_count {
            return Err(self.too_short(index_limit));
        }
        Ok(self.quotients[1.min(index_limit)..index_limit]
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(BigInt::zero))
    }

    fn too_short(&self, wanted: usize) -> Error {
        Error::ExpansionTooShort {
            value_id: self.value_id.clone(),
            certified: self.certified_count,
            wanted,
        }
    }

    /// Whether this expansion already provides `need`.
    fn satisfies(&self, need: &Need) -> bool {
        match need {
            Need::Quotients(n) => self.certified_count >= *n || self.terminated,
            Need::Beyond { bound, extra } => self
                .convergents
                .iter()
                .position(|c| &c.q > bound)
                .is_some_and(|i| i + extra < self.certified_count),
        }
    }
}

/// Standard recurrence `p_i = a_i p_{i−1} + p_{i−2}`.
fn convergents_of(quotients: &[BigInt]) -> Vec<Convergent> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(quotients.len());
    for (i, a) in quotients.iter().enumerate() {
        let p = a * &p0 + &p1;
        let q = a * &q0 + &q1;
        p1 = std::mem::replace(&mut p0, p.clone());
        q1 = std::mem::replace(&mut q0, q.clone());
        out.push(Convergent { index: i, p, q });
    }
    out
}

/// `p_i q_{i−1} − p_{i−1} q_i = (−1)^(i−1)` for all `i ≥ 1`.
pub fn determinant_identity_holds(convergents: &[Convergent]) -> bool {
    convergents.windows(2).all(|w| {
        let det = &w[1].p * &w[0].q - &w[0].p * &w[1].q;
        let want = if w[1].index % 2 == 1 { 1 } else { -1 };
        det == BigInt::from(want)
    })
}

fn dyadic_to_ratio(d: &Dyadic) -> (BigInt, BigInt) {
    let e = d.exponent();
    if e >= 0 {
        (d.mantissa() << (e as usize), BigInt::one())
    } else {
        (d.mantissa().clone(), BigInt::one() << ((-e) as usize))
    }
}

/// Runs Euclid on both endpoints of `[lo, hi]` while their quotients agree.
/// Returns the common quotients and whether the expansion ended exactly.
fn expand_interval(lo: (BigInt, BigInt), hi: (BigInt, BigInt), max: usize) -> (Vec<BigInt>, bool) {
    let (mut lo, mut hi) = (lo, hi);
    let mut out = Vec::new();
    while out.len() < max {
        let a_lo = lo.0.div_floor(&lo.1);
        let a_hi = hi.0.div_floor(&hi.1);
        if a_lo != a_hi {
            return (out, false);
        }
        let r_lo = &lo.0 - &a_lo * &lo.1;
        let r_hi = &hi.0 - &a_hi * &hi.1;
        out.push(a_lo);
        match (r_lo.is_zero(), r_hi.is_zero()) {
            (true, true) => return (out, true),
            (false, false) => {}
            // one endpoint is rational here; the next quotient is unbounded
            _ => return (out, false),
        }
        // 1/(x − a) reverses the order of the endpoints
        let next_lo = (hi.1, r_hi);
        let next_hi = (lo.1, r_lo);
        lo = next_lo;
        hi = next_hi;
    }
    (out, false)
}

/// Every quotient certifiable from a single ball (up to `max`).
pub fn expand_ball(x: &Ball, value_id: &str, max: usize) -> CfExpansion {
    let (qs, done) = expand_interval(dyadic_to_ratio(&x.lower()), dyadic_to_ratio(&x.upper()), max);
    CfExpansion::from_quotients(value_id, qs, x.precision().bits(), done)
}

/// What a caller needs from an expansion.
#[derive(Clone, Debug)]
enum Need {
    Quotients(usize),
    /// The first convergent with `q > bound` plus `extra` further quotients.
    Beyond { bound: BigInt, extra: usize },
}

impl Need {
    /// Rough precision at which the need becomes reachable: about 3.5 bits
    /// per quotient, or twice the bits of the denominator bound.
    fn precision_hint(&self) -> u64 {
        match self {
            Need::Quotients(n) => 4 * *n as u64 + 64,
            Need::Beyond { bound, extra } => 2 * bound.bits() + 16 * *extra as u64 + 128,
        }
    }
}

type MemCache = RwLock<HashMap<String, Arc<CfExpansion>>>;

static MEMORY: OnceLock<MemCache> = OnceLock::new();

fn memory() -> &'static MemCache {
    MEMORY.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Produces certified expansions, reusing in-process and on-disk results.
#[derive(Clone, Debug, Default)]
pub struct CfSource {
    policy: PrecisionPolicy,
    disk: Option<CfCache>,
}

impl CfSource {
    pub fn new(policy: PrecisionPolicy, disk: Option<CfCache>) -> Self {
        CfSource { policy, disk }
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    pub fn disk(&self) -> Option<&CfCache> {
        self.disk.as_ref()
    }

    fn obtain(&self, x: &LazyReal, need: Need) -> Result<Arc<CfExpansion>> {
        if let Some(cf) = memory().read().expect("expansion cache poisoned").get(x.id()) {
            if cf.satisfies(&need) {
                return Ok(cf.clone());
            }
        }
        if let Some(disk) = &self.disk {
            if let Ok(Some(cf)) = disk.load(x) {
                let ok = cf.satisfies(&need);
                let cf = self.remember(cf);
                if ok {
                    return Ok(cf);
                }
            }
        }
        let policy = self.policy.starting_at(need.precision_hint());
        let cf = policy.run(|prec| {
            let ball = x.eval(prec)?;
            let cf = expand_ball(&ball, x.id(), usize::MAX);
            if cf.satisfies(&need) {
                Ok(cf)
            } else {
                let wanted = match &need {
                    Need::Quotients(n) => *n,
                    Need::Beyond { extra, .. } => cf.certified_count + extra + 1,
                };
                Err(cf.too_short(wanted))
            }
        })?;
        if let Some(disk) = &self.disk {
            // a failed cache write only costs a recomputation later
            let _ = disk.store(&cf);
        }
        Ok(self.remember(cf))
    }

    fn remember(&self, cf: CfExpansion) -> Arc<CfExpansion> {
        let mut mem = memory().write().expect("expansion cache poisoned");
        let keep_old = mem
            .get(cf.value_id())
            .is_some_and(|old| old.certified_count >= cf.certified_count);
        if keep_old {
            return mem[cf.value_id()].clone();
        }
        let cf = Arc::new(cf);
        mem.insert(cf.value_id().to_string(), cf.clone());
        cf
    }

    /// At least `want` certified quotients of `x`.
    pub fn expand(&self, x: &LazyReal, want: usize) -> Result<Arc<CfExpansion>> {
        self.obtain(x, Need::Quotients(want))
    }

    /// An expansion reaching the first convergent with `q > bound`, plus
    /// `extra` quotients after it.
    pub fn expand_beyond(&self, x: &LazyReal, bound: &BigInt, extra: usize) -> Result<Arc<CfExpansion>> {
        self.obtain(
            x,
            Need::Beyond {
                bound: bound.clone(),
                extra,
            },
        )
    }

    pub fn first_q_exceeding(&self, x: &LazyReal, bound: &BigInt) -> Result<Convergent> {
        if !bound.is_positive() {
            return Err(Error::InvalidInput("denominator bound must be at least 1".into()));
        }
        let cf = self.expand_beyond(x, bound, 0)?;
        Ok(cf.first_q_exceeding(bound).expect("expansion reaches the bound").clone())
    }

    pub fn max_partial_quotient(&self, x: &LazyReal, index_limit: usize) -> Result<BigInt> {
        self.expand(x, index_limit)?.max_partial_quotient(index_limit)
    }
}

/// At least `want` certified quotients, escalating precision per `policy`.
pub fn expand(x: &LazyReal, want: usize, policy: &PrecisionPolicy) -> Result<CfExpansion> {
    let src = CfSource::new(*policy, None);
    Ok((*src.expand(x, want)?).clone())
}

pub fn convergent(cf: &CfExpansion, i: usize) -> Result<Convergent> {
    cf.convergent(i).cloned()
}

pub fn first_q_exceeding(x: &LazyReal, bound: &BigInt, policy: &PrecisionPolicy) -> Result<Convergent> {
    CfSource::new(*policy, None).first_q_exceeding(x, bound)
}

pub fn max_partial_quotient(x: &LazyReal, index_limit: usize, policy: &PrecisionPolicy) -> Result<BigInt> {
    CfSource::new(*policy, None).max_partial_quotient(x, index_limit)
}

/// `|x − p_i/q_i| < 1/(q_i q_{i+1})` for every convergent that has a
/// successor, checked against the ball `x`. The last pairs are only
/// decidable when `x` is tighter than the ball the expansion came from.
pub fn best_approximation_holds(cf: &CfExpansion, x: &Ball) -> bool {
    let p = x.precision();
    cf.convergents().windows(2).all(|w| {
        let Ok(approx) = Ball::from_rational(&w[0].p, &w[0].q, p) else {
            return false;
        };
        let Ok(bound) = Ball::from_rational(&BigInt::one(), &(&w[0].q * &w[1].q), p) else {
            return false;
        };
        (x - &approx).abs().compare(&bound) == crate::arith::BallOrdering::Less
    })
}

/// The best-approximation inequality for `i ≤ n − 2`, in exact arithmetic,
/// at both ends of the interval of reals whose expansion starts with the
/// `n + 1` stored quotients. Needs no enclosure of the value itself.
pub fn best_approximation_on_prefix(cf: &CfExpansion) -> bool {
    let c = cf.convergents();
    let Some(last) = c.last() else {
        return true;
    };
    let (pp, qp) = match c.len() {
        1 => (BigInt::one(), BigInt::zero()),
        n => (c[n - 2].p.clone(), c[n - 2].q.clone()),
    };
    let ends = [(last.p.clone(), last.q.clone()), (&last.p + pp, &last.q + qp)];
    c.windows(2).take(c.len().saturating_sub(2)).all(|w| {
        // |P/Q − p/q| < 1/(q·q') ⇔ |P·q − p·Q|·q' < Q
        ends.iter()
            .all(|(pe, qe)| (pe * &w[0].q - &w[0].p * qe).abs() * &w[1].q < *qe)
    })
}

/// On-disk store of expansions, one file per value id.
///
/// Format: a header line `value_id, precision_bits, certified_count`, then
/// one decimal quotient per line. Files are written to a temporary name and
/// renamed into place.
#[derive(Clone, Debug)]
pub struct CfCache {
    dir: PathBuf,
}

impl CfCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(CfCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, value_id: &str) -> PathBuf {
        let name: String = value_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        // distinct ids may sanitize alike; the header id disambiguates on load
        let hash = value_id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
        });
        self.dir.join(format!("{name}-{hash:016x}.cf"))
    }

    pub fn store(&self, cf: &CfExpansion) -> Result<()> {
        let path = self.path_for(cf.value_id());
        let mut body = format!("{}, {}, {}\n", cf.value_id(), cf.precision_bits(), cf.certified_count());
        for a in cf.quotients() {
            body.push_str(&a.to_string());
            body.push('\n');
        }
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(body.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Every entry in the directory, parsed but not re-certified.
    pub fn entries(&self) -> Result<Vec<CfExpansion>> {
        let mut out = Vec::new();
        for e in fs::read_dir(&self.dir)? {
            let path = e?.path();
            if path.extension().is_some_and(|x| x == "cf") {
                out.push(parse_cache_file(&fs::read_to_string(&path)?)?);
            }
        }
        out.sort_by(|a, b| a.value_id.cmp(&b.value_id));
        Ok(out)
    }

    /// Reads and re-certifies the cached expansion of `x`. `Ok(None)` when
    /// there is no entry.
    pub fn load(&self, x: &LazyReal) -> Result<Option<CfExpansion>> {
        let path = self.path_for(x.id());
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let cf = parse_cache_file(&text)?;
        if cf.value_id() != x.id() {
            return Ok(None);
        }
        recertify(&cf, x)?;
        Ok(Some(cf))
    }
}

fn parse_cache_file(text: &str) -> Result<CfExpansion> {
    let corrupt = |m: &str| Error::CacheCorrupt(m.to_string());
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| corrupt("empty file"))?;
    let mut parts = header.rsplitn(3, ", ");
    let count: usize = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| corrupt("bad certified_count"))?;
    let bits: u64 = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| corrupt("bad precision_bits"))?;
    let id = parts.next().ok_or_else(|| corrupt("missing value_id"))?;
    let quotients = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<BigInt>().map_err(|_| corrupt("bad quotient")))
        .collect::<Result<Vec<_>>>()?;
    if quotients.len() != count {
        return Err(corrupt("quotient count does not match header"));
    }
    if quotients.iter().skip(1).any(|a| !a.is_positive()) {
        return Err(corrupt("non-positive partial quotient"));
    }
    Ok(CfExpansion::from_quotients(id, quotients, bits, false))
}

/// Re-expands a fresh enclosure at the stored precision; the cached
/// quotients must all reappear.
fn recertify(cf: &CfExpansion, x: &LazyReal) -> Result<()> {
    if !determinant_identity_holds(cf.convergents()) {
        return Err(Error::CacheCorrupt(format!("{}: determinant identity fails", cf.value_id())));
    }
    let prec = Precision::new(cf.precision_bits().max(Precision::MIN_BITS))?;
    let fresh = expand_ball(&x.eval(prec)?, x.id(), cf.certified_count());
    if fresh.quotients() != cf.quotients() {
        return Err(Error::CacheCorrupt(format!(
            "{}: cached prefix not certified by a fresh enclosure",
            cf.value_id()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u64) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn golden() -> LazyReal {
        LazyReal::new("golden", |prec| {
            let five = Ball::from_int(5, prec.at_least(prec.bits() + 16));
            Ok((&five.sqrt()? + &Ball::from_int(1, five.precision())).mul_pow2(-1))
        })
    }

    #[test]
    fn golden_ratio_is_all_ones() {
        let cf = expand(&golden(), 10, &PrecisionPolicy::default()).unwrap();
        assert!(cf.quotients()[..10].iter().all(|a| a.is_one()));
        let c = convergent(&cf, 5).unwrap();
        assert_eq!((c.p, c.q), (BigInt::from(13), BigInt::from(8)));
        assert_eq!(cf.max_partial_quotient(50).unwrap(), BigInt::one());
    }

    #[test]
    fn golden_first_q_over_100() {
        let c = first_q_exceeding(&golden(), &BigInt::from(100), &PrecisionPolicy::default()).unwrap();
        assert_eq!(c.q, BigInt::from(144));
        assert_eq!(c.index, 11);
    }

    #[test]
    fn rational_input_reproduces_euclid() {
        let b = Ball::from_rational(&BigInt::from(415), &BigInt::from(128), p(64)).unwrap();
        assert!(b.is_exact());
        let cf = expand_ball(&b, "415/128", 100);
        let qs: Vec<i64> = cf.quotients().iter().map(|a| a.try_into().unwrap()).collect();
        assert_eq!(qs, vec![3, 4, 7, 1, 3]);
        assert!(cf.is_terminated());
    }

    #[test]
    fn too_short_is_reported() {
        let b = golden().eval(p(64)).unwrap();
        let cf = expand_ball(&b, "golden", usize::MAX);
        assert!(cf.certified_count() < 100);
        assert!(matches!(cf.convergent(200), Err(Error::ExpansionTooShort { .. })));
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CfCache::new(dir.path()).unwrap();
        let x = golden();
        let cf = expand(&x, 40, &PrecisionPolicy::default()).unwrap();
        cache.store(&cf).unwrap();
        let back = cache.load(&x).unwrap().unwrap();
        assert_eq!(back.quotients(), cf.quotients());
        // flip one quotient: the fresh enclosure no longer fits the cylinder
        let path = cache.path_for(x.id());
        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        lines[10] = "2".to_string();
        fs::write(&path, lines.join("\n")).unwrap();
        assert!(matches!(cache.load(&x), Err(Error::CacheCorrupt(_))));
    }
}
