//! The dominant root α(k), `f_k(α)`, heights, and the explicit bound
//! formulas (Matveev, Guzmán and their instantiations).

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::{Ball, BallOrdering, Dyadic, Precision};
use crate::error::{Error, Result};
use crate::sequences::SequenceParams;

/// Certified enclosure of the real root of `Ψ_k` in `(2(1 − 2^−k), 2)`.
#[derive(Clone, Debug)]
pub struct DominantRoot {
    k: u32,
    alpha: Ball,
}

impl DominantRoot {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn alpha(&self) -> &Ball {
        &self.alpha
    }

    pub fn precision(&self) -> Precision {
        self.alpha.precision()
    }
}

/// `Ψ_k(x) = x^k − x^(k−1) − ⋯ − x − 1`.
pub fn psi_eval(k: u32, x: &Ball) -> Ball {
    let one = Ball::from_int(1, x.precision());
    let xm1 = x - &one;
    let xk = x.powi(k as u64);
    if xm1.is_positive() || xm1.is_negative() {
        // x^k − (x^k − 1)/(x − 1)
        if let Ok(q) = (&xk - &one).div(&xm1) {
            return &xk - &q;
        }
    }
    let mut s = one.clone();
    for _ in 1..k {
        s = &(&s * x) + &one;
    }
    &xk - &s
}

/// `(x − 1)·Ψ_k(x) = x^(k+1) − 2x^k + 1`, convex on `[1, ∞)` with roots 1
/// and α.
fn phi_eval(k: u32, x: &Ball) -> Ball {
    let xk = x.powi(k as u64);
    let one = Ball::from_int(1, x.precision());
    &(&xk * &(x - &Ball::from_int(2, x.precision()))) + &one
}

fn phi_prime(k: u32, x: &Ball) -> Ball {
    let xk1 = x.powi(k as u64 - 1);
    let lin = &x.mul_int(k + 1) - &Ball::from_int(2 * k as u64, x.precision());
    &xk1 * &lin
}

type RootCache = RwLock<HashMap<(u32, u64), Ball>>;

static ROOTS: OnceLock<RootCache> = OnceLock::new();

fn root_cache() -> &'static RootCache {
    ROOTS.get_or_init(|| RwLock::new(HashMap::new()))
}

/// α(k) with radius at most `2^(8 − bits)`, certified by a sign change of
/// `(x − 1)Ψ_k` across the ball.
pub fn dominant_root(k: u32, prec: Precision) -> Result<DominantRoot> {
    SequenceParams::new(k)?;
    let key = (k, prec.bits());
    if let Some(a) = root_cache().read().expect("root cache poisoned").get(&key) {
        return Ok(DominantRoot { k, alpha: a.clone() });
    }
    let alpha = compute_root(k, prec)?;
    // concurrent inserts compute the same certified ball, so last write wins
    root_cache()
        .write()
        .expect("root cache poisoned")
        .insert(key, alpha.clone());
    Ok(DominantRoot { k, alpha })
}

fn compute_root(k: u32, prec: Precision) -> Result<Ball> {
    // α sits about 2^(−k) from either end of its window
    let prec = prec.at_least(k as u64 + 40);
    let bits = prec.bits();
    let work = prec.at_least(bits + 64 + 2 * (64 - (k as u64).leading_zeros() as u64));
    // Newton from 2 decreases monotonically onto α since Φ is convex there
    let mut x = Ball::from_int(2, work);
    let tol = Dyadic::pow2(-(bits as i64) - 8);
    for _ in 0..400 {
        let step = phi_eval(k, &x).div(&phi_prime(k, &x))?;
        let next = Ball::from_dyadic(x.mid().sub(step.mid()), work);
        let moved = next.mid().sub(x.mid()).abs();
        x = next;
        if moved.cmp_value(&tol) != std::cmp::Ordering::Greater {
            break;
        }
    }
    let h = Dyadic::pow2(4 - bits as i64);
    let lo = x.mid().sub(&h);
    let hi = x.mid().add(&h);
    let at = |d: &Dyadic| phi_eval(k, &Ball::from_dyadic(d.clone(), work));
    let two = Dyadic::from_int(2);
    let floor = two.sub(&Dyadic::pow2(1 - k as i64));
    if lo.cmp_value(&floor) != std::cmp::Ordering::Greater || hi.cmp_value(&two) != std::cmp::Ordering::Less {
        return Err(Error::CertificationFailed(format!(
            "root enclosure for k={k} leaves the interval (2(1-2^-k), 2)"
        )));
    }
    if !(at(&lo).is_negative() && at(&hi).is_positive()) {
        return Err(Error::CertificationFailed(format!(
            "no certified sign change around the dominant root for k={k} at {prec}"
        )));
    }
    Ok(Ball::from_bounds(&lo, &hi, prec))
}

/// `f_k(x) = (x − 1)/(2 + (k + 1)(x − 2))` at α, certified in `(1/2, 3/4)`.
pub fn fk_at_alpha(k: u32, root: &DominantRoot) -> Result<Ball> {
    if root.k() != k {
        return Err(Error::InvalidInput(format!("root is for k={}, not k={k}", root.k())));
    }
    let a = root.alpha();
    let p = a.precision();
    let num = a - &Ball::from_int(1, p);
    let den = &Ball::from_int(2, p) + &(a - &Ball::from_int(2, p)).mul_int(k + 1);
    let f = num.div(&den)?;
    let half = Ball::from_rational(&1.into(), &2.into(), p)?;
    let three_q = Ball::from_rational(&3.into(), &4.into(), p)?;
    match (f.compare(&half), f.compare(&three_q)) {
        (BallOrdering::Greater, BallOrdering::Less) => Ok(f),
        (BallOrdering::Undecidable, _) | (_, BallOrdering::Undecidable) => {
            Err(Error::Undecidable(format!("f_k(alpha) window for k={k}")))
        }
        _ => Err(Error::CertificationFailed(format!("f_k(alpha) outside (1/2, 3/4) for k={k}"))),
    }
}

/// `f_k(α)·(2α − 1)`, the coefficient in `L_n ≈ f_k(α)(2α − 1)α^(n−1)`.
pub fn lucas_coefficient(k: u32, root: &DominantRoot) -> Result<Ball> {
    let f = fk_at_alpha(k, root)?;
    let a = root.alpha();
    Ok(&f * &(&a.mul_int(2) - &Ball::from_int(1, a.precision())))
}

/// `h(p/q) = log max(|p|, q)` for `p/q` in lowest terms with `q > 0`.
pub fn height_rational(p: &BigInt, q: &BigInt, prec: Precision) -> Result<Ball> {
    if !q.is_positive() {
        return Err(Error::InvalidInput("height denominator must be positive".into()));
    }
    if !p.gcd(q).is_one() {
        return Err(Error::InvalidInput(format!("{p}/{q} is not in lowest terms")));
    }
    let m = p.abs().max(q.clone());
    Ball::from_int(m, prec).log()
}

/// Natural log of a positive integer.
pub fn log_int(n: &BigInt, prec: Precision) -> Result<Ball> {
    Ball::from_int(n.clone(), prec).log()
}

/// Parameters of Matveev's lower bound for a nonzero
/// `η_1^{b_1}⋯η_t^{b_t} − 1`.
#[derive(Clone, Debug)]
pub struct MatveevInput {
    t: u32,
    d_k: u32,
    b: Ball,
    a: Vec<Ball>,
}

impl MatveevInput {
    pub fn new(d_k: u32, b: Ball, a: Vec<Ball>) -> Result<Self> {
        let p = b.precision();
        if a.is_empty() || d_k == 0 {
            return Err(Error::InvalidInput("Matveev input needs t >= 1 and d_K >= 1".into()));
        }
        if b.compare(&Ball::from_int(1, p)) == BallOrdering::Less {
            return Err(Error::InvalidInput("Matveev B must be at least 1".into()));
        }
        let clamp = Ball::from_decimal("0.16", p)?;
        if a.iter().any(|ai| ai.compare(&clamp) == BallOrdering::Less) {
            return Err(Error::InvalidInput("Matveev A_i must be at least 0.16".into()));
        }
        Ok(MatveevInput {
            t: a.len() as u32,
            d_k,
            b,
            a,
        })
    }

    pub fn t(&self) -> u32 {
        self.t
    }
}

/// `K(t) = −1.4·30^(t+3)·t^4.5`.
pub fn matveev_constant(t: u32, prec: Precision) -> Result<Ball> {
    let c = Ball::from_decimal("1.4", prec)?;
    let p30 = Ball::from_int(num_traits::pow(BigInt::from(30), (t + 3) as usize), prec);
    let tb = Ball::from_int(t, prec);
    let t45 = &tb.powi(4) * &tb.sqrt()?;
    Ok((&(&c * &p30) * &t45).neg())
}

/// `K(t)·d²·(1 + log d)·(1 + log B)·A_1⋯A_t`, a lower bound for `log|Λ|`.
pub fn matveev_bound(inp: &MatveevInput) -> Result<Ball> {
    let p = inp.b.precision();
    let one = Ball::from_int(1, p);
    let d = Ball::from_int(inp.d_k, p);
    let mut acc = matveev_constant(inp.t, p)?;
    acc = &acc * &d.sqr();
    acc = &acc * &(&one + &d.log()?);
    acc = &acc * &(&one + &inp.b.log()?);
    for ai in &inp.a {
        acc = &acc * ai;
    }
    Ok(acc)
}

/// `x/(log x)^m < T ⇒ x < 2^m·T·(log T)^m`, valid for `T > (4m²)^m`.
pub fn guzman_bound(m: u32, t: &Ball) -> Result<Ball> {
    if m == 0 {
        return Err(Error::InvalidInput("Guzman lemma needs m >= 1".into()));
    }
    let p = t.precision();
    let thresh = Ball::from_int(num_traits::pow(BigInt::from(4 * m as u64 * m as u64), m as usize), p);
    if t.compare(&thresh) != BallOrdering::Greater {
        return Err(Error::InvalidInput(format!("Guzman lemma needs T > (4m^2)^m = {}", thresh.to_sci(6))));
    }
    Ok((t * &t.log()?.powi(m as u64)).mul_pow2(m as i64))
}

const BOUND_PREC: u64 = 256;

fn bound_prec() -> Precision {
    Precision::new(BOUND_PREC).expect("constant precision is valid")
}

fn check_k(k: &BigInt) -> Result<()> {
    if *k < BigInt::from(2) {
        return Err(Error::InvalidInput(format!("order must be at least 2, got {k}")));
    }
    Ok(())
}

/// `c·k^e·(log k)^l` evaluated as a ball.
fn power_log_formula(c: &str, k: &BigInt, e: u64, l: u64) -> Result<Ball> {
    let p = bound_prec();
    let kb = Ball::from_int(k.clone(), p);
    let lk = kb.log()?;
    Ok(&(&Ball::from_decimal(c, p)? * &kb.powi(e)) * &lk.powi(l))
}

/// `⌈4.8·10^12·k^4·log²k·log(n − 1)⌉`, the first bound on `d1 − d2`.
pub fn bound_dgap_initial(k: &BigInt, n: &BigInt) -> Result<BigInt> {
    check_k(k)?;
    if *n < BigInt::from(3) {
        return Err(Error::InvalidInput("bound_dgap_initial needs n >= 3".into()));
    }
    let base = power_log_formula("4.8e12", k, 4, 2)?;
    let ln = log_int(&(n - 1), bound_prec())?;
    Ok((&base * &ln).upper_ceil())
}

/// `M_k = ⌈1.3·10^30·k^8·log^5 k⌉`, the first bound on `n`.
pub fn bound_n_initial(k: &BigInt) -> Result<BigInt> {
    check_k(k)?;
    Ok(power_log_formula("1.3e30", k, 8, 5)?.upper_ceil())
}

/// `⌈2.1·10^17·k^4·log^4 k⌉`, the bound on `n` when `a = 0`.
pub fn bound_n_a0(k: &BigInt) -> Result<BigInt> {
    check_k(k)?;
    Ok(power_log_formula("2.1e17", k, 4, 4)?.upper_ceil())
}

/// One link of a bound derivation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundStep {
    pub step: String,
    pub formula: String,
    pub value: String,
    pub certified: bool,
}

/// The record of how the final bounds on `n` and `d1 − d2` were obtained.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundChain {
    /// `None` when the chain is about a symbolic (large) `k`.
    pub k: Option<u32>,
    #[serde(with = "crate::serde_big::opt")]
    pub n_bound: Option<BigInt>,
    #[serde(with = "crate::serde_big::opt")]
    pub dgap_bound: Option<BigInt>,
    pub provenance: Vec<BoundStep>,
}

impl BoundChain {
    pub fn for_k(k: Option<u32>) -> Self {
        BoundChain {
            k,
            ..Default::default()
        }
    }

    pub fn push(&mut self, step: &str, formula: &str, value: impl ToString, certified: bool) {
        self.provenance.push(BoundStep {
            step: step.to_string(),
            formula: formula.to_string(),
            value: value.to_string(),
            certified,
        });
    }

    pub fn all_certified(&self) -> bool {
        self.provenance.iter().all(|s| s.certified)
    }

    pub fn step(&self, name: &str) -> Option<&BoundStep> {
        self.provenance.iter().find(|s| s.step == name)
    }
}

/// Bound chain of the per-k analysis: initial `n` bound, then the initial
/// `d1 − d2` bound at that `n`.
pub fn initial_chain(k: u32) -> Result<BoundChain> {
    let kb = BigInt::from(k);
    let mut chain = BoundChain::for_k(Some(k));
    let n = bound_n_initial(&kb)?;
    chain.push("n_initial", "1.3e30*k^8*log(k)^5", &n, true);
    let g = bound_dgap_initial(&kb, &n)?;
    chain.push("dgap_initial", "4.8e12*k^4*log(k)^2*log(n-1)", &g, true);
    chain.n_bound = Some(n);
    chain.dgap_bound = Some(g);
    Ok(chain)
}

/// Upper bound for `h(f_k(α)(2α − 1)·9/a)` from `h(f_k(α)) < 3 log k`,
/// `h(2α − 1) < log 3` and `h(9/a)`.
pub fn eta3_height_bound(k: u32, a: u8, prec: Precision) -> Result<Ball> {
    if !(1..=9).contains(&a) {
        return Err(Error::InvalidInput(format!("digit a must be in 1..=9, got {a}")));
    }
    let (p, q) = (BigInt::from(9), BigInt::from(a));
    let g = p.gcd(&q);
    let h9a = height_rational(&(&p / &g), &(&q / &g), prec)?;
    let lk = Ball::from_int(k, prec).log()?;
    Ok(&(&lk.mul_int(3) + &Ball::from_int(3, prec).log()?) + &h9a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u64) -> Precision {
        Precision::new(bits).unwrap()
    }

    #[test]
    fn psi_examples() {
        let v = psi_eval(2, &Ball::from_int(2, p(128)));
        assert!(v.contains(&Dyadic::from_int(1)));
        let phi = dominant_root(2, p(256)).unwrap();
        assert!(psi_eval(2, phi.alpha()).contains_zero());
    }

    #[test]
    fn golden_and_tribonacci() {
        let r2 = dominant_root(2, p(256)).unwrap();
        assert!((r2.alpha().to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
        assert!(r2.alpha().rad().cmp_value(&Dyadic::pow2(8 - 256)) != std::cmp::Ordering::Greater);
        let r3 = dominant_root(3, p(256)).unwrap();
        assert!((r3.alpha().to_f64() - 1.839_286_755_214_161).abs() < 1e-15);
    }

    #[test]
    fn fk_for_k2() {
        let r = dominant_root(2, p(256)).unwrap();
        let f = fk_at_alpha(2, &r).unwrap();
        assert!((f.to_f64() - 0.723_606_797_749_979).abs() < 1e-14);
        let c = lucas_coefficient(2, &r).unwrap();
        assert_eq!(c.compare(r.alpha()), BallOrdering::Undecidable);
        assert!((&c - r.alpha()).contains_zero());
    }

    #[test]
    fn heights() {
        let pr = p(128);
        assert!(height_rational(&1.into(), &1.into(), pr).unwrap().contains_zero());
        let h = height_rational(&27.into(), &4.into(), pr).unwrap();
        assert!((h.to_f64() - 27f64.ln()).abs() < 1e-15);
        assert!(height_rational(&2.into(), &4.into(), pr).is_err());
    }

    #[test]
    fn matveev_constant_value() {
        let pr = p(128);
        let inp = MatveevInput::new(
            1,
            Ball::from_int(1, pr),
            vec![Ball::from_int(1, pr), Ball::from_int(1, pr), Ball::from_int(1, pr)],
        )
        .unwrap();
        let v = matveev_bound(&inp).unwrap().to_f64();
        let want = -1.4 * 30f64.powi(6) * 3f64.powf(4.5);
        assert!((v / want - 1.0).abs() < 1e-12);
        assert!((v / -1.432e11 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn guzman_examples() {
        let pr = p(128);
        let g = guzman_bound(1, &Ball::from_int(17, pr)).unwrap().to_f64();
        assert!((g - 34.0 * 17f64.ln()).abs() < 1e-9);
        let g = guzman_bound(2, &Ball::from_int(257, pr)).unwrap().to_f64();
        assert!((g / 3.16e4 - 1.0).abs() < 0.01);
        assert!(guzman_bound(1, &Ball::from_int(4, pr)).is_err());
        assert!(guzman_bound(2, &Ball::from_int(256, pr)).is_err());
    }

    #[test]
    fn explicit_bounds() {
        let two = BigInt::from(2);
        let m2 = bound_n_initial(&two).unwrap();
        let approx = 1.3e30 * 256.0 * 2f64.ln().powi(5);
        assert!(((m2.to_string().parse::<f64>().unwrap()) / approx - 1.0).abs() < 1e-9);
        // 2.1e17·450^4·log^4(450) ≈ 1.2e31
        let a0 = bound_n_a0(&BigInt::from(450)).unwrap().to_string().parse::<f64>().unwrap();
        let approx = 2.1e17 * 450f64.powi(4) * 450f64.ln().powi(4);
        assert!((a0 / approx - 1.0).abs() < 1e-9);
        assert!(bound_n_a0(&two).unwrap() < bound_n_a0(&BigInt::from(3)).unwrap());
        let g = bound_dgap_initial(&two, &BigInt::from(100)).unwrap();
        let approx = 4.8e12 * 16.0 * 2f64.ln().powi(2) * 99f64.ln();
        assert!((g.to_string().parse::<f64>().unwrap() / approx - 1.0).abs() < 1e-9);
    }
}
