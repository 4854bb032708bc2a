//! Threshold formulas for s, q and the power saving θ, with log(k+1)/log q
//! carried as a certified rational enclosure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};

use super::hull::gamma;

/// Bits of the dyadic grid enclosures are rounded outward to.
pub const LOG_GRID_BITS: u32 = 100;
/// Required width of the log-ratio enclosure.
pub const LOG_RATIO_WIDTH_BITS: u32 = 64;

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Closed rational interval [lo, hi].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        f(&self.lo) - 1e-12 <= x && x <= f(&self.hi) + 1e-12
    }
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    BigRational::new((x * int(scale.clone())).floor().to_integer(), scale)
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    BigRational::new((x * int(scale.clone())).ceil().to_integer(), scale)
}

/// atanh(z) for 0 <= z <= 1/3: partial sum and a bound on the tail.
fn atanh_enclosure(z: &BigRational, terms: u32) -> Enclosure {
    let z2 = z * z;
    let mut pow = z.clone();
    let mut sum = BigRational::zero();
    for n in 0..terms {
        sum += &pow / int(2 * n + 1);
        pow = &pow * &z2;
    }
    // pow = z^{2N+1}; tail <= z^{2N+1} / ((2N+1)(1 - z^2))
    let tail = &pow / (int(2 * terms + 1) * (BigRational::one() - &z2));
    Enclosure {
        lo: round_down(&sum, LOG_GRID_BITS),
        hi: round_up(&(sum + tail), LOG_GRID_BITS),
    }
}

/// ln x for an integer x >= 1.
pub fn ln_enclosure(x: u64) -> Result<Enclosure> {
    if x == 0 {
        return invalid("log of zero");
    }
    let m = 63 - x.leading_zeros();
    let y = BigRational::new(x.into(), (BigInt::one() << m).into());
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let terms = 48;
    let a = atanh_enclosure(&z, terms);
    let l2 = atanh_enclosure(&BigRational::new(1.into(), 3.into()), terms);
    let two = int(2);
    let mm = int(m);
    Ok(Enclosure {
        lo: round_down(&(&two * (&mm * &l2.lo + &a.lo)), LOG_GRID_BITS),
        hi: round_up(&(&two * (&mm * &l2.hi + &a.hi)), LOG_GRID_BITS),
    })
}

/// log a / log b for integers a, b >= 2.
pub fn log_ratio(a: u64, b: u64) -> Result<Enclosure> {
    if a < 2 || b < 2 {
        return invalid("log ratio needs arguments >= 2");
    }
    let la = ln_enclosure(a)?;
    let lb = ln_enclosure(b)?;
    let e = Enclosure {
        lo: round_down(&(&la.lo / &lb.hi), LOG_GRID_BITS),
        hi: round_up(&(&la.hi / &lb.lo), LOG_GRID_BITS),
    };
    if e.width() > BigRational::new(1.into(), BigInt::one() << LOG_RATIO_WIDTH_BITS) {
        return Err(Error::Consistency("log ratio enclosure too wide".into()));
    }
    Ok(e)
}

/// 2(k - γ - 2L)/(1 - γ - 2L), or None when the denominator is <= 0.
pub fn s_bound_poly(k: u32, gamma: &BigRational, l: &BigRational) -> Option<BigRational> {
    let den = BigRational::one() - gamma - int(2) * l;
    (den.is_positive()).then(|| int(2) * (int(k) - gamma - int(2) * l) / den)
}

/// 2k/(1 - 2(k-1)L), or None when the denominator is <= 0.
pub fn s_bound_minor(k: u32, l: &BigRational) -> Option<BigRational> {
    let den = BigRational::one() - int(2 * (k as i64 - 1)) * l;
    (den.is_positive()).then(|| int(2 * k) / den)
}

/// First θ condition: θ < (s/2 - k)/(k-1) - sL.
pub fn theta_strict_bound(s: u64, k: u32, l: &BigRational) -> BigRational {
    let k1 = int(k as i64 - 1);
    (BigRational::new(s.into(), 2.into()) - int(k)) / k1 - int(s) * l
}

/// Second θ condition: θ <= s - k - (s-2)((1+γ)/2 + L) - 1.
pub fn theta_bound(s: u64, k: u32, gamma: &BigRational, l: &BigRational) -> BigRational {
    int(s) - int(k) - int(s as i64 - 2) * ((BigRational::one() + gamma) / int(2) + l) - BigRational::one()
}

/// Limit of the s bound as q → ∞: 2(k - γ)/(1 - γ).
pub fn s_bound_large_q(k: u32, gamma: &BigRational) -> BigRational {
    int(2) * (int(k) - gamma) / (BigRational::one() - gamma)
}

/// The large-q bound with γ replaced by its upper bound (k-2)/(2k-2)(1 + k/p).
pub fn s_bound_gamma_upper(k: u32, p: u64) -> BigRational {
    let (k, p) = (k as i64, p as i64);
    BigRational::new(
        (2 * (2 * k * k - 3 * k + 2) * p - 2 * k * (k - 2)).into(),
        (k * (p + 2 - k)).into(),
    )
}

/// p → ∞ limit of the previous bound: 4k - 6 + 4/k.
pub fn s_bound_large_p(k: u32) -> BigRational {
    int(4 * k as i64 - 6) + BigRational::new(4.into(), k.into())
}

/// Smallest integer strictly greater than x.
pub fn next_integer_above(x: &BigRational) -> i64 {
    let f = x.floor().to_integer();
    i64::try_from(f).expect("small bound") + 1
}

#[derive(Clone, Debug)]
pub struct ThresholdReport {
    pub k: u32,
    pub p: u64,
    pub q: u64,
    pub s: u64,
    pub gamma: BigRational,
    /// log(k+1)/log q.
    pub log_ratio: Enclosure,
    /// (k+1)^{2(k-1)}.
    pub q_min: BigRational,
    pub q_above_min: bool,
    pub p_above_k: bool,
    /// Upper enclosures of the two s lower bounds; None when no s works.
    pub s_bound_poly: Option<BigRational>,
    pub s_bound_minor: Option<BigRational>,
    pub s_min: Option<u64>,
    /// Lower enclosures of the two θ upper bounds at this s.
    pub theta_strict_bound: BigRational,
    pub theta_bound: BigRational,
    /// min of the two, or None when not positive.
    pub theta_max: Option<BigRational>,
    /// (s/2 - k)/(k-1), the exclusive bound on δ = θ + sL.
    pub delta_max: BigRational,
    pub feasible: bool,
    /// Feasibility is the same at both ends of the log enclosure.
    pub decided: bool,
}

fn feasible_at(s: u64, k: u32, gamma: &BigRational, l: &BigRational) -> bool {
    theta_strict_bound(s, k, l).is_positive() && theta_bound(s, k, gamma, l).is_positive()
}

/// Threshold report at (k, p, q) for a given s, or at s_min when `s` is None.
pub fn thresholds(k: u32, p: u64, q: u64, s: Option<u64>) -> Result<ThresholdReport> {
    if k < 2 {
        return invalid("need k >= 2");
    }
    if (k as u64) % p == 0 {
        return invalid("need p ∤ k");
    }
    let mut r = q;
    while r > 1 && r % p == 0 {
        r /= p;
    }
    if r != 1 || q < p {
        return invalid(format!("q = {q} is not a power of p = {p}"));
    }
    let g = gamma(k, p)?.gamma;
    let l = log_ratio(k as u64 + 1, q)?;
    // both s bounds increase with L, both θ bounds decrease: use L_hi
    let sp = s_bound_poly(k, &g, &l.hi);
    let sm = s_bound_minor(k, &l.hi);
    let s_min = match (&sp, &sm) {
        (Some(a), Some(b)) => Some(next_integer_above(a.max(b)).max(0) as u64),
        _ => None,
    };
    let s = s.or(s_min).unwrap_or(2 * k as u64 + 1);
    let ts = theta_strict_bound(s, k, &l.hi);
    let tb = theta_bound(s, k, &g, &l.hi);
    let tmin = if ts < tb { ts.clone() } else { tb.clone() };
    let feasible = tmin.is_positive();
    let by_s = s_min.is_some_and(|m| s >= m);
    if feasible != by_s || feasible != feasible_at(s, k, &g, &l.hi) {
        return Err(Error::Consistency(format!(
            "θ feasibility {feasible} disagrees with the s condition {by_s} at s = {s}"
        )));
    }
    let decided = feasible == feasible_at(s, k, &g, &l.lo);
    let q_min = int(k as u64 + 1).pow(2 * (k as i32 - 1));
    Ok(ThresholdReport {
        k,
        p,
        q,
        s,
        q_above_min: int(q) > q_min,
        q_min,
        p_above_k: p > k as u64,
        log_ratio: l,
        s_bound_poly: sp,
        s_bound_minor: sm,
        s_min,
        theta_strict_bound: ts,
        theta_bound: tb,
        theta_max: feasible.then_some(tmin),
        delta_max: (BigRational::new(s.into(), 2.into()) - int(k)) / int(k as i64 - 1),
        feasible,
        decided,
        gamma: g,
    })
}
