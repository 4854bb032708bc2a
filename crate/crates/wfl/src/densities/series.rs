//! Truncated singular series with a rigorous tail interval, and the Waring
//! main term q^{e(s-k)+s-1} ℓ_∞(f) Π_π ℓ_π(f).
//!
//! Tail: for every place, |ℓ_v - 1| <= δ_v with
//! δ_v = Q((k-1)^s Q^{-s/2} + Q^{k-1-s}/(1-Q^{-1})), Q = q^{deg v},
//! valid for s >= 5, s > k+1, p ∤ k. With at most q^n/n places of degree n,
//! T = Σ_{n>D} (q^n/n) δ_n <= (k-1)^s G(q^{2-s/2}) + G(q^{k+1-s}) q/(q-1),
//! G(x) = x^{D+1} / ((D+1)(1-x)), and the omitted factors lie in [1-T, 1/(1-T)].

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::counting::{polys_up_to, WaringInstance};
use crate::error::{invalid, Result};
use crate::ff::places::irreducibles_of_degree;
use crate::ff::{Field, Fq, Place, Poly};

use super::local::{at_infinity, ell_v_recursive, q_pow, rat, rational_product, LocalContext, LocalDensity, PlaceModel};

pub const DEFAULT_DEGREE_CAP: usize = 6;

/// A rational upper bound for √q, accurate to about 2^{-40}.
pub fn sqrt_upper(q: u64) -> BigRational {
    let scale = BigInt::from(1u64 << 40);
    let n = BigInt::from(q) * &scale * &scale;
    let mut r = n.sqrt();
    if &r * &r < n {
        r += 1;
    }
    BigRational::new(r, scale)
}

/// Upper bound for q^{a/2}.
pub fn half_power_upper(q: u64, a: i64) -> BigRational {
    if a % 2 == 0 {
        q_pow(q, a / 2)
    } else {
        q_pow(q, (a - 1) / 2) * sqrt_upper(q)
    }
}

/// x^{D+1} / ((D+1)(1-x)) for 0 <= x < 1.
fn geometric_tail(x: &BigRational, d: usize) -> BigRational {
    num_traits::pow(x.clone(), d + 1) / (rat(d as u64 + 1) * (BigRational::one() - x))
}

/// Whether the explicit tail bound applies.
pub fn tail_hypotheses(p: u32, k: u32, s: u32) -> bool {
    s >= 5 && s > k + 1 && k % p != 0
}

/// T for places of degree > d, or `None` outside the hypotheses or when T >= 1.
pub fn waring_tail(q: u64, p: u32, k: u32, s: u32, d: usize) -> Option<BigRational> {
    if !tail_hypotheses(p, k, s) {
        return None;
    }
    let x1 = half_power_upper(q, 4 - s as i64);
    let x2 = q_pow(q, k as i64 + 1 - s as i64);
    let t = rat((k as u64 - 1).pow(s)) * geometric_tail(&x1, d)
        + geometric_tail(&x2, d) * rat(q) / rat(q - 1);
    (t < BigRational::one()).then_some(t)
}

/// Product over the finite places of degree > D, as [lo, hi]; hi = None means unbounded.
#[derive(Clone, Debug, PartialEq)]
pub struct TailInterval {
    pub lo: BigRational,
    pub hi: Option<BigRational>,
}

impl TailInterval {
    pub fn from_t(t: Option<BigRational>) -> Self {
        match t {
            Some(t) => TailInterval {
                lo: BigRational::one() - &t,
                hi: Some((BigRational::one() - &t).recip()),
            },
            None => TailInterval {
                lo: BigRational::zero(),
                hi: None,
            },
        }
    }

    pub fn is_valid(&self) -> bool {
        self.hi.is_some()
    }

    pub fn width(&self) -> Option<BigRational> {
        self.hi.as_ref().map(|h| h - &self.lo)
    }
}

#[derive(Clone, Debug)]
pub struct SingularSeries {
    pub d: usize,
    pub locals: Vec<LocalDensity>,
    /// ℓ_∞ times Π_{deg v <= D} ℓ_v.
    pub partial: BigRational,
    pub tail: TailInterval,
}

impl SingularSeries {
    pub fn lo(&self) -> BigRational {
        &self.partial * &self.tail.lo
    }

    pub fn hi(&self) -> Option<BigRational> {
        self.tail.hi.as_ref().map(|h| &self.partial * h)
    }
}

pub fn finite_places(fq: &Field, d: usize) -> Vec<Place> {
    (1..=d)
        .flat_map(|n| irreducibles_of_degree(fq, n))
        .map(Place::Finite)
        .collect()
}

pub fn singular_series(field: &Arc<Field>, f: &Poly, e: usize, k: u32, s: u32, d: usize) -> Result<SingularSeries> {
    if f.deg().is_some_and(|x| x > k as usize * e) {
        return invalid("deg f exceeds ke");
    }
    let mut ctx = LocalContext::new(field.clone(), s, k);
    for n in 1..=d {
        ctx.model(n)?;
    }
    let places = finite_places(field, d);
    let models: Vec<_> = places.iter().map(|p| ctx.place_model(p)).collect::<Result<_>>()?;
    let mut locals: Vec<LocalDensity> = models
        .par_iter()
        .map(|(m, pm)| ell_v_recursive(field, m, pm, f))
        .collect::<Result<_>>()?;
    locals.push(ctx.ell_infty(f, e)?);
    let partial = rational_product(locals.iter().map(|l| &l.value));
    let tail = TailInterval::from_t(waring_tail(field.q() as u64, field.p(), k, s, d));
    Ok(SingularSeries { d, locals, partial, tail })
}

/// q^{e(s-k)+s-1}.
pub fn waring_leading(q: u64, k: u32, s: u32, e: usize) -> BigRational {
    q_pow(q, e as i64 * (s as i64 - k as i64) + s as i64 - 1)
}

#[derive(Clone, Debug)]
pub struct MainTerm {
    pub partial: BigRational,
    pub lo: BigRational,
    pub hi: Option<BigRational>,
    pub series: SingularSeries,
}

pub fn main_term_waring(inst: &WaringInstance, d: usize) -> Result<MainTerm> {
    let series = singular_series(&inst.field, &inst.f, inst.e, inst.k, inst.s, d)?;
    let lead = waring_leading(inst.field.q() as u64, inst.k, inst.s, inst.e);
    Ok(MainTerm {
        partial: &lead * &series.partial,
        lo: &lead * series.lo(),
        hi: series.hi().map(|h| &lead * h),
        series,
    })
}

/// Truncated main terms for every f of degree <= ke, indexed like `count_all`.
#[derive(Clone, Debug)]
pub struct MainTermSweep {
    pub d: usize,
    /// Leading power times Π over places of degree <= D of the unit value.
    pub leading: BigRational,
    pub values: Vec<f64>,
    pub tail: TailInterval,
}

/// Uses that N_s(c) is constant on c ≠ 0 (e.g. k = 2, s even), so only places
/// dividing f change the product. Values are rounded to f64 per factor.
pub fn main_term_sweep(field: &Arc<Field>, k: u32, s: u32, e: usize, d: usize) -> Result<MainTermSweep> {
    let ke = k as usize * e;
    let q = field.q() as u64;
    let mut ctx = LocalContext::new(field.clone(), s, k);
    let mut unit = Vec::new();
    let mut leading = waring_leading(q, k, s, e);
    let mut zero_ratio = BigRational::one();
    let mut per_degree: Vec<Vec<Poly>> = vec![Vec::new()];
    for n in 1..=d {
        let m = ctx.model(n)?;
        if !m.unit_invariant() {
            return invalid("sweep needs N_s constant on units");
        }
        let qn = m.q();
        let u = rat(m.nonzero_solutions(Fq::ONE)) * q_pow(qn, -(s as i64 - 1));
        let irr = irreducibles_of_degree(field, n);
        let count = irr.len();
        leading *= num_traits::pow(u.clone(), count);
        // ℓ_v(0) depends only on the degree
        let pm = PlaceModel::new(field, &m, &Place::Finite(irr[0].clone()));
        let z = ell_v_recursive(field, &m, &pm, &Poly::zero())?.value;
        zero_ratio *= num_traits::pow(z / &u, count);
        unit.push(u);
        per_degree.push(irr);
    }
    let len = (q as usize).pow(ke as u32 + 1);
    let mut ratio = vec![1.0f64; len];

    let jobs: Vec<(usize, Poly)> = per_degree
        .iter()
        .enumerate()
        .filter(|(n, _)| *n >= 1 && *n <= ke)
        .flat_map(|(n, irr)| irr.iter().map(move |pi| (n, pi.clone())))
        .collect();
    let models: Vec<_> = jobs
        .iter()
        .map(|(_, pi)| ctx.place_model(&Place::Finite(pi.clone())))
        .collect::<Result<_>>()?;
    let updates: Vec<Vec<(usize, f64)>> = jobs
        .par_iter()
        .zip(models.par_iter())
        .map(|((n, pi), (m, pm))| {
            let u = &unit[n - 1];
            polys_up_to(field, ke - n)
                .into_iter()
                .filter(|h| !h.is_zero())
                .map(|h| {
                    let f = pi.mul(field, &h);
                    let l = ell_v_recursive(field, m, pm, &f)?.value;
                    let idx = f.to_index(field) as usize;
                    Ok((idx, (l / u).to_f64().expect("finite ratio")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    for list in updates {
        for (i, r) in list {
            ratio[i] *= r;
        }
    }
    ratio[0] = zero_ratio.to_f64().expect("finite ratio");

    let (m_inf, pm_inf) = ctx.place_model(&Place::Infinity)?;
    let lead_f = leading.to_f64().expect("finite leading term");
    let values: Vec<f64> = ratio
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let f = Poly::from_index(field, i as u64, ke + 1);
            let li = ell_v_recursive(field, &m_inf, &pm_inf, &at_infinity(&f, ke))?.value;
            Ok(lead_f * r * li.to_f64().expect("finite density"))
        })
        .collect::<Result<_>>()?;
    Ok(MainTermSweep {
        d,
        leading,
        values,
        tail: TailInterval::from_t(waring_tail(q, field.p(), k, s, d)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_bound_is_tight_and_above() {
        for q in [2u64, 3, 5, 7, 25] {
            let b = sqrt_upper(q).to_f64().unwrap();
            assert!(b >= (q as f64).sqrt() && b - (q as f64).sqrt() < 1e-11);
        }
    }

    #[test]
    fn tail_shrinks_with_degree() {
        let mut last = None;
        for d in 2..9 {
            let t = waring_tail(5, 5, 2, 6, d).unwrap();
            if let Some(prev) = last {
                assert!(t < prev);
            }
            last = Some(t);
        }
        assert!(waring_tail(5, 5, 2, 4, 6).is_none());
    }
}
