//! Main term for morphisms P^1 -> X = {Σ x_i^d = 0} ⊂ P^n.
//!
//! Local factor λ_v = (1 - Q^{-1}) #X(F_Q) / Q^{n-1}. Since
//! |#X(F_Q) - #P^{n-1}(F_Q)| <= b Q^{(n-1)/2} with
//! b = ((d-1)^{n+1} + (-1)^{n+1}(d-1))/d, we have |λ_v - 1| <= Q^{-n} + b Q^{-(n-1)/2},
//! which is summable over places only when b = 0 or n > 3.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::counting::FermatInstance;
use crate::error::{budget, invalid, Error, Result};
use crate::ff::{extend_field, Field, Fq, Place, Poly};

use super::local::{ell_v_recursive, q_pow, rat, LocalModel, PlaceModel};
use super::series::{finite_places, half_power_upper, TailInterval};

/// Largest Q^2 · n the coordinate-by-coordinate point count will attempt.
pub const POINT_COUNT_BUDGET: u64 = 2_000_000_000;

/// #X(F_{q^m}) by counting normalized projective representatives coordinate by coordinate.
pub fn fermat_point_count(base: &Arc<Field>, n: u32, d: u32, m: u32) -> Result<u128> {
    let ext = extend_field(base, m)?;
    let big = &ext.big;
    let qq = big.q() as usize;
    let work = (qq as u64).pow(2) * n as u64;
    if work > POINT_COUNT_BUDGET {
        return budget("Fermat point count", format!("{work}"), POINT_COUNT_BUDGET);
    }
    let powers: Vec<Fq> = big.elements().map(|x| big.pow(x, d as u64)).collect();
    // dist[j] = #{free tuples with Σ x^d = j}, built up one coordinate at a time
    let mut dist = vec![0u128; qq];
    dist[0] = 1;
    let mut total = 0u128;
    // first nonzero coordinate at position n - j, followed by j free coordinates
    for _ in 0..=n {
        // representatives (1, free...): need 1 + Σ = 0, i.e. Σ = -1
        total += dist[big.neg(Fq::ONE).0 as usize];
        let mut next = vec![0u128; qq];
        for (a, &c) in dist.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &pw in &powers {
                next[big.add(Fq(a as u32), pw).0 as usize] += c;
            }
        }
        dist = next;
    }
    Ok(total)
}

/// #X(F_Q) from the convolution counts: (N_{n+1}(0) - 1)/(Q - 1).
fn point_count_from_model(model: &LocalModel) -> u128 {
    (model.counts.values()[0] - 1) / (model.q() as u128 - 1)
}

pub fn local_factor(q_v: u64, n: u32, points: u128) -> BigRational {
    (BigRational::one() - q_pow(q_v, -1)) * rat(points) * q_pow(q_v, -(n as i64 - 1))
}

/// (1 - Q^{-(n+1-d)}) ℓ_v(0) and (1 - Q^{-1}) #X(F_Q)/Q^{n-1} at a place of degree `deg`.
pub fn manin_local_identity(field: &Arc<Field>, n: u32, d: u32, deg: usize) -> Result<(BigRational, BigRational)> {
    if n + 1 <= d {
        return invalid("need n + 1 > d");
    }
    let model = LocalModel::new(field, deg, n + 1, d)?;
    let pi = crate::ff::places::irreducibles_of_degree(field, deg)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invalid("no place of that degree".into()))?;
    let pm = PlaceModel::new(field, &model, &Place::Finite(pi));
    let l0 = ell_v_recursive(field, &model, &pm, &Poly::zero())?.value;
    let qv = model.q();
    let lhs = (BigRational::one() - q_pow(qv, -(n as i64 + 1 - d as i64))) * l0;
    let rhs = local_factor(qv, n, fermat_point_count(field, n, d, deg as u32)?);
    Ok((lhs, rhs))
}

pub fn deligne_b(n: u32, d: u32) -> u128 {
    let dm = d as i128 - 1;
    let sign = if (n + 1) % 2 == 0 { 1 } else { -1 };
    ((dm.pow(n + 1) + sign * dm) / d as i128) as u128
}

/// Σ_{j>D} (q^j/j)(q^{-jn} + b q^{-j(n-1)/2}), when it converges below 1.
pub fn manin_tail(q: u64, n: u32, d: u32, deg_cap: usize) -> Option<BigRational> {
    let b = deligne_b(n, d);
    if b > 0 && n <= 3 {
        return None;
    }
    let g = |x: BigRational| -> BigRational {
        num_traits::pow(x.clone(), deg_cap + 1) / (rat(deg_cap as u64 + 1) * (BigRational::one() - x))
    };
    let mut t = g(q_pow(q, 1 - n as i64));
    if b > 0 {
        t += rat(b) * g(half_power_upper(q, 3 - n as i64));
    }
    (t < BigRational::one()).then_some(t)
}

#[derive(Clone, Debug)]
pub struct ManinMainTerm {
    pub d_cap: usize,
    pub partial: BigRational,
    pub lo: BigRational,
    pub hi: Option<BigRational>,
    /// Whether the Euler product is absolutely convergent under the bound used.
    pub converges: bool,
    pub factors: Vec<(Place, BigRational)>,
}

/// q^{e(n+1-d)+n}/(q-1) Π_{deg v <= D} λ_v, over finite places and ∞.
pub fn main_term_manin(inst: &FermatInstance, d_cap: usize) -> Result<ManinMainTerm> {
    let (n, d) = (inst.n, inst.d);
    if n + 1 <= d {
        return invalid("main term needs n + 1 > d");
    }
    let field = &inst.field;
    let q = field.q() as u64;
    let mut factors = Vec::new();
    let mut partial = rat(1u32);
    let places = finite_places(field, d_cap);
    for deg in 1..=d_cap {
        let model = LocalModel::new(field, deg, n + 1, d)?;
        let lam = local_factor(model.q(), n, point_count_from_model(&model));
        let mut here: Vec<Place> = places.iter().filter(|p| p.degree() == deg).cloned().collect();
        if deg == 1 {
            here.push(Place::Infinity);
        }
        partial *= num_traits::pow(lam.clone(), here.len());
        factors.extend(here.into_iter().map(|p| (p, lam.clone())));
    }
    let lead = q_pow(q, inst.e as i64 * (n as i64 + 1 - d as i64) + n as i64) / rat(q - 1);
    let partial = lead * partial;
    let t = manin_tail(q, n, d, d_cap);
    let tail = TailInterval::from_t(t);
    Ok(ManinMainTerm {
        d_cap,
        lo: if tail.is_valid() { &partial * &tail.lo } else { BigRational::zero() },
        hi: tail.hi.as_ref().map(|h| &partial * h),
        converges: tail.is_valid(),
        partial,
        factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_point_counts() {
        let f3 = Arc::new(Field::prime(3).unwrap());
        assert_eq!(fermat_point_count(&f3, 2, 2, 1).unwrap(), 4);
        assert_eq!(fermat_point_count(&f3, 1, 1, 1).unwrap(), 1);
        assert_eq!(fermat_point_count(&f3, 3, 2, 1).unwrap(), 16);
    }

    #[test]
    fn deligne_constants() {
        assert_eq!(deligne_b(2, 2), 0);
        assert_eq!(deligne_b(3, 2), 1);
        assert_eq!(deligne_b(2, 3), 2);
        assert_eq!(deligne_b(3, 3), 6);
    }
}
