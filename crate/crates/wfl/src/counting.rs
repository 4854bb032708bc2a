//! Exact representation counts #{a : deg a_i <= e, Σ a_i^k = f} and morphism
//! counts P^1 -> {Σ x_i^d = 0}.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{budget, invalid, Error, Result};
use crate::ff::poly::{factor, monic_polys};
use crate::ff::{Field, Fq, Poly};
use crate::fourier::{convolve_power_auto, GroupFn};

/// Default enumeration budget for the brute-force oracles.
pub const ORACLE_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Debug)]
pub struct WaringInstance {
    pub field: Arc<Field>,
    pub k: u32,
    pub s: u32,
    pub e: usize,
    pub f: Poly,
}

impl WaringInstance {
    pub fn new(field: Arc<Field>, k: u32, s: u32, e: usize, f: Poly) -> Result<Self> {
        if k < 2 || s < 1 {
            return invalid("need k >= 2 and s >= 1");
        }
        if f.deg().is_some_and(|d| d > k as usize * e) {
            return invalid(format!("deg f exceeds ke = {}", k as usize * e));
        }
        Ok(WaringInstance { field, k, s, e, f })
    }

    /// Set when p | k, outside the range where the asymptotic theory applies.
    pub fn char_divides_k(&self) -> bool {
        self.k % self.field.p() == 0
    }

    pub fn ke(&self) -> usize {
        self.k as usize * self.e
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FermatParams {
    pub n: u32,
    pub d: u32,
    pub e: usize,
}

#[derive(Clone, Debug)]
pub struct FermatInstance {
    pub field: Arc<Field>,
    pub n: u32,
    pub d: u32,
    pub e: usize,
}

impl FermatInstance {
    pub fn new(field: Arc<Field>, n: u32, d: u32, e: usize) -> Result<Self> {
        if d < 1 || n < 1 {
            return invalid("need n >= 1 and d >= 1");
        }
        if d % field.p() == 0 {
            return invalid("p divides d; the hypersurface is not smooth");
        }
        Ok(FermatInstance { field, n, d, e })
    }
}

/// All polynomials of degree <= e, in index order.
pub fn polys_up_to(fq: &Field, e: usize) -> Vec<Poly> {
    let count = (fq.q() as u64).pow(e as u32 + 1);
    (0..count).map(|i| Poly::from_index(fq, i, e + 1)).collect()
}

/// k-th powers of all sections of O(e), as coefficient vectors of length ke+1.
pub fn power_vectors(fq: &Field, k: u32, e: usize) -> Vec<Vec<Fq>> {
    let n = k as usize * e + 1;
    polys_up_to(fq, e)
        .par_iter()
        .map(|a| a.pow(fq, k as u64).padded(n))
        .collect()
}

fn check_budget(q: u64, exp: u64, what: &'static str) -> Result<u64> {
    let size = (q as f64).powf(exp as f64);
    if size > ORACLE_BUDGET as f64 {
        return budget(what, format!("{q}^{exp}"), ORACLE_BUDGET);
    }
    Ok(q.pow(exp as u32))
}

/// Full enumeration of all s-tuples.
pub fn count_bruteforce(inst: &WaringInstance) -> Result<u128> {
    let fq = &*inst.field;
    let q = fq.q() as u64;
    check_budget(q, inst.s as u64 * (inst.e as u64 + 1), "brute-force tuples")?;
    let n = inst.ke() + 1;
    let pv = power_vectors(fq, inst.k, inst.e);
    let target = inst.f.padded(n);
    let s = inst.s as usize;

    fn walk(fq: &Field, pv: &[Vec<Fq>], acc: &mut [Fq], left: usize, target: &[Fq]) -> u128 {
        if left == 0 {
            return (acc == target) as u128;
        }
        let mut total = 0;
        for v in pv {
            let saved = acc.to_vec();
            for (a, &x) in acc.iter_mut().zip(v) {
                *a = fq.add(*a, x);
            }
            total += walk(fq, pv, acc, left - 1, target);
            acc.copy_from_slice(&saved);
        }
        total
    }

    Ok(pv
        .par_iter()
        .map(|first| {
            let mut acc = first.clone();
            walk(fq, &pv, &mut acc, s - 1, &target)
        })
        .sum())
}

/// Histogram of a -> a^k over sections of O(e), on F_q^{ke+1}.
pub fn power_histogram(field: &Arc<Field>, k: u32, e: usize) -> Result<GroupFn<u128>> {
    let n = k as usize * e + 1;
    let mut h = GroupFn::<u128>::zeros(field.clone(), n)?;
    for v in power_vectors(field, k, e) {
        let i = h.index_of(&v);
        h.values_mut()[i] += 1;
    }
    Ok(h)
}

/// N(f) for every f of degree <= ke at once.
pub fn count_all(field: &Arc<Field>, k: u32, s: u32, e: usize) -> Result<GroupFn<u128>> {
    let h = power_histogram(field, k, e)?;
    convolve_power_auto(&h, s)
}

/// #{a ∈ (sections of O(e))^s : Σ a_i^k = 0}; for e < 0 this is 1.
fn zero_count(field: &Arc<Field>, k: u32, s: u32, e: Option<usize>) -> Result<u128> {
    match e {
        None => Ok(1),
        Some(e) => Ok(count_all(field, k, s, e)?.values()[0]),
    }
}

/// Möbius value of a squarefree monic polynomial, 0 otherwise.
pub fn poly_moebius(fq: &Field, g: &Poly) -> i32 {
    let fs = factor(fq, g);
    if fs.iter().any(|(_, m)| *m > 1) {
        0
    } else if fs.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Degree-e morphisms P^1 -> X by Möbius inversion over effective divisors.
pub fn morphism_count_moebius(inst: &FermatInstance) -> Result<u128> {
    let fq = &*inst.field;
    let s = inst.n + 1;
    let e = inst.e;
    let mut total: i128 = 0;
    for j in 0..=e {
        let mu_sum: i128 = monic_polys(fq, j).map(|g| poly_moebius(fq, &g) as i128).sum();
        if mu_sum == 0 {
            continue;
        }
        // D = g alone, of degree j
        let b0 = zero_count(&inst.field, inst.d, s, Some(e - j))? as i128 - 1;
        // D = g + ∞, of degree j + 1
        let b1 = zero_count(&inst.field, inst.d, s, (e - j).checked_sub(1))? as i128 - 1;
        total += mu_sum * (b0 - b1);
    }
    // Divisors of degree e + 1 would contribute with an empty section space.
    let tail = zero_count(&inst.field, inst.d, s, None)? as i128 - 1;
    if tail != 0 {
        return Err(Error::Consistency("degree e+1 term is nonzero".into()));
    }
    let qm1 = fq.q() as i128 - 1;
    if total < 0 || total % qm1 != 0 {
        return Err(Error::Consistency(format!(
            "Möbius sum {total} is not a nonnegative multiple of q-1"
        )));
    }
    Ok((total / qm1) as u128)
}

/// Degree-e morphisms by enumerating tuples with no common zero on P^1.
pub fn morphism_count_direct(inst: &FermatInstance) -> Result<u128> {
    let fq = &*inst.field;
    let q = fq.q() as u64;
    let s = inst.n as usize + 1;
    let e = inst.e;
    check_budget(q, s as u64 * (e as u64 + 1), "morphism tuples")?;
    let polys = polys_up_to(fq, e);
    let powers: Vec<Poly> = polys.par_iter().map(|a| a.pow(fq, inst.d as u64)).collect();
    let m = polys.len();
    let count: u128 = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; s];
            idx[0] = first;
            let mut c = 0u128;
            loop {
                let sum = idx
                    .iter()
                    .fold(Poly::zero(), |acc, &i| acc.add(fq, &powers[i]));
                if sum.is_zero() {
                    let top = idx.iter().any(|&i| !polys[i].coeff(e).is_zero());
                    if top {
                        let g = idx
                            .iter()
                            .fold(Poly::zero(), |acc, &i| acc.gcd(fq, &polys[i]));
                        if g.deg() == Some(0) {
                            c += 1;
                        }
                    }
                }
                // advance the trailing coordinates
                let mut pos = 1;
                while pos < s {
                    idx[pos] += 1;
                    if idx[pos] < m {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == s {
                    break;
                }
            }
            c
        })
        .sum();
    let qm1 = q as u128 - 1;
    if count % qm1 != 0 {
        return Err(Error::Consistency("tuple count not divisible by q-1".into()));
    }
    Ok(count / qm1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_sums_follow_zeta() {
        // Σ_{deg g = j} μ(g) is 1, -q, 0, 0, ...
        let f = Field::prime(3).unwrap();
        let sums: Vec<i32> = (0..4)
            .map(|j| monic_polys(&f, j).map(|g| poly_moebius(&f, &g)).sum())
            .collect();
        assert_eq!(sums, vec![1, -3, 0, 0]);
    }

    #[test]
    fn single_square_zero() {
        let f = Arc::new(Field::prime(3).unwrap());
        let inst = WaringInstance::new(f, 2, 1, 0, Poly::zero()).unwrap();
        assert_eq!(count_bruteforce(&inst).unwrap(), 1);
    }
}
