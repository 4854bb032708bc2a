//! Exact values of S_1(α) and S_Z(ᾱ).

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::counting::{polys_up_to, power_histogram, ORACLE_BUDGET};
use crate::error::{budget, invalid, Error, Result};
use crate::ff::linalg::dot;
use crate::ff::{char_psi, CycQ, Cyclotomic, Field, Fq, QuotientRing};
use crate::fourier::{dual_values_all, GroupFn};

use super::forms::{LinearForm, LocalForm, RestrictedForm};

/// Σ_t counts[t] ζ^t from a histogram of traces.
fn from_trace_counts(p: u32, counts: &[u64]) -> Cyclotomic {
    Cyclotomic::from_exponent_counts(p, counts.iter().map(|&c| c as i128).collect())
}

/// c / q^e as an element of Q(ζ_p).
pub fn over_q_power(c: &Cyclotomic, q: u32, e: usize) -> CycQ {
    let d = BigInt::from(q).pow(e as u32);
    c.to_rational().scale(&BigRational::new(BigInt::from(1), d))
}

/// S_1(α) = Σ_{deg a <= e} ψ(α(a^k)), by direct summation.
pub fn s1_direct(fq: &Field, alpha: &LinearForm, e: usize, k: u32) -> Result<Cyclotomic> {
    if alpha.n() != k as usize * e {
        return invalid("form dimension is not ke + 1");
    }
    let size = (fq.q() as f64).powi(e as i32 + 1);
    if size > ORACLE_BUDGET as f64 {
        return budget("direct S_1 summation", format!("{size:e}"), ORACLE_BUDGET);
    }
    let p = fq.p();
    let counts = polys_up_to(fq, e)
        .par_iter()
        .fold(
            || vec![0u64; p as usize],
            |mut acc, a| {
                let x = alpha.eval(fq, &a.pow(fq, k as u64));
                acc[fq.trace(x) as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; p as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(from_trace_counts(p, &counts))
}

/// S_1(α) for every α at once, indexed like `GroupFn` on F_q^{ke+1}.
pub fn s1_all(field: &Arc<Field>, e: usize, k: u32) -> Result<Vec<Cyclotomic>> {
    dual_values_all(&power_histogram(field, k, e)?)
}

/// Histogram of a -> a^k on O_v/π^m, in local coordinates.
pub fn local_power_histogram(field: &Arc<Field>, ring: &QuotientRing, k: u32) -> Result<GroupFn<u128>> {
    let mut h = GroupFn::<u128>::zeros(field.clone(), ring.dim())?;
    for idx in 0..ring.size(field) {
        let a = ring.element(field, idx);
        let c = ring.coords(field, &a.pow_mod(field, k as u64, &ring.modulus));
        let i = h.index_of(&c);
        h.values_mut()[i] += 1;
    }
    Ok(h)
}

/// Direct S_{m[v]}(ᾱ) = Q^{-m} Σ_{a ∈ O_v/π^m} ψ(ᾱ(a^k)).
pub fn sz_local_direct(fq: &Field, lf: &LocalForm, k: u32) -> Result<CycQ> {
    let ring = &lf.ring;
    let size = (fq.q() as f64).powi(ring.dim() as i32);
    if size > ORACLE_BUDGET as f64 {
        return budget("direct local sum", format!("{size:e}"), ORACLE_BUDGET);
    }
    let mut counts = vec![0u64; fq.p() as usize];
    for idx in 0..ring.size(fq) {
        let a = ring.element(fq, idx);
        let ak = a.pow_mod(fq, k as u64, &ring.modulus);
        counts[fq.trace(lf.eval(fq, &ak)) as usize] += 1;
    }
    Ok(over_q_power(&from_trace_counts(fq.p(), &counts), fq.q(), ring.dim()))
}

/// Direct S_{m[v]} for every functional on O_v/π^m, indexed by coordinate vector.
pub fn sz_local_direct_all(field: &Arc<Field>, ring: &QuotientRing, k: u32) -> Result<Vec<CycQ>> {
    let h = local_power_histogram(field, ring, k)?;
    Ok(dual_values_all(&h)?
        .iter()
        .map(|c| over_q_power(c, field.q(), ring.dim()))
        .collect())
}

/// S_{m[v]}(ᾱ) by the local recursion: 1 at m = 0, a Gauss sum at m = 1,
/// Q^{-1} for 2 <= m <= k, and Q^{-1} S_{(m-k)[v]}(ᾱ') beyond.
pub fn sz_local(fq: &Field, lf: &LocalForm, k: u32) -> Result<CycQ> {
    if k % fq.p() == 0 {
        return invalid("local recursion needs p ∤ k");
    }
    if !lf.is_nondegenerate() {
        return Err(Error::Degenerate(format!("form degenerate at {:?}", lf.place())));
    }
    let p = fq.p();
    let qv = BigInt::from(fq.q()).pow(lf.ring.deg_v() as u32);
    let inv_qv = BigRational::new(BigInt::from(1), qv);
    let k = k as usize;
    let m = lf.m();
    Ok(if m == 0 {
        CycQ::one(p)
    } else if m == 1 {
        sz_local_direct(fq, lf, k as u32)?
    } else if m <= k {
        CycQ::from_int(p, inv_qv)
    } else {
        sz_local(fq, &lf.shifted(fq, k), k as u32)?.scale(&inv_qv)
    })
}

/// S_Z(ᾱ) as the product of local values.
pub fn sz(fq: &Field, rf: &RestrictedForm, k: u32) -> Result<CycQ> {
    rf.parts
        .iter()
        .try_fold(CycQ::one(fq.p()), |acc, lf| Ok(acc.mul(&sz_local(fq, lf, k)?)))
}

/// S_Z(ᾱ) = q^{-deg Z} Σ_{ā ∈ H^0(Z)} ψ(ᾱ(ā^k)) over the full product of local rings.
pub fn sz_direct(fq: &Field, rf: &RestrictedForm, k: u32) -> Result<CycQ> {
    let dim: usize = rf.parts.iter().map(|lf| lf.ring.dim()).sum();
    let size = (fq.q() as f64).powi(dim as i32);
    if size > ORACLE_BUDGET as f64 {
        return budget("direct S_Z summation", format!("{size:e}"), ORACLE_BUDGET);
    }
    // Per component: histogram of ψ-traces of ᾱ_v(a^k) over a ∈ O_v/π^m.
    let p = fq.p() as usize;
    let mut acc = vec![0u64; p];
    acc[0] = 1;
    for lf in &rf.parts {
        let mut local = vec![0u64; p];
        for idx in 0..lf.ring.size(fq) {
            let a = lf.ring.element(fq, idx);
            let ak = a.pow_mod(fq, k as u64, &lf.ring.modulus);
            local[fq.trace(lf.eval(fq, &ak)) as usize] += 1;
        }
        let mut next = vec![0u64; p];
        for (i, &x) in acc.iter().enumerate() {
            for (j, &y) in local.iter().enumerate() {
                next[(i + j) % p] += x * y;
            }
        }
        acc = next;
    }
    Ok(over_q_power(&from_trace_counts(fq.p(), &acc), fq.q(), dim))
}

/// ψ̄(ᾱ(f)) for a section f.
pub fn psi_bar_of(fq: &Field, x: Fq) -> Cyclotomic {
    char_psi(fq, fq.neg(x))
}

/// Σ_α S_1(α)^s ψ̄(α(f)) for every f, i.e. q^{ke+1} N(f).
pub fn circle_sums_all(field: &Arc<Field>, k: u32, s: u32, e: usize) -> Result<Vec<Cyclotomic>> {
    let fq = &**field;
    let p = fq.p();
    let s1 = s1_all(field, e, k)?;
    let n = k as usize * e + 1;
    let powers: Vec<Cyclotomic> = s1.par_iter().map(|x| x.pow(s)).collect();
    let len = s1.len();
    Ok((0..len)
        .into_par_iter()
        .map(|fi| {
            let f = crate::fourier::coords_of(fq, n, fi);
            let mut buckets = vec![Cyclotomic::zero(p); p as usize];
            for (ai, sp) in powers.iter().enumerate() {
                let a = crate::fourier::coords_of(fq, n, ai);
                let t = fq.trace(dot(fq, &a, &f)) as usize;
                buckets[t] = buckets[t].add(sp);
            }
            buckets
                .iter()
                .enumerate()
                .fold(Cyclotomic::zero(p), |acc, (t, b)| acc.add(&b.mul_zeta((p - t as u32) % p)))
        })
        .collect())
}

/// |x| under the embedding ζ -> e^{2πi/p}.
pub fn magnitude(x: &CycQ) -> f64 {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{Place, Poly};

    #[test]
    fn zero_form_sums() {
        let f = Field::prime(3).unwrap();
        let a = LinearForm::zero(3);
        assert_eq!(s1_direct(&f, &a, 1, 2).unwrap(), Cyclotomic::from_int(3, 9));
    }

    #[test]
    fn gauss_sum_magnitude() {
        let f = Field::prime(5).unwrap();
        let ring = QuotientRing::new(&f, &Place::Finite(Poly::from_ints(&[0, 1])), 1);
        let lf = LocalForm::new(ring, vec![Fq(1)]);
        let v = sz_local(&f, &lf, 2).unwrap();
        assert!((magnitude(&v) - 5f64.powf(-0.5)).abs() < 1e-12);
    }
}
