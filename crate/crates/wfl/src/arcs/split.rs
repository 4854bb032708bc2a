//! Major/minor classification of all forms and the divisor-side decompositions.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{budget, invalid, Error, Result};
use crate::ff::{CycQ, Field, Poly};

use super::forms::{
    divisors_of_degree, nondegenerate_count, nondegenerate_forms, restrict, DivisorCatalog, DivisorP1, LinearForm,
};
use super::sums::{over_q_power, psi_bar_of, s1_all, sz};

/// Largest number of forms arc_split will enumerate.
pub const ARC_BUDGET: u64 = 1 << 20;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ArcRecord {
    pub index: u64,
    pub deg: usize,
    pub minimal_divisors: usize,
    pub major: bool,
}

/// The k = 2 decomposition by divisors with deg(Z ∪ ∞) <= e + 1.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuadraticReport {
    /// Forms with exactly one such (Z, nondegenerate ᾱ).
    pub unique: u64,
    /// Forms factoring through some Z with deg(Z ∪ ∞) = e + 1.
    pub reach_top: u64,
    /// Σ_Z #{nondegenerate ᾱ} over those Z; equals q^{2e+1} when the decomposition is a bijection.
    pub tally: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ArcReport {
    pub q: u32,
    pub k: u32,
    pub e: usize,
    pub total: u64,
    pub major: u64,
    pub minor: u64,
    pub by_degree: BTreeMap<usize, u64>,
    /// Σ_{deg Z <= e+1} #{nondegenerate ᾱ on Z}.
    pub divisor_tally: u128,
    /// Only meaningful for k >= 3, where minimal divisors of major forms are unique.
    pub tally_matches: Option<bool>,
    pub quadratic: Option<QuadraticReport>,
    pub records: Vec<ArcRecord>,
}

fn total_forms(fq: &Field, n: usize) -> Result<u64> {
    let total = (fq.q() as f64).powi(n as i32 + 1);
    if total > ARC_BUDGET as f64 {
        return budget("arc enumeration", format!("{total:e}"), ARC_BUDGET);
    }
    Ok((fq.q() as u64).pow(n as u32 + 1))
}

/// Divisors Z with deg(Z ∪ ∞) <= d.
pub fn divisors_with_infinity_bound(fq: &Field, d: usize) -> Vec<DivisorP1> {
    (0..=d)
        .flat_map(|j| divisors_of_degree(fq, j))
        .filter(|z| z.union_infinity().degree() <= d)
        .collect()
}

pub fn arc_split(fq: &Field, e: usize, k: u32) -> Result<ArcReport> {
    let n = k as usize * e;
    let total = total_forms(fq, n)?;
    let d_max = (n / 2 + 1).max(e + 1);
    let catalog = DivisorCatalog::new(fq, n, d_max);
    let records: Vec<ArcRecord> = (0..total)
        .into_par_iter()
        .map(|i| {
            let alpha = LinearForm::from_index(fq, i, n + 1);
            let (deg, zs) = catalog
                .min_degree(fq, &alpha)
                .expect("every form factors through a divisor of degree <= ke/2 + 1");
            assert!(deg <= n / 2 + 1, "form {i} has degree {deg} > ke/2 + 1");
            ArcRecord {
                index: i,
                deg,
                minimal_divisors: zs.len(),
                major: deg <= e + 1,
            }
        })
        .collect();
    let major = records.iter().filter(|r| r.major).count() as u64;
    let mut by_degree = BTreeMap::new();
    for r in &records {
        *by_degree.entry(r.deg).or_insert(0) += 1;
    }
    let divisor_tally: u128 = (0..=e + 1)
        .flat_map(|d| divisors_of_degree(fq, d))
        .map(|z| nondegenerate_count(fq, &z))
        .sum();
    let tally_matches = (k >= 3).then_some(divisor_tally == major as u128);
    if tally_matches == Some(false) {
        return Err(Error::Consistency(format!(
            "major arcs {major} but divisor tally {divisor_tally}"
        )));
    }
    let quadratic = if k == 2 { Some(quadratic_decomposition(fq, e)?) } else { None };
    Ok(ArcReport {
        q: fq.q(),
        k,
        e,
        total,
        major,
        minor: total - major,
        by_degree,
        divisor_tally,
        tally_matches,
        quadratic,
        records,
    })
}

pub fn quadratic_decomposition(fq: &Field, e: usize) -> Result<QuadraticReport> {
    let n = 2 * e;
    let total = total_forms(fq, n)?;
    let zs = divisors_with_infinity_bound(fq, e + 1);
    let tally: u128 = zs.iter().map(|z| nondegenerate_count(fq, z)).sum();
    let (unique, reach_top) = (0..total)
        .into_par_iter()
        .map(|i| {
            let alpha = LinearForm::from_index(fq, i, n + 1);
            let mut hits = 0;
            let mut top = false;
            for z in &zs {
                if let Some(rf) = restrict(fq, &alpha, z) {
                    if rf.is_nondegenerate() {
                        hits += 1;
                    }
                    top |= z.union_infinity().degree() == e + 1;
                }
            }
            ((hits == 1) as u64, top as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(QuadraticReport {
        unique,
        reach_top,
        tally,
    })
}

/// Both sides of the finite major-arc identity at a target f:
/// q^{-(ke+1)} Σ_{major α} S_1(α)^s ψ̄(α(f)) and
/// q^{s(e+1)-(ke+1)} Σ_Z Σ_{nondegenerate ᾱ} S_Z(ᾱ)^s ψ̄(ᾱ(f)),
/// with Z over deg Z <= e+1 (k >= 3) or deg(Z ∪ ∞) <= e+1 (k = 2).
pub fn major_arc_sides(field: &Arc<Field>, k: u32, s: u32, e: usize, f: &Poly) -> Result<(CycQ, CycQ)> {
    let fq = &**field;
    if k < 2 || k % fq.p() == 0 {
        return invalid("need k >= 2 and p ∤ k");
    }
    let n = k as usize * e;
    let total = total_forms(fq, n)?;
    let p = fq.p();
    let s1 = s1_all(field, e, k)?;
    let catalog = DivisorCatalog::new(fq, n, e + 1);
    let mut lhs = crate::ff::Cyclotomic::zero(p);
    for i in 0..total {
        let alpha = LinearForm::from_index(fq, i, n + 1);
        if catalog.min_degree(fq, &alpha).is_none() {
            continue;
        }
        let term = s1[i as usize].pow(s).mul(&psi_bar_of(fq, alpha.eval(fq, f)));
        lhs = lhs.add(&term);
    }
    let lhs = over_q_power(&lhs, fq.q(), n + 1);

    let zs: Vec<DivisorP1> = if k == 2 {
        divisors_with_infinity_bound(fq, e + 1)
    } else {
        (0..=e + 1).flat_map(|d| divisors_of_degree(fq, d)).collect()
    };
    let mut rhs = CycQ::zero(p);
    for z in &zs {
        for rf in nondegenerate_forms(fq, z, n) {
            let v = sz(fq, &rf, k)?.pow(s);
            let psi = psi_bar_of(fq, rf.eval_section(fq, f)).to_rational();
            rhs = rhs.add(&v.mul(&psi));
        }
    }
    let scale = BigRational::from_integer(BigInt::from(fq.q())).pow(s as i32 * (e as i32 + 1) - (n as i32 + 1));
    Ok((lhs, rhs.scale(&scale)))
}
