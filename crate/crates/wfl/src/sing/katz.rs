//! |S_1(α)| <= 3(k+1)^{e+1} q^{(e+1+dim Sing_α)/2} over all α, and the
//! bound dim Sing_α <= max(e+1 - Σ_v ⌈m_v/(k-1)⌉ deg v, 1 + eγ_{k,p}).

use std::sync::Arc;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::arcs::forms::{DivisorCatalog, DivisorP1, LinearForm};
use crate::arcs::sums::s1_all;
use crate::error::{Error, Result};
use crate::ff::Field;

use super::locus::{sing_dim_estimate, Confidence, DimEstimate, SingInstance};

/// Relative slack when comparing a floating magnitude against the bound.
pub const KATZ_TOLERANCE: f64 = 1e-9;

pub fn katz_bound(q: u64, k: u32, e: usize, dim: usize) -> f64 {
    3.0 * ((k + 1) as f64).powi(e as i32 + 1) * (q as f64).powf((e + 1 + dim) as f64 / 2.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct KatzRow {
    pub index: u64,
    /// Degree of the minimal divisor α factors through.
    pub deg: usize,
    pub dim: usize,
    pub confidence: Confidence,
    pub s1_abs: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KatzReport {
    pub q: u64,
    pub k: u32,
    pub e: usize,
    pub m_max: u32,
    pub rows: Vec<KatzRow>,
    pub max_ratio: f64,
    /// Forms with a reliable dimension that break the bound.
    pub violations: Vec<u64>,
    /// Forms whose dimension estimate is unstable; not asserted.
    pub unstable: Vec<u64>,
}

impl KatzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn katz_bound_check(field: &Arc<Field>, e: usize, k: u32, m_max: u32) -> Result<KatzReport> {
    let fq = &**field;
    let n = k as usize * e;
    let q = fq.q() as u64;
    let sums = s1_all(field, e, k)?;
    let catalog = DivisorCatalog::new(fq, n, n / 2 + 1);
    let rows: Vec<KatzRow> = (0..sums.len() as u64)
        .into_par_iter()
        .map(|idx| {
            let alpha = LinearForm::from_index(fq, idx, n + 1);
            let deg = catalog
                .min_degree(fq, &alpha)
                .map(|(d, _)| d)
                .ok_or_else(|| Error::Consistency("form without a divisor of degree <= n/2+1".into()))?;
            let est = sing_dim_estimate(&SingInstance::new(field.clone(), alpha, e, k)?, m_max)?;
            let s1_abs = sums[idx as usize].abs();
            let bound = katz_bound(q, k, e, est.dim);
            Ok(KatzRow {
                index: idx,
                deg,
                dim: est.dim,
                confidence: est.confidence,
                s1_abs,
                bound,
                ratio: s1_abs / bound,
            })
        })
        .collect::<Result<_>>()?;
    let violations = rows
        .iter()
        .filter(|r| r.confidence != Confidence::Unstable && r.s1_abs > r.bound * (1.0 + KATZ_TOLERANCE))
        .map(|r| r.index)
        .collect();
    let unstable = rows
        .iter()
        .filter(|r| r.confidence == Confidence::Unstable)
        .map(|r| r.index)
        .collect();
    let max_ratio = rows
        .iter()
        .filter(|r| r.confidence != Confidence::Unstable)
        .map(|r| r.ratio)
        .fold(0.0, f64::max);
    Ok(KatzReport {
        q,
        k,
        e,
        m_max,
        rows,
        max_ratio,
        violations,
        unstable,
    })
}

#[derive(Clone, Debug)]
pub struct OverallDimReport {
    pub z: DivisorP1,
    /// e + 1 - Σ_v ⌈m_v/(k-1)⌉ deg v.
    pub closed_branch: i64,
    /// 1 + eγ (γ = 0 when k = 2).
    pub open_branch: BigRational,
    pub bound: BigRational,
    pub dim: DimEstimate,
    pub holds: bool,
}

/// Checks dim Sing_α against the bound for the minimal divisor of α.
pub fn overall_dim_bound_check(
    field: &Arc<Field>,
    alpha: &LinearForm,
    e: usize,
    k: u32,
    gamma: &BigRational,
    m_max: u32,
) -> Result<OverallDimReport> {
    let fq = &**field;
    let (_, zs) = crate::arcs::forms::min_degree(fq, alpha)?;
    let z = zs
        .into_iter()
        .next()
        .ok_or_else(|| Error::Consistency("no minimal divisor".into()))?;
    let km1 = k as i64 - 1;
    let used: i64 = z
        .parts()
        .iter()
        .map(|(v, m)| (*m as i64 + km1 - 1) / km1 * v.degree() as i64)
        .sum();
    let closed_branch = e as i64 + 1 - used;
    let open_branch = if k == 2 {
        BigRational::from_integer(1.into())
    } else {
        BigRational::from_integer(1.into()) + BigRational::from_integer((e as i64).into()) * gamma
    };
    let closed = BigRational::from_integer(closed_branch.into());
    let bound = if closed > open_branch { closed } else { open_branch.clone() };
    let dim = sing_dim_estimate(&SingInstance::new(field.clone(), alpha.clone(), e, k)?, m_max)?;
    let holds = BigRational::from_integer((dim.dim as i64).into()) <= bound;
    Ok(OverallDimReport {
        z,
        closed_branch,
        open_branch,
        bound,
        dim,
        holds,
    })
}
