//! Sing_α = {a ∈ H^0(O(e)) : α(a^{k-1} b) = 0 for all b}, counted over F_{q^m}.

use std::sync::Arc;

use rayon::prelude::*;

use crate::arcs::forms::LinearForm;
use crate::error::{budget, invalid, Result};
use crate::ff::linalg::rank;
use crate::ff::{extend_field, Extension, Field, Fq, Poly};

/// Largest number of sections a point count will enumerate.
pub const SING_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug)]
pub struct SingInstance {
    pub field: Arc<Field>,
    pub alpha: LinearForm,
    pub e: usize,
    pub k: u32,
}

impl SingInstance {
    pub fn new(field: Arc<Field>, alpha: LinearForm, e: usize, k: u32) -> Result<Self> {
        if k < 2 {
            return invalid("k must be at least 2");
        }
        if k % field.p() == 0 {
            return invalid("Sing_α needs p ∤ k");
        }
        if alpha.n() != k as usize * e {
            return invalid(format!("α has {} coordinates, expected ke+1 = {}", alpha.coords.len(), k as usize * e + 1));
        }
        Ok(SingInstance { field, alpha, e, k })
    }
}

/// α extended F_{q^m}-linearly, as coordinates in the big field.
pub fn embed_alpha(ext: &Extension, alpha: &LinearForm) -> Vec<Fq> {
    alpha.coords.iter().map(|&c| ext.embed(c)).collect()
}

/// The e+1 values α(a^{k-1} T^i), i = 0..=e.
pub fn sing_conditions(big: &Field, alpha: &[Fq], a: &Poly, e: usize, k: u32) -> Vec<Fq> {
    let pw = a.pow(big, k as u64 - 1);
    (0..=e)
        .map(|i| {
            pw.coeffs()
                .iter()
                .enumerate()
                .fold(Fq::ZERO, |acc, (j, &c)| big.add(acc, big.mul(alpha[i + j], c)))
        })
        .collect()
}

pub fn in_sing(big: &Field, alpha: &[Fq], a: &Poly, e: usize, k: u32) -> bool {
    sing_conditions(big, alpha, a, e, k).iter().all(|x| x.is_zero())
}

/// #Sing_α(F_{q^m}) by enumerating H^0(O(e)) ⊗ F_{q^m}.
pub fn sing_points(inst: &SingInstance, m: u32) -> Result<u128> {
    let ext = extend_field(&inst.field, m)?;
    let big = ext.big.clone();
    let qq = big.q() as u64;
    let total = crate::ff::arith::checked_pow(qq, inst.e as u32 + 1).unwrap_or(u64::MAX);
    if total > SING_BUDGET {
        return budget("Sing point count", total, SING_BUDGET);
    }
    let alpha = embed_alpha(&ext, &inst.alpha);
    let block = total / qq;
    let (e, k) = (inst.e, inst.k);
    Ok((0..qq)
        .into_par_iter()
        .map(|top| {
            (0..block)
                .filter(|&low| {
                    let a = Poly::from_index(&big, top * block + low, e + 1);
                    in_sing(&big, &alpha, &a, e, k)
                })
                .count() as u128
        })
        .sum())
}

/// Hankel matrix (α_{i+j})_{i,j <= e} of the bilinear form (a, b) -> α(ab).
pub fn hankel(alpha: &LinearForm, e: usize) -> Vec<Vec<Fq>> {
    (0..=e).map(|i| (0..=e).map(|j| alpha.coords[i + j]).collect()).collect()
}

/// e + 1 - rank of the Hankel matrix; for k = 2 this is dim Sing_α exactly.
pub fn radical_dim(fq: &Field, alpha: &LinearForm, e: usize) -> usize {
    e + 1 - rank(fq, &hankel(alpha, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    /// From a closed form (α = 0, or k = 2).
    Exact,
    Stable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DimEstimate {
    /// (m, #Sing_α(F_{q^m})).
    pub counts: Vec<(u32, u128)>,
    pub dim: usize,
    pub confidence: Confidence,
}

impl DimEstimate {
    pub fn is_reliable(&self) -> bool {
        self.confidence != Confidence::Unstable
    }
}

fn log_round(count: u128, big_q: f64) -> usize {
    ((count as f64).ln() / big_q.ln()).round().max(0.0) as usize
}

pub fn sing_dim_estimate(inst: &SingInstance, m_max: u32) -> Result<DimEstimate> {
    if m_max < 2 {
        return invalid("dimension estimate needs m_max >= 2");
    }
    let fq = &inst.field;
    let q = fq.q() as u128;
    let exact = if inst.alpha.is_zero() {
        Some(inst.e + 1)
    } else if inst.k == 2 {
        Some(radical_dim(fq, &inst.alpha, inst.e))
    } else {
        None
    };
    if let Some(dim) = exact {
        let counts = (1..=m_max).map(|m| (m, q.pow(m * dim as u32))).collect();
        return Ok(DimEstimate {
            counts,
            dim,
            confidence: Confidence::Exact,
        });
    }
    let counts: Vec<(u32, u128)> = (1..=m_max)
        .map(|m| sing_points(inst, m).map(|c| (m, c)))
        .collect::<Result<_>>()?;
    let est = |m: u32, c: u128| log_round(c, (q as f64).powi(m as i32));
    let (m1, c1) = counts[counts.len() - 2];
    let (m2, c2) = counts[counts.len() - 1];
    let (d1, d2) = (est(m1, c1), est(m2, c2));
    Ok(DimEstimate {
        counts,
        dim: d2.min(inst.e + 1),
        confidence: if d1 == d2 { Confidence::Stable } else { Confidence::Unstable },
    })
}
