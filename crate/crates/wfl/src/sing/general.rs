//! Sing^F_α = {(a_0..a_n) : α(b ∂F/∂x_i(a)) = 0 for all b, i} for a form F
//! of degree d in n+1 variables, with α on sections of O(de).

use std::sync::Arc;

use rayon::prelude::*;

use crate::arcs::forms::LinearForm;
use crate::error::{budget, invalid, Result};
use crate::ff::arith::checked_pow;
use crate::ff::{extend_field, Extension, Field, Fq, Poly};

use super::locus::{embed_alpha, SING_BUDGET};

/// Homogeneous polynomial as (coefficient, exponent vector) terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousForm {
    pub nvars: usize,
    pub degree: u32,
    pub terms: Vec<(Fq, Vec<u32>)>,
}

impl HomogeneousForm {
    pub fn new(nvars: usize, terms: Vec<(Fq, Vec<u32>)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().filter(|(c, _)| !c.is_zero()).collect();
        let Some((_, first)) = terms.first() else {
            return invalid("form has no terms");
        };
        let degree: u32 = first.iter().sum();
        for (_, ex) in &terms {
            if ex.len() != nvars || ex.iter().sum::<u32>() != degree {
                return invalid("terms are not homogeneous of one degree in nvars variables");
            }
        }
        Ok(HomogeneousForm { nvars, degree, terms })
    }

    /// Σ x_i^d.
    pub fn diagonal(nvars: usize, d: u32) -> Self {
        let terms = (0..nvars)
            .map(|i| {
                let mut ex = vec![0; nvars];
                ex[i] = d;
                (Fq::ONE, ex)
            })
            .collect();
        HomogeneousForm { nvars, degree: d, terms }
    }

    /// ∂F/∂x_i, as a term list (possibly empty).
    pub fn partial(&self, fq: &Field, i: usize) -> Vec<(Fq, Vec<u32>)> {
        self.terms
            .iter()
            .filter(|(_, ex)| ex[i] > 0)
            .filter_map(|(c, ex)| {
                let c2 = fq.mul(*c, fq.from_int(ex[i] as i64));
                let mut ex2 = ex.clone();
                ex2[i] -= 1;
                (!c2.is_zero()).then_some((c2, ex2))
            })
            .collect()
    }

    fn embed_terms(ext: &Extension, terms: &[(Fq, Vec<u32>)]) -> Vec<(Fq, Vec<u32>)> {
        terms.iter().map(|(c, ex)| (ext.embed(*c), ex.clone())).collect()
    }
}

fn eval_terms_at(big: &Field, terms: &[(Fq, Vec<u32>)], x: &[Fq]) -> Fq {
    terms.iter().fold(Fq::ZERO, |acc, (c, ex)| {
        let m = ex
            .iter()
            .zip(x)
            .fold(*c, |m, (&k, &xi)| big.mul(m, big.pow(xi, k as u64)));
        big.add(acc, m)
    })
}

fn eval_terms_poly(big: &Field, terms: &[(Fq, Vec<u32>)], a: &[Poly]) -> Poly {
    terms.iter().fold(Poly::zero(), |acc, (c, ex)| {
        let m = ex
            .iter()
            .zip(a)
            .fold(Poly::constant(*c), |m, (&k, ai)| m.mul(big, &ai.pow(big, k as u64)));
        acc.add(big, &m)
    })
}

/// Whether ∇F has no common nonzero zero over F_{q^m} for m = 1..=m_max.
/// A heuristic for smoothness over the algebraic closure.
pub fn is_smooth_up_to(base: &Arc<Field>, form: &HomogeneousForm, m_max: u32) -> Result<bool> {
    if form.degree % base.p() == 0 {
        return invalid("need p ∤ d");
    }
    for m in 1..=m_max {
        let ext = extend_field(base, m)?;
        let big = &*ext.big;
        let qq = big.q() as u64;
        let total = checked_pow(qq, form.nvars as u32).unwrap_or(u64::MAX);
        if total > SING_BUDGET {
            return budget("gradient zero search", total, SING_BUDGET);
        }
        let grads: Vec<_> = (0..form.nvars)
            .map(|i| HomogeneousForm::embed_terms(&ext, &form.partial(base, i)))
            .collect();
        let hit = (1..total).into_par_iter().any(|idx| {
            let x = Poly::from_index(big, idx, form.nvars).padded(form.nvars);
            grads.iter().all(|g| eval_terms_at(big, g, &x).is_zero())
        });
        if hit {
            return Ok(false);
        }
    }
    Ok(true)
}

/// #Sing^F_α(F_{q^m}) by enumerating (H^0(O(e)) ⊗ F_{q^m})^{n+1}.
pub fn sing_general_f(base: &Arc<Field>, form: &HomogeneousForm, alpha: &LinearForm, e: usize, m: u32) -> Result<u128> {
    let d = form.degree as usize;
    if alpha.n() != d * e {
        return invalid(format!("α must act on sections of O(de), de = {}", d * e));
    }
    let ext = extend_field(base, m)?;
    let big = ext.big.clone();
    let qq = big.q() as u64;
    let nv = form.nvars;
    let total = checked_pow(qq, (nv * (e + 1)) as u32).unwrap_or(u64::MAX);
    if total > SING_BUDGET {
        return budget("Sing^F point count", total, SING_BUDGET);
    }
    let alpha = embed_alpha(&ext, alpha);
    let grads: Vec<_> = (0..nv)
        .map(|i| HomogeneousForm::embed_terms(&ext, &form.partial(base, i)))
        .collect();
    let per = checked_pow(qq, e as u32 + 1).expect("within budget");
    Ok((0..total)
        .into_par_iter()
        .filter(|&idx| {
            let mut rest = idx;
            let a: Vec<Poly> = (0..nv)
                .map(|_| {
                    let p = Poly::from_index(&big, rest % per, e + 1);
                    rest /= per;
                    p
                })
                .collect();
            grads.iter().all(|g| {
                let h = eval_terms_poly(&big, g, &a);
                (0..=e).all(|i| {
                    h.coeffs()
                        .iter()
                        .enumerate()
                        .fold(Fq::ZERO, |acc, (j, &c)| big.add(acc, big.mul(alpha[i + j], c)))
                        .is_zero()
                })
            })
        })
        .count() as u128)
}
