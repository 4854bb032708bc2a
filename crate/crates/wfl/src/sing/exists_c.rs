//! The (a, c) description of Sing_α: a ∈ Sing_α iff some c = g dT / F in
//! H^0(K(Z) ⊗ O(-e)) restricts on Z to α̃ a^{k-1}.
//!
//! With F the finite part of Z and D = deg Z - e - 2, c ranges over g of degree <= D.
//! At the finite places the condition is g ≡ a^{k-1} W (mod F), W the CRT lift of
//! the local kernels times F/π^m. At ∞ it fixes the top m_∞ coefficients of g:
//! u^D g(1/u) ≡ -F_rev a_∞^{k-1} w_∞ (mod u^{m_∞}).

use crate::arcs::forms::DivisorP1;
use crate::arcs::residue::ResidueForm;
use crate::ff::linalg::solve;
use crate::ff::{Extension, Field, Fq, Place, Poly};

/// α̃ packaged as global data over the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CKernel {
    pub z: DivisorP1,
    /// Finite part of Z, as a monic polynomial.
    pub f: Poly,
    /// Σ_v w_v F/π_v^{m_v} mod F.
    pub w: Poly,
    pub m_inf: usize,
    /// Kernel at ∞, in u.
    pub w_inf: Poly,
}

pub fn c_kernel(fq: &Field, rf: &ResidueForm) -> CKernel {
    let f = rf.z.finite_poly(fq);
    let mut w = Poly::zero();
    let mut w_inf = Poly::zero();
    for lk in &rf.parts {
        match lk.ring.place {
            Place::Infinity => w_inf = lk.w.clone(),
            Place::Finite(_) => {
                let cof = f.divrem(fq, &lk.ring.modulus).0;
                w = w.add(fq, &lk.w.mul(fq, &cof));
            }
        }
    }
    CKernel {
        z: rf.z.clone(),
        w: w.rem(fq, &f),
        f,
        m_inf: rf.z.m_inf() as usize,
        w_inf,
    }
}

/// The numerator g of some c with c|_Z = α̃ a^{k-1}, if one exists; `a` has
/// coefficients in `ext.big`.
pub fn solve_c(ext: &Extension, ck: &CKernel, a: &Poly, e: usize, k: u32) -> Option<Poly> {
    let big = &*ext.big;
    let f = ext.embed_poly(&ck.f);
    let df = ck.f.deg().unwrap_or(0);
    let pw = a.pow(big, k as u64 - 1);
    let r = pw.mul(big, &ext.embed_poly(&ck.w)).rem(big, &f);
    let mi = ck.m_inf;
    let a_inf = a.reverse(e).truncate(mi);
    let f_rev = f.reverse(df);
    let s_inf = f_rev
        .mul(big, &a_inf.pow(big, k as u64 - 1))
        .mul(big, &ext.embed_poly(&ck.w_inf))
        .truncate(mi)
        .neg(big);
    let d = ck.z.degree() as i64 - e as i64 - 2;
    if d < 0 {
        return (r.is_zero() && s_inf.is_zero()).then(Poly::zero);
    }
    let cols = d as usize + 1;
    let mut rows = Vec::with_capacity(df + mi);
    let mut rhs = Vec::with_capacity(df + mi);
    // g mod F = r, one row per coefficient of the remainder
    let reduced: Vec<Vec<Fq>> = (0..cols)
        .map(|j| Poly::monomial(Fq::ONE, j).rem(big, &f).padded(df))
        .collect();
    for i in 0..df {
        rows.push((0..cols).map(|j| reduced[j][i]).collect());
        rhs.push(r.coeff(i));
    }
    // coefficient of u^i in u^D g(1/u) is g_{D-i}
    for i in 0..mi {
        let mut row = vec![Fq::ZERO; cols];
        if i < cols {
            row[cols - 1 - i] = Fq::ONE;
        }
        rows.push(row);
        rhs.push(s_inf.coeff(i));
    }
    if rows.is_empty() {
        return Some(Poly::zero());
    }
    solve(big, &rows, &rhs, cols).map(Poly::from_coeffs)
}

pub fn exists_c_check(ext: &Extension, a: &Poly, rf: &ResidueForm, e: usize, k: u32) -> bool {
    solve_c(ext, &c_kernel(&ext.base, rf), a, e, k).is_some()
}
