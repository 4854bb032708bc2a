//! The truncated local expansion
//! Σ_{m<=r} Σ_{nondegenerate ᾱ on m[v]} S_{m[v]}(ᾱ)^s ψ̄(ᾱ(f)) = N_r(f)/Q^{r(s-1)}.

use std::sync::Arc;

use num_rational::BigRational;

use crate::arcs::forms::LocalForm;
use crate::arcs::sums::{psi_bar_of, sz_local};
use crate::error::Result;
use crate::ff::{CycQ, Field, Place, Poly, QuotientRing};

use super::local::ell_v_truncated;

/// Both sides of the identity; f is local at v (in u at ∞).
pub fn local_expansion_sides(
    field: &Arc<Field>,
    place: &Place,
    f: &Poly,
    s: u32,
    k: u32,
    r: usize,
) -> Result<(CycQ, BigRational)> {
    let fq = &**field;
    let mut lhs = CycQ::zero(fq.p());
    for m in 0..=r {
        let ring = QuotientRing::new(fq, place, m);
        for idx in 0..ring.size(fq) {
            let coords = Poly::from_index(fq, idx, ring.dim()).padded(ring.dim());
            let lf = LocalForm::new(ring.clone(), coords);
            if !lf.is_nondegenerate() {
                continue;
            }
            let term = sz_local(fq, &lf, k)?.pow(s);
            lhs = lhs.add(&term.mul(&psi_bar_of(fq, lf.eval(fq, f)).to_rational()));
        }
    }
    Ok((lhs, ell_v_truncated(field, place, f, s, k, r)?))
}
