//! Residue kernels: ᾱ_v(a) = res_v(a·w_v) for a local section w_v.
//!
//! The local residue of h ∈ O_v/π^m (against dπ/π^m) is the T^{deg v - 1}
//! coefficient of the π^{m-1} digit of h; at ∞ it is the u^{m-1} coefficient.

use crate::ff::linalg::solve;
use crate::ff::{Field, Fq, Poly, QuotientRing};

use super::forms::{DivisorP1, LocalForm, RestrictedForm};

pub fn local_residue(fq: &Field, ring: &QuotientRing, h: &Poly) -> Fq {
    if ring.r == 0 {
        return Fq::ZERO;
    }
    let dv = ring.deg_v();
    ring.coords(fq, h)[(ring.r - 1) * dv + dv - 1]
}

/// Gram matrix of (a, b) -> res(ab) on the coordinate basis.
pub fn residue_pairing(fq: &Field, ring: &QuotientRing) -> Vec<Vec<Fq>> {
    let d = ring.dim();
    let basis: Vec<Poly> = (0..d)
        .map(|i| {
            let mut c = vec![Fq::ZERO; d];
            c[i] = Fq::ONE;
            ring.from_coords(fq, &c)
        })
        .collect();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| local_residue(fq, ring, &ring.mul(fq, &basis[i], &basis[j])))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalKernel {
    pub ring: QuotientRing,
    pub w: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueForm {
    pub z: DivisorP1,
    pub n: usize,
    pub parts: Vec<LocalKernel>,
    pub invertible: bool,
}

impl ResidueForm {
    /// The functional a -> Σ_v res_v(a w_v), in local coordinates.
    pub fn to_restricted(&self, fq: &Field) -> RestrictedForm {
        let parts = self
            .parts
            .iter()
            .map(|lk| {
                let ring = &lk.ring;
                let coords = (0..ring.dim())
                    .map(|i| {
                        let mut c = vec![Fq::ZERO; ring.dim()];
                        c[i] = Fq::ONE;
                        let e = ring.from_coords(fq, &c);
                        local_residue(fq, ring, &ring.mul(fq, &e, &lk.w))
                    })
                    .collect();
                LocalForm::new(ring.clone(), coords)
            })
            .collect();
        RestrictedForm {
            z: self.z.clone(),
            n: self.n,
            parts,
        }
    }
}

/// The unique residue kernel α̃ of ᾱ.
pub fn tilde_alpha(fq: &Field, rf: &RestrictedForm) -> ResidueForm {
    let parts: Vec<LocalKernel> = rf
        .parts
        .iter()
        .map(|lf| {
            let ring = lf.ring.clone();
            let gram = residue_pairing(fq, &ring);
            let w = solve(fq, &gram, &lf.coords, ring.dim()).expect("residue pairing is perfect");
            LocalKernel {
                w: ring.from_coords(fq, &w),
                ring,
            }
        })
        .collect();
    let invertible = parts.iter().all(|lk| lk.ring.is_unit(fq, &lk.w));
    ResidueForm {
        z: rf.z.clone(),
        n: rf.n,
        parts,
        invertible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Place;

    #[test]
    fn dual_basis_at_degree_one_point() {
        let f = Field::prime(5).unwrap();
        let ring = QuotientRing::new(&f, &Place::Finite(Poly::from_ints(&[3, 1])), 3);
        let pi = ring.pi.clone();
        for i in 0..3 {
            for j in 1..=3 {
                let h = pi.pow(&f, i).mul(&f, &pi.pow(&f, 3 - j));
                let want = if j == i as u64 + 1 { Fq::ONE } else { Fq::ZERO };
                assert_eq!(local_residue(&f, &ring, &ring.reduce(&f, &h)), want);
            }
        }
    }
}
