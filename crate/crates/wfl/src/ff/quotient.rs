//! Local rings O_v / π^r at a place of P^1.
//!
//! Local coordinates use the F_q-basis T^i π^j (i < deg v, j < r), stored at
//! index `j * deg v + i`. At infinity π = u = 1/T and deg v = 1.

use super::field::{Field, Fq};
use super::places::Place;
use super::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRing {
    pub place: Place,
    pub r: usize,
    pub pi: Poly,
    pub modulus: Poly,
    dv: usize,
}

impl QuotientRing {
    pub fn new(fq: &Field, place: &Place, r: usize) -> QuotientRing {
        let pi = match place {
            Place::Finite(p) => p.clone(),
            Place::Infinity => Poly::x(),
        };
        let modulus = pi.pow(fq, r as u64);
        QuotientRing {
            place: place.clone(),
            r,
            dv: place.degree(),
            pi,
            modulus,
        }
    }

    pub fn deg_v(&self) -> usize {
        self.dv
    }

    /// Dimension over F_q.
    pub fn dim(&self) -> usize {
        self.r * self.dv
    }

    pub fn size(&self, fq: &Field) -> u64 {
        (fq.q() as u64).pow(self.dim() as u32)
    }

    pub fn reduce(&self, fq: &Field, f: &Poly) -> Poly {
        f.rem(fq, &self.modulus)
    }

    pub fn mul(&self, fq: &Field, a: &Poly, b: &Poly) -> Poly {
        a.mul_mod(fq, b, &self.modulus)
    }

    pub fn is_unit(&self, fq: &Field, a: &Poly) -> bool {
        self.r == 0 || !a.rem(fq, &self.pi).is_zero()
    }

    pub fn inv(&self, fq: &Field, a: &Poly) -> Option<Poly> {
        a.inv_mod(fq, &self.modulus)
    }

    pub fn coords(&self, fq: &Field, a: &Poly) -> Vec<Fq> {
        let mut out = vec![Fq::ZERO; self.dim()];
        let mut rest = self.reduce(fq, a);
        for j in 0..self.r {
            let (qt, rem) = rest.divrem(fq, &self.pi);
            for i in 0..self.dv {
                out[j * self.dv + i] = rem.coeff(i);
            }
            rest = qt;
        }
        out
    }

    pub fn from_coords(&self, fq: &Field, c: &[Fq]) -> Poly {
        assert_eq!(c.len(), self.dim());
        let mut acc = Poly::zero();
        for j in (0..self.r).rev() {
            let digit = Poly::from_coeffs(c[j * self.dv..(j + 1) * self.dv].to_vec());
            acc = acc.mul(fq, &self.pi).add(fq, &digit);
        }
        acc
    }

    /// Element whose coordinates are the base-q digits of `idx`.
    pub fn element(&self, fq: &Field, mut idx: u64) -> Poly {
        let q = fq.q() as u64;
        let c: Vec<Fq> = (0..self.dim())
            .map(|_| {
                let d = Fq((idx % q) as u32);
                idx /= q;
                d
            })
            .collect();
        self.from_coords(fq, &c)
    }

    /// Image of a global section of O(n) (a polynomial of degree <= n).
    /// At infinity the section is trivialized as u^n f(1/u).
    pub fn restrict_section(&self, fq: &Field, f: &Poly, n: usize) -> Poly {
        match self.place {
            Place::Finite(_) => self.reduce(fq, f),
            Place::Infinity => f.reverse(n).truncate(self.r),
        }
    }

    /// Valuation of a (local) polynomial, capped at `cap`.
    pub fn valuation(&self, fq: &Field, f: &Poly, cap: usize) -> usize {
        let mut rest = f.clone();
        let mut v = 0;
        while v < cap {
            let (qt, rem) = rest.divrem(fq, &self.pi);
            if !rem.is_zero() {
                break;
            }
            rest = qt;
            v += 1;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coords_roundtrip() {
        let f = Field::prime(3).unwrap();
        let pl = Place::Finite(Poly::from_ints(&[1, 0, 1]));
        let ring = QuotientRing::new(&f, &pl, 2);
        for idx in 0..ring.size(&f) {
            let a = ring.element(&f, idx);
            assert!(a.deg().map_or(true, |d| d < 4));
            let c = ring.coords(&f, &a);
            assert_eq!(ring.from_coords(&f, &c), a);
        }
    }

    #[test]
    fn infinity_restriction() {
        let f = Field::prime(5).unwrap();
        let ring = QuotientRing::new(&f, &Place::Infinity, 2);
        // T^2 as a section of O(2) is u^0 = 1 near infinity.
        let t2 = Poly::from_ints(&[0, 0, 1]);
        assert_eq!(ring.restrict_section(&f, &t2, 2), Poly::one());
        assert_eq!(ring.restrict_section(&f, &Poly::one(), 2), Poly::zero());
    }
}
