//! Exact elements of Z[ζ_p] (and Q(ζ_p)) on the basis ζ^0, .., ζ^{p-2}.

use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

use super::field::{Field, Fq};

/// Element of Z[ζ_p] or Q(ζ_p), depending on the coefficient type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyc<T> {
    p: u32,
    coords: Vec<T>,
}

pub type Cyclotomic = Cyc<i128>;
pub type CycQ = Cyc<BigRational>;

pub trait Coef: Num + Neg<Output = Self> + Clone + ToPrimitive {}
impl<T: Num + Neg<Output = T> + Clone + ToPrimitive> Coef for T {}

impl<T: Coef> Cyc<T> {
    pub fn zero(p: u32) -> Self {
        Cyc {
            p,
            coords: vec![T::zero(); p as usize - 1],
        }
    }

    pub fn from_int(p: u32, c: T) -> Self {
        let mut z = Self::zero(p);
        z.coords[0] = c;
        z
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, T::one())
    }

    /// ζ^t.
    pub fn zeta_pow(p: u32, t: u32) -> Self {
        let mut full = vec![T::zero(); p as usize];
        full[(t % p) as usize] = T::one();
        Self::reduce(p, full)
    }

    /// Σ_t n_t ζ^t for a length-p vector (exponents taken mod p).
    pub fn from_exponent_counts(p: u32, counts: Vec<T>) -> Self {
        assert_eq!(counts.len(), p as usize);
        Self::reduce(p, counts)
    }

    pub fn from_coords(p: u32, coords: Vec<T>) -> Self {
        assert_eq!(coords.len(), p as usize - 1);
        Cyc { p, coords }
    }

    fn reduce(p: u32, mut full: Vec<T>) -> Self {
        let top = full.pop().expect("length p");
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c = c.clone() - top.clone();
            }
        }
        Cyc { p, coords: full }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// The rational integer this equals, if any.
    pub fn as_rational(&self) -> Option<T> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        Cyc {
            p: self.p,
            coords: self
                .coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        Cyc {
            p: self.p,
            coords: self
                .coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Cyc {
            p: self.p,
            coords: self.coords.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Cyc {
            p: self.p,
            coords: self.coords.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let p = self.p as usize;
        let mut full = vec![T::zero(); p];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = (i + j) % p;
                full[t] = full[t].clone() + a.clone() * b.clone();
            }
        }
        Self::reduce(self.p, full)
    }

    /// Multiply by ζ^t.
    pub fn mul_zeta(&self, t: u32) -> Self {
        let p = self.p as usize;
        let mut full = vec![T::zero(); p];
        for (i, a) in self.coords.iter().enumerate() {
            full[(i + t as usize) % p] = a.clone();
        }
        Self::reduce(self.p, full)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut r = Self::one(self.p);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// Image under ζ -> ζ^{-1}.
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let mut full = vec![T::zero(); p];
        for (i, a) in self.coords.iter().enumerate() {
            full[(p - i) % p] = a.clone();
        }
        Self::reduce(self.p, full)
    }

    /// Complex embedding ζ -> exp(2πi/p), as (re, im).
    pub fn to_complex(&self) -> (f64, f64) {
        let p = self.p as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, a) in self.coords.iter().enumerate() {
            let v = a.to_f64().expect("coordinate fits f64");
            let th = 2.0 * std::f64::consts::PI * i as f64 / p;
            re += v * th.cos();
            im += v * th.sin();
        }
        (re, im)
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }

    /// |x|^2 = x·conj(x) when it lies in Q (it is always real, not always rational).
    pub fn norm_sq(&self) -> Option<T> {
        self.mul(&self.conj()).as_rational()
    }
}

impl Cyclotomic {
    pub fn to_rational(&self) -> CycQ {
        Cyc {
            p: self.p,
            coords: self
                .coords
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        }
    }
}

/// The additive character ψ(x) = ζ_p^{Tr(x)}.
pub fn char_psi<T: Coef>(fq: &Field, x: Fq) -> Cyc<T> {
    Cyc::zeta_pow(fq.p(), fq.trace(x))
}
