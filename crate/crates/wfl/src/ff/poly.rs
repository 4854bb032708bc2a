//! Polynomials over a `Field`, coefficients lowest degree first.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::arith::prime_factors;
use super::field::{Field, Fq};

/// A polynomial in canonical form (no trailing zero coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Fq>", into = "Vec<Fq>")]
pub struct Poly {
    c: Vec<Fq>,
}

impl From<Vec<Fq>> for Poly {
    fn from(c: Vec<Fq>) -> Poly {
        Poly::from_coeffs(c)
    }
}

impl From<Poly> for Vec<Fq> {
    fn from(p: Poly) -> Vec<Fq> {
        p.c
    }
}

/// Degree first, then coefficient vectors compared lowest degree first.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg().cmp(&other.deg()).then_with(|| self.c.cmp(&other.c))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn from_coeffs(mut c: Vec<Fq>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| Fq(x)).collect())
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { c: vec![Fq::ONE] }
    }

    pub fn constant(a: Fq) -> Poly {
        Poly::from_coeffs(vec![a])
    }

    /// The variable T.
    pub fn x() -> Poly {
        Poly {
            c: vec![Fq::ZERO, Fq::ONE],
        }
    }

    pub fn monomial(a: Fq, d: usize) -> Poly {
        let mut c = vec![Fq::ZERO; d + 1];
        c[d] = a;
        Poly::from_coeffs(c)
    }

    /// T - t.
    pub fn linear(fq: &Field, t: Fq) -> Poly {
        Poly::from_coeffs(vec![fq.neg(t), Fq::ONE])
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.c
    }

    /// Coefficient of T^i (zero past the degree).
    pub fn coeff(&self, i: usize) -> Fq {
        self.c.get(i).copied().unwrap_or(Fq::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn lead(&self) -> Fq {
        self.c.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fq::ONE
    }

    /// Coefficients padded with zeros to length `n`; panics if `deg >= n`.
    pub fn padded(&self, n: usize) -> Vec<Fq> {
        assert!(self.c.len() <= n, "polynomial too long for padding");
        let mut v = self.c.clone();
        v.resize(n, Fq::ZERO);
        v
    }

    /// Polynomial whose base-q digits (lowest first) are `idx`, using `len` digits.
    pub fn from_index(fq: &Field, mut idx: u64, len: usize) -> Poly {
        let q = fq.q() as u64;
        let mut c = Vec::with_capacity(len);
        for _ in 0..len {
            c.push(Fq((idx % q) as u32));
            idx /= q;
        }
        Poly::from_coeffs(c)
    }

    pub fn to_index(&self, fq: &Field) -> u64 {
        let q = fq.q() as u64;
        self.c.iter().rev().fold(0, |acc, x| acc * q + x.0 as u64)
    }

    pub fn add(&self, fq: &Field, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::from_coeffs((0..n).map(|i| fq.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, fq: &Field, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::from_coeffs((0..n).map(|i| fq.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self, fq: &Field) -> Poly {
        Poly {
            c: self.c.iter().map(|&x| fq.neg(x)).collect(),
        }
    }

    pub fn scale(&self, fq: &Field, a: Fq) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|&x| fq.mul(x, a)).collect())
    }

    /// Multiply by T^d.
    pub fn shift(&self, d: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fq::ZERO; d];
        c.extend_from_slice(&self.c);
        Poly { c }
    }

    pub fn mul(&self, fq: &Field, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fq::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = fq.add(c[i + j], fq.mul(a, b));
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn pow(&self, fq: &Field, mut e: u64) -> Poly {
        let mut r = Poly::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(fq, &b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(fq, &b);
            }
        }
        r
    }

    /// Quotient and remainder; panics when dividing by zero.
    pub fn divrem(&self, fq: &Field, d: &Poly) -> (Poly, Poly) {
        let dd = d.deg().expect("division by the zero polynomial");
        let Some(sd) = self.deg() else {
            return (Poly::zero(), Poly::zero());
        };
        if sd < dd {
            return (Poly::zero(), self.clone());
        }
        let inv = fq.inv(d.lead());
        let mut r = self.c.clone();
        let mut quo = vec![Fq::ZERO; sd - dd + 1];
        for i in (0..=sd - dd).rev() {
            let t = fq.mul(r[i + dd], inv);
            if t.is_zero() {
                continue;
            }
            quo[i] = t;
            for (j, &b) in d.c.iter().enumerate() {
                r[i + j] = fq.sub(r[i + j], fq.mul(t, b));
            }
        }
        r.truncate(dd);
        (Poly::from_coeffs(quo), Poly::from_coeffs(r))
    }

    pub fn rem(&self, fq: &Field, d: &Poly) -> Poly {
        self.divrem(fq, d).1
    }

    pub fn monic(&self, fq: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(fq, fq.inv(self.lead()))
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, fq: &Field, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(fq, &b);
            a = b;
            b = r;
        }
        a.monic(fq)
    }

    /// Returns (g, s, t) with s·self + t·o = g, g monic.
    pub fn xgcd(&self, fq: &Field, o: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qt, r) = r0.divrem(fq, &r1);
            let s = s0.sub(fq, &qt.mul(fq, &s1));
            let t = t0.sub(fq, &qt.mul(fq, &t1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
            (t0, t1) = (t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = fq.inv(r0.lead());
        (r0.scale(fq, c), s0.scale(fq, c), t0.scale(fq, c))
    }

    /// Inverse modulo `m`, if it exists.
    pub fn inv_mod(&self, fq: &Field, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.xgcd(fq, m);
        if g == Poly::one() {
            Some(s.rem(fq, m))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, fq: &Field, o: &Poly, m: &Poly) -> Poly {
        self.mul(fq, o).rem(fq, m)
    }

    pub fn pow_mod(&self, fq: &Field, mut e: u64, m: &Poly) -> Poly {
        let mut r = Poly::one().rem(fq, m);
        let mut b = self.rem(fq, m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_mod(fq, &b, m);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul_mod(fq, &b, m);
            }
        }
        r
    }

    pub fn eval(&self, fq: &Field, x: Fq) -> Fq {
        self.c
            .iter()
            .rev()
            .fold(Fq::ZERO, |acc, &a| fq.add(fq.mul(acc, x), a))
    }

    pub fn derivative(&self, fq: &Field) -> Poly {
        Poly::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| fq.mul(a, fq.from_int(i as i64)))
                .collect(),
        )
    }

    /// T^n f(1/T) for a polynomial of degree at most `n`.
    pub fn reverse(&self, n: usize) -> Poly {
        let mut c = self.padded(n + 1);
        c.reverse();
        Poly::from_coeffs(c)
    }

    /// Truncation modulo T^r.
    pub fn truncate(&self, r: usize) -> Poly {
        Poly::from_coeffs(self.c.iter().take(r).copied().collect())
    }

    /// x^(q^n) mod self, by repeated q-th powering.
    fn frobenius_power_of_x(&self, fq: &Field, n: usize) -> Poly {
        let mut y = Poly::x().rem(fq, self);
        for _ in 0..n {
            y = y.pow_mod(fq, fq.q() as u64, self);
        }
        y
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self, fq: &Field) -> bool {
        let Some(n) = self.deg() else {
            return false;
        };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let x = Poly::x();
        if self.frobenius_power_of_x(fq, n) != x.rem(fq, self) {
            return false;
        }
        for r in prime_factors(n as u64) {
            let y = self.frobenius_power_of_x(fq, n / r as usize);
            if self.gcd(fq, &y.sub(fq, &x)).deg() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Whether no square of a nonconstant polynomial divides self.
    pub fn is_squarefree(&self, fq: &Field) -> bool {
        match self.deg() {
            None => false,
            Some(0) => true,
            Some(_) => {
                let d = self.derivative(fq);
                if d.is_zero() {
                    // A p-th power in characteristic p.
                    return false;
                }
                self.gcd(fq, &d).deg() == Some(0)
            }
        }
    }
}

/// All monic polynomials of degree `n`, in index order of the lower coefficients.
pub fn monic_polys(fq: &Field, n: usize) -> impl Iterator<Item = Poly> + '_ {
    let count = (fq.q() as u64).pow(n as u32);
    (0..count).map(move |i| {
        let mut c = Poly::from_index(fq, i, n).padded(n);
        c.push(Fq::ONE);
        Poly::from_coeffs(c)
    })
}

/// Factorization into monic irreducibles with multiplicities (trial division).
pub fn factor(fq: &Field, f: &Poly) -> Vec<(Poly, u32)> {
    let mut rest = f.monic(fq);
    let mut out = Vec::new();
    let mut d = 1;
    while rest.deg().unwrap_or(0) > 0 {
        if 2 * d > rest.deg().unwrap() {
            out.push((rest.clone(), 1));
            break;
        }
        for cand in monic_polys(fq, d) {
            if !cand.is_irreducible(fq) {
                continue;
            }
            let mut mult = 0;
            loop {
                let (qt, r) = rest.divrem(fq, &cand);
                if !r.is_zero() {
                    break;
                }
                rest = qt;
                mult += 1;
            }
            if mult > 0 {
                out.push((cand, mult));
            }
        }
        d += 1;
    }
    out.sort();
    out
}
