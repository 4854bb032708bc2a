//! The finite field F_q, q = p^f.
//!
//! Elements are indices in `[0, q)` whose base-p digits are the coefficients of
//! the polynomial-basis representation, constant term first. Multiplication
//! and addition go through exp/log and Zech tables when f > 1.

use serde::{Deserialize, Serialize};

use super::arith::{is_prime, prime_factors};
use super::poly::Poly;
use crate::error::{invalid, Result};

/// Largest supported field size.
pub const MAX_Q: u32 = 1 << 16;

const NONE: u32 = u32::MAX;

/// An element of some `Field`. The field itself is carried by context.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Serializable description of a field: `{p, f, modulus}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub f: u32,
    /// Monic modulus over F_p, lowest degree first, length f+1.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn prime(p: u32) -> FieldSpec {
        FieldSpec {
            p,
            f: 1,
            modulus: vec![0, 1],
        }
    }

    /// The spec using the least monic irreducible of degree f, where
    /// coefficient vectors (constant term first) are compared lexicographically.
    pub fn standard(p: u32, f: u32) -> Result<FieldSpec> {
        if !is_prime(p as u64) {
            return invalid(format!("p = {p} is not prime"));
        }
        if f == 0 {
            return invalid("extension degree must be at least 1");
        }
        if f == 1 {
            return Ok(FieldSpec::prime(p));
        }
        let size = (p as u64).checked_pow(f).filter(|&x| x <= MAX_Q as u64);
        let Some(count) = size else {
            return invalid(format!("q = {p}^{f} exceeds the 2^16 cap"));
        };
        let fp = Field::new(&FieldSpec::prime(p))?;
        // Enumerate with c_0 as the most significant digit so the first hit is
        // the lexicographic minimum.
        for idx in 0..count {
            let mut digits = vec![0u32; f as usize];
            let mut t = idx;
            for i in (0..f as usize).rev() {
                digits[i] = (t % p as u64) as u32;
                t /= p as u64;
            }
            let mut coeffs: Vec<Fq> = digits.iter().map(|&d| Fq(d)).collect();
            coeffs.push(Fq::ONE);
            let m = Poly::from_coeffs(coeffs);
            if m.is_irreducible(&fp) {
                digits.push(1);
                return Ok(FieldSpec { p, f, modulus: digits });
            }
        }
        unreachable!("an irreducible of every degree exists")
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.f)
    }
}

/// A finite field with precomputed tables. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    p: u32,
    f: u32,
    q: u32,
    pw: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    tr: Vec<u32>,
}

impl Field {
    pub fn new(spec: &FieldSpec) -> Result<Field> {
        let (p, f) = (spec.p, spec.f);
        if !is_prime(p as u64) {
            return invalid(format!("p = {p} is not prime"));
        }
        if f == 0 {
            return invalid("extension degree must be at least 1");
        }
        let q = match (p as u64).checked_pow(f) {
            Some(q) if q <= MAX_Q as u64 => q as u32,
            _ => return invalid(format!("q = {p}^{f} exceeds the 2^16 cap")),
        };
        if f > 1 {
            if spec.modulus.len() != f as usize + 1 || spec.modulus[f as usize] != 1 {
                return invalid("modulus must be monic of degree f");
            }
            if spec.modulus.iter().any(|&c| c >= p) {
                return invalid("modulus coefficients must lie in [0, p)");
            }
            let fp = Field::new(&FieldSpec::prime(p))?;
            let m = Poly::from_coeffs(spec.modulus.iter().map(|&c| Fq(c)).collect());
            if !m.is_irreducible(&fp) {
                return invalid("modulus is reducible over F_p");
            }
        }
        let mut pw = vec![1u32; f as usize + 1];
        for i in 1..=f as usize {
            pw[i] = pw[i - 1] * p;
        }
        let mut field = Field {
            spec: if f == 1 { FieldSpec::prime(p) } else { spec.clone() },
            p,
            f,
            q,
            pw,
            exp: Vec::new(),
            log: Vec::new(),
            zech: Vec::new(),
            tr: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    pub fn prime(p: u32) -> Result<Field> {
        Field::new(&FieldSpec::prime(p))
    }

    /// Field of size p^f with the standard modulus.
    pub fn standard(p: u32, f: u32) -> Result<Field> {
        Field::new(&FieldSpec::standard(p, f)?)
    }

    fn digits_of(&self, a: u32) -> Vec<u32> {
        let mut d = vec![0u32; self.f as usize];
        let mut t = a;
        for x in d.iter_mut() {
            *x = t % self.p;
            t /= self.p;
        }
        d
    }

    fn from_digit_slice(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    // Schoolbook product modulo the modulus; only used to build the tables.
    fn raw_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let f = self.f as usize;
        if f == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let (da, db) = (self.digits_of(a), self.digits_of(b));
        let mut prod = vec![0u64; 2 * f - 1];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        let m = &self.spec.modulus;
        for deg in (f..2 * f - 1).rev() {
            let c = prod[deg];
            if c != 0 {
                for i in 0..f {
                    let sub = c * m[i] as u64 % p;
                    prod[deg - f + i] = (prod[deg - f + i] + p - sub) % p;
                }
                prod[deg] = 0;
            }
        }
        let out: Vec<u32> = prod[..f].iter().map(|&x| x as u32).collect();
        self.from_digit_slice(&out)
    }

    fn raw_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut r = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.raw_mul(r, b);
            }
            b = self.raw_mul(b, b);
            e >>= 1;
        }
        r
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let g = (1..q)
            .find(|&g| {
                (q == 2 || g != 1) && factors.iter().all(|&r| self.raw_pow(g, order / r) != 1)
            })
            .expect("multiplicative group is cyclic");
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![NONE; q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = self.raw_mul(x, g);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        self.exp = exp;
        self.log = log;
        if self.f > 1 {
            let mut zech = vec![NONE; n];
            for (d, z) in zech.iter_mut().enumerate() {
                let mut dg = self.digits_of(self.exp[d]);
                dg[0] = (dg[0] + 1) % self.p;
                let y = self.from_digit_slice(&dg);
                if y != 0 {
                    *z = self.log[y as usize];
                }
            }
            self.zech = zech;
        }
        // Tr(x) = sum of Frobenius conjugates; linear over F_p, so tabulate on
        // the basis 1, x, .., x^{f-1} first.
        let mut tr_basis = vec![0u32; self.f as usize];
        for (i, tb) in tr_basis.iter_mut().enumerate() {
            let b = Fq(self.pw[i]);
            let mut acc = Fq::ZERO;
            let mut conj = b;
            for _ in 0..self.f {
                acc = self.add(acc, conj);
                conj = self.pow(conj, self.p as u64);
            }
            debug_assert!(acc.0 < self.p);
            *tb = acc.0;
        }
        self.tr = (0..q)
            .map(|a| {
                let d = self.digits_of(a);
                (d.iter().zip(&tr_basis).map(|(&x, &t)| x as u64 * t as u64).sum::<u64>()
                    % self.p as u64) as u32
            })
            .collect();
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q).map(Fq)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fq> {
        (1..self.q).map(Fq)
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> Fq {
        Fq(self.exp[if self.q == 2 { 0 } else { 1 }])
    }

    /// Coefficients over F_p, constant term first.
    pub fn digits(&self, a: Fq) -> Vec<u32> {
        self.digits_of(a.0)
    }

    pub fn from_digits(&self, d: &[u32]) -> Fq {
        assert!(d.len() <= self.f as usize && d.iter().all(|&x| x < self.p));
        Fq(self.from_digit_slice(d))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.f == 1 {
            let s = a.0 + b.0;
            return Fq(if s >= self.p { s - self.p } else { s });
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let n = self.q - 1;
        let d = if lb >= la { lb - la } else { lb + n - la };
        let z = self.zech[d as usize];
        if z == NONE {
            Fq::ZERO
        } else {
            Fq(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        if a.0 == 0 {
            return a;
        }
        if self.f == 1 {
            return Fq(self.p - a.0);
        }
        if self.p == 2 {
            return a;
        }
        let half = (self.q - 1) / 2;
        Fq(self.exp[(self.log[a.0 as usize] + half) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq::ZERO;
        }
        if self.f == 1 {
            return Fq(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        Fq(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: Fq) -> Fq {
        assert!(a.0 != 0, "inverse of zero");
        let n = self.q - 1;
        let l = self.log[a.0 as usize];
        Fq(self.exp[((n - l) % n) as usize])
    }

    pub fn div(&self, a: Fq, b: Fq) -> Fq {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.0 == 0 {
            return Fq::ZERO;
        }
        let n = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fq(self.exp[((l * (e % n)) % n) as usize])
    }

    /// Discrete logarithm to the base `generator()`; `None` for zero.
    pub fn log(&self, a: Fq) -> Option<u32> {
        if a.0 == 0 {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    /// Absolute trace to F_p, as an integer in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: Fq) -> u32 {
        self.tr[a.0 as usize]
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.p as u64)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_modulus_and_generator_order() {
        let spec = FieldSpec::standard(3, 2).unwrap();
        assert_eq!(spec.modulus, vec![1, 0, 1]);
        let f = Field::new(&spec).unwrap();
        let g = f.generator();
        let mut x = g;
        let mut ord = 1;
        while x != Fq::ONE {
            x = f.mul(x, g);
            ord += 1;
        }
        assert_eq!(ord, 8);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(Field::new(&FieldSpec { p: 4, f: 1, modulus: vec![0, 1] }).is_err());
        assert!(Field::new(&FieldSpec { p: 3, f: 2, modulus: vec![2, 0, 1] }).is_err());
        assert!(Field::standard(2, 17).is_err());
    }

    #[test]
    fn add_matches_digitwise() {
        let f = Field::standard(5, 2).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let da = f.digits(a);
                let db = f.digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % 5).collect();
                assert_eq!(f.add(a, b), f.from_digits(&s));
            }
        }
    }

    #[test]
    fn trace_is_frobenius_sum() {
        let f = Field::standard(3, 3).unwrap();
        for a in f.elements() {
            let mut acc = Fq::ZERO;
            let mut c = a;
            for _ in 0..3 {
                acc = f.add(acc, c);
                c = f.frobenius(c);
            }
            assert_eq!(acc.0, f.trace(a));
        }
    }
}
