//! Degree-m extensions F_q ⊂ F_{q^m} with an explicit embedding.

use std::sync::Arc;

use super::field::{Field, FieldSpec, Fq};
use super::poly::Poly;
use crate::error::{invalid, Result};

#[derive(Clone, Debug)]
pub struct Extension {
    pub base: Arc<Field>,
    pub big: Arc<Field>,
    pub m: u32,
    embed: Vec<Fq>,
}

impl Extension {
    pub fn embed(&self, a: Fq) -> Fq {
        self.embed[a.0 as usize]
    }

    pub fn embed_poly(&self, f: &Poly) -> Poly {
        Poly::from_coeffs(f.coeffs().iter().map(|&a| self.embed(a)).collect())
    }

    /// Preimage of an element of the base field's image, if it lies there.
    pub fn restrict(&self, b: Fq) -> Option<Fq> {
        self.embed.iter().position(|&x| x == b).map(|i| Fq(i as u32))
    }

    /// Relative trace F_{q^m} -> F_q.
    pub fn trace_to_base(&self, b: Fq) -> Fq {
        let big = &self.big;
        let q = self.base.q() as u64;
        let mut acc = Fq::ZERO;
        let mut c = b;
        for _ in 0..self.m {
            acc = big.add(acc, c);
            c = big.pow(c, q);
        }
        self.restrict(acc).expect("relative trace lies in the base field")
    }
}

/// Builds F_{q^m} with its standard modulus and embeds `base` by sending the
/// class of x to a root of the base modulus.
pub fn extend_field(base: &Arc<Field>, m: u32) -> Result<Extension> {
    if m == 0 {
        return invalid("extension degree must be at least 1");
    }
    if m == 1 {
        return Ok(Extension {
            base: base.clone(),
            big: base.clone(),
            m,
            embed: base.elements().collect(),
        });
    }
    let (p, f) = (base.p(), base.f());
    let big = Arc::new(Field::new(&FieldSpec::standard(p, f * m)?)?);
    let modulus = Poly::from_coeffs(base.spec().modulus.iter().map(|&c| Fq(c)).collect());
    // Coefficients of the base modulus lie in F_p, whose indices agree in both fields.
    let root = if f == 1 {
        Fq::ZERO
    } else {
        big.elements()
            .find(|&x| modulus.eval(&big, x).is_zero())
            .expect("F_{q^m} contains a root of the base modulus")
    };
    let mut powers = vec![Fq::ONE; f as usize];
    for i in 1..f as usize {
        powers[i] = big.mul(powers[i - 1], root);
    }
    let embed = base
        .elements()
        .map(|a| {
            base.digits(a)
                .iter()
                .zip(&powers)
                .fold(Fq::ZERO, |acc, (&d, &pw)| big.add(acc, big.mul(Fq(d), pw)))
        })
        .collect();
    Ok(Extension {
        base: base.clone(),
        big,
        m,
        embed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_a_homomorphism() {
        let base = Arc::new(Field::standard(2, 2).unwrap());
        let ext = extend_field(&base, 3).unwrap();
        assert_eq!(ext.big.q(), 64);
        for a in base.elements() {
            for b in base.elements() {
                assert_eq!(ext.embed(base.add(a, b)), ext.big.add(ext.embed(a), ext.embed(b)));
                assert_eq!(ext.embed(base.mul(a, b)), ext.big.mul(ext.embed(a), ext.embed(b)));
            }
            assert_eq!(ext.big.pow(ext.embed(a), 4), ext.embed(a));
        }
    }

    #[test]
    fn relative_trace_of_embedded() {
        let base = Arc::new(Field::prime(3).unwrap());
        let ext = extend_field(&base, 2).unwrap();
        for a in base.elements() {
            assert_eq!(ext.trace_to_base(ext.embed(a)), base.mul(a, Fq(2)));
        }
    }
}
