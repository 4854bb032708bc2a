//! Linear forms on sections of O(N), effective divisors on P^1, and the forms
//! they induce on H^0(Z, O(N)).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ff::linalg::{dot, left_solve, Matrix};
use crate::ff::poly::{factor, monic_polys};
use crate::ff::{Field, Fq, Place, Poly, QuotientRing};

/// α on H^0(O(N)) = {deg <= N}: α(f) = Σ coords_i f_i.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    pub coords: Vec<Fq>,
}

impl LinearForm {
    pub fn new(coords: Vec<Fq>) -> Self {
        LinearForm { coords }
    }

    pub fn zero(dim: usize) -> Self {
        LinearForm {
            coords: vec![Fq::ZERO; dim],
        }
    }

    /// Evaluation at t on sections of O(N).
    pub fn evaluation(fq: &Field, t: Fq, n: usize) -> Self {
        LinearForm {
            coords: (0..=n).map(|i| fq.pow(t, i as u64)).collect(),
        }
    }

    /// The coefficient of T^N.
    pub fn top_coefficient(n: usize) -> Self {
        let mut coords = vec![Fq::ZERO; n + 1];
        coords[n] = Fq::ONE;
        LinearForm { coords }
    }

    pub fn from_index(fq: &Field, idx: u64, dim: usize) -> Self {
        LinearForm {
            coords: Poly::from_index(fq, idx, dim).padded(dim),
        }
    }

    /// Degree N of the line bundle this form lives on.
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, fq: &Field, f: &Poly) -> Fq {
        assert!(f.deg().map_or(true, |d| d <= self.n()), "section degree exceeds N");
        self.coords
            .iter()
            .zip(f.coeffs())
            .fold(Fq::ZERO, |acc, (&a, &b)| fq.add(acc, fq.mul(a, b)))
    }

    pub fn scale(&self, fq: &Field, c: Fq) -> Self {
        LinearForm {
            coords: self.coords.iter().map(|&x| fq.mul(x, c)).collect(),
        }
    }
}

/// An effective divisor on P^1, kept as sorted (place, multiplicity) pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct DivisorP1 {
    parts: Vec<(Place, u32)>,
}

impl DivisorP1 {
    pub fn empty() -> Self {
        DivisorP1 { parts: Vec::new() }
    }

    pub fn from_parts(parts: Vec<(Place, u32)>) -> Result<Self> {
        let mut parts: Vec<(Place, u32)> = parts.into_iter().filter(|(_, m)| *m > 0).collect();
        parts.sort();
        if parts.windows(2).any(|w| w[0].0 == w[1].0) {
            return invalid("repeated place in divisor");
        }
        Ok(DivisorP1 { parts })
    }

    pub fn point(place: Place, m: u32) -> Self {
        DivisorP1::from_parts(vec![(place, m)]).expect("single place")
    }

    /// div(g) + m_inf·∞ for a monic g.
    pub fn from_poly(fq: &Field, g: &Poly, m_inf: u32) -> Self {
        let mut parts: Vec<(Place, u32)> = factor(fq, g).into_iter().map(|(p, m)| (Place::Finite(p), m)).collect();
        if m_inf > 0 {
            parts.push((Place::Infinity, m_inf));
        }
        DivisorP1::from_parts(parts).expect("distinct irreducible factors")
    }

    pub fn parts(&self) -> &[(Place, u32)] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts.iter().map(|(p, m)| p.degree() * *m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn multiplicity(&self, v: &Place) -> u32 {
        self.parts.iter().find(|(p, _)| p == v).map_or(0, |(_, m)| *m)
    }

    pub fn m_inf(&self) -> u32 {
        self.multiplicity(&Place::Infinity)
    }

    /// The finite part as a monic polynomial.
    pub fn finite_poly(&self, fq: &Field) -> Poly {
        self.parts.iter().fold(Poly::one(), |acc, (p, m)| match p {
            Place::Finite(pi) => acc.mul(fq, &pi.pow(fq, *m as u64)),
            Place::Infinity => acc,
        })
    }

    /// Z - [v], or `None` if v is not in the support.
    pub fn minus_point(&self, v: &Place) -> Option<Self> {
        let m = self.multiplicity(v);
        if m == 0 {
            return None;
        }
        let parts = self
            .parts
            .iter()
            .map(|(p, k)| (p.clone(), if p == v { k - 1 } else { *k }))
            .collect();
        Some(DivisorP1::from_parts(parts).expect("same support"))
    }

    /// Scheme-theoretic union with the point ∞.
    pub fn union_infinity(&self) -> Self {
        if self.m_inf() > 0 {
            self.clone()
        } else {
            let mut parts = self.parts.clone();
            parts.push((Place::Infinity, 1));
            DivisorP1::from_parts(parts).expect("∞ was absent")
        }
    }

    /// Disjoint union; fails if the supports meet.
    pub fn disjoint_union(&self, o: &Self) -> Result<Self> {
        let mut parts = self.parts.clone();
        parts.extend(o.parts.iter().cloned());
        DivisorP1::from_parts(parts)
    }

    pub fn rings(&self, fq: &Field) -> Vec<QuotientRing> {
        self.parts
            .iter()
            .map(|(p, m)| QuotientRing::new(fq, p, *m as usize))
            .collect()
    }
}

/// All effective divisors of degree exactly d, sorted.
pub fn divisors_of_degree(fq: &Field, d: usize) -> Vec<DivisorP1> {
    let mut out: Vec<DivisorP1> = (0..=d)
        .flat_map(|j| monic_polys(fq, j).map(move |g| DivisorP1::from_poly(fq, &g, (d - j) as u32)))
        .collect();
    out.sort();
    out
}

/// Coefficient vectors spanning the kernel of H^0(O(N)) -> H^0(Z, O(N)).
pub fn kernel_basis(fq: &Field, z: &DivisorP1, n: usize) -> Vec<Vec<Fq>> {
    let d = z.degree();
    if d > n {
        return Vec::new();
    }
    let g = z.finite_poly(fq);
    (0..=n - d).map(|j| g.shift(j).padded(n + 1)).collect()
}

/// Whether α vanishes on the kernel of restriction to Z.
pub fn factors_through(fq: &Field, alpha: &LinearForm, z: &DivisorP1) -> bool {
    kernel_basis(fq, z, alpha.n())
        .iter()
        .all(|v| dot(fq, &alpha.coords, v).is_zero())
}

/// Divisors of degree <= d_max with their kernel bases, for repeated queries.
pub struct DivisorCatalog {
    pub n: usize,
    pub by_degree: Vec<Vec<(DivisorP1, Vec<Vec<Fq>>)>>,
}

impl DivisorCatalog {
    pub fn new(fq: &Field, n: usize, d_max: usize) -> Self {
        let by_degree = (0..=d_max)
            .map(|d| {
                divisors_of_degree(fq, d)
                    .into_iter()
                    .map(|z| {
                        let k = kernel_basis(fq, &z, n);
                        (z, k)
                    })
                    .collect()
            })
            .collect();
        DivisorCatalog { n, by_degree }
    }

    /// (deg α, all minimal divisors), if some divisor of degree <= d_max works.
    pub fn min_degree(&self, fq: &Field, alpha: &LinearForm) -> Option<(usize, Vec<DivisorP1>)> {
        for (d, list) in self.by_degree.iter().enumerate() {
            let hits: Vec<DivisorP1> = list
                .iter()
                .filter(|(_, ker)| ker.iter().all(|v| dot(fq, &alpha.coords, v).is_zero()))
                .map(|(z, _)| z.clone())
                .collect();
            if !hits.is_empty() {
                return Some((d, hits));
            }
        }
        None
    }
}

/// Minimal degree of a divisor α factors through, with every minimal divisor.
/// Such a divisor always exists in degree <= N/2 + 1.
pub fn min_degree(fq: &Field, alpha: &LinearForm) -> Result<(usize, Vec<DivisorP1>)> {
    let n = alpha.n();
    let bound = n / 2 + 1;
    for d in 0..=bound {
        let hits: Vec<DivisorP1> = divisors_of_degree(fq, d)
            .into_iter()
            .filter(|z| factors_through(fq, alpha, z))
            .collect();
        if !hits.is_empty() {
            return Ok((d, hits));
        }
    }
    Err(Error::Consistency(format!(
        "no divisor of degree <= {bound} carries the form {:?}",
        alpha.coords
    )))
}

/// Local piece of a restricted form: a functional on O_v/π^m in local coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalForm {
    pub ring: QuotientRing,
    pub coords: Vec<Fq>,
}

impl LocalForm {
    pub fn new(ring: QuotientRing, coords: Vec<Fq>) -> Self {
        assert_eq!(ring.dim(), coords.len());
        LocalForm { ring, coords }
    }

    pub fn place(&self) -> &Place {
        &self.ring.place
    }

    pub fn m(&self) -> usize {
        self.ring.r
    }

    pub fn eval(&self, fq: &Field, a: &Poly) -> Fq {
        dot(fq, &self.coords, &self.ring.coords(fq, a))
    }

    /// Does not vanish on π^{m-1} O_v / π^m.
    pub fn is_nondegenerate(&self) -> bool {
        let dv = self.ring.deg_v();
        let m = self.m();
        m == 0 || self.coords[(m - 1) * dv..].iter().any(|c| !c.is_zero())
    }

    /// b -> ᾱ(π^j b) on O_v/π^{m-j}.
    pub fn shifted(&self, fq: &Field, j: usize) -> LocalForm {
        let dv = self.ring.deg_v();
        let ring = QuotientRing::new(fq, &self.ring.place, self.m() - j);
        LocalForm::new(ring, self.coords[j * dv..].to_vec())
    }
}

/// ᾱ on H^0(Z, O(N)), split over the points of Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedForm {
    pub z: DivisorP1,
    pub n: usize,
    pub parts: Vec<LocalForm>,
}

impl RestrictedForm {
    pub fn is_nondegenerate(&self) -> bool {
        self.parts.iter().all(|p| p.is_nondegenerate())
    }

    /// ᾱ(f|_Z) for a section f of O(N).
    pub fn eval_section(&self, fq: &Field, f: &Poly) -> Fq {
        self.parts.iter().fold(Fq::ZERO, |acc, lf| {
            let local = lf.ring.restrict_section(fq, f, self.n);
            fq.add(acc, lf.eval(fq, &local))
        })
    }

    /// The global form H^0(O(N)) -> H^0(Z) -> F_q.
    pub fn pull_back(&self, fq: &Field) -> LinearForm {
        LinearForm::new(
            (0..=self.n)
                .map(|i| self.eval_section(fq, &Poly::monomial(Fq::ONE, i)))
                .collect(),
        )
    }

    /// Restriction to the sub-divisor made of the given component indices.
    pub fn select(&self, idx: &[usize]) -> RestrictedForm {
        let parts: Vec<LocalForm> = idx.iter().map(|&i| self.parts[i].clone()).collect();
        let z = DivisorP1::from_parts(
            parts
                .iter()
                .map(|p| (p.ring.place.clone(), p.ring.r as u32))
                .collect(),
        )
        .expect("distinct places");
        RestrictedForm { z, n: self.n, parts }
    }
}

/// Matrix with one row per local coordinate of Z and one column per T^i, i <= N.
pub fn restriction_matrix(fq: &Field, z: &DivisorP1, n: usize) -> Matrix {
    let rings = z.rings(fq);
    let dim: usize = rings.iter().map(|r| r.dim()).sum();
    let mut a = vec![vec![Fq::ZERO; n + 1]; dim];
    for i in 0..=n {
        let t = Poly::monomial(Fq::ONE, i);
        let mut row = 0;
        for ring in &rings {
            let c = ring.coords(fq, &ring.restrict_section(fq, &t, n));
            for x in c {
                a[row][i] = x;
                row += 1;
            }
        }
    }
    a
}

/// Some ᾱ with ᾱ∘restriction = α, or `None` if α does not factor through Z.
pub fn restrict(fq: &Field, alpha: &LinearForm, z: &DivisorP1) -> Option<RestrictedForm> {
    let n = alpha.n();
    let a = restriction_matrix(fq, z, n);
    let rings = z.rings(fq);
    let sol = if a.is_empty() {
        if alpha.is_zero() {
            Vec::new()
        } else {
            return None;
        }
    } else {
        left_solve(fq, &a, &alpha.coords, n + 1)?
    };
    let mut parts = Vec::with_capacity(rings.len());
    let mut off = 0;
    for ring in rings {
        let d = ring.dim();
        parts.push(LocalForm::new(ring, sol[off..off + d].to_vec()));
        off += d;
    }
    Some(RestrictedForm {
        z: z.clone(),
        n,
        parts,
    })
}

/// All forms on H^0(Z, O(N)) that are nondegenerate at every point.
pub fn nondegenerate_forms(fq: &Field, z: &DivisorP1, n: usize) -> Vec<RestrictedForm> {
    let rings = z.rings(fq);
    let mut acc: Vec<Vec<LocalForm>> = vec![Vec::new()];
    for ring in rings {
        let d = ring.dim();
        let locals: Vec<LocalForm> = (0..(fq.q() as u64).pow(d as u32))
            .map(|i| LocalForm::new(ring.clone(), Poly::from_index(fq, i, d).padded(d)))
            .filter(|lf| lf.is_nondegenerate())
            .collect();
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                locals.iter().map(move |lf| {
                    let mut v = prefix.clone();
                    v.push(lf.clone());
                    v
                })
            })
            .collect();
    }
    acc.into_iter()
        .map(|parts| RestrictedForm {
            z: z.clone(),
            n,
            parts,
        })
        .collect()
}

/// #{nondegenerate ᾱ on Z} = Π (Q^m - Q^{m-1}).
pub fn nondegenerate_count(fq: &Field, z: &DivisorP1) -> u128 {
    z.parts()
        .iter()
        .map(|(p, m)| {
            let qv = (fq.q() as u128).pow(p.degree() as u32);
            qv.pow(*m) - qv.pow(*m - 1)
        })
        .product()
}
