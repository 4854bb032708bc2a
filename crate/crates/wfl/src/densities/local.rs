//! Local densities ℓ_v(f) = lim_r N_r(f) / Q^{r(s-1)}, Q = q^{deg v}, where
//! N_r(f) = #{b ∈ (O_v/π^r)^s : Σ b_i^k ≡ f}.
//!
//! At a finite place f is a polynomial in T; at ∞ it is already written in
//! u = 1/T (see [`ell_infty`]).

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arcs::sums::local_power_histogram;
use crate::error::{budget, invalid, Error, Result};
use crate::ff::{extend_field, Extension, Field, Fq, Place, Poly, QuotientRing};
use crate::fourier::{convolve_power_auto, GroupFn};

/// Largest O_v/π^r enumerated by [`ell_v_truncated`].
pub const ENUMERATION_CAP: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Enumeration,
    Recursion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalDensity {
    pub place: Place,
    pub value: BigRational,
    /// First r from which N_r / Q^{r(s-1)} equals `value`; `None` if it never does.
    pub stabilized_at: Option<usize>,
    pub method: Method,
    /// Set when enumeration hit its cap: range of the last k values.
    pub unsettled: Option<(BigRational, BigRational)>,
}

pub(crate) fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Product of many rationals, multiplying numerators and denominators in a
/// balanced tree and reducing once.
pub fn rational_product<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigRational {
    fn tree(v: &mut Vec<BigInt>) -> BigInt {
        if v.is_empty() {
            return BigInt::from(1);
        }
        while v.len() > 1 {
            *v = v
                .chunks(2)
                .map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() })
                .collect();
        }
        v.pop().unwrap()
    }
    let (mut nums, mut dens): (Vec<BigInt>, Vec<BigInt>) =
        xs.into_iter().map(|x| (x.numer().clone(), x.denom().clone())).unzip();
    BigRational::new(tree(&mut nums), tree(&mut dens))
}

pub(crate) fn q_pow(q: u64, e: i64) -> BigRational {
    let b = rat(q);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b, (-e) as usize).recip()
    }
}

/// Some root in `fq` of a monic polynomial that splits into distinct linear factors.
pub fn split_root(fq: &Field, g: &Poly) -> Fq {
    let g = g.monic(fq);
    let d = g.deg().expect("nonzero polynomial");
    assert!(d >= 1, "constant has no root");
    if d == 1 {
        return fq.neg(g.coeff(0));
    }
    let q = fq.q() as u64;
    for a in fq.elements() {
        let h = if fq.p() == 2 {
            if a.is_zero() {
                continue;
            }
            // absolute trace of a·x, reduced mod g
            let mut t = Poly::from_coeffs(vec![Fq::ZERO, a]).rem(fq, &g);
            let mut acc = t.clone();
            for _ in 1..fq.f() {
                t = t.mul_mod(fq, &t, &g);
                acc = acc.add(fq, &t);
            }
            acc
        } else {
            let lin = Poly::from_coeffs(vec![a, Fq::ONE]);
            lin.pow_mod(fq, (q - 1) / 2, &g).sub(fq, &Poly::one())
        };
        let c = g.gcd(fq, &h);
        let cd = c.deg().unwrap_or(0);
        if cd > 0 && cd < d {
            return split_root(fq, &c);
        }
    }
    // Small fields may defeat the randomized split; fall back to search.
    fq.elements()
        .find(|&x| g.eval(fq, x).is_zero())
        .expect("polynomial splits")
}

/// Counts N_s(c) = #{x ∈ F_Q^s : Σ x_i^k = c} over a model of the residue field.
#[derive(Clone, Debug)]
pub struct LocalModel {
    pub ext: Extension,
    pub s: u32,
    pub k: u32,
    pub counts: GroupFn<u128>,
}

impl LocalModel {
    pub fn new(base: &Arc<Field>, deg: usize, s: u32, k: u32) -> Result<Self> {
        let ext = extend_field(base, deg as u32)?;
        let big = ext.big.clone();
        let mut h = GroupFn::<u128>::zeros(big.clone(), 1)?;
        for x in big.elements() {
            h.values_mut()[big.pow(x, k as u64).0 as usize] += 1;
        }
        let counts = convolve_power_auto(&h, s)?;
        Ok(LocalModel { ext, s, k, counts })
    }

    pub fn q(&self) -> u64 {
        self.ext.big.q() as u64
    }

    /// Nonzero solutions: N_s(c) - [c = 0].
    pub fn nonzero_solutions(&self, c: Fq) -> u128 {
        self.counts.values()[c.0 as usize] - c.is_zero() as u128
    }

    /// Whether N_s(c) takes one value on all c ≠ 0.
    pub fn unit_invariant(&self) -> bool {
        let v = &self.counts.values()[1..];
        v.iter().all(|&x| x == v[0])
    }
}

/// A place together with a root of π in the model field.
#[derive(Clone, Debug)]
pub struct PlaceModel {
    pub place: Place,
    pub ring1: QuotientRing,
    pub root: Fq,
}

impl PlaceModel {
    pub fn new(base: &Field, model: &LocalModel, place: &Place) -> Self {
        let root = match place {
            Place::Infinity => Fq::ZERO,
            Place::Finite(pi) => split_root(&model.ext.big, &model.ext.embed_poly(pi)),
        };
        PlaceModel {
            place: place.clone(),
            ring1: QuotientRing::new(base, place, 1),
            root,
        }
    }

    /// Image of f mod π in the model field.
    pub fn residue(&self, base: &Field, model: &LocalModel, f: &Poly) -> Fq {
        let r = self.ring1.reduce(base, f);
        model.ext.embed_poly(&r).eval(&model.ext.big, self.root)
    }
}

/// ℓ_v(f) by the valuation recursion
/// ℓ(f) = P(f mod π)/Q^{s-1} + [v(f) >= k] Q^{k-s} ℓ(f/π^k), P = nonzero solutions,
/// closed in geometric form at f = 0.
pub fn ell_v_recursive(base: &Field, model: &LocalModel, pm: &PlaceModel, f: &Poly) -> Result<LocalDensity> {
    let (s, k) = (model.s as i64, model.k as i64);
    if model.k % base.p() == 0 {
        return invalid("recursion needs p ∤ k");
    }
    let q = model.q();
    let head = q_pow(q, -(s - 1));
    let step = q_pow(q, k - s);
    let pi = pm.ring1.pi.clone();
    let pik = pi.pow(base, k as u64);
    let mut acc = BigRational::zero();
    let mut factor = BigRational::one();
    let mut f = f.clone();
    let mut stab = Some(0usize);
    loop {
        if f.is_zero() {
            if s <= k {
                return Err(Error::Degenerate("ℓ_v(0) diverges unless s > k".into()));
            }
            let p0 = rat(model.nonzero_solutions(Fq::ZERO));
            acc += &factor * p0 * &head / (BigRational::one() - &step);
            stab = None;
            break;
        }
        let c = pm.residue(base, model, &f);
        acc += &factor * rat(model.nonzero_solutions(c)) * &head;
        let w = pm.ring1.valuation(base, &f, k as usize);
        if w >= k as usize {
            f = f.divrem(base, &pik).0;
            factor *= &step;
            stab = stab.map(|r| r + k as usize);
        } else {
            stab = stab.map(|r| r + w + 1);
            break;
        }
    }
    Ok(LocalDensity {
        place: pm.place.clone(),
        value: acc,
        stabilized_at: stab,
        method: Method::Recursion,
        unsettled: None,
    })
}

/// N_r(f) / Q^{r(s-1)} by convolving the k-th power histogram of O_v/π^r.
pub fn ell_v_truncated(field: &Arc<Field>, place: &Place, f: &Poly, s: u32, k: u32, r: usize) -> Result<BigRational> {
    let ring = QuotientRing::new(field, place, r);
    let size = (field.q() as f64).powi(ring.dim() as i32);
    if size > ENUMERATION_CAP as f64 {
        return budget("local enumeration", format!("{size:e}"), ENUMERATION_CAP);
    }
    let h = local_power_histogram(field, &ring, k)?;
    let n = convolve_power_auto(&h, s)?;
    let count = *n.get(&ring.coords(field, f));
    let q = field.q() as u64;
    Ok(rat(count) / q_pow(q, (r * ring.deg_v()) as i64 * (s as i64 - 1)))
}

/// ℓ_v(f) by enumeration for r = 1..=r_cap, settled once k consecutive values agree.
pub fn ell_v_enumerated(
    field: &Arc<Field>,
    place: &Place,
    f: &Poly,
    s: u32,
    k: u32,
    r_cap: usize,
) -> Result<LocalDensity> {
    let mut vals: Vec<BigRational> = Vec::new();
    for r in 1..=r_cap {
        match ell_v_truncated(field, place, f, s, k, r) {
            Ok(v) => vals.push(v),
            Err(Error::Budget { .. }) if !vals.is_empty() => break,
            Err(e) => return Err(e),
        }
        let n = vals.len();
        let k = k as usize;
        if n >= k && vals[n - k..].iter().all(|v| *v == vals[n - 1]) {
            let mut start = n - k;
            while start > 0 && vals[start - 1] == vals[n - 1] {
                start -= 1;
            }
            return Ok(LocalDensity {
                place: place.clone(),
                value: vals[n - 1].clone(),
                stabilized_at: Some(start + 1),
                method: Method::Enumeration,
                unsettled: None,
            });
        }
    }
    let tail = &vals[vals.len().saturating_sub(k as usize)..];
    let lo = tail.iter().min().expect("at least one value").clone();
    let hi = tail.iter().max().expect("at least one value").clone();
    Ok(LocalDensity {
        place: place.clone(),
        value: vals.last().expect("at least one value").clone(),
        stabilized_at: None,
        method: Method::Enumeration,
        unsettled: Some((lo, hi)),
    })
}

/// u^{ke} f(1/u), the section f seen at ∞.
pub fn at_infinity(f: &Poly, ke: usize) -> Poly {
    f.reverse(ke)
}

/// Caches models per degree and roots per place.
pub struct LocalContext {
    pub field: Arc<Field>,
    pub s: u32,
    pub k: u32,
    models: HashMap<usize, Arc<LocalModel>>,
    places: HashMap<Place, PlaceModel>,
}

impl LocalContext {
    pub fn new(field: Arc<Field>, s: u32, k: u32) -> Self {
        LocalContext {
            field,
            s,
            k,
            models: HashMap::new(),
            places: HashMap::new(),
        }
    }

    pub fn model(&mut self, deg: usize) -> Result<Arc<LocalModel>> {
        if let Some(m) = self.models.get(&deg) {
            return Ok(m.clone());
        }
        let m = Arc::new(LocalModel::new(&self.field, deg, self.s, self.k)?);
        self.models.insert(deg, m.clone());
        Ok(m)
    }

    pub fn place_model(&mut self, place: &Place) -> Result<(Arc<LocalModel>, PlaceModel)> {
        let model = self.model(place.degree())?;
        if !self.places.contains_key(place) {
            let pm = PlaceModel::new(&self.field, &model, place);
            self.places.insert(place.clone(), pm);
        }
        Ok((model, self.places[place].clone()))
    }

    /// ℓ_v(f), f local at v (in u at ∞).
    pub fn ell_v(&mut self, place: &Place, f: &Poly) -> Result<LocalDensity> {
        let (model, pm) = self.place_model(place)?;
        ell_v_recursive(&self.field, &model, &pm, f)
    }

    pub fn ell_infty(&mut self, f: &Poly, e: usize) -> Result<LocalDensity> {
        let g = at_infinity(f, self.k as usize * e);
        self.ell_v(&Place::Infinity, &g)
    }
}

/// ℓ_∞(f) for a section f of O(ke).
pub fn ell_infty(field: &Arc<Field>, f: &Poly, e: usize, k: u32, s: u32) -> Result<LocalDensity> {
    LocalContext::new(field.clone(), s, k).ell_infty(f, e)
}

/// ℓ_v(f) by the recursion.
pub fn ell_v(field: &Arc<Field>, place: &Place, f: &Poly, s: u32, k: u32) -> Result<LocalDensity> {
    LocalContext::new(field.clone(), s, k).ell_v(place, f)
}
