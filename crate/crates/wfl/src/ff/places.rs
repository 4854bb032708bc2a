//! Closed points of P^1: monic irreducibles plus the point at infinity.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::arith::necklace_count;
use super::field::Field;
use super::poly::{monic_polys, Poly};
use crate::error::{budget, invalid, Result};

/// Default cap on the number of places returned by `places_up_to`.
pub const PLACE_CAP: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.deg().expect("place polynomial is nonzero"),
            Place::Infinity => 1,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            Place::Finite(p) => Some(p),
            Place::Infinity => None,
        }
    }
}

/// By degree; infinity after the finite places of degree 1.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
            (Place::Infinity, Place::Finite(b)) => {
                if b.deg() == Some(1) {
                    Ordering::Greater
                } else {
                    1.cmp(&b.deg().unwrap())
                }
            }
            (Place::Finite(_), Place::Infinity) => other.cmp(self).reverse(),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Monic irreducibles of degree exactly `n`, in sorted order.
pub fn irreducibles_of_degree(fq: &Field, n: usize) -> Vec<Poly> {
    let mut v: Vec<Poly> = monic_polys(fq, n).filter(|p| p.is_irreducible(fq)).collect();
    v.sort();
    v
}

pub fn places_up_to(fq: &Field, d: usize, include_infinity: bool) -> Result<Vec<Place>> {
    places_up_to_capped(fq, d, include_infinity, PLACE_CAP)
}

pub fn places_up_to_capped(fq: &Field, d: usize, include_infinity: bool, cap: u64) -> Result<Vec<Place>> {
    if d == 0 {
        return invalid("degree bound must be at least 1");
    }
    let mut total: u64 = 0;
    for n in 1..=d {
        let c = (fq.q() as u64)
            .checked_pow(n as u32)
            .map(|_| necklace_count(fq.q() as u64, n as u32));
        match c {
            Some(c) => total = total.saturating_add(c),
            None => return budget("places", format!("degree {d} over q = {}", fq.q()), cap),
        }
    }
    if total > cap {
        return budget("places", total, cap);
    }
    let mut out = Vec::with_capacity(total as usize + 1);
    for n in 1..=d {
        out.extend(irreducibles_of_degree(fq, n).into_iter().map(Place::Finite));
        if n == 1 && include_infinity {
            out.push(Place::Infinity);
        }
    }
    Ok(out)
}
