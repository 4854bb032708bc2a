//! Δ_{k,p}: convex hull of (i, j) ∈ ℕ² with gcd(i, j, p) = 1 and p | (k-1)i - j,
//! and γ_{k,p}, the largest γ with (1, (k-2)/2) ∈ γΔ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};

/// Doublings tried past the initial box before giving up on stability.
pub const MAX_DOUBLINGS: u32 = 8;

/// Lower-left boundary of Δ + ℝ≥0², computed from the generators in [0, B]².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolygon {
    pub k: u32,
    pub p: u64,
    pub box_bound: u64,
    /// Generators inside the box.
    pub generators: Vec<(u64, u64)>,
    /// Vertices by increasing i (and decreasing j). The boundary continues
    /// straight up from the first and straight right from the last.
    pub vertices: Vec<(u64, u64)>,
}

/// gcd(i, j, p) = 1 with p prime is just "p does not divide both".
pub fn is_generator(k: u32, p: u64, i: u64, j: u64) -> bool {
    let r = ((k as u128 - 1) * i as u128 % p as u128) as u64;
    r == j % p && !(i % p == 0 && j % p == 0)
}

fn cross(o: (u64, u64), a: (u64, u64), b: (u64, u64)) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

impl LatticePolygon {
    pub fn in_box(k: u32, p: u64, b: u64) -> Self {
        let mut generators = Vec::new();
        for i in 0..=b {
            let r = ((k as u128 - 1) * i as u128 % p as u128) as u64;
            for j in (r..=b).step_by(p as usize) {
                if is_generator(k, p, i, j) {
                    generators.push((i, j));
                }
            }
        }
        // lowest point of each column, then the lower hull (monotone chain)
        let mut lows: Vec<(u64, u64)> = Vec::new();
        for &(i, j) in &generators {
            match lows.last_mut() {
                Some(last) if last.0 == i => last.1 = last.1.min(j),
                _ => lows.push((i, j)),
            }
        }
        let mut hull: Vec<(u64, u64)> = Vec::new();
        for &pt in &lows {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
                hull.pop();
            }
            hull.push(pt);
        }
        // keep the strictly descending part
        let min_j = hull.iter().map(|v| v.1).min();
        let vertices = match min_j {
            Some(mj) => {
                let end = hull.iter().position(|v| v.1 == mj).unwrap();
                hull[..=end].to_vec()
            }
            None => Vec::new(),
        };
        LatticePolygon {
            k,
            p,
            box_bound: b,
            generators,
            vertices,
        }
    }

    /// Half-planes n·x >= c whose intersection is Δ + ℝ≥0², normals nonnegative.
    pub fn half_planes(&self) -> Vec<((i64, i64), i64)> {
        let Some(&first) = self.vertices.first() else {
            return Vec::new();
        };
        let last = *self.vertices.last().unwrap();
        let mut hp = vec![((1, 0), first.0 as i64), ((0, 1), last.1 as i64)];
        for w in self.vertices.windows(2) {
            let (x1, y1) = (w[0].0 as i64, w[0].1 as i64);
            let (x2, y2) = (w[1].0 as i64, w[1].1 as i64);
            let n = (y1 - y2, x2 - x1);
            hp.push((n, n.0 * x1 + n.1 * y1));
        }
        hp
    }

    pub fn contains(&self, x: &BigRational, y: &BigRational) -> bool {
        !self.vertices.is_empty()
            && self.half_planes().iter().all(|&((a, b), c)| {
                BigRational::from_integer(a.into()) * x + BigRational::from_integer(b.into()) * y
                    >= BigRational::from_integer(c.into())
            })
    }

    /// Slopes strictly increasing along the boundary, all negative.
    pub fn is_convex(&self) -> bool {
        let slopes: Vec<BigRational> = self
            .vertices
            .windows(2)
            .map(|w| {
                BigRational::new(
                    BigInt::from(w[1].1 as i64 - w[0].1 as i64),
                    BigInt::from(w[1].0 as i64 - w[0].0 as i64),
                )
            })
            .collect();
        slopes.iter().all(|s| s < &BigRational::zero()) && slopes.windows(2).all(|w| w[0] < w[1])
    }

    /// Every generator v has v + (a, b) ∈ Δ for (a, b) ∈ {0..3}².
    pub fn is_upward_closed(&self) -> bool {
        let hp = self.half_planes();
        self.generators.iter().all(|&(i, j)| {
            (0..=3i64).all(|a| {
                (0..=3i64).all(|b| {
                    hp.iter()
                        .all(|&((nx, ny), c)| nx * (i as i64 + a) + ny * (j as i64 + b) >= c)
                })
            })
        })
    }

    /// Smallest s with s(2, k-2) ∈ Δ; None if the ray never enters.
    pub fn ray_entry(&self, dir: (i64, i64)) -> Option<BigRational> {
        let hp = self.half_planes();
        if hp.is_empty() {
            return None;
        }
        let mut s = BigRational::zero();
        for ((a, b), c) in hp {
            let nd = a * dir.0 + b * dir.1;
            if nd <= 0 {
                if c > 0 {
                    return None;
                }
                continue;
            }
            let t = BigRational::new(c.into(), nd.into());
            if t > s {
                s = t;
            }
        }
        Some(s)
    }
}

#[derive(Clone, Debug)]
pub struct GammaReport {
    pub k: u32,
    pub p: u64,
    pub gamma: BigRational,
    pub polygon: LatticePolygon,
    /// Boxes whose boundaries were compared, ending with three equal ones.
    pub boxes: Vec<u64>,
    /// Boundary identical for B, 2B and 4B.
    pub certified: bool,
    pub upward_closed: bool,
    pub convex: bool,
    /// (k-2)/(2k-2).
    pub lower_bound: BigRational,
    /// (k-2)/(2k-2) (1 + k/p).
    pub upper_bound: BigRational,
}

impl GammaReport {
    pub fn within_bounds(&self) -> bool {
        self.lower_bound <= self.gamma && self.gamma <= self.upper_bound
    }
}

pub fn gamma_bounds(k: u32, p: u64) -> (BigRational, BigRational) {
    let k = k as i64;
    let lo = BigRational::new((k - 2).into(), (2 * k - 2).into());
    let hi = &lo * (BigRational::one() + BigRational::new(k.into(), (p as i64).into()));
    (lo, hi)
}

pub fn initial_box(k: u32, p: u64) -> u64 {
    2 * p * (k as u64 + 2)
}

pub fn gamma(k: u32, p: u64) -> Result<GammaReport> {
    if k < 2 {
        return invalid("need k >= 2");
    }
    if p < 2 || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
        return invalid(format!("{p} is not prime"));
    }
    let mut b = initial_box(k, p);
    let mut boxes = vec![b];
    let mut polys = vec![LatticePolygon::in_box(k, p, b)];
    let mut certified = false;
    for _ in 0..MAX_DOUBLINGS + 2 {
        b *= 2;
        boxes.push(b);
        polys.push(LatticePolygon::in_box(k, p, b));
        let n = polys.len();
        if n >= 3 && polys[n - 1].vertices == polys[n - 2].vertices && polys[n - 2].vertices == polys[n - 3].vertices {
            certified = true;
            break;
        }
    }
    let n = polys.len();
    let polygon = polys.swap_remove(n - 3.min(n));
    boxes.truncate(boxes.iter().position(|&x| x == polygon.box_bound).unwrap() + 3);
    let gamma = if k == 2 {
        BigRational::zero()
    } else {
        match polygon.ray_entry((2, k as i64 - 2)) {
            Some(s) if !s.is_zero() => (BigRational::from_integer(2.into()) * s).recip(),
            _ => BigRational::zero(),
        }
    };
    let (lower_bound, upper_bound) = gamma_bounds(k, p);
    Ok(GammaReport {
        k,
        p,
        gamma,
        upward_closed: polygon.is_upward_closed(),
        convex: polygon.is_convex(),
        polygon,
        boxes,
        certified,
        lower_bound,
        upper_bound,
    })
}
