//! Upper bound for dim Sing^{F,m} in terms of dimensions of Mor'_{i1,i2,i3}(C, Y),
//! Y the blowup of P^n × P^n along the graph of ∇F.

use num_bigint::BigInt;
use num_rational::BigRational;

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// (n+1)i1 + (n+1)i2 - (n-1)i3 - 2n(g-1).
pub fn expected_mor_dim(n: i64, g: i64, i1: i64, i2: i64, i3: i64) -> i64 {
    (n + 1) * i1 + (n + 1) * i2 - (n - 1) * i3 - 2 * n * (g - 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralDimBound {
    pub value: BigRational,
    /// Max over the (j1, j2, j3) grid of dim Mor' + 2 + j1 + j2, with its argmax.
    pub grid: Option<(i64, (i64, i64, i64))>,
    /// m + ⌈m/(d-1)⌉ + (n+1)(e+1-g-⌈m/(d-1)⌉).
    pub c_zero: i64,
    /// m + (de-m-2g+2)/(d-1) + (n+1)(e+1-g-(de-m-2g+2)/(d-1)).
    pub contained: BigRational,
    /// 2g - 1 + 2m.
    pub contained_top: i64,
    pub hypotheses_hold: bool,
    pub warnings: Vec<String>,
}

/// The e lower bound max(4g - 4(d-1)/(d-2) + 2d/(d-2), 2((n+3)d-4)/((n+1-2d)(d-2))),
/// or None when d <= 2 or n+1 = 2d.
pub fn e_threshold(n: i64, d: i64, g: i64) -> Option<BigRational> {
    if d <= 2 || n + 1 - 2 * d <= 0 {
        return None;
    }
    let a = int(4 * g) - BigRational::new((4 * (d - 1)).into(), (d - 2).into())
        + BigRational::new((2 * d).into(), (d - 2).into());
    let b = BigRational::new((2 * ((n + 3) * d - 4)).into(), ((n + 1 - 2 * d) * (d - 2)).into());
    Some(if a > b { a } else { b })
}

/// Evaluates the bound on the grid 0 <= j1 <= e, 0 <= j2 <= m+2g-2-e,
/// j3 <= min(m, j2, (d-1)j1). Below, j3 stops at i3 = (d-1)i1 + i2, the bidegree
/// of the minors cutting out the graph; `mor_dim` returns None for empty spaces.
pub fn general_dim_bound_rhs<M>(n: i64, d: i64, e: i64, m: i64, g: i64, mor_dim: M) -> GeneralDimBound
where
    M: Fn(i64, i64, i64) -> Option<i64>,
{
    let mut warnings = Vec::new();
    if n + 1 < 2 * d {
        warnings.push(format!("n+1 = {} < 2d = {}", n + 1, 2 * d));
    }
    match e_threshold(n, d, g) {
        Some(t) if int(e) > t => {}
        Some(t) => warnings.push(format!("e = {e} is not above {t}")),
        None => warnings.push("e bound undefined (d <= 2 or n+1 = 2d)".into()),
    }
    if 2 * m > d * e + 2 {
        warnings.push(format!("m = {m} > de/2 + 1"));
    }
    if d < 2 {
        warnings.push("d < 2".into());
    }
    let d1 = (d - 1).max(1);

    let mut grid: Option<(i64, (i64, i64, i64))> = None;
    for j1 in 0..=e {
        for j2 in 0..=(m + 2 * g - 2 - e) {
            let (i1, i2) = (e - j1, m + 2 * g - 2 - e - j2);
            let top = m.min(j2).min((d - 1) * j1);
            let bottom = m - ((d - 1) * i1 + i2);
            for j3 in bottom..=top {
                if let Some(dim) = mor_dim(i1, i2, m - j3) {
                    let v = dim + 2 + j1 + j2;
                    if grid.is_none_or(|(best, _)| v > best) {
                        grid = Some((v, (j1, j2, j3)));
                    }
                }
            }
        }
    }
    let cm = (m + d1 - 1).div_euclid(d1);
    let c_zero = m + cm + (n + 1) * (e + 1 - g - cm);
    let t = BigRational::new((d * e - m - 2 * g + 2).into(), d1.into());
    let contained = int(m) + &t + int(n + 1) * (int(e + 1 - g) - &t);
    let contained_top = 2 * g - 1 + 2 * m;
    let mut value = if int(c_zero) > contained { int(c_zero) } else { contained.clone() };
    if int(contained_top) > value {
        value = int(contained_top);
    }
    if let Some((v, _)) = grid {
        if int(v) > value {
            value = int(v);
        }
    }
    GeneralDimBound {
        value,
        grid,
        c_zero,
        contained,
        contained_top,
        hypotheses_hold: warnings.is_empty(),
        warnings,
    }
}
