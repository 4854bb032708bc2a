//! Linear-programming reductions for the arbitrary hypersurface case.
//!
//! Writes i1 = e - j1, i2 = m + 2g - 2 - e - j2, i3 = m - j3 and
//! need(e, m, j1, j2) = (n+1)(e+1-g) - 4m - 2 - j1 - j2 - eδ. The three case
//! bounds on dim Mor'_{i1,i2,i3} each satisfy need - bound >= K_c with an
//! explicit constant K_c; the e-sweep checks the three closed-form branches.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Result};

type Q = Ratio<i128>;

fn q(n: i64) -> Q {
    Q::from_integer(n as i128)
}

fn to_q(x: &BigRational) -> Result<Q> {
    match (x.numer().to_i128(), x.denom().to_i128()) {
        (Some(a), Some(b)) => Ok(Q::new(a, b)),
        _ => invalid("rational parameter too large"),
    }
}

pub fn to_big(x: &Q) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

/// Parameters for [`appendix_verify`].
#[derive(Clone, Debug)]
pub struct AppendixParams {
    pub n: i64,
    pub d: i64,
    pub g: i64,
    pub delta: BigRational,
    pub e_min: i64,
    pub e_max: i64,
    /// Added to every right-hand side; stands in for the O(1) terms.
    pub slack: BigRational,
    /// e bound for the tuple grid of the case reductions.
    pub grid_e_max: i64,
    /// i1, i2, i3 bound for the witness families.
    pub witness_max: i64,
}

impl AppendixParams {
    pub fn new(n: i64, d: i64, g: i64, delta: BigRational, e_max: i64) -> Self {
        AppendixParams {
            n,
            d,
            g,
            delta,
            e_min: 1,
            e_max,
            slack: BigRational::zero(),
            grid_e_max: 10,
            witness_max: 24,
        }
    }
}

/// The smallest n with n > 5d - 5 + (d-1)δ, plus one.
pub fn default_n(d: i64, delta: &BigRational) -> i64 {
    let t = BigRational::from_integer((5 * d - 5).into()) + BigRational::from_integer((d - 1).into()) * delta;
    t.ceil().to_integer().to_i64().expect("small") + 1
}

struct Consts {
    n: i64,
    d: i64,
    g: i64,
    delta: Q,
    slack: Q,
}

impl Consts {
    fn need(&self, e: i64, m: i64, j1: Q, j2: Q) -> Q {
        q((self.n + 1) * (e + 1 - self.g) - 4 * m - 2) - j1 - j2 - self.delta * q(e)
    }

    fn need_q(&self, e: Q, m: Q, j1: Q, j2: Q) -> Q {
        q(self.n + 1) * (e + q(1 - self.g)) - q(4) * m - q(2) - j1 - j2 - self.delta * e
    }

    /// rhs - lhs for the three closed-form branches (each must be > 0).
    fn margins(&self, e: i64, m: i64) -> [Q; 3] {
        let (n, d, g) = (self.n, self.d, self.g);
        let base = q((n + 1) * (e + 1 - g) - 4 * m) - self.delta * q(e) + self.slack;
        let cm = (m + d - 2).div_euclid(d - 1);
        let b1 = q(m + cm + (n + 1) * (e + 1 - g - cm));
        let t = Q::new((d * e - m - 2 * g + 2) as i128, (d - 1) as i128);
        let b2 = q(m) + t + q(n + 1) * (q(e + 1 - g) - t);
        let base3 = q((n + 1) * (e + 1 - g) - 2 * m) - self.delta * q(e) + self.slack;
        let b3 = q(2 * g - 1 + 2 * m);
        [base - b1, base - b2, base3 - b3]
    }

    fn case_bound(&self, c: usize, i1: Q, i2: Q, i3: Q) -> Q {
        let (n, d) = (self.n, self.d);
        match c {
            0 => (q(n + 2) - self.delta) * i1 + i2 - q(5) * i3,
            1 => (q(n + 2) - Q::new(5 * d as i128, 2) - self.delta) * i1 + i2,
            _ => i1 + self.c3() * i2,
        }
    }

    /// (2(n+1-δ) - 4d - 2)/(d-2).
    fn c3(&self) -> Q {
        (q(2) * (q(self.n + 1) - self.delta) - q(4 * self.d + 2)) / q(self.d - 2)
    }

    /// need - bound_c >= K_c.
    fn k(&self, c: usize) -> Q {
        let base = q((self.n + 1) * (1 - self.g) - 2 * self.g);
        match c {
            0 => base,
            1 => base - q(5),
            _ => base - q(5) + (self.c3() - q(1)) * q(1 - 2 * self.g),
        }
    }

    /// Which case of the bound an i-tuple falls in (first matching).
    fn case_of(&self, i1: Q, i2: Q, i3: Q) -> usize {
        let d = self.d;
        if i3 <= q(d) * i1 / q(2) + q(1) {
            0
        } else if q(d - 2) * i1 / q(2) + q(2 * self.g - 1) >= i2 {
            1
        } else {
            2
        }
    }

    fn side_conditions(&self, i1: Q, i2: Q, i3: Q) -> bool {
        let (d, g) = (self.d, self.g);
        i1 + i2 <= i3 + q(2 * g - 2) && q(d) * (i2 + q(1 - 2 * g)) <= q(d - 2) * (i3 - q(1))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepTally {
    pub checked: u64,
    /// e values with some m violating the inequality.
    pub failing_e: Vec<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionTally {
    pub checked: u64,
    /// (e, m, j1, j2, j3) with need - bound < K - slack.
    pub failures: Vec<(i64, i64, i64, i64, i64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessTally {
    pub checked: u64,
    /// Witnesses with integral (e, m, j1, j2, j3).
    pub integral: u64,
    /// (i1, i2, i3) whose witness breaks a constraint or is not tight.
    pub failures: Vec<(i64, i64, i64)>,
}

#[derive(Clone, Debug)]
pub struct AppendixReport {
    pub n: i64,
    pub d: i64,
    pub g: i64,
    pub delta: BigRational,
    pub slack: BigRational,
    /// n > 5d - 5 + (d-1)δ.
    pub hypothesis_holds: bool,
    pub e_min: i64,
    pub e_max: i64,
    pub sweeps: [SweepTally; 3],
    /// Smallest e with every branch inequality holding on [e, e_max].
    pub e0: Option<i64>,
    pub fails_at_e_max: bool,
    pub side_condition_failures: u64,
    pub reductions: [ReductionTally; 3],
    /// Grid tuples by the case their (i1, i2, i3) falls in.
    pub tuples_by_case: [u64; 3],
    pub witnesses: [WitnessTally; 3],
    /// The K_c constants.
    pub constants: [BigRational; 3],
}

impl AppendixReport {
    /// All checks pass, or (when the hypothesis fails) some branch inequality
    /// still fails at the top of the range.
    pub fn consistent(&self) -> bool {
        let witnesses_ok = self.witnesses.iter().all(|w| w.failures.is_empty());
        if self.hypothesis_holds {
            self.e0.is_some()
                && self.side_condition_failures == 0
                && self.reductions.iter().all(|r| r.failures.is_empty())
                && witnesses_ok
        } else {
            self.fails_at_e_max && witnesses_ok
        }
    }
}

const MAX_RECORDED: usize = 16;

pub fn appendix_verify(params: &AppendixParams) -> Result<AppendixReport> {
    let AppendixParams {
        n,
        d,
        g,
        e_min,
        e_max,
        grid_e_max,
        witness_max,
        ..
    } = *params;
    if d < 3 {
        return invalid("need d >= 3");
    }
    if g < 0 || e_min < 0 || e_max < e_min {
        return invalid("need g >= 0 and 0 <= e_min <= e_max");
    }
    let c = Consts {
        n,
        d,
        g,
        delta: to_q(&params.delta)?,
        slack: to_q(&params.slack)?,
    };
    let hyp = q(n) > q(5 * d - 5) + q(d - 1) * c.delta;

    // closed-form branches over e, m ∈ (e+1-2g, de/2+1]
    let per_e: Vec<(i64, u64, [bool; 3])> = (e_min..=e_max)
        .into_par_iter()
        .map(|e| {
            let mut bad = [false; 3];
            let mut count = 0;
            for m in (e + 2 - 2 * g).max(0)..=(d * e + 2).div_euclid(2) {
                count += 1;
                for (b, mg) in bad.iter_mut().zip(c.margins(e, m)) {
                    *b |= !mg.is_positive();
                }
            }
            (e, count, bad)
        })
        .collect();
    let mut sweeps: [SweepTally; 3] = Default::default();
    for (e, count, bad) in &per_e {
        for i in 0..3 {
            sweeps[i].checked += count;
            if bad[i] {
                sweeps[i].failing_e.push(*e);
            }
        }
    }
    let last_bad = per_e.iter().filter(|(_, _, b)| b.iter().any(|&x| x)).map(|(e, _, _)| *e).max();
    let e0 = match last_bad {
        None => Some(e_min),
        Some(x) if x < e_max => Some(x + 1),
        Some(_) => None,
    };

    // case reductions on admissible (e, m, j1, j2, j3)
    let consts = [c.k(0), c.k(1), c.k(2)];
    let tuples: Vec<(u64, [u64; 3], [ReductionTally; 3])> = (0..=grid_e_max)
        .into_par_iter()
        .map(|e| {
            let mut side_bad = 0;
            let mut by_case = [0u64; 3];
            let mut t: [ReductionTally; 3] = Default::default();
            let i3_max = d * grid_e_max + 2;
            for m in (e + 2 - 2 * g).max(0)..=(d * e + 2).div_euclid(2) {
                for j1 in 0..=e {
                    for j2 in 0..=(m + 2 * g - 2 - e) {
                        let top = m.min(j2).min((d - 1) * j1);
                        for j3 in (m - i3_max)..=top {
                            let (i1, i2, i3) = (q(e - j1), q(m + 2 * g - 2 - e - j2), q(m - j3));
                            if !c.side_conditions(i1, i2, i3) {
                                side_bad += 1;
                            }
                            by_case[c.case_of(i1, i2, i3)] += 1;
                            let need = c.need(e, m, q(j1), q(j2));
                            for (cc, tally) in t.iter_mut().enumerate() {
                                tally.checked += 1;
                                if need - c.case_bound(cc, i1, i2, i3) < consts[cc] - c.slack
                                    && tally.failures.len() < MAX_RECORDED
                                {
                                    tally.failures.push((e, m, j1, j2, j3));
                                }
                            }
                        }
                    }
                }
            }
            (side_bad, by_case, t)
        })
        .collect();
    let mut side_condition_failures = 0;
    let mut reductions: [ReductionTally; 3] = Default::default();
    let mut tuples_by_case = [0u64; 3];
    for (s, bc, t) in tuples {
        side_condition_failures += s;
        for i in 0..3 {
            tuples_by_case[i] += bc[i];
        }
        for (acc, x) in reductions.iter_mut().zip(t) {
            acc.checked += x.checked;
            for f in x.failures {
                if acc.failures.len() < MAX_RECORDED {
                    acc.failures.push(f);
                }
            }
        }
    }

    // tightness witnesses
    let mut witnesses: [WitnessTally; 3] = Default::default();
    for a in 0..=witness_max {
        for b in 0..=witness_max {
            for cc in 0..=witness_max {
                let (i1, i2, i3) = (q(a), q(b), q(cc));
                if !(i1 + i2 <= i3 + q(2 * g - 2)) {
                    continue;
                }
                let half_d = Q::new(d as i128, 2);
                let in_case = [
                    i3 <= half_d * i1 + q(1),
                    i3 > half_d * i1 + q(1) && q(d - 2) * i1 / q(2) + q(2 * g - 1) >= i2,
                    q(d - 2) * i1 / q(2) + q(2 * g - 1) < i2 && c.side_conditions(i1, i2, i3),
                ];
                for (case, tally) in witnesses.iter_mut().enumerate() {
                    if !in_case[case] {
                        continue;
                    }
                    let (e, m, j1, j2, j3) = witness(&c, case, i1, i2, i3);
                    tally.checked += 1;
                    if [e, m, j1, j2, j3].iter().all(|x| x.is_integer()) {
                        tally.integral += 1;
                    }
                    let ok = j1 >= Q::zero()
                        && j2 >= Q::zero()
                        && j3 <= j2
                        && j3 <= q(d - 1) * j1
                        && m <= half_d * e + q(1)
                        && e - j1 == i1
                        && m + q(2 * g - 2) - e - j2 == i2
                        && m - j3 == i3
                        && c.need_q(e, m, j1, j2) - c.case_bound(case, i1, i2, i3) == consts[case];
                    if !ok && tally.failures.len() < MAX_RECORDED {
                        tally.failures.push((a, b, cc));
                    }
                }
            }
        }
    }

    Ok(AppendixReport {
        n,
        d,
        g,
        delta: params.delta.clone(),
        slack: params.slack.clone(),
        hypothesis_holds: hyp,
        e_min,
        e_max,
        fails_at_e_max: last_bad == Some(e_max),
        sweeps,
        e0,
        side_condition_failures,
        reductions,
        tuples_by_case,
        witnesses,
        constants: consts.map(|k| to_big(&k)),
    })
}

/// The (e, m, j1, j2, j3) realizing case `case` with equality.
fn witness(c: &Consts, case: usize, i1: Q, i2: Q, i3: Q) -> (Q, Q, Q, Q, Q) {
    let (d, g) = (c.d, c.g);
    let one = Q::one();
    match case {
        0 => {
            let e = i1;
            let m = i3;
            (e, m, Q::zero(), i3 + q(2 * g - 2) - i1 - i2, Q::zero())
        }
        1 => {
            let e = i1;
            let m = q(d) * i1 / q(2) + one;
            let j2 = q(d - 2) * i1 / q(2) + q(2 * g - 1) - i2;
            // m - j3 = i3
            let j3 = q(d) * i1 / q(2) + one - i3;
            (e, m, Q::zero(), j2, j3)
        }
        _ => {
            let t = i2 + q(1 - 2 * g);
            let e = q(2) * t / q(d - 2);
            let m = q(d) * t / q(d - 2) + one;
            (e, m, e - i1, Q::zero(), m - i3)
        }
    }
}
