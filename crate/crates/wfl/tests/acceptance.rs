//! Acceptance checks, one PASS/FAIL line per criterion. Runs as a plain
//! binary so the lines show up in `cargo test` output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wfl::arcs::forms::{divisors_of_degree, factors_through, min_degree, DivisorCatalog, DivisorP1, LinearForm, LocalForm, RestrictedForm};
use wfl::arcs::residue::tilde_alpha;
use wfl::arcs::sums::magnitude;
use wfl::arcs::*;
use wfl::counting::{count_all, count_bruteforce, morphism_count_direct, morphism_count_moebius, FermatInstance, WaringInstance};
use wfl::densities::*;
use wfl::ff::{extend_field, places_up_to, CycQ, Field, Fq, Place, Poly, QuotientRing};
use wfl::fourier::{convolve_power, transform_primes, GroupFn};
use wfl::polygon::{appendix_verify, default_n, gamma, AppendixParams};
use wfl::sing::locus::embed_alpha;
use wfl::sing::{exists_c_check, in_sing, katz_bound_check};

const CIRCLE_TIME: Duration = Duration::from_secs(60);
const POLYGON_TIME: Duration = Duration::from_secs(5);
const CONVERGENCE_TIME: Duration = Duration::from_secs(600);
const PERFORMANCE_TIME: Duration = Duration::from_secs(30);
/// Relative slack on magnitudes computed in floating point.
const MAGNITUDE_TOL: f64 = 1e-9;
/// Largest allowed width of the singular-series tail interval.
const TAIL_WIDTH_MAX: f64 = 1e-4;
/// Degree cap for the convergence sweep; the tail is far below the width limit.
const SWEEP_DEGREE: usize = 6;
/// Forms per local ring checked exhaustively; larger rings are sampled.
const LOCAL_EXHAUSTIVE_MAX: u64 = 200_000;
const LOCAL_SAMPLES: usize = 2_000;
/// Ring size up to which direct summation is also run.
const LOCAL_DIRECT_MAX: u64 = 16_000;

type Outcome = std::result::Result<String, String>;

fn field(p: u32, f: u32) -> Arc<Field> {
    Arc::new(Field::standard(p, f).unwrap())
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> std::result::Result<(), String> {
    check(t.elapsed() < limit, || format!("{what} took {:.1?}, limit {limit:?}", t.elapsed()))
}

fn circle_identity() -> Outcome {
    let t = Instant::now();
    let mut total = 0;
    for (p, k, s, e) in [(3u32, 2u32, 2u32, 1usize), (3, 2, 3, 1), (5, 2, 2, 1), (5, 3, 2, 1)] {
        let fq = field(p, 1);
        let sums = circle_sums_all(&fq, k, s, e).map_err(|x| x.to_string())?;
        let qn = (fq.q() as i128).pow(k * e as u32 + 1);
        let len = (p as u64).pow(k * e as u32 + 1);
        check(sums.len() as u64 == len, || format!("{} sums for {len} targets", sums.len()))?;
        for (i, c) in sums.iter().enumerate() {
            let f = Poly::from_index(&fq, i as u64, k as usize * e + 1);
            let n = count_bruteforce(&WaringInstance::new(fq.clone(), k, s, e, f.clone()).unwrap()).unwrap();
            check(c.as_rational() == Some(qn * n as i128), || {
                format!("(q,k,s,e)=({p},{k},{s},{e}) f={f:?}: N={n}, sum={c:?}")
            })?;
            total += 1;
        }
    }
    within(t, CIRCLE_TIME, "circle identity")?;
    Ok(format!("{total} targets exact"))
}

fn local_sum_table() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut exact, mut bounded, mut direct) = (0u64, 0u64, 0u64);
    for q in [5u32, 7] {
        let fq = field(q, 1);
        for k in [2u32, 3] {
            if k % q == 0 {
                continue;
            }
            let places = [
                Place::Finite(Poly::from_ints(&[1, 1])),
                Place::Infinity,
                Place::Finite(wfl::ff::places::irreducibles_of_degree(&fq, 2)[0].clone()),
            ];
            for place in &places {
                let dv = place.degree() as i32;
                let qv = (q as f64).powi(dv);
                for m in 0..=(2 * k as usize + 1) {
                    let ring = QuotientRing::new(&fq, place, m);
                    let size = ring.size(&fq);
                    let direct_all = (size <= LOCAL_DIRECT_MAX).then(|| sz_local_direct_all(&fq, &ring, k).unwrap());
                    let indices: Vec<u64> = if size <= LOCAL_EXHAUSTIVE_MAX {
                        (0..size).collect()
                    } else {
                        (0..LOCAL_SAMPLES).map(|_| rng.gen_range(0..size)).collect()
                    };
                    for idx in indices {
                        let lf = LocalForm::new(ring.clone(), Poly::from_index(&fq, idx, ring.dim()).padded(ring.dim()));
                        if !lf.is_nondegenerate() {
                            continue;
                        }
                        let v = sz_local(&fq, &lf, k).unwrap();
                        if let Some(all) = &direct_all {
                            check(all[idx as usize] == v, || format!("q={q} k={k} v={place:?} m={m}: recursion != direct"))?;
                            direct += 1;
                        }
                        if m % k as usize != 1 {
                            let c = (m as i64 + k as i64 - 1) / k as i64;
                            let want = BigRational::new(BigInt::one(), BigInt::from(q).pow((c * dv as i64) as u32));
                            check(v == CycQ::from_int(q, want), || format!("q={q} k={k} v={place:?} m={m}: {v:?}"))?;
                            exact += 1;
                        } else {
                            let bound = (k - 1) as f64 * qv.powf(-((m as f64 - 1.0) / k as f64 + 0.5));
                            let mag = magnitude(&v);
                            check(mag <= bound * (1.0 + MAGNITUDE_TOL), || {
                                format!("q={q} k={k} v={place:?} m={m}: |S| = {mag} > {bound}")
                            })?;
                            bounded += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{exact} exact values, {bounded} magnitude bounds, {direct} direct comparisons"))
}

fn random_divisor_split(fq: &Field, rng: &mut ChaCha8Rng, places: &[Place]) -> (DivisorP1, usize) {
    loop {
        let mut parts: Vec<(Place, u32)> = Vec::new();
        let mut deg = 0;
        let want = rng.gen_range(2..=4usize);
        for _ in 0..8 {
            let pl = &places[rng.gen_range(0..places.len())];
            let m = rng.gen_range(1..=3u32);
            if parts.iter().any(|(p, _)| p == pl) || deg + pl.degree() * m as usize > want {
                continue;
            }
            deg += pl.degree() * m as usize;
            parts.push((pl.clone(), m));
        }
        if parts.len() >= 2 {
            let z = DivisorP1::from_parts(parts).unwrap();
            let cut = rng.gen_range(1..z.parts().len());
            let _ = fq;
            return (z, cut);
        }
    }
}

fn multiplicativity() -> Outcome {
    let fq = field(5, 1);
    let places = places_up_to(&fq, 2, true).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..200 {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let (z, cut) = random_divisor_split(&fq, &mut rng, &places);
        let rf = loop {
            let parts: Vec<LocalForm> = z
                .rings(&fq)
                .into_iter()
                .map(|r| {
                    let c = (0..r.dim()).map(|_| Fq(rng.gen_range(0..5))).collect();
                    LocalForm::new(r, c)
                })
                .collect();
            let rf = RestrictedForm { z: z.clone(), n: 8, parts };
            if rf.is_nondegenerate() {
                break rf;
            }
        };
        let np = rf.parts.len();
        let first: Vec<usize> = (0..cut).collect();
        let second: Vec<usize> = (cut..np).collect();
        let whole = sz_direct(&fq, &rf, k).unwrap();
        let a = sz_direct(&fq, &rf.select(&first), k).unwrap();
        let b = sz_direct(&fq, &rf.select(&second), k).unwrap();
        check(whole == a.mul(&b), || format!("trial {trial}: Z={z:?} k={k}"))?;
        check(whole == sz(&fq, &rf, k).unwrap(), || format!("trial {trial}: local product differs"))?;
    }
    Ok("200 splittings exact".into())
}

fn major_arc_evaluation() -> Outcome {
    let fq = field(3, 1);
    let (k, e) = (2u32, 2usize);
    let n = k as usize * e;
    let all = s1_all(&fq, e, k).map_err(|x| x.to_string())?;
    let cat = DivisorCatalog::new(&fq, n, e + 1);
    let q_e1 = CycQ::from_int(3, rat(27, 1));
    let mut forms = 0;
    let mut pairs = 0;
    for (i, s1) in all.iter().enumerate() {
        let a = LinearForm::from_index(&fq, i as u64, n + 1);
        let Some((_, zs)) = cat.min_degree(&fq, &a) else { continue };
        forms += 1;
        for z in zs {
            let rf = restrict(&fq, &a, &z).unwrap();
            check(s1.to_rational() == sz(&fq, &rf, k).unwrap().mul(&q_e1), || format!("α index {i}, Z={z:?}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{forms} forms of degree <= e+1, {pairs} (α, Z) pairs"))
}

fn katz() -> Outcome {
    let mut out = Vec::new();
    for (q, k, e) in [(3u32, 2u32, 1usize), (3, 2, 2), (5, 3, 1)] {
        let r = katz_bound_check(&field(q, 1), e, k, 3).map_err(|x| x.to_string())?;
        check(r.passed(), || format!("(q,k,e)=({q},{k},{e}) violations {:?}", r.violations))?;
        out.push(format!("({q},{k},{e}) max ratio {:.3}, unstable {}", r.max_ratio, r.unstable.len()));
    }
    Ok(out.join("; "))
}

fn singular_equivalence() -> Outcome {
    let fq = field(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut points = 0u64;
    for e in 1..=2usize {
        let n = 2 * e;
        for _ in 0..20 {
            let alpha = LinearForm::new((0..=n).map(|_| Fq(rng.gen_range(0..3))).collect());
            let (_, zs) = min_degree(&fq, &alpha).map_err(|x| x.to_string())?;
            let mut divisors = vec![zs[0].clone()];
            let bigger: Vec<_> = divisors_of_degree(&fq, n + 2)
                .into_iter()
                .filter(|z| factors_through(&fq, &alpha, z))
                .collect();
            divisors.push(bigger[rng.gen_range(0..bigger.len())].clone());
            for z in &divisors {
                let rf = tilde_alpha(&fq, &restrict(&fq, &alpha, z).unwrap());
                for m in 1..=2 {
                    let ext = extend_field(&fq, m).unwrap();
                    let big = &*ext.big;
                    let al = embed_alpha(&ext, &alpha);
                    for idx in 0..(big.q() as u64).pow(e as u32 + 1) {
                        let a = Poly::from_index(big, idx, e + 1);
                        check(exists_c_check(&ext, &a, &rf, e, 2) == in_sing(big, &al, &a, e, 2), || {
                            format!("α={:?} Z={z:?} a={a:?} m={m}", alpha.coords)
                        })?;
                        points += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{points} points agree"))
}

fn polygon() -> Outcome {
    let t = Instant::now();
    for p in [3u64, 5, 7, 11, 13] {
        check(gamma(2, p).unwrap().gamma.is_zero(), || format!("γ_(2,{p}) != 0"))?;
    }
    let g35 = gamma(3, 5).unwrap();
    check(g35.gamma == rat(2, 5), || format!("γ_(3,5) = {}", g35.gamma))?;
    let mut count = 0;
    for k in 3..=7u32 {
        for p in (k as u64 + 1..=31).filter(|&p| (2..p).all(|d| p % d != 0)) {
            let r = gamma(k, p).unwrap();
            check(r.certified && r.upward_closed && r.convex, || format!("k={k} p={p}: polygon not certified"))?;
            check(r.within_bounds(), || format!("k={k} p={p}: γ = {} outside [{}, {}]", r.gamma, r.lower_bound, r.upper_bound))?;
            count += 1;
        }
    }
    within(t, POLYGON_TIME, "polygon")?;
    Ok(format!("γ_(3,5) = 2/5, {count} (k,p) pairs within bounds"))
}

fn with_valuation(fq: &Field, place: &Place, w: u32, unit: &[u32]) -> Poly {
    let pi = match place {
        Place::Finite(p) => p.clone(),
        Place::Infinity => Poly::x(),
    };
    let mut u = Poly::from_ints(unit);
    if u.rem(fq, &pi).is_zero() {
        u = u.add(fq, &Poly::one());
    }
    pi.pow(fq, w as u64).mul(fq, &u)
}

fn local_densities() -> Outcome {
    let fq = field(5, 1);
    let places = [
        Place::Finite(Poly::from_ints(&[0, 1])),
        Place::Finite(Poly::from_ints(&[3, 1])),
        Place::Finite(Poly::from_ints(&[2, 0, 1])),
        Place::Infinity,
    ];
    let (mut rec, mut es) = (0, 0);
    for s in [2u32, 5] {
        for place in &places {
            for w in 0..=2u32 {
                for unit in [[1u32, 2], [3, 1], [2, 4]] {
                    let f = with_valuation(&fq, place, w, &unit);
                    let r = ell_v(&fq, place, &f, s, 2).map_err(|x| x.to_string())?;
                    let cap = if place.degree() == 2 { 3 } else { 5 };
                    let en = ell_v_enumerated(&fq, place, &f, s, 2, cap).map_err(|x| x.to_string())?;
                    check(en.value == r.value, || format!("s={s} v={place:?} w={w}: recursion != enumeration"))?;
                    rec += 1;
                }
                let f = with_valuation(&fq, place, w, &[2, 1]);
                for r in 0..=3 {
                    let (lhs, rhs) = local_expansion_sides(&fq, place, &f, s, 2, r).map_err(|x| x.to_string())?;
                    check(lhs.as_rational() == Some(rhs), || format!("s={s} v={place:?} w={w} r={r}: expansion differs"))?;
                    es += 1;
                }
            }
        }
    }
    let mut pos = 0;
    for (q, k, s) in [(5u32, 2u32, 5u32), (5, 2, 6), (17, 3, 5), (3, 2, 5)] {
        let fq = field(q, 1);
        for place in [Place::Finite(Poly::from_ints(&[0, 1])), Place::Finite(Poly::from_ints(&[1, 1])), Place::Infinity] {
            for f in [Poly::zero(), Poly::one(), Poly::from_ints(&[0, 1]), Poly::from_ints(&[0, 0, 1]), Poly::from_ints(&[2, 0, 0, 1])] {
                let l = ell_v(&fq, &place, &f, s, k).map_err(|x| x.to_string())?;
                check(l.value.is_positive(), || format!("ℓ_v <= 0 at q={q} k={k} s={s} {place:?} {f:?}"))?;
                pos += 1;
            }
        }
    }
    Ok(format!("{rec} recursion/enumeration, {es} expansion identities, {pos} positive densities"))
}

fn manin() -> Outcome {
    for (n, d, q) in [(2u32, 2u32, 3u32), (3, 2, 3), (3, 3, 5)] {
        for deg in 1..=2 {
            let (lhs, rhs) = manin_local_identity(&field(q, 1), n, d, deg).map_err(|x| x.to_string())?;
            check(lhs == rhs, || format!("(n,d,q)=({n},{d},{q}) deg v={deg}: {lhs} != {rhs}"))?;
        }
    }
    let mut counts = Vec::new();
    for e in [0usize, 1] {
        let inst = FermatInstance::new(field(3, 1), 2, 2, e).unwrap();
        let a = morphism_count_moebius(&inst).map_err(|x| x.to_string())?;
        let b = morphism_count_direct(&inst).map_err(|x| x.to_string())?;
        check(a == b, || format!("e={e}: Möbius {a} != direct {b}"))?;
        counts.push(a);
    }
    Ok(format!("local identities exact; morphism counts {counts:?}"))
}

fn convergence() -> Outcome {
    let t = Instant::now();
    let fq = field(5, 1);
    let (k, s) = (2u32, 6u32);
    let mut ratios = Vec::new();
    for e in 1..=4usize {
        let counts = count_all(&fq, k, s, e).map_err(|x| x.to_string())?;
        let sweep = main_term_sweep(&fq, k, s, e, SWEEP_DEGREE).map_err(|x| x.to_string())?;
        let width = sweep.tail.width().ok_or("tail bound unavailable")?.to_f64().unwrap();
        check(width < TAIL_WIDTH_MAX, || format!("tail width {width}"))?;
        let lo = sweep.tail.lo.to_f64().unwrap();
        let hi = sweep.tail.hi.as_ref().unwrap().to_f64().unwrap();
        let mut r = 0.0f64;
        for (n, mt) in counts.values().iter().zip(&sweep.values) {
            check(*mt > 0.0, || "nonpositive main term".into())?;
            r = r.max((*n as f64 / mt - 1.0).abs());
        }
        // a coarser sweep's tail interval must bracket the finer values
        let coarse = main_term_sweep(&fq, k, s, e, SWEEP_DEGREE - 2).map_err(|x| x.to_string())?;
        let clo = coarse.tail.lo.to_f64().unwrap();
        let chi = coarse.tail.hi.as_ref().ok_or("coarse tail bound unavailable")?.to_f64().unwrap();
        for (i, (v, fine)) in coarse.values.iter().zip(&sweep.values).enumerate() {
            check(v * clo * (1.0 - MAGNITUDE_TOL) <= *fine && *fine <= v * chi * (1.0 + MAGNITUDE_TOL), || {
                format!("e={e} f index {i}: {fine} outside [{}, {}]", v * clo, v * chi)
            })?;
        }
        check(lo <= 1.0 && 1.0 <= hi, || format!("tail interval [{lo}, {hi}] misses 1"))?;
        ratios.push(r);
    }
    check(ratios[3] < ratios[0], || format!("r(4) = {} not below r(1) = {}", ratios[3], ratios[0]))?;
    within(t, CONVERGENCE_TIME, "convergence sweep")?;
    let list: Vec<String> = ratios.iter().enumerate().map(|(i, r)| format!("r({})={r:.3e}", i + 1)).collect();
    Ok(list.join(" "))
}

fn appendix() -> Outcome {
    let delta = rat(1, 10);
    let mut e0s = Vec::new();
    for d in 3..=5i64 {
        for g in 0..=1i64 {
            let n = default_n(d, &delta);
            let r = appendix_verify(&AppendixParams::new(n, d, g, delta.clone(), 300)).map_err(|x| x.to_string())?;
            check(r.hypothesis_holds && r.e0.is_some(), || format!("d={d} g={g} n={n}: no e0 (failing {:?})", r.sweeps))?;
            check(r.reductions.iter().all(|x| x.failures.is_empty()) && r.side_condition_failures == 0, || {
                format!("d={d} g={g}: case reductions fail {:?}", r.reductions)
            })?;
            check(r.witnesses.iter().all(|w| w.checked > 0 && w.failures.is_empty()), || {
                format!("d={d} g={g}: witnesses {:?}", r.witnesses)
            })?;
            e0s.push(format!("d={d},g={g},n={n}:e0={}", r.e0.unwrap()));
            let low = appendix_verify(&AppendixParams::new(5 * d - 6, d, g, delta.clone(), 300)).map_err(|x| x.to_string())?;
            check(!low.hypothesis_holds && low.fails_at_e_max, || format!("d={d} g={g}: n = 5d-6 does not fail"))?;
        }
    }
    Ok(e0s.join(" "))
}

fn naive_power(h: &GroupFn<u128>, s: u32) -> Vec<u128> {
    let field = h.field().clone();
    let mut acc = vec![0u128; h.len()];
    acc[0] = 1;
    for _ in 0..s {
        let mut next = vec![0u128; h.len()];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &b) in h.values().iter().enumerate() {
                if a != 0 && b != 0 {
                    let sum: Vec<Fq> = h.coords_of(i).iter().zip(h.coords_of(j)).map(|(&x, y)| field.add(x, y)).collect();
                    next[h.index_of(&sum)] += a * b;
                }
            }
        }
        acc = next;
    }
    acc
}

fn performance() -> Outcome {
    let t = Instant::now();
    let table = count_all(&field(5, 1), 2, 6, 4).map_err(|x| x.to_string())?;
    let took = t.elapsed();
    check(table.total() == 5u128.pow(5 * 6), || "counts do not sum to q^{s(e+1)}".into())?;
    check(took < PERFORMANCE_TIME, || format!("count_all took {took:.1?}"))?;
    let f3 = field(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 1..=3 {
        let vals = (0..3usize.pow(n as u32)).map(|_| rng.gen_range(0..10u128)).collect();
        let h = GroupFn::new(f3.clone(), n, vals).unwrap();
        for s in 1..=4 {
            let fast = convolve_power(&h, s, &transform_primes(3, 4)).map_err(|x| x.to_string())?;
            check(fast.values() == &naive_power(&h, s)[..], || format!("n={n} s={s}: convolution differs"))?;
        }
    }
    Ok(format!("count_all(5^9 points) in {took:.1?}; convolution exact for n <= 3"))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("circle identity", circle_identity),
        ("local sum table", local_sum_table),
        ("multiplicativity", multiplicativity),
        ("major-arc evaluation", major_arc_evaluation),
        ("Katz bound", katz),
        ("singular-locus equivalence", singular_equivalence),
        ("polygon", polygon),
        ("local densities", local_densities),
        ("Manin local identity", manin),
        ("empirical convergence", convergence),
        ("appendix verifier", appendix),
        ("performance gate", performance),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.1} s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.1} s]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
