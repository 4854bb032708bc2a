//! One function per experiment. Each returns a JSON result, an optional CSV
//! table and, when a hard assertion fails, a minimal reproducer.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use wfl::arcs::{arc_split, circle_sums_all, min_degree, restrict, tilde_alpha, LinearForm};
use wfl::counting::{
    count_all, count_bruteforce, morphism_count_direct, morphism_count_moebius, FermatInstance, WaringInstance,
};
use wfl::densities::{ell_v, ell_v_enumerated, main_term_manin, main_term_sweep, main_term_waring, manin_local_identity};
use wfl::ff::{extend_field, Cyclotomic, Field, Fq, Place, Poly};
use wfl::polygon::{appendix_verify, default_n, gamma, thresholds, AppendixParams};
use wfl::sing::locus::embed_alpha;
use wfl::sing::{exists_c_check, in_sing, katz_bound_check, sing_dim_estimate, SingInstance};

use crate::spec::*;

pub enum Failure {
    Schema(String),
    Budget(String),
    /// An identity or inequality that must hold did not.
    Assertion { message: String, reproducer: Value },
}

impl From<wfl::Error> for Failure {
    fn from(e: wfl::Error) -> Self {
        match e {
            wfl::Error::Budget { .. } | wfl::Error::CrtInsufficient { .. } => Failure::Budget(e.to_string()),
            wfl::Error::Invalid(_) | wfl::Error::Degenerate(_) => Failure::Schema(e.to_string()),
            wfl::Error::Consistency(m) => Failure::Assertion {
                message: m,
                reproducer: Value::Null,
            },
        }
    }
}

pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    pub failure: Option<(String, Value)>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

type Res = Result<Outcome, Failure>;

fn ok(result: Value) -> Res {
    Ok(Outcome {
        result,
        table: None,
        failure: None,
    })
}

fn rat(r: &BigRational) -> Value {
    Value::String(r.to_string())
}

fn opt_rat(r: &Option<BigRational>) -> Value {
    r.as_ref().map(rat).unwrap_or(Value::Null)
}

fn big(n: u128) -> Value {
    Value::String(n.to_string())
}

fn coeffs(p: &Poly) -> Vec<u32> {
    p.coeffs().iter().map(|c| c.0).collect()
}

fn place_json(p: &Place) -> Value {
    match p {
        Place::Infinity => json!("inf"),
        Place::Finite(g) => json!(coeffs(g)),
    }
}

fn cyc_json(c: &Cyclotomic) -> Value {
    match c.as_rational() {
        Some(v) => Value::String(v.to_string()),
        None => json!({ "zeta_coords": c.coords().iter().map(|x| x.to_string()).collect::<Vec<_>>() }),
    }
}

fn field(q: u32) -> Result<Arc<Field>, Failure> {
    let p = (2..=q).find(|d| q % d == 0).ok_or_else(|| Failure::Schema(format!("q = {q} is not a prime power")))?;
    let mut f = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    if r != 1 {
        return Err(Failure::Schema(format!("q = {q} is not a prime power")));
    }
    Ok(Arc::new(Field::standard(p, f)?))
}

fn poly(fq: &Field, c: &[u32], what: &str) -> Result<Poly, Failure> {
    if let Some(x) = c.iter().find(|&&x| x >= fq.q()) {
        return Err(Failure::Schema(format!("{what}: coefficient {x} is not an element of F_{}", fq.q())));
    }
    Ok(Poly::from_ints(c))
}

fn place(fq: &Field, p: &PlaceArg) -> Result<Place, Failure> {
    match p {
        PlaceArg::Infinity => Ok(Place::Infinity),
        PlaceArg::Finite(c) => {
            let g = poly(fq, c, "place")?;
            if !g.is_monic() || !g.is_irreducible(fq) {
                return Err(Failure::Schema(format!("place {c:?} is not monic irreducible")));
            }
            Ok(Place::Finite(g))
        }
    }
}

fn size(q: u32, exp: usize) -> f64 {
    (q as f64).powi(exp as i32)
}

fn check_oracle(b: &Budgets, needed: f64, what: &str) -> Result<(), Failure> {
    if needed > b.oracle as f64 {
        return Err(Failure::Budget(format!("{what}: {needed:e} points exceed the oracle budget {}", b.oracle)));
    }
    Ok(())
}

/// Rough peak bytes of the convolution pipeline on a group with `entries` elements.
fn check_memory(b: &Budgets, entries: f64, what: &str) -> Result<(), Failure> {
    let bytes = entries * 64.0;
    if bytes > b.memory_bytes as f64 {
        return Err(Failure::Budget(format!("{what}: about {bytes:e} bytes exceed the memory budget {}", b.memory_bytes)));
    }
    Ok(())
}

pub fn run(spec: &RunSpec) -> Res {
    let b = &spec.budgets;
    match &spec.params {
        Params::Count(p) => count(p, b),
        Params::CircleVerify(p) => circle_verify(p, b),
        Params::Arcs(p) => arcs(p),
        Params::LocalDensity(p) => local_density(p),
        Params::SingularSeries(p) => singular_series(p),
        Params::SingDim(p) => sing_dim(p, b, spec.seed),
        Params::KatzCheck(p) => katz(p),
        Params::Manin(p) => manin(p),
        Params::Gamma(p) => gamma_exp(p),
        Params::Thresholds(p) => thresholds_exp(p),
        Params::Appendix(p) => appendix(p),
        Params::Convergence(p) => convergence(p, b),
    }
}

fn count(p: &CountParams, b: &Budgets) -> Res {
    let fq = field(p.q)?;
    let ke1 = p.k as usize * p.e + 1;
    let instance = json!({"q": p.q, "k": p.k, "s": p.s, "e": p.e});
    let Some(fc) = &p.f else {
        if p.method != CountMethod::Convolution {
            return Err(Failure::Schema("an f-sweep uses the convolution method".into()));
        }
        check_memory(b, size(p.q, ke1), "count sweep")?;
        let table = count_all(&fq, p.k, p.s, p.e)?;
        let vals = table.values();
        let rows = vals
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let f = Poly::from_index(&fq, i as u64, ke1).padded(ke1);
                f.iter().map(|c| c.0.to_string()).chain([n.to_string()]).collect()
            })
            .collect();
        let header = (0..ke1).map(|i| format!("f{i}")).chain(["count".to_string()]).collect();
        return Ok(Outcome {
            result: json!({
                "instance": instance,
                "method": "convolution",
                "targets": vals.len(),
                "total": big(table.total()),
                "min": big(*vals.iter().min().unwrap()),
                "max": big(*vals.iter().max().unwrap()),
                "count_at_zero": big(vals[0]),
            }),
            table: Some(Table { header, rows }),
            failure: None,
        });
    };
    let f = poly(&fq, fc, "f")?;
    if f.deg().is_some_and(|d| d >= ke1) {
        return Err(Failure::Schema(format!("deg f exceeds ke = {}", ke1 - 1)));
    }
    let mut instance = instance;
    instance["f"] = json!(fc);
    let brute = if p.method != CountMethod::Convolution {
        check_oracle(b, size(p.q, p.s as usize * (p.e + 1)), "brute-force count")?;
        Some(count_bruteforce(&WaringInstance::new(fq.clone(), p.k, p.s, p.e, f.clone())?)?)
    } else {
        None
    };
    let conv = if p.method != CountMethod::Bruteforce {
        check_memory(b, size(p.q, ke1), "convolution count")?;
        let table = count_all(&fq, p.k, p.s, p.e)?;
        Some(*table.get(&f.padded(ke1)))
    } else {
        None
    };
    let count = brute.or(conv).unwrap();
    let failure = match (brute, conv) {
        (Some(a), Some(c)) if a != c => Some((
            "brute force and convolution disagree".to_string(),
            json!({"instance": instance, "bruteforce": big(a), "convolution": big(c)}),
        )),
        _ => None,
    };
    let method = match p.method {
        CountMethod::Bruteforce => "bruteforce",
        CountMethod::Convolution => "convolution",
        CountMethod::Both => "both",
    };
    Ok(Outcome {
        result: json!({"instance": instance, "count": big(count), "method": method}),
        table: None,
        failure,
    })
}

fn circle_verify(p: &CircleParams, b: &Budgets) -> Res {
    let fq = field(p.q)?;
    let ke1 = p.k as usize * p.e + 1;
    check_oracle(b, size(p.q, p.s as usize * (p.e + 1)), "brute-force count")?;
    check_memory(b, size(p.q, ke1), "circle sums")?;
    let sums = circle_sums_all(&fq, p.k, p.s, p.e)?;
    let scale = (p.q as i128).pow(ke1 as u32);
    let mut rows = Vec::new();
    let mut failure = None;
    let mut equal = 0u64;
    for (i, c) in sums.iter().enumerate() {
        let f = Poly::from_index(&fq, i as u64, ke1);
        let n = count_bruteforce(&WaringInstance::new(fq.clone(), p.k, p.s, p.e, f.clone())?)?;
        let matches = c.as_rational() == Some(scale * n as i128);
        if matches {
            equal += 1;
        } else if failure.is_none() {
            failure = Some((
                "N(f) differs from the normalized circle sum".to_string(),
                json!({"q": p.q, "k": p.k, "s": p.s, "e": p.e, "f": coeffs(&f), "count": big(n), "circle_sum": cyc_json(c)}),
            ));
        }
        let cells = f.padded(ke1).iter().map(|c| c.0.to_string()).collect::<Vec<_>>();
        rows.push(cells.into_iter().chain([n.to_string(), matches.to_string()]).collect());
    }
    let header = (0..ke1).map(|i| format!("f{i}")).chain(["count".into(), "exact".into()]).collect();
    Ok(Outcome {
        result: json!({
            "instance": {"q": p.q, "k": p.k, "s": p.s, "e": p.e},
            "targets": sums.len(),
            "exact_matches": equal,
            "all_exact": equal as usize == sums.len(),
        }),
        table: Some(Table { header, rows }),
        failure,
    })
}

fn arcs(p: &ArcParams) -> Res {
    let fq = field(p.q)?;
    let mut report = arc_split(&fq, p.e, p.k)?;
    let records = std::mem::take(&mut report.records);
    let failure = (report.tally_matches == Some(false)).then(|| {
        (
            "major forms do not match the divisor tally".to_string(),
            json!({"q": p.q, "k": p.k, "e": p.e, "major": report.major, "divisor_tally": report.divisor_tally.to_string()}),
        )
    });
    let mut result = serde_json::to_value(&report).expect("arc report serializes");
    result["divisor_tally"] = big(report.divisor_tally);
    if let Some(qr) = &report.quadratic {
        result["quadratic"]["tally"] = big(qr.tally);
    }
    if p.records {
        result["records"] = serde_json::to_value(&records).expect("records serialize");
    } else {
        result.as_object_mut().unwrap().remove("records");
    }
    let rows = records
        .iter()
        .map(|r| vec![r.index.to_string(), r.deg.to_string(), r.minimal_divisors.to_string(), r.major.to_string()])
        .collect();
    Ok(Outcome {
        result,
        table: Some(Table {
            header: ["index", "deg", "minimal_divisors", "major"].map(String::from).to_vec(),
            rows,
        }),
        failure,
    })
}

fn density_json(d: &wfl::densities::LocalDensity) -> Value {
    json!({
        "place": place_json(&d.place),
        "value": rat(&d.value),
        "stabilized_at": d.stabilized_at,
        "method": format!("{:?}", d.method).to_lowercase(),
        "unsettled": d.unsettled.as_ref().map(|(a, b)| json!([rat(a), rat(b)])),
    })
}

fn local_density(p: &LocalDensityParams) -> Res {
    let fq = field(p.q)?;
    let v = place(&fq, &p.place)?;
    let f = poly(&fq, &p.f, "f")?;
    let rec = (p.method != DensityMethod::Enumeration)
        .then(|| ell_v(&fq, &v, &f, p.s, p.k))
        .transpose()?;
    let en = (p.method != DensityMethod::Recursion)
        .then(|| ell_v_enumerated(&fq, &v, &f, p.s, p.k, p.r_cap))
        .transpose()?;
    let failure = match (&rec, &en) {
        (Some(a), Some(b)) if b.unsettled.is_none() && a.value != b.value => Some((
            "recursion and enumeration disagree".to_string(),
            json!({"q": p.q, "k": p.k, "s": p.s, "place": p.place, "f": p.f, "recursion": rat(&a.value), "enumeration": rat(&b.value)}),
        )),
        _ => None,
    };
    Ok(Outcome {
        result: json!({
            "instance": {"q": p.q, "k": p.k, "s": p.s, "place": p.place, "f": p.f},
            "recursion": rec.as_ref().map(density_json),
            "enumeration": en.as_ref().map(density_json),
        }),
        table: None,
        failure,
    })
}

fn singular_series(p: &SeriesParams) -> Res {
    let fq = field(p.q)?;
    let f = poly(&fq, &p.f, "f")?;
    let mt = main_term_waring(&WaringInstance::new(fq.clone(), p.k, p.s, p.e, f)?, p.degree_cap)?;
    let ser = &mt.series;
    let rows = ser
        .locals
        .iter()
        .map(|d| {
            vec![
                place_json(&d.place).to_string(),
                d.value.to_string(),
                d.value.to_f64().map(|x| x.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Outcome {
        result: json!({
            "instance": {"q": p.q, "k": p.k, "s": p.s, "e": p.e, "f": p.f},
            "degree_cap": ser.d,
            "locals": ser.locals.iter().map(density_json).collect::<Vec<_>>(),
            "partial_product": rat(&ser.partial),
            "tail": {"lo": rat(&ser.tail.lo), "hi": opt_rat(&ser.tail.hi)},
            "main_term": {"partial": rat(&mt.partial), "lo": rat(&mt.lo), "hi": opt_rat(&mt.hi)},
            "main_term_f64": mt.partial.to_f64(),
        }),
        table: Some(Table {
            header: ["place", "density", "density_f64"].map(String::from).to_vec(),
            rows,
        }),
        failure: None,
    })
}

fn sing_dim(p: &SingDimParams, b: &Budgets, seed: u64) -> Res {
    let fq = field(p.q)?;
    let n1 = p.k as usize * p.e + 1;
    check_oracle(b, size(p.q, p.m_max as usize * (p.e + 1)), "Sing point count")?;
    let alphas: Vec<Vec<u32>> = match &p.alpha {
        Some(a) => {
            if a.len() != n1 {
                return Err(Failure::Schema(format!("alpha needs ke+1 = {n1} coordinates")));
            }
            vec![a.clone()]
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..p.samples).map(|_| (0..n1).map(|_| rng.gen_range(0..p.q)).collect()).collect()
        }
    };
    let mut rows = Vec::new();
    let mut failure = None;
    for a in &alphas {
        poly(&fq, a, "alpha")?;
        let alpha = LinearForm::new(a.iter().map(|&x| Fq(x)).collect());
        let est = sing_dim_estimate(&SingInstance::new(fq.clone(), alpha.clone(), p.e, p.k)?, p.m_max)?;
        let mut verified = None;
        if p.verify && a.iter().any(|&x| x != 0) {
            let (_, zs) = min_degree(&fq, &alpha)?;
            let restricted = restrict(&fq, &alpha, &zs[0]).ok_or_else(|| Failure::Assertion {
                message: "form does not factor through its minimal divisor".into(),
                reproducer: json!({"q": p.q, "k": p.k, "e": p.e, "alpha": a}),
            })?;
            let rf = tilde_alpha(&fq, &restricted);
            let ext = extend_field(&fq, 1)?;
            let al = embed_alpha(&ext, &alpha);
            let mut agree = true;
            for idx in 0..(p.q as u64).pow(p.e as u32 + 1) {
                let pt = Poly::from_index(&ext.big, idx, p.e + 1);
                if exists_c_check(&ext, &pt, &rf, p.e, p.k) != in_sing(&ext.big, &al, &pt, p.e, p.k) {
                    agree = false;
                    if failure.is_none() {
                        failure = Some((
                            "(a, c) criterion differs from the definition of Sing".to_string(),
                            json!({"q": p.q, "k": p.k, "e": p.e, "alpha": a, "a": coeffs(&pt)}),
                        ));
                    }
                    break;
                }
            }
            verified = Some(agree);
        }
        rows.push(json!({
            "alpha": a,
            "dim": est.dim,
            "confidence": est.confidence,
            "counts": est.counts.iter().map(|(m, c)| json!([m, big(*c)])).collect::<Vec<_>>(),
            "criterion_agrees": verified,
        }));
    }
    Ok(Outcome {
        result: json!({
            "instance": {"q": p.q, "k": p.k, "e": p.e, "m_max": p.m_max},
            "sampled": p.alpha.is_none(),
            "forms": rows,
        }),
        table: None,
        failure,
    })
}

fn katz(p: &KatzParams) -> Res {
    let fq = field(p.q)?;
    let r = katz_bound_check(&fq, p.e, p.k, p.m_max)?;
    let failure = r.violations.first().map(|&i| {
        let row = r.rows.iter().find(|x| x.index == i).unwrap();
        let alpha = LinearForm::from_index(&fq, i, p.k as usize * p.e + 1);
        (
            "|S_1(α)| exceeds the bound".to_string(),
            json!({"q": p.q, "k": p.k, "e": p.e, "alpha": alpha.coords.iter().map(|c| c.0).collect::<Vec<_>>(), "s1_abs": row.s1_abs, "bound": row.bound, "dim": row.dim}),
        )
    });
    let rows = r
        .rows
        .iter()
        .map(|x| {
            vec![
                x.index.to_string(),
                x.deg.to_string(),
                x.dim.to_string(),
                format!("{:?}", x.confidence).to_lowercase(),
                x.s1_abs.to_string(),
                x.bound.to_string(),
                x.ratio.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        result: json!({
            "instance": {"q": p.q, "k": p.k, "e": p.e, "m_max": p.m_max},
            "forms": r.rows.len(),
            "max_ratio": r.max_ratio,
            "violations": r.violations,
            "unstable": r.unstable,
        }),
        table: Some(Table {
            header: ["index", "deg", "dim", "confidence", "s1_abs", "bound", "ratio"].map(String::from).to_vec(),
            rows,
        }),
        failure,
    })
}

fn manin(p: &ManinParams) -> Res {
    let fq = field(p.q)?;
    let mut failure = None;
    let mut locals = Vec::new();
    for deg in 1..=p.local_degrees as usize {
        let (l, r) = manin_local_identity(&fq, p.n, p.d, deg)?;
        if l != r && failure.is_none() {
            failure = Some((
                "local identity fails".to_string(),
                json!({"q": p.q, "n": p.n, "d": p.d, "deg_v": deg, "lhs": rat(&l), "rhs": rat(&r)}),
            ));
        }
        locals.push(json!({"deg_v": deg, "lhs": rat(&l), "rhs": rat(&r)}));
    }
    let inst = FermatInstance::new(fq.clone(), p.n, p.d, p.e)?;
    let moebius = morphism_count_moebius(&inst)?;
    let direct = match morphism_count_direct(&inst) {
        Ok(c) => Some(c),
        Err(wfl::Error::Budget { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    if direct.is_some_and(|c| c != moebius) && failure.is_none() {
        failure = Some((
            "Möbius count differs from direct enumeration".to_string(),
            json!({"q": p.q, "n": p.n, "d": p.d, "e": p.e, "moebius": big(moebius), "direct": direct.map(big)}),
        ));
    }
    let mt = main_term_manin(&inst, p.degree_cap)?;
    Ok(Outcome {
        result: json!({
            "instance": {"q": p.q, "n": p.n, "d": p.d, "e": p.e},
            "local_identity": locals,
            "count_moebius": big(moebius),
            "count_direct": direct.map(big),
            "main_term": {
                "degree_cap": mt.d_cap,
                "partial": rat(&mt.partial),
                "lo": rat(&mt.lo),
                "hi": opt_rat(&mt.hi),
                "converges": mt.converges,
            },
        }),
        table: None,
        failure,
    })
}

fn gamma_exp(p: &GammaParams) -> Res {
    let r = gamma(p.k, p.p)?;
    let ok_all = r.certified && r.convex && r.upward_closed && r.within_bounds();
    let failure = (!ok_all).then(|| {
        (
            "polygon checks failed".to_string(),
            json!({"k": p.k, "p": p.p, "certified": r.certified, "convex": r.convex, "upward_closed": r.upward_closed, "within_bounds": r.within_bounds()}),
        )
    });
    Ok(Outcome {
        result: json!({
            "k": p.k,
            "p": p.p,
            "gamma": rat(&r.gamma),
            "vertices": r.polygon.vertices,
            "box_bound": r.polygon.box_bound,
            "boxes": r.boxes,
            "certified": r.certified,
            "convex": r.convex,
            "upward_closed": r.upward_closed,
            "lower_bound": rat(&r.lower_bound),
            "upper_bound": rat(&r.upper_bound),
            "within_bounds": r.within_bounds(),
        }),
        table: Some(Table {
            header: vec!["i".into(), "j".into()],
            rows: r.polygon.vertices.iter().map(|(i, j)| vec![i.to_string(), j.to_string()]).collect(),
        }),
        failure,
    })
}

fn thresholds_exp(p: &ThresholdParams) -> Res {
    let r = thresholds(p.k, p.p, p.q, p.s)?;
    ok(json!({
        "k": r.k,
        "p": r.p,
        "q": r.q,
        "s": r.s,
        "gamma": rat(&r.gamma),
        "log_ratio": {"lo": rat(&r.log_ratio.lo), "hi": rat(&r.log_ratio.hi)},
        "q_min": rat(&r.q_min),
        "q_above_min": r.q_above_min,
        "p_above_k": r.p_above_k,
        "s_bound_poly": opt_rat(&r.s_bound_poly),
        "s_bound_minor": opt_rat(&r.s_bound_minor),
        "s_min": r.s_min,
        "theta_strict_bound": rat(&r.theta_strict_bound),
        "theta_bound": rat(&r.theta_bound),
        "theta_max": opt_rat(&r.theta_max),
        "delta_max": rat(&r.delta_max),
        "feasible": r.feasible,
        "decided": r.decided,
    }))
}

fn parse_rat(s: &str, what: &str) -> Result<BigRational, Failure> {
    s.parse().map_err(|_| Failure::Schema(format!("{what}: {s:?} is not a rational a/b")))
}

fn appendix(p: &AppendixArgs) -> Res {
    let delta = parse_rat(&p.delta, "delta")?;
    if delta.is_negative() || delta.is_zero() {
        return Err(Failure::Schema("delta must be positive".into()));
    }
    let n = p.n.unwrap_or_else(|| default_n(p.d, &delta));
    let params = AppendixParams {
        n,
        d: p.d,
        g: p.g,
        delta,
        e_min: p.e_min,
        e_max: p.e_max,
        slack: parse_rat(&p.slack, "slack")?,
        grid_e_max: p.grid_e_max,
        witness_max: p.witness_max,
    };
    let r = appendix_verify(&params)?;
    let failure = (!r.consistent()).then(|| {
        (
            if r.hypothesis_holds { "inequalities fail above the hypothesis" } else { "no inequality fails below the hypothesis" }
                .to_string(),
            json!({"n": n, "d": p.d, "g": p.g, "delta": p.delta, "e_max": p.e_max,
                "failing_e": r.sweeps.iter().map(|s| s.failing_e.iter().take(4).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "reduction_failures": r.reductions.iter().map(|x| x.failures.iter().take(4).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "witness_failures": r.witnesses.iter().map(|x| x.failures.iter().take(4).collect::<Vec<_>>()).collect::<Vec<_>>()}),
        )
    });
    Ok(Outcome {
        result: json!({
            "n": r.n, "d": r.d, "g": r.g,
            "delta": rat(&r.delta),
            "slack": rat(&r.slack),
            "hypothesis_holds": r.hypothesis_holds,
            "e_range": [r.e_min, r.e_max],
            "e0": r.e0,
            "fails_at_e_max": r.fails_at_e_max,
            "sweeps": r.sweeps.iter().map(|s| json!({"checked": s.checked, "failing_e": s.failing_e})).collect::<Vec<_>>(),
            "side_condition_failures": r.side_condition_failures,
            "reductions": r.reductions.iter().map(|x| json!({"checked": x.checked, "failures": x.failures})).collect::<Vec<_>>(),
            "tuples_by_case": r.tuples_by_case,
            "witnesses": r.witnesses.iter().map(|w| json!({"checked": w.checked, "integral": w.integral, "failures": w.failures})).collect::<Vec<_>>(),
            "constants": r.constants.iter().map(rat).collect::<Vec<_>>(),
            "consistent": r.consistent(),
        }),
        table: None,
        failure,
    })
}

fn convergence(p: &ConvergenceParams, b: &Budgets) -> Res {
    if p.e_min == 0 || p.e_min > p.e_max {
        return Err(Failure::Schema("need 1 <= e_min <= e_max".into()));
    }
    let fq = field(p.q)?;
    check_memory(b, size(p.q, p.k as usize * p.e_max as usize + 1), "convergence sweep")?;
    let mut rows = Vec::new();
    let mut per_e = Vec::new();
    let mut ratios = Vec::new();
    let mut failure = None;
    for e in p.e_min..=p.e_max {
        let e = e as usize;
        let counts = count_all(&fq, p.k, p.s, e)?;
        let sweep = main_term_sweep(&fq, p.k, p.s, e, p.degree_cap)?;
        let (mut r, mut worst) = (0.0f64, 0usize);
        for (i, (n, mt)) in counts.values().iter().zip(&sweep.values).enumerate() {
            let dev = (*n as f64 / mt - 1.0).abs();
            if dev > r {
                r = dev;
                worst = i;
            }
        }
        if !sweep.tail.is_valid() && failure.is_none() {
            failure = Some((
                "tail interval is unbounded".to_string(),
                json!({"q": p.q, "k": p.k, "s": p.s, "e": e, "degree_cap": p.degree_cap}),
            ));
        }
        let worst_f = coeffs(&Poly::from_index(&fq, worst as u64, p.k as usize * e + 1));
        rows.push(vec![
            e.to_string(),
            r.to_string(),
            sweep.tail.lo.to_f64().unwrap_or(f64::NAN).to_string(),
            sweep.tail.hi.as_ref().and_then(|h| h.to_f64()).map(|h| h.to_string()).unwrap_or_default(),
        ]);
        per_e.push(json!({
            "e": e,
            "max_relative_deviation": r,
            "worst_f": worst_f,
            "tail": {"lo": rat(&sweep.tail.lo), "hi": opt_rat(&sweep.tail.hi)},
            "tail_width_f64": sweep.tail.width().and_then(|w| w.to_f64()),
        }));
        ratios.push(r);
    }
    if ratios.len() > 1 && ratios[ratios.len() - 1] >= ratios[0] && failure.is_none() {
        failure = Some((
            "deviation did not decrease from e_min to e_max".to_string(),
            json!({"q": p.q, "k": p.k, "s": p.s, "e_min": p.e_min, "e_max": p.e_max, "ratios": ratios}),
        ));
    }
    Ok(Outcome {
        result: json!({
            "instance": {"q": p.q, "k": p.k, "s": p.s, "degree_cap": p.degree_cap},
            "per_e": per_e,
        }),
        table: Some(Table {
            header: ["e", "max_relative_deviation", "tail_lo", "tail_hi"].map(String::from).to_vec(),
            rows,
        }),
        failure,
    })
}
