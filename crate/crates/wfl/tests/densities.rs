use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use wfl::counting::{count_all, morphism_count_direct, FermatInstance, WaringInstance};
use wfl::densities::local::at_infinity;
use wfl::densities::*;
use wfl::ff::{Field, Place, Poly};

fn field(p: u32, f: u32) -> Arc<Field> {
    Arc::new(Field::standard(p, f).unwrap())
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn places_q5() -> Vec<Place> {
    vec![
        Place::Finite(Poly::from_ints(&[0, 1])),
        Place::Finite(Poly::from_ints(&[3, 1])),
        Place::Finite(Poly::from_ints(&[2, 0, 1])),
        Place::Infinity,
    ]
}

/// f = π^w · unit, with the unit varying by seed.
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

#[test]
fn conic_density_by_enumeration() {
    // b1^2 + b2^2 = 1 over F_5 has 4 solutions
    let oracle = (0..5).flat_map(|x| (0..5).map(move |y| (x, y))).filter(|(x, y)| (x * x + y * y) % 5 == 1).count();
    assert_eq!(oracle, 4);
    let fq = field(5, 1);
    let v = Place::Finite(Poly::from_ints(&[0, 1]));
    let d = ell_v_enumerated(&fq, &v, &Poly::one(), 2, 2, 4).unwrap();
    assert_eq!(d.value, rat(4, 5));
    assert_eq!(d.stabilized_at, Some(1));
    assert_eq!(ell_v(&fq, &v, &Poly::one(), 2, 2).unwrap().value, rat(4, 5));
}

#[test]
fn recursion_equals_enumeration() {
    let fq = field(5, 1);
    for s in [2u32, 5] {
        for place in places_q5() {
            for w in 0..=2u32 {
                for unit in [[1u32, 2], [3, 1], [2, 4]] {
                    let f = with_valuation(&fq, &place, w, &unit);
                    let rec = ell_v(&fq, &place, &f, s, 2).unwrap();
                    let r = rec.stabilized_at.unwrap();
                    assert!(r <= w as usize + 1);
                    let cap = if place.degree() == 2 { 3 } else { 5 };
                    let en = ell_v_enumerated(&fq, &place, &f, s, 2, cap).unwrap();
                    assert_eq!(en.value, rec.value, "s={s} v={place:?} w={w}");
                    assert_eq!(ell_v_truncated(&fq, &place, &f, s, 2, r).unwrap(), rec.value);
                }
            }
        }
    }
}

#[test]
fn valuation_two_at_r_four() {
    let fq = field(5, 1);
    let v = Place::Finite(Poly::from_ints(&[1, 1]));
    let f = with_valuation(&fq, &v, 2, &[2]);
    let rec = ell_v(&fq, &v, &f, 2, 2).unwrap();
    assert_eq!(ell_v_truncated(&fq, &v, &f, 2, 2, 4).unwrap(), rec.value);
}

#[test]
fn zero_density_closed_form() {
    // enumeration values approach the geometric closed form from above
    let fq = field(5, 1);
    let v = Place::Finite(Poly::from_ints(&[0, 1]));
    let limit = ell_v(&fq, &v, &Poly::zero(), 5, 2).unwrap();
    assert_eq!(limit.stabilized_at, None);
    let en = ell_v_enumerated(&fq, &v, &Poly::zero(), 5, 2, 6).unwrap();
    let gap = (en.value - &limit.value).to_f64().unwrap().abs();
    assert!(gap < 1e-3, "gap {gap}");
    assert!(ell_v(&fq, &v, &Poly::zero(), 2, 2).is_err());
}

#[test]
fn infinity_examples() {
    let f3 = field(3, 1);
    let t2 = Poly::from_ints(&[0, 0, 1]);
    assert_eq!(at_infinity(&t2, 2), Poly::one());
    let li = ell_infty(&f3, &t2, 1, 2, 3).unwrap();
    assert_eq!(li.stabilized_at, Some(1));
    // density of b1^2 + b2^2 + b3^2 = 1 over F_3, by enumeration
    let mut n = 0;
    for c in 0..27u32 {
        let (a, b, d) = (c % 3, c / 3 % 3, c / 9);
        if (a * a + b * b + d * d) % 3 == 1 {
            n += 1;
        }
    }
    assert_eq!(li.value, rat(n, 9));
    let v = Place::Finite(Poly::from_ints(&[0, 1]));
    assert_eq!(
        ell_infty(&f3, &Poly::zero(), 1, 2, 5).unwrap().value,
        ell_v(&f3, &v, &Poly::zero(), 5, 2).unwrap().value
    );
}

#[test]
fn local_expansion_identity() {
    let fq = field(5, 1);
    for s in [2u32, 5] {
        for place in places_q5() {
            let rmax = if place.degree() == 2 { 2 } else { 3 };
            for w in 0..=2u32 {
                let f = with_valuation(&fq, &place, w, &[2, 1]);
                for r in 0..=rmax {
                    let (lhs, rhs) = local_expansion_sides(&fq, &place, &f, s, 2, r).unwrap();
                    assert_eq!(lhs.as_rational(), Some(rhs), "s={s} v={place:?} w={w} r={r}");
                }
            }
        }
    }
}

#[test]
fn positivity_under_lower_bound_hypotheses() {
    // s >= 5, s > k+1, q > (k-1)^4, p ∤ k
    for (q, k, s) in [(5u32, 2u32, 5u32), (5, 2, 6), (17, 3, 5), (3, 2, 5)] {
        let fq = field(q, 1);
        let places = [Place::Finite(Poly::from_ints(&[0, 1])), Place::Finite(Poly::from_ints(&[1, 1])), Place::Infinity];
        for place in &places {
            for f in [Poly::zero(), Poly::one(), Poly::from_ints(&[0, 1]), Poly::from_ints(&[0, 0, 1]), Poly::from_ints(&[2, 0, 0, 1])] {
                let l = ell_v(&fq, place, &f, s, k).unwrap();
                assert!(l.value > BigRational::zero(), "q={q} k={k} s={s} {place:?} {f:?}");
            }
        }
    }
}

#[test]
fn series_interval_refines() {
    let fq = field(5, 1);
    let f = Poly::one();
    let wide = singular_series(&fq, &f, 1, 2, 6, 4).unwrap();
    let narrow = singular_series(&fq, &f, 1, 2, 6, 6).unwrap();
    // the D = 6 partial product lies inside the D = 4 interval, and vice versa
    assert!(wide.lo() <= narrow.partial && narrow.partial <= wide.hi().unwrap());
    assert!(narrow.lo() <= wide.hi().unwrap() && wide.lo() <= narrow.hi().unwrap());
    assert!(narrow.tail.width().unwrap() < wide.tail.width().unwrap());
    let t = waring_tail(5, 5, 2, 6, 8).unwrap();
    assert!(t.to_f64().unwrap() * 2.1 < 1e-6);
    let bad = singular_series(&fq, &f, 1, 2, 4, 3).unwrap();
    assert!(!bad.tail.is_valid());
}

#[test]
fn main_term_scaling_and_accuracy() {
    let fq = field(5, 1);
    let f = Poly::one();
    let m2 = main_term_waring(&WaringInstance::new(fq.clone(), 2, 6, 2, f.clone()).unwrap(), 4).unwrap();
    let m3 = main_term_waring(&WaringInstance::new(fq.clone(), 2, 6, 3, f.clone()).unwrap(), 4).unwrap();
    // finite factors do not depend on e; ℓ_∞ sees f = 1 as u^{ke}
    let inf = |m: &wfl::densities::MainTerm| m.series.locals.last().unwrap().value.clone();
    assert_eq!(&m3.partial / inf(&m3), &m2.partial / inf(&m2) * rat(625, 1));
    assert!(m3.lo > BigRational::zero());
    let n = count_all(&fq, 2, 6, 3).unwrap().values()[1] as f64;
    let mt = m3.partial.to_f64().unwrap();
    assert!((n / mt - 1.0).abs() < 0.15, "N = {n}, main term {mt}");
}

#[test]
fn sweep_matches_exact_main_term() {
    let fq = field(5, 1);
    let (k, s, e, d) = (2u32, 6u32, 1usize, 3usize);
    let sweep = main_term_sweep(&fq, k, s, e, d).unwrap();
    assert_eq!(sweep.values.len(), 125);
    for i in [0usize, 1, 5, 7, 25, 31, 60, 124] {
        let f = Poly::from_index(&fq, i as u64, 3);
        let exact = main_term_waring(&WaringInstance::new(fq.clone(), k, s, e, f).unwrap(), d).unwrap();
        let x = exact.partial.to_f64().unwrap();
        assert!((sweep.values[i] / x - 1.0).abs() < 1e-12, "f index {i}");
    }
}

#[test]
fn manin_local_identity_exact() {
    for (n, d, q) in [(2u32, 2u32, 3u32), (3, 2, 3), (3, 3, 5)] {
        for deg in 1..=2 {
            let (lhs, rhs) = manin_local_identity(&field(q, 1), n, d, deg).unwrap();
            assert_eq!(lhs, rhs, "(n,d,q)=({n},{d},{q}) deg v={deg}");
        }
    }
}

#[test]
fn quadric_point_counts() {
    // split quadric surface: (q+1)^2 points
    for q in [3u32, 5, 7] {
        assert_eq!(fermat_point_count(&field(q, 1), 3, 2, 1).unwrap(), ((q + 1) * (q + 1)) as u128);
    }
    assert_eq!(fermat_point_count(&field(3, 1), 3, 2, 2).unwrap(), 100);
}

#[test]
fn manin_main_terms() {
    // a conic only receives even coordinate degrees
    let odd = FermatInstance::new(field(3, 1), 2, 2, 1).unwrap();
    assert_eq!(morphism_count_direct(&odd).unwrap(), 0);
    let conic = FermatInstance::new(field(3, 1), 2, 2, 2).unwrap();
    let mt = main_term_manin(&conic, DEFAULT_DEGREE_CAP).unwrap();
    assert!(mt.converges);
    let direct = morphism_count_direct(&conic).unwrap() as f64;
    let x = mt.partial.to_f64().unwrap();
    assert!((direct / x - 1.0).abs() < 0.3, "direct {direct} main term {x}");
    assert!(mt.lo <= mt.partial && mt.partial <= *mt.hi.as_ref().unwrap());
    let e0 = main_term_manin(&FermatInstance::new(field(3, 1), 2, 2, 0).unwrap(), 2).unwrap();
    let prod = e0.factors.iter().fold(BigRational::one(), |a, (_, l)| a * l);
    assert_eq!(e0.partial, prod * rat(9, 2));
    let surface = main_term_manin(&FermatInstance::new(field(3, 1), 3, 2, 1).unwrap(), 3).unwrap();
    assert!(!surface.converges && surface.hi.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn routes_agree_on_random_targets(c in prop::collection::vec(0u32..5, 1..5), s in 2u32..6) {
        let fq = field(5, 1);
        let f = Poly::from_ints(&c);
        let v = Place::Finite(Poly::from_ints(&[4, 1]));
        let rec = ell_v(&fq, &v, &f, s, 2);
        prop_assume!(rec.is_ok());
        let rec = rec.unwrap();
        prop_assume!(rec.stabilized_at.is_some_and(|r| r <= 4));
        prop_assert_eq!(ell_v_truncated(&fq, &v, &f, s, 2, 4).unwrap(), rec.value);
    }
}
