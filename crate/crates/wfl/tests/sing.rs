use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wfl::arcs::forms::{divisors_of_degree, factors_through, min_degree, restrict, LinearForm};
use wfl::arcs::residue::tilde_alpha;
use wfl::ff::{extend_field, Field, Fq, Poly};
use wfl::sing::locus::{embed_alpha, hankel};
use wfl::sing::*;

fn field(p: u32, f: u32) -> Arc<Field> {
    Arc::new(Field::standard(p, f).unwrap())
}

fn random_form(rng: &mut ChaCha8Rng, q: u32, len: usize) -> LinearForm {
    LinearForm::new((0..len).map(|_| Fq(rng.gen_range(0..q))).collect())
}

/// Rank over Z/p by plain elimination on integers.
fn rank_mod_p(mut a: Vec<Vec<i64>>, p: i64) -> usize {
    let inv = |x: i64| (1..p).find(|y| x * y % p == 1).unwrap();
    let (rows, cols) = (a.len(), a[0].len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| a[i][c] % p != 0) else { continue };
        a.swap(r, piv);
        let iv = inv(a[r][c].rem_euclid(p));
        for i in 0..rows {
            if i != r {
                let t = a[i][c] * iv % p;
                for j in 0..cols {
                    a[i][j] = (a[i][j] - t * a[r][j]).rem_euclid(p);
                }
            }
        }
        r += 1;
    }
    r
}

/// #Sing over a prime field by direct integer arithmetic.
fn sing_count_mod_p(alpha: &[i64], e: usize, k: u32, p: i64) -> u128 {
    let total = (p as u64).pow(e as u32 + 1);
    let mut count = 0;
    for idx in 0..total {
        let mut a = vec![0i64; e + 1];
        let mut x = idx;
        for c in a.iter_mut() {
            *c = (x % p as u64) as i64;
            x /= p as u64;
        }
        let mut pw = vec![1i64];
        for _ in 0..k - 1 {
            let mut next = vec![0i64; pw.len() + e];
            for (i, &u) in pw.iter().enumerate() {
                for (j, &v) in a.iter().enumerate() {
                    next[i + j] = (next[i + j] + u * v) % p;
                }
            }
            pw = next;
        }
        let ok = (0..=e).all(|i| pw.iter().enumerate().map(|(j, &c)| alpha[i + j] * c).sum::<i64>() % p == 0);
        count += ok as u128;
    }
    count
}

#[test]
fn zero_form_gives_whole_space() {
    let fq = field(3, 1);
    for e in 1..=2 {
        let inst = SingInstance::new(fq.clone(), LinearForm::zero(2 * e + 1), e, 2).unwrap();
        for m in 1..=2 {
            assert_eq!(sing_points(&inst, m).unwrap(), 3u128.pow(m * (e as u32 + 1)));
        }
        let est = sing_dim_estimate(&inst, 3).unwrap();
        assert_eq!((est.dim, est.confidence), (e + 1, Confidence::Exact));
    }
}

#[test]
fn quadratic_counts_follow_hankel_rank() {
    let fq = field(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for e in 1..=2 {
        for _ in 0..15 {
            let alpha = random_form(&mut rng, 3, 2 * e + 1);
            let h: Vec<Vec<i64>> = hankel(&alpha, e)
                .into_iter()
                .map(|r| r.into_iter().map(|x| x.0 as i64).collect())
                .collect();
            let rk = rank_mod_p(h, 3);
            let inst = SingInstance::new(fq.clone(), alpha, e, 2).unwrap();
            for m in 1..=2u32 {
                assert_eq!(sing_points(&inst, m).unwrap(), 3u128.pow(m * (e + 1 - rk) as u32));
            }
        }
    }
    // full rank leaves only a = 0
    let alpha = LinearForm::new(vec![Fq(1), Fq(0), Fq(1)]);
    let est = sing_dim_estimate(&SingInstance::new(fq, alpha, 1, 2).unwrap(), 3).unwrap();
    assert_eq!(est.dim, 0);
}

#[test]
fn cubic_counts_match_enumeration() {
    let fq = field(5, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let alpha = random_form(&mut rng, 5, 4);
        let ints: Vec<i64> = alpha.coords.iter().map(|x| x.0 as i64).collect();
        let inst = SingInstance::new(fq.clone(), alpha, 1, 3).unwrap();
        assert_eq!(sing_points(&inst, 1).unwrap(), sing_count_mod_p(&ints, 1, 3, 5));
        for m in 1..=3u32 {
            let c = sing_points(&inst, m).unwrap();
            assert_eq!((c - 1) % (5u128.pow(m) - 1), 0, "cone property");
        }
        let est = sing_dim_estimate(&inst, 3).unwrap();
        assert_eq!(est.confidence, Confidence::Stable, "{:?}", est);
    }
}

#[test]
fn conditions_are_linear_in_b() {
    let fq = field(5, 1);
    let ext = extend_field(&fq, 2).unwrap();
    let big = &*ext.big;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (e, k) = (2usize, 3u32);
    for _ in 0..20 {
        let alpha = random_form(&mut rng, 5, k as usize * e + 1);
        let al = embed_alpha(&ext, &alpha);
        let a = Poly::from_index(big, rng.gen_range(0..25u64.pow(3)), e + 1);
        let b = Poly::from_index(big, rng.gen_range(0..25u64.pow(3)), e + 1);
        let conds = wfl::sing::locus::sing_conditions(big, &al, &a, e, k);
        let prod = a.pow(big, k as u64 - 1).mul(big, &b);
        let direct = prod
            .coeffs()
            .iter()
            .enumerate()
            .fold(Fq::ZERO, |acc, (j, &c)| big.add(acc, big.mul(al[j], c)));
        let via_basis = (0..=e).fold(Fq::ZERO, |acc, i| big.add(acc, big.mul(b.coeff(i), conds[i])));
        assert_eq!(direct, via_basis);
    }
}

/// Checks the (a, c) criterion against direct membership for every a over F_{q^m}.
fn exists_c_agrees(fq: &Arc<Field>, alpha: &LinearForm, z: &wfl::arcs::forms::DivisorP1, e: usize, k: u32, m: u32) {
    let rf = tilde_alpha(fq, &restrict(fq, alpha, z).expect("α factors through Z"));
    let ext = extend_field(fq, m).unwrap();
    let big = &*ext.big;
    let al = embed_alpha(&ext, alpha);
    let total = (big.q() as u64).pow(e as u32 + 1);
    for idx in 0..total {
        let a = Poly::from_index(big, idx, e + 1);
        assert_eq!(
            exists_c_check(&ext, &a, &rf, e, k),
            in_sing(big, &al, &a, e, k),
            "α={:?} Z={:?} a={:?} m={m}",
            alpha.coords,
            z,
            a
        );
    }
}

#[test]
fn exists_c_matches_definition() {
    let fq = field(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for e in 1..=2usize {
        let n = 2 * e;
        for _ in 0..20 {
            let alpha = random_form(&mut rng, 3, n + 1);
            let (_, zs) = min_degree(&fq, &alpha).unwrap();
            // a larger divisor through which α also factors
            let big_z = loop {
                let d = rng.gen_range(zs[0].degree()..=n + 2);
                let list: Vec<_> = divisors_of_degree(&fq, d)
                    .into_iter()
                    .filter(|z| factors_through(&fq, &alpha, z))
                    .collect();
                if !list.is_empty() {
                    break list[rng.gen_range(0..list.len())].clone();
                }
            };
            for z in [&zs[0], &big_z] {
                for m in 1..=2 {
                    exists_c_agrees(&fq, &alpha, z, e, 2, m);
                }
            }
        }
    }
}

#[test]
fn exists_c_degree_three_example() {
    // every α on sections of O(2) factors through any Z of degree 3
    let fq = field(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let zs = divisors_of_degree(&fq, 3);
    for _ in 0..20 {
        let alpha = random_form(&mut rng, 3, 3);
        let z = &zs[rng.gen_range(0..zs.len())];
        exists_c_agrees(&fq, &alpha, z, 1, 2, 1);
        exists_c_agrees(&fq, &alpha, z, 1, 2, 2);
    }
}

#[test]
fn exists_c_cubic() {
    let fq = field(5, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..10 {
        let alpha = random_form(&mut rng, 5, 4);
        let (_, zs) = min_degree(&fq, &alpha).unwrap();
        exists_c_agrees(&fq, &alpha, &zs[0], 1, 3, 1);
        exists_c_agrees(&fq, &alpha, &zs[0], 1, 3, 2);
    }
}

#[test]
fn katz_bound_small_cases() {
    for (q, k, e) in [(3u32, 2u32, 1usize), (3, 2, 2), (5, 3, 1)] {
        let report = katz_bound_check(&field(q, 1), e, k, 3).unwrap();
        assert_eq!(report.rows.len() as u64, (q as u64).pow(k * e as u32 + 1));
        assert!(report.passed(), "violations at {:?}", report.violations);
        assert!(report.max_ratio <= 1.0);
        // α = 0 has |S_1| = q^{e+1} and full dimension
        let zero = &report.rows[0];
        assert_eq!(zero.dim, e + 1);
        assert!((zero.s1_abs - (q as f64).powi(e as i32 + 1)).abs() < 1e-9);
    }
}

#[test]
fn overall_dimension_bound() {
    let zero = BigRational::from_integer(BigInt::from(0));
    for e in 1..=3usize {
        let fq = field(3, 1);
        let n = 2 * e;
        let alpha = LinearForm::zero(n + 1);
        let r = overall_dim_bound_check(&fq, &alpha, e, 2, &zero, 3).unwrap();
        assert_eq!(r.closed_branch, e as i64 + 1);
        assert!(r.holds && r.dim.dim == e + 1);
        for idx in 0..3u64.pow(n as u32 + 1) {
            let alpha = LinearForm::from_index(&fq, idx, n + 1);
            let r = overall_dim_bound_check(&fq, &alpha, e, 2, &zero, 3).unwrap();
            assert!(r.holds, "e={e} α={:?} dim={} bound={}", alpha.coords, r.dim.dim, r.bound);
        }
    }
    let gamma = wfl::polygon::gamma(3, 5).unwrap().gamma;
    let fq = field(5, 1);
    for idx in 0..5u64.pow(4) {
        let alpha = LinearForm::from_index(&fq, idx, 4);
        let r = overall_dim_bound_check(&fq, &alpha, 1, 3, &gamma, 3).unwrap();
        if r.dim.is_reliable() {
            assert!(r.holds, "α={:?} dim={} bound={}", alpha.coords, r.dim.dim, r.bound);
        }
    }
}

#[test]
fn general_form_counts() {
    let fq = field(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let diag = HomogeneousForm::diagonal(2, 2);
    let zero = LinearForm::zero(3);
    assert_eq!(sing_general_f(&fq, &diag, &zero, 1, 1).unwrap(), 81);
    for _ in 0..10 {
        let alpha = random_form(&mut rng, 3, 3);
        let one = SingInstance::new(fq.clone(), alpha.clone(), 1, 2).unwrap();
        for m in 1..=2 {
            let s = sing_points(&one, m).unwrap();
            assert_eq!(sing_general_f(&fq, &diag, &alpha, 1, m).unwrap(), s * s);
        }
    }
    // x0^2 + x0 x1 + 2 x1^2 over F_3 against integer enumeration
    let f = HomogeneousForm::new(
        2,
        vec![(Fq(1), vec![2, 0]), (Fq(1), vec![1, 1]), (Fq(2), vec![0, 2])],
    )
    .unwrap();
    assert!(is_smooth_up_to(&fq, &f, 2).unwrap());
    for _ in 0..10 {
        let alpha = random_form(&mut rng, 3, 3);
        let a: Vec<i64> = alpha.coords.iter().map(|x| x.0 as i64).collect();
        let mut oracle = 0u128;
        for idx in 0..81u32 {
            let d: Vec<i64> = (0..4).map(|i| ((idx / 3u32.pow(i)) % 3) as i64).collect();
            let (x0, x1) = ([d[0], d[1]], [d[2], d[3]]);
            // ∂0 = 2x0 + x1, ∂1 = x0 + 4x1 = x0 + x1, each of degree <= 1
            let g0 = [2 * x0[0] + x1[0], 2 * x0[1] + x1[1]];
            let g1 = [x0[0] + x1[0], x0[1] + x1[1]];
            let ok = [g0, g1].iter().all(|g| (0..2).all(|i| (a[i] * g[0] + a[i + 1] * g[1]) % 3 == 0));
            oracle += ok as u128;
        }
        assert_eq!(sing_general_f(&fq, &f, &alpha, 1, 1).unwrap(), oracle);
    }
    // x0^2 is singular along x0 = 0
    let singular = HomogeneousForm::new(2, vec![(Fq(1), vec![2, 0])]).unwrap();
    assert!(!is_smooth_up_to(&fq, &singular, 1).unwrap());
    // x0^2 + x0 x1 + x1^2 = (x0 - x1)^2 in characteristic 3
    let square = HomogeneousForm::new(
        2,
        vec![(Fq(1), vec![2, 0]), (Fq(1), vec![1, 1]), (Fq(1), vec![0, 2])],
    )
    .unwrap();
    assert!(!is_smooth_up_to(&fq, &square, 1).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn sing_is_a_cone(c in prop::collection::vec(0u32..5, 4), m in 1u32..3) {
        let fq = field(5, 1);
        let inst = SingInstance::new(fq, LinearForm::new(c.into_iter().map(Fq).collect()), 1, 3).unwrap();
        let n = sing_points(&inst, m).unwrap();
        prop_assert_eq!((n - 1) % (5u128.pow(m) - 1), 0);
    }

    #[test]
    fn exists_c_equivalence(c in prop::collection::vec(0u32..3, 5)) {
        let fq = field(3, 1);
        let alpha = LinearForm::new(c.into_iter().map(Fq).collect());
        let (_, zs) = min_degree(&fq, &alpha).unwrap();
        exists_c_agrees(&fq, &alpha, &zs[0], 2, 2, 1);
    }
}
