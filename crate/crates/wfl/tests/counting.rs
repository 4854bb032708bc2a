use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wfl::counting::{
    count_all, count_bruteforce, morphism_count_direct, morphism_count_moebius, FermatInstance, WaringInstance,
};
use wfl::ff::{Field, Fq, Poly};

fn field(p: u32, f: u32) -> Arc<Field> {
    Arc::new(Field::standard(p, f).unwrap())
}

fn brute(fq: &Arc<Field>, k: u32, s: u32, e: usize, f: Poly) -> u128 {
    count_bruteforce(&WaringInstance::new(fq.clone(), k, s, e, f).unwrap()).unwrap()
}

#[test]
fn trivial_and_small_counts() {
    let f3 = field(3, 1);
    assert_eq!(brute(&f3, 2, 1, 0, Poly::zero()), 1);
    // pairs (x, y) in F_3 with x^2 + y^2 = 2
    let oracle = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).filter(|(x, y)| (x * x + y * y) % 3 == 2).count();
    assert_eq!(oracle, 4);
    assert_eq!(brute(&f3, 2, 2, 0, Poly::constant(Fq(2))), 4);
}

#[test]
fn three_squares_of_linear_polys_summing_to_t_squared() {
    // (a0 + a1 T)^2 = a0^2 + 2 a0 a1 T + a1^2 T^2 over F_3, summed over three terms.
    let mut oracle = 0;
    for code in 0..729u32 {
        let d: Vec<u32> = (0..6).map(|i| code / 3u32.pow(i) % 3).collect();
        let mut c = [0u32; 3];
        for j in 0..3 {
            let (a0, a1) = (d[2 * j], d[2 * j + 1]);
            c[0] += a0 * a0;
            c[1] += 2 * a0 * a1;
            c[2] += a1 * a1;
        }
        if c[0] % 3 == 0 && c[1] % 3 == 0 && c[2] % 3 == 1 {
            oracle += 1;
        }
    }
    let f3 = field(3, 1);
    let t2 = Poly::from_ints(&[0, 0, 1]);
    assert_eq!(brute(&f3, 2, 3, 1, t2.clone()), oracle);
    let table = count_all(&f3, 2, 3, 1).unwrap();
    assert_eq!(*table.get(&t2.padded(3)), oracle);
}

#[test]
fn full_table_two_squares_constants() {
    let f3 = field(3, 1);
    let table = count_all(&f3, 2, 2, 0).unwrap();
    for c in 0..3u32 {
        let oracle = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).filter(|(x, y)| (x * x + y * y) % 3 == c).count();
        assert_eq!(table.values()[c as usize], oracle as u128);
    }
    assert_eq!(table.total(), 9);
}

#[test]
fn cubes_spot_check_against_brute_force() {
    let f5 = field(5, 1);
    let table = count_all(&f5, 3, 4, 1).unwrap();
    assert_eq!(table.total(), 5u128.pow(8));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10 {
        let idx = rng.gen_range(0..table.len());
        let f = Poly::from_coeffs(table.coords_of(idx));
        assert_eq!(table.values()[idx], brute(&f5, 3, 4, 1, f));
    }
}

#[test]
fn scaling_invariance() {
    let fq = field(3, 2);
    let table = count_all(&fq, 2, 3, 1).unwrap();
    for idx in 0..table.len() {
        let f = table.coords_of(idx);
        for c in fq.nonzero() {
            let ck = fq.mul(c, c);
            let g: Vec<Fq> = f.iter().map(|&x| fq.mul(ck, x)).collect();
            assert_eq!(table.values()[idx], *table.get(&g));
        }
    }
}

#[test]
fn extension_field_counts_match() {
    let f4 = field(2, 2);
    let table = count_all(&f4, 3, 2, 1).unwrap();
    for idx in (0..table.len()).step_by(7) {
        let f = Poly::from_coeffs(table.coords_of(idx));
        assert_eq!(table.values()[idx], brute(&f4, 3, 2, 1, f));
    }
}

/// Projective points of Σ x_i^d = 0 over F_p, counted by normalizing the first nonzero coordinate.
fn fermat_points_prime(p: u32, n: u32, d: u32) -> u64 {
    let mut count = 0;
    for code in 0..p.pow(n + 1) {
        let x: Vec<u64> = (0..=n).map(|i| (code / p.pow(i) % p) as u64).collect();
        let Some(first) = x.iter().position(|&v| v != 0) else { continue };
        if x[first] != 1 {
            continue;
        }
        let s: u64 = x.iter().map(|&v| v.pow(d)).sum();
        if s % p as u64 == 0 {
            count += 1;
        }
    }
    count
}

#[test]
fn constant_maps_are_rational_points() {
    assert_eq!(fermat_points_prime(3, 2, 2), 4);
    for (n, d, p) in [(2, 2, 3), (1, 2, 3), (3, 2, 3), (2, 3, 5), (2, 2, 5)] {
        let inst = FermatInstance::new(field(p, 1), n, d, 0).unwrap();
        let want = fermat_points_prime(p, n, d) as u128;
        assert_eq!(morphism_count_moebius(&inst).unwrap(), want, "(n,d,q)=({n},{d},{p})");
        assert_eq!(morphism_count_direct(&inst).unwrap(), want);
    }
    // x^2 + y^2 = 0 has no point over F_3
    let empty = FermatInstance::new(field(3, 1), 1, 2, 0).unwrap();
    assert_eq!(morphism_count_direct(&empty).unwrap(), 0);
}

#[test]
fn moebius_matches_direct() {
    for (n, d, p, e) in [(2, 2, 3, 1), (2, 2, 3, 2), (2, 2, 5, 1), (3, 2, 3, 1), (1, 2, 5, 2), (2, 3, 7, 1)] {
        let inst = FermatInstance::new(field(p, 1), n, d, e).unwrap();
        assert_eq!(
            morphism_count_moebius(&inst).unwrap(),
            morphism_count_direct(&inst).unwrap(),
            "(n,d,q,e)=({n},{d},{p},{e})"
        );
    }
    let f4 = FermatInstance::new(field(2, 2), 2, 3, 1).unwrap();
    assert_eq!(morphism_count_moebius(&f4).unwrap(), morphism_count_direct(&f4).unwrap());
}

#[test]
fn bad_instances_rejected() {
    assert!(FermatInstance::new(field(3, 1), 2, 3, 0).is_err());
    assert!(WaringInstance::new(field(3, 1), 2, 2, 1, Poly::from_ints(&[0, 0, 0, 1])).is_err());
    let w = WaringInstance::new(field(3, 1), 3, 2, 1, Poly::zero()).unwrap();
    assert!(w.char_divides_k());
    let big = WaringInstance::new(field(5, 1), 2, 6, 3, Poly::zero()).unwrap();
    assert!(count_bruteforce(&big).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn convolution_route_equals_brute_force(k in 2u32..4, s in 1u32..4, e in 0usize..2, seed in 0u64..1000) {
        let fq = field(3, 1);
        let table = count_all(&fq, k, s, e).unwrap();
        prop_assert_eq!(table.total(), 3u128.pow(s * (e as u32 + 1)));
        let idx = (seed as usize) % table.len();
        let f = Poly::from_coeffs(table.coords_of(idx));
        prop_assert_eq!(table.values()[idx], brute(&fq, k, s, e, f));
    }
}
