//! Fourier analysis on F_q^n ≅ (Z/p)^{fn} with exact modular arithmetic.
//!
//! Functions are dense arrays indexed mixed-radix, coordinate 0 least
//! significant; since each coordinate is an `Fq` index this is the same as
//! base-p digits of length f·n. The pairing between the group and its dual is
//! ⟨α, x⟩ = Tr(Σ α_i x_i).

use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{budget, invalid, Error, Result};
use crate::ff::arith::{is_prime, pow_mod};
use crate::ff::{Cyclotomic, Field, Fq};

/// Hard cap on group size (number of entries).
pub const MAX_ENTRIES: u64 = 1 << 26;

/// A function F_q^n -> V stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFn<V> {
    field: Arc<Field>,
    n: usize,
    values: Vec<V>,
}

impl<V: Clone + Default> GroupFn<V> {
    pub fn zeros(field: Arc<Field>, n: usize) -> Result<Self> {
        let len = group_len(&field, n)?;
        Ok(GroupFn {
            field,
            n,
            values: vec![V::default(); len],
        })
    }
}

impl<V> GroupFn<V> {
    pub fn new(field: Arc<Field>, n: usize, values: Vec<V>) -> Result<Self> {
        let len = group_len(&field, n)?;
        if values.len() != len {
            return invalid(format!("expected {len} values, got {}", values.len()));
        }
        Ok(GroupFn { field, n, values })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn values(&self) -> &[V] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [V] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<V> {
        self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, x: &[Fq]) -> usize {
        index_of(&self.field, x)
    }

    pub fn coords_of(&self, idx: usize) -> Vec<Fq> {
        coords_of(&self.field, self.n, idx)
    }

    pub fn get(&self, x: &[Fq]) -> &V {
        &self.values[self.index_of(x)]
    }
}

impl GroupFn<u128> {
    pub fn total(&self) -> u128 {
        self.values.iter().sum()
    }
}

fn group_len(field: &Field, n: usize) -> Result<usize> {
    match (field.q() as u64).checked_pow(n as u32) {
        Some(l) if l <= MAX_ENTRIES => Ok(l as usize),
        _ => budget("group size", format!("{}^{n}", field.q()), MAX_ENTRIES),
    }
}

pub fn index_of(field: &Field, x: &[Fq]) -> usize {
    let q = field.q() as usize;
    x.iter().rev().fold(0, |acc, a| acc * q + a.0 as usize)
}

pub fn coords_of(field: &Field, n: usize, mut idx: usize) -> Vec<Fq> {
    let q = field.q() as usize;
    (0..n)
        .map(|_| {
            let a = Fq((idx % q) as u32);
            idx /= q;
            a
        })
        .collect()
}

/// Montgomery arithmetic modulo an odd prime below 2^53, R = 2^64. The bound
/// lets 1024 unreduced products accumulate in a u128 before one reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Mont {
    m: u64,
    minv: u64, // -m^{-1} mod 2^64
    r2: u64,   // 2^128 mod m
}

impl Mont {
    fn new(m: u64) -> Mont {
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r2 = ((1u128 << 64) % m as u128 * ((1u128 << 64) % m as u128) % m as u128) as u64;
        Mont {
            m,
            minv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let lo = t as u64;
        let k = lo.wrapping_mul(self.minv);
        let s = (t + k as u128 * self.m as u128) >> 64;
        let s = s as u64;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.m, self.r2)
    }

    fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    #[inline(always)]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
}

/// A prime P ≡ 1 (mod p) with an element of order exactly p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransformPrime {
    pub modulus: u64,
    pub p: u32,
    pub omega: u64,
}

impl TransformPrime {
    pub fn new(modulus: u64, p: u32) -> Result<TransformPrime> {
        if modulus >= 1 << 53 || !is_prime(modulus) || modulus == 2 {
            return invalid(format!("{modulus} is not an odd prime below 2^53"));
        }
        if (modulus - 1) % p as u64 != 0 {
            return invalid(format!("{modulus} is not 1 mod {p}"));
        }
        let e = (modulus - 1) / p as u64;
        let omega = (2..)
            .map(|g| pow_mod(g, e, modulus))
            .find(|&w| w != 1)
            .expect("a non-p-th power exists");
        Ok(TransformPrime { modulus, p, omega })
    }

    pub fn bits(&self) -> f64 {
        (self.modulus as f64).log2()
    }
}

/// The first `count` primes ≡ 1 (mod p) above 2^50, in increasing order.
pub fn transform_primes(p: u32, count: usize) -> Vec<TransformPrime> {
    let p64 = p as u64;
    let start = (1u64 << 50) / p64 * p64 + 1;
    let mut out = Vec::with_capacity(count);
    let mut cand = if start > 1 << 50 { start } else { start + p64 };
    while out.len() < count {
        if cand % 2 == 1 && is_prime(cand) {
            out.push(TransformPrime::new(cand, p).expect("candidate was checked"));
        }
        cand += p64;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

// One Stockham pass: transforms digit 0 and rotates it to the top position.
fn dft_pass(mont: &Mont, p: usize, wtab: &[u64], src: &[u64], dst: &mut [u64]) {
    let m = src.len() / p;
    const CHUNK: usize = 1 << 12;
    dst.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, out)| {
        let base = ci * CHUNK;
        for (o, slot) in out.iter_mut().enumerate() {
            let idx = base + o;
            let b = idx / m;
            let l = idx % m;
            let line = &src[l * p..(l + 1) * p];
            let mut acc: u64 = 0;
            let mut sum: u128 = 0;
            let mut e = 0usize;
            for (a, &x) in line.iter().enumerate() {
                sum += x as u128 * wtab[e] as u128;
                e += b;
                if e >= p {
                    e -= p;
                }
                if a % 1024 == 1023 {
                    acc = mont.add(acc, mont.redc(sum));
                    sum = 0;
                }
            }
            *slot = mont.add(acc, mont.redc(sum));
        }
    });
}

/// Standard transform on (Z/p)^m in Montgomery form: out[β] = Σ_x f(x) ω^{±β·x}.
fn transform_std(mont: &Mont, tp: &TransformPrime, axes: usize, vals: Vec<u64>, dir: Direction) -> Vec<u64> {
    let p = tp.p as usize;
    let w = match dir {
        Direction::Forward => tp.omega,
        Direction::Inverse => pow_mod(tp.omega, tp.p as u64 - 1, tp.modulus),
    };
    let mut wtab = vec![mont.to_mont(1); p];
    let wm = mont.to_mont(w);
    for i in 1..p {
        wtab[i] = mont.mul(wtab[i - 1], wm);
    }
    let mut a = vals;
    let mut b = vec![0u64; a.len()];
    for _ in 0..axes {
        dft_pass(mont, p, &wtab, &a, &mut b);
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Index map α -> β with ⟨α, x⟩ = Σ β_digit · x_digit.
fn pairing_map(field: &Field, n: usize) -> Option<Vec<usize>> {
    if field.f() == 1 {
        return None;
    }
    let f = field.f() as usize;
    let tmap: Vec<usize> = field
        .elements()
        .map(|b| {
            let d: Vec<u32> = (0..f)
                .map(|j| field.trace(field.mul(b, Fq(field.p().pow(j as u32)))))
                .collect();
            field.from_digits(&d).0 as usize
        })
        .collect();
    let q = field.q() as usize;
    let len = q.pow(n as u32);
    Some(
        (0..len)
            .into_par_iter()
            .map(|mut idx| {
                let mut out = 0;
                let mut scale = 1;
                for _ in 0..n {
                    out += tmap[idx % q] * scale;
                    idx /= q;
                    scale *= q;
                }
                out
            })
            .collect(),
    )
}

fn axes(field: &Field, n: usize) -> usize {
    field.f() as usize * n
}

/// Transform of a residue-valued function (values reduced mod P).
///
/// Forward: out(α) = Σ_x fn(x) ω^{Tr(α·x)}. Inverse is the unnormalized
/// conjugate transform, so inverse∘forward multiplies by q^n.
pub fn transform(func: &GroupFn<u64>, tp: &TransformPrime, dir: Direction) -> Result<GroupFn<u64>> {
    let field = func.field.clone();
    if tp.p != field.p() {
        return invalid("transform prime built for another characteristic");
    }
    let mont = Mont::new(tp.modulus);
    let map = pairing_map(&field, func.n);
    let mut vals: Vec<u64> = func.values.par_iter().map(|&v| mont.to_mont(v)).collect();
    if dir == Direction::Inverse {
        if let Some(map) = &map {
            let mut std = vec![0u64; vals.len()];
            for (a, &b) in map.iter().enumerate() {
                std[b] = vals[a];
            }
            vals = std;
        }
    }
    let mut out = transform_std(&mont, tp, axes(&field, func.n), vals, dir);
    if dir == Direction::Forward {
        if let Some(map) = &map {
            out = map.par_iter().map(|&b| out[b]).collect();
        }
    }
    let values = out.par_iter().map(|&v| mont.from_mont(v)).collect();
    Ok(GroupFn {
        field,
        n: func.n,
        values,
    })
}

/// Bits needed for exact recovery of the s-fold convolution of `hist`.
pub fn required_bits(hist: &GroupFn<u128>, s: u32) -> f64 {
    let total = hist.total() as f64;
    s as f64 * total.log2() + (hist.len() as f64).log2() + 2.0
}

/// s-fold additive self-convolution of a histogram, recovered exactly by CRT.
pub fn convolve_power(hist: &GroupFn<u128>, s: u32, primes: &[TransformPrime]) -> Result<GroupFn<u128>> {
    let total = hist.total();
    let Some(expected) = total.checked_pow(s) else {
        return budget("count total", format!("{total}^{s}"), "2^128");
    };
    if s == 0 {
        let mut out = GroupFn::<u128>::zeros(hist.field.clone(), hist.n)?;
        out.values[0] = 1;
        return Ok(out);
    }
    if s == 1 {
        return Ok(hist.clone());
    }
    let need = required_bits(hist, s);
    let mut have = 0.0;
    let mut used = Vec::new();
    for tp in primes {
        if have > need {
            break;
        }
        if tp.p != hist.field.p() {
            return invalid("transform prime built for another characteristic");
        }
        have += tp.bits();
        used.push(*tp);
    }
    if have <= need || need >= 127.0 {
        return Err(Error::CrtInsufficient {
            required_bits: need.ceil() as u64,
            available_bits: have.floor() as u64,
        });
    }
    let axes = axes(&hist.field, hist.n);
    let len = hist.len() as u64;
    let residues: Vec<Vec<u64>> = used
        .iter()
        .map(|tp| {
            let mont = Mont::new(tp.modulus);
            let vals: Vec<u64> = hist
                .values
                .par_iter()
                .map(|&v| mont.to_mont((v % tp.modulus as u128) as u64))
                .collect();
            let mut fwd = transform_std(&mont, tp, axes, vals, Direction::Forward);
            fwd.par_iter_mut().for_each(|x| {
                let (mut r, mut b, mut e) = (mont.to_mont(1), *x, s);
                while e > 0 {
                    if e & 1 == 1 {
                        r = mont.mul(r, b);
                    }
                    b = mont.mul(b, b);
                    e >>= 1;
                }
                *x = r;
            });
            let inv = transform_std(&mont, tp, axes, fwd, Direction::Inverse);
            let scale = mont.to_mont(pow_mod(len % tp.modulus, tp.modulus - 2, tp.modulus));
            inv.par_iter().map(|&v| mont.from_mont(mont.mul(v, scale))).collect()
        })
        .collect();
    let values = crt_garner(&used, &residues)?;
    let sum: u128 = values.iter().sum();
    if sum != expected {
        return Err(Error::Consistency(format!(
            "convolution total {sum} differs from {expected}"
        )));
    }
    Ok(GroupFn {
        field: hist.field.clone(),
        n: hist.n,
        values,
    })
}

/// Picks enough default primes automatically.
pub fn convolve_power_auto(hist: &GroupFn<u128>, s: u32) -> Result<GroupFn<u128>> {
    let need = required_bits(hist, s);
    let count = (need / 50.0).floor() as usize + 1;
    convolve_power(hist, s, &transform_primes(hist.field.p(), count))
}

fn crt_garner(primes: &[TransformPrime], residues: &[Vec<u64>]) -> Result<Vec<u128>> {
    let k = primes.len();
    let ms: Vec<u64> = primes.iter().map(|t| t.modulus).collect();
    // inv[i][j] = m_j^{-1} mod m_i for j < i
    let inv: Vec<Vec<u64>> = (0..k)
        .map(|i| (0..i).map(|j| pow_mod(ms[j] % ms[i], ms[i] - 2, ms[i])).collect())
        .collect();
    let len = residues[0].len();
    (0..len)
        .into_par_iter()
        .map(|x| {
            let mut digits = vec![0u64; k];
            for i in 0..k {
                let mi = ms[i];
                let mut t = residues[i][x] % mi;
                for j in 0..i {
                    let diff = (t + mi - digits[j] % mi) % mi;
                    t = (diff as u128 * inv[i][j] as u128 % mi as u128) as u64;
                }
                digits[i] = t;
            }
            let mut val: u128 = 0;
            let mut radix: u128 = 1;
            for i in 0..k {
                let term = (digits[i] as u128).checked_mul(radix);
                val = term
                    .and_then(|t| val.checked_add(t))
                    .ok_or_else(|| Error::Consistency("CRT value exceeds 128 bits".into()))?;
                if i + 1 < k {
                    radix = radix.saturating_mul(ms[i] as u128);
                }
            }
            Ok(val)
        })
        .collect()
}

/// Σ_x hist(x) ψ(⟨α, x⟩), by direct summation.
pub fn dual_value(hist: &GroupFn<u128>, alpha: &[Fq]) -> Result<Cyclotomic> {
    let field = &hist.field;
    if alpha.len() != hist.n {
        return invalid(format!("dual vector has length {}, expected {}", alpha.len(), hist.n));
    }
    let p = field.p() as usize;
    let mut buckets = vec![0i128; p];
    for (idx, &h) in hist.values.iter().enumerate() {
        if h == 0 {
            continue;
        }
        let x = hist.coords_of(idx);
        let s = x
            .iter()
            .zip(alpha)
            .fold(Fq::ZERO, |acc, (&xi, &ai)| field.add(acc, field.mul(xi, ai)));
        buckets[field.trace(s) as usize] += h as i128;
    }
    Ok(Cyclotomic::from_exponent_counts(field.p(), buckets))
}

/// Bucket counts n_t(α) = Σ {hist(x) : ⟨α,x⟩ = t} for every α, via one
/// forward transform. Requires Σ hist below the transform prime.
pub fn dual_buckets_all(hist: &GroupFn<u128>) -> Result<Vec<Vec<u64>>> {
    let field = hist.field.clone();
    let tp = transform_primes(field.p(), 1)[0];
    let total = hist.total();
    if total >= tp.modulus as u128 {
        return budget("histogram mass", total, tp.modulus);
    }
    let residues = GroupFn {
        field: field.clone(),
        n: hist.n,
        values: hist.values.iter().map(|&v| v as u64).collect(),
    };
    let fwd = transform(&residues, &tp, Direction::Forward)?;
    let p = field.p() as usize;
    let pm = tp.modulus;
    let winv = pow_mod(tp.omega, p as u64 - 1, pm);
    let wpow: Vec<u64> = (0..p as u64).map(|i| pow_mod(winv, i, pm)).collect();
    let pinv = pow_mod(p as u64, pm - 2, pm);
    let n = hist.n;
    let fwd_vals = fwd.values;
    Ok((0..fwd_vals.len())
        .into_par_iter()
        .map(|a| {
            let alpha = coords_of(&field, n, a);
            let vals: Vec<u64> = (0..p as u32)
                .map(|j| {
                    let ja: Vec<Fq> = alpha.iter().map(|&x| field.mul(x, field.from_int(j as i64))).collect();
                    fwd_vals[index_of(&field, &ja)]
                })
                .collect();
            (0..p)
                .map(|t| {
                    let mut acc: u128 = 0;
                    for (j, &v) in vals.iter().enumerate() {
                        acc = (acc + v as u128 * wpow[(j * t) % p] as u128) % pm as u128;
                    }
                    (acc * pinv as u128 % pm as u128) as u64
                })
                .collect()
        })
        .collect())
}

/// Σ_x hist(x) ψ(⟨α, x⟩) for every α at once, indexed like `hist`.
pub fn dual_values_all(hist: &GroupFn<u128>) -> Result<Vec<Cyclotomic>> {
    let p = hist.field.p();
    Ok(dual_buckets_all(hist)?
        .into_iter()
        .map(|b| Cyclotomic::from_exponent_counts(p, b.into_iter().map(|x| x as i128).collect()))
        .collect())
}

/// Checks Σ_β F(β) F(-β) ≡ q^n Σ_x f(x)^2 (mod P).
pub fn parseval_holds(func: &GroupFn<u64>, tp: &TransformPrime) -> Result<bool> {
    let fwd = transform(func, tp, Direction::Forward)?;
    let field = &func.field;
    let m = tp.modulus as u128;
    let mut lhs: u128 = 0;
    for (idx, &v) in fwd.values.iter().enumerate() {
        let neg: Vec<Fq> = fwd.coords_of(idx).iter().map(|&a| field.neg(a)).collect();
        let w = fwd.values[fwd.index_of(&neg)];
        lhs = (lhs + v as u128 * w as u128) % m;
    }
    let mut rhs: u128 = 0;
    for &v in &func.values {
        rhs = (rhs + (v as u128 % m) * (v as u128 % m)) % m;
    }
    rhs = rhs * (func.len() as u128 % m) % m;
    Ok(lhs == rhs)
}

const MAGIC: &[u8; 4] = b"WFLG";

/// Domain tag stored in a dump header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DumpTag {
    Counts = 0,
    Residues = 1,
}

pub fn write_dump<W: Write>(func: &GroupFn<u64>, tag: DumpTag, mut w: W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&func.field.p().to_le_bytes())?;
    w.write_all(&func.field.f().to_le_bytes())?;
    w.write_all(&(func.n as u32).to_le_bytes())?;
    w.write_all(&[tag as u8])?;
    for v in &func.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a dump written by `write_dump`; the field must match the header.
pub fn read_dump<R: Read>(field: Arc<Field>, mut r: R) -> Result<(GroupFn<u64>, DumpTag)> {
    let io = |e: std::io::Error| Error::Invalid(format!("dump read failed: {e}"));
    let mut head = [0u8; 17];
    r.read_exact(&mut head).map_err(io)?;
    if &head[..4] != MAGIC {
        return invalid("bad dump magic");
    }
    let word = |i: usize| u32::from_le_bytes(head[i..i + 4].try_into().unwrap());
    if word(4) != field.p() || word(8) != field.f() {
        return invalid("dump header does not match field");
    }
    let n = word(12) as usize;
    let tag = match head[16] {
        0 => DumpTag::Counts,
        1 => DumpTag::Residues,
        t => return invalid(format!("unknown dump tag {t}")),
    };
    let len = group_len(&field, n)?;
    let mut buf = vec![0u8; len * 8];
    r.read_exact(&mut buf).map_err(io)?;
    let values = buf
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((GroupFn { field, n, values }, tag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montgomery_roundtrip() {
        let tp = transform_primes(5, 1)[0];
        let m = Mont::new(tp.modulus);
        for a in [0u64, 1, 2, 12345678901, tp.modulus - 1] {
            assert_eq!(m.from_mont(m.to_mont(a)), a);
            let b = 987654321u64;
            let want = (a as u128 * b as u128 % tp.modulus as u128) as u64;
            assert_eq!(m.from_mont(m.mul(m.to_mont(a), m.to_mont(b))), want);
        }
    }

    #[test]
    fn primes_are_one_mod_p() {
        for p in [2u32, 3, 5, 7] {
            let ps = transform_primes(p, 3);
            for t in &ps {
                assert!(t.modulus > 1 << 50);
                assert_eq!((t.modulus - 1) % p as u64, 0);
                assert_ne!(t.omega, 1);
                assert_eq!(pow_mod(t.omega, p as u64, t.modulus), 1);
            }
            assert!(ps.windows(2).all(|w| w[0].modulus < w[1].modulus));
        }
    }

    #[test]
    fn delta_transforms_to_one() {
        let f = Arc::new(Field::standard(3, 2).unwrap());
        let mut d = GroupFn::<u64>::zeros(f, 2).unwrap();
        d.values_mut()[0] = 1;
        let tp = transform_primes(3, 1)[0];
        let t = transform(&d, &tp, Direction::Forward).unwrap();
        assert!(t.values().iter().all(|&v| v == 1));
    }
}
