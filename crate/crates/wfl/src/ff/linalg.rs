//! Dense linear algebra over a `Field`. Matrices are row-major `Vec<Vec<Fq>>`.

use super::field::{Field, Fq};

pub type Matrix = Vec<Vec<Fq>>;

/// Row-reduces in place; returns the pivot columns.
pub fn rref(fq: &Field, a: &mut Matrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = fq.inv(a[r][c]);
        for x in a[r].iter_mut() {
            *x = fq.mul(*x, inv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let t = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = fq.sub(*x, fq.mul(t, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(fq: &Field, a: &Matrix) -> usize {
    rref(fq, &mut a.clone()).len()
}

pub fn transpose(a: &Matrix, cols: usize) -> Matrix {
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Some x with A x = b, or `None` if inconsistent. `cols` is the width of A.
pub fn solve(fq: &Field, a: &Matrix, b: &[Fq], cols: usize) -> Option<Vec<Fq>> {
    assert_eq!(a.len(), b.len());
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            debug_assert_eq!(row.len(), cols);
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let pivots = rref(fq, &mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Fq::ZERO; cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][cols];
    }
    Some(x)
}

/// Some y with y A = b.
pub fn left_solve(fq: &Field, a: &Matrix, b: &[Fq], cols: usize) -> Option<Vec<Fq>> {
    let at = transpose(a, cols);
    solve(fq, &at, b, a.len())
}

/// Basis of {x : A x = 0}.
pub fn nullspace(fq: &Field, a: &Matrix, cols: usize) -> Vec<Vec<Fq>> {
    let mut m = a.clone();
    let pivots = rref(fq, &mut m);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Fq::ZERO; cols];
        v[free] = Fq::ONE;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = fq.neg(m[i][free]);
        }
        out.push(v);
    }
    out
}

pub fn mat_vec(fq: &Field, a: &Matrix, x: &[Fq]) -> Vec<Fq> {
    a.iter()
        .map(|row| dot(fq, row, x))
        .collect()
}

pub fn dot(fq: &Field, a: &[Fq], b: &[Fq]) -> Fq {
    a.iter()
        .zip(b)
        .fold(Fq::ZERO, |acc, (&x, &y)| fq.add(acc, fq.mul(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_is_annihilated() {
        let f = Field::prime(5).unwrap();
        let a: Matrix = vec![
            vec![Fq(1), Fq(2), Fq(3), Fq(4)],
            vec![Fq(2), Fq(4), Fq(1), Fq(2)],
        ];
        assert_eq!(rank(&f, &a), 2);
        let ns = nullspace(&f, &a, 4);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(mat_vec(&f, &a, &v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_inconsistent() {
        let f = Field::prime(3).unwrap();
        let a: Matrix = vec![vec![Fq(1), Fq(1)], vec![Fq(2), Fq(2)]];
        assert!(solve(&f, &a, &[Fq(1), Fq(1)], 2).is_none());
        let x = solve(&f, &a, &[Fq(1), Fq(2)], 2).unwrap();
        assert_eq!(mat_vec(&f, &a, &x), vec![Fq(1), Fq(2)]);
    }
}
