//! Exact rational linear algebra on small dense matrices.
//!
//! Everything here works over `BigRational`; the matrices involved (period
//! vectors of linear sets, recurrence systems) have at most a few dozen rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigRational>>;

pub fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Row-reduces `m` in place and returns the pivot columns.
fn row_reduce(m: &mut Matrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let (top, rest) = if r < row {
                    let (a, b) = m.split_at_mut(row);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = m.split_at_mut(r);
                    (&a[row], &mut b[0])
                };
                for (x, y) in rest.iter_mut().zip(top.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Rank of a set of integer vectors (rows).
pub fn rank(vectors: &[Vec<i64>]) -> usize {
    let Some(cols) = vectors.first().map(Vec::len) else {
        return 0;
    };
    let mut m: Matrix = vectors
        .iter()
        .map(|v| v.iter().map(|&x| rat(x)).collect())
        .collect();
    row_reduce(&mut m, cols).len()
}

/// Some solution of `a x = b` (free variables set to zero), or `None` when
/// the system is inconsistent. `a` has `cols` columns.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational], cols: usize) -> Option<Vec<BigRational>> {
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut m, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

/// Coefficients `n` with `sum n_j * columns[j] = target`, if any.
pub fn express(columns: &[Vec<i64>], target: &[i64]) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let a: Matrix = (0..rows)
        .map(|i| columns.iter().map(|c| rat(c[i])).collect())
        .collect();
    let b: Vec<BigRational> = target.iter().map(|&x| rat(x)).collect();
    solve(&a, &b, columns.len())
}

/// Phase-one simplex: finds `x >= 0` with `a x = b`, or `None` if the
/// system has no nonnegative solution. Bland's rule keeps it finite.
pub fn nonneg_solution(a: &[Vec<BigRational>], b: &[BigRational], cols: usize) -> Option<Vec<BigRational>> {
    let m = a.len();
    if m == 0 {
        return Some(vec![BigRational::zero(); cols]);
    }
    let width = cols + m;
    // tableau rows: [A | I | b] with b >= 0
    let mut t: Matrix = Vec::with_capacity(m);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut r: Vec<BigRational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        r.extend((0..m).map(|j| if j == i { BigRational::one() } else { BigRational::zero() }));
        r.push(if flip { -rhs.clone() } else { rhs.clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (cols..width).collect();
    loop {
        // reduced costs of the phase-one objective (sum of artificials)
        let entering = (0..width).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let cj = if j >= cols { BigRational::one() } else { BigRational::zero() };
            let mut d = cj;
            for (i, &bv) in basis.iter().enumerate() {
                if bv >= cols {
                    d -= &t[i][j];
                }
            }
            d.is_negative()
        });
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][e].is_positive() {
                let ratio = &t[i][width] / &t[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // phase-one objective is bounded below, so a leaving row exists
        let (l, _) = leave.expect("bounded phase-one objective");
        let inv = t[l][e].recip();
        for v in t[l].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = t[l].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != l && !row[e].is_zero() {
                let f = row[e].clone();
                for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
        basis[l] = e;
    }
    let infeasible = basis
        .iter()
        .enumerate()
        .any(|(i, &bv)| bv >= cols && !t[i][width].is_zero());
    if infeasible {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < cols {
            x[bv] = t[i][width].clone();
        }
    }
    Some(x)
}

/// Whether `target` lies in the real cone spanned by `generators`.
pub fn cone_contains(generators: &[&[i64]], target: &[i64]) -> bool {
    if target.iter().all(|&x| x == 0) {
        return true;
    }
    if generators.is_empty() {
        return false;
    }
    let a: Matrix = (0..target.len())
        .map(|i| generators.iter().map(|g| rat(g[i])).collect())
        .collect();
    let b: Vec<BigRational> = target.iter().map(|&x| rat(x)).collect();
    nonneg_solution(&a, &b, generators.len()).is_some()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An integer functional `w` with `w . v >= 1` for every vector, if the
/// vectors span a pointed cone. Simple functionals (all-ones, signed unit
/// vectors) are preferred before falling back to a linear program.
pub fn positive_functional(vectors: &[&[i64]], dim: usize) -> Option<Vec<i64>> {
    let works = |w: &[i64]| vectors.iter().all(|v| dot(w, v) >= 1);
    let ones = vec![1; dim];
    if works(&ones) {
        return Some(ones);
    }
    for c in (0..dim).rev() {
        for s in [1, -1] {
            let mut w = vec![0; dim];
            w[c] = s;
            if works(&w) {
                return Some(w);
            }
        }
    }
    if vectors.is_empty() {
        return Some(vec![0; dim]);
    }
    // w = u - v with u, v >= 0; v_i . w - s_i = 1
    let k = vectors.len();
    let cols = 2 * dim + k;
    let a: Matrix = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut row = Vec::with_capacity(cols);
            row.extend(v.iter().map(|&x| rat(x)));
            row.extend(v.iter().map(|&x| rat(-x)));
            row.extend((0..k).map(|j| if j == i { rat(-1) } else { rat(0) }));
            row
        })
        .collect();
    let b = vec![rat(1); k];
    let x = nonneg_solution(&a, &b, cols)?;
    let w: Vec<BigRational> = (0..dim).map(|c| &x[c] - &x[dim + c]).collect();
    let l = w.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let w: Vec<i64> = w
        .iter()
        .map(|q| {
            let v = q * BigRational::from_integer(l.clone());
            i64::try_from(v.to_integer()).expect("functional fits in i64")
        })
        .collect();
    debug_assert!(works(&w));
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_periods() {
        assert_eq!(rank(&[vec![2, 0], vec![1, 1], vec![0, 2]]), 2);
        assert_eq!(rank(&[vec![1, 0, 1], vec![0, 1, 1]]), 2);
        assert_eq!(rank(&[vec![2], vec![3]]), 1);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn express_unique_and_inconsistent() {
        let sol = express(&[vec![1, 0], vec![1, 1]], &[3, 1]).unwrap();
        assert_eq!(sol, vec![rat(2), rat(1)]);
        assert!(express(&[vec![1, 1]], &[1, 0]).is_none());
    }

    #[test]
    fn cone_membership() {
        let g: Vec<&[i64]> = vec![&[1, 0], &[0, 1]];
        assert!(cone_contains(&g, &[3, 4]));
        assert!(!cone_contains(&g, &[-1, 4]));
        let g: Vec<&[i64]> = vec![&[1, 1], &[-1, 1]];
        assert!(cone_contains(&g, &[0, 2]));
        assert!(!cone_contains(&g, &[2, 1]));
    }

    #[test]
    fn functional_for_pointed_and_not() {
        let v: Vec<&[i64]> = vec![&[1, 0, 1], &[-1, 0, 1], &[0, -1, 1]];
        let w = positive_functional(&v, 3).unwrap();
        assert!(v.iter().all(|p| dot(&w, p) >= 1));
        let v: Vec<&[i64]> = vec![&[2, -1], &[-1, 2]];
        let w = positive_functional(&v, 2).unwrap();
        assert!(v.iter().all(|p| dot(&w, p) >= 1));
        let v: Vec<&[i64]> = vec![&[1], &[-1]];
        assert!(positive_functional(&v, 1).is_none());
    }
}
