//! Exact linear algebra: a sparse fraction-free echelon form and dense rational kernels.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Q;

/// Sparse integer vector, sorted by column, no zero entries.
pub type SparseVec = Vec<(usize, BigInt)>;

/// Clear denominators of a rational sparse vector.
pub fn to_integer(v: &[(usize, Q)]) -> SparseVec {
    let mut den = BigInt::one();
    for (_, c) in v {
        den = den.lcm(c.denom());
    }
    let mut out: SparseVec = v
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (*i, c.numer() * (&den / c.denom())))
        .collect();
    out.sort_by_key(|(i, _)| *i);
    remove_content(&mut out);
    out
}

/// Entries wider than this trigger content removal during elimination.
const CONTENT_BITS: u64 = 128;

fn remove_content(v: &mut SparseVec) {
    let mut g = BigInt::zero();
    for (_, c) in v.iter() {
        g = g.gcd(c);
        if g.is_one() {
            return;
        }
    }
    if g > BigInt::one() {
        for (_, c) in v.iter_mut() {
            *c /= &g;
        }
    }
}

/// `p*v - a*row`, merged by column.
fn combine(v: &SparseVec, p: &BigInt, row: &SparseVec, a: &BigInt) -> SparseVec {
    let mut out = Vec::with_capacity(v.len() + row.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < row.len() {
        let ci = v.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cj = row.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ci < cj {
            out.push((ci, p * &v[i].1));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(a * &row[j].1)));
            j += 1;
        } else {
            let c = p * &v[i].1 - a * &row[j].1;
            if !c.is_zero() {
                out.push((ci, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental semi-echelon form; each row's pivot is its leftmost column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    /// Eliminate leading entries until the leading column is free.
    fn reduce_leading(&self, mut v: SparseVec) -> SparseVec {
        while let Some((c, a)) = v.first().cloned() {
            let Some(&r) = self.pivot_row.get(&c) else { break };
            let row = &self.rows[r];
            let p = &row[0].1;
            let g = a.gcd(p);
            let (pa, aa) = (p / &g, &a / &g);
            v = combine(&v, &pa, row, &aa);
            if v.iter().any(|(_, c)| c.bits() > CONTENT_BITS) {
                remove_content(&mut v);
            }
        }
        v
    }

    /// Add a row; returns whether it was independent.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce_leading(v);
        if v.is_empty() {
            return false;
        }
        let mut v = v;
        remove_content(&mut v);
        if v[0].1.is_negative() {
            for (_, c) in v.iter_mut() {
                *c = -&*c;
            }
        }
        self.pivot_row.insert(v[0].0, self.rows.len());
        self.rows.push(v);
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce_leading(v).is_empty()
    }

    /// Full reduction of a rational vector: the result has no pivot columns.
    pub fn reduce_full(&self, v: &[(usize, Q)]) -> Vec<(usize, Q)> {
        let mut cur: std::collections::BTreeMap<usize, Q> =
            v.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
        let mut out = Vec::new();
        while let Some((&c, _)) = cur.iter().next() {
            let a = cur.remove(&c).unwrap();
            match self.pivot_row.get(&c) {
                None => out.push((c, a)),
                Some(&r) => {
                    let row = &self.rows[r];
                    let factor = &a / Q::from_integer(row[0].1.clone());
                    for (col, val) in &row[1..] {
                        let e = cur.entry(*col).or_insert_with(Q::zero);
                        *e -= &factor * Q::from_integer(val.clone());
                        if e.is_zero() {
                            cur.remove(col);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Basis of the right kernel of a dense rational matrix with `ncols` columns.
pub fn kernel(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[r].clone();
                for (v, p) in m[i].iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[k][f].clone();
            }
            v
        })
        .collect()
}

/// Rank of a dense rational matrix.
pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    ncols - kernel(rows, ncols).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qr};

    fn sv(v: &[(usize, i64)]) -> SparseVec {
        v.iter().map(|(i, c)| (*i, BigInt::from(*c))).collect()
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut e = Echelon::new();
        assert!(e.insert(sv(&[(0, 2), (1, 4)])));
        assert!(e.insert(sv(&[(0, 3), (2, 1)])));
        assert!(!e.insert(sv(&[(1, 12), (2, -2)])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(sv(&[(0, 5), (1, 4), (2, 1)])));
        assert!(!e.contains(sv(&[(2, 1)])));
    }

    #[test]
    fn full_reduction_leaves_free_columns() {
        let mut e = Echelon::new();
        e.insert(sv(&[(0, 2), (2, 1)]));
        let r = e.reduce_full(&[(0, q(1)), (1, q(1))]);
        assert_eq!(r, vec![(1, q(1)), (2, qr(-1, 2))]);
    }

    #[test]
    fn dense_kernel() {
        let rows = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let k = kernel(&rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot: Q = rows[0].iter().zip(v).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
        assert_eq!(rank(&rows, 3), 1);
    }
}
