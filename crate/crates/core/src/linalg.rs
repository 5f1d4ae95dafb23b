//! Exact row reduction over the rationals with sparse rows.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type SparseRow = BTreeMap<usize, BigRational>;

/// A subspace kept in reduced row echelon form.
#[derive(Clone, Debug, Default)]
pub struct RowSpace {
    /// Rows keyed by pivot column; each row has coefficient 1 at its pivot and
    /// 0 at every other pivot column.
    rows: BTreeMap<usize, SparseRow>,
}

fn axpy(target: &mut SparseRow, scale: &BigRational, row: &SparseRow) {
    for (&c, v) in row {
        let entry = target.entry(c).or_insert_with(BigRational::zero);
        *entry += scale * v;
        if entry.is_zero() {
            target.remove(&c);
        }
    }
}

impl RowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the current pivots.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        row.retain(|_, v| !v.is_zero());
        let pivots: Vec<usize> = row.keys().copied().filter(|c| self.rows.contains_key(c)).collect();
        for c in pivots {
            if let Some(v) = row.get(&c).cloned() {
                axpy(&mut row, &-v, &self.rows[&c]);
            }
        }
        row
    }

    pub fn contains(&self, row: &SparseRow) -> bool {
        self.reduce(row.clone()).is_empty()
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut row = self.reduce(row);
        let Some((&pivot, lead)) = row.iter().next() else { return false };
        let inv = BigRational::one() / lead.clone();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for other in self.rows.values_mut() {
            if let Some(v) = other.get(&pivot).cloned() {
                axpy(other, &-v, &row);
            }
        }
        self.rows.insert(pivot, row);
        true
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseRow> + '_ {
        self.rows.values()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }
}

/// Rank of a list of sparse rows.
pub fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut space = RowSpace::new();
    for r in rows {
        space.insert(r);
    }
    space.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn row(v: &[i64]) -> SparseRow {
        v.iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| (i, BigRational::from_integer(BigInt::from(x))))
            .collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank([row(&[1, 2, 3]), row(&[2, 4, 6]), row(&[0, 1, 1])]), 2);
        assert_eq!(rank([row(&[0, 0])]), 0);
        let mut s = RowSpace::new();
        s.insert(row(&[1, 1, 0]));
        s.insert(row(&[0, 1, 1]));
        assert!(s.contains(&row(&[1, 0, -1])));
        assert!(!s.contains(&row(&[0, 0, 1])));
    }

    /// Integer Gaussian elimination by determinant-free fraction-free steps.
    fn oracle_rank(mut m: Vec<Vec<i128>>) -> usize {
        let cols = m.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
            m.swap(r, p);
            for i in 0..m.len() {
                if i != r && m[i][c] != 0 {
                    let (a, b) = (m[r][c], m[i][c]);
                    for j in 0..cols {
                        m[i][j] = m[i][j] * a - m[r][j] * b;
                    }
                    let g = m[i].iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
                    if g > 1 {
                        m[i].iter_mut().for_each(|x| *x /= g);
                    }
                }
            }
            r += 1;
        }
        r
    }

    proptest! {
        #[test]
        fn rank_matches_integer_elimination(m in proptest::collection::vec(proptest::collection::vec(-3i64..4, 5), 0..6)) {
            let ours = rank(m.iter().map(|r| row(r)));
            let theirs = oracle_rank(m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect());
            prop_assert_eq!(ours, theirs);
        }
    }
}
