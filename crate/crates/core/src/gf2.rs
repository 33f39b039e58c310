//! GF(2) matrices as bit-rows, with Gaussian elimination for rank.

use crate::bits::BitSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: Vec<BitSet>,
    n_rows: usize,
    n_cols: usize,
}

impl Gf2Matrix {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Gf2Matrix {
            rows: vec![BitSet::new(); n_rows],
            n_rows,
            n_cols,
        }
    }

    pub fn from_rows(rows: Vec<Vec<u8>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut m = Gf2Matrix::new(n_rows, n_cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged rows");
            for (j, &bit) in row.iter().enumerate() {
                if bit != 0 {
                    m.set(i, j);
                }
            }
        }
        m
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn set(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        self.rows[i].insert(j);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::new(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in self.rows[i].iter() {
                t.set(j, i);
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.rows.clone())
    }
}

/// Rank over GF(2) of the given bit-rows; consumes the rows and eliminates in
/// place.
pub fn rank_of_rows(mut rows: Vec<BitSet>) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = match rows[i].first() {
            Some(p) => p,
            None => continue,
        };
        let pivot_row = rows[i].clone();
        for j in i + 1..rows.len() {
            if rows[j].contains(pivot) {
                rows[j].xor_with(&pivot_row);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fig_matrix_has_rank_two() {
        // The 2x3 matrix on the middle edge of the C5 decomposition.
        let m = Gf2Matrix::from_rows(vec![vec![0, 0, 1], vec![1, 0, 0]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(Gf2Matrix::new(3, 4).rank(), 0);
    }

    #[test]
    fn equal_rows() {
        let m = Gf2Matrix::from_rows(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(m.rank(), 1);
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(bits in proptest::collection::vec(any::<bool>(), 0..49)) {
            let rows = bits.len() / 7;
            let m = Gf2Matrix::from_rows(
                (0..rows)
                    .map(|i| (0..7).map(|j| bits[i * 7 + j] as u8).collect())
                    .collect(),
            );
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
