//! Linear algebra over F₂ on bit-packed vectors.

use crate::boolfn::BooleanFunction;

/// Incremental echelon basis of a subspace of F₂⁶⁴, one vector per pivot bit.
#[derive(Clone, Debug)]
pub struct XorBasis {
    by_pivot: [u64; 64],
    rank: u32,
}

impl Default for XorBasis {
    fn default() -> Self {
        Self {
            by_pivot: [0; 64],
            rank: 0,
        }
    }
}

impl XorBasis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, mut v: u64) -> u64 {
        while v != 0 {
            let p = 63 - v.leading_zeros() as usize;
            if self.by_pivot[p] == 0 {
                return v;
            }
            v ^= self.by_pivot[p];
        }
        0
    }

    /// Adds `v` to the spanning set. Returns whether the rank grew.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let p = 63 - r.leading_zeros() as usize;
        self.by_pivot[p] = r;
        self.rank += 1;
        true
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }
}

/// Rank over F₂ of a list of equal-length truth tables, by Gaussian elimination.
pub fn rank(rows: &[BooleanFunction]) -> usize {
    let mut rows: Vec<Vec<u64>> = rows.iter().map(|r| r.words().to_vec()).collect();
    let Some(width) = rows.first().map(|r| r.len() * 64) else {
        return 0;
    };
    let mut rank = 0;
    for col in 0..width {
        let (w, b) = (col / 64, col % 64);
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[w] >> b & 1 == 1 {
                row.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x ^= *y);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_tracks_span() {
        let mut b = XorBasis::new();
        assert!(b.insert(0b011));
        assert!(b.insert(0b110));
        assert!(!b.insert(0b101));
        assert!(b.contains(0b101));
        assert!(!b.contains(0b001));
        assert!(!b.insert(0));
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn rank_of_tables() {
        let rows: Vec<_> = ["0110", "0011", "0101", "1111"]
            .iter()
            .map(|s| BooleanFunction::from_bits(s).unwrap())
            .collect();
        assert_eq!(rank(&rows), 3);
        assert_eq!(rank(&[]), 0);
    }
}
