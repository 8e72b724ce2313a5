//! Dense 0/1 and integer matrices.
//!
//! 0/1 matrices are stored as packed 64-bit rows; the product `A Bᵀ` of two
//! of them is an integer matrix whose `(i, j)` entry is the popcount of
//! `row_i(A) & row_j(B)`. All arithmetic is exact.

use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words_per_row(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.words..(r + 1) * self.words]
    }

    /// All rows back to back, `words_per_row` words each.
    pub fn as_mut_words(&mut self) -> &mut [u64] {
        &mut self.data
    }

    pub fn row_count(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices set in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(r).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `self · otherᵀ`, computed row-parallel.
    pub fn mul_transpose(&self, other: &BitMatrix) -> CountMatrix {
        assert_eq!(self.cols, other.cols, "inner dimensions differ");
        let cols = other.rows;
        let mut out = vec![0u32; self.rows * cols];
        out.par_chunks_mut(cols.max(1))
            .enumerate()
            .for_each(|(i, dst)| {
                let a = self.row(i);
                for (j, d) in dst.iter_mut().enumerate() {
                    *d = and_count(a, other.row(j));
                }
            });
        CountMatrix {
            rows: self.rows,
            cols,
            data: out,
        }
    }

    /// `self · selfᵀ`.
    pub fn gram(&self) -> CountMatrix {
        self.mul_transpose(self)
    }
}

/// Popcount of the intersection of two packed rows.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// Popcount of `a & b & mask`.
#[inline]
pub fn and3_count(a: &[u64], b: &[u64], mask: &[u64]) -> u32 {
    a.iter()
        .zip(b)
        .zip(mask)
        .map(|((x, y), m)| (x & y & m).count_ones())
        .sum()
}

/// Row-major dense matrix of nonnegative counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl CountMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CountMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Entrywise sum.
    pub fn add(&self, other: &CountMatrix) -> CountMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CountMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }
}
