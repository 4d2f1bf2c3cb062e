use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Certificate, IntMatrix, Solution};

/// Rows of bits packed into `u64` words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Self { cols, words, bits: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.bits.len() / self.words
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    /// `row[dst] ^= row[src]`
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.words;
        for k in 0..w {
            let v = self.bits[src * w + k];
            self.bits[dst * w + k] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        for k in 0..w {
            self.bits.swap(a * w + k, b * w + k);
        }
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.bits[i * self.words..(i + 1) * self.words].iter().all(|&w| w == 0)
    }

    pub fn ones_in_row(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.cols).filter(move |&j| self.get(i, j))
    }
}

/// Gauss-Jordan elimination on `[A | b]` with the row operations recorded,
/// so that an inconsistent row comes with the set of original rows summing
/// to it.
pub(super) fn solve(a: &IntMatrix, b: &[BigInt]) -> Solution {
    let m = a.rows();
    let n = a.cols();
    let mut aug = BitMatrix::zeros(m, n + 1);
    let mut history = BitMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..n {
            if a.get(i, j).is_odd() {
                aug.set(i, j, true);
            }
        }
        aug.set(i, n, b[i].is_odd());
        history.set(i, i, true);
    }

    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..n {
        let Some(p) = (next..m).find(|&r| aug.get(r, col)) else {
            continue;
        };
        aug.swap_rows(next, p);
        history.swap_rows(next, p);
        for r in 0..m {
            if r != next && aug.get(r, col) {
                aug.xor_row(r, next);
                history.xor_row(r, next);
            }
        }
        pivots.push(col);
        next += 1;
        if next == m {
            break;
        }
    }

    if let Some(bad) = (next..m).find(|&r| aug.get(r, n)) {
        return Solution::Unsolvable(Certificate::Mod2 { rows: history.ones_in_row(bad).collect() });
    }
    let mut x = vec![BigInt::zero(); n];
    for (r, &col) in pivots.iter().enumerate() {
        if aug.get(r, n) {
            x[col] = BigInt::one();
        }
    }
    Solution::Solved(x)
}
