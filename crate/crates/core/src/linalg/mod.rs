//! Exact linear systems `A x = b` over `Z` and `Z/2`.
//!
//! Every answer carries evidence that can be checked against the original
//! system without trusting the elimination: a solution vector, or a
//! certificate of unsolvability.

mod gf2;
mod hnf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cohomology::Ring;
use crate::error::{Error, Result};

pub use gf2::BitMatrix;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().cloned().map(Into::into)).collect();
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &BigInt) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Entry-wise reduction into the ring's canonical representatives.
    pub fn reduced(&self, ring: Ring) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| ring.reduce(x)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Evidence that `A x = b` has no solution over the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// A set of rows whose sum is `0 = 1` modulo 2.
    Mod2 { rows: Vec<usize> },
    /// Rational row multipliers `y` with `yᵀA` integral and `yᵀb` not integral.
    Integer { multipliers: Vec<BigRational> },
}

impl Certificate {
    /// Checks the certificate directly against `a` and `b`.
    pub fn verify(&self, a: &IntMatrix, b: &[BigInt]) -> bool {
        if b.len() != a.rows() {
            return false;
        }
        match self {
            Certificate::Mod2 { rows } => {
                if rows.iter().any(|&r| r >= a.rows()) {
                    return false;
                }
                let two = BigInt::from(2);
                let col_ok = (0..a.cols()).all(|j| {
                    let s: BigInt = rows.iter().map(|&r| a.get(r, j)).sum();
                    s.is_multiple_of(&two)
                });
                let rhs: BigInt = rows.iter().map(|&r| &b[r]).sum();
                col_ok && rhs.is_odd()
            }
            Certificate::Integer { multipliers } => {
                if multipliers.len() != a.rows() {
                    return false;
                }
                let col_ok = (0..a.cols()).all(|j| {
                    let s: BigRational = multipliers
                        .iter()
                        .enumerate()
                        .filter(|(_, y)| !y.is_zero())
                        .map(|(i, y)| y * BigRational::from_integer(a.get(i, j).clone()))
                        .sum();
                    s.is_integer()
                });
                let rhs: BigRational = multipliers
                    .iter()
                    .zip(b)
                    .map(|(y, bi)| y * BigRational::from_integer(bi.clone()))
                    .sum();
                col_ok && !rhs.is_integer()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Solved(Vec<BigInt>),
    Unsolvable(Certificate),
}

/// Whether `x` satisfies `A x = b` in the ring.
pub fn verify_solution(a: &IntMatrix, b: &[BigInt], x: &[BigInt], ring: Ring) -> bool {
    match a.mul_vec(x) {
        Ok(ax) => ax.len() == b.len() && ax.iter().zip(b).all(|(l, r)| ring.reduce(&(l - r)).is_zero()),
        Err(_) => false,
    }
}

/// Solves `A x = b` over `ring`. Free variables are set to zero. The answer
/// is re-checked by substitution (or certificate verification) before it is
/// returned; a failed check is reported as [`Error::Verification`].
pub fn solve_linear(a: &IntMatrix, b: &[BigInt], ring: Ring) -> Result<Solution> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let solution = match ring {
        Ring::Mod2 => gf2::solve(a, b),
        Ring::Integers => hnf::solve(a, b),
    };
    let ok = match &solution {
        Solution::Solved(x) => verify_solution(a, b, x, ring),
        Solution::Unsolvable(c) => c.verify(a, b),
    };
    if !ok {
        return Err(Error::Verification(format!("linear solver over {} produced unverifiable output", ring)));
    }
    Ok(solution)
}
