//! Integer solvability through the column Hermite normal form.
//!
//! Column operations give `A U = H` with `U` unimodular and `H` in lower
//! column-echelon form: pivot `k` sits in row `p_k`, is positive, and column
//! `k` vanishes above it. Then `A x = b` is solvable over `Z` iff `H z = b`
//! is, with `x = U z`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Certificate, IntMatrix, Solution};

pub(super) struct ColumnHermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Row index of each pivot, in column order.
    pub pivot_rows: Vec<usize>,
}

pub(super) fn column_hermite(a: &IntMatrix) -> ColumnHermite {
    let m = a.rows();
    let n = a.cols();
    let mut h = a.clone();
    let mut u = IntMatrix::identity(n);
    let mut pivot_rows = Vec::new();
    let mut k = 0;
    for i in 0..m {
        if k == n {
            break;
        }
        for j in k + 1..n {
            if h.get(i, j).is_zero() {
                continue;
            }
            let (x, y) = (h.get(i, k).clone(), h.get(i, j).clone());
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            // [col_k, col_j] <- [s col_k + t col_j, -(y/g) col_k + (x/g) col_j]
            let (p, q) = (-(&y / &g), &x / &g);
            combine_columns(&mut h, k, j, &s, &t, &p, &q);
            combine_columns(&mut u, k, j, &s, &t, &p, &q);
        }
        if h.get(i, k).is_zero() {
            continue;
        }
        if h.get(i, k).is_negative() {
            negate_column(&mut h, k);
            negate_column(&mut u, k);
        }
        let pivot = h.get(i, k).clone();
        for l in 0..k {
            let f = h.get(i, l).div_floor(&pivot);
            if !f.is_zero() {
                sub_column_multiple(&mut h, l, k, &f);
                sub_column_multiple(&mut u, l, k, &f);
            }
        }
        pivot_rows.push(i);
        k += 1;
    }
    ColumnHermite { h, u, pivot_rows }
}

fn combine_columns(m: &mut IntMatrix, k: usize, j: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
    for r in 0..m.rows() {
        let (ck, cj) = (m.get(r, k).clone(), m.get(r, j).clone());
        if ck.is_zero() && cj.is_zero() {
            continue;
        }
        m.set(r, k, s * &ck + t * &cj);
        m.set(r, j, p * &ck + q * &cj);
    }
}

fn negate_column(m: &mut IntMatrix, k: usize) {
    for r in 0..m.rows() {
        let v = -m.get(r, k).clone();
        m.set(r, k, v);
    }
}

/// `col_l -= f * col_k`
fn sub_column_multiple(m: &mut IntMatrix, l: usize, k: usize, f: &BigInt) {
    for r in 0..m.rows() {
        let d = f * m.get(r, k);
        if !d.is_zero() {
            m.add_to(r, l, &-d);
        }
    }
}

fn q(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

pub(super) fn solve(a: &IntMatrix, b: &[BigInt]) -> Solution {
    let m = a.rows();
    let n = a.cols();
    let ColumnHermite { h, u, pivot_rows } = column_hermite(a);
    let r = pivot_rows.len();

    // rational solution of the square lower-triangular pivot system
    let mut z: Vec<BigRational> = Vec::with_capacity(r);
    for (k, &pk) in pivot_rows.iter().enumerate() {
        let mut acc = q(&b[pk]);
        for (l, zl) in z.iter().enumerate() {
            acc -= q(h.get(pk, l)) * zl;
        }
        z.push(acc / q(h.get(pk, k)));
    }

    // rows outside the pivot system must be implied by it
    let mut is_pivot = vec![false; m];
    for &p in &pivot_rows {
        is_pivot[p] = true;
    }
    for i in (0..m).filter(|&i| !is_pivot[i]) {
        let mut residual = q(&b[i]);
        for (l, zl) in z.iter().enumerate() {
            residual -= q(h.get(i, l)) * zl;
        }
        if residual.is_zero() {
            continue;
        }
        // y = e_i - v with v H_P = H[i, ..r], so that yᵀH = 0 and yᵀb = residual
        let target: Vec<BigRational> = (0..r).map(|l| q(h.get(i, l))).collect();
        let v = left_solve(&h, &pivot_rows, &target);
        let scale = BigRational::one() / (BigRational::from_integer(BigInt::from(2)) * &residual);
        let mut y = vec![BigRational::zero(); m];
        y[i] = scale.clone();
        for (k, vk) in v.into_iter().enumerate() {
            y[pivot_rows[k]] = -vk * &scale;
        }
        return Solution::Unsolvable(Certificate::Integer { multipliers: y });
    }

    if let Some(k) = z.iter().position(|zk| !zk.is_integer()) {
        // y_P = e_k H_P^{-1}: yᵀH = e_k is integral while yᵀb = z_k is not
        let mut target = vec![BigRational::zero(); r];
        target[k] = BigRational::one();
        let w = left_solve(&h, &pivot_rows, &target);
        let mut y = vec![BigRational::zero(); m];
        for (j, wj) in w.into_iter().enumerate() {
            y[pivot_rows[j]] = wj;
        }
        return Solution::Unsolvable(Certificate::Integer { multipliers: y });
    }

    let mut zi = vec![BigInt::zero(); n];
    for (k, zk) in z.into_iter().enumerate() {
        zi[k] = zk.to_integer();
    }
    Solution::Solved(u.mul_vec(&zi).expect("U is n x n"))
}

/// Solves `w H_P = target` for the lower-triangular pivot block `H_P`.
fn left_solve(h: &IntMatrix, pivot_rows: &[usize], target: &[BigRational]) -> Vec<BigRational> {
    let r = pivot_rows.len();
    let mut w = vec![BigRational::zero(); r];
    for l in (0..r).rev() {
        let mut acc = target[l].clone();
        for j in l + 1..r {
            acc -= &w[j] * q(h.get(pivot_rows[j], l));
        }
        w[l] = acc / q(h.get(pivot_rows[l], l));
    }
    w
}
