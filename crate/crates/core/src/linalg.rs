//! Exact dense linear algebra over the rationals.

use num_traits::Zero;

use crate::rational::{one, zero, Rational};

/// Reduced row echelon form. Only nonzero rows are kept; `pivots[i]` is the
/// pivot column of `rows[i]`.
#[derive(Debug, Clone)]
pub(crate) struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
}

pub(crate) fn rref(mut matrix: Vec<Vec<Rational>>, columns: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..columns {
        let Some(found) = (rank..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(rank, found);
        let inv = one() / &matrix[rank][col];
        for v in matrix[rank].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = matrix[rank].clone();
        for (r, row) in matrix.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == matrix.len() {
            break;
        }
    }
    matrix.truncate(rank);
    Rref { rows: matrix, pivots }
}

pub(crate) fn rank(matrix: Vec<Vec<Rational>>, columns: usize) -> usize {
    rref(matrix, columns).pivots.len()
}

/// Affine solution set `{x : A x = b}` as `x = particular + Σ z_j basis[j]`.
#[derive(Debug, Clone)]
pub(crate) struct AffineSolution {
    pub particular: Vec<Rational>,
    pub basis: Vec<Vec<Rational>>,
}

/// Solves `A x = b` for `x ∈ ℚ^columns`; `None` when inconsistent.
///
/// The basis vectors are indexed by free columns: basis `j` has a one at the
/// `j`-th free column and zeros at the other free columns.
pub(crate) fn solve(a: &[Vec<Rational>], b: &[Rational], columns: usize) -> Option<AffineSolution> {
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let reduced = rref(augmented, columns + 1);
    if reduced.pivots.last() == Some(&columns) {
        return None;
    }
    let mut particular = vec![zero(); columns];
    for (row, &col) in reduced.rows.iter().zip(&reduced.pivots) {
        particular[col] = row[columns].clone();
    }
    let free: Vec<usize> = (0..columns).filter(|c| !reduced.pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![zero(); columns];
            v[f] = one();
            for (row, &col) in reduced.rows.iter().zip(&reduced.pivots) {
                v[col] = -row[f].clone();
            }
            v
        })
        .collect();
    Some(AffineSolution { particular, basis })
}
