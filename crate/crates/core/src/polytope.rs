//! Exact vertex enumeration for bounded polytopes.
//!
//! The polytope `{x : E x = e, A x ≤ b}` is first restricted to the affine
//! hull of its equalities, then homogenized into the cone
//! `{(t, z) : t ≥ 0, (b - A x0) t - (A N) z ≥ 0}` whose extreme rays with
//! `t > 0` are the vertices. Extreme rays are found with the double
//! description method on primitive integer vectors, using the combinatorial
//! adjacency test.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::{self, rank};
use crate::rational::{zero, Rational};

#[derive(Debug, Clone, Default)]
pub(crate) struct Polytope {
    dim: usize,
    equalities: Vec<(Vec<Rational>, Rational)>,
    inequalities: Vec<(Vec<Rational>, Rational)>,
}

impl Polytope {
    pub fn new(dim: usize) -> Self {
        Self { dim, ..Self::default() }
    }

    /// `row · x = rhs`.
    pub fn equal(&mut self, row: Vec<Rational>, rhs: Rational) {
        debug_assert_eq!(row.len(), self.dim);
        self.equalities.push((row, rhs));
    }

    /// `row · x ≤ rhs`.
    pub fn at_most(&mut self, row: Vec<Rational>, rhs: Rational) {
        debug_assert_eq!(row.len(), self.dim);
        self.inequalities.push((row, rhs));
    }

    /// All vertices in lexicographic order. The polytope must be bounded.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let (eq_rows, eq_rhs): (Vec<_>, Vec<_>) = self.equalities.iter().cloned().unzip();
        let Some(hull) = linalg::solve(&eq_rows, &eq_rhs, self.dim) else {
            return Vec::new();
        };
        let x0 = &hull.particular;
        let basis = &hull.basis;
        if basis.is_empty() {
            let feasible = self.inequalities.iter().all(|(a, b)| &dot(a, x0) <= b);
            return if feasible { vec![x0.clone()] } else { Vec::new() };
        }

        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(self.inequalities.len() + 1);
        let mut t_nonneg = vec![Rational::zero(); basis.len() + 1];
        t_nonneg[0] = Rational::one();
        rows.push(primitive(&t_nonneg));
        for (a, b) in &self.inequalities {
            let mut h = Vec::with_capacity(basis.len() + 1);
            h.push(b - dot(a, x0));
            h.extend(basis.iter().map(|n| -dot(a, n)));
            if h.iter().all(Zero::is_zero) {
                continue;
            }
            rows.push(primitive(&h));
        }
        rows.sort();
        rows.dedup();

        let rays = extreme_rays(&rows, basis.len() + 1);
        let mut vertices: Vec<Vec<Rational>> = rays
            .into_iter()
            .filter(|r| r[0].is_positive())
            .map(|r| {
                let t = Rational::from_integer(r[0].clone());
                let mut x = x0.clone();
                for (z, n) in r[1..].iter().zip(basis) {
                    let z = Rational::from_integer(z.clone()) / &t;
                    for (xi, ni) in x.iter_mut().zip(n) {
                        *xi += &z * ni;
                    }
                }
                x
            })
            .collect();
        vertices.sort();
        vertices.dedup();
        vertices
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

fn primitive(row: &[Rational]) -> Vec<BigInt> {
    let denom = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = row.iter().map(|v| v.numer() * (&denom / v.denom())).collect();
    normalize(ints)
}

fn normalize(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_subset_of(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

/// Extreme rays of the pointed cone `{y : rows · y ≥ 0}` in dimension `dim`.
fn extreme_rays(rows: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    let as_rational = |r: &Vec<BigInt>| r.iter().map(|v| Rational::from_integer(v.clone())).collect::<Vec<_>>();

    // Greedy choice of `dim` independent rows for the initial simplicial cone.
    let mut basis_rows: Vec<usize> = Vec::with_capacity(dim);
    let mut selected: Vec<Vec<Rational>> = Vec::with_capacity(dim);
    for (i, row) in rows.iter().enumerate() {
        selected.push(as_rational(row));
        if rank(selected.clone(), dim) == selected.len() {
            basis_rows.push(i);
            if basis_rows.len() == dim {
                break;
            }
        } else {
            selected.pop();
        }
    }
    assert_eq!(basis_rows.len(), dim, "cone is not pointed; the polytope must be bounded");

    // Columns of the inverse of the selected rows are the initial rays.
    let inverse = invert(&selected);
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let column: Vec<Rational> = inverse.iter().map(|row| row[j].clone()).collect();
            let mut zeros = Bits::new(rows.len());
            for (k, &r) in basis_rows.iter().enumerate() {
                if k != j {
                    zeros.set(r);
                }
            }
            Ray { v: primitive(&column), zeros }
        })
        .collect();

    for (h, row) in rows.iter().enumerate() {
        if basis_rows.contains(&h) {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| int_dot(row, &r.v)).collect();
        let positive: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let negative: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if negative.is_empty() {
            for (r, value) in rays.iter_mut().zip(&values) {
                if value.is_zero() {
                    r.zeros.set(h);
                }
            }
            continue;
        }

        let mut created = Vec::new();
        for &p in &positive {
            for &n in &negative {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(q, r)| q == p || q == n || !common.is_subset_of(&r.zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<BigInt> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(vn, vp)| &values[p] * vn - &values[n] * vp)
                    .collect();
                let mut zeros = common;
                zeros.set(h);
                created.push(Ray { v: normalize(v), zeros });
            }
        }

        let mut next = Vec::with_capacity(rays.len() + created.len());
        for (mut r, value) in rays.into_iter().zip(values) {
            if value.is_negative() {
                continue;
            }
            if value.is_zero() {
                r.zeros.set(h);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
    }
    rays.into_iter().map(|r| r.v).collect()
}

fn invert(matrix: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = matrix.len();
    let augmented: Vec<Vec<Rational>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { zero() }));
            r
        })
        .collect();
    let reduced = linalg::rref(augmented, 2 * n);
    debug_assert_eq!(reduced.pivots[..n], (0..n).collect::<Vec<_>>()[..]);
    reduced.rows.into_iter().map(|r| r[n..].to_vec()).collect()
}
