//! A small exact linear programming solver: two-phase tableau simplex with
//! Bland's rule over the rationals. Variables are nonnegative.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    Equal,
    AtLeast,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self { coefficients, relation, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Self::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    columns: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Rational {
        &self.rows[row][self.columns]
    }

    fn pivot(&mut self, row: usize, column: usize) {
        let inverse = Rational::one() / &self.rows[row][column];
        for v in self.rows[row].iter_mut() {
            *v *= &inverse;
        }
        let pivot_row = self.rows[row].clone();
        for (r, current) in self.rows.iter_mut().enumerate() {
            if r == row || current[column].is_zero() {
                continue;
            }
            let factor = current[column].clone();
            for (v, p) in current.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[row] = column;
    }

    /// Maximizes `cost · x` over the columns allowed by `usable`.
    /// Returns `false` when unbounded.
    fn run(&mut self, cost: &[Rational], usable: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.columns).filter(|&j| usable(j) && !self.basis.contains(&j)).find(|&j| {
                let reduced: Rational = cost[j].clone()
                    - self.basis.iter().enumerate().map(|(i, &b)| &cost[b] * &self.rows[i][j]).sum::<Rational>();
                reduced.is_positive()
            });
            let Some(column) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][column];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leaving {
                    None => true,
                    Some((best, value)) => ratio < *value || (ratio == *value && self.basis[i] < self.basis[*best]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, column);
        }
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().enumerate().map(|(i, &b)| &cost[b] * self.rhs(i)).sum()
    }
}

/// Maximizes `objective · x` subject to the constraints and `x ≥ 0`.
pub fn maximize(objective: &[Rational], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();
    let slack_count = constraints.iter().filter(|c| c.relation != Relation::Equal).count();
    let columns = n + slack_count + m;
    let artificial = |j: usize| j >= n + slack_count;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = n;
    for (i, c) in constraints.iter().enumerate() {
        assert_eq!(c.coefficients.len(), n, "constraint width differs from the objective");
        let flip = c.rhs.is_negative();
        let sign = |v: &Rational| if flip { -v.clone() } else { v.clone() };
        let mut row = vec![Rational::zero(); columns + 1];
        for (j, a) in c.coefficients.iter().enumerate() {
            row[j] = sign(a);
        }
        row[columns] = sign(&c.rhs);
        let relation = match (c.relation, flip) {
            (Relation::AtMost, true) => Relation::AtLeast,
            (Relation::AtLeast, true) => Relation::AtMost,
            (r, _) => r,
        };
        match relation {
            Relation::AtMost => {
                row[slack] = Rational::one();
                basis.push(slack);
                slack += 1;
            }
            Relation::AtLeast => {
                row[slack] = -Rational::one();
                slack += 1;
                row[n + slack_count + i] = Rational::one();
                basis.push(n + slack_count + i);
            }
            Relation::Equal => {
                row[n + slack_count + i] = Rational::one();
                basis.push(n + slack_count + i);
            }
        }
        rows.push(row);
    }
    let mut tableau = Tableau { rows, basis, columns };

    let phase_one: Vec<Rational> =
        (0..columns).map(|j| if artificial(j) { -Rational::one() } else { Rational::zero() }).collect();
    tableau.run(&phase_one, &|_| true);
    if !tableau.objective(&phase_one).is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive artificial variables out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tableau.rows.len() {
        if artificial(tableau.basis[i]) {
            match (0..n + slack_count).find(|&j| !tableau.rows[i][j].is_zero()) {
                Some(j) => tableau.pivot(i, j),
                None => {
                    tableau.rows.remove(i);
                    tableau.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut phase_two = vec![Rational::zero(); columns];
    phase_two[..n].clone_from_slice(objective);
    if !tableau.run(&phase_two, &|j| !artificial(j)) {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![Rational::zero(); n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            point[b] = tableau.rhs(i).clone();
        }
    }
    LpOutcome::Optimal { value: tableau.objective(&phase_two), point }
}
