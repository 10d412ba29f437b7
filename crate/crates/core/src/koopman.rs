//! The Koopman operator `U_T f = f ∘ T` and its eigenvalue one modulo
//! `V`-null sets.

use crate::capacity::UpperProb;
use crate::error::{Error, Result};
use crate::function::FunctionOnSpace;
use crate::linalg::rank;
use crate::rational::{one, zero, Rational};
use crate::space::{SubsetMask, Transformation};

/// The 0/1 matrix of `U_T`: row `ω` has its single one in column `Tω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoopmanMatrix {
    columns: Vec<usize>,
}

impl KoopmanMatrix {
    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, column: usize) -> u8 {
        u8::from(self.columns[row] == column)
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.size()).map(|r| (0..self.size()).map(|c| self.entry(r, c)).collect()).collect()
    }

    /// Matrix-vector product, equal to `f ∘ T`.
    pub fn apply(&self, f: &FunctionOnSpace) -> FunctionOnSpace {
        assert_eq!(f.width(), self.size());
        let values = (0..self.size())
            .map(|r| (0..self.size()).filter(|&c| self.entry(r, c) == 1).map(|c| f.get(c).clone()).sum())
            .collect();
        FunctionOnSpace::new(values).unwrap()
    }
}

pub fn koopman_matrix(map: &Transformation) -> KoopmanMatrix {
    KoopmanMatrix { columns: map.table().to_vec() }
}

/// Basis of `{f : f∘T = f on null_support(V)}` modulo equality on
/// `null_support(V)`: the indicators of the components of the functional
/// graph restricted to the support, ordered by least element.
///
/// The support is forward closed for invariant `V`, since
/// `V({Tω}) = V(T^{-1}{Tω}) ≥ V({ω})`.
pub fn invariant_function_basis(v: &UpperProb, map: &Transformation) -> Result<Vec<FunctionOnSpace>> {
    if !v.is_invariant_capacity(map) {
        return Err(Error::NotInvariantCapacity);
    }
    let support = v.null_support();
    Ok(support_components(map, support).into_iter().map(FunctionOnSpace::indicator).collect())
}

pub fn eigenvalue_one_multiplicity(v: &UpperProb, map: &Transformation) -> Result<usize> {
    invariant_function_basis(v, map).map(|basis| basis.len())
}

/// `dim ker(U_T − I)` on functions restricted to `null_support(V)`, computed
/// by rank rather than by graph components.
pub fn eigenspace_dimension(v: &UpperProb, map: &Transformation) -> Result<usize> {
    if !v.is_invariant_capacity(map) {
        return Err(Error::NotInvariantCapacity);
    }
    let support: Vec<usize> = v.null_support().points().collect();
    let column = |p: usize| support.iter().position(|&s| s == p).expect("support is forward closed");
    let rows: Vec<Vec<Rational>> = support
        .iter()
        .map(|&p| {
            let mut row = vec![zero(); support.len()];
            row[column(map.apply(p))] += one();
            row[column(p)] -= one();
            row
        })
        .collect();
    Ok(support.len() - rank(rows, support.len()))
}

fn support_components(map: &Transformation, support: SubsetMask) -> Vec<SubsetMask> {
    let width = map.size();
    let mut parent: Vec<usize> = (0..width).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in support.points() {
        let (a, b) = (find(&mut parent, p), find(&mut parent, map.apply(p)));
        parent[a.max(b)] = a.min(b);
    }
    let mut cells: Vec<SubsetMask> = Vec::new();
    for p in support.points() {
        let root = find(&mut parent, p);
        let point = SubsetMask::singleton(width, p);
        match cells.iter_mut().find(|c| c.min_point() == Some(root)) {
            Some(cell) => *cell = cell.union(&point),
            None => cells.push(point),
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Prob;
    use crate::rational::rat;

    fn prob(values: &[(i64, i64)]) -> Prob {
        Prob::new(values.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn set(width: usize, points: &[usize]) -> SubsetMask {
        SubsetMask::from_points(width, points.iter().copied()).unwrap()
    }

    #[test]
    fn matrices() {
        let id = koopman_matrix(&Transformation::identity(3).unwrap());
        assert_eq!(id.rows(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(koopman_matrix(&Transformation::new(vec![1, 0]).unwrap()).rows(), vec![vec![0, 1], vec![1, 0]]);
        let shift = koopman_matrix(&Transformation::new(vec![1, 2, 3, 0]).unwrap());
        assert_eq!(shift.rows()[3], vec![1, 0, 0, 0]);
        let map = Transformation::new(vec![1, 2, 3, 0]).unwrap();
        let f = FunctionOnSpace::new(vec![rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 5)]).unwrap();
        assert_eq!(shift.apply(&f), f.compose(&map));
    }

    #[test]
    fn bases() {
        let map = Transformation::new(vec![1, 0, 3, 2]).unwrap();
        let q1 = prob(&[(1, 2), (1, 2), (0, 1), (0, 1)]);
        let q2 = prob(&[(0, 1), (0, 1), (1, 2), (1, 2)]);
        let v = UpperProb::envelope(vec![q1.clone(), q2.clone()]).unwrap();
        assert_eq!(
            invariant_function_basis(&v, &map).unwrap(),
            vec![FunctionOnSpace::indicator(set(4, &[0, 1])), FunctionOnSpace::indicator(set(4, &[2, 3]))]
        );
        assert_eq!(eigenvalue_one_multiplicity(&v, &map).unwrap(), 2);
        assert_eq!(eigenspace_dimension(&v, &map).unwrap(), 2);

        let alone = UpperProb::from_prob(q1.clone());
        assert_eq!(
            invariant_function_basis(&alone, &map).unwrap(),
            vec![FunctionOnSpace::indicator(set(4, &[0, 1]))]
        );

        let cycle = Transformation::new(vec![1, 2, 3, 0]).unwrap();
        let uniform = UpperProb::from_prob(prob(&[(1, 4), (1, 4), (1, 4), (1, 4)]));
        assert_eq!(eigenvalue_one_multiplicity(&uniform, &cycle).unwrap(), 1);

        let mixed = Prob::mixture(&[rat(3, 4), rat(1, 4)], &[q1.clone(), q2]);
        let lopsided = UpperProb::envelope(vec![q1, mixed]).unwrap();
        assert_eq!(eigenvalue_one_multiplicity(&lopsided, &map).unwrap(), 2);
    }

    #[test]
    fn transient_points_are_ignored() {
        // 2 → 0 is transient, so V({2}) = 0 and the tree collapses.
        let map = Transformation::new(vec![0, 1, 0]).unwrap();
        let v = UpperProb::envelope(vec![Prob::point_mass(3, 0), Prob::point_mass(3, 1)]).unwrap();
        assert!(v.is_invariant_capacity(&map));
        let basis = invariant_function_basis(&v, &map).unwrap();
        assert_eq!(basis, vec![FunctionOnSpace::indicator(set(3, &[0])), FunctionOnSpace::indicator(set(3, &[1]))]);
        for b in &basis {
            assert!(b.compose(&map).agrees_on(b, v.null_support()));
        }
        assert_eq!(eigenspace_dimension(&v, &map).unwrap(), 2);
    }

    #[test]
    fn rejects_non_invariant_capacity() {
        let map = Transformation::new(vec![1, 0]).unwrap();
        let v = UpperProb::from_prob(Prob::point_mass(2, 0));
        assert_eq!(eigenvalue_one_multiplicity(&v, &map), Err(Error::NotInvariantCapacity));
    }
}
