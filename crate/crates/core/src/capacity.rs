//! Upper probabilities as exact value tables over the power set.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::function::FunctionOnSpace;
use crate::measure::{pushforward, Prob};
use crate::polytope::Polytope;
use crate::rational::{int, one, zero, Rational};
use crate::space::{subsets, FiniteSpace, SubsetMask, Transformation};

/// An upper probability `V`, stored as its value on every subset.
///
/// `V(A) = max_i P_i(A)` over the generators, so `V` is the upper envelope of
/// its core. The table is indexed by [`SubsetMask::index`].
pub struct UpperProb {
    width: usize,
    table: Vec<Rational>,
    generators: Vec<Prob>,
    core: OnceLock<Vec<Prob>>,
}

impl UpperProb {
    /// Upper envelope of a nonempty family of probabilities.
    pub fn envelope(generators: Vec<Prob>) -> Result<Self> {
        let first = generators.first().ok_or(Error::EmptyGenerators)?;
        let width = first.width();
        assert!(generators.iter().all(|g| g.width() == width), "generators of different widths");
        let table = subsets(width)
            .map(|a| generators.iter().map(|g| g.measure(a)).max().unwrap())
            .collect();
        let mut generators = generators;
        generators.sort();
        generators.dedup();
        Ok(Self { width, table, generators, core: OnceLock::new() })
    }

    /// A single probability viewed as an upper probability.
    pub fn from_prob(prob: Prob) -> Self {
        Self::envelope(vec![prob]).unwrap()
    }

    /// Builds `V` from a value table and checks that it is an upper
    /// probability, i.e. the envelope of its own core.
    pub fn from_table(width: usize, table: Vec<Rational>) -> Result<Self> {
        FiniteSpace::new(width)?;
        if table.len() != 1 << width {
            return Err(Error::NotAProbability(format!(
                "a capacity on {width} points needs {} values, got {}",
                1usize << width,
                table.len()
            )));
        }
        let candidate = Self { width, table, generators: Vec::new(), core: OnceLock::new() };
        let vertices = candidate.core_vertices().to_vec();
        let envelope = Self::envelope(vertices).map_err(|_| {
            Error::NotAProbability("the table has an empty core, so it is not an upper probability".into())
        })?;
        if envelope.table != candidate.table {
            let witness = subsets(width).find(|a| envelope.value(*a) != candidate.value(*a)).unwrap();
            return Err(Error::NotAProbability(format!(
                "the table is not the envelope of its core at {witness}"
            )));
        }
        Ok(envelope)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `V(A)`.
    pub fn value(&self, set: SubsetMask) -> &Rational {
        assert_eq!(set.width(), self.width, "subset width differs from the capacity");
        &self.table[set.index()]
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    /// Distinct generators in sorted order.
    pub fn generators(&self) -> &[Prob] {
        &self.generators
    }

    /// `P(A) ≤ V(A)` for every subset `A`.
    pub fn core_contains(&self, prob: &Prob) -> bool {
        assert_eq!(prob.width(), self.width);
        subsets(self.width).all(|a| &prob.measure(a) <= self.value(a))
    }

    /// Extreme points of `core(V)`, sorted and deduplicated.
    pub fn core_vertices(&self) -> &[Prob] {
        self.core.get_or_init(|| vertices_to_probs(self.core_polytope().vertices()))
    }

    /// Core vertices carried by `set`. Since `P(set^c) ≥ 0` is valid on the
    /// core, these are exactly the vertices of the face
    /// `{P ∈ core(V) : P(set) = 1}`.
    pub fn core_vertices_within(&self, set: SubsetMask) -> Vec<Prob> {
        self.core_vertices().iter().filter(|p| p.support().is_subset_of(&set)).cloned().collect()
    }

    /// Extreme points of `core(V) ∩ 𝓜(T)`.
    pub fn invariant_core_vertices(&self, map: &Transformation) -> Vec<Prob> {
        assert_eq!(map.size(), self.width);
        let mut polytope = self.core_polytope();
        for target in 0..self.width {
            let mut row = vec![zero(); self.width];
            for source in 0..self.width {
                if map.apply(source) == target {
                    row[source] += one();
                }
            }
            row[target] -= one();
            polytope.equal(row, zero());
        }
        vertices_to_probs(polytope.vertices())
    }

    fn core_polytope(&self) -> Polytope {
        let mut polytope = Polytope::new(self.width);
        polytope.equal(vec![one(); self.width], one());
        for p in 0..self.width {
            let mut row = vec![zero(); self.width];
            row[p] = int(-1);
            polytope.at_most(row, zero());
        }
        for a in subsets(self.width).filter(|a| !a.is_empty() && !a.is_full()) {
            let row = (0..self.width).map(|p| if a.contains(p) { one() } else { zero() }).collect();
            polytope.at_most(row, self.value(a).clone());
        }
        polytope
    }

    /// Choquet integral `∫ f dV` via the sorted telescoping sum
    /// `Σ_j (v_j − v_{j+1})·V({f ≥ v_j}) + v_k`.
    pub fn choquet_integral(&self, f: &FunctionOnSpace) -> Rational {
        assert_eq!(f.width(), self.width);
        let levels = f.distinct_values_desc();
        let mut total = levels.last().cloned().unwrap_or_else(zero);
        for pair in levels.windows(2) {
            total += (&pair[0] - &pair[1]) * self.value(f.level_set(&pair[0]));
        }
        total
    }

    /// `V(T^{-1}A) = V(A)` for every subset `A`.
    pub fn is_invariant_capacity(&self, map: &Transformation) -> bool {
        assert_eq!(map.size(), self.width);
        subsets(self.width).all(|a| self.value(map.preimage(a)) == self.value(a))
    }

    /// Points of positive singleton capacity. `V(A) = 0` iff `A` misses them.
    pub fn null_support(&self) -> SubsetMask {
        let points = (0..self.width).filter(|&p| !self.value(SubsetMask::singleton(self.width, p)).is_zero());
        SubsetMask::from_points(self.width, points).unwrap()
    }

    pub fn is_monotone(&self) -> bool {
        subsets(self.width).all(|a| {
            a.points().all(|p| self.value(a.difference(&SubsetMask::singleton(self.width, p))) <= self.value(a))
        })
    }

    /// `V(A ∪ B) ≤ V(A) + V(B)` for every pair of subsets.
    pub fn is_subadditive(&self) -> bool {
        subsets(self.width)
            .all(|a| subsets(self.width).all(|b| self.value(a.union(&b)) <= &(self.value(a) + self.value(b))))
    }

    /// Continuity at `∅` along decreasing sequences. Every decreasing
    /// sequence of subsets of a finite space is eventually constant, so this
    /// holds for every capacity with `V(∅) = 0`.
    pub fn is_continuous_at_empty(&self) -> bool {
        self.table[0].is_zero()
    }

    /// `V(∅) = 0`, `V(Ω) = 1`, monotone, and `V` is the envelope of its
    /// generators.
    pub fn is_upper_probability(&self) -> bool {
        self.table[0].is_zero()
            && self.table[self.table.len() - 1].is_one()
            && self.is_monotone()
            && self.is_continuous_at_empty()
            && !self.generators.is_empty()
            && subsets(self.width)
                .all(|a| self.generators.iter().map(|g| g.measure(a)).max().as_ref() == Some(self.value(a)))
    }

    /// The push-forward capacity `A ↦ V(T^{-1}A)`, the envelope of the
    /// pushed-forward generators.
    pub fn pushforward(&self, map: &Transformation) -> Self {
        Self::envelope(self.generators.iter().map(|g| pushforward(g, map)).collect()).unwrap()
    }
}

fn vertices_to_probs(vertices: Vec<Vec<Rational>>) -> Vec<Prob> {
    vertices.into_iter().map(Prob::from_mass_unchecked).collect()
}

impl Clone for UpperProb {
    fn clone(&self) -> Self {
        Self {
            width: self.width,
            table: self.table.clone(),
            generators: self.generators.clone(),
            core: self.core.clone(),
        }
    }
}

/// Two capacities are equal when their value tables agree.
impl PartialEq for UpperProb {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.table == other.table
    }
}

impl Eq for UpperProb {}

impl fmt::Debug for UpperProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UpperProb")
            .field("width", &self.width)
            .field("generators", &self.generators.len())
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn prob(values: &[(i64, i64)]) -> Prob {
        Prob::new(values.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn set(width: usize, points: &[usize]) -> SubsetMask {
        SubsetMask::from_points(width, points.iter().copied()).unwrap()
    }

    fn two_block() -> UpperProb {
        UpperProb::envelope(vec![
            prob(&[(1, 2), (1, 2), (0, 1), (0, 1)]),
            prob(&[(0, 1), (0, 1), (1, 2), (1, 2)]),
        ])
        .unwrap()
    }

    #[test]
    fn envelope_is_pointwise_max() {
        let v = UpperProb::envelope(vec![prob(&[(1, 2), (1, 2)]), prob(&[(1, 1), (0, 1)])]).unwrap();
        assert_eq!(v.value(set(2, &[0])), &int(1));
        assert_eq!(v.value(set(2, &[1])), &rat(1, 2));
        let w = two_block();
        assert_eq!(w.value(set(4, &[0, 1])), &int(1));
        assert_eq!(w.value(set(4, &[2, 3])), &int(1));
        assert_eq!(w.value(set(4, &[0])), &rat(1, 2));
        assert!(w.is_upper_probability());
        assert!(UpperProb::envelope(vec![]).is_err());
    }

    #[test]
    fn single_probability_is_its_own_envelope() {
        let p = prob(&[(1, 3), (2, 3)]);
        let v = UpperProb::from_prob(p.clone());
        for a in subsets(2) {
            assert_eq!(v.value(a), &p.measure(a));
        }
        assert_eq!(v.core_vertices(), &[p]);
    }

    #[test]
    fn core_membership() {
        let v = two_block();
        assert!(v.core_contains(&prob(&[(1, 4), (1, 4), (1, 4), (1, 4)])));
        assert!(!v.core_contains(&prob(&[(1, 1), (0, 1), (0, 1), (0, 1)])));
        for g in v.generators() {
            assert!(v.core_contains(g));
        }
    }

    #[test]
    fn core_vertices_of_small_examples() {
        let v = UpperProb::envelope(vec![prob(&[(1, 2), (1, 2)]), prob(&[(1, 1), (0, 1)])]).unwrap();
        assert_eq!(v.core_vertices(), &[prob(&[(1, 2), (1, 2)]), prob(&[(1, 1), (0, 1)])]);

        // Singleton and cross-block pair bounds force the core onto the
        // segment {(a, a, b, b) : a + b = 1/2}.
        let w = two_block();
        let vertices = w.core_vertices();
        assert_eq!(vertices, w.generators());
        for a in subsets(4) {
            assert_eq!(vertices.iter().map(|p| p.measure(a)).max().as_ref(), Some(w.value(a)));
        }
    }

    #[test]
    fn invariant_core_vertices_of_two_block_system() {
        let map = Transformation::new(vec![1, 0, 3, 2]).unwrap();
        let v = two_block();
        assert_eq!(v.invariant_core_vertices(&map), v.generators().to_vec());
        let p = prob(&[(1, 3), (2, 3), (0, 1), (0, 1)]);
        assert!(UpperProb::from_prob(p).invariant_core_vertices(&map).is_empty());
    }

    #[test]
    fn choquet_examples() {
        let v = UpperProb::envelope(vec![prob(&[(1, 2), (1, 2)]), prob(&[(1, 1), (0, 1)])]).unwrap();
        assert_eq!(v.choquet_integral(&FunctionOnSpace::new(vec![int(1), int(0)]).unwrap()), int(1));
        assert_eq!(v.choquet_integral(&FunctionOnSpace::new(vec![int(0), int(1)]).unwrap()), rat(1, 2));
        let w = two_block();
        let f = FunctionOnSpace::new(vec![int(1), int(1), rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(w.choquet_integral(&f), int(1));
        for a in subsets(4) {
            assert_eq!(&w.choquet_integral(&FunctionOnSpace::indicator(a)), w.value(a));
        }
    }

    #[test]
    fn invariance_and_null_support() {
        let map = Transformation::new(vec![1, 0, 3, 2]).unwrap();
        assert!(two_block().is_invariant_capacity(&map));
        assert!(two_block().is_invariant_capacity(&Transformation::identity(4).unwrap()));
        assert!(!UpperProb::from_prob(prob(&[(1, 1), (0, 1), (0, 1), (0, 1)])).is_invariant_capacity(&map));
        assert!(two_block().null_support().is_full());
        assert_eq!(UpperProb::from_prob(Prob::point_mass(2, 0)).null_support(), set(2, &[0]));
        assert_eq!(
            UpperProb::from_prob(prob(&[(1, 2), (1, 2), (0, 1), (0, 1)])).null_support(),
            set(4, &[0, 1])
        );
    }

    #[test]
    fn structural_checks() {
        let v = two_block();
        assert!(v.is_monotone());
        assert!(v.is_subadditive());
        assert!(v.is_continuous_at_empty());
    }

    #[test]
    fn from_table_accepts_envelopes_only() {
        let v = two_block();
        let rebuilt = UpperProb::from_table(4, v.table().to_vec()).unwrap();
        assert_eq!(rebuilt, v);
        // Raising one value breaks coherence with the core.
        let mut table = v.table().to_vec();
        table[set(4, &[0]).index()] = rat(3, 4);
        assert!(UpperProb::from_table(4, table).is_err());
        assert!(UpperProb::from_table(2, vec![zero(), int(2), int(2), int(1)]).is_err());
    }
}
