//! Seeded random instances for property sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::UpperProb;
use crate::function::FunctionOnSpace;
use crate::measure::{pushforward, Prob};
use crate::rational::{int, Rational};
use crate::space::{SubsetMask, Transformation};

/// Reproducible generator of maps, probabilities, capacities and functions.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn size(&mut self, low: usize, high: usize) -> usize {
        self.rng.gen_range(low..=high)
    }

    pub fn map(&mut self, m: usize) -> Transformation {
        Transformation::new((0..m).map(|_| self.rng.gen_range(0..m)).collect()).unwrap()
    }

    pub fn permutation(&mut self, m: usize) -> Transformation {
        let mut table: Vec<usize> = (0..m).collect();
        table.shuffle(&mut self.rng);
        Transformation::new(table).unwrap()
    }

    pub fn subset(&mut self, m: usize) -> SubsetMask {
        SubsetMask::new(self.rng.gen_range(0..1u32 << m), m).unwrap()
    }

    /// A probability with small integer weights on a random nonempty part of
    /// `within`.
    pub fn prob_on(&mut self, within: SubsetMask) -> Prob {
        let points: Vec<usize> = within.points().collect();
        let mut weights = vec![0i64; within.width()];
        loop {
            for &p in &points {
                weights[p] = if self.rng.gen_bool(0.6) { self.rng.gen_range(1..=4) } else { 0 };
            }
            if weights.iter().any(|&w| w > 0) {
                break;
            }
        }
        let total: i64 = weights.iter().sum();
        Prob::new(weights.iter().map(|&w| Rational::new(w.into(), total.into())).collect()).unwrap()
    }

    pub fn prob(&mut self, m: usize) -> Prob {
        self.prob_on(SubsetMask::full(m))
    }

    /// An invariant upper probability for `map`: the envelope of the tail
    /// orbits `T_*^m P, …, T_*^{m+L−1} P` of up to four random seeds. About
    /// half of the seeds live on a single component.
    pub fn invariant_upper(&mut self, map: &Transformation) -> UpperProb {
        let m = map.size();
        let components = map.components();
        let count = self.rng.gen_range(1..=4);
        let seeds = (0..count)
            .map(|_| {
                if self.rng.gen_bool(0.5) {
                    let cell = components.cells()[self.rng.gen_range(0..components.len())];
                    self.prob_on(cell)
                } else {
                    self.prob(m)
                }
            })
            .collect();
        invariant_envelope(map, seeds)
    }

    /// A map on `low..=high` points with an invariant upper probability.
    pub fn system(&mut self, low: usize, high: usize) -> (Transformation, UpperProb) {
        let m = self.size(low, high);
        let map = self.map(m);
        let v = self.invariant_upper(&map);
        (map, v)
    }

    /// Values in `{-3, …, 3} / {1, 2, 3}`.
    pub fn function(&mut self, m: usize) -> FunctionOnSpace {
        let values = (0..m)
            .map(|_| Rational::new(self.rng.gen_range(-3i64..=3).into(), self.rng.gen_range(1i64..=3).into()))
            .collect();
        FunctionOnSpace::new(values).unwrap()
    }

    /// Integer coefficients in `{-2, …, 2}` for a linear objective.
    pub fn objective(&mut self, m: usize) -> Vec<Rational> {
        (0..m).map(|_| int(self.rng.gen_range(-2..=2))).collect()
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }
}

/// The envelope of `T_*^m P, …, T_*^{m+L−1} P` over the seeds `P`. The
/// generator set is closed under `T_*`, so the envelope is invariant.
///
/// # Panics
///
/// If `seeds` is empty or a seed has the wrong width.
pub fn invariant_envelope(map: &Transformation, seeds: Vec<Prob>) -> UpperProb {
    let mut generators = Vec::new();
    for seed in seeds {
        let mut current = seed;
        for _ in 0..map.size() {
            current = pushforward(&current, map);
        }
        for _ in 0..map.period() {
            let next = pushforward(&current, map);
            generators.push(current);
            current = next;
        }
    }
    UpperProb::envelope(generators).expect("at least one seed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacities_are_invariant() {
        let mut gen = InstanceGenerator::new(7);
        for _ in 0..30 {
            let (map, v) = gen.system(1, 6);
            assert!(v.is_invariant_capacity(&map));
            assert!(v.is_upper_probability());
        }
    }

    #[test]
    fn reproducible() {
        let draw = |seed| {
            let mut gen = InstanceGenerator::new(seed);
            let (map, v) = gen.system(2, 6);
            (map, v.table().to_vec(), gen.function(3))
        };
        assert_eq!(draw(3), draw(3));
    }

    #[test]
    fn permutations_are_invertible() {
        let mut gen = InstanceGenerator::new(1);
        for m in 1..8 {
            assert!(gen.permutation(m).is_invertible());
        }
    }
}
