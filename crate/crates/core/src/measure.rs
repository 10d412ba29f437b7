//! Exact probabilities on a finite space and the classical invariant-measure
//! toolkit: push-forwards, invariance, ergodicity, Cesàro limits, invariant
//! skeletons and the invariant Lebesgue decomposition.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::function::FunctionOnSpace;
use crate::rational::{int, zero, Rational};
use crate::space::{FiniteSpace, SubsetMask, Transformation};

/// A probability on `Ω`: nonnegative exact masses summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prob {
    mass: Vec<Rational>,
}

impl Prob {
    pub fn new(mass: Vec<Rational>) -> Result<Self> {
        FiniteSpace::new(mass.len())?;
        if let Some((p, m)) = mass.iter().enumerate().find(|(_, m)| m < &&zero()) {
            return Err(Error::NotAProbability(format!("negative mass {m} at point {p}")));
        }
        let total: Rational = mass.iter().sum();
        if !total.is_one() {
            return Err(Error::NotAProbability(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { mass })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_mass_unchecked(mass: Vec<Rational>) -> Self {
        debug_assert!(mass.iter().all(|m| m >= &zero()) && mass.iter().sum::<Rational>().is_one());
        Self { mass }
    }

    pub fn point_mass(width: usize, point: usize) -> Self {
        Self::uniform_on(SubsetMask::singleton(width, point)).unwrap()
    }

    pub fn uniform_on(set: SubsetMask) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::NotAProbability("uniform distribution on the empty set".into()));
        }
        let weight = Rational::new(1.into(), (set.len() as i64).into());
        Ok(Self {
            mass: (0..set.width()).map(|p| if set.contains(p) { weight.clone() } else { zero() }).collect(),
        })
    }

    /// Convex combination `Σ weights[i]·probs[i]`.
    ///
    /// # Panics
    /// If weights are negative, do not sum to one, or widths differ.
    pub fn mixture(weights: &[Rational], probs: &[Prob]) -> Self {
        assert_eq!(weights.len(), probs.len());
        assert!(weights.iter().all(|w| w >= &zero()), "negative mixture weight");
        assert!(weights.iter().sum::<Rational>().is_one(), "mixture weights must sum to one");
        let width = probs[0].width();
        let mass = (0..width)
            .map(|p| weights.iter().zip(probs).map(|(w, q)| w * &q.mass[p]).sum())
            .collect();
        Self { mass }
    }

    pub fn mass(&self) -> &[Rational] {
        &self.mass
    }

    pub fn width(&self) -> usize {
        self.mass.len()
    }

    pub fn get(&self, point: usize) -> &Rational {
        &self.mass[point]
    }

    /// `P(A)`.
    pub fn measure(&self, set: SubsetMask) -> Rational {
        assert_eq!(set.width(), self.width(), "subset width differs from the probability");
        set.points().map(|p| &self.mass[p]).sum()
    }

    pub fn support(&self) -> SubsetMask {
        SubsetMask::from_points(self.width(), (0..self.width()).filter(|&p| !self.mass[p].is_zero())).unwrap()
    }

    /// `∫ f dP`.
    pub fn integrate(&self, f: &FunctionOnSpace) -> Rational {
        assert_eq!(f.width(), self.width());
        self.mass.iter().zip(f.values()).map(|(m, v)| m * v).sum()
    }

    /// `P(· ∩ A) / P(A)`, or `None` when `P(A) = 0`.
    pub fn conditional(&self, set: SubsetMask) -> Option<Self> {
        let total = self.measure(set);
        if total.is_zero() {
            return None;
        }
        let mass = (0..self.width())
            .map(|p| if set.contains(p) { &self.mass[p] / &total } else { zero() })
            .collect();
        Some(Self { mass })
    }
}

/// `P ∘ T^{-1}`: `Q[ω'] = Σ_{Tω = ω'} P[ω]`.
pub fn pushforward(prob: &Prob, map: &Transformation) -> Prob {
    assert_eq!(prob.width(), map.size(), "probability width differs from the map");
    let mut mass = vec![zero(); prob.width()];
    for (p, m) in prob.mass.iter().enumerate() {
        mass[map.apply(p)] += m;
    }
    Prob { mass }
}

pub fn is_invariant(prob: &Prob, map: &Transformation) -> bool {
    &pushforward(prob, map) == prob
}

/// Invariant and `P(A) ∈ {0, 1}` on every invariant set.
pub fn is_ergodic(prob: &Prob, map: &Transformation) -> Result<bool> {
    if !is_invariant(prob, map) {
        return Err(Error::NotInvariantProbability);
    }
    Ok(map.invariant_sets().into_iter().all(|a| {
        let value = prob.measure(a);
        value.is_zero() || value.is_one()
    }))
}

/// The ergodic invariant probabilities of a finite map: the uniform
/// distributions on its cycles, in component order.
pub fn ergodic_probabilities(map: &Transformation) -> Vec<Prob> {
    map.cycles().iter().map(|c| Prob::uniform_on(c.mask).unwrap()).collect()
}

/// `P, P∘T^{-1}, P∘T^{-2}, …` for `count` terms.
pub fn pushforward_orbit(prob: &Prob, map: &Transformation, count: usize) -> Vec<Prob> {
    let mut orbit = Vec::with_capacity(count);
    let mut current = prob.clone();
    for _ in 0..count {
        let next = pushforward(&current, map);
        orbit.push(current);
        current = next;
    }
    orbit
}

/// Exact `lim (1/N) Σ_{i<N} P∘T^{-i}`.
///
/// The push-forward sequence is periodic from index `m` on with a period
/// dividing the lcm of the cycle lengths, so the limit is the mean of one
/// period of that tail.
pub fn cesaro_limit(prob: &Prob, map: &Transformation) -> Prob {
    let m = map.size();
    let period = map.period();
    let orbit = pushforward_orbit(prob, map, m + period);
    let tail = &orbit[m..];
    let scale = int(period as i64);
    let mass = (0..m).map(|p| tail.iter().map(|q| &q.mass[p]).sum::<Rational>() / &scale).collect();
    Prob { mass }
}

/// The unique invariant probability that agrees with `P` on every invariant
/// set: each component's mass spread uniformly over the cycle inside it.
pub fn invariant_skeleton(prob: &Prob, map: &Transformation) -> Result<Prob> {
    assert_eq!(prob.width(), map.size());
    let m = map.size();
    let mut mass = vec![zero(); m];
    for (component, cycle) in map.components().cells().iter().zip(map.cycles()) {
        let share = prob.measure(*component) / int(cycle.len() as i64);
        for &p in &cycle.points {
            mass[p] = share.clone();
        }
    }
    let skeleton = Prob { mass };
    if !is_invariant(&skeleton, map) {
        return Err(Error::Internal("invariant skeleton is not invariant".into()));
    }
    if let Some(a) = map.invariant_sets().into_iter().find(|&a| skeleton.measure(a) != prob.measure(a)) {
        return Err(Error::Internal(format!("invariant skeleton differs from the input on {a}")));
    }
    Ok(skeleton)
}

/// `P ≪ Q`: the support of `P` lies inside the support of `Q`.
pub fn abs_continuous(p: &Prob, q: &Prob) -> bool {
    p.support().is_subset_of(&q.support())
}

/// `P ⊥ Q`: disjoint supports.
pub fn singular(p: &Prob, q: &Prob) -> bool {
    p.support().is_disjoint(&q.support())
}

/// `P = k·Pa + l·Ps` with `Pa ≪ R`, `Ps ⊥ R`, both invariant.
///
/// The boundary cases `k = 0` and `l = 0` are allowed; the corresponding
/// part is then absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LebesgueDecomposition {
    pub k: Rational,
    pub absolutely_continuous: Option<Prob>,
    pub l: Rational,
    pub singular: Option<Prob>,
}

/// Invariant Lebesgue decomposition of `P` with respect to `R` for an
/// invertible map. The split set is the union of the components whose cycle
/// meets the support of `R`.
pub fn lebesgue_decomposition_invariant(
    prob: &Prob,
    reference: &Prob,
    map: &Transformation,
) -> Result<LebesgueDecomposition> {
    if !map.is_invertible() {
        return Err(Error::NotInvertible);
    }
    if !is_invariant(prob, map) || !is_invariant(reference, map) {
        return Err(Error::NotInvariantProbability);
    }
    let support = reference.support();
    let split = map
        .components()
        .cells()
        .iter()
        .zip(map.cycles())
        .filter(|(_, cycle)| !cycle.mask.is_disjoint(&support))
        .fold(SubsetMask::empty(map.size()), |acc, (cell, _)| acc.union(cell));
    let k = prob.measure(split);
    let l = prob.measure(split.complement());
    Ok(LebesgueDecomposition {
        absolutely_continuous: prob.conditional(split),
        singular: prob.conditional(split.complement()),
        k,
        l,
    })
}
