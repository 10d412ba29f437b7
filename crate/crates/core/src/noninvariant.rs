//! Ergodic theory for a probability that is not invariant under an
//! invertible map: the irreducible invariant partition, the Cesàro limits
//! `Q_j`, the window capacities `V_j` and the resulting law of large numbers.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::birkhoff::{birkhoff_limit, correlation_limit, IndependenceCheck};
use crate::capacity::UpperProb;
use crate::error::{Error, Result};
use crate::fec::{fec_decompose, is_fz_ergodic, zero_one_condition};
use crate::function::FunctionOnSpace;
use crate::measure::{cesaro_limit, is_ergodic, pushforward, Prob};
use crate::rational::{int, zero, Rational};
use crate::space::{subsets, Partition, SubsetMask, Transformation};

/// A probability together with an invertible map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoninvariantSystem {
    prob: Prob,
    map: Transformation,
}

impl NoninvariantSystem {
    pub fn new(prob: Prob, map: Transformation) -> Result<Self> {
        assert_eq!(prob.width(), map.size(), "probability width differs from the map");
        if !map.is_invertible() {
            return Err(Error::NotInvertible);
        }
        Ok(Self { prob, map })
    }

    pub fn prob(&self) -> &Prob {
        &self.prob
    }

    pub fn map(&self) -> &Transformation {
        &self.map
    }
}

/// `{P(A) : A ∈ 𝓘}` in increasing order.
pub fn invariant_value_set(prob: &Prob, map: &Transformation) -> Vec<Rational> {
    let values: BTreeSet<Rational> = map.invariant_sets().into_iter().map(|a| prob.measure(a)).collect();
    values.into_iter().collect()
}

/// The irreducible invariant partition with its derived measures and
/// capacities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreduciblePartition {
    /// Invariant cells of positive mass with no invariant subset of
    /// intermediate mass.
    pub cells: Partition,
    /// `P_j = P(· ∩ A_j) / P(A_j)`.
    pub conditionals: Vec<Prob>,
    /// `Q_j`, the Cesàro limit of `P_j ∘ T^{-i}`.
    pub limits: Vec<Prob>,
    /// `V_j`, the supremum of the window averages of `P_j ∘ T^{-i}`.
    pub capacities: Vec<UpperProb>,
    /// `V = max_j V_j`.
    pub capacity: UpperProb,
}

/// Greedy extraction of minimal invariant sets of positive mass, taken in
/// order of least element; null invariant leftovers join the last cell.
pub fn irreducible_partition(system: &NoninvariantSystem) -> Result<IrreduciblePartition> {
    let (prob, map) = (&system.prob, &system.map);
    let components = map.components();
    let (positive, null): (Vec<SubsetMask>, Vec<SubsetMask>) =
        components.cells().iter().partition(|c| !prob.measure(**c).is_zero());
    let mut cells = positive;
    let leftover = null.iter().fold(SubsetMask::empty(map.size()), |acc, c| acc.union(c));
    let last = cells.last_mut().expect("a probability charges some component");
    *last = last.union(&leftover);
    let cells = Partition::new(cells)?;

    let conditionals: Vec<Prob> = cells.cells().iter().map(|c| prob.conditional(*c).unwrap()).collect();
    let limits = conditionals.iter().map(|p| q_limit(p, map)).collect();
    let capacities: Vec<UpperProb> = conditionals.iter().map(|p| v_component(p, map)).collect();
    let capacity = UpperProb::envelope(capacities.iter().flat_map(|v| v.generators().iter().cloned()).collect())?;
    Ok(IrreduciblePartition { cells, conditionals, limits, capacities, capacity })
}

/// `Q_j = (1/L) Σ_{i<L} P_j ∘ T^{-i}`.
pub fn q_limit(conditional: &Prob, map: &Transformation) -> Prob {
    cesaro_limit(conditional, map)
}

/// `V_j(A) = sup_{windows} (1/|W|) Σ_{i∈W} P_j(T^{-i}A)`.
///
/// The sequence `i ↦ P_j ∘ T^{-i}` has period `L`. A window of length
/// `qL + r` averages `q` full periods with one window of length `r`, so its
/// average lies between the period mean and the short window's. The
/// supremum is therefore the envelope of the period mean and the averages
/// of the windows of length below `L`.
pub fn v_component(conditional: &Prob, map: &Transformation) -> UpperProb {
    let period = map.period();
    let orbit: Vec<Prob> = {
        let mut orbit = Vec::with_capacity(2 * period);
        let mut current = conditional.clone();
        for _ in 0..2 * period {
            let next = pushforward(&current, map);
            orbit.push(current);
            current = next;
        }
        orbit
    };
    let mut generators = vec![cesaro_limit(conditional, map)];
    for start in 0..period {
        for len in 1..period {
            let weights = vec![Rational::new(1.into(), (len as i64).into()); len];
            generators.push(Prob::mixture(&weights, &orbit[start..start + len]));
        }
    }
    UpperProb::envelope(generators).unwrap()
}

/// Outcome of the four checks on the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionReport {
    /// Each `Q_j` is invariant, ergodic and carried by `A_j`.
    pub limits_ergodic: bool,
    /// Each `V_j` is invariant and FZ-ergodic.
    pub components_ergodic: bool,
    /// `V` has finite ergodic components.
    pub finite_ergodic_components: bool,
    /// `V(A) ∈ {0, 1}` for every invariant `A`.
    pub zero_one: bool,
}

impl ConstructionReport {
    pub fn all_pass(&self) -> bool {
        self.limits_ergodic && self.components_ergodic && self.finite_ergodic_components && self.zero_one
    }
}

pub fn verify_construction(system: &NoninvariantSystem) -> Result<ConstructionReport> {
    let partition = irreducible_partition(system)?;
    Ok(check_construction(&system.map, &partition, &partition.capacity))
}

/// The four checks for a given partition and combined capacity, so that
/// tampered inputs can be examined.
pub fn check_construction(map: &Transformation, partition: &IrreduciblePartition, v: &UpperProb) -> ConstructionReport {
    let limits_ergodic = partition
        .cells
        .cells()
        .iter()
        .zip(&partition.limits)
        .all(|(cell, q)| q.support().is_subset_of(cell) && is_ergodic(q, map).unwrap_or(false));
    let components_ergodic = partition.capacities.iter().all(|vj| is_fz_ergodic(vj, map).unwrap_or(false));
    let finite_ergodic_components = fec_decompose(v, map).is_ok();
    let zero_one = zero_one_condition(v, map).unwrap_or(false);
    ConstructionReport { limits_ergodic, components_ergodic, finite_ergodic_components, zero_one }
}

/// `Σ_j (∫ f dQ_j)·1_{A_j}` agrees with the Birkhoff limit of `f` at every
/// point of positive mass.
pub fn noninvariant_lln(system: &NoninvariantSystem, partition: &IrreduciblePartition, f: &FunctionOnSpace) -> bool {
    let mut expected = vec![zero(); f.width()];
    for (cell, q) in partition.cells.cells().iter().zip(&partition.limits) {
        let mean = q.integrate(f);
        for p in cell.points() {
            expected[p] = mean.clone();
        }
    }
    let expected = FunctionOnSpace::new(expected).unwrap();
    birkhoff_limit(&system.map, f).agrees_on(&expected, system.prob.support())
}

/// `lim (1/N) Σ_{i<N} P(B ∩ T^{-i}C)` against `Σ_j Q_j(C)·P(A_j ∩ B)`.
pub fn noninvariant_independence(
    system: &NoninvariantSystem,
    partition: &IrreduciblePartition,
    b: SubsetMask,
    c: SubsetMask,
) -> IndependenceCheck {
    let lhs = correlation_limit(&system.prob, &system.map, b, c);
    let rhs: Rational = partition
        .cells
        .cells()
        .iter()
        .zip(&partition.limits)
        .map(|(cell, q)| q.measure(c) * system.prob.measure(cell.intersection(&b)))
        .sum();
    IndependenceCheck { equal: lhs == rhs, order_sensitive: false, rhs_in_index_order: rhs.clone(), lhs, rhs }
}

/// `{∪_{i∈ℤ} T^{-i}A : A ⊆ Ω}` for an invertible map, sorted.
pub fn orbit_saturations(map: &Transformation) -> Result<Vec<SubsetMask>> {
    if !map.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let period = map.period();
    let saturated: BTreeSet<SubsetMask> = subsets(map.size())
        .map(|a| {
            let mut union = a;
            let mut current = a;
            for _ in 0..period {
                current = map.preimage(current);
                union = union.union(&current);
            }
            union
        })
        .collect();
    Ok(saturated.into_iter().collect())
}

/// `λ_{M,N}(A) = (1/(M+N+1)) Σ_{i=-M}^{N} P_j(T^{-i}A)`, read literally.
pub fn window_average(conditional: &Prob, map: &Transformation, a: SubsetMask, back: usize, forward: usize) -> Rational {
    let period = map.period();
    let total: Rational = (0..=back + forward)
        .map(|k| {
            // i = k - back, reduced into [0, L) so that T^{-i} is a forward preimage.
            let i = (k as i64 - back as i64).rem_euclid(period as i64) as usize;
            let mut set = a;
            for _ in 0..i {
                set = map.preimage(set);
            }
            conditional.measure(set)
        })
        .sum();
    total / int((back + forward + 1) as i64)
}
