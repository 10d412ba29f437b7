//! Finite ergodic components: the zero-one condition, extraction of the
//! invariant partition, component capacities and the decomposition of
//! invariant core probabilities.

use num_traits::{One, Zero};

use crate::capacity::UpperProb;
use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::{ergodic_probabilities, is_invariant, lebesgue_decomposition_invariant, singular, Prob};
use crate::rational::{zero, Rational};
use crate::space::{Partition, SubsetMask, Transformation};

/// A decomposition of `V` into finitely many ergodic components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FecResult {
    partition: Partition,
    components: Vec<UpperProb>,
    ergodic_measures: Vec<Prob>,
}

impl FecResult {
    /// Assembles a result from its parts without checking them; used to build
    /// negative controls. [`fec_decompose`] is the checked constructor.
    pub fn from_parts(partition: Partition, components: Vec<UpperProb>, ergodic_measures: Vec<Prob>) -> Self {
        assert_eq!(partition.len(), components.len());
        assert_eq!(partition.len(), ergodic_measures.len());
        Self { partition, components, ergodic_measures }
    }

    /// The invariant cells `A_1, …, A_n`.
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn cells(&self) -> &[SubsetMask] {
        self.partition.cells()
    }

    /// The component capacities `V_i`.
    pub fn components(&self) -> &[UpperProb] {
        &self.components
    }

    /// The ergodic core measures `Q_i`, with `Q_i(A_i) = 1`.
    pub fn ergodic_measures(&self) -> &[Prob] {
        &self.ergodic_measures
    }

    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }
}

fn require_invariant(v: &UpperProb, map: &Transformation) -> Result<()> {
    if v.is_invariant_capacity(map) {
        Ok(())
    } else {
        Err(Error::NotInvariantCapacity)
    }
}

/// `V(A) = 0` or `V(A^c) = 0` for every invariant `A`.
pub fn is_fz_ergodic(v: &UpperProb, map: &Transformation) -> Result<bool> {
    require_invariant(v, map)?;
    Ok(map
        .invariant_sets()
        .into_iter()
        .all(|a| v.value(a).is_zero() || v.value(a.complement()).is_zero()))
}

/// `V(A) ∈ {0, 1}` for every invariant `A`.
pub fn zero_one_condition(v: &UpperProb, map: &Transformation) -> Result<bool> {
    require_invariant(v, map)?;
    Ok(zero_one_witness(v, map).is_none())
}

/// The least invariant set with capacity strictly between 0 and 1.
pub fn zero_one_witness(v: &UpperProb, map: &Transformation) -> Option<SubsetMask> {
    map.invariant_sets().into_iter().find(|a| {
        let value = v.value(*a);
        !value.is_zero() && !value.is_one()
    })
}

/// `V_i(A) = max{P(A) : P ∈ core(V), P(A_i) = 1}`.
pub fn component_capacity(v: &UpperProb, cell: SubsetMask) -> Result<UpperProb> {
    UpperProb::envelope(v.core_vertices_within(cell)).map_err(|_| Error::EmptyRestrictedCore(cell))
}

/// `A ↦ max{P(A) : P ∈ core(V), P ≪ R}`.
pub fn restricted_envelope(v: &UpperProb, reference: &Prob) -> Result<UpperProb> {
    let support = reference.support();
    UpperProb::envelope(v.core_vertices_within(support)).map_err(|_| Error::EmptyRestrictedCore(support))
}

/// Extracts the finite ergodic components of an invariant `V`.
///
/// Cells are the minimal invariant sets of capacity one, taken in order of
/// least element; a null invariant remainder is merged into the last cell.
/// Fails with [`Error::NotFec`] when some invariant set has capacity strictly
/// between 0 and 1.
pub fn fec_decompose(v: &UpperProb, map: &Transformation) -> Result<FecResult> {
    require_invariant(v, map)?;
    if let Some(witness) = zero_one_witness(v, map) {
        return Err(Error::NotFec { witness });
    }
    let components = map.components();
    let mut remaining: Vec<SubsetMask> = components.cells().to_vec();
    let mut cells: Vec<SubsetMask> = Vec::new();
    let union = |parts: &[SubsetMask]| parts.iter().fold(SubsetMask::empty(v.width()), |acc, c| acc.union(c));

    while !v.value(union(&remaining)).is_zero() {
        let cell = minimal_full_set(v, &remaining);
        remaining.retain(|c| !c.is_subset_of(&cell));
        cells.push(cell);
    }
    let leftover = union(&remaining);
    if !leftover.is_empty() {
        let last = cells.last_mut().expect("V(Ω) = 1 yields at least one cell");
        *last = last.union(&leftover);
    }

    let partition = Partition::new(cells)?;
    let mut capacities = Vec::with_capacity(partition.len());
    let mut measures = Vec::with_capacity(partition.len());
    for &cell in partition.cells() {
        let vi = component_capacity(v, cell)?;
        if !vi.is_invariant_capacity(map) {
            return Err(Error::Internal(format!("component capacity on {cell} is not invariant")));
        }
        if !is_fz_ergodic(&vi, map)? {
            return Err(Error::Internal(format!("component capacity on {cell} is not ergodic")));
        }
        let mut invariant = vi.invariant_core_vertices(map);
        if invariant.len() != 1 {
            return Err(Error::Internal(format!(
                "component capacity on {cell} has {} invariant core vertices",
                invariant.len()
            )));
        }
        measures.push(invariant.remove(0));
        capacities.push(vi);
    }
    Ok(FecResult { partition, components: capacities, ergodic_measures: measures })
}

/// A minimal-by-inclusion union of the given components with capacity one,
/// preferring the one with the least element.
fn minimal_full_set(v: &UpperProb, parts: &[SubsetMask]) -> SubsetMask {
    let width = v.width();
    let unions: Vec<SubsetMask> = (1u32..1 << parts.len())
        .map(|choice| {
            parts
                .iter()
                .enumerate()
                .filter(|(i, _)| choice >> i & 1 == 1)
                .fold(SubsetMask::empty(width), |acc, (_, c)| acc.union(c))
        })
        .filter(|u| v.value(*u).is_one())
        .collect();
    let mut minimal: Vec<SubsetMask> = unions
        .iter()
        .filter(|u| !unions.iter().any(|w| w != *u && w.is_subset_of(u)))
        .copied()
        .collect();
    minimal.sort_by_key(|u| (u.min_point(), u.bits()));
    minimal[0]
}

/// `𝓜^e(T) ∩ core(V)`: the cycle-uniform probabilities lying in the core.
pub fn ergodic_core_measures(v: &UpperProb, map: &Transformation) -> Vec<Prob> {
    ergodic_probabilities(map).into_iter().filter(|q| v.core_contains(q)).collect()
}

/// Weights of an invariant core probability over the ergodic components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// `α_i` paired with the `i`-th ergodic measure.
    pub coefficients: Vec<Rational>,
}

/// `P = Σ_j P(A_j)·Q_j` for `P ∈ core(V) ∩ 𝓜(T)`, checked exactly.
pub fn decompose_invariant(v: &UpperProb, map: &Transformation, fec: &FecResult, prob: &Prob) -> Result<Decomposition> {
    if !is_invariant(prob, map) {
        return Err(Error::NotInvariantProbability);
    }
    if !v.core_contains(prob) {
        return Err(Error::NotInCore);
    }
    let coefficients: Vec<Rational> = fec.cells().iter().map(|c| prob.measure(*c)).collect();
    if &Prob::mixture(&coefficients, fec.ergodic_measures()) != prob {
        return Err(Error::Internal("invariant core probability is not the mixture of its components".into()));
    }
    Ok(Decomposition { coefficients })
}

/// Every vertex of `core(V) ∩ 𝓜(T)` is a convex combination of the ergodic
/// core measures, and that combination is unique.
pub fn unique_vertex_decomposition(v: &UpperProb, map: &Transformation) -> bool {
    let ergodic = ergodic_core_measures(v, map);
    if ergodic.is_empty() {
        return false;
    }
    v.invariant_core_vertices(map).iter().all(|p| convex_weights(&ergodic, p).is_some())
}

/// Unique `α ≥ 0` with `Σ α_i = 1` and `Σ α_i q_i = p`, if any.
fn convex_weights(measures: &[Prob], target: &Prob) -> Option<Vec<Rational>> {
    let n = measures.len();
    let width = target.width();
    let mut rows: Vec<Vec<Rational>> = (0..width).map(|p| measures.iter().map(|q| q.get(p).clone()).collect()).collect();
    let mut rhs: Vec<Rational> = target.mass().to_vec();
    rows.push(vec![Rational::one(); n]);
    rhs.push(Rational::one());
    let solution = linalg::solve(&rows, &rhs, n)?;
    if !solution.basis.is_empty() || solution.particular.iter().any(|a| a < &zero()) {
        return None;
    }
    Some(solution.particular)
}

/// `ex(core(V) ∩ 𝓜(T)) = core(V) ∩ 𝓜^e(T) ≠ ∅`.
pub fn extreme_points_check(v: &UpperProb, map: &Transformation) -> bool {
    let vertices = v.invariant_core_vertices(map);
    let mut ergodic = ergodic_core_measures(v, map);
    ergodic.sort();
    !vertices.is_empty() && vertices == ergodic
}

/// `P = Σ_{i≤n} α_i Q_i + α_{n+1} Q_{n+1}` over the ergodic core measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullDecomposition {
    /// The ergodic core measures `Q_1, …, Q_n`.
    pub ergodic_measures: Vec<Prob>,
    /// `α_1, …, α_n`.
    pub coefficients: Vec<Rational>,
    /// `α_{n+1}`.
    pub residual_weight: Rational,
    /// `Q_{n+1}`, present when `α_{n+1} > 0`.
    pub residual: Option<Prob>,
    /// Whether `Q_{n+1}` lies in `core(V)`. This can fail: with `T` the
    /// identity on three points, `V` the envelope of `δ_0` and
    /// `(1/2, 1/4, 1/4)`, and `P = (1/2, 1/4, 1/4)`, the residual is
    /// `(0, 1/2, 1/2)` while `V({1}) = 1/4`.
    pub residual_in_core: bool,
}

/// Decomposes `P ∈ core(V) ∩ 𝓜(T)` against `R = (1/n)Σ Q_i`: the part
/// absolutely continuous with respect to `R` is split over the ergodic core
/// measures through the components of `A ↦ max{P(A) : P ∈ core(V), P ≪ R}`,
/// and the singular part is the residual.
pub fn full_decomposition(v: &UpperProb, map: &Transformation, prob: &Prob) -> Result<FullDecomposition> {
    if !map.is_invertible() {
        return Err(Error::NotInvertible);
    }
    require_invariant(v, map)?;
    if !is_invariant(prob, map) {
        return Err(Error::NotInvariantProbability);
    }
    if !v.core_contains(prob) {
        return Err(Error::NotInCore);
    }
    let ergodic = ergodic_core_measures(v, map);
    if ergodic.is_empty() {
        return Err(Error::NoErgodicCoreMeasures);
    }
    let n = ergodic.len();
    let reference = Prob::mixture(&vec![Rational::new(1.into(), (n as i64).into()); n], &ergodic);
    let split = lebesgue_decomposition_invariant(prob, &reference, map)?;

    let mut coefficients = vec![zero(); n];
    if let Some(absolutely_continuous) = &split.absolutely_continuous {
        let restricted = restricted_envelope(v, &reference)?;
        let fec = fec_decompose(&restricted, map)?;
        let local = decompose_invariant(&restricted, map, &fec, absolutely_continuous)?;
        for (q, alpha) in fec.ergodic_measures().iter().zip(&local.coefficients) {
            let i = ergodic
                .iter()
                .position(|e| e == q)
                .ok_or_else(|| Error::Internal("restricted component measure is not an ergodic core measure".into()))?;
            coefficients[i] = &split.k * alpha;
        }
    }

    let residual = split.singular.clone();
    let mut parts = ergodic.clone();
    let mut weights = coefficients.clone();
    if let Some(r) = &residual {
        if ergodic.iter().any(|q| !singular(q, r)) {
            return Err(Error::Internal("residual is not singular to the ergodic core measures".into()));
        }
        parts.push(r.clone());
        weights.push(split.l.clone());
    }
    if &Prob::mixture(&weights, &parts) != prob {
        return Err(Error::Internal("full decomposition does not reconstruct the probability".into()));
    }
    let residual_in_core = residual.as_ref().is_none_or(|r| v.core_contains(r));
    Ok(FullDecomposition {
        ergodic_measures: ergodic,
        coefficients,
        residual_weight: split.l,
        residual,
        residual_in_core,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::subsets;

    fn prob(values: &[(i64, i64)]) -> Prob {
        Prob::new(values.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn set(width: usize, points: &[usize]) -> SubsetMask {
        SubsetMask::from_points(width, points.iter().copied()).unwrap()
    }

    fn swap_pairs() -> Transformation {
        Transformation::new(vec![1, 0, 3, 2]).unwrap()
    }

    fn q1() -> Prob {
        prob(&[(1, 2), (1, 2), (0, 1), (0, 1)])
    }

    fn q2() -> Prob {
        prob(&[(0, 1), (0, 1), (1, 2), (1, 2)])
    }

    fn two_block() -> UpperProb {
        UpperProb::envelope(vec![q1(), q2()]).unwrap()
    }

    fn lopsided() -> UpperProb {
        let mixed = Prob::mixture(&[rat(3, 4), rat(1, 4)], &[q1(), q2()]);
        UpperProb::envelope(vec![q1(), mixed]).unwrap()
    }

    #[test]
    fn fz_ergodicity() {
        let cycle = Transformation::new(vec![1, 2, 3, 0]).unwrap();
        let uniform = UpperProb::from_prob(prob(&[(1, 4), (1, 4), (1, 4), (1, 4)]));
        assert!(is_fz_ergodic(&uniform, &cycle).unwrap());
        assert!(!is_fz_ergodic(&two_block(), &swap_pairs()).unwrap());
        assert!(is_fz_ergodic(&UpperProb::from_prob(q1()), &swap_pairs()).unwrap());
        let moving = UpperProb::from_prob(prob(&[(1, 1), (0, 1), (0, 1), (0, 1)]));
        assert_eq!(is_fz_ergodic(&moving, &swap_pairs()), Err(Error::NotInvariantCapacity));
    }

    #[test]
    fn zero_one() {
        assert!(zero_one_condition(&two_block(), &swap_pairs()).unwrap());
        assert!(!zero_one_condition(&lopsided(), &swap_pairs()).unwrap());
        assert_eq!(zero_one_witness(&lopsided(), &swap_pairs()), Some(set(4, &[2, 3])));
        assert!(zero_one_condition(&UpperProb::from_prob(q2()), &swap_pairs()).unwrap());
    }

    #[test]
    fn component_capacities() {
        let v1 = component_capacity(&two_block(), set(4, &[0, 1])).unwrap();
        assert_eq!(v1, UpperProb::from_prob(q1()));
        assert_eq!(v1.value(set(4, &[0])), &rat(1, 2));
        assert_eq!(v1.value(set(4, &[2, 3])), &zero());
        let p = prob(&[(1, 3), (2, 3), (0, 1), (0, 1)]);
        assert_eq!(component_capacity(&UpperProb::from_prob(p.clone()), set(4, &[0, 1])).unwrap(), UpperProb::from_prob(p));
        assert_eq!(
            component_capacity(&two_block(), set(4, &[0])),
            Err(Error::EmptyRestrictedCore(set(4, &[0])))
        );
    }

    #[test]
    fn decomposition_of_two_blocks() {
        let fec = fec_decompose(&two_block(), &swap_pairs()).unwrap();
        assert_eq!(fec.cells(), &[set(4, &[0, 1]), set(4, &[2, 3])]);
        assert_eq!(fec.ergodic_measures(), &[q1(), q2()]);

        let cycle = Transformation::new(vec![1, 2, 3, 0]).unwrap();
        let single = fec_decompose(&UpperProb::from_prob(prob(&[(1, 4), (1, 4), (1, 4), (1, 4)])), &cycle).unwrap();
        assert_eq!(single.cells(), &[SubsetMask::full(4)]);

        assert_eq!(
            fec_decompose(&lopsided(), &swap_pairs()),
            Err(Error::NotFec { witness: set(4, &[2, 3]) })
        );
    }

    #[test]
    fn null_remainder_is_folded_into_last_cell() {
        let fec = fec_decompose(&UpperProb::from_prob(q1()), &swap_pairs()).unwrap();
        assert_eq!(fec.cells(), &[SubsetMask::full(4)]);
        assert_eq!(fec.ergodic_measures(), &[q1()]);
    }

    #[test]
    fn cells_are_minimal() {
        let map = Transformation::identity(3).unwrap();
        let v = UpperProb::envelope(vec![Prob::point_mass(3, 0), Prob::point_mass(3, 2)]).unwrap();
        let fec = fec_decompose(&v, &map).unwrap();
        assert_eq!(fec.cells(), &[set(3, &[0]), set(3, &[1, 2])]);
        for (i, &cell) in fec.cells().iter().enumerate() {
            assert!(v.value(cell).is_one());
            for b in cell.subsets().filter(|b| map.is_invariant_set(*b) && v.value(*b).is_one()) {
                assert!(v.value(cell.difference(&b)).is_zero(), "cell {i}");
            }
        }
    }

    #[test]
    fn ergodic_core() {
        assert_eq!(ergodic_core_measures(&two_block(), &swap_pairs()), vec![q1(), q2()]);
        let uniform = UpperProb::from_prob(prob(&[(1, 4), (1, 4), (1, 4), (1, 4)]));
        assert!(ergodic_core_measures(&uniform, &swap_pairs()).is_empty());
        assert_eq!(ergodic_core_measures(&UpperProb::from_prob(q1()), &swap_pairs()), vec![q1()]);
    }

    #[test]
    fn invariant_decomposition() {
        let v = two_block();
        let fec = fec_decompose(&v, &swap_pairs()).unwrap();
        let cases = [
            (prob(&[(1, 4), (1, 4), (1, 4), (1, 4)]), vec![rat(1, 2), rat(1, 2)]),
            (q1(), vec![int(1), zero()]),
            (prob(&[(3, 8), (3, 8), (1, 8), (1, 8)]), vec![rat(3, 4), rat(1, 4)]),
        ];
        for (p, alpha) in cases {
            assert_eq!(decompose_invariant(&v, &swap_pairs(), &fec, &p).unwrap().coefficients, alpha);
        }
        let outside = prob(&[(1, 1), (0, 1), (0, 1), (0, 1)]);
        assert!(decompose_invariant(&v, &swap_pairs(), &fec, &outside).is_err());
    }

    #[test]
    fn extreme_points() {
        assert!(extreme_points_check(&two_block(), &swap_pairs()));
        let uniform = UpperProb::from_prob(prob(&[(1, 4), (1, 4), (1, 4), (1, 4)]));
        assert!(!extreme_points_check(&uniform, &swap_pairs()));
        assert!(extreme_points_check(&UpperProb::from_prob(q1()), &swap_pairs()));
        assert!(unique_vertex_decomposition(&two_block(), &swap_pairs()));
        assert!(!unique_vertex_decomposition(&uniform, &swap_pairs()));
        assert!(!unique_vertex_decomposition(&lopsided(), &swap_pairs()));
    }

    #[test]
    fn restricted_envelopes() {
        let v = two_block();
        assert_eq!(restricted_envelope(&v, &q1()).unwrap(), UpperProb::from_prob(q1()));
        assert_eq!(restricted_envelope(&v, &prob(&[(1, 4), (1, 4), (1, 4), (1, 4)])).unwrap(), v);
        assert!(matches!(
            restricted_envelope(&UpperProb::from_prob(q1()), &q2()),
            Err(Error::EmptyRestrictedCore(_))
        ));
    }

    #[test]
    fn full_decompositions() {
        let v = two_block();
        let d = full_decomposition(&v, &swap_pairs(), &q1()).unwrap();
        assert_eq!(d.coefficients, vec![int(1), zero()]);
        assert_eq!(d.residual, None);
        let half = Prob::mixture(&[rat(1, 2), rat(1, 2)], &[q1(), q2()]);
        let d = full_decomposition(&v, &swap_pairs(), &half).unwrap();
        assert_eq!(d.coefficients, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(d.residual_weight, zero());

        // Three 2-cycles; the third block is only reachable through a mixture.
        let map = Transformation::new(vec![1, 0, 3, 2, 5, 4]).unwrap();
        let block = |i: usize| Prob::uniform_on(set(6, &[2 * i, 2 * i + 1])).unwrap();
        let mixed = Prob::mixture(&[rat(1, 2), rat(1, 2)], &[block(0), block(2)]);
        let v = UpperProb::envelope(vec![block(0), block(1), mixed.clone()]).unwrap();
        assert_eq!(ergodic_core_measures(&v, &map), vec![block(0), block(1)]);
        let d = full_decomposition(&v, &map, &mixed).unwrap();
        assert_eq!(d.coefficients, vec![rat(1, 2), zero()]);
        assert_eq!(d.residual_weight, rat(1, 2));
        assert_eq!(d.residual, Some(block(2)));
        assert!(!d.residual_in_core);
    }

    #[test]
    fn residual_can_leave_the_core() {
        let map = Transformation::identity(3).unwrap();
        let p = prob(&[(1, 2), (1, 4), (1, 4)]);
        let v = UpperProb::envelope(vec![Prob::point_mass(3, 0), p.clone()]).unwrap();
        let d = full_decomposition(&v, &map, &p).unwrap();
        assert_eq!(d.coefficients, vec![rat(1, 2)]);
        assert_eq!(d.residual, Some(prob(&[(0, 1), (1, 2), (1, 2)])));
        assert!(!d.residual_in_core);
        assert!(full_decomposition(&v, &Transformation::new(vec![0, 0, 2]).unwrap(), &p).is_err());
    }

    #[test]
    fn full_decomposition_rejects_empty_ergodic_core() {
        let uniform = prob(&[(1, 4), (1, 4), (1, 4), (1, 4)]);
        assert_eq!(
            full_decomposition(&UpperProb::from_prob(uniform.clone()), &swap_pairs(), &uniform),
            Err(Error::NoErgodicCoreMeasures)
        );
    }

    #[test]
    fn fec_cells_partition_every_invariant_set() {
        let fec = fec_decompose(&two_block(), &swap_pairs()).unwrap();
        for a in subsets(4).filter(|a| swap_pairs().is_invariant_set(*a)) {
            for &cell in fec.cells() {
                let inside = a.intersection(&cell);
                assert!(inside.is_empty() || inside == cell);
            }
        }
    }
}
