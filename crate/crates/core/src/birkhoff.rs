//! Birkhoff limits, the multi-valued law of large numbers and asymptotic
//! independence.
//!
//! Every limit is computed structurally: orbits enter a cycle within `m`
//! steps, so the relevant sequences are periodic from index `m` on with a
//! period dividing the lcm of the cycle lengths.

use num_traits::Zero;

use crate::capacity::UpperProb;
use crate::error::{Error, Result};
use crate::fec::FecResult;
use crate::function::FunctionOnSpace;
use crate::measure::Prob;
use crate::rational::{int, zero, Rational};
use crate::space::{Partition, SubsetMask, Transformation};

/// `g(ω) = lim (1/N) Σ_{i<N} f(T^i ω)`: the mean of `f` over the cycle that
/// the orbit of `ω` enters.
pub fn birkhoff_limit(map: &Transformation, f: &FunctionOnSpace) -> FunctionOnSpace {
    assert_eq!(map.size(), f.width());
    let cycles = map.cycles();
    let means: Vec<Rational> = cycles
        .iter()
        .map(|c| c.points.iter().map(|&p| f.get(p).clone()).sum::<Rational>() / int(c.len() as i64))
        .collect();
    let values = (0..map.size())
        .map(|p| {
            let landing = map.iterate(p, map.size());
            let index = cycles.iter().position(|c| c.mask.contains(landing)).expect("orbits end on a cycle");
            means[index].clone()
        })
        .collect();
    FunctionOnSpace::new(values).unwrap()
}

/// The literal time average `(1/N) Σ_{i<N} f(T^i ω)`, `N ≥ 1`.
pub fn birkhoff_average(map: &Transformation, f: &FunctionOnSpace, n: usize) -> FunctionOnSpace {
    assert!(n > 0, "averages need at least one term");
    let values = (0..map.size())
        .map(|p| {
            let mut point = p;
            let mut total = zero();
            for _ in 0..n {
                total += f.get(point);
                point = map.apply(point);
            }
            total / int(n as i64)
        })
        .collect();
    FunctionOnSpace::new(values).unwrap()
}

/// `Σ_j (∫ f dQ_j)·1_{A_j}`.
pub fn component_means(fec: &FecResult, f: &FunctionOnSpace) -> FunctionOnSpace {
    let mut values = vec![zero(); f.width()];
    for (cell, q) in fec.cells().iter().zip(fec.ergodic_measures()) {
        let mean = q.integrate(f);
        for p in cell.points() {
            values[p] = mean.clone();
        }
    }
    FunctionOnSpace::new(values).unwrap()
}

/// The Birkhoff limit of `f` equals `Σ_j (∫ f dQ_j)·1_{A_j}` at every point
/// of `null_support(V)`.
pub fn verify_multivalue_lln(v: &UpperProb, map: &Transformation, fec: &FecResult, f: &FunctionOnSpace) -> bool {
    birkhoff_limit(map, f).agrees_on(&component_means(fec, f), v.null_support())
}

/// `∫ Σ_j levels_j·1_{A_j ∩ B} dV`, two ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepChoquet {
    /// The sorted-threshold Choquet integral.
    pub value: Rational,
    /// `Σ_j l_j·(V(∪_{k≤j} A_k∩B) − V(∪_{k<j} A_k∩B))` with cells sorted by
    /// decreasing level.
    pub telescoped: Rational,
    /// The same sum taken in the given cell order.
    pub telescoped_in_given_order: Rational,
}

pub fn comonotone_step_choquet(v: &UpperProb, b: SubsetMask, cells: &Partition, levels: &[Rational]) -> StepChoquet {
    assert_eq!(cells.len(), levels.len(), "one level per cell");
    let mut values = vec![zero(); v.width()];
    for (cell, level) in cells.cells().iter().zip(levels) {
        for p in cell.intersection(&b).points() {
            values[p] = level.clone();
        }
    }
    let value = v.choquet_integral(&FunctionOnSpace::new(values).unwrap());

    let given: Vec<usize> = (0..levels.len()).collect();
    let mut sorted = given.clone();
    sorted.sort_by(|&i, &j| levels[j].cmp(&levels[i]).then(i.cmp(&j)));
    let telescope = |order: &[usize]| {
        let mut total = zero();
        let mut covered = SubsetMask::empty(v.width());
        let mut previous = zero();
        for &i in order {
            covered = covered.union(&cells.cells()[i].intersection(&b));
            let current = v.value(covered).clone();
            total += &levels[i] * (&current - &previous);
            previous = current;
        }
        total
    };
    StepChoquet { value, telescoped: telescope(&sorted), telescoped_in_given_order: telescope(&given) }
}

/// Both sides of an asymptotic independence identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
    /// `rhs` evaluated with the cells in index order instead of by
    /// decreasing `Q_j(C)`. Only differs for the Choquet form.
    pub rhs_in_index_order: Rational,
    /// Whether the index-order value differs from the sorted one.
    pub order_sensitive: bool,
}

impl IndependenceCheck {
    fn new(lhs: Rational, rhs: Rational, rhs_in_index_order: Rational) -> Self {
        Self {
            equal: lhs == rhs,
            order_sensitive: rhs != rhs_in_index_order,
            lhs,
            rhs,
            rhs_in_index_order,
        }
    }
}

/// `lim_N ∫ (1/N) Σ_{i<N} 1_B·(1_C ∘ T^i) dV` against the telescoped sum
/// over the ergodic components with levels `Q_j(C)`.
pub fn asymptotic_independence_choquet(
    v: &UpperProb,
    map: &Transformation,
    fec: &FecResult,
    b: SubsetMask,
    c: SubsetMask,
) -> IndependenceCheck {
    let limit = FunctionOnSpace::indicator(b).mul(&birkhoff_limit(map, &FunctionOnSpace::indicator(c)));
    let lhs = v.choquet_integral(&limit);
    let levels: Vec<Rational> = fec.ergodic_measures().iter().map(|q| q.measure(c)).collect();
    let step = comonotone_step_choquet(v, b, fec.partition(), &levels);
    IndependenceCheck::new(lhs, step.telescoped, step.telescoped_in_given_order)
}

/// `∫ (1/N) Σ_{i<N} 1_B·(1_C ∘ T^i) dV` for `N = 1..=n_max`.
pub fn choquet_independence_trace(
    v: &UpperProb,
    map: &Transformation,
    b: SubsetMask,
    c: SubsetMask,
    n_max: usize,
) -> Vec<Rational> {
    let indicator_b = FunctionOnSpace::indicator(b);
    let indicator_c = FunctionOnSpace::indicator(c);
    (1..=n_max)
        .map(|n| v.choquet_integral(&indicator_b.mul(&birkhoff_average(map, &indicator_c, n))))
        .collect()
}

/// `lim (1/N) Σ_{i<N} P(B ∩ T^{-i}C)` against `Σ_j Q_j(C)·P(A_j ∩ B)`.
pub fn asymptotic_independence_core(
    v: &UpperProb,
    map: &Transformation,
    fec: &FecResult,
    prob: &Prob,
    b: SubsetMask,
    c: SubsetMask,
) -> Result<IndependenceCheck> {
    if !v.core_contains(prob) {
        return Err(Error::NotInCore);
    }
    let lhs = correlation_limit(prob, map, b, c);
    let rhs: Rational = fec
        .cells()
        .iter()
        .zip(fec.ergodic_measures())
        .map(|(cell, q)| q.measure(c) * prob.measure(cell.intersection(&b)))
        .sum();
    Ok(IndependenceCheck::new(lhs, rhs.clone(), rhs))
}

/// Exact `lim (1/N) Σ_{i<N} P(B ∩ T^{-i}C)`.
pub fn correlation_limit(prob: &Prob, map: &Transformation, b: SubsetMask, c: SubsetMask) -> Rational {
    let m = map.size();
    let period = map.period();
    let mut set = c;
    for _ in 0..m {
        set = map.preimage(set);
    }
    let mut total = zero();
    for _ in 0..period {
        total += prob.measure(b.intersection(&set));
        set = map.preimage(set);
    }
    total / int(period as i64)
}

/// `(1/N) Σ_{i<N} P(B ∩ T^{-i}C)` for `N = 1..=n_max`.
pub fn correlation_trace(prob: &Prob, map: &Transformation, b: SubsetMask, c: SubsetMask, n_max: usize) -> Vec<Rational> {
    let mut set = c;
    let mut total = zero();
    let mut trace = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        total += prob.measure(b.intersection(&set));
        trace.push(&total / int(n as i64));
        set = map.preimage(set);
    }
    trace
}

/// Whether a trace has reached `limit` at every multiple of the period
/// beyond the preperiod; used as evidence, not as the definition.
pub fn trace_hits_limit(trace: &[Rational], limit: &Rational, preperiod: usize, period: usize) -> bool {
    trace
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let n = i + 1;
            n >= preperiod && n % period == 0
        })
        .all(|(_, value)| (value - limit).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fec::fec_decompose;
    use crate::rational::rat;
    use crate::space::subsets;

    fn prob(values: &[(i64, i64)]) -> Prob {
        Prob::new(values.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn set(width: usize, points: &[usize]) -> SubsetMask {
        SubsetMask::from_points(width, points.iter().copied()).unwrap()
    }

    fn f(values: &[i64]) -> FunctionOnSpace {
        FunctionOnSpace::new(values.iter().map(|&v| int(v)).collect()).unwrap()
    }

    fn swap_pairs() -> Transformation {
        Transformation::new(vec![1, 0, 3, 2]).unwrap()
    }

    fn two_block() -> UpperProb {
        UpperProb::envelope(vec![prob(&[(1, 2), (1, 2), (0, 1), (0, 1)]), prob(&[(0, 1), (0, 1), (1, 2), (1, 2)])])
            .unwrap()
    }

    #[test]
    fn limits() {
        let g = birkhoff_limit(&swap_pairs(), &FunctionOnSpace::indicator(set(4, &[0])));
        assert_eq!(g.values(), &[rat(1, 2), rat(1, 2), zero(), zero()]);
        let constant = FunctionOnSpace::constant(4, rat(2, 3));
        assert_eq!(birkhoff_limit(&swap_pairs(), &constant), constant);
        let cycle = Transformation::new(vec![1, 2, 3, 0]).unwrap();
        assert_eq!(birkhoff_limit(&cycle, &f(&[4, 0, 0, 0])), FunctionOnSpace::constant(4, int(1)));
    }

    #[test]
    fn limit_matches_average_at_full_periods() {
        let map = Transformation::new(vec![1, 2, 0, 0, 3, 6, 5]).unwrap();
        let h = f(&[3, -1, 4, 1, -5, 9, 2]);
        let limit = birkhoff_limit(&map, &h);
        assert_eq!(limit.compose(&map), limit);
        for k in 1..4 {
            // Transient contributions vanish only in the limit, so compare on
            // cyclic points where the average is exact at full periods.
            let avg = birkhoff_average(&map, &h, map.period() * k);
            assert!(avg.agrees_on(&limit, map.cyclic_points()));
        }
    }

    #[test]
    fn multivalue_lln() {
        let v = two_block();
        let fec = fec_decompose(&v, &swap_pairs()).unwrap();
        assert!(verify_multivalue_lln(&v, &swap_pairs(), &fec, &FunctionOnSpace::indicator(set(4, &[0]))));
        assert!(verify_multivalue_lln(&v, &swap_pairs(), &fec, &FunctionOnSpace::constant(4, int(7))));
        let corrupted = FecResult::from_parts(
            fec.partition().clone(),
            fec.components().to_vec(),
            vec![fec.ergodic_measures()[0].clone(), prob(&[(0, 1), (0, 1), (1, 1), (0, 1)])],
        );
        assert!(!verify_multivalue_lln(&v, &swap_pairs(), &corrupted, &FunctionOnSpace::indicator(set(4, &[2]))));
    }

    #[test]
    fn step_choquet() {
        let v = two_block();
        let cells = Partition::new(vec![set(4, &[0, 1]), set(4, &[2, 3])]).unwrap();
        let full = SubsetMask::full(4);
        let equal = comonotone_step_choquet(&v, set(4, &[0, 2]), &cells, &[rat(1, 3), rat(1, 3)]);
        assert_eq!(equal.value, rat(1, 3) * v.value(set(4, &[0, 2])));
        let top = comonotone_step_choquet(&v, full, &cells, &[int(1), zero()]);
        assert_eq!(top.value, int(1));
        assert_eq!(top.telescoped, int(1));
        let half = comonotone_step_choquet(&v, set(4, &[0, 2]), &cells, &[rat(1, 2), zero()]);
        assert_eq!(half.value, rat(1, 4));
        assert_eq!(half.telescoped, rat(1, 4));
    }

    #[test]
    fn unsorted_telescoping_can_differ() {
        let v = two_block();
        let cells = Partition::new(vec![set(4, &[0, 1]), set(4, &[2, 3])]).unwrap();
        let step = comonotone_step_choquet(&v, SubsetMask::full(4), &cells, &[zero(), int(1)]);
        assert_eq!(step.value, int(1));
        assert_eq!(step.telescoped, int(1));
        assert_eq!(step.telescoped_in_given_order, zero());
    }

    #[test]
    fn independence_examples() {
        let v = two_block();
        let map = swap_pairs();
        let fec = fec_decompose(&v, &map).unwrap();
        let check = asymptotic_independence_choquet(&v, &map, &fec, SubsetMask::full(4), set(4, &[0, 1]));
        assert!(check.equal);
        assert_eq!(check.lhs, int(1));
        let b = set(4, &[0, 2]);
        assert_eq!(asymptotic_independence_choquet(&v, &map, &fec, b, SubsetMask::full(4)).lhs, *v.value(b));
        let point = asymptotic_independence_choquet(&v, &map, &fec, set(4, &[0]), set(4, &[0]));
        assert_eq!((point.lhs.clone(), point.equal), (rat(1, 4), true));

        let uniform = prob(&[(1, 4), (1, 4), (1, 4), (1, 4)]);
        let core = asymptotic_independence_core(&v, &map, &fec, &uniform, set(4, &[0, 2]), set(4, &[0])).unwrap();
        assert_eq!((core.lhs, core.rhs), (rat(1, 8), rat(1, 8)));
        let q1 = prob(&[(1, 2), (1, 2), (0, 1), (0, 1)]);
        let core = asymptotic_independence_core(&v, &map, &fec, &q1, set(4, &[0]), set(4, &[0])).unwrap();
        assert_eq!(core.lhs, rat(1, 4));
        assert!(core.equal);
        let outside = prob(&[(1, 1), (0, 1), (0, 1), (0, 1)]);
        assert!(asymptotic_independence_core(&v, &map, &fec, &outside, b, b).is_err());
    }

    #[test]
    fn full_sweep_on_two_blocks() {
        let v = two_block();
        let map = swap_pairs();
        let fec = fec_decompose(&v, &map).unwrap();
        for b in subsets(4) {
            for c in subsets(4) {
                assert!(asymptotic_independence_choquet(&v, &map, &fec, b, c).equal, "{b} {c}");
            }
        }
    }

    #[test]
    fn traces_reach_limits() {
        let map = Transformation::new(vec![1, 2, 3, 0]).unwrap();
        let p = Prob::point_mass(4, 0);
        let b = SubsetMask::full(4);
        let c = set(4, &[0]);
        let limit = correlation_limit(&p, &map, b, c);
        assert_eq!(limit, rat(1, 4));
        let trace = correlation_trace(&p, &map, b, c, 16);
        assert!(trace_hits_limit(&trace, &limit, 0, 4));
        assert_eq!(trace[1], rat(1, 2));
    }
}
