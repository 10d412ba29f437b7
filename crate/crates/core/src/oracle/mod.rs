//! Brute-force reference implementations.
//!
//! Everything here works from definitions: subsets are scanned exhaustively,
//! maps are iterated point by point and optima come from the linear
//! programming solver in [`lp`]. Only the data types and the bitmask
//! algebra are shared with the main library, so agreement between the two is
//! independent evidence.

pub mod lp;

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::capacity::UpperProb;
use crate::function::FunctionOnSpace;
use crate::measure::Prob;
use crate::rational::{int, Rational};
use crate::space::{SubsetMask, Transformation};
use lp::{maximize, Constraint, LpOutcome, Relation};

fn all_subsets(width: usize) -> impl Iterator<Item = SubsetMask> {
    (0u32..1 << width).map(move |bits| SubsetMask::new(bits, width).unwrap())
}

fn mass_of(mass: &[Rational], set: SubsetMask) -> Rational {
    mass.iter().enumerate().filter(|(p, _)| set.contains(*p)).map(|(_, m)| m.clone()).sum()
}

/// `{ω : Tω ∈ A}` straight from the table.
pub fn oracle_preimage(map: &Transformation, set: SubsetMask) -> SubsetMask {
    let points = map.table().iter().enumerate().filter(|(_, &image)| set.contains(image)).map(|(p, _)| p);
    SubsetMask::from_points(set.width(), points).unwrap()
}

/// `{Tω : ω ∈ A}` straight from the table.
fn oracle_image(map: &Transformation, set: SubsetMask) -> SubsetMask {
    SubsetMask::from_points(set.width(), set.points().map(|p| map.table()[p])).unwrap()
}

/// Every subset with `T^{-1}A = A`.
pub fn oracle_invariant_sets(map: &Transformation) -> Vec<SubsetMask> {
    all_subsets(map.size()).filter(|&a| oracle_preimage(map, a) == a).collect()
}

/// Nonempty invariant sets with no nonempty invariant proper subset.
pub fn oracle_invariant_atoms(map: &Transformation) -> Vec<SubsetMask> {
    let invariant = oracle_invariant_sets(map);
    invariant
        .iter()
        .filter(|a| !a.is_empty())
        .filter(|a| !invariant.iter().any(|b| !b.is_empty() && b != *a && b.is_subset_of(a)))
        .copied()
        .collect()
}

/// `∫_0^∞ V({f ≥ t}) dt + ∫_{-∞}^0 (V({f ≥ t}) − 1) dt`, each integrand
/// being a step function of `t` with jumps at the values of `f`.
pub fn oracle_choquet(v: &UpperProb, f: &FunctionOnSpace) -> Rational {
    let width = f.width();
    let level = |t: &Rational| SubsetMask::from_points(width, (0..width).filter(|&p| f.get(p) >= t)).unwrap();
    let mut breakpoints: Vec<Rational> = f.values().to_vec();
    breakpoints.push(Rational::zero());
    breakpoints.sort();
    breakpoints.dedup();

    let mut total = Rational::zero();
    for pair in breakpoints.windows(2) {
        let (low, high) = (&pair[0], &pair[1]);
        // On (low, high] the level set is {f ≥ high}.
        let capacity = v.table()[level(high).index()].clone();
        // Zero is a breakpoint, so each interval lies on one side of it.
        if low >= &Rational::zero() {
            total += (high - low) * capacity;
        } else {
            total += (high - low) * (capacity - Rational::one());
        }
    }
    total
}

/// Linear program over `{P ∈ core(V) : P(cell) = 1}` in the coordinates of
/// `cell`. Upper bounds `P(B) ≤ V(B)` restrict to `P(C) ≤ V(C)` for
/// `C = B ∩ cell`, the tightest bound by monotonicity of `V`.
fn cell_constraints(v: &UpperProb, cell: SubsetMask) -> (Vec<usize>, Vec<Constraint>) {
    let points: Vec<usize> = cell.points().collect();
    let d = points.len();
    let mut constraints = vec![Constraint::new(vec![Rational::one(); d], Relation::Equal, Rational::one())];
    for local in 1u32..1 << d {
        let subset = SubsetMask::from_points(v.width(), (0..d).filter(|i| local >> i & 1 == 1).map(|i| points[i])).unwrap();
        let bound = &v.table()[subset.index()];
        if bound < &Rational::one() {
            let row = (0..d).map(|i| if local >> i & 1 == 1 { Rational::one() } else { Rational::zero() }).collect();
            constraints.push(Constraint::new(row, Relation::AtMost, bound.clone()));
        }
    }
    (points, constraints)
}

/// `max{P(A) : P ∈ core(V), P(cell) = 1}`, or `None` when no core element
/// is carried by `cell`.
pub fn oracle_restricted_value(v: &UpperProb, cell: SubsetMask, a: SubsetMask) -> Option<Rational> {
    let (points, constraints) = cell_constraints(v, cell);
    let objective: Vec<Rational> =
        points.iter().map(|&p| if a.contains(p) { Rational::one() } else { Rational::zero() }).collect();
    maximize(&objective, &constraints).value().cloned()
}

/// `max{Σ c_ω P(ω) : P ∈ core(V)}`, optionally also requiring `P∘T^{-1} = P`.
pub fn oracle_core_max(v: &UpperProb, objective: &[Rational], invariant_under: Option<&Transformation>) -> LpOutcome {
    let full = SubsetMask::full(v.width());
    let (_, mut constraints) = cell_constraints(v, full);
    if let Some(map) = invariant_under {
        for target in 0..v.width() {
            let mut row = vec![Rational::zero(); v.width()];
            for (source, &image) in map.table().iter().enumerate() {
                if image == target {
                    row[source] += Rational::one();
                }
            }
            row[target] -= Rational::one();
            constraints.push(Constraint::new(row, Relation::Equal, Rational::zero()));
        }
    }
    maximize(objective, &constraints)
}

/// All partitions into invariant cells whose component capacities are
/// ergodic, found by trying every grouping of the invariant atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFec {
    pub partitions: Vec<Vec<SubsetMask>>,
}

impl OracleFec {
    pub fn is_fec(&self) -> bool {
        !self.partitions.is_empty()
    }

    /// A valid partition with the most cells, the first found on ties.
    pub fn finest(&self) -> Option<&[SubsetMask]> {
        let most = self.partitions.iter().map(Vec::len).max()?;
        self.partitions.iter().find(|p| p.len() == most).map(Vec::as_slice)
    }
}

pub fn oracle_fec(v: &UpperProb, map: &Transformation) -> OracleFec {
    let atoms = oracle_invariant_atoms(map);
    let invariant = oracle_invariant_sets(map);
    let mut verdicts: HashMap<SubsetMask, bool> = HashMap::new();
    let mut partitions = Vec::new();
    for grouping in set_partitions(atoms.len()) {
        let cells: Vec<SubsetMask> = grouping
            .iter()
            .map(|group| group.iter().fold(SubsetMask::empty(v.width()), |acc, &i| acc.union(&atoms[i])))
            .collect();
        let valid = cells.iter().all(|&cell| {
            *verdicts.entry(cell).or_insert_with(|| component_is_ergodic(v, map, cell, &invariant))
        });
        if valid {
            let mut sorted = cells;
            sorted.sort_by_key(|c| (c.min_point(), c.bits()));
            partitions.push(sorted);
        }
    }
    partitions.sort_by_key(|p| p.iter().map(|c| (c.min_point(), c.bits())).collect::<Vec<_>>());
    OracleFec { partitions }
}

/// The component capacity on `cell` exists, is invariant and is ergodic.
fn component_is_ergodic(v: &UpperProb, map: &Transformation, cell: SubsetMask, invariant: &[SubsetMask]) -> bool {
    if !v.table()[cell.index()].is_one() {
        return false;
    }
    let mut values: HashMap<SubsetMask, Option<Rational>> = HashMap::new();
    let mut value = |a: SubsetMask| {
        let local = a.intersection(&cell);
        values.entry(local).or_insert_with(|| oracle_restricted_value(v, cell, local)).clone()
    };
    if value(cell).is_none() {
        return false;
    }
    let ergodic = invariant
        .iter()
        .all(|&a| value(a).unwrap().is_zero() || value(a.complement()).unwrap().is_zero());
    ergodic && all_subsets(v.width()).all(|a| value(oracle_preimage(map, a)) == value(a))
}

/// Set partitions of `{0, …, n−1}` as lists of blocks, by restricted growth
/// strings.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn extend(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            extend(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        extend(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    extend(0, n, &mut Vec::new(), &mut out);
    out
}

/// Uniform probabilities on the periodic orbits, found by walking orbits.
pub fn oracle_ergodic_measures(map: &Transformation) -> Vec<Vec<Rational>> {
    let m = map.size();
    let mut seen = SubsetMask::empty(m);
    let mut measures = Vec::new();
    for start in 0..m {
        let mut p = start;
        for _ in 0..m {
            p = map.table()[p];
        }
        if seen.contains(p) {
            continue;
        }
        let mut orbit = vec![p];
        let mut q = map.table()[p];
        while q != p {
            orbit.push(q);
            q = map.table()[q];
        }
        let weight = Rational::new(1.into(), (orbit.len() as i64).into());
        let mut mass = vec![Rational::zero(); m];
        for &q in &orbit {
            mass[q] = weight.clone();
            seen = seen.union(&SubsetMask::singleton(m, q));
        }
        measures.push(mass);
    }
    measures.sort();
    measures
}

/// Partial averages `(1/N) Σ_{i<N} P(T^{-i}A)` for `N = 1..=n_max`.
pub fn oracle_cesaro(prob: &Prob, map: &Transformation, a: SubsetMask, n_max: usize) -> Vec<Rational> {
    let mut set = a;
    let mut total = Rational::zero();
    (1..=n_max)
        .map(|n| {
            total += mass_of(prob.mass(), set);
            set = oracle_preimage(map, set);
            &total / int(n as i64)
        })
        .collect()
}

/// `(1/N) Σ_{i<N} P(B ∩ T^{-i}C)`.
pub fn oracle_correlation_average(prob: &Prob, map: &Transformation, b: SubsetMask, c: SubsetMask, n: usize) -> Rational {
    let mut set = c;
    let mut total = Rational::zero();
    for _ in 0..n {
        total += mass_of(prob.mass(), b.intersection(&set));
        set = oracle_preimage(map, set);
    }
    total / int(n as i64)
}

/// `(1/N) Σ_{i<N} f(T^i ω)` at every point.
pub fn oracle_birkhoff_average(map: &Transformation, f: &FunctionOnSpace, n: usize) -> Vec<Rational> {
    (0..map.size())
        .map(|start| {
            let mut p = start;
            let mut total = Rational::zero();
            for _ in 0..n {
                total += f.get(p);
                p = map.table()[p];
            }
            total / int(n as i64)
        })
        .collect()
}

/// `∫ 1_B·(1/N) Σ_{i<N} 1_C∘T^i dV`, through [`oracle_choquet`].
pub fn oracle_choquet_average(v: &UpperProb, map: &Transformation, b: SubsetMask, c: SubsetMask, n: usize) -> Rational {
    let indicator_c = FunctionOnSpace::indicator(c);
    let averages = oracle_birkhoff_average(map, &indicator_c, n);
    let values = averages
        .into_iter()
        .enumerate()
        .map(|(p, avg)| if b.contains(p) { avg } else { Rational::zero() })
        .collect();
    oracle_choquet(v, &FunctionOnSpace::new(values).unwrap())
}

/// Smallest `L ≥ 1` with `T^L = id` for a permutation.
fn permutation_order(map: &Transformation) -> usize {
    let mut power: Vec<usize> = map.table().to_vec();
    let mut order = 1;
    while power.iter().enumerate().any(|(p, &q)| p != q) {
        power = power.iter().map(|&q| map.table()[q]).collect();
        order += 1;
    }
    order
}

/// `max λ_{M,N}(T^{-k}A)` over `0 ≤ k < L` and `0 ≤ M, N ≤ bound`, where
/// `λ_{M,N} = (1/(M+N+1)) Σ_{i=-M}^{N} P∘T^{-i}` and `L` is the order of
/// the permutation. Negative powers are taken as forward images.
pub fn oracle_window_sup(prob: &Prob, map: &Transformation, a: SubsetMask, bound: usize) -> Rational {
    let order = permutation_order(map);
    // s[j] = P(T^{-(j - bound)} A) for j - bound ∈ [-bound, bound + order).
    let span = 2 * bound + order;
    let mut backward = Vec::with_capacity(bound + 1);
    let mut set = a;
    for _ in 0..=bound {
        backward.push(mass_of(prob.mass(), set));
        set = oracle_image(map, set);
    }
    let mut sequence: Vec<Rational> = backward.into_iter().skip(1).rev().collect();
    let mut set = a;
    while sequence.len() < span {
        sequence.push(mass_of(prob.mass(), set));
        set = oracle_preimage(map, set);
    }
    let mut prefix = vec![Rational::zero()];
    for s in &sequence {
        let next = prefix.last().unwrap() + s;
        prefix.push(next);
    }
    let mut best: Option<Rational> = None;
    for k in 0..order {
        let centre = bound + k;
        for back in 0..=bound {
            for forward in 0..=bound {
                let (lo, hi) = (centre - back, centre + forward + 1);
                if hi > sequence.len() {
                    continue;
                }
                let average = (&prefix[hi] - &prefix[lo]) / int((back + forward + 1) as i64);
                if best.as_ref().is_none_or(|b| &average > b) {
                    best = Some(average);
                }
            }
        }
    }
    best.unwrap()
}
