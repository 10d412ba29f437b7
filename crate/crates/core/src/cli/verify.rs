//! Main path against oracle, check by check, over one system or a seeded
//! sweep.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::birkhoff::{asymptotic_independence_choquet, asymptotic_independence_core, birkhoff_limit, verify_multivalue_lln};
use crate::capacity::UpperProb;
use crate::fec::{ergodic_core_measures, extreme_points_check, fec_decompose, unique_vertex_decomposition, zero_one_condition};
use crate::koopman::{eigenspace_dimension, eigenvalue_one_multiplicity};
use crate::measure::{cesaro_limit, invariant_skeleton, Prob};
use crate::noninvariant::{irreducible_partition, verify_construction, NoninvariantSystem};
use crate::oracle::{
    oracle_birkhoff_average, oracle_cesaro, oracle_choquet, oracle_choquet_average, oracle_core_max,
    oracle_correlation_average, oracle_ergodic_measures, oracle_fec, oracle_invariant_sets, oracle_window_sup,
};
use crate::random::InstanceGenerator;
use crate::rational::{int, Rational};
use crate::space::{SubsetMask, Transformation};

/// Pass and total counts per named check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    counts: BTreeMap<&'static str, (usize, usize)>,
    /// First failing instance per check.
    pub first_failure: BTreeMap<&'static str, String>,
}

impl Tally {
    pub fn record(&mut self, check: &'static str, passed: bool, context: impl FnOnce() -> String) {
        let entry = self.counts.entry(check).or_default();
        entry.1 += 1;
        if passed {
            entry.0 += 1;
        } else {
            self.first_failure.entry(check).or_insert_with(context);
        }
    }

    pub fn counts(&self) -> &BTreeMap<&'static str, (usize, usize)> {
        &self.counts
    }

    pub fn all_pass(&self) -> bool {
        self.counts.values().all(|(passed, total)| passed == total)
    }
}

/// Limit of `(1/N) Σ_{i<N} s_i` from partial averages: once the sequence is
/// periodic, `S_{m+2L} − S_{m+L} = L·limit` for the partial sums `S`.
fn limit_from_averages(averages: &[Rational], preperiod: usize, period: usize) -> Rational {
    let sum = |n: usize| &averages[n - 1] * int(n as i64);
    (sum(preperiod + 2 * period) - sum(preperiod + period)) / int(period as i64)
}

fn describe(map: &Transformation, v: &UpperProb) -> String {
    let generators: Vec<String> = v.generators().iter().map(|g| crate::cli::report::tuple(g.mass())).collect();
    format!("map {:?}, generators [{}]", map.table(), generators.join(", "))
}

/// Every check on one invariant system, drawing functions and sets from
/// `gen`.
pub fn verify_system(map: &Transformation, v: &UpperProb, gen: &mut InstanceGenerator, tally: &mut Tally) {
    let m = map.size();
    let period = map.period();
    let context = || describe(map, v);

    let mut main_sets = map.invariant_sets();
    main_sets.sort();
    let mut oracle_sets = oracle_invariant_sets(map);
    oracle_sets.sort();
    tally.record("invariant_sets", main_sets == oracle_sets, context);

    for _ in 0..3 {
        let f = gen.function(m);
        tally.record("choquet_integral", v.choquet_integral(&f) == oracle_choquet(v, &f), context);
    }

    let fec = fec_decompose(v, map);
    let oracle = oracle_fec(v, map);
    // Unique only up to null invariant atoms, which may join any cell.
    let same_partition = match (&fec, oracle.finest()) {
        (Ok(fec), Some(finest)) => {
            let mut cells = fec.cells().to_vec();
            cells.sort_by_key(|c| (c.min_point(), c.bits()));
            oracle.partitions.contains(&cells) && cells.len() == finest.len()
        }
        (Err(_), None) => true,
        _ => false,
    };
    tally.record("fec_partition", same_partition, context);

    let zero_one = zero_one_condition(v, map).unwrap_or(false);
    let predicates = [zero_one, fec.is_ok(), unique_vertex_decomposition(v, map), extreme_points_check(v, map)];
    tally.record("four_way_equivalence", predicates.iter().all(|&p| p == predicates[0]), context);

    let mut main_ergodic: Vec<Vec<Rational>> =
        ergodic_core_measures(v, map).iter().map(|q| q.mass().to_vec()).collect();
    main_ergodic.sort();
    let dominated = |mass: &Vec<Rational>| {
        (0u32..1 << m).all(|bits| {
            let set = SubsetMask::new(bits, m).unwrap();
            let total: Rational = set.points().map(|p| mass[p].clone()).sum();
            &total <= v.value(set)
        })
    };
    let oracle_ergodic: Vec<Vec<Rational>> = oracle_ergodic_measures(map).into_iter().filter(dominated).collect();
    tally.record("ergodic_core_measures", main_ergodic == oracle_ergodic, context);

    let objective = gen.objective(m);
    let vertex_max = v
        .invariant_core_vertices(map)
        .iter()
        .map(|p| p.mass().iter().zip(&objective).map(|(a, b)| a * b).sum::<Rational>())
        .max();
    tally.record("invariant_core_max", vertex_max.as_ref() == oracle_core_max(v, &objective, Some(map)).value(), context);

    let multiplicity = eigenvalue_one_multiplicity(v, map).ok();
    let koopman_ok = multiplicity.is_some()
        && multiplicity == eigenspace_dimension(v, map).ok()
        && fec.as_ref().map_or(true, |fec| multiplicity == Some(fec.len()));
    tally.record("koopman_multiplicity", koopman_ok, context);

    let f = gen.function(m);
    let averages: Vec<Vec<Rational>> = (1..=m + 2 * period).map(|n| oracle_birkhoff_average(map, &f, n)).collect();
    let limit = birkhoff_limit(map, &f);
    let birkhoff_ok = (0..m).all(|p| {
        let per_point: Vec<Rational> = averages.iter().map(|a| a[p].clone()).collect();
        limit_from_averages(&per_point, m, period) == *limit.get(p)
    });
    tally.record("birkhoff_limit", birkhoff_ok, context);

    let p = gen.prob(m);
    let a = gen.subset(m);
    let structural = cesaro_limit(&p, map).measure(a);
    let trace = oracle_cesaro(&p, map, a, m + 2 * period);
    tally.record("cesaro_limit", structural == limit_from_averages(&trace, m, period), context);
    if map.is_invertible() {
        let skeleton = invariant_skeleton(&p, map).ok();
        tally.record("invariant_skeleton", skeleton.as_ref() == Some(&cesaro_limit(&p, map)), context);
    }

    let Ok(fec) = fec else { return };
    tally.record("multivalue_lln", verify_multivalue_lln(v, map, &fec, &gen.function(m)), context);
    // V is null off the cyclic points, where the averages are exact at
    // every multiple of the period.
    let horizon = 4 * period;
    for _ in 0..3 {
        let (b, c) = (gen.subset(m), gen.subset(m));
        let check = asymptotic_independence_choquet(v, map, &fec, b, c);
        let oracle = oracle_choquet_average(v, map, b, c, horizon);
        tally.record("choquet_independence", check.equal && check.lhs == oracle, context);
    }
    let vertices = v.core_vertices();
    let vertex = &vertices[gen.size(0, vertices.len() - 1)];
    let (b, c) = (gen.subset(m), gen.subset(m));
    let core_ok = asymptotic_independence_core(v, map, &fec, vertex, b, c)
        .is_ok_and(|check| check.equal && check.lhs == oracle_correlation_average(vertex, map, b, c, horizon));
    tally.record("core_independence", core_ok, context);
}

/// The non-invariant construction for a probability and a permutation.
pub fn verify_noninvariant(prob: &Prob, map: &Transformation, gen: &mut InstanceGenerator, tally: &mut Tally) {
    let m = map.size();
    let context = || format!("map {:?}, probability {}", map.table(), crate::cli::report::tuple(prob.mass()));
    let Ok(system) = NoninvariantSystem::new(prob.clone(), map.clone()) else {
        tally.record("noninvariant_construction", false, context);
        return;
    };
    tally.record("noninvariant_construction", verify_construction(&system).is_ok_and(|r| r.all_pass()), context);
    let Ok(partition) = irreducible_partition(&system) else { return };
    let bound = 4 * map.period();
    for _ in 0..2 {
        let a = gen.subset(m);
        let windows_ok = partition
            .conditionals
            .iter()
            .zip(&partition.capacities)
            .all(|(pj, vj)| *vj.value(a) == oracle_window_sup(pj, map, a, bound));
        tally.record("window_reduction", windows_ok, context);
    }
    let f = gen.function(m);
    let averages: Vec<Vec<Rational>> = (1..=2 * map.period()).map(|n| oracle_birkhoff_average(map, &f, n)).collect();
    let lln_ok = (0..m).filter(|&p| !prob.get(p).is_zero()).all(|p| {
        let per_point: Vec<Rational> = averages.iter().map(|a| a[p].clone()).collect();
        let cell = partition.cells.cell_of(p);
        limit_from_averages(&per_point, 0, map.period()) == partition.limits[cell].integrate(&f)
    });
    tally.record("noninvariant_lln", lln_ok, context);
}

/// `instances` random systems and as many random non-invariant systems.
pub fn verify_sweep(seed: u64, instances: usize) -> Tally {
    let mut gen = InstanceGenerator::new(seed);
    let mut tally = Tally::default();
    for _ in 0..instances {
        let (map, v) = gen.system(1, 6);
        verify_system(&map, &v, &mut gen, &mut tally);
        let m = gen.size(1, 6);
        let permutation = gen.permutation(m);
        let prob = gen.prob(m);
        verify_noninvariant(&prob, &permutation, &mut gen, &mut tally);
    }
    tally
}
