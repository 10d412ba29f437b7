//! Structural invariants over generated systems.

use num_traits::{One, Signed, Zero};
use proptest::collection::vec;
use proptest::prelude::*;

use ergocap::birkhoff::{asymptotic_independence_choquet, birkhoff_average, birkhoff_limit};
use ergocap::fec::{decompose_invariant, fec_decompose, zero_one_witness};
use ergocap::koopman::{eigenvalue_one_multiplicity, invariant_function_basis};
use ergocap::measure::{
    abs_continuous, cesaro_limit, ergodic_probabilities, invariant_skeleton, is_invariant,
    lebesgue_decomposition_invariant, singular,
};
use ergocap::noninvariant::{invariant_value_set, irreducible_partition, orbit_saturations, NoninvariantSystem};
use ergocap::oracle::lp::LpOutcome;
use ergocap::oracle::{oracle_choquet, oracle_core_max};
use ergocap::random::invariant_envelope;
use ergocap::rational::{format_rational, parse_rational};
use ergocap::space::subsets;
use ergocap::{FunctionOnSpace, Prob, Rational, SubsetMask, Transformation, UpperProb};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn map_strategy(max: usize) -> impl Strategy<Value = Transformation> {
    (1..=max).prop_flat_map(|m| vec(0..m, m)).prop_map(|t| Transformation::new(t).unwrap())
}

fn permutation_strategy(max: usize) -> impl Strategy<Value = Transformation> {
    (1..=max)
        .prop_flat_map(|m| Just((0..m).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|t| Transformation::new(t).unwrap())
}

fn prob_strategy(m: usize) -> impl Strategy<Value = Prob> {
    vec(0i64..4, m).prop_filter("some mass", |w| w.iter().any(|&x| x > 0)).prop_map(|w| {
        let total: i64 = w.iter().sum();
        Prob::new(w.iter().map(|&x| r(x, total)).collect()).unwrap()
    })
}

fn function_strategy(m: usize) -> impl Strategy<Value = FunctionOnSpace> {
    vec((-3i64..=3, 1i64..=3), m)
        .prop_map(|v| FunctionOnSpace::new(v.into_iter().map(|(n, d)| r(n, d)).collect()).unwrap())
}

/// A map with an invariant upper probability built from 1 to 4 seeds.
fn system_strategy(max: usize) -> impl Strategy<Value = (Transformation, UpperProb)> {
    map_strategy(max).prop_flat_map(|map| {
        let m = map.size();
        vec(prob_strategy(m), 1..=4).prop_map(move |seeds| {
            let v = invariant_envelope(&map, seeds);
            (map.clone(), v)
        })
    })
}

/// A plain envelope, not necessarily invariant.
fn capacity_strategy(max: usize) -> impl Strategy<Value = UpperProb> {
    (1..=max).prop_flat_map(|m| vec(prob_strategy(m), 1..=4)).prop_map(|g| UpperProb::envelope(g).unwrap())
}

fn sets(width: usize) -> Vec<SubsetMask> {
    subsets(width).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn invariant_sets_form_an_algebra(map in map_strategy(7)) {
        let invariant = map.invariant_sets();
        prop_assert_eq!(invariant.len(), 1 << map.components().len());
        for &a in &invariant {
            prop_assert_eq!(map.preimage(a), a);
            prop_assert!(invariant.contains(&a.complement()));
            for &b in &invariant {
                prop_assert!(invariant.contains(&a.union(&b)));
                prop_assert!(invariant.contains(&a.intersection(&b)));
            }
        }
    }

    #[test]
    fn orbits_reach_cycles(map in map_strategy(8)) {
        let cyclic = map.cycles().iter().fold(SubsetMask::empty(map.size()), |acc, c| acc.union(&c.mask));
        for p in 0..map.size() {
            prop_assert!(cyclic.contains(map.iterate(p, map.size())));
        }
        for cycle in map.cycles() {
            for (i, &p) in cycle.points.iter().enumerate() {
                prop_assert_eq!(map.apply(p), cycle.points[(i + 1) % cycle.points.len()]);
            }
        }
    }

    #[test]
    fn cesaro_limit_is_the_invariant_skeleton((map, p) in map_strategy(6).prop_flat_map(|t| { let m = t.size(); (Just(t), prob_strategy(m)) })) {
        let limit = cesaro_limit(&p, &map);
        prop_assert!(is_invariant(&limit, &map));
        for a in map.invariant_sets() {
            prop_assert_eq!(limit.measure(a), p.measure(a));
        }
        let skeleton = invariant_skeleton(&p, &map).unwrap();
        prop_assert_eq!(&skeleton, &limit);
        prop_assert_eq!(invariant_skeleton(&skeleton, &map).unwrap(), skeleton);
    }

    #[test]
    fn lebesgue_parts_recombine((map, p, q) in permutation_strategy(6).prop_flat_map(|t| { let m = t.size(); (Just(t), prob_strategy(m), prob_strategy(m)) })) {
        let (p, reference) = (cesaro_limit(&p, &map), cesaro_limit(&q, &map));
        let split = lebesgue_decomposition_invariant(&p, &reference, &map).unwrap();
        prop_assert_eq!(&split.k + &split.l, Rational::one());
        let mut mass = vec![Rational::zero(); map.size()];
        for (weight, part) in [(&split.k, &split.absolutely_continuous), (&split.l, &split.singular)] {
            if let Some(part) = part {
                prop_assert!(is_invariant(part, &map));
                for (x, y) in mass.iter_mut().zip(part.mass()) {
                    *x += weight * y;
                }
            }
        }
        prop_assert_eq!(mass.as_slice(), p.mass());
        if let Some(a) = &split.absolutely_continuous {
            prop_assert!(abs_continuous(a, &reference));
        }
        if let Some(s) = &split.singular {
            prop_assert!(singular(s, &reference));
        }
    }

    #[test]
    fn ergodic_probabilities_are_mutually_singular(map in map_strategy(7)) {
        let ergodic = ergodic_probabilities(&map);
        for (i, p) in ergodic.iter().enumerate() {
            for q in &ergodic[i + 1..] {
                prop_assert!(singular(p, q));
            }
        }
    }

    #[test]
    fn envelopes_are_coherent_upper_probabilities(v in capacity_strategy(5)) {
        let m = v.width();
        prop_assert!(v.value(SubsetMask::empty(m)).is_zero());
        prop_assert!(v.value(SubsetMask::full(m)).is_one());
        prop_assert!(v.is_monotone());
        let all = sets(m);
        for &a in &all {
            for &b in &all {
                prop_assert!(v.value(a.union(&b)) <= &(v.value(a) + v.value(b)));
            }
            let best = v.core_vertices().iter().map(|p| p.measure(a)).max().unwrap();
            prop_assert_eq!(&best, v.value(a));
            let generator_best = v.generators().iter().map(|p| p.measure(a)).max().unwrap();
            prop_assert_eq!(&generator_best, v.value(a));
            // Positive capacity needs a point of positive capacity.
            if v.value(a).is_positive() {
                prop_assert!(!a.is_disjoint(&v.null_support()));
            }
        }
        for p in v.core_vertices() {
            prop_assert!(v.core_contains(p));
        }
    }

    #[test]
    fn core_vertices_solve_linear_programs((v, objective) in capacity_strategy(5).prop_flat_map(|v| { let m = v.width(); (Just(v), vec(-2i64..=2, m)) })) {
        let objective: Vec<Rational> = objective.into_iter().map(|x| Rational::from_integer(x.into())).collect();
        let vertex_max = v
            .core_vertices()
            .iter()
            .map(|p| p.mass().iter().zip(&objective).map(|(a, b)| a * b).sum::<Rational>())
            .max()
            .unwrap();
        match oracle_core_max(&v, &objective, None) {
            LpOutcome::Optimal { value, .. } => prop_assert_eq!(value, vertex_max),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn choquet_integral_properties((v, f, g, c) in capacity_strategy(5).prop_flat_map(|v| { let m = v.width(); (Just(v), function_strategy(m), function_strategy(m), -3i64..=3) })) {
        let m = v.width();
        let integral = v.choquet_integral(&f);
        prop_assert_eq!(&integral, &oracle_choquet(&v, &f));
        let shift = Rational::from_integer(c.into());
        let shifted = FunctionOnSpace::new(f.values().iter().map(|x| x + &shift).collect()).unwrap();
        prop_assert_eq!(v.choquet_integral(&shifted), &integral + &shift);
        let scaled = FunctionOnSpace::new(f.values().iter().map(|x| x * r(3, 2)).collect()).unwrap();
        prop_assert_eq!(v.choquet_integral(&scaled), &integral * r(3, 2));
        let larger = FunctionOnSpace::new(f.values().iter().zip(g.values()).map(|(a, b)| a.clone().max(b.clone())).collect()).unwrap();
        prop_assert!(v.choquet_integral(&larger) >= integral);
        // Changing f off the points of positive capacity changes nothing.
        let support = v.null_support();
        let patched = FunctionOnSpace::new((0..m).map(|p| if support.contains(p) { f.get(p).clone() } else { g.get(p).clone() }).collect()).unwrap();
        prop_assert_eq!(v.choquet_integral(&patched), integral);
        for a in sets(m) {
            prop_assert_eq!(&v.choquet_integral(&FunctionOnSpace::indicator(a)), v.value(a));
        }
    }

    #[test]
    fn generated_capacities_are_invariant((map, v) in system_strategy(6)) {
        prop_assert!(v.is_invariant_capacity(&map));
        prop_assert!(v.pushforward(&map) == v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fec_cells_are_ergodic_blocks((map, v) in system_strategy(6)) {
        let Ok(fec) = fec_decompose(&v, &map) else {
            let witness = zero_one_witness(&v, &map).unwrap();
            prop_assert!(map.is_invariant_set(witness));
            prop_assert!(v.value(witness).is_positive() && v.value(witness) < &Rational::one());
            return Ok(());
        };
        let cover = fec.cells().iter().fold(SubsetMask::empty(map.size()), |acc, c| {
            assert!(acc.is_disjoint(c));
            acc.union(c)
        });
        prop_assert!(cover.is_full());
        let invariant = map.invariant_sets();
        for &cell in fec.cells() {
            prop_assert!(map.is_invariant_set(cell));
            prop_assert!(v.value(cell).is_one());
            for &b in invariant.iter().filter(|b| b.is_subset_of(&cell)) {
                if v.value(b).is_one() {
                    prop_assert!(v.value(cell.difference(&b)).is_zero());
                }
            }
        }
        prop_assert_eq!(eigenvalue_one_multiplicity(&v, &map).unwrap(), fec.len());
        for p in v.invariant_core_vertices(&map) {
            let d = decompose_invariant(&v, &map, &fec, &p).unwrap();
            let rebuilt = Prob::mixture(&d.coefficients, fec.ergodic_measures());
            prop_assert_eq!(rebuilt, p);
        }
        for b in sets(map.size()) {
            for c in sets(map.size()) {
                prop_assert!(asymptotic_independence_choquet(&v, &map, &fec, b, c).equal);
            }
        }
    }

    /// Invariant probabilities absolutely continuous with respect to a core
    /// element lie in the core when the system has finite ergodic
    /// components. The ergodic ones span all of them.
    #[test]
    fn dominated_ergodic_probabilities_lie_in_core((map, v) in system_strategy(6)) {
        if fec_decompose(&v, &map).is_err() {
            return Ok(());
        }
        for q in ergodic_probabilities(&map) {
            if v.core_vertices().iter().any(|p| abs_continuous(&q, p)) {
                prop_assert!(v.core_contains(&q));
            }
        }
    }

    #[test]
    fn eigenfunctions_are_invariant_on_the_support((map, v) in system_strategy(6)) {
        let support = v.null_support();
        for b in invariant_function_basis(&v, &map).unwrap() {
            prop_assert!(b.compose(&map).agrees_on(&b, support));
        }
    }

    #[test]
    fn birkhoff_limit_properties((map, f) in map_strategy(6).prop_flat_map(|t| { let m = t.size(); (Just(t), function_strategy(m)) })) {
        let limit = birkhoff_limit(&map, &f);
        prop_assert_eq!(limit.compose(&map), limit.clone());
        let (m, period) = (map.size(), map.period());
        let cyclic = map.cyclic_points();
        for k in 1..=3 {
            let average = birkhoff_average(&map, &f, k * period);
            prop_assert!(average.agrees_on(&limit, cyclic));
        }
        // Off the cycles: S_{m+2L} − S_{m+L} = L·limit.
        let sum = |n: usize| {
            let avg = birkhoff_average(&map, &f, n);
            FunctionOnSpace::new(avg.values().iter().map(|x| x * Rational::from_integer((n as i64).into())).collect()).unwrap()
        };
        let (late, early) = (sum(m + 2 * period), sum(m + period));
        for p in 0..m {
            prop_assert_eq!(&((late.get(p) - early.get(p)) / Rational::from_integer((period as i64).into())), limit.get(p));
        }
        for q in ergodic_probabilities(&map) {
            prop_assert_eq!(q.integrate(&limit), q.integrate(&f));
        }
    }

    #[test]
    fn noninvariant_structure((map, p) in permutation_strategy(6).prop_flat_map(|t| { let m = t.size(); (Just(t), prob_strategy(m)) })) {
        let values = invariant_value_set(&p, &map);
        prop_assert!(values.len() <= 1 << map.components().len());
        let system = NoninvariantSystem::new(p.clone(), map.clone()).unwrap();
        let partition = irreducible_partition(&system).unwrap();
        for ((pj, qj), vj) in partition.conditionals.iter().zip(&partition.limits).zip(&partition.capacities) {
            for a in map.invariant_sets() {
                prop_assert_eq!(qj.measure(a), pj.measure(a));
            }
            for a in sets(map.size()) {
                prop_assert!(vj.value(a) >= &pj.measure(a).max(qj.measure(a)));
            }
        }
        let mut saturations = orbit_saturations(&map).unwrap();
        let mut invariant = map.invariant_sets();
        saturations.sort();
        invariant.sort();
        prop_assert_eq!(saturations, invariant);
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let value = r(n, d);
        let text = format_rational(&value);
        prop_assert_eq!(parse_rational(&text).unwrap(), value.clone());
        let (numer, denom) = text.split_once('/').unwrap();
        prop_assert_eq!(&numer.parse::<num_bigint::BigInt>().unwrap(), value.numer());
        prop_assert_eq!(&denom.parse::<num_bigint::BigInt>().unwrap(), value.denom());
    }
}
