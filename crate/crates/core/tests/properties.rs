mod common;

use std::collections::HashSet;

use fuzzy_tcp::elicitation::{build_partition, percentile, validate_partition, RatingSample, Survey};
use fuzzy_tcp::eval::{simulate, FaultModel};
use fuzzy_tcp::fuzzy::{centroid, pointwise_union, MembershipCurve, MembershipFunction, Shape, Universe};
use fuzzy_tcp::inference::{Engine, RuleBase};
use fuzzy_tcp::tcp::{self, Dataset, ExecutionPlan, ScheduleMode, TestCase};
use fuzzy_tcp::{defaults, Error};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn mf_strategy() -> impl Strategy<Value = MembershipFunction> {
    (prop::array::uniform4(-50.0..150.0_f64), any::<bool>()).prop_map(|(mut k, tri)| {
        k.sort_by(f64::total_cmp);
        if tri {
            MembershipFunction::triangular(k[0], k[1], k[3]).unwrap()
        } else {
            MembershipFunction::trapezoidal(k[0], k[1], k[2], k[3]).unwrap()
        }
    })
}

/// A clipped, aggregated curve on [0, 100] with positive area.
fn aggregate_strategy() -> impl Strategy<Value = MembershipCurve> {
    prop::collection::vec((prop::array::uniform4(0.0..100.0_f64), 0.05..=1.0_f64), 1..5)
        .prop_filter("needs area", |parts| parts.iter().any(|(k, _)| {
            let (lo, hi) = k.iter().fold((f64::MAX, f64::MIN), |(l, h), x| (l.min(*x), h.max(*x)));
            hi - lo > 0.5
        }))
        .prop_map(|parts| {
            let universe = Universe::new(0.0, 100.0).unwrap();
            parts.into_iter().fold(MembershipCurve::empty(universe), |acc, (mut k, h)| {
                k.sort_by(f64::total_cmp);
                let mf = MembershipFunction::trapezoidal(k[0], k[1], k[2], k[3]).unwrap();
                let clipped = MembershipCurve::from_function(&mf, universe).clip(h).unwrap();
                pointwise_union(&acc, &clipped).unwrap()
            })
        })
}

/// Random acyclic dataset: every prerequisite points at a lower id.
fn random_dataset(seed: u64) -> Dataset {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(1..=15_u32);
    let tests = (1..=n)
        .map(|id| {
            let mut prerequisites = Vec::new();
            if id > 1 {
                for _ in 0..rng.gen_range(0..=2) {
                    let size = rng.gen_range(1..=2.min(id - 1));
                    let mut pool: Vec<u32> = (1..id).collect();
                    pool.shuffle(&mut rng);
                    let mut group: Vec<u32> = pool[..size as usize].to_vec();
                    group.sort_unstable();
                    if !prerequisites.contains(&group) {
                        prerequisites.push(group);
                    }
                }
            }
            TestCase {
                id,
                name: format!("t{id}"),
                exec_time: rng.gen_range(1..=90) as f64,
                failure_rate: rng.gen_range(0..=100) as f64,
                prerequisites,
                recently_updated: rng.gen_bool(0.2),
            }
        })
        .collect();
    Dataset::new(tests).unwrap()
}

fn shuffled_ids(dataset: &Dataset, seed: u64) -> Vec<u32> {
    let mut ids = dataset.ids();
    ids.shuffle(&mut StdRng::seed_from_u64(seed));
    ids
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn membership_is_bounded(mf in mf_strategy(), x in -100.0..200.0_f64) {
        let mu = mf.eval(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&mu));
    }

    #[test]
    fn alpha_cuts_are_nested(mf in mf_strategy(), a1 in 0.01..=1.0_f64, a2 in 0.01..=1.0_f64) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let outer = mf.alpha_cut(lo).unwrap();
        let inner = mf.alpha_cut(hi).unwrap();
        prop_assert!(inner.is_subset_of(&outer), "{inner:?} not within {outer:?}");
    }

    #[test]
    fn centroid_converges(curve in aggregate_strategy(), r in 50_usize..500) {
        let coarse = centroid(&curve, r).unwrap();
        let fine = centroid(&curve, 10 * r).unwrap();
        prop_assert!((coarse - fine).abs() < 100.0 / r as f64, "{coarse} vs {fine} at r={r}");
    }

    #[test]
    fn centroid_lies_within_support(curve in aggregate_strategy()) {
        let (lo, hi) = curve.support().unwrap();
        let c = centroid(&curve, 1000).unwrap();
        prop_assert!(lo <= c && c <= hi, "{c} outside [{lo}, {hi}]");
    }

    #[test]
    fn rule_order_does_not_change_output(
        order in Just((0..20).collect::<Vec<usize>>()).prop_shuffle(),
        et in 0.0..=120.0_f64,
        fr in 0.0..=100.0_f64,
    ) {
        let base = defaults::rules();
        let permuted: Vec<_> = order.iter().map(|&i| base.rules()[i].clone()).collect();
        let shuffled = Engine::new(defaults::variables(), RuleBase::new(permuted).unwrap(), 1000).unwrap();
        let inputs = [("ExecutionTime", et), ("FailureRate", fr)];
        let a = defaults::engine().evaluate(&inputs).unwrap();
        let b = shuffled.evaluate(&inputs).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn run_once_plans_are_sound_and_complete(seed in any::<u64>(), order_seed in any::<u64>()) {
        let dataset = random_dataset(seed);
        let order = shuffled_ids(&dataset, order_seed);
        let plan = tcp::schedule_in_order(&order, &dataset, ScheduleMode::RunOnce).unwrap();
        tcp::verify_plan(&plan, &dataset).unwrap();
        let mut ids = plan.ids();
        prop_assert_eq!(ids.len(), dataset.len());
        ids.sort_unstable();
        prop_assert_eq!(ids, dataset.ids());
    }

    #[test]
    fn fresh_chain_plans_are_sound(seed in any::<u64>(), order_seed in any::<u64>()) {
        let dataset = random_dataset(seed);
        let order = shuffled_ids(&dataset, order_seed);
        let plan = tcp::schedule_in_order(&order, &dataset, ScheduleMode::FreshChain).unwrap();
        tcp::verify_plan(&plan, &dataset).unwrap();
        let distinct: HashSet<u32> = plan.ids().into_iter().collect();
        prop_assert_eq!(distinct.len(), dataset.len());
        prop_assert!(plan.steps.len() >= dataset.len());
    }

    #[test]
    fn scheduling_is_deterministic(seed in any::<u64>()) {
        let dataset = random_dataset(seed);
        let engine = defaults::engine();
        let a = tcp::prioritize(dataset.tests(), &engine).unwrap();
        let b = tcp::prioritize(dataset.tests(), &engine).unwrap();
        prop_assert_eq!(&a, &b);
        for mode in [ScheduleMode::RunOnce, ScheduleMode::FreshChain] {
            prop_assert_eq!(
                tcp::schedule(&a, &dataset, mode).unwrap(),
                tcp::schedule(&b, &dataset, mode).unwrap()
            );
        }
    }

    #[test]
    fn promotion_never_lowers_rank(et in 0.0..=120.0_f64, fr in 0.0..=100.0_f64, updated_first in any::<bool>()) {
        let make = |id, updated| TestCase {
            id,
            name: format!("t{id}"),
            exec_time: et,
            failure_rate: fr,
            prerequisites: vec![],
            recently_updated: updated,
        };
        let tests = vec![make(1, updated_first), make(2, !updated_first)];
        let ranked = tcp::prioritize(&tests, &defaults::engine()).unwrap();
        let updated_id = if updated_first { 1 } else { 2 };
        prop_assert_eq!(ranked[0].id, updated_id);
        let output = defaults::engine();
        let output = output.output();
        for p in &ranked {
            prop_assert!(p.final_score >= p.raw_score);
            prop_assert!(output.rank_of(&p.final_level) >= output.rank_of(&p.level));
        }
    }

    #[test]
    fn promoting_a_top_level_test_keeps_the_plan(et in 0.0..=8.0_f64, fr in 80.0..=100.0_f64) {
        let engine = defaults::engine();
        let mut tests = defaults::dataset().tests().to_vec();
        tests.push(TestCase {
            id: 99,
            name: "hot".into(),
            exec_time: et,
            failure_rate: fr,
            prerequisites: vec![vec![6]],
            recently_updated: false,
        });
        let before = Dataset::new(tests.clone()).unwrap();
        let top = tcp::score(before.get(99).unwrap(), &engine).unwrap();
        prop_assume!(top.level == "VeryHigh");
        tests.last_mut().unwrap().recently_updated = true;
        let after = Dataset::new(tests).unwrap();
        let plan = |d: &Dataset| {
            let ranked = tcp::prioritize(d.tests(), &engine).unwrap();
            tcp::schedule(&ranked, d, ScheduleMode::RunOnce).unwrap()
        };
        prop_assert_eq!(plan(&before), plan(&after));
    }

    #[test]
    fn duplicate_sample_moves_cores_by_at_most_one_gap(
        values in prop::collection::vec(10.0..=90.0_f64, 1..12),
        pick in any::<prop::sample::Index>(),
    ) {
        // Outer terms are shouldered to the universe, so probe the middle one.
        let survey = |vs: &[f64]| {
            let mut samples = vec![
                RatingSample { expert: "e".into(), value: 0.0, term: "Low".into() },
                RatingSample { expert: "e".into(), value: 100.0, term: "High".into() },
            ];
            samples.extend(vs.iter().map(|&value| RatingSample { expert: "e".into(), value, term: "Mid".into() }));
            Survey {
                variable: "X".into(),
                unit: "".into(),
                universe: Universe::new(0.0, 100.0).unwrap(),
                terms: vec!["Low".into(), "Mid".into(), "High".into()],
                samples,
            }
        };
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let mut extended = values.clone();
        extended.push(*pick.get(&values));

        let core = |vs: &[f64]| build_partition(&survey(vs)).unwrap().terms()[1].mf.core();
        let (b0, c0) = core(&values);
        let (b1, c1) = core(&extended);
        prop_assert!((b0 - b1).abs() <= gap + 1e-9 && (c0 - c1).abs() <= gap + 1e-9);
        prop_assert!((b0 - percentile(&sorted, 0.25)).abs() < 1e-9);
        prop_assert!((c0 - percentile(&sorted, 0.75)).abs() < 1e-9);
    }

    #[test]
    fn built_partitions_validate(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let k = rng.gen_range(1..=7);
        let mut samples = Vec::new();
        for i in 0..k {
            let centre = (i as f64 + 0.5) * 100.0 / k as f64;
            for _ in 0..rng.gen_range(1..=6) {
                let v: f64 = centre + rng.gen_range(-20.0..=20.0);
                // Snap some ratings to integers so duplicates are common.
                let v = if rng.gen_bool(0.5) { v.round() } else { v };
                samples.push(RatingSample { expert: "e".into(), value: v.clamp(0.0, 100.0), term: format!("T{i}") });
            }
        }
        let survey = Survey {
            variable: "X".into(),
            unit: "".into(),
            universe: Universe::new(0.0, 100.0).unwrap(),
            terms: (0..k).map(|i| format!("T{i}")).collect(),
            samples,
        };
        match build_partition(&survey) {
            Ok(var) => {
                prop_assert!(validate_partition(&var).is_empty());
                for t in var.terms() {
                    prop_assert!(matches!(t.mf.shape(), Shape::Triangular | Shape::Trapezoidal));
                }
            }
            Err(Error::InconsistentSurvey(_)) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn failures_found_grows_with_plan_prefix(seed in any::<u64>(), fault_seed in any::<u64>()) {
        let dataset = defaults::dataset();
        let mut rng = StdRng::seed_from_u64(fault_seed);
        let faults: Vec<u32> = dataset.ids().into_iter().filter(|_| rng.gen_bool(0.3)).collect();
        let faults = FaultModel::new(faults, &dataset).unwrap();
        let plan = tcp::schedule_in_order(&shuffled_ids(&dataset, seed), &dataset, ScheduleMode::FreshChain).unwrap();
        let mut last = 0;
        for k in 0..=plan.steps.len() {
            let prefix = ExecutionPlan { mode: plan.mode, steps: plan.steps[..k].to_vec() };
            let r = simulate("p", &prefix, &dataset, &faults).unwrap();
            prop_assert!(r.failures_found >= last);
            prop_assert!(r.failures_found <= faults.len());
            last = r.failures_found;
        }
        prop_assert_eq!(last, faults.len());
    }
}

#[test]
fn fuzzy_order_reaches_failures_no_later_than_dataset_order() {
    let dataset = defaults::dataset();
    let engine = defaults::engine();
    // The five tests with the highest failure rates.
    let mut by_rate: Vec<&TestCase> = dataset.tests().iter().collect();
    by_rate.sort_by(|a, b| b.failure_rate.total_cmp(&a.failure_rate).then(a.id.cmp(&b.id)));
    let faults = FaultModel::new(by_rate[..5].iter().map(|t| t.id), &dataset).unwrap();

    let ranked = tcp::prioritize(dataset.tests(), &engine).unwrap();
    let fuzzy = tcp::schedule(&ranked, &dataset, ScheduleMode::RunOnce).unwrap();
    let unsorted = tcp::schedule_in_order(&dataset.ids(), &dataset, ScheduleMode::RunOnce).unwrap();
    let a = simulate("fuzzy", &fuzzy, &dataset, &faults).unwrap();
    let b = simulate("unsorted", &unsorted, &dataset, &faults).unwrap();
    assert_eq!(a.failures_found, 5);
    assert_eq!(b.failures_found, 5);
    assert!(a.time_to_all_failures <= b.time_to_all_failures, "{a:?} vs {b:?}");
}
