//! Property tests over randomly generated systems.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use runsec::epistemic::{is_j_local, Evaluator, Formula, Interpretation};
use runsec::gen;
use runsec::kernel::{AgentId, Allowability, Point};
use runsec::prob::ht_point_measure;
use runsec::secrecy::{check_c_secrecy, check_run_based_secrecy, check_total_secrecy};

proptest! {
    #[test]
    fn information_sets_partition_points(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::arbitrary_system(&mut rng);
        for a in 0..sys.agent_count() {
            let i = AgentId(a);
            let total: usize = sys.info_sets(i).iter().map(|k| k.points.len()).sum();
            prop_assert_eq!(total, sys.point_count());
            for p in sys.points() {
                let k = sys.info_set(i, p).unwrap();
                prop_assert!(k.contains(p));
                prop_assert!(!k.runs.is_empty());
            }
        }
    }

    #[test]
    fn synchronous_systems_have_time_uniform_information_sets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::synchronous_system(&mut rng);
        for a in 0..sys.agent_count() {
            for k in sys.info_sets(AgentId(a)) {
                let t0 = k.points[0].time;
                prop_assert!(k.points.iter().all(|p| p.time == t0));
            }
        }
    }

    #[test]
    fn recall_key_property(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::recall_system(&mut rng, false);
        for a in 0..sys.agent_count() {
            let i = AgentId(a);
            prop_assert!(sys.has_perfect_recall(i));
            for p in sys.points() {
                let k1 = sys.info_set(i, p).unwrap().clone();
                for &q in &k1.points {
                    for m2 in 0..=p.time {
                        let k2 = sys.info_set(i, Point::new(p.run, m2)).unwrap();
                        prop_assert!((0..=q.time)
                            .any(|m| k2.contains(Point::new(q.run, m))));
                    }
                }
            }
        }
    }

    #[test]
    fn total_secrecy_implies_run_based_and_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::arbitrary_system(&mut rng);
        let (a1, a2) = (AgentId(0), AgentId(1));
        let total_ij = check_total_secrecy(&sys, a1, a2).unwrap().holds;
        let total_ji = check_total_secrecy(&sys, a2, a1).unwrap().holds;
        prop_assert_eq!(total_ij, total_ji);
        if total_ij {
            prop_assert!(check_run_based_secrecy(&sys, a1, a2).unwrap().holds);
        }
        let run_ij = check_run_based_secrecy(&sys, a1, a2).unwrap().holds;
        let run_ji = check_run_based_secrecy(&sys, a2, a1).unwrap().holds;
        prop_assert_eq!(run_ij, run_ji);
        // the everything-allowed relativization coincides with total secrecy
        prop_assert_eq!(
            check_c_secrecy(&sys, a1, a2, &Allowability::Total).unwrap().holds,
            total_ij
        );
    }

    #[test]
    fn local_formulas_have_union_extensions(seed in any::<u64>(), mask in any::<u32>()) {
        // both directions of the semantic characterization of locality:
        // unions of j-information sets are j-local, and any j-local
        // proposition's extension is such a union
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::arbitrary_system(&mut rng);
        let j = AgentId(1);
        let sets = sys.info_sets(j);
        let chosen: BTreeSet<usize> = (0..sets.len())
            .filter(|s| mask & (1 << (s % 32)) != 0)
            .collect();
        let mut interp = Interpretation::new();
        let union: BTreeSet<Point> = chosen
            .iter()
            .flat_map(|&s| sets[s].points.iter().copied())
            .collect();
        interp.define(&sys, "p", |_, p| union.contains(&p));
        let phi = Formula::prim("p");
        prop_assert!(is_j_local(&sys, &interp, None, j, &phi).unwrap());
        // converse: the extension is exactly the union of the
        // information sets it touches
        let ev = Evaluator::new(&sys, &interp, None);
        let ext = ev.extension(&phi).unwrap();
        let horizon = sys.horizon();
        for p in sys.points() {
            let truth = ext[p.run * (horizon + 1) + p.time];
            prop_assert_eq!(truth, chosen.contains(&sys.info_set_index(j, p)));
        }
    }

    #[test]
    fn once_is_time_independent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::arbitrary_system(&mut rng);
        let mut interp = Interpretation::new();
        let target = sys.global_state_id(Point::new(0, 0));
        interp.define(&sys, "p", |s, p| s.global_state_id(p) == target);
        let ev = Evaluator::new(&sys, &interp, None);
        let ext = ev.extension(&Formula::once(Formula::prim("p"))).unwrap();
        let h = sys.horizon();
        for r in 0..sys.run_count() {
            let slice: BTreeSet<bool> = (0..=h).map(|t| ext[r * (h + 1) + t]).collect();
            prop_assert_eq!(slice.len(), 1);
        }
    }

    #[test]
    fn conditioned_point_measures_match_run_conditionals(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::arbitrary_system(&mut rng);
        let mu = gen::random_measure(&mut rng, &sys);
        for a in 0..sys.agent_count() {
            let i = AgentId(a);
            for k in sys.info_sets(i) {
                let pm = ht_point_measure(&sys, &mu, i, k.points[0]).unwrap();
                // every union of run fibers is measurable with the
                // conditional run probability
                for &r in k.runs.iter().take(3) {
                    let fiber: BTreeSet<Point> =
                        k.points.iter().copied().filter(|p| p.run == r).collect();
                    let got = pm.measure(&fiber).unwrap();
                    let want = mu.conditional_runs(
                        &[r].into_iter().collect(),
                        &k.runs,
                    );
                    prop_assert_eq!(got, want);
                }
            }
        }
    }

    #[test]
    fn documents_round_trip_check_equivalent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::arbitrary_system(&mut rng);
        let mu = gen::random_measure(&mut rng, &sys);
        let doc = runsec::specfile::emit_system(&sys, Some(&mu));
        let loaded = runsec::specfile::load_str(&runsec::specfile::to_json(&doc)).unwrap();
        let sys2 = loaded.system.unwrap();
        let mu2 = loaded.measure.unwrap();
        let (a1, a2) = (AgentId(0), AgentId(1));
        prop_assert_eq!(
            check_total_secrecy(&sys, a1, a2).unwrap().holds,
            check_total_secrecy(&sys2, a1, a2).unwrap().holds
        );
        prop_assert_eq!(
            runsec::prob::check_run_based_prob_secrecy(&sys, &mu, a1, a2).unwrap().holds,
            runsec::prob::check_run_based_prob_secrecy(&sys2, &mu2, a1, a2).unwrap().holds
        );
    }
}
