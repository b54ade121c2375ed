//! One definition, three uncertainty scales: the plausibilistic checks
//! specialize to the possibilistic and probabilistic ones by swapping the
//! value domain.
//!
//! ```bash
//! cargo run --example plausibility
//! ```

use std::collections::BTreeSet;

use runsec::fixtures;
use runsec::plaus::{
    check_plaus_secrecy, check_plaus_symmetry_lemmas, measure_vector_space,
    non_commutative_space, probability_space, trivial_space, verify_axioms, LemmaOutcome,
    PlausVariant,
};
use runsec::prob::{check_run_based_prob_secrecy, RunMeasure};
use runsec::secrecy::check_run_based_secrecy;

fn main() {
    let sys = fixtures::ex2();
    let mu = fixtures::ex2_measure(&sys);
    let uniform = RunMeasure::uniform(&sys).unwrap();
    let a1 = sys.agent("1").unwrap();
    let a2 = sys.agent("2").unwrap();

    // every rule satisfies the conditional-space axioms on this carrier
    for (label, space) in [
        ("two-valued", trivial_space(&sys)),
        ("probability", probability_space(&sys, &mu)),
        ("measure-vector", measure_vector_space(&sys, &[mu.clone(), uniform.clone()])),
    ] {
        verify_axioms(&space).unwrap();
        println!("axioms hold for the {label} rule");
    }

    // the two-valued domain recovers the possibilistic verdict
    let triv = check_plaus_secrecy(&trivial_space(&sys), a1, a2, PlausVariant::RunBased).unwrap();
    let poss = check_run_based_secrecy(&sys, a1, a2).unwrap();
    println!("\ntwo-valued run-based: {} (possibilistic: {})", triv.holds, poss.holds);

    // the rational domain recovers the probabilistic verdict, in both the
    // holding and the failing direction
    for (i, j, label) in [(a1, a2, "2 wrt 1"), (a2, a1, "1 wrt 2")] {
        let pl = check_plaus_secrecy(&probability_space(&sys, &mu), i, j, PlausVariant::RunBased)
            .unwrap();
        let pr = check_run_based_prob_secrecy(&sys, &mu, i, j).unwrap();
        println!("probability run-based {label}: {} (direct: {})", pl.holds, pr.holds);
    }

    // a vector of measures checks a whole family at once
    let vec_space = measure_vector_space(&sys, &[mu.clone(), uniform.clone()]);
    let joint = check_plaus_secrecy(&vec_space, a1, a2, PlausVariant::RunBased).unwrap();
    let per: Vec<bool> = [&mu, &uniform]
        .iter()
        .map(|m| check_run_based_prob_secrecy(&sys, m, a1, a2).unwrap().holds)
        .collect();
    println!("vector run-based: {} (per measure: {:?})", joint.holds, per);

    // the conditioning lemmas behind symmetry, on one instance
    let blocks: Vec<BTreeSet<usize>> = vec![
        [0].into_iter().collect(),
        [1, 2].into_iter().collect(),
    ];
    let x: BTreeSet<usize> = [0, 1].into_iter().collect();
    match check_plaus_symmetry_lemmas(&probability_space(&sys, &mu), &blocks, &x).unwrap() {
        LemmaOutcome::Verified(ok) => println!("\nconditioning lemmas on the instance: {ok}"),
        LemmaOutcome::Skipped { reason } => println!("\nskipped: {reason}"),
    }
    // a non-commutative product gates the symmetry lemma off
    match check_plaus_symmetry_lemmas(&non_commutative_space(&sys, &mu), &blocks, &x).unwrap() {
        LemmaOutcome::Skipped { reason } => println!("non-commutative domain: {reason}"),
        LemmaOutcome::Verified(_) => unreachable!("gate must trigger"),
    }
}
