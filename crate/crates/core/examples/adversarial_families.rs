//! Secrecy when the probability of the initial choice is unknown: run
//! partitions with per-cell measures, evidence, and whole-family secrecy.
//!
//! ```bash
//! cargo run --example adversarial_families
//! ```

use std::collections::BTreeMap;

use runsec::adversarial::{
    check_evidential_equivalence, check_generalized_secrecy, check_no_evidence,
    sample_family_measure, AdversarialSystem, DerivedTarget, EvidentialOutcome, InitStructure,
    MeasureFamily,
};
use runsec::fixtures;
use runsec::rat::{format_ratio, ratio};

fn main() {
    // the cosmic channel, partitioned by the typed word: no distribution
    // over words is assumed, only the within-cell behavior is known
    let n = 4usize;
    let eps = ratio(1, 10);
    let (sys, _) = fixtures::cosmic(n, &eps);
    let cells = fixtures::cosmic_cells(n, &eps);
    let assignment = sys
        .runs()
        .iter()
        .map(|r| {
            let x: usize = if let Some(rest) = r.id.strip_prefix("nr-") {
                rest.parse().unwrap()
            } else {
                r.id.strip_prefix("ray-").unwrap().split('-').next().unwrap().parse().unwrap()
            };
            vec![0, x]
        })
        .collect();
    let init = InitStructure {
        choices: vec![
            vec!["-".to_string()],
            (0..n).map(|x| format!("w{x}")).collect(),
        ],
        assignment,
    };
    let adv = AdversarialSystem::with_init(sys, init, cells).unwrap();
    let alice = adv.base().agent("alice").unwrap();

    // seeing a word is evidence: its likelihood differs across the cells
    let v = check_no_evidence(&adv, alice).unwrap();
    println!("observer obtains no evidence about the typed word: {}", v.holds);
    if let Some(cx) = v.counterexample {
        println!("  {cx}");
    }

    // a family member: mix the cells with explicit weights; conditioning
    // on a cell recovers its measure
    let uniform: BTreeMap<String, _> = adv
        .cells()
        .iter()
        .map(|c| (c.id.clone(), ratio(1, n as i64)))
        .collect();
    let mu = sample_family_measure(&adv, &uniform).unwrap();
    let first = &adv.cells()[0];
    println!(
        "\nuniform mixture: cell {} has mass {}",
        first.id,
        format_ratio(&mu.mass(first.runs.iter().copied()))
    );

    // generalized secrecy quantifies over every admissible mixture; the
    // sampled members refute it here
    let g = check_generalized_secrecy(
        &adv,
        alice,
        &DerivedTarget::OthersInitChoice,
        &MeasureFamily::InitProducts,
        5,
        7,
    )
    .unwrap();
    println!("generalized secrecy of the typed word: {}", g.holds);
    println!("  {}", g.witness_note);

    // and the finite no-evidence criterion decides the same question
    match check_evidential_equivalence(&adv, alice, 5, 7).unwrap() {
        EvidentialOutcome::Checked { agree, no_evidence, generalized } => {
            println!(
                "\nequivalence check: no-evidence={} generalized={} agree={}",
                no_evidence.holds, generalized.holds, agree
            );
        }
        EvidentialOutcome::HypothesisNotMet { note } => {
            println!("\nequivalence not applicable: {note}");
        }
    }
}
