//! Exact-rational probabilistic secrecy: conditioned point measures,
//! run-level conditionals, independence, and the syntactic gap that
//! perfect recall closes.
//!
//! ```bash
//! cargo run --example probabilistic
//! ```

use std::collections::BTreeSet;

use runsec::epistemic::{CmpOp, Evaluator, Formula, Interpretation};
use runsec::fixtures;
use runsec::kernel::Point;
use runsec::prob::{
    check_independence, check_run_based_prob_secrecy, common_prior_for_sync_standard,
    ht_point_measure, oracle_prob_syntactic, SyntacticVariant,
};
use runsec::rat::format_ratio;

fn main() {
    // the asymmetric three-run system
    let sys = fixtures::ex2();
    let mu = fixtures::ex2_measure(&sys);
    let a1 = sys.agent("1").unwrap();
    let a2 = sys.agent("2").unwrap();

    // the conditioned point measure at agent 1's information set [X]
    let pm = ht_point_measure(&sys, &mu, a1, Point::new(0, 0)).unwrap();
    let b_slice: BTreeSet<Point> = pm
        .information_set_points()
        .iter()
        .copied()
        .filter(|&p| sys.local_state(a2, p) == "B")
        .collect();
    println!(
        "measure of the [B] slice inside K_1(r1,0): {}",
        format_ratio(&pm.measure(&b_slice).unwrap())
    );
    let split: BTreeSet<Point> = [Point::new(0, 0)].into_iter().collect();
    println!("a split run fiber is non-measurable: {:?}", pm.measure(&split).err());

    // secrecy is asymmetric here: 2's states stay equally likely for 1,
    // but 1's states do not stay equally likely for 2
    let v12 = check_run_based_prob_secrecy(&sys, &mu, a1, a2).unwrap();
    let v21 = check_run_based_prob_secrecy(&sys, &mu, a2, a1).unwrap();
    println!("run-based probabilistic secrecy of 2 wrt 1: {}", v12.holds);
    println!("run-based probabilistic secrecy of 1 wrt 2: {}", v21.holds);
    if let Some(cx) = v21.counterexample {
        println!("  witness: {cx}");
    }
    println!(
        "pairwise independence of the two agents' run sets: {}",
        check_independence(&sys, &mu, a1, a2).unwrap()
    );

    // the four-run synchronous system: secrecy holds but no constant
    // works syntactically, because agent 2 forgets its first state
    let sys3 = fixtures::ex3();
    let mu3 = fixtures::ex3_measure(&sys3);
    let b1 = sys3.agent("1").unwrap();
    let b2 = sys3.agent("2").unwrap();
    println!(
        "\nfour-run system: run-based probabilistic secrecy of 2 wrt 1: {}",
        check_run_based_prob_secrecy(&sys3, &mu3, b1, b2).unwrap().holds
    );
    println!(
        "syntactic run-operator variant: {}",
        oracle_prob_syntactic(&sys3, &mu3, b1, b2, SyntacticVariant::RunBased, 16).unwrap()
    );

    let mut interp = Interpretation::new();
    interp.define_agent_locals(&sys3, "p", b2, &["A", "D1"]);
    let ev = Evaluator::new(&sys3, &interp, Some(&mu3));
    for (label, point, q) in [
        ("from [X]", Point::new(0, 0), "1"),
        ("from [Q]", Point::new(2, 0), "1/2"),
    ] {
        let phi = Formula::pr_cmp(
            b1,
            Formula::once(Formula::prim("p")),
            CmpOp::Eq,
            runsec::rat::parse_ratio(q).unwrap(),
        );
        println!(
            "  Pr_1(once p) = {q} {label}: {}",
            ev.eval(point, &phi).unwrap()
        );
    }

    // the halving prior reconciles per-point and per-run probabilities in
    // synchronous systems
    let cp = common_prior_for_sync_standard(&sys3, &mu3).unwrap();
    println!(
        "\ncommon prior weight at (r1,0): {}, at (r1,1): {}",
        format_ratio(cp.weight(Point::new(0, 0))),
        format_ratio(cp.weight(Point::new(0, 1)))
    );
}
