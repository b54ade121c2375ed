//! The cosmic-ray channel: a system that is perfectly secret in the
//! possibilistic sense and badly leaky in the probabilistic sense.
//!
//! One of n words is typed; with probability 1-eps it is forwarded
//! verbatim, otherwise a uniformly random word is shown. Every (typed,
//! seen) pair is possible, so nothing can be ruled out. But seeing a word
//! moves its posterior from 1/n to nearly 1.
//!
//! ```bash
//! cargo run --example cosmic_ray
//! ```

use runsec::fixtures;
use runsec::prob::check_prob_sync_secrecy;
use runsec::rat::{format_ratio, ratio};
use runsec::secrecy::check_synchronous_secrecy;

fn main() {
    let n = 4usize;
    let eps = ratio(1, 10);
    let (sys, mu) = fixtures::cosmic(n, &eps);
    let alice = sys.agent("alice").unwrap();
    let bob = sys.agent("bob").unwrap();

    println!(
        "cosmic channel with {n} words, ray probability {}: {} runs",
        format_ratio(&eps),
        sys.run_count()
    );
    println!(
        "possibilistic per-time secrecy of the typist: {}",
        check_synchronous_secrecy(&sys, alice, bob).unwrap().holds
    );
    let v = check_prob_sync_secrecy(&sys, &mu, alice, bob).unwrap();
    println!("probabilistic per-time secrecy: {}", v.holds);
    if let Some(cx) = v.counterexample {
        println!("  witness: {cx}");
    }

    // posteriors after seeing word 0, by conditioning on the observer's
    // information set
    let seen = sys
        .points()
        .find(|&p| sys.local_state(alice, p) == "see:w0@2")
        .unwrap();
    let k_alice = sys.info_set(alice, seen).unwrap();
    println!("\nposterior that word x was typed, after seeing w0:");
    for x in 0..n {
        let typed = sys
            .points()
            .find(|&p| sys.local_state(bob, p) == format!("in:w{x}@2"))
            .unwrap();
        let k_bob = sys.info_set(bob, typed).unwrap();
        let posterior = mu.conditional_runs(&k_bob.runs, &k_alice.runs);
        println!("  w{x}: {}", format_ratio(&posterior));
    }
    println!("(the prior for each word would be 1/{n})");
}
