//! The classic trace-based properties and where they sit relative to the
//! run-system secrecy notions: the xor covert channel defeats
//! recombination-style noninterference, strategy-proofness catches it, and
//! the probabilistic formulations all agree.
//!
//! ```bash
//! cargo run --example trace_noninterference
//! ```

use runsec::fixtures;
use runsec::secrecy::{check_synchronous_secrecy, check_total_secrecy};
use runsec::traces::{
    all_deterministic_strategies, check_nos, check_pni, nos_as_strategy_secrecy,
    DEFAULT_ENUMERATION_BOUND,
};

fn main() {
    // per step the low output is (previous high output) xor (current high
    // input); each marginal looks free, so high inputs recombine
    let sigma = fixtures::xor_system(3);
    println!("xor channel with 3 steps: {} traces", sigma.traces().len());
    println!("  high-input recombination (noninterference): {}", sigma.check_gni().holds);
    println!("  full separability: {}", sigma.check_separability().holds);

    // but a high agent who knows the rule can force the low outputs
    let strategies = all_deterministic_strategies(&sigma, DEFAULT_ENUMERATION_BOUND).unwrap();
    println!("  deterministic high strategies: {}", strategies.len());
    let nos = check_nos(&sigma, &strategies).unwrap();
    println!("  nondeducibility on strategies: {}", nos.holds);
    println!("    {}", nos.witness_note);

    // the same verdict through the run framework: secrecy of the strategy
    // identity in the protocol-annotated system (smaller instance so the
    // annotated system stays tiny)
    let small = fixtures::xor_system(1);
    let small_strats = all_deterministic_strategies(&small, DEFAULT_ENUMERATION_BOUND).unwrap();
    let direct = check_nos(&small, &small_strats).unwrap();
    let reduced = nos_as_strategy_secrecy(&small, &small_strats).unwrap();
    println!("  one-step channel: direct {} = reduction {}", direct.holds, reduced.holds);

    // probabilistic strategy-proofness: two transmitting protocols, a fair
    // coin on the high output; all four formulations fail together
    let pps = fixtures::gs_xor(3);
    let report = check_pni(&pps, 5, 7).unwrap();
    println!("\nprotocol family over the xor channel:");
    println!("  probabilistic noninterference: {}", report.pni.holds);
    println!("  no evidence about the high protocol: {}", report.no_evidence.holds);
    println!("  generalized run-based secrecy: {}", report.generalized_run_based.holds);
    println!("  generalized per-time secrecy: {}", report.generalized_sync.holds);
    println!("  all four agree: {}", report.all_agree);

    // asynchronous traces: an output that may happen once, never after a
    // high input; each agent's view stays compatible with everything, yet
    // interleaving-based recombination fails
    let once = fixtures::l_o_once(3);
    let sys = once.to_runs(DEFAULT_ENUMERATION_BOUND).unwrap();
    let l = sys.agent("L").unwrap();
    let h = sys.agent("H").unwrap();
    println!("\nonce-only output system ({} traces):", once.traces().len());
    println!(
        "  total secrecy of the high agent: {}",
        check_total_secrecy(&sys, l, h).unwrap().holds
    );
    println!("  asynchronous separability: {}", once.check_separability().holds);
    println!("  closed under interleavings: {}", once.is_closed_under_interleavings());

    // under full interleaving closure the two notions coincide
    let shuffle = fixtures::shuffle_product(2, 2);
    let ssys = shuffle.to_runs(DEFAULT_ENUMERATION_BOUND).unwrap();
    let sl = ssys.agent("L").unwrap();
    let sh = ssys.agent("H").unwrap();
    println!("\nshuffle product:");
    println!("  asynchronous separability: {}", shuffle.check_separability().holds);
    println!(
        "  total secrecy: {}",
        check_total_secrecy(&ssys, sl, sh).unwrap().holds
    );

    // the finite rendering of the prefix/full-trace gap: secrecy inside a
    // truncated observation window, no full-trace recombination
    let gap = fixtures::sync_limit_gap(3);
    let window = gap.to_runs_windowed(gap.trace_len() - 1).unwrap();
    let wl = window.agent("L").unwrap();
    let wh = window.agent("H").unwrap();
    println!("\nprefix/full-trace gap system:");
    println!(
        "  per-time secrecy inside the window: {}",
        check_synchronous_secrecy(&window, wl, wh).unwrap().holds
    );
    println!("  full-trace separability: {}", gap.check_separability().holds);
}
