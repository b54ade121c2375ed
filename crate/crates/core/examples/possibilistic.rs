//! Tour of the possibilistic secrecy notions on the two standard
//! separating systems.
//!
//! ```bash
//! cargo run --example possibilistic
//! ```

use runsec::fixtures;
use runsec::kernel::{Allowability, Point};
use runsec::secrecy::{
    check_c_secrecy, check_nondeducibility, check_run_based_secrecy, check_synchronous_secrecy,
    check_total_secrecy,
};

fn main() {
    // Two synchronous runs; agent 1 forgets at time 1 which run it is in.
    let sys = fixtures::ex1();
    let a1 = sys.agent("1").unwrap();
    let a2 = sys.agent("2").unwrap();
    println!("system EX1: {} runs, horizon {}", sys.run_count(), sys.horizon());
    println!("  agent 2 has perfect recall: {}", sys.has_perfect_recall(a2));
    println!("  agent 1 has perfect recall: {}", sys.has_perfect_recall(a1));

    // Total secrecy asks every pair of information sets to intersect;
    // synchronous systems can never satisfy it across times.
    let total = check_total_secrecy(&sys, a1, a2).unwrap();
    println!("  total secrecy of 2 wrt 1: {}", total.holds);

    // Relativized to "agent 1 may know the time", secrecy holds.
    let sync = check_synchronous_secrecy(&sys, a1, a2).unwrap();
    println!("  synchronous secrecy of 2 wrt 1: {}", sync.holds);
    let semi = check_c_secrecy(&sys, a1, a2, &Allowability::Semisynchronous(1)).unwrap();
    println!("  semisynchronous(1) secrecy of 2 wrt 1: {}", semi.holds);

    // But agent 1 knows at time 0 which run it is on, so matching at the
    // level of whole runs fails.
    let run_based = check_run_based_secrecy(&sys, a1, a2).unwrap();
    println!(
        "  run-based secrecy of 2 wrt 1: {} ({})",
        run_based.holds,
        run_based.counterexample.map(|c| c.to_string()).unwrap_or_default()
    );

    // The asynchronous three-run system flips the comparison: run-based
    // secrecy holds, per-time secrecy is not even applicable.
    let sys2 = fixtures::ex2();
    let b1 = sys2.agent("1").unwrap();
    let b2 = sys2.agent("2").unwrap();
    println!("\nsystem EX2: {} runs, asynchronous", sys2.run_count());
    println!(
        "  run-based secrecy of 2 wrt 1: {}",
        check_run_based_secrecy(&sys2, b1, b2).unwrap().holds
    );
    println!(
        "  total secrecy of 2 wrt 1: {}",
        check_total_secrecy(&sys2, b1, b2).unwrap().holds
    );

    // Nondeducibility over an abstract world set: the views are the two
    // agents' local states at every point.
    let points: Vec<Point> = sys2.points().collect();
    let g: Vec<&str> = points.iter().map(|&p| sys2.local_state(b1, p)).collect();
    let h: Vec<&str> = points.iter().map(|&p| sys2.local_state(b2, p)).collect();
    let nd = check_nondeducibility(&g, &h);
    println!("  nondeducibility between the two views over points: {}", nd.holds);
}
