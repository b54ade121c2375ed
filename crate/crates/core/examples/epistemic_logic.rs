//! The knowledge logic and the enumeration oracles that re-decide the
//! secrecy notions from their syntactic characterizations.
//!
//! ```bash
//! cargo run --example epistemic_logic
//! ```

use runsec::epistemic::{
    is_j_local, oracle_c_secrecy, oracle_run_based_secrecy, parse_formula, Evaluator, Formula,
    Interpretation, DEFAULT_INFO_SET_BOUND,
};
use runsec::fixtures;
use runsec::kernel::{Allowability, Point};
use runsec::secrecy::{check_c_secrecy, check_run_based_secrecy};

fn main() {
    let sys = fixtures::ex1();
    let a1 = sys.agent("1").unwrap();
    let a2 = sys.agent("2").unwrap();

    // a proposition that only reads agent 2's local state
    let mut interp = Interpretation::new();
    interp.define_agent_locals(&sys, "p", a2, &["B1", "C1"]);
    let ev = Evaluator::new(&sys, &interp, None);

    let p = Formula::prim("p");
    println!("p at (r1,1): {}", ev.eval(Point::new(0, 1), &p).unwrap());
    println!(
        "K_1 p at (r1,1): {}",
        ev.eval(Point::new(0, 1), &Formula::knows(a1, p.clone())).unwrap()
    );
    println!(
        "P_1 p at (r1,1): {}",
        ev.eval(Point::new(0, 1), &Formula::poss(a1, p.clone())).unwrap()
    );
    println!(
        "once-p at (r1,0): {}",
        ev.eval(Point::new(0, 0), &Formula::once(p.clone())).unwrap()
    );
    println!("p is 2-local: {}", is_j_local(&sys, &interp, None, a2, &p).unwrap());

    // the same formulas in the surface syntax the command line accepts
    let parsed = parse_formula(&sys, "(P 1 (once p))").unwrap();
    println!(
        "(P 1 (once p)) at (r2,0): {}",
        ev.eval(Point::new(1, 0), &parsed).unwrap()
    );

    // the oracles quantify over all interpretations by enumerating the
    // possible extensions of 2-local formulas (unions of 2-information
    // sets) and must agree with the semantic checks
    let b = DEFAULT_INFO_SET_BOUND;
    let sem_sync = check_c_secrecy(&sys, a1, a2, &Allowability::Synchronous).unwrap().holds;
    let orc_sync = oracle_c_secrecy(&sys, a1, a2, &Allowability::Synchronous, b).unwrap();
    println!("\nper-time secrecy: semantic {sem_sync}, oracle {orc_sync}");

    let sem_run = check_run_based_secrecy(&sys, a1, a2).unwrap().holds;
    let orc_run = oracle_run_based_secrecy(&sys, a1, a2, b).unwrap();
    println!("run-based secrecy: semantic {sem_run}, oracle {orc_run}");

    let sys2 = fixtures::ex2();
    let b1 = sys2.agent("1").unwrap();
    let b2 = sys2.agent("2").unwrap();
    println!(
        "run-based on the asynchronous system: semantic {}, oracle {}",
        check_run_based_secrecy(&sys2, b1, b2).unwrap().holds,
        oracle_run_based_secrecy(&sys2, b1, b2, b).unwrap()
    );
}
