//! The JSON file format: emit a fixture with its expected verdicts, load
//! it back, and run the expect block — the same path the command line
//! takes.
//!
//! ```bash
//! cargo run --example system_files
//! ```

use runsec::report::{fixture, run_checks, run_suite};
use runsec::specfile::{load_str, to_json};

fn main() {
    // a fixture document carries the system, its measure, and the
    // verdicts it is expected to produce
    let doc = fixture("EX2", &[]).unwrap();
    let text = to_json(&doc);
    println!("--- EX2 as a document (truncated) ---");
    for line in text.lines().take(24) {
        println!("{line}");
    }
    println!("...\n");

    let loaded = load_str(&text).unwrap();
    let report = run_checks(&loaded, None).unwrap();
    print!("{}", report.to_text());

    // narrowing to a selection
    let only = vec!["run-based-prob-secrecy".to_string()];
    let narrowed = run_checks(&loaded, Some(&only)).unwrap();
    println!("\nselected checks only:");
    print!("{}", narrowed.to_text());

    // the randomized suites ship reproducing documents on failure; a
    // passing run is silent
    let suite = run_suite("runbased-oracle", 7, 50, None).unwrap();
    print!("\n{}", suite.to_text());
}
