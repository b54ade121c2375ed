//! Secrecy and information-flow checks for finite multiagent systems.
//!
//! Systems are finite sets of runs of global states ([`kernel`]). On top of
//! them the crate decides:
//!
//! - possibilistic secrecy notions — total, allowability-relative,
//!   synchronous, run-based, and function-of-state variants, plus
//!   abstract two-view nondeducibility ([`secrecy`]);
//! - the epistemic-logic characterizations of those notions, with a small
//!   knowledge/time/probability logic and brute-force enumeration oracles
//!   ([`epistemic`]);
//! - probabilistic secrecy with exact rational arithmetic, including the
//!   conditioning construction that turns a run measure into per-point
//!   measures ([`prob`]);
//! - secrecy under an initial nondeterministic choice: partitioned run sets
//!   with per-cell measures, evidence for the initial choice, and secrecy
//!   for whole families of measures ([`adversarial`]);
//! - plausibilistic secrecy over pluggable value domains that specialize to
//!   the possibilistic and probabilistic checks ([`plaus`]);
//! - trace-system front ends: separability, generalized noninterference,
//!   nondeducibility on strategies, and probabilistic noninterference,
//!   each translated into the run framework ([`traces`]).
//!
//! Checks are pure functions over immutable data; failing checks return a
//! counterexample that re-verifies against the system. All probabilities are
//! exact rationals.
//!
//! The `runsec` binary drives everything from JSON system files; see the
//! crate examples for library usage (`cargo run --example possibilistic` and
//! friends).

pub mod adversarial;
pub mod epistemic;
pub mod fixtures;
pub mod gen;
pub mod kernel;
pub mod plaus;
pub mod prob;
pub mod rat;
pub mod report;
pub mod secrecy;
pub mod specfile;
pub mod traces;

pub use kernel::{AgentId, Allowability, GlobalState, InfoFunction, Mode, Point, Run, System};
pub use secrecy::{Counterexample, SecrecyVerdict};
