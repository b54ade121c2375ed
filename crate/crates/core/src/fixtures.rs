//! Canonical example systems used across tests, examples, and the CLI
//! fixture generator.
//!
//! The three small systems (one synchronous pair of runs, one asynchronous
//! triple, one synchronous quadruple) are the standard separating examples
//! for the secrecy notions; the cosmic-ray channel is the motivating
//! probabilistic leak. Trace-based fixtures (the xor channel and friends)
//! live in [`crate::traces`] builders but are re-exported through the
//! functions here.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use crate::kernel::{run_of, GlobalState, Mode, Run, System};
use crate::prob::RunMeasure;
use crate::rat::ratio;

fn gs(env: &str, locals: &[&str]) -> GlobalState {
    GlobalState::new(env, locals.iter().map(|s| s.to_string()).collect())
}

fn two_agent(runs: Vec<Run>, horizon: usize, mode: Mode) -> System {
    System::new(vec!["1".to_string(), "2".to_string()], runs, horizon, mode)
        .expect("fixture is well-formed")
}

/// Two synchronous runs where agent 2 has perfect recall and agent 1 does
/// not: agent 2 keeps synchronous secrecy with respect to 1 but not
/// run-based secrecy.
pub fn ex1() -> System {
    two_agent(
        vec![
            run_of(
                "r1",
                vec![gs("-", &["X", "A"]), gs("-", &["Y1", "B1"]), gs("-", &["Y2", "B2"])],
            ),
            run_of(
                "r2",
                vec![gs("-", &["Z", "A"]), gs("-", &["Y1", "C1"]), gs("-", &["Y2", "C2"])],
            ),
        ],
        2,
        Mode::Synchronous,
    )
}

/// The half/half measure on the two runs of [`ex1`].
pub fn ex1_measure(sys: &System) -> RunMeasure {
    RunMeasure::new(sys, vec![ratio(1, 2), ratio(1, 2)]).expect("valid fixture measure")
}

/// Three asynchronous runs (final states repeat): run-based secrecy holds
/// for agent 2 with respect to 1, total and synchronous secrecy do not,
/// and run-based probabilistic secrecy is asymmetric under the 2/5, 1/5,
/// 2/5 measure.
pub fn ex2() -> System {
    two_agent(
        vec![
            run_of("r1", vec![gs("-", &["X", "A"]), gs("-", &["X", "A"])]),
            run_of("r2", vec![gs("-", &["X", "B"]), gs("-", &["Y", "A"])]),
            run_of("r3", vec![gs("-", &["Y", "A"]), gs("-", &["Y", "A"])]),
        ],
        1,
        Mode::AsynchronousStutter,
    )
}

pub fn ex2_measure(sys: &System) -> RunMeasure {
    RunMeasure::new(sys, vec![ratio(2, 5), ratio(1, 5), ratio(2, 5)])
        .expect("valid fixture measure")
}

/// Four synchronous runs where agent 1 has perfect recall and agent 2 does
/// not: with the uniform measure, run-based probabilistic secrecy of 2
/// with respect to 1 holds, yet no constant works for the syntactic
/// characterization (the probability of "2 was in A or D1 somewhere" is 1
/// from X and 1/2 from Q).
pub fn ex3() -> System {
    two_agent(
        vec![
            run_of(
                "r1",
                vec![gs("-", &["X", "A"]), gs("-", &["Y1", "C1"]), gs("-", &["Y2", "C2"])],
            ),
            run_of(
                "r2",
                vec![gs("-", &["X", "B"]), gs("-", &["Y1", "D1"]), gs("-", &["Y2", "D2"])],
            ),
            run_of(
                "r3",
                vec![gs("-", &["Q", "A"]), gs("-", &["R1", "D1"]), gs("-", &["R2", "D2"])],
            ),
            run_of(
                "r4",
                vec![gs("-", &["Q", "B"]), gs("-", &["R1", "C1"]), gs("-", &["R2", "C2"])],
            ),
        ],
        2,
        Mode::Synchronous,
    )
}

pub fn ex3_measure(sys: &System) -> RunMeasure {
    RunMeasure::uniform(sys).expect("valid fixture measure")
}

/// The cosmic-ray channel: one of `n` words is typed by the second agent;
/// with probability `1 - eps` the first agent sees it verbatim, otherwise
/// (cosmic ray) she sees a uniformly random word. Synchronous, horizon 2.
/// Returns the system together with its run measure: the direct run for
/// word x has weight (1-eps)/n and each ray run (x typed, y seen) has
/// weight eps/n^2.
pub fn cosmic(n: usize, eps: &BigRational) -> (System, RunMeasure) {
    assert!(n >= 1, "need at least one word");
    let mut runs = Vec::new();
    let mut weights = Vec::new();
    let n_rat = ratio(n as i64, 1);
    let one = ratio(1, 1);
    // the typed word is the initial nondeterministic choice, so it is
    // encoded in the typist's state from time 0 on
    for x in 0..n {
        runs.push(run_of(
            &format!("nr-{x}"),
            vec![
                gs("-", &["a@0", &format!("in:w{x}@0")]),
                gs("-", &["a@1", &format!("in:w{x}@1")]),
                gs("ok", &[&format!("see:w{x}@2"), &format!("in:w{x}@2")]),
            ],
        ));
        weights.push((&one - eps) / &n_rat);
    }
    for x in 0..n {
        for y in 0..n {
            runs.push(run_of(
                &format!("ray-{x}-{y}"),
                vec![
                    gs("-", &["a@0", &format!("in:w{x}@0")]),
                    gs("-", &["a@1", &format!("in:w{x}@1")]),
                    gs("ray", &[&format!("see:w{y}@2"), &format!("in:w{x}@2")]),
                ],
            ));
            weights.push(eps / (&n_rat * &n_rat));
        }
    }
    let sys = System::new(
        vec!["alice".to_string(), "bob".to_string()],
        runs,
        2,
        Mode::Synchronous,
    )
    .expect("cosmic fixture is well-formed");
    let mu = RunMeasure::new(&sys, weights).expect("cosmic weights are a measure");
    (sys, mu)
}

/// Per-cell run weights of the cosmic-ray channel partitioned by the typed
/// word: the direct run gets 1 - eps, each ray run eps/n. Keys are run ids.
pub fn cosmic_cells(n: usize, eps: &BigRational) -> Vec<(String, BTreeMap<String, BigRational>)> {
    let n_rat = ratio(n as i64, 1);
    let one = ratio(1, 1);
    (0..n)
        .map(|x| {
            let mut weights = BTreeMap::new();
            weights.insert(format!("nr-{x}"), &one - eps);
            for y in 0..n {
                weights.insert(format!("ray-{x}-{y}"), eps / &n_rat);
            }
            (format!("w{x}"), weights)
        })
        .collect()
}

/// A three-run system whose two conditional probabilities differ by
/// exactly 1/10^7: an exact checker refuses secrecy, a checker with a
/// 10^-6 tolerance wrongly accepts it. Used by the mutation controls.
pub fn near_miss() -> (System, RunMeasure) {
    let sys = two_agent(
        vec![
            run_of("r1", vec![gs("-", &["X", "A"])]),
            run_of("r2", vec![gs("-", &["X", "B"])]),
            run_of("r3", vec![gs("-", &["Y", "A"])]),
        ],
        0,
        Mode::AsynchronousStutter,
    );
    let ten7 = 10_000_000i64;
    let mu = RunMeasure::new(
        &sys,
        vec![
            ratio(ten7 - 1, 2 * ten7),
            ratio(1, 2 * ten7),
            ratio(1, 2),
        ],
    )
    .expect("valid near-miss measure");
    (sys, mu)
}

/// The xor covert channel as a synchronous trace system: `k` xor steps
/// after a bootstrap tuple. The high output is free each step; from the
/// second tuple on, the low output is the previous high output xor the
/// current high input (and 0 at the first tuple). Low inputs are a
/// placeholder singleton.
pub fn xor_system(k: usize) -> crate::traces::SyncTraceSystem {
    let steps = k + 1;
    let mut traces = Vec::new();
    for his in 0..(1u32 << steps) {
        for hos in 0..(1u32 << steps) {
            let bit = |word: u32, t: usize| ((word >> t) & 1) as usize;
            let mut t = Vec::with_capacity(steps);
            for s in 0..steps {
                let lo = if s == 0 {
                    0
                } else {
                    bit(hos, s - 1) ^ bit(his, s)
                };
                t.push([0, bit(his, s), lo, bit(hos, s)]);
            }
            traces.push(t);
        }
    }
    crate::traces::SyncTraceSystem::new(
        vec!["0".to_string()],
        vec!["0".to_string(), "1".to_string()],
        vec!["0".to_string(), "1".to_string()],
        vec!["0".to_string(), "1".to_string()],
        traces,
    )
    .expect("xor fixture is well-formed")
}

/// The xor channel as a protocol family: one trivial low protocol, the two
/// bit-transmitting high protocols, and a fair coin on the high output.
/// `k` steps, so each cell holds 2^k equally likely traces.
pub fn gs_xor(k: usize) -> crate::traces::ProbProtocolSystem {
    use crate::traces::{OutputRule, ProbProtocol, ProbProtocolSystem, Step};
    assert!(k >= 1);
    let half = ratio(1, 2);
    let one = ratio(1, 1);

    // low protocol: always input 0; keyed by every possible low view
    let mut low_table = BTreeMap::new();
    let mut low_views: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for _ in 0..k - 1 {
        low_views = low_views
            .iter()
            .flat_map(|v| {
                (0..2).map(move |lo| {
                    let mut next = v.clone();
                    next.push((0, lo));
                    next
                })
            })
            .collect::<Vec<_>>();
        for v in &low_views {
            low_table.insert(v.clone(), vec![(0, one.clone())]);
        }
    }
    low_table.insert(vec![], vec![(0, one.clone())]);
    let lambda = vec![ProbProtocol::new("L0", low_table).expect("rows sum to 1")];

    // transmit-b: input b first, then b xor the last high output
    let mut gamma = Vec::new();
    for b in 0..2usize {
        let mut table = BTreeMap::new();
        let mut views: Vec<Vec<(usize, usize)>> = vec![vec![]];
        table.insert(vec![], vec![(b, one.clone())]);
        for _ in 0..k - 1 {
            views = views
                .iter()
                .flat_map(|v| {
                    (0..2).flat_map(move |hi| {
                        (0..2).map(move |ho| {
                            let mut next = v.clone();
                            next.push((hi, ho));
                            next
                        })
                    })
                })
                .collect::<Vec<_>>();
            for v in &views {
                let last_ho = v.last().expect("nonempty").1;
                table.insert(v.clone(), vec![(b ^ last_ho, one.clone())]);
            }
        }
        gamma.push(ProbProtocol::new(&format!("H{b}"), table).expect("rows sum to 1"));
    }

    // output: low output determined by the xor rule, high output fair
    let mut out_table = BTreeMap::new();
    let mut prefixes: Vec<Vec<Step>> = vec![vec![]];
    for _ in 0..k {
        for prefix in &prefixes {
            for hi in 0..2usize {
                let lo = match prefix.last() {
                    None => 0,
                    Some(step) => step[3] ^ hi,
                };
                out_table.insert(
                    (prefix.clone(), 0, hi),
                    vec![((lo, 0), half.clone()), ((lo, 1), half.clone())],
                );
            }
        }
        prefixes = prefixes
            .iter()
            .flat_map(|p| {
                (0..2).flat_map(move |hi| {
                    (0..2).flat_map(move |lo| {
                        (0..2).map(move |ho| {
                            let mut next = p.clone();
                            next.push([0, hi, lo, ho]);
                            next
                        })
                    })
                })
            })
            .collect();
    }
    ProbProtocolSystem {
        li: vec!["0".to_string()],
        hi: vec!["0".to_string(), "1".to_string()],
        lo: vec!["0".to_string(), "1".to_string()],
        ho: vec!["0".to_string(), "1".to_string()],
        lambda,
        gamma,
        output: OutputRule::new(out_table).expect("rows sum to 1"),
        steps: k,
    }
}

/// The once-only low output: traces over one low output event and one high
/// input event, where the low output happens at most once and never after
/// a high input. At most `m - 1` high inputs per trace so that every pair
/// of agent views fits jointly inside the horizon `m`.
pub fn l_o_once(m: usize) -> crate::traces::AsyncTraceSystem {
    assert!(m >= 2);
    let mut traces: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut frontier: Vec<(Vec<String>, bool, usize)> = vec![(vec![], false, 0)];
    while let Some((t, lo_used, his)) = frontier.pop() {
        traces.insert(t.clone());
        if t.len() == m {
            continue;
        }
        if !lo_used && his == 0 {
            let mut next = t.clone();
            next.push("lo".to_string());
            frontier.push((next, true, his));
        }
        if his < m - 1 {
            let mut next = t.clone();
            next.push("hi".to_string());
            frontier.push((next, lo_used, his + 1));
        }
    }
    crate::traces::AsyncTraceSystem::new(
        BTreeSet::new(),
        ["lo".to_string()].into_iter().collect(),
        ["hi".to_string()].into_iter().collect(),
        BTreeSet::new(),
        traces,
    )
    .expect("once-only fixture is well-formed")
}

/// Full shuffle of up to `nl` low events against up to `nh` high events:
/// closed under interleavings by construction.
pub fn shuffle_product(nl: usize, nh: usize) -> crate::traces::AsyncTraceSystem {
    let mut traces: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut frontier: Vec<(Vec<String>, usize, usize)> = vec![(vec![], 0, 0)];
    while let Some((t, a, x)) = frontier.pop() {
        traces.insert(t.clone());
        if a < nl {
            let mut next = t.clone();
            next.push("a".to_string());
            frontier.push((next, a + 1, x));
        }
        if x < nh {
            let mut next = t.clone();
            next.push("x".to_string());
            frontier.push((next, a, x + 1));
        }
    }
    crate::traces::AsyncTraceSystem::new(
        BTreeSet::new(),
        ["a".to_string()].into_iter().collect(),
        ["x".to_string()].into_iter().collect(),
        BTreeSet::new(),
        traces,
    )
    .expect("shuffle fixture is well-formed")
}

/// The finite rendering of the limit-closure gap: low outputs are either
/// all zero or k zeros then ones; high inputs are constant zero or one;
/// the all-zero low output occurs only alongside the all-zero high inputs.
pub fn sync_limit_gap(m: usize) -> crate::traces::SyncTraceSystem {
    let steps = m + 1;
    let mut traces = Vec::new();
    for k in 0..steps {
        for b in 0..2usize {
            let t: Vec<[usize; 4]> = (0..steps)
                .map(|s| [0, b, usize::from(s >= k), 0])
                .collect();
            traces.push(t);
        }
    }
    traces.push((0..steps).map(|_| [0, 0, 0, 0]).collect());
    crate::traces::SyncTraceSystem::new(
        vec!["-".to_string()],
        vec!["0".to_string(), "1".to_string()],
        vec!["0".to_string(), "1".to_string()],
        vec!["-".to_string()],
        traces,
    )
    .expect("gap fixture is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Point;
    use crate::prob::check_run_based_prob_secrecy;

    #[test]
    fn cosmic_shape() {
        let (sys, mu) = cosmic(4, &ratio(1, 10));
        assert_eq!(sys.run_count(), 4 * 5);
        assert!(sys.is_synchronous());
        let total = crate::rat::rat_sum(mu.weights().iter());
        assert_eq!(total, ratio(1, 1));
    }

    #[test]
    fn cosmic_posteriors_by_brute_force() {
        // posterior that word x was typed given word y is seen, computed by
        // raw enumeration over the run table
        for (n, eps) in [(2usize, ratio(1, 2)), (4, ratio(1, 10)), (10, ratio(1, 100))] {
            let (sys, mu) = cosmic(n, &eps);
            let alice = sys.agent("alice").unwrap();
            let bob = sys.agent("bob").unwrap();
            let n_rat = ratio(n as i64, 1);
            let same = ratio(1, 1) - ratio(n as i64 - 1, 1) * &eps / &n_rat;
            let diff = &eps / &n_rat;
            for y in 0..n.min(3) {
                let see = sys
                    .points()
                    .find(|&p| sys.local_state(alice, p) == format!("see:w{y}@2"))
                    .unwrap();
                let k_alice = sys.info_set(alice, see).unwrap();
                for x in 0..n.min(3) {
                    let typed = sys
                        .points()
                        .find(|&p| sys.local_state(bob, p) == format!("in:w{x}@2"))
                        .unwrap();
                    let k_bob = sys.info_set(bob, typed).unwrap();
                    let posterior = mu.conditional_runs(&k_bob.runs, &k_alice.runs);
                    if x == y {
                        assert_eq!(posterior, same);
                    } else {
                        assert_eq!(posterior, diff);
                    }
                }
            }
        }
    }

    #[test]
    fn near_miss_fails_exactly() {
        let (sys, mu) = near_miss();
        let a1 = sys.agent("1").unwrap();
        let a2 = sys.agent("2").unwrap();
        let v = check_run_based_prob_secrecy(&sys, &mu, a1, a2).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn ex2_has_expected_info_structure() {
        let sys = ex2();
        let a1 = sys.agent("1").unwrap();
        let k = sys.info_set(a1, Point::new(0, 0)).unwrap();
        assert_eq!(k.local, "X");
        assert_eq!(k.runs.iter().copied().collect::<Vec<_>>(), vec![0, 1]);
    }
}
