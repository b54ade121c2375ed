//! Seeded random instances for the property suites.
//!
//! Shapes are kept small (a handful of runs, a few steps, tiny alphabets)
//! so that the enumeration oracles stay fast. Synchrony and perfect recall
//! are obtained by construction where a suite's hypotheses need them:
//! history tokens give recall, and history length doubles as a clock.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::adversarial::{AdversarialSystem, InitStructure};
use crate::kernel::{run_of, Allowability, AgentId, GlobalState, Mode, Point, Run, System};
use crate::prob::RunMeasure;
use crate::rat::ratio;
use crate::traces::{
    AsyncTraceSystem, OutputRule, ProbProtocol, ProbProtocolSystem, Step, SyncTraceSystem,
};

fn shape(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let runs = rng.gen_range(2..=5);
    let horizon = rng.gen_range(1..=3);
    (runs, horizon)
}

/// Two-agent system with independently random local-state tokens; usually
/// asynchronous and without recall. Per-agent alphabet sizes start at 1 so
/// uninformative agents come up too.
pub fn arbitrary_system(rng: &mut ChaCha8Rng) -> System {
    let (n_runs, horizon) = shape(rng);
    let alphabets = [rng.gen_range(1..=4usize), rng.gen_range(1..=4)];
    let runs: Vec<Run> = (0..n_runs)
        .map(|r| {
            let states = (0..=horizon)
                .map(|_| {
                    GlobalState::new(
                        "-",
                        vec![
                            format!("a{}", rng.gen_range(0..alphabets[0])),
                            format!("b{}", rng.gen_range(0..alphabets[1])),
                        ],
                    )
                })
                .collect();
            run_of(&format!("r{r}"), states)
        })
        .collect();
    System::new(
        vec!["1".to_string(), "2".to_string()],
        runs,
        horizon,
        Mode::AsynchronousStutter,
    )
    .expect("generated system is well-formed")
}

/// Random synchronous system: tokens carry the time. Per-agent alphabet
/// sizes include 1 (a constant observer), so the holding side of the
/// secrecy equivalences comes up often.
pub fn synchronous_system(rng: &mut ChaCha8Rng) -> System {
    let (n_runs, horizon) = shape(rng);
    let alphabets = [rng.gen_range(1..=3usize), rng.gen_range(1..=3)];
    let runs: Vec<Run> = (0..n_runs)
        .map(|r| {
            let states = (0..=horizon)
                .map(|t| {
                    GlobalState::new(
                        "-",
                        vec![
                            format!("a{}@{t}", rng.gen_range(0..alphabets[0])),
                            format!("b{}@{t}", rng.gen_range(0..alphabets[1])),
                        ],
                    )
                })
                .collect();
            run_of(&format!("r{r}"), states)
        })
        .collect();
    System::new(
        vec!["1".to_string(), "2".to_string()],
        runs,
        horizon,
        Mode::Synchronous,
    )
    .expect("generated system is well-formed")
}

/// Both agents remember their whole observation history. With `sync` the
/// token is the full history (its length encodes the time); without it,
/// consecutive repetitions are collapsed, so runs may stutter. Per-agent
/// alphabet sizes include 1 so agents with nothing to observe (and hence
/// nothing to leak) come up often.
pub fn recall_system(rng: &mut ChaCha8Rng, sync: bool) -> System {
    let (n_runs, horizon) = shape(rng);
    let alphabets = [rng.gen_range(1..=3usize), rng.gen_range(1..=3)];
    let runs: Vec<Run> = (0..n_runs)
        .map(|r| {
            let mut hists: Vec<Vec<String>> = vec![Vec::new(), Vec::new()];
            let states = (0..=horizon)
                .map(|_| {
                    let locals = (0..2)
                        .map(|a| {
                            let obs = format!("{}", rng.gen_range(0..alphabets[a]));
                            if sync || hists[a].last() != Some(&obs) {
                                hists[a].push(obs);
                            }
                            hists[a].join("")
                        })
                        .collect();
                    GlobalState::new("-", locals)
                })
                .collect();
            run_of(&format!("r{r}"), states)
        })
        .collect();
    let mode = if sync { Mode::Synchronous } else { Mode::AsynchronousStutter };
    System::new(
        vec!["1".to_string(), "2".to_string()],
        runs,
        horizon,
        mode,
    )
    .expect("generated system is well-formed")
}

/// Like [`recall_system`], but resampled until every agent's
/// information-set count fits the enumeration bound of the oracles.
pub fn recall_system_bounded(rng: &mut ChaCha8Rng, sync: bool, max_info_sets: usize) -> System {
    for _ in 0..64 {
        let sys = recall_system(rng, sync);
        let fits = (0..sys.agent_count())
            .all(|a| sys.info_sets(AgentId(a)).len() <= max_info_sets);
        if fits {
            return sys;
        }
    }
    // the smallest shapes always fit
    recall_system(rng, sync)
}

/// Positive random weights, normalized exactly.
pub fn random_measure(rng: &mut ChaCha8Rng, sys: &System) -> RunMeasure {
    let raw: Vec<i64> = (0..sys.run_count()).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    RunMeasure::new(sys, raw.into_iter().map(|x| ratio(x, total)).collect())
        .expect("positive weights are valid")
}

/// A random allowability function valid for agent `i`. Synchronous and
/// semisynchronous kinds are only drawn when they contain the agent's
/// information sets.
pub fn random_allowability(rng: &mut ChaCha8Rng, sys: &System, i: AgentId) -> Allowability {
    for _ in 0..4 {
        let c = match rng.gen_range(0..4) {
            0 => Allowability::Total,
            1 => Allowability::Synchronous,
            2 => Allowability::Semisynchronous(rng.gen_range(0..=2)),
            _ => {
                // the information set plus random extra points
                let table: BTreeMap<Point, BTreeSet<Point>> = sys
                    .points()
                    .map(|p| {
                        let k = sys.info_set(i, p).expect("valid point");
                        let mut allowed: BTreeSet<Point> = k.points.iter().copied().collect();
                        for q in sys.points() {
                            if rng.gen_bool(0.4) {
                                allowed.insert(q);
                            }
                        }
                        (p, allowed)
                    })
                    .collect();
                Allowability::Explicit(table)
            }
        };
        if c.validate_for(sys, i).is_ok() {
            return c;
        }
    }
    Allowability::Total
}

/// A synchronous recall system whose agents are aware of their own initial
/// choice, partitioned by choice tuples with random positive cell measures.
/// Shapes: up to three choices per agent, up to two runs per tuple, up to
/// three steps.
pub fn random_init_adversarial(rng: &mut ChaCha8Rng) -> AdversarialSystem {
    let n1 = rng.gen_range(1..=2);
    let n2 = rng.gen_range(2..=3);
    let horizon = rng.gen_range(1..=2);
    let alphabet = 2;
    let mut runs = Vec::new();
    let mut assignment = Vec::new();
    let mut cell_runs: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for y1 in 0..n1 {
        for y2 in 0..n2 {
            for copy in 0..rng.gen_range(1..=2) {
                let id = format!("r{y1}-{y2}-{copy}");
                let mut hists: Vec<Vec<String>> = vec![Vec::new(), Vec::new()];
                let states = (0..=horizon)
                    .map(|_| {
                        let locals = [y1, y2]
                            .iter()
                            .enumerate()
                            .map(|(a, &y)| {
                                hists[a].push(format!("{}", rng.gen_range(0..alphabet)));
                                format!("c{y}|{}", hists[a].join(""))
                            })
                            .collect();
                        GlobalState::new("-", locals)
                    })
                    .collect();
                runs.push(run_of(&id, states));
                assignment.push(vec![y1, y2]);
                cell_runs.entry((y1, y2)).or_default().push(id);
            }
        }
    }
    let base = System::new(
        vec!["1".to_string(), "2".to_string()],
        runs,
        horizon,
        Mode::Synchronous,
    )
    .expect("generated system is well-formed");
    let init = InitStructure {
        choices: vec![
            (0..n1).map(|y| format!("p{y}")).collect(),
            (0..n2).map(|y| format!("q{y}")).collect(),
        ],
        assignment,
    };
    let cells = cell_runs
        .into_iter()
        .map(|((y1, y2), ids)| {
            let raw: Vec<i64> = (0..ids.len()).map(|_| rng.gen_range(1..=9)).collect();
            let total: i64 = raw.iter().sum();
            let weights = ids
                .into_iter()
                .zip(raw)
                .map(|(id, w)| (id, ratio(w, total)))
                .collect();
            (format!("p{y1}|q{y2}"), weights)
        })
        .collect();
    AdversarialSystem::with_init(base, init, cells).expect("generated cells are valid")
}

/// Random fixed-length synchronous trace system over tiny alphabets.
pub fn random_sync_traces(rng: &mut ChaCha8Rng) -> SyncTraceSystem {
    let len = rng.gen_range(1..=2);
    let dims = [1usize, 2, 2, rng.gen_range(1..=2)];
    let mut all: Vec<Vec<Step>> = vec![Vec::new()];
    for _ in 0..len {
        all = all
            .iter()
            .flat_map(|t| {
                let mut exts = Vec::new();
                for li in 0..dims[0] {
                    for hi in 0..dims[1] {
                        for lo in 0..dims[2] {
                            for ho in 0..dims[3] {
                                let mut next = t.clone();
                                next.push([li, hi, lo, ho]);
                                exts.push(next);
                            }
                        }
                    }
                }
                exts
            })
            .collect();
    }
    let mut traces: Vec<Vec<Step>> =
        all.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
    if traces.is_empty() {
        traces.push(vec![[0, 0, 0, 0]; len]);
    }
    let names = |n: usize| (0..n).map(|v| v.to_string()).collect();
    SyncTraceSystem::new(names(dims[0]), names(dims[1]), names(dims[2]), names(dims[3]), traces)
        .expect("generated traces are well-formed")
}

/// Random interleaving-closed asynchronous system: membership depends only
/// on the pair (low-event count, high-event count), drawn from a random
/// downward-closed relation.
pub fn random_count_async(rng: &mut ChaCha8Rng) -> AsyncTraceSystem {
    let nl = rng.gen_range(1..=2);
    let nh = rng.gen_range(1..=2);
    // start from the full rectangle and knock out maximal pairs
    let mut rel: BTreeSet<(usize, usize)> =
        (0..=nl).flat_map(|i| (0..=nh).map(move |j| (i, j))).collect();
    for _ in 0..rng.gen_range(0..=3) {
        let maximal: Vec<(usize, usize)> = rel
            .iter()
            .copied()
            .filter(|&(i, j)| !rel.contains(&(i + 1, j)) && !rel.contains(&(i, j + 1)))
            .filter(|&p| p != (0, 0))
            .collect();
        if !maximal.is_empty() {
            let pick = maximal[rng.gen_range(0..maximal.len())];
            rel.remove(&pick);
        }
    }
    let mut traces: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut frontier: Vec<(Vec<String>, usize, usize)> = vec![(vec![], 0, 0)];
    while let Some((t, a, x)) = frontier.pop() {
        traces.insert(t.clone());
        if rel.contains(&(a + 1, x)) {
            let mut next = t.clone();
            next.push("a".to_string());
            frontier.push((next, a + 1, x));
        }
        if rel.contains(&(a, x + 1)) {
            let mut next = t.clone();
            next.push("x".to_string());
            frontier.push((next, a, x + 1));
        }
    }
    AsyncTraceSystem::new(
        BTreeSet::new(),
        ["a".to_string()].into_iter().collect(),
        ["x".to_string()].into_iter().collect(),
        BTreeSet::new(),
        traces,
    )
    .expect("count-based traces are well-formed")
}

/// Random prefix-closed asynchronous system (not necessarily closed under
/// interleavings): a random subtree of the shuffle product.
pub fn random_prefix_closed_async(rng: &mut ChaCha8Rng) -> AsyncTraceSystem {
    let nl = rng.gen_range(1..=2);
    let nh = rng.gen_range(1..=2);
    let mut traces: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut frontier: Vec<(Vec<String>, usize, usize)> = vec![(vec![], 0, 0)];
    while let Some((t, a, x)) = frontier.pop() {
        traces.insert(t.clone());
        if a < nl && rng.gen_bool(0.7) {
            let mut next = t.clone();
            next.push("a".to_string());
            frontier.push((next, a + 1, x));
        }
        if x < nh && rng.gen_bool(0.7) {
            let mut next = t.clone();
            next.push("x".to_string());
            frontier.push((next, a, x + 1));
        }
    }
    AsyncTraceSystem::new(
        BTreeSet::new(),
        ["a".to_string()].into_iter().collect(),
        ["x".to_string()].into_iter().collect(),
        BTreeSet::new(),
        traces,
    )
    .expect("prefix-closed traces are well-formed")
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
    let total: i64 = raw.iter().sum::<i64>().max(1);
    let mut out: Vec<BigRational> = raw.iter().map(|&x| ratio(x, total)).collect();
    if raw.iter().sum::<i64>() == 0 {
        out[rng.gen_range(0..n)] = ratio(1, 1);
    }
    out
}

/// Small random protocol family: one or two low protocols, two high
/// protocols, random output distributions, one or two steps.
pub fn random_protocol_system(rng: &mut ChaCha8Rng) -> ProbProtocolSystem {
    let steps = rng.gen_range(1..=2);
    let dims = [1usize, 2, 2, 2];
    let n_lambda = rng.gen_range(1..=2);

    // enumerate all views/prefixes up to the horizon so tables are total
    let mut low_views: Vec<crate::traces::View> = vec![vec![]];
    let mut high_views: Vec<crate::traces::View> = vec![vec![]];
    let mut prefixes: Vec<Vec<Step>> = vec![vec![]];
    let mut all_low = low_views.clone();
    let mut all_high = high_views.clone();
    let mut all_prefixes = prefixes.clone();
    for _ in 1..steps {
        low_views = low_views
            .iter()
            .flat_map(|v| {
                (0..dims[0]).flat_map(move |li| {
                    (0..dims[2]).map(move |lo| {
                        let mut n = v.clone();
                        n.push((li, lo));
                        n
                    })
                })
            })
            .collect();
        high_views = high_views
            .iter()
            .flat_map(|v| {
                (0..dims[1]).flat_map(move |hi| {
                    (0..dims[3]).map(move |ho| {
                        let mut n = v.clone();
                        n.push((hi, ho));
                        n
                    })
                })
            })
            .collect();
        prefixes = prefixes
            .iter()
            .flat_map(|p| {
                let mut exts = Vec::new();
                for li in 0..dims[0] {
                    for hi in 0..dims[1] {
                        for lo in 0..dims[2] {
                            for ho in 0..dims[3] {
                                let mut n = p.clone();
                                n.push([li, hi, lo, ho]);
                                exts.push(n);
                            }
                        }
                    }
                }
                exts
            })
            .collect();
        all_low.extend(low_views.iter().cloned());
        all_high.extend(high_views.iter().cloned());
        all_prefixes.extend(prefixes.iter().cloned());
    }

    let lambda = (0..n_lambda)
        .map(|ix| {
            let table = all_low
                .iter()
                .map(|v| {
                    let dist = random_distribution(rng, dims[0]);
                    (v.clone(), dist.into_iter().enumerate().collect())
                })
                .collect();
            ProbProtocol::new(&format!("L{ix}"), table).expect("rows sum to 1")
        })
        .collect();
    let gamma = (0..2)
        .map(|ix| {
            let table = all_high
                .iter()
                .map(|v| {
                    let dist = random_distribution(rng, dims[1]);
                    (v.clone(), dist.into_iter().enumerate().collect())
                })
                .collect();
            ProbProtocol::new(&format!("H{ix}"), table).expect("rows sum to 1")
        })
        .collect();
    let mut out_table = BTreeMap::new();
    for p in &all_prefixes {
        for li in 0..dims[0] {
            for hi in 0..dims[1] {
                let dist = random_distribution(rng, dims[2] * dims[3]);
                let row = dist
                    .into_iter()
                    .enumerate()
                    .map(|(ix, w)| ((ix / dims[3], ix % dims[3]), w))
                    .collect();
                out_table.insert((p.clone(), li, hi), row);
            }
        }
    }
    let names = |n: usize| (0..n).map(|v| v.to_string()).collect();
    ProbProtocolSystem {
        li: names(dims[0]),
        hi: names(dims[1]),
        lo: names(dims[2]),
        ho: names(dims[3]),
        lambda,
        gamma,
        output: OutputRule::new(out_table).expect("rows sum to 1"),
        steps,
    }
}
