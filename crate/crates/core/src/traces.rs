//! Trace-system front ends: separability, generalized noninterference,
//! nondeducibility on strategies, and probabilistic noninterference.
//!
//! Synchronous trace systems are sets of fixed-length tuples of low/high
//! inputs and outputs; asynchronous ones are prefix-closed sets of event
//! sequences where each agent sees only its own events. Both translate into
//! run systems, and each classic trace property is checked both directly on
//! the traces and (where the theory says so) against the corresponding
//! secrecy notion of the run framework.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::adversarial::{AdversarialError, AdversarialSystem, InitStructure};
use crate::kernel::{run_of, GlobalState, KernelError, Mode, System};
use crate::rat::{format_ratio, rat_one, rat_sum};
use crate::secrecy::{Counterexample, SecrecyVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("trace system has no traces")]
    Empty,
    #[error("traces must all have the same length")]
    NonUniformLength,
    #[error("value index out of range in a trace tuple")]
    BadValue,
    #[error("unknown event {0:?}")]
    UnknownEvent(String),
    #[error("event alphabets must be pairwise disjoint, {0:?} repeats")]
    OverlappingAlphabets(String),
    #[error("trace set is not prefix-closed: missing prefix of length {0}")]
    NotPrefixClosed(usize),
    #[error("window {window} exceeds the trace length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("strategy #{0} is consistent with no trace")]
    InconsistentStrategy(usize),
    #[error("{count} strategies exceed the bound {bound}")]
    TooManyStrategies { count: usize, bound: usize },
    #[error("{count} runs exceed the bound {bound}")]
    TooManyRuns { count: usize, bound: usize },
    #[error("distribution row sums to {0}, not 1")]
    RowSum(String),
    #[error("no output distribution for a reachable prefix of length {0}")]
    MissingOutputRow(usize),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Adversarial(#[from] AdversarialError),
}

/// Default cap on enumerated strategies and generated runs.
pub const DEFAULT_ENUMERATION_BOUND: usize = 1 << 16;

// ---------------------------------------------------------------------------
// synchronous trace systems

/// One step of a synchronous trace: indices into the four alphabets, in the
/// order (low input, high input, low output, high output).
pub type Step = [usize; 4];

/// A set of fixed-length input/output traces for one low and one high
/// agent.
#[derive(Debug, Clone)]
pub struct SyncTraceSystem {
    pub li: Vec<String>,
    pub hi: Vec<String>,
    pub lo: Vec<String>,
    pub ho: Vec<String>,
    traces: Vec<Vec<Step>>,
    len: usize,
}

/// Low view of a trace prefix: the (low input, low output) pairs.
fn low_proj(trace: &[Step]) -> View {
    trace.iter().map(|s| (s[0], s[2])).collect()
}

/// High view: the (high input, high output) pairs.
fn high_proj(trace: &[Step]) -> View {
    trace.iter().map(|s| (s[1], s[3])).collect()
}

/// High inputs only.
fn hi_proj(trace: &[Step]) -> Vec<usize> {
    trace.iter().map(|s| s[1]).collect()
}

fn view_token(tag: &str, view: &[(usize, usize)]) -> String {
    let body: Vec<String> = view.iter().map(|(a, b)| format!("{a}.{b}")).collect();
    format!("{tag}[{}]", body.join(";"))
}

impl SyncTraceSystem {
    pub fn new(
        li: Vec<String>,
        hi: Vec<String>,
        lo: Vec<String>,
        ho: Vec<String>,
        mut traces: Vec<Vec<Step>>,
    ) -> Result<Self, TraceError> {
        if traces.is_empty() {
            return Err(TraceError::Empty);
        }
        let len = traces[0].len();
        if len == 0 || traces.iter().any(|t| t.len() != len) {
            return Err(TraceError::NonUniformLength);
        }
        let dims = [li.len(), hi.len(), lo.len(), ho.len()];
        for t in &traces {
            for s in t {
                if s.iter().zip(dims).any(|(&v, d)| v >= d) {
                    return Err(TraceError::BadValue);
                }
            }
        }
        traces.sort();
        traces.dedup();
        Ok(SyncTraceSystem { li, hi, lo, ho, traces, len })
    }

    pub fn traces(&self) -> &[Vec<Step>] {
        &self.traces
    }

    pub fn trace_len(&self) -> usize {
        self.len
    }

    /// Translate to a run system: one run per trace, the two agents seeing
    /// their own projections of the growing prefix. Synchronous, and both
    /// agents have perfect recall.
    pub fn to_runs(&self) -> System {
        self.to_runs_windowed(self.len).expect("full window fits")
    }

    /// Truncate the observation window below the trace length. The traces
    /// keep their full length for the trace-level checks, so this exhibits
    /// the gap between prefix-level secrecy and full-trace recombination.
    pub fn to_runs_windowed(&self, window: usize) -> Result<System, TraceError> {
        if window > self.len {
            return Err(TraceError::WindowTooLarge { window, len: self.len });
        }
        let runs = self
            .traces
            .iter()
            .enumerate()
            .map(|(ix, t)| {
                let states = (0..=window)
                    .map(|m| {
                        GlobalState::new(
                            "-",
                            vec![
                                view_token("L", &low_proj(&t[..m])),
                                view_token("H", &high_proj(&t[..m])),
                            ],
                        )
                    })
                    .collect();
                run_of(&format!("t{ix}"), states)
            })
            .collect();
        Ok(System::new(
            vec!["L".to_string(), "H".to_string()],
            runs,
            window,
            Mode::Synchronous,
        )?)
    }

    /// Separability: every low view and every high view, taken from any two
    /// traces, recombine into some trace of the system.
    pub fn check_separability(&self) -> SecrecyVerdict {
        let realized: BTreeSet<(View, View)> = self
            .traces
            .iter()
            .map(|t| (low_proj(t), high_proj(t)))
            .collect();
        for (i, t) in self.traces.iter().enumerate() {
            for (j, u) in self.traces.iter().enumerate() {
                if !realized.contains(&(low_proj(t), high_proj(u))) {
                    return SecrecyVerdict::fails(
                        Counterexample::TracePair { left: i, right: j },
                        "no trace combines this low view with this high view".to_string(),
                    );
                }
            }
        }
        SecrecyVerdict::holds("all low/high view recombinations realized")
    }

    /// Generalized noninterference: as separability, but only the high
    /// inputs must recombine.
    pub fn check_gni(&self) -> SecrecyVerdict {
        let realized: BTreeSet<(View, Vec<usize>)> = self
            .traces
            .iter()
            .map(|t| (low_proj(t), hi_proj(t)))
            .collect();
        for (i, t) in self.traces.iter().enumerate() {
            for (j, u) in self.traces.iter().enumerate() {
                if !realized.contains(&(low_proj(t), hi_proj(u))) {
                    return SecrecyVerdict::fails(
                        Counterexample::TracePair { left: i, right: j },
                        "no trace combines this low view with these high inputs".to_string(),
                    );
                }
            }
        }
        SecrecyVerdict::holds("all low-view/high-input recombinations realized")
    }
}

// ---------------------------------------------------------------------------
// strategies and nondeducibility on strategies

/// A deterministic high-agent protocol: what to input next, given the high
/// view so far. Stored compactly as a function of the high-output history;
/// the inputs along a consistent trace are determined by the outputs, so
/// this loses no generality.
#[derive(Debug, Clone)]
pub struct Strategy {
    /// `decisions[rank(history)]` is the next high-input index, where
    /// histories of length `k` are ranked lexicographically after all
    /// shorter ones.
    decisions: Vec<usize>,
    n_ho: usize,
}

impl Strategy {
    fn rank(&self, history: &[usize]) -> usize {
        // offset of the length-k block, then the lexicographic index
        let mut offset = 0;
        for k in 0..history.len() {
            offset += self.n_ho.pow(k as u32);
        }
        let mut ix = 0;
        for &h in history {
            ix = ix * self.n_ho + h;
        }
        offset + ix
    }

    /// Next high input after seeing this high view.
    pub fn next_input(&self, high_view: &[(usize, usize)]) -> usize {
        let history: Vec<usize> = high_view.iter().map(|&(_, o)| o).collect();
        self.decisions[self.rank(&history)]
    }

    /// Is the trace played according to this strategy?
    pub fn consistent_with(&self, trace: &[Step]) -> bool {
        (0..trace.len()).all(|k| self.next_input(&high_proj(&trace[..k])) == trace[k][1])
    }
}

/// All deterministic strategies for a trace system, up to behavioral
/// equivalence on consistent traces. `depth` positions are functions of
/// high-output histories of lengths `0..len`.
pub fn all_deterministic_strategies(
    sigma: &SyncTraceSystem,
    bound: usize,
) -> Result<Vec<Strategy>, TraceError> {
    let n_ho = sigma.ho.len();
    let n_hi = sigma.hi.len();
    let too_many = TraceError::TooManyStrategies { count: usize::MAX, bound };
    let mut depth = 0usize;
    for k in 0..sigma.len {
        let block = n_ho
            .checked_pow(u32::try_from(k).map_err(|_| too_many.clone())?)
            .ok_or_else(|| too_many.clone())?;
        depth = depth.checked_add(block).ok_or_else(|| too_many.clone())?;
    }
    let count = u32::try_from(depth)
        .ok()
        .and_then(|d| n_hi.checked_pow(d))
        .filter(|&c| c <= bound);
    let Some(count) = count else {
        return Err(too_many);
    };
    let mut out = Vec::with_capacity(count);
    for mut code in 0..count {
        let mut decisions = Vec::with_capacity(depth);
        for _ in 0..depth {
            decisions.push(code % n_hi);
            code /= n_hi;
        }
        out.push(Strategy { decisions, n_ho });
    }
    Ok(out)
}

/// Nondeducibility on strategies: for every trace and every consistent
/// strategy, the strategy admits a trace with the same low view. The
/// verdict also records agreement with the secrecy reduction (synchronous
/// secrecy of the strategy identity in the protocol-annotated run system)
/// when the annotated system is small enough to build.
pub fn check_nos(
    sigma: &SyncTraceSystem,
    strategies: &[Strategy],
) -> Result<SecrecyVerdict, TraceError> {
    let mut direct: Option<(usize, usize)> = None; // (strategy, trace) violation
    for (sx, strat) in strategies.iter().enumerate() {
        let consistent: Vec<usize> = (0..sigma.traces.len())
            .filter(|&tx| strat.consistent_with(&sigma.traces[tx]))
            .collect();
        if consistent.is_empty() {
            return Err(TraceError::InconsistentStrategy(sx));
        }
        if direct.is_some() {
            continue;
        }
        let achievable: BTreeSet<Vec<(usize, usize)>> = consistent
            .iter()
            .map(|&tx| low_proj(&sigma.traces[tx]))
            .collect();
        if let Some(tx) = (0..sigma.traces.len())
            .find(|&tx| !achievable.contains(&low_proj(&sigma.traces[tx])))
        {
            direct = Some((sx, tx));
        }
    }

    let verdict = match direct {
        Some((sx, tx)) => SecrecyVerdict::fails(
            Counterexample::TracePair { left: tx, right: sx },
            format!(
                "strategy #{sx} cannot reproduce the low view of trace #{tx}: \
                 the strategy's consistent traces pin the low outputs"
            ),
        ),
        None => SecrecyVerdict::holds("every strategy covers every low view"),
    };

    // cross-check against the secrecy reduction when feasible
    let total_runs: usize = strategies
        .iter()
        .map(|s| {
            sigma
                .traces
                .iter()
                .filter(|t| s.consistent_with(t))
                .count()
        })
        .sum();
    if total_runs <= 4096 {
        let reduced = nos_as_strategy_secrecy(sigma, strategies)?;
        debug_assert_eq!(reduced.holds, verdict.holds, "reduction must agree");
        return Ok(SecrecyVerdict {
            holds: verdict.holds,
            counterexample: verdict.counterexample,
            witness_note: format!(
                "{} (strategy-secrecy reduction agrees: {})",
                verdict.witness_note, reduced.holds
            ),
        });
    }
    Ok(verdict)
}

/// The reduction: annotate runs with the strategy in the high agent's
/// state and check synchronous secrecy of the function extracting it.
pub fn nos_as_strategy_secrecy(
    sigma: &SyncTraceSystem,
    strategies: &[Strategy],
) -> Result<SecrecyVerdict, TraceError> {
    let mut runs = Vec::new();
    for (sx, strat) in strategies.iter().enumerate() {
        for (tx, t) in sigma.traces.iter().enumerate() {
            if !strat.consistent_with(t) {
                continue;
            }
            let states = (0..=sigma.len)
                .map(|m| {
                    GlobalState::new(
                        "-",
                        vec![
                            view_token("L", &low_proj(&t[..m])),
                            format!("s{sx}|{}", view_token("H", &high_proj(&t[..m]))),
                        ],
                    )
                })
                .collect();
            runs.push(run_of(&format!("s{sx}t{tx}"), states));
        }
    }
    let sys = System::new(
        vec!["L".to_string(), "H".to_string()],
        runs,
        sigma.len,
        Mode::Synchronous,
    )?;
    let l = sys.agent("L").expect("agent L");
    let h = sys.agent("H").expect("agent H");
    // the strategy tag is the prefix of H's token
    let map: BTreeMap<String, String> = sys
        .info_sets(h)
        .iter()
        .map(|k| {
            let tag = k.local.split('|').next().unwrap_or("").to_string();
            (k.local.clone(), tag)
        })
        .collect();
    let f = crate::kernel::InfoFunction::new(&sys, h, map)?;
    Ok(crate::secrecy::check_f_secrecy(
        &sys,
        l,
        h,
        &f,
        &crate::kernel::Allowability::Synchronous,
    )?)
}

// ---------------------------------------------------------------------------
// asynchronous trace systems

/// A prefix-closed set of event sequences, with the events split between
/// the low and high agent (and inputs marked within each side).
#[derive(Debug, Clone)]
pub struct AsyncTraceSystem {
    pub li: BTreeSet<String>,
    pub lo: BTreeSet<String>,
    pub hi: BTreeSet<String>,
    pub ho: BTreeSet<String>,
    traces: Vec<Vec<String>>,
}

impl AsyncTraceSystem {
    pub fn new(
        li: BTreeSet<String>,
        lo: BTreeSet<String>,
        hi: BTreeSet<String>,
        ho: BTreeSet<String>,
        traces: BTreeSet<Vec<String>>,
    ) -> Result<Self, TraceError> {
        let mut all = BTreeSet::new();
        for e in li.iter().chain(&lo).chain(&hi).chain(&ho) {
            if !all.insert(e.clone()) {
                return Err(TraceError::OverlappingAlphabets(e.clone()));
            }
        }
        for t in &traces {
            for e in t {
                if !all.contains(e) {
                    return Err(TraceError::UnknownEvent(e.clone()));
                }
            }
            if !t.is_empty() && !traces.contains(&t[..t.len() - 1]) {
                return Err(TraceError::NotPrefixClosed(t.len() - 1));
            }
        }
        if traces.is_empty() {
            return Err(TraceError::Empty);
        }
        Ok(AsyncTraceSystem {
            li,
            lo,
            hi,
            ho,
            traces: traces.into_iter().collect(),
        })
    }

    pub fn traces(&self) -> &[Vec<String>] {
        &self.traces
    }

    fn is_l(&self, e: &str) -> bool {
        self.li.contains(e) || self.lo.contains(e)
    }

    fn is_h(&self, e: &str) -> bool {
        self.hi.contains(e) || self.ho.contains(e)
    }

    fn l_view(&self, t: &[String]) -> Vec<String> {
        t.iter().filter(|e| self.is_l(e)).cloned().collect()
    }

    fn h_view(&self, t: &[String]) -> Vec<String> {
        t.iter().filter(|e| self.is_h(e)).cloned().collect()
    }

    fn hi_view(&self, t: &[String]) -> Vec<String> {
        t.iter().filter(|e| self.hi.contains(e.as_str())).cloned().collect()
    }

    fn lhi_view(&self, t: &[String]) -> Vec<String> {
        t.iter()
            .filter(|e| self.is_l(e) || self.hi.contains(e.as_str()))
            .cloned()
            .collect()
    }

    fn contains(&self, t: &[String]) -> bool {
        self.traces.binary_search_by(|probe| probe.as_slice().cmp(t)).is_ok()
    }

    /// Maximal traces (those with no extension in the set).
    fn maximal(&self) -> Vec<&Vec<String>> {
        self.traces
            .iter()
            .filter(|t| {
                !self.traces.iter().any(|u| {
                    u.len() == t.len() + 1 && u[..t.len()] == t[..]
                })
            })
            .collect()
    }

    /// Translate to a run system: one run per maximal trace, each agent's
    /// local state its own event subsequence so far; the final state
    /// repeats up to the horizon (the longest trace length).
    pub fn to_runs(&self, max_runs: usize) -> Result<System, TraceError> {
        let maximal = self.maximal();
        if maximal.len() > max_runs {
            return Err(TraceError::TooManyRuns { count: maximal.len(), bound: max_runs });
        }
        let horizon = maximal.iter().map(|t| t.len()).max().unwrap_or(0);
        let runs = maximal
            .iter()
            .enumerate()
            .map(|(ix, t)| {
                let states = (0..=horizon)
                    .map(|m| {
                        let pre = &t[..m.min(t.len())];
                        GlobalState::new(
                            "-",
                            vec![
                                format!("L[{}]", self.l_view(pre).join(";")),
                                format!("H[{}]", self.h_view(pre).join(";")),
                            ],
                        )
                    })
                    .collect();
                run_of(&format!("t{ix}"), states)
            })
            .collect();
        Ok(System::new(
            vec!["L".to_string(), "H".to_string()],
            runs,
            horizon,
            Mode::AsynchronousStutter,
        )?)
    }

    /// Asynchronous separability: every interleaving of a low view with a
    /// high view is itself a trace.
    pub fn check_separability(&self) -> SecrecyVerdict {
        for (i, t) in self.traces.iter().enumerate() {
            for (j, u) in self.traces.iter().enumerate() {
                for w in interleavings(&self.l_view(t), &self.h_view(u)) {
                    if !self.contains(&w) {
                        return SecrecyVerdict::fails(
                            Counterexample::TracePair { left: i, right: j },
                            format!("interleaving {w:?} is not a trace"),
                        );
                    }
                }
            }
        }
        SecrecyVerdict::holds("closed under low/high view interleavings")
    }

    /// Asynchronous generalized noninterference: every interleaving of a
    /// low view with the high inputs of another trace is matched by some
    /// trace with the same low-and-high-input projection.
    pub fn check_gni(&self) -> SecrecyVerdict {
        let realized: BTreeSet<Vec<String>> =
            self.traces.iter().map(|t| self.lhi_view(t)).collect();
        for (i, t) in self.traces.iter().enumerate() {
            for (j, u) in self.traces.iter().enumerate() {
                for w in interleavings(&self.l_view(t), &self.hi_view(u)) {
                    if !realized.contains(&w) {
                        return SecrecyVerdict::fails(
                            Counterexample::TracePair { left: i, right: j },
                            format!("no trace projects to the interleaving {w:?}"),
                        );
                    }
                }
            }
        }
        SecrecyVerdict::holds("all low/high-input interleavings matched")
    }

    /// Membership depends only on the pair of projections: rearranging the
    /// low and high events of any trace stays in the set.
    pub fn is_closed_under_interleavings(&self) -> bool {
        self.traces.iter().all(|t| {
            interleavings(&self.l_view(t), &self.h_view(t))
                .into_iter()
                .all(|w| self.contains(&w))
        })
    }
}

/// All merges of two sequences keeping their internal orders.
pub fn interleavings(a: &[String], b: &[String]) -> Vec<Vec<String>> {
    fn go(a: &[String], b: &[String], acc: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
        if a.is_empty() && b.is_empty() {
            out.push(acc.clone());
            return;
        }
        if let Some((x, rest)) = a.split_first() {
            acc.push(x.clone());
            go(rest, b, acc, out);
            acc.pop();
        }
        if let Some((y, rest)) = b.split_first() {
            acc.push(y.clone());
            go(a, rest, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(a, b, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// probabilistic protocols (the strategy-proof channel machinery)

/// An agent's view so far: its own (input, output) index pairs.
pub type View = Vec<(usize, usize)>;
/// A distribution row: (value index, weight) pairs summing to one.
pub type InputRow = Vec<(usize, BigRational)>;
/// Distribution over (low output, high output) pairs.
pub type OutputRow = Vec<((usize, usize), BigRational)>;

/// A probabilistic protocol: distribution over the agent's next input given
/// its own view (pairs of its input/output indices so far).
#[derive(Debug, Clone)]
pub struct ProbProtocol {
    pub id: String,
    table: BTreeMap<View, InputRow>,
}

impl ProbProtocol {
    pub fn new(id: &str, table: BTreeMap<View, InputRow>) -> Result<Self, TraceError> {
        for row in table.values() {
            let total = rat_sum(row.iter().map(|(_, w)| w));
            if total != rat_one() {
                return Err(TraceError::RowSum(format_ratio(&total)));
            }
        }
        Ok(ProbProtocol { id: id.to_string(), table })
    }

    fn row(&self, view: &[(usize, usize)]) -> Result<&InputRow, TraceError> {
        self.table
            .get(view)
            .ok_or(TraceError::MissingOutputRow(view.len()))
    }

    pub fn rows(&self) -> &BTreeMap<View, InputRow> {
        &self.table
    }
}

/// The system's output behavior: a distribution over (low output, high
/// output) given the trace so far and the two current inputs.
#[derive(Debug, Clone)]
pub struct OutputRule {
    table: BTreeMap<(Vec<Step>, usize, usize), OutputRow>,
}

impl OutputRule {
    pub fn new(
        table: BTreeMap<(Vec<Step>, usize, usize), OutputRow>,
    ) -> Result<Self, TraceError> {
        for row in table.values() {
            let total = rat_sum(row.iter().map(|(_, w)| w));
            if total != rat_one() {
                return Err(TraceError::RowSum(format_ratio(&total)));
            }
        }
        Ok(OutputRule { table })
    }

    fn row(
        &self,
        prefix: &[Step],
        li: usize,
        hi: usize,
    ) -> Result<&OutputRow, TraceError> {
        self.table
            .get(&(prefix.to_vec(), li, hi))
            .ok_or(TraceError::MissingOutputRow(prefix.len()))
    }

    pub fn rows(&self) -> &BTreeMap<(Vec<Step>, usize, usize), OutputRow> {
        &self.table
    }
}

/// Finite sets of low and high probabilistic protocols plus the output
/// rule: the ingredients of the probabilistic noninterference check.
#[derive(Debug, Clone)]
pub struct ProbProtocolSystem {
    pub li: Vec<String>,
    pub hi: Vec<String>,
    pub lo: Vec<String>,
    pub ho: Vec<String>,
    pub lambda: Vec<ProbProtocol>,
    pub gamma: Vec<ProbProtocol>,
    pub output: OutputRule,
    pub steps: usize,
}

/// Build the adversarial run system of a protocol family: one cell per
/// joint protocol, runs are that joint protocol's positive-probability
/// traces, run weights the per-step products of the three distributions.
/// The protocol identities live in the owners' local states.
pub fn build_gray_syverson(pps: &ProbProtocolSystem) -> Result<AdversarialSystem, TraceError> {
    let mut runs = Vec::new();
    let mut cell_weights: Vec<(String, BTreeMap<String, BigRational>)> = Vec::new();
    let mut assignment = Vec::new();

    for (lx, lprot) in pps.lambda.iter().enumerate() {
        for (hx, hprot) in pps.gamma.iter().enumerate() {
            let cell_id = format!("{}|{}", lprot.id, hprot.id);
            let mut weights = BTreeMap::new();
            // depth-first expansion of positive-probability traces
            let mut stack: Vec<(Vec<Step>, BigRational)> = vec![(Vec::new(), rat_one())];
            let mut n = 0usize;
            while let Some((prefix, w)) = stack.pop() {
                if prefix.len() == pps.steps {
                    let run_id = format!("{cell_id}#{n}");
                    n += 1;
                    let states = (0..=pps.steps)
                        .map(|m| {
                            GlobalState::new(
                                "-",
                                vec![
                                    format!(
                                        "{}|{}",
                                        lprot.id,
                                        view_token("L", &low_proj(&prefix[..m]))
                                    ),
                                    format!(
                                        "{}|{}",
                                        hprot.id,
                                        view_token("H", &high_proj(&prefix[..m]))
                                    ),
                                ],
                            )
                        })
                        .collect();
                    runs.push(run_of(&run_id, states));
                    assignment.push(vec![lx, hx]);
                    weights.insert(run_id, w);
                    continue;
                }
                let lrow = lprot.row(&low_proj(&prefix))?.to_vec();
                let hrow = hprot.row(&high_proj(&prefix))?.to_vec();
                for (li, wl) in &lrow {
                    if wl.is_zero() {
                        continue;
                    }
                    for (hi, wh) in &hrow {
                        if wh.is_zero() {
                            continue;
                        }
                        for ((lo, ho), wo) in pps.output.row(&prefix, *li, *hi)? {
                            if wo.is_zero() {
                                continue;
                            }
                            let mut next = prefix.clone();
                            next.push([*li, *hi, *lo, *ho]);
                            stack.push((next, &w * wl * wh * wo));
                        }
                    }
                }
            }
            cell_weights.push((cell_id, weights));
        }
    }

    let sys = System::new(
        vec!["L".to_string(), "H".to_string()],
        runs,
        pps.steps,
        Mode::Synchronous,
    )?;
    let init = InitStructure {
        choices: vec![
            pps.lambda.iter().map(|p| p.id.clone()).collect(),
            pps.gamma.iter().map(|p| p.id.clone()).collect(),
        ],
        assignment,
    };
    Ok(AdversarialSystem::with_init(sys, init, cell_weights)?)
}

/// The four-way verdict of the probabilistic noninterference check.
#[derive(Debug, Clone)]
pub struct PniReport {
    /// Direct check: each low observation equally likely under every high
    /// protocol (with the low protocol fixed).
    pub pni: SecrecyVerdict,
    /// No evidence about the initial choices.
    pub no_evidence: SecrecyVerdict,
    /// Generalized run-based secrecy of the high protocol identity.
    pub generalized_run_based: SecrecyVerdict,
    /// Generalized synchronous secrecy of the high protocol identity.
    pub generalized_sync: SecrecyVerdict,
    pub all_agree: bool,
}

/// Probabilistic noninterference, plus the equivalent formulations it must
/// agree with: absence of evidence and generalized secrecy of the high
/// protocol in both run-based and synchronous forms.
pub fn check_pni(pps: &ProbProtocolSystem, samples: usize, seed: u64) -> Result<PniReport, TraceError> {
    let adv = build_gray_syverson(pps)?;
    let sys = adv.base();
    let l = sys.agent("L").expect("agent L");
    let init = adv.init().expect("gray-syverson systems carry choices");

    // direct definition: fix the low protocol via the point's run, compare
    // the observation's likelihood across all high protocols
    let mut pni = SecrecyVerdict::holds("low observations equally likely under all high protocols");
    'outer: for p in sys.points() {
        let k = sys.info_set(l, p).expect("valid point");
        let lx = init.assignment[p.run][0];
        let cells: Vec<usize> = (0..adv.cells().len())
            .filter(|&cx| {
                let rep = *adv.cells()[cx].runs.first().expect("nonempty");
                init.assignment[rep][0] == lx
            })
            .collect();
        for a in 0..cells.len() {
            for b in (a + 1)..cells.len() {
                let va = adv.cells()[cells[a]].measure(&k.runs);
                let vb = adv.cells()[cells[b]].measure(&k.runs);
                if va != vb {
                    pni = SecrecyVerdict::fails(
                        Counterexample::CellLikelihood {
                            at: p,
                            left_cell: adv.cells()[cells[a]].id.clone(),
                            right_cell: adv.cells()[cells[b]].id.clone(),
                            left_value: va,
                            right_value: vb,
                        },
                        "a low observation distinguishes two high protocols".to_string(),
                    );
                    break 'outer;
                }
            }
        }
    }

    let no_evidence = crate::adversarial::check_no_evidence(&adv, l)?;
    let generalized_run_based = crate::adversarial::check_generalized_secrecy(
        &adv,
        l,
        &crate::adversarial::DerivedTarget::OthersInitChoice,
        &crate::adversarial::MeasureFamily::InitProducts,
        samples,
        seed,
    )?;
    let generalized_sync = crate::adversarial::check_generalized_sync_secrecy(
        &adv,
        l,
        &crate::adversarial::DerivedTarget::OthersInitChoice,
        &crate::adversarial::MeasureFamily::InitProducts,
        samples,
        seed,
    )?;
    let all_agree = pni.holds == no_evidence.holds
        && pni.holds == generalized_run_based.holds
        && pni.holds == generalized_sync.holds;
    Ok(PniReport {
        pni,
        no_evidence,
        generalized_run_based,
        generalized_sync,
        all_agree,
    })
}
