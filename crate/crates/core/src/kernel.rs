//! Finite multiagent systems as sets of runs of global states.
//!
//! A [`System`] is a finite set of runs over a common agent list and a fixed
//! horizon `M`; a point is a (run, time) pair with `time <= M`. In
//! asynchronous-stutter mode the final global state is understood to repeat
//! forever, so quantifying over times `0..=M` loses nothing. Systems declared
//! synchronous are checked at construction: equal local states must imply
//! equal times.
//!
//! Information sets, perfect recall, allowability functions, and information
//! functions all live here; the secrecy checks in the sibling modules are
//! pure functions over this immutable data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an agent in the system's agent list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub usize);

/// A (run, time) pair. Ordering is lexicographic in (run index, time), which
/// fixes the counterexample reported by every check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub run: usize,
    pub time: usize,
}

impl Point {
    pub fn new(run: usize, time: usize) -> Self {
        Point { run, time }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(run {}, time {})", self.run, self.time)
    }
}

/// Whether local states are meant to encode time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "synchronous")]
    Synchronous,
    #[serde(rename = "asynchronous-stutter")]
    AsynchronousStutter,
}

/// One global state: an environment token plus one local token per agent,
/// aligned with the system's agent list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalState {
    pub env: String,
    pub locals: Vec<String>,
}

impl GlobalState {
    pub fn new(env: impl Into<String>, locals: Vec<String>) -> Self {
        GlobalState { env: env.into(), locals }
    }
}

/// A named run: exactly `horizon + 1` global states.
#[derive(Debug, Clone)]
pub struct Run {
    pub id: String,
    pub states: Vec<GlobalState>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("system has no agents")]
    NoAgents,
    #[error("system has no runs")]
    NoRuns,
    #[error("duplicate run id {0:?}")]
    DuplicateRunId(String),
    #[error("run {run:?} has {found} states, expected {expected} (horizon + 1)")]
    RunLength { run: String, expected: usize, found: usize },
    #[error("run {run:?} state {time} has {found} local states, expected {expected}")]
    LocalsArity { run: String, time: usize, expected: usize, found: usize },
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("agent index {0} out of range")]
    BadAgentIndex(usize),
    #[error("point {0} is not a point of the system")]
    BadPoint(Point),
    #[error("system declared synchronous but agent {agent:?} has state {local:?} at times {t1} and {t2}")]
    NotSynchronous { agent: String, local: String, t1: usize, t2: usize },
    #[error("check requires a synchronous system")]
    SystemNotSynchronous,
    #[error("information function for agent {agent:?} is not total: no entry for local state {local:?}")]
    InfoFunctionPartial { agent: String, local: String },
    #[error("explicit allowability table has no entry for point {0}")]
    AllowabilityMissing(Point),
    #[error("allowability function excludes {excluded} from C({point}) but it lies in the information set of agent {agent:?}")]
    AllowabilityTooSmall { point: Point, excluded: Point, agent: String },
    #[error("agents must be distinct, got {0:?} twice")]
    SameAgent(String),
}

/// The set of points an agent cannot distinguish from one of its members:
/// everything sharing the agent's local state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationSet {
    pub agent: AgentId,
    /// The shared local-state token.
    pub local: String,
    /// Members in (run, time) order. Never empty.
    pub points: Vec<Point>,
    /// Runs through the set (the projection to run indices).
    pub runs: BTreeSet<usize>,
}

impl InformationSet {
    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }
}

/// A finite multiagent system. Immutable after construction; all caches
/// (information sets, synchrony, recall) are built up front.
#[derive(Debug, Clone)]
pub struct System {
    agents: Vec<String>,
    runs: Vec<Run>,
    horizon: usize,
    mode: Mode,
    /// `locals_sym[agent][run][time]` is the index of that agent's
    /// information set at the point.
    locals_sym: Vec<Vec<Vec<usize>>>,
    /// `info_sets[agent]` in order of first occurrence (lexicographic scan).
    info_sets: Vec<Vec<InformationSet>>,
    /// `global_id[run][time]`: interned id of the whole global state.
    global_id: Vec<Vec<usize>>,
    n_global_states: usize,
    synchronous: bool,
    recall: Vec<bool>,
}

impl System {
    pub fn new(
        agents: Vec<String>,
        runs: Vec<Run>,
        horizon: usize,
        mode: Mode,
    ) -> Result<System, KernelError> {
        if agents.is_empty() {
            return Err(KernelError::NoAgents);
        }
        if runs.is_empty() {
            return Err(KernelError::NoRuns);
        }
        let mut seen = BTreeSet::new();
        for run in &runs {
            if !seen.insert(run.id.clone()) {
                return Err(KernelError::DuplicateRunId(run.id.clone()));
            }
            if run.states.len() != horizon + 1 {
                return Err(KernelError::RunLength {
                    run: run.id.clone(),
                    expected: horizon + 1,
                    found: run.states.len(),
                });
            }
            for (time, st) in run.states.iter().enumerate() {
                if st.locals.len() != agents.len() {
                    return Err(KernelError::LocalsArity {
                        run: run.id.clone(),
                        time,
                        expected: agents.len(),
                        found: st.locals.len(),
                    });
                }
            }
        }

        let n_agents = agents.len();
        let mut locals_sym = vec![Vec::new(); n_agents];
        let mut info_sets: Vec<Vec<InformationSet>> = vec![Vec::new(); n_agents];
        for a in 0..n_agents {
            let mut table: BTreeMap<&str, usize> = BTreeMap::new();
            let mut per_run = Vec::with_capacity(runs.len());
            for (ri, run) in runs.iter().enumerate() {
                let mut per_time = Vec::with_capacity(horizon + 1);
                for (ti, st) in run.states.iter().enumerate() {
                    let local = st.locals[a].as_str();
                    let sym = match table.get(local) {
                        Some(&s) => s,
                        None => {
                            let s = info_sets[a].len();
                            table.insert(local, s);
                            info_sets[a].push(InformationSet {
                                agent: AgentId(a),
                                local: local.to_string(),
                                points: Vec::new(),
                                runs: BTreeSet::new(),
                            });
                            s
                        }
                    };
                    info_sets[a][sym].points.push(Point::new(ri, ti));
                    info_sets[a][sym].runs.insert(ri);
                    per_time.push(sym);
                }
                per_run.push(per_time);
            }
            locals_sym[a] = per_run;
        }

        let mut global_table: BTreeMap<(String, Vec<String>), usize> = BTreeMap::new();
        let mut global_id = Vec::with_capacity(runs.len());
        for run in &runs {
            let mut ids = Vec::with_capacity(horizon + 1);
            for st in &run.states {
                let key = (st.env.clone(), st.locals.clone());
                let next = global_table.len();
                let id = *global_table.entry(key).or_insert(next);
                ids.push(id);
            }
            global_id.push(ids);
        }

        let synchronous = info_sets.iter().all(|per_agent| {
            per_agent.iter().all(|k| {
                let t0 = k.points[0].time;
                k.points.iter().all(|p| p.time == t0)
            })
        });
        if mode == Mode::Synchronous && !synchronous {
            // report the first offending agent/state pair
            for (a, per_agent) in info_sets.iter().enumerate() {
                for k in per_agent {
                    let t0 = k.points[0].time;
                    if let Some(p) = k.points.iter().find(|p| p.time != t0) {
                        return Err(KernelError::NotSynchronous {
                            agent: agents[a].clone(),
                            local: k.local.clone(),
                            t1: t0,
                            t2: p.time,
                        });
                    }
                }
            }
        }

        let n_global_states = global_table.len();
        let mut sys = System {
            agents,
            runs,
            horizon,
            mode,
            locals_sym,
            info_sets,
            global_id,
            n_global_states,
            synchronous,
            recall: Vec::new(),
        };
        sys.recall = (0..n_agents)
            .map(|a| sys.compute_perfect_recall(AgentId(a)))
            .collect();
        Ok(sys)
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent(&self, name: &str) -> Result<AgentId, KernelError> {
        self.agents
            .iter()
            .position(|a| a == name)
            .map(AgentId)
            .ok_or_else(|| KernelError::UnknownAgent(name.to_string()))
    }

    pub fn agent_name(&self, i: AgentId) -> &str {
        &self.agents[i.0]
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn run_index(&self, id: &str) -> Option<usize> {
        self.runs.iter().position(|r| r.id == id)
    }

    pub fn run_id(&self, ix: usize) -> &str {
        &self.runs[ix].id
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn check_agent(&self, i: AgentId) -> Result<(), KernelError> {
        if i.0 < self.agents.len() {
            Ok(())
        } else {
            Err(KernelError::BadAgentIndex(i.0))
        }
    }

    pub fn check_point(&self, p: Point) -> Result<(), KernelError> {
        if p.run < self.runs.len() && p.time <= self.horizon {
            Ok(())
        } else {
            Err(KernelError::BadPoint(p))
        }
    }

    /// All points in (run, time) order; exactly `run_count * (horizon + 1)`.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let h = self.horizon;
        (0..self.runs.len()).flat_map(move |r| (0..=h).map(move |t| Point::new(r, t)))
    }

    pub fn point_count(&self) -> usize {
        self.runs.len() * (self.horizon + 1)
    }

    pub fn global_state(&self, p: Point) -> &GlobalState {
        &self.runs[p.run].states[p.time]
    }

    /// Interned id of the global state at `p` (equal states share an id).
    pub fn global_state_id(&self, p: Point) -> usize {
        self.global_id[p.run][p.time]
    }

    pub fn global_state_count(&self) -> usize {
        self.n_global_states
    }

    pub fn local_state(&self, i: AgentId, p: Point) -> &str {
        &self.runs[p.run].states[p.time].locals[i.0]
    }

    /// The information set K_i(p): the maximal set of points sharing agent
    /// i's local state with `p`. Always contains `p`.
    pub fn info_set(&self, i: AgentId, p: Point) -> Result<&InformationSet, KernelError> {
        self.check_agent(i)?;
        self.check_point(p)?;
        Ok(&self.info_sets[i.0][self.locals_sym[i.0][p.run][p.time]])
    }

    /// Index of K_i(p) within `info_sets(i)`.
    pub fn info_set_index(&self, i: AgentId, p: Point) -> usize {
        self.locals_sym[i.0][p.run][p.time]
    }

    /// All distinct information sets of agent `i`, in order of first
    /// occurrence in the (run, time) scan.
    pub fn info_sets(&self, i: AgentId) -> &[InformationSet] {
        &self.info_sets[i.0]
    }

    /// R(U): the runs through a set of points.
    pub fn runs_through(&self, points: impl IntoIterator<Item = Point>) -> BTreeSet<usize> {
        points.into_iter().map(|p| p.run).collect()
    }

    /// Equal local states imply equal times, for every agent.
    pub fn is_synchronous(&self) -> bool {
        self.synchronous
    }

    /// Agent i's local states along `p`'s run up to `p.time`, with
    /// consecutive repetitions removed.
    pub fn local_state_sequence(&self, i: AgentId, p: Point) -> Result<Vec<&str>, KernelError> {
        self.check_agent(i)?;
        self.check_point(p)?;
        let mut seq: Vec<&str> = Vec::new();
        for t in 0..=p.time {
            let s = self.local_state(i, Point::new(p.run, t));
            if seq.last() != Some(&s) {
                seq.push(s);
            }
        }
        Ok(seq)
    }

    fn compute_perfect_recall(&self, i: AgentId) -> bool {
        for k in &self.info_sets[i.0] {
            let first = self
                .local_state_sequence(i, k.points[0])
                .expect("cached point");
            for &p in &k.points[1..] {
                if self.local_state_sequence(i, p).expect("cached point") != first {
                    return false;
                }
            }
        }
        true
    }

    /// Every pair of points an agent cannot distinguish has the same
    /// de-duplicated local-state history.
    pub fn has_perfect_recall(&self, i: AgentId) -> bool {
        self.recall[i.0]
    }

    /// Extend the system with a derived agent whose local state at each
    /// point is `f(self, point)`. Existing agents and run identities are
    /// unchanged, so checks against the original agents keep their verdicts.
    pub fn with_derived_agent(
        &self,
        name: &str,
        f: impl Fn(&System, Point) -> String,
    ) -> Result<(System, AgentId), KernelError> {
        let mut agents = self.agents.clone();
        agents.push(name.to_string());
        let runs = self
            .runs
            .iter()
            .enumerate()
            .map(|(ri, run)| Run {
                id: run.id.clone(),
                states: run
                    .states
                    .iter()
                    .enumerate()
                    .map(|(ti, st)| {
                        let mut locals = st.locals.clone();
                        locals.push(f(self, Point::new(ri, ti)));
                        GlobalState { env: st.env.clone(), locals }
                    })
                    .collect(),
            })
            .collect();
        // The derived agent may break synchrony of a synchronous-intended
        // system (e.g. a constant function), so the extension is always
        // constructed in stutter mode; `is_synchronous` still reports the
        // actual property.
        let sys = System::new(agents, runs, self.horizon, Mode::AsynchronousStutter)?;
        let id = AgentId(self.agents.len());
        Ok((sys, id))
    }
}

/// A function of one agent's local state, used to carve a derived agent
/// out of an existing one ("f-secrecy").
#[derive(Debug, Clone)]
pub struct InfoFunction {
    pub agent: AgentId,
    map: BTreeMap<String, String>,
}

impl InfoFunction {
    /// Build from an explicit table; the table must cover every local state
    /// of `agent` occurring in `sys`.
    pub fn new(
        sys: &System,
        agent: AgentId,
        map: BTreeMap<String, String>,
    ) -> Result<Self, KernelError> {
        sys.check_agent(agent)?;
        for k in sys.info_sets(agent) {
            if !map.contains_key(&k.local) {
                return Err(KernelError::InfoFunctionPartial {
                    agent: sys.agent_name(agent).to_string(),
                    local: k.local.clone(),
                });
            }
        }
        Ok(InfoFunction { agent, map })
    }

    pub fn identity(sys: &System, agent: AgentId) -> Result<Self, KernelError> {
        let map = sys
            .info_sets(agent)
            .iter()
            .map(|k| (k.local.clone(), k.local.clone()))
            .collect();
        InfoFunction::new(sys, agent, map)
    }

    pub fn constant(sys: &System, agent: AgentId, value: &str) -> Result<Self, KernelError> {
        let map = sys
            .info_sets(agent)
            .iter()
            .map(|k| (k.local.clone(), value.to_string()))
            .collect();
        InfoFunction::new(sys, agent, map)
    }

    pub fn value(&self, local: &str) -> &str {
        self.map
            .get(local)
            .map(String::as_str)
            .expect("info function validated total")
    }

    pub fn value_at(&self, sys: &System, p: Point) -> &str {
        self.value(sys.local_state(self.agent, p))
    }

    /// The system extended with the agent j_f whose local state is
    /// `f(r_j(m))`.
    pub fn derived_system(
        &self,
        sys: &System,
        name: &str,
    ) -> Result<(System, AgentId), KernelError> {
        let agent = self.agent;
        sys.with_derived_agent(name, |s, p| self.value(s.local_state(agent, p)).to_string())
    }
}

/// What an agent is not permitted to rule out at each point.
#[derive(Debug, Clone)]
pub enum Allowability {
    /// C(p) = all points; relativizes to total secrecy.
    Total,
    /// C(p) = all points at p's time; the agent may know the time.
    Synchronous,
    /// C(p) = points within `epsilon` time steps of p.
    Semisynchronous(usize),
    /// Arbitrary table; must cover every point.
    Explicit(BTreeMap<Point, BTreeSet<Point>>),
}

impl Allowability {
    /// C(p) as a concrete point set.
    pub fn points_for(&self, sys: &System, p: Point) -> Result<BTreeSet<Point>, KernelError> {
        sys.check_point(p)?;
        match self {
            Allowability::Total => Ok(sys.points().collect()),
            Allowability::Synchronous => {
                Ok((0..sys.run_count()).map(|r| Point::new(r, p.time)).collect())
            }
            Allowability::Semisynchronous(eps) => Ok(sys
                .points()
                .filter(|q| q.time.abs_diff(p.time) <= *eps)
                .collect()),
            Allowability::Explicit(table) => table
                .get(&p)
                .cloned()
                .ok_or(KernelError::AllowabilityMissing(p)),
        }
    }

    /// Check the defining constraint K_i(p) ⊆ C(p) for every point.
    pub fn validate_for(&self, sys: &System, i: AgentId) -> Result<(), KernelError> {
        sys.check_agent(i)?;
        for p in sys.points() {
            let allowed = self.points_for(sys, p)?;
            let k = sys.info_set(i, p)?;
            if let Some(&q) = k.points.iter().find(|q| !allowed.contains(q)) {
                return Err(KernelError::AllowabilityTooSmall {
                    point: p,
                    excluded: q,
                    agent: sys.agent_name(i).to_string(),
                });
            }
        }
        Ok(())
    }

    /// The three conditions of the "depends only on timing" definition,
    /// checked exhaustively over the finite point set:
    /// (a) every point of every run is allowed from somewhere on every run;
    /// (b) moving the source point forward (backward) in time can be matched
    ///     by moving the allowed point forward (backward);
    /// (c) the allowed points on any single run form a contiguous interval.
    #[allow(clippy::needless_range_loop)]
    pub fn depends_only_on_timing(&self, sys: &System) -> Result<bool, KernelError> {
        let n_runs = sys.run_count();
        let h = sys.horizon();
        // allowed[r][m] = C(r, m) as per-run time sets
        let mut allowed = vec![vec![BTreeMap::<usize, BTreeSet<usize>>::new(); h + 1]; n_runs];
        for r in 0..n_runs {
            for m in 0..=h {
                let mut per_run: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
                for q in self.points_for(sys, Point::new(r, m))? {
                    per_run.entry(q.run).or_default().insert(q.time);
                }
                allowed[r][m] = per_run;
            }
        }
        // (a)
        for r in 0..n_runs {
            for r2 in 0..n_runs {
                for m2 in 0..=h {
                    let hit = (0..=h).any(|m| {
                        allowed[r][m].get(&r2).is_some_and(|ts| ts.contains(&m2))
                    });
                    if !hit {
                        return Ok(false);
                    }
                }
            }
        }
        // (b)
        for r in 0..n_runs {
            for m in 0..=h {
                for (&r2, times) in &allowed[r][m] {
                    for &m2 in times {
                        for n in m..=h {
                            let ok = allowed[r][n]
                                .get(&r2)
                                .is_some_and(|ts| ts.iter().any(|&n2| n2 >= m2));
                            if !ok {
                                return Ok(false);
                            }
                        }
                        for n in 0..=m {
                            let ok = allowed[r][n]
                                .get(&r2)
                                .is_some_and(|ts| ts.iter().any(|&n2| n2 <= m2));
                            if !ok {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        // (c)
        for r in 0..n_runs {
            for m in 0..=h {
                for times in allowed[r][m].values() {
                    let lo = *times.first().expect("nonempty");
                    let hi = *times.last().expect("nonempty");
                    if (lo..=hi).any(|t| !times.contains(&t)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Shorthand for building a run from state tuples in tests and fixtures.
pub fn run_of(id: &str, states: Vec<GlobalState>) -> Run {
    Run { id: id.to_string(), states }
}
