//! Secrecy under an initial nondeterministic choice.
//!
//! The runs are partitioned into cells, one per way the nondeterminism can
//! resolve (an input, a protocol, a speaker), and each cell carries its own
//! probability measure. There is no distribution across cells; instead the
//! system stands for the whole family of measures that restrict to the
//! per-cell ones.
//!
//! An observer obtains evidence for the initial choice when some
//! observation has different likelihoods in two cells she cannot rule out.
//! For systems whose cells come from per-agent initial choices, the absence
//! of evidence is equivalent to generalized run-based probabilistic secrecy
//! of the other agents' choices — decided here by the finite no-evidence
//! criterion plus seeded sampling of family members.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kernel::{AgentId, InfoFunction, KernelError, System};
use crate::prob::{check_prob_sync_secrecy, check_run_based_prob_secrecy, ProbError, RunMeasure};
use crate::rat::{format_ratio, rat_one, rat_sum, ratio};
use crate::secrecy::{Counterexample, SecrecyVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversarialError {
    #[error("run {0:?} is in no cell")]
    UncoveredRun(String),
    #[error("run {0:?} is in more than one cell")]
    OverlappingCells(String),
    #[error("unknown run {0:?} in cell {1:?}")]
    UnknownRun(String, String),
    #[error("cell {0:?} weights sum to {1}, not 1")]
    CellSum(String, String),
    #[error("cell {0:?} has a negative weight")]
    CellNegative(String),
    #[error("cell {cell:?} gives zero probability to the observation [{local}] of agent {agent:?} although the cell is compatible with it")]
    ZeroLikelihood { cell: String, agent: String, local: String },
    #[error("agent {agent:?} does not determine its own initial choice: information set [{local}] crosses choices")]
    NotAware { agent: String, local: String },
    #[error("initial-choice tuple {0:?} has no runs")]
    EmptyCell(String),
    #[error("operation needs an initial-choice structure")]
    InitRequired,
    #[error("unknown cell {0:?}")]
    UnknownCell(String),
    #[error("family weights must be positive and sum to 1, got sum {0}")]
    FamilyWeights(String),
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// One cell of the partition with its conditional measure.
#[derive(Debug, Clone)]
pub struct Cell {
    pub id: String,
    pub runs: BTreeSet<usize>,
    weights: BTreeMap<usize, BigRational>,
}

impl Cell {
    /// mu_D(U): the cell measure of `U ∩ D`.
    pub fn measure(&self, runs: &BTreeSet<usize>) -> BigRational {
        runs.iter()
            .filter_map(|r| self.weights.get(r).cloned())
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn run_weight(&self, run: usize) -> Option<&BigRational> {
        self.weights.get(&run)
    }
}

/// Per-agent initial choices and their assignment to runs.
#[derive(Debug, Clone)]
pub struct InitStructure {
    /// `choices[agent]` is the ordered list of that agent's possible
    /// initial choices.
    pub choices: Vec<Vec<String>>,
    /// `assignment[run][agent]` indexes into `choices[agent]`.
    pub assignment: Vec<Vec<usize>>,
}

impl InitStructure {
    /// The joint-choice tuple of a run, as a cell id.
    pub fn tuple_id(&self, run: usize) -> String {
        self.assignment[run]
            .iter()
            .enumerate()
            .map(|(a, &c)| self.choices[a][c].clone())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// A system of runs partitioned by an initial nondeterministic choice,
/// with a probability measure per cell.
#[derive(Debug, Clone)]
pub struct AdversarialSystem {
    base: System,
    cells: Vec<Cell>,
    cell_of_run: Vec<usize>,
    init: Option<InitStructure>,
}

impl AdversarialSystem {
    /// A plain cell partition (no initial-choice structure).
    pub fn new(
        base: System,
        cells: Vec<(String, BTreeMap<String, BigRational>)>,
    ) -> Result<Self, AdversarialError> {
        Self::build(base, cells, None)
    }

    /// Cells determined by per-agent initial choices; the cell of a run is
    /// its tuple of choices. Every tuple in the product must be realized,
    /// and each agent's local states must determine its own choice.
    pub fn with_init(
        base: System,
        init: InitStructure,
        cell_weights: Vec<(String, BTreeMap<String, BigRational>)>,
    ) -> Result<Self, AdversarialError> {
        Self::build(base, cell_weights, Some(init))
    }

    fn build(
        base: System,
        cells: Vec<(String, BTreeMap<String, BigRational>)>,
        init: Option<InitStructure>,
    ) -> Result<Self, AdversarialError> {
        let mut cell_of_run = vec![usize::MAX; base.run_count()];
        let mut built = Vec::with_capacity(cells.len());
        for (cx, (id, named)) in cells.into_iter().enumerate() {
            let mut weights = BTreeMap::new();
            let mut runs = BTreeSet::new();
            for (run_id, w) in named {
                let rix = base
                    .run_index(&run_id)
                    .ok_or_else(|| AdversarialError::UnknownRun(run_id.clone(), id.clone()))?;
                if w < BigRational::zero() {
                    return Err(AdversarialError::CellNegative(id.clone()));
                }
                if cell_of_run[rix] != usize::MAX {
                    return Err(AdversarialError::OverlappingCells(run_id));
                }
                cell_of_run[rix] = cx;
                runs.insert(rix);
                weights.insert(rix, w);
            }
            let total = rat_sum(weights.values());
            if total != rat_one() {
                return Err(AdversarialError::CellSum(id.clone(), format_ratio(&total)));
            }
            built.push(Cell { id, runs, weights });
        }
        for (rix, &cx) in cell_of_run.iter().enumerate() {
            if cx == usize::MAX {
                return Err(AdversarialError::UncoveredRun(base.run_id(rix).to_string()));
            }
        }

        // compatible cells must give every observation positive probability
        for a in 0..base.agent_count() {
            let i = AgentId(a);
            for k in base.info_sets(i) {
                for cell in &built {
                    if !cell.runs.is_disjoint(&k.runs) && cell.measure(&k.runs).is_zero() {
                        return Err(AdversarialError::ZeroLikelihood {
                            cell: cell.id.clone(),
                            agent: base.agent_name(i).to_string(),
                            local: k.local.clone(),
                        });
                    }
                }
            }
        }

        if let Some(init) = &init {
            // cells must be exactly the nonempty choice tuples, and every
            // tuple must be nonempty
            let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
            for run in 0..base.run_count() {
                tuples.insert(init.assignment[run].clone());
            }
            let mut expected = 1usize;
            for c in &init.choices {
                expected *= c.len();
            }
            if tuples.len() != expected {
                // name one missing tuple for the error message
                let mut missing = String::new();
                'outer: for flat in 0..expected {
                    let mut ix = flat;
                    let mut tuple = Vec::new();
                    for c in &init.choices {
                        tuple.push(ix % c.len());
                        ix /= c.len();
                    }
                    if !tuples.contains(&tuple) {
                        missing = tuple
                            .iter()
                            .enumerate()
                            .map(|(a, &c)| init.choices[a][c].clone())
                            .collect::<Vec<_>>()
                            .join("|");
                        break 'outer;
                    }
                }
                return Err(AdversarialError::EmptyCell(missing));
            }
            // cells and tuples must coincide
            for (rix, &cx) in cell_of_run.iter().enumerate() {
                #[allow(clippy::needless_range_loop)]
                for run2 in 0..base.run_count() {
                    let same_cell = cell_of_run[run2] == cx;
                    let same_tuple = init.assignment[run2] == init.assignment[rix];
                    if same_cell != same_tuple {
                        return Err(AdversarialError::OverlappingCells(
                            base.run_id(rix).to_string(),
                        ));
                    }
                }
            }
            // each agent is aware of its own choice
            for a in 0..base.agent_count() {
                let i = AgentId(a);
                for k in base.info_sets(i) {
                    let own: BTreeSet<usize> =
                        k.runs.iter().map(|&r| init.assignment[r][a]).collect();
                    if own.len() > 1 {
                        return Err(AdversarialError::NotAware {
                            agent: base.agent_name(i).to_string(),
                            local: k.local.clone(),
                        });
                    }
                }
            }
        }

        Ok(AdversarialSystem { base, cells: built, cell_of_run, init })
    }

    pub fn base(&self) -> &System {
        &self.base
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell_of_run(&self, run: usize) -> &Cell {
        &self.cells[self.cell_of_run[run]]
    }

    pub fn init(&self) -> Option<&InitStructure> {
        self.init.as_ref()
    }

    fn cell_index(&self, id: &str) -> Result<usize, AdversarialError> {
        self.cells
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| AdversarialError::UnknownCell(id.to_string()))
    }

    /// The derived agent reading off the initial choices of everyone but
    /// `i` (constant along each run).
    pub fn others_choice_system(&self, i: AgentId) -> Result<(System, AgentId), AdversarialError> {
        let init = self.init.as_ref().ok_or(AdversarialError::InitRequired)?;
        self.base.check_agent(i)?;
        let labels: Vec<String> = (0..self.base.run_count())
            .map(|r| {
                init.assignment[r]
                    .iter()
                    .enumerate()
                    .filter(|(a, _)| *a != i.0)
                    .map(|(a, &c)| init.choices[a][c].clone())
                    .collect::<Vec<_>>()
                    .join("|")
            })
            .collect();
        let (ext, jf) = self
            .base
            .with_derived_agent("others-choice", |_, p| labels[p.run].clone())?;
        Ok((ext, jf))
    }
}

/// Does agent `i` obtain evidence for the initial choice? Likelihoods of
/// every observation are compared across the cells `i` cannot rule out:
/// with an initial-choice structure these are all cells sharing i's own
/// coordinate (absent observations count as likelihood zero); without one,
/// the cells actually compatible with the observation.
pub fn check_no_evidence(
    adv: &AdversarialSystem,
    i: AgentId,
) -> Result<SecrecyVerdict, AdversarialError> {
    let sys = &adv.base;
    sys.check_agent(i)?;
    for p in sys.points() {
        let k = sys.info_set(i, p)?;
        let candidates: Vec<usize> = match &adv.init {
            Some(init) => {
                let own = init.assignment[p.run][i.0];
                (0..adv.cells.len())
                    .filter(|&cx| {
                        let rep = *adv.cells[cx].runs.first().expect("cells nonempty");
                        init.assignment[rep][i.0] == own
                    })
                    .collect()
            }
            None => (0..adv.cells.len())
                .filter(|&cx| !adv.cells[cx].runs.is_disjoint(&k.runs))
                .collect(),
        };
        let likelihoods: Vec<BigRational> = candidates
            .iter()
            .map(|&cx| adv.cells[cx].measure(&k.runs))
            .collect();
        for a in 0..candidates.len() {
            for b in (a + 1)..candidates.len() {
                if likelihoods[a] != likelihoods[b] {
                    return Ok(SecrecyVerdict::fails(
                        Counterexample::CellLikelihood {
                            at: p,
                            left_cell: adv.cells[candidates[a]].id.clone(),
                            right_cell: adv.cells[candidates[b]].id.clone(),
                            left_value: likelihoods[a].clone(),
                            right_value: likelihoods[b].clone(),
                        },
                        format!(
                            "agent {} observing [{}] learns about the initial choice",
                            sys.agent_name(i),
                            k.local
                        ),
                    ));
                }
            }
        }
    }
    Ok(SecrecyVerdict::holds(
        "every observation equally likely in all compatible cells",
    ))
}

/// Mix the per-cell measures with the given positive cell weights:
/// mu(S) = sum_D w(D) * mu_D(S ∩ D). Conditioning the result on a cell
/// returns that cell's measure.
pub fn sample_family_measure(
    adv: &AdversarialSystem,
    weights: &BTreeMap<String, BigRational>,
) -> Result<RunMeasure, AdversarialError> {
    let total = rat_sum(weights.values());
    if weights.len() != adv.cells.len()
        || total != rat_one()
        || weights.values().any(|w| w <= &BigRational::zero())
    {
        return Err(AdversarialError::FamilyWeights(format_ratio(&total)));
    }
    let mut run_weights = vec![BigRational::zero(); adv.base.run_count()];
    for (id, w) in weights {
        let cx = adv.cell_index(id)?;
        for (&r, cw) in &adv.cells[cx].weights {
            run_weights[r] = w * cw;
        }
    }
    Ok(RunMeasure::new(&adv.base, run_weights)?)
}

/// A family measure in product form: the cell of a choice tuple gets the
/// product of the per-agent weights of its coordinates. Satisfies the
/// independence constraint that one agent's choice is independent of the
/// others'.
pub fn product_family_measure(
    adv: &AdversarialSystem,
    per_agent: &[Vec<BigRational>],
) -> Result<RunMeasure, AdversarialError> {
    let init = adv.init.as_ref().ok_or(AdversarialError::InitRequired)?;
    let mut weights = BTreeMap::new();
    for cell in &adv.cells {
        let rep = *cell.runs.first().expect("cells nonempty");
        let mut w = rat_one();
        for (a, &c) in init.assignment[rep].iter().enumerate() {
            w *= &per_agent[a][c];
        }
        weights.insert(cell.id.clone(), w);
    }
    sample_family_measure(adv, &weights)
}

/// Does the measure make one agent's initial choice independent of the
/// joint choice of the others? Required of family members used by the
/// evidence checks; product measures satisfy it by construction.
pub fn init_independent(
    adv: &AdversarialSystem,
    mu: &RunMeasure,
    i: AgentId,
) -> Result<bool, AdversarialError> {
    let init = adv.init.as_ref().ok_or(AdversarialError::InitRequired)?;
    adv.base.check_agent(i)?;
    for cell in &adv.cells {
        let rep = *cell.runs.first().expect("cells nonempty");
        let tuple = &init.assignment[rep];
        let own: BTreeSet<usize> = (0..adv.base.run_count())
            .filter(|&r| init.assignment[r][i.0] == tuple[i.0])
            .collect();
        let others: BTreeSet<usize> = (0..adv.base.run_count())
            .filter(|&r| {
                init.assignment[r]
                    .iter()
                    .enumerate()
                    .all(|(a, &c)| a == i.0 || c == tuple[a])
            })
            .collect();
        let joint = mu.mass(cell.runs.iter().copied());
        let product = mu.mass(own.iter().copied()) * mu.mass(others.iter().copied());
        if joint != product {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How family members are generated for the sampled generalized checks.
#[derive(Debug, Clone)]
pub enum MeasureFamily {
    /// Just this measure.
    Singleton(RunMeasure),
    /// Positive mixtures of the cell measures.
    CellMixtures,
    /// Product mixtures respecting per-agent independence (needs an
    /// initial-choice structure).
    InitProducts,
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|x| ratio(x, total)).collect()
}

fn family_members(
    adv: &AdversarialSystem,
    family: &MeasureFamily,
    samples: usize,
    seed: u64,
) -> Result<Vec<(String, RunMeasure)>, AdversarialError> {
    let mut out = Vec::new();
    match family {
        MeasureFamily::Singleton(mu) => out.push(("given".to_string(), mu.clone())),
        MeasureFamily::CellMixtures => {
            // canonical uniform member first
            let n = adv.cells.len();
            let uniform: BTreeMap<String, BigRational> = adv
                .cells
                .iter()
                .map(|c| (c.id.clone(), ratio(1, n as i64)))
                .collect();
            out.push(("uniform".to_string(), sample_family_measure(adv, &uniform)?));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in 0..samples {
                let ws = random_weights(&mut rng, n);
                let named: BTreeMap<String, BigRational> = adv
                    .cells
                    .iter()
                    .zip(ws)
                    .map(|(c, w)| (c.id.clone(), w))
                    .collect();
                out.push((format!("sample-{s}"), sample_family_measure(adv, &named)?));
            }
        }
        MeasureFamily::InitProducts => {
            let init = adv.init.as_ref().ok_or(AdversarialError::InitRequired)?;
            let uniform: Vec<Vec<BigRational>> = init
                .choices
                .iter()
                .map(|c| vec![ratio(1, c.len() as i64); c.len()])
                .collect();
            out.push(("uniform".to_string(), product_family_measure(adv, &uniform)?));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in 0..samples {
                let per_agent: Vec<Vec<BigRational>> = init
                    .choices
                    .iter()
                    .map(|c| random_weights(&mut rng, c.len()))
                    .collect();
                out.push((
                    format!("sample-{s}"),
                    product_family_measure(adv, &per_agent)?,
                ));
            }
        }
    }
    Ok(out)
}

/// What the generalized check protects.
pub enum DerivedTarget {
    /// The tuple of initial choices of everyone but the observer.
    OthersInitChoice,
    /// A function of one agent's local state.
    AgentFunction(AgentId, InfoFunction),
}

fn derived_pair(
    adv: &AdversarialSystem,
    i: AgentId,
    target: &DerivedTarget,
) -> Result<(System, AgentId), AdversarialError> {
    match target {
        DerivedTarget::OthersInitChoice => adv.others_choice_system(i),
        DerivedTarget::AgentFunction(j, f) => Ok(f
            .derived_system(&adv.base, &format!("{}_f", adv.base.agent_name(*j)))?),
    }
}

/// Generalized run-based probabilistic secrecy over a family of measures:
/// checked for the canonical member and `samples` seeded members. A failing
/// member refutes generalized secrecy outright; all-pass is reported as
/// bounded evidence (the family is infinite), which the evidential
/// equivalence theorem upgrades to a proof under its hypotheses.
pub fn check_generalized_secrecy(
    adv: &AdversarialSystem,
    i: AgentId,
    target: &DerivedTarget,
    family: &MeasureFamily,
    samples: usize,
    seed: u64,
) -> Result<SecrecyVerdict, AdversarialError> {
    let (ext, jf) = derived_pair(adv, i, target)?;
    let members = family_members(adv, family, samples, seed)?;
    let n = members.len();
    for (label, mu) in members {
        // same runs in the same order, so the measure transfers
        let ext_mu = RunMeasure::new(&ext, mu.weights().to_vec())?;
        let verdict = check_run_based_prob_secrecy(&ext, &ext_mu, i, jf)?;
        if !verdict.holds {
            return Ok(SecrecyVerdict {
                holds: false,
                counterexample: verdict.counterexample,
                witness_note: format!("family member {label}: {}", verdict.witness_note),
            });
        }
    }
    Ok(SecrecyVerdict::holds(format!(
        "run-based probabilistic secrecy holds for all {n} checked family members (bounded evidence)"
    )))
}

/// Synchronous variant of the generalized check, for the trace-front
/// equivalences.
pub fn check_generalized_sync_secrecy(
    adv: &AdversarialSystem,
    i: AgentId,
    target: &DerivedTarget,
    family: &MeasureFamily,
    samples: usize,
    seed: u64,
) -> Result<SecrecyVerdict, AdversarialError> {
    let (ext, jf) = derived_pair(adv, i, target)?;
    let members = family_members(adv, family, samples, seed)?;
    let n = members.len();
    for (label, mu) in members {
        let ext_mu = RunMeasure::new(&ext, mu.weights().to_vec())?;
        let verdict = check_prob_sync_secrecy(&ext, &ext_mu, i, jf)?;
        if !verdict.holds {
            return Ok(SecrecyVerdict {
                holds: false,
                counterexample: verdict.counterexample,
                witness_note: format!("family member {label}: {}", verdict.witness_note),
            });
        }
    }
    Ok(SecrecyVerdict::holds(format!(
        "probabilistic synchronous secrecy holds for all {n} checked family members (bounded evidence)"
    )))
}

/// Result of testing the evidential equivalence on one system.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum EvidentialOutcome {
    /// Neither synchrony nor perfect recall for the observer: the
    /// equivalence is not asserted.
    HypothesisNotMet { note: String },
    Checked {
        agree: bool,
        no_evidence: SecrecyVerdict,
        generalized: SecrecyVerdict,
    },
}

/// Compare the finite no-evidence criterion with sampled generalized
/// run-based secrecy of the others' choices. Under the hypotheses
/// (synchrony or perfect recall for the observer) the two must agree.
pub fn check_evidential_equivalence(
    adv: &AdversarialSystem,
    i: AgentId,
    samples: usize,
    seed: u64,
) -> Result<EvidentialOutcome, AdversarialError> {
    if adv.init.is_none() {
        return Err(AdversarialError::InitRequired);
    }
    adv.base.check_agent(i)?;
    if !adv.base.is_synchronous() && !adv.base.has_perfect_recall(i) {
        return Ok(EvidentialOutcome::HypothesisNotMet {
            note: format!(
                "system is asynchronous and agent {} lacks perfect recall",
                adv.base.agent_name(i)
            ),
        });
    }
    let no_evidence = check_no_evidence(adv, i)?;
    let generalized = check_generalized_secrecy(
        adv,
        i,
        &DerivedTarget::OthersInitChoice,
        &MeasureFamily::InitProducts,
        samples,
        seed,
    )?;
    Ok(EvidentialOutcome::Checked {
        agree: no_evidence.holds == generalized.holds,
        no_evidence,
        generalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cosmic_adv(n: usize, eps_num: i64, eps_den: i64) -> AdversarialSystem {
        let eps = ratio(eps_num, eps_den);
        let (sys, _) = fixtures::cosmic(n, &eps);
        let cells = fixtures::cosmic_cells(n, &eps);
        let assignment = (0..sys.run_count())
            .map(|r| {
                let id = sys.run_id(r);
                let x: usize = if let Some(rest) = id.strip_prefix("nr-") {
                    rest.parse().unwrap()
                } else {
                    id.strip_prefix("ray-")
                        .unwrap()
                        .split('-')
                        .next()
                        .unwrap()
                        .parse()
                        .unwrap()
                };
                vec![0, x]
            })
            .collect();
        let init = InitStructure {
            choices: vec![
                vec!["-".to_string()],
                (0..n).map(|x| format!("w{x}")).collect(),
            ],
            assignment,
        };
        AdversarialSystem::with_init(sys, init, cells).unwrap()
    }

    #[test]
    fn single_cell_no_evidence() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let weights: BTreeMap<String, BigRational> = sys
            .runs()
            .iter()
            .enumerate()
            .map(|(ix, r)| (r.id.clone(), mu.weight(ix).clone()))
            .collect();
        let adv = AdversarialSystem::new(sys, vec![("all".to_string(), weights)]).unwrap();
        for a in 0..adv.base().agent_count() {
            assert!(check_no_evidence(&adv, AgentId(a)).unwrap().holds);
        }
        // one cell with weight 1: the family measure is the cell measure
        let mut w = BTreeMap::new();
        w.insert("all".to_string(), ratio(1, 1));
        let rebuilt = sample_family_measure(&adv, &w).unwrap();
        assert_eq!(rebuilt, mu);
    }

    #[test]
    fn cosmic_observation_is_evidence() {
        let adv = cosmic_adv(4, 1, 10);
        let alice = adv.base().agent("alice").unwrap();
        let v = check_no_evidence(&adv, alice).unwrap();
        assert!(!v.holds);
        let Some(Counterexample::CellLikelihood { left_value, right_value, .. }) =
            v.counterexample
        else {
            panic!("expected likelihood mismatch");
        };
        // matching cell: 1 - eps + eps/n = 37/40; others: eps/n = 1/40
        let mut vals = [left_value, right_value];
        vals.sort();
        assert_eq!(vals, [ratio(1, 40), ratio(37, 40)]);
        // bob knows his own choice and that is not evidence
        let bob = adv.base().agent("bob").unwrap();
        assert!(check_no_evidence(&adv, bob).unwrap().holds);
    }

    #[test]
    fn mixtures_recondition_to_cells() {
        let adv = cosmic_adv(2, 1, 2);
        let n = adv.cells().len();
        let uniform: BTreeMap<String, BigRational> = adv
            .cells()
            .iter()
            .map(|c| (c.id.clone(), ratio(1, n as i64)))
            .collect();
        let mu = sample_family_measure(&adv, &uniform).unwrap();
        for cell in adv.cells() {
            let denom = mu.mass(cell.runs.iter().copied());
            assert_eq!(denom, ratio(1, n as i64));
            for &r in &cell.runs {
                let conditioned = mu.weight(r) / &denom;
                assert_eq!(&conditioned, cell.run_weight(r).unwrap());
            }
        }
    }

    #[test]
    fn ex2_measure_as_mixture() {
        // cells {r1} and {r2, r3} with weights 2/5 and 3/5, within-cell
        // (1, -) and (1/3, 2/3), rebuild the 2/5, 1/5, 2/5 measure
        let sys = fixtures::ex2();
        let mut c1 = BTreeMap::new();
        c1.insert("r1".to_string(), ratio(1, 1));
        let mut c2 = BTreeMap::new();
        c2.insert("r2".to_string(), ratio(1, 3));
        c2.insert("r3".to_string(), ratio(2, 3));
        let adv = AdversarialSystem::new(
            sys,
            vec![("c1".to_string(), c1), ("c2".to_string(), c2)],
        )
        .unwrap();
        let mut w = BTreeMap::new();
        w.insert("c1".to_string(), ratio(2, 5));
        w.insert("c2".to_string(), ratio(3, 5));
        let mu = sample_family_measure(&adv, &w).unwrap();
        assert_eq!(mu.weight(0), &ratio(2, 5));
        assert_eq!(mu.weight(1), &ratio(1, 5));
        assert_eq!(mu.weight(2), &ratio(2, 5));
    }

    #[test]
    fn family_weights_validated() {
        let adv = cosmic_adv(2, 1, 2);
        let mut w = BTreeMap::new();
        w.insert("w0".to_string(), ratio(1, 2));
        assert!(matches!(
            sample_family_measure(&adv, &w),
            Err(AdversarialError::FamilyWeights(_))
        ));
    }

    #[test]
    fn generalized_secrecy_singleton_matches_plain_check() {
        let adv = cosmic_adv(2, 1, 2);
        let alice = adv.base().agent("alice").unwrap();
        let bob = adv.base().agent("bob").unwrap();
        let uniform: Vec<Vec<BigRational>> = vec![
            vec![ratio(1, 1)],
            vec![ratio(1, 2), ratio(1, 2)],
        ];
        let mu = product_family_measure(&adv, &uniform).unwrap();
        let f = InfoFunction::identity(adv.base(), bob).unwrap();
        let single = check_generalized_secrecy(
            &adv,
            alice,
            &DerivedTarget::AgentFunction(bob, f.clone()),
            &MeasureFamily::Singleton(mu.clone()),
            0,
            1,
        )
        .unwrap();
        let (ext, jf) = f.derived_system(adv.base(), "bob_f").unwrap();
        let ext_mu = RunMeasure::new(&ext, mu.weights().to_vec()).unwrap();
        let plain = check_run_based_prob_secrecy(&ext, &ext_mu, alice, jf).unwrap();
        assert_eq!(single.holds, plain.holds);
    }

    #[test]
    fn evidential_equivalence_cosmic() {
        // evidence exists, and some sampled family member indeed violates
        // run-based secrecy of bob's choice
        let adv = cosmic_adv(2, 1, 2);
        let alice = adv.base().agent("alice").unwrap();
        match check_evidential_equivalence(&adv, alice, 5, 11).unwrap() {
            EvidentialOutcome::Checked { agree, no_evidence, generalized } => {
                assert!(agree);
                assert!(!no_evidence.holds);
                assert!(!generalized.holds);
            }
            EvidentialOutcome::HypothesisNotMet { .. } => panic!("cosmic is synchronous"),
        }
    }

    #[test]
    fn awareness_validated() {
        // agent 2's state does not determine its choice: rejected
        let sys = fixtures::ex2();
        let mut c1 = BTreeMap::new();
        c1.insert("r1".to_string(), ratio(1, 1));
        let mut c2 = BTreeMap::new();
        c2.insert("r2".to_string(), ratio(1, 2));
        c2.insert("r3".to_string(), ratio(1, 2));
        let init = InitStructure {
            choices: vec![vec!["-".to_string()], vec!["a".to_string(), "b".to_string()]],
            assignment: vec![vec![0, 0], vec![0, 1], vec![0, 1]],
        };
        let err = AdversarialSystem::with_init(
            sys,
            init,
            vec![("-|a".to_string(), c1), ("-|b".to_string(), c2)],
        )
        .unwrap_err();
        assert!(matches!(err, AdversarialError::NotAware { .. }));
    }

    #[test]
    fn partition_validated() {
        let sys = fixtures::ex2();
        let mut c1 = BTreeMap::new();
        c1.insert("r1".to_string(), ratio(1, 1));
        let err = AdversarialSystem::new(sys, vec![("c1".to_string(), c1)]).unwrap_err();
        assert!(matches!(err, AdversarialError::UncoveredRun(_)));
    }

    #[test]
    fn product_measures_are_init_independent() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let adv = crate::gen::random_init_adversarial(&mut rng);
            let init = adv.init().unwrap();
            let per_agent: Vec<Vec<BigRational>> = init
                .choices
                .iter()
                .map(|c| vec![ratio(1, c.len() as i64); c.len()])
                .collect();
            let mu = product_family_measure(&adv, &per_agent).unwrap();
            for a in 0..adv.base().agent_count() {
                assert!(init_independent(&adv, &mu, AgentId(a)).unwrap());
            }
        }
        // a correlated mixture is caught: skew one joint cell's weight
        // away from the product form
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(18);
        let adv = loop {
            let candidate = crate::gen::random_init_adversarial(&mut rng);
            let init = candidate.init().unwrap();
            if init.choices[0].len() == 2 && init.choices[1].len() == 2 {
                break candidate;
            }
        };
        let mut weights = BTreeMap::new();
        let skews = [ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)];
        for (cell, w) in adv.cells().iter().zip(skews) {
            weights.insert(cell.id.clone(), w);
        }
        let mu = sample_family_measure(&adv, &weights).unwrap();
        let both = (0..2).all(|a| init_independent(&adv, &mu, AgentId(a)).unwrap());
        assert!(!both);
    }

    #[test]
    fn equivalence_gated_without_synchrony_or_recall() {
        // asynchronous, and the observer forgets its first observation:
        // the equivalence is reported as not applicable, not asserted
        use crate::kernel::{run_of, GlobalState, Mode, System};
        let gs = |a: &str, b: &str| GlobalState::new("-", vec![a.to_string(), b.to_string()]);
        let runs = vec![
            run_of("r0", vec![gs("u|s", "ca|x"), gs("u|t", "ca|x"), gs("u|s", "ca|x")]),
            run_of("r1", vec![gs("u|t", "cb|y"), gs("u|s", "cb|y"), gs("u|t", "cb|y")]),
        ];
        let sys = System::new(
            vec!["1".to_string(), "2".to_string()],
            runs,
            2,
            Mode::AsynchronousStutter,
        )
        .unwrap();
        let i = sys.agent("1").unwrap();
        assert!(!sys.is_synchronous());
        assert!(!sys.has_perfect_recall(i));
        let init = InitStructure {
            choices: vec![vec!["u".to_string()], vec!["ca".to_string(), "cb".to_string()]],
            assignment: vec![vec![0, 0], vec![0, 1]],
        };
        let mut c0 = BTreeMap::new();
        c0.insert("r0".to_string(), ratio(1, 1));
        let mut c1 = BTreeMap::new();
        c1.insert("r1".to_string(), ratio(1, 1));
        let adv = AdversarialSystem::with_init(
            sys,
            init,
            vec![("u|ca".to_string(), c0), ("u|cb".to_string(), c1)],
        )
        .unwrap();
        match check_evidential_equivalence(&adv, i, 2, 3).unwrap() {
            EvidentialOutcome::HypothesisNotMet { note } => {
                assert!(note.contains("perfect recall"));
            }
            EvidentialOutcome::Checked { .. } => panic!("hypotheses are not met"),
        }
    }
}
