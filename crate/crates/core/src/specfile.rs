//! The JSON system-description format.
//!
//! One document can carry a run system with a measure, cell or
//! initial-choice annotations, named information and allowability
//! functions, proposition interpretations, trace-system blocks, protocol
//! tables, and an `expect` block of check verdicts. Rationals are strings
//! `"p/q"` so nothing ever goes through floating point.
//!
//! Loading validates everything the constructors validate and reports the
//! offending field in the error message.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversarial::{AdversarialSystem, InitStructure};
use crate::epistemic::Interpretation;
use crate::kernel::{
    Allowability, GlobalState, InfoFunction, Mode, Point, Run, System,
};
use crate::prob::RunMeasure;
use crate::rat::{format_ratio, parse_ratio};
use crate::traces::{
    AsyncTraceSystem, OutputRule, ProbProtocol, ProbProtocolSystem, Step, SyncTraceSystem,
};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
}

fn invalid(context: impl Into<String>, message: impl ToString) -> SpecError {
    SpecError::Invalid { context: context.into(), message: message.to_string() }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub agents: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunDoc>,
    /// run id -> "p/q"
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<BTreeMap<String, String>>,
    /// cell id -> run id -> "p/q"
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<BTreeMap<String, BTreeMap<String, String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub info_functions: BTreeMap<String, InfoFnDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub allowabilities: BTreeMap<String, AllowDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub interpretations: BTreeMap<String, PropDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sync_traces: Option<SyncTraceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub async_traces: Option<AsyncTraceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocols: Option<ProtocolSystemDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect: Vec<ExpectDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunDoc {
    pub id: String,
    pub states: Vec<StateDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDoc {
    #[serde(default = "default_env")]
    pub env: String,
    pub locals: BTreeMap<String, String>,
}

fn default_env() -> String {
    "-".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitDoc {
    /// agent -> ordered choice labels
    pub choices: BTreeMap<String, Vec<String>>,
    /// run id -> agent -> choice label
    pub assignment: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfoFnDoc {
    pub agent: String,
    pub map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AllowDoc {
    Total,
    Synchronous,
    Semisynchronous { epsilon: usize },
    Explicit { table: Vec<AllowRowDoc> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllowRowDoc {
    pub at: (String, usize),
    pub allow: Vec<(String, usize)>,
}

/// A primitive proposition: true where the agent's local state is listed,
/// or where the environment state is listed (conjunction if both given).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locals: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub env: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyncTraceDoc {
    pub li: Vec<String>,
    pub hi: Vec<String>,
    pub lo: Vec<String>,
    pub ho: Vec<String>,
    /// values by name, one [li, hi, lo, ho] tuple per step
    pub traces: Vec<Vec<[String; 4]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsyncTraceDoc {
    pub li: Vec<String>,
    pub lo: Vec<String>,
    pub hi: Vec<String>,
    pub ho: Vec<String>,
    pub traces: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolSystemDoc {
    pub li: Vec<String>,
    pub hi: Vec<String>,
    pub lo: Vec<String>,
    pub ho: Vec<String>,
    pub steps: usize,
    pub low_protocols: Vec<ProtocolDoc>,
    pub high_protocols: Vec<ProtocolDoc>,
    pub output: Vec<OutputRowDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolDoc {
    pub id: String,
    pub rows: Vec<ProtocolRowDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolRowDoc {
    /// own view so far: [input, output] value names
    pub view: Vec<[String; 2]>,
    /// next input -> "p/q"
    pub dist: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRowDoc {
    pub prefix: Vec<[String; 4]>,
    pub li: String,
    pub hi: String,
    /// "lo,ho" -> "p/q"
    pub dist: BTreeMap<String, String>,
}

/// One expected verdict; `check` names a registered check and the optional
/// fields are its parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpectDoc {
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub holds: bool,
}

/// Everything a document can describe, constructed and validated.
pub struct Loaded {
    pub doc: SpecDocument,
    pub system: Option<System>,
    pub measure: Option<RunMeasure>,
    pub adversarial: Option<AdversarialSystem>,
    pub info_functions: BTreeMap<String, InfoFunction>,
    pub allowabilities: BTreeMap<String, Allowability>,
    pub interpretation: Interpretation,
    pub sync_traces: Option<SyncTraceSystem>,
    pub async_traces: Option<AsyncTraceSystem>,
    pub protocols: Option<ProbProtocolSystem>,
}

pub fn load_path(path: &str) -> Result<Loaded, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| SpecError::Io { path: path.to_string(), source })?;
    load_str(&text)
}

pub fn load_str(text: &str) -> Result<Loaded, SpecError> {
    let doc: SpecDocument = serde_json::from_str(text)?;
    load_document(doc)
}

fn rational(context: &str, s: &str) -> Result<BigRational, SpecError> {
    parse_ratio(s).map_err(|e| invalid(context, e))
}

fn lookup_value(context: &str, alphabet: &[String], name: &str) -> Result<usize, SpecError> {
    alphabet
        .iter()
        .position(|v| v == name)
        .ok_or_else(|| invalid(context, format!("unknown value {name:?}")))
}

pub fn load_document(doc: SpecDocument) -> Result<Loaded, SpecError> {
    // run system
    let mut system = None;
    if !doc.runs.is_empty() {
        let horizon = doc
            .horizon
            .ok_or_else(|| invalid("horizon", "required when runs are given"))?;
        let mode = match doc.mode.as_deref() {
            Some("synchronous") => Mode::Synchronous,
            Some("asynchronous-stutter") | None => Mode::AsynchronousStutter,
            Some(other) => return Err(invalid("mode", format!("unknown mode {other:?}"))),
        };
        let runs: Vec<Run> = doc
            .runs
            .iter()
            .map(|r| {
                let states = r
                    .states
                    .iter()
                    .enumerate()
                    .map(|(t, st)| {
                        let locals = doc
                            .agents
                            .iter()
                            .map(|a| {
                                st.locals.get(a).cloned().ok_or_else(|| {
                                    invalid(
                                        format!("runs[{}].states[{t}]", r.id),
                                        format!("missing local state for agent {a:?}"),
                                    )
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(GlobalState::new(st.env.clone(), locals))
                    })
                    .collect::<Result<Vec<_>, SpecError>>()?;
                Ok(Run { id: r.id.clone(), states })
            })
            .collect::<Result<Vec<_>, SpecError>>()?;
        // unknown agents inside states
        for r in &doc.runs {
            for (t, st) in r.states.iter().enumerate() {
                for a in st.locals.keys() {
                    if !doc.agents.contains(a) {
                        return Err(invalid(
                            format!("runs[{}].states[{t}]", r.id),
                            format!("unknown agent {a:?}"),
                        ));
                    }
                }
            }
        }
        system = Some(
            System::new(doc.agents.clone(), runs, horizon, mode)
                .map_err(|e| invalid("runs", e))?,
        );
    }

    // trace blocks
    let sync_traces = doc
        .sync_traces
        .as_ref()
        .map(|td| {
            let traces = td
                .traces
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|step| {
                            Ok([
                                lookup_value("sync_traces.li", &td.li, &step[0])?,
                                lookup_value("sync_traces.hi", &td.hi, &step[1])?,
                                lookup_value("sync_traces.lo", &td.lo, &step[2])?,
                                lookup_value("sync_traces.ho", &td.ho, &step[3])?,
                            ])
                        })
                        .collect::<Result<Vec<Step>, SpecError>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            SyncTraceSystem::new(
                td.li.clone(),
                td.hi.clone(),
                td.lo.clone(),
                td.ho.clone(),
                traces,
            )
            .map_err(|e| invalid("sync_traces", e))
        })
        .transpose()?;

    let async_traces = doc
        .async_traces
        .as_ref()
        .map(|td| {
            AsyncTraceSystem::new(
                td.li.iter().cloned().collect(),
                td.lo.iter().cloned().collect(),
                td.hi.iter().cloned().collect(),
                td.ho.iter().cloned().collect(),
                td.traces.iter().cloned().collect::<BTreeSet<_>>(),
            )
            .map_err(|e| invalid("async_traces", e))
        })
        .transpose()?;

    let protocols = doc
        .protocols
        .as_ref()
        .map(load_protocols)
        .transpose()?;

    // the system every agent-based check runs against
    let system = match (system, &sync_traces, &async_traces) {
        (Some(sys), _, _) => Some(sys),
        (None, Some(sigma), _) => Some(sigma.to_runs()),
        (None, None, Some(sigma)) => Some(
            sigma
                .to_runs(crate::traces::DEFAULT_ENUMERATION_BOUND)
                .map_err(|e| invalid("async_traces", e))?,
        ),
        (None, None, None) => None,
    };

    let measure = doc
        .measure
        .as_ref()
        .map(|m| {
            let sys = system
                .as_ref()
                .ok_or_else(|| invalid("measure", "needs a system"))?;
            let named = m
                .iter()
                .map(|(id, w)| Ok((id.clone(), rational(&format!("measure[{id}]"), w)?)))
                .collect::<Result<BTreeMap<_, _>, SpecError>>()?;
            RunMeasure::from_named(sys, &named).map_err(|e| invalid("measure", e))
        })
        .transpose()?;

    // cells / initial choices
    let mut adversarial = None;
    if let Some(cells) = &doc.cells {
        let sys = system
            .as_ref()
            .ok_or_else(|| invalid("cells", "needs a system"))?;
        let cell_weights = cells
            .iter()
            .map(|(id, named)| {
                let weights = named
                    .iter()
                    .map(|(run, w)| {
                        Ok((run.clone(), rational(&format!("cells[{id}][{run}]"), w)?))
                    })
                    .collect::<Result<BTreeMap<_, _>, SpecError>>()?;
                Ok((id.clone(), weights))
            })
            .collect::<Result<Vec<_>, SpecError>>()?;
        adversarial = Some(match &doc.init {
            None => AdversarialSystem::new(sys.clone(), cell_weights)
                .map_err(|e| invalid("cells", e))?,
            Some(init_doc) => {
                let choices: Vec<Vec<String>> = doc
                    .agents
                    .iter()
                    .map(|a| {
                        init_doc.choices.get(a).cloned().ok_or_else(|| {
                            invalid("init.choices", format!("missing agent {a:?}"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let assignment = sys
                    .runs()
                    .iter()
                    .map(|r| {
                        let by_agent = init_doc.assignment.get(&r.id).ok_or_else(|| {
                            invalid("init.assignment", format!("missing run {:?}", r.id))
                        })?;
                        doc.agents
                            .iter()
                            .enumerate()
                            .map(|(ax, a)| {
                                let label = by_agent.get(a).ok_or_else(|| {
                                    invalid(
                                        format!("init.assignment[{}]", r.id),
                                        format!("missing agent {a:?}"),
                                    )
                                })?;
                                choices[ax].iter().position(|c| c == label).ok_or_else(|| {
                                    invalid(
                                        format!("init.assignment[{}][{a}]", r.id),
                                        format!("unknown choice {label:?}"),
                                    )
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, SpecError>>()?;
                AdversarialSystem::with_init(
                    sys.clone(),
                    InitStructure { choices, assignment },
                    cell_weights,
                )
                .map_err(|e| invalid("cells", e))?
            }
        });
    }

    // named helpers
    let mut info_functions = BTreeMap::new();
    for (name, fd) in &doc.info_functions {
        let sys = system
            .as_ref()
            .ok_or_else(|| invalid("info_functions", "needs a system"))?;
        let agent = sys
            .agent(&fd.agent)
            .map_err(|e| invalid(format!("info_functions[{name}]"), e))?;
        let f = InfoFunction::new(sys, agent, fd.map.clone())
            .map_err(|e| invalid(format!("info_functions[{name}]"), e))?;
        info_functions.insert(name.clone(), f);
    }

    let mut allowabilities = BTreeMap::new();
    for (name, ad) in &doc.allowabilities {
        let c = match ad {
            AllowDoc::Total => Allowability::Total,
            AllowDoc::Synchronous => Allowability::Synchronous,
            AllowDoc::Semisynchronous { epsilon } => Allowability::Semisynchronous(*epsilon),
            AllowDoc::Explicit { table } => {
                let sys = system
                    .as_ref()
                    .ok_or_else(|| invalid("allowabilities", "needs a system"))?;
                let mut map = BTreeMap::new();
                for row in table {
                    let at = resolve_point(sys, &row.at)
                        .map_err(|e| invalid(format!("allowabilities[{name}]"), e))?;
                    let allow = row
                        .allow
                        .iter()
                        .map(|p| resolve_point(sys, p))
                        .collect::<Result<BTreeSet<_>, _>>()
                        .map_err(|e| invalid(format!("allowabilities[{name}]"), e))?;
                    map.insert(at, allow);
                }
                Allowability::Explicit(map)
            }
        };
        allowabilities.insert(name.clone(), c);
    }

    let mut interpretation = Interpretation::new();
    if let Some(sys) = &system {
        for (name, pd) in &doc.interpretations {
            let agent = pd
                .agent
                .as_ref()
                .map(|a| sys.agent(a))
                .transpose()
                .map_err(|e| invalid(format!("interpretations[{name}]"), e))?;
            let locals: BTreeSet<String> = pd.locals.iter().cloned().collect();
            let envs: BTreeSet<String> = pd.env.iter().cloned().collect();
            interpretation.define(sys, name, |s, p| {
                let local_ok = match agent {
                    Some(a) => locals.contains(s.local_state(a, p)),
                    None => true,
                };
                let env_ok = envs.is_empty() || envs.contains(&s.global_state(p).env);
                local_ok && env_ok
            });
        }
    }

    Ok(Loaded {
        doc,
        system,
        measure,
        adversarial,
        info_functions,
        allowabilities,
        interpretation,
        sync_traces,
        async_traces,
        protocols,
    })
}

pub fn resolve_point(sys: &System, p: &(String, usize)) -> Result<Point, SpecError> {
    let run = sys
        .run_index(&p.0)
        .ok_or_else(|| invalid("point", format!("unknown run {:?}", p.0)))?;
    let point = Point::new(run, p.1);
    sys.check_point(point).map_err(|e| invalid("point", e))?;
    Ok(point)
}

fn load_protocols(pd: &ProtocolSystemDoc) -> Result<ProbProtocolSystem, SpecError> {
    let views = |rows: &[ProtocolRowDoc],
                 inputs: &[String],
                 outputs: &[String],
                 who: &str|
     -> Result<BTreeMap<crate::traces::View, crate::traces::InputRow>, SpecError> {
        rows.iter()
            .map(|row| {
                let view = row
                    .view
                    .iter()
                    .map(|[i, o]| {
                        Ok((
                            lookup_value(who, inputs, i)?,
                            lookup_value(who, outputs, o)?,
                        ))
                    })
                    .collect::<Result<Vec<_>, SpecError>>()?;
                let dist = row
                    .dist
                    .iter()
                    .map(|(v, w)| {
                        Ok((
                            lookup_value(who, inputs, v)?,
                            rational(&format!("{who} dist"), w)?,
                        ))
                    })
                    .collect::<Result<Vec<_>, SpecError>>()?;
                Ok((view, dist))
            })
            .collect()
    };
    let lambda = pd
        .low_protocols
        .iter()
        .map(|p| {
            ProbProtocol::new(&p.id, views(&p.rows, &pd.li, &pd.lo, "low protocol")?)
                .map_err(|e| invalid(format!("low_protocols[{}]", p.id), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let gamma = pd
        .high_protocols
        .iter()
        .map(|p| {
            ProbProtocol::new(&p.id, views(&p.rows, &pd.hi, &pd.ho, "high protocol")?)
                .map_err(|e| invalid(format!("high_protocols[{}]", p.id), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = BTreeMap::new();
    for row in &pd.output {
        let prefix = row
            .prefix
            .iter()
            .map(|step| {
                Ok([
                    lookup_value("output.prefix", &pd.li, &step[0])?,
                    lookup_value("output.prefix", &pd.hi, &step[1])?,
                    lookup_value("output.prefix", &pd.lo, &step[2])?,
                    lookup_value("output.prefix", &pd.ho, &step[3])?,
                ])
            })
            .collect::<Result<Vec<Step>, SpecError>>()?;
        let li = lookup_value("output.li", &pd.li, &row.li)?;
        let hi = lookup_value("output.hi", &pd.hi, &row.hi)?;
        let dist = row
            .dist
            .iter()
            .map(|(k, w)| {
                let (lo, ho) = k
                    .split_once(',')
                    .ok_or_else(|| invalid("output.dist", "keys are \"lo,ho\""))?;
                Ok((
                    (
                        lookup_value("output.dist", &pd.lo, lo.trim())?,
                        lookup_value("output.dist", &pd.ho, ho.trim())?,
                    ),
                    rational("output.dist", w)?,
                ))
            })
            .collect::<Result<Vec<_>, SpecError>>()?;
        table.insert((prefix, li, hi), dist);
    }
    Ok(ProbProtocolSystem {
        li: pd.li.clone(),
        hi: pd.hi.clone(),
        lo: pd.lo.clone(),
        ho: pd.ho.clone(),
        lambda,
        gamma,
        output: OutputRule::new(table).map_err(|e| invalid("output", e))?,
        steps: pd.steps,
    })
}

// ---------------------------------------------------------------------------
// emission

/// Describe a run system (and optional measure) as a document.
pub fn emit_system(sys: &System, measure: Option<&RunMeasure>) -> SpecDocument {
    let runs = sys
        .runs()
        .iter()
        .map(|r| RunDoc {
            id: r.id.clone(),
            states: r
                .states
                .iter()
                .map(|st| StateDoc {
                    env: st.env.clone(),
                    locals: sys
                        .agents()
                        .iter()
                        .cloned()
                        .zip(st.locals.iter().cloned())
                        .collect(),
                })
                .collect(),
        })
        .collect();
    SpecDocument {
        agents: sys.agents().to_vec(),
        horizon: Some(sys.horizon()),
        mode: Some(
            match sys.mode() {
                Mode::Synchronous => "synchronous",
                Mode::AsynchronousStutter => "asynchronous-stutter",
            }
            .to_string(),
        ),
        runs,
        measure: measure.map(|mu| {
            sys.runs()
                .iter()
                .enumerate()
                .map(|(ix, r)| (r.id.clone(), format_ratio(mu.weight(ix))))
                .collect()
        }),
        ..SpecDocument::default()
    }
}

pub fn emit_sync_traces(sigma: &SyncTraceSystem) -> SyncTraceDoc {
    SyncTraceDoc {
        li: sigma.li.clone(),
        hi: sigma.hi.clone(),
        lo: sigma.lo.clone(),
        ho: sigma.ho.clone(),
        traces: sigma
            .traces()
            .iter()
            .map(|t| {
                t.iter()
                    .map(|s| {
                        [
                            sigma.li[s[0]].clone(),
                            sigma.hi[s[1]].clone(),
                            sigma.lo[s[2]].clone(),
                            sigma.ho[s[3]].clone(),
                        ]
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn emit_async_traces(sigma: &AsyncTraceSystem) -> AsyncTraceDoc {
    AsyncTraceDoc {
        li: sigma.li.iter().cloned().collect(),
        lo: sigma.lo.iter().cloned().collect(),
        hi: sigma.hi.iter().cloned().collect(),
        ho: sigma.ho.iter().cloned().collect(),
        traces: sigma.traces().to_vec(),
    }
}

pub fn emit_protocols(pps: &ProbProtocolSystem) -> ProtocolSystemDoc {
    let protocol_doc = |p: &ProbProtocol, inputs: &[String], outputs: &[String]| ProtocolDoc {
        id: p.id.clone(),
        rows: p
            .rows()
            .iter()
            .map(|(view, dist)| ProtocolRowDoc {
                view: view
                    .iter()
                    .map(|&(i, o)| [inputs[i].clone(), outputs[o].clone()])
                    .collect(),
                dist: dist
                    .iter()
                    .map(|(v, w)| (inputs[*v].clone(), format_ratio(w)))
                    .collect(),
            })
            .collect(),
    };
    ProtocolSystemDoc {
        li: pps.li.clone(),
        hi: pps.hi.clone(),
        lo: pps.lo.clone(),
        ho: pps.ho.clone(),
        steps: pps.steps,
        low_protocols: pps
            .lambda
            .iter()
            .map(|p| protocol_doc(p, &pps.li, &pps.lo))
            .collect(),
        high_protocols: pps
            .gamma
            .iter()
            .map(|p| protocol_doc(p, &pps.hi, &pps.ho))
            .collect(),
        output: pps
            .output
            .rows()
            .iter()
            .map(|((prefix, li, hi), dist)| OutputRowDoc {
                prefix: prefix
                    .iter()
                    .map(|s| {
                        [
                            pps.li[s[0]].clone(),
                            pps.hi[s[1]].clone(),
                            pps.lo[s[2]].clone(),
                            pps.ho[s[3]].clone(),
                        ]
                    })
                    .collect(),
                li: pps.li[*li].clone(),
                hi: pps.hi[*hi].clone(),
                dist: dist
                    .iter()
                    .map(|((lo, ho), w)| {
                        (
                            format!("{},{}", pps.lo[*lo], pps.ho[*ho]),
                            format_ratio(w),
                        )
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn to_json(doc: &SpecDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rat::ratio;

    #[test]
    fn round_trip_run_system() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let doc = emit_system(&sys, Some(&mu));
        let text = to_json(&doc);
        let loaded = load_str(&text).unwrap();
        let sys2 = loaded.system.unwrap();
        assert_eq!(sys2.agents(), sys.agents());
        assert_eq!(sys2.run_count(), sys.run_count());
        assert_eq!(sys2.horizon(), sys.horizon());
        let mu2 = loaded.measure.unwrap();
        assert_eq!(mu2.weight(1), &ratio(1, 5));
    }

    #[test]
    fn bad_measure_rejected() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let mut doc = emit_system(&sys, Some(&mu));
        doc.measure
            .as_mut()
            .unwrap()
            .insert("r1".to_string(), "3/10".to_string());
        let err = match load_document(doc) {
            Err(e) => e,
            Ok(_) => panic!("weights summing to 9/10 must be rejected"),
        };
        assert!(err.to_string().contains("measure"));
    }

    #[test]
    fn unknown_agent_rejected() {
        let sys = fixtures::ex1();
        let mut doc = emit_system(&sys, None);
        doc.runs[0].states[0]
            .locals
            .insert("ghost".to_string(), "X".to_string());
        let err = match load_document(doc) {
            Err(e) => e,
            Ok(_) => panic!("unknown agent must be rejected"),
        };
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn round_trip_sync_traces() {
        let sigma = fixtures::xor_system(1);
        let doc = SpecDocument {
            sync_traces: Some(emit_sync_traces(&sigma)),
            ..SpecDocument::default()
        };
        let loaded = load_str(&to_json(&doc)).unwrap();
        let sigma2 = loaded.sync_traces.unwrap();
        assert_eq!(sigma2.traces().len(), sigma.traces().len());
        assert_eq!(
            sigma2.check_separability().holds,
            sigma.check_separability().holds
        );
        // the derived run system is also available
        assert!(loaded.system.is_some());
    }

    #[test]
    fn explicit_allowability_loads() {
        let sys = fixtures::ex1();
        let mut doc = emit_system(&sys, None);
        // the everything-allowed function written out as a table
        let all: Vec<(String, usize)> = sys
            .points()
            .map(|p| (sys.run_id(p.run).to_string(), p.time))
            .collect();
        doc.allowabilities.insert(
            "tbl".to_string(),
            AllowDoc::Explicit {
                table: all
                    .iter()
                    .map(|at| AllowRowDoc { at: at.clone(), allow: all.clone() })
                    .collect(),
            },
        );
        let loaded = load_str(&to_json(&doc)).unwrap();
        let c = &loaded.allowabilities["tbl"];
        let sys2 = loaded.system.as_ref().unwrap();
        let a1 = sys2.agent("1").unwrap();
        let a2 = sys2.agent("2").unwrap();
        let total = crate::secrecy::check_total_secrecy(sys2, a1, a2).unwrap();
        let via_table = crate::secrecy::check_c_secrecy(sys2, a1, a2, c).unwrap();
        assert_eq!(total.holds, via_table.holds);
    }

    #[test]
    fn round_trip_protocols() {
        let pps = fixtures::gs_xor(2);
        let doc = SpecDocument {
            protocols: Some(emit_protocols(&pps)),
            ..SpecDocument::default()
        };
        let loaded = load_str(&to_json(&doc)).unwrap();
        let pps2 = loaded.protocols.unwrap();
        let r1 = crate::traces::check_pni(&pps, 2, 3).unwrap();
        let r2 = crate::traces::check_pni(&pps2, 2, 3).unwrap();
        assert_eq!(r1.pni.holds, r2.pni.holds);
    }
}
