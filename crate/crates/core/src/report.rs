//! Batch driving: the named-check registry, expect-block evaluation,
//! fixture emission, and the randomized property suites.
//!
//! Reports are deterministic for a fixed document and seed. Suite failures
//! carry a reproducing system description, shrunk by dropping runs while
//! the failure persists.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::adversarial::{
    check_evidential_equivalence, check_generalized_secrecy, check_no_evidence, AdversarialSystem,
    DerivedTarget, EvidentialOutcome, MeasureFamily,
};
use crate::epistemic::{
    oracle_c_secrecy, oracle_run_based_secrecy, DEFAULT_INFO_SET_BOUND,
};
use crate::fixtures;
use crate::gen;
use crate::kernel::{AgentId, Allowability, InfoFunction, System};
use crate::plaus::{
    check_plaus_secrecy, check_plaus_symmetry_lemmas, measure_vector_space, probability_space,
    trivial_space, LemmaOutcome, PlausVariant,
};
use crate::prob::{
    check_independence, check_prob_sync_secrecy, check_prob_total_secrecy,
    check_run_based_prob_secrecy, oracle_prob_syntactic, partition_info_sets, PointAssignment,
    RunMeasure, SyntacticVariant,
};
use crate::rat::format_ratio;
use crate::secrecy::{
    check_c_secrecy, check_f_secrecy, check_nondeducibility, check_run_based_secrecy,
    check_synchronous_secrecy, check_total_secrecy, SecrecyVerdict,
};
use crate::specfile::{
    emit_async_traces, emit_protocols, emit_sync_traces, ExpectDoc, Loaded, SpecDocument,
};
use crate::traces::{
    all_deterministic_strategies, build_gray_syverson, check_nos, check_pni,
    DEFAULT_ENUMERATION_BOUND,
};

/// Samples and seed used by the registry for the family-sampling checks,
/// pinned so reports are reproducible.
pub const REGISTRY_SAMPLES: usize = 5;
pub const REGISTRY_SEED: u64 = 7;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
    #[error("check {check:?} needs parameter {param:?}")]
    MissingParam { check: String, param: String },
    #[error("check {0:?} needs {1}")]
    MissingInput(String, &'static str),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("{0}")]
    Failed(String),
}

fn fail(e: impl ToString) -> ReportError {
    ReportError::Failed(e.to_string())
}

impl From<String> for ReportError {
    fn from(message: String) -> Self {
        ReportError::Failed(message)
    }
}

/// One executed check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub params: String,
    pub holds: bool,
    pub expected: bool,
    pub matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    pub note: String,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub rows: Vec<CheckRow>,
    pub all_match: bool,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let status = if row.matched { "ok  " } else { "FAIL" };
            out.push_str(&format!(
                "{status} {:<28} {:<24} holds={} expected={} ({} ms)\n",
                row.check, row.params, row.holds, row.expected, row.elapsed_ms
            ));
            if !row.matched {
                if let Some(cx) = &row.counterexample {
                    out.push_str(&format!("     counterexample: {cx}\n"));
                }
                out.push_str(&format!("     note: {}\n", row.note));
            }
        }
        out.push_str(&format!(
            "{} of {} checks matched\n",
            self.rows.iter().filter(|r| r.matched).count(),
            self.rows.len()
        ));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn agent_of(loaded: &Loaded, name: &Option<String>, check: &str, param: &str) -> Result<(System, AgentId), ReportError> {
    let sys = loaded
        .system
        .clone()
        .ok_or(ReportError::MissingInput(check.to_string(), "a run system"))?;
    let name = name.as_ref().ok_or_else(|| ReportError::MissingParam {
        check: check.to_string(),
        param: param.to_string(),
    })?;
    let id = sys.agent(name).map_err(fail)?;
    Ok((sys, id))
}

fn pair_of(loaded: &Loaded, entry: &ExpectDoc) -> Result<(System, AgentId, AgentId), ReportError> {
    let (sys, i) = agent_of(loaded, &entry.i, &entry.check, "i")?;
    let j = sys
        .agent(entry.j.as_ref().ok_or_else(|| ReportError::MissingParam {
            check: entry.check.clone(),
            param: "j".to_string(),
        })?)
        .map_err(fail)?;
    Ok((sys, i, j))
}

fn measure_of(loaded: &Loaded, check: &str) -> Result<RunMeasure, ReportError> {
    loaded
        .measure
        .clone()
        .ok_or(ReportError::MissingInput(check.to_string(), "a run measure"))
}

fn allowability_of(loaded: &Loaded, entry: &ExpectDoc) -> Result<Allowability, ReportError> {
    let name = entry.c.as_ref().ok_or_else(|| ReportError::MissingParam {
        check: entry.check.clone(),
        param: "c".to_string(),
    })?;
    loaded
        .allowabilities
        .get(name)
        .cloned()
        .ok_or_else(|| fail(format!("unknown allowability {name:?}")))
}

fn adversarial_of(loaded: &Loaded, check: &str) -> Result<AdversarialSystem, ReportError> {
    if let Some(adv) = &loaded.adversarial {
        return Ok(adv.clone());
    }
    if let Some(pps) = &loaded.protocols {
        return build_gray_syverson(pps).map_err(fail);
    }
    Err(ReportError::MissingInput(
        check.to_string(),
        "cells or protocol tables",
    ))
}

fn verdict_row(v: SecrecyVerdict) -> (bool, Option<String>, String) {
    (
        v.holds,
        v.counterexample.as_ref().map(|c| c.to_string()),
        v.witness_note,
    )
}

/// Execute one named check against the loaded artifacts.
pub fn execute_check(
    loaded: &Loaded,
    entry: &ExpectDoc,
) -> Result<(bool, Option<String>, String), ReportError> {
    let check = entry.check.as_str();
    match check {
        "total-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            Ok(verdict_row(check_total_secrecy(&sys, i, j).map_err(fail)?))
        }
        "synchronous-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            Ok(verdict_row(
                check_synchronous_secrecy(&sys, i, j).map_err(fail)?,
            ))
        }
        "run-based-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            Ok(verdict_row(
                check_run_based_secrecy(&sys, i, j).map_err(fail)?,
            ))
        }
        "c-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let c = allowability_of(loaded, entry)?;
            Ok(verdict_row(check_c_secrecy(&sys, i, j, &c).map_err(fail)?))
        }
        "f-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let c = allowability_of(loaded, entry)?;
            let fname = entry.f.as_ref().ok_or_else(|| ReportError::MissingParam {
                check: check.to_string(),
                param: "f".to_string(),
            })?;
            let f = loaded
                .info_functions
                .get(fname)
                .ok_or_else(|| fail(format!("unknown information function {fname:?}")))?;
            Ok(verdict_row(
                check_f_secrecy(&sys, i, j, f, &c).map_err(fail)?,
            ))
        }
        "nondeducibility" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let points: Vec<_> = sys.points().collect();
            let g: Vec<String> = points
                .iter()
                .map(|&p| sys.local_state(i, p).to_string())
                .collect();
            let h: Vec<String> = points
                .iter()
                .map(|&p| sys.local_state(j, p).to_string())
                .collect();
            Ok(verdict_row(check_nondeducibility(&g, &h)))
        }
        "oracle-c-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let c = allowability_of(loaded, entry)?;
            let holds =
                oracle_c_secrecy(&sys, i, j, &c, DEFAULT_INFO_SET_BOUND).map_err(fail)?;
            Ok((holds, None, "enumeration oracle".to_string()))
        }
        "oracle-run-based-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let holds =
                oracle_run_based_secrecy(&sys, i, j, DEFAULT_INFO_SET_BOUND).map_err(fail)?;
            Ok((holds, None, "enumeration oracle".to_string()))
        }
        "prob-total-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let mu = measure_of(loaded, check)?;
            Ok(verdict_row(
                check_prob_total_secrecy(&sys, &PointAssignment::Conditioned(&mu), i, j)
                    .map_err(fail)?,
            ))
        }
        "prob-sync-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let mu = measure_of(loaded, check)?;
            Ok(verdict_row(
                check_prob_sync_secrecy(&sys, &mu, i, j).map_err(fail)?,
            ))
        }
        "run-based-prob-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let mu = measure_of(loaded, check)?;
            Ok(verdict_row(
                check_run_based_prob_secrecy(&sys, &mu, i, j).map_err(fail)?,
            ))
        }
        "independence" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let mu = measure_of(loaded, check)?;
            let holds = check_independence(&sys, &mu, i, j).map_err(fail)?;
            Ok((holds, None, "pairwise run-set independence".to_string()))
        }
        "oracle-prob-sync" | "oracle-prob-run-based" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let mu = measure_of(loaded, check)?;
            let variant = if check == "oracle-prob-sync" {
                SyntacticVariant::Sync
            } else {
                SyntacticVariant::RunBased
            };
            let holds =
                oracle_prob_syntactic(&sys, &mu, i, j, variant, DEFAULT_INFO_SET_BOUND)
                    .map_err(fail)?;
            Ok((holds, None, "constant-probability oracle".to_string()))
        }
        "no-evidence" => {
            let adv = adversarial_of(loaded, check)?;
            let i = adv
                .base()
                .agent(entry.i.as_ref().ok_or_else(|| ReportError::MissingParam {
                    check: check.to_string(),
                    param: "i".to_string(),
                })?)
                .map_err(fail)?;
            Ok(verdict_row(check_no_evidence(&adv, i).map_err(fail)?))
        }
        "generalized-secrecy" => {
            let adv = adversarial_of(loaded, check)?;
            let i = adv
                .base()
                .agent(entry.i.as_ref().ok_or_else(|| ReportError::MissingParam {
                    check: check.to_string(),
                    param: "i".to_string(),
                })?)
                .map_err(fail)?;
            let family = if adv.init().is_some() {
                MeasureFamily::InitProducts
            } else {
                MeasureFamily::CellMixtures
            };
            let target = if adv.init().is_some() {
                DerivedTarget::OthersInitChoice
            } else {
                return Err(ReportError::MissingInput(check.to_string(), "initial choices"));
            };
            Ok(verdict_row(
                check_generalized_secrecy(&adv, i, &target, &family, REGISTRY_SAMPLES, REGISTRY_SEED)
                    .map_err(fail)?,
            ))
        }
        "evidential-equivalence" => {
            let adv = adversarial_of(loaded, check)?;
            let i = adv
                .base()
                .agent(entry.i.as_ref().ok_or_else(|| ReportError::MissingParam {
                    check: check.to_string(),
                    param: "i".to_string(),
                })?)
                .map_err(fail)?;
            match check_evidential_equivalence(&adv, i, REGISTRY_SAMPLES, REGISTRY_SEED)
                .map_err(fail)?
            {
                EvidentialOutcome::HypothesisNotMet { note } => {
                    Ok((false, None, format!("hypothesis not met: {note}")))
                }
                EvidentialOutcome::Checked { agree, no_evidence, generalized } => Ok((
                    agree,
                    None,
                    format!(
                        "no-evidence={} generalized={}",
                        no_evidence.holds, generalized.holds
                    ),
                )),
            }
        }
        "plaus-secrecy" => {
            let (sys, i, j) = pair_of(loaded, entry)?;
            let variant = match entry.variant.as_deref() {
                Some("total") => PlausVariant::Total,
                Some("sync") => PlausVariant::Sync,
                Some("run-based") | None => PlausVariant::RunBased,
                Some(other) => return Err(fail(format!("unknown variant {other:?}"))),
            };
            let verdict = match entry.domain.as_deref() {
                Some("trivial") | None => {
                    check_plaus_secrecy(&trivial_space(&sys), i, j, variant).map_err(fail)?
                }
                Some("probability") => {
                    let mu = measure_of(loaded, check)?;
                    check_plaus_secrecy(&probability_space(&sys, &mu), i, j, variant)
                        .map_err(fail)?
                }
                Some(other) => return Err(fail(format!("unknown domain {other:?}"))),
            };
            Ok(verdict_row(verdict))
        }
        "separability" | "gni" => {
            let sigma = loaded
                .sync_traces
                .as_ref()
                .ok_or(ReportError::MissingInput(check.to_string(), "sync traces"))?;
            let v = if check == "separability" {
                sigma.check_separability()
            } else {
                sigma.check_gni()
            };
            Ok(verdict_row(v))
        }
        "nos-all-deterministic" => {
            let sigma = loaded
                .sync_traces
                .as_ref()
                .ok_or(ReportError::MissingInput(check.to_string(), "sync traces"))?;
            let strategies =
                all_deterministic_strategies(sigma, DEFAULT_ENUMERATION_BOUND).map_err(fail)?;
            Ok(verdict_row(check_nos(sigma, &strategies).map_err(fail)?))
        }
        "async-separability" | "async-gni" | "interleaving-closed" => {
            let sigma = loaded
                .async_traces
                .as_ref()
                .ok_or(ReportError::MissingInput(check.to_string(), "async traces"))?;
            match check {
                "async-separability" => Ok(verdict_row(sigma.check_separability())),
                "async-gni" => Ok(verdict_row(sigma.check_gni())),
                _ => Ok((
                    sigma.is_closed_under_interleavings(),
                    None,
                    "membership depends only on the projections".to_string(),
                )),
            }
        }
        "pni" | "pni-agreement" => {
            let pps = loaded
                .protocols
                .as_ref()
                .ok_or(ReportError::MissingInput(check.to_string(), "protocol tables"))?;
            let report = check_pni(pps, REGISTRY_SAMPLES, REGISTRY_SEED).map_err(fail)?;
            if check == "pni" {
                Ok(verdict_row(report.pni))
            } else {
                Ok((
                    report.all_agree,
                    None,
                    format!(
                        "pni={} no-evidence={} generalized-run-based={} generalized-sync={}",
                        report.pni.holds,
                        report.no_evidence.holds,
                        report.generalized_run_based.holds,
                        report.generalized_sync.holds
                    ),
                ))
            }
        }
        other => Err(ReportError::UnknownCheck(other.to_string())),
    }
}

fn params_of(entry: &ExpectDoc) -> String {
    let mut parts = Vec::new();
    for (k, v) in [
        ("i", &entry.i),
        ("j", &entry.j),
        ("f", &entry.f),
        ("c", &entry.c),
        ("domain", &entry.domain),
        ("variant", &entry.variant),
    ] {
        if let Some(v) = v {
            parts.push(format!("{k}={v}"));
        }
    }
    parts.join(" ")
}

/// Run the expect-block checks of a loaded document, optionally narrowed
/// to a selection of check names.
pub fn run_checks(loaded: &Loaded, only: Option<&[String]>) -> Result<Report, ReportError> {
    let mut rows = Vec::new();
    for entry in &loaded.doc.expect {
        if let Some(filter) = only {
            if !filter.iter().any(|n| n == &entry.check) {
                continue;
            }
        }
        let start = Instant::now();
        let (holds, counterexample, note) = execute_check(loaded, entry)?;
        rows.push(CheckRow {
            check: entry.check.clone(),
            params: params_of(entry),
            holds,
            expected: entry.holds,
            matched: holds == entry.holds,
            counterexample,
            note,
            elapsed_ms: start.elapsed().as_millis(),
        });
    }
    if let Some(filter) = only {
        for name in filter {
            if !rows.iter().any(|r| &r.check == name) {
                return Err(ReportError::UnknownCheck(format!(
                    "{name} (not in the document's expect block)"
                )));
            }
        }
    }
    let all_match = rows.iter().all(|r| r.matched);
    Ok(Report { rows, all_match })
}

// ---------------------------------------------------------------------------
// fixtures as documents

fn expect(check: &str, i: Option<&str>, j: Option<&str>, holds: bool) -> ExpectDoc {
    ExpectDoc {
        check: check.to_string(),
        i: i.map(str::to_string),
        j: j.map(str::to_string),
        f: None,
        c: None,
        domain: None,
        variant: None,
        holds,
    }
}

/// Emit a named fixture with its expected verdicts.
pub fn fixture(name: &str, params: &[String]) -> Result<SpecDocument, ReportError> {
    let int = |ix: usize, what: &str| -> Result<usize, ReportError> {
        params
            .get(ix)
            .ok_or_else(|| fail(format!("fixture needs {what}")))?
            .parse::<usize>()
            .map_err(|e| fail(format!("bad {what}: {e}")))
    };
    match name {
        "EX1" => {
            let sys = fixtures::ex1();
            let mu = fixtures::ex1_measure(&sys);
            let mut doc = crate::specfile::emit_system(&sys, Some(&mu));
            doc.name = Some("EX1".to_string());
            doc.allowabilities
                .insert("sync".to_string(), crate::specfile::AllowDoc::Synchronous);
            doc.expect = vec![
                expect("synchronous-secrecy", Some("1"), Some("2"), true),
                ExpectDoc {
                    c: Some("sync".to_string()),
                    ..expect("c-secrecy", Some("1"), Some("2"), true)
                },
                ExpectDoc {
                    c: Some("sync".to_string()),
                    ..expect("oracle-c-secrecy", Some("1"), Some("2"), true)
                },
                expect("run-based-secrecy", Some("1"), Some("2"), false),
                expect("oracle-run-based-secrecy", Some("1"), Some("2"), false),
                expect("total-secrecy", Some("1"), Some("2"), false),
                expect("prob-sync-secrecy", Some("1"), Some("2"), true),
                expect("run-based-prob-secrecy", Some("1"), Some("2"), false),
            ];
            Ok(doc)
        }
        "EX2" => {
            let sys = fixtures::ex2();
            let mu = fixtures::ex2_measure(&sys);
            let mut doc = crate::specfile::emit_system(&sys, Some(&mu));
            doc.name = Some("EX2".to_string());
            doc.expect = vec![
                expect("run-based-secrecy", Some("1"), Some("2"), true),
                expect("oracle-run-based-secrecy", Some("1"), Some("2"), true),
                expect("total-secrecy", Some("1"), Some("2"), false),
                expect("run-based-prob-secrecy", Some("1"), Some("2"), true),
                expect("run-based-prob-secrecy", Some("2"), Some("1"), false),
                expect("prob-total-secrecy", Some("1"), Some("2"), false),
                expect("independence", Some("1"), Some("2"), false),
                expect("nondeducibility", Some("1"), Some("2"), false),
                ExpectDoc {
                    domain: Some("trivial".to_string()),
                    variant: Some("run-based".to_string()),
                    ..expect("plaus-secrecy", Some("1"), Some("2"), true)
                },
            ];
            Ok(doc)
        }
        "EX3" => {
            let sys = fixtures::ex3();
            let mu = fixtures::ex3_measure(&sys);
            let mut doc = crate::specfile::emit_system(&sys, Some(&mu));
            doc.name = Some("EX3".to_string());
            doc.interpretations.insert(
                "p".to_string(),
                crate::specfile::PropDoc {
                    agent: Some("2".to_string()),
                    locals: vec!["A".to_string(), "D1".to_string()],
                    env: vec![],
                },
            );
            doc.expect = vec![
                expect("run-based-prob-secrecy", Some("1"), Some("2"), true),
                expect("oracle-prob-run-based", Some("1"), Some("2"), false),
                expect("prob-sync-secrecy", Some("1"), Some("2"), true),
                expect("oracle-prob-sync", Some("1"), Some("2"), true),
                expect("independence", Some("1"), Some("2"), true),
            ];
            Ok(doc)
        }
        "COSMIC" => {
            let n = int(0, "the word count n")?;
            let eps = crate::rat::parse_ratio(
                params
                    .get(1)
                    .ok_or_else(|| fail("fixture needs epsilon as p/q"))?,
            )
            .map_err(fail)?;
            let (sys, mu) = fixtures::cosmic(n, &eps);
            let mut doc = crate::specfile::emit_system(&sys, Some(&mu));
            doc.name = Some(format!("COSMIC({n}, {})", format_ratio(&eps)));
            doc.cells = Some(
                fixtures::cosmic_cells(n, &eps)
                    .into_iter()
                    .map(|(id, ws)| {
                        (id, ws.into_iter().map(|(r, w)| (r, format_ratio(&w))).collect())
                    })
                    .collect(),
            );
            let mut assignment = BTreeMap::new();
            for r in sys.runs() {
                let word = if let Some(rest) = r.id.strip_prefix("nr-") {
                    rest.to_string()
                } else {
                    r.id
                        .strip_prefix("ray-")
                        .unwrap_or("0")
                        .split('-')
                        .next()
                        .unwrap_or("0")
                        .to_string()
                };
                assignment.insert(
                    r.id.clone(),
                    [
                        ("alice".to_string(), "-".to_string()),
                        ("bob".to_string(), format!("w{word}")),
                    ]
                    .into_iter()
                    .collect(),
                );
            }
            doc.init = Some(crate::specfile::InitDoc {
                choices: [
                    ("alice".to_string(), vec!["-".to_string()]),
                    (
                        "bob".to_string(),
                        (0..n).map(|x| format!("w{x}")).collect(),
                    ),
                ]
                .into_iter()
                .collect(),
                assignment,
            });
            doc.expect = vec![
                expect("synchronous-secrecy", Some("alice"), Some("bob"), true),
                expect("prob-sync-secrecy", Some("alice"), Some("bob"), false),
                expect("no-evidence", Some("alice"), None, false),
                expect("evidential-equivalence", Some("alice"), None, true),
            ];
            Ok(doc)
        }
        "XOR" => {
            let k = int(0, "the step count k")?;
            let sigma = fixtures::xor_system(k);
            let mut doc = SpecDocument {
                name: Some(format!("XOR({k})")),
                sync_traces: Some(emit_sync_traces(&sigma)),
                ..SpecDocument::default()
            };
            doc.expect = vec![
                expect("gni", None, None, true),
                expect("separability", None, None, false),
                expect("nos-all-deterministic", None, None, false),
            ];
            Ok(doc)
        }
        "GS-XOR" => {
            let k = int(0, "the step count k")?;
            let pps = fixtures::gs_xor(k);
            let mut doc = SpecDocument {
                name: Some(format!("GS-XOR({k})")),
                protocols: Some(emit_protocols(&pps)),
                ..SpecDocument::default()
            };
            doc.expect = vec![
                expect("pni", None, None, false),
                expect("pni-agreement", None, None, true),
                expect("no-evidence", Some("L"), None, false),
                expect("generalized-secrecy", Some("L"), None, false),
            ];
            Ok(doc)
        }
        "L_O_ONCE" => {
            let m = int(0, "the horizon m")?;
            let sigma = fixtures::l_o_once(m);
            let mut doc = SpecDocument {
                name: Some(format!("L_O_ONCE({m})")),
                async_traces: Some(emit_async_traces(&sigma)),
                ..SpecDocument::default()
            };
            doc.expect = vec![
                expect("total-secrecy", Some("L"), Some("H"), true),
                expect("async-separability", None, None, false),
                expect("async-gni", None, None, false),
                expect("interleaving-closed", None, None, false),
            ];
            Ok(doc)
        }
        "SHUFFLE-PRODUCT" => {
            let nl = int(0, "the low event budget")?;
            let nh = int(1, "the high event budget")?;
            let sigma = fixtures::shuffle_product(nl, nh);
            let mut doc = SpecDocument {
                name: Some(format!("SHUFFLE-PRODUCT({nl}, {nh})")),
                async_traces: Some(emit_async_traces(&sigma)),
                ..SpecDocument::default()
            };
            doc.expect = vec![
                expect("async-separability", None, None, true),
                expect("interleaving-closed", None, None, true),
                expect("total-secrecy", Some("L"), Some("H"), true),
            ];
            Ok(doc)
        }
        other => Err(fail(format!("unknown fixture {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// property suites

/// Deliberate checker/generated defects for the negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Generate suite instances without the perfect-recall hypothesis.
    SkipRecallFilter,
    /// Compare probabilities with a 1e-6 tolerance instead of exactly.
    FloatTolerance,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteFailure {
    pub index: usize,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproducer: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub count: usize,
    pub failures: Vec<SuiteFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite {} seed={} count={}: {}\n",
            self.suite,
            self.seed,
            self.count,
            if self.passed() {
                "0 failures".to_string()
            } else {
                format!("{} FAILURES", self.failures.len())
            }
        );
        for f in &self.failures {
            out.push_str(&format!("  #{}: {}\n", f.index, f.message));
            if let Some(spec) = &f.reproducer {
                out.push_str(&format!("  reproducer:\n{spec}\n"));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite reports serialize")
    }
}

/// Shrink a failing (system, measure) instance by dropping runs while the
/// failure persists.
fn shrink<F>(sys: &System, mu: Option<&RunMeasure>, fails: F) -> (System, Option<RunMeasure>)
where
    F: Fn(&System, Option<&RunMeasure>) -> bool,
{
    let mut best = (sys.clone(), mu.cloned());
    loop {
        let mut improved = false;
        if best.0.run_count() <= 2 {
            break;
        }
        for drop_ix in 0..best.0.run_count() {
            let runs: Vec<_> = best
                .0
                .runs()
                .iter()
                .enumerate()
                .filter(|(ix, _)| *ix != drop_ix)
                .map(|(_, r)| r.clone())
                .collect();
            let Ok(candidate) = System::new(
                best.0.agents().to_vec(),
                runs,
                best.0.horizon(),
                best.0.mode(),
            ) else {
                continue;
            };
            let cand_mu = match &best.1 {
                None => None,
                Some(mu) => {
                    let kept: Vec<BigRational> = (0..best.0.run_count())
                        .filter(|ix| *ix != drop_ix)
                        .map(|ix| mu.weight(ix).clone())
                        .collect();
                    let total = crate::rat::rat_sum(kept.iter());
                    let Ok(renorm) = RunMeasure::new(
                        &candidate,
                        kept.into_iter().map(|w| w / &total).collect(),
                    ) else {
                        continue;
                    };
                    Some(renorm)
                }
            };
            if fails(&candidate, cand_mu.as_ref()) {
                best = (candidate, cand_mu);
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
    best
}

fn reproducer(sys: &System, mu: Option<&RunMeasure>) -> Option<String> {
    Some(crate::specfile::to_json(&crate::specfile::emit_system(sys, mu)))
}

/// An instance-level suite failure: message plus optional reproducing
/// document.
struct Fail {
    message: String,
    reproducer: Option<String>,
}

impl Fail {
    fn with(message: impl Into<String>, reproducer: Option<String>) -> Self {
        Fail { message: message.into(), reproducer }
    }
}

impl From<String> for Fail {
    fn from(message: String) -> Self {
        Fail { message, reproducer: None }
    }
}

impl From<&str> for Fail {
    fn from(message: &str) -> Self {
        Fail { message: message.to_string(), reproducer: None }
    }
}

fn sync_trace_doc(sigma: &crate::traces::SyncTraceSystem) -> Option<String> {
    Some(crate::specfile::to_json(&SpecDocument {
        sync_traces: Some(emit_sync_traces(sigma)),
        ..SpecDocument::default()
    }))
}

fn async_trace_doc(sigma: &crate::traces::AsyncTraceSystem) -> Option<String> {
    Some(crate::specfile::to_json(&SpecDocument {
        async_traces: Some(emit_async_traces(sigma)),
        ..SpecDocument::default()
    }))
}

fn protocol_doc(pps: &crate::traces::ProbProtocolSystem) -> Option<String> {
    Some(crate::specfile::to_json(&SpecDocument {
        protocols: Some(emit_protocols(pps)),
        ..SpecDocument::default()
    }))
}

type SuiteOutcome = Result<(), Fail>;

fn agents2(_sys: &System) -> (AgentId, AgentId) {
    (AgentId(0), AgentId(1))
}

/// Run a named randomized suite. Deterministic for a fixed seed; failures
/// carry shrunk reproducing documents where the instance is a run system.
pub fn run_suite(
    name: &str,
    seed: u64,
    count: usize,
    mutation: Option<Mutation>,
) -> Result<SuiteReport, ReportError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let record_sys =
        |failures: &mut Vec<SuiteFailure>, index: usize, message: String, sys: &System, mu: Option<&RunMeasure>, fails: &dyn Fn(&System, Option<&RunMeasure>) -> bool| {
            let (small_sys, small_mu) = shrink(sys, mu, fails);
            failures.push(SuiteFailure {
                index,
                message,
                reproducer: reproducer(&small_sys, small_mu.as_ref()),
            });
        };

    for index in 0..count {
        let outcome: SuiteOutcome = match name {
            "sync-vs-runbased" => {
                // synchronous + dual recall: per-time secrecy and run-based
                // secrecy must agree
                let sys = if mutation == Some(Mutation::SkipRecallFilter) {
                    if index == 0 {
                        fixtures::ex1()
                    } else {
                        gen::synchronous_system(&mut rng)
                    }
                } else {
                    gen::recall_system(&mut rng, true)
                };
                let fails = |s: &System, _: Option<&RunMeasure>| -> bool {
                    let (a1, a2) = agents2(s);
                    [(a1, a2), (a2, a1)].iter().any(|&(i, j)| {
                        let sync = check_synchronous_secrecy(s, i, j).map(|v| v.holds);
                        let run = check_run_based_secrecy(s, i, j).map(|v| v.holds);
                        matches!((sync, run), (Ok(a), Ok(b)) if a != b)
                    })
                };
                if fails(&sys, None) {
                    record_sys(
                        &mut failures,
                        index,
                        "per-time and run-based secrecy disagree".to_string(),
                        &sys,
                        None,
                        &fails,
                    );
                }
                Ok(())
            }
            "timing" => {
                let sys = gen::recall_system(&mut rng, true);
                let (a1, a2) = agents2(&sys);
                let c = gen::random_allowability(&mut rng, &sys, a1);
                if !c.depends_only_on_timing(&sys).map_err(|e| e.to_string())? {
                    Ok(())
                } else {
                    let csec = check_c_secrecy(&sys, a1, a2, &c).map_err(|e| e.to_string())?;
                    let run = check_run_based_secrecy(&sys, a1, a2).map_err(|e| e.to_string())?;
                    if csec.holds && !run.holds {
                        Err(Fail::with(
                            "timing-dependent secrecy did not imply run-based secrecy",
                            reproducer(&sys, None),
                        ))
                    } else {
                        Ok(())
                    }
                }
            }
            "c-secrecy-oracle" => {
                let sys = if index % 2 == 0 {
                    gen::synchronous_system(&mut rng)
                } else {
                    gen::arbitrary_system(&mut rng)
                };
                let (a1, a2) = agents2(&sys);
                let c = gen::random_allowability(&mut rng, &sys, a1);
                let semantic = check_c_secrecy(&sys, a1, a2, &c)
                    .map_err(|e| e.to_string())?
                    .holds;
                let oracle = oracle_c_secrecy(&sys, a1, a2, &c, DEFAULT_INFO_SET_BOUND)
                    .map_err(|e| e.to_string())?;
                if semantic != oracle {
                    Err(Fail::with(
                        format!("semantic {semantic} vs oracle {oracle}"),
                        reproducer(&sys, None),
                    ))
                } else {
                    Ok(())
                }
            }
            "runbased-oracle" => {
                let sys = if index % 2 == 0 {
                    gen::synchronous_system(&mut rng)
                } else {
                    gen::arbitrary_system(&mut rng)
                };
                let (a1, a2) = agents2(&sys);
                let semantic = check_run_based_secrecy(&sys, a1, a2)
                    .map_err(|e| e.to_string())?
                    .holds;
                let oracle = oracle_run_based_secrecy(&sys, a1, a2, DEFAULT_INFO_SET_BOUND)
                    .map_err(|e| e.to_string())?;
                if semantic != oracle {
                    Err(Fail::with(
                        format!("semantic {semantic} vs oracle {oracle}"),
                        reproducer(&sys, None),
                    ))
                } else {
                    Ok(())
                }
            }
            "prob-symmetry" => {
                // synchrony or dual recall: both secrecy directions and
                // independence coincide
                let sys = if index % 2 == 0 {
                    gen::synchronous_system(&mut rng)
                } else {
                    gen::recall_system(&mut rng, false)
                };
                let mu = gen::random_measure(&mut rng, &sys);
                let fails = |s: &System, m: Option<&RunMeasure>| -> bool {
                    let m = m.expect("measure present");
                    let (a1, a2) = agents2(s);
                    let ij = check_run_based_prob_secrecy(s, m, a1, a2).map(|v| v.holds);
                    let ji = check_run_based_prob_secrecy(s, m, a2, a1).map(|v| v.holds);
                    let ind = check_independence(s, m, a1, a2);
                    match (ij, ji, ind) {
                        (Ok(a), Ok(b), Ok(c)) => a != b || a != c,
                        _ => false,
                    }
                };
                if fails(&sys, Some(&mu)) {
                    record_sys(
                        &mut failures,
                        index,
                        "three-way symmetry/independence equivalence broken".to_string(),
                        &sys,
                        Some(&mu),
                        &fails,
                    );
                }
                Ok(())
            }
            "sync-prob" => {
                let (sys, mu) = if mutation == Some(Mutation::SkipRecallFilter) {
                    if index == 0 {
                        let s = fixtures::ex1();
                        let m = fixtures::ex1_measure(&s);
                        (s, m)
                    } else {
                        let s = gen::synchronous_system(&mut rng);
                        let m = gen::random_measure(&mut rng, &s);
                        (s, m)
                    }
                } else {
                    let s = gen::recall_system(&mut rng, true);
                    let m = gen::random_measure(&mut rng, &s);
                    (s, m)
                };
                let fails = |s: &System, m: Option<&RunMeasure>| -> bool {
                    let m = m.expect("measure present");
                    let (a1, a2) = agents2(s);
                    [(a1, a2), (a2, a1)].iter().any(|&(i, j)| {
                        let sync = check_prob_sync_secrecy(s, m, i, j).map(|v| v.holds);
                        let run = check_run_based_prob_secrecy(s, m, i, j).map(|v| v.holds);
                        matches!((sync, run), (Ok(a), Ok(b)) if a != b)
                    })
                };
                if fails(&sys, Some(&mu)) {
                    record_sys(
                        &mut failures,
                        index,
                        "per-time and run-based probabilistic secrecy disagree".to_string(),
                        &sys,
                        Some(&mu),
                        &fails,
                    );
                }
                Ok(())
            }
            "prob-syntactic" => (|| -> SuiteOutcome {
                let sys = gen::recall_system_bounded(&mut rng, true, DEFAULT_INFO_SET_BOUND);
                let mu = gen::random_measure(&mut rng, &sys);
                let (a1, a2) = agents2(&sys);
                let sync_sem = check_prob_sync_secrecy(&sys, &mu, a1, a2)
                    .map_err(|e| e.to_string())?
                    .holds;
                let sync_syn =
                    oracle_prob_syntactic(&sys, &mu, a1, a2, SyntacticVariant::Sync, DEFAULT_INFO_SET_BOUND)
                        .map_err(|e| e.to_string())?;
                if sync_sem != sync_syn {
                    Err(Fail::with(
                        format!("per-time semantic {sync_sem} vs syntactic {sync_syn}"),
                        reproducer(&sys, Some(&mu)),
                    ))?;
                }
                let run_sem = check_run_based_prob_secrecy(&sys, &mu, a1, a2)
                    .map_err(|e| e.to_string())?
                    .holds;
                let run_syn = oracle_prob_syntactic(
                    &sys,
                    &mu,
                    a1,
                    a2,
                    SyntacticVariant::RunBased,
                    DEFAULT_INFO_SET_BOUND,
                )
                .map_err(|e| e.to_string())?;
                if run_sem != run_syn {
                    Err(Fail::with(
                        format!("run-based semantic {run_sem} vs syntactic {run_syn}"),
                        reproducer(&sys, Some(&mu)),
                    ))
                } else {
                    Ok(())
                }
            })(),
            "evidential" => (|| -> SuiteOutcome {
                let adv = gen::random_init_adversarial(&mut rng);
                for a in 0..adv.base().agent_count() {
                    if let EvidentialOutcome::Checked { agree: false, no_evidence, generalized } =
                        check_evidential_equivalence(&adv, AgentId(a), 3, seed ^ index as u64)
                            .map_err(|e| e.to_string())?
                    {
                        Err(Fail::with(
                            format!(
                                "no-evidence={} but generalized={} for agent {a}",
                                no_evidence.holds, generalized.holds
                            ),
                            reproducer(adv.base(), None),
                        ))?;
                    }
                }
                Ok(())
            })(),
            "plaus-reduction" => (|| -> SuiteOutcome {
                let sys = if index % 2 == 0 {
                    gen::synchronous_system(&mut rng)
                } else {
                    gen::arbitrary_system(&mut rng)
                };
                let mu1 = gen::random_measure(&mut rng, &sys);
                let mu2 = gen::random_measure(&mut rng, &sys);
                let (a1, a2) = agents2(&sys);
                let poss = check_run_based_secrecy(&sys, a1, a2)
                    .map_err(|e| e.to_string())?
                    .holds;
                let triv = check_plaus_secrecy(&trivial_space(&sys), a1, a2, PlausVariant::RunBased)
                    .map_err(|e| e.to_string())?
                    .holds;
                if poss != triv {
                    Err(Fail::with("two-valued reduction broken", reproducer(&sys, None)))?;
                }
                let prob = check_run_based_prob_secrecy(&sys, &mu1, a1, a2)
                    .map_err(|e| e.to_string())?
                    .holds;
                let pdom =
                    check_plaus_secrecy(&probability_space(&sys, &mu1), a1, a2, PlausVariant::RunBased)
                        .map_err(|e| e.to_string())?
                        .holds;
                if prob != pdom {
                    Err(Fail::with(
                        "probability reduction broken",
                        reproducer(&sys, Some(&mu1)),
                    ))?;
                }
                let per = check_run_based_prob_secrecy(&sys, &mu2, a1, a2)
                    .map_err(|e| e.to_string())?
                    .holds
                    && prob;
                let vec = check_plaus_secrecy(
                    &measure_vector_space(&sys, &[mu1.clone(), mu2]),
                    a1,
                    a2,
                    PlausVariant::RunBased,
                )
                .map_err(|e| e.to_string())?
                .holds;
                if per != vec {
                    Err(Fail::with("vector reduction broken", reproducer(&sys, Some(&mu1))))?;
                }
                // the symmetry propositions transfer: on synchronous or
                // dual-recall systems, run-based plausibilistic secrecy
                // over a commutative domain is symmetric
                if sys.is_synchronous()
                    || ((0..sys.agent_count()).all(|a| sys.has_perfect_recall(AgentId(a))))
                {
                    for space in [trivial_space(&sys), probability_space(&sys, &mu1)] {
                        let ij = check_plaus_secrecy(&space, a1, a2, PlausVariant::RunBased)
                            .map_err(|e| e.to_string())?
                            .holds;
                        let ji = check_plaus_secrecy(&space, a2, a1, PlausVariant::RunBased)
                            .map_err(|e| e.to_string())?
                            .holds;
                        if ij != ji {
                            Err(Fail::with(
                                "plausibilistic run-based secrecy not symmetric",
                                reproducer(&sys, Some(&mu1)),
                            ))?;
                        }
                    }
                }
                Ok(())
            })(),
            "plaus-lemmas" => (|| -> SuiteOutcome {
                use rand::Rng;
                let sys = gen::arbitrary_system(&mut rng);
                let mu = gen::random_measure(&mut rng, &sys);
                // random partition of the runs plus a random union block X
                let n = sys.run_count();
                let n_blocks = rng.gen_range(1..=n);
                let mut blocks: Vec<std::collections::BTreeSet<usize>> =
                    vec![Default::default(); n_blocks];
                for r in 0..n {
                    blocks[rng.gen_range(0..n_blocks)].insert(r);
                }
                blocks.retain(|b| !b.is_empty());
                let x: std::collections::BTreeSet<usize> =
                    (0..n).filter(|_| rng.gen_bool(0.5)).collect();
                for space in [probability_space(&sys, &mu), trivial_space(&sys)] {
                    match check_plaus_symmetry_lemmas(&space, &blocks, &x)
                        .map_err(|e| e.to_string())?
                    {
                        LemmaOutcome::Verified(true) | LemmaOutcome::Skipped { .. } => {}
                        LemmaOutcome::Verified(false) => {
                            Err(Fail::with(
                                "conditioning lemma violated",
                                reproducer(&sys, Some(&mu)),
                            ))?
                        }
                    }
                }
                Ok(())
            })(),
            "omega-partition" => (|| -> SuiteOutcome {
                use rand::Rng;
                let sync = rng.gen_bool(0.5);
                let sys = gen::recall_system(&mut rng, sync);
                let (a1, _) = agents2(&sys);
                let all = sys.info_sets(a1).len();
                let omega: Vec<usize> = (0..all).filter(|_| rng.gen_bool(0.7)).collect();
                let part = partition_info_sets(&sys, a1, &omega).map_err(|e| e.to_string())?;
                // disjoint run sets covering the union
                let mut seen: std::collections::BTreeSet<usize> = Default::default();
                for &kx in &part {
                    for &r in &sys.info_sets(a1)[kx].runs {
                        if !seen.insert(r) {
                            Err(Fail::with(
                                "undominated run sets overlap",
                                reproducer(&sys, None),
                            ))?;
                        }
                    }
                }
                let union: std::collections::BTreeSet<usize> = omega
                    .iter()
                    .flat_map(|&kx| sys.info_sets(a1)[kx].runs.iter().copied())
                    .collect();
                if seen != union {
                    Err(Fail::with(
                        "undominated run sets do not cover the family",
                        reproducer(&sys, None),
                    ))
                } else {
                    Ok(())
                }
            })(),
            "exactness" => {
                // crafted near-misses: the checker's verdict must match an
                // independent big-integer cross-multiplication oracle
                let (sys, mu) = if index == 0 {
                    fixtures::near_miss()
                } else {
                    let s = gen::arbitrary_system(&mut rng);
                    let m = gen::random_measure(&mut rng, &s);
                    (s, m)
                };
                let (a1, a2) = agents2(&sys);
                // oracle: collect all conditional pairs and compare as
                // integer cross products
                let mut oracle_holds = true;
                for x in sys.info_sets(a2) {
                    let mut first: Option<BigRational> = None;
                    for k in sys.info_sets(a1) {
                        let v = mu.conditional_runs(&x.runs, &k.runs);
                        match &first {
                            None => first = Some(v),
                            Some(f) => {
                                let cross_equal =
                                    f.numer() * v.denom() == v.numer() * f.denom();
                                if !cross_equal {
                                    oracle_holds = false;
                                }
                            }
                        }
                    }
                }
                let checker_holds = match mutation {
                    Some(Mutation::FloatTolerance) => {
                        // the defective checker: tolerant comparison
                        let tol = 1e-6f64;
                        let to_f = |r: &BigRational| {
                            let n = r.numer().to_string().parse::<f64>().unwrap_or(0.0);
                            let d = r.denom().to_string().parse::<f64>().unwrap_or(1.0);
                            n / d
                        };
                        let mut holds = true;
                        for x in sys.info_sets(a2) {
                            let mut first: Option<f64> = None;
                            for k in sys.info_sets(a1) {
                                let v = to_f(&mu.conditional_runs(&x.runs, &k.runs));
                                match first {
                                    None => first = Some(v),
                                    Some(f) => {
                                        if (f - v).abs() > tol {
                                            holds = false;
                                        }
                                    }
                                }
                            }
                        }
                        holds
                    }
                    _ => {
                        check_run_based_prob_secrecy(&sys, &mu, a1, a2)
                            .map_err(|e| e.to_string())?
                            .holds
                    }
                };
                if checker_holds != oracle_holds {
                    Err(Fail::with(
                        format!(
                            "checker says {checker_holds} but exact cross-multiplication says {oracle_holds}"
                        ),
                        reproducer(&sys, Some(&mu)),
                    ))
                } else {
                    Ok(())
                }
            }
            "sync-sep" => (|| -> SuiteOutcome {
                let sigma = gen::random_sync_traces(&mut rng);
                let sys = sigma.to_runs();
                let l = sys.agent("L").map_err(|e| e.to_string())?;
                let h = sys.agent("H").map_err(|e| e.to_string())?;
                let sep = sigma.check_separability().holds;
                let sync = check_synchronous_secrecy(&sys, l, h)
                    .map_err(|e| e.to_string())?
                    .holds;
                // with the full observation window the two coincide
                if sep != sync {
                    Err(Fail::with(
                        format!("separability {sep} vs full-window secrecy {sync}"),
                        sync_trace_doc(&sigma),
                    ))?;
                }
                // high-input secrecy matches recombination of high inputs
                let gni = sigma.check_gni().holds;
                let f_hi = high_input_function(&sigma, &sys).map_err(|e| e.to_string())?;
                let f_sec = check_f_secrecy(&sys, l, h, &f_hi, &Allowability::Synchronous)
                    .map_err(|e| e.to_string())?
                    .holds;
                if gni != f_sec {
                    Err(Fail::with(
                        format!("high-input recombination {gni} vs secrecy {f_sec}"),
                        sync_trace_doc(&sigma),
                    ))
                } else {
                    Ok(())
                }
            })(),
            "zl-async" => (|| -> SuiteOutcome {
                let closed = gen::random_count_async(&mut rng);
                let sys = closed
                    .to_runs(DEFAULT_ENUMERATION_BOUND)
                    .map_err(|e| e.to_string())?;
                let l = sys.agent("L").map_err(|e| e.to_string())?;
                let h = sys.agent("H").map_err(|e| e.to_string())?;
                let sep = closed.check_separability().holds;
                let total = check_total_secrecy(&sys, l, h)
                    .map_err(|e| e.to_string())?
                    .holds;
                if sep != total {
                    Err(Fail::with(
                        format!("interleaving-closed: separability {sep} vs total secrecy {total}"),
                        async_trace_doc(&closed),
                    ))?;
                }
                // one-way implication for plain prefix-closed systems
                let open = gen::random_prefix_closed_async(&mut rng);
                if open.check_separability().holds {
                    let sys2 = open
                        .to_runs(DEFAULT_ENUMERATION_BOUND)
                        .map_err(|e| e.to_string())?;
                    let l2 = sys2.agent("L").map_err(|e| e.to_string())?;
                    let h2 = sys2.agent("H").map_err(|e| e.to_string())?;
                    if !check_total_secrecy(&sys2, l2, h2)
                        .map_err(|e| e.to_string())?
                        .holds
                    {
                        Err(Fail::with(
                            "separability did not imply total secrecy",
                            async_trace_doc(&open),
                        ))?;
                    }
                }
                Ok(())
            })(),
            "gray-syverson" => {
                let pps = gen::random_protocol_system(&mut rng);
                // cell measures summing to 1 is enforced by construction;
                // the four formulations must agree
                let report =
                    check_pni(&pps, 3, seed ^ (index as u64) << 1).map_err(|e| e.to_string())?;
                if !report.all_agree {
                    Err(Fail::with(
                        format!(
                            "four-way disagreement: pni={} no-evidence={} run-based={} sync={}",
                            report.pni.holds,
                            report.no_evidence.holds,
                            report.generalized_run_based.holds,
                            report.generalized_sync.holds
                        ),
                        protocol_doc(&pps),
                    ))
                } else {
                    Ok(())
                }
            }
            other => return Err(ReportError::UnknownSuite(other.to_string())),
        };
        if let Err(f) = outcome {
            failures.push(SuiteFailure {
                index,
                message: f.message,
                reproducer: f.reproducer,
            });
        }
    }

    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        count,
        failures,
    })
}

/// The information function reading the high inputs out of the high
/// agent's view token in a trace-derived run system.
pub fn high_input_function(
    sigma: &crate::traces::SyncTraceSystem,
    sys: &System,
) -> Result<InfoFunction, crate::kernel::KernelError> {
    let h = sys.agent("H")?;
    let mut map = BTreeMap::new();
    for t in sigma.traces() {
        for m in 0..=sigma.trace_len() {
            let view: Vec<String> = t[..m]
                .iter()
                .map(|s| format!("{}.{}", s[1], s[3]))
                .collect();
            let full = format!("H[{}]", view.join(";"));
            let inputs: Vec<String> = t[..m].iter().map(|s| s[1].to_string()).collect();
            map.insert(full, format!("hi[{}]", inputs.join(";")));
        }
    }
    InfoFunction::new(sys, h, map)
}

pub fn all_suites() -> &'static [&'static str] {
    &[
        "sync-vs-runbased",
        "timing",
        "c-secrecy-oracle",
        "runbased-oracle",
        "prob-symmetry",
        "sync-prob",
        "prob-syntactic",
        "evidential",
        "plaus-reduction",
        "plaus-lemmas",
        "omega-partition",
        "exactness",
        "sync-sep",
        "zl-async",
        "gray-syverson",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfile::load_document;

    #[test]
    fn fixture_documents_self_check() {
        for (name, params) in [
            ("EX1", vec![]),
            ("EX2", vec![]),
            ("EX3", vec![]),
            ("COSMIC", vec!["2".to_string(), "1/2".to_string()]),
            ("XOR", vec!["1".to_string()]),
            ("L_O_ONCE", vec!["3".to_string()]),
            ("SHUFFLE-PRODUCT", vec!["2".to_string(), "1".to_string()]),
        ] {
            let doc = fixture(name, &params).unwrap();
            let loaded = load_document(doc).unwrap();
            let report = run_checks(&loaded, None).unwrap();
            assert!(report.all_match, "{name}: {}", report.to_text());
        }
    }

    #[test]
    fn gs_fixture_self_checks() {
        let doc = fixture("GS-XOR", &["2".to_string()]).unwrap();
        let loaded = load_document(doc).unwrap();
        let report = run_checks(&loaded, None).unwrap();
        assert!(report.all_match, "{}", report.to_text());
    }

    #[test]
    fn wrong_expectation_detected() {
        let mut doc = fixture("EX1", &[]).unwrap();
        doc.expect[0].holds = false; // deliberately wrong
        let loaded = load_document(doc).unwrap();
        let report = run_checks(&loaded, None).unwrap();
        assert!(!report.all_match);
        assert!(report.to_text().contains("FAIL"));
    }

    #[test]
    fn selection_filters_checks() {
        let doc = fixture("EX1", &[]).unwrap();
        let loaded = load_document(doc).unwrap();
        let only = vec!["total-secrecy".to_string()];
        let report = run_checks(&loaded, Some(&only)).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(matches!(
            run_checks(&loaded, Some(&["nope".to_string()])),
            Err(ReportError::UnknownCheck(_))
        ));
    }

    #[test]
    fn small_suites_pass() {
        for suite in ["sync-vs-runbased", "prob-symmetry", "exactness"] {
            let report = run_suite(suite, 7, 25, None).unwrap();
            assert!(report.passed(), "{}", report.to_text());
        }
    }

    #[test]
    fn mutated_suites_fail() {
        let recall = run_suite("sync-vs-runbased", 7, 10, Some(Mutation::SkipRecallFilter))
            .unwrap();
        assert!(!recall.passed());
        // the injected EX1 instance fails and shrinks to its two runs
        assert!(recall.failures[0].reproducer.is_some());
        let tol = run_suite("exactness", 7, 5, Some(Mutation::FloatTolerance)).unwrap();
        assert!(!tol.passed());
    }
}
