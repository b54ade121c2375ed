//! The knowledge/time/probability logic and its enumeration oracles.
//!
//! Formulas are built from primitive propositions with negation,
//! conjunction, the knowledge operator `K_i`, its dual `P_i`, a
//! "somewhere on this run" operator, and exact rational probability
//! comparisons `Pr_i(phi) ~ q`. Truth of a primitive proposition depends
//! only on the global state.
//!
//! The oracles re-decide the possibilistic secrecy notions from their
//! syntactic characterizations: a formula whose truth depends only on agent
//! j's local state has, as its extension, a union of j-information sets,
//! and conversely every such union is the extension of some j-local
//! formula. Quantifying over all interpretations therefore reduces to
//! enumerating those unions, which is what [`for_each_j_local_extension`]
//! does (with a configurable bound on the number of information sets).

use std::collections::BTreeSet;

use num_rational::BigRational;
use thiserror::Error;

use crate::kernel::{AgentId, Allowability, KernelError, Point, System};
use crate::prob::RunMeasure;
use crate::rat::{is_probability, parse_ratio};

/// Default cap on the number of j-information sets the oracles enumerate
/// over (2^16 unions).
pub const DEFAULT_INFO_SET_BOUND: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    fn apply(self, lhs: &BigRational, rhs: &BigRational) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// Formula AST.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Prim(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `K_i phi`: true when phi holds throughout i's information set.
    Knows(AgentId, Box<Formula>),
    /// `P_i phi`, the dual of `Knows` — phi holds somewhere in the set.
    Poss(AgentId, Box<Formula>),
    /// True at (r, m) when the formula holds at (r, n) for some n.
    Once(Box<Formula>),
    /// `Pr_i(phi) ~ q`, evaluated with the conditioned point measure.
    PrCmp {
        agent: AgentId,
        phi: Box<Formula>,
        op: CmpOp,
        bound: BigRational,
    },
}

impl Formula {
    pub fn prim(name: &str) -> Formula {
        Formula::Prim(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Formula) -> Formula {
        Formula::Not(Box::new(phi))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn knows(i: AgentId, phi: Formula) -> Formula {
        Formula::Knows(i, Box::new(phi))
    }

    pub fn poss(i: AgentId, phi: Formula) -> Formula {
        Formula::Poss(i, Box::new(phi))
    }

    pub fn once(phi: Formula) -> Formula {
        Formula::Once(Box::new(phi))
    }

    pub fn pr_cmp(i: AgentId, phi: Formula, op: CmpOp, bound: BigRational) -> Formula {
        Formula::PrCmp {
            agent: i,
            phi: Box::new(phi),
            op,
            bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown proposition {0:?}")]
    UnknownProp(String),
    #[error("probability formula needs a run measure")]
    MeasureRequired,
    #[error("probability bound {0} is outside [0, 1]")]
    BadBound(String),
    #[error("extension of the probability operand is not measurable within K_{agent}: run {run} enters the information set both inside and outside the extension")]
    NonMeasurable { agent: String, run: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{count} information sets exceed the enumeration bound {bound}")]
    BoundExceeded { count: usize, bound: usize },
}

/// Assigns truth values to primitive propositions at global states. Truth at
/// a point is membership of the point's (interned) global state.
#[derive(Debug, Clone, Default)]
pub struct Interpretation {
    props: std::collections::BTreeMap<String, BTreeSet<usize>>,
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    /// Make `name` true exactly at the global states where `pred` holds.
    pub fn define(&mut self, sys: &System, name: &str, pred: impl Fn(&System, Point) -> bool) {
        let mut gids = BTreeSet::new();
        for p in sys.points() {
            if pred(sys, p) {
                gids.insert(sys.global_state_id(p));
            }
        }
        // a predicate that sees more than the global state would be caught
        // here: every point with a selected state id must satisfy it
        for p in sys.points() {
            if gids.contains(&sys.global_state_id(p)) {
                debug_assert!(pred(sys, p), "proposition must be state-determined");
            }
        }
        self.props.insert(name.to_string(), gids);
    }

    /// `name` true where `agent`'s local state is one of `locals`.
    pub fn define_agent_locals(&mut self, sys: &System, name: &str, agent: AgentId, locals: &[&str]) {
        let set: BTreeSet<&str> = locals.iter().copied().collect();
        self.define(sys, name, |s, p| set.contains(s.local_state(agent, p)));
    }

    pub fn props(&self) -> impl Iterator<Item = &str> {
        self.props.keys().map(String::as_str)
    }

    fn extension_of(&self, sys: &System, name: &str) -> Result<Vec<bool>, EvalError> {
        let gids = self
            .props
            .get(name)
            .ok_or_else(|| EvalError::UnknownProp(name.to_string()))?;
        Ok(sys
            .points()
            .map(|p| gids.contains(&sys.global_state_id(p)))
            .collect())
    }
}

fn point_index(sys: &System, p: Point) -> usize {
    p.run * (sys.horizon() + 1) + p.time
}

/// Bottom-up formula evaluation over a whole system: one pass per
/// subformula, so each (point, subformula) pair is computed once.
pub struct Evaluator<'a> {
    sys: &'a System,
    interp: &'a Interpretation,
    measure: Option<&'a RunMeasure>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        sys: &'a System,
        interp: &'a Interpretation,
        measure: Option<&'a RunMeasure>,
    ) -> Self {
        Evaluator { sys, interp, measure }
    }

    /// The set of points where `phi` holds, indexed by point order.
    pub fn extension(&self, phi: &Formula) -> Result<Vec<bool>, EvalError> {
        let sys = self.sys;
        match phi {
            Formula::Prim(name) => self.interp.extension_of(sys, name),
            Formula::Not(inner) => {
                let mut ext = self.extension(inner)?;
                ext.iter_mut().for_each(|b| *b = !*b);
                Ok(ext)
            }
            Formula::And(a, b) => {
                let ea = self.extension(a)?;
                let eb = self.extension(b)?;
                Ok(ea.into_iter().zip(eb).map(|(x, y)| x && y).collect())
            }
            Formula::Knows(i, inner) => {
                sys.check_agent(*i)?;
                let ext = self.extension(inner)?;
                let mut out = vec![false; ext.len()];
                for k in sys.info_sets(*i) {
                    let all = k.points.iter().all(|&q| ext[point_index(sys, q)]);
                    if all {
                        for &q in &k.points {
                            out[point_index(sys, q)] = true;
                        }
                    }
                }
                Ok(out)
            }
            Formula::Poss(i, inner) => {
                // P_i phi = not K_i not phi
                let dual = Formula::not(Formula::knows(*i, Formula::not((**inner).clone())));
                self.extension(&dual)
            }
            Formula::Once(inner) => {
                let ext = self.extension(inner)?;
                let mut out = vec![false; ext.len()];
                let h = sys.horizon();
                for r in 0..sys.run_count() {
                    let hit = (0..=h).any(|t| ext[point_index(sys, Point::new(r, t))]);
                    if hit {
                        for t in 0..=h {
                            out[point_index(sys, Point::new(r, t))] = true;
                        }
                    }
                }
                Ok(out)
            }
            Formula::PrCmp { agent, phi, op, bound } => {
                if !is_probability(bound) {
                    return Err(EvalError::BadBound(crate::rat::format_ratio(bound)));
                }
                let mu = self.measure.ok_or(EvalError::MeasureRequired)?;
                sys.check_agent(*agent)?;
                let ext = self.extension(phi)?;
                let mut out = vec![false; ext.len()];
                for k in sys.info_sets(*agent) {
                    // the operand's extension must be run-generated within
                    // the information set: per run, all in or all out
                    let mut included_runs: BTreeSet<usize> = BTreeSet::new();
                    for &run in &k.runs {
                        let fiber: Vec<bool> = k
                            .points
                            .iter()
                            .filter(|p| p.run == run)
                            .map(|&p| ext[point_index(sys, p)])
                            .collect();
                        if fiber.iter().all(|&b| b) {
                            included_runs.insert(run);
                        } else if fiber.iter().any(|&b| b) {
                            return Err(EvalError::NonMeasurable {
                                agent: sys.agent_name(*agent).to_string(),
                                run,
                            });
                        }
                    }
                    let value = mu.conditional_runs(&included_runs, &k.runs);
                    let truth = op.apply(&value, bound);
                    if truth {
                        for &q in &k.points {
                            out[point_index(sys, q)] = true;
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn eval(&self, p: Point, phi: &Formula) -> Result<bool, EvalError> {
        self.sys.check_point(p)?;
        Ok(self.extension(phi)?[point_index(self.sys, p)])
    }

    /// Valid in the interpreted system: true at every point.
    pub fn valid(&self, phi: &Formula) -> Result<bool, EvalError> {
        Ok(self.extension(phi)?.iter().all(|&b| b))
    }
}

/// A formula is j-local when its truth agrees on every pair of points with
/// the same j-local state; checked exhaustively.
pub fn is_j_local(
    sys: &System,
    interp: &Interpretation,
    measure: Option<&RunMeasure>,
    j: AgentId,
    phi: &Formula,
) -> Result<bool, EvalError> {
    sys.check_agent(j)?;
    let ext = Evaluator::new(sys, interp, measure).extension(phi)?;
    for k in sys.info_sets(j) {
        let first = ext[point_index(sys, k.points[0])];
        if k.points.iter().any(|&q| ext[point_index(sys, q)] != first) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One realizable j-local extension: a union of j-information sets.
pub struct JLocalExtension {
    /// Bit `s` set means the s-th j-information set is in the union.
    pub mask: u64,
    /// Membership by point index.
    pub points: Vec<bool>,
    /// Runs through the union.
    pub runs: BTreeSet<usize>,
}

fn check_bound(sys: &System, j: AgentId, bound: usize) -> Result<usize, EvalError> {
    sys.check_agent(j)?;
    let count = sys.info_sets(j).len();
    if count > bound || count > 63 {
        return Err(EvalError::BoundExceeded { count, bound: bound.min(63) });
    }
    Ok(count)
}

/// Enumerate every union of j-information sets (2^k of them), the possible
/// extensions of j-local formulas. Fails when the count exceeds `bound`.
pub fn for_each_j_local_extension(
    sys: &System,
    j: AgentId,
    bound: usize,
    mut f: impl FnMut(&JLocalExtension),
) -> Result<(), EvalError> {
    let count = check_bound(sys, j, bound)?;
    let sets = sys.info_sets(j);
    for mask in 0..(1u64 << count) {
        let mut points = vec![false; sys.point_count()];
        let mut runs = BTreeSet::new();
        for (s, k) in sets.iter().enumerate() {
            if mask & (1 << s) != 0 {
                for &p in &k.points {
                    points[point_index(sys, p)] = true;
                }
                runs.extend(k.runs.iter().copied());
            }
        }
        f(&JLocalExtension { mask, points, runs });
    }
    Ok(())
}

/// Syntactic characterization of C-secrecy, decided by enumeration: for
/// every point p and every j-local extension S, if S meets C(p) then some
/// point of K_i(p) lies in S. Agrees with the semantic check on every
/// system within the enumeration bound.
pub fn oracle_c_secrecy(
    sys: &System,
    i: AgentId,
    j: AgentId,
    c: &Allowability,
    bound: usize,
) -> Result<bool, EvalError> {
    check_bound(sys, j, bound)?;
    sys.check_agent(i)?;
    c.validate_for(sys, i)?;
    let sets = sys.info_sets(j);
    // per point: which j-information sets meet C(p) / K_i(p)
    let points: Vec<Point> = sys.points().collect();
    let mut c_mask = vec![0u64; points.len()];
    let mut k_mask = vec![0u64; points.len()];
    for (ix, &p) in points.iter().enumerate() {
        let allowed = c.points_for(sys, p)?;
        let ki = sys.info_set(i, p)?;
        for (s, x) in sets.iter().enumerate() {
            if x.points.iter().any(|q| allowed.contains(q)) {
                c_mask[ix] |= 1 << s;
            }
            if x.points.iter().any(|q| ki.contains(*q)) {
                k_mask[ix] |= 1 << s;
            }
        }
    }
    for mask in 0..(1u64 << sets.len()) {
        for ix in 0..points.len() {
            if mask & c_mask[ix] != 0 && mask & k_mask[ix] == 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Syntactic characterization of run-based secrecy: for every nonempty
/// j-local extension S and every point p, some point of K_i(p) lies on a
/// run through S (i.e. `P_i` of "S somewhere on this run" holds
/// everywhere).
pub fn oracle_run_based_secrecy(
    sys: &System,
    i: AgentId,
    j: AgentId,
    bound: usize,
) -> Result<bool, EvalError> {
    check_bound(sys, j, bound)?;
    sys.check_agent(i)?;
    let sets = sys.info_sets(j);
    let points: Vec<Point> = sys.points().collect();
    // which j-information sets share a run with K_i(p)
    let mut r_mask = vec![0u64; points.len()];
    for (ix, &p) in points.iter().enumerate() {
        let ki = sys.info_set(i, p)?;
        for (s, x) in sets.iter().enumerate() {
            if !ki.runs.is_disjoint(&x.runs) {
                r_mask[ix] |= 1 << s;
            }
        }
    }
    for mask in 1..(1u64 << sets.len()) {
        for rm in &r_mask {
            if mask & rm == 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Parse the prefix surface syntax:
/// `p`, `(not F)`, `(and F G)`, `(K agent F)`, `(P agent F)`, `(once F)`,
/// `(pr agent F op q)` with op one of `= <= < >= >` and q a rational.
pub fn parse_formula(sys: &System, input: &str) -> Result<Formula, FormulaParseError> {
    let tokens = tokenize(input)?;
    let mut pos = 0;
    let phi = parse_expr(sys, &tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(FormulaParseError::Trailing(tokens[pos].clone()));
    }
    Ok(phi)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaParseError {
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("unexpected end of formula")]
    Eof,
    #[error("unexpected token {0:?}")]
    Unexpected(String),
    #[error("trailing token {0:?}")]
    Trailing(String),
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("bad rational {0:?}")]
    BadRational(String),
}

fn tokenize(input: &str) -> Result<Vec<String>, FormulaParseError> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let mut depth: i64 = 0;
    for ch in input.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                depth += if ch == '(' { 1 } else { -1 };
                if depth < 0 {
                    return Err(FormulaParseError::Unbalanced);
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    if depth != 0 {
        return Err(FormulaParseError::Unbalanced);
    }
    Ok(tokens)
}

fn parse_agent(sys: &System, tok: &str) -> Result<AgentId, FormulaParseError> {
    sys.agent(tok)
        .map_err(|_| FormulaParseError::UnknownAgent(tok.to_string()))
}

fn parse_expr(
    sys: &System,
    tokens: &[String],
    pos: &mut usize,
) -> Result<Formula, FormulaParseError> {
    let tok = tokens.get(*pos).ok_or(FormulaParseError::Eof)?;
    if tok != "(" {
        *pos += 1;
        if tok == ")" {
            return Err(FormulaParseError::Unexpected(tok.clone()));
        }
        return Ok(Formula::prim(tok));
    }
    *pos += 1; // consume "("
    let head = tokens.get(*pos).ok_or(FormulaParseError::Eof)?.clone();
    *pos += 1;
    let phi = match head.as_str() {
        "not" => Formula::not(parse_expr(sys, tokens, pos)?),
        "and" => {
            let a = parse_expr(sys, tokens, pos)?;
            let b = parse_expr(sys, tokens, pos)?;
            Formula::and(a, b)
        }
        "K" | "k" => {
            let agent = parse_agent(sys, tokens.get(*pos).ok_or(FormulaParseError::Eof)?)?;
            *pos += 1;
            Formula::knows(agent, parse_expr(sys, tokens, pos)?)
        }
        "P" | "p" => {
            let agent = parse_agent(sys, tokens.get(*pos).ok_or(FormulaParseError::Eof)?)?;
            *pos += 1;
            Formula::poss(agent, parse_expr(sys, tokens, pos)?)
        }
        "once" => Formula::once(parse_expr(sys, tokens, pos)?),
        "pr" => {
            let agent = parse_agent(sys, tokens.get(*pos).ok_or(FormulaParseError::Eof)?)?;
            *pos += 1;
            let inner = parse_expr(sys, tokens, pos)?;
            let op_tok = tokens.get(*pos).ok_or(FormulaParseError::Eof)?;
            let op = match op_tok.as_str() {
                "=" => CmpOp::Eq,
                "<=" => CmpOp::Le,
                "<" => CmpOp::Lt,
                ">=" => CmpOp::Ge,
                ">" => CmpOp::Gt,
                other => return Err(FormulaParseError::Unexpected(other.to_string())),
            };
            *pos += 1;
            let q_tok = tokens.get(*pos).ok_or(FormulaParseError::Eof)?;
            let bound = parse_ratio(q_tok)
                .map_err(|_| FormulaParseError::BadRational(q_tok.clone()))?;
            *pos += 1;
            Formula::pr_cmp(agent, inner, op, bound)
        }
        other => return Err(FormulaParseError::Unexpected(other.to_string())),
    };
    match tokens.get(*pos) {
        Some(t) if t == ")" => {
            *pos += 1;
            Ok(phi)
        }
        Some(t) => Err(FormulaParseError::Unexpected(t.clone())),
        None => Err(FormulaParseError::Eof),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rat::ratio;
    use crate::secrecy::{check_c_secrecy, check_run_based_secrecy};

    #[test]
    fn prim_truth_is_state_membership() {
        let sys = fixtures::ex1();
        let a2 = sys.agent("2").unwrap();
        let mut interp = Interpretation::new();
        interp.define_agent_locals(&sys, "p", a2, &["B1"]);
        let ev = Evaluator::new(&sys, &interp, None);
        assert!(ev.eval(Point::new(0, 1), &Formula::prim("p")).unwrap());
        assert!(!ev.eval(Point::new(1, 1), &Formula::prim("p")).unwrap());
        assert!(matches!(
            ev.eval(Point::new(0, 0), &Formula::prim("q")),
            Err(EvalError::UnknownProp(_))
        ));
    }

    #[test]
    fn once_on_ex3() {
        let sys = fixtures::ex3();
        let a2 = sys.agent("2").unwrap();
        let mut interp = Interpretation::new();
        interp.define_agent_locals(&sys, "p", a2, &["A", "D1"]);
        let ev = Evaluator::new(&sys, &interp, None);
        let once_p = Formula::once(Formula::prim("p"));
        assert!(ev.eval(Point::new(0, 0), &once_p).unwrap()); // r1 passes A
        assert!(!ev.eval(Point::new(3, 0), &once_p).unwrap()); // r4 never hits {A, D1}
    }

    #[test]
    fn once_is_constant_along_runs() {
        let sys = fixtures::ex3();
        let a2 = sys.agent("2").unwrap();
        let mut interp = Interpretation::new();
        interp.define_agent_locals(&sys, "p", a2, &["C1"]);
        let ev = Evaluator::new(&sys, &interp, None);
        let ext = ev.extension(&Formula::once(Formula::prim("p"))).unwrap();
        for r in 0..sys.run_count() {
            let h = sys.horizon();
            let vals: BTreeSet<bool> =
                (0..=h).map(|t| ext[r * (h + 1) + t]).collect();
            assert_eq!(vals.len(), 1);
        }
    }

    #[test]
    fn poss_is_dual_of_knows() {
        let sys = fixtures::ex1();
        let a1 = sys.agent("1").unwrap();
        let a2 = sys.agent("2").unwrap();
        let mut interp = Interpretation::new();
        interp.define_agent_locals(&sys, "p", a2, &["B1", "C1"]);
        let ev = Evaluator::new(&sys, &interp, None);
        let phi = Formula::prim("p");
        for p in sys.points() {
            let poss = ev.eval(p, &Formula::poss(a1, phi.clone())).unwrap();
            let kdual = ev
                .eval(p, &Formula::not(Formula::knows(a1, Formula::not(phi.clone()))))
                .unwrap();
            assert_eq!(poss, kdual);
        }
    }

    #[test]
    fn pr_cmp_on_ex3() {
        let sys = fixtures::ex3();
        let mu = fixtures::ex3_measure(&sys);
        let a1 = sys.agent("1").unwrap();
        let a2 = sys.agent("2").unwrap();
        let mut interp = Interpretation::new();
        interp.define_agent_locals(&sys, "p", a2, &["A", "D1"]);
        let ev = Evaluator::new(&sys, &interp, Some(&mu));
        let once_p = Formula::once(Formula::prim("p"));
        let eq_one = Formula::pr_cmp(a1, once_p.clone(), CmpOp::Eq, ratio(1, 1));
        let eq_half = Formula::pr_cmp(a1, once_p, CmpOp::Eq, ratio(1, 2));
        assert!(ev.eval(Point::new(0, 0), &eq_one).unwrap());
        assert!(ev.eval(Point::new(2, 0), &eq_half).unwrap());
    }

    #[test]
    fn pr_cmp_needs_measure() {
        let sys = fixtures::ex3();
        let a1 = sys.agent("1").unwrap();
        let interp = Interpretation::new();
        let ev = Evaluator::new(&sys, &interp, None);
        let phi = Formula::pr_cmp(a1, Formula::prim("p"), CmpOp::Eq, ratio(1, 1));
        assert!(matches!(
            ev.eval(Point::new(0, 0), &phi),
            Err(EvalError::MeasureRequired)
        ));
    }

    #[test]
    fn j_locality() {
        let sys = fixtures::ex1();
        let a1 = sys.agent("1").unwrap();
        let a2 = sys.agent("2").unwrap();
        let mut interp = Interpretation::new();
        interp.define_agent_locals(&sys, "p", a2, &["A", "B1"]);
        // a proposition that is a function of 2's local state is 2-local
        assert!(is_j_local(&sys, &interp, None, a2, &Formula::prim("p")).unwrap());
        // K_j phi is j-local for any phi
        for phi in [
            Formula::prim("p"),
            Formula::not(Formula::prim("p")),
            Formula::once(Formula::prim("p")),
        ] {
            assert!(is_j_local(&sys, &interp, None, a2, &Formula::knows(a2, phi)).unwrap());
        }
        // true at exactly one point of a multi-point information set: not 1-local
        let mut narrow = Interpretation::new();
        narrow.define(&sys, "q", |s, p| s.global_state_id(p) == s.global_state_id(Point::new(0, 1)));
        assert!(!is_j_local(&sys, &narrow, None, a1, &Formula::prim("q")).unwrap());
    }

    #[test]
    fn j_local_family_counts() {
        let sys = fixtures::ex1();
        let a2 = sys.agent("2").unwrap();
        assert_eq!(sys.info_sets(a2).len(), 5);
        let mut n = 0;
        for_each_j_local_extension(&sys, a2, DEFAULT_INFO_SET_BOUND, |_| n += 1).unwrap();
        assert_eq!(n, 32);

        // single info set agent: two unions
        let one = System::new(
            vec!["1".into()],
            vec![crate::kernel::run_of(
                "r",
                vec![crate::kernel::GlobalState::new("-", vec!["s".into()])],
            )],
            0,
            crate::kernel::Mode::AsynchronousStutter,
        )
        .unwrap();
        let mut n1 = 0;
        for_each_j_local_extension(&one, AgentId(0), 16, |_| n1 += 1).unwrap();
        assert_eq!(n1, 2);

        assert!(matches!(
            for_each_j_local_extension(&sys, a2, 3, |_| {}),
            Err(EvalError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn extensions_are_j_local() {
        // every emitted union, used as a proposition, passes is_j_local
        let sys = fixtures::ex2();
        let a2 = sys.agent("2").unwrap();
        let mut exts: Vec<Vec<bool>> = Vec::new();
        for_each_j_local_extension(&sys, a2, 16, |e| exts.push(e.points.clone())).unwrap();
        for ext in exts {
            for k in sys.info_sets(a2) {
                let first = ext[point_index(&sys, k.points[0])];
                assert!(k.points.iter().all(|&q| ext[point_index(&sys, q)] == first));
            }
        }
    }

    #[test]
    fn oracles_match_semantic_checks_on_fixtures() {
        let sys = fixtures::ex1();
        let a1 = sys.agent("1").unwrap();
        let a2 = sys.agent("2").unwrap();
        let b = DEFAULT_INFO_SET_BOUND;
        assert!(oracle_c_secrecy(&sys, a1, a2, &Allowability::Synchronous, b).unwrap());
        assert!(!oracle_c_secrecy(&sys, a1, a2, &Allowability::Total, b).unwrap());
        assert_eq!(
            oracle_c_secrecy(&sys, a1, a2, &Allowability::Synchronous, b).unwrap(),
            check_c_secrecy(&sys, a1, a2, &Allowability::Synchronous)
                .unwrap()
                .holds
        );
        assert!(!oracle_run_based_secrecy(&sys, a1, a2, b).unwrap());

        let sys2 = fixtures::ex2();
        let b1 = sys2.agent("1").unwrap();
        let b2 = sys2.agent("2").unwrap();
        assert!(oracle_run_based_secrecy(&sys2, b1, b2, b).unwrap());
        assert_eq!(
            oracle_run_based_secrecy(&sys2, b1, b2, b).unwrap(),
            check_run_based_secrecy(&sys2, b1, b2).unwrap().holds
        );
    }

    #[test]
    fn oracle_single_run() {
        let sys = System::new(
            vec!["1".into(), "2".into()],
            vec![crate::kernel::run_of(
                "r",
                vec![
                    crate::kernel::GlobalState::new("-", vec!["x0".into(), "y0".into()]),
                    crate::kernel::GlobalState::new("-", vec!["x1".into(), "y1".into()]),
                ],
            )],
            1,
            crate::kernel::Mode::Synchronous,
        )
        .unwrap();
        let a1 = sys.agent("1").unwrap();
        let a2 = sys.agent("2").unwrap();
        assert!(oracle_run_based_secrecy(&sys, a1, a2, 16).unwrap());
    }

    #[test]
    fn oracle_constant_j_state() {
        let sys = System::new(
            vec!["1".into(), "2".into()],
            vec![
                crate::kernel::run_of(
                    "r1",
                    vec![crate::kernel::GlobalState::new("-", vec!["x".into(), "c".into()])],
                ),
                crate::kernel::run_of(
                    "r2",
                    vec![crate::kernel::GlobalState::new("-", vec!["y".into(), "c".into()])],
                ),
            ],
            0,
            crate::kernel::Mode::AsynchronousStutter,
        )
        .unwrap();
        let a1 = sys.agent("1").unwrap();
        let a2 = sys.agent("2").unwrap();
        assert!(oracle_c_secrecy(&sys, a1, a2, &Allowability::Total, 16).unwrap());
        assert!(oracle_run_based_secrecy(&sys, a1, a2, 16).unwrap());
    }

    #[test]
    fn surface_syntax_round_trip() {
        let sys = fixtures::ex3();
        let phi = parse_formula(&sys, "(K 1 (once p))").unwrap();
        assert_eq!(
            phi,
            Formula::knows(sys.agent("1").unwrap(), Formula::once(Formula::prim("p")))
        );
        let psi = parse_formula(&sys, "(pr 1 (once p) = 1/2)").unwrap();
        assert_eq!(
            psi,
            Formula::pr_cmp(
                sys.agent("1").unwrap(),
                Formula::once(Formula::prim("p")),
                CmpOp::Eq,
                ratio(1, 2)
            )
        );
        assert!(parse_formula(&sys, "(and p").is_err());
        assert!(parse_formula(&sys, "(K 9 p)").is_err());
        assert!(parse_formula(&sys, "(pr 1 p = 1/0)").is_err());
    }
}
