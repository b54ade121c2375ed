//! Plausibilistic secrecy: the probabilistic checks with the reals
//! replaced by a partially ordered value domain.
//!
//! A domain carries bottom and top, a partial order, a finite sum and a
//! product, with the product distributing over the sum and cancelling on
//! the tuples that actually arise from conditioning. Three domains cover
//! everything the checks need: the two-valued domain (nonempty or not,
//! recovering the possibilistic notions), exact rationals (recovering the
//! probabilistic notions), and vectors of rationals indexed by a finite set
//! of measures (one check for a whole family at once), where a component is
//! undefined when its measure gives the conditioning set mass zero.
//!
//! The countable sum of the general theory collapses to a finite sum here
//! because every carrier is finite.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::kernel::{AgentId, KernelError, System};
use crate::prob::RunMeasure;
use crate::rat::{format_ratio, rat_one};
use crate::secrecy::{Counterexample, SecrecyVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlausError {
    #[error("conditioning set is outside the conditioning family")]
    NotConditionable,
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("domain axiom violated: {0}")]
    Axiom(String),
}

/// A plausibility value. Vector components are `None` when the component
/// measure gives the conditioning set mass zero (the undefined mark).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PlausValue {
    Triv(bool),
    Prob(BigRational),
    Vector(Vec<Option<BigRational>>),
    /// Toy value for the non-commutative gate tests.
    Pair(BigRational, BigRational),
}

impl fmt::Display for PlausValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlausValue::Triv(b) => write!(f, "{}", if *b { 1 } else { 0 }),
            PlausValue::Prob(r) => write!(f, "{}", format_ratio(r)),
            PlausValue::Vector(v) => {
                let parts: Vec<String> = v
                    .iter()
                    .map(|c| c.as_ref().map(format_ratio).unwrap_or_else(|| "*".into()))
                    .collect();
                write!(f, "({})", parts.join(", "))
            }
            PlausValue::Pair(a, b) => write!(f, "<{}, {}>", format_ratio(a), format_ratio(b)),
        }
    }
}

/// The value domain of a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// {0, 1} with max and min: plain possibility.
    Trivial,
    /// Rationals in [0, 1] with capped sum and product.
    Probability,
    /// Pointwise rationals-or-undefined, one component per measure.
    MeasureVector(usize),
    /// Left-biased pair product; not commutative. Only used to exercise
    /// the hypothesis gates.
    NonCommutativePair,
}

fn capped_add(a: &BigRational, b: &BigRational) -> BigRational {
    let s = a + b;
    if s > rat_one() {
        rat_one()
    } else {
        s
    }
}

impl Domain {
    pub fn bottom(&self) -> PlausValue {
        match self {
            Domain::Trivial => PlausValue::Triv(false),
            Domain::Probability => PlausValue::Prob(BigRational::zero()),
            Domain::MeasureVector(n) => {
                PlausValue::Vector(vec![Some(BigRational::zero()); *n])
            }
            Domain::NonCommutativePair => {
                PlausValue::Pair(BigRational::zero(), BigRational::zero())
            }
        }
    }

    pub fn top(&self) -> PlausValue {
        match self {
            Domain::Trivial => PlausValue::Triv(true),
            Domain::Probability => PlausValue::Prob(rat_one()),
            Domain::MeasureVector(n) => PlausValue::Vector(vec![Some(rat_one()); *n]),
            Domain::NonCommutativePair => PlausValue::Pair(rat_one(), rat_one()),
        }
    }

    /// The partial order; incomparable values compare false both ways.
    /// Undefined vector components compare only with undefined.
    pub fn leq(&self, a: &PlausValue, b: &PlausValue) -> bool {
        match (a, b) {
            (PlausValue::Triv(x), PlausValue::Triv(y)) => !x | y,
            (PlausValue::Prob(x), PlausValue::Prob(y)) => x <= y,
            (PlausValue::Vector(x), PlausValue::Vector(y)) => {
                x.len() == y.len()
                    && x.iter().zip(y).all(|(cx, cy)| match (cx, cy) {
                        (Some(vx), Some(vy)) => vx <= vy,
                        (None, None) => true,
                        _ => false,
                    })
            }
            (PlausValue::Pair(x1, x2), PlausValue::Pair(y1, y2)) => x1 <= y1 && x2 <= y2,
            _ => false,
        }
    }

    /// Finite sum.
    pub fn plus(&self, items: &[PlausValue]) -> PlausValue {
        match self {
            Domain::Trivial => PlausValue::Triv(items.iter().any(|v| match v {
                PlausValue::Triv(b) => *b,
                _ => false,
            })),
            Domain::Probability => {
                let mut acc = BigRational::zero();
                for v in items {
                    if let PlausValue::Prob(r) = v {
                        acc = capped_add(&acc, r);
                    }
                }
                PlausValue::Prob(acc)
            }
            Domain::MeasureVector(n) => {
                let mut acc: Vec<Option<BigRational>> = vec![Some(BigRational::zero()); *n];
                for v in items {
                    if let PlausValue::Vector(comps) = v {
                        for (slot, c) in acc.iter_mut().zip(comps) {
                            *slot = match (slot.take(), c) {
                                (Some(x), Some(y)) => Some(capped_add(&x, y)),
                                _ => None,
                            };
                        }
                    }
                }
                PlausValue::Vector(acc)
            }
            Domain::NonCommutativePair => {
                let mut a = BigRational::zero();
                let mut b = BigRational::zero();
                for v in items {
                    if let PlausValue::Pair(x, y) = v {
                        a = capped_add(&a, x);
                        b = capped_add(&b, y);
                    }
                }
                PlausValue::Pair(a, b)
            }
        }
    }

    pub fn times(&self, a: &PlausValue, b: &PlausValue) -> PlausValue {
        match (self, a, b) {
            (Domain::Trivial, PlausValue::Triv(x), PlausValue::Triv(y)) => {
                PlausValue::Triv(*x && *y)
            }
            (Domain::Probability, PlausValue::Prob(x), PlausValue::Prob(y)) => {
                PlausValue::Prob(x * y)
            }
            (Domain::MeasureVector(_), PlausValue::Vector(x), PlausValue::Vector(y)) => {
                PlausValue::Vector(
                    x.iter()
                        .zip(y)
                        .map(|(cx, cy)| match (cx, cy) {
                            (Some(vx), Some(vy)) => Some(vx * vy),
                            // undefined times a defined zero is zero (the
                            // product is bounded by the zero factor)
                            (None, Some(v)) | (Some(v), None) if v.is_zero() => {
                                Some(BigRational::zero())
                            }
                            _ => None,
                        })
                        .collect(),
                )
            }
            // keeps the left second component: not commutative
            (Domain::NonCommutativePair, PlausValue::Pair(x1, x2), PlausValue::Pair(y1, _)) => {
                PlausValue::Pair(x1 * y1, x2.clone())
            }
            _ => panic!("mixed plausibility domains"),
        }
    }

    pub fn commutative(&self) -> bool {
        !matches!(self, Domain::NonCommutativePair)
    }
}

/// How conditional plausibilities of run sets are computed.
#[derive(Debug, Clone)]
pub enum PlausRule {
    Trivial,
    Probability(RunMeasure),
    MeasureVector(Vec<RunMeasure>),
    NonCommutativePair(RunMeasure),
}

/// A conditional plausibility space over the runs of a system. The
/// measurable family is the power set; the conditioning family depends on
/// the rule (nonempty sets, positive-measure sets, or sets positive for at
/// least one component). Every information set's run set is conditionable
/// because run measures are validated that way.
pub struct PlausSpace<'a> {
    sys: &'a System,
    rule: PlausRule,
}

pub fn trivial_space(sys: &System) -> PlausSpace<'_> {
    PlausSpace { sys, rule: PlausRule::Trivial }
}

pub fn probability_space<'a>(sys: &'a System, mu: &RunMeasure) -> PlausSpace<'a> {
    PlausSpace { sys, rule: PlausRule::Probability(mu.clone()) }
}

pub fn measure_vector_space<'a>(sys: &'a System, measures: &[RunMeasure]) -> PlausSpace<'a> {
    assert!(!measures.is_empty(), "need at least one measure");
    PlausSpace { sys, rule: PlausRule::MeasureVector(measures.to_vec()) }
}

pub fn non_commutative_space<'a>(sys: &'a System, mu: &RunMeasure) -> PlausSpace<'a> {
    PlausSpace { sys, rule: PlausRule::NonCommutativePair(mu.clone()) }
}

impl<'a> PlausSpace<'a> {
    pub fn system(&self) -> &'a System {
        self.sys
    }

    pub fn domain(&self) -> Domain {
        match &self.rule {
            PlausRule::Trivial => Domain::Trivial,
            PlausRule::Probability(_) => Domain::Probability,
            PlausRule::MeasureVector(ms) => Domain::MeasureVector(ms.len()),
            PlausRule::NonCommutativePair(_) => Domain::NonCommutativePair,
        }
    }

    /// Is U in the conditioning family?
    pub fn conditionable(&self, u: &BTreeSet<usize>) -> bool {
        match &self.rule {
            PlausRule::Trivial => !u.is_empty(),
            PlausRule::Probability(mu) | PlausRule::NonCommutativePair(mu) => {
                !mu.mass(u.iter().copied()).is_zero()
            }
            PlausRule::MeasureVector(ms) => {
                ms.iter().any(|mu| !mu.mass(u.iter().copied()).is_zero())
            }
        }
    }

    /// Pl(V | U) over run sets.
    pub fn pl(
        &self,
        v: &BTreeSet<usize>,
        u: &BTreeSet<usize>,
    ) -> Result<PlausValue, PlausError> {
        if !self.conditionable(u) {
            return Err(PlausError::NotConditionable);
        }
        Ok(match &self.rule {
            PlausRule::Trivial => PlausValue::Triv(!v.is_disjoint(u)),
            PlausRule::Probability(mu) => {
                PlausValue::Prob(mu.conditional(v, u).expect("checked conditionable"))
            }
            PlausRule::MeasureVector(ms) => {
                PlausValue::Vector(ms.iter().map(|mu| mu.conditional(v, u)).collect())
            }
            PlausRule::NonCommutativePair(mu) => {
                let c = mu.conditional(v, u).expect("checked conditionable");
                PlausValue::Pair(c.clone(), c)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlausVariant {
    Total,
    Sync,
    RunBased,
}

fn require_distinct(sys: &System, i: AgentId, j: AgentId) -> Result<(), PlausError> {
    sys.check_agent(i)?;
    sys.check_agent(j)?;
    if i == j {
        return Err(PlausError::Kernel(KernelError::SameAgent(
            sys.agent_name(i).to_string(),
        )));
    }
    Ok(())
}

/// The secrecy definitions with plausibility in place of probability and
/// domain equality in place of rational equality. The total variant checks
/// point-level slices through the conditioned point spaces, so it inherits
/// the run-generated measurability restriction; the synchronous and
/// run-based variants work with run sets directly.
pub fn check_plaus_secrecy(
    space: &PlausSpace,
    i: AgentId,
    j: AgentId,
    variant: PlausVariant,
) -> Result<SecrecyVerdict, PlausError> {
    let sys = space.system();
    require_distinct(sys, i, j)?;
    if variant == PlausVariant::Sync && !sys.is_synchronous() {
        return Err(PlausError::Kernel(KernelError::SystemNotSynchronous));
    }
    let i_sets = sys.info_sets(i);
    let j_sets = sys.info_sets(j);
    for x in j_sets {
        let mut seen: Option<(usize, PlausValue)> = None;
        for (kx, k) in i_sets.iter().enumerate() {
            if variant == PlausVariant::Sync && k.points[0].time != x.points[0].time {
                continue;
            }
            let value = match variant {
                PlausVariant::RunBased | PlausVariant::Sync => space.pl(&x.runs, &k.runs)?,
                PlausVariant::Total => {
                    // the point-level slice must be generated by runs
                    let mut slice_runs = BTreeSet::new();
                    let mut ok = true;
                    for &run in &k.runs {
                        let fiber: Vec<bool> = k
                            .points
                            .iter()
                            .filter(|p| p.run == run)
                            .map(|p| x.contains(*p))
                            .collect();
                        if fiber.iter().all(|&b| b) {
                            slice_runs.insert(run);
                        } else if fiber.iter().any(|&b| b) {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        return Ok(SecrecyVerdict::fails(
                            Counterexample::NonMeasurable {
                                at: k.points[0],
                                witness: x.points[0],
                            },
                            "slice of the j-information set is not run-generated".to_string(),
                        ));
                    }
                    space.pl(&slice_runs, &k.runs)?
                }
            };
            match &seen {
                None => seen = Some((kx, value)),
                Some((first_kx, prev)) if *prev != value => {
                    return Ok(SecrecyVerdict::fails(
                        Counterexample::PointPair {
                            left: i_sets[*first_kx].points[0],
                            right: k.points[0],
                        },
                        format!(
                            "Pl of [{}] is {} at [{}] but {} at [{}]",
                            x.local, prev, i_sets[*first_kx].local, value, k.local
                        ),
                    ));
                }
                _ => {}
            }
        }
    }
    Ok(SecrecyVerdict::holds("plausibility values constant"))
}

/// Outcome of verifying the conditioning lemmas on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaOutcome {
    /// Hypotheses unmet (for example a non-commutative product).
    Skipped { reason: String },
    /// Both lemma statements checked; `true` means no violation found.
    Verified(bool),
}

/// Verify, on one finite instance, the two conditioning lemmas behind the
/// symmetry results: constancy of Pl(X | Y_i) across a partition of Y is
/// the same as each Pl(X | Y_i) equalling Pl(X | Y); and, for commutative
/// products with X ⊆ Y conditionable and Pl(X | Y) not bottom, constancy
/// transposes to Pl(Y_i | X) = Pl(Y_i | Y).
pub fn check_plaus_symmetry_lemmas(
    space: &PlausSpace,
    partition: &[BTreeSet<usize>],
    x: &BTreeSet<usize>,
) -> Result<LemmaOutcome, PlausError> {
    let domain = space.domain();
    let y: BTreeSet<usize> = partition.iter().flatten().copied().collect();
    if !space.conditionable(&y) {
        return Ok(LemmaOutcome::Skipped { reason: "Y not conditionable".into() });
    }
    let total: usize = partition.iter().map(BTreeSet::len).sum();
    if total != y.len() {
        return Ok(LemmaOutcome::Skipped { reason: "blocks overlap".into() });
    }

    let values: Vec<PlausValue> = partition
        .iter()
        .filter(|b| space.conditionable(b))
        .map(|b| space.pl(x, b))
        .collect::<Result<_, _>>()?;
    let constant = values.windows(2).all(|w| w[0] == w[1]);
    let via_y = space.pl(x, &y)?;
    let all_equal_y = values.iter().all(|v| *v == via_y);
    // the lemma: constancy across conditionable blocks iff each block's
    // value equals the value conditioned on the union
    let independence_ok = constant == all_equal_y;

    if !domain.commutative() {
        return Ok(LemmaOutcome::Skipped {
            reason: "product is not commutative; symmetry lemma needs commutativity".into(),
        });
    }
    if !x.is_subset(&y) || !space.conditionable(x) {
        return Ok(LemmaOutcome::Skipped {
            reason: "X must be a conditionable subset of Y".into(),
        });
    }
    if via_y == domain.bottom() {
        return Ok(LemmaOutcome::Skipped { reason: "Pl(X | Y) is bottom".into() });
    }
    let mut symmetry_ok = true;
    if constant {
        for block in partition {
            let lhs = space.pl(block, x)?;
            let rhs = space.pl(block, &y)?;
            if lhs != rhs {
                symmetry_ok = false;
            }
        }
    }
    Ok(LemmaOutcome::Verified(independence_ok && symmetry_ok))
}

/// Check every conditional-space axiom over the subsets of the run
/// carrier: identity and bottom values, monotonicity, finite additivity,
/// the chain rule, and cancellation over the products that actually arise.
/// Exhaustive, so the carrier must stay small.
pub fn verify_axioms(space: &PlausSpace) -> Result<(), PlausError> {
    let n = space.system().run_count();
    assert!(n <= 6, "axiom verification is exhaustive; keep the carrier small");
    let domain = space.domain();
    let subsets: Vec<BTreeSet<usize>> = (0..(1u32 << n))
        .map(|mask| (0..n).filter(|r| mask & (1 << r) != 0).collect())
        .collect();
    let conditionable: Vec<&BTreeSet<usize>> = subsets
        .iter()
        .filter(|u| space.conditionable(u))
        .collect();

    for u in &conditionable {
        if space.pl(u, u)? != domain.top() {
            return Err(PlausError::Axiom(format!("Pl(U | U) != top for U = {u:?}")));
        }
        let empty = BTreeSet::new();
        if space.pl(&empty, u)? != domain.bottom() {
            return Err(PlausError::Axiom("Pl(empty | U) != bottom".into()));
        }
        for v1 in &subsets {
            for v2 in &subsets {
                if v1.is_disjoint(v2) {
                    let lhs = space.pl(&v1.union(v2).copied().collect(), u)?;
                    let rhs = domain.plus(&[space.pl(v1, u)?, space.pl(v2, u)?]);
                    if lhs != rhs {
                        return Err(PlausError::Axiom(format!(
                            "additivity fails for {v1:?}, {v2:?} given {u:?}"
                        )));
                    }
                }
                if v1.is_subset(v2) {
                    let a = space.pl(v1, u)?;
                    let b = space.pl(v2, u)?;
                    if !domain.leq(&a, &b) {
                        return Err(PlausError::Axiom("monotonicity fails".into()));
                    }
                }
            }
        }
    }
    // chain rule and cancellation over arising products
    let mut dom_times: Vec<(PlausValue, PlausValue)> = Vec::new();
    for u3 in &conditionable {
        for u2 in &subsets {
            let u23: BTreeSet<usize> = u2.intersection(u3).copied().collect();
            if !space.conditionable(&u23) {
                continue;
            }
            for u1 in &subsets {
                let lhs = space.pl(&u1.intersection(u2).copied().collect(), u3)?;
                let a = space.pl(u1, &u23)?;
                let b = space.pl(u2, u3)?;
                let rhs = domain.times(&a, &b);
                if lhs != rhs {
                    return Err(PlausError::Axiom(format!(
                        "chain rule fails for U1={u1:?} U2={u2:?} U3={u3:?}"
                    )));
                }
                dom_times.push((a, b));
            }
        }
    }
    for (a, c) in &dom_times {
        if *c == domain.bottom() {
            continue;
        }
        for (b, c2) in &dom_times {
            if c2 != c {
                continue;
            }
            let ac = domain.times(a, c);
            let bc = domain.times(b, c);
            if domain.leq(&ac, &bc) && !domain.leq(a, b) {
                return Err(PlausError::Axiom("cancellation fails".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::prob::{
        check_prob_total_secrecy, check_run_based_prob_secrecy, PointAssignment,
    };
    use crate::rat::ratio;
    use crate::secrecy::check_run_based_secrecy;

    fn ids(sys: &System) -> (AgentId, AgentId) {
        (sys.agent("1").unwrap(), sys.agent("2").unwrap())
    }

    #[test]
    fn trivial_domain_values() {
        let d = Domain::Trivial;
        assert_eq!(d.bottom(), PlausValue::Triv(false));
        assert_eq!(
            d.times(&d.top(), &PlausValue::Triv(true)),
            PlausValue::Triv(true)
        );
        let sys = fixtures::ex2();
        let space = trivial_space(&sys);
        let empty = BTreeSet::new();
        let all: BTreeSet<usize> = (0..sys.run_count()).collect();
        assert_eq!(space.pl(&empty, &all).unwrap(), PlausValue::Triv(false));
        assert_eq!(space.pl(&all, &all).unwrap(), PlausValue::Triv(true));
    }

    #[test]
    fn axioms_hold_for_all_rules() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let mu2 = RunMeasure::uniform(&sys).unwrap();
        verify_axioms(&trivial_space(&sys)).unwrap();
        verify_axioms(&probability_space(&sys, &mu)).unwrap();
        verify_axioms(&measure_vector_space(&sys, &[mu.clone(), mu2])).unwrap();
    }

    #[test]
    fn probability_chain_rule_is_conditional_product() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let space = probability_space(&sys, &mu);
        let u3: BTreeSet<usize> = (0..3).collect();
        let u2: BTreeSet<usize> = [0, 1].into_iter().collect();
        let u1: BTreeSet<usize> = [1, 2].into_iter().collect();
        let lhs = space
            .pl(&u1.intersection(&u2).copied().collect(), &u3)
            .unwrap();
        let rhs = Domain::Probability.times(
            &space
                .pl(&u1, &u2.intersection(&u3).copied().collect())
                .unwrap(),
            &space.pl(&u2, &u3).unwrap(),
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn vector_bottom_top_and_singleton_reduction() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let d = Domain::MeasureVector(2);
        assert_eq!(
            d.bottom(),
            PlausValue::Vector(vec![Some(ratio(0, 1)), Some(ratio(0, 1))])
        );
        assert_eq!(
            d.top(),
            PlausValue::Vector(vec![Some(ratio(1, 1)), Some(ratio(1, 1))])
        );
        // a singleton vector space carries the same information as the
        // probability space
        let vspace = measure_vector_space(&sys, std::slice::from_ref(&mu));
        let pspace = probability_space(&sys, &mu);
        let u: BTreeSet<usize> = (0..3).collect();
        let v: BTreeSet<usize> = [1].into_iter().collect();
        let PlausValue::Vector(comps) = vspace.pl(&v, &u).unwrap() else {
            panic!()
        };
        let PlausValue::Prob(p) = pspace.pl(&v, &u).unwrap() else { panic!() };
        assert_eq!(comps[0].clone().unwrap(), p);
    }

    #[test]
    fn reduction_trivial_run_based() {
        for sys in [fixtures::ex1(), fixtures::ex2(), fixtures::ex3()] {
            let (a1, a2) = ids(&sys);
            let space = trivial_space(&sys);
            let plaus = check_plaus_secrecy(&space, a1, a2, PlausVariant::RunBased).unwrap();
            let poss = check_run_based_secrecy(&sys, a1, a2).unwrap();
            assert_eq!(plaus.holds, poss.holds);
        }
    }

    #[test]
    fn reduction_probability_run_based() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let (a1, a2) = ids(&sys);
        let space = probability_space(&sys, &mu);
        assert_eq!(
            check_plaus_secrecy(&space, a1, a2, PlausVariant::RunBased)
                .unwrap()
                .holds,
            check_run_based_prob_secrecy(&sys, &mu, a1, a2).unwrap().holds
        );
        // and the failing direction
        assert_eq!(
            check_plaus_secrecy(&space, a2, a1, PlausVariant::RunBased)
                .unwrap()
                .holds,
            check_run_based_prob_secrecy(&sys, &mu, a2, a1).unwrap().holds
        );
    }

    #[test]
    fn reduction_probability_total() {
        for sys in [fixtures::ex1(), fixtures::ex2()] {
            let mu = RunMeasure::uniform(&sys).unwrap();
            let (a1, a2) = ids(&sys);
            let space = probability_space(&sys, &mu);
            assert_eq!(
                check_plaus_secrecy(&space, a1, a2, PlausVariant::Total)
                    .unwrap()
                    .holds,
                check_prob_total_secrecy(&sys, &PointAssignment::Conditioned(&mu), a1, a2)
                    .unwrap()
                    .holds
            );
        }
    }

    #[test]
    fn reduction_vector_is_per_measure() {
        let sys = fixtures::ex2();
        let mu1 = fixtures::ex2_measure(&sys);
        let mu2 = RunMeasure::uniform(&sys).unwrap();
        let (a1, a2) = ids(&sys);
        let vspace = measure_vector_space(&sys, &[mu1.clone(), mu2.clone()]);
        let joint = check_plaus_secrecy(&vspace, a1, a2, PlausVariant::RunBased)
            .unwrap()
            .holds;
        let per = [mu1, mu2]
            .iter()
            .all(|mu| check_run_based_prob_secrecy(&sys, mu, a1, a2).unwrap().holds);
        assert_eq!(joint, per);
    }

    #[test]
    fn sync_variant_requires_synchrony() {
        let sys = fixtures::ex2();
        let (a1, a2) = ids(&sys);
        let space = trivial_space(&sys);
        assert!(check_plaus_secrecy(&space, a1, a2, PlausVariant::Sync).is_err());

        let sys3 = fixtures::ex3();
        let mu3 = fixtures::ex3_measure(&sys3);
        let (b1, b2) = ids(&sys3);
        let space3 = probability_space(&sys3, &mu3);
        assert!(check_plaus_secrecy(&space3, b1, b2, PlausVariant::Sync)
            .unwrap()
            .holds);
    }

    #[test]
    fn symmetry_lemmas_probability_and_trivial() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let blocks: Vec<BTreeSet<usize>> = vec![
            [0].into_iter().collect(),
            [1, 2].into_iter().collect(),
        ];
        let x: BTreeSet<usize> = [0, 1].into_iter().collect();
        for space in [probability_space(&sys, &mu), trivial_space(&sys)] {
            match check_plaus_symmetry_lemmas(&space, &blocks, &x).unwrap() {
                LemmaOutcome::Verified(ok) => assert!(ok),
                LemmaOutcome::Skipped { reason } => panic!("unexpected skip: {reason}"),
            }
        }
    }

    #[test]
    fn symmetry_lemma_gates_on_commutativity() {
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let space = non_commutative_space(&sys, &mu);
        let blocks: Vec<BTreeSet<usize>> = vec![
            [0].into_iter().collect(),
            [1, 2].into_iter().collect(),
        ];
        let x: BTreeSet<usize> = [0, 1].into_iter().collect();
        match check_plaus_symmetry_lemmas(&space, &blocks, &x).unwrap() {
            LemmaOutcome::Skipped { reason } => {
                assert!(reason.contains("commutativ"));
            }
            LemmaOutcome::Verified(_) => panic!("should gate on commutativity"),
        }
    }

    #[test]
    fn conditioning_outside_family_rejected() {
        let sys = fixtures::ex2();
        let space = trivial_space(&sys);
        let empty = BTreeSet::new();
        let v: BTreeSet<usize> = [0].into_iter().collect();
        assert!(matches!(
            space.pl(&v, &empty),
            Err(PlausError::NotConditionable)
        ));
    }

    #[test]
    fn vector_space_over_sampled_adversarial_members() {
        // one vector check decides generalized secrecy for the sampled
        // members of an adversarial family at once
        use crate::adversarial::{product_family_measure, AdversarialSystem, InitStructure};
        use std::collections::BTreeMap;

        let pps = crate::fixtures::gs_xor(2);
        let adv = crate::traces::build_gray_syverson(&pps).unwrap();
        let l = adv.base().agent("L").unwrap();
        let (ext, jf) = adv.others_choice_system(l).unwrap();
        let members: Vec<RunMeasure> = [
            vec![ratio(1, 2), ratio(1, 2)],
            vec![ratio(1, 3), ratio(2, 3)],
            vec![ratio(3, 4), ratio(1, 4)],
        ]
        .into_iter()
        .map(|hw| {
            let mu = product_family_measure(&adv, &[vec![ratio(1, 1)], hw]).unwrap();
            RunMeasure::new(&ext, mu.weights().to_vec()).unwrap()
        })
        .collect();
        let vspace = measure_vector_space(&ext, &members);
        let joint = check_plaus_secrecy(&vspace, l, jf, PlausVariant::RunBased)
            .unwrap()
            .holds;
        let per = members
            .iter()
            .all(|mu| check_run_based_prob_secrecy(&ext, mu, l, jf).unwrap().holds);
        assert_eq!(joint, per);
        assert!(!joint, "the transmitting protocols leak under every member");

        // and on a two-cell system whose observer sees nothing, secrecy
        // holds for the whole sampled family in one pass
        let sys = crate::kernel::System::new(
            vec!["1".to_string(), "2".to_string()],
            vec![
                crate::kernel::run_of(
                    "r0",
                    vec![crate::kernel::GlobalState::new(
                        "-",
                        vec!["o0".to_string(), "ca".to_string()],
                    )],
                ),
                crate::kernel::run_of(
                    "r1",
                    vec![crate::kernel::GlobalState::new(
                        "-",
                        vec!["o0".to_string(), "cb".to_string()],
                    )],
                ),
            ],
            0,
            crate::kernel::Mode::AsynchronousStutter,
        )
        .unwrap();
        let init = InitStructure {
            choices: vec![
                vec!["o0".to_string()],
                vec!["ca".to_string(), "cb".to_string()],
            ],
            assignment: vec![vec![0, 0], vec![0, 1]],
        };
        let mut c0 = BTreeMap::new();
        c0.insert("r0".to_string(), ratio(1, 1));
        let mut c1 = BTreeMap::new();
        c1.insert("r1".to_string(), ratio(1, 1));
        let adv2 = AdversarialSystem::with_init(
            sys,
            init,
            vec![("o0|ca".to_string(), c0), ("o0|cb".to_string(), c1)],
        )
        .unwrap();
        let one = adv2.base().agent("1").unwrap();
        let (ext2, jf2) = adv2.others_choice_system(one).unwrap();
        let members2: Vec<RunMeasure> =
            [vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 4), ratio(3, 4)]]
                .into_iter()
                .map(|hw| {
                    let mu = product_family_measure(&adv2, &[vec![ratio(1, 1)], hw]).unwrap();
                    RunMeasure::new(&ext2, mu.weights().to_vec()).unwrap()
                })
                .collect();
        let vspace2 = measure_vector_space(&ext2, &members2);
        assert!(check_plaus_secrecy(&vspace2, one, jf2, PlausVariant::RunBased)
            .unwrap()
            .holds);
        assert!(crate::adversarial::check_no_evidence(&adv2, one).unwrap().holds);
    }

    /// The ordering-based conditional construction used as a converse
    /// witness: condition inside the highest-ranked cell that gives the
    /// conditioning set positive measure.
    fn ranked_pl(
        cells: &[(BTreeSet<usize>, std::collections::BTreeMap<usize, BigRational>)],
        v: &BTreeSet<usize>,
        u: &BTreeSet<usize>,
    ) -> Option<BigRational> {
        for (runs, weights) in cells {
            let mass = |s: &BTreeSet<usize>| -> BigRational {
                s.intersection(runs)
                    .filter_map(|r| weights.get(r).cloned())
                    .fold(BigRational::zero(), |a, b| a + b)
            };
            let denom = mass(u);
            if !denom.is_zero() {
                let vu: BTreeSet<usize> = v.intersection(u).copied().collect();
                return Some(mass(&vu) / denom);
            }
        }
        None
    }

    #[test]
    fn ranked_cell_construction_witnesses_evidence() {
        // inside a cell the ranked values are the cell's own conditionals;
        // and when an observation is evidence, some ranking makes the
        // others'-choice plausibilities non-constant across the observer's
        // information sets
        let pps = crate::fixtures::gs_xor(2);
        let adv = crate::traces::build_gray_syverson(&pps).unwrap();
        let l = adv.base().agent("L").unwrap();
        let cells: Vec<(BTreeSet<usize>, std::collections::BTreeMap<usize, BigRational>)> = adv
            .cells()
            .iter()
            .map(|c| {
                let weights = c
                    .runs
                    .iter()
                    .map(|&r| (r, c.run_weight(r).unwrap().clone()))
                    .collect();
                (c.runs.clone(), weights)
            })
            .collect();

        // cell-internal agreement
        let first_cell = &adv.cells()[0];
        let sub: BTreeSet<usize> = first_cell.runs.iter().copied().take(2).collect();
        let got = ranked_pl(&cells, &sub, &first_cell.runs).unwrap();
        assert_eq!(got, first_cell.measure(&sub));

        // non-constancy across L's information sets for the second cell's
        // run set (the transmitted bit shows)
        let target = &adv.cells()[1].runs.clone();
        let mut values = BTreeSet::new();
        for k in adv.base().info_sets(l) {
            if let Some(v) = ranked_pl(&cells, target, &k.runs) {
                values.insert(crate::rat::format_ratio(&v));
            }
        }
        assert!(values.len() > 1, "ranked values must separate the cells");
        // which matches the evidence verdict
        assert!(!crate::adversarial::check_no_evidence(&adv, l).unwrap().holds);
    }

    #[test]
    fn acceptability_propagation() {
        // conditionable U with a non-bottom Pl(V | U) makes V ∩ U
        // conditionable too, for every rule
        let sys = fixtures::ex2();
        let mu = fixtures::ex2_measure(&sys);
        let uniform = RunMeasure::uniform(&sys).unwrap();
        let n = sys.run_count();
        let subsets: Vec<BTreeSet<usize>> = (0..(1u32 << n))
            .map(|mask| (0..n).filter(|r| mask & (1 << r) != 0).collect())
            .collect();
        for space in [
            trivial_space(&sys),
            probability_space(&sys, &mu),
            measure_vector_space(&sys, &[mu.clone(), uniform]),
        ] {
            let bottom = space.domain().bottom();
            for u in subsets.iter().filter(|u| space.conditionable(u)) {
                for v in &subsets {
                    if space.pl(v, u).unwrap() != bottom {
                        let vu: BTreeSet<usize> = v.intersection(u).copied().collect();
                        assert!(space.conditionable(&vu));
                    }
                }
            }
        }
    }
}
