//! Deciders for the social-value relations between experiments: the strong
//! order (every agent, every equilibrium pair, every decision problem), its
//! eventual and weak variants, and self-comparison.
//!
//! The sufficient direction goes through mixtures of full and no
//! information; refutations exhibit a concrete decision problem, a verified
//! equilibrium under `pi`, and an agent whose value falls strictly below
//! the observable-signal benchmark of `pi'`. A refutation certificate is
//! exact and re-checkable; positive verdicts beyond the sufficient
//! condition are family-relative evidence, never claims over all problems.

use std::collections::BTreeSet;

use crate::blackwell::{blackwell_geq, mixture_exists, MixtureCertificate};
use crate::equilibrium::{
    compute_equilibrium, enumerate_equilibria, evaluate_profile, materialize_rule,
    observable_signal_value, verify_equilibrium, ActionDistribution, EquilibriumResult,
    HistoryNode, Limits, ProfileRule, StrategyProfile, TieBreakPolicy,
};
use crate::error::{Error, Result};
use crate::model::{
    best_action_interval, best_response_set, classify, iid_power, posterior_update,
    private_belief_distribution, BeliefDistribution, DecisionProblem, InformationStructure,
    Prior, State,
};
use crate::rational::Rational;
pub use crate::scenarios::threshold_problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// More socially valuable.
    S,
    /// Eventually more socially valuable.
    ES,
    /// Weakly more socially valuable.
    W,
    /// Self-comparison `pi >=_S pi`.
    SelfComparison,
}

impl Relation {
    pub fn label(&self) -> &'static str {
        match self {
            Relation::S => "S",
            Relation::ES => "ES",
            Relation::W => "W",
            Relation::SelfComparison => "SELF",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    ProvedBySufficient,
    Refuted,
    Inconclusive,
}

/// What backs a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// A full/no-information mixture between the pair; an exact certificate.
    MixtureCertificate,
    /// Cascade under `pi` pays a constant while the benchmark of `pi'` is
    /// nondecreasing and eventually positive; the gap persists for all
    /// later agents.
    CascadePersistence { first_violation: usize },
    /// Geometric closed forms on both sides; the gap is positive for every
    /// agent from 2 on, unconditionally.
    GeometricPersistence,
    /// Violations observed for every agent in `2..=horizon`; evidence only.
    FiniteHorizon { horizon: usize },
    /// Dominance verified over a generated family of problems; evidence
    /// over the family, not over all decision problems.
    FamilyChecked { problems: usize, horizon: usize },
}

/// A verified witness that some agent strictly prefers the other side.
#[derive(Debug, Clone)]
pub struct CounterexampleBundle {
    pub problem: DecisionProblem,
    /// `r` when the problem is a threshold problem.
    pub threshold: Option<Rational>,
    pub agent: usize,
    /// Value of the exhibited equilibrium under `pi`.
    pub equilibrium_value: Rational,
    /// Benchmark it falls short of (observable-signal value of `pi'`
    /// unless a note says otherwise).
    pub benchmark: Rational,
    pub gap: Rational,
    /// The exhibited equilibrium profile under `pi`; passes
    /// [`verify_equilibrium`].
    pub profile: StrategyProfile,
}

#[derive(Debug, Clone)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub status: Status,
    pub mixture: Option<MixtureCertificate>,
    pub counterexample: Option<CounterexampleBundle>,
    pub evidence: Option<Evidence>,
    pub notes: Vec<String>,
}

impl OrderVerdict {
    fn new(relation: Relation, status: Status) -> Self {
        OrderVerdict {
            relation,
            status,
            mixture: None,
            counterexample: None,
            evidence: None,
            notes: Vec::new(),
        }
    }
}

/// Recovers `r` from a threshold problem, if the problem is one.
pub fn threshold_of(d: &DecisionProblem) -> Option<Rational> {
    if d.num_actions() != 2 {
        return None;
    }
    if !d.payoff(0, State::L).is_zero() || !d.payoff(0, State::H).is_zero() {
        return None;
    }
    let r = -d.payoff(1, State::L);
    if !r.in_unit_interval() || *d.payoff(1, State::H) != Rational::one() - &r {
        return None;
    }
    Some(r)
}

/// Beliefs reachable by at most `horizon` products of single-signal
/// likelihood ratios of the two experiments, starting from the prior,
/// together with 0 and 1.
fn reachable_beliefs(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    cap: usize,
) -> Vec<Rational> {
    let mut ratios: BTreeSet<Rational> = BTreeSet::new();
    for e in [pi, pi_prime] {
        for s in 0..e.num_signals() {
            let l = e.prob(State::L, s);
            let h = e.prob(State::H, s);
            if !l.is_zero() && !h.is_zero() {
                ratios.insert(h / l);
            }
        }
    }
    let mut odds: BTreeSet<Rational> = BTreeSet::new();
    let mut frontier: BTreeSet<Rational> = BTreeSet::new();
    frontier.insert(prior.odds());
    odds.insert(prior.odds());
    for _ in 0..horizon {
        if odds.len() > cap {
            break;
        }
        let mut next = BTreeSet::new();
        for o in &frontier {
            for r in &ratios {
                next.insert(o * r);
            }
        }
        for o in &next {
            odds.insert(o.clone());
        }
        frontier = next;
    }
    let mut beliefs: BTreeSet<Rational> = odds
        .into_iter()
        .map(|o| Prior::belief_from_odds(&o))
        .collect();
    beliefs.insert(Rational::zero());
    beliefs.insert(Rational::one());
    beliefs.into_iter().collect()
}

/// The default refutation family: threshold problems at every reachable
/// belief breakpoint, plus the midpoints of consecutive breakpoints.
pub fn default_problem_family(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Vec<DecisionProblem> {
    let beliefs = reachable_beliefs(pi, pi_prime, prior, horizon, limits.max_problems);
    let mut thresholds: BTreeSet<Rational> = BTreeSet::new();
    for b in &beliefs {
        if !b.is_zero() && !b.is_one() {
            thresholds.insert(b.clone());
        }
    }
    for pair in beliefs.windows(2) {
        thresholds.insert(Rational::midpoint(&pair[0], &pair[1]));
    }
    thresholds
        .into_iter()
        .take(limits.max_problems)
        .map(|r| threshold_problem(&r).expect("grid thresholds lie in [0,1]"))
        .collect()
}

/// Observable-signal benchmark of `d` against precomputed posterior laws.
fn vbar_from_laws(d: &DecisionProblem, laws: &[BeliefDistribution]) -> Vec<Rational> {
    laws.iter()
        .map(|law| {
            law.atoms()
                .iter()
                .map(|(belief, prob)| {
                    let best = (0..d.num_actions())
                        .map(|a| d.expected_payoff(a, belief))
                        .reduce(Rational::max)
                        .unwrap();
                    prob * best
                })
                .sum()
        })
        .collect()
}

fn posterior_laws(
    pi: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Result<Vec<BeliefDistribution>> {
    (1..=horizon)
        .map(|i| iid_power(pi, i as u32, prior, limits.max_atoms))
        .collect()
}

fn make_bundle(
    problem: &DecisionProblem,
    agent: usize,
    eq: &EquilibriumResult,
    benchmark: &Rational,
) -> CounterexampleBundle {
    let value = eq.values[agent - 1].clone();
    CounterexampleBundle {
        problem: problem.clone(),
        threshold: threshold_of(problem),
        agent,
        gap: benchmark - &value,
        equilibrium_value: value,
        benchmark: benchmark.clone(),
        profile: eq.profile.clone(),
    }
}

/// Sufficient condition: a full/no-information mixture Blackwell-sandwiched
/// between the pair proves the strong order outright.
pub fn check_sufficient_social(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
) -> OrderVerdict {
    let mut verdict = OrderVerdict::new(Relation::S, Status::Inconclusive);
    match mixture_exists(pi, pi_prime, prior) {
        Some(cert) => {
            verdict.status = Status::ProvedBySufficient;
            verdict.evidence = Some(Evidence::MixtureCertificate);
            if cert.mixture.degenerate {
                verdict
                    .notes
                    .push("mixture is degenerate (weight 0 or 1); support is a subset of {0, mu0, 1}".into());
            }
            verdict.mixture = Some(cert);
        }
        None => {
            verdict
                .notes
                .push("no full/no-information mixture exists between the pair; the condition is sufficient, not necessary".into());
        }
    }
    verdict
}

struct ConstantRule(usize);

impl ProfileRule for ConstantRule {
    fn decide(
        &self,
        _node: &HistoryNode,
        _signal: usize,
        _posterior: Option<&Rational>,
    ) -> Result<ActionDistribution> {
        Ok(ActionDistribution::pure(self.0))
    }
}

/// Cascade refutation for experiments without unbounded beliefs: an
/// all-safe equilibrium is worth zero forever while repeated draws from
/// `pi_prime` eventually beat the threshold. Returns the bundle and the
/// first violating agent.
fn cascade_refutation(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    limits: &Limits,
) -> Result<Option<(CounterexampleBundle, usize)>> {
    let summary = private_belief_distribution(pi, prior);
    let support = summary.support();
    let one = Rational::one();
    let missing_one = !support.contains(&one);
    let missing_zero = !support.contains(&Rational::zero());
    if !missing_one && !missing_zero {
        return Ok(None);
    }
    // Normalize so that belief 1 is the missing endpoint; otherwise work on
    // the mirrored instance and mirror the problem back.
    let mirrored = !missing_one;
    let (pi_n, pi_prime_n, prior_n) = if mirrored {
        (pi.mirrored(), pi_prime.mirrored(), prior.mirrored())
    } else {
        (pi.clone(), pi_prime.clone(), prior.clone())
    };
    let summary_n = private_belief_distribution(&pi_n, &prior_n);
    let top = summary_n
        .support()
        .into_iter()
        .filter(|b| *b < one)
        .reduce(Rational::max)
        .expect("support has an atom below 1")
        .max(prior_n.mu0().clone());
    let r = Rational::midpoint(&top, &one);

    // Minimal i with a posterior beyond r after i independent draws.
    let lambda = (0..pi_prime_n.num_signals())
        .map(|s| {
            let l = pi_prime_n.prob(State::L, s);
            let h = pi_prime_n.prob(State::H, s);
            if l.is_zero() {
                None // conclusive about H
            } else {
                Some(h / l)
            }
        })
        .reduce(|a, b| match (a, b) {
            (None, _) | (_, None) => None,
            (Some(x), Some(y)) => Some(x.max(y)),
        })
        .expect("experiment has signals");
    let target = &r / (&one - &r);
    let mut agent = 1usize;
    if let Some(lambda) = lambda {
        let mut odds = prior_n.odds() * &lambda;
        while odds <= target {
            agent += 1;
            if agent > 10_000 {
                return Err(Error::ResourceLimit {
                    what: "cascade refutation search depth",
                    cap: 10_000,
                });
            }
            odds *= &lambda;
        }
    }

    let problem_n = threshold_problem(&r)?;
    let problem = if mirrored {
        problem_n.mirrored()
    } else {
        problem_n
    };
    // The all-safe profile is an equilibrium on the original instance and
    // is worth exactly zero for every agent.
    let profile = materialize_rule(&problem, pi, prior, agent, &ConstantRule(0), limits)?;
    let eq = evaluate_profile(&problem, pi, prior, &profile)?;
    debug_assert!(eq.values.iter().all(Rational::is_zero));
    debug_assert!(verify_equilibrium(&problem, pi, prior, &profile)?.is_equilibrium);
    let vbar = observable_signal_value(&problem, pi_prime, prior, agent, limits)?;
    let benchmark = vbar[agent - 1].clone();
    if benchmark <= eq.values[agent - 1] {
        return Err(Error::InternalDisagreement(
            "cascade refutation produced a non-positive benchmark".into(),
        ));
    }
    Ok(Some((make_bundle(&problem, agent, &eq, &benchmark), agent)))
}

/// Necessary condition via the cascade construction: when `pi'` is
/// informative and `pi` lacks unbounded beliefs, the strong order is
/// refuted outright.
pub fn check_necessary_social(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    limits: &Limits,
) -> Result<OrderVerdict> {
    let mut verdict = OrderVerdict::new(Relation::S, Status::Inconclusive);
    if classify(pi_prime, prior).is_no_information {
        verdict
            .notes
            .push("pi' is no information; the necessary condition does not apply".into());
        return Ok(verdict);
    }
    if classify(pi, prior).has_unbounded_beliefs {
        verdict
            .notes
            .push("pi induces unbounded beliefs; the necessary condition is met".into());
        return Ok(verdict);
    }
    let Some((bundle, agent)) = cascade_refutation(pi, pi_prime, prior, limits)? else {
        return Err(Error::InternalDisagreement(
            "bounded beliefs but no missing conclusive endpoint".into(),
        ));
    };
    verdict.status = Status::Refuted;
    verdict.evidence = Some(Evidence::CascadePersistence {
        first_violation: agent,
    });
    verdict.notes.push(format!(
        "all-safe cascade equilibrium under pi is worth 0 for every agent; the benchmark of pi' is positive from agent {agent} on"
    ));
    verdict.counterexample = Some(bundle);
    Ok(verdict)
}

/// Searches a family of decision problems for an equilibrium under `pi`
/// whose value falls below the observable-signal benchmark of `pi'`.
/// Sound for refutation; inconclusive when nothing is found.
pub fn refute_social(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    problems: &[DecisionProblem],
    limits: &Limits,
) -> Result<OrderVerdict> {
    let mut verdict = OrderVerdict::new(Relation::S, Status::Inconclusive);
    let family;
    let problems = if problems.is_empty() {
        family = default_problem_family(pi, pi_prime, prior, horizon, limits);
        &family
    } else {
        problems
    };
    let laws = posterior_laws(pi_prime, prior, horizon, limits)?;
    let mut truncated = false;
    for problem in problems {
        let vbar = vbar_from_laws(problem, &laws);
        let outcome = enumerate_equilibria(problem, pi, prior, horizon, limits)?;
        truncated |= outcome.truncated;
        for i in 1..=horizon {
            for eq in &outcome.equilibria {
                if eq.values[i - 1] < vbar[i - 1] {
                    debug_assert!(
                        verify_equilibrium(problem, pi, prior, &eq.profile)?.is_equilibrium
                    );
                    verdict.status = Status::Refuted;
                    verdict.counterexample =
                        Some(make_bundle(problem, i, eq, &vbar[i - 1]));
                    return Ok(verdict);
                }
            }
        }
    }
    verdict.evidence = Some(Evidence::FamilyChecked {
        problems: problems.len(),
        horizon,
    });
    verdict
        .notes
        .push("no violation found over the family; the search is sound for refutation, not complete for proof".into());
    if truncated {
        verdict
            .notes
            .push("equilibrium enumeration hit its cap on some problems".into());
    }
    Ok(verdict)
}

/// Self-comparison: `pi >=_S pi` iff the support of the private beliefs is
/// contained in `{0, mu0, 1}`. Otherwise an interior atom `x != mu0` gives
/// a threshold between `x` and its double update that every equilibrium
/// fails for agent 2.
pub fn self_social(
    pi: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Result<OrderVerdict> {
    if horizon < 2 {
        return Err(Error::PreconditionViolated(
            "self-comparison refutation needs horizon >= 2".into(),
        ));
    }
    let mut verdict = OrderVerdict::new(Relation::SelfComparison, Status::Inconclusive);
    let classification = classify(pi, prior);
    if classification.is_full_no_mixture {
        let cert = mixture_exists(pi, pi, prior)
            .expect("a full/no mixture compares to itself");
        verdict.status = Status::ProvedBySufficient;
        verdict.evidence = Some(Evidence::MixtureCertificate);
        verdict.mixture = Some(cert);
        return Ok(verdict);
    }

    let summary = private_belief_distribution(pi, prior);
    let above = summary
        .interior_support()
        .into_iter()
        .filter(|b| b > prior.mu0())
        .reduce(Rational::max);
    let problem = match above {
        Some(x) => {
            let x_up = posterior_update(&x, &x, prior)?;
            threshold_problem(&Rational::midpoint(&x, &x_up))?
        }
        None => {
            // Mirror: pick the atom farthest below the prior instead.
            let mirrored = pi.mirrored();
            let prior_m = prior.mirrored();
            let x = private_belief_distribution(&mirrored, &prior_m)
                .interior_support()
                .into_iter()
                .filter(|b| b > prior_m.mu0())
                .reduce(Rational::max)
                .expect("an interior atom away from the prior exists");
            let x_up = posterior_update(&x, &x, &prior_m)?;
            threshold_problem(&Rational::midpoint(&x, &x_up))?.mirrored()
        }
    };

    let laws = posterior_laws(pi, prior, horizon, limits)?;
    let vbar = vbar_from_laws(&problem, &laws);
    let outcome = enumerate_equilibria(&problem, pi, prior, horizon, limits)?;
    for i in 2..=horizon {
        for eq in &outcome.equilibria {
            if eq.values[i - 1] < vbar[i - 1] {
                verdict.status = Status::Refuted;
                verdict.counterexample = Some(make_bundle(&problem, i, eq, &vbar[i - 1]));
                verdict.notes.push(
                    "agents pooling on the interior belief ignore what two such signals would reveal".into(),
                );
                return Ok(verdict);
            }
        }
    }
    Err(Error::InternalDisagreement(
        "support leaves {0, mu0, 1} but the canonical threshold found no violation".into(),
    ))
}

/// Geometric closed-form refutation of the eventual order: under a
/// threshold in the window, every equilibrium value under `pi` follows the
/// cascade form while the benchmark of `pi'` keeps a strictly positive gap
/// for every agent from 2 on.
fn geometric_refutation(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Result<Option<CounterexampleBundle>> {
    let one = Rational::one();
    let summary = private_belief_distribution(pi, prior);
    let summary_prime = private_belief_distribution(pi_prime, prior);
    // p = 1 - pi(mu=1|H): per-agent chance H stays unrevealed under pi.
    let p = &one - &summary.conclusive_h_mass;
    // d' = 1 - pi'(mu=0|L): per-agent chance L stays unrevealed under pi'.
    let d_prime = &one - &summary_prime.conclusive_l_mass;
    if p < d_prime {
        return Ok(None); // gap closes eventually; no unconditional claim
    }
    let lo = summary
        .interior_support()
        .into_iter()
        .reduce(Rational::max)
        .unwrap_or_else(|| prior.mu0().clone())
        .max(prior.mu0().clone());
    let min_interior_prime = summary_prime
        .interior_support()
        .into_iter()
        .reduce(Rational::min)
        .unwrap_or_else(Rational::one);
    // gap_2 > 0 iff r < mu0 p^2 / (mu0 p^2 + (1-mu0) d'^2).
    let wh = prior.mu0() * p.pow(2);
    let wl = prior.complement() * d_prime.pow(2);
    if wh.is_zero() && wl.is_zero() {
        return Ok(None);
    }
    let gap_bound = &wh / (&wh + &wl);
    let hi = min_interior_prime.min(gap_bound).min(Rational::one());
    if lo >= hi {
        return Ok(None);
    }
    let r = Rational::midpoint(&lo, &hi);
    let problem = threshold_problem(&r)?;

    // Cross-check the closed forms against the engine over the horizon.
    let outcome = enumerate_equilibria(&problem, pi, prior, horizon, limits)?;
    let vbar = observable_signal_value(&problem, pi_prime, prior, horizon, limits)?;
    for i in 2..=horizon {
        let cascade =
            crate::scenarios::cascade_value_oracle(&problem, pi, prior, i)?;
        let vbar_formula = prior.mu0() * (&one - &r)
            - prior.complement() * d_prime.pow(i as u32) * &r;
        if vbar[i - 1] != vbar_formula {
            return Err(Error::InternalDisagreement(format!(
                "benchmark closed form mismatch at agent {i}"
            )));
        }
        for eq in &outcome.equilibria {
            if eq.values[i - 1] != cascade {
                return Err(Error::InternalDisagreement(format!(
                    "cascade closed form mismatch at agent {i}"
                )));
            }
        }
        if vbar[i - 1] <= cascade {
            return Err(Error::InternalDisagreement(format!(
                "geometric gap fails at agent {i} despite the window"
            )));
        }
    }
    let eq = &outcome.equilibria[0];
    Ok(Some(make_bundle(&problem, 2, eq, &vbar[1])))
}

/// Refutes the eventual order when possible: by the cascade construction,
/// by the geometric closed form (both unconditional), or by finite-horizon
/// evidence of violations at every agent in `2..=horizon`.
pub fn refute_eventual(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Result<OrderVerdict> {
    if horizon < 2 {
        return Err(Error::PreconditionViolated(
            "eventual-order refutation needs horizon >= 2".into(),
        ));
    }
    let mut verdict = OrderVerdict::new(Relation::ES, Status::Inconclusive);

    if !classify(pi_prime, prior).is_no_information
        && !classify(pi, prior).has_unbounded_beliefs
    {
        if let Some((bundle, agent)) = cascade_refutation(pi, pi_prime, prior, limits)? {
            verdict.status = Status::Refuted;
            verdict.evidence = Some(Evidence::CascadePersistence {
                first_violation: agent,
            });
            verdict.notes.push(
                "cascade value is constant while the benchmark is nondecreasing; the violation persists for all later agents".into(),
            );
            verdict.counterexample = Some(bundle);
            return Ok(verdict);
        }
    }

    if let Some(bundle) = geometric_refutation(pi, pi_prime, prior, horizon, limits)? {
        verdict.status = Status::Refuted;
        verdict.evidence = Some(Evidence::GeometricPersistence);
        verdict.notes.push(
            "gap = mu0 p^i (1-r) - (1-mu0) d'^i r stays positive for every agent i >= 2".into(),
        );
        verdict.counterexample = Some(bundle);
        return Ok(verdict);
    }

    // Finite-horizon evidence: some problem where every agent in
    // 2..=horizon has a violating equilibrium.
    let family = default_problem_family(pi, pi_prime, prior, horizon, limits);
    let laws = posterior_laws(pi_prime, prior, horizon, limits)?;
    for problem in &family {
        let vbar = vbar_from_laws(problem, &laws);
        let outcome = enumerate_equilibria(problem, pi, prior, horizon, limits)?;
        let mut witnesses = Vec::new();
        for i in 2..=horizon {
            let worst = outcome
                .equilibria
                .iter()
                .min_by(|a, b| a.values[i - 1].cmp(&b.values[i - 1]))
                .unwrap();
            if worst.values[i - 1] < vbar[i - 1] {
                witnesses.push((i, worst));
            } else {
                break;
            }
        }
        if witnesses.len() == horizon - 1 {
            let (i, eq) = witnesses.last().unwrap();
            verdict.status = Status::Refuted;
            verdict.evidence = Some(Evidence::FiniteHorizon { horizon });
            verdict.notes.push(format!(
                "violations at every agent in 2..={horizon}; persistence beyond the horizon not proved"
            ));
            verdict.counterexample = Some(make_bundle(problem, *i, eq, &vbar[i - 1]));
            return Ok(verdict);
        }
    }
    verdict
        .notes
        .push("no persistent violation found over the family".into());
    verdict.evidence = Some(Evidence::FamilyChecked {
        problems: family.len(),
        horizon,
    });
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Group {
    ConclusiveL,
    ConclusiveH,
    Interior,
}

fn signal_groups(pi: &InformationStructure, prior: &Prior) -> Vec<Group> {
    private_belief_distribution(pi, prior)
        .beliefs
        .iter()
        .map(|b| {
            if b.is_zero() {
                Group::ConclusiveL
            } else if b.is_one() {
                Group::ConclusiveH
            } else {
                Group::Interior
            }
        })
        .collect()
}

/// Case (ii) of the three-support construction: pool the interior signal
/// with the conclusive-L one until someone deviates.
struct CascadeCaseRule {
    a0: usize,
    b1: usize,
    groups: Vec<Group>,
}

impl ProfileRule for CascadeCaseRule {
    fn decide(
        &self,
        node: &HistoryNode,
        signal: usize,
        _posterior: Option<&Rational>,
    ) -> Result<ActionDistribution> {
        let act = match self.groups[signal] {
            Group::ConclusiveL => self.a0,
            Group::ConclusiveH => self.b1,
            Group::Interior => {
                if node.action_sequence.iter().all(|&a| a == self.a0) {
                    self.a0
                } else {
                    self.b1
                }
            }
        };
        Ok(ActionDistribution::pure(act))
    }
}

/// Case (iii): reveal the interior signal through a chain of distinct
/// actions so the history stays as informative as the signals themselves.
struct ChainCaseRule {
    a0: usize,
    b1: usize,
    chain: Vec<usize>,
    groups: Vec<Group>,
}

impl ProfileRule for ChainCaseRule {
    fn decide(
        &self,
        node: &HistoryNode,
        signal: usize,
        _posterior: Option<&Rational>,
    ) -> Result<ActionDistribution> {
        let seq = &node.action_sequence;
        let act = match self.groups[signal] {
            Group::ConclusiveL => self.a0,
            _ if seq.contains(&self.a0) => self.a0,
            Group::ConclusiveH => self.b1,
            Group::Interior => {
                if seq.iter().zip(&self.chain).all(|(a, c)| a == c) {
                    self.chain[node.depth]
                } else {
                    *seq.last().expect("root is always a chain prefix")
                }
            }
        };
        Ok(ActionDistribution::pure(act))
    }
}

/// Builds the dominating three-support equilibrium under `pi` for a given
/// problem,
/// assuming `supp mu` is `{0, x, 1}` (or degenerate). Mirrors the instance
/// when the interior atom lies below the prior.
fn construct_weak_profile(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Result<StrategyProfile> {
    let summary = private_belief_distribution(pi, prior);
    let interior = summary.interior_support();
    let x = match interior.as_slice() {
        [] => {
            // Full information: every equilibrium attains the benchmark.
            return Ok(compute_equilibrium(
                d,
                pi,
                prior,
                horizon,
                &TieBreakPolicy::FirstInActionOrder,
                limits,
            )?
            .profile);
        }
        [x] => x.clone(),
        _ => {
            return Err(Error::PreconditionViolated(
                "construction needs at most one interior belief atom".into(),
            ))
        }
    };
    if x == *prior.mu0() {
        // A full/no mixture: every equilibrium attains the benchmark.
        return Ok(compute_equilibrium(
            d,
            pi,
            prior,
            horizon,
            &TieBreakPolicy::FirstInActionOrder,
            limits,
        )?
        .profile);
    }
    if x < *prior.mu0() {
        // The construction on the mirrored instance uses the same signal
        // and action indices, so its profile transfers verbatim.
        return construct_weak_profile(
            &d.mirrored(),
            &pi.mirrored(),
            &prior.mirrored(),
            horizon,
            limits,
        );
    }

    let groups = signal_groups(pi, prior);
    let at_zero = best_response_set(d, &Rational::zero());
    let at_one = best_response_set(d, &Rational::one());
    let at_x = best_response_set(d, &x);

    // Case (i): one action is optimal at both endpoints, hence everywhere.
    if let Some(&a_star) = at_zero.iter().find(|a| at_one.contains(a)) {
        return materialize_rule(d, pi, prior, horizon, &ConstantRule(a_star), limits);
    }

    // Case (ii): the safe action is uniquely optimal on [0, x] and the
    // interior signal pools with it.
    let disjoint = !at_one.iter().any(|a| at_x.contains(a));
    if disjoint && at_zero.len() == 1 && at_zero == at_x {
        let rule = CascadeCaseRule {
            a0: at_zero[0],
            b1: at_one[0],
            groups,
        };
        return materialize_rule(d, pi, prior, horizon, &rule, limits);
    }

    // Case (iii): pick a0 in B^-1(0) that is nowhere uniquely optimal on
    // [x, 1], and reveal the interior signal through a chain.
    let covered_by_others = |a0: usize| -> bool {
        let mut intervals: Vec<(Rational, Rational)> = (0..d.num_actions())
            .filter(|&b| b != a0)
            .filter_map(|b| best_action_interval(d, b))
            .filter(|(_, hi)| *hi >= x)
            .collect();
        intervals.sort();
        let mut cur = x.clone();
        for (lo, hi) in intervals {
            if lo > cur {
                return false;
            }
            if hi > cur {
                cur = hi;
            }
        }
        cur >= Rational::one()
    };
    let a0 = at_zero
        .iter()
        .copied()
        .find(|&a| covered_by_others(a))
        .ok_or_else(|| {
            Error::InternalDisagreement(
                "case (iii) admits no safe action covered by others on [x,1]".into(),
            )
        })?;
    let b1 = at_one[0];
    let mut chain = Vec::with_capacity(horizon);
    let mut odds = &x / (Rational::one() - &x);
    let step = &odds / prior.odds();
    for _ in 0..horizon {
        let belief = Prior::belief_from_odds(&odds);
        let best = best_response_set(d, &belief);
        let pick = best
            .iter()
            .copied()
            .find(|&a| a != a0 && a != b1)
            .unwrap_or(b1);
        chain.push(pick);
        odds *= &step;
    }
    let rule = ChainCaseRule {
        a0,
        b1,
        chain,
        groups,
    };
    materialize_rule(d, pi, prior, horizon, &rule, limits)
}

/// Three-support check for the weak order: requires `supp mu = {0, x, 1}`
/// with the interior atom at least as far from the prior as every interior
/// atom of `pi'`, and `pi >=_B pi'`. Verifies, over the problem family,
/// that the constructed equilibrium under `pi` dominates every enumerated
/// equilibrium under `pi'`.
pub fn check_weak_3support(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    problems: &[DecisionProblem],
    limits: &Limits,
) -> Result<OrderVerdict> {
    let mut verdict = OrderVerdict::new(Relation::W, Status::Inconclusive);
    let summary = private_belief_distribution(pi, prior);
    let support = summary.support();
    if !support.contains(&Rational::zero()) || !support.contains(&Rational::one()) {
        return Err(Error::PreconditionViolated(
            "support must contain both conclusive beliefs".into(),
        ));
    }
    let interior = summary.interior_support();
    if interior.len() > 1 {
        return Err(Error::PreconditionViolated(
            "support must be {0, x, 1} with a single interior atom".into(),
        ));
    }
    // Distance hypothesis: |mu0 - x| >= |mu0 - y| for interior y of pi'.
    let distance = |b: &Rational| {
        if b >= prior.mu0() {
            b - prior.mu0()
        } else {
            prior.mu0() - b
        }
    };
    let x_distance = match interior.first() {
        Some(x) => distance(x),
        // Degenerate support {0,1}: treat x as the farther endpoint.
        None => distance(&Rational::zero()).max(distance(&Rational::one())),
    };
    let prime_summary = private_belief_distribution(pi_prime, prior);
    for y in prime_summary.interior_support() {
        if distance(&y) > x_distance {
            return Err(Error::PreconditionViolated(format!(
                "interior belief {y} of pi' lies farther from the prior than x"
            )));
        }
    }
    if !blackwell_geq(pi, pi_prime) {
        verdict
            .notes
            .push("pi does not Blackwell-dominate pi'; the three-support condition does not apply".into());
        return Ok(verdict);
    }

    let family;
    let problems = if problems.is_empty() {
        family = default_problem_family(pi, pi_prime, prior, horizon, limits);
        &family
    } else {
        problems
    };
    let mut truncated = false;
    for problem in problems {
        let constructed = construct_weak_profile(problem, pi, prior, horizon, limits)?;
        let check = verify_equilibrium(problem, pi, prior, &constructed)?;
        if !check.is_equilibrium {
            return Err(Error::InternalDisagreement(format!(
                "constructed profile is not an equilibrium at {:?}",
                check.violation
            )));
        }
        let ours = evaluate_profile(problem, pi, prior, &constructed)?;
        let outcome = enumerate_equilibria(problem, pi_prime, prior, horizon, limits)?;
        truncated |= outcome.truncated;
        for theirs in &outcome.equilibria {
            for i in 1..=horizon {
                if ours.values[i - 1] < theirs.values[i - 1] {
                    return Err(Error::InternalDisagreement(format!(
                        "constructed equilibrium is dominated at agent {i}"
                    )));
                }
            }
        }
    }
    verdict.status = Status::ProvedBySufficient;
    verdict.evidence = Some(Evidence::FamilyChecked {
        problems: problems.len(),
        horizon,
    });
    verdict.notes.push(
        "dominating equilibrium constructed and verified over the family; evidence over the family, not all problems".into(),
    );
    if truncated {
        verdict
            .notes
            .push("equilibrium enumeration hit its cap on some problems".into());
    }
    Ok(verdict)
}

/// Weak-order refutation by exhaustion over pure tie resolutions: a
/// problem and an equilibrium under `pi'` that no enumerated equilibrium
/// under `pi` dominates. Mixed-strategy equilibria are out of scope, so
/// this is evidence, not proof.
fn refute_weak(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    problems: &[DecisionProblem],
    limits: &Limits,
) -> Result<Option<(CounterexampleBundle, usize)>> {
    for problem in problems {
        let ours = enumerate_equilibria(problem, pi, prior, horizon, limits)?;
        if ours.truncated {
            continue; // cannot quantify over all pure resolutions
        }
        let theirs = enumerate_equilibria(problem, pi_prime, prior, horizon, limits)?;
        for target in &theirs.equilibria {
            let dominated_somewhere = |eq: &EquilibriumResult| {
                (1..=horizon).find(|&i| eq.values[i - 1] < target.values[i - 1])
            };
            if ours.equilibria.iter().all(|eq| dominated_somewhere(eq).is_some()) {
                let eq = &ours.equilibria[0];
                let i = dominated_somewhere(eq).unwrap();
                return Ok(Some((
                    make_bundle(problem, i, eq, &target.values[i - 1]),
                    theirs.equilibria.len(),
                )));
            }
        }
    }
    Ok(None)
}

/// Full decision flow per relation, used by the CLI: sufficient condition
/// first, then relation-specific checks, then refutation searches.
pub fn decide(
    relation: Relation,
    pi: &InformationStructure,
    pi_prime: Option<&InformationStructure>,
    prior: &Prior,
    horizon: usize,
    problems: &[DecisionProblem],
    limits: &Limits,
) -> Result<OrderVerdict> {
    let need_prime = || {
        pi_prime.ok_or_else(|| {
            Error::PreconditionViolated(format!(
                "relation {} compares two experiments; pass --piprime",
                relation.label()
            ))
        })
    };
    match relation {
        Relation::SelfComparison => self_social(pi, prior, horizon.max(2), limits),
        Relation::S => {
            let pi_prime = need_prime()?;
            let sufficient = check_sufficient_social(pi, pi_prime, prior);
            if sufficient.status == Status::ProvedBySufficient {
                return Ok(sufficient);
            }
            let necessary = check_necessary_social(pi, pi_prime, prior, limits)?;
            if necessary.status == Status::Refuted {
                return Ok(necessary);
            }
            let mut searched = refute_social(pi, pi_prime, prior, horizon, problems, limits)?;
            searched.notes.extend(sufficient.notes);
            searched.notes.extend(necessary.notes);
            Ok(searched)
        }
        Relation::ES => {
            let pi_prime = need_prime()?;
            let mut sufficient = check_sufficient_social(pi, pi_prime, prior);
            if sufficient.status == Status::ProvedBySufficient {
                sufficient.relation = Relation::ES;
                return Ok(sufficient);
            }
            let mut verdict =
                refute_eventual(pi, pi_prime, prior, horizon.max(2), limits)?;
            verdict.notes.extend(sufficient.notes);
            Ok(verdict)
        }
        Relation::W => {
            let pi_prime = need_prime()?;
            let mut sufficient = check_sufficient_social(pi, pi_prime, prior);
            if sufficient.status == Status::ProvedBySufficient {
                sufficient.relation = Relation::W;
                sufficient
                    .notes
                    .push("the strong order implies the weak one".into());
                return Ok(sufficient);
            }
            let mut notes = sufficient.notes;
            match check_weak_3support(pi, pi_prime, prior, horizon, problems, limits) {
                Ok(verdict) if verdict.status == Status::ProvedBySufficient => {
                    return Ok(verdict)
                }
                Ok(verdict) => notes.extend(verdict.notes),
                Err(Error::PreconditionViolated(msg)) => {
                    notes.push(format!("three-support hypothesis fails: {msg}"));
                }
                Err(e) => return Err(e),
            }
            let family;
            let search_problems = if problems.is_empty() {
                family = default_problem_family(pi, pi_prime, prior, horizon, limits);
                &family
            } else {
                problems
            };
            let mut verdict = OrderVerdict::new(Relation::W, Status::Inconclusive);
            verdict.notes = notes;
            if let Some((bundle, count)) =
                refute_weak(pi, pi_prime, prior, horizon, search_problems, limits)?
            {
                verdict.status = Status::Refuted;
                verdict.evidence = Some(Evidence::FiniteHorizon { horizon });
                verdict.notes.push(format!(
                    "an equilibrium under pi' dominates all pure tie resolutions under pi ({count} equilibria under pi'); mixed resolutions not covered; benchmark is that equilibrium's value"
                ));
                verdict.counterexample = Some(bundle);
            }
            Ok(verdict)
        }
    }
}
