//! Bayes-Nash equilibria of the sequential observational-learning game.
//!
//! Payoffs have no externalities, so a profile is an equilibrium exactly
//! when every on-path decision is pointwise optimal at the agent's exact
//! posterior. That makes forward induction on the pruned history tree
//! sufficient: walk agents in order, keep per-state likelihoods of every
//! surviving action history, and decide each (history, signal) site at its
//! posterior. Zero-probability sites (where the posterior is
//! indeterminate) receive the action optimal at the prior; behavior there
//! cannot affect the equilibrium property or any value.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{
    best_response_set, iid_power, posterior_update, private_belief_distribution,
    DecisionProblem, InformationStructure, Prior, State,
};
use crate::model::BeliefDistribution;
use crate::rational::Rational;

pub const DEFAULT_NODE_CAP: usize = 2_000_000;
pub const DEFAULT_ENUMERATION_CAP: usize = 256;

pub const DEFAULT_PROBLEM_CAP: usize = 400;

/// Caps for tree size, posterior atoms, equilibrium enumeration, and the
/// size of generated decision-problem families.
#[derive(Debug, Clone)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_atoms: usize,
    pub max_equilibria: usize,
    pub max_problems: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: DEFAULT_NODE_CAP,
            max_atoms: crate::model::DEFAULT_ATOM_CAP,
            max_equilibria: DEFAULT_ENUMERATION_CAP,
            max_problems: DEFAULT_PROBLEM_CAP,
        }
    }
}

/// How to resolve indifference at a decision site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TieBreakPolicy {
    FirstInActionOrder,
    /// A permutation of the action indices; the earliest optimal action in
    /// the list wins.
    PreferenceList(Vec<usize>),
    /// Marker used by run configurations to request full enumeration; not
    /// accepted by [`compute_equilibrium`] itself.
    EnumerateAll { cap: usize },
}

impl TieBreakPolicy {
    fn pick(&self, best: &[usize]) -> Result<usize> {
        match self {
            TieBreakPolicy::FirstInActionOrder => Ok(best[0]),
            TieBreakPolicy::PreferenceList(order) => order
                .iter()
                .copied()
                .find(|a| best.contains(a))
                .ok_or_else(|| {
                    Error::PreconditionViolated(
                        "preference list does not cover the best-response set".into(),
                    )
                }),
            TieBreakPolicy::EnumerateAll { .. } => Err(Error::PreconditionViolated(
                "compute_equilibrium requires a deterministic tie-break policy".into(),
            )),
        }
    }

    fn validate(&self, num_actions: usize) -> Result<()> {
        if let TieBreakPolicy::PreferenceList(order) = self {
            let mut seen = vec![false; num_actions];
            for &a in order {
                if a >= num_actions || seen[a] {
                    return Err(Error::PreconditionViolated(
                        "preference list must be a permutation of the action set".into(),
                    ));
                }
                seen[a] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::PreconditionViolated(
                    "preference list must cover every action".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A probability distribution over actions, sparse and sorted by action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDistribution {
    entries: Vec<(usize, Rational)>,
}

impl ActionDistribution {
    pub fn pure(action: usize) -> Self {
        ActionDistribution {
            entries: vec![(action, Rational::one())],
        }
    }

    pub fn mixed(entries: Vec<(usize, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (a, p) in entries {
            if p.is_negative() {
                return Err(Error::InvalidInstance(format!(
                    "negative action probability {p}"
                )));
            }
            if p.is_zero() {
                continue;
            }
            *merged.entry(a).or_insert_with(Rational::zero) += p;
        }
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidInstance(format!(
                "action probabilities sum to {total}, expected 1"
            )));
        }
        Ok(ActionDistribution {
            entries: merged.into_iter().collect(),
        })
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(a, _)| *a)
    }

    pub fn is_pure(&self) -> bool {
        self.entries.len() == 1
    }
}

/// A realized action history with its per-state likelihoods.
#[derive(Debug, Clone)]
pub struct HistoryNode {
    pub action_sequence: Vec<usize>,
    pub likelihood_h: Rational,
    pub likelihood_l: Rational,
    pub depth: usize,
}

impl HistoryNode {
    /// Public belief at this node; surviving nodes always have positive
    /// total weight.
    pub fn public_belief(&self, prior: &Prior) -> Rational {
        let wh = prior.mu0() * &self.likelihood_h;
        let wl = prior.complement() * &self.likelihood_l;
        let total = &wh + &wl;
        wh / total
    }
}

/// A strategy profile materialized on its own reachable history tree:
/// a decision for every surviving node and every signal up to the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    horizon: usize,
    decisions: BTreeMap<Vec<usize>, Vec<ActionDistribution>>,
}

impl StrategyProfile {
    pub fn new(horizon: usize) -> Self {
        StrategyProfile {
            horizon,
            decisions: BTreeMap::new(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn insert(&mut self, node: Vec<usize>, per_signal: Vec<ActionDistribution>) {
        self.decisions.insert(node, per_signal);
    }

    pub fn decision(&self, node: &[usize], signal: usize) -> Option<&ActionDistribution> {
        self.decisions.get(node).and_then(|v| v.get(signal))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.decisions.keys()
    }

    /// JSON form: node path (comma-joined action labels) -> signal label ->
    /// action label -> probability.
    pub fn to_json(&self, d: &DecisionProblem, pi: &InformationStructure) -> Value {
        let mut nodes = Map::new();
        for (seq, per_signal) in &self.decisions {
            let key = seq
                .iter()
                .map(|&a| d.actions()[a].clone())
                .collect::<Vec<_>>()
                .join(",");
            let mut signals = Map::new();
            for (s, dist) in per_signal.iter().enumerate() {
                let mut actions = Map::new();
                for (a, p) in dist.entries() {
                    actions.insert(d.actions()[*a].clone(), json!(p.to_string()));
                }
                signals.insert(pi.signals()[s].clone(), Value::Object(actions));
            }
            nodes.insert(key, Value::Object(signals));
        }
        json!({
            "schema": "v1",
            "horizon": self.horizon,
            "decisions": Value::Object(nodes),
        })
    }

    pub fn from_json(
        value: &Value,
        d: &DecisionProblem,
        pi: &InformationStructure,
    ) -> Result<StrategyProfile> {
        let horizon = value
            .get("horizon")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("profile is missing an integer horizon".into()))?
            as usize;
        let nodes = value
            .get("decisions")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("profile is missing a decisions object".into()))?;
        let mut profile = StrategyProfile::new(horizon);
        for (key, signals) in nodes {
            let seq: Vec<usize> = if key.is_empty() {
                Vec::new()
            } else {
                key.split(',')
                    .map(|label| {
                        d.action_index(label).ok_or_else(|| {
                            Error::Parse(format!("unknown action label {label:?} in node path"))
                        })
                    })
                    .collect::<Result<_>>()?
            };
            let signals = signals
                .as_object()
                .ok_or_else(|| Error::Parse(format!("node {key:?} is not an object")))?;
            let mut per_signal = Vec::with_capacity(pi.num_signals());
            for s in pi.signals() {
                let dist = signals.get(s).ok_or_else(|| Error::ProfileIncomplete {
                    node: key.clone(),
                    signal: s.clone(),
                })?;
                let dist = dist
                    .as_object()
                    .ok_or_else(|| Error::Parse(format!("decision at {key:?}/{s} not an object")))?;
                let mut entries = Vec::new();
                for (label, prob) in dist {
                    let a = d.action_index(label).ok_or_else(|| {
                        Error::Parse(format!("unknown action label {label:?}"))
                    })?;
                    let p: Rational = prob
                        .as_str()
                        .ok_or_else(|| Error::Parse("probabilities must be strings".into()))?
                        .parse()?;
                    entries.push((a, p));
                }
                per_signal.push(ActionDistribution::mixed(entries)?);
            }
            profile.insert(seq, per_signal);
        }
        Ok(profile)
    }
}

/// A rule that can decide any (node, signal) site; used to materialize
/// constructed profiles (imitation, hybrids, revealing augmentations).
pub trait ProfileRule {
    /// `posterior` is `None` exactly at zero-probability sites.
    fn decide(
        &self,
        node: &HistoryNode,
        signal: usize,
        posterior: Option<&Rational>,
    ) -> Result<ActionDistribution>;
}

/// Values, per-agent action laws, and diagnostics for a profile.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub profile: StrategyProfile,
    /// `values[i-1]` is agent i's ex-ante expected payoff.
    pub values: Vec<Rational>,
    /// `action_laws_h[i-1][a]` is the probability agent i plays `a` in H.
    pub action_laws_h: Vec<Vec<Rational>>,
    pub action_laws_l: Vec<Vec<Rational>>,
    /// On-path sites where the best-response set was not a singleton (when
    /// computing), or where the profile mixes (when evaluating).
    pub tie_sites: usize,
    /// Zero-likelihood branches dropped while building the tree.
    pub pruned_nodes: usize,
    /// Surviving nodes across all depths.
    pub node_count: usize,
}

/// Result of enumerating pure tie resolutions.
#[derive(Debug)]
pub struct EnumerationOutcome {
    pub equilibria: Vec<EquilibriumResult>,
    /// True when the cap stopped the enumeration early.
    pub truncated: bool,
}

/// Outcome of checking a profile for the equilibrium property.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub is_equilibrium: bool,
    pub violation: Option<Violation>,
}

/// Witness of a profitable deviation at a positive-probability site.
#[derive(Debug, Clone)]
pub struct Violation {
    pub node: Vec<usize>,
    pub signal: usize,
    pub chosen: usize,
    pub better: usize,
    pub posterior: Rational,
}

struct Ctx<'a> {
    d: &'a DecisionProblem,
    pi: &'a InformationStructure,
    prior: &'a Prior,
    beliefs: Vec<Rational>,
}

impl<'a> Ctx<'a> {
    fn new(d: &'a DecisionProblem, pi: &'a InformationStructure, prior: &'a Prior) -> Self {
        let beliefs = private_belief_distribution(pi, prior).beliefs;
        Ctx {
            d,
            pi,
            prior,
            beliefs,
        }
    }

    fn site_posterior(&self, node: &HistoryNode, signal: usize) -> Option<Rational> {
        let public = node.public_belief(self.prior);
        match posterior_update(&public, &self.beliefs[signal], self.prior) {
            Ok(q) => Some(q),
            Err(Error::IndeterminatePosterior { .. }) => None,
            Err(e) => unreachable!("posterior_update cannot fail otherwise: {e}"),
        }
    }
}

/// Decision callback: node, signal index, posterior (None at
/// zero-probability sites).
type DecideFn<'a> =
    dyn FnMut(&HistoryNode, usize, Option<&Rational>) -> Result<ActionDistribution> + 'a;

struct RunOutput {
    profile: StrategyProfile,
    values: Vec<Rational>,
    action_laws_h: Vec<Vec<Rational>>,
    action_laws_l: Vec<Vec<Rational>>,
    levels: Vec<Vec<HistoryNode>>,
    tie_sites: usize,
    pruned_nodes: usize,
    node_count: usize,
}

/// Forward pass over the surviving history tree, deciding every site with
/// `decide` in canonical order (depth, node, signal).
fn run_forward(
    ctx: &Ctx,
    horizon: usize,
    limits: &Limits,
    decide: &mut DecideFn,
) -> Result<RunOutput> {
    if horizon == 0 {
        return Err(Error::PreconditionViolated("horizon must be at least 1".into()));
    }
    let na = ctx.d.num_actions();
    let ns = ctx.pi.num_signals();
    let mut profile = StrategyProfile::new(horizon);
    let mut values = Vec::with_capacity(horizon);
    let mut laws_h = Vec::with_capacity(horizon);
    let mut laws_l = Vec::with_capacity(horizon);
    let mut levels = vec![vec![HistoryNode {
        action_sequence: Vec::new(),
        likelihood_h: Rational::one(),
        likelihood_l: Rational::one(),
        depth: 0,
    }]];
    let mut tie_sites = 0usize;
    let mut pruned = 0usize;
    let mut node_count = 1usize;

    for depth in 0..horizon {
        let mut value = Rational::zero();
        let mut law_h = vec![Rational::zero(); na];
        let mut law_l = vec![Rational::zero(); na];
        let mut next_level: Vec<HistoryNode> = Vec::new();
        for node in &levels[depth] {
            let mut child_h = vec![Rational::zero(); na];
            let mut child_l = vec![Rational::zero(); na];
            let mut touched = vec![false; na];
            let mut per_signal = Vec::with_capacity(ns);
            for s in 0..ns {
                let posterior = ctx.site_posterior(node, s);
                let dist = decide(node, s, posterior.as_ref())?;
                if !dist.is_pure() {
                    tie_sites += 1;
                }
                let wh = &node.likelihood_h * ctx.pi.prob(State::H, s);
                let wl = &node.likelihood_l * ctx.pi.prob(State::L, s);
                for (a, p) in dist.entries() {
                    touched[*a] = true;
                    let ph = &wh * p;
                    let pl = &wl * p;
                    value += ctx.prior.mu0() * &ph * ctx.d.payoff(*a, State::H)
                        + ctx.prior.complement() * &pl * ctx.d.payoff(*a, State::L);
                    law_h[*a] += &ph;
                    law_l[*a] += &pl;
                    child_h[*a] += ph;
                    child_l[*a] += pl;
                }
                per_signal.push(dist);
            }
            profile.insert(node.action_sequence.clone(), per_signal);
            for a in 0..na {
                if !touched[a] {
                    continue;
                }
                if child_h[a].is_zero() && child_l[a].is_zero() {
                    pruned += 1;
                    continue;
                }
                let mut seq = node.action_sequence.clone();
                seq.push(a);
                next_level.push(HistoryNode {
                    action_sequence: seq,
                    likelihood_h: std::mem::replace(&mut child_h[a], Rational::zero()),
                    likelihood_l: std::mem::replace(&mut child_l[a], Rational::zero()),
                    depth: depth + 1,
                });
            }
        }
        node_count += next_level.len();
        if node_count > limits.max_nodes {
            return Err(Error::ResourceLimit {
                what: "history nodes",
                cap: limits.max_nodes,
            });
        }
        values.push(value);
        laws_h.push(law_h);
        laws_l.push(law_l);
        levels.push(next_level);
    }

    Ok(RunOutput {
        profile,
        values,
        action_laws_h: laws_h,
        action_laws_l: laws_l,
        levels,
        tie_sites,
        pruned_nodes: pruned,
        node_count,
    })
}

fn result_from(output: RunOutput) -> EquilibriumResult {
    EquilibriumResult {
        profile: output.profile,
        values: output.values,
        action_laws_h: output.action_laws_h,
        action_laws_l: output.action_laws_l,
        tie_sites: output.tie_sites,
        pruned_nodes: output.pruned_nodes,
        node_count: output.node_count,
    }
}

/// Computes the Bayes-Nash equilibrium selected by the tie-break policy,
/// by forward induction in agent order.
pub fn compute_equilibrium(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    tiebreak: &TieBreakPolicy,
    limits: &Limits,
) -> Result<EquilibriumResult> {
    if matches!(tiebreak, TieBreakPolicy::EnumerateAll { .. }) {
        return Err(Error::PreconditionViolated(
            "compute_equilibrium requires FirstInActionOrder or PreferenceList".into(),
        ));
    }
    tiebreak.validate(d.num_actions())?;
    let ctx = Ctx::new(d, pi, prior);
    let prior_best = best_response_set(d, prior.mu0());
    let off_path = tiebreak.pick(&prior_best)?;
    let mut memo: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    let mut ties = 0usize;
    let mut rule = |_node: &HistoryNode, _s: usize, posterior: Option<&Rational>| match posterior {
        Some(q) => {
            let best = memo
                .entry(q.clone())
                .or_insert_with(|| best_response_set(d, q));
            if best.len() > 1 {
                ties += 1;
            }
            Ok(ActionDistribution::pure(tiebreak.pick(best)?))
        }
        None => Ok(ActionDistribution::pure(off_path)),
    };
    let output = run_forward(&ctx, horizon, limits, &mut rule)?;
    let mut result = result_from(output);
    result.tie_sites = ties;
    Ok(result)
}

/// Enumerates the equilibria obtained by resolving each on-path tie to a
/// pure action, depth-first over the tie sites in canonical order. Mixed
/// resolutions are not enumerated; the truncation flag reports when the
/// cap was hit.
pub fn enumerate_equilibria(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Result<EnumerationOutcome> {
    if limits.max_equilibria == 0 {
        return Err(Error::PreconditionViolated("enumeration cap must be positive".into()));
    }
    let ctx = Ctx::new(d, pi, prior);
    let prior_best = best_response_set(d, prior.mu0());
    let off_path = prior_best[0];
    let mut memo: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    let mut equilibria = Vec::new();
    let mut choices: Vec<usize> = Vec::new();
    let mut options: Vec<usize> = Vec::new();

    loop {
        let mut cursor = 0usize;
        let mut ties = 0usize;
        {
            let choices = &mut choices;
            let options = &mut options;
            let memo = &mut memo;
            let mut rule =
                |_node: &HistoryNode, _s: usize, posterior: Option<&Rational>| match posterior {
                    Some(q) => {
                        let best = memo
                            .entry(q.clone())
                            .or_insert_with(|| best_response_set(d, q));
                        if best.len() == 1 {
                            return Ok(ActionDistribution::pure(best[0]));
                        }
                        ties += 1;
                        if cursor == choices.len() {
                            choices.push(0);
                            options.push(best.len());
                        }
                        let pick = best[choices[cursor]];
                        cursor += 1;
                        Ok(ActionDistribution::pure(pick))
                    }
                    None => Ok(ActionDistribution::pure(off_path)),
                };
            let output = run_forward(&ctx, horizon, limits, &mut rule)?;
            let mut result = result_from(output);
            result.tie_sites = ties;
            equilibria.push(result);
        }
        if equilibria.len() >= limits.max_equilibria {
            // Anything left to explore?
            let truncated = choices
                .iter()
                .zip(&options)
                .any(|(c, o)| c + 1 < *o);
            return Ok(EnumerationOutcome {
                equilibria,
                truncated,
            });
        }
        // Odometer step: bump the deepest site with room, drop the rest.
        let mut advanced = false;
        while let Some(last) = choices.len().checked_sub(1) {
            if choices[last] + 1 < options[last] {
                choices[last] += 1;
                advanced = true;
                break;
            }
            choices.pop();
            options.pop();
        }
        if !advanced {
            return Ok(EnumerationOutcome {
                equilibria,
                truncated: false,
            });
        }
    }
}

/// Evaluates an arbitrary profile exactly; no optimality is required.
pub fn evaluate_profile(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    profile: &StrategyProfile,
) -> Result<EquilibriumResult> {
    let ctx = Ctx::new(d, pi, prior);
    let limits = Limits::default();
    let mut rule = |node: &HistoryNode, s: usize, _posterior: Option<&Rational>| {
        profile
            .decision(&node.action_sequence, s)
            .cloned()
            .ok_or_else(|| Error::ProfileIncomplete {
                node: node
                    .action_sequence
                    .iter()
                    .map(|&a| d.actions()[a].clone())
                    .collect::<Vec<_>>()
                    .join(","),
                signal: pi.signals()[s].clone(),
            })
    };
    let output = run_forward(&ctx, profile.horizon(), &limits, &mut rule)?;
    Ok(result_from(output))
}

/// Materializes a [`ProfileRule`] on its own reachable tree.
pub fn materialize_rule(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    rule: &dyn ProfileRule,
    limits: &Limits,
) -> Result<StrategyProfile> {
    let ctx = Ctx::new(d, pi, prior);
    let mut f = |node: &HistoryNode, s: usize, posterior: Option<&Rational>| {
        rule.decide(node, s, posterior)
    };
    Ok(run_forward(&ctx, horizon, limits, &mut f)?.profile)
}

/// Checks the equilibrium property pointwise: at every positive-probability
/// site, the profile's support must lie inside the best-response set at the
/// exact posterior. Returns a violation certificate otherwise.
pub fn verify_equilibrium(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    profile: &StrategyProfile,
) -> Result<Verdict> {
    let ctx = Ctx::new(d, pi, prior);
    let limits = Limits::default();
    let mut violation: Option<Violation> = None;
    let mut memo: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    let mut rule = |node: &HistoryNode, s: usize, posterior: Option<&Rational>| {
        let dist = profile
            .decision(&node.action_sequence, s)
            .cloned()
            .ok_or_else(|| Error::ProfileIncomplete {
                node: node
                    .action_sequence
                    .iter()
                    .map(|&a| d.actions()[a].clone())
                    .collect::<Vec<_>>()
                    .join(","),
                signal: pi.signals()[s].clone(),
            })?;
        if violation.is_none() {
            if let Some(q) = posterior {
                let best = memo
                    .entry(q.clone())
                    .or_insert_with(|| best_response_set(d, q));
                if let Some(bad) = dist.support().find(|a| !best.contains(a)) {
                    violation = Some(Violation {
                        node: node.action_sequence.clone(),
                        signal: s,
                        chosen: bad,
                        better: best[0],
                        posterior: q.clone(),
                    });
                }
            }
        }
        Ok(dist)
    };
    run_forward(&ctx, profile.horizon(), &limits, &mut rule)?;
    Ok(Verdict {
        is_equilibrium: violation.is_none(),
        violation,
    })
}

/// The observable-signal benchmark: `Vbar_i` for i = 1..=horizon, where
/// agent i sees i independent draws instead of the action history.
pub fn observable_signal_value(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(horizon);
    for i in 1..=horizon {
        let law = iid_power(pi, i as u32, prior, limits.max_atoms)?;
        let value = law
            .atoms()
            .iter()
            .map(|(belief, prob)| {
                let best = (0..d.num_actions())
                    .map(|a| d.expected_payoff(a, belief))
                    .reduce(Rational::max)
                    .unwrap();
                prob * best
            })
            .sum();
        out.push(value);
    }
    Ok(out)
}

/// The public belief distribution `rho_i` induced by a profile: the law of
/// the posterior computed from the first i-1 actions.
pub fn public_belief_distribution(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    profile: &StrategyProfile,
    i: usize,
) -> Result<BeliefDistribution> {
    if i < 2 || i > profile.horizon() + 1 {
        return Err(Error::PreconditionViolated(format!(
            "public belief requires 2 <= i <= horizon+1, got {i}"
        )));
    }
    let ctx = Ctx::new(d, pi, prior);
    let limits = Limits::default();
    let mut rule = |node: &HistoryNode, s: usize, _posterior: Option<&Rational>| {
        profile
            .decision(&node.action_sequence, s)
            .cloned()
            .ok_or_else(|| Error::ProfileIncomplete {
                node: node
                    .action_sequence
                    .iter()
                    .map(|&a| d.actions()[a].clone())
                    .collect::<Vec<_>>()
                    .join(","),
                signal: pi.signals()[s].clone(),
            })
    };
    let output = run_forward(&ctx, i - 1, &limits, &mut rule)?;
    let atoms = output.levels[i - 1]
        .iter()
        .map(|node| {
            let belief = node.public_belief(prior);
            let prob = prior.mu0() * &node.likelihood_h
                + prior.complement() * &node.likelihood_l;
            (belief, prob)
        })
        .collect();
    BeliefDistribution::new(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn prior_half() -> Prior {
        Prior::new(rat(1, 2)).unwrap()
    }

    fn example1_pi() -> InformationStructure {
        InformationStructure::new(
            vec!["s0".into(), "s1".into(), "s2".into()],
            vec![rat(4, 5), rat(0, 1), rat(1, 5)],
            vec![rat(0, 1), rat(3, 5), rat(2, 5)],
        )
        .unwrap()
    }

    fn example1_pi_prime() -> InformationStructure {
        InformationStructure::new(
            vec!["s0".into(), "s1".into(), "s2".into()],
            vec![rat(4, 5), rat(0, 1), rat(1, 5)],
            vec![rat(0, 1), rat(2, 5), rat(3, 5)],
        )
        .unwrap()
    }

    fn threshold(r: Rational) -> DecisionProblem {
        let minus_r = -&r;
        DecisionProblem::new(
            vec!["a0".into(), "a1".into()],
            vec![rat(0, 1), minus_r],
            vec![rat(0, 1), Rational::one() - r],
        )
        .unwrap()
    }

    fn first() -> TieBreakPolicy {
        TieBreakPolicy::FirstInActionOrder
    }

    #[test]
    fn example1_equilibrium_values_match_closed_form() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let result = compute_equilibrium(
            &d,
            &example1_pi(),
            &prior,
            8,
            &first(),
            &Limits::default(),
        )
        .unwrap();
        for i in 1..=8 {
            let expected =
                rat(1, 2) * (Rational::one() - rat(2, 5).pow(i as u32)) * rat(3, 10);
            assert_eq!(result.values[i - 1], expected, "agent {i}");
        }
        assert_eq!(result.values[1], rat(63, 500));
        assert_eq!(result.tie_sites, 0);

        let result_prime = compute_equilibrium(
            &d,
            &example1_pi_prime(),
            &prior,
            8,
            &first(),
            &Limits::default(),
        )
        .unwrap();
        for i in 2..=8 {
            let expected = rat(1, 2) * rat(3, 10)
                - rat(1, 2) * rat(1, 5).pow(i as u32) * rat(7, 10);
            assert_eq!(result_prime.values[i - 1], expected, "agent {i}");
        }
        assert_eq!(result_prime.values[1], rat(68, 500));
    }

    #[test]
    fn no_information_keeps_prior_action() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let pi = InformationStructure::no_information();
        let result =
            compute_equilibrium(&d, &pi, &prior, 5, &first(), &Limits::default()).unwrap();
        for v in &result.values {
            assert_eq!(*v, rat(0, 1));
        }
        for law in &result.action_laws_h {
            assert_eq!(law[0], rat(1, 1));
        }
    }

    #[test]
    fn mixture_with_matching_payoffs() {
        // p = 1/2 mixture, match-the-state payoffs: V_i = 1 - (1/2)^i / 2.
        let d = DecisionProblem::new(
            vec!["aL".into(), "aH".into()],
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1)],
        )
        .unwrap();
        let mixture = crate::blackwell::MixtureExperiment::new(rat(1, 2)).unwrap();
        let result = compute_equilibrium(
            &d,
            &mixture.experiment,
            &prior_half(),
            4,
            &first(),
            &Limits::default(),
        )
        .unwrap();
        for i in 1..=4 {
            let expected = Rational::one() - rat(1, 2).pow(i as u32) * rat(1, 2);
            assert_eq!(result.values[i - 1], expected);
        }
        assert_eq!(result.values[1], rat(7, 8));
    }

    #[test]
    fn enumerate_example1_is_unique() {
        let d = threshold(rat(7, 10));
        let outcome = enumerate_equilibria(
            &d,
            &example1_pi(),
            &prior_half(),
            4,
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(outcome.equilibria.len(), 1);
        assert!(!outcome.truncated);
        assert_eq!(outcome.equilibria[0].tie_sites, 0);
    }

    #[test]
    fn enumerate_branches_on_reachable_tie() {
        // r equal to the belief of s2 creates an on-path tie for agent 1.
        let d = threshold(rat(2, 3));
        let outcome = enumerate_equilibria(
            &d,
            &example1_pi(),
            &prior_half(),
            2,
            &Limits::default(),
        )
        .unwrap();
        assert!(outcome.equilibria.len() >= 2);
        for eq in &outcome.equilibria {
            let verdict =
                verify_equilibrium(&d, &example1_pi(), &prior_half(), &eq.profile).unwrap();
            assert!(verdict.is_equilibrium);
        }
    }

    #[test]
    fn enumeration_cap_truncates() {
        let d = threshold(rat(2, 3));
        let limits = Limits {
            max_equilibria: 1,
            ..Limits::default()
        };
        let outcome =
            enumerate_equilibria(&d, &example1_pi(), &prior_half(), 2, &limits).unwrap();
        assert_eq!(outcome.equilibria.len(), 1);
        assert!(outcome.truncated);
    }

    #[test]
    fn evaluate_reproduces_computed_values() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let result = compute_equilibrium(
            &d,
            &example1_pi(),
            &prior,
            6,
            &first(),
            &Limits::default(),
        )
        .unwrap();
        let again = evaluate_profile(&d, &example1_pi(), &prior, &result.profile).unwrap();
        assert_eq!(again.values, result.values);
        assert_eq!(again.action_laws_h, result.action_laws_h);
        assert_eq!(again.action_laws_l, result.action_laws_l);
    }

    #[test]
    fn evaluate_constant_profile() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let pi = example1_pi();
        let mut profile = StrategyProfile::new(3);
        profile.insert(vec![], vec![ActionDistribution::pure(1); 3]);
        profile.insert(vec![1], vec![ActionDistribution::pure(1); 3]);
        profile.insert(vec![1, 1], vec![ActionDistribution::pure(1); 3]);
        let result = evaluate_profile(&d, &pi, &prior, &profile).unwrap();
        // Always playing a1 earns mu0 (1-r) - (1-mu0) r = -1/5 each period.
        for v in &result.values {
            assert_eq!(*v, rat(-1, 5));
        }
    }

    #[test]
    fn evaluate_rejects_incomplete_profiles() {
        let d = threshold(rat(7, 10));
        let profile = StrategyProfile::new(2);
        assert!(matches!(
            evaluate_profile(&d, &example1_pi(), &prior_half(), &profile),
            Err(Error::ProfileIncomplete { .. })
        ));
    }

    #[test]
    fn verify_flags_suboptimal_site() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let pi = example1_pi();
        // Force a1 on the conclusive-L signal at the root.
        let mut profile = compute_equilibrium(&d, &pi, &prior, 1, &first(), &Limits::default())
            .unwrap()
            .profile;
        profile.insert(
            vec![],
            vec![
                ActionDistribution::pure(1),
                ActionDistribution::pure(1),
                ActionDistribution::pure(0),
            ],
        );
        let verdict = verify_equilibrium(&d, &pi, &prior, &profile).unwrap();
        assert!(!verdict.is_equilibrium);
        let v = verdict.violation.unwrap();
        assert_eq!(v.node, Vec::<usize>::new());
        assert_eq!(v.signal, 0);
        assert_eq!(v.chosen, 1);
        assert_eq!(v.better, 0);
        assert_eq!(v.posterior, rat(0, 1));
    }

    #[test]
    fn observable_signal_values() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let vbar = observable_signal_value(
            &d,
            &example1_pi_prime(),
            &prior,
            3,
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(vbar[1], rat(17, 125));
        // No information: the benchmark stays at the prior-optimal value.
        let none = InformationStructure::no_information();
        let flat = observable_signal_value(&d, &none, &prior, 4, &Limits::default()).unwrap();
        for v in &flat {
            assert_eq!(*v, rat(0, 1));
        }
    }

    #[test]
    fn public_beliefs_of_example1() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let pi = example1_pi();
        let eq = compute_equilibrium(&d, &pi, &prior, 4, &first(), &Limits::default()).unwrap();
        let rho2 = public_belief_distribution(&d, &pi, &prior, &eq.profile, 2).unwrap();
        assert_eq!(
            rho2.atoms(),
            &[(rat(2, 7), rat(7, 10)), (rat(1, 1), rat(3, 10))]
        );
        assert_eq!(rho2.mean(), rat(1, 2));

        // A profile that ignores signals reveals nothing.
        let mut blind = StrategyProfile::new(1);
        blind.insert(vec![], vec![ActionDistribution::pure(0); 3]);
        let rho = public_belief_distribution(&d, &pi, &prior, &blind, 2).unwrap();
        assert_eq!(rho.atoms(), &[(rat(1, 2), rat(1, 1))]);
    }

    #[test]
    fn tree_likelihoods_sum_to_one_per_state() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let pi = example1_pi();
        let ctx = Ctx::new(&d, &pi, &prior);
        let prior_best = best_response_set(&d, prior.mu0());
        let mut rule = |_n: &HistoryNode, _s: usize, posterior: Option<&Rational>| {
            let a = match posterior {
                Some(q) => best_response_set(&d, q)[0],
                None => prior_best[0],
            };
            Ok(ActionDistribution::pure(a))
        };
        let output = run_forward(&ctx, 5, &Limits::default(), &mut rule).unwrap();
        for level in &output.levels {
            let total_h: Rational = level.iter().map(|n| &n.likelihood_h).sum();
            let total_l: Rational = level.iter().map(|n| &n.likelihood_l).sum();
            assert!(total_h.is_one());
            assert!(total_l.is_one());
        }
    }

    #[test]
    fn profile_json_round_trip() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let pi = example1_pi();
        let eq = compute_equilibrium(&d, &pi, &prior, 3, &first(), &Limits::default()).unwrap();
        let json = eq.profile.to_json(&d, &pi);
        let back = StrategyProfile::from_json(&json, &d, &pi).unwrap();
        assert_eq!(back, eq.profile);
        assert_eq!(back.to_json(&d, &pi), json);
    }

    #[test]
    fn mixed_profile_json_round_trip() {
        let d = threshold(rat(7, 10));
        let prior = prior_half();
        let pi = example1_pi();
        let mixed = ActionDistribution::mixed(vec![(0, rat(1, 3)), (1, rat(2, 3))]).unwrap();
        let mut profile = StrategyProfile::new(1);
        profile.insert(
            vec![],
            vec![
                mixed.clone(),
                ActionDistribution::pure(1),
                mixed.clone(),
            ],
        );
        let json = profile.to_json(&d, &pi);
        let back = StrategyProfile::from_json(&json, &d, &pi).unwrap();
        assert_eq!(back, profile);
        let values = evaluate_profile(&d, &pi, &prior, &back).unwrap().values;
        assert_eq!(values, evaluate_profile(&d, &pi, &prior, &profile).unwrap().values);
        // A distribution that does not sum to one is rejected at load.
        let bad = serde_json::json!({
            "horizon": 1,
            "decisions": {"": {
                "s0": {"a0": "1/2"},
                "s1": {"a1": "1"},
                "s2": {"a0": "1"},
            }},
        });
        assert!(StrategyProfile::from_json(&bad, &d, &pi).is_err());
    }

    #[test]
    fn preference_list_tiebreak() {
        let d = threshold(rat(2, 3));
        let prior = prior_half();
        let pi = example1_pi();
        // At the tie (posterior = 2/3), prefer a1 over a0.
        let policy = TieBreakPolicy::PreferenceList(vec![1, 0]);
        let eq = compute_equilibrium(&d, &pi, &prior, 2, &policy, &Limits::default()).unwrap();
        let root = eq.profile.decision(&[], 2).unwrap();
        assert_eq!(root.entries(), &[(1, rat(1, 1))]);
        assert!(matches!(
            compute_equilibrium(
                &d,
                &pi,
                &prior,
                2,
                &TieBreakPolicy::EnumerateAll { cap: 4 },
                &Limits::default()
            ),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
