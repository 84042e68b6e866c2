//! Canned instances with closed-form value oracles, and the constructive
//! strategy profiles used to bound equilibrium payoffs: the imitation
//! profile on conclusive signals, hybrids splicing an equilibrium prefix
//! onto an imitation tail, and the signal-revealing augmentation of a
//! decision problem.

use std::collections::BTreeMap;

use crate::blackwell::MixtureExperiment;
use crate::equilibrium::{
    materialize_rule, ActionDistribution, HistoryNode, Limits, ProfileRule, StrategyProfile,
};
use crate::error::{Error, Result};
use crate::model::{
    best_response_set, private_belief_distribution, DecisionProblem, InformationStructure,
    Prior, State,
};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Example1,
    Example2,
}

/// A fully specified instance with exact oracle values for its closed forms.
#[derive(Debug, Clone)]
pub struct ScenarioBundle {
    pub kind: ScenarioKind,
    pub pi: InformationStructure,
    pub pi_prime: InformationStructure,
    pub prior: Prior,
    pub problem: DecisionProblem,
    pub params: BTreeMap<String, Rational>,
}

impl ScenarioBundle {
    fn param(&self, name: &str) -> &Rational {
        &self.params[name]
    }

    /// Closed-form oracle values. Labels: `V_pi`, `V_pi_prime`,
    /// `Vbar_pi`, `Vbar_pi_prime` (all i) for Example 1;
    /// `V_pi`, `V_pi_prime` (i = 2 only) for Example 2.
    pub fn oracle_value(&self, label: &str, i: usize) -> Option<Rational> {
        let one = Rational::one();
        match self.kind {
            ScenarioKind::Example1 => {
                let mu0 = self.prior.mu0();
                let co = self.prior.complement();
                let r = self.param("r");
                let eps = self.param("eps");
                let delta = self.param("delta");
                match label {
                    // V_i(pi) = mu0 (1 - eps^i)(1 - r); a single interior
                    // draw stays below r, so this is also Vbar_1(pi).
                    "V_pi" => Some(mu0 * (&one - eps.pow(i as u32)) * (&one - r)),
                    "Vbar_pi" if i == 1 => Some(mu0 * (&one - eps) * (&one - r)),
                    // V_i(pi') = mu0 (1-r) - (1-mu0) delta^i r; with
                    // observable signals the two experiments coincide on
                    // this value from agent 2 on (and pi' already at 1).
                    "V_pi_prime" | "Vbar_pi" | "Vbar_pi_prime" => {
                        Some(mu0 * (&one - r) - co * delta.pow(i as u32) * r)
                    }
                    _ => None,
                }
            }
            ScenarioKind::Example2 => {
                if i != 2 {
                    return None;
                }
                let x = self.param("x");
                let eps = self.param("eps");
                let delta_prime = self.param("deltaPrime");
                let half = Rational::new(1, 2);
                match label {
                    // V_2(pi, sigma*) = (1 - eps^2)(1 - x)/2
                    "V_pi" => Some((&one - eps.pow(2)) * (&one - x) * &half),
                    // V_2(pi', sigma**) = (1-x)/2 - delta'^2 x / 2
                    "V_pi_prime" | "Vbar_pi_prime" => {
                        Some((&one - x) * &half - delta_prime.pow(2) * x * &half)
                    }
                    _ => None,
                }
            }
        }
    }
}

fn check_open(name: &str, value: &Rational, lo: &Rational, hi: &Rational) -> Result<()> {
    if value <= lo || value >= hi {
        return Err(Error::ParameterViolation(format!(
            "{name} = {value} must lie strictly between {lo} and {hi}"
        )));
    }
    Ok(())
}

/// Three-signal experiment with `pi(s1|H) = 1-eps`, `pi(s2|H) = eps`,
/// `pi(s0|L) = 1-delta`, `pi(s2|L) = delta`.
fn one_sided_pair_experiment(eps: &Rational, delta: &Rational) -> Result<InformationStructure> {
    let one = Rational::one();
    InformationStructure::new(
        vec!["s0".into(), "s1".into(), "s2".into()],
        vec![&one - delta, Rational::zero(), delta.clone()],
        vec![Rational::zero(), &one - eps, eps.clone()],
    )
}

/// The threshold problem `D_r`: a safe action worth zero and a risky action
/// worth `1-r` in H and `-r` in L; risky is optimal iff the belief is at
/// least `r`.
pub fn threshold_problem(r: &Rational) -> Result<DecisionProblem> {
    if !r.in_unit_interval() {
        return Err(Error::ParameterViolation(format!(
            "threshold must lie in [0,1], got {r}"
        )));
    }
    DecisionProblem::new(
        vec!["a0".into(), "a1".into()],
        vec![Rational::zero(), -r],
        vec![Rational::zero(), Rational::one() - r],
    )
}

/// Example 1: `pi` Blackwell-dominates `pi'` yet every agent from 2 on is
/// strictly better off under `pi'` in the threshold problem `D_r`.
pub fn example1(
    eps: Rational,
    delta: Rational,
    eps_prime: Rational,
    r: Rational,
    prior: Prior,
) -> Result<ScenarioBundle> {
    let zero = Rational::zero();
    let one = Rational::one();
    check_open("delta", &delta, &zero, &eps)?;
    check_open("eps", &eps, &delta, &eps_prime)?;
    check_open("epsPrime", &eps_prime, &eps, &one)?;
    let belief = |e: &Rational| {
        let wh = prior.mu0() * e;
        let wl = prior.complement() * &delta;
        &wh / (&wh + wl)
    };
    let belief2 = {
        let wh = prior.mu0() * eps.pow(2);
        let wl = prior.complement() * delta.pow(2);
        &wh / (&wh + wl)
    };
    let lo = belief(&eps);
    let hi = belief(&eps_prime).min(belief2);
    check_open("r", &r, &lo, &hi)?;

    let pi = one_sided_pair_experiment(&eps, &delta)?;
    let pi_prime = one_sided_pair_experiment(&eps_prime, &delta)?;
    let problem = threshold_problem(&r)?;
    let mut params = BTreeMap::new();
    params.insert("eps".into(), eps);
    params.insert("delta".into(), delta);
    params.insert("epsPrime".into(), eps_prime);
    params.insert("r".into(), r);
    params.insert("mu0".into(), prior.mu0().clone());
    Ok(ScenarioBundle {
        kind: ScenarioKind::Example1,
        pi,
        pi_prime,
        prior,
        problem,
        params,
    })
}

/// Example 2: the pair separating the strong order from the weak one; the
/// third action `a2` is payoff-identical to `a0`, so revealing and
/// non-revealing equilibria coexist.
pub fn example2(
    eps: Rational,
    delta: Rational,
    eps_prime: Rational,
    delta_prime: Rational,
) -> Result<ScenarioBundle> {
    let zero = Rational::zero();
    let one = Rational::one();
    check_open("delta", &delta, &zero, &delta_prime)?;
    check_open("deltaPrime", &delta_prime, &delta, &eps)?;
    check_open("eps", &eps, &delta_prime, &eps_prime)?;
    check_open("epsPrime", &eps_prime, &eps, &one)?;
    let x = &eps / (&eps + &delta);
    let lo = &eps_prime / (&eps_prime + &delta_prime);
    let hi = eps_prime.pow(2) / (eps_prime.pow(2) + delta_prime.pow(2));
    check_open("x", &x, &lo, &hi)?;

    let prior = Prior::new(Rational::new(1, 2)).expect("1/2 is interior");
    let pi = one_sided_pair_experiment(&eps, &delta)?;
    let pi_prime = one_sided_pair_experiment(&eps_prime, &delta_prime)?;
    let problem = DecisionProblem::new(
        vec!["a0".into(), "a1".into(), "a2".into()],
        vec![Rational::zero(), -&x, Rational::zero()],
        vec![Rational::zero(), &one - &x, Rational::zero()],
    )?;
    let mut params = BTreeMap::new();
    params.insert("eps".into(), eps);
    params.insert("delta".into(), delta);
    params.insert("epsPrime".into(), eps_prime);
    params.insert("deltaPrime".into(), delta_prime);
    params.insert("x".into(), x);
    params.insert("mu0".into(), prior.mu0().clone());
    Ok(ScenarioBundle {
        kind: ScenarioKind::Example2,
        pi,
        pi_prime,
        prior,
        problem,
        params,
    })
}

/// Closed-form equilibrium value in cascade instances: when every
/// non-conclusive belief keeps the safe action uniquely optimal, every
/// equilibrium pays
/// `mu0 [(1-p^i) u(a1,H) + p^i u(a0,H)] + (1-mu0) u(a0,L)`
/// with `p = 1 - pi(mu=1|H)`.
pub fn cascade_value_oracle(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    i: usize,
) -> Result<Rational> {
    let summary = private_belief_distribution(pi, prior);
    let one = Rational::one();
    // The weakest admissible x: everything below 1 plus the prior itself.
    let x = summary
        .support()
        .into_iter()
        .filter(|b| *b < one)
        .reduce(Rational::max)
        .unwrap_or_else(|| prior.mu0().clone())
        .max(prior.mu0().clone());
    let at_zero = best_response_set(d, &Rational::zero());
    let at_x = best_response_set(d, &x);
    if at_zero.len() != 1 || at_zero != at_x {
        return Err(Error::HypothesisViolated(format!(
            "need B^-1(0) = B^-1({x}) = {{a0}}; got {at_zero:?} and {at_x:?}"
        )));
    }
    let a0 = at_zero[0];
    let a1 = best_response_set(d, &one)[0];
    let p = &one - &summary.conclusive_h_mass;
    let pi_pow = p.pow(i as u32);
    Ok(prior.mu0()
        * ((&one - &pi_pow) * d.payoff(a1, State::H) + &pi_pow * d.payoff(a0, State::H))
        + prior.complement() * d.payoff(a0, State::L))
}

/// Closed-form value under a full/no-information mixture with weight `p`:
/// `mu0 (1-p^i) U_1 + (1-mu0)(1-p^i) U_0 + p^i U_mu0`.
pub fn three_support_value_oracle(
    d: &DecisionProblem,
    p: &Rational,
    prior: &Prior,
    i: usize,
) -> Rational {
    assert!(p.in_unit_interval(), "mixture weight outside [0,1]");
    let (u0, u1, umu) = d.state_optima(prior);
    let one = Rational::one();
    let pi_pow = p.pow(i as u32);
    prior.mu0() * (&one - &pi_pow) * u1 + prior.complement() * (&one - &pi_pow) * u0
        + pi_pow * umu
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SignalGroup {
    ConclusiveL,
    ConclusiveH,
    Other,
}

/// The imitation profile: act on conclusive signals with the mixing rates
/// `q_L`, `q_H` matching a target mixture, otherwise copy the predecessor
/// (agent 1 falls back to the prior-optimal action).
#[derive(Debug, Clone)]
pub struct ImitationSpec {
    pub q_l: Rational,
    pub q_h: Rational,
    pub a0: usize,
    pub a1: usize,
    pub a2: usize,
    groups: Vec<SignalGroup>,
}

impl ImitationSpec {
    /// Requires the hypothesis `min{pi(mu=0|L), pi(mu=1|H)} >= 1 - p`.
    pub fn new(
        d: &DecisionProblem,
        pi: &InformationStructure,
        mixture: &MixtureExperiment,
        prior: &Prior,
    ) -> Result<Self> {
        let summary = private_belief_distribution(pi, prior);
        let rest = Rational::one() - &mixture.p;
        let min_mass = summary
            .conclusive_l_mass
            .clone()
            .min(summary.conclusive_h_mass.clone());
        if min_mass < rest {
            return Err(Error::HypothesisViolated(format!(
                "conclusive masses min {min_mass} fall short of 1 - p = {rest}"
            )));
        }
        let ratio = |mass: &Rational| {
            if mass.is_zero() {
                Rational::zero()
            } else {
                &rest / mass
            }
        };
        let groups = summary
            .beliefs
            .iter()
            .map(|b| {
                if b.is_zero() {
                    SignalGroup::ConclusiveL
                } else if b.is_one() {
                    SignalGroup::ConclusiveH
                } else {
                    SignalGroup::Other
                }
            })
            .collect();
        Ok(ImitationSpec {
            q_l: ratio(&summary.conclusive_l_mass),
            q_h: ratio(&summary.conclusive_h_mass),
            a0: best_response_set(d, &Rational::zero())[0],
            a1: best_response_set(d, &Rational::one())[0],
            a2: best_response_set(d, prior.mu0())[0],
            groups,
        })
    }
}

impl ProfileRule for ImitationSpec {
    fn decide(
        &self,
        node: &HistoryNode,
        signal: usize,
        _posterior: Option<&Rational>,
    ) -> Result<ActionDistribution> {
        let fallback = node.action_sequence.last().copied().unwrap_or(self.a2);
        let mix = |act: usize, q: &Rational| {
            ActionDistribution::mixed(vec![
                (act, q.clone()),
                (fallback, Rational::one() - q),
            ])
        };
        match self.groups[signal] {
            SignalGroup::ConclusiveL => mix(self.a0, &self.q_l),
            SignalGroup::ConclusiveH => mix(self.a1, &self.q_h),
            SignalGroup::Other => Ok(ActionDistribution::pure(fallback)),
        }
    }
}

/// Materializes the imitation profile on its reachable tree.
pub fn imitation_profile(
    d: &DecisionProblem,
    pi: &InformationStructure,
    mixture: &MixtureExperiment,
    prior: &Prior,
    horizon: usize,
    limits: &Limits,
) -> Result<StrategyProfile> {
    let spec = ImitationSpec::new(d, pi, mixture, prior)?;
    materialize_rule(d, pi, prior, horizon, &spec, limits)
}

/// Agents `1..=k` follow the base equilibrium profile, later agents follow
/// the imitation rule.
#[derive(Debug, Clone)]
pub struct HybridProfileSpec {
    pub k: usize,
    pub base: StrategyProfile,
    pub imitation: ImitationSpec,
}

impl ProfileRule for HybridProfileSpec {
    fn decide(
        &self,
        node: &HistoryNode,
        signal: usize,
        posterior: Option<&Rational>,
    ) -> Result<ActionDistribution> {
        if node.depth < self.k {
            self.base
                .decision(&node.action_sequence, signal)
                .cloned()
                .ok_or_else(|| {
                    Error::ShapeMismatch(format!(
                        "base profile lacks node {:?} at depth {}",
                        node.action_sequence, node.depth
                    ))
                })
        } else {
            self.imitation.decide(node, signal, posterior)
        }
    }
}

/// Materializes the hybrid `sigma(k)`.
#[allow(clippy::too_many_arguments)]
pub fn hybrid_profile(
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    base: &StrategyProfile,
    imitation: &ImitationSpec,
    k: usize,
    horizon: usize,
    limits: &Limits,
) -> Result<StrategyProfile> {
    if k > horizon || horizon > base.horizon() {
        return Err(Error::ShapeMismatch(format!(
            "need k <= horizon <= base horizon, got k = {k}, horizon = {horizon}, base = {}",
            base.horizon()
        )));
    }
    let spec = HybridProfileSpec {
        k,
        base: base.clone(),
        imitation: imitation.clone(),
    };
    materialize_rule(d, pi, prior, horizon, &spec, limits)
}

/// A decision problem whose actions carry a signal tag, `u((a,k), w) =
/// u(a, w)`; playing the optimal base action tagged with one's own signal
/// makes the action history reveal the signal history.
#[derive(Debug, Clone)]
pub struct RevealingAugmentation {
    pub problem: DecisionProblem,
    base: DecisionProblem,
    tag_count: usize,
}

/// Builds the augmented problem over `A x S'`.
pub fn augment_revealing(
    d: &DecisionProblem,
    signal_labels: &[String],
) -> Result<RevealingAugmentation> {
    if signal_labels.is_empty() {
        return Err(Error::PreconditionViolated("signal label set must be nonempty".into()));
    }
    let mut actions = Vec::new();
    let mut payoff_l = Vec::new();
    let mut payoff_h = Vec::new();
    for a in 0..d.num_actions() {
        for tag in signal_labels {
            actions.push(format!("{}~{}", d.actions()[a], tag));
            payoff_l.push(d.payoff(a, State::L).clone());
            payoff_h.push(d.payoff(a, State::H).clone());
        }
    }
    Ok(RevealingAugmentation {
        problem: DecisionProblem::new(actions, payoff_l, payoff_h)?,
        base: d.clone(),
        tag_count: signal_labels.len(),
    })
}

struct RevealingRule<'a> {
    aug: &'a RevealingAugmentation,
    prior_best: usize,
}

impl ProfileRule for RevealingRule<'_> {
    fn decide(
        &self,
        _node: &HistoryNode,
        signal: usize,
        posterior: Option<&Rational>,
    ) -> Result<ActionDistribution> {
        // Under this profile the action history encodes the signal history,
        // so the engine's posterior is exactly the observable-signal one.
        let base = match posterior {
            Some(q) => best_response_set(&self.aug.base, q)[0],
            None => self.prior_best,
        };
        Ok(ActionDistribution::pure(base * self.aug.tag_count + signal))
    }
}

impl RevealingAugmentation {
    /// The revealing profile under `pi_prime`: each agent plays an optimal
    /// base action tagged with the signal just received. Its value equals
    /// the observable-signal benchmark of the base problem, agent by agent.
    pub fn revealing_profile(
        &self,
        pi_prime: &InformationStructure,
        prior: &Prior,
        horizon: usize,
        limits: &Limits,
    ) -> Result<StrategyProfile> {
        if pi_prime.num_signals() != self.tag_count {
            return Err(Error::ShapeMismatch(format!(
                "augmentation carries {} tags but the experiment has {} signals",
                self.tag_count,
                pi_prime.num_signals()
            )));
        }
        let rule = RevealingRule {
            aug: self,
            prior_best: best_response_set(&self.base, prior.mu0())[0],
        };
        materialize_rule(&self.problem, pi_prime, prior, horizon, &rule, limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{
        compute_equilibrium, evaluate_profile, observable_signal_value, verify_equilibrium,
        TieBreakPolicy,
    };
    use crate::rational::rat;

    fn prior_half() -> Prior {
        Prior::new(rat(1, 2)).unwrap()
    }

    fn limits() -> Limits {
        Limits::default()
    }

    fn first() -> TieBreakPolicy {
        TieBreakPolicy::FirstInActionOrder
    }

    fn worked_example1() -> ScenarioBundle {
        example1(rat(2, 5), rat(1, 5), rat(3, 5), rat(7, 10), prior_half()).unwrap()
    }

    #[test]
    fn example1_oracles() {
        let bundle = worked_example1();
        assert_eq!(bundle.oracle_value("V_pi", 2).unwrap(), rat(63, 500));
        assert_eq!(bundle.oracle_value("V_pi_prime", 2).unwrap(), rat(68, 500));
        assert_eq!(bundle.oracle_value("Vbar_pi_prime", 2).unwrap(), rat(17, 125));
    }

    #[test]
    fn example1_rejects_bad_parameters() {
        // r must exceed the belief of s2 under pi (2/3).
        assert!(matches!(
            example1(rat(2, 5), rat(1, 5), rat(3, 5), rat(3, 5), prior_half()),
            Err(Error::ParameterViolation(_))
        ));
        // and stay below min{3/4, 4/5}.
        assert!(matches!(
            example1(rat(2, 5), rat(1, 5), rat(3, 5), rat(4, 5), prior_half()),
            Err(Error::ParameterViolation(_))
        ));
        assert!(example1(rat(1, 5), rat(2, 5), rat(3, 5), rat(1, 2), prior_half()).is_err());
    }

    #[test]
    fn example1_engine_agreement() {
        let bundle = worked_example1();
        for (experiment, label) in [(&bundle.pi, "V_pi"), (&bundle.pi_prime, "V_pi_prime")] {
            let eq = compute_equilibrium(
                &bundle.problem,
                experiment,
                &bundle.prior,
                8,
                &first(),
                &limits(),
            )
            .unwrap();
            for i in 1..=8 {
                assert_eq!(
                    eq.values[i - 1],
                    bundle.oracle_value(label, i).unwrap(),
                    "{label} agent {i}"
                );
            }
        }
        let vbar = observable_signal_value(
            &bundle.problem,
            &bundle.pi_prime,
            &bundle.prior,
            6,
            &limits(),
        )
        .unwrap();
        for i in 1..=6 {
            assert_eq!(vbar[i - 1], bundle.oracle_value("Vbar_pi_prime", i).unwrap());
        }
    }

    #[test]
    fn example1_benchmarks_coincide_across_the_pair() {
        // With observable signals the two experiments are worth the same
        // from agent 2 on: only the conclusive-L mass matters once two
        // interior draws clear the threshold.
        let bundle = worked_example1();
        let v_pi = observable_signal_value(
            &bundle.problem,
            &bundle.pi,
            &bundle.prior,
            5,
            &limits(),
        )
        .unwrap();
        let v_prime = observable_signal_value(
            &bundle.problem,
            &bundle.pi_prime,
            &bundle.prior,
            5,
            &limits(),
        )
        .unwrap();
        assert_eq!(v_pi[1..], v_prime[1..]);
        // At one draw the interior posterior clears r only under pi'.
        assert!(v_pi[0] > v_prime[0]);
        for i in 1..=5 {
            assert_eq!(v_pi[i - 1], bundle.oracle_value("Vbar_pi", i).unwrap());
            assert_eq!(
                v_prime[i - 1],
                bundle.oracle_value("Vbar_pi_prime", i).unwrap()
            );
        }
    }

    #[test]
    fn example2_oracles_and_constraints() {
        let bundle = example2(rat(1, 2), rat(1, 10), rat(3, 5), rat(1, 5)).unwrap();
        assert_eq!(bundle.params["x"], rat(5, 6));
        // 3/4 < 5/6 < 9/10 holds.
        assert_eq!(bundle.oracle_value("V_pi", 2).unwrap(), rat(1, 16));
        assert_eq!(bundle.oracle_value("V_pi_prime", 2).unwrap(), rat(1, 15));
        assert!(matches!(
            example2(rat(1, 2), rat(1, 5), rat(3, 5), rat(1, 10)),
            Err(Error::ParameterViolation(_))
        ));
    }

    #[test]
    fn cascade_oracle_matches_example1() {
        let bundle = worked_example1();
        for i in 1..=6 {
            assert_eq!(
                cascade_value_oracle(&bundle.problem, &bundle.pi, &bundle.prior, i).unwrap(),
                bundle.oracle_value("V_pi", i).unwrap()
            );
        }
        // Engine agreement at i = 1 as well.
        let eq = compute_equilibrium(
            &bundle.problem,
            &bundle.pi,
            &bundle.prior,
            1,
            &first(),
            &limits(),
        )
        .unwrap();
        assert_eq!(
            eq.values[0],
            cascade_value_oracle(&bundle.problem, &bundle.pi, &bundle.prior, 1).unwrap()
        );
    }

    #[test]
    fn cascade_oracle_with_safe_action_optimal_at_one() {
        // r = 1 makes the safe action optimal even at belief 1; the value
        // collapses to the constant payoff of a0.
        let d = threshold_problem(&rat(1, 1)).unwrap();
        let bundle = worked_example1();
        for i in 1..=4 {
            let v = cascade_value_oracle(&d, &bundle.pi, &bundle.prior, i).unwrap();
            assert_eq!(v, rat(0, 1));
            let eq =
                compute_equilibrium(&d, &bundle.pi, &bundle.prior, i, &first(), &limits())
                    .unwrap();
            assert_eq!(eq.values[i - 1], v);
        }
    }

    #[test]
    fn cascade_oracle_rejects_when_risky_reachable() {
        // r below the belief of s2 breaks B^-1(x) = {a0}.
        let bundle = worked_example1();
        let d = threshold_problem(&rat(1, 2)).unwrap();
        assert!(matches!(
            cascade_value_oracle(&d, &bundle.pi, &bundle.prior, 2),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn three_support_oracle_values() {
        let d = DecisionProblem::new(
            vec!["aL".into(), "aH".into()],
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1)],
        )
        .unwrap();
        let prior = prior_half();
        assert_eq!(
            three_support_value_oracle(&d, &rat(1, 2), &prior, 2),
            rat(7, 8)
        );
        assert_eq!(
            three_support_value_oracle(&d, &rat(0, 1), &prior, 3),
            rat(1, 1)
        );
        assert_eq!(
            three_support_value_oracle(&d, &rat(1, 1), &prior, 3),
            rat(1, 2)
        );
    }

    /// pi with conclusive masses 17/20 (L) and 9/10 (H); interior belief 2/5.
    fn big_mass_pi() -> InformationStructure {
        InformationStructure::new(
            vec!["s0".into(), "s1".into(), "s2".into()],
            vec![rat(17, 20), rat(0, 1), rat(3, 20)],
            vec![rat(0, 1), rat(9, 10), rat(1, 10)],
        )
        .unwrap()
    }

    #[test]
    fn imitation_profile_matches_three_support_oracle() {
        let d = threshold_problem(&rat(3, 5)).unwrap();
        let pi = big_mass_pi();
        let prior = prior_half();
        let mixture = MixtureExperiment::new(rat(3, 20)).unwrap();
        let spec = ImitationSpec::new(&d, &pi, &mixture, &prior).unwrap();
        assert_eq!(spec.q_l, rat(1, 1));
        assert_eq!(spec.q_h, rat(17, 18));
        let profile = imitation_profile(&d, &pi, &mixture, &prior, 6, &limits()).unwrap();
        let result = evaluate_profile(&d, &pi, &prior, &profile).unwrap();
        for i in 1..=6 {
            assert_eq!(
                result.values[i - 1],
                three_support_value_oracle(&d, &mixture.p, &prior, i),
                "agent {i}"
            );
        }
    }

    #[test]
    fn imitation_on_a_mixture_itself_is_pure() {
        let d = threshold_problem(&rat(3, 5)).unwrap();
        let prior = prior_half();
        let mixture = MixtureExperiment::new(rat(2, 5)).unwrap();
        let spec = ImitationSpec::new(&d, &mixture.experiment, &mixture, &prior).unwrap();
        assert_eq!(spec.q_l, rat(1, 1));
        assert_eq!(spec.q_h, rat(1, 1));
        let profile =
            imitation_profile(&d, &mixture.experiment, &mixture, &prior, 4, &limits()).unwrap();
        for node in profile.nodes() {
            for s in 0..mixture.experiment.num_signals() {
                assert!(profile.decision(node, s).unwrap().is_pure());
            }
        }
    }

    #[test]
    fn imitation_hypothesis_is_enforced() {
        let d = threshold_problem(&rat(3, 5)).unwrap();
        let pi = big_mass_pi();
        let prior = prior_half();
        // 1 - p = 7/8 exceeds min{17/20, 9/10} = 17/20.
        let mixture = MixtureExperiment::new(rat(1, 8)).unwrap();
        assert!(matches!(
            ImitationSpec::new(&d, &pi, &mixture, &prior),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn imitation_profile_is_not_generally_an_equilibrium() {
        // Interior belief 2/3 exceeds r = 3/5, so mimicking on s2 at the
        // root is strictly suboptimal.
        let bundle = worked_example1();
        let d = threshold_problem(&rat(3, 5)).unwrap();
        let mixture = MixtureExperiment::new(rat(2, 5)).unwrap();
        let profile =
            imitation_profile(&d, &bundle.pi, &mixture, &bundle.prior, 3, &limits()).unwrap();
        let verdict = verify_equilibrium(&d, &bundle.pi, &bundle.prior, &profile).unwrap();
        assert!(!verdict.is_equilibrium);
        let v = verdict.violation.unwrap();
        assert_eq!(v.node, Vec::<usize>::new());
        assert_eq!(v.posterior, rat(2, 3));
    }

    #[test]
    fn hybrid_interpolates_between_imitation_and_equilibrium() {
        let d = threshold_problem(&rat(3, 5)).unwrap();
        let pi = big_mass_pi();
        let prior = prior_half();
        let mixture = MixtureExperiment::new(rat(3, 20)).unwrap();
        let spec = ImitationSpec::new(&d, &pi, &mixture, &prior).unwrap();
        let horizon = 5;
        let eq = compute_equilibrium(&d, &pi, &prior, horizon, &first(), &limits()).unwrap();

        let h0 = hybrid_profile(&d, &pi, &prior, &eq.profile, &spec, 0, horizon, &limits())
            .unwrap();
        let imit = imitation_profile(&d, &pi, &mixture, &prior, horizon, &limits()).unwrap();
        assert_eq!(h0, imit);

        let hfull = hybrid_profile(
            &d,
            &pi,
            &prior,
            &eq.profile,
            &spec,
            horizon,
            horizon,
            &limits(),
        )
        .unwrap();
        assert_eq!(
            evaluate_profile(&d, &pi, &prior, &hfull).unwrap().values,
            eq.values
        );

        // Monotonicity of the splice: V_i(sigma(k+1)) >= V_i(sigma(k)).
        let mut prev = evaluate_profile(&d, &pi, &prior, &h0).unwrap().values;
        for k in 1..=horizon {
            let hk =
                hybrid_profile(&d, &pi, &prior, &eq.profile, &spec, k, horizon, &limits())
                    .unwrap();
            let vals = evaluate_profile(&d, &pi, &prior, &hk).unwrap().values;
            for i in 0..horizon {
                assert!(vals[i] >= prev[i], "k = {k}, agent {}", i + 1);
            }
            prev = vals;
        }

        assert!(matches!(
            hybrid_profile(&d, &pi, &prior, &eq.profile, &spec, 7, 6, &limits()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn revealing_profile_attains_the_benchmark() {
        let bundle = worked_example1();
        let aug =
            augment_revealing(&bundle.problem, bundle.pi_prime.signals()).unwrap();
        assert_eq!(aug.problem.num_actions(), 6);
        let profile = aug
            .revealing_profile(&bundle.pi_prime, &bundle.prior, 4, &limits())
            .unwrap();
        let result = evaluate_profile(&aug.problem, &bundle.pi_prime, &bundle.prior, &profile)
            .unwrap();
        let vbar = observable_signal_value(
            &bundle.problem,
            &bundle.pi_prime,
            &bundle.prior,
            4,
            &limits(),
        )
        .unwrap();
        assert_eq!(result.values, vbar);
        let verdict =
            verify_equilibrium(&aug.problem, &bundle.pi_prime, &bundle.prior, &profile)
                .unwrap();
        assert!(verdict.is_equilibrium);
    }

    #[test]
    fn single_tag_augmentation_is_isomorphic() {
        let d = threshold_problem(&rat(7, 10)).unwrap();
        let aug = augment_revealing(&d, &["s".into()]).unwrap();
        assert_eq!(aug.problem.num_actions(), d.num_actions());
        for a in 0..d.num_actions() {
            assert_eq!(aug.problem.payoff(a, State::L), d.payoff(a, State::L));
            assert_eq!(aug.problem.payoff(a, State::H), d.payoff(a, State::H));
        }
    }
}
