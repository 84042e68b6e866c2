//! Binary-state experiments, decision problems, belief distributions, and
//! exact Bayes updating. Everything downstream builds on this module.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::One;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on the number of posterior atoms produced by [`iid_power`].
pub const DEFAULT_ATOM_CAP: usize = 100_000;

/// The two states of the world.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum State {
    L,
    H,
}

/// Prior probability of state `H`, strictly interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prior {
    mu0: Rational,
}

impl Prior {
    pub fn new(mu0: Rational) -> Result<Self> {
        if mu0 <= Rational::zero() || mu0 >= Rational::one() {
            return Err(Error::InvalidInstance(format!(
                "prior must satisfy 0 < mu0 < 1, got {mu0}"
            )));
        }
        Ok(Prior { mu0 })
    }

    pub fn mu0(&self) -> &Rational {
        &self.mu0
    }

    /// `1 - mu0`.
    pub fn complement(&self) -> Rational {
        Rational::one() - &self.mu0
    }

    /// Prior odds `mu0 / (1 - mu0)`.
    pub fn odds(&self) -> Rational {
        &self.mu0 / self.complement()
    }

    /// Belief corresponding to the given odds of state `H`.
    pub fn belief_from_odds(odds: &Rational) -> Rational {
        odds / (Rational::one() + odds)
    }

    /// The mirrored prior `1 - mu0` (used to reduce below-prior cases to
    /// above-prior ones by swapping the states).
    pub fn mirrored(&self) -> Prior {
        Prior {
            mu0: self.complement(),
        }
    }
}

fn check_label(label: &str, what: &str) -> Result<()> {
    if label.is_empty() || label.contains(',') || label.contains(char::is_whitespace) {
        return Err(Error::InvalidInstance(format!(
            "{what} label {label:?} must be nonempty and free of commas and whitespace"
        )));
    }
    Ok(())
}

/// A finite experiment `pi`: one likelihood row per state over a common
/// signal set. Signals carrying zero probability under both states are
/// dropped at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationStructure {
    signals: Vec<String>,
    row_l: Vec<Rational>,
    row_h: Vec<Rational>,
}

impl InformationStructure {
    pub fn new(
        signals: Vec<String>,
        row_l: Vec<Rational>,
        row_h: Vec<Rational>,
    ) -> Result<Self> {
        if signals.len() != row_l.len() || signals.len() != row_h.len() {
            return Err(Error::InvalidInstance(
                "likelihood rows must match the signal list in length".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &signals {
            check_label(s, "signal")?;
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidInstance(format!("duplicate signal label {s:?}")));
            }
        }
        for v in row_l.iter().chain(row_h.iter()) {
            if v.is_negative() {
                return Err(Error::InvalidInstance(format!(
                    "likelihood entries must be nonnegative, got {v}"
                )));
            }
        }
        for (name, row) in [("L", &row_l), ("H", &row_h)] {
            let total: Rational = row.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidInstance(format!(
                    "likelihood row {name} sums to {total}, expected 1"
                )));
            }
        }
        let mut kept_signals = Vec::new();
        let mut kept_l = Vec::new();
        let mut kept_h = Vec::new();
        for ((s, l), h) in signals.into_iter().zip(row_l).zip(row_h) {
            if l.is_zero() && h.is_zero() {
                continue;
            }
            kept_signals.push(s);
            kept_l.push(l);
            kept_h.push(h);
        }
        if kept_signals.is_empty() {
            return Err(Error::InvalidInstance("experiment has no signals".into()));
        }
        Ok(InformationStructure {
            signals: kept_signals,
            row_l: kept_l,
            row_h: kept_h,
        })
    }

    /// One-signal experiment whose belief never moves.
    pub fn no_information() -> Self {
        InformationStructure {
            signals: vec!["s".into()],
            row_l: vec![Rational::one()],
            row_h: vec![Rational::one()],
        }
    }

    /// Two conclusive signals revealing the state.
    pub fn full_information() -> Self {
        InformationStructure {
            signals: vec!["s0".into(), "s1".into()],
            row_l: vec![Rational::one(), Rational::zero()],
            row_h: vec![Rational::zero(), Rational::one()],
        }
    }

    /// Symmetric binary signal that matches the state with probability `acc`.
    pub fn symmetric_binary(acc: Rational) -> Result<Self> {
        let rest = Rational::one() - &acc;
        InformationStructure::new(
            vec!["sl".into(), "sh".into()],
            vec![acc.clone(), rest.clone()],
            vec![rest, acc],
        )
    }

    pub fn num_signals(&self) -> usize {
        self.signals.len()
    }

    pub fn signals(&self) -> &[String] {
        &self.signals
    }

    pub fn signal_index(&self, label: &str) -> Option<usize> {
        self.signals.iter().position(|s| s == label)
    }

    pub fn prob(&self, state: State, signal: usize) -> &Rational {
        match state {
            State::L => &self.row_l[signal],
            State::H => &self.row_h[signal],
        }
    }

    pub fn row(&self, state: State) -> &[Rational] {
        match state {
            State::L => &self.row_l,
            State::H => &self.row_h,
        }
    }

    /// Same experiment with the state labels swapped.
    pub fn mirrored(&self) -> Self {
        InformationStructure {
            signals: self.signals.clone(),
            row_l: self.row_h.clone(),
            row_h: self.row_l.clone(),
        }
    }
}

/// A finite decision problem `(A, u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionProblem {
    actions: Vec<String>,
    payoff_l: Vec<Rational>,
    payoff_h: Vec<Rational>,
}

impl DecisionProblem {
    pub fn new(
        actions: Vec<String>,
        payoff_l: Vec<Rational>,
        payoff_h: Vec<Rational>,
    ) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::InvalidInstance("decision problem needs at least one action".into()));
        }
        if actions.len() != payoff_l.len() || actions.len() != payoff_h.len() {
            return Err(Error::InvalidInstance(
                "payoff rows must match the action list in length".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &actions {
            check_label(a, "action")?;
            if !seen.insert(a.clone()) {
                return Err(Error::InvalidInstance(format!("duplicate action label {a:?}")));
            }
        }
        Ok(DecisionProblem {
            actions,
            payoff_l,
            payoff_h,
        })
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == label)
    }

    pub fn payoff(&self, action: usize, state: State) -> &Rational {
        match state {
            State::L => &self.payoff_l[action],
            State::H => &self.payoff_h[action],
        }
    }

    /// Expected payoff of `action` at the given belief on `H`.
    pub fn expected_payoff(&self, action: usize, belief: &Rational) -> Rational {
        belief * &self.payoff_h[action] + (Rational::one() - belief) * &self.payoff_l[action]
    }

    /// Same problem with the state labels swapped.
    pub fn mirrored(&self) -> Self {
        DecisionProblem {
            actions: self.actions.clone(),
            payoff_l: self.payoff_h.clone(),
            payoff_h: self.payoff_l.clone(),
        }
    }

    /// Best payoff achievable in each state and at the prior belief:
    /// `(U_0, U_1, U_mu0)`.
    pub fn state_optima(&self, prior: &Prior) -> (Rational, Rational, Rational) {
        let u0 = self.payoff_l.iter().cloned().reduce(Rational::max).unwrap();
        let u1 = self.payoff_h.iter().cloned().reduce(Rational::max).unwrap();
        let umu = (0..self.num_actions())
            .map(|a| self.expected_payoff(a, prior.mu0()))
            .reduce(Rational::max)
            .unwrap();
        (u0, u1, umu)
    }
}

/// A finite distribution over posterior beliefs, merged by exact equality
/// and sorted by belief.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefDistribution {
    atoms: Vec<(Rational, Rational)>,
}

impl BeliefDistribution {
    /// Merges atoms with equal beliefs, drops zero-probability atoms, and
    /// checks that probabilities sum to one.
    pub fn new(atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (belief, prob) in atoms {
            if !belief.in_unit_interval() {
                return Err(Error::InvalidInstance(format!("belief {belief} outside [0,1]")));
            }
            if prob.is_negative() {
                return Err(Error::InvalidInstance(format!("negative atom probability {prob}")));
            }
            if prob.is_zero() {
                continue;
            }
            *merged.entry(belief).or_insert_with(Rational::zero) += prob;
        }
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidInstance(format!(
                "belief atom probabilities sum to {total}, expected 1"
            )));
        }
        Ok(BeliefDistribution {
            atoms: merged.into_iter().collect(),
        })
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn support(&self) -> Vec<Rational> {
        self.atoms.iter().map(|(b, _)| b.clone()).collect()
    }

    pub fn prob_at(&self, belief: &Rational) -> Rational {
        self.atoms
            .iter()
            .find(|(b, _)| b == belief)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// `sum prob * belief`; equals the prior for every distribution derived
    /// from one (the martingale property).
    pub fn mean(&self) -> Rational {
        self.atoms.iter().map(|(b, p)| b * p).sum()
    }
}

/// Private belief distribution of an experiment together with the signal
/// groups `S(x)` and the conclusive masses used throughout the orders.
#[derive(Debug, Clone)]
pub struct PrivateBeliefSummary {
    pub distribution: BeliefDistribution,
    /// `pi(mu = 0 | L)`.
    pub conclusive_l_mass: Rational,
    /// `pi(mu = 1 | H)`.
    pub conclusive_h_mass: Rational,
    /// Belief value -> indices of the signals inducing it.
    pub signal_groups: BTreeMap<Rational, Vec<usize>>,
    /// Belief induced by each signal, in signal order.
    pub beliefs: Vec<Rational>,
}

impl PrivateBeliefSummary {
    pub fn support(&self) -> Vec<Rational> {
        self.distribution.support()
    }

    /// Interior support points (excluding 0 and 1).
    pub fn interior_support(&self) -> Vec<Rational> {
        self.support()
            .into_iter()
            .filter(|b| !b.is_zero() && !b.is_one())
            .collect()
    }
}

/// Coarse classification of an experiment relative to a prior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub is_no_information: bool,
    pub is_full_information: bool,
    /// With finitely many signals, `co(supp mu) = [0,1]` iff both 0 and 1
    /// are in the support.
    pub has_unbounded_beliefs: bool,
    /// `supp mu` is contained in `{0, mu0, 1}`.
    pub is_full_no_mixture: bool,
    /// Weight on the uninformative atom when `is_full_no_mixture` holds.
    pub mixture_weight: Option<Rational>,
}

/// Combines a public belief `x` with a private belief `y` at prior `mu0`:
/// `xy / (xy + (mu0/(1-mu0))(1-x)(1-y))`.
///
/// Errors with [`Error::IndeterminatePosterior`] when `x` and `y` are
/// conclusively contradictory (both numerator and denominator vanish);
/// such pairs only arise at zero-probability decision points.
pub fn posterior_update(public: &Rational, private: &Rational, prior: &Prior) -> Result<Rational> {
    assert!(public.in_unit_interval(), "public belief outside [0,1]");
    assert!(private.in_unit_interval(), "private belief outside [0,1]");
    let numer = public * private;
    let counter = prior.odds()
        * (Rational::one() - public)
        * (Rational::one() - private);
    if numer.is_zero() {
        if counter.is_zero() {
            return Err(Error::IndeterminatePosterior {
                public: Box::new(public.clone()),
                private: Box::new(private.clone()),
            });
        }
        return Ok(Rational::zero());
    }
    let denom = &numer + &counter;
    Ok(numer / denom)
}

/// Posterior belief on `H` after observing a signal at the prior.
pub fn signal_belief(pi: &InformationStructure, signal: usize, prior: &Prior) -> Rational {
    let wh = prior.mu0() * pi.prob(State::H, signal);
    let wl = prior.complement() * pi.prob(State::L, signal);
    let total = &wh + &wl;
    wh / total
}

/// The private belief distribution induced by an experiment, with signal
/// groups and conclusive masses.
pub fn private_belief_distribution(
    pi: &InformationStructure,
    prior: &Prior,
) -> PrivateBeliefSummary {
    let mut groups: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    let mut beliefs = Vec::with_capacity(pi.num_signals());
    for s in 0..pi.num_signals() {
        let belief = signal_belief(pi, s, prior);
        groups.entry(belief.clone()).or_default().push(s);
        beliefs.push(belief);
    }
    let mut atoms = Vec::new();
    let mut conclusive_l = Rational::zero();
    let mut conclusive_h = Rational::zero();
    for (belief, members) in &groups {
        let mass_h: Rational = members.iter().map(|&s| pi.prob(State::H, s)).sum();
        let mass_l: Rational = members.iter().map(|&s| pi.prob(State::L, s)).sum();
        if belief.is_zero() {
            conclusive_l = mass_l.clone();
        }
        if belief.is_one() {
            conclusive_h = mass_h.clone();
        }
        atoms.push((
            belief.clone(),
            prior.mu0() * mass_h + prior.complement() * mass_l,
        ));
    }
    let distribution = BeliefDistribution::new(atoms).expect("likelihood rows sum to one");
    PrivateBeliefSummary {
        distribution,
        conclusive_l_mass: conclusive_l,
        conclusive_h_mass: conclusive_h,
        signal_groups: groups,
        beliefs,
    }
}

/// Product experiment over the cartesian signal set; likelihoods multiply
/// per state.
pub fn product(
    pi: &InformationStructure,
    rho: &InformationStructure,
) -> InformationStructure {
    let mut signals = Vec::new();
    let mut row_l = Vec::new();
    let mut row_h = Vec::new();
    for s in 0..pi.num_signals() {
        for t in 0..rho.num_signals() {
            signals.push(format!("{}*{}", pi.signals()[s], rho.signals()[t]));
            row_l.push(pi.prob(State::L, s) * rho.prob(State::L, t));
            row_h.push(pi.prob(State::H, s) * rho.prob(State::H, t));
        }
    }
    InformationStructure::new(signals, row_l, row_h)
        .expect("product of valid experiments is valid")
}

fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

fn multinomial(n: u32, counts: &[u32]) -> Rational {
    let mut denom = BigInt::one();
    for &k in counts {
        denom *= factorial(k);
    }
    Rational::from_bigint(factorial(n)) / Rational::from_bigint(denom)
}

/// Posterior law of `n` conditionally independent draws from `pi`, computed
/// over multisets of signal counts rather than the n-fold sequence space.
pub fn iid_power(
    pi: &InformationStructure,
    n: u32,
    prior: &Prior,
    atom_cap: usize,
) -> Result<BeliefDistribution> {
    assert!(n >= 1, "iid_power requires n >= 1");

    // Depth-first walk over count vectors summing to n.
    struct Walker<'a> {
        pi: &'a InformationStructure,
        prior: &'a Prior,
        n: u32,
        atom_cap: usize,
        counts: Vec<u32>,
        merged: BTreeMap<Rational, Rational>,
    }

    impl Walker<'_> {
        fn descend(&mut self, idx: usize, remaining: u32) -> Result<()> {
            if idx + 1 == self.counts.len() {
                self.counts[idx] = remaining;
                self.leaf()?;
                self.counts[idx] = 0;
                return Ok(());
            }
            for k in 0..=remaining {
                self.counts[idx] = k;
                self.descend(idx + 1, remaining - k)?;
            }
            self.counts[idx] = 0;
            Ok(())
        }

        fn leaf(&mut self) -> Result<()> {
            let mut ph = Rational::one();
            let mut pl = Rational::one();
            for (s, &k) in self.counts.iter().enumerate() {
                if k > 0 {
                    ph *= self.pi.prob(State::H, s).pow(k);
                    pl *= self.pi.prob(State::L, s).pow(k);
                }
            }
            if ph.is_zero() && pl.is_zero() {
                return Ok(());
            }
            let coeff = multinomial(self.n, &self.counts);
            let wh = self.prior.mu0() * &ph * &coeff;
            let wl = self.prior.complement() * &pl * &coeff;
            let total = &wh + &wl;
            let belief = wh / &total;
            if !self.merged.contains_key(&belief) && self.merged.len() >= self.atom_cap {
                return Err(Error::ResourceLimit {
                    what: "posterior atoms",
                    cap: self.atom_cap,
                });
            }
            *self.merged.entry(belief).or_insert_with(Rational::zero) += total;
            Ok(())
        }
    }

    let mut walker = Walker {
        pi,
        prior,
        n,
        atom_cap,
        counts: vec![0u32; pi.num_signals()],
        merged: BTreeMap::new(),
    };
    walker.descend(0, n)?;
    BeliefDistribution::new(walker.merged.into_iter().collect())
}

/// Classifies an experiment: no/full information, unbounded beliefs, and
/// whether it is a mixture of full and no information.
pub fn classify(pi: &InformationStructure, prior: &Prior) -> Classification {
    let summary = private_belief_distribution(pi, prior);
    let support = summary.support();
    let zero = Rational::zero();
    let one = Rational::one();
    let has_zero = support.contains(&zero);
    let has_one = support.contains(&one);
    let is_no_information = support.len() == 1 && support[0] == *prior.mu0();
    let is_full_information =
        support.len() == 2 && has_zero && has_one;
    let is_full_no_mixture = support
        .iter()
        .all(|b| *b == zero || *b == one || b == prior.mu0());
    let mixture_weight = if is_full_no_mixture {
        let p = summary
            .signal_groups
            .get(prior.mu0())
            .map(|members| members.iter().map(|&s| pi.prob(State::L, s)).sum())
            .unwrap_or_else(Rational::zero);
        debug_assert_eq!(
            p,
            summary
                .signal_groups
                .get(prior.mu0())
                .map(|members| members.iter().map(|&s| pi.prob(State::H, s)).sum())
                .unwrap_or_else(Rational::zero),
            "belief-mu0 signals must have equal likelihoods"
        );
        Some(p)
    } else {
        None
    };
    Classification {
        is_no_information,
        is_full_information,
        has_unbounded_beliefs: has_zero && has_one,
        is_full_no_mixture,
        mixture_weight,
    }
}

/// All maximizers of `belief*u(a,H) + (1-belief)*u(a,L)`, in action order.
pub fn best_response_set(d: &DecisionProblem, belief: &Rational) -> Vec<usize> {
    assert!(belief.in_unit_interval(), "belief outside [0,1]");
    let mut best: Vec<usize> = Vec::new();
    let mut best_value: Option<Rational> = None;
    for a in 0..d.num_actions() {
        let v = d.expected_payoff(a, belief);
        match &best_value {
            Some(cur) if v < *cur => {}
            Some(cur) if v == *cur => best.push(a),
            _ => {
                best_value = Some(v);
                best = vec![a];
            }
        }
    }
    best
}

/// The closed (possibly degenerate) interval of beliefs where `action` is
/// optimal, or `None` when the action is nowhere optimal.
pub fn best_action_interval(
    d: &DecisionProblem,
    action: usize,
) -> Option<(Rational, Rational)> {
    assert!(action < d.num_actions(), "action index out of range");
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let slope_a = d.payoff(action, State::H) - d.payoff(action, State::L);
    for b in 0..d.num_actions() {
        if b == action {
            continue;
        }
        // value_a(z) - value_b(z) = slope * z + intercept >= 0
        let slope = &slope_a - (d.payoff(b, State::H) - d.payoff(b, State::L));
        let intercept = d.payoff(action, State::L) - d.payoff(b, State::L);
        if slope.is_zero() {
            if intercept.is_negative() {
                return None;
            }
        } else {
            let crossing = -intercept / &slope;
            if slope.is_negative() {
                hi = hi.min(crossing);
            } else {
                lo = lo.max(crossing);
            }
        }
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}
