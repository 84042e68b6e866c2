//! Seeded generators and independent oracles shared by the test suites.
//! Everything is deterministic given the seed.
#![allow(dead_code)] // each test target uses a different subset

use std::cell::RefCell;
use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use socval_core::equilibrium::{
    materialize_rule, ActionDistribution, HistoryNode, Limits, ProfileRule, StrategyProfile,
};
use socval_core::model::{
    BeliefDistribution, DecisionProblem, InformationStructure, Prior, State,
};
use socval_core::rational::{rat, Rational};
use socval_core::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational in [0,1] with a small denominator.
pub fn unit_rational(rng: &mut ChaCha8Rng) -> Rational {
    let den = rng.gen_range(2..=12i64);
    let num = rng.gen_range(0..=den);
    rat(num, den)
}

pub fn random_prior(rng: &mut ChaCha8Rng) -> Prior {
    let den = rng.gen_range(2..=10i64);
    let num = rng.gen_range(1..den);
    Prior::new(rat(num, den)).unwrap()
}

/// A nonnegative integer row summing to `total`.
fn random_composition(rng: &mut ChaCha8Rng, parts: usize, total: i64) -> Vec<i64> {
    let mut cuts: Vec<i64> = (0..parts - 1).map(|_| rng.gen_range(0..=total)).collect();
    cuts.sort_unstable();
    let mut row = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        row.push(c - prev);
        prev = c;
    }
    row.push(total - prev);
    row
}

/// A random experiment with 2..=max_signals signals; zero-zero columns are
/// dropped by the constructor, so the result may have fewer.
pub fn random_experiment(rng: &mut ChaCha8Rng, max_signals: usize) -> InformationStructure {
    loop {
        let m = rng.gen_range(2..=max_signals);
        let den = rng.gen_range(3..=12i64);
        let row_l: Vec<Rational> = random_composition(rng, m, den)
            .into_iter()
            .map(|n| rat(n, den))
            .collect();
        let row_h: Vec<Rational> = random_composition(rng, m, den)
            .into_iter()
            .map(|n| rat(n, den))
            .collect();
        let signals = (0..m).map(|i| format!("s{i}")).collect();
        if let Ok(pi) = InformationStructure::new(signals, row_l, row_h) {
            return pi;
        }
    }
}

pub fn random_problem(rng: &mut ChaCha8Rng, max_actions: usize) -> DecisionProblem {
    let n = rng.gen_range(2..=max_actions);
    let den = rng.gen_range(1..=6i64);
    let mut payoff = |_: usize| rat(rng.gen_range(-12..=12i64), den);
    let row_l: Vec<Rational> = (0..n).map(&mut payoff).collect();
    let row_h: Vec<Rational> = (0..n).map(&mut payoff).collect();
    let actions = (0..n).map(|i| format!("a{i}")).collect();
    DecisionProblem::new(actions, row_l, row_h).unwrap()
}

/// A random row-stochastic garbling of `pi`, guaranteeing Blackwell
/// dominance of `pi` over the result.
pub fn random_garbling(
    rng: &mut ChaCha8Rng,
    pi: &InformationStructure,
    target_signals: usize,
) -> InformationStructure {
    let den = rng.gen_range(2..=8i64);
    let kernel: Vec<Vec<Rational>> = (0..pi.num_signals())
        .map(|_| {
            random_composition(rng, target_signals, den)
                .into_iter()
                .map(|n| rat(n, den))
                .collect()
        })
        .collect();
    let mut row_l = vec![Rational::zero(); target_signals];
    let mut row_h = vec![Rational::zero(); target_signals];
    for (s, krow) in kernel.iter().enumerate() {
        for (t, k) in krow.iter().enumerate() {
            row_l[t] += pi.prob(State::L, s) * k;
            row_h[t] += pi.prob(State::H, s) * k;
        }
    }
    let signals = (0..target_signals).map(|i| format!("t{i}")).collect();
    InformationStructure::new(signals, row_l, row_h).unwrap()
}

/// Brute-force posterior law of n draws, enumerated over the full sequence
/// space rather than multisets.
pub fn brute_force_iid(
    pi: &InformationStructure,
    n: usize,
    prior: &Prior,
) -> BeliefDistribution {
    let m = pi.num_signals();
    let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
    let mut seq = vec![0usize; n];
    loop {
        let mut ph = Rational::one();
        let mut pl = Rational::one();
        for &s in &seq {
            ph *= pi.prob(State::H, s);
            pl *= pi.prob(State::L, s);
        }
        if !(ph.is_zero() && pl.is_zero()) {
            let wh = prior.mu0() * &ph;
            let wl = prior.complement() * &pl;
            let total = &wh + &wl;
            let belief = wh / &total;
            *merged.entry(belief).or_insert_with(Rational::zero) += total;
        }
        // Odometer over the sequence space.
        let mut pos = n;
        loop {
            if pos == 0 {
                return BeliefDistribution::new(merged.into_iter().collect()).unwrap();
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < m {
                break;
            }
            seq[pos] = 0;
        }
    }
}

struct RandomRule {
    rng: RefCell<ChaCha8Rng>,
    num_actions: usize,
}

impl ProfileRule for RandomRule {
    fn decide(
        &self,
        _node: &HistoryNode,
        _signal: usize,
        _posterior: Option<&Rational>,
    ) -> Result<ActionDistribution> {
        let mut rng = self.rng.borrow_mut();
        let a = rng.gen_range(0..self.num_actions);
        if self.num_actions > 1 && rng.gen_bool(0.3) {
            let b = (a + rng.gen_range(1..self.num_actions)) % self.num_actions;
            let den = rng.gen_range(2..=6i64);
            let num = rng.gen_range(1..den);
            let p = rat(num, den);
            return ActionDistribution::mixed(vec![
                (a, p.clone()),
                (b, Rational::one() - p),
            ]);
        }
        Ok(ActionDistribution::pure(a))
    }
}

/// An arbitrary (possibly mixed) profile materialized on its own tree.
pub fn random_profile(
    seed: u64,
    d: &DecisionProblem,
    pi: &InformationStructure,
    prior: &Prior,
    horizon: usize,
) -> StrategyProfile {
    let rule = RandomRule {
        rng: RefCell::new(rng(seed)),
        num_actions: d.num_actions(),
    };
    materialize_rule(d, pi, prior, horizon, &rule, &Limits::default()).unwrap()
}
