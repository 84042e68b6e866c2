//! Blackwell comparison of binary-state experiments, decided two
//! independent ways: geometrically via ROC envelopes and algebraically via
//! exact garbling feasibility with an explicit kernel certificate. Also
//! builds the full/no-information mixtures sitting between two experiments
//! in the Blackwell order, when they exist.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    private_belief_distribution, InformationStructure, Prior, State,
};
use crate::rational::Rational;
use crate::simplex::feasible_point;

/// Upper concave envelope of an experiment's cumulative likelihood points,
/// from (0,0) to (1,1), in `(P(.|L), P(.|H))` coordinates. For binary
/// states, curve containment is equivalent to Blackwell dominance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RocCurve {
    vertices: Vec<(Rational, Rational)>,
}

impl RocCurve {
    pub fn from_experiment(pi: &InformationStructure) -> Self {
        // Sort signals by likelihood ratio H/L, descending; conclusive-H
        // signals (L-probability zero) come first, conclusive-L last.
        let mut order: Vec<usize> = (0..pi.num_signals()).collect();
        order.sort_by(|&s, &t| {
            // Compare h_s/l_s vs h_t/l_t by cross-multiplication.
            let lhs = pi.prob(State::H, s) * pi.prob(State::L, t);
            let rhs = pi.prob(State::H, t) * pi.prob(State::L, s);
            rhs.cmp(&lhs).then(s.cmp(&t))
        });
        let mut vertices = vec![(Rational::zero(), Rational::zero())];
        let mut fp = Rational::zero();
        let mut tp = Rational::zero();
        let mut prev: Option<usize> = None;
        for &s in &order {
            let same_ratio = prev.is_some_and(|t| {
                pi.prob(State::H, s) * pi.prob(State::L, t)
                    == pi.prob(State::H, t) * pi.prob(State::L, s)
            });
            fp += pi.prob(State::L, s);
            tp += pi.prob(State::H, s);
            if same_ratio {
                *vertices.last_mut().unwrap() = (fp.clone(), tp.clone());
            } else {
                vertices.push((fp.clone(), tp.clone()));
            }
            prev = Some(s);
        }
        RocCurve { vertices }
    }

    pub fn vertices(&self) -> &[(Rational, Rational)] {
        &self.vertices
    }

    /// Whether the point lies on or below the envelope.
    pub fn covers_point(&self, fp: &Rational, tp: &Rational) -> bool {
        for pair in self.vertices.windows(2) {
            let (ref x0, ref y0) = pair[0];
            let (ref x1, ref y1) = pair[1];
            if fp < x0 || fp > x1 {
                continue;
            }
            if x0 == x1 {
                // Vertical segment: the envelope reaches the higher end.
                if *tp <= y0.clone().max(y1.clone()) {
                    return true;
                }
            } else {
                // tp <= y0 + (y1-y0) * (fp-x0)/(x1-x0), cross-multiplied.
                let lhs = (tp - y0) * (x1 - x0);
                let rhs = (y1 - y0) * (fp - x0);
                if lhs <= rhs {
                    return true;
                }
            }
        }
        false
    }

    /// Whether the other curve lies entirely on or below this one.
    pub fn covers(&self, other: &RocCurve) -> bool {
        other
            .vertices
            .iter()
            .all(|(fp, tp)| self.covers_point(fp, tp))
    }
}

/// True iff the ROC envelope of `pi` covers every vertex of the envelope of
/// `pi_prime`; for binary states this decides Blackwell dominance.
pub fn roc_dominates(pi: &InformationStructure, pi_prime: &InformationStructure) -> bool {
    RocCurve::from_experiment(pi).covers(&RocCurve::from_experiment(pi_prime))
}

/// A stochastic kernel mapping source signals to target signals that
/// reproduces the target likelihoods exactly.
#[derive(Debug, Clone, Serialize)]
pub struct GarblingKernel {
    pub source_signals: Vec<String>,
    pub target_signals: Vec<String>,
    /// `rows[s][t]` is the probability of emitting target signal `t` on
    /// source signal `s`.
    pub rows: Vec<Vec<Rational>>,
}

impl GarblingKernel {
    /// Checks row-stochasticity and exact re-multiplication onto `target`.
    pub fn verify(&self, source: &InformationStructure, target: &InformationStructure) -> bool {
        if self.rows.len() != source.num_signals()
            || self
                .rows
                .iter()
                .any(|row| row.len() != target.num_signals())
        {
            return false;
        }
        for row in &self.rows {
            if row.iter().any(Rational::is_negative) {
                return false;
            }
            if !row.iter().sum::<Rational>().is_one() {
                return false;
            }
        }
        for state in [State::L, State::H] {
            for t in 0..target.num_signals() {
                let rebuilt: Rational = (0..source.num_signals())
                    .map(|s| source.prob(state, s) * &self.rows[s][t])
                    .sum();
                if rebuilt != *target.prob(state, t) {
                    return false;
                }
            }
        }
        true
    }
}

/// Decides garbling feasibility exactly and returns a verified kernel
/// certificate, or `None` when `pi_prime` is not a garbling of `pi`.
pub fn garbling_kernel(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
) -> Option<GarblingKernel> {
    let ns = pi.num_signals();
    let nt = pi_prime.num_signals();
    let nvars = ns * nt;
    let var = |s: usize, t: usize| s * nt + t;

    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    // Row-stochasticity: sum_t gamma(t|s) = 1.
    for s in 0..ns {
        let mut row = vec![Rational::zero(); nvars];
        for t in 0..nt {
            row[var(s, t)] = Rational::one();
        }
        a.push(row);
        b.push(Rational::one());
    }
    // Re-multiplication: sum_s pi(s|w) gamma(t|s) = pi'(t|w) per state.
    for state in [State::L, State::H] {
        for t in 0..nt {
            let mut row = vec![Rational::zero(); nvars];
            for s in 0..ns {
                row[var(s, t)] = pi.prob(state, s).clone();
            }
            a.push(row);
            b.push(pi_prime.prob(state, t).clone());
        }
    }

    let x = feasible_point(&a, &b)?;
    let rows: Vec<Vec<Rational>> = (0..ns)
        .map(|s| (0..nt).map(|t| x[var(s, t)].clone()).collect())
        .collect();
    let kernel = GarblingKernel {
        source_signals: pi.signals().to_vec(),
        target_signals: pi_prime.signals().to_vec(),
        rows,
    };
    assert!(
        kernel.verify(pi, pi_prime),
        "feasibility certificate failed re-multiplication"
    );
    Some(kernel)
}

/// Blackwell dominance `pi >=_B pi'`, decided geometrically. Debug builds
/// cross-check against the garbling decider.
pub fn blackwell_geq(pi: &InformationStructure, pi_prime: &InformationStructure) -> bool {
    if cfg!(debug_assertions) {
        blackwell_geq_checked(pi, pi_prime).expect("blackwell deciders disagree")
    } else {
        roc_dominates(pi, pi_prime)
    }
}

/// Runs both deciders and errors with [`Error::InternalDisagreement`] if
/// they conflict.
pub fn blackwell_geq_checked(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
) -> Result<bool> {
    let geometric = roc_dominates(pi, pi_prime);
    let algebraic = garbling_kernel(pi, pi_prime).is_some();
    if geometric != algebraic {
        return Err(Error::InternalDisagreement(format!(
            "roc_dominates says {geometric} but garbling feasibility says {algebraic}"
        )));
    }
    Ok(geometric)
}

/// Checks that dominance of the factors carries over to their product.
/// Requires both premises to hold; always returns `true` when the
/// implementation is correct, and exists as a property check.
pub fn product_preserves_garbling_check(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    rho: &InformationStructure,
    rho_prime: &InformationStructure,
) -> Result<bool> {
    if !blackwell_geq(pi, pi_prime) || !blackwell_geq(rho, rho_prime) {
        return Err(Error::PreconditionViolated(
            "product preservation requires both factor dominances".into(),
        ));
    }
    Ok(blackwell_geq(
        &crate::model::product(pi, rho),
        &crate::model::product(pi_prime, rho_prime),
    ))
}

/// A mixture of full and no information: weight `p` on an uninformative
/// signal and `1-p` on each state's conclusive signal.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureExperiment {
    pub p: Rational,
    #[serde(skip)]
    pub experiment: InformationStructure,
    /// True when `p` is 0 or 1 and the support degenerates to a subset of
    /// `{0, mu0, 1}`.
    pub degenerate: bool,
}

impl MixtureExperiment {
    pub fn new(p: Rational) -> Result<Self> {
        if !p.in_unit_interval() {
            return Err(Error::ParameterViolation(format!(
                "mixture weight must lie in [0,1], got {p}"
            )));
        }
        let rest = Rational::one() - &p;
        let experiment = InformationStructure::new(
            vec!["m0".into(), "m1".into(), "m2".into()],
            vec![rest.clone(), Rational::zero(), p.clone()],
            vec![Rational::zero(), rest, p.clone()],
        )?;
        let degenerate = p.is_zero() || p.is_one();
        Ok(MixtureExperiment {
            p,
            experiment,
            degenerate,
        })
    }
}

/// A mixture certificate for the sufficient condition, together with the
/// whole admissible range of mixture weights.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureCertificate {
    pub mixture: MixtureExperiment,
    pub p_min: Rational,
    pub p_max: Rational,
}

/// Total mass `sum_s min{pi(s|L), pi(s|H)}` over the support.
pub fn min_likelihood_mass(pi: &InformationStructure) -> Rational {
    (0..pi.num_signals())
        .map(|s| {
            pi.prob(State::L, s)
                .clone()
                .min(pi.prob(State::H, s).clone())
        })
        .sum()
}

/// Decides whether a full/no-information mixture `pi''` exists with
/// `pi >=_B pi'' >=_B pi'`, via the exact inequality
/// `1 - sum_s min{pi'(s|L), pi'(s|H)} <= min{pi(mu=0|L), pi(mu=1|H)}`,
/// and returns the most informative admissible mixture (minimal `p`).
pub fn mixture_exists(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
) -> Option<MixtureCertificate> {
    let summary = private_belief_distribution(pi, prior);
    let r = summary
        .conclusive_l_mass
        .clone()
        .min(summary.conclusive_h_mass.clone());
    let p_max = min_likelihood_mass(pi_prime);
    let lhs = Rational::one() - &p_max;
    if lhs > r {
        return None;
    }
    let p_min = (Rational::one() - r).max(Rational::zero());
    let mixture = MixtureExperiment::new(p_min.clone()).expect("p_min lies in [0,1]");
    debug_assert!(blackwell_geq(pi, &mixture.experiment));
    debug_assert!(blackwell_geq(&mixture.experiment, pi_prime));
    Some(MixtureCertificate {
        mixture,
        p_min,
        p_max,
    })
}

/// The constructive three-signal garbling from the mixture onto `pi_prime`:
/// each target signal draws its excess L-mass from the conclusive-L signal,
/// its excess H-mass from the conclusive-H signal, and its common mass from
/// the uninformative signal. Requires `p <= sum_s min{pi'(s|L), pi'(s|H)}`.
pub fn three_point_garbling(
    mixture: &MixtureExperiment,
    pi_prime: &InformationStructure,
) -> Result<GarblingKernel> {
    let m = min_likelihood_mass(pi_prime);
    let p = &mixture.p;
    if *p > m {
        return Err(Error::PreconditionViolated(format!(
            "mixture weight {p} exceeds the common-mass bound {m}"
        )));
    }
    let source = &mixture.experiment;
    let nt = pi_prime.num_signals();
    let one = Rational::one();
    let mut rows = Vec::with_capacity(source.num_signals());
    for s in 0..source.num_signals() {
        let label = source.signals()[s].as_str();
        let mut row = Vec::with_capacity(nt);
        for t in 0..nt {
            let l = pi_prime.prob(State::L, t);
            let h = pi_prime.prob(State::H, t);
            let common = l.clone().min(h.clone());
            let entry = match label {
                // Conclusive signals forward their excess one-sided mass,
                // plus their share of common mass not covered by m2.
                "m0" | "m1" => {
                    let excess = if label == "m0" { l - h } else { h - l };
                    let excess = excess.max(Rational::zero());
                    let spill = if m > *p {
                        (&m - p) / (&one - p) * &common / &m
                    } else {
                        Rational::zero()
                    };
                    excess / (&one - p) + spill
                }
                // The uninformative signal spreads the common mass.
                "m2" => common / &m,
                other => unreachable!("unexpected mixture signal {other}"),
            };
            row.push(entry);
        }
        rows.push(row);
    }
    let kernel = GarblingKernel {
        source_signals: source.signals().to_vec(),
        target_signals: pi_prime.signals().to_vec(),
        rows,
    };
    if !kernel.verify(source, pi_prime) {
        return Err(Error::InternalDisagreement(
            "three-point garbling failed re-multiplication".into(),
        ));
    }
    Ok(kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify, iid_power, DEFAULT_ATOM_CAP};
    use crate::rational::rat;

    fn prior_half() -> Prior {
        Prior::new(rat(1, 2)).unwrap()
    }

    fn example1_pair() -> (InformationStructure, InformationStructure) {
        let pi = InformationStructure::new(
            vec!["s0".into(), "s1".into(), "s2".into()],
            vec![rat(4, 5), rat(0, 1), rat(1, 5)],
            vec![rat(0, 1), rat(3, 5), rat(2, 5)],
        )
        .unwrap();
        let pi_prime = InformationStructure::new(
            vec!["s0".into(), "s1".into(), "s2".into()],
            vec![rat(4, 5), rat(0, 1), rat(1, 5)],
            vec![rat(0, 1), rat(2, 5), rat(3, 5)],
        )
        .unwrap();
        (pi, pi_prime)
    }

    #[test]
    fn roc_extremes() {
        let full = InformationStructure::full_information();
        let none = InformationStructure::no_information();
        let (pi, pi_prime) = example1_pair();
        for candidate in [&pi, &pi_prime, &none, &full] {
            assert!(roc_dominates(&full, candidate));
            assert!(roc_dominates(candidate, &none));
        }
        assert!(!roc_dominates(&none, &pi));
    }

    #[test]
    fn roc_decides_example1() {
        let (pi, pi_prime) = example1_pair();
        assert!(roc_dominates(&pi, &pi_prime));
        assert!(!roc_dominates(&pi_prime, &pi));
    }

    #[test]
    fn garbling_kernel_certificates() {
        let (pi, pi_prime) = example1_pair();
        let kernel = garbling_kernel(&pi, &pi_prime).unwrap();
        assert!(kernel.verify(&pi, &pi_prime));
        assert!(garbling_kernel(&pi_prime, &pi).is_none());

        let id = garbling_kernel(&pi, &pi).unwrap();
        assert!(id.verify(&pi, &pi));

        assert!(garbling_kernel(
            &InformationStructure::no_information(),
            &InformationStructure::full_information()
        )
        .is_none());
    }

    #[test]
    fn deciders_agree_on_example1() {
        let (pi, pi_prime) = example1_pair();
        assert!(blackwell_geq_checked(&pi, &pi_prime).unwrap());
        assert!(!blackwell_geq_checked(&pi_prime, &pi).unwrap());
    }

    #[test]
    fn product_preservation() {
        let (pi, pi_prime) = example1_pair();
        let full = InformationStructure::full_information();
        let none = InformationStructure::no_information();
        assert!(product_preserves_garbling_check(&pi, &pi_prime, &full, &none).unwrap());
        assert!(product_preserves_garbling_check(&pi, &pi, &pi_prime, &pi_prime).unwrap());
        assert!(matches!(
            product_preserves_garbling_check(&none, &full, &pi, &pi),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn mixture_for_conclusive_masses() {
        // pi discloses conclusive signals with masses 17/20 and 9/10.
        let pi = InformationStructure::new(
            vec!["s0".into(), "s1".into(), "s2".into()],
            vec![rat(17, 20), rat(0, 1), rat(3, 20)],
            vec![rat(0, 1), rat(9, 10), rat(1, 10)],
        )
        .unwrap();
        let pi_prime = InformationStructure::symmetric_binary(rat(2, 3)).unwrap();
        let cert = mixture_exists(&pi, &pi_prime, &prior_half()).unwrap();
        assert_eq!(cert.mixture.p, rat(3, 20));
        assert_eq!(cert.p_min, rat(3, 20));
        assert_eq!(cert.p_max, rat(2, 3));
        assert!(!cert.mixture.degenerate);
        assert!(garbling_kernel(&pi, &cert.mixture.experiment).is_some());
        assert!(garbling_kernel(&cert.mixture.experiment, &pi_prime).is_some());
    }

    #[test]
    fn mixture_refused_for_example1() {
        let (pi, pi_prime) = example1_pair();
        // L = 1 - delta = 4/5 exceeds R = min{4/5, 3/5} = 3/5.
        assert!(mixture_exists(&pi, &pi_prime, &prior_half()).is_none());
    }

    #[test]
    fn mixture_against_no_information_always_exists() {
        let (pi, _) = example1_pair();
        let none = InformationStructure::no_information();
        let cert = mixture_exists(&pi, &none, &prior_half()).unwrap();
        assert_eq!(cert.p_max, rat(1, 1));
        assert_eq!(cert.p_min, rat(2, 5)); // 1 - min{4/5, 3/5}
        let bounded = InformationStructure::symmetric_binary(rat(2, 3)).unwrap();
        let cert = mixture_exists(&bounded, &none, &prior_half()).unwrap();
        assert_eq!(cert.mixture.p, rat(1, 1));
        assert!(cert.mixture.degenerate);
    }

    #[test]
    fn mixture_experiment_supports() {
        let prior = prior_half();
        let m = MixtureExperiment::new(rat(1, 3)).unwrap();
        let c = classify(&m.experiment, &prior);
        assert!(c.is_full_no_mixture && !c.is_full_information && !c.is_no_information);
        assert_eq!(c.mixture_weight, Some(rat(1, 3)));
        assert!(MixtureExperiment::new(rat(0, 1)).unwrap().degenerate);
        assert!(MixtureExperiment::new(rat(1, 1)).unwrap().degenerate);
        assert!(MixtureExperiment::new(rat(3, 2)).is_err());
    }

    #[test]
    fn three_point_garbling_examples() {
        // p = 2/3 onto the symmetric accuracy-2/3 experiment: the
        // uninformative row spreads mass 1/2 to each target signal.
        let mixture = MixtureExperiment::new(rat(2, 3)).unwrap();
        let pi_prime = InformationStructure::symmetric_binary(rat(2, 3)).unwrap();
        let kernel = three_point_garbling(&mixture, &pi_prime).unwrap();
        let m2 = kernel
            .source_signals
            .iter()
            .position(|s| s == "m2")
            .unwrap();
        assert_eq!(kernel.rows[m2], vec![rat(1, 2), rat(1, 2)]);
        assert!(kernel.verify(&mixture.experiment, &pi_prime));

        // p = 1 against no information: everything routed from m2.
        let mixture = MixtureExperiment::new(rat(1, 1)).unwrap();
        let none = InformationStructure::no_information();
        let kernel = three_point_garbling(&mixture, &none).unwrap();
        assert_eq!(kernel.rows, vec![vec![rat(1, 1)]]);
        assert!(kernel.verify(&mixture.experiment, &none));

        // p = 0 against full information: identity-like routing.
        let mixture = MixtureExperiment::new(rat(0, 1)).unwrap();
        let full = InformationStructure::full_information();
        let kernel = three_point_garbling(&mixture, &full).unwrap();
        assert!(kernel.verify(&mixture.experiment, &full));
        assert_eq!(kernel.rows[0], vec![rat(1, 1), rat(0, 1)]);
        assert_eq!(kernel.rows[1], vec![rat(0, 1), rat(1, 1)]);

        // Precondition: p may not exceed the common-mass bound.
        let mixture = MixtureExperiment::new(rat(3, 4)).unwrap();
        assert!(matches!(
            three_point_garbling(&mixture, &pi_prime),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn three_point_garbling_with_slack() {
        // p strictly below the common-mass bound still yields an exact kernel.
        let mixture = MixtureExperiment::new(rat(1, 4)).unwrap();
        let pi_prime = InformationStructure::symmetric_binary(rat(2, 3)).unwrap();
        let kernel = three_point_garbling(&mixture, &pi_prime).unwrap();
        assert!(kernel.verify(&mixture.experiment, &pi_prime));
    }

    #[test]
    fn iid_consistency_of_mixture() {
        // Sanity: the mixture's repeated observations stay supported on
        // {0, mu0, 1}.
        let prior = prior_half();
        let m = MixtureExperiment::new(rat(1, 2)).unwrap();
        let law = iid_power(&m.experiment, 3, &prior, DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(law.support(), vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
    }
}
