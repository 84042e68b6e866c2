//! Exact-arithmetic toolkit for sequential social learning with binary
//! states: experiments and Bayes updating, Blackwell comparisons with
//! explicit garbling certificates, finite-horizon Bayes-Nash equilibria of
//! the observational-learning game, the observable-signal benchmark, and
//! deciders for the social-value orders between experiments.
//!
//! Every probability, belief, and payoff is a [`rational::Rational`];
//! nothing is ever rounded.

pub mod blackwell;
pub mod equilibrium;
pub mod error;
pub mod json;
pub mod model;
pub mod orders;
pub mod rational;
pub mod scenarios;
mod simplex;

pub use error::{Error, Result};
pub use rational::Rational;
