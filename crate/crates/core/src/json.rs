//! The v1 JSON instance schema shared with the CLI: experiments, decision
//! problems, and priors, with every rational written as a `"p/q"` string.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{DecisionProblem, InformationStructure, Prior, State};
use crate::rational::Rational;

pub const SCHEMA_VERSION: &str = "v1";

fn check_schema(value: &Value) -> Result<()> {
    if let Some(schema) = value.get("schema") {
        let schema = schema
            .as_str()
            .ok_or_else(|| Error::Parse("schema field must be a string".into()))?;
        if schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema {schema:?}, expected {SCHEMA_VERSION:?}"
            )));
        }
    }
    Ok(())
}

fn rational_field(value: &Value, what: &str) -> Result<Rational> {
    value
        .as_str()
        .ok_or_else(|| Error::Parse(format!("{what} must be a rational string")))?
        .parse()
}

fn rational_row(value: &Value, what: &str) -> Result<Vec<Rational>> {
    value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{what} must be an array")))?
        .iter()
        .map(|v| rational_field(v, what))
        .collect()
}

pub fn experiment_to_json(pi: &InformationStructure) -> Value {
    let row = |state: State| -> Value {
        Value::Array(
            pi.row(state)
                .iter()
                .map(|v| json!(v.to_string()))
                .collect(),
        )
    };
    json!({
        "schema": SCHEMA_VERSION,
        "signals": pi.signals(),
        "likelihood": { "L": row(State::L), "H": row(State::H) },
    })
}

pub fn experiment_from_json(value: &Value) -> Result<InformationStructure> {
    check_schema(value)?;
    let signals = value
        .get("signals")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("experiment needs a signals array".into()))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::Parse("signal labels must be strings".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let likelihood = value
        .get("likelihood")
        .ok_or_else(|| Error::Parse("experiment needs a likelihood object".into()))?;
    let row_l = rational_row(
        likelihood
            .get("L")
            .ok_or_else(|| Error::Parse("likelihood needs an L row".into()))?,
        "likelihood row L",
    )?;
    let row_h = rational_row(
        likelihood
            .get("H")
            .ok_or_else(|| Error::Parse("likelihood needs an H row".into()))?,
        "likelihood row H",
    )?;
    InformationStructure::new(signals, row_l, row_h)
}

pub fn problem_to_json(d: &DecisionProblem) -> Value {
    let mut payoff = Map::new();
    for a in 0..d.num_actions() {
        payoff.insert(
            d.actions()[a].clone(),
            json!({
                "L": d.payoff(a, State::L).to_string(),
                "H": d.payoff(a, State::H).to_string(),
            }),
        );
    }
    json!({
        "schema": SCHEMA_VERSION,
        "actions": d.actions(),
        "payoff": Value::Object(payoff),
    })
}

pub fn problem_from_json(value: &Value) -> Result<DecisionProblem> {
    check_schema(value)?;
    let actions = value
        .get("actions")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("decision problem needs an actions array".into()))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::Parse("action labels must be strings".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let payoff = value
        .get("payoff")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("decision problem needs a payoff object".into()))?;
    if payoff.len() != actions.len() {
        return Err(Error::Parse(
            "payoff object must cover exactly the listed actions".into(),
        ));
    }
    let mut row_l = Vec::with_capacity(actions.len());
    let mut row_h = Vec::with_capacity(actions.len());
    for a in &actions {
        let entry = payoff
            .get(a)
            .ok_or_else(|| Error::Parse(format!("payoff missing action {a:?}")))?;
        row_l.push(rational_field(
            entry
                .get("L")
                .ok_or_else(|| Error::Parse(format!("payoff for {a:?} missing L")))?,
            "payoff",
        )?);
        row_h.push(rational_field(
            entry
                .get("H")
                .ok_or_else(|| Error::Parse(format!("payoff for {a:?} missing H")))?,
            "payoff",
        )?);
    }
    DecisionProblem::new(actions, row_l, row_h)
}

pub fn prior_to_json(prior: &Prior) -> Value {
    json!({ "schema": SCHEMA_VERSION, "mu0": prior.mu0().to_string() })
}

pub fn prior_from_json(value: &Value) -> Result<Prior> {
    check_schema(value)?;
    Prior::new(rational_field(
        value
            .get("mu0")
            .ok_or_else(|| Error::Parse("prior needs a mu0 field".into()))?,
        "mu0",
    )?)
}

/// Canonical pretty-printed form used for files; serialization is a pure
/// function of the value, so parse-then-serialize is idempotent.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    out.push('\n');
    out
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
