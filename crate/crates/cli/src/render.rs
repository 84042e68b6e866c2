//! Deterministic JSON and CSV rendering for every subcommand. CSV rows are
//! emitted in a fixed order; JSON objects use fixed key order, so identical
//! configurations produce identical bytes.

use serde_json::{json, Map, Value};

use socval_core::blackwell::{blackwell_geq_checked, garbling_kernel};
use socval_core::equilibrium::{
    enumerate_equilibria, EnumerationOutcome, EquilibriumResult, Limits,
};
use socval_core::json as schema;
use socval_core::model::{
    classify, private_belief_distribution, DecisionProblem, InformationStructure, Prior,
};
use socval_core::orders::{
    default_problem_family, refute_social, threshold_of, threshold_problem, Evidence,
    OrderVerdict, Status,
};
use socval_core::rational::Rational;
use socval_core::scenarios::ScenarioBundle;
use socval_core::{Error, Result};

use crate::OutputFormat;

fn csv(rows: Vec<String>) -> String {
    let mut out = rows.join("\n");
    out.push('\n');
    out
}

fn alpha_column(d: &DecisionProblem, law: &[Rational]) -> String {
    d.actions()
        .iter()
        .zip(law)
        .map(|(label, p)| format!("{label}={p}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn inspect(pi: &InformationStructure, prior: &Prior, format: OutputFormat) -> String {
    let summary = private_belief_distribution(pi, prior);
    let class = classify(pi, prior);
    match format {
        OutputFormat::Csv => {
            let mut rows = vec!["belief,prob".to_string()];
            for (belief, prob) in summary.distribution.atoms() {
                rows.push(format!("{belief},{prob}"));
            }
            csv(rows)
        }
        OutputFormat::Json => {
            let atoms: Vec<Value> = summary
                .distribution
                .atoms()
                .iter()
                .map(|(b, p)| json!({ "belief": b.to_string(), "prob": p.to_string() }))
                .collect();
            let mut groups = Map::new();
            for (belief, members) in &summary.signal_groups {
                let labels: Vec<&str> =
                    members.iter().map(|&s| pi.signals()[s].as_str()).collect();
                groups.insert(belief.to_string(), json!(labels));
            }
            let value = json!({
                "schema": schema::SCHEMA_VERSION,
                "experiment": schema::experiment_to_json(pi),
                "mu0": prior.mu0().to_string(),
                "atoms": atoms,
                "conclusive_l_mass": summary.conclusive_l_mass.to_string(),
                "conclusive_h_mass": summary.conclusive_h_mass.to_string(),
                "signal_groups": Value::Object(groups),
                "classification": {
                    "is_no_information": class.is_no_information,
                    "is_full_information": class.is_full_information,
                    "has_unbounded_beliefs": class.has_unbounded_beliefs,
                    "is_full_no_mixture": class.is_full_no_mixture,
                    "mixture_weight": class.mixture_weight.map(|p| p.to_string()),
                },
            });
            schema::to_canonical_string(&value)
        }
    }
}

fn kernel_json(kernel: &socval_core::blackwell::GarblingKernel) -> Value {
    let mut rows = Map::new();
    for (s, row) in kernel.rows.iter().enumerate() {
        let mut entries = Map::new();
        for (t, p) in row.iter().enumerate() {
            if !p.is_zero() {
                entries.insert(kernel.target_signals[t].clone(), json!(p.to_string()));
            }
        }
        rows.insert(kernel.source_signals[s].clone(), Value::Object(entries));
    }
    Value::Object(rows)
}

pub fn blackwell(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    format: OutputFormat,
) -> Result<String> {
    let forward = blackwell_geq_checked(pi, pi_prime)?;
    let backward = blackwell_geq_checked(pi_prime, pi)?;
    let forward_kernel = garbling_kernel(pi, pi_prime);
    let backward_kernel = garbling_kernel(pi_prime, pi);
    Ok(match format {
        OutputFormat::Csv => csv(vec![
            "direction,dominates".to_string(),
            format!("pi_over_piprime,{forward}"),
            format!("piprime_over_pi,{backward}"),
        ]),
        OutputFormat::Json => {
            let value = json!({
                "schema": schema::SCHEMA_VERSION,
                "pi_blackwell_geq_piprime": forward,
                "piprime_blackwell_geq_pi": backward,
                "kernel_pi_to_piprime": forward_kernel.as_ref().map(kernel_json),
                "kernel_piprime_to_pi": backward_kernel.as_ref().map(kernel_json),
            });
            schema::to_canonical_string(&value)
        }
    })
}

fn result_rows(
    d: &DecisionProblem,
    result: &EquilibriumResult,
    vbar: &[Rational],
    prefix: &str,
) -> Vec<String> {
    result
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            format!(
                "{prefix}{agent},{v},{vbar},{ah},{al}",
                agent = idx + 1,
                vbar = vbar[idx],
                ah = alpha_column(d, &result.action_laws_h[idx]),
                al = alpha_column(d, &result.action_laws_l[idx]),
            )
        })
        .collect()
}

fn result_json(
    d: &DecisionProblem,
    pi: &InformationStructure,
    result: &EquilibriumResult,
    vbar: &[Rational],
) -> Value {
    let agents: Vec<Value> = result
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let laws_h: Vec<String> = result.action_laws_h[idx]
                .iter()
                .map(Rational::to_string)
                .collect();
            let laws_l: Vec<String> = result.action_laws_l[idx]
                .iter()
                .map(Rational::to_string)
                .collect();
            json!({
                "agent": idx + 1,
                "V": v.to_string(),
                "Vbar": vbar[idx].to_string(),
                "alphaH": laws_h,
                "alphaL": laws_l,
            })
        })
        .collect();
    json!({
        "agents": agents,
        "tie_sites": result.tie_sites,
        "pruned_nodes": result.pruned_nodes,
        "node_count": result.node_count,
        "profile": result.profile.to_json(d, pi),
    })
}

pub fn equilibrium(
    d: &DecisionProblem,
    pi: &InformationStructure,
    result: &EquilibriumResult,
    vbar: &[Rational],
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Csv => {
            let mut rows = vec!["agent,V,Vbar,alphaH,alphaL".to_string()];
            rows.extend(result_rows(d, result, vbar, ""));
            csv(rows)
        }
        OutputFormat::Json => {
            let mut value = result_json(d, pi, result, vbar);
            let obj = value.as_object_mut().unwrap();
            obj.insert("schema".into(), json!(schema::SCHEMA_VERSION));
            schema::to_canonical_string(&value)
        }
    }
}

pub fn enumeration(
    d: &DecisionProblem,
    pi: &InformationStructure,
    outcome: &EnumerationOutcome,
    vbar: &[Rational],
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Csv => {
            let mut rows = vec!["equilibrium,agent,V,Vbar,alphaH,alphaL".to_string()];
            for (k, eq) in outcome.equilibria.iter().enumerate() {
                rows.extend(result_rows(d, eq, vbar, &format!("{k},")));
            }
            csv(rows)
        }
        OutputFormat::Json => {
            let list: Vec<Value> = outcome
                .equilibria
                .iter()
                .map(|eq| result_json(d, pi, eq, vbar))
                .collect();
            let value = json!({
                "schema": schema::SCHEMA_VERSION,
                "count": outcome.equilibria.len(),
                "truncated": outcome.truncated,
                "equilibria": list,
            });
            schema::to_canonical_string(&value)
        }
    }
}

pub fn vbar(values: &[Rational], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut rows = vec!["agent,Vbar".to_string()];
            for (idx, v) in values.iter().enumerate() {
                rows.push(format!("{},{v}", idx + 1));
            }
            csv(rows)
        }
        OutputFormat::Json => {
            let list: Vec<String> = values.iter().map(Rational::to_string).collect();
            schema::to_canonical_string(&json!({
                "schema": schema::SCHEMA_VERSION,
                "Vbar": list,
            }))
        }
    }
}

fn status_str(status: Status) -> &'static str {
    match status {
        Status::ProvedBySufficient => "proved_by_sufficient",
        Status::Refuted => "refuted",
        Status::Inconclusive => "inconclusive",
    }
}

fn evidence_json(evidence: &Evidence) -> Value {
    match evidence {
        Evidence::MixtureCertificate => json!({ "kind": "mixture_certificate" }),
        Evidence::CascadePersistence { first_violation } => json!({
            "kind": "cascade_persistence",
            "first_violation": first_violation,
        }),
        Evidence::GeometricPersistence => json!({ "kind": "geometric_persistence" }),
        Evidence::FiniteHorizon { horizon } => json!({
            "kind": "finite_horizon",
            "horizon": horizon,
        }),
        Evidence::FamilyChecked { problems, horizon } => json!({
            "kind": "family_checked",
            "problems": problems,
            "horizon": horizon,
        }),
    }
}

pub fn verdict(
    verdict: &OrderVerdict,
    pi: &InformationStructure,
    format: OutputFormat,
) -> String {
    let certificate = verdict.counterexample.as_ref().map(|cex| {
        json!({
            "problem": schema::problem_to_json(&cex.problem),
            "r": cex.threshold.as_ref().map(Rational::to_string),
            "agent": cex.agent,
            "V": cex.equilibrium_value.to_string(),
            "Vbar": cex.benchmark.to_string(),
            "gap": cex.gap.to_string(),
            "profile": cex.profile.to_json(&cex.problem, pi),
        })
    });
    let mixture = verdict.mixture.as_ref().map(|cert| {
        json!({
            "p": cert.mixture.p.to_string(),
            "p_min": cert.p_min.to_string(),
            "p_max": cert.p_max.to_string(),
            "degenerate": cert.mixture.degenerate,
            "experiment": schema::experiment_to_json(&cert.mixture.experiment),
        })
    });
    match format {
        OutputFormat::Csv => {
            let mut rows = vec!["field,value".to_string()];
            rows.push(format!("relation,{}", verdict.relation.label()));
            rows.push(format!("status,{}", status_str(verdict.status)));
            if let Some(cex) = &verdict.counterexample {
                if let Some(r) = &cex.threshold {
                    rows.push(format!("r,{r}"));
                }
                rows.push(format!("agent,{}", cex.agent));
                rows.push(format!("V,{}", cex.equilibrium_value));
                rows.push(format!("Vbar,{}", cex.benchmark));
                rows.push(format!("gap,{}", cex.gap));
            }
            if let Some(cert) = &verdict.mixture {
                rows.push(format!("p,{}", cert.mixture.p));
            }
            csv(rows)
        }
        OutputFormat::Json => {
            let value = json!({
                "schema": schema::SCHEMA_VERSION,
                "relation": verdict.relation.label(),
                "status": status_str(verdict.status),
                "evidence": verdict.evidence.as_ref().map(evidence_json),
                "mixture": mixture,
                "certificate": certificate,
                "notes": verdict.notes,
            });
            schema::to_canonical_string(&value)
        }
    }
}

/// Full gap table over the searched family, plus the canonical certificate.
pub fn refutation_table(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    explicit: &[DecisionProblem],
    limits: &Limits,
    format: OutputFormat,
) -> Result<(String, bool)> {
    let mut family = explicit.to_vec();
    family.extend(default_problem_family(pi, pi_prime, prior, horizon, limits));
    let verdict = refute_social(pi, pi_prime, prior, horizon, &family, limits)?;
    let refuted = verdict.status == Status::Refuted;
    let text = match format {
        OutputFormat::Csv => {
            let mut rows = vec!["r,i,V,Vbar,gap".to_string()];
            for problem in &family {
                let r_label = threshold_of(problem)
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "-".to_string());
                let vbar =
                    socval_core::equilibrium::observable_signal_value(
                        problem, pi_prime, prior, horizon, limits,
                    )?;
                let outcome = enumerate_equilibria(problem, pi, prior, horizon, limits)?;
                for i in 1..=horizon {
                    let worst = outcome
                        .equilibria
                        .iter()
                        .map(|eq| eq.values[i - 1].clone())
                        .reduce(Rational::min)
                        .unwrap();
                    let gap = &vbar[i - 1] - &worst;
                    rows.push(format!("{r_label},{i},{worst},{},{gap}", vbar[i - 1]));
                }
            }
            csv(rows)
        }
        OutputFormat::Json => self::verdict(&verdict, pi, OutputFormat::Json),
    };
    Ok((text, refuted))
}

pub fn reproduce_example1(
    bundle: &ScenarioBundle,
    horizon: usize,
    limits: &Limits,
    format: OutputFormat,
) -> Result<String> {
    let first = socval_core::equilibrium::TieBreakPolicy::FirstInActionOrder;
    let eq = socval_core::equilibrium::compute_equilibrium(
        &bundle.problem,
        &bundle.pi,
        &bundle.prior,
        horizon,
        &first,
        limits,
    )?;
    let eq_prime = socval_core::equilibrium::compute_equilibrium(
        &bundle.problem,
        &bundle.pi_prime,
        &bundle.prior,
        horizon,
        &first,
        limits,
    )?;
    let mut rows = vec!["agent,V,V_oracle,Vprime,Vprime_oracle,gap".to_string()];
    let mut records = Vec::new();
    for i in 1..=horizon {
        let oracle = bundle.oracle_value("V_pi", i).unwrap();
        let oracle_prime = bundle.oracle_value("V_pi_prime", i).unwrap();
        if eq.values[i - 1] != oracle || eq_prime.values[i - 1] != oracle_prime {
            return Err(Error::InternalDisagreement(format!(
                "engine disagrees with the closed form at agent {i}"
            )));
        }
        let gap = &eq_prime.values[i - 1] - &eq.values[i - 1];
        rows.push(format!(
            "{i},{},{oracle},{},{oracle_prime},{gap}",
            eq.values[i - 1],
            eq_prime.values[i - 1],
        ));
        records.push(json!({
            "agent": i,
            "V": eq.values[i - 1].to_string(),
            "V_oracle": oracle.to_string(),
            "Vprime": eq_prime.values[i - 1].to_string(),
            "Vprime_oracle": oracle_prime.to_string(),
            "gap": gap.to_string(),
        }));
    }
    Ok(match format {
        OutputFormat::Csv => csv(rows),
        OutputFormat::Json => schema::to_canonical_string(&json!({
            "schema": schema::SCHEMA_VERSION,
            "scenario": "example1",
            "params": bundle
                .params
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
                .collect::<Map<String, Value>>(),
            "agents": records,
        })),
    })
}

pub fn reproduce_example2(
    bundle: &ScenarioBundle,
    limits: &Limits,
    format: OutputFormat,
) -> Result<String> {
    let ours = enumerate_equilibria(&bundle.problem, &bundle.pi, &bundle.prior, 2, limits)?;
    let theirs =
        enumerate_equilibria(&bundle.problem, &bundle.pi_prime, &bundle.prior, 2, limits)?;
    let vbar = socval_core::equilibrium::observable_signal_value(
        &bundle.problem,
        &bundle.pi_prime,
        &bundle.prior,
        2,
        limits,
    )?;
    let v_pool = ours
        .equilibria
        .iter()
        .map(|eq| eq.values[1].clone())
        .reduce(Rational::min)
        .unwrap();
    let v_reveal = theirs
        .equilibria
        .iter()
        .map(|eq| eq.values[1].clone())
        .reduce(Rational::max)
        .unwrap();
    let rows = vec![
        ("V2_pi_pooling", v_pool, bundle.oracle_value("V_pi", 2).unwrap()),
        (
            "V2_piprime_revealing",
            v_reveal,
            bundle.oracle_value("V_pi_prime", 2).unwrap(),
        ),
        (
            "Vbar2_piprime",
            vbar[1].clone(),
            bundle.oracle_value("Vbar_pi_prime", 2).unwrap(),
        ),
    ];
    for (label, engine, oracle) in &rows {
        if engine != oracle {
            return Err(Error::InternalDisagreement(format!(
                "engine disagrees with the closed form for {label}"
            )));
        }
    }
    Ok(match format {
        OutputFormat::Csv => {
            let mut out = vec!["label,engine,oracle".to_string()];
            for (label, engine, oracle) in &rows {
                out.push(format!("{label},{engine},{oracle}"));
            }
            csv(out)
        }
        OutputFormat::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|(label, engine, oracle)| {
                    json!({
                        "label": label,
                        "engine": engine.to_string(),
                        "oracle": oracle.to_string(),
                    })
                })
                .collect();
            schema::to_canonical_string(&json!({
                "schema": schema::SCHEMA_VERSION,
                "scenario": "example2",
                "params": bundle
                    .params
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
                    .collect::<Map<String, Value>>(),
                "values": records,
            }))
        }
    })
}

pub fn sweep_table(
    pi: &InformationStructure,
    pi_prime: &InformationStructure,
    prior: &Prior,
    horizon: usize,
    grid: u32,
    limits: &Limits,
    format: OutputFormat,
) -> Result<String> {
    let mut rows = vec!["r,i,V,Vbar,gap".to_string()];
    let mut records = Vec::new();
    for j in 1..grid {
        let r = Rational::new(j as i64, grid as i64);
        let problem = threshold_problem(&r)?;
        let vbar = socval_core::equilibrium::observable_signal_value(
            &problem, pi_prime, prior, horizon, limits,
        )?;
        let outcome = enumerate_equilibria(&problem, pi, prior, horizon, limits)?;
        for i in 1..=horizon {
            let worst = outcome
                .equilibria
                .iter()
                .map(|eq| eq.values[i - 1].clone())
                .reduce(Rational::min)
                .unwrap();
            let gap = &vbar[i - 1] - &worst;
            rows.push(format!("{r},{i},{worst},{},{gap}", vbar[i - 1]));
            records.push(json!({
                "r": r.to_string(),
                "i": i,
                "V": worst.to_string(),
                "Vbar": vbar[i - 1].to_string(),
                "gap": gap.to_string(),
            }));
        }
    }
    Ok(match format {
        OutputFormat::Csv => csv(rows),
        OutputFormat::Json => schema::to_canonical_string(&json!({
            "schema": schema::SCHEMA_VERSION,
            "rows": records,
        })),
    })
}
