use renyi_core::props::Library;
use renyi_core::{run_properties, MeasureSource, PropertyId, VerifyConfig};
use serde::Serialize;

use crate::args::{RunConfig, VerifyArgs};
use crate::error::CliError;

/// The JSON report and its tally.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub json: String,
    pub failed: usize,
    pub total: usize,
}

#[derive(Serialize)]
struct Json<'a> {
    version: &'a str,
    seed: u64,
    samples: usize,
    tol: f64,
    passed: bool,
    failed: usize,
    results: Vec<Entry>,
}

#[derive(Serialize)]
struct Entry {
    id: &'static str,
    description: &'static str,
    passed: bool,
    checks: usize,
    violations: usize,
    worst_excess: f64,
    counterexample: Option<Witness>,
}

#[derive(Serialize)]
struct Witness {
    detail: String,
    lhs: f64,
    rhs: f64,
}

pub fn verify(cfg: &RunConfig, args: &VerifyArgs) -> Result<VerifyReport, CliError> {
    verify_with(&Library, cfg, args)
}

/// Runs the suite against any implementation of the measures.
pub fn verify_with(source: &dyn MeasureSource, cfg: &RunConfig, args: &VerifyArgs) -> Result<VerifyReport, CliError> {
    let ids: Vec<PropertyId> = args.props.clone().unwrap_or_else(|| PropertyId::ALL.to_vec());
    let vcfg = VerifyConfig { seed: cfg.seed, samples: args.samples, slack: args.tol, ..VerifyConfig::default() };
    let outcomes = run_properties(source, &ids, &vcfg);
    let results: Vec<Entry> = outcomes
        .iter()
        .map(|o| Entry {
            id: o.id.as_str(),
            description: o.id.description(),
            passed: o.passed(),
            checks: o.checks,
            violations: o.violations,
            worst_excess: o.worst_excess,
            counterexample: o.counterexample.as_ref().map(|c| Witness { detail: c.detail.clone(), lhs: c.lhs, rhs: c.rhs }),
        })
        .collect();
    let failed = results.iter().filter(|e| !e.passed).count();
    let total = results.len();
    let report = Json {
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        samples: args.samples,
        tol: args.tol,
        passed: failed == 0,
        failed,
        results,
    };
    let mut json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Compute(e.to_string()))?;
    json.push('\n');
    Ok(VerifyReport { json, failed, total })
}
