use rayon::prelude::*;
use renyi_core::{pa_exponent, sc_exponent, ExponentConfig, ExponentResult, Rate};

use super::{pool, scaled};
use crate::args::{ExponentArgs, RunConfig, Task};
use crate::error::CliError;
use crate::io::{fmt_f64, fmt_opt, read_joint, Table};

pub const HEADER: [&str; 7] = ["beta", "rate", "value", "arg_alpha", "dual_value", "gap", "branch"];

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn exponent(cfg: &RunConfig, args: &ExponentArgs) -> Result<Vec<u8>, CliError> {
    let joint = read_joint(&args.input)?;
    let ecfg = ExponentConfig {
        grid_step: args.grid_step,
        golden_tol: args.tol,
        with_dual: !args.no_dual,
        ..ExponentConfig::default()
    };
    let betas = sorted(&args.beta.0);
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(CliError::config(format!("--beta: exponents need finite beta > 0, got {b}")));
    }
    let rates = sorted(&args.rate.0);
    let points: Vec<(f64, f64)> = betas.iter().flat_map(|&b| rates.iter().map(move |&r| (b, r))).collect();
    let f = match args.task {
        Task::Pa => pa_exponent,
        Task::Sc => sc_exponent,
    };
    let results: Vec<Result<ExponentResult, CliError>> = pool(cfg)?.install(|| {
        points
            .par_iter()
            .map(|&(b, r)| {
                let rate = Rate::new(r / cfg.unit()).map_err(|e| CliError::config(e.to_string()))?;
                f(&joint, b, rate, &ecfg).map_err(|e| CliError::Compute(e.to_string()))
            })
            .collect()
    });

    let task = match args.task {
        Task::Pa => "pa",
        Task::Sc => "sc",
    };
    let extra = format!("task={task} grid_step={} tol={} dual={}", args.grid_step, args.tol, !args.no_dual);
    let mut t = Table::new(&cfg.comment("exponent", &extra), &HEADER)?;
    for ((b, r), res) in points.into_iter().zip(results) {
        let e = res?;
        t.row([
            fmt_f64(b),
            fmt_f64(r),
            scaled(e.value, cfg),
            fmt_opt(e.arg_alpha),
            e.dual_value.map(|v| scaled(v, cfg)).unwrap_or_default(),
            e.dual_gap.map(|v| scaled(v, cfg)).unwrap_or_default(),
            e.branch.name().into(),
        ])?;
    }
    t.into_bytes()
}
