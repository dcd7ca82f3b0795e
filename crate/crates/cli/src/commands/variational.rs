use rayon::prelude::*;
use renyi_core::variational::{variational_h, variational_h_target, variational_i, variational_i_target};
use renyi_core::{OptReport, SolverConfig};

use super::{pool, scaled};
use crate::args::{Form, RunConfig, VariationalArgs};
use crate::error::CliError;
use crate::io::{fmt_f64, read_joint, Table};

pub const HEADER: [&str; 10] = [
    "alpha", "beta", "minimum", "target", "abs_error", "gap_bound", "method", "iterations", "converged", "within_tolerance",
];

pub fn variational(cfg: &RunConfig, args: &VariationalArgs) -> Result<Vec<u8>, CliError> {
    let joint = read_joint(&args.input)?;
    let solver = SolverConfig { grid_resolution: args.grid_resolution, step_tol: args.tol, ..SolverConfig::default() };
    let points: Vec<(f64, f64)> =
        args.alpha.0.iter().flat_map(|&a| args.beta.0.iter().map(move |&b| (a, b))).collect();
    let results: Vec<Result<(OptReport, f64), CliError>> = pool(cfg)?.install(|| {
        points
            .par_iter()
            .map(|&(a, b)| {
                let run = match args.form {
                    Form::H => variational_h(&joint, a, b, &solver).and_then(|r| Ok((r, variational_h_target(&joint, a, b)?))),
                    Form::I => variational_i(&joint, a, b, &solver).and_then(|r| Ok((r, variational_i_target(&joint, a, b)?))),
                };
                run.map_err(|e| CliError::config(format!("alpha={a} beta={b}: {e}")))
            })
            .collect()
    });

    let form = match args.form {
        Form::H => "h",
        Form::I => "i",
    };
    let extra = format!("form={form} step_tol={} grid_resolution={}", args.tol, args.grid_resolution);
    let mut t = Table::new(&cfg.comment("variational", &extra), &HEADER)?;
    for ((a, b), res) in points.into_iter().zip(results) {
        let (rep, target) = res?;
        let err = (rep.minimum - target).abs();
        t.row([
            fmt_f64(a),
            fmt_f64(b),
            scaled(rep.minimum, cfg),
            scaled(target, cfg),
            scaled(err, cfg),
            scaled(rep.gap_bound, cfg),
            rep.method.name().into(),
            rep.iterations.to_string(),
            rep.converged.to_string(),
            (err <= rep.gap_bound.max(1e-4)).to_string(),
        ])?;
    }
    t.into_bytes()
}
