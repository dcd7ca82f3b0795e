use rayon::prelude::*;

use super::{scaled, tilde, pool};
use crate::args::{Quantity, RunConfig, SweepArgs};
use crate::error::CliError;
use crate::io::{fmt_f64, read_joint, Table};

pub const HEADER: [&str; 6] = ["input", "quantity", "alpha", "beta", "value", "branch"];

pub fn sweep(cfg: &RunConfig, args: &SweepArgs) -> Result<Vec<u8>, CliError> {
    if let Some(q) = args.quantity.iter().find(|q| !q.two_parameter()) {
        return Err(CliError::config(format!("sweep covers h-tilde and i-tilde, not {}", q.name())));
    }
    let joints = args.input.iter().map(|p| read_joint(p)).collect::<Result<Vec<_>, _>>()?;
    let mut cells = Vec::new();
    for (i, _) in joints.iter().enumerate() {
        for &q in &args.quantity {
            for &a in &args.alpha.0 {
                for &b in &args.beta.0 {
                    cells.push((i, q, a, b));
                }
            }
        }
    }
    let values: Vec<Result<(f64, &'static str), CliError>> = pool(cfg)?.install(|| {
        cells.par_iter().map(|&(i, q, a, b)| tilde(q, &joints[i], a, b, args.strict_corner)).collect()
    });

    let mut t = Table::new(&cfg.comment("sweep", ""), &HEADER)?;
    for (&(i, q, a, b), v) in cells.iter().zip(values) {
        let (v, branch) = v?;
        let q: Quantity = q;
        t.row([
            args.input[i].display().to_string(),
            q.name().into(),
            fmt_f64(a),
            fmt_f64(b),
            scaled(v, cfg),
            branch.into(),
        ])?;
    }
    t.into_bytes()
}
