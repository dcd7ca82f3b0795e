use rayon::prelude::*;
use renyi_core::protocol::{pa_one_shot_bound, range_size_for_rate, sc_one_shot_bound, BoundCheck};
use renyi_core::{
    pa_min_divergence_exhaustive, pa_universal_family_divergence, sc_expected_divergence_exact,
    sc_expected_divergence_mc, JointPmf, SimRecord,
};

use super::pool;
use crate::args::{Estimator, Family, RunConfig, SimulateArgs, Task};
use crate::error::CliError;
use crate::io::{fmt_f64, read_joint, Table};

pub const HEADER: [&str; 12] = [
    "n", "M", "beta", "estimator", "value", "stderr", "seed", "rounding_note", "caveat", "bound", "margin", "per_letter",
];

/// One `(n, M, β)` cell of the simulation grid.
#[derive(Debug, Clone)]
struct Point {
    n: usize,
    m: usize,
    beta: f64,
    note: String,
}

fn points(cfg: &RunConfig, args: &SimulateArgs) -> Vec<Point> {
    let mut out = Vec::new();
    for &n in &args.n {
        let sizes: Vec<(usize, String)> = match (&args.m, &args.rate) {
            (Some(ms), _) => ms.iter().map(|&m| (m, format!("M={m} given"))).collect(),
            (None, Some(rates)) => rates.0.iter().map(|&r| range_size_for_rate(n, r / cfg.unit())).collect(),
            (None, None) => unreachable!("checked when the run was configured"),
        };
        for (m, note) in sizes {
            for &beta in &args.beta.0 {
                out.push(Point { n, m, beta, note: note.clone() });
            }
        }
    }
    out
}

fn run_pa(joint: &JointPmf, p: &Point, args: &SimulateArgs, seed: u64) -> Result<Vec<(SimRecord, f64)>, CliError> {
    let cap = usize::try_from(args.cap).unwrap_or(usize::MAX);
    let block = joint.power_with_cap(p.n, cap)?;
    let bound = pa_one_shot_bound(joint, p.n, p.m, p.beta)?;
    let mut rec = match args.family {
        Family::Exhaustive => pa_min_divergence_exhaustive(&block, p.m, p.beta, args.cap)?.2,
        Family::Affine => pa_universal_family_divergence(&block, p.m, p.beta, args.samples, seed)?.record,
    };
    rec.n = p.n;
    Ok(vec![(rec, bound)])
}

fn run_sc(joint: &JointPmf, p: &Point, args: &SimulateArgs, seed: u64) -> Result<Vec<(SimRecord, f64)>, CliError> {
    let (px, pyx) = joint.condition_on_x();
    let bound = sc_one_shot_bound(&px, &pyx, p.n, p.m, p.beta)?;
    let exact = || sc_expected_divergence_exact(&px, &pyx, p.n, p.m, p.beta, args.cap);
    let mc = || sc_expected_divergence_mc(&px, &pyx, p.n, p.m, p.beta, args.samples, seed);
    let recs = match args.estimator {
        Estimator::Exact => vec![exact()?],
        Estimator::Mc => vec![mc()?],
        Estimator::Both => vec![exact()?, mc()?],
    };
    Ok(recs.into_iter().map(|r| (r, bound)).collect())
}

pub fn simulate(cfg: &RunConfig, args: &SimulateArgs) -> Result<Vec<u8>, CliError> {
    let joint = read_joint(&args.input)?;
    let grid = points(cfg, args);
    let results: Vec<Result<Vec<(SimRecord, f64)>, CliError>> = pool(cfg)?.install(|| {
        grid.par_iter()
            .map(|p| match args.task {
                Task::Pa => run_pa(&joint, p, args, cfg.seed),
                Task::Sc => run_sc(&joint, p, args, cfg.seed),
            })
            .collect()
    });

    let extra = match args.task {
        Task::Pa => format!("task=pa family={:?} cap={}", args.family, args.cap).to_lowercase(),
        Task::Sc => format!("task=sc estimator={:?} cap={}", args.estimator, args.cap).to_lowercase(),
    };
    let mut t = Table::new(&cfg.comment("simulate", &extra), &HEADER)?;
    for (p, res) in grid.iter().zip(results) {
        for (rec, bound) in res? {
            let check = BoundCheck::new(rec.value_bits, bound);
            let u = cfg.unit();
            let note = if rec.rounding_note.is_empty() { p.note.clone() } else { format!("{}; {}", p.note, rec.rounding_note) };
            t.row([
                rec.n.to_string(),
                rec.m.to_string(),
                fmt_f64(rec.beta),
                rec.estimator.label(),
                fmt_f64(rec.value_bits * u),
                rec.stderr.map(|s| fmt_f64(s * u)).unwrap_or_default(),
                rec.seed.map(|s| s.to_string()).unwrap_or_default(),
                note,
                rec.caveat.unwrap_or_default().to_string(),
                fmt_f64(check.bound * u),
                fmt_f64(check.margin * u),
                fmt_f64(rec.value_bits * u / rec.n as f64),
            ])?;
        }
    }
    t.into_bytes()
}
