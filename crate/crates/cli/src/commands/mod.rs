//! One module per subcommand. Each builds its output in memory so files are
//! written whole and in a deterministic order.

mod exponent;
mod measure;
mod simulate;
mod sweep;
mod variational;
mod verify;

pub use exponent::exponent;
pub use measure::measure;
pub use simulate::simulate;
pub use sweep::sweep;
pub use variational::variational;
pub use verify::{verify, verify_with, VerifyReport};

use rayon::{ThreadPool, ThreadPoolBuilder};
use renyi_core::two_param::{h_tilde_with, i_tilde_with, TildeOptions, TwoParamError};
use renyi_core::{ExtOrder, JointPmf, OrderPair};

use crate::args::{Command, Quantity, RunConfig};
use crate::error::CliError;
use crate::io::{emit, fmt_f64};

/// Runs the configured command and writes its output.
pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    let bytes = match &cfg.command {
        Command::Measure(a) => measure(cfg, a)?,
        Command::Exponent(a) => exponent(cfg, a)?,
        Command::Variational(a) => variational(cfg, a)?,
        Command::Simulate(a) => simulate(cfg, a)?,
        Command::Sweep(a) => sweep(cfg, a)?,
        Command::Verify(a) => {
            let report = verify(cfg, a)?;
            emit(cfg.out.as_ref(), report.json.as_bytes())?;
            return match report.failed {
                0 => Ok(()),
                failed => Err(CliError::VerificationFailed { failed, total: report.total }),
            };
        }
    };
    emit(cfg.out.as_ref(), &bytes)
}

/// A bounded pool; `map` results come back in input order.
pub(crate) fn pool(cfg: &RunConfig) -> Result<ThreadPool, CliError> {
    let mut b = ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Compute(e.to_string()))
}

pub(crate) fn order(v: f64, flag: &str) -> Result<ExtOrder, CliError> {
    ExtOrder::new(v).map_err(|e| CliError::config(format!("--{flag}: {e}")))
}

/// Value and branch name of `H̃` or `Ĩ`; `(1, ∞)` yields NaN and
/// `undefined`, a strict-mode corner is an error.
pub(crate) fn tilde(
    q: Quantity,
    joint: &JointPmf,
    alpha: f64,
    beta: f64,
    strict: bool,
) -> Result<(f64, &'static str), CliError> {
    let o = OrderPair::new(order(alpha, "alpha")?, order(beta, "beta")?);
    let opts = TildeOptions { strict_corner: strict };
    let r = match q {
        Quantity::HTilde => h_tilde_with(joint, o, opts),
        _ => i_tilde_with(joint, o, opts),
    };
    match r {
        Ok(r) => Ok((r.value, r.branch.name())),
        Err(TwoParamError::UndefinedCorner(p)) if p.is_discontinuity_corner() => Err(CliError::config(format!(
            "{} at (0, 0) depends on the order of limits; drop --strict-corner to use the beta-first value",
            q.name()
        ))),
        Err(TwoParamError::UndefinedCorner(_)) => Ok((f64::NAN, "undefined")),
    }
}

pub(crate) fn scaled(v: f64, cfg: &RunConfig) -> String {
    fmt_f64(v * cfg.unit())
}
