//! Two-parameter conditional entropy `H̃_{α,β}(X|Y)` and mutual information
//! `Ĩ_{α,β}(X:Y)` on the extended square `[0, ∞]²`.
//!
//! For `α, β` in the open range both are a `β`-power mean over `y` of a
//! per-row `α`-power sum:
//!
//! ```text
//! H̃ = α/(β(1−α)) · log Σ_y P_Y(y) (Σ_x P_{X|y}(x)^α)^{β/α}
//! Ĩ = α/(β(α−1)) · log Σ_y P_Y(y) (Σ_x P_X(x)^{1−α} P_{X|y}(x)^α)^{β/α}
//! ```
//!
//! Each boundary of the square has its own closed form. At `(0, 0)` the two
//! iterated limits disagree; the `β → 0` first value is returned with a
//! warning flag. At `(1, ∞)` no value is defined and an error is returned.

use alloc::vec::Vec;

use crate::classic::{cond_entropy, mutual_information};
use crate::dist::JointPmf;
use crate::math::{log2, log2_sum_exp2, neumaier_sum};
use crate::order::{ExtOrder, OrderPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoParamBranch {
    Generic,
    AlphaOne,
    AlphaZero,
    AlphaInf,
    BetaZero,
    BetaInf,
    /// `(α, β) = (0, 0)`, taken as `β → 0` then `α → 0`.
    Corner,
}

impl TwoParamBranch {
    pub fn name(self) -> &'static str {
        match self {
            TwoParamBranch::Generic => "generic",
            TwoParamBranch::AlphaOne => "alpha_one",
            TwoParamBranch::AlphaZero => "alpha_zero",
            TwoParamBranch::AlphaInf => "alpha_inf",
            TwoParamBranch::BetaZero => "beta_zero",
            TwoParamBranch::BetaInf => "beta_inf",
            TwoParamBranch::Corner => "corner_zero_zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParamResult {
    pub value: f64,
    pub branch: TwoParamBranch,
    pub order: OrderPair,
    /// Set at `(0, 0)`: the value depends on the order in which the limits
    /// are taken.
    pub corner_warning: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum TwoParamError {
    #[error("no value is defined at (alpha, beta) = {0}")]
    UndefinedCorner(OrderPair),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TildeOptions {
    /// Reject `(0, 0)` instead of returning the iterated-limit value.
    pub strict_corner: bool,
}

/// Per-`y` data on the support of `P_Y`.
struct Rows {
    py: Vec<f64>,
    /// `P_{X|y}` for each positive-mass `y`.
    cond: Vec<Vec<f64>>,
}

fn rows(joint: &JointPmf) -> Rows {
    let (py, cond) = joint.condition_on_y();
    let mut out = Rows { py: Vec::new(), cond: Vec::new() };
    for (y, r) in cond.rows().iter().enumerate() {
        if let Some(r) = r {
            out.py.push(py.probs()[y]);
            out.cond.push(r.probs().to_vec());
        }
    }
    out
}

fn classify(order: OrderPair, opts: TildeOptions) -> Result<TwoParamBranch, TwoParamError> {
    use ExtOrder::*;
    Ok(match (order.alpha, order.beta) {
        (Zero, Zero) if opts.strict_corner => return Err(TwoParamError::UndefinedCorner(order)),
        (Zero, Zero) => TwoParamBranch::Corner,
        (One, Infinity) => return Err(TwoParamError::UndefinedCorner(order)),
        (One, _) => TwoParamBranch::AlphaOne,
        (Zero, _) => TwoParamBranch::AlphaZero,
        (Infinity, _) => TwoParamBranch::AlphaInf,
        (Finite(_), Zero) => TwoParamBranch::BetaZero,
        (Finite(_), Infinity) => TwoParamBranch::BetaInf,
        (Finite(_), _) => TwoParamBranch::Generic,
    })
}

fn result(value: f64, branch: TwoParamBranch, order: OrderPair) -> TwoParamResult {
    TwoParamResult { value, branch, order, corner_warning: branch == TwoParamBranch::Corner }
}

/// `P_Y`-weighted power mean of `exp2(v_y)` of order `β`, in the log domain:
/// `(1/β) log Σ_y P_Y 2^{β v_y}`, with `β = 0` the weighted mean of `v_y` and
/// `β = ∞` the max.
fn log_power_mean(py: &[f64], v: &[f64], beta: ExtOrder) -> f64 {
    match beta {
        ExtOrder::Zero => neumaier_sum(py.iter().zip(v).map(|(&p, &t)| p * t)),
        ExtOrder::Infinity => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        _ => {
            let b = beta.value();
            log2_sum_exp2(py.iter().zip(v).map(|(&p, &t)| log2(p) + b * t)) / b
        }
    }
}

pub fn h_tilde(joint: &JointPmf, order: OrderPair) -> Result<TwoParamResult, TwoParamError> {
    h_tilde_with(joint, order, TildeOptions::default())
}

pub fn h_tilde_with(
    joint: &JointPmf,
    order: OrderPair,
    opts: TildeOptions,
) -> Result<TwoParamResult, TwoParamError> {
    let branch = classify(order, opts)?;
    if branch == TwoParamBranch::AlphaOne {
        return Ok(result(cond_entropy(joint), branch, order));
    }
    let r = rows(joint);
    let value = match order.alpha {
        // log |supp P_{X|y}|, averaged (corner) or maximized over y.
        ExtOrder::Zero => {
            let v: Vec<f64> = r
                .cond
                .iter()
                .map(|c| log2(c.iter().filter(|&&p| p > 0.0).count() as f64))
                .collect();
            if branch == TwoParamBranch::Corner {
                neumaier_sum(r.py.iter().zip(&v).map(|(&p, &t)| p * t))
            } else {
                v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        }
        // v_y = log max_x P_{X|y}; value is −(power mean of order β).
        ExtOrder::Infinity => {
            let v: Vec<f64> =
                r.cond.iter().map(|c| log2(c.iter().copied().fold(0.0, f64::max))).collect();
            -log_power_mean(&r.py, &v, order.beta)
        }
        ExtOrder::Finite(al) => {
            // v_y = (1/α) log Σ_x P_{X|y}^α, so the value is α/(1−α) times the
            // power mean of order β.
            let v: Vec<f64> = r
                .cond
                .iter()
                .map(|c| {
                    log2_sum_exp2(c.iter().filter(|&&p| p > 0.0).map(|&p| al * log2(p))) / al
                })
                .collect();
            al / (1.0 - al) * log_power_mean(&r.py, &v, order.beta)
        }
        ExtOrder::One => unreachable!(),
    };
    Ok(result(value, branch, order))
}

pub fn i_tilde(joint: &JointPmf, order: OrderPair) -> Result<TwoParamResult, TwoParamError> {
    i_tilde_with(joint, order, TildeOptions::default())
}

pub fn i_tilde_with(
    joint: &JointPmf,
    order: OrderPair,
    opts: TildeOptions,
) -> Result<TwoParamResult, TwoParamError> {
    let branch = classify(order, opts)?;
    if branch == TwoParamBranch::AlphaOne {
        return Ok(result(mutual_information(joint), branch, order));
    }
    let px = joint.marginal_x();
    let px = px.probs();
    let r = rows(joint);
    let value = match order.alpha {
        // −log P_X(supp P_{X|y}), averaged (corner) or minimized over y.
        ExtOrder::Zero => {
            let v: Vec<f64> = r
                .cond
                .iter()
                .map(|c| {
                    -log2(neumaier_sum(
                        c.iter().zip(px).filter(|(&q, _)| q > 0.0).map(|(_, &p)| p),
                    ))
                })
                .collect();
            if branch == TwoParamBranch::Corner {
                neumaier_sum(r.py.iter().zip(&v).map(|(&p, &t)| p * t))
            } else {
                v.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
        // v_y = log max_x P_{X|y}/P_X.
        ExtOrder::Infinity => {
            let mut v = Vec::with_capacity(r.cond.len());
            for c in &r.cond {
                let mut best = f64::NEG_INFINITY;
                for (&q, &p) in c.iter().zip(px) {
                    if q > 0.0 {
                        if p <= 0.0 {
                            return Ok(result(f64::INFINITY, branch, order));
                        }
                        best = best.max(log2(q) - log2(p));
                    }
                }
                v.push(best);
            }
            log_power_mean(&r.py, &v, order.beta)
        }
        ExtOrder::Finite(al) => {
            // v_y = (1/α) log Σ_x P_X^{1−α} P_{X|y}^α.
            let mut v = Vec::with_capacity(r.cond.len());
            for c in &r.cond {
                let mut terms = Vec::with_capacity(c.len());
                for (&q, &p) in c.iter().zip(px) {
                    if q > 0.0 {
                        if p <= 0.0 {
                            // a/0 = ∞ for α > 1; for α < 1 the term vanishes.
                            if al > 1.0 {
                                return Ok(result(f64::INFINITY, branch, order));
                            }
                            continue;
                        }
                        terms.push((1.0 - al) * log2(p) + al * log2(q));
                    }
                }
                v.push(log2_sum_exp2(terms) / al);
            }
            al / (al - 1.0) * log_power_mean(&r.py, &v, order.beta)
        }
        ExtOrder::One => unreachable!(),
    };
    Ok(result(value, branch, order))
}
