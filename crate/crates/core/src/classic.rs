//! One-parameter Rényi quantities: divergence, entropy, and the classical
//! conditional-entropy and mutual-information variants.
//!
//! Sums run over exact supports in the log domain. `0/0` terms are dropped
//! and `a/0` with `a > 0` yields `+∞`, which is returned as a value.

use alloc::vec::Vec;

use crate::dist::{CondPmf, DistError, JointPmf, Pmf};
use crate::math::{log2, log2_sum_exp2, neumaier_sum, xlog2_ratio};
use crate::order::ExtOrder;

/// Which closed form produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Generic,
    AlphaOne,
    AlphaZero,
    AlphaInf,
}

impl Branch {
    pub fn of(a: ExtOrder) -> Self {
        match a {
            ExtOrder::Zero => Branch::AlphaZero,
            ExtOrder::One => Branch::AlphaOne,
            ExtOrder::Infinity => Branch::AlphaInf,
            ExtOrder::Finite(_) => Branch::Generic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Generic => "generic",
            Branch::AlphaOne => "alpha_one",
            Branch::AlphaZero => "alpha_zero",
            Branch::AlphaInf => "alpha_inf",
        }
    }
}

/// A value in bits (possibly `+∞`) and the branch that computed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub branch: Branch,
}

impl MeasureResult {
    fn new(value: f64, a: ExtOrder) -> Self {
        MeasureResult { value, branch: Branch::of(a) }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("alphabets differ: {left} vs {right} symbols")]
    AlphabetMismatch { left: usize, right: usize },
    #[error(transparent)]
    Dist(#[from] DistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CondEntropyVariant {
    /// `−D_α(P_XY ‖ 𝟙_X × P_Y)`.
    H,
    /// Arimoto.
    HStar,
    /// Cachin: `P_Y`-average of row entropies.
    HBar,
    /// Worst case over `y`: max for `α < 1`, min for `α > 1`.
    HBarStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutualInfoVariant {
    /// `D_α(P_XY ‖ P_X × P_Y)`.
    I,
    /// Sibson.
    IStar,
    /// Augustin–Csiszár: `P_Y`-average of `D_α(P_{X|y} ‖ P_X)`.
    IBar,
    /// Extremum over `y` of `D_α(P_{X|y} ‖ P_X)`: min for `α < 1`, max for `α > 1`.
    IBarStar,
}

/// `D_α(p ‖ q)` where `q` may be any non-negative measure, such as the
/// counting measure `𝟙`.
pub fn divergence_slices(p: &[f64], q: &[f64], a: ExtOrder) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let pairs = || p.iter().copied().zip(q.iter().copied()).filter(|&(pi, _)| pi > 0.0);
    match a {
        ExtOrder::One => {
            let mut terms = Vec::with_capacity(p.len());
            for (pi, qi) in pairs() {
                let t = xlog2_ratio(pi, qi);
                if t == f64::INFINITY {
                    return f64::INFINITY;
                }
                terms.push(t);
            }
            neumaier_sum(terms)
        }
        ExtOrder::Zero => {
            let mass = neumaier_sum(pairs().map(|(_, qi)| qi));
            -log2(mass)
        }
        ExtOrder::Infinity => {
            let mut best = f64::NEG_INFINITY;
            for (pi, qi) in pairs() {
                if qi <= 0.0 {
                    return f64::INFINITY;
                }
                best = best.max(log2(pi) - log2(qi));
            }
            best
        }
        ExtOrder::Finite(al) => {
            if al > 1.0 && pairs().any(|(_, qi)| qi <= 0.0) {
                return f64::INFINITY;
            }
            let lse = log2_sum_exp2(pairs().map(|(pi, qi)| {
                if qi <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    al * log2(pi) + (1.0 - al) * log2(qi)
                }
            }));
            // Disjoint supports with α < 1 give lse = −∞ and hence +∞.
            lse / (al - 1.0)
        }
    }
}

fn check_same(p: &Pmf, q: &Pmf) -> Result<(), MeasureError> {
    if p.len() != q.len() || p.alphabet() != q.alphabet() {
        return Err(MeasureError::AlphabetMismatch { left: p.len(), right: q.len() });
    }
    Ok(())
}

/// `D_α(p ‖ q)`. `D_0 = −log q(supp p)` and `D_∞ = log max_{p>0} p/q`.
pub fn renyi_divergence(p: &Pmf, q: &Pmf, a: ExtOrder) -> Result<MeasureResult, MeasureError> {
    check_same(p, q)?;
    Ok(MeasureResult::new(divergence_slices(p.probs(), q.probs(), a), a))
}

/// `D(p ‖ q)` in bits.
pub fn relative_entropy(p: &Pmf, q: &Pmf) -> Result<f64, MeasureError> {
    check_same(p, q)?;
    Ok(divergence_slices(p.probs(), q.probs(), ExtOrder::One))
}

/// `D_α(P_X·P_{Y|X} ‖ P_X·Q_{Y|X})`.
pub fn cond_renyi_divergence(
    pyx: &CondPmf,
    qyx: &CondPmf,
    px: &Pmf,
    a: ExtOrder,
) -> Result<MeasureResult, MeasureError> {
    if pyx.outcome_len() != qyx.outcome_len() {
        return Err(MeasureError::AlphabetMismatch {
            left: pyx.outcome_len(),
            right: qyx.outcome_len(),
        });
    }
    let p = JointPmf::from_input_and_channel(px, pyx)?;
    let q = JointPmf::from_input_and_channel(px, qyx)?;
    Ok(MeasureResult::new(divergence_slices(p.probs(), q.probs(), a), a))
}

/// `H_α(p) = −D_α(p ‖ 𝟙)`.
pub fn renyi_entropy(p: &Pmf, a: ExtOrder) -> MeasureResult {
    MeasureResult::new(entropy_slice(p.probs(), a), a)
}

pub(crate) fn entropy_slice(p: &[f64], a: ExtOrder) -> f64 {
    match a {
        ExtOrder::One => shannon_entropy_slice(p),
        ExtOrder::Zero => log2(p.iter().filter(|&&v| v > 0.0).count() as f64),
        ExtOrder::Infinity => -log2(p.iter().copied().fold(0.0, f64::max)),
        ExtOrder::Finite(al) => {
            let lse = log2_sum_exp2(p.iter().filter(|&&v| v > 0.0).map(|&v| al * log2(v)));
            lse / (1.0 - al)
        }
    }
}

pub fn shannon_entropy_slice(p: &[f64]) -> f64 {
    -neumaier_sum(p.iter().map(|&v| crate::math::xlog2x(v)))
}

pub fn shannon_entropy(p: &Pmf) -> f64 {
    shannon_entropy_slice(p.probs())
}

/// `H(X|Y)` of a flat row-major `nx × ny` joint, conditioning on the support
/// of its `Y` marginal. `q` need not be exactly normalized.
pub fn cond_entropy_flat(q: &[f64], nx: usize, ny: usize) -> f64 {
    let qy = col_sums(q, nx, ny);
    -neumaier_sum((0..nx).flat_map(|x| {
        let qy = &qy;
        (0..ny).map(move |y| xlog2_ratio(q[x * ny + y], qy[y]))
    }))
}

/// `D(Q_{X|Y} ‖ P_X | Q_Y) = Σ q(x,y) log(q(x,y) / (Q_Y(y) P_X(x)))`.
pub fn cond_divergence_to_marginal_flat(q: &[f64], px: &[f64], nx: usize, ny: usize) -> f64 {
    let qy = col_sums(q, nx, ny);
    let mut terms = Vec::with_capacity(nx * ny);
    for x in 0..nx {
        for y in 0..ny {
            let t = xlog2_ratio(q[x * ny + y], qy[y] * px[x]);
            if t == f64::INFINITY {
                return f64::INFINITY;
            }
            terms.push(t);
        }
    }
    neumaier_sum(terms)
}

pub(crate) fn col_sums(q: &[f64], nx: usize, ny: usize) -> Vec<f64> {
    (0..ny).map(|y| neumaier_sum((0..nx).map(|x| q[x * ny + y]))).collect()
}

/// Shannon `H(X|Y)`.
pub fn cond_entropy(joint: &JointPmf) -> f64 {
    cond_entropy_flat(joint.probs(), joint.nx(), joint.ny())
}

/// Shannon `I(X:Y)`.
pub fn mutual_information(joint: &JointPmf) -> f64 {
    let px = joint.marginal_x();
    cond_divergence_to_marginal_flat(joint.probs(), px.probs(), joint.nx(), joint.ny())
}

/// `𝟙_X × P_Y` as a flat reference measure.
fn counting_times_py(joint: &JointPmf, py: &Pmf) -> Vec<f64> {
    let mut r = Vec::with_capacity(joint.nx() * joint.ny());
    for _ in 0..joint.nx() {
        r.extend_from_slice(py.probs());
    }
    r
}

/// Positive-mass `y` indices with their conditional rows.
fn rows_on_support(joint: &JointPmf) -> (Pmf, Vec<(usize, Pmf)>) {
    let (py, cond) = joint.condition_on_y();
    let rows = cond
        .rows()
        .iter()
        .enumerate()
        .filter_map(|(y, r)| r.clone().map(|r| (y, r)))
        .collect();
    (py, rows)
}

pub fn cond_entropy_variant(
    variant: CondEntropyVariant,
    joint: &JointPmf,
    a: ExtOrder,
) -> MeasureResult {
    let value = match variant {
        CondEntropyVariant::H => {
            if a.is_one() {
                cond_entropy(joint)
            } else {
                let py = joint.marginal_y();
                -divergence_slices(joint.probs(), &counting_times_py(joint, &py), a)
            }
        }
        CondEntropyVariant::HStar => arimoto(joint, a),
        CondEntropyVariant::HBar => {
            let (py, rows) = rows_on_support(joint);
            neumaier_sum(rows.iter().map(|(y, r)| py.probs()[*y] * entropy_slice(r.probs(), a)))
        }
        CondEntropyVariant::HBarStar => {
            let (py, rows) = rows_on_support(joint);
            let per_row = rows.iter().map(|(_, r)| entropy_slice(r.probs(), a));
            match a {
                ExtOrder::One => neumaier_sum(
                    rows.iter().map(|(y, r)| py.probs()[*y] * entropy_slice(r.probs(), a)),
                ),
                ExtOrder::Zero => per_row.fold(f64::NEG_INFINITY, f64::max),
                ExtOrder::Finite(al) if al < 1.0 => per_row.fold(f64::NEG_INFINITY, f64::max),
                _ => per_row.fold(f64::INFINITY, f64::min),
            }
        }
    };
    MeasureResult::new(value, a)
}

/// Arimoto's `(α/(1−α)) log Σ_y ‖P_XY(·, y)‖_α`, evaluated on the joint
/// directly rather than through conditional rows.
fn arimoto(joint: &JointPmf, a: ExtOrder) -> f64 {
    let (nx, ny) = (joint.nx(), joint.ny());
    match a {
        ExtOrder::One => cond_entropy(joint),
        ExtOrder::Zero => {
            let best = (0..ny)
                .map(|y| (0..nx).filter(|&x| joint.get(x, y) > 0.0).count())
                .max()
                .unwrap_or(0);
            log2(best as f64)
        }
        ExtOrder::Infinity => {
            let s = neumaier_sum((0..ny).map(|y| (0..nx).map(|x| joint.get(x, y)).fold(0.0, f64::max)));
            -log2(s)
        }
        ExtOrder::Finite(al) => {
            let outer = log2_sum_exp2((0..ny).map(|y| {
                let inner = log2_sum_exp2(
                    (0..nx)
                        .map(|x| joint.get(x, y))
                        .filter(|&v| v > 0.0)
                        .map(|v| al * log2(v)),
                );
                inner / al
            }));
            al / (1.0 - al) * outer
        }
    }
}

/// Sibson's `(α/(α−1)) log Σ_y (Σ_x P_X P_{Y|X}^α)^{1/α}`, evaluated on the
/// joint as `Σ_x P_X^{1−α} P_XY^α`.
fn sibson(joint: &JointPmf, a: ExtOrder) -> f64 {
    let (nx, ny) = (joint.nx(), joint.ny());
    let px = joint.marginal_x();
    let px = px.probs();
    match a {
        ExtOrder::One => mutual_information(joint),
        ExtOrder::Zero => {
            let best = (0..ny)
                .map(|y| neumaier_sum((0..nx).filter(|&x| joint.get(x, y) > 0.0).map(|x| px[x])))
                .fold(0.0, f64::max);
            -log2(best)
        }
        ExtOrder::Infinity => {
            let s = neumaier_sum((0..ny).map(|y| {
                (0..nx)
                    .filter(|&x| joint.get(x, y) > 0.0)
                    .map(|x| joint.get(x, y) / px[x])
                    .fold(0.0, f64::max)
            }));
            log2(s)
        }
        ExtOrder::Finite(al) => {
            let outer = log2_sum_exp2((0..ny).map(|y| {
                let inner = log2_sum_exp2(
                    (0..nx)
                        .filter(|&x| joint.get(x, y) > 0.0)
                        .map(|x| (1.0 - al) * log2(px[x]) + al * log2(joint.get(x, y))),
                );
                inner / al
            }));
            al / (al - 1.0) * outer
        }
    }
}

pub fn mutual_info_variant(
    variant: MutualInfoVariant,
    joint: &JointPmf,
    a: ExtOrder,
) -> MeasureResult {
    let value = match variant {
        MutualInfoVariant::I => {
            if a.is_one() {
                mutual_information(joint)
            } else {
                let px = joint.marginal_x();
                let py = joint.marginal_y();
                let prod = JointPmf::independent(&px, &py);
                divergence_slices(joint.probs(), prod.probs(), a)
            }
        }
        MutualInfoVariant::IStar => sibson(joint, a),
        MutualInfoVariant::IBar => {
            let px = joint.marginal_x();
            let (py, rows) = rows_on_support(joint);
            neumaier_sum(
                rows.iter()
                    .map(|(y, r)| py.probs()[*y] * divergence_slices(r.probs(), px.probs(), a)),
            )
        }
        MutualInfoVariant::IBarStar => {
            let px = joint.marginal_x();
            let (_, rows) = rows_on_support(joint);
            let per_row = rows.iter().map(|(_, r)| divergence_slices(r.probs(), px.probs(), a));
            match a {
                ExtOrder::One => mutual_information(joint),
                ExtOrder::Zero => per_row.fold(f64::INFINITY, f64::min),
                ExtOrder::Finite(al) if al < 1.0 => per_row.fold(f64::INFINITY, f64::min),
                _ => per_row.fold(f64::NEG_INFINITY, f64::max),
            }
        }
    };
    MeasureResult::new(value, a)
}
