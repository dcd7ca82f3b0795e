//! Desk-scale simulation of privacy amplification by hashing and of soft
//! covering by random codebooks.
//!
//! Everything here is exact enumeration or seeded Monte Carlo on small
//! alphabets; it exists to check one-shot converse bounds and exponent
//! trends, not to extract keys.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classic::{
    cond_entropy_variant, divergence_slices, mutual_info_variant, CondEntropyVariant, MutualInfoVariant,
};
use crate::dist::{CondPmf, DistError, JointPmf, Pmf};
use crate::exponents::{alpha_coefficient, maximize_over_alpha, one_shot_pa_lower_bound};
use crate::math::{exp2, log2, neumaier_sum, pos_part, powf, sqrt};
use crate::order::{ExtOrder, OrderPair};
use crate::two_param::{h_tilde, i_tilde};

/// Default limit on enumerated hash tables or codebooks.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Fewest Monte-Carlo codebooks accepted.
pub const MIN_MC_SAMPLES: usize = 1000;

/// Margin below which a one-shot bound check fails.
pub const BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("hash table covers {got} symbols but the joint has {expected}")]
    DomainMismatch { expected: usize, got: usize },
    #[error("hash value {value} outside range of size {m}")]
    RangeMismatch { value: usize, m: usize },
    #[error("{count} cases exceed the enumeration cap of {cap}")]
    EnumerationCap { count: f64, cap: u64 },
    #[error("alphabet size {0} is not a power of two")]
    NonPowerOfTwoAlphabet(usize),
    #[error("beta {0} is outside [1, 2], the range covered by a 2-universal family")]
    BetaOutOfFamilyRange(f64),
    #[error("beta must be finite and positive, got {0}")]
    InvalidBeta(f64),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("M must be at least 1")]
    EmptyRange,
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// A hash function `h: X → {0, …, m−1}` stored as a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashSpec {
    pub table: Vec<usize>,
    pub m: usize,
}

impl HashSpec {
    pub fn new(table: Vec<usize>, m: usize) -> Result<Self, ProtocolError> {
        if m == 0 {
            return Err(ProtocolError::EmptyRange);
        }
        if let Some(&value) = table.iter().find(|&&z| z >= m) {
            return Err(ProtocolError::RangeMismatch { value, m });
        }
        Ok(HashSpec { table, m })
    }

    pub fn identity(n: usize) -> Self {
        HashSpec { table: (0..n).collect(), m: n }
    }

    pub fn constant(n: usize, m: usize) -> Self {
        HashSpec { table: vec![0; n], m: m.max(1) }
    }
}

/// Families from which hashes are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HashFamily {
    /// Every table `X → [m]`.
    Exhaustive,
    /// `z = A x ⊕ b` on bit vectors, which is 2-universal.
    AffineOverBits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    ExactEnumeration,
    MonteCarlo { samples: usize },
    ExhaustiveHash { tables: u64 },
    AffineFamily { samples: usize },
}

impl Estimator {
    pub fn label(&self) -> String {
        match self {
            Estimator::ExactEnumeration => "exact-enumeration".into(),
            Estimator::MonteCarlo { samples } => format!("monte-carlo({samples})"),
            Estimator::ExhaustiveHash { tables } => format!("exhaustive-hash({tables})"),
            Estimator::AffineFamily { samples } => format!("affine-family({samples})"),
        }
    }
}

/// One simulated divergence value.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub n: usize,
    pub m: usize,
    pub beta: f64,
    pub estimator: Estimator,
    pub value_bits: f64,
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
    pub rounding_note: String,
    pub caveat: Option<&'static str>,
}

/// `M = max(1, round(2^{nR}))` and a note recording the rule.
pub fn range_size_for_rate(n: usize, rate: f64) -> (usize, String) {
    let exact = exp2(n as f64 * rate);
    let m = libm::round(exact).max(1.0) as usize;
    (m, format!("M=max(1,round(2^(n*R)))={m} from 2^{}={exact}", n as f64 * rate))
}

fn check_beta(beta: f64) -> Result<ExtOrder, ProtocolError> {
    if beta.is_finite() && beta > 0.0 {
        Ok(ExtOrder::new(beta).expect("positive finite"))
    } else {
        Err(ProtocolError::InvalidBeta(beta))
    }
}

/// `𝓡_h(P)(z, y) = Σ_{x ∈ h⁻¹(z)} P(x, y)`.
pub fn pa_apply_hash(joint: &JointPmf, h: &HashSpec) -> Result<JointPmf, ProtocolError> {
    if h.table.len() != joint.nx() {
        return Err(ProtocolError::DomainMismatch { expected: joint.nx(), got: h.table.len() });
    }
    Ok(joint.map_x(&h.table, h.m)?)
}

/// `D_β(P_ZY ‖ 𝟙_Z/|Z| × P_Y)` for a joint already on `Z × Y`.
pub fn divergence_from_ideal(hashed: &JointPmf, beta: ExtOrder) -> f64 {
    let m = hashed.nx();
    let py = hashed.marginal_y();
    let mut ideal = Vec::with_capacity(m * hashed.ny());
    for _ in 0..m {
        ideal.extend(py.probs().iter().map(|&p| p / m as f64));
    }
    divergence_slices(hashed.probs(), &ideal, beta)
}

/// `D_β(𝓡_h(P) ‖ 𝟙_Z/M × P_Y)`.
pub fn pa_hash_divergence(joint: &JointPmf, h: &HashSpec, beta: f64) -> Result<f64, ProtocolError> {
    let b = check_beta(beta)?;
    Ok(divergence_from_ideal(&pa_apply_hash(joint, h)?, b))
}

fn table_count(nx: usize, m: usize) -> Option<u64> {
    (m as u64).checked_pow(u32::try_from(nx).ok()?)
}

/// Calls `f` on every table `X → [m]` in lexicographic order.
pub fn for_each_hash(
    nx: usize,
    m: usize,
    cap: u64,
    mut f: impl FnMut(&HashSpec),
) -> Result<u64, ProtocolError> {
    if m == 0 {
        return Err(ProtocolError::EmptyRange);
    }
    let count = match table_count(nx, m) {
        Some(c) if c <= cap => c,
        Some(c) => return Err(ProtocolError::EnumerationCap { count: c as f64, cap }),
        None => return Err(ProtocolError::EnumerationCap { count: powf(m as f64, nx as f64), cap }),
    };
    let mut h = HashSpec { table: vec![0; nx], m };
    loop {
        f(&h);
        // Mixed-radix increment, last position fastest.
        let mut i = nx;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            h.table[i] += 1;
            if h.table[i] < m {
                break;
            }
            h.table[i] = 0;
        }
    }
}

/// Minimum of `D_β(𝓡_h(P) ‖ 𝟙/M × P_Y)` over all tables; the first table in
/// lexicographic order wins ties.
pub fn pa_min_divergence_exhaustive(
    joint: &JointPmf,
    m: usize,
    beta: f64,
    cap: u64,
) -> Result<(f64, HashSpec, SimRecord), ProtocolError> {
    let b = check_beta(beta)?;
    let mut best: Option<(f64, HashSpec)> = None;
    let mut err = None;
    let tables = for_each_hash(joint.nx(), m, cap, |h| {
        match joint.map_x(&h.table, m) {
            Ok(z) => {
                let d = divergence_from_ideal(&z, b);
                if best.as_ref().is_none_or(|(v, _)| d < *v) {
                    best = Some((d, h.clone()));
                }
            }
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    let (v, h) = best.expect("at least one table");
    let rec = SimRecord {
        n: 1,
        m,
        beta,
        estimator: Estimator::ExhaustiveHash { tables },
        value_bits: v,
        stderr: None,
        seed: None,
        rounding_note: String::new(),
        caveat: None,
    };
    Ok((v, h, rec))
}

/// Outcome of sampling the affine family.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineReport {
    /// Smallest divergence among the sampled hashes.
    pub best: f64,
    pub best_hash: HashSpec,
    /// Mean divergence over the sample; some hash is at least this good.
    pub mean: f64,
    pub record: SimRecord,
}

fn bits_of(n: usize) -> Result<u32, ProtocolError> {
    if n.is_power_of_two() {
        Ok(n.trailing_zeros())
    } else {
        Err(ProtocolError::NonPowerOfTwoAlphabet(n))
    }
}

/// `x ↦ A x ⊕ b` with `A` an `l × k` bit matrix stored as row masks.
fn affine_table(rows: &[u64], offset: u64, k: u32) -> Vec<usize> {
    (0..(1u64 << k))
        .map(|x| {
            let mut z = 0u64;
            for (j, &r) in rows.iter().enumerate() {
                z |= (((r & x).count_ones() as u64) & 1) << j;
            }
            (z ^ offset) as usize
        })
        .collect()
}

/// Samples hashes `z = A x ⊕ b` uniformly and reports the best and mean
/// divergence from the ideal. Requires power-of-two sizes and `β ∈ [1, 2]`.
pub fn pa_universal_family_divergence(
    joint: &JointPmf,
    m: usize,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<AffineReport, ProtocolError> {
    let b = check_beta(beta)?;
    if !(1.0..=2.0).contains(&beta) {
        return Err(ProtocolError::BetaOutOfFamilyRange(beta));
    }
    let k = bits_of(joint.nx())?;
    let l = bits_of(m)?;
    if samples == 0 {
        return Err(ProtocolError::TooFewSamples { min: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut best: Option<(f64, HashSpec)> = None;
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let rows: Vec<u64> = (0..l).map(|_| rng.random::<u64>() & mask).collect();
        let offset = if l == 0 { 0 } else { rng.random::<u64>() & ((1u64 << l) - 1) };
        let h = HashSpec { table: affine_table(&rows, offset, k), m };
        let d = divergence_from_ideal(&joint.map_x(&h.table, m)?, b);
        values.push(d);
        if best.as_ref().is_none_or(|(v, _)| d < *v) {
            best = Some((d, h));
        }
    }
    let (best, best_hash) = best.expect("samples > 0");
    let mean = neumaier_sum(values.iter().copied()) / samples as f64;
    let var = if samples > 1 {
        neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (samples - 1) as f64
    } else {
        0.0
    };
    let record = SimRecord {
        n: 1,
        m,
        beta,
        estimator: Estimator::AffineFamily { samples },
        value_bits: best,
        stderr: Some(sqrt(var / samples as f64)),
        seed: Some(seed),
        rounding_note: String::new(),
        caveat: Some("value is the best sampled hash; stderr refers to the family mean"),
    };
    Ok(AffineReport { best, best_hash, mean, record })
}

/// Result of comparing a simulated divergence with a one-shot lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    /// `value − bound`.
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(value: f64, bound: f64) -> Self {
        let margin = if value == f64::INFINITY { f64::INFINITY } else { value - bound };
        BoundCheck { value, bound, margin, pass: margin >= -BOUND_SLACK }
    }
}

/// Lower bound on `D_β(𝓡_h(Pⁿ) ‖ 𝟙/M × P_Yⁿ)` valid for every hash `h`:
/// `max_{α∈[β,1]} β(1−α)/(α(1−β)) (log M − n H̃_{α,β})` for `β < 1` and
/// `|log M − n H_β(X|Y)|⁺` for `β ≥ 1`.
pub fn pa_one_shot_bound(joint: &JointPmf, n: usize, m: usize, beta: f64) -> Result<f64, ProtocolError> {
    let b = check_beta(beta)?;
    if m == 0 {
        return Err(ProtocolError::EmptyRange);
    }
    let log_m = log2(m as f64);
    let nf = n as f64;
    if beta >= 1.0 {
        let h = cond_entropy_variant(CondEntropyVariant::H, joint, b).value;
        return Ok(pos_part(log_m - nf * h));
    }
    let (v, _) = maximize_over_alpha(beta, 1e-3, 1e-10, |a| {
        let order = OrderPair::from_values(a, beta).expect("orders in (0, 1)");
        alpha_coefficient(a, beta) * (log_m - nf * h_tilde(joint, order).expect("defined").value)
    });
    Ok(v)
}

/// Checks, for one hash and one `α ∈ [β, 1)`, that the divergence from the
/// ideal dominates both the bound computed on the hashed joint and the
/// weaker bound computed on the source joint. Returns the tighter check.
pub fn check_one_shot_pa(
    joint: &JointPmf,
    h: &HashSpec,
    beta: f64,
    alpha: f64,
) -> Result<(BoundCheck, BoundCheck), ProtocolError> {
    let b = check_beta(beta)?;
    let hashed = pa_apply_hash(joint, h)?;
    let d = divergence_from_ideal(&hashed, b);
    let on_hashed = one_shot_pa_lower_bound(&hashed, beta, alpha).map_err(|_| ProtocolError::InvalidBeta(beta))?;
    let order = OrderPair::from_values(alpha, beta).map_err(|_| ProtocolError::InvalidBeta(beta))?;
    let h_src = h_tilde(joint, order).map_err(|_| ProtocolError::InvalidBeta(beta))?.value;
    let on_source = alpha_coefficient(alpha, beta) * (log2(h.m as f64) - h_src);
    Ok((BoundCheck::new(d, on_hashed), BoundCheck::new(d, on_source)))
}

/// `n`-fold input distribution and channel, with output distribution.
struct Blocks {
    px: Vec<f64>,
    /// `W^n(y|x)`, row-major by `x`.
    w: Vec<f64>,
    py: Vec<f64>,
    ny: usize,
}

fn blocks(px: &Pmf, pyx: &CondPmf, n: usize) -> Result<Blocks, ProtocolError> {
    let joint = JointPmf::from_input_and_channel(px, pyx)?.power(n)?;
    let pxn = joint.marginal_x();
    let pyn = joint.marginal_y();
    let ny = joint.ny();
    let mut w = vec![0.0; joint.nx() * ny];
    // Rows of the n-fold channel are products of single-letter rows, which
    // exist even where P_X vanishes; rebuild them directly.
    let single_rows: Vec<Vec<f64>> = (0..pyx.given_len())
        .map(|x| match pyx.row(x) {
            Some(r) => r.probs().to_vec(),
            None => vec![0.0; pyx.outcome_len()],
        })
        .collect();
    let nx1 = pyx.given_len();
    let ny1 = pyx.outcome_len();
    for xn in 0..joint.nx() {
        for yn in 0..ny {
            let (mut a, mut b, mut p) = (xn, yn, 1.0);
            for _ in 0..n {
                p *= single_rows[a % nx1][b % ny1];
                a /= nx1;
                b /= ny1;
            }
            w[xn * ny + yn] = p;
        }
    }
    Ok(Blocks { px: pxn.probs().to_vec(), w, py: pyn.probs().to_vec(), ny })
}

/// `Σ_y P_{Y|C}(y)^β P_Y(y)^{1−β}` for `β ≠ 1`, `D(P_{Y|C} ‖ P_Y)` for `β = 1`.
fn codebook_statistic(out: &[f64], py: &[f64], beta: f64) -> f64 {
    if beta == 1.0 {
        divergence_slices(out, py, ExtOrder::One)
    } else {
        neumaier_sum(out.iter().zip(py).filter(|(&o, _)| o > 0.0).map(|(&o, &p)| {
            exp2(beta * log2(o) + (1.0 - beta) * log2(p))
        }))
    }
}

fn finish_statistic(mean: f64, beta: f64) -> f64 {
    if beta == 1.0 {
        mean
    } else {
        log2(mean) / (beta - 1.0)
    }
}

/// Exact ensemble value of the code-induced divergence for an i.i.d.
/// codebook of `M` codewords of length `n`:
/// `(1/(β−1)) log E_C Σ_y P_{Y|C}^β P_Y^{1−β}` for `β ≠ 1` and
/// `E_C D(P_{Y|C} ‖ P_Y)` for `β = 1`, where `P_{Y|C}` is the output
/// distribution of a uniformly chosen codeword.
pub fn sc_expected_divergence_exact(
    px: &Pmf,
    pyx: &CondPmf,
    n: usize,
    m: usize,
    beta: f64,
    cap: u64,
) -> Result<SimRecord, ProtocolError> {
    check_beta(beta)?;
    if m == 0 {
        return Err(ProtocolError::EmptyRange);
    }
    let support = px.support().len();
    (support as u64)
        .checked_pow((n * m) as u32)
        .filter(|&c| c <= cap)
        .ok_or(ProtocolError::EnumerationCap {
            count: powf(support as f64, (n * m) as f64),
            cap,
        })?;
    let b = blocks(px, pyx, n)?;
    let xs: Vec<usize> = (0..b.px.len()).filter(|&x| b.px[x] > 0.0).collect();
    let mut acc = vec![0.0; b.ny];
    let mut terms = Vec::new();
    enumerate_codebooks(&b, &xs, m, 0, 1.0, &mut acc, beta, &mut terms);
    let mean = neumaier_sum(terms);
    Ok(SimRecord {
        n,
        m,
        beta,
        estimator: Estimator::ExactEnumeration,
        value_bits: finish_statistic(mean, beta),
        stderr: None,
        seed: None,
        rounding_note: String::new(),
        caveat: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_codebooks(
    b: &Blocks,
    xs: &[usize],
    m: usize,
    depth: usize,
    weight: f64,
    acc: &mut Vec<f64>,
    beta: f64,
    terms: &mut Vec<f64>,
) {
    if depth == m {
        let out: Vec<f64> = acc.iter().map(|v| v / m as f64).collect();
        terms.push(weight * codebook_statistic(&out, &b.py, beta));
        return;
    }
    for &x in xs {
        let row = &b.w[x * b.ny..(x + 1) * b.ny];
        for (a, &w) in acc.iter_mut().zip(row) {
            *a += w;
        }
        enumerate_codebooks(b, xs, m, depth + 1, weight * b.px[x], acc, beta, terms);
        for (a, &w) in acc.iter_mut().zip(row) {
            *a -= w;
        }
    }
}

/// A codebook of `M` codewords, each a length-`n` sequence of input symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub n: usize,
    pub codewords: Vec<Vec<usize>>,
}

impl Codebook {
    /// Draws `M` codewords i.i.d. from `P_X^n`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, px: &Pmf, n: usize, m: usize) -> Self {
        let cdf: Vec<f64> = px
            .probs()
            .iter()
            .scan(0.0, |s, &p| {
                *s += p;
                Some(*s)
            })
            .collect();
        let last = px.probs().iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let draw = |rng: &mut R| {
            let u: f64 = rng.random();
            let i = cdf.partition_point(|&c| c <= u);
            // Round-off in the cumulative sum never selects a zero-mass tail.
            i.min(last)
        };
        let codewords = (0..m).map(|_| (0..n).map(|_| draw(rng)).collect()).collect();
        Codebook { n, codewords }
    }

    /// Index of a codeword in the `n`-fold alphabet, first symbol most
    /// significant, matching [`JointPmf::power`].
    fn block_index(word: &[usize], nx: usize) -> usize {
        word.iter().fold(0, |acc, &s| acc * nx + s)
    }
}

/// Per-sample RNG: the master seed with the sample index as the stream.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Monte-Carlo estimate of the quantity computed by
/// [`sc_expected_divergence_exact`], with a jackknife standard error.
///
/// For `β ≠ 1` the expectation is estimated before the logarithm, which
/// biases the estimate; the bias is reported as a caveat, not corrected.
pub fn sc_expected_divergence_mc(
    px: &Pmf,
    pyx: &CondPmf,
    n: usize,
    m: usize,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<SimRecord, ProtocolError> {
    check_beta(beta)?;
    if m == 0 {
        return Err(ProtocolError::EmptyRange);
    }
    if samples < MIN_MC_SAMPLES {
        return Err(ProtocolError::TooFewSamples { min: MIN_MC_SAMPLES, got: samples });
    }
    let b = blocks(px, pyx, n)?;
    let nx1 = px.len();
    let values: Vec<f64> = (0..samples)
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let c = Codebook::random(&mut rng, px, n, m);
            let mut out = vec![0.0; b.ny];
            for word in &c.codewords {
                let x = Codebook::block_index(word, nx1);
                for (o, &w) in out.iter_mut().zip(&b.w[x * b.ny..(x + 1) * b.ny]) {
                    *o += w / m as f64;
                }
            }
            codebook_statistic(&out, &b.py, beta)
        })
        .collect();
    let (value, stderr) = jackknife(&values, beta);
    Ok(SimRecord {
        n,
        m,
        beta,
        estimator: Estimator::MonteCarlo { samples },
        value_bits: value,
        stderr: Some(stderr),
        seed: Some(seed),
        rounding_note: String::new(),
        caveat: (beta != 1.0).then_some("log of a sample mean: biased for finite samples"),
    })
}

/// Estimate and jackknife standard error of `finish_statistic(mean)`.
fn jackknife(values: &[f64], beta: f64) -> (f64, f64) {
    let n = values.len() as f64;
    let total = neumaier_sum(values.iter().copied());
    let est = finish_statistic(total / n, beta);
    let loo: Vec<f64> = values.iter().map(|v| finish_statistic((total - v) / (n - 1.0), beta)).collect();
    let mean_loo = neumaier_sum(loo.iter().copied()) / n;
    let ss = neumaier_sum(loo.iter().map(|t| (t - mean_loo) * (t - mean_loo)));
    (est, sqrt((n - 1.0) / n * ss))
}

/// Compares a simulated soft-covering divergence with the one-shot lower
/// bound `max_{α∈[β,1]} β(1−α)/(α(1−β)) (n Ĩ_{α,β} − log M)` for `β < 1` and
/// `|n I_β − log M|⁺` for `β ≥ 1`, using additivity over the `n` letters.
pub fn check_one_shot_sc_bound(
    px: &Pmf,
    pyx: &CondPmf,
    n: usize,
    m: usize,
    beta: f64,
    record: &SimRecord,
) -> Result<BoundCheck, ProtocolError> {
    Ok(BoundCheck::new(record.value_bits, sc_one_shot_bound(px, pyx, n, m, beta)?))
}

pub fn sc_one_shot_bound(px: &Pmf, pyx: &CondPmf, n: usize, m: usize, beta: f64) -> Result<f64, ProtocolError> {
    let b = check_beta(beta)?;
    let joint = JointPmf::from_input_and_channel(px, pyx)?;
    let log_m = log2(m as f64);
    let nf = n as f64;
    if beta >= 1.0 {
        let i = mutual_info_variant(MutualInfoVariant::I, &joint, b).value;
        return Ok(pos_part(nf * i - log_m));
    }
    let (v, _) = maximize_over_alpha(beta, 1e-3, 1e-10, |a| {
        let order = OrderPair::from_values(a, beta).expect("orders in (0, 1)");
        alpha_coefficient(a, beta) * (nf * i_tilde(&joint, order).expect("defined").value - log_m)
    });
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use alloc::vec;

    fn bsc(p: f64) -> CondPmf {
        CondPmf::from_rows(&[[1.0 - p, p], [p, 1.0 - p]]).unwrap()
    }

    #[test]
    fn identity_and_constant_hashes() {
        let j = JointPmf::from_rows(&[[0.1, 0.2], [0.3, 0.15], [0.05, 0.2]]).unwrap();
        let id = pa_apply_hash(&j, &HashSpec::identity(3)).unwrap();
        assert_eq!(id.probs(), j.probs());
        let c = pa_apply_hash(&j, &HashSpec::constant(3, 2)).unwrap();
        let py = j.marginal_y();
        assert!((c.get(0, 0) - py.probs()[0]).abs() < 1e-15);
        assert_eq!(c.get(1, 0), 0.0);
        assert!(pa_apply_hash(&j, &HashSpec::identity(2)).is_err());
    }

    #[test]
    fn exhaustive_minimum_on_trivial_cases() {
        let u = JointPmf::independent(&Pmf::uniform(3).unwrap(), &Pmf::from_probs(vec![0.4, 0.6]).unwrap());
        let (v, h, rec) = pa_min_divergence_exhaustive(&u, 3, 0.5, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(v.abs() < 1e-14);
        // The first zero-divergence table in lexicographic order is [0, 1, 2].
        assert_eq!(h.table, vec![0, 1, 2]);
        assert_eq!(rec.estimator, Estimator::ExhaustiveHash { tables: 27 });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let j = random::joint(&mut rng, 4, 3);
        let (v, _, _) = pa_min_divergence_exhaustive(&j, 1, 2.0, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let j = JointPmf::from_flat(16, 1, vec![1.0 / 16.0; 16]).unwrap();
        assert!(matches!(
            pa_min_divergence_exhaustive(&j, 4, 0.5, DEFAULT_ENUMERATION_CAP),
            Err(ProtocolError::EnumerationCap { .. })
        ));
    }

    #[test]
    fn hash_enumeration_order() {
        let mut seen = Vec::new();
        for_each_hash(2, 3, 100, |h| seen.push(h.table.clone())).unwrap();
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[8], vec![2, 2]);
    }

    #[test]
    fn affine_family_on_uniform_source() {
        let u = JointPmf::independent(&Pmf::uniform(8).unwrap(), &Pmf::uniform(2).unwrap());
        let a = pa_universal_family_divergence(&u, 8, 2.0, 200, 3).unwrap();
        assert!(a.best.abs() < 1e-12);
        let again = pa_universal_family_divergence(&u, 8, 2.0, 200, 3).unwrap();
        assert_eq!(a, again);
        assert!(matches!(
            pa_universal_family_divergence(&u, 8, 2.5, 10, 3),
            Err(ProtocolError::BetaOutOfFamilyRange(_))
        ));
        let odd = JointPmf::from_flat(3, 1, vec![1.0 / 3.0; 3]).unwrap();
        assert!(matches!(
            pa_universal_family_divergence(&odd, 2, 2.0, 10, 3),
            Err(ProtocolError::NonPowerOfTwoAlphabet(3))
        ));
    }

    #[test]
    fn affine_tables_are_two_universal() {
        // Over all (A, b) with k = 3, l = 2, each pair x ≠ x' collides in
        // exactly a 1/4 fraction of the family.
        let (k, l) = (3u32, 2u32);
        let mut collisions = [[0u32; 8]; 8];
        let mut total = 0;
        for r0 in 0..8u64 {
            for r1 in 0..8u64 {
                for off in 0..4u64 {
                    let t = affine_table(&[r0, r1], off, k);
                    total += 1;
                    for x in 0..8 {
                        for y in 0..8 {
                            if t[x] == t[y] {
                                collisions[x][y] += 1;
                            }
                        }
                    }
                }
            }
        }
        for x in 0..8 {
            for y in 0..8 {
                if x != y {
                    assert_eq!(collisions[x][y] * (1 << l), total);
                }
            }
        }
    }

    #[test]
    fn single_codeword_gives_renyi_information() {
        let px = Pmf::from_probs(vec![0.3, 0.7]).unwrap();
        let w = bsc(0.2);
        let joint = JointPmf::from_input_and_channel(&px, &w).unwrap();
        for (n, beta) in [(1, 0.5), (2, 2.0), (2, 1.0), (3, 3.0)] {
            let r = sc_expected_divergence_exact(&px, &w, n, 1, beta, DEFAULT_ENUMERATION_CAP).unwrap();
            let i = mutual_info_variant(MutualInfoVariant::I, &joint, ExtOrder::new(beta).unwrap()).value;
            assert!((r.value_bits - n as f64 * i).abs() < 1e-12, "n={n} beta={beta}");
        }
    }

    #[test]
    fn useless_channel_gives_zero() {
        let px = Pmf::from_probs(vec![0.3, 0.7]).unwrap();
        let w = CondPmf::from_rows(&[[0.4, 0.6], [0.4, 0.6]]).unwrap();
        for m in [1, 2, 3] {
            for beta in [0.5, 1.0, 2.0] {
                let r = sc_expected_divergence_exact(&px, &w, 1, m, beta, DEFAULT_ENUMERATION_CAP).unwrap();
                assert!(r.value_bits.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_codewords_respect_the_one_shot_bound() {
        let px = Pmf::uniform(2).unwrap();
        let w = bsc(0.05);
        let r = sc_expected_divergence_exact(&px, &w, 2, 2, 2.0, DEFAULT_ENUMERATION_CAP).unwrap();
        let c = check_one_shot_sc_bound(&px, &w, 2, 2, 2.0, &r).unwrap();
        assert!(c.pass, "{c:?}");
        assert!(c.bound > 0.0);
    }

    #[test]
    fn monte_carlo_is_seeded_and_close_to_exact() {
        let px = Pmf::from_probs(vec![0.4, 0.6]).unwrap();
        let w = bsc(0.1);
        let exact = sc_expected_divergence_exact(&px, &w, 2, 2, 2.0, DEFAULT_ENUMERATION_CAP).unwrap();
        let a = sc_expected_divergence_mc(&px, &w, 2, 2, 2.0, 4000, 17).unwrap();
        let b = sc_expected_divergence_mc(&px, &w, 2, 2, 2.0, 4000, 17).unwrap();
        assert_eq!(a, b);
        let se = a.stderr.unwrap();
        assert!((a.value_bits - exact.value_bits).abs() <= 4.0 * se, "{a:?} vs {exact:?}");
    }

    #[test]
    fn rate_rounding() {
        assert_eq!(range_size_for_rate(3, 0.5).0, 3);
        assert_eq!(range_size_for_rate(2, 0.0).0, 1);
        assert_eq!(range_size_for_rate(1, 0.1).0, 1);
    }
}
