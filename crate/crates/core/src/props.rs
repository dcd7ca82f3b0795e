//! Randomized verification of the structural properties of the measures.
//!
//! Each property has a stable string id. Measures are read through
//! [`MeasureSource`] so a deliberately broken implementation can be swapped
//! in to check that the harness reports failures.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classic::{
    cond_entropy_variant, divergence_slices, mutual_info_variant, CondEntropyVariant, MutualInfoVariant,
};
use crate::dist::{CondPmf, JointPmf, Pmf};
use crate::math::{log2, powf, LN_2};
use crate::order::{ExtOrder, OrderPair};
use crate::random;
use crate::simplex::{minimize_over_joint, SimplexObjective, SolverConfig};
use crate::two_param::{h_tilde, i_tilde};

/// Finite orders shared by most properties.
pub const FINITE_GRID: [f64; 7] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0];

/// Where the measures under test come from.
pub trait MeasureSource {
    fn divergence(&self, p: &[f64], q: &[f64], a: ExtOrder) -> f64 {
        divergence_slices(p, q, a)
    }

    /// `None` where the measure is undefined.
    fn h_tilde(&self, joint: &JointPmf, order: OrderPair) -> Option<f64> {
        h_tilde(joint, order).ok().map(|r| r.value)
    }

    fn i_tilde(&self, joint: &JointPmf, order: OrderPair) -> Option<f64> {
        i_tilde(joint, order).ok().map(|r| r.value)
    }

    fn cond_entropy(&self, v: CondEntropyVariant, joint: &JointPmf, a: ExtOrder) -> f64 {
        cond_entropy_variant(v, joint, a).value
    }

    fn mutual_info(&self, v: MutualInfoVariant, joint: &JointPmf, a: ExtOrder) -> f64 {
        mutual_info_variant(v, joint, a).value
    }
}

/// The measures as implemented by this crate.
#[derive(Debug, Clone, Copy, Default)]
pub struct Library;

impl MeasureSource for Library {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyId {
    CollapseH,
    CollapseI,
    MonoAlpha,
    MonoBeta,
    Additivity,
    DpiH,
    DpiI,
    Discard,
    NonNeg,
    Concavity,
    TransformedConcavity,
    PowerConcavity,
    Continuity,
    RenyiMonoOrder,
    RenyiDpi,
    RenyiVariational,
}

impl PropertyId {
    pub const ALL: [PropertyId; 16] = [
        PropertyId::CollapseH,
        PropertyId::CollapseI,
        PropertyId::MonoAlpha,
        PropertyId::MonoBeta,
        PropertyId::Additivity,
        PropertyId::DpiH,
        PropertyId::DpiI,
        PropertyId::Discard,
        PropertyId::NonNeg,
        PropertyId::Concavity,
        PropertyId::TransformedConcavity,
        PropertyId::PowerConcavity,
        PropertyId::Continuity,
        PropertyId::RenyiMonoOrder,
        PropertyId::RenyiDpi,
        PropertyId::RenyiVariational,
    ];

    /// The structural suite: monotonicity, additivity, data processing,
    /// discarding, non-negativity and the concavity statements.
    pub const STRUCTURAL: [PropertyId; 10] = [
        PropertyId::MonoAlpha,
        PropertyId::MonoBeta,
        PropertyId::Additivity,
        PropertyId::DpiH,
        PropertyId::DpiI,
        PropertyId::Discard,
        PropertyId::NonNeg,
        PropertyId::Concavity,
        PropertyId::TransformedConcavity,
        PropertyId::PowerConcavity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyId::CollapseH => "collapse-h",
            PropertyId::CollapseI => "collapse-i",
            PropertyId::MonoAlpha => "mono-alpha",
            PropertyId::MonoBeta => "mono-beta",
            PropertyId::Additivity => "additivity",
            PropertyId::DpiH => "dpi-h",
            PropertyId::DpiI => "dpi-i",
            PropertyId::Discard => "discard",
            PropertyId::NonNeg => "nonneg",
            PropertyId::Concavity => "concavity",
            PropertyId::TransformedConcavity => "transformed-concavity",
            PropertyId::PowerConcavity => "power-concavity",
            PropertyId::Continuity => "continuity",
            PropertyId::RenyiMonoOrder => "renyi-mono-order",
            PropertyId::RenyiDpi => "renyi-dpi",
            PropertyId::RenyiVariational => "renyi-variational",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            PropertyId::CollapseH => "H~ reduces to H, H*, Hbar, Hbar* at beta = alpha, 1, 0, inf",
            PropertyId::CollapseI => "I~ reduces to I, I*, Ibar, Ibar* at beta = alpha, 1, 0, inf",
            PropertyId::MonoAlpha => "H~ non-increasing and I~ non-decreasing in alpha",
            PropertyId::MonoBeta => "H~ and I~ monotone in beta, direction set by alpha vs 1",
            PropertyId::Additivity => "H~ and I~ additive over independent pairs",
            PropertyId::DpiH => "H~(X|YZ) <= H~(X|Y) when alpha, beta on the same side of 1",
            PropertyId::DpiI => "I~(X:Y) >= I~(X:Z) on Markov chains X-Y-Z",
            PropertyId::Discard => "H~(XY|Z) >= H~(Y|Z)",
            PropertyId::NonNeg => "all measures non-negative, I~ = 0 on independent joints",
            PropertyId::Concavity => "I~ concave in P_X (alpha >= 1, beta <= 1), convex in P_Y|X (alpha, beta <= 1)",
            PropertyId::TransformedConcavity => "(alpha-1)H~ and (1-alpha)I~ concave in alpha",
            PropertyId::PowerConcavity => "a^x b^y jointly concave for x, y >= 0, x + y <= 1",
            PropertyId::Continuity => "finite orders near 0, 1, inf approach the tagged branches",
            PropertyId::RenyiMonoOrder => "D_alpha non-decreasing in alpha",
            PropertyId::RenyiDpi => "D_alpha(Wp||Wq) <= D_alpha(p||q)",
            PropertyId::RenyiVariational => "D_alpha equals its variational expression over the simplex",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown property id `{0}`")]
pub struct UnknownProperty(pub String);

impl FromStr for PropertyId {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyId::ALL
            .into_iter()
            .find(|p| p.as_str() == s.trim())
            .ok_or_else(|| UnknownProperty(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random joints per property.
    pub samples: usize,
    pub max_x: usize,
    pub max_y: usize,
    /// Allowed violation for the two-parameter properties.
    pub slack: f64,
    /// Allowed violation for the divergence properties.
    pub divergence_slack: f64,
    pub continuity_tol: f64,
    /// Finite stand-in for `0` in the continuity checks.
    pub small_order: f64,
    /// Finite stand-in for `∞` in the continuity checks.
    pub large_order: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0x5eed,
            samples: 200,
            max_x: 5,
            max_y: 5,
            slack: 1e-9,
            divergence_slack: 1e-10,
            continuity_tol: 1e-3,
            small_order: 1e-6,
            large_order: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub detail: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub id: PropertyId,
    pub checks: usize,
    pub violations: usize,
    /// Largest `lhs − rhs` over inequality checks `lhs ≤ rhs` (or the
    /// largest deviation for equalities), before slack.
    pub worst_excess: f64,
    /// The first violation found.
    pub counterexample: Option<Counterexample>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Checker {
    id: PropertyId,
    slack: f64,
    checks: usize,
    violations: usize,
    worst: f64,
    first: Option<Counterexample>,
}

impl Checker {
    fn new(id: PropertyId, slack: f64) -> Self {
        Checker { id, slack, checks: 0, violations: 0, worst: f64::NEG_INFINITY, first: None }
    }

    fn record(&mut self, excess: f64, tol: f64, lhs: f64, rhs: f64, detail: impl FnOnce() -> String) {
        self.checks += 1;
        let excess = if excess.is_nan() { f64::INFINITY } else { excess };
        self.worst = self.worst.max(excess);
        if excess > tol {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(Counterexample { detail: detail(), lhs, rhs });
            }
        }
    }

    /// `lhs ≤ rhs + slack`.
    fn le(&mut self, lhs: f64, rhs: f64, detail: impl FnOnce() -> String) {
        let excess = if lhs == rhs { 0.0 } else { lhs - rhs };
        self.record(excess, self.slack, lhs, rhs, detail);
    }

    fn ge(&mut self, lhs: f64, rhs: f64, detail: impl FnOnce() -> String) {
        let excess = if lhs == rhs { 0.0 } else { rhs - lhs };
        self.record(excess, self.slack, lhs, rhs, detail);
    }

    fn close(&mut self, lhs: f64, rhs: f64, tol: f64, detail: impl FnOnce() -> String) {
        let excess = if lhs == rhs { 0.0 } else { (lhs - rhs).abs() };
        self.record(excess, tol, lhs, rhs, detail);
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            id: self.id,
            checks: self.checks,
            violations: self.violations,
            worst_excess: if self.checks == 0 { 0.0 } else { self.worst },
            counterexample: self.first,
        }
    }
}

fn ord(v: f64) -> ExtOrder {
    ExtOrder::new(v).expect("grid orders are valid")
}

fn pair(a: f64, b: f64) -> OrderPair {
    OrderPair::new(ord(a), ord(b))
}

fn with_tags() -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend(FINITE_GRID);
    g.push(f64::INFINITY);
    g
}

fn show(j: &JointPmf) -> String {
    format!("joint {}x{} {:?}", j.nx(), j.ny(), j.probs())
}

fn show_pmf(p: &[f64]) -> String {
    format!("{p:?}")
}

fn rng_for(cfg: &VerifyConfig, id: PropertyId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(id as u64);
    rng
}

/// Runs the listed properties in order.
pub fn run_properties(
    source: &dyn MeasureSource,
    ids: &[PropertyId],
    cfg: &VerifyConfig,
) -> Vec<PropertyOutcome> {
    ids.iter().map(|&id| run_property(source, id, cfg)).collect()
}

pub fn run_property(source: &dyn MeasureSource, id: PropertyId, cfg: &VerifyConfig) -> PropertyOutcome {
    let mut rng = rng_for(cfg, id);
    let slack = match id {
        PropertyId::RenyiMonoOrder | PropertyId::RenyiDpi => cfg.divergence_slack,
        _ => cfg.slack,
    };
    let mut c = Checker::new(id, slack);
    match id {
        PropertyId::CollapseH => collapse_h(source, cfg, &mut rng, &mut c),
        PropertyId::CollapseI => collapse_i(source, cfg, &mut rng, &mut c),
        PropertyId::MonoAlpha => mono_alpha(source, cfg, &mut rng, &mut c),
        PropertyId::MonoBeta => mono_beta(source, cfg, &mut rng, &mut c),
        PropertyId::Additivity => additivity(source, cfg, &mut rng, &mut c),
        PropertyId::DpiH => dpi_h(source, cfg, &mut rng, &mut c),
        PropertyId::DpiI => dpi_i(source, cfg, &mut rng, &mut c),
        PropertyId::Discard => discard(source, cfg, &mut rng, &mut c),
        PropertyId::NonNeg => nonneg(source, cfg, &mut rng, &mut c),
        PropertyId::Concavity => concavity(source, cfg, &mut rng, &mut c),
        PropertyId::TransformedConcavity => transformed_concavity(source, cfg, &mut rng, &mut c),
        PropertyId::PowerConcavity => power_concavity(cfg, &mut rng, &mut c),
        PropertyId::Continuity => continuity(source, cfg, &mut rng, &mut c),
        PropertyId::RenyiMonoOrder => renyi_mono_order(source, cfg, &mut rng, &mut c),
        PropertyId::RenyiDpi => renyi_dpi(source, cfg, &mut rng, &mut c),
        PropertyId::RenyiVariational => renyi_variational(source, cfg, &mut rng, &mut c),
    }
    c.finish()
}

fn collapse_h(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    use CondEntropyVariant::*;
    for _ in 0..cfg.samples {
        let j = random::any_joint(rng, cfg.max_x, cfg.max_y);
        for a in with_tags() {
            // At alpha = 0 the diagonal runs into the (0, 0) corner, whose
            // value is the beta-first limit rather than H_0.
            let cases = [(a, H, a != 0.0), (0.0, HBar, true), (1.0, HStar, true), (f64::INFINITY, HBarStar, a != 1.0)];
            for (b, v, applies) in cases {
                if !applies {
                    continue;
                }
                let lhs = s.h_tilde(&j, pair(a, b)).unwrap_or(f64::NAN);
                let rhs = s.cond_entropy(v, &j, ord(a));
                c.close(lhs, rhs, c.slack, || format!("{} alpha={a} beta={b} vs {v:?}", show(&j)));
            }
        }
    }
}

fn collapse_i(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    use MutualInfoVariant::*;
    for _ in 0..cfg.samples {
        let j = random::any_joint(rng, cfg.max_x, cfg.max_y);
        for a in with_tags() {
            let cases = [(a, I, a != 0.0), (0.0, IBar, true), (1.0, IStar, true), (f64::INFINITY, IBarStar, a != 1.0)];
            for (b, v, applies) in cases {
                if !applies {
                    continue;
                }
                let lhs = s.i_tilde(&j, pair(a, b)).unwrap_or(f64::NAN);
                let rhs = s.mutual_info(v, &j, ord(a));
                c.close(lhs, rhs, c.slack, || format!("{} alpha={a} beta={b} vs {v:?}", show(&j)));
            }
        }
    }
}

/// Values along `orders`, dropping undefined points.
fn along(
    orders: &[f64],
    mut f: impl FnMut(f64) -> Option<f64>,
) -> Vec<(f64, f64)> {
    orders.iter().filter_map(|&o| f(o).map(|v| (o, v))).collect()
}

fn mono_alpha(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let grid = with_tags();
    for _ in 0..cfg.samples {
        let j = random::any_joint(rng, cfg.max_x, cfg.max_y);
        for &b in &grid {
            let h = along(&grid, |a| s.h_tilde(&j, pair(a, b)));
            for w in h.windows(2) {
                c.le(w[1].1, w[0].1, || format!("H~ {} beta={b} alpha {} -> {}", show(&j), w[0].0, w[1].0));
            }
            let i = along(&grid, |a| s.i_tilde(&j, pair(a, b)));
            for w in i.windows(2) {
                c.ge(w[1].1, w[0].1, || format!("I~ {} beta={b} alpha {} -> {}", show(&j), w[0].0, w[1].0));
            }
        }
    }
}

fn mono_beta(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let grid = with_tags();
    for _ in 0..cfg.samples {
        let j = random::any_joint(rng, cfg.max_x, cfg.max_y);
        for &a in grid.iter().filter(|&&a| a != 1.0) {
            let h = along(&grid, |b| s.h_tilde(&j, pair(a, b)));
            let i = along(&grid, |b| s.i_tilde(&j, pair(a, b)));
            for (series, name, increasing) in [(&h, "H~", a < 1.0), (&i, "I~", a > 1.0)] {
                for w in series.windows(2) {
                    let detail = || format!("{name} {} alpha={a} beta {} -> {}", show(&j), w[0].0, w[1].0);
                    if increasing {
                        c.ge(w[1].1, w[0].1, detail);
                    } else {
                        c.le(w[1].1, w[0].1, detail);
                    }
                }
            }
        }
    }
}

fn additivity(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    for _ in 0..cfg.samples.div_ceil(2) {
        let p = random::any_joint(rng, 3, 3);
        let q = random::any_joint(rng, 3, 3);
        let pq = p.product(&q).expect("small product");
        for a in FINITE_GRID {
            for b in FINITE_GRID {
                let o = pair(a, b);
                let detail = |name: &str| format!("{name} {} and {} alpha={a} beta={b}", show(&p), show(&q));
                let (x, y, z) = (s.h_tilde(&pq, o), s.h_tilde(&p, o), s.h_tilde(&q, o));
                let tol = c.slack;
                c.close(x.unwrap_or(f64::NAN), y.unwrap_or(f64::NAN) + z.unwrap_or(f64::NAN), tol, || detail("H~"));
                let (x, y, z) = (s.i_tilde(&pq, o), s.i_tilde(&p, o), s.i_tilde(&q, o));
                c.close(x.unwrap_or(f64::NAN), y.unwrap_or(f64::NAN) + z.unwrap_or(f64::NAN), tol, || detail("I~"));
            }
        }
    }
}

/// Order pairs with both entries on the same side of 1, tags included.
fn same_side_pairs() -> Vec<(f64, f64)> {
    let low = [0.0, 0.25, 0.5, 0.75, 1.0];
    let high = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];
    let mut out = Vec::new();
    for side in [&low, &high] {
        for &a in side.iter() {
            for &b in side.iter() {
                if !(a == 1.0 && b == f64::INFINITY) && !out.contains(&(a, b)) {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

fn size<R: Rng + ?Sized>(rng: &mut R, max: usize) -> usize {
    rng.random_range(1..=max.max(1))
}

/// `P_{X,YZ}` with `Y` the slow index of the second coordinate, and its
/// `X × Y` marginal.
fn triple(rng: &mut ChaCha8Rng) -> (JointPmf, JointPmf) {
    let (nx, ny, nz) = (size(rng, 3), size(rng, 3), size(rng, 3));
    let xyz = if rng.random::<bool>() {
        random::sparse_joint(rng, nx, ny * nz, 0.3)
    } else {
        random::joint(rng, nx, ny * nz)
    };
    let drop_z: Vec<usize> = (0..ny * nz).map(|yz| yz / nz).collect();
    let xy = xyz.transpose().map_x(&drop_z, ny).expect("valid map").transpose();
    (xyz, xy)
}

fn dpi_h(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let orders = same_side_pairs();
    for _ in 0..cfg.samples {
        let (xyz, xy) = triple(rng);
        for &(a, b) in &orders {
            let (Some(l), Some(r)) = (s.h_tilde(&xyz, pair(a, b)), s.h_tilde(&xy, pair(a, b))) else {
                continue;
            };
            c.le(l, r, || format!("H~(X|YZ) {} alpha={a} beta={b}", show(&xyz)));
        }
    }
}

fn discard(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    for _ in 0..cfg.samples {
        let (nx, ny, nz) = (size(rng, 3), size(rng, 3), size(rng, 3));
        let xy_z = if rng.random::<bool>() {
            random::sparse_joint(rng, nx * ny, nz, 0.3)
        } else {
            random::joint(rng, nx * ny, nz)
        };
        let keep_y: Vec<usize> = (0..nx * ny).map(|xy| xy % ny).collect();
        let y_z = xy_z.map_x(&keep_y, ny).expect("valid map");
        for a in FINITE_GRID {
            for b in FINITE_GRID {
                let (Some(l), Some(r)) = (s.h_tilde(&xy_z, pair(a, b)), s.h_tilde(&y_z, pair(a, b))) else {
                    continue;
                };
                c.ge(l, r, || format!("H~(XY|Z) {} with |Y|={ny} alpha={a} beta={b}", show(&xy_z)));
            }
        }
    }
}

fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Pmf {
    let p = if rng.random::<bool>() {
        random::sparse_simplex_point(rng, n, 0.3)
    } else {
        random::simplex_point(rng, n)
    };
    Pmf::from_probs(p).expect("random point is a pmf")
}

fn compose(w1: &CondPmf, w2: &CondPmf) -> CondPmf {
    let nz = w2.outcome_len();
    let rows: Vec<Vec<f64>> = (0..w1.given_len())
        .map(|x| {
            let mut row = vec![0.0; nz];
            let r1 = w1.row(x).expect("full channel");
            for (y, &p) in r1.probs().iter().enumerate() {
                for (z, &q) in w2.row(y).expect("full channel").probs().iter().enumerate() {
                    row[z] += p * q;
                }
            }
            row
        })
        .collect();
    CondPmf::from_rows(&rows).expect("composition of channels")
}

fn dpi_i(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let orders = same_side_pairs();
    for _ in 0..cfg.samples {
        let (nx, ny, nz) = (size(rng, 3), size(rng, 3), size(rng, 3));
        let px = random_pmf(rng, nx);
        let w1 = random::sparse_channel(rng, nx, ny, 0.2);
        let w2 = random::sparse_channel(rng, ny, nz, 0.2);
        let xy = JointPmf::from_input_and_channel(&px, &w1).expect("matching sizes");
        let xz = JointPmf::from_input_and_channel(&px, &compose(&w1, &w2)).expect("matching sizes");
        for &(a, b) in &orders {
            let (Some(l), Some(r)) = (s.i_tilde(&xy, pair(a, b)), s.i_tilde(&xz, pair(a, b))) else {
                continue;
            };
            c.ge(l, r, || format!("I~(X:Y) vs I~(X:Z) {} then {} alpha={a} beta={b}", show(&xy), show(&xz)));
        }
    }
}

fn nonneg(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let grid = with_tags();
    for _ in 0..cfg.samples {
        let j = random::any_joint(rng, cfg.max_x, cfg.max_y);
        let (ix, iy) = (size(rng, cfg.max_x), size(rng, cfg.max_y));
        let ind = JointPmf::independent(&random_pmf(rng, ix), &random_pmf(rng, iy));
        let n = size(rng, cfg.max_x);
        let p = random_pmf(rng, n);
        let q = random_pmf(rng, n);
        for &a in &grid {
            for &b in &grid {
                if let Some(v) = s.h_tilde(&j, pair(a, b)) {
                    c.ge(v, 0.0, || format!("H~ {} alpha={a} beta={b}", show(&j)));
                }
                if let Some(v) = s.i_tilde(&j, pair(a, b)) {
                    c.ge(v, 0.0, || format!("I~ {} alpha={a} beta={b}", show(&j)));
                }
                if let Some(v) = s.i_tilde(&ind, pair(a, b)) {
                    let tol = c.slack;
                    c.close(v, 0.0, tol, || format!("I~ on independent {} alpha={a} beta={b}", show(&ind)));
                }
            }
            let o = ord(a);
            for v in [CondEntropyVariant::H, CondEntropyVariant::HStar, CondEntropyVariant::HBar, CondEntropyVariant::HBarStar] {
                c.ge(s.cond_entropy(v, &j, o), 0.0, || format!("{v:?} {} alpha={a}", show(&j)));
            }
            for v in [MutualInfoVariant::I, MutualInfoVariant::IStar, MutualInfoVariant::IBar, MutualInfoVariant::IBarStar] {
                c.ge(s.mutual_info(v, &j, o), 0.0, || format!("{v:?} {} alpha={a}", show(&j)));
            }
            c.ge(s.divergence(p.probs(), q.probs(), o), 0.0, || {
                format!("D p={} q={} alpha={a}", show_pmf(p.probs()), show_pmf(q.probs()))
            });
        }
    }
}

fn mix(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| t * x + (1.0 - t) * y).collect()
}

fn concavity(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    for _ in 0..cfg.samples {
        let (nx, ny) = (size(rng, 4), size(rng, 4));
        let t = rng.random_range(0.05..0.95);
        let w = random::sparse_channel(rng, nx, ny, 0.2);
        let p0 = random_pmf(rng, nx);
        let p1 = random_pmf(rng, nx);
        let pm = Pmf::from_probs(mix(p0.probs(), p1.probs(), t)).expect("mixture");
        let joints = [&p0, &p1, &pm].map(|p| JointPmf::from_input_and_channel(p, &w).expect("sizes"));
        for a in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            for b in [0.25, 0.5, 0.75, 1.0] {
                let v = joints.each_ref().map(|j| s.i_tilde(j, pair(a, b)).unwrap_or(f64::NAN));
                let chord = t * v[0] + (1.0 - t) * v[1];
                c.ge(v[2], chord, || {
                    format!("concave in P_X: {} vs {} t={t} alpha={a} beta={b}", show(&joints[0]), show(&joints[1]))
                });
            }
        }

        let px = random_pmf(rng, nx);
        let w0 = random::sparse_channel(rng, nx, ny, 0.2);
        let w1 = random::sparse_channel(rng, nx, ny, 0.2);
        let rows: Vec<Vec<f64>> = (0..nx)
            .map(|x| mix(w0.row(x).unwrap().probs(), w1.row(x).unwrap().probs(), t))
            .collect();
        let wm = CondPmf::from_rows(&rows).expect("mixture of channels");
        let joints = [&w0, &w1, &wm].map(|w| JointPmf::from_input_and_channel(&px, w).expect("sizes"));
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for b in [0.25, 0.5, 0.75, 1.0] {
                let v = joints.each_ref().map(|j| s.i_tilde(j, pair(a, b)).unwrap_or(f64::NAN));
                let chord = t * v[0] + (1.0 - t) * v[1];
                c.le(v[2], chord, || {
                    format!("convex in P_Y|X: {} vs {} t={t} alpha={a} beta={b}", show(&joints[0]), show(&joints[1]))
                });
            }
        }
    }
}

fn transformed_concavity(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let alphas = FINITE_GRID;
    for _ in 0..cfg.samples {
        let j = random::any_joint(rng, cfg.max_x, cfg.max_y);
        for b in FINITE_GRID {
            let f = |a: f64| s.h_tilde(&j, pair(a, b)).map(|v| if a == 1.0 { 0.0 } else { (a - 1.0) * v });
            let g = |a: f64| s.i_tilde(&j, pair(a, b)).map(|v| if a == 1.0 { 0.0 } else { (1.0 - a) * v });
            for (i, &lo) in alphas.iter().enumerate() {
                for &hi in &alphas[i + 1..] {
                    let mid = 0.5 * (lo + hi);
                    for (name, h) in [("(alpha-1)H~", &f as &dyn Fn(f64) -> Option<f64>), ("(1-alpha)I~", &g)] {
                        if let (Some(x), Some(y), Some(m)) = (h(lo), h(hi), h(mid)) {
                            c.ge(m, 0.5 * (x + y), || format!("{name} {} beta={b} alpha {lo},{mid},{hi}", show(&j)));
                        }
                    }
                }
            }
        }
    }
}

fn power_concavity(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let f = |a: f64, b: f64, x: f64, y: f64| powf(a, x) * powf(b, y);
    for _ in 0..cfg.samples {
        let x: f64 = rng.random_range(0.0..1.0);
        let y: f64 = rng.random_range(0.0..=(1.0 - x));
        let (a0, b0) = (rng.random_range(1e-3..10.0), rng.random_range(1e-3..10.0));
        let (a1, b1) = (rng.random_range(1e-3..10.0), rng.random_range(1e-3..10.0));
        let t = rng.random_range(0.0..1.0);
        let mid = f(t * a0 + (1.0 - t) * a1, t * b0 + (1.0 - t) * b1, x, y);
        let chord = t * f(a0, b0, x, y) + (1.0 - t) * f(a1, b1, x, y);
        c.ge(mid, chord, || format!("x={x} y={y} ({a0},{b0}) ({a1},{b1}) t={t}"));
    }
}

fn continuity(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let tol = cfg.continuity_tol;
    let (small, large) = (cfg.small_order, cfg.large_order);
    let inf = f64::INFINITY;
    let mut betas = vec![0.0];
    betas.extend(FINITE_GRID);
    betas.push(inf);
    let alphas = with_tags();
    for _ in 0..cfg.samples {
        let (nx, ny) = (size(rng, 3), size(rng, 3));
        let j = random::interior_joint(rng, nx, ny);
        // (numeric order, tagged order) pairs.
        let mut cases: Vec<((f64, f64), (f64, f64))> = Vec::new();
        for &b in &betas {
            if b != inf {
                cases.push(((1.0 - 1e-3, b), (1.0, b)));
                cases.push(((1.0 + 1e-3, b), (1.0, b)));
            }
            cases.push(((large, b), (inf, b)));
            cases.push(((small, b), (0.0, b)));
        }
        for &a in &alphas {
            // beta -> 0 at alpha = 0 tends to the max branch, not the corner.
            if a != 0.0 {
                cases.push(((a, small), (a, 0.0)));
            }
            if a != 1.0 {
                cases.push(((a, large), (a, inf)));
            }
        }
        for ((an, bn), (at, bt)) in cases {
            for (name, num, tag) in [
                ("H~", s.h_tilde(&j, pair(an, bn)), s.h_tilde(&j, pair(at, bt))),
                ("I~", s.i_tilde(&j, pair(an, bn)), s.i_tilde(&j, pair(at, bt))),
            ] {
                let (Some(num), Some(tag)) = (num, tag) else { continue };
                c.close(num, tag, tol, || format!("{name} {} at ({an},{bn}) vs tag ({at},{bt})", show(&j)));
            }
        }
    }
}

fn renyi_mono_order(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let grid = with_tags();
    for _ in 0..cfg.samples {
        let n = size(rng, cfg.max_x);
        let p = random_pmf(rng, n);
        let q = random_pmf(rng, n);
        let d = along(&grid, |a| Some(s.divergence(p.probs(), q.probs(), ord(a))));
        for w in d.windows(2) {
            c.le(w[0].1, w[1].1, || {
                format!("p={} q={} alpha {} -> {}", show_pmf(p.probs()), show_pmf(q.probs()), w[0].0, w[1].0)
            });
        }
    }
}

fn push_through(p: &[f64], w: &CondPmf) -> Vec<f64> {
    let mut out = vec![0.0; w.outcome_len()];
    for (x, &px) in p.iter().enumerate() {
        for (o, &wy) in out.iter_mut().zip(w.row(x).expect("full channel").probs()) {
            *o += px * wy;
        }
    }
    out
}

fn renyi_dpi(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let grid = with_tags();
    for _ in 0..cfg.samples {
        let (n, m) = (size(rng, cfg.max_x), size(rng, cfg.max_y));
        let p = random_pmf(rng, n);
        let q = random_pmf(rng, n);
        let w = random::sparse_channel(rng, n, m, 0.2);
        let (wp, wq) = (push_through(p.probs(), &w), push_through(q.probs(), &w));
        for &a in &grid {
            let o = ord(a);
            c.le(s.divergence(&wp, &wq, o), s.divergence(p.probs(), q.probs(), o), || {
                format!("p={} q={} alpha={a}", show_pmf(p.probs()), show_pmf(q.probs()))
            });
        }
    }
}

/// `α D(S‖P) + (1−α) D(S‖Q)` over `S`, whose minimum is `(1−α) D_α(P‖Q)`.
struct VariationalDivergence {
    coef: Vec<f64>,
}

impl SimplexObjective for VariationalDivergence {
    fn dims(&self) -> (usize, usize) {
        (1, self.coef.len())
    }

    fn value(&self, s: &[f64]) -> f64 {
        s.iter().zip(&self.coef).filter(|(&x, _)| x > 0.0).map(|(&x, &k)| x * (log2(x) - k)).sum()
    }

    fn gradient(&self, s: &[f64], grad: &mut [f64]) {
        for ((g, &x), &k) in grad.iter_mut().zip(s).zip(&self.coef) {
            *g = if x > 0.0 { log2(x) + 1.0 / LN_2 - k } else { f64::NEG_INFINITY };
        }
    }
}

fn renyi_variational(s: &dyn MeasureSource, cfg: &VerifyConfig, rng: &mut ChaCha8Rng, c: &mut Checker) {
    let solver = SolverConfig::default();
    for _ in 0..cfg.samples.div_ceil(10) {
        let n = rng.random_range(2..=4);
        let p = random::interior_point(rng, n);
        let q = random::interior_point(rng, n);
        for a in [0.3, 0.7, 1.5, 3.0] {
            let coef: Vec<f64> = p.iter().zip(&q).map(|(&x, &y)| a * log2(x) + (1.0 - a) * log2(y)).collect();
            let obj = VariationalDivergence { coef };
            let Ok(rep) = minimize_over_joint(&obj, &solver) else {
                c.record(f64::INFINITY, 0.0, f64::NAN, f64::NAN, || format!("solver failed p={p:?} q={q:?}"));
                continue;
            };
            let target = (1.0 - a) * s.divergence(&p, &q, ord(a));
            let tol = 2.0 * rep.gap_bound + c.slack;
            c.close(rep.minimum, target, tol, || format!("p={} q={} alpha={a}", show_pmf(&p), show_pmf(&q)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig { samples: 20, ..VerifyConfig::default() }
    }

    #[test]
    fn ids_round_trip() {
        for id in PropertyId::ALL {
            assert_eq!(id.as_str().parse::<PropertyId>().unwrap(), id);
        }
        assert!("mono-gamma".parse::<PropertyId>().is_err());
    }

    #[test]
    fn library_passes_quick_run() {
        for out in run_properties(&Library, &PropertyId::ALL, &quick()) {
            assert!(out.passed(), "{out:?}");
            assert!(out.checks > 0, "{}", out.id);
        }
    }

    struct IncreasingInAlpha;

    impl MeasureSource for IncreasingInAlpha {
        fn h_tilde(&self, joint: &JointPmf, order: OrderPair) -> Option<f64> {
            let v = h_tilde(joint, order).ok()?.value;
            let a = order.alpha.value();
            Some(v + if a.is_finite() { a } else { 10.0 })
        }
    }

    #[test]
    fn broken_monotonicity_is_reported() {
        let out = run_property(&IncreasingInAlpha, PropertyId::MonoAlpha, &quick());
        assert!(!out.passed());
        let ce = out.counterexample.unwrap();
        assert!(ce.detail.starts_with("H~"), "{}", ce.detail);
        assert!(ce.lhs > ce.rhs);
    }

    #[test]
    fn runs_are_reproducible_and_independent_of_selection() {
        let alone = run_property(&Library, PropertyId::Discard, &quick());
        let all = run_properties(&Library, &[PropertyId::MonoAlpha, PropertyId::Discard], &quick());
        assert_eq!(alone, all[1]);
    }
}
