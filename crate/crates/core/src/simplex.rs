//! Minimization of convex objectives over the simplex of joint
//! distributions on a fixed `nx × ny` grid.
//!
//! The solver evaluates a coarse barycentric grid, then refines the best
//! grid points with entropic mirror descent (multiplicative updates). For
//! convex objectives the reported gap is the Frank–Wolfe duality gap at the
//! returned point, `Σ_i q_i g_i − min_i g_i`, which bounds
//! `value(q) − inf value` from above.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{DistError, JointPmf};
use crate::math::exp;

pub trait SimplexObjective {
    /// `(nx, ny)` of the joint being optimized.
    fn dims(&self) -> (usize, usize);

    /// Objective at a flat row-major joint `q`. May be `+∞` on the boundary.
    fn value(&self, q: &[f64]) -> f64;

    /// Gradient with respect to the cells of `q`. The default is a central
    /// difference; constant offsets do not matter on the simplex.
    fn gradient(&self, q: &[f64], grad: &mut [f64]) {
        let mut work = q.to_vec();
        for i in 0..q.len() {
            let h = 1e-7_f64.min(0.5 * q[i]).max(1e-12);
            work[i] = q[i] + h;
            let up = self.value(&work);
            work[i] = q[i] - h;
            let down = self.value(&work);
            work[i] = q[i];
            grad[i] = (up - down) / (2.0 * h);
        }
    }

    /// Cells allowed to carry mass. `None` means every cell.
    fn support(&self) -> Option<Vec<bool>> {
        None
    }

    fn is_convex(&self) -> bool {
        true
    }

    /// Global Lipschitz surrogate (bits per unit of L1 distance), used for
    /// the gap of objectives that are not flagged convex.
    fn lipschitz(&self) -> Option<f64> {
        None
    }
}

impl<T: SimplexObjective + ?Sized> SimplexObjective for &T {
    fn dims(&self) -> (usize, usize) {
        (**self).dims()
    }
    fn value(&self, q: &[f64]) -> f64 {
        (**self).value(q)
    }
    fn gradient(&self, q: &[f64], grad: &mut [f64]) {
        (**self).gradient(q, grad)
    }
    fn support(&self) -> Option<Vec<bool>> {
        (**self).support()
    }
    fn is_convex(&self) -> bool {
        (**self).is_convex()
    }
    fn lipschitz(&self) -> Option<f64> {
        (**self).lipschitz()
    }
}

/// An objective given by a closure, with numeric gradients.
pub struct FnObjective<'a> {
    pub nx: usize,
    pub ny: usize,
    pub f: Box<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>,
    pub support: Option<Vec<bool>>,
    pub convex: bool,
    pub lipschitz: Option<f64>,
}

impl<'a> FnObjective<'a> {
    pub fn new<F: Fn(&[f64]) -> f64 + Send + Sync + 'a>(nx: usize, ny: usize, f: F) -> Self {
        FnObjective { nx, ny, f: Box::new(f), support: None, convex: true, lipschitz: None }
    }
}

impl SimplexObjective for FnObjective<'_> {
    fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
    fn value(&self, q: &[f64]) -> f64 {
        (self.f)(q)
    }
    fn support(&self) -> Option<Vec<bool>> {
        self.support.clone()
    }
    fn is_convex(&self) -> bool {
        self.convex
    }
    fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Subdivisions per simplex edge for the initial grid. Zero skips the
    /// grid and starts from the uniform point.
    pub grid_resolution: usize,
    /// The resolution is lowered until the grid has at most this many points.
    pub grid_budget: usize,
    /// Largest number of free cells accepted.
    pub dim_cap: usize,
    /// Number of best grid points refined.
    pub starts: usize,
    /// Weight of the uniform point mixed into each start so it is interior.
    pub uniform_mix: f64,
    pub max_iter: usize,
    /// Stop once an accepted step moves less than this in L1.
    pub step_tol: f64,
    /// Step size `step0 / (1 + t / step_decay)`.
    pub step0: f64,
    pub step_decay: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid_resolution: 8,
            grid_budget: 20_000,
            dim_cap: 36,
            starts: 5,
            uniform_mix: 0.01,
            max_iter: 10_000,
            step_tol: 1e-10,
            step0: 0.1,
            step_decay: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Grid,
    MirrorDescent,
    GridRefine,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Grid => "grid",
            Method::MirrorDescent => "mirror-descent",
            Method::GridRefine => "grid+refine",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptReport {
    pub minimum: f64,
    pub argmin: JointPmf,
    pub method: Method,
    /// Upper bound on `minimum − inf objective`; `+∞` when nothing can be
    /// certified.
    pub gap_bound: f64,
    pub iterations: usize,
    pub grid_points: usize,
    pub grid_resolution: usize,
    /// Whether the best run met the step tolerance before the iteration cap.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("{dim} free cells exceed the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("objective is not finite at any grid point")]
    NonFiniteObjectiveEverywhere,
    #[error("objective has no free cells")]
    EmptySupport,
    #[error("start point has {got} cells, expected {expected}")]
    BadStart { expected: usize, got: usize },
    #[error(transparent)]
    Dist(#[from] DistError),
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r *= (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Points in the `d`-part barycentric grid of resolution `r`.
pub fn grid_size(d: usize, r: usize) -> f64 {
    binomial(r + d - 1, d - 1)
}

/// Calls `f` on every composition of `r` into `d` non-negative parts, in
/// lexicographic order.
fn for_each_composition(d: usize, r: usize, mut f: impl FnMut(&[usize])) {
    fn fill(c: &mut [usize], pos: usize, remaining: usize, f: &mut dyn FnMut(&[usize])) {
        if pos + 1 == c.len() {
            c[pos] = remaining;
            f(c);
            return;
        }
        for v in 0..=remaining {
            c[pos] = v;
            fill(c, pos + 1, remaining - v, f);
        }
    }
    let mut c = vec![0usize; d];
    fill(&mut c, 0, r, &mut f);
}

/// Free-cell bookkeeping: the objective only sees full `nx × ny` buffers.
struct Cells {
    free: Vec<usize>,
    len: usize,
}

impl Cells {
    fn new<O: SimplexObjective + ?Sized>(obj: &O) -> Result<Self, SolverError> {
        let (nx, ny) = obj.dims();
        let len = nx * ny;
        let free: Vec<usize> = match obj.support() {
            Some(mask) => (0..len).filter(|&i| mask[i]).collect(),
            None => (0..len).collect(),
        };
        if free.is_empty() {
            return Err(SolverError::EmptySupport);
        }
        Ok(Cells { free, len })
    }

    fn scatter(&self, reduced: &[f64], full: &mut [f64]) {
        full.iter_mut().for_each(|v| *v = 0.0);
        for (&i, &v) in self.free.iter().zip(reduced) {
            full[i] = v;
        }
    }
}

struct Run {
    q: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn softmax_into(w: &[f64], q: &mut [f64]) {
    let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for (qi, &wi) in q.iter_mut().zip(w) {
        *qi = exp(wi - m);
        s += *qi;
    }
    for qi in q.iter_mut() {
        *qi /= s;
    }
}

/// Entropic mirror descent from an interior start in reduced coordinates.
///
/// A step that would increase the objective is halved until it does not;
/// if thirty halvings fail the run stops where it is.
fn mirror_descent<O: SimplexObjective + ?Sized>(
    obj: &O,
    cells: &Cells,
    start: &[f64],
    cfg: &SolverConfig,
) -> Run {
    let d = cells.free.len();
    let mut full = vec![0.0; cells.len];
    let mut grad_full = vec![0.0; cells.len];
    let mut w: Vec<f64> = start.iter().map(|&v| crate::math::ln(v.max(1e-300))).collect();
    let mut q = vec![0.0; d];
    softmax_into(&w, &mut q);
    cells.scatter(&q, &mut full);
    let mut value = obj.value(&full);
    let mut w_new = vec![0.0; d];
    let mut q_new = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut converged = false;
    let mut t = 0;
    while t < cfg.max_iter {
        cells.scatter(&q, &mut full);
        obj.gradient(&full, &mut grad_full);
        for (gi, &i) in g.iter_mut().zip(&cells.free) {
            *gi = grad_full[i];
        }
        if g.iter().any(|v| !v.is_finite()) {
            break;
        }
        let mut eta = cfg.step0 / (1.0 + t as f64 / cfg.step_decay);
        let mut accepted = false;
        let mut step = 0.0;
        for _ in 0..30 {
            for k in 0..d {
                w_new[k] = w[k] - eta * g[k];
            }
            softmax_into(&w_new, &mut q_new);
            cells.scatter(&q_new, &mut full);
            let v = obj.value(&full);
            if v <= value {
                step = q_new.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>();
                assert!(v <= value, "mirror descent accepted an increasing step");
                value = v;
                core::mem::swap(&mut w, &mut w_new);
                core::mem::swap(&mut q, &mut q_new);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        t += 1;
        if !accepted || step < cfg.step_tol {
            converged = true;
            break;
        }
    }
    Run { q, value, iterations: t, converged }
}

/// Frank–Wolfe gap at `q` over the face spanned by the free cells.
fn fw_gap<O: SimplexObjective + ?Sized>(obj: &O, cells: &Cells, q: &[f64]) -> f64 {
    let mut full = vec![0.0; cells.len];
    let mut grad = vec![0.0; cells.len];
    cells.scatter(q, &mut full);
    obj.gradient(&full, &mut grad);
    let mut lin = 0.0;
    let mut min = f64::INFINITY;
    for (&i, &qi) in cells.free.iter().zip(q) {
        let gi = grad[i];
        if !gi.is_finite() {
            return f64::INFINITY;
        }
        lin += qi * gi;
        min = min.min(gi);
    }
    (lin - min).max(0.0)
}

fn gap_for<O: SimplexObjective + ?Sized>(obj: &O, cells: &Cells, run: &Run, resolution: f64) -> f64 {
    if obj.is_convex() {
        fw_gap(obj, cells, &run.q)
    } else {
        match obj.lipschitz() {
            Some(l) => l * resolution,
            None => f64::INFINITY,
        }
    }
}

fn to_joint<O: SimplexObjective + ?Sized>(obj: &O, cells: &Cells, q: &[f64]) -> Result<JointPmf, SolverError> {
    let (nx, ny) = obj.dims();
    let mut full = vec![0.0; cells.len];
    cells.scatter(q, &mut full);
    let s: f64 = crate::math::neumaier_sum(full.iter().copied());
    full.iter_mut().for_each(|v| *v /= s);
    Ok(JointPmf::from_flat(nx, ny, full)?)
}

/// Grid search followed by mirror-descent refinement of the best points.
pub fn minimize_over_joint<O: SimplexObjective + ?Sized>(
    obj: &O,
    cfg: &SolverConfig,
) -> Result<OptReport, SolverError> {
    let cells = Cells::new(obj)?;
    let d = cells.free.len();
    if d > cfg.dim_cap {
        return Err(SolverError::DimensionCap { dim: d, cap: cfg.dim_cap });
    }
    if cfg.grid_resolution == 0 {
        let uniform = vec![1.0 / d as f64; d];
        return refine_from(obj, &cells, &[uniform], 0, 0, cfg);
    }
    let mut r = cfg.grid_resolution;
    while r > 1 && grid_size(d, r) > cfg.grid_budget as f64 {
        r -= 1;
    }
    let k = cfg.starts.max(1);
    let mut best: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k + 1);
    let mut full = vec![0.0; cells.len];
    let mut count = 0usize;
    let mut reduced = vec![0.0; d];
    for_each_composition(d, r, |c| {
        count += 1;
        for (v, &ci) in reduced.iter_mut().zip(c) {
            *v = ci as f64 / r as f64;
        }
        cells.scatter(&reduced, &mut full);
        let v = obj.value(&full);
        if !v.is_finite() {
            return;
        }
        if best.len() < k || v < best[best.len() - 1].0 {
            let pos = best.partition_point(|(b, _)| *b <= v);
            best.insert(pos, (v, reduced.clone()));
            best.truncate(k);
        }
    });
    if best.is_empty() {
        return Err(SolverError::NonFiniteObjectiveEverywhere);
    }
    let mix = cfg.uniform_mix;
    let starts: Vec<Vec<f64>> = best
        .iter()
        .map(|(_, p)| p.iter().map(|&v| (1.0 - mix) * v + mix / d as f64).collect())
        .collect();
    let mut report = refine_from(obj, &cells, &starts, count, r, cfg)?;
    // Keep the grid incumbent if refinement somehow did worse.
    if best[0].0 < report.minimum {
        let grid_q = &best[0].1;
        report.minimum = best[0].0;
        report.argmin = to_joint(obj, &cells, grid_q)?;
        report.method = Method::Grid;
        report.gap_bound = match obj.lipschitz() {
            Some(l) => l / r as f64,
            None => f64::INFINITY,
        };
    }
    Ok(report)
}

/// Mirror descent from a caller-supplied joint, skipping the grid.
pub fn minimize_from<O: SimplexObjective + ?Sized>(
    obj: &O,
    start: &[f64],
    cfg: &SolverConfig,
) -> Result<OptReport, SolverError> {
    let cells = Cells::new(obj)?;
    if start.len() != cells.len {
        return Err(SolverError::BadStart { expected: cells.len, got: start.len() });
    }
    let d = cells.free.len();
    let mix = cfg.uniform_mix;
    let s: f64 = cells.free.iter().map(|&i| start[i].max(0.0)).sum();
    let reduced: Vec<f64> = cells
        .free
        .iter()
        .map(|&i| (1.0 - mix) * start[i].max(0.0) / s + mix / d as f64)
        .collect();
    refine_from(obj, &cells, &[reduced], 0, 0, cfg)
}

fn refine_from<O: SimplexObjective + ?Sized>(
    obj: &O,
    cells: &Cells,
    starts: &[Vec<f64>],
    grid_points: usize,
    grid_resolution: usize,
    cfg: &SolverConfig,
) -> Result<OptReport, SolverError> {
    let mut best: Option<Run> = None;
    let mut iterations = 0;
    for s in starts {
        let run = mirror_descent(obj, cells, s, cfg);
        iterations += run.iterations;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let run = best.ok_or(SolverError::NonFiniteObjectiveEverywhere)?;
    if !run.value.is_finite() {
        return Err(SolverError::NonFiniteObjectiveEverywhere);
    }
    let resolution = if grid_resolution > 0 { 1.0 / grid_resolution as f64 } else { cfg.step_tol };
    let gap_bound = gap_for(obj, cells, &run, resolution);
    Ok(OptReport {
        minimum: run.value,
        argmin: to_joint(obj, cells, &run.q)?,
        method: if grid_points > 0 { Method::GridRefine } else { Method::MirrorDescent },
        gap_bound,
        iterations,
        grid_points,
        grid_resolution,
        converged: run.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::xlog2_ratio;

    fn compositions(d: usize, r: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for_each_composition(d, r, |c| out.push(c.to_vec()));
        out
    }

    #[test]
    fn grid_enumerates_every_composition_once() {
        for d in 1..6 {
            for r in 0..6 {
                let all = compositions(d, r);
                assert_eq!(all.len() as f64, grid_size(d, r), "d={d} r={r}");
                assert!(all.iter().all(|c| c.iter().sum::<usize>() == r));
                let mut sorted = all.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), all.len());
            }
        }
    }

    #[test]
    fn relative_entropy_is_minimized_at_reference() {
        let p = [0.1, 0.2, 0.3, 0.15, 0.05, 0.2];
        let obj = FnObjective::new(2, 3, move |q: &[f64]| {
            q.iter().zip(&p).map(|(&a, &b)| xlog2_ratio(a, b)).sum()
        });
        let r = minimize_over_joint(&obj, &SolverConfig::default()).unwrap();
        assert!(r.minimum.abs() < 1e-8, "{}", r.minimum);
        assert!(r.minimum >= -1e-15);
        for (a, b) in r.argmin.probs().iter().zip(&p) {
            assert!((a - b).abs() < 1e-4);
        }
        assert!(r.gap_bound < 1e-4);
        assert_eq!(r.method, Method::GridRefine);
    }

    #[test]
    fn linear_objective_goes_to_a_vertex() {
        let c = [3.0, 1.0, 2.0, 5.0];
        let obj = FnObjective::new(2, 2, move |q: &[f64]| q.iter().zip(&c).map(|(a, b)| a * b).sum());
        let r = minimize_over_joint(&obj, &SolverConfig::default()).unwrap();
        assert!(r.minimum - 1.0 < 1e-3);
        assert!(r.minimum - 1.0 <= r.gap_bound + 1e-12);
    }

    #[test]
    fn support_mask_pins_cells_to_zero() {
        let mut obj = FnObjective::new(1, 3, |q: &[f64]| -q.iter().map(|&v| -crate::math::xlog2x(v)).sum::<f64>());
        obj.support = Some(vec![true, false, true]);
        let r = minimize_over_joint(&obj, &SolverConfig::default()).unwrap();
        assert_eq!(r.argmin.probs()[1], 0.0);
        assert!((r.minimum + 1.0).abs() < 1e-6);
    }

    #[test]
    fn dimension_cap_and_infinite_objective() {
        let obj = FnObjective::new(7, 7, |_: &[f64]| 0.0);
        assert!(matches!(
            minimize_over_joint(&obj, &SolverConfig::default()),
            Err(SolverError::DimensionCap { dim: 49, cap: 36 })
        ));
        let obj = FnObjective::new(2, 2, |_: &[f64]| f64::INFINITY);
        assert_eq!(
            minimize_over_joint(&obj, &SolverConfig::default()),
            Err(SolverError::NonFiniteObjectiveEverywhere)
        );
    }

    #[test]
    fn non_convex_objectives_get_no_free_certificate() {
        let mut obj = FnObjective::new(1, 2, |q: &[f64]| (q[0] - 0.3) * (q[0] - 0.3));
        obj.convex = false;
        let r = minimize_over_joint(&obj, &SolverConfig::default()).unwrap();
        assert_eq!(r.gap_bound, f64::INFINITY);
        obj.lipschitz = Some(2.0);
        let r = minimize_over_joint(&obj, &SolverConfig::default()).unwrap();
        assert!((r.gap_bound - 0.25).abs() < 1e-12);
    }
}
