//! Random distributions for property checks and simulations.
//!
//! Uniform draws on the simplex use normalized `−ln U` weights (flat
//! Dirichlet). Sparse variants zero out cells exactly so that support
//! handling is exercised.

use alloc::vec::Vec;

use rand::Rng;

use crate::dist::{CondPmf, JointPmf, Pmf};
use crate::math::ln;

fn exp_weight<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 − U lies in (0, 1], so the logarithm is finite.
    let u: f64 = rng.random();
    -ln(1.0 - u)
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let s: f64 = crate::math::neumaier_sum(w.iter().copied());
    for v in &mut w {
        *v /= s;
    }
    w
}

/// Uniform on the interior of the simplex.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    normalize((0..n).map(|_| exp_weight(rng)).collect())
}

/// Simplex point whose ratios are bounded by 3: weights `1 + 2U`.
pub fn interior_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    normalize((0..n).map(|_| 1.0 + 2.0 * rng.random::<f64>()).collect())
}

/// Like [`simplex_point`] but each coordinate is zeroed with probability
/// `p_zero`, keeping at least one positive entry.
pub fn sparse_simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize, p_zero: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.random::<f64>() < p_zero { 0.0 } else { exp_weight(rng) })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        let i = rng.random_range(0..n);
        w[i] = exp_weight(rng);
    }
    normalize(w)
}

fn checked_pmf(p: Vec<f64>) -> Pmf {
    Pmf::from_probs(p).expect("normalized weights form a pmf")
}

fn checked_joint(nx: usize, ny: usize, p: Vec<f64>) -> JointPmf {
    JointPmf::from_flat(nx, ny, p).expect("normalized weights form a joint")
}

pub fn pmf<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Pmf {
    checked_pmf(simplex_point(rng, n))
}

pub fn joint<R: Rng + ?Sized>(rng: &mut R, nx: usize, ny: usize) -> JointPmf {
    checked_joint(nx, ny, simplex_point(rng, nx * ny))
}

/// Full-support joint with all cell ratios at most 3.
pub fn interior_joint<R: Rng + ?Sized>(rng: &mut R, nx: usize, ny: usize) -> JointPmf {
    checked_joint(nx, ny, interior_point(rng, nx * ny))
}

pub fn sparse_joint<R: Rng + ?Sized>(rng: &mut R, nx: usize, ny: usize, p_zero: f64) -> JointPmf {
    checked_joint(nx, ny, sparse_simplex_point(rng, nx * ny, p_zero))
}

/// A joint with random sizes in `1..=max_x` and `1..=max_y`; with
/// probability one half some cells are exactly zero.
pub fn any_joint<R: Rng + ?Sized>(rng: &mut R, max_x: usize, max_y: usize) -> JointPmf {
    let nx = rng.random_range(1..=max_x);
    let ny = rng.random_range(1..=max_y);
    if rng.random::<bool>() {
        sparse_joint(rng, nx, ny, 0.3)
    } else {
        joint(rng, nx, ny)
    }
}

/// A channel with every row drawn from [`simplex_point`].
pub fn channel<R: Rng + ?Sized>(rng: &mut R, n_in: usize, n_out: usize) -> CondPmf {
    let rows: Vec<Vec<f64>> = (0..n_in).map(|_| simplex_point(rng, n_out)).collect();
    CondPmf::from_rows(&rows).expect("normalized rows form a channel")
}

pub fn sparse_channel<R: Rng + ?Sized>(rng: &mut R, n_in: usize, n_out: usize, p_zero: f64) -> CondPmf {
    let rows: Vec<Vec<f64>> = (0..n_in).map(|_| sparse_simplex_point(rng, n_out, p_zero)).collect();
    CondPmf::from_rows(&rows).expect("normalized rows form a channel")
}
