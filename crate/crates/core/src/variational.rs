//! Relative-entropy objectives over `Q_XY` and the variational forms of
//! `H̃_{α,β}` and `Ĩ_{α,β}`.
//!
//! For finite positive `α, β`:
//!
//! ```text
//! (α−1) H̃_{α,β}(X|Y) = min_Q (α(1−β)/β) D(Q_Y‖P_Y) + α D(Q_XY‖P_XY) + (α−1) H(X|Y)_Q
//! (1−α) Ĩ_{α,β}(X:Y) = min_Q (α(1−β)/β) D(Q_Y‖P_Y) + α D(Q_XY‖P_XY) + (1−α) D(Q_{X|Y}‖P_X|Q_Y)
//! ```
//!
//! Candidates are restricted to the support of `P_XY`, outside of which
//! `D(Q_XY‖P_XY)` is infinite.

use alloc::vec::Vec;

use crate::classic::{col_sums, cond_divergence_to_marginal_flat, cond_entropy_flat};
use crate::dist::JointPmf;
use crate::math::{log2, neumaier_sum, pos_part, xlog2_ratio, LN_2};
use crate::order::OrderPair;
use crate::simplex::{minimize_over_joint, OptReport, SimplexObjective, SolverConfig, SolverError};
use crate::two_param::{h_tilde, i_tilde, TwoParamError};

/// The auxiliary information term of a [`Combo`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aux {
    /// `H(X|Y)_Q`.
    CondEntropy,
    /// `D(Q_{X|Y} ‖ P_X | Q_Y)`.
    CondDivergence,
}

/// `w_dy D(Q_Y‖P_Y) + w_dxy D(Q‖P) + w_aux A(Q) + offset + w_clip |s (A(Q) − rate)|⁺`
/// with `A` one of [`Aux`].
#[derive(Debug, Clone)]
pub struct Combo {
    nx: usize,
    ny: usize,
    p: Vec<f64>,
    px: Vec<f64>,
    py: Vec<f64>,
    pub aux: Aux,
    pub w_dy: f64,
    pub w_dxy: f64,
    pub w_aux: f64,
    pub offset: f64,
    /// `(w_clip, s, rate)`.
    pub clip: Option<(f64, f64, f64)>,
}

/// The pieces of a [`Combo`] at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComboTerms {
    pub d_y: f64,
    pub d_xy: f64,
    pub aux: f64,
}

impl Combo {
    pub fn new(joint: &JointPmf, aux: Aux) -> Self {
        Combo {
            nx: joint.nx(),
            ny: joint.ny(),
            p: joint.probs().to_vec(),
            px: joint.marginal_x().probs().to_vec(),
            py: joint.marginal_y().probs().to_vec(),
            aux,
            w_dy: 0.0,
            w_dxy: 0.0,
            w_aux: 0.0,
            offset: 0.0,
            clip: None,
        }
    }

    pub fn terms(&self, q: &[f64]) -> ComboTerms {
        let qy = col_sums(q, self.nx, self.ny);
        let d_y = neumaier_sum(qy.iter().zip(&self.py).map(|(&a, &b)| xlog2_ratio(a, b)));
        let d_xy = neumaier_sum(q.iter().zip(&self.p).map(|(&a, &b)| xlog2_ratio(a, b)));
        let aux = match self.aux {
            Aux::CondEntropy => cond_entropy_flat(q, self.nx, self.ny),
            Aux::CondDivergence => cond_divergence_to_marginal_flat(q, &self.px, self.nx, self.ny),
        };
        ComboTerms { d_y, d_xy, aux }
    }

    /// The objective without its clipped term.
    pub fn smooth_value(&self, t: &ComboTerms) -> f64 {
        let mut v = self.offset;
        // Zero weights must not turn an infinite term into NaN.
        for (w, x) in [(self.w_dy, t.d_y), (self.w_dxy, t.d_xy), (self.w_aux, t.aux)] {
            if w != 0.0 {
                v += w * x;
            }
        }
        v
    }

    pub fn clip_value(&self, t: &ComboTerms) -> f64 {
        match self.clip {
            Some((w, s, rate)) => w * pos_part(s * (t.aux - rate)),
            None => 0.0,
        }
    }

    /// Coefficients of `−H(X|Y)_Q` and `−H(Y)_Q` once every smooth term is
    /// written as entropies plus a linear function of `Q`.
    fn entropy_coefficients(&self) -> (f64, f64) {
        // D(Q‖P) = −H(XY) + lin, D(Q_Y‖P_Y) = −H(Y) + lin,
        // H(X|Y) = H(XY) − H(Y), D(Q_{X|Y}‖P_X|Q_Y) = −H(XY) + H(Y) + lin.
        let (a_xy, a_y) = match self.aux {
            Aux::CondEntropy => (self.w_dxy - self.w_aux, self.w_dy + self.w_aux),
            Aux::CondDivergence => (self.w_dxy + self.w_aux, self.w_dy - self.w_aux),
        };
        // −a_xy H(XY) − a_y H(Y) = a_xy (−H(X|Y)) + (a_xy + a_y)(−H(Y)).
        (a_xy, a_xy + a_y)
    }
}

impl SimplexObjective for Combo {
    fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    fn value(&self, q: &[f64]) -> f64 {
        let t = self.terms(q);
        self.smooth_value(&t) + self.clip_value(&t)
    }

    fn gradient(&self, q: &[f64], grad: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let qy = col_sums(q, nx, ny);
        let inv_ln2 = 1.0 / LN_2;
        let lg = |v: f64| log2(v.max(1e-300));
        let mut w_aux = self.w_aux;
        if let Some((w, s, rate)) = self.clip {
            let a = match self.aux {
                Aux::CondEntropy => cond_entropy_flat(q, nx, ny),
                Aux::CondDivergence => cond_divergence_to_marginal_flat(q, &self.px, nx, ny),
            };
            if s * (a - rate) > 0.0 {
                w_aux += w * s;
            }
        }
        for x in 0..nx {
            for y in 0..ny {
                let i = x * ny + y;
                let lq = lg(q[i]);
                let lqy = lg(qy[y]);
                let mut g = 0.0;
                if self.w_dy != 0.0 {
                    g += self.w_dy * (lqy - lg(self.py[y]) + inv_ln2);
                }
                if self.w_dxy != 0.0 {
                    g += self.w_dxy * (lq - lg(self.p[i]) + inv_ln2);
                }
                if w_aux != 0.0 {
                    g += w_aux
                        * match self.aux {
                            Aux::CondEntropy => -(lq - lqy),
                            Aux::CondDivergence => lq - lqy - lg(self.px[x]),
                        };
                }
                grad[i] = g;
            }
        }
    }

    fn support(&self) -> Option<Vec<bool>> {
        if self.w_dxy > 0.0 {
            Some(self.p.iter().map(|&v| v > 0.0).collect())
        } else {
            None
        }
    }

    fn is_convex(&self) -> bool {
        let (c_cond, c_y) = self.entropy_coefficients();
        let clip_ok = match (self.clip, self.aux) {
            (None, _) => true,
            (Some((0.0, _, _)), _) => true,
            // |R − H|⁺ with H concave, |D − R|⁺ with D convex.
            (Some((w, s, _)), Aux::CondEntropy) => w > 0.0 && s < 0.0,
            (Some((w, s, _)), Aux::CondDivergence) => w > 0.0 && s > 0.0,
        };
        c_cond >= 0.0 && c_y >= 0.0 && clip_ok
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VariationalError {
    #[error("orders must be finite and positive, got alpha={alpha}, beta={beta}")]
    InvalidOrder { alpha: f64, beta: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Measure(#[from] TwoParamError),
}

fn check(alpha: f64, beta: f64) -> Result<(), VariationalError> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    if ok(alpha) && ok(beta) {
        Ok(())
    } else {
        Err(VariationalError::InvalidOrder { alpha, beta })
    }
}

/// The objective whose minimum is `(α−1) H̃_{α,β}(X|Y)`.
pub fn cond_entropy_objective(joint: &JointPmf, alpha: f64, beta: f64) -> Combo {
    let mut c = Combo::new(joint, Aux::CondEntropy);
    c.w_dy = alpha * (1.0 - beta) / beta;
    c.w_dxy = alpha;
    c.w_aux = alpha - 1.0;
    c
}

/// The objective whose minimum is `(1−α) Ĩ_{α,β}(X:Y)`.
pub fn mutual_info_objective(joint: &JointPmf, alpha: f64, beta: f64) -> Combo {
    let mut c = Combo::new(joint, Aux::CondDivergence);
    c.w_dy = alpha * (1.0 - beta) / beta;
    c.w_dxy = alpha;
    c.w_aux = 1.0 - alpha;
    c
}

/// Minimizes the conditional-entropy objective; the minimum approximates
/// `(α−1) H̃_{α,β}(X|Y)`.
pub fn variational_h(
    joint: &JointPmf,
    alpha: f64,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<OptReport, VariationalError> {
    check(alpha, beta)?;
    let obj = cond_entropy_objective(joint, alpha, beta);
    relabel(joint, minimize_over_joint(&obj, cfg)?)
}

/// Minimizes the mutual-information objective; the minimum approximates
/// `(1−α) Ĩ_{α,β}(X:Y)`.
pub fn variational_i(
    joint: &JointPmf,
    alpha: f64,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<OptReport, VariationalError> {
    check(alpha, beta)?;
    let obj = mutual_info_objective(joint, alpha, beta);
    relabel(joint, minimize_over_joint(&obj, cfg)?)
}

/// `(α−1) H̃_{α,β}(X|Y)` from the closed form.
pub fn variational_h_target(joint: &JointPmf, alpha: f64, beta: f64) -> Result<f64, VariationalError> {
    check(alpha, beta)?;
    let order = OrderPair::from_values(alpha, beta).expect("checked orders");
    Ok((alpha - 1.0) * h_tilde(joint, order)?.value)
}

/// `(1−α) Ĩ_{α,β}(X:Y)` from the closed form.
pub fn variational_i_target(joint: &JointPmf, alpha: f64, beta: f64) -> Result<f64, VariationalError> {
    check(alpha, beta)?;
    let order = OrderPair::from_values(alpha, beta).expect("checked orders");
    Ok((1.0 - alpha) * i_tilde(joint, order)?.value)
}

fn relabel(joint: &JointPmf, mut r: OptReport) -> Result<OptReport, VariationalError> {
    r.argmin = JointPmf::new(
        joint.alphabet_x().to_vec(),
        joint.alphabet_y().to_vec(),
        r.argmin.probs().to_vec(),
    )
    .map_err(SolverError::from)?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Pmf;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fd_gradient(c: &Combo, q: &[f64]) -> Vec<f64> {
        let mut g = alloc::vec![0.0; q.len()];
        let h = 1e-7;
        let mut w = q.to_vec();
        for i in 0..q.len() {
            w[i] = q[i] + h;
            let up = c.value(&w);
            w[i] = q[i] - h;
            let down = c.value(&w);
            w[i] = q[i];
            g[i] = (up - down) / (2.0 * h);
        }
        g
    }

    #[test]
    fn analytic_gradients_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random::joint(&mut rng, 3, 2);
        let q = random::simplex_point(&mut rng, 6);
        for mut c in [cond_entropy_objective(&p, 1.7, 0.4), mutual_info_objective(&p, 0.6, 2.5)] {
            c.clip = Some((1.0, if c.aux == Aux::CondEntropy { -1.0 } else { 1.0 }, 0.05));
            let mut g = alloc::vec![0.0; 6];
            c.gradient(&q, &mut g);
            let fd = fd_gradient(&c, &q);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-5, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn order_one_objectives_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random::joint(&mut rng, 2, 3);
        let cfg = SolverConfig::default();
        for beta in [0.5, 1.0, 2.0] {
            let r = variational_h(&p, 1.0, beta, &cfg).unwrap();
            assert!(r.minimum.abs() < 1e-8, "{}", r.minimum);
            let r = variational_i(&p, 1.0, beta, &cfg).unwrap();
            assert!(r.minimum.abs() < 1e-8);
        }
    }

    #[test]
    fn independent_uniform_collapses_to_entropy() {
        let p = JointPmf::independent(&Pmf::uniform(3).unwrap(), &Pmf::uniform(2).unwrap());
        let r = variational_h(&p, 2.0, 1.0, &SolverConfig::default()).unwrap();
        assert!((r.minimum - 3f64.log2()).abs() < 1e-6);
        let r = variational_i(&p, 2.0, 0.7, &SolverConfig::default()).unwrap();
        assert!(r.minimum.abs() < 1e-8);
    }

    #[test]
    fn minimum_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = SolverConfig::default();
        let p = random::joint(&mut rng, 2, 3);
        let r = variational_h(&p, 0.5, 2.0, &cfg).unwrap();
        let t = variational_h_target(&p, 0.5, 2.0).unwrap();
        assert!((r.minimum - t).abs() <= 1e-4_f64.max(r.gap_bound), "{} vs {t}", r.minimum);
        let p = random::joint(&mut rng, 3, 3);
        for (a, b) in [(2.0, 1.0), (2.0, 0.5)] {
            let r = variational_i(&p, a, b, &cfg).unwrap();
            let t = variational_i_target(&p, a, b).unwrap();
            assert!((r.minimum - t).abs() <= 1e-4_f64.max(r.gap_bound), "{} vs {t}", r.minimum);
            assert!(r.minimum >= t - 1e-9);
        }
    }

    #[test]
    fn convexity_flags() {
        let p = JointPmf::from_rows(&[[0.1, 0.2], [0.3, 0.4]]).unwrap();
        for a in [0.3, 1.0, 2.5] {
            for b in [0.2, 1.0, 3.0] {
                assert!(cond_entropy_objective(&p, a, b).is_convex());
                assert!(mutual_info_objective(&p, a, b).is_convex());
            }
        }
        let mut c = Combo::new(&p, Aux::CondEntropy);
        c.w_aux = 1.0;
        assert!(!c.is_convex());
    }
}
