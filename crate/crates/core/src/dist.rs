//! Validated finite distributions: marginals, joints, conditionals, products.
//!
//! Every constructor checks non-negativity and normalization against a fixed
//! tolerance and rejects rather than renormalizes. Supports are exact: a
//! symbol belongs to the support iff its mass is strictly positive.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::math::neumaier_sum;

/// Allowed deviation of the total mass from 1.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Largest joint (in cells) that `product` and `power` will build.
pub const DEFAULT_CELL_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistError {
    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("non-finite mass at index {index}")]
    NonFinite { index: usize },
    #[error("masses sum to {sum}, off by {deviation:e}")]
    NotNormalized { sum: f64, deviation: f64 },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("empty alphabet")]
    Empty,
    #[error("{cells} cells exceed the cap of {cap}")]
    SizeOverflow { cells: usize, cap: usize },
    #[error("alphabet sizes differ: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("no conditional row for input symbol {0} although it has positive mass")]
    MissingRow(usize),
}

fn check_labels(labels: &[String]) -> Result<(), DistError> {
    if labels.is_empty() {
        return Err(DistError::Empty);
    }
    let mut sorted: Vec<&String> = labels.iter().collect();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(DistError::DuplicateLabel(w[0].clone()));
        }
    }
    Ok(())
}

fn check_masses(probs: &[f64]) -> Result<(), DistError> {
    if probs.is_empty() {
        return Err(DistError::Empty);
    }
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() {
            return Err(DistError::NonFinite { index });
        }
        if value < 0.0 {
            return Err(DistError::NegativeMass { index, value });
        }
    }
    let sum = neumaier_sum(probs.iter().copied());
    let deviation = (sum - 1.0).abs();
    if deviation > NORMALIZATION_TOL {
        return Err(DistError::NotNormalized { sum, deviation });
    }
    Ok(())
}

/// `"0", "1", …, "n-1"`.
pub fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn pair_labels(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for u in a {
        for v in b {
            out.push(format!("({u},{v})"));
        }
    }
    out
}

/// Indices of strictly positive entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    indices: Vec<usize>,
}

impl Support {
    pub fn of(probs: &[f64]) -> Self {
        Support {
            indices: probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// A probability vector over a labelled alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    alphabet: Vec<String>,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(alphabet: Vec<String>, probs: Vec<f64>) -> Result<Self, DistError> {
        if alphabet.len() != probs.len() {
            return Err(DistError::ShapeMismatch {
                expected: alphabet.len(),
                got: probs.len(),
            });
        }
        check_labels(&alphabet)?;
        check_masses(&probs)?;
        Ok(Pmf { alphabet, probs })
    }

    /// A pmf labelled by index.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self, DistError> {
        Pmf::new(index_labels(probs.len()), probs)
    }

    pub fn uniform(n: usize) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::Empty);
        }
        Pmf::from_probs(alloc::vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self, DistError> {
        if at >= n {
            return Err(DistError::ShapeMismatch { expected: n, got: at + 1 });
        }
        let mut probs = alloc::vec![0.0; n];
        probs[at] = 1.0;
        Pmf::from_probs(probs)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> Support {
        Support::of(&self.probs)
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<f64>) {
        (self.alphabet, self.probs)
    }
}

/// A joint distribution of `(X, Y)` stored row-major: `probs[x * ny + y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    alphabet_x: Vec<String>,
    alphabet_y: Vec<String>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(
        alphabet_x: Vec<String>,
        alphabet_y: Vec<String>,
        probs: Vec<f64>,
    ) -> Result<Self, DistError> {
        let cells = alphabet_x
            .len()
            .checked_mul(alphabet_y.len())
            .ok_or(DistError::SizeOverflow { cells: usize::MAX, cap: usize::MAX })?;
        if cells != probs.len() {
            return Err(DistError::ShapeMismatch { expected: cells, got: probs.len() });
        }
        check_labels(&alphabet_x)?;
        check_labels(&alphabet_y)?;
        check_masses(&probs)?;
        Ok(JointPmf { alphabet_x, alphabet_y, probs })
    }

    /// A joint labelled by index from a flat row-major buffer.
    pub fn from_flat(nx: usize, ny: usize, probs: Vec<f64>) -> Result<Self, DistError> {
        JointPmf::new(index_labels(nx), index_labels(ny), probs)
    }

    /// A joint labelled by index from rows indexed by `x`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, DistError> {
        let nx = rows.len();
        if nx == 0 {
            return Err(DistError::Empty);
        }
        let ny = rows[0].as_ref().len();
        let mut flat = Vec::with_capacity(nx * ny);
        for r in rows {
            let r = r.as_ref();
            if r.len() != ny {
                return Err(DistError::ShapeMismatch { expected: ny, got: r.len() });
            }
            flat.extend_from_slice(r);
        }
        JointPmf::from_flat(nx, ny, flat)
    }

    /// `P_X × P_Y`.
    pub fn independent(px: &Pmf, py: &Pmf) -> Self {
        let mut probs = Vec::with_capacity(px.len() * py.len());
        for &a in px.probs() {
            for &b in py.probs() {
                probs.push(a * b);
            }
        }
        JointPmf {
            alphabet_x: px.alphabet.clone(),
            alphabet_y: py.alphabet.clone(),
            probs,
        }
    }

    /// `P_X · P_{Y|X}`.
    pub fn from_input_and_channel(px: &Pmf, pyx: &CondPmf) -> Result<Self, DistError> {
        if px.len() != pyx.given_len() {
            return Err(DistError::AlphabetMismatch { left: px.len(), right: pyx.given_len() });
        }
        let ny = pyx.outcome_len();
        let mut probs = Vec::with_capacity(px.len() * ny);
        for (x, &p) in px.probs().iter().enumerate() {
            match pyx.row(x) {
                Some(row) => probs.extend(row.probs().iter().map(|&w| p * w)),
                None if p == 0.0 => probs.extend(core::iter::repeat_n(0.0, ny)),
                None => return Err(DistError::MissingRow(x)),
            }
        }
        JointPmf::new(px.alphabet.clone(), pyx.alphabet_outcome.clone(), probs)
    }

    pub fn nx(&self) -> usize {
        self.alphabet_x.len()
    }

    pub fn ny(&self) -> usize {
        self.alphabet_y.len()
    }

    pub fn alphabet_x(&self) -> &[String] {
        &self.alphabet_x
    }

    pub fn alphabet_y(&self) -> &[String] {
        &self.alphabet_y
    }

    /// Flat row-major masses.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.ny() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let ny = self.ny();
        &self.probs[x * ny..(x + 1) * ny]
    }

    pub fn marginal_x(&self) -> Pmf {
        let probs = (0..self.nx())
            .map(|x| neumaier_sum(self.row(x).iter().copied()))
            .collect();
        Pmf { alphabet: self.alphabet_x.clone(), probs }
    }

    pub fn marginal_y(&self) -> Pmf {
        let probs = (0..self.ny())
            .map(|y| neumaier_sum((0..self.nx()).map(|x| self.get(x, y))))
            .collect();
        Pmf { alphabet: self.alphabet_y.clone(), probs }
    }

    /// `(P_Y, P_{X|Y})`; rows exist exactly for `y` in the support of `P_Y`.
    pub fn condition_on_y(&self) -> (Pmf, CondPmf) {
        let py = self.marginal_y();
        let rows = (0..self.ny())
            .map(|y| {
                let m = py.probs[y];
                (m > 0.0).then(|| Pmf {
                    alphabet: self.alphabet_x.clone(),
                    probs: (0..self.nx()).map(|x| self.get(x, y) / m).collect(),
                })
            })
            .collect();
        let cond = CondPmf {
            alphabet_given: self.alphabet_y.clone(),
            alphabet_outcome: self.alphabet_x.clone(),
            rows,
        };
        (py, cond)
    }

    /// `(P_X, P_{Y|X})`; rows exist exactly for `x` in the support of `P_X`.
    pub fn condition_on_x(&self) -> (Pmf, CondPmf) {
        let px = self.marginal_x();
        let rows = (0..self.nx())
            .map(|x| {
                let m = px.probs[x];
                (m > 0.0).then(|| Pmf {
                    alphabet: self.alphabet_y.clone(),
                    probs: self.row(x).iter().map(|&v| v / m).collect(),
                })
            })
            .collect();
        let cond = CondPmf {
            alphabet_given: self.alphabet_x.clone(),
            alphabet_outcome: self.alphabet_y.clone(),
            rows,
        };
        (px, cond)
    }

    /// The same distribution with the roles of `X` and `Y` exchanged.
    pub fn transpose(&self) -> JointPmf {
        let (nx, ny) = (self.nx(), self.ny());
        let mut probs = Vec::with_capacity(nx * ny);
        for y in 0..ny {
            for x in 0..nx {
                probs.push(self.get(x, y));
            }
        }
        JointPmf {
            alphabet_x: self.alphabet_y.clone(),
            alphabet_y: self.alphabet_x.clone(),
            probs,
        }
    }

    pub fn product(&self, other: &JointPmf) -> Result<JointPmf, DistError> {
        self.product_with_cap(other, DEFAULT_CELL_CAP)
    }

    /// `P_XY × Q_X'Y'` on `(X×X') × (Y×Y')`, labels `"(a,b)"`.
    pub fn product_with_cap(&self, other: &JointPmf, cap: usize) -> Result<JointPmf, DistError> {
        let nx = self.nx().saturating_mul(other.nx());
        let ny = self.ny().saturating_mul(other.ny());
        let cells = nx.saturating_mul(ny);
        if cells > cap {
            return Err(DistError::SizeOverflow { cells, cap });
        }
        let mut probs = Vec::with_capacity(cells);
        for x1 in 0..self.nx() {
            for x2 in 0..other.nx() {
                for y1 in 0..self.ny() {
                    let a = self.get(x1, y1);
                    for y2 in 0..other.ny() {
                        probs.push(a * other.get(x2, y2));
                    }
                }
            }
        }
        Ok(JointPmf {
            alphabet_x: pair_labels(&self.alphabet_x, &other.alphabet_x),
            alphabet_y: pair_labels(&self.alphabet_y, &other.alphabet_y),
            probs,
        })
    }

    /// The `n`-fold i.i.d. product; `n = 0` gives the one-cell point mass.
    pub fn power(&self, n: usize) -> Result<JointPmf, DistError> {
        self.power_with_cap(n, DEFAULT_CELL_CAP)
    }

    pub fn power_with_cap(&self, n: usize, cap: usize) -> Result<JointPmf, DistError> {
        if n == 0 {
            return Ok(JointPmf {
                alphabet_x: alloc::vec!["()".to_string()],
                alphabet_y: alloc::vec!["()".to_string()],
                probs: alloc::vec![1.0],
            });
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.product_with_cap(self, cap)?;
        }
        Ok(acc)
    }

    /// Pushes `X` forward through `map: X → {0, …, m-1}`, keeping `Y`.
    pub fn map_x(&self, map: &[usize], m: usize) -> Result<JointPmf, DistError> {
        if map.len() != self.nx() {
            return Err(DistError::AlphabetMismatch { left: self.nx(), right: map.len() });
        }
        if m == 0 {
            return Err(DistError::Empty);
        }
        if let Some(&z) = map.iter().find(|&&z| z >= m) {
            return Err(DistError::ShapeMismatch { expected: m, got: z + 1 });
        }
        let ny = self.ny();
        let mut probs = alloc::vec![0.0; m * ny];
        for (x, &z) in map.iter().enumerate() {
            for y in 0..ny {
                probs[z * ny + y] += self.get(x, y);
            }
        }
        JointPmf::new(index_labels(m), self.alphabet_y.clone(), probs)
    }
}

/// A conditional distribution: one optional row per conditioning symbol.
///
/// A row is `None` when the conditioning symbol has zero mass; nothing is
/// fabricated for it.
#[derive(Debug, Clone, PartialEq)]
pub struct CondPmf {
    alphabet_given: Vec<String>,
    alphabet_outcome: Vec<String>,
    rows: Vec<Option<Pmf>>,
}

impl CondPmf {
    /// A channel with every row present, labelled by index.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, DistError> {
        if rows.is_empty() {
            return Err(DistError::Empty);
        }
        let n_out = rows[0].as_ref().len();
        let rows = rows
            .iter()
            .map(|r| {
                let r = r.as_ref();
                if r.len() != n_out {
                    return Err(DistError::ShapeMismatch { expected: n_out, got: r.len() });
                }
                Pmf::from_probs(r.to_vec()).map(Some)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CondPmf {
            alphabet_given: index_labels(rows.len()),
            alphabet_outcome: index_labels(n_out),
            rows,
        })
    }

    pub fn new(
        alphabet_given: Vec<String>,
        alphabet_outcome: Vec<String>,
        rows: Vec<Option<Pmf>>,
    ) -> Result<Self, DistError> {
        check_labels(&alphabet_given)?;
        check_labels(&alphabet_outcome)?;
        if rows.len() != alphabet_given.len() {
            return Err(DistError::ShapeMismatch { expected: alphabet_given.len(), got: rows.len() });
        }
        for r in rows.iter().flatten() {
            if r.len() != alphabet_outcome.len() {
                return Err(DistError::ShapeMismatch {
                    expected: alphabet_outcome.len(),
                    got: r.len(),
                });
            }
        }
        Ok(CondPmf { alphabet_given, alphabet_outcome, rows })
    }

    pub fn given_len(&self) -> usize {
        self.alphabet_given.len()
    }

    pub fn outcome_len(&self) -> usize {
        self.alphabet_outcome.len()
    }

    pub fn alphabet_given(&self) -> &[String] {
        &self.alphabet_given
    }

    pub fn alphabet_outcome(&self) -> &[String] {
        &self.alphabet_outcome
    }

    pub fn row(&self, i: usize) -> Option<&Pmf> {
        self.rows[i].as_ref()
    }

    pub fn rows(&self) -> &[Option<Pmf>] {
        &self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
    }

    #[test]
    fn validation_accepts_and_rejects() {
        assert!(Pmf::from_probs(vec![0.5, 0.5]).is_ok());
        match Pmf::from_probs(vec![0.5, 0.499]) {
            Err(DistError::NotNormalized { deviation, .. }) => {
                assert!((deviation - 1e-3).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        assert!(JointPmf::from_rows(&[[0.25, 0.25], [0.25, 0.25]]).is_ok());
        assert!(matches!(
            Pmf::from_probs(vec![1.5, -0.5]),
            Err(DistError::NegativeMass { index: 1, .. })
        ));
        assert!(matches!(
            Pmf::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]),
            Err(DistError::DuplicateLabel(_))
        ));
        assert!(matches!(
            Pmf::from_probs(vec![f64::NAN, 1.0]),
            Err(DistError::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn no_silent_renormalization() {
        // A 2e-12 deficit is beyond tolerance even though it is tiny.
        assert!(Pmf::from_probs(vec![0.5, 0.5 - 2e-12]).is_err());
        assert!(Pmf::from_probs(vec![0.5, 0.5 - 5e-13]).is_ok());
    }

    #[test]
    fn marginals() {
        let u = JointPmf::from_rows(&[[0.25, 0.25], [0.25, 0.25]]).unwrap();
        assert!(close(u.marginal_y().probs(), &[0.5, 0.5]));
        let d = JointPmf::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
        assert!(close(d.marginal_y().probs(), &[0.5, 0.5]));
        let g = JointPmf::from_rows(&[[0.1, 0.2], [0.3, 0.4]]).unwrap();
        assert!(close(g.marginal_y().probs(), &[0.4, 0.6]));
        assert!(close(g.marginal_x().probs(), &[0.3, 0.7]));
    }

    #[test]
    fn conditioning_on_y() {
        let d = JointPmf::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let (_, c) = d.condition_on_y();
        assert!(close(c.row(0).unwrap().probs(), &[1.0, 0.0]));
        assert!(close(c.row(1).unwrap().probs(), &[0.0, 1.0]));

        let u = JointPmf::from_rows(&[[0.25, 0.25], [0.25, 0.25]]).unwrap();
        let (_, c) = u.condition_on_y();
        for y in 0..2 {
            assert!(close(c.row(y).unwrap().probs(), &[0.5, 0.5]));
        }

        let z = JointPmf::from_rows(&[[0.4, 0.0], [0.6, 0.0]]).unwrap();
        let (py, c) = z.condition_on_y();
        assert!(close(py.probs(), &[1.0, 0.0]));
        assert!(close(c.row(0).unwrap().probs(), &[0.4, 0.6]));
        assert!(c.row(1).is_none());
    }

    #[test]
    fn products() {
        let g = JointPmf::from_rows(&[[0.1, 0.2], [0.3, 0.4]]).unwrap();
        let one = JointPmf::from_rows(&[[1.0]]).unwrap();
        let gp = g.product(&one).unwrap();
        assert_eq!(gp.probs(), g.probs());
        assert_eq!(gp.alphabet_x()[1], "(1,0)");

        let u = JointPmf::from_rows(&[[0.25, 0.25], [0.25, 0.25]]).unwrap();
        let uu = u.product(&u).unwrap();
        assert_eq!((uu.nx(), uu.ny()), (4, 4));
        assert!(uu.probs().iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));

        let d = JointPmf::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let d3 = d.power(3).unwrap();
        assert_eq!((d3.nx(), d3.ny()), (8, 8));
        for x in 0..8 {
            for y in 0..8 {
                let want = if x == y { 0.125 } else { 0.0 };
                assert_eq!(d3.get(x, y), want);
            }
        }
    }

    #[test]
    fn product_respects_cap() {
        let u = JointPmf::from_rows(&[[0.25, 0.25], [0.25, 0.25]]).unwrap();
        assert!(matches!(
            u.product_with_cap(&u, 15),
            Err(DistError::SizeOverflow { cells: 16, cap: 15 })
        ));
    }

    #[test]
    fn channel_round_trip() {
        let g = JointPmf::from_rows(&[[0.1, 0.2], [0.3, 0.4], [0.0, 0.0]]).unwrap();
        let (px, w) = g.condition_on_x();
        assert!(w.row(2).is_none());
        let back = JointPmf::from_input_and_channel(&px, &w).unwrap();
        assert!(close(back.probs(), g.probs()));
    }

    #[test]
    fn map_x_sums_preimages() {
        let u = JointPmf::from_rows(&[[0.25], [0.25], [0.25], [0.25]]).unwrap();
        // XOR of the two bits of x.
        let h = [0, 1, 1, 0];
        let z = u.map_x(&h, 2).unwrap();
        assert!(close(z.probs(), &[0.5, 0.5]));
        assert!(u.map_x(&[0, 0, 0, 2], 2).is_err());
    }
}
