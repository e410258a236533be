//! Explicit distributions over `{0, .., n-1}` and the distances between them.
//!
//! Indices are zero-based in the API. Generator spec strings (see
//! [`crate::fixture`]) use one-based element numbers where an element is named.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest deviation of the input total from 1 that construction silently
/// renormalizes away.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

/// A normalized, non-negative probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Build from a probability vector. Totals within
    /// [`RENORMALIZE_TOLERANCE`] of 1 are renormalized; anything further off
    /// is rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let total = checked_total(&probs)?;
        if (total - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self::normalized(probs, total))
    }

    /// Build from arbitrary non-negative weights with a positive total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total = checked_total(&weights)?;
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Ok(Self::normalized(weights, total))
    }

    fn normalized(mut probs: Vec<f64>, total: f64) -> Self {
        if total != 1.0 {
            for p in &mut probs {
                *p /= total;
            }
        }
        Self { probs }
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform distribution needs a non-empty domain");
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// All mass on `index` (zero-based).
    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::precondition(format!(
                "point mass index {index} outside domain of size {n}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Ok(Self { probs })
    }

    /// Uniform over a non-empty subset of `{0, .., n-1}`.
    pub fn uniform_on(n: usize, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut weights = vec![0.0; n];
        for &i in support {
            if i >= n {
                return Err(Error::precondition(format!("index {i} outside domain of size {n}")));
            }
            weights[i] = 1.0;
        }
        Self::from_weights(weights)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Total mass of a set of indices.
    pub fn mass(&self, set: &[usize]) -> f64 {
        // Folding from +0.0 keeps the mass of an empty set positive zero.
        set.iter().fold(0.0, |acc, &i| acc + self.probs[i])
    }

    /// Probabilities sorted in descending order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.probs.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Indices with positive probability.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.probs[i] > 0.0).collect()
    }

    /// The distribution with its domain relabeled: element `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::DomainMismatch {
                left: self.len(),
                right: perm.len(),
            });
        }
        let mut probs = vec![0.0; self.len()];
        let mut seen = vec![false; self.len()];
        for (i, &j) in perm.iter().enumerate() {
            if j >= self.len() || seen[j] {
                return Err(Error::precondition("not a permutation"));
            }
            seen[j] = true;
            probs[j] = self.probs[i];
        }
        Ok(Self { probs })
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

fn checked_total(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidDistribution("empty domain".into()));
    }
    let mut total = 0.0;
    for (i, &p) in values.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {p}; entries must be finite and non-negative"
            )));
        }
        total += p;
    }
    Ok(total)
}

fn same_len(a: &Distribution, b: &Distribution) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DomainMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Total variation distance, half the l1 distance.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> Result<f64> {
    same_len(a, b)?;
    Ok(tv_of_slices(a.probs(), b.probs()))
}

pub(crate) fn tv_of_slices(a: &[f64], b: &[f64]) -> f64 {
    let l1: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    (0.5 * l1).min(1.0)
}

/// Largest per-element difference.
pub fn linf_distance(a: &Distribution, b: &Distribution) -> Result<f64> {
    same_len(a, b)?;
    Ok(a.probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Mix in a little uniform mass so no element has probability zero:
/// `p_i -> 1/n^2 + (1 - 1/n) p_i`, renormalized. Moves at most `2/n` in TV.
pub fn smooth(mu: &Distribution) -> Distribution {
    let n = mu.len() as f64;
    let floor = 1.0 / (n * n);
    let keep = 1.0 - 1.0 / n;
    let weights: Vec<f64> = mu.probs().iter().map(|p| floor + keep * p).collect();
    let total: f64 = weights.iter().sum();
    Distribution::normalized(weights, total)
}
