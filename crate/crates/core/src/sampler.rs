//! Ratio trees and the explicit persistent sampler.
//!
//! The domain is padded with zero-probability leaves up to a power of two
//! `n_pad` and arranged as a complete binary tree in heap order: node 1 is
//! the root, node `u` has children `2u` and `2u+1`, and leaf `i` is node
//! `n_pad + i`. Every internal node carries a ratio `alpha(u)`, the share of
//! its mass in the left subtree. A [`SamplerSession`] fills ratios lazily
//! from conditional samples on the node's interval and then keeps them, so
//! all samples of a session come from one reconstituted distribution and
//! carry its exact probability.
//!
//! Depth-dependent quantities (`eps/(2 log n)`, `(eps/(2 log n))^2`) use
//! `log2 n_pad`, the height of the tree; the estimator's confidence term
//! uses the natural log.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bucketing::{grid_index, grid_value};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::oracle::{padded_size, CondOracle};
use crate::rng::Stream;

/// Ratios over the padded domain, possibly partial.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTree {
    n: usize,
    n_pad: usize,
    alpha: Vec<Option<f64>>,
}

impl RatioTree {
    /// A tree with no ratios set.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "ratio tree needs a non-empty domain");
        let n_pad = padded_size(n);
        Self {
            n,
            n_pad,
            alpha: vec![None; n_pad],
        }
    }

    /// Every ratio set to `mu(L)/(mu(L)+mu(R))`, or 1/2 on zero-mass nodes.
    pub fn exact(mu: &Distribution) -> Self {
        let mut tree = Self::new(mu.len());
        let mut mass = vec![0.0; 2 * tree.n_pad];
        mass[tree.n_pad..tree.n_pad + tree.n].copy_from_slice(mu.probs());
        for u in (1..tree.n_pad).rev() {
            mass[u] = mass[2 * u] + mass[2 * u + 1];
            tree.alpha[u] = Some(if mass[u] > 0.0 { mass[2 * u] / mass[u] } else { 0.5 });
        }
        tree
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_padded(&self) -> usize {
        self.n_pad
    }

    /// Height of the tree, `log2 n_pad`.
    pub fn depth(&self) -> usize {
        self.n_pad.trailing_zeros() as usize
    }

    /// Internal nodes in heap order, `1..n_pad`.
    pub fn internal_nodes(&self) -> std::ops::Range<usize> {
        1..self.n_pad
    }

    pub fn alpha(&self, u: usize) -> Option<f64> {
        self.alpha[u]
    }

    /// Set a ratio. Ratios are persistent: resetting a node to a different
    /// value is an error.
    pub fn set_alpha(&mut self, u: usize, a: f64) -> Result<()> {
        if !(1..self.n_pad).contains(&u) {
            return Err(Error::precondition(format!("node {u} is not internal")));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::precondition(format!("ratio {a} outside [0, 1]")));
        }
        match self.alpha[u] {
            Some(old) if old != a => Err(Error::precondition(format!("node {u} already has ratio {old}"))),
            _ => {
                self.alpha[u] = Some(a);
                Ok(())
            }
        }
    }

    /// Whether every internal node has a ratio.
    pub fn is_total(&self) -> bool {
        self.alpha[1..].iter().all(Option::is_some)
    }

    /// Leaf interval `[start, end)` of node `u`, in padded coordinates.
    pub fn interval(&self, u: usize) -> (usize, usize) {
        let level = usize::BITS - 1 - u.leading_zeros();
        let size = self.n_pad >> level;
        let start = (u - (1 << level)) * size;
        (start, start + size)
    }

    /// Root-to-leaf factors `alpha` or `1 - alpha` for leaf `i`. Panics if a
    /// ratio on the path is missing.
    pub fn path_probs(&self, i: usize) -> Vec<f64> {
        let leaf = self.n_pad + i;
        let mut out = Vec::with_capacity(self.depth());
        for level in (1..=self.depth()).rev() {
            let u = leaf >> level;
            let child = leaf >> (level - 1);
            let a = self.alpha[u].expect("ratio on path is set");
            out.push(if child == 2 * u { a } else { 1.0 - a });
        }
        out
    }

    /// The reconstituted distribution over the padded domain: each leaf gets
    /// the product of its path factors.
    pub fn reconstitute(&self) -> Result<Distribution> {
        if !self.is_total() {
            return Err(Error::precondition("reconstitution needs every ratio set"));
        }
        let mut mass = vec![0.0; 2 * self.n_pad];
        mass[1] = 1.0;
        for u in 1..self.n_pad {
            let a = self.alpha[u].unwrap();
            mass[2 * u] = mass[u] * a;
            mass[2 * u + 1] = mass[u] * (1.0 - a);
        }
        Distribution::new(mass[self.n_pad..].to_vec())
    }

    /// Leaves in `[0, n)` whose path has a factor below `eps/(2 log2 n_pad)`.
    pub fn fine_exceptions(&self, eps: f64) -> Vec<usize> {
        let threshold = trim_threshold(eps, self.depth());
        (0..self.n)
            .filter(|&i| self.path_probs(i).iter().any(|&p| p < threshold))
            .collect()
    }
}

/// Path-factor threshold `eps/(2·depth)` below which a sample is trimmed.
pub fn trim_threshold(eps: f64, depth: usize) -> f64 {
    eps / (2.0 * depth.max(1) as f64)
}

/// Samples the ratio estimator spends on one node at additive precision
/// `eps` and error `delta`: `ceil(c·2·eps⁻²·ln(1/delta))`.
pub fn estimator_samples(eps: f64, delta: f64, scale: f64) -> u64 {
    (scale * 2.0 * (1.0 / delta).ln() / (eps * eps)).ceil().max(1.0) as u64
}

/// Estimate `alpha(u)` by conditioning on the node's interval and counting
/// landings in the left half. Returns the ratio and the samples spent. Nodes
/// lying entirely in the padding get 1/2 without any query.
pub fn estimate_ratio<O: CondOracle + ?Sized>(
    oracle: &mut O,
    tree: &RatioTree,
    u: usize,
    eps: f64,
    delta: f64,
    scale: f64,
) -> Result<(f64, u64)> {
    if !(1..tree.n_pad).contains(&u) {
        return Err(Error::precondition(format!("node {u} is not internal")));
    }
    let (start, end) = tree.interval(u);
    let n = oracle.domain_size();
    if start >= n {
        return Ok((0.5, 0));
    }
    let mid = (start + end) / 2;
    let set: Vec<usize> = (start..end.min(n)).collect();
    let t = estimator_samples(eps, delta, scale);
    let counts = oracle.draw_counts(&set, t)?;
    let left: u64 = counts[..(mid.min(n) - start)].iter().sum();
    Ok((left as f64 / t as f64, t))
}

/// Parameters of a sampler session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Maximum number of samples the session may return.
    pub runs: u64,
    /// Multiplier on the estimator's sample count.
    pub scale: f64,
}

impl SamplerParams {
    pub fn new(epsilon: f64, delta: f64, runs: u64) -> Self {
        Self {
            epsilon,
            delta,
            runs,
            scale: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    fn validate(&self) -> Result<()> {
        crate::adaptive::check_unit("epsilon", self.epsilon)?;
        crate::adaptive::check_unit("delta", self.delta)?;
        if self.runs == 0 {
            return Err(Error::precondition("a session needs at least one run"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::precondition(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    /// Per-node additive precision `(eps/(2 depth))^2`.
    pub fn node_precision(&self, depth: usize) -> f64 {
        trim_threshold(self.epsilon, depth).powi(2)
    }

    /// Per-node error `delta/(runs·depth)`.
    pub fn node_error(&self, depth: usize) -> f64 {
        self.delta / (self.runs as f64 * depth.max(1) as f64)
    }

    /// Samples per estimated node on a tree of the given depth.
    pub fn node_samples(&self, depth: usize) -> u64 {
        estimator_samples(self.node_precision(depth), self.node_error(depth), self.scale)
    }

    /// Upper bound on the conditional queries of one run:
    /// `c·2⁵·eps⁻⁴·depth⁵·ln(runs·depth/delta)` plus one sample of rounding
    /// slack per level.
    pub fn per_sample_query_bound(&self, n: usize) -> f64 {
        let depth = padded_size(n).trailing_zeros() as f64;
        self.scale * 32.0 * self.epsilon.powi(-4) * depth.powi(5) * (self.runs as f64 * depth / self.delta).ln() + depth
    }
}

/// One sample of the persistent sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSample {
    pub index: usize,
    /// Probability of `index` under the session's reconstituted distribution.
    pub eta: f64,
    /// Path factors, root first.
    pub path: Vec<f64>,
    /// Whether `index` lies in the padding.
    pub padded: bool,
}

/// One sample of the trimming sampler: the sentinel "0", or an element with
/// its grid bucket and the snapped probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrimmedSample {
    Sentinel,
    Kept { index: usize, j: usize, eta: f64 },
}

/// A persistent sampler over one oracle. Not `Clone`: a copy would let two
/// sessions diverge while claiming the same ratios.
#[derive(Debug)]
pub struct SamplerSession<O> {
    oracle: O,
    tree: RatioTree,
    rng: Stream,
    params: SamplerParams,
    runs: u64,
    queries_per_run: Vec<u64>,
}

impl<O: CondOracle> SamplerSession<O> {
    pub fn new(oracle: O, params: SamplerParams, rng: Stream) -> Result<Self> {
        params.validate()?;
        let tree = RatioTree::new(oracle.domain_size());
        Ok(Self {
            oracle,
            tree,
            rng,
            params,
            runs: 0,
            queries_per_run: Vec::new(),
        })
    }

    /// Preload every ratio from an explicit distribution, so runs issue no
    /// queries. Intended for tests and exact references.
    pub fn inject_exact(&mut self, mu: &Distribution) -> Result<()> {
        self.inject_tree(RatioTree::exact(mu))
    }

    /// Preload ratios from a tree over the same domain.
    pub fn inject_tree(&mut self, tree: RatioTree) -> Result<()> {
        if tree.n != self.tree.n {
            return Err(Error::DomainMismatch {
                left: self.tree.n,
                right: tree.n,
            });
        }
        for u in tree.internal_nodes() {
            if let Some(a) = tree.alpha(u) {
                self.tree.set_alpha(u, a)?;
            }
        }
        Ok(())
    }

    pub fn params(&self) -> &SamplerParams {
        &self.params
    }

    pub fn tree(&self) -> &RatioTree {
        &self.tree
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn into_oracle(self) -> O {
        self.oracle
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    /// Conditional queries spent by each run so far.
    pub fn queries_per_run(&self) -> &[u64] {
        &self.queries_per_run
    }

    /// Walk from the root to a leaf, estimating missing ratios on the way.
    pub fn sample(&mut self) -> Result<ExplicitSample> {
        if self.runs >= self.params.runs {
            return Err(Error::SessionExhausted(self.params.runs));
        }
        self.runs += 1;
        let before = self.oracle.account().total;
        let depth = self.tree.depth();
        let (eps_node, delta_node) = (self.params.node_precision(depth), self.params.node_error(depth));
        let mut u = 1;
        let mut path = Vec::with_capacity(depth);
        let mut eta = 1.0;
        while u < self.tree.n_pad {
            let a = match self.tree.alpha[u] {
                Some(a) => a,
                None => {
                    let (a, _) =
                        estimate_ratio(&mut self.oracle, &self.tree, u, eps_node, delta_node, self.params.scale)?;
                    self.tree.alpha[u] = Some(a);
                    a
                }
            };
            let p = if self.rng.random::<f64>() < a {
                u *= 2;
                a
            } else {
                u = 2 * u + 1;
                1.0 - a
            };
            path.push(p);
            eta *= p;
        }
        self.queries_per_run.push(self.oracle.account().total - before);
        let index = u - self.tree.n_pad;
        Ok(ExplicitSample {
            index,
            eta,
            path,
            padded: index >= self.tree.n,
        })
    }

    /// One persistent sample passed through trimming: the sentinel when a
    /// path factor is below `eps/(2 depth)`, when `eta < eps/n`, or when the
    /// sample is padding; otherwise the element survives with probability
    /// `eta'/eta`, where `eta'` is `eta` snapped down to the grid
    /// `(1+eps)^(j-1)·eps/n`.
    pub fn trimming_sample(&mut self) -> Result<TrimmedSample> {
        let s = self.sample()?;
        let eps = self.params.epsilon;
        let threshold = trim_threshold(eps, self.tree.depth());
        let base = eps / self.tree.n as f64;
        if s.padded || s.path.iter().any(|&p| p < threshold) || s.eta < base {
            return Ok(TrimmedSample::Sentinel);
        }
        let j = grid_index(s.eta, base, eps);
        let snapped = grid_value(j, base, eps);
        if self.rng.random::<f64>() < snapped / s.eta {
            Ok(TrimmedSample::Kept {
                index: s.index,
                j,
                eta: snapped,
            })
        } else {
            Ok(TrimmedSample::Sentinel)
        }
    }
}

/// Exact trimming of an explicit distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trimmed {
    /// Length `n+1`; entry 0 is the sentinel's mass, entry `i+1` the trimmed
    /// mass of element `i`.
    pub trimmed: Vec<f64>,
    /// Grid index of each element, 0 where trimmed away.
    pub grid: Vec<usize>,
    /// The trimmed distribution conditioned on `[n]`; `None` when nothing
    /// survives.
    pub renormalized: Option<Distribution>,
}

impl Trimmed {
    pub fn sentinel_mass(&self) -> f64 {
        self.trimmed[0]
    }
}

/// Zero out `b` and every element below `eps/n`, snap the rest down to the
/// grid `(1+eps)^(j-1)·eps/n`, and give the remainder to the sentinel.
pub fn trim_exact(mu_tilde: &Distribution, b: &[usize], eps: f64) -> Result<Trimmed> {
    let n = mu_tilde.len();
    let base = eps / n as f64;
    let mut excluded = vec![false; n];
    for &i in b {
        if i >= n {
            return Err(Error::precondition(format!("index {i} outside domain of size {n}")));
        }
        excluded[i] = true;
    }
    let mut trimmed = vec![0.0; n + 1];
    let mut grid = vec![0; n];
    for i in 0..n {
        let p = mu_tilde.prob(i);
        if excluded[i] || p < base {
            continue;
        }
        let j = grid_index(p, base, eps);
        grid[i] = j;
        trimmed[i + 1] = grid_value(j, base, eps);
    }
    let kept: f64 = trimmed[1..].iter().sum();
    trimmed[0] = (1.0 - kept).max(0.0);
    let renormalized = if kept > 0.0 {
        Some(Distribution::from_weights(trimmed[1..].to_vec())?)
    } else {
        None
    };
    Ok(Trimmed {
        trimmed,
        grid,
        renormalized,
    })
}

/// Whether `mu_tilde` is eps-fine for `mu` with exception set `b`:
/// `mu(b) <= eps` and `|mu_tilde(i) - mu(i)| <= eps·mu(i)` off `b`. Both
/// vectors are indexed like `mu`; `mu_tilde` may be the unpadded part of a
/// reconstituted distribution.
pub fn is_fine(mu_tilde: &[f64], mu: &[f64], b: &[usize], eps: f64) -> bool {
    let mut excluded = vec![false; mu.len()];
    b.iter().for_each(|&i| excluded[i] = true);
    let outside: f64 = b.iter().map(|&i| mu[i]).sum();
    outside <= eps
        && (0..mu.len()).all(|i| excluded[i] || (mu_tilde[i] - mu[i]).abs() <= eps * mu[i] * (1.0 + 1e-12) + 1e-15)
}
