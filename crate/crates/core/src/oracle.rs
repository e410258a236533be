//! Conditional-sampling oracles.
//!
//! A [`CondOracle`] answers `draw(S)` with one element of `S`, drawn with
//! probability `mu(j) / mu(S)`, or uniformly from `S` when `mu(S) = 0`. Sets are
//! passed as strictly increasing slices of zero-based indices.
//!
//! [`SimulatedOracle`] backs the interface with an explicit distribution and
//! keeps the [`SampleAccount`]. The adapters ([`RestrictedOracle`],
//! [`CoarsenedOracle`], [`LoggingOracle`]) translate sets and forward to a
//! parent, so every query is accounted once, at the bottom of the stack.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution as _};
use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Default size bound for the `constant_size` set class.
pub const DEFAULT_CONSTANT_SIZE_BOUND: usize = 64;

/// Coarse shape of a conditioning set, mirroring the kinds of sets the
/// different testers are allowed to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetClass {
    FullDomain,
    DyadicInterval,
    ConstantSize,
    General,
}

impl SetClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SetClass::FullDomain => "full_domain",
            SetClass::DyadicInterval => "dyadic_interval",
            SetClass::ConstantSize => "constant_size",
            SetClass::General => "general",
        }
    }
}

/// Query counters: totals per set class plus a raw histogram of set sizes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleAccount {
    pub total: u64,
    pub by_class: BTreeMap<SetClass, u64>,
    pub by_size: BTreeMap<usize, u64>,
}

impl SampleAccount {
    pub fn record(&mut self, class: SetClass, set_size: usize, count: u64) {
        if count == 0 {
            return;
        }
        self.total += count;
        *self.by_class.entry(class).or_default() += count;
        *self.by_size.entry(set_size).or_default() += count;
    }

    pub fn count(&self, class: SetClass) -> u64 {
        self.by_class.get(&class).copied().unwrap_or(0)
    }

    /// Classes with a non-zero count.
    pub fn classes(&self) -> Vec<SetClass> {
        self.by_class.iter().filter(|(_, &c)| c > 0).map(|(&k, _)| k).collect()
    }

    /// Queries made after `earlier` was snapshotted from the same account.
    pub fn since(&self, earlier: &SampleAccount) -> SampleAccount {
        let mut out = SampleAccount {
            total: self.total - earlier.total,
            ..Default::default()
        };
        for (&k, &v) in &self.by_class {
            let d = v - earlier.by_class.get(&k).copied().unwrap_or(0);
            if d > 0 {
                out.by_class.insert(k, d);
            }
        }
        for (&k, &v) in &self.by_size {
            let d = v - earlier.by_size.get(&k).copied().unwrap_or(0);
            if d > 0 {
                out.by_size.insert(k, d);
            }
        }
        out
    }

    pub fn merge(&mut self, other: &SampleAccount) {
        self.total += other.total;
        for (&k, &v) in &other.by_class {
            *self.by_class.entry(k).or_default() += v;
        }
        for (&k, &v) in &other.by_size {
            *self.by_size.entry(k).or_default() += v;
        }
    }

    /// Whether the class totals add up to the overall total.
    pub fn reconciles(&self) -> bool {
        self.by_class.values().sum::<u64>() == self.total && self.by_size.values().sum::<u64>() == self.total
    }
}

/// Assigns a [`SetClass`] to conditioning sets over a domain of size `n`.
///
/// Dyadic intervals are judged on the padded power-of-two domain: `S` is
/// dyadic when `S = I ∩ [0, n)` for an aligned interval `I` of the padding.
/// Precedence is full domain, dyadic interval, bounded size, general.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetClassifier {
    pub n: usize,
    pub constant_size_bound: usize,
}

impl SetClassifier {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            constant_size_bound: DEFAULT_CONSTANT_SIZE_BOUND,
        }
    }

    pub fn classify(&self, set: &[usize]) -> SetClass {
        if set.len() == self.n {
            return SetClass::FullDomain;
        }
        if let (Some(&first), Some(&last)) = (set.first(), set.last()) {
            let contiguous = last - first + 1 == set.len();
            if contiguous && is_dyadic(first, last + 1, self.n) {
                return SetClass::DyadicInterval;
            }
        }
        if set.len() <= self.constant_size_bound {
            SetClass::ConstantSize
        } else {
            SetClass::General
        }
    }
}

/// Whether `[start, end)` is an aligned power-of-two block of the padded
/// domain, possibly truncated at `n`.
pub fn is_dyadic(start: usize, end: usize, n: usize) -> bool {
    if start >= end || end > n {
        return false;
    }
    let block = (end - start).next_power_of_two();
    if !start.is_multiple_of(block) {
        return false;
    }
    start + block == end || (end == n && start + block > n)
}

pub fn padded_size(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// Check that `set` is non-empty, strictly increasing and inside `[0, n)`.
pub fn validate_set(set: &[usize], n: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("conditioning set must be strictly increasing"));
    }
    if *set.last().unwrap() >= n {
        return Err(Error::precondition(format!(
            "conditioning set reaches index {} outside domain of size {n}",
            set.last().unwrap()
        )));
    }
    Ok(())
}

/// A conditional-sampling oracle over the domain `{0, .., domain_size()-1}`.
pub trait CondOracle {
    fn domain_size(&self) -> usize;

    /// One sample conditioned on `set`.
    fn draw(&mut self, set: &[usize]) -> Result<usize>;

    /// Histogram of `count` independent samples conditioned on `set`, aligned
    /// with `set`. Equivalent in law to `count` calls to [`draw`](Self::draw).
    fn draw_counts(&mut self, set: &[usize], count: u64) -> Result<Vec<u64>> {
        let mut counts = vec![0; set.len()];
        for _ in 0..count {
            let j = self.draw(set)?;
            let pos = set
                .binary_search(&j)
                .map_err(|_| Error::precondition("oracle returned an element outside the set"))?;
            counts[pos] += 1;
        }
        Ok(counts)
    }

    /// One unconditioned sample.
    fn draw_full(&mut self) -> Result<usize> {
        let all: Vec<usize> = (0..self.domain_size()).collect();
        self.draw(&all)
    }

    /// Counters of the underlying oracle.
    fn account(&self) -> &SampleAccount;
}

impl<O: CondOracle + ?Sized> CondOracle for &mut O {
    fn domain_size(&self) -> usize {
        (**self).domain_size()
    }
    fn draw(&mut self, set: &[usize]) -> Result<usize> {
        (**self).draw(set)
    }
    fn draw_counts(&mut self, set: &[usize], count: u64) -> Result<Vec<u64>> {
        (**self).draw_counts(set, count)
    }
    fn draw_full(&mut self) -> Result<usize> {
        (**self).draw_full()
    }
    fn account(&self) -> &SampleAccount {
        (**self).account()
    }
}

impl<O: CondOracle + ?Sized> CondOracle for Box<O> {
    fn domain_size(&self) -> usize {
        (**self).domain_size()
    }
    fn draw(&mut self, set: &[usize]) -> Result<usize> {
        (**self).draw(set)
    }
    fn draw_counts(&mut self, set: &[usize], count: u64) -> Result<Vec<u64>> {
        (**self).draw_counts(set, count)
    }
    fn draw_full(&mut self) -> Result<usize> {
        (**self).draw_full()
    }
    fn account(&self) -> &SampleAccount {
        (**self).account()
    }
}

/// Multinomial counts for `count` draws with the given weights (positive
/// total), by sequential binomial splitting.
pub(crate) fn multinomial<R: Rng + ?Sized>(rng: &mut R, count: u64, weights: &[f64]) -> Vec<u64> {
    let mut suffix = vec![0.0; weights.len() + 1];
    for i in (0..weights.len()).rev() {
        suffix[i] = suffix[i + 1] + weights[i];
    }
    let mut out = vec![0; weights.len()];
    let mut left = count;
    for i in 0..weights.len() {
        if left == 0 {
            break;
        }
        if suffix[i + 1] <= 0.0 {
            out[i] = left;
            left = 0;
            break;
        }
        let p = (weights[i] / suffix[i]).clamp(0.0, 1.0);
        let k = if p <= 0.0 {
            0
        } else if p >= 1.0 {
            left
        } else {
            Binomial::new(left, p).expect("valid binomial").sample(rng)
        };
        out[i] = k;
        left -= k;
    }
    if left > 0 {
        // Only reachable through rounding in the suffix sums.
        let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1);
        out[last] += left;
    }
    out
}

/// Oracle backed by an explicit distribution.
///
/// Draws are deterministic given the seed and the call sequence. Sampling
/// on intervals uses a sum tree over the padded domain, so dyadic and
/// full-domain queries cost `O(log n)`; other sets cost `O(|S|)`.
#[derive(Debug)]
pub struct SimulatedOracle {
    mu: Distribution,
    n_pad: usize,
    tree: Vec<f64>,
    rng: Stream,
    account: SampleAccount,
    classifier: SetClassifier,
}

impl SimulatedOracle {
    pub fn new(mu: Distribution, seed: u64) -> Self {
        Self::with_stream(mu, rng::seeded(seed))
    }

    pub fn with_stream(mu: Distribution, rng: Stream) -> Self {
        let n = mu.len();
        let n_pad = padded_size(n);
        let mut tree = vec![0.0; 2 * n_pad];
        tree[n_pad..n_pad + n].copy_from_slice(mu.probs());
        for u in (1..n_pad).rev() {
            tree[u] = tree[2 * u] + tree[2 * u + 1];
        }
        Self {
            mu,
            n_pad,
            tree,
            rng,
            account: SampleAccount::default(),
            classifier: SetClassifier::new(n),
        }
    }

    /// Set the size bound of the `constant_size` class.
    pub fn with_constant_size_bound(mut self, bound: usize) -> Self {
        self.classifier.constant_size_bound = bound;
        self
    }

    pub fn distribution(&self) -> &Distribution {
        &self.mu
    }

    fn descend(&mut self, mut u: usize) -> usize {
        while u < self.n_pad {
            let (l, r) = (self.tree[2 * u], self.tree[2 * u + 1]);
            let x = self.rng.random::<f64>() * (l + r);
            u = if (x < l && l > 0.0) || r <= 0.0 {
                2 * u
            } else {
                2 * u + 1
            };
        }
        u - self.n_pad
    }

    fn draw_interval(&mut self, start: usize, end: usize) -> usize {
        // Canonical cover of [start, end) by tree nodes.
        let mut nodes = Vec::new();
        let (mut lo, mut hi) = (start + self.n_pad, end + self.n_pad);
        while lo < hi {
            if lo & 1 == 1 {
                nodes.push(lo);
                lo += 1;
            }
            if hi & 1 == 1 {
                hi -= 1;
                nodes.push(hi);
            }
            lo >>= 1;
            hi >>= 1;
        }
        let total: f64 = nodes.iter().map(|&u| self.tree[u]).sum();
        if total <= 0.0 {
            return self.rng.random_range(start..end);
        }
        let mut x = self.rng.random::<f64>() * total;
        let mut chosen = None;
        for &u in &nodes {
            let w = self.tree[u];
            if w > 0.0 {
                chosen = Some(u);
                if x < w {
                    break;
                }
                x -= w;
            }
        }
        self.descend(chosen.expect("positive total implies a positive node"))
    }

    fn draw_general(&mut self, set: &[usize]) -> usize {
        let total: f64 = set.iter().map(|&i| self.mu.prob(i)).sum();
        if total <= 0.0 {
            return set[self.rng.random_range(0..set.len())];
        }
        let mut x = self.rng.random::<f64>() * total;
        let mut last_positive = set[0];
        for &i in set {
            let p = self.mu.prob(i);
            if p > 0.0 {
                last_positive = i;
                if x < p {
                    return i;
                }
                x -= p;
            }
        }
        last_positive
    }
}

impl CondOracle for SimulatedOracle {
    fn domain_size(&self) -> usize {
        self.mu.len()
    }

    fn draw(&mut self, set: &[usize]) -> Result<usize> {
        validate_set(set, self.mu.len())?;
        let class = self.classifier.classify(set);
        self.account.record(class, set.len(), 1);
        let (first, last) = (set[0], set[set.len() - 1]);
        Ok(if last - first + 1 == set.len() {
            self.draw_interval(first, last + 1)
        } else {
            self.draw_general(set)
        })
    }

    fn draw_counts(&mut self, set: &[usize], count: u64) -> Result<Vec<u64>> {
        validate_set(set, self.mu.len())?;
        let class = self.classifier.classify(set);
        self.account.record(class, set.len(), count);
        let mut weights: Vec<f64> = set.iter().map(|&i| self.mu.prob(i)).collect();
        if weights.iter().all(|&w| w <= 0.0) {
            weights.iter_mut().for_each(|w| *w = 1.0);
        }
        Ok(multinomial(&mut self.rng, count, &weights))
    }

    fn draw_full(&mut self) -> Result<usize> {
        let n = self.mu.len();
        self.account.record(SetClass::FullDomain, n, 1);
        Ok(self.descend(1))
    }

    fn account(&self) -> &SampleAccount {
        &self.account
    }
}

/// View of a parent oracle restricted to a sub-domain `M`; local index `i`
/// is the parent's `map[i]`.
#[derive(Debug)]
pub struct RestrictedOracle<O> {
    parent: O,
    map: Vec<usize>,
}

impl<O: CondOracle> RestrictedOracle<O> {
    pub fn new(parent: O, subset: Vec<usize>) -> Result<Self> {
        validate_set(&subset, parent.domain_size())?;
        Ok(Self { parent, map: subset })
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    fn lift(&self, set: &[usize]) -> Result<Vec<usize>> {
        validate_set(set, self.map.len()).map_err(|e| match e {
            Error::Precondition(_) => Error::precondition("conditioning set is not inside the restricted domain"),
            other => other,
        })?;
        Ok(set.iter().map(|&i| self.map[i]).collect())
    }

    fn lower(&self, j: usize) -> Result<usize> {
        self.map
            .binary_search(&j)
            .map_err(|_| Error::precondition("parent oracle answered outside the restriction"))
    }
}

impl<O: CondOracle> CondOracle for RestrictedOracle<O> {
    fn domain_size(&self) -> usize {
        self.map.len()
    }

    fn draw(&mut self, set: &[usize]) -> Result<usize> {
        let lifted = self.lift(set)?;
        let j = self.parent.draw(&lifted)?;
        self.lower(j)
    }

    fn draw_counts(&mut self, set: &[usize], count: u64) -> Result<Vec<u64>> {
        let lifted = self.lift(set)?;
        self.parent.draw_counts(&lifted, count)
    }

    fn draw_full(&mut self) -> Result<usize> {
        let j = self.parent.draw(&self.map.clone())?;
        self.lower(j)
    }

    fn account(&self) -> &SampleAccount {
        self.parent.account()
    }
}

/// View of a parent oracle through a partition: element `i` of the new
/// domain stands for block `i`, and conditioning on a set of blocks
/// conditions the parent on their union. Empty blocks contribute nothing to
/// the union.
#[derive(Debug)]
pub struct CoarsenedOracle<O> {
    parent: O,
    blocks: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

impl<O: CondOracle> CoarsenedOracle<O> {
    /// `blocks` must be a partition of the parent's domain into sorted index
    /// sets (empty blocks allowed).
    pub fn new(parent: O, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = parent.domain_size();
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if !block.is_empty() {
                validate_set(block, n)?;
            }
            for &i in block {
                if owner[i] != usize::MAX {
                    return Err(Error::precondition(format!("index {i} lies in two blocks")));
                }
                owner[i] = b;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::precondition("blocks do not cover the domain"));
        }
        if blocks.is_empty() {
            return Err(Error::precondition("no blocks"));
        }
        Ok(Self { parent, blocks, owner })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    fn union(&self, set: &[usize]) -> Result<Vec<usize>> {
        validate_set(set, self.blocks.len())?;
        let mut out: Vec<usize> = set.iter().flat_map(|&b| self.blocks[b].iter().copied()).collect();
        if out.is_empty() {
            return Err(Error::precondition("union of the selected blocks is empty"));
        }
        out.sort_unstable();
        Ok(out)
    }
}

impl<O: CondOracle> CondOracle for CoarsenedOracle<O> {
    fn domain_size(&self) -> usize {
        self.blocks.len()
    }

    fn draw(&mut self, set: &[usize]) -> Result<usize> {
        let union = self.union(set)?;
        let j = self.parent.draw(&union)?;
        Ok(self.owner[j])
    }

    fn draw_counts(&mut self, set: &[usize], count: u64) -> Result<Vec<u64>> {
        let union = self.union(set)?;
        let fine = self.parent.draw_counts(&union, count)?;
        let mut out = vec![0; set.len()];
        for (&j, &c) in union.iter().zip(&fine) {
            let b = self.owner[j];
            let pos = set.binary_search(&b).expect("block of a union member is selected");
            out[pos] += c;
        }
        Ok(out)
    }

    fn draw_full(&mut self) -> Result<usize> {
        let j = self.parent.draw_full()?;
        Ok(self.owner[j])
    }

    fn account(&self) -> &SampleAccount {
        self.parent.account()
    }
}

/// Pass-through oracle that logs every conditioning set and how many
/// samples were requested on it.
#[derive(Debug)]
pub struct LoggingOracle<O> {
    parent: O,
    log: Vec<(Vec<usize>, u64)>,
}

impl<O: CondOracle> LoggingOracle<O> {
    pub fn new(parent: O) -> Self {
        Self {
            parent,
            log: Vec::new(),
        }
    }

    pub fn log(&self) -> &[(Vec<usize>, u64)] {
        &self.log
    }

    pub fn into_parts(self) -> (O, Vec<(Vec<usize>, u64)>) {
        (self.parent, self.log)
    }
}

impl<O: CondOracle> CondOracle for LoggingOracle<O> {
    fn domain_size(&self) -> usize {
        self.parent.domain_size()
    }

    fn draw(&mut self, set: &[usize]) -> Result<usize> {
        self.log.push((set.to_vec(), 1));
        self.parent.draw(set)
    }

    fn draw_counts(&mut self, set: &[usize], count: u64) -> Result<Vec<u64>> {
        self.log.push((set.to_vec(), count));
        self.parent.draw_counts(set, count)
    }

    fn draw_full(&mut self) -> Result<usize> {
        self.log.push(((0..self.parent.domain_size()).collect(), 1));
        self.parent.draw_full()
    }

    fn account(&self) -> &SampleAccount {
        self.parent.account()
    }
}
