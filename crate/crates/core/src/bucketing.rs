//! Geometric bucketing of a known distribution, restriction to a bucket,
//! coarsening to bucket masses, and the matching oracle adapters.
//!
//! Two bucketings are provided. [`bucket`] measures probabilities against the
//! base `1/n`; [`bucket_prime`] uses the finer base `eps/n` and many more
//! buckets, and is the grid the learner works on. In both, bucket `i >= 1`
//! holds the elements with `base·(1+eps)^(i-1) <= mu(j) < base·(1+eps)^i`
//! and bucket 0 everything below `base`.

use serde::{Deserialize, Serialize};

use crate::distribution::{tv_of_slices, Distribution};
use crate::error::{Error, Result};
use crate::oracle::{validate_set, CoarsenedOracle, CondOracle, RestrictedOracle};

/// `base · (1+eps)^(j-1)`, the lower edge of grid bucket `j >= 1`.
pub fn grid_value(j: usize, base: f64, eps: f64) -> f64 {
    base * (1.0 + eps).powi(j as i32 - 1)
}

/// Index of the grid bucket containing `p`: 0 below `base`, otherwise the
/// largest `j` with `grid_value(j) <= p`.
pub fn grid_index(p: f64, base: f64, eps: f64) -> usize {
    if p.is_nan() || p < base {
        return 0;
    }
    let guess = ((p / base).ln() / (1.0 + eps).ln()).floor();
    let mut j = if guess.is_finite() && guess >= 0.0 {
        guess as usize + 1
    } else {
        1
    };
    while grid_value(j + 1, base, eps) <= p {
        j += 1;
    }
    while j > 1 && grid_value(j, base, eps) > p {
        j -= 1;
    }
    j
}

/// `ceil(ln n / ln(1+eps))`.
pub fn standard_bucket_count(n: usize, eps: f64) -> usize {
    ((n as f64).ln() / (1.0 + eps).ln()).ceil().max(0.0) as usize
}

/// `ceil(ln n · ln(1/eps) / ln²(1+eps))`, natural logs throughout.
pub fn prime_bucket_count(n: usize, eps: f64) -> usize {
    let l = (1.0 + eps).ln();
    ((n as f64).ln() * (1.0 / eps).ln() / (l * l)).ceil().max(0.0) as usize
}

/// Smallest `i` with `(1+eps)^i · eps/n >= 1`: no probability can sit in a
/// fine-grid bucket above this index.
pub fn prime_grid_cap(n: usize, eps: f64) -> usize {
    let base = eps / n as f64;
    let mut i = ((1.0 / base).ln() / (1.0 + eps).ln()).floor().max(0.0) as usize;
    while grid_value(i + 1, base, eps) < 1.0 {
        i += 1;
    }
    while i > 0 && grid_value(i, base, eps) >= 1.0 {
        i -= 1;
    }
    i
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketVariant {
    /// Base `1/n`.
    Standard,
    /// Base `eps/n`.
    Prime,
}

/// A partition `M_0, .., M_k` of the domain. Empty buckets are kept so that
/// bucket indices mean the same thing for every distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketPartition {
    pub variant: BucketVariant,
    pub epsilon: f64,
    n: usize,
    buckets: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

impl BucketPartition {
    fn build(mu: &Distribution, eps: f64, variant: BucketVariant, formula_k: usize) -> Self {
        let n = mu.len();
        let base = match variant {
            BucketVariant::Standard => 1.0 / n as f64,
            BucketVariant::Prime => eps / n as f64,
        };
        let owner: Vec<usize> = mu.probs().iter().map(|&p| grid_index(p, base, eps)).collect();
        let k = owner.iter().copied().max().unwrap_or(0).max(formula_k);
        let mut buckets = vec![Vec::new(); k + 1];
        for (j, &b) in owner.iter().enumerate() {
            buckets[b].push(j);
        }
        Self {
            variant,
            epsilon: eps,
            n,
            buckets,
            owner,
        }
    }

    /// Index of the last bucket.
    pub fn k(&self) -> usize {
        self.buckets.len() - 1
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn bucket(&self, i: usize) -> &[usize] {
        &self.buckets[i]
    }

    pub fn buckets(&self) -> &[Vec<usize>] {
        &self.buckets
    }

    /// Bucket holding element `j`.
    pub fn owner(&self, j: usize) -> usize {
        self.owner[j]
    }

    pub fn base(&self) -> f64 {
        match self.variant {
            BucketVariant::Standard => 1.0 / self.n as f64,
            BucketVariant::Prime => self.epsilon / self.n as f64,
        }
    }

    /// Indices of the non-empty buckets.
    pub fn nonempty(&self) -> Vec<usize> {
        (0..self.buckets.len())
            .filter(|&i| !self.buckets[i].is_empty())
            .collect()
    }

    /// Bucket sizes `|M_0|, .., |M_k|`.
    pub fn sizes(&self) -> Vec<usize> {
        self.buckets.iter().map(Vec::len).collect()
    }
}

/// Bucketing against the base `1/n`. The number of buckets is
/// `ceil(ln n / ln(1+eps))`, raised if needed so that every element has a
/// bucket (the formula is one short when `ln n / ln(1+eps)` is an integer).
pub fn bucket(mu: &Distribution, eps: f64) -> Result<BucketPartition> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::precondition(format!("bucketing needs eps > 0, got {eps}")));
    }
    let k = standard_bucket_count(mu.len(), eps);
    Ok(BucketPartition::build(mu, eps, BucketVariant::Standard, k))
}

/// Bucketing against the base `eps/n`, with `ceil(ln n · ln(1/eps) /
/// ln²(1+eps))` buckets.
pub fn bucket_prime(mu: &Distribution, eps: f64) -> Result<BucketPartition> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::precondition(format!(
            "fine bucketing needs 0 < eps < 1, got {eps}"
        )));
    }
    let k = prime_bucket_count(mu.len(), eps);
    Ok(BucketPartition::build(mu, eps, BucketVariant::Prime, k))
}

/// A distribution restricted to a subset and re-indexed to `0..|M|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub dist: Distribution,
    /// `map[i]` is the original index of local element `i`.
    pub map: Vec<usize>,
}

/// `mu` conditioned on the sorted index set `subset`.
pub fn restrict(mu: &Distribution, subset: &[usize]) -> Result<Restriction> {
    validate_set(subset, mu.len())?;
    let mass = mu.mass(subset);
    if mass <= 0.0 {
        return Err(Error::ZeroMassRestriction);
    }
    let weights = subset.iter().map(|&i| mu.prob(i)).collect();
    Ok(Restriction {
        dist: Distribution::from_weights(weights)?,
        map: subset.to_vec(),
    })
}

/// Masses of the blocks of `part`, as a distribution over `0..=k`.
pub fn coarsen(mu: &Distribution, part: &BucketPartition) -> Result<Distribution> {
    coarsen_blocks(mu, part.buckets())
}

/// Masses of arbitrary blocks partitioning `mu`'s domain.
pub fn coarsen_blocks(mu: &Distribution, blocks: &[Vec<usize>]) -> Result<Distribution> {
    let covered: usize = blocks.iter().map(Vec::len).sum();
    if covered != mu.len() {
        return Err(Error::DomainMismatch {
            left: mu.len(),
            right: covered,
        });
    }
    Distribution::new(blocks.iter().map(|b| mu.mass(b)).collect())
}

/// The oracle restricted to the sub-domain `subset`.
pub fn restricted_oracle<O: CondOracle>(oracle: O, subset: &[usize]) -> Result<RestrictedOracle<O>> {
    RestrictedOracle::new(oracle, subset.to_vec())
}

/// The oracle seen through the buckets of `part`.
pub fn coarsened_oracle<O: CondOracle>(oracle: O, part: &BucketPartition) -> Result<CoarsenedOracle<O>> {
    if oracle.domain_size() != part.domain_size() {
        return Err(Error::DomainMismatch {
            left: oracle.domain_size(),
            right: part.domain_size(),
        });
    }
    CoarsenedOracle::new(oracle, part.buckets().to_vec())
}

/// Largest l∞ gap between `mu` restricted to a bucket `M_i` (`i >= 1`) and
/// the uniform distribution on it, scaled by `|M_i|`. Bucketing at `eps`
/// keeps this strictly below `eps`; equivalently the restriction is within
/// `eps/|M_i|` of uniform on its own domain.
pub fn flatness(mu: &Distribution, part: &BucketPartition) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 1..=part.k() {
        let m = part.bucket(i);
        if m.is_empty() {
            continue;
        }
        let Ok(r) = restrict(mu, m) else { continue };
        let u = 1.0 / m.len() as f64;
        let gap = r.dist.probs().iter().map(|q| (q - u).abs()).fold(0.0, f64::max);
        worst = worst.max(gap * m.len() as f64);
    }
    worst
}

/// Both sides of the bucket decomposition inequality
/// `|mu - nu|_1 <= sum_i mu(M_i) |mu|M_i - nu|M_i|_1 + |coarse(mu) - coarse(nu)|_1`.
/// A restriction to a zero-mass bucket is taken to be uniform on it.
pub fn decomposition_sides(mu: &Distribution, nu: &Distribution, blocks: &[Vec<usize>]) -> Result<(f64, f64)> {
    if mu.len() != nu.len() {
        return Err(Error::DomainMismatch {
            left: mu.len(),
            right: nu.len(),
        });
    }
    let lhs = 2.0 * tv_of_slices(mu.probs(), nu.probs());
    let mut within = 0.0;
    for block in blocks.iter().filter(|b| !b.is_empty()) {
        let w = mu.mass(block);
        if w <= 0.0 {
            continue;
        }
        let a = restricted_or_uniform(mu, block);
        let b = restricted_or_uniform(nu, block);
        within += w * 2.0 * tv_of_slices(&a, &b);
    }
    let cm = coarsen_blocks(mu, blocks)?;
    let cn = coarsen_blocks(nu, blocks)?;
    Ok((lhs, within + 2.0 * tv_of_slices(cm.probs(), cn.probs())))
}

fn restricted_or_uniform(mu: &Distribution, block: &[usize]) -> Vec<f64> {
    let mass = mu.mass(block);
    if mass > 0.0 {
        block.iter().map(|&i| mu.prob(i) / mass).collect()
    } else {
        vec![1.0 / block.len() as f64; block.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SimulatedOracle;
    use proptest::prelude::*;

    fn d(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn uniform_lands_in_first_bucket() {
        for eps in [0.01, 0.3, 1.0, 2.5] {
            let p = bucket(&Distribution::uniform(37), eps).unwrap();
            assert_eq!(p.bucket(1).len(), 37);
            assert!(p.nonempty() == vec![1]);
        }
    }

    #[test]
    fn dyadic_example() {
        let mu = d(&[0.5, 0.25, 0.125, 0.125, 0.0, 0.0, 0.0, 0.0]);
        let p = bucket(&mu, 1.0).unwrap();
        assert_eq!(p.bucket(0), &[4, 5, 6, 7]);
        assert_eq!(p.bucket(1), &[2, 3]);
        assert_eq!(p.bucket(2), &[1]);
        assert_eq!(p.bucket(3), &[0]);
        assert_eq!(p.k(), 3);
    }

    #[test]
    fn point_mass_needs_a_bucket_beyond_the_formula() {
        let p = bucket(&Distribution::point_mass(4, 0).unwrap(), 1.0).unwrap();
        assert_eq!(standard_bucket_count(4, 1.0), 2);
        assert_eq!(p.bucket(0), &[1, 2, 3]);
        assert_eq!(p.bucket(3), &[0]);
    }

    #[test]
    fn prime_bucketing_boundaries() {
        // 1/n = 2·(eps/n) with eps = 1/2 and 1.5 <= 2 < 2.25: bucket 2.
        let p = bucket_prime(&Distribution::uniform(10), 0.5).unwrap();
        assert_eq!(p.bucket(2).len(), 10);
        assert_eq!(p.k(), prime_bucket_count(10, 0.5));

        let n = 8;
        let eps = 0.25;
        let low = eps / (2.0 * n as f64);
        let edge = eps / n as f64;
        let rest = (1.0 - low - edge) / 6.0;
        let mu = Distribution::new(vec![low, edge, rest, rest, rest, rest, rest, rest]).unwrap();
        let p = bucket_prime(&mu, eps).unwrap();
        assert_eq!(p.owner(0), 0);
        assert_eq!(p.owner(1), 1);
        assert!(bucket_prime(&mu, 1.0).is_err());
        assert!(bucket(&mu, 0.0).is_err());
    }

    #[test]
    fn grid_cap_is_tight() {
        for (n, eps) in [(64, 0.05), (10, 0.5), (1000, 0.01)] {
            let cap = prime_grid_cap(n, eps);
            let base = eps / n as f64;
            assert!(grid_value(cap + 1, base, eps) >= 1.0);
            assert!(grid_value(cap, base, eps) < 1.0);
            assert!(cap <= prime_bucket_count(n, eps));
        }
    }

    #[test]
    fn restrict_examples() {
        let r = restrict(&Distribution::uniform(8), &[0, 1]).unwrap();
        assert_eq!(r.dist, Distribution::uniform(2));
        let r = restrict(&d(&[0.5, 0.25, 0.25]), &[1, 2]).unwrap();
        assert_eq!(r.dist, d(&[0.5, 0.5]));
        assert_eq!(r.map, vec![1, 2]);
        let mu = d(&[0.2, 0.3, 0.5]);
        assert_eq!(restrict(&mu, &[0, 1, 2]).unwrap().dist, mu);
        assert_eq!(restrict(&d(&[1.0, 0.0, 0.0]), &[1, 2]), Err(Error::ZeroMassRestriction));
    }

    #[test]
    fn coarsen_examples() {
        let mu = d(&[0.5, 0.25, 0.125, 0.125]);
        // 1/8 < 1/n = 1/4, so both 1/8 entries fall in M_0.
        let p = bucket(&mu, 1.0).unwrap();
        assert_eq!(coarsen(&mu, &p).unwrap(), d(&[0.25, 0.25, 0.5]));
        let mu8 = d(&[0.5, 0.25, 0.125, 0.125, 0.0, 0.0, 0.0, 0.0]);
        let p8 = bucket(&mu8, 1.0).unwrap();
        assert_eq!(coarsen(&mu8, &p8).unwrap(), d(&[0.0, 0.25, 0.25, 0.5]));
        let singletons: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        assert_eq!(coarsen_blocks(&mu, &singletons).unwrap(), mu);
        let halves = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]];
        assert_eq!(
            coarsen_blocks(&Distribution::uniform(8), &halves).unwrap(),
            d(&[0.5, 0.5])
        );
    }

    #[test]
    fn adapters_through_partition() {
        let mu = d(&[0.5, 0.25, 0.125, 0.125]);
        let p = bucket(&mu, 1.0).unwrap();
        let mut o = SimulatedOracle::new(mu.clone(), 3);
        let mut c = coarsened_oracle(&mut o, &p).unwrap();
        let counts = c.draw_counts(&[0, 1, 2], 40_000).unwrap();
        assert!((counts[2] as f64 / 40_000.0 - 0.5).abs() < 0.02);
        let mut r = restricted_oracle(&mut o, p.bucket(0)).unwrap();
        let x = r.draw_full().unwrap();
        assert!(x < 2);

        let mu8 = d(&[0.5, 0.25, 0.125, 0.125, 0.0, 0.0, 0.0, 0.0]);
        let p8 = bucket(&mu8, 1.0).unwrap();
        let mut o8 = SimulatedOracle::new(mu8, 4);
        let mut c8 = coarsened_oracle(&mut o8, &p8).unwrap();
        for _ in 0..100 {
            assert_ne!(c8.draw(&[0, 1, 2, 3]).unwrap(), 0);
        }
    }

    fn arb_dist(n: usize) -> impl Strategy<Value = Distribution> {
        prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0, 0.0f64..0.01], n)
            .prop_filter("positive", |w| w.iter().sum::<f64>() > 0.0)
            .prop_map(|w| Distribution::from_weights(w).unwrap())
    }

    proptest! {
        #[test]
        fn partition_covers_and_respects_boundaries(mu in (1usize..40).prop_flat_map(arb_dist), eps in 0.01f64..2.0) {
            let p = bucket(&mu, eps).unwrap();
            let n = mu.len() as f64;
            let mut seen = vec![false; mu.len()];
            for (i, b) in p.buckets().iter().enumerate() {
                for &j in b {
                    prop_assert!(!seen[j]);
                    seen[j] = true;
                    let q = mu.prob(j);
                    if i == 0 {
                        prop_assert!(q < 1.0 / n);
                    } else {
                        prop_assert!(grid_value(i, 1.0 / n, eps) <= q && q < grid_value(i + 1, 1.0 / n, eps));
                    }
                }
            }
            prop_assert!(seen.into_iter().all(|s| s));
            prop_assert!(flatness(&mu, &p) < eps);
        }

        #[test]
        fn restrictions_reassemble(mu in (1usize..30).prop_flat_map(arb_dist), eps in 0.05f64..1.0) {
            let p = bucket(&mu, eps).unwrap();
            let coarse = coarsen(&mu, &p).unwrap();
            let mut rebuilt = vec![0.0; mu.len()];
            for i in 0..=p.k() {
                if let Ok(r) = restrict(&mu, p.bucket(i)) {
                    for (local, &orig) in r.map.iter().enumerate() {
                        rebuilt[orig] = coarse.prob(i) * r.dist.prob(local);
                    }
                }
            }
            for (a, b) in rebuilt.iter().zip(mu.probs()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
