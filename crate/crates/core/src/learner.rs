//! Learning a distribution up to relabeling, and the testers built on it.
//!
//! The learner draws from the trimming sampler, tallies how much sampled
//! mass falls on each grid value `g_j = (1+eps)^(j-1)·eps/n`, rounds those
//! masses to element counts `m_0..m_k` (bucketization), and outputs the
//! tentative distribution: `m_j` elements of probability `g_j` each, `m_0`
//! elements of probability zero, renormalized. The result is close to some
//! permutation of the unknown distribution, which is all a label-invariant
//! property can see.

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::adaptive::check_unit;
use crate::bucketing::{grid_value, prime_bucket_count};
use crate::distribution::{tv_of_slices, Distribution};
use crate::error::{Error, Result};
use crate::oracle::{CondOracle, SampleAccount};
use crate::rng::{fork, Stream};
use crate::sampler::{SamplerParams, SamplerSession, TrimmedSample};
use crate::verdict::{Decision, Verdict};

/// Element counts per grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCounts {
    pub eps: f64,
    pub k: usize,
    /// `m[0]` elements of probability zero, `m[j]` of probability `g_j`.
    pub m: Vec<u64>,
    pub failed: bool,
}

impl GridCounts {
    pub fn n(&self) -> u64 {
        self.m.iter().sum()
    }
}

/// `g_j` for a domain of `n` elements.
pub fn grid_point(j: usize, n: usize, eps: f64) -> f64 {
    grid_value(j, eps / n as f64, eps)
}

/// The tentative distribution of `counts`, laid out in ascending grid order
/// (zeros first). Falls back to uniform when every element sits in `m_0`.
pub fn tentative_distribution(counts: &GridCounts, n: usize) -> Result<Distribution> {
    if counts.n() != n as u64 {
        return Err(Error::precondition(format!(
            "grid counts sum to {}, domain has {n} elements",
            counts.n()
        )));
    }
    if counts.m[0] == n as u64 {
        return Ok(Distribution::uniform(n));
    }
    let mut r = Vec::with_capacity(n);
    for (j, &m) in counts.m.iter().enumerate() {
        let value = if j == 0 { 0.0 } else { grid_point(j, n, counts.eps) };
        r.extend(std::iter::repeat_n(value, m as usize));
    }
    Distribution::from_weights(r)
}

/// Round `n·alpha_j` to integers for `j >= 1` (exact halves round down),
/// then, while the total exceeds `n`, decrement the smallest positive index.
/// The bucketization fails when a decremented index has `g_j >= eps/k`.
/// `m_0` takes the remainder. `alpha[0]` is not used and may be negative.
pub fn bucketize(alpha: &[f64], n: usize, eps: f64, k: usize) -> Result<GridCounts> {
    if alpha.is_empty() {
        return Err(Error::precondition("bucketization needs alpha_0"));
    }
    let total: f64 = alpha.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::precondition(format!("alpha sums to {total}, not 1")));
    }
    if let Some(j) = alpha.iter().skip(1).position(|&a| a.is_nan() || a < 0.0) {
        return Err(Error::precondition(format!("alpha_{} is negative", j + 1)));
    }
    let nf = n as f64;
    let mut m: Vec<u64> = alpha
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            if j == 0 {
                0
            } else {
                (nf * a - 0.5).ceil().max(0.0) as u64
            }
        })
        .collect();
    let mut sum: u64 = m[1..].iter().sum();
    let mut failed = false;
    let limit = eps / k.max(1) as f64;
    while sum > n as u64 {
        let j = (1..m.len())
            .find(|&j| m[j] > 0)
            .expect("positive sum has a positive entry");
        m[j] -= 1;
        sum -= 1;
        if grid_point(j, n, eps) >= limit {
            failed = true;
        }
    }
    m[0] = n as u64 - sum;
    Ok(GridCounts { eps, k, m, failed })
}

/// TV distance between the best relabeling of `a` and `b`: compare the
/// probability vectors sorted in descending order.
pub fn min_permutation_tv(a: &Distribution, b: &Distribution) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DomainMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(tv_of_slices(&a.sorted_desc(), &b.sorted_desc()))
}

/// Parameters of the learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Multiplier on the number of samples `s`.
    pub scale: f64,
    /// Multiplier on the ratio estimator's per-node sample count.
    pub estimator_scale: f64,
}

impl LearnParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            delta,
            scale: 1.0,
            estimator_scale: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_estimator_scale(mut self, scale: f64) -> Self {
        self.estimator_scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("epsilon", self.epsilon)?;
        check_unit("delta", self.delta)?;
        for (name, c) in [("scale", self.scale), ("estimator scale", self.estimator_scale)] {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::precondition(format!("{name} must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// Number of trimming samples, `ceil(c·2¹²·eps⁻⁴·ln²n·ln(1/delta))`.
    pub fn samples(&self, n: usize) -> u64 {
        let ln_n = (n as f64).ln();
        (self.scale * 4096.0 * self.epsilon.powi(-4) * ln_n * ln_n * (1.0 / self.delta).ln())
            .ceil()
            .max(1.0) as u64
    }

    /// Grid parameter `eps/12`.
    pub fn grid_eps(&self) -> f64 {
        self.epsilon / 12.0
    }

    /// Grid size `ceil(ln n·ln(12/eps)/ln²(1+eps/12))`.
    pub fn grid_size(&self, n: usize) -> usize {
        prime_bucket_count(n, self.grid_eps())
    }

    /// Parameters of the trimming sampler the learner runs.
    pub fn sampler_params(&self, n: usize) -> SamplerParams {
        SamplerParams::new(self.grid_eps(), self.delta / 2.0, self.samples(n)).with_scale(self.estimator_scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnResult {
    pub dist: Distribution,
    pub counts: GridCounts,
    pub account: SampleAccount,
    /// Trimming samples drawn.
    pub samples: u64,
    /// How many of them were the sentinel.
    pub sentinels: u64,
    /// The tentative distribution was degenerate and replaced by uniform.
    pub fallback: bool,
}

/// Learn `oracle`'s distribution up to relabeling.
pub fn learn_distribution<O: CondOracle>(
    oracle: O,
    params: &LearnParams,
    rng: &mut dyn RngCore,
) -> Result<LearnResult> {
    params.validate()?;
    let n = oracle.domain_size();
    let mut session = SamplerSession::new(oracle, params.sampler_params(n), fork(rng))?;
    learn_from_session(&mut session, params)
}

/// The learner on a prepared session; tests use this to inject exact ratios.
pub fn learn_from_session<O: CondOracle>(session: &mut SamplerSession<O>, params: &LearnParams) -> Result<LearnResult> {
    params.validate()?;
    let n = session.tree().n();
    let eps = params.grid_eps();
    let s = session.params().runs - session.runs();
    let before = session.oracle().account().clone();
    let mut tally: Vec<u64> = vec![0; params.grid_size(n) + 1];
    let mut sentinels = 0;
    for _ in 0..s {
        match session.trimming_sample()? {
            TrimmedSample::Sentinel => sentinels += 1,
            TrimmedSample::Kept { j, .. } => {
                if j >= tally.len() {
                    tally.resize(j + 1, 0);
                }
                tally[j] += 1;
            }
        }
    }
    let k = tally.len() - 1;
    let alpha = grid_fractions(&tally, s, n, eps);
    let counts = bucketize(&alpha, n, eps, params.grid_size(n))?;
    let counts = GridCounts { k, ..counts };
    let dist = tentative_distribution(&counts, n)?;
    let fallback = counts.m[0] == n as u64;
    Ok(LearnResult {
        dist,
        counts,
        account: session.oracle().account().since(&before),
        samples: s,
        sentinels,
        fallback,
    })
}

/// Count fractions from grid tallies: `s_j/s` estimates the mass on grid
/// value `g_j`, i.e. `m_j·g_j`, so `alpha_j = s_j/(s·n·g_j)` and
/// `n·alpha_j` estimates `m_j`. `alpha_0` absorbs the rest.
pub fn grid_fractions(tally: &[u64], s: u64, n: usize, eps: f64) -> Vec<f64> {
    let mut alpha = vec![0.0; tally.len()];
    for j in 1..tally.len() {
        alpha[j] = tally[j] as f64 / (s as f64 * n as f64 * grid_point(j, n, eps));
    }
    alpha[0] = 1.0 - alpha[1..].iter().sum::<f64>();
    alpha
}

/// Distance from the uniform distribution, a label-invariant property.
pub fn uniformity_distance(d: &Distribution) -> f64 {
    let u = 1.0 / d.len() as f64;
    tv_of_slices(d.probs(), &vec![u; d.len()])
}

/// Distance to the nearest distribution that is uniform on a support of
/// size `4^k` for some `k` with `4^k <= n`.
pub fn even_uniblock_distance(d: &Distribution) -> f64 {
    let sorted = d.sorted_desc();
    let n = d.len();
    let mut best = f64::INFINITY;
    let mut size = 1;
    while size <= n {
        let u = 1.0 / size as f64;
        let tv = 0.5 * (sorted[..size].iter().map(|p| (p - u).abs()).sum::<f64>() + sorted[size..].iter().sum::<f64>());
        best = best.min(tv);
        size *= 4;
    }
    best
}

/// Parameters of the label-invariant tester.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelInvariantParams {
    pub learn: LearnParams,
    /// Learning accuracy as a fraction of `epsilon` (1/2 by default).
    pub learn_fraction: f64,
    /// Accept when the property distance of the learned distribution is at
    /// most `threshold·epsilon` (1/2 by default).
    pub threshold: f64,
}

impl LabelInvariantParams {
    pub fn new(learn: LearnParams) -> Self {
        Self {
            learn,
            learn_fraction: 0.5,
            threshold: 0.5,
        }
    }

    /// Accepts distributions `eps/2`-close to the property as well: learns at
    /// `eps/4` and accepts up to `3eps/4`.
    pub fn tolerant(learn: LearnParams) -> Self {
        Self {
            learn,
            learn_fraction: 0.25,
            threshold: 0.75,
        }
    }
}

/// Test a label-invariant property given as a distance function: learn at
/// `learn_fraction·eps` and accept iff the learned distribution is within
/// `threshold·eps` of the property. The distance function is spot-checked for
/// invariance under a random relabeling.
pub fn test_label_invariant<O, F>(
    oracle: O,
    prop_dist: F,
    params: &LabelInvariantParams,
    rng: &mut dyn RngCore,
) -> Result<(Verdict, LearnResult)>
where
    O: CondOracle,
    F: Fn(&Distribution) -> f64,
{
    let eps = params.learn.epsilon;
    let learn = LearnParams {
        epsilon: eps * params.learn_fraction,
        ..params.learn
    };
    let result = learn_distribution(oracle, &learn, rng)?;
    let value = prop_dist(&result.dist);
    let mut perm: Vec<usize> = (0..result.dist.len()).collect();
    perm.shuffle(&mut fork(rng));
    let relabeled = prop_dist(&result.dist.permuted(&perm)?);
    if (relabeled - value).abs() > 1e-9 {
        return Err(Error::precondition(format!(
            "property distance changed under relabeling: {value} vs {relabeled}"
        )));
    }
    let decision = Decision::from_accept(value <= params.threshold * eps);
    Ok((Verdict::new(decision, result.account.clone()), result))
}

/// Whether two unknown distributions agree up to relabeling: learn both at
/// `eps/4` with error `delta/2` and accept iff the learned ones are within
/// `eps/2` of each other after the best relabeling.
pub fn test_identity_up_to_relabeling<A, B>(
    a: A,
    b: B,
    params: &LearnParams,
    rng: &mut dyn RngCore,
) -> Result<(Verdict, f64)>
where
    A: CondOracle,
    B: CondOracle,
{
    if a.domain_size() != b.domain_size() {
        return Err(Error::DomainMismatch {
            left: a.domain_size(),
            right: b.domain_size(),
        });
    }
    let learn = LearnParams {
        epsilon: params.epsilon / 4.0,
        delta: params.delta / 2.0,
        ..*params
    };
    let (mut ra, mut rb): (Stream, Stream) = (fork(rng), fork(rng));
    let la = learn_distribution(a, &learn, &mut ra)?;
    let lb = learn_distribution(b, &learn, &mut rb)?;
    let gap = min_permutation_tv(&la.dist, &lb.dist)?;
    let mut account = la.account;
    account.merge(&lb.account);
    Ok((
        Verdict::new(Decision::from_accept(gap <= params.epsilon / 2.0), account),
        gap,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bucketing::bucket_prime;
    use crate::fixture;
    use crate::oracle::{SetClass, SimulatedOracle};
    use crate::rng;
    use proptest::prelude::*;

    fn counts(eps: f64, m: Vec<u64>) -> GridCounts {
        GridCounts {
            eps,
            k: m.len() - 1,
            m,
            failed: false,
        }
    }

    #[test]
    fn tentative_examples() {
        let d = tentative_distribution(&counts(0.5, vec![2, 0, 2]), 4).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.0, 0.5, 0.5]);
        let d = tentative_distribution(&counts(0.5, vec![0, 5, 0, 0]), 5).unwrap();
        assert_eq!(d, Distribution::uniform(5));
        let d = tentative_distribution(&counts(0.5, vec![5, 0, 0]), 5).unwrap();
        assert_eq!(d, Distribution::uniform(5));
        assert!(tentative_distribution(&counts(0.5, vec![1, 1]), 5).is_err());
    }

    #[test]
    fn bucketize_examples() {
        let c = bucketize(&[0.0, 0.5, 0.5], 4, 0.3, 2).unwrap();
        assert_eq!((c.m.clone(), c.failed), (vec![0, 2, 2], false));
        let c = bucketize(&[0.0, 0.45, 0.55], 10, 0.3, 2).unwrap();
        assert_eq!(c.m, vec![1, 4, 5]);
        // g_1 = eps/n = 0.03: fails iff 0.03 >= eps/k.
        let c = bucketize(&[0.0, 0.26, 0.26, 0.48], 10, 0.3, 3).unwrap();
        assert_eq!((c.m.clone(), c.failed), (vec![0, 2, 3, 5], false));
        let c = bucketize(&[0.0, 0.26, 0.26, 0.48], 10, 0.3, 10).unwrap();
        assert_eq!((c.m.clone(), c.failed), (vec![0, 2, 3, 5], true));
        assert!(bucketize(&[0.5, 0.6], 4, 0.3, 1).is_err());
        assert!(bucketize(&[1.2, -0.2], 4, 0.3, 1).is_err());
        assert!(bucketize(&[-0.2, 1.2], 4, 0.3, 1).is_ok());
    }

    proptest! {
        #[test]
        fn bucketize_is_total(w in prop::collection::vec(0.0f64..1.0, 1..12), n in 1usize..200) {
            prop_assume!(w.iter().sum::<f64>() > 0.0);
            let total: f64 = w.iter().sum();
            let alpha: Vec<f64> = w.iter().map(|x| x / total).collect();
            let c = bucketize(&alpha, n, 0.2, alpha.len()).unwrap();
            prop_assert_eq!(c.n(), n as u64);
        }

        #[test]
        fn true_bucket_sizes_give_close_tentative(w in prop::collection::vec(0.0f64..1.0, 1..80), e in 0usize..3) {
            prop_assume!(w.iter().sum::<f64>() > 0.0);
            let eps = [0.05, 0.1, 0.3][e];
            let mu = Distribution::from_weights(w).unwrap();
            let part = bucket_prime(&mu, eps).unwrap();
            let c = counts(eps, part.sizes().iter().map(|&s| s as u64).collect());
            let t = tentative_distribution(&c, mu.len()).unwrap();
            prop_assert!(min_permutation_tv(&t, &mu).unwrap() <= 2.0 * eps + 1e-12);
        }
    }

    #[test]
    fn min_permutation_examples() {
        let a = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let b = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert!(min_permutation_tv(&a, &b).unwrap() < 1e-15);
        let a = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(min_permutation_tv(&a, &Distribution::uniform(2)).unwrap(), 0.5);
        assert!(min_permutation_tv(&a, &Distribution::uniform(3)).is_err());
    }

    #[test]
    fn property_distances() {
        assert_eq!(uniformity_distance(&Distribution::uniform(9)), 0.0);
        let point = Distribution::point_mass(16, 3).unwrap();
        assert!((uniformity_distance(&point) - 15.0 / 16.0).abs() < 1e-12);
        assert_eq!(even_uniblock_distance(&point), 0.0);
        let four = Distribution::uniform_on(64, &[1, 9, 20, 33]).unwrap();
        assert_eq!(even_uniblock_distance(&four), 0.0);
        let two = Distribution::uniform_on(64, &[1, 9]).unwrap();
        assert!((even_uniblock_distance(&two) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn learner_parameters() {
        let p = LearnParams::new(0.6, 1.0 / 3.0).unwrap().with_scale(0.15);
        let s = p.samples(64);
        assert!(s <= 100_000, "{s}");
        assert_eq!(p.grid_size(64), prime_bucket_count(64, 0.05));
        assert!(LearnParams::new(0.0, 0.1).is_err());
    }

    #[test]
    fn exact_pipeline_matches_the_reference() {
        // With exact ratios the learner only adds sampling noise on top of
        // bucketize(trim_exact(mu)).
        let mut r = rng::seeded(11);
        for seed in 0..5 {
            let w: Vec<f64> = (0..16).map(|i| 1.0 + ((i * 7 + seed * 3) % 5) as f64).collect();
            let mu = Distribution::from_weights(w).unwrap();
            let params = LearnParams::new(0.6, 0.1).unwrap().with_scale(0.3);
            let mut session = SamplerSession::new(
                SimulatedOracle::new(mu.clone(), seed as u64),
                params.sampler_params(16),
                fork(&mut r),
            )
            .unwrap();
            session.inject_exact(&mu).unwrap();
            let learned = learn_from_session(&mut session, &params).unwrap();
            assert_eq!(learned.account.total, 0);
            assert!(!learned.counts.failed);
            assert!(min_permutation_tv(&learned.dist, &mu).unwrap() <= 0.3, "{seed}");
        }
    }

    #[test]
    fn learner_uses_dyadic_sets_only() {
        let params = LearnParams::new(0.6, 1.0 / 3.0)
            .unwrap()
            .with_scale(0.01)
            .with_estimator_scale(1e-9);
        let res = learn_distribution(
            SimulatedOracle::new(Distribution::uniform(12), 3),
            &params,
            &mut rng::seeded(4),
        )
        .unwrap();
        assert!(res
            .account
            .classes()
            .iter()
            .all(|c| matches!(c, SetClass::DyadicInterval | SetClass::FullDomain)));
        assert!(res.account.count(SetClass::DyadicInterval) > 0);
        assert_eq!(res.dist.len(), 12);
    }

    #[test]
    fn trivial_property_always_accepts() {
        let params = LabelInvariantParams::new(
            LearnParams::new(0.5, 1.0 / 3.0)
                .unwrap()
                .with_scale(0.005)
                .with_estimator_scale(1e-9),
        );
        for seed in 0..5 {
            let o = SimulatedOracle::new(Distribution::point_mass(8, 2).unwrap(), seed);
            let (v, _) = test_label_invariant(o, |_| 0.0, &params, &mut rng::seeded(seed)).unwrap();
            assert!(v.is_accept());
        }
    }

    #[test]
    fn labeled_property_is_caught() {
        let params = LabelInvariantParams::new(
            LearnParams::new(0.5, 1.0 / 3.0)
                .unwrap()
                .with_scale(0.005)
                .with_estimator_scale(1e-9),
        );
        let o = SimulatedOracle::new(fixture::parse("halfheavy:8").unwrap(), 0);
        let mean_index = |d: &Distribution| d.probs().iter().enumerate().map(|(i, p)| i as f64 * p).sum::<f64>();
        let err = test_label_invariant(o, mean_index, &params, &mut rng::seeded(1)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
