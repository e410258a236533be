//! Adaptive testers: near-uniformity with a query count independent of `n`,
//! identity to a known distribution through recursive bucketing, the
//! brute-force identity check both rely on, and majority-vote amplification.
//!
//! All logarithms in sample-count formulas are natural logs; `log*` is the
//! base-2 iterated logarithm. Every count is multiplied by the scale `c`
//! of [`AdaptiveParams`] (1 reproduces the stated constants).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::bucketing::{bucket, restrict};
use crate::distribution::{linf_distance, tv_of_slices, Distribution};
use crate::error::{Error, Result};
use crate::oracle::{CoarsenedOracle, CondOracle, RestrictedOracle};
use crate::verdict::{Decision, TraceEvent, Verdict};

/// Iterated base-2 logarithm: how many times `log2` must be applied before
/// the value drops to at most 1.
pub fn log_star(x: f64) -> usize {
    let mut x = x;
    let mut count = 0;
    while x > 1.0 {
        x = x.log2();
        count += 1;
    }
    count
}

/// How the brute-force identity check sizes its sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimitiveMode {
    /// `2(|D| + ln(2/δ))/ε²` samples, enough for the empirical distribution
    /// to land within `ε/2` in TV.
    #[default]
    Empirical,
    /// `100·ln(1/δ)·ε⁻²·|D|²·ln|D|` samples.
    PaperFaithful,
}

impl fmt::Display for PrimitiveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimitiveMode::Empirical => "empirical",
            PrimitiveMode::PaperFaithful => "paper-faithful",
        })
    }
}

impl FromStr for PrimitiveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empirical" => Ok(PrimitiveMode::Empirical),
            "paper-faithful" => Ok(PrimitiveMode::PaperFaithful),
            other => Err(Error::precondition(format!("unknown primitive mode `{other}`"))),
        }
    }
}

/// Brute-force identity check: draw a batch of samples, build the empirical
/// distribution, accept iff it is within `eps/2` of the known one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForce {
    pub mode: PrimitiveMode,
    pub scale: f64,
}

impl BruteForce {
    pub fn new(mode: PrimitiveMode, scale: f64) -> Self {
        Self { mode, scale }
    }

    /// Samples used on a domain of `domain` elements.
    pub fn sample_count(&self, domain: usize, eps: f64, delta: f64) -> Result<u64> {
        if domain <= 1 {
            return Ok(0);
        }
        let d = domain as f64;
        let raw = match self.mode {
            PrimitiveMode::Empirical => 2.0 * (d + (2.0 / delta).ln()) / (eps * eps),
            PrimitiveMode::PaperFaithful => 100.0 * (1.0 / delta).ln() * d * d * d.ln() / (eps * eps),
        };
        to_count(self.scale * raw)
    }

    /// Samples [`run`](Self::run) draws on a domain of `domain` elements:
    /// none for a singleton, otherwise at least one.
    pub fn planned_samples(&self, domain: usize, eps: f64, delta: f64) -> Result<u64> {
        if domain <= 1 {
            return Ok(0);
        }
        Ok(self.sample_count(domain, eps, delta)?.max(1))
    }

    /// Test `oracle` against `known` over their common domain. The sample
    /// size is computed for `nominal_domain` elements when given.
    pub fn run(
        &self,
        oracle: &mut dyn CondOracle,
        known: &Distribution,
        eps: f64,
        delta: f64,
        nominal_domain: Option<usize>,
    ) -> Result<(Decision, TraceEvent)> {
        let d = known.len();
        if oracle.domain_size() != d {
            return Err(Error::DomainMismatch {
                left: oracle.domain_size(),
                right: d,
            });
        }
        if d == 1 {
            let ev = TraceEvent::BruteForce {
                depth: 0,
                domain: 1,
                samples: 0,
                distance: eps,
                observed: 0.0,
                accept: true,
            };
            return Ok((Decision::Accept, ev));
        }
        let m = self.planned_samples(nominal_domain.unwrap_or(d).max(d), eps, delta)?;
        let all: Vec<usize> = (0..d).collect();
        let counts = oracle.draw_counts(&all, m)?;
        let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / m as f64).collect();
        let observed = tv_of_slices(&empirical, known.probs());
        let accept = observed <= eps / 2.0;
        let ev = TraceEvent::BruteForce {
            depth: 0,
            domain: d,
            samples: m,
            distance: eps,
            observed,
            accept,
        };
        Ok((Decision::from_accept(accept), ev))
    }
}

fn to_count(x: f64) -> Result<u64> {
    if !x.is_finite() || x >= u64::MAX as f64 {
        return Err(Error::precondition(format!("sample count {x} does not fit in 64 bits")));
    }
    Ok(x.ceil().max(0.0) as u64)
}

/// Brute-force identity test of `oracle` against `known` with distance
/// `eps` and error `delta`.
pub fn identity_primitive(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    eps: f64,
    delta: f64,
    mode: PrimitiveMode,
    scale: f64,
) -> Result<Verdict> {
    let before = oracle.account().clone();
    let (decision, ev) = BruteForce::new(mode, scale).run(oracle, known, eps, delta, None)?;
    Ok(Verdict::new(decision, oracle.account().since(&before)).with_trace(vec![ev]))
}

/// Parameters shared by the adaptive testers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Multiplier `c` on every sample-count formula.
    pub scale: f64,
    /// Domain size at or below which the identity tester goes straight to
    /// the brute-force check. `None` uses `(400·ln(1/ε)/ε · log* m)³`.
    pub recursion_threshold: Option<usize>,
    pub mode: PrimitiveMode,
}

impl AdaptiveParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            delta,
            scale: 1.0,
            recursion_threshold: None,
            mode: PrimitiveMode::Empirical,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_recursion_threshold(mut self, threshold: usize) -> Self {
        self.recursion_threshold = Some(threshold);
        self
    }

    pub fn with_mode(mut self, mode: PrimitiveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("epsilon", self.epsilon)?;
        check_unit("delta", self.delta)?;
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::precondition(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    fn primitive(&self) -> BruteForce {
        BruteForce::new(self.mode, self.scale)
    }
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::precondition(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

/// Closed-form query budget of the near-uniformity tester.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearUniformityBudget {
    /// Unconditioned samples, also the number of uniform indices.
    pub k: u64,
    /// Nominal size of the set handed to the brute-force check.
    pub primitive_domain: usize,
    pub primitive_samples: u64,
}

impl NearUniformityBudget {
    pub fn total(&self) -> u64 {
        self.k + self.primitive_samples
    }
}

/// Query budget of [`test_near_uniformity`]; it does not depend on `n`.
pub fn near_uniformity_budget(params: &AdaptiveParams) -> Result<NearUniformityBudget> {
    params.validate()?;
    let (eps, delta) = (params.epsilon, params.delta);
    let ln_inv_delta = (1.0 / delta).ln();
    let k = to_count(params.scale * (6.0 / eps) * ln_inv_delta)?.max(1);
    let primitive_domain = 2 * k as usize;
    let distance = eps * eps / (600.0 * ln_inv_delta);
    let primitive_samples = params
        .primitive()
        .sample_count(primitive_domain, distance, delta / 3.0)?;
    Ok(NearUniformityBudget {
        k,
        primitive_domain,
        primitive_samples,
    })
}

/// Near-uniformity tester. The known distribution must be within
/// `eps/(100n)` of uniform in l∞. Uses `k` unconditioned samples, `k` uniform
/// indices, and one brute-force check on the union of the two.
pub fn test_near_uniformity(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    params: &AdaptiveParams,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    let before = oracle.account().clone();
    let mut trace = Vec::new();
    let decision = near_uniformity_impl(oracle, known, params, rng, &mut trace, 0)?;
    Ok(Verdict::new(decision, oracle.account().since(&before)).with_trace(trace))
}

fn near_uniformity_impl(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    params: &AdaptiveParams,
    rng: &mut dyn RngCore,
    trace: &mut Vec<TraceEvent>,
    depth: usize,
) -> Result<Decision> {
    let n = known.len();
    if oracle.domain_size() != n {
        return Err(Error::DomainMismatch {
            left: oracle.domain_size(),
            right: n,
        });
    }
    let budget = near_uniformity_budget(params)?;
    let gap = linf_distance(known, &Distribution::uniform(n))?;
    let allowed = params.epsilon / (100.0 * n as f64);
    // Buckets handed down by the identity tester sit exactly at this bound,
    // so leave room for rounding in the restricted probabilities.
    if gap >= allowed * (1.0 + 1e-9) {
        return Err(Error::precondition(format!(
            "known distribution is {gap:e} from uniform in l-infinity; near-uniformity needs < {allowed:e}"
        )));
    }
    if n == 1 {
        return Ok(Decision::Accept);
    }

    let mut domain = Vec::with_capacity(2 * budget.k as usize);
    for _ in 0..budget.k {
        domain.push(oracle.draw_full()?);
    }
    for _ in 0..budget.k {
        domain.push(rng.random_range(0..n));
    }
    domain.sort_unstable();
    domain.dedup();

    let known_r = restrict(known, &domain)?;
    let ln_inv_delta = (1.0 / params.delta).ln();
    let distance = params.epsilon * params.epsilon / (600.0 * ln_inv_delta);
    let mut sub = RestrictedOracle::new(&mut *oracle, domain)?;
    let (decision, mut ev) = params.primitive().run(
        &mut sub,
        &known_r.dist,
        distance,
        params.delta / 3.0,
        Some(budget.primitive_domain),
    )?;
    if let TraceEvent::BruteForce { depth: d, .. } = &mut ev {
        *d = depth;
    }
    trace.push(ev);
    Ok(decision)
}

/// Recursion limit of the identity tester for original domain size `m`.
pub fn max_recursion_depth(m: usize) -> usize {
    2 * log_star(m as f64)
}

/// Identity tester against a known distribution: bucket the known
/// distribution, run the near-uniformity tester inside the buckets that
/// unconditioned samples land in, then recurse on the bucket masses.
pub fn test_identity_adaptive(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    params: &AdaptiveParams,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    params.validate()?;
    if oracle.domain_size() != known.len() {
        return Err(Error::DomainMismatch {
            left: oracle.domain_size(),
            right: known.len(),
        });
    }
    let before = oracle.account().clone();
    let mut trace = Vec::new();
    let m = known.len();
    let decision = identity_level(
        oracle,
        known,
        params.epsilon,
        params.delta,
        m,
        0,
        params,
        rng,
        &mut trace,
    )?;
    Ok(Verdict::new(decision, oracle.account().since(&before)).with_trace(trace))
}

/// Deepest recursion level recorded in a trace.
pub fn trace_depth(trace: &[TraceEvent]) -> usize {
    trace
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Recurse { depth, .. } => Some(*depth),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

#[allow(clippy::too_many_arguments)]
fn identity_level(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    eps: f64,
    delta: f64,
    m: usize,
    depth: usize,
    params: &AdaptiveParams,
    rng: &mut dyn RngCore,
    trace: &mut Vec<TraceEvent>,
) -> Result<Decision> {
    let n = known.len();
    let max_depth = max_recursion_depth(m);
    assert!(
        depth <= max_depth,
        "recursion depth {depth} exceeds 2 log* m = {max_depth}"
    );
    let ls = log_star(m as f64).max(1) as f64;
    let ln_inv_delta = (1.0 / delta).ln();

    let threshold = match params.recursion_threshold {
        Some(t) => t as f64,
        None => (400.0 * (1.0 / eps).ln() / eps * ls).powi(3),
    };
    // With log* m = 1 the recursive distance eps(1 - 1/log* m) is zero, so
    // such tiny instances are settled directly.
    if n as f64 <= threshold || depth == max_depth || ls < 2.0 {
        let (decision, mut ev) = params.primitive().run(oracle, known, eps, delta, None)?;
        if let TraceEvent::BruteForce { depth: d, .. } = &mut ev {
            *d = depth;
        }
        trace.push(ev);
        return Ok(decision);
    }

    let part = bucket(known, eps / (200.0 * ls))?;
    let r = to_count(params.scale * 4.0 / eps * ls * ln_inv_delta)?.max(1);
    let mut hit = Vec::new();
    for _ in 0..r {
        hit.push(part.owner(oracle.draw_full()?));
    }
    hit.sort_unstable();
    hit.dedup();
    trace.push(TraceEvent::Bucketed {
        depth,
        domain: n,
        buckets: part.k() + 1,
        hit: hit.clone(),
    });

    let sub_eps = eps / (2.0 * ls);
    let sub_delta = (delta * eps / (12.0 * ls * ln_inv_delta)).min(0.5);
    for &i in &hit {
        let members = part.bucket(i);
        let restricted = match restrict(known, members) {
            Ok(r) => r,
            Err(Error::ZeroMassRestriction) => {
                trace.push(TraceEvent::EmptyBucketHit { depth, bucket: i });
                return Ok(Decision::Reject);
            }
            Err(e) => return Err(e),
        };
        if members.len() == 1 {
            continue;
        }
        let mut sub = RestrictedOracle::new(&mut *oracle, members.to_vec())?;
        let decision = if i == 0 {
            // Bucket 0 is not near-uniform; compare it directly.
            let (d, _) = params
                .primitive()
                .run(&mut sub, &restricted.dist, sub_eps, sub_delta, None)?;
            d
        } else {
            let sub_params = AdaptiveParams {
                epsilon: sub_eps,
                delta: sub_delta,
                ..params.clone()
            };
            near_uniformity_impl(&mut sub, &restricted.dist, &sub_params, rng, trace, depth)?
        };
        trace.push(TraceEvent::BucketTest {
            depth,
            bucket: i,
            size: members.len(),
            accept: decision.is_accept(),
        });
        if decision == Decision::Reject {
            return Ok(Decision::Reject);
        }
    }

    // Empty buckets carry no mass under either distribution, so the
    // recursive instance keeps only the non-empty ones.
    let blocks: Vec<Vec<usize>> = part.nonempty().into_iter().map(|i| part.bucket(i).to_vec()).collect();
    let coarse_known = Distribution::new(blocks.iter().map(|b| known.mass(b)).collect())?;
    trace.push(TraceEvent::Recurse {
        depth: depth + 1,
        domain: blocks.len(),
    });
    let mut coarse = CoarsenedOracle::new(&mut *oracle, blocks)?;
    identity_level(
        &mut coarse,
        &coarse_known,
        eps * (1.0 - 1.0 / ls),
        delta / 3.0,
        m,
        depth + 1,
        params,
        rng,
        trace,
    )
}

/// Number of majority-vote repetitions that drive a 1/3-error tester down
/// to error `delta`: `ceil(100·ln(1/δ))`, or a single run once `δ >= 1/3`.
pub fn repetitions_for(delta: f64) -> usize {
    if delta >= 1.0 / 3.0 {
        1
    } else {
        (100.0 * (1.0 / delta).ln()).ceil() as usize
    }
}

/// Majority vote over [`repetitions_for`]`(delta)` independent runs of
/// `inner`, which receives the run index.
pub fn amplify<F>(delta: f64, inner: F) -> Result<Verdict>
where
    F: FnMut(usize) -> Result<Verdict>,
{
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::precondition(format!("delta must lie in (0, 1), got {delta}")));
    }
    amplify_runs(repetitions_for(delta), inner)
}

/// Majority vote over exactly `runs` runs; `runs <= 1` returns the single
/// inner verdict unchanged.
pub fn amplify_runs<F>(runs: usize, mut inner: F) -> Result<Verdict>
where
    F: FnMut(usize) -> Result<Verdict>,
{
    if runs <= 1 {
        return inner(0);
    }
    let mut accepts = 0;
    let mut account = crate::oracle::SampleAccount::default();
    for i in 0..runs {
        let v = inner(i)?;
        if v.is_accept() {
            accepts += 1;
        }
        account.merge(&v.account);
    }
    let decision = Decision::from_accept(2 * accepts > runs);
    Ok(Verdict::new(decision, account).with_trace(vec![TraceEvent::Majority { runs, accepts }]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{LoggingOracle, SampleAccount, SetClass, SimulatedOracle};
    use crate::rng;

    #[test]
    fn log_star_values() {
        assert_eq!(log_star(1.0), 0);
        assert_eq!(log_star(2.0), 1);
        assert_eq!(log_star(4.0), 2);
        assert_eq!(log_star(16.0), 3);
        assert_eq!(log_star(64.0), 4);
        assert_eq!(log_star(65536.0), 4);
        assert_eq!(log_star(65537.0), 5);
        assert_eq!(log_star(2f64.powi(32)), 5);
        assert_eq!(max_recursion_depth(1 << 32), 10);
    }

    #[test]
    fn primitive_mode_round_trips_through_strings() {
        for m in [PrimitiveMode::Empirical, PrimitiveMode::PaperFaithful] {
            assert_eq!(m.to_string().parse::<PrimitiveMode>().unwrap(), m);
        }
        assert!("fast".parse::<PrimitiveMode>().is_err());
    }

    #[test]
    fn primitive_sample_counts() {
        let e = BruteForce::new(PrimitiveMode::Empirical, 1.0);
        let expect = (2.0 * (4.0 + (2.0f64 / 0.1).ln()) / 0.25).ceil() as u64;
        assert_eq!(e.sample_count(4, 0.5, 0.1).unwrap(), expect);
        let p = BruteForce::new(PrimitiveMode::PaperFaithful, 1.0);
        let expect = (100.0 * 10f64.ln() * 16.0 * 4f64.ln() / 0.25).ceil() as u64;
        assert_eq!(p.sample_count(4, 0.5, 0.1).unwrap(), expect);
        assert_eq!(e.sample_count(1, 0.5, 0.1).unwrap(), 0);
        assert!(e.sample_count(10, 1e-200, 0.1).is_err());
    }

    fn rate(trials: u64, mut run: impl FnMut(u64) -> Decision) -> f64 {
        (0..trials).filter(|&t| run(t).is_accept()).count() as f64 / trials as f64
    }

    #[test]
    fn primitive_statistics() {
        let u = Distribution::uniform(4);
        let accept = rate(200, |t| {
            let mut o = SimulatedOracle::new(u.clone(), t);
            identity_primitive(&mut o, &u, 0.5, 0.1, PrimitiveMode::Empirical, 1.0)
                .unwrap()
                .decision
        });
        assert!(accept >= 0.9, "{accept}");
        let point = Distribution::point_mass(4, 0).unwrap();
        let accept = rate(200, |t| {
            let mut o = SimulatedOracle::new(point.clone(), t);
            identity_primitive(&mut o, &u, 0.5, 0.1, PrimitiveMode::Empirical, 1.0)
                .unwrap()
                .decision
        });
        assert!(accept <= 0.1, "{accept}");
        let single = Distribution::uniform(1);
        let mut o = SimulatedOracle::new(single.clone(), 0);
        let v = identity_primitive(&mut o, &single, 0.5, 0.1, PrimitiveMode::PaperFaithful, 1.0).unwrap();
        assert!(v.is_accept() && v.account.total == 0);
    }

    #[test]
    fn budget_is_independent_of_n() {
        let params = AdaptiveParams::new(0.3, 1.0 / 3.0).unwrap();
        let b = near_uniformity_budget(&params).unwrap();
        assert_eq!(b.k, 22);
        assert_eq!(b.primitive_domain, 44);
        let mut totals = Vec::new();
        for n in [1000usize, 100_000] {
            let u = Distribution::uniform(n);
            let mut o = SimulatedOracle::new(u.clone(), 1);
            let v = test_near_uniformity(&mut o, &u, &params, &mut rng::seeded(2)).unwrap();
            totals.push(v.account.total);
        }
        assert_eq!(totals[0], b.total());
        assert_eq!(totals[1], b.total());
    }

    #[test]
    fn near_uniformity_uses_full_domain_and_one_small_set() {
        let params = AdaptiveParams::new(0.3, 1.0 / 3.0).unwrap();
        let b = near_uniformity_budget(&params).unwrap();
        let u = Distribution::uniform(1000);
        let base = SimulatedOracle::new(u.clone(), 5).with_constant_size_bound(b.primitive_domain);
        let mut o = LoggingOracle::new(base);
        let v = test_near_uniformity(&mut o, &u, &params, &mut rng::seeded(6)).unwrap();
        assert_eq!(v.account.classes(), vec![SetClass::FullDomain, SetClass::ConstantSize]);
        let small: Vec<_> = o.log().iter().filter(|(s, _)| s.len() < 1000).collect();
        assert_eq!(small.len(), 1);
        assert!(small[0].0.len() <= b.primitive_domain);
    }

    #[test]
    fn near_uniformity_rejects_far_known_precondition() {
        let params = AdaptiveParams::new(0.3, 1.0 / 3.0).unwrap();
        let skew = Distribution::from_weights(vec![1.0, 1.01, 1.0, 1.0]).unwrap();
        let mut o = SimulatedOracle::new(skew.clone(), 0);
        let err = test_near_uniformity(&mut o, &skew, &params, &mut rng::seeded(0)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn amplify_majority() {
        let always = amplify(0.05, |_| Ok(Verdict::new(Decision::Accept, SampleAccount::default()))).unwrap();
        assert!(always.is_accept());
        assert_eq!(repetitions_for(0.05), 300);
        assert_eq!(repetitions_for(1.0 / 3.0), 1);

        let single = amplify(1.0 / 3.0, |_| {
            Ok(Verdict::new(Decision::Reject, SampleAccount::default()))
        })
        .unwrap();
        assert_eq!(single.decision, Decision::Reject);
        assert!(single.trace.is_empty());

        let mut coin = rng::seeded(12);
        let mut accepted = 0;
        for _ in 0..400 {
            let v = amplify(0.05, |_| {
                let d = Decision::from_accept(coin.random_bool(2.0 / 3.0));
                Ok(Verdict::new(d, SampleAccount::default()))
            })
            .unwrap();
            accepted += v.is_accept() as usize;
        }
        assert!(accepted as f64 / 400.0 >= 0.95, "{accepted}");
    }

    #[test]
    fn identity_recursion_stays_within_bucket_structure() {
        // Force descent on a 512-element instance and check the sets the
        // base oracle sees: each is inside one top-level bucket or a union
        // of whole top-level buckets.
        let n = 512;
        let known = Distribution::from_weights((1..=n).map(|i| 1.0 / i as f64).collect()).unwrap();
        let params = AdaptiveParams::new(0.4, 1.0 / 3.0)
            .unwrap()
            .with_recursion_threshold(16)
            .with_scale(0.5);
        let mut o = LoggingOracle::new(SimulatedOracle::new(known.clone(), 3));
        let v = test_identity_adaptive(&mut o, &known, &params, &mut rng::seeded(4)).unwrap();
        assert!(trace_depth(&v.trace) >= 1);
        assert!(trace_depth(&v.trace) <= max_recursion_depth(n));
        let ls = log_star(n as f64) as f64;
        let top = bucket(&known, 0.4 / (200.0 * ls)).unwrap();
        for (set, _) in o.log() {
            let mut inside_one = false;
            let mut union_of_whole = true;
            for b in top.buckets().iter().filter(|b| !b.is_empty()) {
                let inter = b.iter().filter(|x| set.binary_search(x).is_ok()).count();
                if inter == set.len() {
                    inside_one = true;
                }
                if inter != 0 && inter != b.len() {
                    union_of_whole = false;
                }
            }
            assert!(
                inside_one || union_of_whole,
                "set of size {} crosses buckets",
                set.len()
            );
        }
    }

    #[test]
    fn mass_outside_known_support_rejects() {
        let known = Distribution::point_mass(64, 0).unwrap();
        let params = AdaptiveParams::new(0.4, 1.0 / 3.0).unwrap().with_recursion_threshold(4);
        let mut o = SimulatedOracle::new(Distribution::uniform(64), 9);
        let v = test_identity_adaptive(&mut o, &known, &params, &mut rng::seeded(9)).unwrap();
        assert_eq!(v.decision, Decision::Reject);
        assert!(v.trace.iter().any(|e| matches!(e, TraceEvent::EmptyBucketHit { .. })));
    }
}
