//! Non-adaptive near-uniformity and identity testers.
//!
//! Each tester first builds a plan, the complete list of conditioning sets
//! with their sample counts, from the parameters and its own coins alone.
//! The plan is then replayed against the oracle through a [`PlanGuard`],
//! which refuses any set it was not told about in advance.

use std::collections::HashSet;

use rand::seq::index;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::adaptive::{check_unit, repetitions_for, BruteForce, PrimitiveMode};
use crate::bucketing::{bucket, restrict, standard_bucket_count};
use crate::distribution::{linf_distance, tv_of_slices, Distribution};
use crate::error::{Error, Result};
use crate::oracle::{CondOracle, SampleAccount};
use crate::verdict::{Decision, TraceEvent, Verdict};

/// Error bound of one run of the near-uniformity tester.
pub const BASE_ERROR: f64 = 1.0 / 3.0;

/// Error of the brute-force check on the small random set.
const SMALL_SET_ERROR: f64 = 1.0 / 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonAdaptiveParams {
    pub epsilon: f64,
    /// Error bound; near-uniformity runs at 1/3 and is amplified by
    /// majority vote below that.
    pub delta: f64,
    /// Multiplier `c` on sample counts and on the small-set size.
    pub scale: f64,
    /// Multiplier on `2000·eps⁻⁶·ln⁵n`, the size of the smallest collision
    /// set. Values below 1 bring the collision step into reach at small `n`.
    pub set_scale: f64,
    pub mode: PrimitiveMode,
}

impl NonAdaptiveParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            delta,
            scale: 1.0,
            set_scale: 1.0,
            mode: PrimitiveMode::Empirical,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_set_scale(mut self, set_scale: f64) -> Self {
        self.set_scale = set_scale;
        self
    }

    pub fn with_mode(mut self, mode: PrimitiveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("epsilon", self.epsilon)?;
        check_unit("delta", self.delta)?;
        for (name, c) in [("scale", self.scale), ("set scale", self.set_scale)] {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::precondition(format!("{name} must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// Exponents `j` of the collision sets: from
    /// `ceil(log2(set_scale·2000·eps⁻⁶·ln⁵n))` (at least 0) to
    /// `ceil(log2 n)`. Empty when the lower end exceeds the upper.
    pub fn collision_exponents(&self, n: usize) -> std::ops::RangeInclusive<u32> {
        let ln_n = (n as f64).ln();
        let lo = (self.set_scale * 2000.0 * self.epsilon.powi(-6) * ln_n.powi(5))
            .log2()
            .ceil();
        let lo = if lo.is_finite() { lo.max(0.0) as u32 } else { 0 };
        let hi = (n as f64).log2().ceil() as u32;
        if n <= 1 {
            // An empty range.
            return hi + 1..=hi;
        }
        lo..=hi
    }

    /// Samples drawn from each collision set, `ceil(c·64·eps⁻²·ln²n)`.
    pub fn collision_samples(&self, n: usize) -> u64 {
        let ln_n = (n as f64).ln();
        (self.scale * 64.0 * ln_n * ln_n / (self.epsilon * self.epsilon))
            .ceil()
            .max(1.0) as u64
    }

    /// Size of the small random set, `min(n, ceil(c·9000·eps⁻⁶·ln⁵n))`.
    pub fn small_set_size(&self, n: usize) -> usize {
        let ln_n = (n as f64).ln();
        let raw = (self.scale * 9000.0 * self.epsilon.powi(-6) * ln_n.powi(5)).ceil();
        if raw >= n as f64 {
            n
        } else {
            (raw as usize).max(1)
        }
    }

    fn primitive(&self) -> BruteForce {
        BruteForce::new(self.mode, self.scale)
    }
}

/// A conditioning set with its sample count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedQuery {
    pub set: Vec<usize>,
    pub samples: u64,
}

/// Plan of one near-uniformity run, in the coordinates of its domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearUniformityPlan {
    pub n: usize,
    pub epsilon: f64,
    pub collision: Vec<PlannedQuery>,
    /// The small random set `U` and the brute-force sample count on it.
    pub identity: PlannedQuery,
    /// Distance handed to the brute-force check, `eps/(24|U|)`.
    pub identity_distance: f64,
}

impl NearUniformityPlan {
    pub fn queries(&self) -> impl Iterator<Item = &PlannedQuery> {
        self.collision.iter().chain(std::iter::once(&self.identity))
    }

    pub fn total_samples(&self) -> u64 {
        self.queries().map(|q| q.samples).sum()
    }
}

fn random_set(rng: &mut dyn RngCore, n: usize, size: usize) -> Vec<usize> {
    if size >= n {
        return (0..n).collect();
    }
    let mut set = index::sample(rng, n, size).into_vec();
    set.sort_unstable();
    set
}

/// Plan one near-uniformity run over a domain of `n` elements. Does not
/// look at any distribution.
pub fn plan_near_uniformity(n: usize, params: &NonAdaptiveParams, rng: &mut dyn RngCore) -> Result<NearUniformityPlan> {
    params.validate()?;
    let per_set = params.collision_samples(n);
    let collision = params
        .collision_exponents(n)
        .map(|j| {
            let size = if j >= usize::BITS { n } else { n.min(1usize << j) };
            PlannedQuery {
                set: random_set(rng, n, size),
                samples: per_set,
            }
        })
        .collect();
    let size = params.small_set_size(n);
    let set = random_set(rng, n, size);
    let identity_distance = params.epsilon / (24.0 * size as f64);
    let samples = params
        .primitive()
        .planned_samples(size, identity_distance, SMALL_SET_ERROR)?;
    Ok(NearUniformityPlan {
        n,
        epsilon: params.epsilon,
        collision,
        identity: PlannedQuery { set, samples },
        identity_distance,
    })
}

/// Union bound on the probability that some collision set sees a repeated
/// index when the unknown distribution equals a known one within
/// `eps/(8n)` of uniform: the sum over collision sets of
/// `C(s,2)·((1+eps/8)/(1-eps/8))²/|U_j|`.
pub fn collision_bound(n: usize, params: &NonAdaptiveParams) -> f64 {
    let s = params.collision_samples(n) as f64;
    let ratio = (1.0 + params.epsilon / 8.0) / (1.0 - params.epsilon / 8.0);
    params
        .collision_exponents(n)
        .map(|j| {
            let size = (n as f64).min(2f64.powi(j as i32));
            s * (s - 1.0) / 2.0 * ratio * ratio / size
        })
        .sum()
}

/// What the guard has seen, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum PlanEvent {
    Declared { set_size: usize },
    Drew { set_size: usize, count: u64 },
}

/// Oracle wrapper that only forwards draws on sets declared up front.
#[derive(Debug)]
pub struct PlanGuard<O> {
    parent: O,
    declared: HashSet<Vec<usize>>,
    events: Vec<PlanEvent>,
}

impl<O: CondOracle> PlanGuard<O> {
    pub fn new<I>(parent: O, sets: I) -> Self
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut guard = Self {
            parent,
            declared: HashSet::new(),
            events: Vec::new(),
        };
        for set in sets {
            guard.events.push(PlanEvent::Declared { set_size: set.len() });
            guard.declared.insert(set);
        }
        guard
    }

    pub fn events(&self) -> &[PlanEvent] {
        &self.events
    }

    /// Whether no declaration came after a draw.
    pub fn declarations_precede_draws(&self) -> bool {
        let first_draw = self.events.iter().position(|e| matches!(e, PlanEvent::Drew { .. }));
        match first_draw {
            None => true,
            Some(i) => self.events[i..].iter().all(|e| matches!(e, PlanEvent::Drew { .. })),
        }
    }

    pub fn into_inner(self) -> O {
        self.parent
    }

    fn check(&self, set: &[usize]) -> Result<()> {
        if !self.declared.contains(set) {
            return Err(Error::precondition(format!(
                "set of size {} was not declared before sampling",
                set.len()
            )));
        }
        Ok(())
    }
}

impl<O: CondOracle> CondOracle for PlanGuard<O> {
    fn domain_size(&self) -> usize {
        self.parent.domain_size()
    }

    fn draw(&mut self, set: &[usize]) -> Result<usize> {
        self.check(set)?;
        self.events.push(PlanEvent::Drew {
            set_size: set.len(),
            count: 1,
        });
        self.parent.draw(set)
    }

    fn draw_counts(&mut self, set: &[usize], count: u64) -> Result<Vec<u64>> {
        self.check(set)?;
        self.events.push(PlanEvent::Drew {
            set_size: set.len(),
            count,
        });
        self.parent.draw_counts(set, count)
    }

    fn draw_full(&mut self) -> Result<usize> {
        let all: Vec<usize> = (0..self.domain_size()).collect();
        self.draw(&all)
    }

    fn account(&self) -> &SampleAccount {
        self.parent.account()
    }
}

fn check_flat(known: &Distribution, bound: f64) -> Result<()> {
    let gap = linf_distance(known, &Distribution::uniform(known.len()))?;
    if gap >= bound {
        return Err(Error::precondition(format!(
            "known distribution is {gap:e} from uniform in l-infinity; needs < {bound:e}"
        )));
    }
    Ok(())
}

/// Replay a near-uniformity plan. `map` translates the plan's local indices
/// into the oracle's.
fn run_near_uniformity_plan(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    plan: &NearUniformityPlan,
    map: Option<&[usize]>,
    trace: &mut Vec<TraceEvent>,
) -> Result<Decision> {
    let to_parent = |set: &[usize]| -> Vec<usize> {
        match map {
            Some(m) => set.iter().map(|&i| m[i]).collect(),
            None => set.to_vec(),
        }
    };
    for q in &plan.collision {
        let counts = oracle.draw_counts(&to_parent(&q.set), q.samples)?;
        let collided = counts.iter().any(|&c| c >= 2);
        trace.push(TraceEvent::Collision {
            set_size: q.set.len(),
            samples: q.samples,
            collided,
        });
        if collided {
            return Ok(Decision::Reject);
        }
    }
    let u = &plan.identity;
    if u.set.len() <= 1 {
        return Ok(Decision::Accept);
    }
    let local = restrict(known, &u.set)?;
    let counts = oracle.draw_counts(&to_parent(&u.set), u.samples)?;
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / u.samples as f64).collect();
    let observed = tv_of_slices(&empirical, local.dist.probs());
    let accept = observed <= plan.identity_distance / 2.0;
    trace.push(TraceEvent::BruteForce {
        depth: 0,
        domain: u.set.len(),
        samples: u.samples,
        distance: plan.identity_distance,
        observed,
        accept,
    });
    Ok(Decision::from_accept(accept))
}

fn majority(decisions: &[Decision]) -> Decision {
    let accepts = decisions.iter().filter(|d| d.is_accept()).count();
    Decision::from_accept(2 * accepts > decisions.len())
}

/// Non-adaptive near-uniformity test. The known distribution must be within
/// `eps/(8n)` of uniform in l∞. Below error 1/3, `repetitions_for(delta)`
/// independent plans are drawn up front and the majority decides.
pub fn test_near_uniformity_nonadaptive(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    params: &NonAdaptiveParams,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    params.validate()?;
    let n = known.len();
    if oracle.domain_size() != n {
        return Err(Error::DomainMismatch {
            left: oracle.domain_size(),
            right: n,
        });
    }
    check_flat(known, params.epsilon / (8.0 * n as f64))?;
    let plans = (0..repetitions_for(params.delta))
        .map(|_| plan_near_uniformity(n, params, rng))
        .collect::<Result<Vec<_>>>()?;
    let before = oracle.account().clone();
    let sets: Vec<Vec<usize>> = plans.iter().flat_map(|p| p.queries().map(|q| q.set.clone())).collect();
    let mut guard = PlanGuard::new(&mut *oracle, sets);
    let mut trace = Vec::new();
    let mut decisions = Vec::with_capacity(plans.len());
    for plan in &plans {
        decisions.push(run_near_uniformity_plan(&mut guard, known, plan, None, &mut trace)?);
    }
    let decision = majority(&decisions);
    if plans.len() > 1 {
        trace.push(TraceEvent::Majority {
            runs: plans.len(),
            accepts: decisions.iter().filter(|d| d.is_accept()).count(),
        });
    }
    Ok(Verdict::new(decision, oracle.account().since(&before)).with_trace(trace))
}

/// Plans for one bucket of the identity tester.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketPlan {
    pub bucket: usize,
    pub members: Vec<usize>,
    /// One plan per majority-vote repetition, over local indices.
    pub runs: Vec<NearUniformityPlan>,
}

/// The full plan of the non-adaptive identity tester.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityPlan {
    pub buckets: Vec<BucketPlan>,
    /// Non-empty buckets, in order; the domain of the coarsened check.
    pub blocks: Vec<Vec<usize>>,
    /// Brute-force samples on the coarsened distribution.
    pub coarse_samples: u64,
}

impl IdentityPlan {
    /// Every conditioning set in base coordinates, in replay order.
    pub fn sets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for b in &self.buckets {
            for run in &b.runs {
                for q in run.queries() {
                    out.push(q.set.iter().map(|&i| b.members[i]).collect());
                }
            }
        }
        if self.blocks.len() > 1 {
            let mut all: Vec<usize> = self.blocks.concat();
            all.sort_unstable();
            out.push(all);
        }
        out
    }

    /// Number of buckets that get a near-uniformity test.
    pub fn tested_buckets(&self) -> usize {
        self.buckets.len()
    }
}

/// Error bound of each per-bucket test, `delta·ln(1+eps/8)/(2 ln n)`.
pub fn bucket_error(n: usize, eps: f64, delta: f64) -> f64 {
    let ln_n = (n as f64).ln();
    if ln_n <= 0.0 {
        return delta / 2.0;
    }
    (delta * (1.0 + eps / 8.0).ln() / (2.0 * ln_n)).min(delta / 2.0)
}

/// Plan the identity tester against `known`. Depends on the known
/// distribution and the coins only, never on the oracle.
pub fn plan_identity(known: &Distribution, params: &NonAdaptiveParams, rng: &mut dyn RngCore) -> Result<IdentityPlan> {
    params.validate()?;
    let n = known.len();
    let eps = params.epsilon;
    let part = bucket(known, eps / 8.0)?;
    let sub = NonAdaptiveParams {
        epsilon: eps / 2.0,
        delta: bucket_error(n, eps, params.delta),
        ..params.clone()
    };
    let runs = repetitions_for(sub.delta);
    let mut buckets = Vec::new();
    for i in part.nonempty().into_iter().filter(|&i| i >= 1) {
        let members = part.bucket(i).to_vec();
        if members.len() < 2 {
            continue;
        }
        let plans = (0..runs)
            .map(|_| plan_near_uniformity(members.len(), &sub, rng))
            .collect::<Result<Vec<_>>>()?;
        buckets.push(BucketPlan {
            bucket: i,
            members,
            runs: plans,
        });
    }
    let blocks: Vec<Vec<usize>> = part.nonempty().into_iter().map(|i| part.bucket(i).to_vec()).collect();
    let coarse_samples = params
        .primitive()
        .planned_samples(blocks.len(), eps / 2.0, params.delta / 2.0)?;
    Ok(IdentityPlan {
        buckets,
        blocks,
        coarse_samples,
    })
}

/// Largest number of non-empty buckets the identity tester can see,
/// `ceil(ln n / ln(1+eps/8))` plus bucket 0.
pub fn max_tested_buckets(n: usize, eps: f64) -> usize {
    standard_bucket_count(n, eps / 8.0)
}

/// Non-adaptive identity test against a known distribution: bucket at
/// `eps/8`, run the near-uniformity test in every non-empty bucket `M_i`,
/// `i >= 1`, then compare the bucket masses by brute force at distance
/// `eps/2` and error `delta/2`.
pub fn test_identity_nonadaptive(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    params: &NonAdaptiveParams,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    let n = known.len();
    if oracle.domain_size() != n {
        return Err(Error::DomainMismatch {
            left: oracle.domain_size(),
            right: n,
        });
    }
    let plan = plan_identity(known, params, rng)?;
    let before = oracle.account().clone();
    let mut guard = PlanGuard::new(&mut *oracle, plan.sets());
    let mut trace = Vec::new();
    let decision = run_identity_plan(&mut guard, known, params, &plan, &mut trace)?;
    Ok(Verdict::new(decision, oracle.account().since(&before)).with_trace(trace))
}

fn run_identity_plan(
    oracle: &mut dyn CondOracle,
    known: &Distribution,
    params: &NonAdaptiveParams,
    plan: &IdentityPlan,
    trace: &mut Vec<TraceEvent>,
) -> Result<Decision> {
    let eps = params.epsilon;
    for b in &plan.buckets {
        let local = restrict(known, &b.members)?;
        // Bucketing at eps/8 keeps the bucket within (eps/8)/|M| of uniform.
        check_flat(&local.dist, eps / (8.0 * b.members.len() as f64) * (1.0 + 1e-9))?;
        let mut decisions = Vec::with_capacity(b.runs.len());
        let mut sub_trace = Vec::new();
        for run in &b.runs {
            decisions.push(run_near_uniformity_plan(
                oracle,
                &local.dist,
                run,
                Some(&b.members),
                &mut sub_trace,
            )?);
        }
        let decision = majority(&decisions);
        trace.push(TraceEvent::BucketTest {
            depth: 0,
            bucket: b.bucket,
            size: b.members.len(),
            accept: decision.is_accept(),
        });
        if decision == Decision::Reject {
            return Ok(Decision::Reject);
        }
    }
    if plan.blocks.len() <= 1 {
        return Ok(Decision::Accept);
    }
    let mut all: Vec<usize> = plan.blocks.concat();
    all.sort_unstable();
    let counts = oracle.draw_counts(&all, plan.coarse_samples)?;
    let mut owner = vec![0; known.len()];
    for (b, members) in plan.blocks.iter().enumerate() {
        members.iter().for_each(|&i| owner[i] = b);
    }
    let mut empirical = vec![0.0; plan.blocks.len()];
    for (&i, &c) in all.iter().zip(&counts) {
        empirical[owner[i]] += c as f64 / plan.coarse_samples as f64;
    }
    let coarse: Vec<f64> = plan.blocks.iter().map(|b| known.mass(b)).collect();
    let observed = tv_of_slices(&empirical, &coarse);
    let accept = observed <= eps / 4.0;
    trace.push(TraceEvent::BruteForce {
        depth: 0,
        domain: plan.blocks.len(),
        samples: plan.coarse_samples,
        distance: eps / 2.0,
        observed,
        accept,
    });
    Ok(Decision::from_accept(accept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::oracle::{LoggingOracle, SimulatedOracle};
    use crate::rng;

    #[test]
    fn parameter_formulas() {
        let p = NonAdaptiveParams::new(0.3, 1.0 / 3.0).unwrap();
        let n = 1000;
        let ln = (n as f64).ln();
        assert_eq!(p.collision_samples(n), (64.0 * ln * ln / 0.09f64).ceil() as u64);
        assert!(p.collision_exponents(n).is_empty());
        assert_eq!(p.small_set_size(n), n);
        let small = p.clone().with_scale(1e-9);
        assert_eq!(
            small.small_set_size(n),
            (1e-9 * 9000.0 * 0.3f64.powi(-6) * ln.powi(5)).ceil() as usize
        );
        let wide = p.with_set_scale(1e-9);
        let lo = (1e-9 * 2000.0 * 0.3f64.powi(-6) * ln.powi(5)).log2().ceil() as u32;
        assert_eq!(wide.collision_exponents(n), lo..=10);
    }

    #[test]
    fn collision_bound_is_small_where_the_loop_runs() {
        let p = NonAdaptiveParams::new(0.3, 1.0 / 3.0).unwrap();
        let n = 1usize << 62;
        assert!(!p.collision_exponents(n).is_empty());
        assert!(collision_bound(n, &p) < 1.0 / 9.0);
    }

    #[test]
    fn plans_ignore_the_distribution() {
        let p = NonAdaptiveParams::new(0.3, 1.0 / 3.0)
            .unwrap()
            .with_scale(1e-6)
            .with_set_scale(1e-9);
        let a = plan_near_uniformity(1000, &p, &mut rng::seeded(5)).unwrap();
        let b = plan_near_uniformity(1000, &p, &mut rng::seeded(5)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(!a.collision.is_empty());
        for q in &a.collision {
            assert!(q.set.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn guard_rejects_undeclared_sets() {
        let mut g = PlanGuard::new(SimulatedOracle::new(Distribution::uniform(4), 0), vec![vec![0, 1]]);
        assert!(g.draw(&[0, 1]).is_ok());
        assert!(matches!(g.draw(&[0, 2]), Err(Error::Precondition(_))));
        assert!(g.declarations_precede_draws());
    }

    #[test]
    fn near_uniformity_degenerate_path() {
        // At n = 1000 the collision loop is empty and U = [n]: one brute-force
        // check on the whole domain.
        let u = Distribution::uniform(1000);
        let h = fixture::parse("halfheavy:1000").unwrap();
        let params = NonAdaptiveParams::new(0.3, 1.0 / 3.0).unwrap();
        let mut accepted = 0;
        let mut rejected = 0;
        for t in 0..20 {
            let mut o = SimulatedOracle::new(u.clone(), t);
            accepted += test_near_uniformity_nonadaptive(&mut o, &u, &params, &mut rng::seeded(t))
                .unwrap()
                .is_accept() as usize;
            let mut o = SimulatedOracle::new(h.clone(), t);
            rejected += !test_near_uniformity_nonadaptive(&mut o, &u, &params, &mut rng::seeded(t))
                .unwrap()
                .is_accept() as usize;
        }
        assert!(accepted >= 14 && rejected >= 14, "{accepted} {rejected}");
    }

    #[test]
    fn collision_path_rejects_heavy_sets() {
        // Shrinking the collision sets makes the loop run at n = 1000. Sets of
        // size 64..1024 against ~3e4 samples collide under any distribution,
        // so only soundness is meaningful here.
        let u = Distribution::uniform(1000);
        let h = fixture::parse("halfheavy:1000").unwrap();
        let params = NonAdaptiveParams::new(0.3, 1.0 / 3.0).unwrap().with_set_scale(1e-9);
        let mut o = SimulatedOracle::new(h, 1);
        let v = test_near_uniformity_nonadaptive(&mut o, &u, &params, &mut rng::seeded(1)).unwrap();
        assert_eq!(v.decision, Decision::Reject);
        assert!(matches!(v.trace[0], TraceEvent::Collision { collided: true, .. }));
        assert!(!v.account.classes().contains(&crate::oracle::SetClass::FullDomain));
    }

    #[test]
    fn precondition_is_checked() {
        let skew = fixture::parse("zipf:100:1").unwrap();
        let p = NonAdaptiveParams::new(0.3, 1.0 / 3.0).unwrap();
        let mut o = SimulatedOracle::new(skew.clone(), 0);
        assert!(matches!(
            test_near_uniformity_nonadaptive(&mut o, &skew, &p, &mut rng::seeded(0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn identity_declares_everything_first() {
        let known = fixture::parse("zipf:32:1").unwrap();
        let p = NonAdaptiveParams::new(0.5, 1.0 / 3.0).unwrap();
        let plan = plan_identity(&known, &p, &mut rng::seeded(1)).unwrap();
        assert!(plan.tested_buckets() <= max_tested_buckets(32, 0.5));
        let mut o = LoggingOracle::new(SimulatedOracle::new(known.clone(), 2));
        let v = test_identity_nonadaptive(&mut o, &known, &p, &mut rng::seeded(1)).unwrap();
        let declared: HashSet<Vec<usize>> = plan.sets().into_iter().collect();
        assert!(o.log().iter().all(|(s, _)| declared.contains(s)));
        assert!(v.account.reconciles());
    }

    #[test]
    fn identity_statistics() {
        let known = fixture::parse("zipf:32:1").unwrap();
        let point = fixture::parse("pointmass:32:1").unwrap();
        let u = Distribution::uniform(32);
        let p = NonAdaptiveParams::new(0.5, 1.0 / 3.0).unwrap();
        let mut acc = 0;
        let mut rej = 0;
        for t in 0..20 {
            let mut o = SimulatedOracle::new(known.clone(), t);
            acc += test_identity_nonadaptive(&mut o, &known, &p, &mut rng::seeded(t))
                .unwrap()
                .is_accept() as usize;
            let mut o = SimulatedOracle::new(u.clone(), t);
            rej += !test_identity_nonadaptive(&mut o, &point, &p, &mut rng::seeded(t))
                .unwrap()
                .is_accept() as usize;
        }
        assert!(acc >= 16 && rej >= 16, "{acc} {rej}");
    }
}
