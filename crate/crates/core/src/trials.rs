//! Seeded trial batches.
//!
//! A [`BatchConfig`] names an algorithm, the distributions involved and the
//! parameters; [`run_batch`] runs the trials (in parallel if asked) and returns
//! one [`TrialRecord`] per trial plus a [`BatchSummary`]. Trial `t` draws all
//! of its coins from `substream(seed, t)`, so the output does not depend on
//! the number of worker threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::adaptive::{
    identity_primitive, test_identity_adaptive, test_near_uniformity, AdaptiveParams, PrimitiveMode,
};
use crate::adversarial::{balanced_extend, parse_bits, string_distribution, ReductionOracle};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::fixture;
use crate::learner::{
    even_uniblock_distance, learn_distribution, min_permutation_tv, test_identity_up_to_relabeling,
    test_label_invariant, uniformity_distance, LabelInvariantParams, LearnParams,
};
use crate::nonadaptive::{test_identity_nonadaptive, test_near_uniformity_nonadaptive, NonAdaptiveParams};
use crate::oracle::{SampleAccount, SetClass, SimulatedOracle};
use crate::rng::{fork, substream, Stream};
use crate::verdict::{Decision, Verdict};

/// z-score of a two-sided 95% interval.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    TestUniformity,
    TestIdentity,
    TestIdentityNonadaptive,
    TestUniformityNonadaptive,
    Learn,
    TestLabelInvariant,
    CompareUnknown,
    ReduceString,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::TestUniformity,
        Algorithm::TestIdentity,
        Algorithm::TestIdentityNonadaptive,
        Algorithm::TestUniformityNonadaptive,
        Algorithm::Learn,
        Algorithm::TestLabelInvariant,
        Algorithm::CompareUnknown,
        Algorithm::ReduceString,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::TestUniformity => "test-uniformity",
            Algorithm::TestIdentity => "test-identity",
            Algorithm::TestIdentityNonadaptive => "test-identity-nonadaptive",
            Algorithm::TestUniformityNonadaptive => "test-uniformity-nonadaptive",
            Algorithm::Learn => "learn",
            Algorithm::TestLabelInvariant => "test-label-invariant",
            Algorithm::CompareUnknown => "compare-unknown",
            Algorithm::ReduceString => "reduce-string",
        }
    }

    /// Whether trials end in accept/reject (the learner does not).
    pub fn decides(self) -> bool {
        self != Algorithm::Learn
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::precondition(format!("unknown algorithm `{s}`")))
    }
}

/// Built-in label-invariant properties for `test-label-invariant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// Being the uniform distribution.
    Uniform,
    /// Being uniform on a support of size `4^k`.
    EvenUniblock,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::Uniform => "uniform",
            Property::EvenUniblock => "even-uniblock",
        }
    }

    pub fn distance(self, d: &Distribution) -> f64 {
        match self {
            Property::Uniform => uniformity_distance(d),
            Property::EvenUniblock => even_uniblock_distance(d),
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Property::Uniform),
            "even-uniblock" => Ok(Property::EvenUniblock),
            _ => Err(Error::precondition(format!("unknown property `{s}`"))),
        }
    }
}

/// Everything a batch needs. Distribution fields hold spec strings (see
/// [`fixture`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub algorithm: Algorithm,
    pub n: Option<usize>,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub scale: f64,
    /// The unknown distribution.
    pub dist: Option<String>,
    /// The known distribution; for `compare-unknown`, the second unknown one.
    pub known: Option<String>,
    /// Learner runs report `min_perm_tv` against this (default: `dist`).
    pub reference: Option<String>,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub mode: PrimitiveMode,
    /// Record wall-clock time per trial. Off by default since it breaks
    /// byte-identical output.
    pub timing: bool,
    /// Learner: multiplier on the ratio estimator's per-node sample count.
    pub estimator_scale: f64,
    /// Non-adaptive: multiplier on the smallest collision-set size.
    pub set_scale: f64,
    pub property: Property,
    /// Label-invariant: accept distributions `eps/2`-close as well.
    pub tolerant: bool,
    /// Reduction: the string `x` (default: random of length `n/2` per trial).
    pub bits: Option<String>,
    /// Reduction: cap on bit queries per trial.
    pub budget: Option<u64>,
}

impl BatchConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            n: None,
            epsilon: 0.3,
            delta: 1.0 / 3.0,
            trials: 1,
            seed: 0,
            scale: 1.0,
            dist: None,
            known: None,
            reference: None,
            jobs: 1,
            mode: PrimitiveMode::Empirical,
            timing: false,
            estimator_scale: 1.0,
            set_scale: 1.0,
            property: Property::Uniform,
            tolerant: false,
            bits: None,
            budget: None,
        }
    }
}

/// Result of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub algorithm: Algorithm,
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub scale: f64,
    /// Master seed; the trial's coins come from `substream(seed, trial)`.
    pub seed: u64,
    pub verdict: Option<Decision>,
    pub samples_total: u64,
    pub samples_by_class: BTreeMap<SetClass, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub extra: Map<String, Value>,
}

/// Aggregate over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub summary: bool,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub errors: usize,
    pub accepts: usize,
    /// Accepts over trials that finished; absent for the learner.
    pub accept_fraction: Option<f64>,
    pub accept_ci95: Option<(f64, f64)>,
    pub mean_samples: f64,
    pub mean_samples_by_class: BTreeMap<SetClass, f64>,
}

impl fmt::Display for BatchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} trials", self.algorithm, self.trials)?;
        if self.errors > 0 {
            write!(f, ", {} errored", self.errors)?;
        }
        if let (Some(p), Some((lo, hi))) = (self.accept_fraction, self.accept_ci95) {
            write!(f, ", accepted {} ({p:.3}, 95% CI [{lo:.3}, {hi:.3}])", self.accepts)?;
        }
        write!(f, ", mean samples {:.1}", self.mean_samples)
    }
}

/// Records of a finished batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub records: Vec<TrialRecord>,
    pub summary: BatchSummary,
}

impl Batch {
    /// One JSON object per line: the trials in order, then the summary.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary).expect("summary serializes"));
        out.push('\n');
        out
    }
}

/// Wilson score interval for `successes` out of `trials` at z-score `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Inputs resolved once per batch.
struct Prepared {
    n: usize,
    dist: Option<Distribution>,
    known: Option<Distribution>,
    reference: Option<Distribution>,
    bits: Option<Vec<bool>>,
}

fn required(what: &str, spec: &Option<String>, n: Option<usize>) -> Result<Distribution> {
    let spec = spec
        .as_deref()
        .ok_or_else(|| Error::precondition(format!("--{what} is required")))?;
    fixture::parse_with_n(spec, n)
}

fn optional(spec: &Option<String>, n: Option<usize>) -> Result<Option<Distribution>> {
    spec.as_deref().map(|s| fixture::parse_with_n(s, n)).transpose()
}

fn check_config(c: &BatchConfig) -> Result<()> {
    crate::adaptive::check_unit("epsilon", c.epsilon)?;
    crate::adaptive::check_unit("delta", c.delta)?;
    for (name, x) in [
        ("scale", c.scale),
        ("estimator scale", c.estimator_scale),
        ("set scale", c.set_scale),
    ] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::precondition(format!("{name} must be positive, got {x}")));
        }
    }
    if c.trials == 0 {
        return Err(Error::precondition("at least one trial is needed"));
    }
    Ok(())
}

fn prepare(c: &BatchConfig) -> Result<Prepared> {
    check_config(c)?;
    if c.algorithm == Algorithm::ReduceString {
        let bits = c.bits.as_deref().map(parse_bits).transpose()?;
        let n = match (&bits, c.n) {
            (Some(x), Some(n)) if 2 * x.len() != n => {
                return Err(Error::precondition(format!(
                    "--bits has length {} but n = {n}",
                    x.len()
                )));
            }
            (Some(x), _) => 2 * x.len(),
            (None, Some(n)) => n,
            (None, None) => return Err(Error::precondition("--n or --bits is required")),
        };
        if n < 2 || n % 2 != 0 {
            return Err(Error::precondition(format!(
                "the reduction needs an even n >= 2, got {n}"
            )));
        }
        if bits.as_ref().is_some_and(|x| x.is_empty()) {
            return Err(Error::precondition("--bits is empty"));
        }
        return Ok(Prepared {
            n,
            dist: None,
            known: optional(&c.known, Some(n))?,
            reference: None,
            bits,
        });
    }
    let dist = required("dist", &c.dist, c.n)?;
    let n = dist.len();
    let known = match c.algorithm {
        Algorithm::TestIdentity | Algorithm::TestIdentityNonadaptive | Algorithm::CompareUnknown => {
            Some(required("known", &c.known, Some(n))?)
        }
        _ => optional(&c.known, Some(n))?,
    };
    Ok(Prepared {
        n,
        dist: Some(dist),
        known,
        reference: optional(&c.reference, Some(n))?,
        bits: None,
    })
}

/// Run every trial of `config`. Configuration errors (bad specs, parameters
/// out of range) fail the whole batch; errors inside a trial are reported in
/// that trial's record.
pub fn run_batch(config: &BatchConfig) -> Result<Batch> {
    let prep = prepare(config)?;
    let run = |t: usize| run_trial(config, &prep, t);
    let records: Vec<TrialRecord> = if config.jobs == 1 {
        (0..config.trials).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::precondition(e.to_string()))?;
        pool.install(|| (0..config.trials).into_par_iter().map(run).collect())
    };
    let summary = summarize(config.algorithm, &records);
    Ok(Batch { records, summary })
}

fn summarize(algorithm: Algorithm, records: &[TrialRecord]) -> BatchSummary {
    let done: Vec<&TrialRecord> = records.iter().filter(|r| r.error.is_none()).collect();
    let accepts = done.iter().filter(|r| r.verdict == Some(Decision::Accept)).count();
    let (accept_fraction, accept_ci95) = if algorithm.decides() && !done.is_empty() {
        (
            Some(accepts as f64 / done.len() as f64),
            Some(wilson_interval(accepts, done.len(), Z95)),
        )
    } else {
        (None, None)
    };
    let count = done.len().max(1) as f64;
    let mut by_class = BTreeMap::new();
    for r in &done {
        for (&k, &v) in &r.samples_by_class {
            *by_class.entry(k).or_insert(0.0) += v as f64 / count;
        }
    }
    BatchSummary {
        summary: true,
        algorithm,
        trials: records.len(),
        errors: records.len() - done.len(),
        accepts,
        accept_fraction,
        accept_ci95,
        mean_samples: done.iter().map(|r| r.samples_total).sum::<u64>() as f64 / count,
        mean_samples_by_class: by_class,
    }
}

struct Outcome {
    verdict: Option<Decision>,
    account: SampleAccount,
    extra: Map<String, Value>,
}

impl Outcome {
    fn from_verdict(v: Verdict) -> Self {
        Self {
            verdict: Some(v.decision),
            account: v.account,
            extra: Map::new(),
        }
    }
}

fn run_trial(c: &BatchConfig, prep: &Prepared, trial: usize) -> TrialRecord {
    let start = Instant::now();
    let mut rng = substream(c.seed, trial as u64);
    let outcome = execute(c, prep, &mut rng);
    let wall_ms = c.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let mut record = TrialRecord {
        trial,
        algorithm: c.algorithm,
        n: prep.n,
        epsilon: c.epsilon,
        delta: c.delta,
        scale: c.scale,
        seed: c.seed,
        verdict: None,
        samples_total: 0,
        samples_by_class: BTreeMap::new(),
        wall_ms,
        error: None,
        extra: Map::new(),
    };
    match outcome {
        Ok(o) => {
            record.verdict = o.verdict;
            record.samples_total = o.account.total;
            record.samples_by_class = o.account.by_class;
            record.extra = o.extra;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

fn execute(c: &BatchConfig, prep: &Prepared, rng: &mut Stream) -> Result<Outcome> {
    let n = prep.n;
    let oracle = |rng: &mut Stream| -> Result<SimulatedOracle> {
        let d = prep
            .dist
            .clone()
            .ok_or_else(|| Error::precondition("no distribution"))?;
        Ok(SimulatedOracle::with_stream(d, fork(rng)))
    };
    let known = || prep.known.clone().unwrap_or_else(|| Distribution::uniform(n));
    let adaptive = || AdaptiveParams::new(c.epsilon, c.delta).map(|p| p.with_scale(c.scale).with_mode(c.mode));
    let nonadaptive = || {
        NonAdaptiveParams::new(c.epsilon, c.delta)
            .map(|p| p.with_scale(c.scale).with_set_scale(c.set_scale).with_mode(c.mode))
    };
    let learn =
        || LearnParams::new(c.epsilon, c.delta).map(|p| p.with_scale(c.scale).with_estimator_scale(c.estimator_scale));

    match c.algorithm {
        Algorithm::TestUniformity => {
            let mut o = oracle(rng)?;
            let v = test_near_uniformity(&mut o, &Distribution::uniform(n), &adaptive()?, &mut fork(rng))?;
            Ok(Outcome::from_verdict(v))
        }
        Algorithm::TestIdentity => {
            let mut o = oracle(rng)?;
            let v = test_identity_adaptive(&mut o, &known(), &adaptive()?, &mut fork(rng))?;
            Ok(Outcome::from_verdict(v))
        }
        Algorithm::TestUniformityNonadaptive => {
            let mut o = oracle(rng)?;
            let v =
                test_near_uniformity_nonadaptive(&mut o, &Distribution::uniform(n), &nonadaptive()?, &mut fork(rng))?;
            Ok(Outcome::from_verdict(v))
        }
        Algorithm::TestIdentityNonadaptive => {
            let mut o = oracle(rng)?;
            let v = test_identity_nonadaptive(&mut o, &known(), &nonadaptive()?, &mut fork(rng))?;
            Ok(Outcome::from_verdict(v))
        }
        Algorithm::Learn => {
            let o = oracle(rng)?;
            let r = learn_distribution(o, &learn()?, &mut fork(rng))?;
            let reference = prep.reference.as_ref().or(prep.dist.as_ref()).expect("dist is set");
            let mut extra = Map::new();
            extra.insert("min_perm_tv".into(), json!(min_permutation_tv(&r.dist, reference)?));
            extra.insert("samples".into(), json!(r.samples));
            extra.insert("sentinels".into(), json!(r.sentinels));
            extra.insert("fallback".into(), json!(r.fallback));
            Ok(Outcome {
                verdict: None,
                account: r.account,
                extra,
            })
        }
        Algorithm::TestLabelInvariant => {
            let o = oracle(rng)?;
            let params = if c.tolerant {
                LabelInvariantParams::tolerant(learn()?)
            } else {
                LabelInvariantParams::new(learn()?)
            };
            let property = c.property;
            let (v, r) = test_label_invariant(o, move |d| property.distance(d), &params, &mut fork(rng))?;
            let mut out = Outcome::from_verdict(v);
            out.extra.insert("property".into(), json!(property.as_str()));
            out.extra
                .insert("learned_distance".into(), json!(property.distance(&r.dist)));
            Ok(out)
        }
        Algorithm::CompareUnknown => {
            let a = oracle(rng)?;
            let b = SimulatedOracle::with_stream(known(), fork(rng));
            let (v, gap) = test_identity_up_to_relabeling(a, b, &learn()?, &mut fork(rng))?;
            let mut out = Outcome::from_verdict(v);
            out.extra.insert("learned_gap".into(), json!(gap));
            Ok(out)
        }
        Algorithm::ReduceString => {
            let x = match &prep.bits {
                Some(x) => x.clone(),
                None => (0..n / 2).map(|_| rng.random_bool(0.5)).collect(),
            };
            let y = balanced_extend(&x);
            let known = match &prep.known {
                Some(k) => k.clone(),
                None => string_distribution(&y)?,
            };
            let mut o = ReductionOracle::new(y, fork(rng))?;
            if let Some(b) = c.budget {
                o = o.with_budget(b);
            }
            let v = identity_primitive(&mut o, &known, c.epsilon, c.delta, c.mode, c.scale)?;
            let mut out = Outcome::from_verdict(v);
            let (q, e) = (o.bit_queries(), o.emissions());
            out.extra.insert("bit_queries".into(), json!(q));
            out.extra.insert("emissions".into(), json!(e));
            out.extra
                .insert("queries_per_emission".into(), json!(q as f64 / e.max(1) as f64));
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(algorithm: Algorithm, dist: &str) -> BatchConfig {
        BatchConfig {
            dist: Some(dist.into()),
            trials: 6,
            seed: 11,
            ..BatchConfig::new(algorithm)
        }
    }

    #[test]
    fn wilson_reference_values() {
        // Closed-form check at p = 1/2: centre stays 1/2.
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        // Textbook value: 8 of 10 at 95% gives [0.4902, 0.9433].
        let (lo, hi) = wilson_interval(8, 10, Z95);
        assert!((lo - 0.4902).abs() < 1e-4 && (hi - 0.9433).abs() < 1e-4, "{lo} {hi}");
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        let (lo, hi) = wilson_interval(10, 10, Z95);
        assert!(hi > 1.0 - 1e-12 && (lo - 10.0 / (10.0 + Z95 * Z95)).abs() < 1e-12);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{a}\""));
        }
        assert!("nope".parse::<Algorithm>().is_err());
    }

    #[test]
    fn batches_are_deterministic_and_schedule_independent() {
        let mut c = config(Algorithm::TestUniformity, "uniform:200");
        let a = run_batch(&c).unwrap().to_jsonl();
        assert_eq!(a, run_batch(&c).unwrap().to_jsonl());
        c.jobs = 3;
        assert_eq!(a, run_batch(&c).unwrap().to_jsonl());
        c.seed = 12;
        assert_ne!(a, run_batch(&c).unwrap().to_jsonl());
        assert_eq!(a.lines().count(), 7);
    }

    #[test]
    fn records_round_trip() {
        let mut c = config(Algorithm::Learn, "zipf:16:1");
        c.scale = 1e-3;
        c.estimator_scale = 1e-6;
        c.epsilon = 0.6;
        c.trials = 2;
        c.timing = true;
        let batch = run_batch(&c).unwrap();
        for r in &batch.records {
            assert!(r.error.is_none(), "{:?}", r.error);
            assert!(r.extra.contains_key("min_perm_tv") && r.wall_ms.is_some());
            let back: TrialRecord = serde_json::from_str(&serde_json::to_string(r).unwrap()).unwrap();
            assert_eq!(&back, r);
        }
        let s = &batch.summary;
        let back: BatchSummary = serde_json::from_str(&serde_json::to_string(s).unwrap()).unwrap();
        assert_eq!(&back, s);
        assert!(s.accept_fraction.is_none());
    }

    #[test]
    fn config_errors_fail_the_batch() {
        assert!(run_batch(&config(Algorithm::TestUniformity, "nope:3")).is_err());
        assert!(run_batch(&BatchConfig::new(Algorithm::TestUniformity)).is_err());
        let c = config(Algorithm::TestIdentity, "uniform:8");
        assert!(run_batch(&c).is_err(), "missing --known");
        let mut c = config(Algorithm::TestUniformity, "uniform:8");
        c.epsilon = 1.5;
        assert!(run_batch(&c).is_err());
    }

    #[test]
    fn trial_errors_are_recorded() {
        // The reduction runs out of bit queries.
        let mut c = BatchConfig::new(Algorithm::ReduceString);
        c.n = Some(8);
        c.budget = Some(3);
        c.trials = 2;
        let batch = run_batch(&c).unwrap();
        assert_eq!(batch.summary.errors, 2);
        assert!(batch.records[0].error.as_deref().unwrap().contains("budget"));
    }

    #[test]
    fn reduction_reports_query_rate() {
        let mut c = BatchConfig::new(Algorithm::ReduceString);
        c.bits = Some("0110".into());
        c.trials = 2;
        c.scale = 0.05;
        let batch = run_batch(&c).unwrap();
        for r in &batch.records {
            assert_eq!(r.n, 8);
            let q = r.extra["queries_per_emission"].as_f64().unwrap();
            assert!(q > 1.0 && q < 3.0, "{q}");
            assert_eq!(r.extra["emissions"].as_u64().unwrap(), r.samples_total);
        }
    }

    #[test]
    fn nonadaptive_costs_more_than_adaptive() {
        let a = run_batch(&config(Algorithm::TestUniformity, "uniform:1000")).unwrap();
        let b = run_batch(&config(Algorithm::TestUniformityNonadaptive, "uniform:1000")).unwrap();
        assert!(b.summary.mean_samples > a.summary.mean_samples);
        for r in &a.records {
            assert!(r
                .samples_by_class
                .keys()
                .all(|k| matches!(k, SetClass::FullDomain | SetClass::ConstantSize)));
        }
    }
}
