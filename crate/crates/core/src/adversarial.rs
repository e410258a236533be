//! Hard instances: U-distributions and the even/odd uniblock ensembles, and
//! the reduction from bit strings to distributions together with its
//! rejection sampler.
//!
//! A string `x` of length `n/2` is extended to the balanced string
//! `b(x) = x · complement(x)`, and a balanced `y` of length `n` defines
//! `mu_y(i) = 1/(2n)` where `y_i = 0` and `3/(2n)` where `y_i = 1`. A
//! conditional sample of `mu_y` on `Q` can be produced by probing bits of `y`
//! only, which is what [`ReductionOracle`] does.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::oracle::{validate_set, CondOracle, SampleAccount, SetClassifier};
use crate::rng::Stream;

/// Uniform over `set`, zero elsewhere.
pub fn u_distribution(set: &[usize], n: usize) -> Result<Distribution> {
    Distribution::uniform_on(n, set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// `|U| = 4^k`.
    Even,
    /// `|U| = 2·4^k`.
    Odd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniblockDraw {
    pub k: usize,
    pub parity: Parity,
    /// The support `U`, sorted.
    pub set: Vec<usize>,
    pub dist: Distribution,
}

impl UniblockDraw {
    /// TV distance to uniform, `1 - |U|/n`.
    pub fn distance_to_uniform(&self) -> f64 {
        1.0 - self.set.len() as f64 / self.dist.len() as f64
    }
}

/// The range `ceil(log2(n)/8) ..= floor(3 log2(n)/8)` of block exponents.
pub fn uniblock_k_range(n: usize) -> Result<(usize, usize)> {
    if !n.is_power_of_two() {
        return Err(Error::precondition(format!("uniblock needs a power-of-two n, got {n}")));
    }
    let log = n.trailing_zeros() as usize;
    if log < 8 {
        return Err(Error::precondition(format!("uniblock needs log2 n >= 8, got n = {n}")));
    }
    Ok((log.div_ceil(8), 3 * log / 8))
}

/// Support size for block exponent `k`.
pub fn uniblock_size(k: usize, parity: Parity) -> usize {
    match parity {
        Parity::Even => 1 << (2 * k),
        Parity::Odd => 1 << (2 * k + 1),
    }
}

/// Draw `k` uniformly from its range, then `U` uniformly among subsets of
/// the prescribed size.
pub fn gen_uniblock<R: Rng + ?Sized>(n: usize, parity: Parity, rng: &mut R) -> Result<UniblockDraw> {
    let (lo, hi) = uniblock_k_range(n)?;
    let k = rng.random_range(lo..=hi);
    uniblock_with_k(n, k, parity, rng)
}

/// A uniblock draw with the block exponent fixed.
pub fn uniblock_with_k<R: Rng + ?Sized>(n: usize, k: usize, parity: Parity, rng: &mut R) -> Result<UniblockDraw> {
    let size = uniblock_size(k, parity);
    if size > n {
        return Err(Error::precondition(format!("support {size} exceeds domain {n}")));
    }
    let mut set = index::sample(rng, n, size).into_vec();
    set.sort_unstable();
    let dist = u_distribution(&set, n)?;
    Ok(UniblockDraw { k, parity, set, dist })
}

/// `x` followed by its bitwise complement.
pub fn balanced_extend(x: &[bool]) -> Vec<bool> {
    x.iter().copied().chain(x.iter().map(|b| !b)).collect()
}

pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    assert_eq!(a.len(), b.len(), "hamming distance needs equal lengths");
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Parse a string of `0`/`1` characters; whitespace is ignored.
pub fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::precondition(format!(
                "bit strings hold 0 and 1 only, found `{other}`"
            ))),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn check_balanced(y: &[bool]) -> Result<()> {
    let ones = y.iter().filter(|&&b| b).count();
    if y.is_empty() || 2 * ones != y.len() {
        return Err(Error::InvalidDistribution(format!(
            "string of length {} with {ones} ones is not balanced",
            y.len()
        )));
    }
    Ok(())
}

/// `mu_y` for a balanced string `y`.
pub fn string_distribution(y: &[bool]) -> Result<Distribution> {
    check_balanced(y)?;
    let n = y.len() as f64;
    Distribution::new(y.iter().map(|&b| if b { 3.0 } else { 1.0 } / (2.0 * n)).collect())
}

/// Oracle for `mu_y` that only reads `y` one bit at a time.
///
/// Each emission repeats rounds of: pick `i` in `Q` uniformly, probe `y_i`;
/// output `i` if the bit is 1, output it with probability 1/3 if the bit is 0,
/// otherwise retry. Every probe counts against the optional budget.
#[derive(Debug)]
pub struct ReductionOracle {
    y: Vec<bool>,
    rng: Stream,
    bit_queries: u64,
    emissions: u64,
    budget: Option<u64>,
    account: SampleAccount,
    classifier: SetClassifier,
}

impl ReductionOracle {
    /// Oracle for the balanced string `y`.
    pub fn new(y: Vec<bool>, rng: Stream) -> Result<Self> {
        check_balanced(&y)?;
        let classifier = SetClassifier::new(y.len());
        Ok(Self {
            y,
            rng,
            bit_queries: 0,
            emissions: 0,
            budget: None,
            account: SampleAccount::default(),
            classifier,
        })
    }

    /// Oracle for `b(x)`.
    pub fn for_string(x: &[bool], rng: Stream) -> Result<Self> {
        Self::new(balanced_extend(x), rng)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn bit_queries(&self) -> u64 {
        self.bit_queries
    }

    pub fn emissions(&self) -> u64 {
        self.emissions
    }

    pub fn string(&self) -> &[bool] {
        &self.y
    }

    fn probe(&mut self, i: usize) -> Result<bool> {
        if let Some(b) = self.budget {
            if self.bit_queries >= b {
                return Err(Error::ReductionFailed(b));
            }
        }
        self.bit_queries += 1;
        Ok(self.y[i])
    }

    /// One element of `q`, distributed as `mu_y` conditioned on `q`.
    pub fn sample(&mut self, q: &[usize]) -> Result<usize> {
        validate_set(q, self.y.len())?;
        loop {
            let i = q[self.rng.random_range(0..q.len())];
            if self.probe(i)? || self.rng.random_bool(1.0 / 3.0) {
                self.emissions += 1;
                return Ok(i);
            }
        }
    }
}

impl CondOracle for ReductionOracle {
    fn domain_size(&self) -> usize {
        self.y.len()
    }

    fn draw(&mut self, set: &[usize]) -> Result<usize> {
        let i = self.sample(set)?;
        let class = self.classifier.classify(set);
        self.account.record(class, set.len(), 1);
        Ok(i)
    }

    fn account(&self) -> &SampleAccount {
        &self.account
    }
}
