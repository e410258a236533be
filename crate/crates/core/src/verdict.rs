use serde::{Deserialize, Serialize};

use crate::oracle::SampleAccount;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn from_accept(accept: bool) -> Self {
        if accept {
            Decision::Accept
        } else {
            Decision::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
        }
    }
}

/// One step of a tester run, kept for auditing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Empirical comparison on a whole (sub)domain.
    BruteForce {
        depth: usize,
        domain: usize,
        samples: u64,
        distance: f64,
        observed: f64,
        accept: bool,
    },
    /// Bucketing of the known distribution at one recursion level.
    Bucketed {
        depth: usize,
        domain: usize,
        buckets: usize,
        hit: Vec<usize>,
    },
    /// A sampled bucket on which the known distribution has no mass.
    EmptyBucketHit { depth: usize, bucket: usize },
    /// Sub-test on a single bucket.
    BucketTest {
        depth: usize,
        bucket: usize,
        size: usize,
        accept: bool,
    },
    /// Descent into the coarsened instance.
    Recurse { depth: usize, domain: usize },
    /// Collision check on one planned set.
    Collision {
        set_size: usize,
        samples: u64,
        collided: bool,
    },
    /// Majority vote over repeated runs.
    Majority { runs: usize, accepts: usize },
}

/// The outcome of a test together with the queries it cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub account: SampleAccount,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEvent>,
}

impl Verdict {
    pub fn new(decision: Decision, account: SampleAccount) -> Self {
        Self {
            decision,
            account,
            trace: Vec::new(),
        }
    }

    pub fn with_trace(mut self, trace: Vec<TraceEvent>) -> Self {
        self.trace = trace;
        self
    }

    pub fn is_accept(&self) -> bool {
        self.decision.is_accept()
    }
}
