//! Wait/go decision rules.
//!
//! Waiting costs `proc_t` for sure; going saves it unless an event occurs,
//! in which case the turn-back penalty is paid instead. The learning and
//! oracle policies pick the decision with the larger expected time saved and
//! differ only in where the event probability comes from.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decision {
    Wait = 0,
    Go = 1,
}

impl Decision {
    pub fn as_bit(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionInputs {
    /// Estimated event probability; `None` when nothing is known yet.
    pub p_hat: Option<f64>,
    /// Turn-back penalty for the outgoing leg, s.
    pub penalty: f64,
    pub proc_t: f64,
}

/// Expected time saved by choosing `c`: waiting avoids `p * penalty`, going
/// gains `(1 - p) * proc_t`.
pub fn expected_saving(c: Decision, p: f64, penalty: f64, proc_t: f64) -> f64 {
    match c {
        Decision::Wait => p * penalty,
        Decision::Go => (1.0 - p) * proc_t,
    }
}

/// Argmax of [`expected_saving`]; ties go to waiting.
pub fn best_decision(p: f64, penalty: f64, proc_t: f64) -> Decision {
    if expected_saving(Decision::Go, p, penalty, proc_t) > expected_saving(Decision::Wait, p, penalty, proc_t) {
        Decision::Go
    } else {
        Decision::Wait
    }
}

/// Probability at which both decisions save the same expected time.
pub fn indifference_probability(penalty: f64, proc_t: f64) -> f64 {
    proc_t / (proc_t + penalty)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Learn,
    Wait,
    Go,
    Random,
    Oracle,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] =
        [PolicyKind::Learn, PolicyKind::Wait, PolicyKind::Go, PolicyKind::Random, PolicyKind::Oracle];

    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::Learn => "learn",
            PolicyKind::Wait => "wait",
            PolicyKind::Go => "go",
            PolicyKind::Random => "random",
            PolicyKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "learn" => Ok(PolicyKind::Learn),
            "wait" => Ok(PolicyKind::Wait),
            "go" => Ok(PolicyKind::Go),
            "random" => Ok(PolicyKind::Random),
            "oracle" => Ok(PolicyKind::Oracle),
            other => Err(Error::Config(format!("unknown policy '{other}' (expected learn, wait, go, random, oracle)"))),
        }
    }
}

/// A decision maker. The random policy owns its coin, seeded independently
/// of any event trace, so it must not be shared across threads while deciding.
#[derive(Debug, Clone)]
pub enum Policy {
    Learn,
    Wait,
    Go,
    Random(Box<ChaCha8Rng>),
    Oracle,
}

impl Policy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        match kind {
            PolicyKind::Learn => Policy::Learn,
            PolicyKind::Wait => Policy::Wait,
            PolicyKind::Go => Policy::Go,
            PolicyKind::Random => Policy::Random(Box::new(ChaCha8Rng::seed_from_u64(seed))),
            PolicyKind::Oracle => Policy::Oracle,
        }
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            Policy::Learn => PolicyKind::Learn,
            Policy::Wait => PolicyKind::Wait,
            Policy::Go => PolicyKind::Go,
            Policy::Random(_) => PolicyKind::Random,
            Policy::Oracle => PolicyKind::Oracle,
        }
    }

    /// Whether the policy consults an event probability.
    pub fn needs_probability(&self) -> bool {
        matches!(self, Policy::Learn | Policy::Oracle)
    }

    pub fn decide(&mut self, inputs: &DecisionInputs) -> Decision {
        match self {
            Policy::Wait => Decision::Wait,
            Policy::Go => Decision::Go,
            Policy::Random(rng) => {
                if rng.random_bool(0.5) {
                    Decision::Go
                } else {
                    Decision::Wait
                }
            }
            Policy::Learn | Policy::Oracle => match inputs.p_hat {
                Some(p) => best_decision(p, inputs.penalty, inputs.proc_t),
                None => Decision::Wait,
            },
        }
    }
}
