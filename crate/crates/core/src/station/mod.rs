//! Station-side algorithms as state machines driven by channel feedback.
//!
//! Every station runs the same code on its own copy of the shared state
//! (estimate, counters, revealed forest). Since all active stations hear the
//! same feedback, those copies stay identical; [`Simulation`] can check this
//! after every step.

mod algorithm;
mod det_adversarial;
mod det_general;
mod det_simple;
mod oblivious;
mod rand_simple;
mod rand_weighted;
mod resolve;
mod sim;

pub use algorithm::{designate_forest, run_algorithm, AlgorithmName, RunOptions, RunOutcome};
pub use det_adversarial::DetAdversarialStation;
pub use det_general::DetGeneralStation;
pub use det_simple::DetSimpleStation;
pub use oblivious::{oblivious_roundrobin, run_oblivious, EdgeQueries, ObliviousSchedule, ObliviousStation, Query, RoundRobin};
pub use rand_simple::RandSimpleStation;
pub use rand_weighted::{RandWeightedGeneralStation, RandWeightedStation};
pub use resolve::{resolve, ResolveOutcome, Resolver};
pub use sim::{ContentionSample, Simulation};

use std::hash::{Hash, Hasher};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{Feedback, Message, Step};
use crate::error::Result;
use crate::graph::{Edge, ForestTracker, StationId};
use crate::seed::mix;
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeStatus {
    Waiting,
    Revealed,
    Cycle,
}

/// What a station knows at the end of an execution.
#[derive(Clone, Debug, PartialEq)]
pub enum StationOutput<W> {
    /// The revealed edges, which already form a forest.
    Revealed(Vec<Edge>),
    /// Every input edge was heard; the forest is designated by rule.
    AllEdges(Vec<(Edge, Option<W>)>),
}

/// Reported before a step in which waiting stations broadcast with probability `1/a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Contention {
    pub exponent: u32,
    /// Whether this station takes part in the random experiment.
    pub contending: bool,
}

pub trait Station: Clone + Send {
    type W: Weight;

    fn id(&self) -> StationId;

    fn edge(&self) -> Edge;

    /// Called once, at the step the station becomes active.
    fn activate(&mut self, _step: Step) {}

    /// The message this station broadcasts at `step`, if any.
    fn decide(&mut self, step: Step) -> Option<Message<Self::W>>;

    /// Consumes the feedback of `step`.
    fn observe(&mut self, step: Step, feedback: &Feedback<Self::W>) -> Result<()>;

    fn halted(&self) -> bool;

    fn status(&self) -> Option<EdgeStatus> {
        None
    }

    fn output(&self) -> Option<StationOutput<Self::W>>;

    /// This station's copy of the revealed forest, if it keeps one.
    fn forest(&self) -> Option<&[Edge]> {
        None
    }

    /// Digest of the state every synchronized station must agree on.
    fn shared_digest(&self) -> Option<u64> {
        None
    }

    fn contention(&self) -> Option<Contention> {
        None
    }
}

/// Per-station random stream, independent of how many other stations exist.
pub fn station_rng(seed: u64, id: StationId) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, id as u64))
}

/// The estimate `a`, kept as an exact power of three.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Estimate {
    exponent: u32,
}

impl Estimate {
    /// Exponents above this make `1/a` smaller than `2^-63`; such trials always fail.
    const MAX_SAMPLED_EXPONENT: u32 = 39;

    pub fn one() -> Self {
        Estimate { exponent: 0 }
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `a` as a float, for reporting.
    pub fn value(&self) -> f64 {
        3f64.powi(self.exponent as i32)
    }

    /// Collision: `a := 3a`.
    pub fn triple(&mut self) {
        self.exponent += 1;
    }

    /// Silence: `a := max(a/3, 1)`.
    pub fn third(&mut self) {
        self.exponent = self.exponent.saturating_sub(1);
    }

    /// A Bernoulli trial with success probability exactly `1/a`.
    pub fn sample(&self, rng: &mut impl Rng) -> bool {
        if self.exponent > Self::MAX_SAMPLED_EXPONENT {
            return false;
        }
        rng.gen_range(0..3u64.pow(self.exponent)) == 0
    }
}

/// One station's view of its own edge against the revealed forest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct LocalForest {
    pub edge: Edge,
    pub status: EdgeStatus,
    pub tracker: ForestTracker,
}

impl LocalForest {
    pub fn new(n: u32, edge: Edge) -> Self {
        LocalForest { edge, status: EdgeStatus::Waiting, tracker: ForestTracker::new(n) }
    }

    pub fn is_waiting(&self) -> bool {
        self.status == EdgeStatus::Waiting
    }

    /// Moves `e` into the forest; it must be a waiting edge.
    pub fn reveal(&mut self, e: Edge) -> Result<()> {
        self.tracker.reveal(e)?;
        self.after_reveal(e);
        Ok(())
    }

    /// Like [`LocalForest::reveal`], but ignores edges already joined by the forest.
    /// Returns whether the forest grew.
    pub fn offer(&mut self, e: Edge) -> bool {
        if self.tracker.would_cycle(e) {
            return false;
        }
        self.tracker.reveal(e).expect("checked above");
        self.after_reveal(e);
        true
    }

    fn after_reveal(&mut self, e: Edge) {
        if e == self.edge {
            self.status = EdgeStatus::Revealed;
        } else if self.is_waiting() && self.tracker.would_cycle(self.edge) {
            self.status = EdgeStatus::Cycle;
        }
    }

    /// Replaces the forest by `revealed` and recomputes this edge's status.
    pub fn install(&mut self, revealed: &[Edge]) -> Result<()> {
        self.tracker = ForestTracker::from_revealed(self.tracker.n(), revealed)?;
        self.status = if revealed.contains(&self.edge) {
            EdgeStatus::Revealed
        } else if self.tracker.would_cycle(self.edge) {
            EdgeStatus::Cycle
        } else {
            EdgeStatus::Waiting
        };
        Ok(())
    }
}

pub(crate) fn digest(parts: impl Hash) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    parts.hash(&mut h);
    h.finish()
}
