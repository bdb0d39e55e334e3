use std::marker::PhantomData;

use super::{digest, EdgeStatus, LocalForest, ResolveOutcome, Resolver, Station, StationOutput};
use crate::channel::{Feedback, Message, Step};
use crate::error::{Error, Result};
use crate::graph::{edge_index, edge_universe, Edge, StationId};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Phase {
    Probe,
    Resolve(Resolver),
}

/// The deterministic probe-then-resolve loop, without an ID of its own.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct DetSimpleCore {
    local: LocalForest,
    rank: u64,
    universe: u64,
    phase: Phase,
    done: bool,
}

impl DetSimpleCore {
    pub fn new(n: u32, edge: Edge) -> Self {
        DetSimpleCore {
            local: LocalForest::new(n, edge),
            rank: edge_index(edge, n).expect("edge fits the vertex range"),
            universe: edge_universe(n),
            phase: Phase::Probe,
            done: false,
        }
    }

    pub fn decide<W>(&self) -> Option<Message<W>> {
        if self.done || !self.local.is_waiting() {
            return None;
        }
        match self.phase {
            Phase::Probe => Some(Message::Dummy),
            Phase::Resolve(r) => r.attempts(self.rank).then_some(Message::Edge(self.local.edge)),
        }
    }

    pub fn observe<W>(&mut self, feedback: &Feedback<W>) -> Result<()> {
        match &mut self.phase {
            Phase::Probe => {
                if feedback.is_silence() {
                    self.done = true;
                } else {
                    self.phase = Phase::Resolve(Resolver::new(self.universe));
                }
            }
            Phase::Resolve(r) => match r.advance(feedback.kind()) {
                ResolveOutcome::Pending => {}
                ResolveOutcome::Empty => self.phase = Phase::Probe,
                ResolveOutcome::Found => {
                    let e = feedback
                        .heard_edge()
                        .ok_or_else(|| Error::Invariant("resolution isolated a non-edge message".into()))?;
                    self.local.reveal(e)?;
                    self.phase = Phase::Probe;
                }
            },
        }
        Ok(())
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn edge(&self) -> Edge {
        self.local.edge
    }

    pub fn status(&self) -> EdgeStatus {
        self.local.status
    }

    pub fn revealed(&self) -> &[Edge] {
        self.local.tracker.revealed()
    }

    pub fn shared_digest(&self) -> u64 {
        digest((self.phase, self.done, self.local.tracker.fingerprint()))
    }
}

/// Repeats: waiting stations probe with a dummy; silence ends the run,
/// otherwise one waiting edge is isolated by binary search and revealed.
#[derive(Clone, Debug)]
pub struct DetSimpleStation<W> {
    id: StationId,
    core: DetSimpleCore,
    _weight: PhantomData<fn() -> W>,
}

impl<W> DetSimpleStation<W> {
    pub fn new(id: StationId, n: u32, edge: Edge) -> Self {
        DetSimpleStation { id, core: DetSimpleCore::new(n, edge), _weight: PhantomData }
    }
}

impl<W: Weight> Station for DetSimpleStation<W> {
    type W = W;

    fn id(&self) -> StationId {
        self.id
    }

    fn edge(&self) -> Edge {
        self.core.edge()
    }

    fn decide(&mut self, _step: Step) -> Option<Message<W>> {
        self.core.decide()
    }

    fn observe(&mut self, _step: Step, feedback: &Feedback<W>) -> Result<()> {
        self.core.observe(feedback)
    }

    fn halted(&self) -> bool {
        self.core.done()
    }

    fn status(&self) -> Option<EdgeStatus> {
        Some(self.core.status())
    }

    fn output(&self) -> Option<StationOutput<W>> {
        Some(StationOutput::Revealed(self.core.revealed().to_vec()))
    }

    fn forest(&self) -> Option<&[Edge]> {
        Some(self.core.revealed())
    }

    fn shared_digest(&self) -> Option<u64> {
        Some(self.core.shared_digest())
    }
}
