use std::marker::PhantomData;

use rand_chacha::ChaCha8Rng;

use super::{digest, station_rng, Contention, EdgeStatus, Estimate, LocalForest, Station, StationOutput};
use crate::channel::{Feedback, Message, Step};
use crate::error::Result;
use crate::graph::{Edge, StationId};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Phase {
    /// Waiting stations broadcast their edge with probability `1/a`.
    Random,
    /// The station whose ID equals the counter broadcasts its edge.
    Sweep,
    /// Waiting stations send a dummy; silence ends the run.
    Probe,
}

/// Randomized backoff with a deterministic ID sweep folded into every round.
#[derive(Clone, Debug)]
pub struct RandSimpleStation<W> {
    id: StationId,
    local: LocalForest,
    a: Estimate,
    counter: u64,
    phase: Phase,
    rng: ChaCha8Rng,
    done: bool,
    _weight: PhantomData<fn() -> W>,
}

impl<W> RandSimpleStation<W> {
    pub fn new(id: StationId, n: u32, edge: Edge, seed: u64) -> Self {
        RandSimpleStation {
            id,
            local: LocalForest::new(n, edge),
            a: Estimate::one(),
            counter: 0,
            phase: Phase::Random,
            rng: station_rng(seed, id),
            done: false,
            _weight: PhantomData,
        }
    }

    pub fn estimate(&self) -> Estimate {
        self.a
    }
}

impl<W: Weight> Station for RandSimpleStation<W> {
    type W = W;

    fn id(&self) -> StationId {
        self.id
    }

    fn edge(&self) -> Edge {
        self.local.edge
    }

    fn decide(&mut self, _step: Step) -> Option<Message<W>> {
        if self.done {
            return None;
        }
        let edge = Message::Edge(self.local.edge);
        match self.phase {
            Phase::Random => (self.local.is_waiting() && self.a.sample(&mut self.rng)).then_some(edge),
            Phase::Sweep => (self.counter == self.id as u64).then_some(edge),
            Phase::Probe => self.local.is_waiting().then_some(Message::Dummy),
        }
    }

    fn observe(&mut self, _step: Step, feedback: &Feedback<W>) -> Result<()> {
        match self.phase {
            Phase::Random => {
                match feedback {
                    Feedback::Heard(_) => {
                        if let Some(e) = feedback.heard_edge() {
                            self.local.reveal(e)?;
                        }
                    }
                    Feedback::Collision => self.a.triple(),
                    Feedback::Silence => self.a.third(),
                }
                self.counter += 1;
                self.phase = Phase::Sweep;
            }
            Phase::Sweep => {
                // The swept edge may already be revealed or closing a cycle.
                if let Some(e) = feedback.heard_edge() {
                    self.local.offer(e);
                }
                self.phase = Phase::Probe;
            }
            Phase::Probe => {
                if feedback.is_silence() {
                    self.done = true;
                }
                self.phase = Phase::Random;
            }
        }
        Ok(())
    }

    fn halted(&self) -> bool {
        self.done
    }

    fn status(&self) -> Option<EdgeStatus> {
        Some(self.local.status)
    }

    fn output(&self) -> Option<StationOutput<W>> {
        Some(StationOutput::Revealed(self.local.tracker.revealed().to_vec()))
    }

    fn forest(&self) -> Option<&[Edge]> {
        Some(self.local.tracker.revealed())
    }

    fn shared_digest(&self) -> Option<u64> {
        Some(digest((self.a, self.counter, self.phase, self.done, self.local.tracker.fingerprint())))
    }

    fn contention(&self) -> Option<Contention> {
        (!self.done && self.phase == Phase::Random)
            .then_some(Contention { exponent: self.a.exponent(), contending: self.local.is_waiting() })
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::generate::{generate_instance, GraphKind, WeightKind};
    use crate::graph::{Edge, Graph};
    use crate::station::{run_algorithm, AlgorithmName, RunOptions};
    use crate::Rational;

    fn e(u: u32, v: u32) -> Edge {
        Edge::new(u, v).unwrap()
    }

    fn opts(seed: u64) -> RunOptions {
        RunOptions { seed, checks: true, ..Default::default() }
    }

    #[test]
    fn single_edge_is_heard_immediately() {
        let g = Graph::<Rational>::new(2, vec![e(1, 2)]).unwrap();
        for seed in 0..10 {
            let out = run_algorithm(AlgorithmName::RandSimple, &g, &opts(seed)).unwrap();
            assert_eq!(out.forest, vec![e(1, 2)]);
        }
    }

    #[test]
    fn triangle_for_many_seeds() {
        let g = Graph::<Rational>::new(3, vec![e(1, 2), e(1, 3), e(2, 3)]).unwrap();
        for seed in 0..200 {
            let out = run_algorithm(AlgorithmName::RandSimple, &g, &opts(seed)).unwrap();
            assert_eq!(out.forest.len(), 2);
            assert!(out.steps <= 4 * 4);
        }
    }

    #[test]
    fn same_seed_same_run() {
        let g = generate_instance(GraphKind::RandomConnected, 30, 80, WeightKind::None, 3).unwrap();
        let a = run_algorithm(AlgorithmName::RandSimple, &g, &opts(11)).unwrap();
        let b = run_algorithm(AlgorithmName::RandSimple, &g, &opts(11)).unwrap();
        assert_eq!((a.forest, a.steps), (b.forest, b.steps));
    }
}
