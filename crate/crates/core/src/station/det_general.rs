use std::marker::PhantomData;

use super::det_simple::DetSimpleCore;
use super::{digest, EdgeStatus, Station, StationOutput};
use crate::channel::{Feedback, Message, Step};
use crate::error::Result;
use crate::graph::{Edge, StationId};
use crate::weight::Weight;

/// Even steps: station `i` broadcasts its edge at its `i`-th even step, and
/// silence there ends the run with every edge known. Odd steps run the
/// probe-then-resolve loop, whose completion also ends the run. The two
/// threads share nothing.
#[derive(Clone, Debug)]
pub struct DetGeneralStation<W> {
    id: StationId,
    edge: Edge,
    core: DetSimpleCore,
    elapsed: u64,
    swept: Vec<Edge>,
    swept_fp: u64,
    outcome: Option<Finish>,
    _weight: PhantomData<fn() -> W>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Finish {
    Sweep,
    Core,
}

impl<W> DetGeneralStation<W> {
    pub fn new(id: StationId, n: u32, edge: Edge) -> Self {
        DetGeneralStation {
            id,
            edge,
            core: DetSimpleCore::new(n, edge),
            elapsed: 0,
            swept: Vec::new(),
            swept_fp: 0,
            outcome: None,
            _weight: PhantomData,
        }
    }

    fn sweep_slot(&self) -> Option<u64> {
        (self.elapsed % 2 == 0).then_some(self.elapsed / 2 + 1)
    }
}

impl<W: Weight> Station for DetGeneralStation<W> {
    type W = W;

    fn id(&self) -> StationId {
        self.id
    }

    fn edge(&self) -> Edge {
        self.edge
    }

    fn decide(&mut self, _step: Step) -> Option<Message<W>> {
        if self.outcome.is_some() {
            return None;
        }
        match self.sweep_slot() {
            Some(slot) => (slot == self.id as u64).then_some(Message::Edge(self.edge)),
            None => self.core.decide(),
        }
    }

    fn observe(&mut self, _step: Step, feedback: &Feedback<W>) -> Result<()> {
        if self.sweep_slot().is_some() {
            match feedback.heard_edge() {
                Some(e) => {
                    self.swept.push(e);
                    self.swept_fp = digest((self.swept_fp, e));
                }
                None if feedback.is_silence() => self.outcome = Some(Finish::Sweep),
                None => {}
            }
        } else {
            self.core.observe(feedback)?;
            if self.core.done() {
                self.outcome = Some(Finish::Core);
            }
        }
        self.elapsed += 1;
        Ok(())
    }

    fn halted(&self) -> bool {
        self.outcome.is_some()
    }

    fn status(&self) -> Option<EdgeStatus> {
        Some(self.core.status())
    }

    fn output(&self) -> Option<StationOutput<W>> {
        Some(match self.outcome {
            Some(Finish::Sweep) => StationOutput::AllEdges(self.swept.iter().map(|&e| (e, None)).collect()),
            _ => StationOutput::Revealed(self.core.revealed().to_vec()),
        })
    }

    fn forest(&self) -> Option<&[Edge]> {
        Some(self.core.revealed())
    }

    fn shared_digest(&self) -> Option<u64> {
        Some(digest((self.core.shared_digest(), self.elapsed, self.swept_fp, self.outcome)))
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::generate::{generate_instance, GraphKind, WeightKind};
    use crate::graph::{Edge, Graph};
    use crate::oracle::check_spanning_forest;
    use crate::station::{run_algorithm, AlgorithmName, RunOptions};
    use crate::Rational;

    fn run(g: &Graph<Rational>) -> u64 {
        let opts = RunOptions { checks: true, ..Default::default() };
        let out = run_algorithm(AlgorithmName::DetGeneral, g, &opts).unwrap();
        assert!(check_spanning_forest(g, &out.forest));
        out.steps
    }

    #[test]
    fn star_of_three() {
        let g = generate_instance(GraphKind::Star, 4, 3, WeightKind::None, 0).unwrap();
        assert!(run(&g) <= 8);
    }

    #[test]
    fn single_edge_is_swept_first() {
        let g = Graph::<Rational>::new(2, vec![Edge::new(1, 2).unwrap()]).unwrap();
        // Even step 0 hears the edge, odd steps run the core, even step 2 is silent.
        assert!(run(&g) <= 3);
    }

    #[test]
    fn dense_graph_obeys_the_sweep_bound() {
        let g = generate_instance(GraphKind::Dense, 8, 28, WeightKind::None, 0).unwrap();
        assert!(run(&g) <= 2 * 29);
    }
}
