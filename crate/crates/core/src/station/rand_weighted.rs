use std::cmp::Ordering;
use std::hash::Hash;

use rand_chacha::ChaCha8Rng;

use super::{digest, station_rng, Contention, EdgeStatus, Estimate, LocalForest, Station, StationOutput};
use crate::channel::{Feedback, Message, Step};
use crate::error::{Error, Result};
use crate::graph::{Edge, StationId};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Phase {
    /// Stations lighter than `weight` broadcast their weight with probability `1/a`.
    FindWeight,
    /// Stations lighter than `weight` send a dummy; silence moves on.
    FindProbe,
    /// Stations of exactly `weight` broadcast their edge with probability `1/a`.
    RevealEdge,
    /// Stations of exactly `weight` send a dummy; silence moves on.
    RevealProbe,
    /// Waiting stations send a dummy; silence ends the run.
    Outer,
}

/// Minimum-weight search followed by revealing every edge of that weight.
#[derive(Clone, Debug)]
pub(crate) struct RandWeightedCore<W> {
    local: LocalForest,
    own: W,
    a: Estimate,
    /// `None` stands for `+inf`.
    weight: Option<W>,
    /// Hash of `weight`, kept for cheap lockstep digests.
    weight_fp: u64,
    /// `own` compared with `weight`, refreshed whenever `weight` changes.
    relation: Option<Ordering>,
    phase: Phase,
    rng: ChaCha8Rng,
    done: bool,
}

impl<W: Weight> RandWeightedCore<W> {
    pub fn new(id: StationId, n: u32, edge: Edge, own: W, seed: u64) -> Self {
        RandWeightedCore {
            local: LocalForest::new(n, edge),
            own,
            a: Estimate::one(),
            weight: None,
            weight_fp: 0,
            relation: None,
            phase: Phase::FindWeight,
            rng: station_rng(seed, id),
            done: false,
        }
    }

    fn lighter(&self) -> bool {
        self.local.is_waiting() && self.relation.map_or(true, |o| o == Ordering::Less)
    }

    fn matching(&self) -> bool {
        self.local.is_waiting() && self.relation == Some(Ordering::Equal)
    }

    fn contending(&self) -> Option<bool> {
        match self.phase {
            Phase::FindWeight => Some(self.lighter()),
            Phase::RevealEdge => Some(self.matching()),
            _ => None,
        }
    }

    fn update_estimate(&mut self, feedback: &Feedback<W>) {
        match feedback {
            Feedback::Collision => self.a.triple(),
            Feedback::Silence => self.a.third(),
            Feedback::Heard(_) => {}
        }
    }

    pub fn decide(&mut self) -> Option<Message<W>> {
        if self.done {
            return None;
        }
        match self.phase {
            Phase::FindWeight => {
                (self.lighter() && self.a.sample(&mut self.rng)).then(|| Message::Weight(self.own.clone()))
            }
            Phase::FindProbe => self.lighter().then_some(Message::Dummy),
            Phase::RevealEdge => {
                (self.matching() && self.a.sample(&mut self.rng)).then_some(Message::Edge(self.local.edge))
            }
            Phase::RevealProbe => self.matching().then_some(Message::Dummy),
            Phase::Outer => self.local.is_waiting().then_some(Message::Dummy),
        }
    }

    pub fn observe(&mut self, feedback: &Feedback<W>) -> Result<()> {
        self.phase = match self.phase {
            Phase::FindWeight => {
                match feedback.heard() {
                    Some(Message::Weight(w)) => {
                        self.weight_fp = w.fingerprint();
                        self.relation = self.own.partial_cmp(w);
                        self.weight = Some(w.clone());
                    }
                    Some(other) => return Err(Error::Invariant(format!("unexpected message {other:?} in weight search"))),
                    None => self.update_estimate(feedback),
                }
                Phase::FindProbe
            }
            Phase::FindProbe if feedback.is_silence() => Phase::RevealEdge,
            Phase::FindProbe => Phase::FindWeight,
            Phase::RevealEdge => {
                match feedback.heard() {
                    Some(Message::Edge(e)) => self.local.reveal(*e)?,
                    Some(other) => return Err(Error::Invariant(format!("unexpected message {other:?} in edge search"))),
                    None => self.update_estimate(feedback),
                }
                Phase::RevealProbe
            }
            Phase::RevealProbe if feedback.is_silence() => Phase::Outer,
            Phase::RevealProbe => Phase::RevealEdge,
            Phase::Outer => {
                if feedback.is_silence() {
                    self.done = true;
                }
                self.a = Estimate::one();
                self.weight = None;
                self.weight_fp = 0;
                self.relation = None;
                Phase::FindWeight
            }
        };
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
        digest((self.a, self.phase, self.done, self.local.tracker.fingerprint(), self.weight_fp))
    }

    pub fn contention(&self) -> Option<Contention> {
        if self.done {
            return None;
        }
        self.contending().map(|contending| Contention { exponent: self.a.exponent(), contending })
    }
}

#[derive(Clone, Debug)]
pub struct RandWeightedStation<W> {
    id: StationId,
    core: RandWeightedCore<W>,
}

impl<W: Weight> RandWeightedStation<W> {
    pub fn new(id: StationId, n: u32, edge: Edge, weight: W, seed: u64) -> Self {
        RandWeightedStation { id, core: RandWeightedCore::new(id, n, edge, weight, seed) }
    }
}

impl<W: Weight> Station for RandWeightedStation<W> {
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

    fn contention(&self) -> Option<Contention> {
        self.core.contention()
    }
}

/// Odd steps run the weighted search; even steps sweep `(edge, weight)` pairs
/// by ID. Sweep silence ends the run with the whole input known.
#[derive(Clone, Debug)]
pub struct RandWeightedGeneralStation<W> {
    id: StationId,
    edge: Edge,
    own: W,
    core: RandWeightedCore<W>,
    elapsed: u64,
    swept: Vec<(Edge, W)>,
    swept_fp: u64,
    by_sweep: bool,
    done: bool,
}

impl<W: Weight> RandWeightedGeneralStation<W> {
    pub fn new(id: StationId, n: u32, edge: Edge, weight: W, seed: u64) -> Self {
        RandWeightedGeneralStation {
            id,
            edge,
            own: weight.clone(),
            core: RandWeightedCore::new(id, n, edge, weight, seed),
            elapsed: 0,
            swept: Vec::new(),
            swept_fp: 0,
            by_sweep: false,
            done: false,
        }
    }

    fn sweep_slot(&self) -> Option<u64> {
        (self.elapsed % 2 == 0).then_some(self.elapsed / 2 + 1)
    }
}

impl<W: Weight> Station for RandWeightedGeneralStation<W> {
    type W = W;

    fn id(&self) -> StationId {
        self.id
    }

    fn edge(&self) -> Edge {
        self.edge
    }

    fn decide(&mut self, _step: Step) -> Option<Message<W>> {
        if self.done {
            return None;
        }
        match self.sweep_slot() {
            Some(slot) => (slot == self.id as u64).then(|| Message::WeightedEdge(self.edge, self.own.clone())),
            None => self.core.decide(),
        }
    }

    fn observe(&mut self, _step: Step, feedback: &Feedback<W>) -> Result<()> {
        if self.sweep_slot().is_some() {
            match feedback.heard() {
                Some(Message::WeightedEdge(e, w)) => {
                    self.swept_fp = digest((self.swept_fp, *e, w.fingerprint()));
                    self.swept.push((*e, w.clone()));
                }
                Some(other) => return Err(Error::Invariant(format!("unexpected message {other:?} in sweep"))),
                None if feedback.is_silence() => {
                    self.done = true;
                    self.by_sweep = true;
                }
                None => {}
            }
        } else {
            self.core.observe(feedback)?;
            self.done = self.core.done();
        }
        self.elapsed += 1;
        Ok(())
    }

    fn halted(&self) -> bool {
        self.done
    }

    fn status(&self) -> Option<EdgeStatus> {
        Some(self.core.status())
    }

    fn output(&self) -> Option<StationOutput<W>> {
        Some(if self.by_sweep {
            StationOutput::AllEdges(self.swept.iter().map(|(e, w)| (*e, Some(w.clone()))).collect())
        } else {
            StationOutput::Revealed(self.core.revealed().to_vec())
        })
    }

    fn forest(&self) -> Option<&[Edge]> {
        Some(self.core.revealed())
    }

    fn shared_digest(&self) -> Option<u64> {
        Some(digest((self.core.shared_digest(), self.elapsed, self.swept_fp, self.done)))
    }

    fn contention(&self) -> Option<Contention> {
        if self.done || self.sweep_slot().is_some() {
            return None;
        }
        self.core.contention()
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::generate::{generate_instance, GraphKind, WeightKind};
    use crate::graph::{Edge, Graph, WeightedEdge};
    use crate::oracle::kruskal_msf;
    use crate::station::{run_algorithm, AlgorithmName, RunOptions};
    use crate::Rational;

    fn we(u: u32, v: u32, w: i64) -> WeightedEdge<Rational> {
        WeightedEdge { edge: Edge::new(u, v).unwrap(), weight: Rational::from_integer(w.into()) }
    }

    fn opts(seed: u64) -> RunOptions {
        RunOptions { seed, checks: true, ..Default::default() }
    }

    #[test]
    fn path_weights_add_up() {
        let g = Graph::weighted(3, vec![we(1, 2, 1), we(2, 3, 2)]).unwrap();
        let out = run_algorithm(AlgorithmName::RandWeighted, &g, &opts(0)).unwrap();
        assert_eq!(out.weight, Some(Rational::from_integer(3.into())));
    }

    #[test]
    fn triangle_drops_the_heaviest_edge() {
        let g = Graph::weighted(3, vec![we(1, 2, 1), we(1, 3, 2), we(2, 3, 3)]).unwrap();
        for seed in 0..50 {
            let out = run_algorithm(AlgorithmName::RandWeighted, &g, &opts(seed)).unwrap();
            let mut forest = out.forest.clone();
            forest.sort();
            assert_eq!(forest, vec![Edge::new(1, 2).unwrap(), Edge::new(1, 3).unwrap()]);
        }
    }

    #[test]
    fn k4_matches_kruskal_for_100_seeds() {
        for seed in 0..100 {
            let g = generate_instance(GraphKind::Dense, 4, 6, WeightKind::Distinct, seed).unwrap();
            let (_, best) = kruskal_msf(&g);
            for name in [AlgorithmName::RandWeighted, AlgorithmName::RandWeightedGeneral] {
                let out = run_algorithm(name, &g, &opts(seed)).unwrap();
                assert_eq!(out.weight.as_ref(), Some(&best), "{name} seed {seed}");
            }
        }
    }

    #[test]
    fn general_variant_on_a_two_edge_path() {
        let g = Graph::weighted(3, vec![we(1, 2, 5), we(2, 3, 7)]).unwrap();
        for seed in 0..20 {
            let out = run_algorithm(AlgorithmName::RandWeightedGeneral, &g, &opts(seed)).unwrap();
            assert_eq!(out.weight, Some(Rational::from_integer(12.into())));
            assert!(out.steps <= 2 * 3);
        }
    }

    #[test]
    fn equal_weights_still_give_a_spanning_forest() {
        let g = generate_instance(GraphKind::RandomConnected, 40, 120, WeightKind::KDistinct(1), 5).unwrap();
        let (_, best) = kruskal_msf(&g);
        let out = run_algorithm(AlgorithmName::RandWeighted, &g, &opts(1)).unwrap();
        assert_eq!(out.forest.len(), 39);
        assert_eq!(out.weight, Some(best));
    }
}
