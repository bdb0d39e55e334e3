//! Binary-search conflict resolution over a ranked universe.

use crate::channel::{Channel, FeedbackKind, Message};
use crate::error::Result;
use crate::graph::{edge_index, edge_universe, Edge, StationId};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Stage {
    /// Every candidate broadcasts.
    Whole,
    /// Candidates ranked in the left half of `[lo, hi)` broadcast.
    Split { lo: u64, hi: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolveOutcome {
    Pending,
    /// No candidate exists.
    Empty,
    /// The feedback of the last step carries the single isolated candidate.
    Found,
}

/// Isolates the minimum-rank candidate among those in `[0, universe)`.
///
/// All candidates first broadcast together. After a collision the search
/// probes the left half of the current interval: a collision there narrows to
/// that half, silence narrows to the right half, and a heard message ends it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Resolver {
    universe: u64,
    stage: Stage,
    steps: u64,
}

impl Resolver {
    pub fn new(universe: u64) -> Self {
        Resolver { universe, stage: Stage::Whole, steps: 0 }
    }

    fn split(lo: u64, hi: u64) -> u64 {
        lo + (hi - lo).div_ceil(2)
    }

    /// Whether a candidate of rank `rank` broadcasts at the current step.
    pub fn attempts(&self, rank: u64) -> bool {
        debug_assert!(rank < self.universe);
        match self.stage {
            Stage::Whole => true,
            Stage::Split { lo, hi } => lo <= rank && rank < Self::split(lo, hi),
        }
    }

    pub fn advance(&mut self, feedback: FeedbackKind) -> ResolveOutcome {
        self.steps += 1;
        match (self.stage, feedback) {
            (_, FeedbackKind::Heard) => ResolveOutcome::Found,
            (Stage::Whole, FeedbackKind::Silence) => ResolveOutcome::Empty,
            (Stage::Whole, FeedbackKind::Collision) => {
                self.stage = Stage::Split { lo: 0, hi: self.universe };
                ResolveOutcome::Pending
            }
            (Stage::Split { lo, hi }, kind) => {
                let mid = Self::split(lo, hi);
                self.stage = match kind {
                    FeedbackKind::Collision => Stage::Split { lo, hi: mid },
                    _ => Stage::Split { lo: mid, hi },
                };
                ResolveOutcome::Pending
            }
        }
    }

    /// Channel steps consumed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// Runs one resolution over `candidates` on a fresh channel, one station per edge.
/// Returns the isolated edge (if any) and the number of steps used.
pub fn resolve(candidates: &[Edge], n: u32) -> Result<(Option<Edge>, u64)> {
    let mut channel: Channel<Rational> = Channel::new(candidates.len());
    for s in 1..=candidates.len() as StationId {
        channel.activate(s);
    }
    let ranks = candidates.iter().map(|&e| edge_index(e, n)).collect::<Result<Vec<_>>>()?;
    let mut resolver = Resolver::new(edge_universe(n));
    loop {
        let attempts = candidates
            .iter()
            .zip(&ranks)
            .enumerate()
            .filter(|(_, (_, &r))| resolver.attempts(r))
            .map(|(i, (&e, _))| (i as StationId + 1, Message::Edge(e)))
            .collect();
        let feedback = channel.step(attempts, Vec::new())?;
        match resolver.advance(feedback.kind()) {
            ResolveOutcome::Pending => {}
            ResolveOutcome::Empty => return Ok((None, resolver.steps())),
            ResolveOutcome::Found => return Ok((feedback.heard_edge(), resolver.steps())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(u: u32, v: u32) -> Edge {
        Edge::new(u, v).unwrap()
    }

    #[test]
    fn resolve_examples() {
        assert_eq!(resolve(&[], 4).unwrap(), (None, 1));
        assert_eq!(resolve(&[e(2, 3)], 4).unwrap(), (Some(e(2, 3)), 1));
        let (found, steps) = resolve(&[e(3, 4), e(1, 2)], 4).unwrap();
        assert_eq!(found, Some(e(1, 2)));
        assert!(steps <= 2 * 3 + 1);
    }

    #[test]
    fn full_universe_costs_logarithmic_steps() {
        let n = 9;
        let all: Vec<Edge> = (0..edge_universe(n)).map(|r| crate::graph::edge_from_index(r, n).unwrap()).collect();
        let (found, steps) = resolve(&all, n).unwrap();
        assert_eq!(found, Some(e(1, 2)));
        // 36 edges: one whole-set probe plus at most ceil(lg 36) halvings.
        assert!(steps <= 1 + 6, "{steps}");
    }

    proptest! {
        #[test]
        fn isolates_the_minimum(n in 2u32..14, picks in prop::collection::btree_set(0u64..91, 0..30)) {
            let u = edge_universe(n);
            let ranks: Vec<u64> = picks.into_iter().filter(|&r| r < u).collect();
            let edges: Vec<Edge> = ranks.iter().map(|&r| crate::graph::edge_from_index(r, n).unwrap()).collect();
            let (found, steps) = resolve(&edges, n).unwrap();
            let bound = 2 + 64 - (u.max(1) - 1).leading_zeros() as u64;
            prop_assert!(steps <= bound);
            match ranks.first() {
                None => prop_assert_eq!(found, None),
                Some(&r) => prop_assert_eq!(found.map(|f| edge_index(f, n).unwrap()), Some(r)),
            }
        }
    }
}
