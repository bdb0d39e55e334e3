use std::collections::BTreeSet;

use super::edge::{Edge, Vertex};
use crate::error::{Error, Result};

/// Union-find over vertices `1..=n` with union by rank.
///
/// `find` does not compress paths so that connectivity queries can be made
/// through a shared reference; union by rank keeps trees at depth `O(log n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DisjointSet {
    parent: Vec<Vertex>,
    rank: Vec<u8>,
    components: usize,
}

impl DisjointSet {
    pub fn new(n: u32) -> Self {
        DisjointSet {
            parent: (0..=n).collect(),
            rank: vec![0; n as usize + 1],
            components: n as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn find(&self, mut x: Vertex) -> Vertex {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    pub fn connected(&self, a: Vertex, b: Vertex) -> bool {
        self.find(a) == self.find(b)
    }

    /// Merges the sets of `a` and `b`; returns false if they were already one set.
    pub fn union(&mut self, a: Vertex, b: Vertex) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra as usize] < self.rank[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        if self.rank[ra as usize] == self.rank[rb as usize] {
            self.rank[ra as usize] += 1;
        }
        self.components -= 1;
        true
    }

    /// Number of sets, counting isolated vertices.
    pub fn components(&self) -> usize {
        self.components
    }
}

/// Tracks the revealed forest and the edges known to close a cycle with it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForestTracker {
    sets: DisjointSet,
    revealed: Vec<Edge>,
    cycle: BTreeSet<Edge>,
    fingerprint: u64,
}

impl ForestTracker {
    pub fn new(n: u32) -> Self {
        ForestTracker { sets: DisjointSet::new(n), revealed: Vec::new(), cycle: BTreeSet::new(), fingerprint: 0 }
    }

    /// Rebuilds a tracker from a revealed list, e.g. one carried by an update message.
    pub fn from_revealed(n: u32, revealed: &[Edge]) -> Result<Self> {
        let mut t = ForestTracker::new(n);
        for &e in revealed {
            t.reveal(e)?;
        }
        Ok(t)
    }

    pub fn n(&self) -> u32 {
        self.sets.len() as u32
    }

    /// True iff the endpoints of `e` are already joined by revealed edges.
    pub fn would_cycle(&self, e: Edge) -> bool {
        self.sets.connected(e.u(), e.v())
    }

    /// Adds `e` to the forest. Fails if it would close a cycle.
    pub fn reveal(&mut self, e: Edge) -> Result<()> {
        if e.v() as usize > self.sets.len() {
            return Err(Error::VertexOutOfRange { vertex: e.v(), n: self.n() });
        }
        if !self.sets.union(e.u(), e.v()) {
            return Err(Error::CycleReveal(e));
        }
        self.revealed.push(e);
        self.fingerprint = crate::seed::mix(self.fingerprint, (e.u() as u64) << 32 | e.v() as u64);
        Ok(())
    }

    /// Records `e` as a cycle edge. It must close a cycle with the revealed forest.
    pub fn mark_cycle(&mut self, e: Edge) -> Result<()> {
        if !self.would_cycle(e) {
            return Err(Error::Construction(format!("{e} does not close a cycle")));
        }
        self.cycle.insert(e);
        Ok(())
    }

    /// Revealed edges in the order they were revealed.
    pub fn revealed(&self) -> &[Edge] {
        &self.revealed
    }

    /// Order-sensitive hash of the revealed sequence, maintained incrementally.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn cycle(&self) -> &BTreeSet<Edge> {
        &self.cycle
    }

    pub fn components(&self) -> usize {
        self.sets.components()
    }

    pub fn sets(&self) -> &DisjointSet {
        &self.sets
    }
}
