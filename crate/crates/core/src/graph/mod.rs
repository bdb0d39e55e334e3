//! Input graphs, the canonical edge order and forest bookkeeping.

mod edge;
mod forest;
pub mod generate;
pub mod io;

use std::collections::HashMap;

pub use edge::{edge_from_index, edge_index, edge_universe, Edge, Vertex, WeightedEdge};
pub use forest::{DisjointSet, ForestTracker};

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Station identifier. Stations of an `m`-edge graph are numbered `1..=m`.
pub type StationId = u32;

/// A simple graph whose `i`-th edge is held by station `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<W> {
    n: u32,
    edges: Vec<Edge>,
    weights: Option<Vec<W>>,
    station_of: HashMap<Edge, StationId>,
}

impl<W: Weight> Graph<W> {
    pub fn new(n: u32, edges: Vec<Edge>) -> Result<Self> {
        Self::build(n, edges, None)
    }

    pub fn weighted(n: u32, edges: Vec<WeightedEdge<W>>) -> Result<Self> {
        let (edges, weights) = edges.into_iter().map(|we| (we.edge, we.weight)).unzip();
        Self::build(n, edges, Some(weights))
    }

    fn build(n: u32, edges: Vec<Edge>, weights: Option<Vec<W>>) -> Result<Self> {
        let mut station_of = HashMap::with_capacity(edges.len());
        for (i, &e) in edges.iter().enumerate() {
            if e.v() > n {
                return Err(Error::VertexOutOfRange { vertex: e.v(), n });
            }
            if station_of.insert(e, i as StationId + 1).is_some() {
                return Err(Error::DuplicateEdge(e));
            }
        }
        if let Some(ws) = &weights {
            if let Some(bad) = ws.iter().find(|w| !w.is_valid()) {
                return Err(Error::InvalidWeight(bad.to_token()));
            }
        }
        Ok(Graph { n, edges, weights, station_of })
    }

    /// Drops the weights, keeping the station assignment.
    pub fn unweighted(&self) -> Graph<W> {
        Graph { weights: None, ..self.clone() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of edges, equal to the number of stations.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weights(&self) -> Option<&[W]> {
        self.weights.as_deref()
    }

    pub fn edge_of(&self, station: StationId) -> Edge {
        self.edges[station as usize - 1]
    }

    pub fn weight_of(&self, station: StationId) -> Option<&W> {
        self.weights.as_ref().map(|ws| &ws[station as usize - 1])
    }

    pub fn weight_of_edge(&self, e: Edge) -> Option<&W> {
        self.station_of(e).and_then(|s| self.weight_of(s))
    }

    pub fn station_of(&self, e: Edge) -> Option<StationId> {
        self.station_of.get(&e).copied()
    }

    pub fn stations(&self) -> impl Iterator<Item = StationId> {
        1..=self.edges.len() as StationId
    }

    /// Number of connected components over all `n` vertices.
    pub fn components(&self) -> usize {
        let mut sets = DisjointSet::new(self.n);
        for e in &self.edges {
            sets.union(e.u(), e.v());
        }
        sets.components()
    }

    /// Sum of the weights of `edges`, which must belong to this graph.
    pub fn total_weight<'a>(&self, edges: impl IntoIterator<Item = &'a Edge>) -> Option<W> {
        let mut total = W::zero();
        for e in edges {
            total = total + self.weight_of_edge(*e)?.clone();
        }
        Some(total)
    }

    /// Subgraph keeping the stations accepted by `keep`, with fresh station numbering.
    pub fn restrict(&self, mut keep: impl FnMut(StationId) -> bool) -> Graph<W> {
        let chosen: Vec<StationId> = self.stations().filter(|&s| keep(s)).collect();
        let edges = chosen.iter().map(|&s| self.edge_of(s)).collect();
        let weights = self.weights.as_ref().map(|_| chosen.iter().map(|&s| self.weight_of(s).unwrap().clone()).collect());
        Graph::build(self.n, edges, weights).expect("restriction of a valid graph is valid")
    }
}
