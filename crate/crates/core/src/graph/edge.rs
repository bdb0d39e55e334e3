use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex label in `1..=n`.
pub type Vertex = u32;

/// An undirected edge in canonical form `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    u: Vertex,
    v: Vertex,
}

impl Edge {
    /// Builds the canonical edge between two distinct vertices, in either order.
    pub fn new(a: Vertex, b: Vertex) -> Result<Self> {
        if a == b || a == 0 || b == 0 {
            return Err(Error::InvalidEdge(a, b));
        }
        Ok(Edge { u: a.min(b), v: a.max(b) })
    }

    /// Builds an edge that must already be canonical.
    pub fn canonical(u: Vertex, v: Vertex) -> Result<Self> {
        if u == 0 || u >= v {
            return Err(Error::InvalidEdge(u, v));
        }
        Ok(Edge { u, v })
    }

    pub fn u(&self) -> Vertex {
        self.u
    }

    pub fn v(&self) -> Vertex {
        self.v
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }

    pub fn is_incident_to(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// An edge carrying a positive weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEdge<W> {
    pub edge: Edge,
    pub weight: W,
}

/// Number of possible edges on `n` vertices.
pub fn edge_universe(n: u32) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Rank of `e` in the lexicographic order of all edges on `n` vertices.
pub fn edge_index(e: Edge, n: u32) -> Result<u64> {
    if e.v > n {
        return Err(Error::VertexOutOfRange { vertex: e.v, n });
    }
    let (u, v, n) = (e.u as u64, e.v as u64, n as u64);
    // Edges (i, *) for i < u come first: sum of (n - i) over i in 1..u.
    let before = (u - 1) * n - (u - 1) * u / 2;
    Ok(before + (v - u - 1))
}

/// Inverse of [`edge_index`].
pub fn edge_from_index(rank: u64, n: u32) -> Result<Edge> {
    if rank >= edge_universe(n) {
        return Err(Error::RankOutOfRange { rank, n });
    }
    let mut rest = rank;
    let mut u = 1u32;
    loop {
        let row = (n - u) as u64;
        if rest < row {
            return Ok(Edge { u, v: u + 1 + rest as u32 });
        }
        rest -= row;
        u += 1;
    }
}
