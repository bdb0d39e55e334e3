//! Hard inputs for oblivious algorithms whose queries name edges.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ExecutionTrace;
use crate::error::{Error, Result};
use crate::graph::{edge_from_index, edge_universe, DisjointSet, Edge, Graph, Vertex};
use crate::station::EdgeQueries;
use crate::weight::Weight;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FivePhaseResult {
    pub n: u32,
    /// The `m` constructed edges in lexicographic order.
    pub edges: Vec<Edge>,
    /// No edge at this vertex is ever the only queried edge of `edges` among the first `k` queries.
    pub witness: Vertex,
    pub k: usize,
    /// Size of `F` after the removal phase.
    pub after_removal: usize,
    /// Size of `T` after collisions were added.
    pub after_collisions: usize,
}

impl FivePhaseResult {
    pub fn graph(&self) -> Graph<Rational> {
        Graph::new(self.n, self.edges.clone()).expect("constructed edges are distinct and in range")
    }
}

/// Number of queries the construction defeats: `floor((m - n) / 2)`.
pub fn query_horizon(n: u32, m: usize) -> usize {
    m.saturating_sub(n as usize) / 2
}

/// True iff for every `i <= k` and every `w`, `Q_i ∩ t != {(v, w)}`.
pub fn is_witness(queries: &EdgeQueries, k: usize, t: &BTreeSet<Edge>, v: Vertex) -> bool {
    (1..=k as u64).all(|i| {
        let Some(q) = queries.get(i) else { return true };
        let mut hits = q.iter().filter(|e| t.contains(e));
        match (hits.next(), hits.next()) {
            (Some(e), None) => !e.is_incident_to(v),
            _ => true,
        }
    })
}

/// Builds an `m`-edge connected graph on `n` vertices with a witness vertex
/// against the first `floor((m - n) / 2)` of `queries`.
pub fn five_phase_construct(queries: &EdgeQueries, n: u32, m: usize) -> Result<FivePhaseResult> {
    let universe = edge_universe(n) as usize;
    if 2 * n as usize > m || 4 * m > 2 * universe {
        return Err(Error::Precondition(format!("need 2n <= m <= n(n-1)/4, got n = {n}, m = {m}")));
    }
    let k = query_horizon(n, m);
    let qs: Vec<BTreeSet<Edge>> = (1..=k as u64).map(|i| queries.get(i).cloned().unwrap_or_default()).collect();
    if let Some(bad) = qs.iter().flatten().find(|e| e.v() > n) {
        return Err(Error::Precondition(format!("query edge {bad} lies outside 1..={n}")));
    }
    let mentioned: BTreeSet<Edge> = qs.iter().flatten().copied().collect();

    // Removal: drop an edge that is the only F-edge of some query, unless an endpoint would become isolated.
    let mut f: BTreeSet<Edge> = (0..universe as u64).map(|r| edge_from_index(r, n).unwrap()).collect();
    let mut degree = vec![n as usize - 1; n as usize + 1];
    'scan: loop {
        for q in &qs {
            let mut inside = q.iter().filter(|e| f.contains(e));
            if let (Some(&e), None) = (inside.next(), inside.next()) {
                if degree[e.u() as usize] > 1 && degree[e.v() as usize] > 1 {
                    f.remove(&e);
                    degree[e.u() as usize] -= 1;
                    degree[e.v() as usize] -= 1;
                    continue 'scan;
                }
            }
        }
        break;
    }
    let after_removal = f.len();

    // Initialization: the lexicographically first spanning tree of F.
    let mut sets = DisjointSet::new(n);
    let mut t: BTreeSet<Edge> = f.iter().copied().filter(|e| sets.union(e.u(), e.v())).collect();
    if sets.components() != 1 {
        return Err(Error::Construction("F is disconnected after the removal phase".into()));
    }

    // Collisions: every query that collides under F also collides under T.
    for q in &qs {
        let in_f: Vec<Edge> = q.iter().copied().filter(|e| f.contains(e)).collect();
        if in_f.len() < 2 {
            continue;
        }
        let in_t = in_f.iter().filter(|e| t.contains(e)).count();
        let fresh: Vec<Edge> = in_f.iter().copied().filter(|e| !t.contains(e)).collect();
        match in_t {
            1 => {
                t.insert(fresh[0]);
            }
            0 => {
                t.insert(fresh[0]);
                t.insert(fresh[1]);
            }
            _ => {}
        }
    }
    let after_collisions = t.len();
    if after_collisions > m {
        return Err(Error::Construction(format!("{after_collisions} edges after adding collisions exceed m = {m}")));
    }

    // Growth: add F-edges of queries that already meet T.
    for q in &qs {
        if t.len() >= m {
            break;
        }
        if q.iter().any(|e| t.contains(e)) {
            for &e in q.iter().filter(|e| f.contains(e)) {
                if t.len() >= m {
                    break;
                }
                t.insert(e);
            }
        }
    }

    // Padding with edges no query mentions.
    for r in 0..universe as u64 {
        if t.len() >= m {
            break;
        }
        let e = edge_from_index(r, n).unwrap();
        if !mentioned.contains(&e) {
            t.insert(e);
        }
    }
    if t.len() != m {
        return Err(Error::Construction(format!("could only reach {} of {m} edges", t.len())));
    }

    let witness = (1..=n)
        .find(|&v| is_witness(queries, k, &t, v))
        .ok_or_else(|| Error::Construction("no witness vertex".into()))?;
    Ok(FivePhaseResult { n, edges: t.into_iter().collect(), witness, k, after_removal, after_collisions })
}

/// Random schedule of `count` queries, each naming 1 to `max_size` distinct edges.
pub fn random_edge_queries(n: u32, count: usize, max_size: usize, seed: u64) -> EdgeQueries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = edge_universe(n);
    EdgeQueries::new((0..count).map(|_| {
        let size = rng.gen_range(1..=max_size.max(1));
        let mut q = BTreeSet::new();
        while q.len() < size.min(u as usize) {
            q.insert(edge_from_index(rng.gen_range(0..u), n).unwrap());
        }
        q
    }))
}

/// Every possible edge as a singleton query, in lexicographic order.
pub fn singleton_edge_queries(n: u32) -> EdgeQueries {
    EdgeQueries::new((0..edge_universe(n)).map(|r| [edge_from_index(r, n).unwrap()]))
}

/// Whether any edge at `v` was heard during the first `steps` entries of `trace`.
pub fn heard_at_vertex<W: Weight>(trace: &ExecutionTrace<W>, v: Vertex, steps: usize) -> bool {
    trace.entries().iter().take(steps).filter_map(|t| t.feedback.heard_edge()).any(|e| e.is_incident_to(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::station::run_oblivious;

    fn check(queries: &EdgeQueries, n: u32, m: usize) -> FivePhaseResult {
        let r = five_phase_construct(queries, n, m).unwrap();
        assert_eq!(r.edges.len(), m);
        assert!(r.after_collisions <= n as usize - 1 + 2 * r.k);
        let g = r.graph();
        assert_eq!(g.components(), 1);
        let t: BTreeSet<Edge> = r.edges.iter().copied().collect();
        assert!(is_witness(queries, r.k, &t, r.witness));
        let trace = run_oblivious(&g, queries.clone(), r.k as u64).unwrap();
        assert!(!heard_at_vertex(&trace, r.witness, r.k));
        r
    }

    #[test]
    fn defeats_the_edge_sweep() {
        let r = check(&singleton_edge_queries(16), 16, 32);
        assert_eq!(r.k, 8);
    }

    #[test]
    fn random_schedules_always_yield_a_witness() {
        for seed in 0..50 {
            check(&random_edge_queries(20, 48, 5, seed), 20, 48);
        }
    }

    #[test]
    fn zero_horizon_needs_only_connectivity() {
        assert_eq!(query_horizon(16, 33), 8);
        assert_eq!(query_horizon(9, 10), 0);
        // m = n + 1 violates 2n <= m, so the smallest legal instance is used instead.
        let r = check(&EdgeQueries::default(), 10, 20);
        assert_eq!(r.k, 5);
    }

    #[test]
    fn refuses_out_of_range_sizes() {
        assert!(matches!(five_phase_construct(&EdgeQueries::default(), 16, 31), Err(Error::Precondition(_))));
        assert!(matches!(five_phase_construct(&EdgeQueries::default(), 16, 61), Err(Error::Precondition(_))));
    }
}
