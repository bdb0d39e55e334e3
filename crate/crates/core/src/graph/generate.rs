//! Seeded instance generators.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{edge_from_index, edge_universe, DisjointSet, Edge, Graph, WeightedEdge};
use crate::error::{Error, Result};
use crate::weight::unit_fraction;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// Edges `(i, i+1)` for `i = 1..=m`.
    Path,
    /// Edges `(1, i+1)` for `i = 1..=m`.
    Star,
    /// Uniform random labelled tree, `m = n - 1`.
    Tree,
    /// Random forest with `m <= n - 1` edges.
    RandomForest,
    /// Random spanning tree plus random chords.
    RandomConnected,
    /// Uniformly random `m`-edge graph, possibly disconnected.
    Random,
    /// Complete graph, `m = n(n-1)/2`.
    Dense,
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "path" => GraphKind::Path,
            "star" => GraphKind::Star,
            "tree" => GraphKind::Tree,
            "random-forest" => GraphKind::RandomForest,
            "random-connected" => GraphKind::RandomConnected,
            "random" => GraphKind::Random,
            "dense" => GraphKind::Dense,
            other => return Err(Error::Config(format!("unknown graph kind {other:?}"))),
        })
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GraphKind::Path => "path",
            GraphKind::Star => "star",
            GraphKind::Tree => "tree",
            GraphKind::RandomForest => "random-forest",
            GraphKind::RandomConnected => "random-connected",
            GraphKind::Random => "random",
            GraphKind::Dense => "dense",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WeightKind {
    None,
    /// A random permutation of `1..=m`.
    Distinct,
    /// Integer weights `1..=k` arranged so that every minimum spanning forest
    /// uses exactly `k` distinct weights.
    KDistinct(u32),
    /// Distinct weights `1/j`.
    UnitFractions,
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => WeightKind::None,
            "distinct" => WeightKind::Distinct,
            "unit-fractions" => WeightKind::UnitFractions,
            other => match other.strip_prefix("k-distinct:") {
                Some(k) => WeightKind::KDistinct(k.parse().map_err(|_| Error::Config(format!("bad weight count in {other:?}")))?),
                None => return Err(Error::Config(format!("unknown weight kind {other:?}"))),
            },
        })
    }
}

impl TryFrom<String> for WeightKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WeightKind> for String {
    fn from(w: WeightKind) -> String {
        w.to_string()
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::None => f.write_str("none"),
            WeightKind::Distinct => f.write_str("distinct"),
            WeightKind::KDistinct(k) => write!(f, "k-distinct:{k}"),
            WeightKind::UnitFractions => f.write_str("unit-fractions"),
        }
    }
}

fn infeasible(kind: GraphKind, n: u32, m: usize) -> Error {
    Error::Infeasible(format!("{kind} with n={n}, m={m}"))
}

fn e(u: u32, v: u32) -> Edge {
    Edge::new(u, v).expect("generator produced a loop")
}

/// Random labelled tree: vertex `order[i]` attaches to a uniformly chosen earlier vertex.
fn random_tree(n: u32, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut order: Vec<u32> = (1..=n).collect();
    order.shuffle(rng);
    (1..order.len()).map(|i| e(order[i], order[rng.gen_range(0..i)])).collect()
}

fn random_extra_edges(n: u32, have: &mut HashSet<Edge>, count: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let universe = edge_universe(n);
    let mut out = Vec::with_capacity(count);
    if count as u64 * 2 > universe {
        // Dense request: sample from the explicit complement.
        let mut rest: Vec<Edge> = (0..universe).map(|r| edge_from_index(r, n).unwrap()).filter(|x| !have.contains(x)).collect();
        rest.shuffle(rng);
        rest.truncate(count);
        have.extend(rest.iter().copied());
        return rest;
    }
    while out.len() < count {
        let x = edge_from_index(rng.gen_range(0..universe), n).unwrap();
        if have.insert(x) {
            out.push(x);
        }
    }
    out
}

/// Generates the unweighted edge list; station `i` holds `edges[i - 1]`.
pub fn generate_edges(kind: GraphKind, n: u32, m: usize, seed: u64) -> Result<Vec<Edge>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe = edge_universe(n) as usize;
    let bad = || infeasible(kind, n, m);
    let tree_edges = (n as usize).saturating_sub(1);
    let edges = match kind {
        GraphKind::Path => {
            if m > tree_edges {
                return Err(bad());
            }
            (1..=m as u32).map(|i| e(i, i + 1)).collect()
        }
        GraphKind::Star => {
            if m > tree_edges {
                return Err(bad());
            }
            (1..=m as u32).map(|i| e(1, i + 1)).collect()
        }
        GraphKind::Tree => {
            if m != tree_edges || n < 2 {
                return Err(bad());
            }
            random_tree(n, &mut rng)
        }
        GraphKind::RandomForest => {
            if m > tree_edges {
                return Err(bad());
            }
            let mut t = if n >= 2 { random_tree(n, &mut rng) } else { Vec::new() };
            t.shuffle(&mut rng);
            t.truncate(m);
            t
        }
        GraphKind::RandomConnected => {
            if n < 2 || m < tree_edges || m > universe {
                return Err(bad());
            }
            let mut t = random_tree(n, &mut rng);
            let mut have: HashSet<Edge> = t.iter().copied().collect();
            let extra = random_extra_edges(n, &mut have, m - tree_edges, &mut rng);
            t.extend(extra);
            t.shuffle(&mut rng);
            t
        }
        GraphKind::Random => {
            if m > universe {
                return Err(bad());
            }
            let mut have = HashSet::new();
            random_extra_edges(n, &mut have, m, &mut rng)
        }
        GraphKind::Dense => {
            if m != universe {
                return Err(bad());
            }
            (0..universe as u64).map(|r| edge_from_index(r, n).unwrap()).collect()
        }
    };
    Ok(edges)
}

/// Maximum weight on the tree path between `a` and `b`, or `None` if disconnected.
fn path_max(adj: &[Vec<(u32, u64)>], a: u32, b: u32) -> Option<u64> {
    let mut best = vec![None; adj.len()];
    best[a as usize] = Some(0);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            return best[b as usize];
        }
        let here = best[x as usize].unwrap();
        for &(y, w) in &adj[x as usize] {
            if best[y as usize].is_none() {
                best[y as usize] = Some(here.max(w));
                queue.push_back(y);
            }
        }
    }
    None
}

fn k_distinct_weights(n: u32, edges: &[Edge], k: u32, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let k = k as u64;
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(rng);
    let mut sets = DisjointSet::new(n);
    let tree: Vec<usize> = order.into_iter().filter(|&i| sets.union(edges[i].u(), edges[i].v())).collect();
    if (tree.len() as u64) < k || k == 0 {
        return Err(Error::Infeasible(format!("{k} distinct forest weights need at least {k} forest edges, have {}", tree.len())));
    }
    let mut weights = vec![0u64; edges.len()];
    let mut pool: Vec<u64> = (1..=k).chain((k as usize..tree.len()).map(|_| rng.gen_range(1..=k))).collect();
    pool.shuffle(rng);
    let mut adj = vec![Vec::new(); n as usize + 1];
    for (&i, w) in tree.iter().zip(pool) {
        weights[i] = w;
        adj[edges[i].u() as usize].push((edges[i].v(), w));
        adj[edges[i].v() as usize].push((edges[i].u(), w));
    }
    // A chord no lighter than every forest edge on its cycle keeps the forest minimum.
    for (i, x) in edges.iter().enumerate() {
        if weights[i] == 0 {
            let lo = path_max(&adj, x.u(), x.v()).expect("chord endpoints lie in one tree");
            weights[i] = rng.gen_range(lo..=k);
        }
    }
    Ok(weights)
}

/// Builds a graph instance. Station numbering follows the generator's edge order.
pub fn generate_instance(kind: GraphKind, n: u32, m: usize, weights: WeightKind, seed: u64) -> Result<Graph<Rational>> {
    let edges = generate_edges(kind, n, m, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::mix(seed, 1));
    let ws: Vec<Rational> = match weights {
        WeightKind::None => return Graph::new(n, edges),
        WeightKind::Distinct => {
            let mut p: Vec<u64> = (1..=m as u64).collect();
            p.shuffle(&mut rng);
            p.into_iter().map(|w| Rational::from_integer(BigInt::from(w))).collect()
        }
        WeightKind::KDistinct(k) => k_distinct_weights(n, &edges, k, &mut rng)?
            .into_iter()
            .map(|w| Rational::from_integer(BigInt::from(w)))
            .collect(),
        WeightKind::UnitFractions => {
            let mut p: Vec<u64> = (1..=m as u64).collect();
            p.shuffle(&mut rng);
            p.into_iter().map(unit_fraction).collect()
        }
    };
    Graph::weighted(n, edges.into_iter().zip(ws).map(|(edge, weight)| WeightedEdge { edge, weight }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::kruskal_msf;

    #[test]
    fn path_example() {
        let g = generate_instance(GraphKind::Path, 5, 4, WeightKind::None, 0).unwrap();
        let want: Vec<Edge> = [(1, 2), (2, 3), (3, 4), (4, 5)].iter().map(|&(a, b)| e(a, b)).collect();
        assert_eq!(g.edges(), &want[..]);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_instance(GraphKind::RandomConnected, 20, 60, WeightKind::None, 7).unwrap();
        let b = generate_instance(GraphKind::RandomConnected, 20, 60, WeightKind::None, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m(), 60);
        assert_eq!(a.components(), 1);
    }

    #[test]
    fn k_distinct_controls_forest_weights() {
        for seed in 0..20 {
            let g = generate_instance(GraphKind::RandomConnected, 16, 40, WeightKind::KDistinct(3), seed).unwrap();
            let (forest, _) = kruskal_msf(&g);
            let distinct: HashSet<String> = forest.iter().map(|x| format!("{:?}", g.weight_of_edge(*x).unwrap())).collect();
            assert_eq!(distinct.len(), 3, "seed {seed}");
        }
    }

    #[test]
    fn shapes_match_their_kind() {
        let t = generate_instance(GraphKind::Tree, 30, 29, WeightKind::None, 3).unwrap();
        assert_eq!(t.components(), 1);
        let f = generate_instance(GraphKind::RandomForest, 30, 20, WeightKind::None, 3).unwrap();
        assert_eq!(f.components(), 10);
        let d = generate_instance(GraphKind::Dense, 8, 28, WeightKind::Distinct, 3).unwrap();
        assert_eq!(d.m(), 28);
        let r = generate_instance(GraphKind::Random, 10, 45, WeightKind::UnitFractions, 3).unwrap();
        assert_eq!(r.m(), 45);
    }

    #[test]
    fn refuses_infeasible_sizes() {
        assert!(generate_instance(GraphKind::Path, 5, 5, WeightKind::None, 0).is_err());
        assert!(generate_instance(GraphKind::Tree, 5, 3, WeightKind::None, 0).is_err());
        assert!(generate_instance(GraphKind::RandomConnected, 5, 11, WeightKind::None, 0).is_err());
        assert!(generate_instance(GraphKind::Path, 5, 4, WeightKind::KDistinct(5), 0).is_err());
        assert!("bogus".parse::<GraphKind>().is_err());
        assert_eq!("k-distinct:4".parse::<WeightKind>().unwrap(), WeightKind::KDistinct(4));
    }
}
