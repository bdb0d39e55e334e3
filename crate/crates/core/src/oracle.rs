//! Reference computations and checkers that algorithm runs are validated against.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::adversary::ActivationSchedule;
use crate::channel::{ExecutionTrace, FeedbackKind};
use crate::error::{Error, Result};
use crate::graph::{DisjointSet, Edge, Graph};
use crate::station::{AlgorithmName, ContentionSample, RunOutcome};
use crate::weight::Weight;

/// Minimum spanning forest by ascending `(weight, edge)`; unweighted graphs
/// give the lexicographically first spanning forest and a zero total.
pub fn kruskal_msf<W: Weight>(g: &Graph<W>) -> (Vec<Edge>, W) {
    let mut order: Vec<usize> = (0..g.m()).collect();
    if let Some(ws) = g.weights() {
        order.sort_by(|&a, &b| ws[a].partial_cmp(&ws[b]).expect("weights are totally ordered").then(g.edges()[a].cmp(&g.edges()[b])));
    } else {
        order.sort_by_key(|&i| g.edges()[i]);
    }
    let mut sets = DisjointSet::new(g.n());
    let mut forest = Vec::new();
    let mut total = W::zero();
    for i in order {
        let e = g.edges()[i];
        if sets.union(e.u(), e.v()) {
            forest.push(e);
            if let Some(ws) = g.weights() {
                total = total + ws[i].clone();
            }
        }
    }
    (forest, total)
}

/// True iff `revealed` is an acyclic subset of the graph's edges with the same components.
pub fn check_spanning_forest<W: Weight>(g: &Graph<W>, revealed: &[Edge]) -> bool {
    spans(g.n(), g.edges(), revealed) && revealed.iter().all(|&e| g.station_of(e).is_some())
}

fn spans(n: u32, required: &[Edge], revealed: &[Edge]) -> bool {
    let mut sets = DisjointSet::new(n);
    for e in revealed {
        if e.v() > n || !sets.union(e.u(), e.v()) {
            return false;
        }
    }
    required.iter().all(|e| sets.connected(e.u(), e.v()))
}

/// Same predicate as [`check_spanning_forest`], computed by graph search.
pub fn check_spanning_forest_dfs<W: Weight>(g: &Graph<W>, revealed: &[Edge]) -> bool {
    let n = g.n() as usize;
    let edge_set: HashSet<Edge> = g.edges().iter().copied().collect();
    if revealed.iter().any(|e| !edge_set.contains(e)) {
        return false;
    }
    let distinct: HashSet<Edge> = revealed.iter().copied().collect();
    if distinct.len() != revealed.len() {
        return false;
    }
    let label = |edges: &[Edge]| -> Vec<usize> {
        let mut adj = vec![Vec::new(); n + 1];
        for e in edges {
            adj[e.u() as usize].push(e.v() as usize);
            adj[e.v() as usize].push(e.u() as usize);
        }
        let mut comp = vec![0; n + 1];
        let mut next = 0;
        for start in 1..=n {
            if comp[start] != 0 {
                continue;
            }
            next += 1;
            comp[start] = next;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if comp[y] == 0 {
                        comp[y] = next;
                        stack.push(y);
                    }
                }
            }
        }
        comp
    };
    let of_graph = label(g.edges());
    let of_forest = label(revealed);
    let components = of_forest.iter().skip(1).collect::<HashSet<_>>().len();
    // A forest on n vertices with k trees has exactly n - k edges.
    revealed.len() + components == n && (1..=n).all(|a| (1..=n).all(|b| (of_graph[a] == of_graph[b]) == (of_forest[a] == of_forest[b])))
}

/// Checks that `revealed` spans every edge held by a station woken before the
/// closing `c` steps, where the execution ends at the heard termination signal.
/// Edges of stations woken later may, but need not, appear in `revealed`.
pub fn check_c_correct<W: Weight>(
    trace: &ExecutionTrace<W>,
    schedule: &ActivationSchedule,
    g: &Graph<W>,
    c: u64,
    revealed: &[Edge],
) -> Result<bool> {
    let t_end = trace.termination_step().ok_or(Error::NoTermination)?;
    let in_scope: Vec<Edge> = g
        .stations()
        .filter(|&s| schedule.wake_of(s).is_some_and(|t| t + c < t_end))
        .map(|s| g.edge_of(s))
        .collect();
    let woken = |e: &Edge| g.station_of(*e).and_then(|s| schedule.wake_of(s)).is_some_and(|t| t <= t_end);
    Ok(revealed.iter().all(woken) && spans(g.n(), &in_scope, revealed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `a > 3|W|`.
    Overestimate,
    /// `a < |W|/3`.
    Underestimate,
    /// `|W|/3 <= a <= 3|W|`.
    Good,
}

impl Regime {
    pub fn classify(exponent: u32, contending: usize) -> Regime {
        let a = 3u128.checked_pow(exponent).unwrap_or(u128::MAX);
        let w = contending as u128;
        if a > 3 * w {
            Regime::Overestimate
        } else if a.saturating_mul(3) < w {
            Regime::Underestimate
        } else {
            Regime::Good
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Overestimate => "overestimate",
            Regime::Underestimate => "underestimate",
            Regime::Good => "good",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeCounts {
    pub silence: u64,
    pub collision: u64,
    pub heard: u64,
}

impl RegimeCounts {
    pub const MIN_SAMPLES: u64 = 500;

    pub fn total(&self) -> u64 {
        self.silence + self.collision + self.heard
    }

    /// Regimes with fewer than [`RegimeCounts::MIN_SAMPLES`] samples are not judged.
    pub fn is_sampled(&self) -> bool {
        self.total() >= Self::MIN_SAMPLES
    }

    pub fn frequency(&self, kind: FeedbackKind) -> f64 {
        let hits = match kind {
            FeedbackKind::Silence => self.silence,
            FeedbackKind::Collision => self.collision,
            FeedbackKind::Heard => self.heard,
        };
        hits as f64 / self.total().max(1) as f64
    }

    /// Binomial standard error of [`RegimeCounts::frequency`].
    pub fn std_error(&self, kind: FeedbackKind) -> f64 {
        let p = self.frequency(kind);
        (p * (1.0 - p) / self.total().max(1) as f64).sqrt()
    }
}

/// Outcome counts of random-broadcast steps, bucketed by how well `a` tracks `|W|`.
pub fn estimate_lemma_probabilities<'a>(samples: impl IntoIterator<Item = &'a ContentionSample>) -> BTreeMap<Regime, RegimeCounts> {
    let mut out: BTreeMap<Regime, RegimeCounts> =
        [Regime::Overestimate, Regime::Underestimate, Regime::Good].into_iter().map(|r| (r, RegimeCounts::default())).collect();
    for s in samples {
        if s.contending == 0 {
            continue;
        }
        let counts = out.get_mut(&Regime::classify(s.exponent, s.contending)).unwrap();
        match s.outcome {
            FeedbackKind::Silence => counts.silence += 1,
            FeedbackKind::Collision => counts.collision += 1,
            FeedbackKind::Heard => counts.heard += 1,
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub value: f64,
    pub samples: u64,
}

/// Summary of one checked run, written as one JSON object per line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub algorithm: AlgorithmName,
    pub seed: u64,
    pub steps: u64,
    pub forest_size: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight: Option<String>,
    pub checks: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub estimators: BTreeMap<String, Frequency>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    /// Where the trace of a failed run was written.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace_dump: Option<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.values().all(|&ok| ok)
    }

    /// Runs every applicable checker on `outcome`. Dynamic runs are judged by
    /// `c`-correctness, which needs the trace.
    pub fn build<W: Weight>(instance: &str, seed: u64, g: &Graph<W>, outcome: &RunOutcome<W>, c: u64) -> RunReport {
        let mut checks = BTreeMap::new();
        checks.insert("terminated".to_string(), !outcome.capped);
        let dynamic = outcome.schedule.iter().any(|(_, t)| t > 0);
        if dynamic {
            let acyclic = spans(g.n(), &[], &outcome.forest);
            checks.insert("forest-validity".to_string(), acyclic);
            let c_ok = match &outcome.trace {
                Some(trace) => check_c_correct(trace, &outcome.schedule, g, c, &outcome.forest).unwrap_or(false),
                None => false,
            };
            checks.insert("component-match".to_string(), c_ok);
        } else {
            checks.insert("forest-validity".to_string(), check_spanning_forest(g, &outcome.forest));
            let components = outcome.forest.len() + g.components() == g.n() as usize;
            checks.insert("component-match".to_string(), components);
        }
        if g.is_weighted() && outcome.algorithm.is_weighted() {
            let (_, best) = kruskal_msf(g);
            checks.insert("weight-optimality".to_string(), outcome.weight.as_ref() == Some(&best));
        }
        let mut estimators = BTreeMap::new();
        for (regime, counts) in estimate_lemma_probabilities(&outcome.samples) {
            if counts.total() == 0 {
                continue;
            }
            for kind in [FeedbackKind::Silence, FeedbackKind::Collision, FeedbackKind::Heard] {
                estimators.insert(
                    format!("{}.{}", regime.as_str(), kind.as_str()),
                    Frequency { value: counts.frequency(kind), samples: counts.total() },
                );
            }
        }
        RunReport {
            instance: instance.to_string(),
            algorithm: outcome.algorithm,
            seed,
            steps: outcome.steps,
            forest_size: outcome.forest.len(),
            weight: outcome.weight.as_ref().map(|w| w.to_token()),
            checks,
            estimators,
            error: None,
            trace_dump: None,
        }
    }

    /// A report for a run that stopped with an error, e.g. a step-cap hit.
    pub fn failed(instance: &str, algorithm: AlgorithmName, seed: u64, err: &Error) -> RunReport {
        RunReport {
            instance: instance.to_string(),
            algorithm,
            seed,
            steps: match err {
                Error::StepCap(cap) => *cap,
                _ => 0,
            },
            forest_size: 0,
            weight: None,
            checks: BTreeMap::new(),
            estimators: BTreeMap::new(),
            error: Some(err.to_string()),
            trace_dump: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{edge_from_index, edge_universe, WeightedEdge};
    use crate::Rational;
    use proptest::prelude::*;

    fn e(u: u32, v: u32) -> Edge {
        Edge::new(u, v).unwrap()
    }

    fn int(k: i64) -> Rational {
        Rational::from_integer(k.into())
    }

    fn weighted(n: u32, es: &[(u32, u32, i64)]) -> Graph<Rational> {
        Graph::weighted(n, es.iter().map(|&(u, v, w)| WeightedEdge { edge: e(u, v), weight: int(w) }).collect()).unwrap()
    }

    // Minimum total over all (n - components)-subsets that form a forest.
    fn brute_force_msf_weight(g: &Graph<Rational>) -> Rational {
        let target = g.n() as usize - g.components();
        let m = g.m();
        let mut best: Option<Rational> = None;
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != target {
                continue;
            }
            let chosen: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let mut sets = DisjointSet::new(g.n());
            if chosen.iter().all(|&i| sets.union(g.edges()[i].u(), g.edges()[i].v())) {
                let w = chosen.iter().fold(int(0), |acc, &i| acc + g.weights().unwrap()[i].clone());
                if best.as_ref().map_or(true, |b| w < *b) {
                    best = Some(w);
                }
            }
        }
        best.unwrap_or_else(|| int(0))
    }

    #[test]
    fn kruskal_examples() {
        let tri = weighted(3, &[(1, 2, 1), (2, 3, 2), (1, 3, 3)]);
        assert_eq!(kruskal_msf(&tri).1, int(3));
        let two = weighted(4, &[(1, 2, 5), (3, 4, 7)]);
        assert_eq!(kruskal_msf(&two).0.len(), 4 - 2);
    }

    #[test]
    fn kruskal_matches_enumeration_on_k6() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        for seed in 0..5 {
            let mut ws: Vec<i64> = (1..=15).collect();
            ws.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let es: Vec<(u32, u32, i64)> =
                (0..15).map(|r| edge_from_index(r, 6).unwrap()).zip(ws).map(|(x, w)| (x.u(), x.v(), w)).collect();
            let g = weighted(6, &es);
            assert_eq!(kruskal_msf(&g).1, brute_force_msf_weight(&g));
        }
    }

    #[test]
    fn spanning_forest_examples() {
        let empty: Graph<Rational> = Graph::new(3, vec![]).unwrap();
        assert!(check_spanning_forest(&empty, &[]));
        let path: Graph<Rational> = Graph::new(4, vec![e(1, 2), e(2, 3), e(3, 4)]).unwrap();
        assert!(check_spanning_forest(&path, &[e(1, 2), e(2, 3), e(3, 4)]));
        assert!(!check_spanning_forest(&path, &[e(1, 2), e(3, 4)]));
        assert!(!check_spanning_forest_dfs(&path, &[e(1, 2), e(3, 4)]));
    }

    #[test]
    fn regimes_split_at_factor_three() {
        assert_eq!(Regime::classify(2, 2), Regime::Overestimate);
        assert_eq!(Regime::classify(2, 3), Regime::Good);
        assert_eq!(Regime::classify(2, 27), Regime::Good);
        assert_eq!(Regime::classify(2, 28), Regime::Underestimate);
        assert_eq!(Regime::classify(90, 1), Regime::Overestimate);
    }

    fn small_graph() -> impl Strategy<Value = (u32, Vec<Edge>, Vec<bool>)> {
        (2u32..=7).prop_flat_map(|n| {
            let u = edge_universe(n);
            (Just(n), prop::collection::btree_set(0..u, 0..=u as usize), prop::collection::vec(any::<bool>(), u as usize))
                .prop_map(move |(n, ranks, keep)| (n, ranks.into_iter().map(|r| edge_from_index(r, n).unwrap()).collect(), keep))
        })
    }

    proptest! {
        #[test]
        fn checkers_agree((n, edges, keep) in small_graph()) {
            let g: Graph<Rational> = Graph::new(n, edges.clone()).unwrap();
            let subset: Vec<Edge> = edges.iter().zip(&keep).filter(|(_, &k)| k).map(|(e, _)| *e).collect();
            prop_assert_eq!(check_spanning_forest(&g, &subset), check_spanning_forest_dfs(&g, &subset));
            let (msf, _) = kruskal_msf(&g);
            prop_assert!(check_spanning_forest(&g, &msf));
            prop_assert!(check_spanning_forest_dfs(&g, &msf));
        }

        #[test]
        fn kruskal_matches_enumeration(n in 2u32..=6, raw in prop::collection::vec(1i64..6, 15)) {
            let u = edge_universe(n) as usize;
            let es: Vec<(u32, u32, i64)> = (0..u).map(|r| edge_from_index(r as u64, n).unwrap()).zip(raw).map(|(x, w)| (x.u(), x.v(), w)).collect();
            let g = weighted(n, &es);
            prop_assert_eq!(kruskal_msf(&g).1, brute_force_msf_weight(&g));
        }
    }
}
