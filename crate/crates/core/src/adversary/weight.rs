//! Online weight assignment against deterministic weighted algorithms.
//!
//! Every uncommitted station keeps a pool of candidate weights `1/j`, and one
//! simulated copy of the station per candidate. At each step the adversary
//! looks at which candidates would broadcast and picks weights so that no
//! lighter-than-committed edge is ever heard.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::ActivationSchedule;
use crate::channel::{Feedback, FeedbackKind, Message, Step};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, StationId, WeightedEdge};
use crate::station::{Simulation, Station};
use crate::weight::unit_fraction;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightAdversaryParams {
    /// Candidate weights are `1/j` for `j = 1..=pool`.
    pub pool: u64,
    /// A station counts as forced to broadcast (or to stay silent) when more than this many candidates agree.
    pub threshold: usize,
    /// Number of steps the adversary controls.
    pub horizon: Step,
    /// Step budget for the replay on the final weights.
    pub cap: Step,
}

impl WeightAdversaryParams {
    /// `J = 4m`, `τ = 2`, horizon `floor(m/2)`.
    pub fn for_edges(m: usize) -> Self {
        WeightAdversaryParams { pool: 4 * m as u64, threshold: 2, horizon: m as Step / 2, cap: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    pub station: StationId,
    pub step: Step,
    pub j: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightAdversaryOutcome {
    /// Final weight `1/j` of every station, as the denominator `j`.
    pub denominators: Vec<u64>,
    pub commitments: Vec<Commitment>,
    /// Feedback kinds the adversary produced, one per controlled step.
    pub feedback: Vec<FeedbackKind>,
    /// Whether the replay on the final weights reproduced `feedback`.
    pub replay_consistent: bool,
    /// 1-based step at which a minimum-weight edge was first heard in the replay.
    pub min_heard_step: Option<Step>,
    /// Steps the replay ran until termination.
    pub replay_steps: Step,
}

impl WeightAdversaryOutcome {
    pub fn weighted_graph(&self, g: &Graph<Rational>) -> Graph<Rational> {
        assign(g, &self.denominators)
    }
}

fn assign(g: &Graph<Rational>, denominators: &[u64]) -> Graph<Rational> {
    let edges = g.stations().map(|s| WeightedEdge { edge: g.edge_of(s), weight: unit_fraction(denominators[s as usize - 1]) });
    Graph::weighted(g.n(), edges.collect()).expect("station edges are valid")
}

/// Hamiltonian path `1-2-...-n` plus random chords, with the smallest `n` that fits `m` edges.
pub fn path_with_chords(m: usize, seed: u64) -> Graph<Rational> {
    let mut n: u32 = 2;
    while (n as usize) * (n as usize - 1) / 2 < m {
        n += 1;
    }
    let mut edges: Vec<Edge> = (1..n).map(|i| Edge::new(i, i + 1).unwrap()).take(m).collect();
    let mut chords: Vec<Edge> =
        (1..=n).flat_map(|u| (u + 2..=n).map(move |v| Edge::new(u, v).unwrap())).collect();
    chords.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    edges.extend(chords.into_iter().take(m - edges.len()));
    Graph::new(n, edges).expect("distinct edges")
}

struct Uncommitted<S> {
    id: StationId,
    /// Candidate `j` and the station copy that assumes weight `1/j`.
    copies: BTreeMap<u64, S>,
}

/// Runs the adversary against stations built by `make(id, edge, weight)`.
///
/// `make` must give a deterministic station (randomized algorithms with a
/// fixed seed qualify). The returned assignment is then replayed on the real
/// channel to confirm the adversary's view and measure when a minimum-weight
/// edge is first heard.
pub fn weight_adversary<S, F>(g: &Graph<Rational>, params: WeightAdversaryParams, make: F) -> Result<WeightAdversaryOutcome>
where
    S: Station<W = Rational>,
    F: Fn(StationId, Edge, Rational) -> S,
{
    let tau = params.threshold;
    let mut open: Vec<Uncommitted<S>> = g
        .stations()
        .map(|id| {
            let copies = (1..=params.pool)
                .map(|j| {
                    let mut s = make(id, g.edge_of(id), unit_fraction(j));
                    s.activate(0);
                    (j, s)
                })
                .collect();
            Uncommitted { id, copies }
        })
        .collect();
    if let Some(u) = open.iter().find(|u| u.copies.len() <= tau) {
        return Err(Error::AdversaryExhausted { step: 0, station: u.id });
    }
    let mut committed: Vec<(Commitment, S)> = Vec::new();
    let mut feedback_log = Vec::new();

    for step in 0..params.horizon {
        if open.is_empty() {
            break;
        }
        let all_halted = committed.iter().all(|(_, s)| s.halted()) && open.iter().all(|u| u.copies.values().all(|s| s.halted()));
        if all_halted {
            break;
        }

        let mut attempts: Vec<(StationId, Message<Rational>)> = Vec::new();
        for (c, s) in committed.iter_mut() {
            if !s.halted() {
                if let Some(msg) = s.decide(step) {
                    attempts.push((c.station, msg));
                }
            }
        }
        // For each open station: candidates that broadcast, with their messages.
        let mut loud: Vec<BTreeMap<u64, Message<Rational>>> = Vec::with_capacity(open.len());
        for u in open.iter_mut() {
            let mut b = BTreeMap::new();
            for (&j, s) in u.copies.iter_mut() {
                if !s.halted() {
                    if let Some(msg) = s.decide(step) {
                        b.insert(j, msg);
                    }
                }
            }
            loud.push(b);
        }

        let mut forced = Vec::new();
        for (idx, u) in open.iter().enumerate() {
            let broadcasting = loud[idx].len();
            let silent = u.copies.len() - broadcasting;
            match (broadcasting > tau, silent > tau) {
                (true, false) => forced.push(idx),
                (false, false) => return Err(Error::AdversaryExhausted { step, station: u.id }),
                _ => {}
            }
        }

        let mut newly: Vec<(usize, u64)> = Vec::new();
        let floor = match forced.len() {
            0 => None,
            1 => {
                let idx = forced[0];
                let j = *loud[idx].keys().next().unwrap();
                newly.push((idx, j));
                Some(j)
            }
            _ => {
                let (a, b) = (forced[0], forced[1]);
                let ja = *loud[a].keys().next().unwrap();
                let jb = *loud[b].keys().find(|&&j| j != ja).unwrap();
                newly.push((a, ja));
                newly.push((b, jb));
                Some(ja.max(jb))
            }
        };
        let collision_forced = newly.len() >= 2;

        for &(idx, j) in &newly {
            attempts.push((open[idx].id, loud[idx][&j].clone()));
        }
        let feedback = match attempts.len() {
            0 => Feedback::Silence,
            1 => Feedback::Heard(attempts.pop().unwrap().1),
            _ => Feedback::Collision,
        };
        feedback_log.push(feedback.kind());

        let chosen: BTreeMap<usize, u64> = newly.iter().copied().collect();
        let mut still_open = Vec::with_capacity(open.len());
        for (idx, mut u) in open.into_iter().enumerate() {
            if let Some(&j) = chosen.get(&idx) {
                let mut s = u.copies.remove(&j).unwrap();
                if !s.halted() {
                    s.observe(step, &feedback)?;
                }
                committed.push((Commitment { station: u.id, step, j }, s));
                continue;
            }
            let keep = |j: &u64| floor.map_or(true, |f| *j > f) && (collision_forced || !loud[idx].contains_key(j));
            u.copies.retain(|j, _| keep(j));
            for s in u.copies.values_mut() {
                if !s.halted() {
                    s.observe(step, &feedback)?;
                }
            }
            if u.copies.len() <= tau {
                return Err(Error::AdversaryExhausted { step, station: u.id });
            }
            still_open.push(u);
        }
        open = still_open;
        for (_, s) in committed.iter_mut().filter(|(c, _)| c.step < step) {
            if !s.halted() {
                s.observe(step, &feedback)?;
            }
        }
    }

    // Open stations take the largest remaining denominators, so they are lighter than every commitment.
    let mut denominators = vec![0u64; g.m()];
    for (c, _) in &committed {
        denominators[c.station as usize - 1] = c.j;
    }
    let mut used: Vec<u64> = committed.iter().map(|(c, _)| c.j).collect();
    for u in &open {
        let j = *u.copies.keys().rev().find(|j| !used.contains(j)).expect("pools hold more than τ candidates");
        used.push(j);
        denominators[u.id as usize - 1] = j;
    }
    let commitments: Vec<Commitment> = committed.iter().map(|(c, _)| *c).collect();

    let weighted = assign(g, &denominators);
    let stations: Vec<S> = weighted.stations().map(|s| make(s, weighted.edge_of(s), weighted.weight_of(s).unwrap().clone())).collect();
    let mut sim = Simulation::new(stations, &ActivationSchedule::all_at_start(g.m()));
    let lightest_j = *denominators.iter().max().unwrap_or(&0);
    let mut replay_consistent = true;
    let mut min_heard_step = None;
    while !sim.finished() && sim.now() < params.cap {
        let t = sim.now();
        let fb = sim.step()?;
        if let Some(&expected) = feedback_log.get(t as usize) {
            replay_consistent &= fb.kind() == expected;
        }
        if min_heard_step.is_none() {
            let lightest = fb
                .heard()
                .and_then(|m| match m {
                    Message::Edge(e) | Message::WeightedEdge(e, _) => Some(*e),
                    Message::Weight(w) => weighted.stations().find(|&s| weighted.weight_of(s) == Some(w)).map(|s| weighted.edge_of(s)),
                    _ => None,
                })
                .and_then(|e| weighted.station_of(e))
                .is_some_and(|s| denominators[s as usize - 1] == lightest_j);
            if lightest {
                min_heard_step = Some(t + 1);
            }
        }
    }
    if !sim.finished() {
        return Err(Error::StepCap(params.cap));
    }
    replay_consistent &= sim.now() as usize >= feedback_log.len();
    Ok(WeightAdversaryOutcome {
        denominators,
        commitments,
        feedback: feedback_log,
        replay_consistent,
        min_heard_step,
        replay_steps: sim.now(),
    })
}
