//! Adaptive wake-up adversary against deterministic algorithms on forests.
//!
//! The execution is cut into stages of `L = floor(lg(m/4))` steps. At the
//! start of a stage the adversary forks the simulation, wakes a shadow copy
//! of every passive station and watches which of them the algorithm would
//! ask to broadcast. Halving the passive set by those queries leaves stations
//! that stay together for the whole stage: whenever one broadcasts, so do the
//! others, and none is heard alone.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::adversary::ActivationSchedule;
use crate::channel::Step;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, StationId};
use crate::station::{Simulation, Station};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub start: Step,
    pub activated: Vec<StationId>,
    /// Size of the passive pool after each halving.
    pub pool_sizes: Vec<usize>,
    /// Whether a forked run confirmed that no activated edge is heard within the stage.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationOutcome {
    pub schedule: ActivationSchedule,
    pub stages: Vec<Stage>,
    pub stage_length: u64,
    /// Steps until every active station halted.
    pub steps: Step,
    /// Activated stations whose edge was heard during their own stage.
    pub heard_in_stage: Vec<StationId>,
    pub forest: Vec<Edge>,
}

impl ActivationOutcome {
    /// `floor(m/8) * floor(lg(m/4))`.
    pub fn forced_bound(&self) -> u64 {
        self.stages.len() as u64 * self.stage_length
    }
}

/// `floor(lg(m/4))`, or 0 when `m < 8`.
pub fn stage_length(m: usize) -> u64 {
    let q = m / 4;
    if q < 2 {
        0
    } else {
        (usize::BITS - 1 - q.leading_zeros()) as u64
    }
}

/// Alternative activation sets tried when the halving choice fails its forked check.
const MAX_RETRIES: usize = 24;

/// Plays the adversary against stations built by `make(id, edge)` on the
/// forest `g`, then runs the algorithm to termination.
pub fn activation_lower_bound<W, S, F>(g: &Graph<W>, c: u64, cap: Step, make: F) -> Result<ActivationOutcome>
where
    W: Weight,
    S: Station<W = W>,
    F: Fn(StationId, Edge) -> S,
{
    let m = g.m();
    let l = stage_length(m);
    if g.components() + m != g.n() as usize {
        return Err(Error::Precondition("the input graph must be a forest".into()));
    }
    if c >= l {
        return Err(Error::Precondition(format!("need c < floor(lg(m/4)) = {l}, got c = {c}")));
    }
    let stations: Vec<S> = g.stations().map(|s| make(s, g.edge_of(s))).collect();
    let mut sim = Simulation::new(stations, &ActivationSchedule::new());
    let mut schedule = ActivationSchedule::new();
    let mut stages = Vec::new();
    let mut heard_in_stage = Vec::new();

    for _ in 0..m / 8 {
        if sim.now() > 0 && sim.finished() {
            break;
        }
        let start = sim.now();
        let passive: Vec<StationId> = g.stations().filter(|&s| schedule.wake_of(s).is_none()).collect();

        let mut fork = sim.fork();
        for &s in &passive {
            fork.add_shadow(make(s, g.edge_of(s)));
        }
        let mut by_id: BTreeSet<StationId> = passive.iter().copied().collect();
        let mut by_edge: BTreeSet<StationId> = by_id.clone();
        let mut pool_sizes = vec![by_id.len()];
        for _ in 0..l {
            fork.step()?;
            let queried: BTreeSet<StationId> = fork.shadow_attempts().iter().copied().collect();
            by_id = keep_larger(&by_id, &queried);
            by_edge = keep_larger(&by_edge, &queried);
            pool_sizes.push(by_id.len());
        }
        if by_id.len() < 2 || by_edge.len() < 2 {
            return Err(Error::Construction(format!("halving left {} stations at step {start}; instance too small", by_id.len())));
        }

        let mut edge_order: Vec<StationId> = by_edge.iter().copied().collect();
        edge_order.sort_by_key(|&s| g.edge_of(s));
        let ids: Vec<StationId> = by_id.iter().copied().collect();
        let mut candidates: Vec<Vec<StationId>> = vec![union(&ids[..2], &edge_order[..2])];
        candidates.extend(ids.chunks_exact(2).skip(1).map(|p| p.to_vec()));
        candidates.extend(edge_order.chunks_exact(2).skip(1).map(|p| p.to_vec()));

        let mut chosen = None;
        for cand in candidates.iter().take(MAX_RETRIES) {
            if heard_within(&sim, cand, l, g)?.is_empty() {
                chosen = Some(cand.clone());
                break;
            }
        }
        let verified = chosen.is_some();
        let activated = chosen.unwrap_or_else(|| candidates[0].clone());
        for &s in &activated {
            schedule.set(s, start);
        }
        sim.activate_now(activated.iter().copied());
        for _ in 0..l {
            let fb = sim.step()?;
            if let Some(s) = fb.heard_edge().and_then(|e| g.station_of(e)) {
                if activated.contains(&s) {
                    heard_in_stage.push(s);
                }
            }
        }
        stages.push(Stage { start, activated, pool_sizes, verified });
    }

    sim.run(cap)?;
    let forest = match sim.output() {
        Some(crate::station::StationOutput::Revealed(r)) => r,
        _ => Vec::new(),
    };
    Ok(ActivationOutcome { schedule, stages, stage_length: l, steps: sim.now(), heard_in_stage, forest })
}

fn keep_larger(set: &BTreeSet<StationId>, queried: &BTreeSet<StationId>) -> BTreeSet<StationId> {
    let inside: BTreeSet<StationId> = set.intersection(queried).copied().collect();
    if 2 * inside.len() >= set.len() {
        inside
    } else {
        set.difference(queried).copied().collect()
    }
}

fn union(a: &[StationId], b: &[StationId]) -> Vec<StationId> {
    let all: BTreeSet<StationId> = a.iter().chain(b).copied().collect();
    all.into_iter().collect()
}

/// Stations of `wake` whose edge a fork hears within `steps` steps of waking them now.
fn heard_within<S: Station, W: Weight>(sim: &Simulation<S>, wake: &[StationId], steps: u64, g: &Graph<W>) -> Result<Vec<StationId>>
where
    S: Station<W = W>,
{
    let mut fork = sim.fork();
    fork.activate_now(wake.iter().copied());
    let mut heard = Vec::new();
    for _ in 0..steps {
        let fb = fork.step()?;
        if let Some(s) = fb.heard_edge().and_then(|e| g.station_of(e)) {
            if wake.contains(&s) {
                heard.push(s);
            }
        }
    }
    Ok(heard)
}
