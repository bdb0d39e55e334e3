//! Oblivious algorithms: the query of every step is fixed in advance.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Simulation, Station, StationOutput};
use crate::adversary::ActivationSchedule;
use crate::channel::{ExecutionTrace, Feedback, Message, Step};
use crate::error::Result;
use crate::graph::{Edge, Graph, StationId};
use crate::weight::Weight;

/// Stations specified by ID or by edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Query {
    pub ids: BTreeSet<StationId>,
    pub edges: BTreeSet<Edge>,
}

impl Query {
    pub fn specifies(&self, id: StationId, edge: Edge) -> bool {
        self.ids.contains(&id) || self.edges.contains(&edge)
    }
}

/// A fixed query sequence `Q_1, Q_2, ...`, indexed from 1.
pub trait ObliviousSchedule: Send + Sync {
    fn specifies(&self, index: u64, id: StationId, edge: Edge) -> bool;

    fn query(&self, index: u64) -> Query;
}

/// `Q_i = {((i - 1) mod (m + 1)) + 1}`: every ID in turn, then one empty slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundRobin {
    m: u64,
}

pub fn oblivious_roundrobin(_n: u32, m: usize) -> RoundRobin {
    RoundRobin { m: m as u64 }
}

impl RoundRobin {
    fn slot(&self, index: u64) -> u64 {
        (index - 1) % (self.m + 1) + 1
    }
}

impl ObliviousSchedule for RoundRobin {
    fn specifies(&self, index: u64, id: StationId, _edge: Edge) -> bool {
        self.slot(index) == id as u64
    }

    fn query(&self, index: u64) -> Query {
        let slot = self.slot(index);
        let ids = if slot <= self.m { BTreeSet::from([slot as StationId]) } else { BTreeSet::new() };
        Query { ids, edges: BTreeSet::new() }
    }
}

/// Queries given as edge sets; queries past the end are empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeQueries {
    queries: Vec<BTreeSet<Edge>>,
}

impl EdgeQueries {
    pub fn new(queries: impl IntoIterator<Item = impl IntoIterator<Item = Edge>>) -> Self {
        EdgeQueries { queries: queries.into_iter().map(|q| q.into_iter().collect()).collect() }
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Query `index`, counted from 1.
    pub fn get(&self, index: u64) -> Option<&BTreeSet<Edge>> {
        index.checked_sub(1).and_then(|i| self.queries.get(i as usize))
    }

    pub fn as_lists(&self) -> Vec<Vec<Edge>> {
        self.queries.iter().map(|q| q.iter().copied().collect()).collect()
    }
}

impl ObliviousSchedule for EdgeQueries {
    fn specifies(&self, index: u64, _id: StationId, edge: Edge) -> bool {
        self.get(index).is_some_and(|q| q.contains(&edge))
    }

    fn query(&self, index: u64) -> Query {
        Query { ids: BTreeSet::new(), edges: self.get(index).cloned().unwrap_or_default() }
    }
}

/// Broadcasts whenever the schedule specifies it, and records what it hears.
#[derive(Debug)]
pub struct ObliviousStation<W, S> {
    id: StationId,
    edge: Edge,
    weight: Option<W>,
    schedule: Arc<S>,
    elapsed: u64,
    heard: Vec<(Edge, Option<W>)>,
    halt_on_silence: bool,
    done: bool,
}

impl<W: Clone, S> Clone for ObliviousStation<W, S> {
    fn clone(&self) -> Self {
        ObliviousStation {
            id: self.id,
            edge: self.edge,
            weight: self.weight.clone(),
            schedule: Arc::clone(&self.schedule),
            elapsed: self.elapsed,
            heard: self.heard.clone(),
            halt_on_silence: self.halt_on_silence,
            done: self.done,
        }
    }
}

impl<W: Weight, S: ObliviousSchedule> ObliviousStation<W, S> {
    pub fn new(id: StationId, edge: Edge, weight: Option<W>, schedule: Arc<S>) -> Self {
        ObliviousStation { id, edge, weight, schedule, elapsed: 0, heard: Vec::new(), halt_on_silence: false, done: false }
    }

    /// Stop at the first silent step, as the round-robin baseline does after its sweep.
    pub fn halting_on_silence(mut self) -> Self {
        self.halt_on_silence = true;
        self
    }
}

impl<W: Weight, S: ObliviousSchedule> Station for ObliviousStation<W, S> {
    type W = W;

    fn id(&self) -> StationId {
        self.id
    }

    fn edge(&self) -> Edge {
        self.edge
    }

    fn decide(&mut self, _step: Step) -> Option<Message<W>> {
        if self.done || !self.schedule.specifies(self.elapsed + 1, self.id, self.edge) {
            return None;
        }
        Some(match &self.weight {
            Some(w) => Message::WeightedEdge(self.edge, w.clone()),
            None => Message::Edge(self.edge),
        })
    }

    fn observe(&mut self, _step: Step, feedback: &Feedback<W>) -> Result<()> {
        match feedback.heard() {
            Some(Message::WeightedEdge(e, w)) => self.heard.push((*e, Some(w.clone()))),
            Some(Message::Edge(e)) => self.heard.push((*e, None)),
            _ => {}
        }
        if self.halt_on_silence && feedback.is_silence() {
            self.done = true;
        }
        self.elapsed += 1;
        Ok(())
    }

    fn halted(&self) -> bool {
        self.done
    }

    fn output(&self) -> Option<StationOutput<W>> {
        Some(StationOutput::AllEdges(self.heard.clone()))
    }
}

/// Runs the schedule on `graph` for `steps` steps with every station active.
pub fn run_oblivious<W: Weight, S: ObliviousSchedule>(graph: &Graph<W>, schedule: S, steps: u64) -> Result<ExecutionTrace<W>> {
    let schedule = Arc::new(schedule);
    let stations = graph
        .stations()
        .map(|s| ObliviousStation::new(s, graph.edge_of(s), graph.weight_of(s).cloned(), schedule.clone()))
        .collect();
    let mut sim = Simulation::new(stations, &ActivationSchedule::all_at_start(graph.m()));
    sim.run_steps(steps)?;
    Ok(sim.into_trace())
}
