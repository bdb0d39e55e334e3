//! Algorithm selection by name and single-run execution.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    oblivious_roundrobin, ContentionSample, DetAdversarialStation, DetGeneralStation, DetSimpleStation, ObliviousStation,
    RandSimpleStation, RandWeightedGeneralStation, RandWeightedStation, Simulation, Station, StationOutput,
};
use crate::adversary::ActivationSchedule;
use crate::channel::{ExecutionTrace, Step};
use crate::error::{Error, Result};
use crate::graph::{edge_universe, DisjointSet, Edge, Graph};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmName {
    DetSimple,
    DetGeneral,
    RandSimple,
    RandWeighted,
    RandWeightedGeneral,
    DetAdversarial,
    ObliviousRr,
}

impl AlgorithmName {
    pub const ALL: [AlgorithmName; 7] = [
        AlgorithmName::DetSimple,
        AlgorithmName::DetGeneral,
        AlgorithmName::RandSimple,
        AlgorithmName::RandWeighted,
        AlgorithmName::RandWeightedGeneral,
        AlgorithmName::DetAdversarial,
        AlgorithmName::ObliviousRr,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmName::DetSimple => "det-simple",
            AlgorithmName::DetGeneral => "det-general",
            AlgorithmName::RandSimple => "rand-simple",
            AlgorithmName::RandWeighted => "rand-weighted",
            AlgorithmName::RandWeightedGeneral => "rand-weighted-general",
            AlgorithmName::DetAdversarial => "det-adversarial",
            AlgorithmName::ObliviousRr => "oblivious-rr",
        }
    }

    /// Whether the algorithm needs edge weights.
    pub fn is_weighted(&self) -> bool {
        matches!(self, AlgorithmName::RandWeighted | AlgorithmName::RandWeightedGeneral)
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, AlgorithmName::RandSimple | AlgorithmName::RandWeighted | AlgorithmName::RandWeightedGeneral)
    }

    /// A step budget no correct run on `m` edges over `n` vertices can exceed.
    /// `rand-weighted` has no worst-case bound, so its budget is merely large.
    pub fn default_cap(&self, n: u32, m: usize) -> Step {
        let m = m as u64;
        let lg = 64 - edge_universe(n).max(1).leading_zeros() as u64;
        match self {
            AlgorithmName::DetSimple => (m + 1) * (lg + 3),
            AlgorithmName::DetGeneral | AlgorithmName::RandWeightedGeneral => 2 * (m + 1),
            AlgorithmName::RandSimple => 4 * (m + 1),
            AlgorithmName::RandWeighted => 1_000_000 + 10_000 * m,
            AlgorithmName::DetAdversarial => (m + 1) * (lg + 5) + lg + 3,
            AlgorithmName::ObliviousRr => m + 1,
        }
    }
}

impl fmt::Display for AlgorithmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: u64,
    /// Defaults to [`AlgorithmName::default_cap`].
    pub cap: Option<Step>,
    /// Per-step lockstep and partition assertions.
    pub checks: bool,
    pub samples: bool,
    pub trace: bool,
    /// Wake-up times; defaults to every station at step 0.
    pub schedule: Option<ActivationSchedule>,
    /// Return the partial run instead of [`Error::StepCap`] when the cap is hit.
    pub keep_capped: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutcome<W> {
    pub algorithm: AlgorithmName,
    pub steps: Step,
    /// The output spanning forest.
    pub forest: Vec<Edge>,
    /// Total weight of `forest`, for weighted inputs.
    pub weight: Option<W>,
    pub trace: Option<ExecutionTrace<W>>,
    pub samples: Vec<ContentionSample>,
    pub schedule: ActivationSchedule,
    /// The step cap was hit; only set with [`RunOptions::keep_capped`].
    pub capped: bool,
}

/// Picks the forest for a run that learned every edge: Kruskal by
/// `(weight, edge)` when weights are known, otherwise the lexicographically
/// first spanning forest.
pub fn designate_forest<W: Weight>(n: u32, known: &[(Edge, Option<W>)]) -> Vec<Edge> {
    let mut order: Vec<&(Edge, Option<W>)> = known.iter().collect();
    order.sort_by(|(ea, wa), (eb, wb)| {
        let by_weight = match (wa, wb) {
            (Some(a), Some(b)) => a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal),
            _ => std::cmp::Ordering::Equal,
        };
        by_weight.then(ea.cmp(eb))
    });
    let mut sets = DisjointSet::new(n);
    order.into_iter().filter(|(e, _)| sets.union(e.u(), e.v())).map(|(e, _)| *e).collect()
}

fn execute<S: Station>(stations: Vec<S>, schedule: &ActivationSchedule, cap: Step, opts: &RunOptions) -> Result<(Simulation<S>, bool)> {
    let mut sim = Simulation::new(stations, schedule);
    if opts.checks {
        sim = sim.with_checks();
    }
    if opts.samples {
        sim = sim.with_samples();
    }
    if !opts.trace {
        sim = sim.without_trace();
    }
    match sim.run(cap) {
        Ok(()) => Ok((sim, false)),
        Err(Error::StepCap(_)) if opts.keep_capped => Ok((sim, true)),
        Err(e) => Err(e),
    }
}

fn require_weights<W: Weight>(graph: &Graph<W>, name: AlgorithmName) -> Result<&[W]> {
    graph.weights().ok_or_else(|| Error::Precondition(format!("{name} needs a weighted graph")))
}

/// Runs `name` on `graph` until every active station halts.
pub fn run_algorithm<W: Weight>(name: AlgorithmName, graph: &Graph<W>, opts: &RunOptions) -> Result<RunOutcome<W>> {
    let n = graph.n();
    let cap = opts.cap.unwrap_or_else(|| name.default_cap(n, graph.m()));
    let schedule = opts.schedule.clone().unwrap_or_else(|| ActivationSchedule::all_at_start(graph.m()));
    if name != AlgorithmName::DetAdversarial && schedule.iter().any(|(_, t)| t > 0) {
        return Err(Error::Precondition(format!("{name} runs only in the static model")));
    }
    let seed = opts.seed;
    let edges = graph.edges();

    macro_rules! finish {
        ($sim:expr) => {{
            let (sim, capped) = $sim;
            let steps = sim.now();
            let forest = match sim.output() {
                Some(StationOutput::Revealed(r)) => r,
                Some(StationOutput::AllEdges(all)) => designate_forest(n, &all),
                None => Vec::new(),
            };
            let samples = sim.samples().to_vec();
            let weight = if graph.is_weighted() { graph.total_weight(&forest) } else { None };
            let trace = opts.trace.then(|| sim.into_trace());
            RunOutcome { algorithm: name, steps, forest, weight, trace, samples, schedule, capped }
        }};
    }

    let ids = graph.stations();
    Ok(match name {
        AlgorithmName::DetSimple => {
            finish!(execute(ids.map(|s| DetSimpleStation::new(s, n, edges[s as usize - 1])).collect(), &schedule, cap, opts)?)
        }
        AlgorithmName::DetGeneral => {
            finish!(execute(ids.map(|s| DetGeneralStation::new(s, n, edges[s as usize - 1])).collect(), &schedule, cap, opts)?)
        }
        AlgorithmName::RandSimple => finish!(execute(
            ids.map(|s| RandSimpleStation::new(s, n, edges[s as usize - 1], seed)).collect(),
            &schedule,
            cap,
            opts
        )?),
        AlgorithmName::RandWeighted => {
            let ws = require_weights(graph, name)?;
            finish!(execute(
                ids.map(|s| RandWeightedStation::new(s, n, edges[s as usize - 1], ws[s as usize - 1].clone(), seed))
                    .collect(),
                &schedule,
                cap,
                opts
            )?)
        }
        AlgorithmName::RandWeightedGeneral => {
            let ws = require_weights(graph, name)?;
            finish!(execute(
                ids.map(|s| RandWeightedGeneralStation::new(s, n, edges[s as usize - 1], ws[s as usize - 1].clone(), seed))
                    .collect(),
                &schedule,
                cap,
                opts
            )?)
        }
        AlgorithmName::DetAdversarial => {
            if graph.m() > 0 && !schedule.iter().any(|(_, t)| t == 0) {
                return Err(Error::Precondition("no station is active at step 0".into()));
            }
            finish!(execute(
                ids.map(|s| DetAdversarialStation::new(s, n, edges[s as usize - 1])).collect(),
                &schedule,
                cap,
                opts
            )?)
        }
        AlgorithmName::ObliviousRr => {
            let rr = Arc::new(oblivious_roundrobin(n, graph.m()));
            finish!(execute(
                ids.map(|s| ObliviousStation::new(s, edges[s as usize - 1], graph.weight_of(s).cloned(), rr.clone()).halting_on_silence())
                    .collect(),
                &schedule,
                cap,
                opts
            )?)
        }
    })
}
