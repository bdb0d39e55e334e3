use std::marker::PhantomData;

use super::{digest, EdgeStatus, LocalForest, ResolveOutcome, Resolver, Station, StationOutput};
use crate::channel::{Feedback, Message, Step};
use crate::error::{Error, Result};
use crate::graph::{edge_index, edge_universe, Edge, StationId};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Phase {
    /// Not yet activated.
    Passive,
    /// Initial stations isolate the minimum ID; its holder becomes the leader.
    Election(Resolver),
    /// Late stations stay quiet until the leader's next update.
    AwaitUpdate,
    Probe,
    /// The probe was silent; the leader announces termination.
    Terminate,
    Resolve(Resolver),
    /// The leader broadcasts every revealed edge.
    Update,
}

/// Deterministic algorithm for stations woken by an adversary.
#[derive(Clone, Debug)]
pub struct DetAdversarialStation<W> {
    id: StationId,
    n: u32,
    edge: Edge,
    rank: u64,
    local: Option<LocalForest>,
    leader: bool,
    attempted: bool,
    phase: Phase,
    done: bool,
    _weight: PhantomData<fn() -> W>,
}

impl<W> DetAdversarialStation<W> {
    pub fn new(id: StationId, n: u32, edge: Edge) -> Self {
        DetAdversarialStation {
            id,
            n,
            edge,
            rank: edge_index(edge, n).expect("edge fits the vertex range"),
            local: None,
            leader: false,
            attempted: false,
            phase: Phase::Passive,
            done: false,
            _weight: PhantomData,
        }
    }

    /// Size of the ID search space: a power of two covering every possible ID.
    pub fn id_universe(n: u32) -> u64 {
        edge_universe(n).max(1).next_power_of_two()
    }

    pub fn is_leader(&self) -> bool {
        self.leader
    }

    fn waiting(&self) -> bool {
        self.local.as_ref().is_some_and(|l| l.is_waiting())
    }

    fn revealed(&self) -> &[Edge] {
        self.local.as_ref().map(|l| l.tracker.revealed()).unwrap_or(&[])
    }
}

impl<W: Weight> Station for DetAdversarialStation<W> {
    type W = W;

    fn id(&self) -> StationId {
        self.id
    }

    fn edge(&self) -> Edge {
        self.edge
    }

    fn activate(&mut self, step: Step) {
        self.phase = if step == 0 {
            self.local = Some(LocalForest::new(self.n, self.edge));
            Phase::Election(Resolver::new(Self::id_universe(self.n)))
        } else {
            Phase::AwaitUpdate
        };
    }

    fn decide(&mut self, _step: Step) -> Option<Message<W>> {
        let msg = if self.done {
            None
        } else {
            match self.phase {
                Phase::Passive | Phase::AwaitUpdate => None,
                Phase::Election(r) => r.attempts(self.id as u64 - 1).then_some(Message::Dummy),
                Phase::Probe => self.waiting().then_some(Message::Dummy),
                Phase::Terminate => self.leader.then_some(Message::Termination),
                Phase::Resolve(r) => (self.waiting() && r.attempts(self.rank)).then_some(Message::Edge(self.edge)),
                Phase::Update => self.leader.then(|| Message::Update(self.revealed().to_vec())),
            }
        };
        self.attempted = msg.is_some();
        msg
    }

    fn observe(&mut self, _step: Step, feedback: &Feedback<W>) -> Result<()> {
        if matches!(feedback, Feedback::Heard(Message::Termination)) {
            self.done = true;
            return Ok(());
        }
        self.phase = match &mut self.phase {
            Phase::Passive => return Err(Error::Invariant(format!("passive station {} received feedback", self.id))),
            Phase::Election(r) => match r.advance(feedback.kind()) {
                ResolveOutcome::Pending => return Ok(()),
                ResolveOutcome::Found => {
                    self.leader = self.attempted;
                    Phase::Probe
                }
                ResolveOutcome::Empty => Phase::Probe,
            },
            Phase::AwaitUpdate => match feedback.heard() {
                Some(Message::Update(list)) => {
                    let mut local = LocalForest::new(self.n, self.edge);
                    local.install(list)?;
                    self.local = Some(local);
                    Phase::Probe
                }
                _ => Phase::AwaitUpdate,
            },
            Phase::Probe if feedback.is_silence() => Phase::Terminate,
            Phase::Probe => Phase::Resolve(Resolver::new(edge_universe(self.n))),
            Phase::Terminate => Phase::Probe,
            Phase::Resolve(r) => match r.advance(feedback.kind()) {
                ResolveOutcome::Pending => return Ok(()),
                ResolveOutcome::Found => {
                    let e = feedback
                        .heard_edge()
                        .ok_or_else(|| Error::Invariant("resolution isolated a non-edge message".into()))?;
                    self.local.as_mut().expect("synchronized stations hold a forest").reveal(e)?;
                    Phase::Update
                }
                ResolveOutcome::Empty => Phase::Update,
            },
            Phase::Update => Phase::Probe,
        };
        Ok(())
    }

    fn halted(&self) -> bool {
        self.done
    }

    fn status(&self) -> Option<EdgeStatus> {
        self.local.as_ref().map(|l| l.status)
    }

    fn output(&self) -> Option<StationOutput<W>> {
        self.local.as_ref().map(|l| StationOutput::Revealed(l.tracker.revealed().to_vec()))
    }

    fn forest(&self) -> Option<&[Edge]> {
        self.local.as_ref().map(|l| l.tracker.revealed())
    }

    fn shared_digest(&self) -> Option<u64> {
        match self.phase {
            Phase::Passive | Phase::AwaitUpdate => None,
            phase => Some(digest((phase, self.done, self.local.as_ref().map(|l| l.tracker.fingerprint())))),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::adversary::ActivationSchedule;
    use crate::graph::generate::{generate_instance, GraphKind, WeightKind};
    use crate::oracle::{check_c_correct, check_spanning_forest};
    use crate::station::{run_algorithm, AlgorithmName, RunOptions};

    #[test]
    fn static_path_is_spanned() {
        let g = generate_instance(GraphKind::Path, 4, 3, WeightKind::None, 0).unwrap();
        let opts = RunOptions { checks: true, trace: true, ..Default::default() };
        let out = run_algorithm(AlgorithmName::DetAdversarial, &g, &opts).unwrap();
        assert!(check_spanning_forest(&g, &out.forest));
        assert!(check_c_correct(out.trace.as_ref().unwrap(), &out.schedule, &g, 2, &out.forest).unwrap());
    }

    #[test]
    fn late_station_is_picked_up_by_an_update() {
        let g = generate_instance(GraphKind::Path, 3, 2, WeightKind::None, 0).unwrap();
        let mut schedule = ActivationSchedule::new();
        schedule.set(1, 0);
        schedule.set(2, 3);
        let opts = RunOptions { checks: true, trace: true, schedule: Some(schedule), ..Default::default() };
        let out = run_algorithm(AlgorithmName::DetAdversarial, &g, &opts).unwrap();
        let trace = out.trace.as_ref().unwrap();
        let end = trace.termination_step().unwrap();
        assert!(check_c_correct(trace, &out.schedule, &g, 2, &out.forest).unwrap());
        if 3 + 2 < end {
            assert_eq!(out.forest.len(), 2);
        }
    }

    #[test]
    fn random_schedules_are_two_correct() {
        let g = generate_instance(GraphKind::RandomConnected, 12, 20, WeightKind::None, 1).unwrap();
        for seed in 0..30 {
            let schedule = ActivationSchedule::random(g.m(), 40, seed);
            let opts = RunOptions { checks: true, trace: true, schedule: Some(schedule), ..Default::default() };
            let out = run_algorithm(AlgorithmName::DetAdversarial, &g, &opts).unwrap();
            assert!(check_c_correct(out.trace.as_ref().unwrap(), &out.schedule, &g, 2, &out.forest).unwrap(), "seed {seed}");
        }
    }
}
