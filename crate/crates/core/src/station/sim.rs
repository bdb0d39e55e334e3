//! Lockstep execution of a set of stations on one channel.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{EdgeStatus, Station, StationOutput};
use crate::adversary::ActivationSchedule;
use crate::channel::{Channel, ExecutionTrace, Feedback, FeedbackKind, Step};
use crate::error::{Error, Result};
use crate::graph::{Edge, ForestTracker, StationId};

/// One random-broadcast step: the shared estimate exponent, how many stations
/// took part, and what the channel reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentionSample {
    pub exponent: u32,
    pub contending: usize,
    pub outcome: FeedbackKind,
}

#[derive(Clone, Debug)]
pub struct Simulation<S: Station> {
    stations: Vec<S>,
    active: Vec<bool>,
    pending: BTreeMap<Step, Vec<StationId>>,
    channel: Channel<S::W>,
    shadows: Vec<S>,
    shadow_attempts: Vec<StationId>,
    checks: bool,
    dynamic: bool,
    samples: Option<Vec<ContentionSample>>,
    last_waiting: Option<usize>,
    activated_any: bool,
}

impl<S: Station> Simulation<S> {
    /// `stations[i]` must have ID `i + 1`.
    pub fn new(stations: Vec<S>, schedule: &ActivationSchedule) -> Self {
        debug_assert!(stations.iter().enumerate().all(|(i, s)| s.id() as usize == i + 1));
        let mut pending: BTreeMap<Step, Vec<StationId>> = BTreeMap::new();
        for (id, step) in schedule.iter() {
            if (id as usize) <= stations.len() {
                pending.entry(step).or_default().push(id);
            }
        }
        let dynamic = pending.keys().any(|&t| t > 0);
        let m = stations.len();
        Simulation {
            stations,
            active: vec![false; m],
            pending,
            channel: Channel::new(m),
            shadows: Vec::new(),
            shadow_attempts: Vec::new(),
            checks: false,
            dynamic,
            samples: None,
            last_waiting: None,
            activated_any: false,
        }
    }

    /// Asserts lockstep agreement and the edge partition after every step.
    pub fn with_checks(mut self) -> Self {
        self.checks = true;
        self
    }

    /// Records a [`ContentionSample`] for every random-broadcast step.
    pub fn with_samples(mut self) -> Self {
        self.samples = Some(Vec::new());
        self
    }

    pub fn without_trace(mut self) -> Self {
        self.channel = self.channel.without_trace();
        self
    }

    pub fn now(&self) -> Step {
        self.channel.now()
    }

    pub fn stations(&self) -> &[S] {
        &self.stations
    }

    pub fn station(&self, id: StationId) -> &S {
        &self.stations[id as usize - 1]
    }

    pub fn is_active(&self, id: StationId) -> bool {
        self.active[id as usize - 1]
    }

    pub fn trace(&self) -> &ExecutionTrace<S::W> {
        self.channel.trace()
    }

    pub fn into_trace(self) -> ExecutionTrace<S::W> {
        self.channel.into_trace()
    }

    pub fn samples(&self) -> &[ContentionSample] {
        self.samples.as_deref().unwrap_or(&[])
    }

    /// Schedules `ids` to wake at the current step, before its broadcasts.
    pub fn activate_now(&mut self, ids: impl IntoIterator<Item = StationId>) {
        let now = self.now();
        self.dynamic |= now > 0;
        let slot = self.pending.entry(now).or_default();
        slot.extend(ids);
        slot.sort_unstable();
        slot.dedup();
    }

    /// Copy that shares no state with `self`, without trace or samples.
    pub fn fork(&self) -> Self {
        Simulation {
            stations: self.stations.clone(),
            active: self.active.clone(),
            pending: self.pending.clone(),
            channel: self.channel.fork(),
            shadows: self.shadows.clone(),
            shadow_attempts: Vec::new(),
            checks: false,
            dynamic: self.dynamic,
            samples: None,
            last_waiting: None,
            activated_any: self.activated_any,
        }
    }

    /// Adds an activated copy of a passive station that decides and listens
    /// but whose attempts never reach the channel.
    pub fn add_shadow(&mut self, mut station: S) {
        station.activate(self.now());
        self.shadows.push(station);
    }

    /// IDs of shadows that would have broadcast at the last step.
    pub fn shadow_attempts(&self) -> &[StationId] {
        &self.shadow_attempts
    }

    /// True once some station was active and every active station has halted.
    pub fn finished(&self) -> bool {
        if !self.activated_any {
            return self.pending.is_empty();
        }
        self.stations.iter().zip(&self.active).all(|(s, &a)| !a || s.halted())
    }

    fn live(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.stations.len()).filter(|&i| self.active[i] && !self.stations[i].halted())
    }

    pub fn step(&mut self) -> Result<Feedback<S::W>> {
        let now = self.now();
        let woken = self.pending.remove(&now).unwrap_or_default();
        let mut activations = Vec::with_capacity(woken.len());
        for id in woken {
            let i = id as usize - 1;
            if !self.active[i] {
                self.active[i] = true;
                self.channel.activate(id);
                self.stations[i].activate(now);
                activations.push(id);
            }
        }
        self.activated_any |= !activations.is_empty();

        let contention = self.samples.is_some().then(|| self.contention()).flatten();

        let live: Vec<usize> = self.live().collect();
        let mut attempts = Vec::new();
        for &i in &live {
            if let Some(msg) = self.stations[i].decide(now) {
                attempts.push((self.stations[i].id(), msg));
            }
        }
        self.shadow_attempts.clear();
        for sh in self.shadows.iter_mut().filter(|s| !s.halted()) {
            if sh.decide(now).is_some() {
                self.shadow_attempts.push(sh.id());
            }
        }

        let had_activations = !activations.is_empty();
        let feedback = self.channel.step(attempts, activations)?;
        for &i in &live {
            self.stations[i].observe(now, &feedback)?;
        }
        for sh in self.shadows.iter_mut().filter(|s| !s.halted()) {
            sh.observe(now, &feedback)?;
        }

        if let (Some(samples), Some((exponent, contending))) = (self.samples.as_mut(), contention) {
            if contending > 0 {
                samples.push(ContentionSample { exponent, contending, outcome: feedback.kind() });
            }
        }
        if self.checks {
            self.verify(had_activations)?;
        }
        Ok(feedback)
    }

    fn contention(&self) -> Option<(u32, usize)> {
        let mut exponent = None;
        let mut contending = 0;
        for i in self.live() {
            if let Some(c) = self.stations[i].contention() {
                exponent.get_or_insert(c.exponent);
                contending += usize::from(c.contending);
            }
        }
        exponent.map(|e| (e, contending))
    }

    fn verify(&mut self, had_activations: bool) -> Result<()> {
        let active: Vec<&S> = self.stations.iter().zip(&self.active).filter(|(_, &a)| a).map(|(s, _)| s).collect();

        let digests: BTreeSet<u64> = active.iter().filter(|s| !s.halted()).filter_map(|s| s.shared_digest()).collect();
        if digests.len() > 1 {
            return Err(Error::Invariant(format!("shared state diverged at step {}", self.now() - 1)));
        }

        let with_status: Vec<(&S, EdgeStatus)> = active.iter().filter_map(|s| s.status().map(|st| (*s, st))).collect();
        if let Some(revealed) = with_status.iter().find_map(|(s, _)| s.forest()) {
            let n = with_status.iter().map(|(s, _)| s.edge().v()).chain(revealed.iter().map(|e| e.v())).max().unwrap_or(1);
            let forest = ForestTracker::from_revealed(n, revealed)
                .map_err(|e| Error::Invariant(format!("revealed set is not a forest: {e}")))?;
            let in_forest: HashSet<Edge> = revealed.iter().copied().collect();
            for (s, status) in &with_status {
                let e = s.edge();
                let consistent = match status {
                    EdgeStatus::Revealed => in_forest.contains(&e),
                    EdgeStatus::Cycle => !in_forest.contains(&e) && forest.would_cycle(e),
                    EdgeStatus::Waiting => !forest.would_cycle(e),
                };
                if !consistent {
                    return Err(Error::Invariant(format!("station {} holds {e} with inconsistent status {status:?}", s.id())));
                }
            }
        }

        let waiting = with_status.iter().filter(|(_, st)| *st == EdgeStatus::Waiting).count();
        if !self.dynamic && !had_activations {
            if let Some(prev) = self.last_waiting {
                if waiting > prev {
                    return Err(Error::Invariant(format!("waiting set grew from {prev} to {waiting}")));
                }
            }
        }
        self.last_waiting = Some(waiting);
        Ok(())
    }

    /// Steps until [`Simulation::finished`], failing once `cap` steps have elapsed.
    pub fn run(&mut self, cap: Step) -> Result<()> {
        while !self.finished() {
            if self.now() >= cap {
                return Err(Error::StepCap(cap));
            }
            self.step()?;
        }
        Ok(())
    }

    /// Runs exactly `steps` steps, or fewer if the run finishes first.
    pub fn run_steps(&mut self, steps: u64) -> Result<()> {
        for _ in 0..steps {
            if self.finished() {
                break;
            }
            self.step()?;
        }
        Ok(())
    }

    /// Output of the lowest-ID active station that has one.
    pub fn output(&self) -> Option<StationOutput<S::W>> {
        self.stations.iter().zip(&self.active).filter(|(_, &a)| a).find_map(|(s, _)| s.output())
    }
}
