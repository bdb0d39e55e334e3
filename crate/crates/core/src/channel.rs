//! Synchronous multiple-access channel with collision detection.
//!
//! Every step, each active station either stays quiet or attempts one
//! broadcast. The channel reports the same feedback to all active stations:
//! silence when nobody attempted, the message itself when exactly one station
//! attempted, and collision noise otherwise.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Edge, StationId};
use crate::weight::Weight;

/// Global clock value. Steps are numbered from 0.
pub type Step = u64;

#[derive(Clone, Debug, PartialEq)]
pub enum Message<W> {
    Edge(Edge),
    /// An edge together with its weight, used by the ID sweeps on weighted inputs.
    WeightedEdge(Edge, W),
    Weight(W),
    Dummy,
    Termination,
    /// Every revealed edge so far. Message size is unbounded.
    Update(Vec<Edge>),
}

impl<W: Weight> fmt::Display for Message<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edge = |e: &Edge| format!("{}-{}", e.u(), e.v());
        match self {
            Message::Edge(e) => write!(f, "edge:{}", edge(e)),
            Message::WeightedEdge(e, w) => write!(f, "wedge:{}@{}", edge(e), w.to_token()),
            Message::Weight(w) => write!(f, "weight:{}", w.to_token()),
            Message::Dummy => f.write_str("dummy"),
            Message::Termination => f.write_str("termination"),
            Message::Update(es) => {
                let list: Vec<String> = es.iter().map(edge).collect();
                write!(f, "update:{}", list.join(";"))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackKind {
    Silence,
    Collision,
    Heard,
}

impl FeedbackKind {
    /// The feedback kind produced by `attempters` simultaneous broadcasts.
    pub fn for_attempts(attempters: usize) -> Self {
        match attempters {
            0 => FeedbackKind::Silence,
            1 => FeedbackKind::Heard,
            _ => FeedbackKind::Collision,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FeedbackKind::Silence => "silence",
            FeedbackKind::Collision => "collision",
            FeedbackKind::Heard => "heard",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feedback<W> {
    Silence,
    Collision,
    Heard(Message<W>),
}

impl<W> Feedback<W> {
    pub fn kind(&self) -> FeedbackKind {
        match self {
            Feedback::Silence => FeedbackKind::Silence,
            Feedback::Collision => FeedbackKind::Collision,
            Feedback::Heard(_) => FeedbackKind::Heard,
        }
    }

    pub fn is_silence(&self) -> bool {
        matches!(self, Feedback::Silence)
    }

    pub fn heard(&self) -> Option<&Message<W>> {
        match self {
            Feedback::Heard(m) => Some(m),
            _ => None,
        }
    }

    /// The edge carried by a heard edge message, if any.
    pub fn heard_edge(&self) -> Option<Edge> {
        match self {
            Feedback::Heard(Message::Edge(e)) | Feedback::Heard(Message::WeightedEdge(e, _)) => Some(*e),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry<W> {
    pub step: Step,
    /// Sorted IDs of the stations that attempted a broadcast.
    pub attempters: Vec<StationId>,
    pub feedback: Feedback<W>,
    /// Stations activated at this step, before broadcast decisions were made.
    pub activations: Vec<StationId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionTrace<W> {
    entries: Vec<TraceEntry<W>>,
}

impl<W> Default for ExecutionTrace<W> {
    fn default() -> Self {
        ExecutionTrace { entries: Vec::new() }
    }
}

impl<W: Weight> ExecutionTrace<W> {
    pub fn entries(&self) -> &[TraceEntry<W>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Step at which a termination signal was heard, if any.
    pub fn termination_step(&self) -> Option<Step> {
        self.entries
            .iter()
            .find(|t| matches!(t.feedback, Feedback::Heard(Message::Termination)))
            .map(|t| t.step)
    }

    /// Checks that steps are consecutive from 0 and feedback matches the attempt count.
    pub fn is_consistent(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, t)| {
            t.step == i as Step
                && t.feedback.kind() == FeedbackKind::for_attempts(t.attempters.len())
                && t.attempters.windows(2).all(|w| w[0] < w[1])
        })
    }

    /// CSV with columns `step,n_attempters,feedback_kind,payload_summary,activations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,n_attempters,feedback_kind,payload_summary,activations\n");
        for t in &self.entries {
            let payload = t.feedback.heard().map(|m| m.to_string()).unwrap_or_default();
            let acts: Vec<String> = t.activations.iter().map(|s| s.to_string()).collect();
            writeln!(out, "{},{},{},{},{}", t.step, t.attempters.len(), t.feedback.kind().as_str(), payload, acts.join(";")).unwrap();
        }
        out
    }
}

/// The channel itself: active set, clock and trace.
#[derive(Clone, Debug)]
pub struct Channel<W> {
    active: Vec<bool>,
    now: Step,
    trace: ExecutionTrace<W>,
    record: bool,
}

impl<W: Weight> Channel<W> {
    /// A channel for stations `1..=stations`, all passive.
    pub fn new(stations: usize) -> Self {
        Channel { active: vec![false; stations + 1], now: 0, trace: ExecutionTrace::default(), record: true }
    }

    /// Disables trace recording; the step counter still advances.
    pub fn without_trace(mut self) -> Self {
        self.record = false;
        self
    }

    pub fn now(&self) -> Step {
        self.now
    }

    /// A copy at the same step with an empty trace and recording disabled.
    pub fn fork(&self) -> Self {
        Channel { active: self.active.clone(), now: self.now, trace: ExecutionTrace::default(), record: false }
    }

    pub fn activate(&mut self, station: StationId) {
        let i = station as usize;
        if i >= self.active.len() {
            self.active.resize(i + 1, false);
        }
        self.active[i] = true;
    }

    pub fn is_active(&self, station: StationId) -> bool {
        self.active.get(station as usize).copied().unwrap_or(false)
    }

    /// Resolves one step. `attempts` must come from active stations, each at most once.
    pub fn step(&mut self, mut attempts: Vec<(StationId, Message<W>)>, activations: Vec<StationId>) -> Result<Feedback<W>> {
        for (s, _) in &attempts {
            if !self.is_active(*s) {
                return Err(Error::PassiveBroadcast { station: *s, step: self.now });
            }
        }
        attempts.sort_by_key(|(s, _)| *s);
        let attempters: Vec<StationId> = attempts.iter().map(|(s, _)| *s).collect();
        debug_assert!(attempters.windows(2).all(|w| w[0] < w[1]), "station attempted twice");
        let feedback = match attempts.len() {
            0 => Feedback::Silence,
            1 => Feedback::Heard(attempts.pop().unwrap().1),
            _ => Feedback::Collision,
        };
        if self.record {
            self.trace.entries.push(TraceEntry { step: self.now, attempters, feedback: feedback.clone(), activations });
        }
        self.now += 1;
        Ok(feedback)
    }

    pub fn trace(&self) -> &ExecutionTrace<W> {
        &self.trace
    }

    pub fn into_trace(self) -> ExecutionTrace<W> {
        self.trace
    }
}

/// Single-attempt convenience wrapper over [`Channel::step`] keyed by station.
pub fn step_channel<W: Weight>(
    channel: &mut Channel<W>,
    attempts: std::collections::BTreeMap<StationId, Message<W>>,
) -> Result<Feedback<W>> {
    channel.step(attempts.into_iter().collect(), Vec::new())
}

/// Feedback of a channel without collision detection.
#[derive(Clone, Debug, PartialEq)]
pub enum BlindFeedback<W> {
    Nothing,
    Heard(Message<W>),
}

/// A channel that cannot tell collision from silence.
#[derive(Clone, Debug)]
pub struct BlindChannel<W> {
    inner: Channel<W>,
}

impl<W: Weight> BlindChannel<W> {
    pub fn new(stations: usize) -> Self {
        BlindChannel { inner: Channel::new(stations) }
    }

    pub fn activate(&mut self, station: StationId) {
        self.inner.activate(station);
    }

    pub fn is_active(&self, station: StationId) -> bool {
        self.inner.is_active(station)
    }

    /// Underlying steps consumed so far.
    pub fn now(&self) -> Step {
        self.inner.now()
    }

    pub fn step(&mut self, attempts: Vec<(StationId, Message<W>)>) -> Result<BlindFeedback<W>> {
        Ok(match self.inner.step(attempts, Vec::new())? {
            Feedback::Heard(m) => BlindFeedback::Heard(m),
            Feedback::Silence | Feedback::Collision => BlindFeedback::Nothing,
        })
    }
}

/// Emulates one collision-detecting step on a blind channel using two steps.
///
/// At the even step the scheduled stations broadcast. At the odd step they
/// repeat and the leader adds a dummy message. Nothing heard twice means a
/// collision at the even step; the leader's dummy heard alone means silence.
pub fn emulate_cd<W: Weight>(
    channel: &mut BlindChannel<W>,
    attempts: &[(StationId, Message<W>)],
    leader: StationId,
) -> Result<Feedback<W>> {
    if !channel.is_active(leader) {
        return Err(Error::PassiveLeader(leader));
    }
    let first = channel.step(attempts.to_vec())?;
    let mut repeat: Vec<(StationId, Message<W>)> = attempts.iter().filter(|(s, _)| *s != leader).cloned().collect();
    repeat.push((leader, Message::Dummy));
    let second = channel.step(repeat)?;
    Ok(match (first, second) {
        (BlindFeedback::Heard(m), _) => Feedback::Heard(m),
        (BlindFeedback::Nothing, BlindFeedback::Nothing) => Feedback::Collision,
        (BlindFeedback::Nothing, BlindFeedback::Heard(_)) => Feedback::Silence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use std::collections::BTreeMap;

    fn chan(k: usize) -> Channel<Rational> {
        let mut c = Channel::new(k);
        for s in 1..=k as StationId {
            c.activate(s);
        }
        c
    }

    #[test]
    fn step_examples() {
        let mut c = chan(8);
        assert_eq!(step_channel(&mut c, BTreeMap::new()).unwrap(), Feedback::Silence);

        let e = Edge::new(1, 2).unwrap();
        let one = BTreeMap::from([(7, Message::Edge(e))]);
        assert_eq!(step_channel(&mut c, one).unwrap(), Feedback::Heard(Message::Edge(e)));

        let two = BTreeMap::from([(3, Message::Dummy), (5, Message::Edge(Edge::new(2, 4).unwrap()))]);
        assert_eq!(step_channel(&mut c, two).unwrap(), Feedback::Collision);

        assert!(c.trace().is_consistent());
        assert_eq!(c.trace().len(), 3);
    }

    #[test]
    fn passive_broadcast_is_a_fault() {
        let mut c: Channel<Rational> = Channel::new(3);
        c.activate(1);
        let err = c.step(vec![(2, Message::Dummy)], vec![]).unwrap_err();
        assert!(matches!(err, Error::PassiveBroadcast { station: 2, step: 0 }));
    }

    #[test]
    fn csv_columns_are_fixed() {
        let mut c = chan(3);
        c.step(vec![(2, Message::Edge(Edge::new(1, 3).unwrap()))], vec![2]).unwrap();
        c.step(vec![(1, Message::Dummy), (3, Message::Dummy)], vec![]).unwrap();
        c.step(vec![], vec![1, 3]).unwrap();
        assert_eq!(
            c.trace().to_csv(),
            "step,n_attempters,feedback_kind,payload_summary,activations\n\
             0,1,heard,edge:1-3,2\n\
             1,2,collision,,\n\
             2,0,silence,,1;3\n"
        );
    }

    #[test]
    fn emulation_examples() {
        let mut b: BlindChannel<Rational> = BlindChannel::new(4);
        for s in 1..=4 {
            b.activate(s);
        }
        let e = Edge::new(1, 2).unwrap();
        assert_eq!(emulate_cd(&mut b, &[(2, Message::Dummy), (3, Message::Dummy)], 1).unwrap(), Feedback::Collision);
        assert_eq!(emulate_cd(&mut b, &[], 1).unwrap(), Feedback::Silence);
        assert_eq!(emulate_cd(&mut b, &[(4, Message::Edge(e))], 1).unwrap(), Feedback::Heard(Message::Edge(e)));
        assert_eq!(emulate_cd(&mut b, &[(1, Message::Edge(e))], 1).unwrap(), Feedback::Heard(Message::Edge(e)));
        assert_eq!(b.now(), 8);

        let mut passive: BlindChannel<Rational> = BlindChannel::new(2);
        passive.activate(1);
        assert!(matches!(emulate_cd(&mut passive, &[], 2), Err(Error::PassiveLeader(2))));
    }
}
