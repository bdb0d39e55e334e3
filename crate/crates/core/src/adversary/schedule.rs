use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::Step;
use crate::graph::StationId;

/// Wake-up step of every station that is ever activated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationSchedule {
    wake: BTreeMap<StationId, Step>,
}

impl ActivationSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every station `1..=m` active from step 0.
    pub fn all_at_start(m: usize) -> Self {
        ActivationSchedule { wake: (1..=m as StationId).map(|s| (s, 0)).collect() }
    }

    /// Wake times drawn uniformly from `0..horizon`, with one random station at step 0.
    pub fn random(m: usize, horizon: Step, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wake: BTreeMap<StationId, Step> = (1..=m as StationId).map(|s| (s, rng.gen_range(0..horizon.max(1)))).collect();
        if let Some(first) = (1..=m as StationId).collect::<Vec<_>>().choose(&mut rng) {
            wake.insert(*first, 0);
        }
        ActivationSchedule { wake }
    }

    pub fn set(&mut self, station: StationId, step: Step) {
        self.wake.insert(station, step);
    }

    pub fn wake_of(&self, station: StationId) -> Option<Step> {
        self.wake.get(&station).copied()
    }

    /// `(station, wake step)` pairs in station order.
    pub fn iter(&self) -> impl Iterator<Item = (StationId, Step)> + '_ {
        self.wake.iter().map(|(&s, &t)| (s, t))
    }

    pub fn len(&self) -> usize {
        self.wake.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wake.is_empty()
    }

    pub fn is_static(&self) -> bool {
        self.wake.values().all(|&t| t == 0)
    }
}

pub fn schedule_static(m: usize) -> ActivationSchedule {
    ActivationSchedule::all_at_start(m)
}
