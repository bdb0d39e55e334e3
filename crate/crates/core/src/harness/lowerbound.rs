use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adversary::{
    activation_lower_bound, five_phase_construct, heard_at_vertex, path_with_chords, query_horizon, random_edge_queries,
    stage_length, weight_adversary, WeightAdversaryParams,
};
use crate::channel::Step;
use crate::error::{Error, Result};
use crate::graph::generate::{generate_instance, GraphKind, WeightKind};
use crate::station::{
    oblivious_roundrobin, run_oblivious, AlgorithmName, DetAdversarialStation, ObliviousStation, RandWeightedStation,
};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBoundKind {
    /// Edge-set construction against random oblivious query schedules.
    FivePhase,
    /// Adaptive weight assignment against a deterministic weighted algorithm.
    Weight,
    /// Adaptive wake-up times against det-adversarial on a forest.
    Activation,
}

impl FromStr for LowerBoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "five-phase" => Ok(LowerBoundKind::FivePhase),
            "weight" => Ok(LowerBoundKind::Weight),
            "activation" => Ok(LowerBoundKind::Activation),
            _ => Err(Error::Config(format!("unknown lower-bound adversary {s:?}"))),
        }
    }
}

impl fmt::Display for LowerBoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LowerBoundKind::FivePhase => "five-phase",
            LowerBoundKind::Weight => "weight",
            LowerBoundKind::Activation => "activation",
        })
    }
}

/// One lower-bound trial: the adversary held the prey for `forced_steps` against a target of `bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub adversary: LowerBoundKind,
    pub prey: String,
    pub n: u32,
    pub m: usize,
    pub seed: u64,
    pub forced_steps: Step,
    pub bound: Step,
    pub checks: BTreeMap<String, bool>,
}

impl LowerBoundReport {
    pub fn passed(&self) -> bool {
        self.forced_steps >= self.bound && self.checks.values().all(|&ok| ok)
    }
}

/// Five-phase construction against a random oblivious schedule of `2k` queries of up to `max_query` edges.
pub fn five_phase_trial(n: u32, m: usize, max_query: usize, seed: u64) -> Result<LowerBoundReport> {
    let k = query_horizon(n, m);
    let queries = random_edge_queries(n, 2 * k.max(1), max_query, seed);
    let built = five_phase_construct(&queries, n, m)?;
    let g = built.graph();
    let steps = queries.len();
    let trace = run_oblivious(&g, queries, steps as Step)?;
    let forced = (1..=steps).find(|&t| heard_at_vertex(&trace, built.witness, t)).map_or(steps, |t| t - 1);
    let mut checks = BTreeMap::new();
    checks.insert("size".to_string(), g.m() == m);
    checks.insert("connected".to_string(), g.components() == 1);
    checks.insert("witness".to_string(), !heard_at_vertex(&trace, built.witness, k));
    Ok(LowerBoundReport {
        adversary: LowerBoundKind::FivePhase,
        prey: format!("random-queries:{max_query}"),
        n,
        m,
        seed,
        forced_steps: forced as Step,
        bound: k as Step,
        checks,
    })
}

/// Weight adversary on a path with chords, against the ID sweep (`oblivious-rr`) or `rand-weighted` with a fixed seed.
pub fn weight_trial(prey: AlgorithmName, m: usize, seed: u64) -> Result<LowerBoundReport> {
    let g = path_with_chords(m, seed);
    let params = WeightAdversaryParams::for_edges(m);
    let n = g.n();
    let out = match prey {
        AlgorithmName::ObliviousRr => {
            let rr = Arc::new(oblivious_roundrobin(n, m));
            weight_adversary(&g, params, |id, e, w| ObliviousStation::new(id, e, Some(w), rr.clone()).halting_on_silence())?
        }
        AlgorithmName::RandWeighted => weight_adversary(&g, params, |id, e, w| RandWeightedStation::new(id, n, e, w, seed))?,
        other => return Err(Error::Config(format!("the weight adversary takes oblivious-rr or rand-weighted, not {other}"))),
    };
    let mut checks = BTreeMap::new();
    checks.insert("replay-consistent".to_string(), out.replay_consistent);
    checks.insert("lightest-heard".to_string(), out.min_heard_step.is_some());
    Ok(LowerBoundReport {
        adversary: LowerBoundKind::Weight,
        prey: prey.to_string(),
        n,
        m,
        seed,
        forced_steps: out.min_heard_step.unwrap_or(out.replay_steps),
        bound: m as Step / 2,
        checks,
    })
}

/// Activation adversary against det-adversarial on a forest with `m` edges.
pub fn activation_trial(kind: GraphKind, m: usize, c: u64, seed: u64) -> Result<LowerBoundReport> {
    let n = m as u32 + 1 + u32::from(kind == GraphKind::RandomForest) * (m as u32 / 4);
    let g = generate_instance(kind, n, m, WeightKind::None, seed)?;
    let cap = AlgorithmName::DetAdversarial.default_cap(n, m) * 4 + 4 * stage_length(m) * m as Step;
    let out = activation_lower_bound(&g, c, cap, |s, e| DetAdversarialStation::<Rational>::new(s, n, e))?;
    let mut checks = BTreeMap::new();
    checks.insert("no-stage-reveal".to_string(), out.heard_in_stage.is_empty());
    checks.insert("stages-verified".to_string(), out.stages.iter().all(|s| s.verified));
    Ok(LowerBoundReport {
        adversary: LowerBoundKind::Activation,
        prey: format!("det-adversarial on {kind}"),
        n,
        m,
        seed,
        forced_steps: out.steps,
        bound: (m / 8) as Step * stage_length(m),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_phase_forces_k_steps() {
        let r = five_phase_trial(16, 32, 3, 0).unwrap();
        assert_eq!(r.bound, 8);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn weight_bound_on_both_prey() {
        for prey in [AlgorithmName::ObliviousRr, AlgorithmName::RandWeighted] {
            let r = weight_trial(prey, 16, 2).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(weight_trial(AlgorithmName::DetSimple, 16, 0).is_err());
    }

    #[test]
    fn star_of_256() {
        let r = activation_trial(GraphKind::Star, 256, 2, 0).unwrap();
        assert_eq!(r.bound, 192);
        assert!(r.passed(), "{r:?}");
    }
}
