//! Adversaries: wake-up schedules and lower-bound constructions.

mod activation;
mod five_phase;
mod schedule;
mod weight;

pub use activation::{activation_lower_bound, stage_length, ActivationOutcome, Stage};
pub use five_phase::{
    five_phase_construct, heard_at_vertex, is_witness, query_horizon, random_edge_queries, singleton_edge_queries,
    FivePhaseResult,
};
pub use schedule::{schedule_static, ActivationSchedule};
pub use weight::{path_with_chords, weight_adversary, Commitment, WeightAdversaryOutcome, WeightAdversaryParams};
