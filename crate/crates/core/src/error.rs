use thiserror::Error;

use crate::graph::Edge;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid edge ({0},{1}): endpoints must be distinct, positive and in canonical order")]
    InvalidEdge(u32, u32),

    #[error("vertex {vertex} outside 1..={n}")]
    VertexOutOfRange { vertex: u32, n: u32 },

    #[error("edge rank {rank} outside the edge universe of {n} vertices")]
    RankOutOfRange { rank: u64, n: u32 },

    #[error("edge {0} appears more than once")]
    DuplicateEdge(Edge),

    #[error("weight {0} is not strictly positive")]
    InvalidWeight(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("simulation fault: revealing {0} would close a cycle")]
    CycleReveal(Edge),

    #[error("simulation fault: passive station {station} attempted to broadcast at step {step}")]
    PassiveBroadcast { station: u32, step: u64 },

    #[error("simulation fault: leader {0} is passive")]
    PassiveLeader(u32),

    #[error("step cap of {0} reached before termination")]
    StepCap(u64),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("construction fault: {0}")]
    Construction(String),

    #[error("weight adversary exhausted at step {step}: station {station} has too few candidate weights; enlarge J")]
    AdversaryExhausted { step: u64, station: u32 },

    #[error("trace contains no termination signal")]
    NoTermination,

    #[error("configuration: {0}")]
    Config(String),
}
