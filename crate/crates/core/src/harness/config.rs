use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::Step;
use crate::error::{Error, Result};
use crate::graph::generate::{generate_instance, GraphKind, WeightKind};
use crate::graph::io::parse_graph;
use crate::station::AlgorithmName;
use crate::RationalGraph;

/// Trial indices, written `7`, `1,4,9` or `0..100` (half-open).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Seeds(Vec<u64>);

impl Seeds {
    pub fn range(start: u64, end: u64) -> Self {
        Seeds((start..end).collect())
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds(vec![0])
    }
}

impl FromStr for Seeds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad seed list {s:?}"));
        if let Some((a, b)) = s.split_once("..") {
            let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if a >= b {
                return Err(bad());
            }
            return Ok(Seeds::range(a, b));
        }
        let list = s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<Vec<u64>>>()?;
        Ok(Seeds(list))
    }
}

impl fmt::Display for Seeds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let contiguous = self.0.len() > 1 && self.0.windows(2).all(|w| w[1] == w[0] + 1);
        if contiguous {
            write!(f, "{}..{}", self.0[0], self.0[self.0.len() - 1] + 1)
        } else {
            let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl TryFrom<String> for Seeds {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Seeds> for String {
    fn from(s: Seeds) -> String {
        s.to_string()
    }
}

/// Wake-up adversary for `run`: `static`, or `random:H` for uniform wake-up steps in `0..H`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AdversarySpec {
    #[default]
    Static,
    Random(Step),
}

impl FromStr for AdversarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(AdversarySpec::Static),
            _ => s
                .strip_prefix("random:")
                .and_then(|h| h.parse().ok())
                .map(AdversarySpec::Random)
                .ok_or_else(|| Error::Config(format!("unknown adversary {s:?}; expected static or random:H"))),
        }
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversarySpec::Static => f.write_str("static"),
            AdversarySpec::Random(h) => write!(f, "random:{h}"),
        }
    }
}

impl TryFrom<String> for AdversarySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AdversarySpec> for String {
    fn from(a: AdversarySpec) -> String {
        a.to_string()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    File {
        file: PathBuf,
    },
    Generated {
        kind: GraphKind,
        n: u32,
        m: usize,
        #[serde(default = "no_weights")]
        weights: WeightKind,
        #[serde(default)]
        seed: u64,
    },
}

fn no_weights() -> WeightKind {
    WeightKind::None
}

impl InstanceSpec {
    /// Stable label used in reports.
    pub fn label(&self) -> String {
        match self {
            InstanceSpec::File { file } => file.display().to_string(),
            InstanceSpec::Generated { kind, n, m, weights, seed } => format!("{kind}-n{n}-m{m}-{weights}-s{seed}"),
        }
    }

    pub fn load(&self) -> Result<RationalGraph> {
        match self {
            InstanceSpec::File { file } => parse_graph(&std::fs::read_to_string(file)?),
            InstanceSpec::Generated { kind, n, m, weights, seed } => generate_instance(*kind, *n, *m, *weights, *seed),
        }
    }
}

fn default_c() -> u64 {
    2
}

fn default_true() -> bool {
    true
}

/// One experiment: every instance crossed with every seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmName,
    pub instances: Vec<InstanceSpec>,
    #[serde(default)]
    pub seeds: Seeds,
    /// Mixed into every trial seed.
    #[serde(default)]
    pub global_seed: u64,
    #[serde(default)]
    pub adversary: AdversarySpec,
    /// Correctness window for dynamic runs.
    #[serde(default = "default_c")]
    pub c: u64,
    /// Defaults to the algorithm's worst-case bound.
    #[serde(default)]
    pub cap: Option<Step>,
    /// Per-run reports.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Aggregated CSV, one row per instance.
    #[serde(default)]
    pub summary: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Per-step lockstep and partition assertions.
    #[serde(default = "default_true")]
    pub checks: bool,
}

impl ExperimentConfig {
    pub fn new(algorithm: AlgorithmName, instances: Vec<InstanceSpec>, seeds: Seeds) -> Self {
        ExperimentConfig {
            algorithm,
            instances,
            seeds,
            global_seed: 0,
            adversary: AdversarySpec::Static,
            c: 2,
            cap: None,
            out: None,
            summary: None,
            format: Format::Jsonl,
            checks: true,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Rejects caps below the algorithm's worst case, so that a cap hit always means a fault.
    pub fn check_cap(&self, g: &RationalGraph) -> Result<Step> {
        let floor = self.algorithm.default_cap(g.n(), g.m());
        match self.cap {
            None => Ok(floor),
            Some(cap) if cap >= floor => Ok(cap),
            Some(cap) => Err(Error::Config(format!("cap {cap} is below the worst case {floor} of {}", self.algorithm))),
        }
    }
}
