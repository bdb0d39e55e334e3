use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{AdversarySpec, ExperimentConfig, Format};
use crate::adversary::ActivationSchedule;
use crate::error::Result;
use crate::oracle::RunReport;
use crate::seed::trial_seed;
use crate::station::{run_algorithm, RunOptions};

/// Reports of one experiment, in (instance, seed) order.
#[derive(Clone, Debug, Default)]
pub struct Batch {
    pub reports: Vec<RunReport>,
}

impl Batch {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(RunReport::passed)
    }

    pub fn to_jsonl(&self) -> String {
        self.reports.iter().map(|r| serde_json::to_string(r).expect("reports serialize") + "\n").collect()
    }

    /// One row per run.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,algorithm,seed,steps,forest_size,weight,passed,error\n");
        for r in &self.reports {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.instance,
                r.algorithm,
                r.seed,
                r.steps,
                r.forest_size,
                r.weight.as_deref().unwrap_or(""),
                r.passed(),
                r.error.as_deref().unwrap_or("").replace(',', ";")
            )
            .unwrap();
        }
        out
    }

    /// One row per (instance, algorithm) with pass counts and step statistics.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("instance,algorithm,trials,passed,min_steps,mean_steps,max_steps\n");
        let mut i = 0;
        while i < self.reports.len() {
            let head = &self.reports[i];
            let group: Vec<&RunReport> = self.reports[i..]
                .iter()
                .take_while(|r| r.instance == head.instance && r.algorithm == head.algorithm)
                .collect();
            let steps: Vec<u64> = group.iter().map(|r| r.steps).collect();
            let mean = steps.iter().sum::<u64>() as f64 / steps.len() as f64;
            writeln!(
                out,
                "{},{},{},{},{},{:.3},{}",
                head.instance,
                head.algorithm,
                group.len(),
                group.iter().filter(|r| r.passed()).count(),
                steps.iter().min().unwrap(),
                mean,
                steps.iter().max().unwrap()
            )
            .unwrap();
            i += group.len();
        }
        out
    }

    pub fn write(&self, cfg: &ExperimentConfig) -> Result<()> {
        if let Some(path) = &cfg.out {
            let body = match cfg.format {
                Format::Jsonl => self.to_jsonl(),
                Format::Csv => self.to_csv(),
            };
            fs::write(path, body)?;
        }
        if let Some(path) = &cfg.summary {
            fs::write(path, self.summary_csv())?;
        }
        Ok(())
    }
}

fn dump_dir(cfg: &ExperimentConfig) -> PathBuf {
    match cfg.out.as_deref().and_then(Path::parent) {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Runs the (instance x seed) grid and checks every run.
///
/// Trial `s` on instance `i` uses seed `trial_seed(global_seed, i, s)` for
/// both the algorithm and a random wake-up schedule. Runs that hit the cap
/// are rerun with tracing and their trace is written next to `out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Batch> {
    let mut batch = Batch::default();
    for (index, spec) in cfg.instances.iter().enumerate() {
        let g = spec.load()?;
        let cap = cfg.check_cap(&g)?;
        let label = spec.label();
        for &s in cfg.seeds.as_slice() {
            let seed = trial_seed(cfg.global_seed, index as u64, s);
            let schedule = match cfg.adversary {
                AdversarySpec::Static => None,
                AdversarySpec::Random(h) => Some(ActivationSchedule::random(g.m(), h, seed)),
            };
            let dynamic = schedule.is_some();
            let opts = RunOptions {
                seed,
                cap: Some(cap),
                checks: cfg.checks,
                samples: cfg.algorithm.is_randomized(),
                trace: dynamic,
                schedule,
                keep_capped: true,
            };
            let report = match run_algorithm(cfg.algorithm, &g, &opts) {
                Ok(outcome) if outcome.capped => {
                    let traced = run_algorithm(cfg.algorithm, &g, &RunOptions { trace: true, ..opts.clone() })?;
                    let path = dump_dir(cfg).join(format!("trace-{}-{}-{s}.csv", cfg.algorithm, label.replace('/', "_")));
                    fs::write(&path, traced.trace.map(|t| t.to_csv()).unwrap_or_default())?;
                    let mut r = RunReport::build(&label, s, &g, &outcome, cfg.c);
                    r.trace_dump = Some(path.display().to_string());
                    r
                }
                Ok(outcome) => RunReport::build(&label, s, &g, &outcome, cfg.c),
                Err(e) => RunReport::failed(&label, cfg.algorithm, s, &e),
            };
            batch.reports.push(report);
        }
    }
    Ok(batch)
}
