use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mac_forest::graph::generate::{GraphKind, WeightKind};
use mac_forest::graph::io::write_graph;
use mac_forest::harness::{
    activation_trial, five_phase_trial, run_experiment, weight_trial, AdversarySpec, Batch, ExperimentConfig, Format,
    InstanceSpec, LowerBoundKind, LowerBoundReport, Seeds,
};
use mac_forest::oracle::RunReport;
use mac_forest::station::AlgorithmName;
use mac_forest::{Error, Result};

#[derive(Parser)]
#[command(name = "mac-forest", version, about = "Spanning forests over a multiple-access channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and print it in graph-file format.
    Gen {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an algorithm over an (instance x seed) grid and check every run.
    Run(RunArgs),
    /// Run a lower-bound adversary.
    Lowerbound(LowerBoundArgs),
    /// Summarize JSONL run reports.
    Report {
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, default_value = "random-connected")]
    kind: GraphKind,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<usize>,
    /// none, distinct, unit-fractions or k-distinct:K
    #[arg(long, default_value = "none")]
    weights: WeightKind,
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
}

impl InstanceArgs {
    fn spec(&self) -> Result<InstanceSpec> {
        let (n, m) = match (self.n, self.m) {
            (Some(n), Some(m)) => (n, m),
            _ => return Err(Error::Config("--n and --m are required".into())),
        };
        Ok(InstanceSpec::Generated { kind: self.kind, n, m, weights: self.weights, seed: self.graph_seed })
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algo: Option<AlgorithmName>,
    /// Graph file instead of a generated instance.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    instance: InstanceArgs,
    /// `7`, `1,4,9` or `0..100`
    #[arg(long)]
    seeds: Option<Seeds>,
    #[arg(long)]
    global_seed: Option<u64>,
    /// static or random:H
    #[arg(long)]
    adversary: Option<AdversarySpec>,
    #[arg(long)]
    c: Option<u64>,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Skip the per-step lockstep and partition assertions.
    #[arg(long)]
    no_checks: bool,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => {
                let algo = self.algo.ok_or_else(|| Error::Config("--algo or --config is required".into()))?;
                ExperimentConfig::new(algo, Vec::new(), Seeds::default())
            }
        };
        if let Some(a) = self.algo {
            cfg.algorithm = a;
        }
        if let Some(file) = &self.input {
            cfg.instances = vec![InstanceSpec::File { file: file.clone() }];
        } else if self.instance.n.is_some() || self.instance.m.is_some() {
            cfg.instances = vec![self.instance.spec()?];
        }
        if cfg.instances.is_empty() {
            return Err(Error::Config("no instance: give --input, --n/--m or a config file".into()));
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = s.clone();
        }
        if let Some(g) = self.global_seed {
            cfg.global_seed = g;
        }
        if let Some(a) = self.adversary {
            cfg.adversary = a;
        }
        if let Some(c) = self.c {
            cfg.c = c;
        }
        if self.cap.is_some() {
            cfg.cap = self.cap;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.summary.is_some() {
            cfg.summary = self.summary.clone();
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if self.no_checks {
            cfg.checks = false;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct LowerBoundArgs {
    /// five-phase, weight or activation
    #[arg(long)]
    adversary: LowerBoundKind,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value = "0")]
    seeds: Seeds,
    /// Prey for the weight adversary: oblivious-rr or rand-weighted.
    #[arg(long, default_value = "oblivious-rr")]
    algo: AlgorithmName,
    /// Forest shape for the activation adversary.
    #[arg(long, default_value = "path")]
    kind: GraphKind,
    #[arg(long, default_value_t = 2)]
    c: u64,
    /// Largest query size for the five-phase prey.
    #[arg(long, default_value_t = 4)]
    max_query: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "jsonl")]
    format: Format,
}

fn lowerbound(args: &LowerBoundArgs) -> Result<Vec<LowerBoundReport>> {
    args.seeds
        .as_slice()
        .iter()
        .map(|&seed| match args.adversary {
            LowerBoundKind::FivePhase => {
                let n = args.n.ok_or_else(|| Error::Config("five-phase needs --n".into()))?;
                five_phase_trial(n, args.m, args.max_query, seed)
            }
            LowerBoundKind::Weight => weight_trial(args.algo, args.m, seed),
            LowerBoundKind::Activation => activation_trial(args.kind, args.m, args.c, seed),
        })
        .collect()
}

fn lowerbound_text(reports: &[LowerBoundReport], format: Format) -> String {
    match format {
        Format::Jsonl => reports.iter().map(|r| serde_json::to_string(r).expect("reports serialize") + "\n").collect(),
        Format::Csv => {
            let mut out = String::from("adversary,prey,n,m,seed,forced_steps,bound,passed\n");
            for r in reports {
                writeln!(out, "{},{},{},{},{},{},{},{}", r.adversary, r.prey, r.n, r.m, r.seed, r.forced_steps, r.bound, r.passed())
                    .unwrap();
            }
            out
        }
    }
}

fn emit(path: Option<&PathBuf>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { instance, out } => {
            let g = instance.spec()?.load()?;
            emit(out.as_ref(), &write_graph(&g))?;
            Ok(true)
        }
        Command::Run(args) => {
            let cfg = args.config()?;
            let batch = run_experiment(&cfg)?;
            batch.write(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", batch.to_csv());
            }
            if cfg.summary.is_none() {
                eprint!("{}", batch.summary_csv());
            }
            Ok(batch.passed())
        }
        Command::Lowerbound(args) => {
            let reports = lowerbound(&args)?;
            emit(args.out.as_ref(), &lowerbound_text(&reports, args.format))?;
            Ok(reports.iter().all(LowerBoundReport::passed))
        }
        Command::Report { files } => {
            let mut batch = Batch::default();
            for f in files {
                for (i, line) in fs::read_to_string(&f)?.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                    let r: RunReport =
                        serde_json::from_str(line).map_err(|e| Error::Parse { line: i + 1, msg: format!("{}: {e}", f.display()) })?;
                    batch.reports.push(r);
                }
            }
            print!("{}", batch.summary_csv());
            Ok(batch.passed())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
