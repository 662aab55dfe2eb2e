//! Command-line front end for replaying edge-stream workloads on the
//! dynconn structures.
//!
//! Exit codes: 0 success, 1 usage, 2 verification mismatch, 3 runtime error.

pub mod input;
pub mod table;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynconn::baseline::UnionFind;
use dynconn::workload::record::{read_jsonl, write_csv, write_jsonl};
use dynconn::workload::{
    replay, schedule, write_stream, ConnectivityStructure, MetricsRecord, OpStats, OracleStructure,
    QueryMode, ReplayConfig, ReplayError, Survival, VerifyOptions, WorkloadSchedule,
};
use dynconn::{Forest, Policy};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use input::InputSpec;
use table::{dedup_labels, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("schedule mismatch: {0}")]
    ScheduleMismatch(String),
    #[error("verification failed: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::ScheduleMismatch(_) => EXIT_USAGE,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn io(what: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Runtime(format!("{}: {e}", what.display()))
    }
}

impl From<ReplayError> for CliError {
    fn from(e: ReplayError) -> Self {
        match e {
            ReplayError::Mismatch {
                event_index,
                u,
                v,
                expected,
                got,
            } => CliError::Mismatch(format!(
                "first divergence at event {event_index}: pair ({u}, {v}) expected {expected}, got {got}"
            )),
            e @ (ReplayError::EdgeSetMismatch { .. } | ReplayError::Invalid { .. }) => {
                CliError::Mismatch(e.to_string())
            }
            e @ ReplayError::DeletesUnsupported(_) => CliError::Usage(e.to_string()),
            e @ ReplayError::Structure { .. } => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    /// D-tree with centroid restoration, shortcuts and min-depth replacement
    Dtree,
    /// spanning tree without any of the D-tree heuristics
    Naive,
    /// insert-only union-find
    Unionfind,
    /// adjacency lists with BFS queries and optimal BFS trees
    Oracle,
}

impl StructureKind {
    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Dtree => "dtree",
            StructureKind::Naive => "naive",
            StructureKind::Unionfind => "unionfind",
            StructureKind::Oracle => "oracle",
        }
    }

    pub fn build(self) -> Box<dyn ConnectivityStructure> {
        match self {
            StructureKind::Dtree => Box::new(Forest::with_policy(Policy::dtree())),
            StructureKind::Naive => Box::new(Forest::with_policy(Policy::naive())),
            StructureKind::Unionfind => Box::new(UnionFind::new()),
            StructureKind::Oracle => Box::new(OracleStructure::default()),
        }
    }
}

/// `auto`, `all`, or a number of random pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Queries(pub QueryMode);

impl FromStr for Queries {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Queries(QueryMode::default())),
            "all" => Ok(Queries(QueryMode::AllPairs)),
            n => n
                .parse()
                .map(|n| Queries(QueryMode::Random(n)))
                .map_err(|_| format!("expected auto, all or a pair count, got {n:?}")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dynconn",
    version,
    about = "Replay dynamic-graph workloads on connectivity structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay a workload on one structure and write per-snapshot metrics
    Run(RunArgs),
    /// Replay one workload on several structures and join the results
    Compare(CompareArgs),
    /// Write a generated edge stream
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct WorkloadArgs {
    /// Edge-stream file, or gen:random:n=..,m=..,churn=..[,seed=..] or gen:star:k=..,n=..
    #[arg(long, env = "DYNCONN_INPUT")]
    pub input: Option<InputSpec>,
    /// Edge lifetime in stream time units, or `never`
    #[arg(long, env = "DYNCONN_SURVIVAL", default_value = "14")]
    pub survival: Survival,
    /// Number of evenly spaced snapshots
    #[arg(long, env = "DYNCONN_SNAPSHOTS", default_value_t = 100)]
    pub snapshots: usize,
    /// Query battery per snapshot: auto, all, or a number of random pairs
    #[arg(long, env = "DYNCONN_QUERIES", default_value = "auto")]
    pub queries: Queries,
    #[arg(long, env = "DYNCONN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Check every event against a BFS oracle
    #[arg(long, env = "DYNCONN_VERIFY")]
    pub verify: bool,
    /// Random pairs checked per event in verify mode
    #[arg(long, env = "DYNCONN_VERIFY_PAIRS", default_value_t = 100)]
    pub verify_pairs: usize,
}

impl WorkloadArgs {
    pub fn schedule(&self) -> Result<WorkloadSchedule, CliError> {
        let input = self
            .input
            .as_ref()
            .ok_or_else(|| CliError::Usage("--input is required".into()))?;
        let raw = input.load(self.seed)?;
        schedule(&raw, self.survival, self.snapshots, self.seed)
            .map_err(|e| CliError::Usage(format!("{input}: {e}")))
    }

    pub fn replay_config(&self) -> ReplayConfig {
        ReplayConfig {
            query_mode: self.queries.0,
            verify: self.verify.then_some(VerifyOptions {
                pairs_per_event: self.verify_pairs,
            }),
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, env = "DYNCONN_STRUCTURE", value_enum, default_value_t = StructureKind::Dtree)]
    pub structure: StructureKind,
    #[command(flatten)]
    pub workload: WorkloadArgs,
    /// Output directory for metrics.csv, metrics.jsonl and run.json;
    /// without it the CSV goes to stdout
    #[arg(long, env = "DYNCONN_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Structures to replay, first one is the ratio baseline
    #[arg(long, value_enum, value_delimiter = ',', env = "DYNCONN_STRUCTURE")]
    pub structure: Vec<StructureKind>,
    /// Earlier `run --out` directories to join; they come before any
    /// --structure runs
    #[arg(long)]
    pub from: Vec<PathBuf>,
    #[command(flatten)]
    pub workload: WorkloadArgs,
    /// Replay the structures on separate threads
    #[arg(long)]
    pub parallel: bool,
    /// Directory for compare.csv
    #[arg(long, env = "DYNCONN_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator spec: random:n=..,m=..,churn=..[,seed=..] or star:k=..,n=..
    /// (the gen: prefix is optional)
    #[arg(long)]
    pub spec: String,
    #[arg(long, env = "DYNCONN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout if absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What `run` records next to the metrics, so `compare --from` can check
/// that runs replayed the same schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub structure: StructureKind,
    pub input: String,
    pub survival: String,
    pub snapshots: usize,
    pub seed: u64,
    pub events: usize,
    pub schedule_digest: String,
}

fn manifest(kind: StructureKind, w: &WorkloadArgs, s: &WorkloadSchedule) -> RunManifest {
    RunManifest {
        structure: kind,
        input: w.input.as_ref().map(|i| i.to_string()).unwrap_or_default(),
        survival: w.survival.to_string(),
        snapshots: w.snapshots,
        seed: w.seed,
        events: s.events.len(),
        schedule_digest: format!("{:016x}", s.digest()),
    }
}

fn check_structure(kind: StructureKind, s: &WorkloadSchedule) -> Result<(), CliError> {
    if kind == StructureKind::Unionfind && s.has_deletes() {
        return Err(CliError::Usage(
            "unionfind cannot replay a schedule with deletions (use --survival never)".into(),
        ));
    }
    Ok(())
}

fn replay_one(
    kind: StructureKind,
    s: &WorkloadSchedule,
    cfg: &ReplayConfig,
) -> Result<Vec<MetricsRecord>, CliError> {
    let mut st = kind.build();
    Ok(replay(s, st.as_mut(), cfg)?)
}

fn summarize(kind: StructureKind, s: &WorkloadSchedule, recs: &[MetricsRecord], secs: f64) {
    let mut total = [OpStats::default(); 5];
    for r in recs {
        for (t, x) in total.iter_mut().zip([
            &r.insert_te,
            &r.insert_nte,
            &r.delete_te,
            &r.delete_nte,
            &r.query,
        ]) {
            t.merge(x);
        }
    }
    let us = |o: &OpStats| {
        o.mean_us()
            .map(|x| format!("{x:.3}us x{}", o.count))
            .unwrap_or_else(|| "-".into())
    };
    eprintln!(
        "{}: {} events, {} snapshots in {secs:.2}s; insert_te {}, insert_nte {}, delete_te {}, delete_nte {}, query {}",
        kind.name(),
        s.events.len(),
        recs.len(),
        us(&total[0]),
        us(&total[1]),
        us(&total[2]),
        us(&total[3]),
        us(&total[4]),
    );
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let s = args.workload.schedule()?;
    check_structure(args.structure, &s)?;
    let start = Instant::now();
    let recs = replay_one(args.structure, &s, &args.workload.replay_config())?;
    summarize(args.structure, &s, &recs, start.elapsed().as_secs_f64());
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let p = dir.join("metrics.csv");
            write_csv(create(&p)?, &recs).map_err(|e| CliError::io(&p, e))?;
            let p = dir.join("metrics.jsonl");
            write_jsonl(create(&p)?, &recs).map_err(|e| CliError::io(&p, e))?;
            let p = dir.join("run.json");
            let mut w = create(&p)?;
            serde_json::to_writer_pretty(&mut w, &manifest(args.structure, &args.workload, &s))
                .map_err(|e| CliError::io(&p, e))?;
            writeln!(w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(&p, e))?;
        }
        None => {
            write_csv(io::stdout().lock(), &recs).map_err(|e| CliError::Runtime(e.to_string()))?
        }
    }
    Ok(())
}

fn load_run(dir: &Path) -> Result<(RunManifest, Vec<MetricsRecord>), CliError> {
    let p = dir.join("run.json");
    let f = File::open(&p).map_err(|e| CliError::io(&p, e))?;
    let m: RunManifest =
        serde_json::from_reader(BufReader::new(f)).map_err(|e| CliError::io(&p, e))?;
    let p = dir.join("metrics.jsonl");
    let f = File::open(&p).map_err(|e| CliError::io(&p, e))?;
    let recs = read_jsonl(BufReader::new(f)).map_err(|e| CliError::io(&p, e))?;
    Ok((m, recs))
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    if args.structure.len() + args.from.len() < 2 {
        return Err(CliError::Usage(
            "compare needs at least two configurations (--structure or --from)".into(),
        ));
    }
    // (label, schedule digest, where it came from)
    let mut digests: Vec<(String, String, String)> = Vec::new();
    let mut series = Vec::new();
    for dir in &args.from {
        let (m, recs) = load_run(dir)?;
        digests.push((
            m.structure.name().into(),
            m.schedule_digest,
            dir.display().to_string(),
        ));
        series.push(Series {
            label: m.structure.name().into(),
            records: recs,
        });
    }
    if !args.structure.is_empty() {
        let s = args.workload.schedule()?;
        for &k in &args.structure {
            check_structure(k, &s)?;
        }
        let d = format!("{:016x}", s.digest());
        let from = args
            .workload
            .input
            .as_ref()
            .map(|i| i.to_string())
            .unwrap_or_default();
        for &k in &args.structure {
            digests.push((k.name().into(), d.clone(), from.clone()));
        }
        check_digests(&digests)?;
        let cfg = args.workload.replay_config();
        let results: Vec<Result<Vec<MetricsRecord>, CliError>> = if args.parallel {
            std::thread::scope(|scope| {
                let handles: Vec<_> = args
                    .structure
                    .iter()
                    .map(|&k| {
                        let (s, cfg) = (&s, &cfg);
                        scope.spawn(move || replay_one(k, s, cfg))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| {
                        h.join().unwrap_or_else(|_| {
                            Err(CliError::Runtime("replay thread panicked".into()))
                        })
                    })
                    .collect()
            })
        } else {
            args.structure
                .iter()
                .map(|&k| {
                    let start = Instant::now();
                    let r = replay_one(k, &s, &cfg);
                    if let Ok(recs) = &r {
                        summarize(k, &s, recs, start.elapsed().as_secs_f64());
                    }
                    r
                })
                .collect()
        };
        for (&k, r) in args.structure.iter().zip(results) {
            series.push(Series {
                label: k.name().into(),
                records: r?,
            });
        }
    } else {
        check_digests(&digests)?;
    }

    let mut labels: Vec<_> = series.iter().map(|s| s.label.clone()).collect();
    dedup_labels(&mut labels);
    for (s, l) in series.iter_mut().zip(labels) {
        s.label = l;
    }
    let table = table::join(&series).map_err(CliError::ScheduleMismatch)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let p = dir.join("compare.csv");
        table
            .write_csv(create(&p)?)
            .map_err(|e| CliError::io(&p, e))?;
    }
    let mut out = io::stdout().lock();
    let w = (|| {
        table.write_text(&mut out)?;
        for (label, r) in &table.s_d_ratio {
            if let Some(r) = r {
                writeln!(out, "S_d {label}/{}: {r:.4}", series[0].label)?;
            }
        }
        out.flush()
    })();
    w.map_err(|e| CliError::Runtime(e.to_string()))
}

fn check_digests(d: &[(String, String, String)]) -> Result<(), CliError> {
    let (l0, d0, f0) = &d[0];
    for (l, x, f) in &d[1..] {
        if x != d0 {
            return Err(CliError::ScheduleMismatch(format!(
                "{l0} ({f0}) replayed schedule {d0}, {l} ({f}) replayed {x}"
            )));
        }
    }
    Ok(())
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let spec = if args.spec.starts_with("gen:") {
        args.spec.clone()
    } else {
        format!("gen:{}", args.spec)
    };
    let spec: InputSpec = spec.parse().map_err(CliError::Usage)?;
    let stream = spec.load(args.seed)?;
    match &args.out {
        Some(p) => write_stream(create(p)?, &stream).map_err(|e| CliError::io(p, e)),
        None => write_stream(BufWriter::new(io::stdout().lock()), &stream)
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let r = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match r {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("dynconn: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dynconn::VertexKey;

    #[test]
    fn divergence_report_and_exit_codes() {
        let e: CliError = ReplayError::Mismatch {
            event_index: 41,
            u: VertexKey(3),
            v: VertexKey(9),
            expected: true,
            got: false,
        }
        .into();
        assert_eq!(e.exit_code(), EXIT_MISMATCH);
        let msg = e.to_string();
        for part in ["event 41", "(3, 9)", "expected true", "got false"] {
            assert!(msg.contains(part), "{msg}");
        }
        let e: CliError = ReplayError::Invalid {
            event_index: 0,
            detail: "x".into(),
        }
        .into();
        assert_eq!(e.exit_code(), EXIT_MISMATCH);
        let e: CliError = ReplayError::DeletesUnsupported("unionfind".into()).into();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        assert_eq!(
            CliError::ScheduleMismatch(String::new()).exit_code(),
            EXIT_USAGE
        );
        assert_eq!(CliError::Runtime(String::new()).exit_code(), EXIT_RUNTIME);
    }

    #[test]
    fn queries_parse() {
        assert_eq!("all".parse::<Queries>().unwrap().0, QueryMode::AllPairs);
        assert_eq!("25".parse::<Queries>().unwrap().0, QueryMode::Random(25));
        assert_eq!("auto".parse::<Queries>().unwrap().0, QueryMode::default());
        assert!("some".parse::<Queries>().is_err());
    }
}
