//! Driving connectivity structures through a schedule.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::digest::{mix64, Fnv64};
use super::record::{MetricsRecord, OpClass, OpStats};
use super::schedule::{EventOp, WorkloadSchedule};
use crate::baseline::{AdjacencyGraph, OracleError, UnionFind, DEFAULT_COMPONENT_CAP};
use crate::dtree::{DTreeError, DeleteOutcome, Forest, InsertOutcome, Policy, VertexKey};

/// Below this many vertices the default battery asks every pair.
pub const SMALL_GRAPH_VERTICES: usize = 10_000;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error(transparent)]
    DTree(#[from] DTreeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0} does not support edge deletion")]
    Unsupported(String),
}

/// Shape statistics at a snapshot. Structures without trees leave the
/// forest-specific fields empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructureStats {
    pub s_d_total: Option<u64>,
    pub s_c_total: Option<u64>,
    pub n_components: usize,
    pub n_vertices: usize,
    pub depth_histogram: BTreeMap<usize, usize>,
}

/// Anything the replay engine can drive.
pub trait ConnectivityStructure: Send {
    fn name(&self) -> &str;
    fn supports_deletion(&self) -> bool;
    fn insert(&mut self, u: VertexKey, v: VertexKey) -> Result<OpClass, StructureError>;
    fn delete(&mut self, u: VertexKey, v: VertexKey) -> Result<OpClass, StructureError>;
    fn connected(&mut self, u: VertexKey, v: VertexKey) -> Result<bool, StructureError>;
    fn stats(&self) -> Result<StructureStats, StructureError>;
    /// Embedded edges as sorted `(min, max)` pairs, if the structure keeps them.
    fn edges(&self) -> Option<Vec<(VertexKey, VertexKey)>>;
    /// Internal consistency problems, empty when healthy.
    fn check(&self) -> Vec<String> {
        Vec::new()
    }
}

impl ConnectivityStructure for Forest {
    fn name(&self) -> &str {
        if self.policy() == Policy::naive() {
            "naive"
        } else {
            "dtree"
        }
    }

    fn supports_deletion(&self) -> bool {
        true
    }

    fn insert(&mut self, u: VertexKey, v: VertexKey) -> Result<OpClass, StructureError> {
        Ok(match self.insert_edge(u, v)? {
            InsertOutcome::TreeEdge(_) => OpClass::InsertTe,
            InsertOutcome::NonTreeEdge(_) | InsertOutcome::AlreadyPresent => OpClass::InsertNte,
        })
    }

    fn delete(&mut self, u: VertexKey, v: VertexKey) -> Result<OpClass, StructureError> {
        Ok(match self.delete_edge(u, v)? {
            DeleteOutcome::NonTree => OpClass::DeleteNte,
            DeleteOutcome::Reconnected(_) | DeleteOutcome::SplitInto(..) => OpClass::DeleteTe,
        })
    }

    fn connected(&mut self, u: VertexKey, v: VertexKey) -> Result<bool, StructureError> {
        Ok(self.conn(u, v)?)
    }

    fn stats(&self) -> Result<StructureStats, StructureError> {
        Ok(StructureStats {
            s_d_total: Some(self.s_d_total()),
            s_c_total: Some(self.s_c_total()),
            n_components: self.component_count(),
            n_vertices: self.vertex_count(),
            depth_histogram: self.depth_histogram_total(),
        })
    }

    fn edges(&self) -> Option<Vec<(VertexKey, VertexKey)>> {
        Some(Forest::edges(self))
    }

    fn check(&self) -> Vec<String> {
        self.validate().iter().map(|v| format!("{v:?}")).collect()
    }
}

impl ConnectivityStructure for UnionFind {
    fn name(&self) -> &str {
        "unionfind"
    }

    fn supports_deletion(&self) -> bool {
        false
    }

    fn insert(&mut self, u: VertexKey, v: VertexKey) -> Result<OpClass, StructureError> {
        Ok(if self.union(u, v) {
            OpClass::InsertTe
        } else {
            OpClass::InsertNte
        })
    }

    fn delete(&mut self, _: VertexKey, _: VertexKey) -> Result<OpClass, StructureError> {
        Err(StructureError::Unsupported("unionfind".into()))
    }

    fn connected(&mut self, u: VertexKey, v: VertexKey) -> Result<bool, StructureError> {
        Ok(UnionFind::connected(self, u, v))
    }

    fn stats(&self) -> Result<StructureStats, StructureError> {
        Ok(StructureStats {
            n_components: self.set_count(),
            n_vertices: self.len(),
            ..StructureStats::default()
        })
    }

    fn edges(&self) -> Option<Vec<(VertexKey, VertexKey)>> {
        None
    }
}

/// The adjacency-list oracle as a structure. Updates are classified and
/// queries answered by breadth-first search; shape statistics are those of
/// the optimal BFS tree of every component, so its `s_d_total` is a lower
/// bound for any spanning forest of the same graph.
#[derive(Debug, Clone)]
pub struct OracleStructure {
    graph: AdjacencyGraph,
    cap: usize,
    /// Component labels, computed on the first query after an update.
    labels: Option<HashMap<VertexKey, usize>>,
}

impl Default for OracleStructure {
    fn default() -> Self {
        Self::new(DEFAULT_COMPONENT_CAP)
    }
}

impl OracleStructure {
    /// `cap` bounds the component size the all-sources statistics accept.
    pub fn new(cap: usize) -> Self {
        OracleStructure {
            graph: AdjacencyGraph::new(),
            cap,
            labels: None,
        }
    }

    pub fn graph(&self) -> &AdjacencyGraph {
        &self.graph
    }
}

impl ConnectivityStructure for OracleStructure {
    fn name(&self) -> &str {
        "oracle"
    }

    fn supports_deletion(&self) -> bool {
        true
    }

    fn insert(&mut self, u: VertexKey, v: VertexKey) -> Result<OpClass, StructureError> {
        self.labels = None;
        let joined =
            self.graph.contains(u) && self.graph.contains(v) && self.graph.oracle_conn(u, v)?;
        self.graph.insert_edge(u, v)?;
        Ok(if joined {
            OpClass::InsertNte
        } else {
            OpClass::InsertTe
        })
    }

    fn delete(&mut self, u: VertexKey, v: VertexKey) -> Result<OpClass, StructureError> {
        self.labels = None;
        if !self.graph.remove_edge(u, v) {
            return Err(DTreeError::NoSuchEdge(u, v).into());
        }
        Ok(if self.graph.oracle_conn(u, v)? {
            OpClass::DeleteNte
        } else {
            OpClass::DeleteTe
        })
    }

    fn connected(&mut self, u: VertexKey, v: VertexKey) -> Result<bool, StructureError> {
        let labels = self
            .labels
            .get_or_insert_with(|| self.graph.component_labels());
        match (labels.get(&u), labels.get(&v)) {
            (Some(a), Some(b)) => Ok(a == b),
            (None, _) => Err(OracleError::UnknownVertex(u).into()),
            (_, None) => Err(OracleError::UnknownVertex(v).into()),
        }
    }

    fn stats(&self) -> Result<StructureStats, StructureError> {
        let reps = self.graph.component_representatives();
        let mut stats = StructureStats {
            s_d_total: Some(0),
            s_c_total: Some(0),
            n_components: reps.len(),
            n_vertices: self.graph.vertex_count(),
            depth_histogram: BTreeMap::new(),
        };
        for r in reps {
            let t = self.graph.opt_bfs_tree(r, self.cap)?;
            *stats.s_d_total.as_mut().unwrap() += t.s_d;
            *stats.s_c_total.as_mut().unwrap() += t.s_c();
            for (d, c) in t.depth_histogram() {
                *stats.depth_histogram.entry(d).or_insert(0) += c;
            }
        }
        Ok(stats)
    }

    fn edges(&self) -> Option<Vec<(VertexKey, VertexKey)>> {
        Some(self.graph.edges())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryMode {
    /// All pairs below [`SMALL_GRAPH_VERTICES`] vertices, otherwise
    /// `random_pairs` random pairs.
    Auto {
        random_pairs: usize,
    },
    AllPairs,
    Random(usize),
}

impl Default for QueryMode {
    fn default() -> Self {
        QueryMode::Auto {
            random_pairs: 10_000,
        }
    }
}

fn for_each_pair(
    vertices: &[VertexKey],
    mode: QueryMode,
    seed: u64,
    mut f: impl FnMut(VertexKey, VertexKey) -> Result<(), ReplayError>,
) -> Result<(), ReplayError> {
    let mode = match mode {
        QueryMode::Auto { random_pairs } if vertices.len() >= SMALL_GRAPH_VERTICES => {
            QueryMode::Random(random_pairs)
        }
        QueryMode::Auto { .. } => QueryMode::AllPairs,
        m => m,
    };
    match mode {
        QueryMode::AllPairs => {
            for (i, &u) in vertices.iter().enumerate() {
                for &v in &vertices[i + 1..] {
                    f(u, v)?;
                }
            }
        }
        QueryMode::Random(n) => {
            if vertices.is_empty() {
                return Ok(());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let u = vertices[rng.random_range(0..vertices.len())];
                let v = vertices[rng.random_range(0..vertices.len())];
                f(u, v)?;
            }
        }
        QueryMode::Auto { .. } => unreachable!(),
    }
    Ok(())
}

/// The query pairs asked at a snapshot. `AllPairs` lists each unordered pair
/// once in `vertices` order; `Random` draws both ends uniformly with
/// replacement.
pub fn query_battery(
    vertices: &[VertexKey],
    mode: QueryMode,
    seed: u64,
) -> Vec<(VertexKey, VertexKey)> {
    let mut out = Vec::new();
    for_each_pair(vertices, mode, seed, |u, v| {
        out.push((u, v));
        Ok(())
    })
    .expect("collecting pairs cannot fail");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random pairs checked against the shadow graph after every event.
    pub pairs_per_event: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            pairs_per_event: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReplayConfig {
    pub query_mode: QueryMode,
    /// Differential checking against an adjacency-list shadow graph.
    pub verify: Option<VerifyOptions>,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("event {event_index}: {source}")]
    Structure {
        event_index: usize,
        #[source]
        source: StructureError,
    },
    #[error("event {event_index}: conn({u}, {v}) returned {got}, expected {expected}")]
    Mismatch {
        event_index: usize,
        u: VertexKey,
        v: VertexKey,
        expected: bool,
        got: bool,
    },
    #[error("event {event_index}: embedded edge set differs from the live edges ({detail})")]
    EdgeSetMismatch { event_index: usize, detail: String },
    #[error("event {event_index}: structure invariant broken: {detail}")]
    Invalid { event_index: usize, detail: String },
    #[error("{0} cannot replay a schedule with deletions")]
    DeletesUnsupported(String),
}

fn pair_hash(u: VertexKey, v: VertexKey, connected: bool) -> u64 {
    let (a, b) = (u.min(v), u.max(v));
    mix64(
        Fnv64::new()
            .u64(a.0)
            .u64(b.0)
            .u64(connected as u64)
            .finish(),
    )
}

struct Shadow {
    graph: AdjacencyGraph,
    rng: ChaCha8Rng,
    pairs: usize,
}

/// Applies the schedule's events in order and records metrics at each
/// snapshot. A snapshot at time `s` is taken once every event with `t <= s`
/// has been applied; events after the last snapshot are still applied (and
/// verified) but not recorded.
pub fn replay(
    schedule: &WorkloadSchedule,
    structure: &mut dyn ConnectivityStructure,
    config: &ReplayConfig,
) -> Result<Vec<MetricsRecord>, ReplayError> {
    if schedule.events.is_empty() {
        return Ok(Vec::new());
    }
    if !structure.supports_deletion() && schedule.has_deletes() {
        return Err(ReplayError::DeletesUnsupported(
            structure.name().to_string(),
        ));
    }
    let mut shadow = config.verify.map(|v| Shadow {
        graph: AdjacencyGraph::new(),
        rng: ChaCha8Rng::seed_from_u64(mix64(schedule.seed ^ 0x5eed)),
        pairs: v.pairs_per_event,
    });
    let mut vertices: Vec<VertexKey> = Vec::new();
    let mut seen: HashSet<VertexKey> = HashSet::new();
    let mut live_edges = 0usize;
    let mut window: HashMap<OpClass, OpStats> = HashMap::new();
    let mut records = Vec::with_capacity(schedule.snapshots.len());
    let mut next = 0;

    for (i, e) in schedule.events.iter().enumerate() {
        while next < schedule.snapshots.len() && e.t > schedule.snapshots[next] {
            records.push(snapshot(
                schedule,
                structure,
                config,
                &vertices,
                live_edges,
                &mut window,
                next,
                i,
                shadow.as_ref(),
            )?);
            next += 1;
        }
        for k in [e.u, e.v] {
            if seen.insert(k) {
                vertices.push(k);
            }
        }
        let start = Instant::now();
        let class = match e.op {
            EventOp::Insert => structure.insert(e.u, e.v),
            EventOp::Delete => structure.delete(e.u, e.v),
        };
        let ns = start.elapsed().as_nanos() as u64;
        let class = class.map_err(|source| ReplayError::Structure {
            event_index: i,
            source,
        })?;
        window.entry(class).or_default().add(ns);
        match e.op {
            EventOp::Insert => live_edges += 1,
            EventOp::Delete => live_edges -= 1,
        }

        if let Some(sh) = shadow.as_mut() {
            match e.op {
                EventOp::Insert => {
                    sh.graph
                        .insert_edge(e.u, e.v)
                        .expect("stream has no self-loops");
                }
                EventOp::Delete => {
                    sh.graph.remove_edge(e.u, e.v);
                }
            }
            let labels = sh.graph.component_labels();
            for _ in 0..sh.pairs {
                let u = vertices[sh.rng.random_range(0..vertices.len())];
                let v = vertices[sh.rng.random_range(0..vertices.len())];
                let expected = labels[&u] == labels[&v];
                let got = structure
                    .connected(u, v)
                    .map_err(|source| ReplayError::Structure {
                        event_index: i,
                        source,
                    })?;
                if got != expected {
                    return Err(ReplayError::Mismatch {
                        event_index: i,
                        u,
                        v,
                        expected,
                        got,
                    });
                }
            }
        }
    }
    let n = schedule.events.len();
    while next < schedule.snapshots.len() {
        records.push(snapshot(
            schedule,
            structure,
            config,
            &vertices,
            live_edges,
            &mut window,
            next,
            n,
            shadow.as_ref(),
        )?);
        next += 1;
    }
    Ok(records)
}

#[allow(clippy::too_many_arguments)]
fn snapshot(
    schedule: &WorkloadSchedule,
    structure: &mut dyn ConnectivityStructure,
    config: &ReplayConfig,
    vertices: &[VertexKey],
    live_edges: usize,
    window: &mut HashMap<OpClass, OpStats>,
    index: usize,
    event_index: usize,
    shadow: Option<&Shadow>,
) -> Result<MetricsRecord, ReplayError> {
    let structure_err = |source| ReplayError::Structure {
        event_index,
        source,
    };
    let labels = shadow.map(|sh| sh.graph.component_labels());
    if let Some(sh) = shadow {
        if let Some(mut got) = structure.edges() {
            got.sort();
            let expect = sh.graph.edges();
            if got != expect {
                let detail = format!("{} embedded, {} live", got.len(), expect.len());
                return Err(ReplayError::EdgeSetMismatch {
                    event_index,
                    detail,
                });
            }
        }
        if let Some(first) = structure.check().into_iter().next() {
            return Err(ReplayError::Invalid {
                event_index,
                detail: first,
            });
        }
    }

    let mut digest = 0u64;
    let mut connected_pairs = 0u64;
    let mut asked = 0u64;
    let seed = mix64(schedule.seed.wrapping_add(index as u64));
    let start = Instant::now();
    for_each_pair(vertices, config.query_mode, seed, |u, v| {
        let got = structure.connected(u, v).map_err(structure_err)?;
        if let Some(labels) = &labels {
            let expected = labels[&u] == labels[&v];
            if got != expected {
                return Err(ReplayError::Mismatch {
                    event_index,
                    u,
                    v,
                    expected,
                    got,
                });
            }
        }
        asked += 1;
        connected_pairs += got as u64;
        digest = digest.wrapping_add(pair_hash(u, v, got));
        Ok(())
    })?;
    let query = OpStats {
        count: asked,
        total_ns: start.elapsed().as_nanos() as u64,
    };

    let stats = structure.stats().map_err(structure_err)?;
    let mut take = |c| window.remove(&c).unwrap_or_default();
    Ok(MetricsRecord {
        snapshot_t: schedule.snapshots[index],
        structure: structure.name().to_string(),
        s_d_total: stats.s_d_total,
        s_c_total: stats.s_c_total,
        n_components: stats.n_components,
        n_vertices: stats.n_vertices,
        n_edges: live_edges,
        depth_histogram: stats.depth_histogram,
        insert_te: take(OpClass::InsertTe),
        insert_nte: take(OpClass::InsertNte),
        delete_te: take(OpClass::DeleteTe),
        delete_nte: take(OpClass::DeleteNte),
        query,
        connected_pairs,
        query_digest: digest,
    })
}
