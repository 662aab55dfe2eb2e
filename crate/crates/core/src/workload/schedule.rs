//! Survival-time scheduling of raw insertion streams.
//!
//! Every insertion of an edge at time `t` schedules its deletion at
//! `t + survival`. Re-inserting an edge that is still live moves its deletion
//! to `t' + survival` and emits no new event. Deletions due at time `t` run
//! before insertions at `t`, and events of one kind keep input order.
//!
//! Serialized schedules are JSON lines. The first line is the header
//! `{"survival", "seed", "reinsertions", "snapshots"}` (survival is `null` for
//! streams without deletions); every following line is one event
//! `{"t", "op", "u", "v"}` with `op` either `"insert"` or `"delete"`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::digest::Fnv64;
use super::stream::RawEdge;
use crate::dtree::VertexKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventOp {
    Insert,
    Delete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEvent {
    pub t: u64,
    pub op: EventOp,
    pub u: VertexKey,
    pub v: VertexKey,
}

/// Lifetime assigned to each inserted edge, in the stream's time unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Survival {
    Finite(u64),
    /// Edges are never deleted: an insertion-only workload.
    Never,
}

impl fmt::Display for Survival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Survival::Finite(t) => write!(f, "{t}"),
            Survival::Never => f.write_str("never"),
        }
    }
}

impl FromStr for Survival {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "never" => Ok(Survival::Never),
            other => other
                .parse::<u64>()
                .map(Survival::Finite)
                .map_err(|_| format!("survival must be a positive integer or `never`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkloadSchedule {
    pub events: Vec<EdgeEvent>,
    /// Replay takes a snapshot after applying every event with `t <= s`.
    pub snapshots: Vec<u64>,
    pub survival: Survival,
    pub seed: u64,
    /// Raw insertions that hit a live edge (and only extended its lifetime).
    pub reinsertions: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("the edge stream is empty")]
    EmptyStream,
    #[error("survival time must be positive")]
    ZeroSurvival,
    #[error("at least one snapshot is required")]
    ZeroSnapshots,
}

fn edge_id(u: VertexKey, v: VertexKey) -> (VertexKey, VertexKey) {
    (u.min(v), u.max(v))
}

/// Builds the executable event sequence for a raw stream.
///
/// Snapshots are `test_num` points evenly spaced over `(t_s, t_e]`, where
/// `t_s`/`t_e` are the first and last raw timestamps. Deletions scheduled
/// after `t_e` are still emitted, so the schedule ends with an empty graph.
pub fn schedule(
    raw: &[RawEdge],
    survival: Survival,
    test_num: usize,
    seed: u64,
) -> Result<WorkloadSchedule, ScheduleError> {
    if raw.is_empty() {
        return Err(ScheduleError::EmptyStream);
    }
    if survival == Survival::Finite(0) {
        return Err(ScheduleError::ZeroSurvival);
    }
    if test_num == 0 {
        return Err(ScheduleError::ZeroSnapshots);
    }
    let mut sorted = raw.to_vec();
    sorted.sort_by_key(|e| e.t);
    let t_s = sorted[0].t;
    let t_e = sorted[sorted.len() - 1].t;
    let span = (t_e - t_s) as u128;
    let snapshots = (1..=test_num as u128)
        .map(|k| t_s + (span * k / test_num as u128) as u64)
        .collect();

    type Edge = (VertexKey, VertexKey);
    type Due = BinaryHeap<Reverse<(u64, u64, Edge)>>;
    let mut events = Vec::with_capacity(2 * sorted.len());
    // edge -> (expiry, orientation of the first insertion)
    let mut live: HashMap<Edge, (u64, VertexKey, VertexKey)> = HashMap::new();
    // (expiry, sequence number, edge); stale entries are skipped on pop
    let mut due: Due = BinaryHeap::new();
    let mut seq = 0u64;
    let mut reinsertions = 0;

    let expire = |until: Option<u64>,
                  live: &mut HashMap<_, (u64, VertexKey, VertexKey)>,
                  due: &mut Due,
                  events: &mut Vec<EdgeEvent>| {
        while let Some(&Reverse((at, _, id))) = due.peek() {
            if until.is_some_and(|t| at > t) {
                break;
            }
            due.pop();
            if let Some(&(expiry, u, v)) = live.get(&id) {
                if expiry == at {
                    live.remove(&id);
                    events.push(EdgeEvent {
                        t: at,
                        op: EventOp::Delete,
                        u,
                        v,
                    });
                }
            }
        }
    };

    for e in &sorted {
        expire(Some(e.t), &mut live, &mut due, &mut events);
        let id = edge_id(e.u, e.v);
        let expiry = match survival {
            Survival::Finite(d) => e.t.saturating_add(d),
            Survival::Never => u64::MAX,
        };
        match live.get_mut(&id) {
            Some(entry) => {
                reinsertions += 1;
                entry.0 = expiry;
            }
            None => {
                live.insert(id, (expiry, e.u, e.v));
                events.push(EdgeEvent {
                    t: e.t,
                    op: EventOp::Insert,
                    u: e.u,
                    v: e.v,
                });
            }
        }
        if let Survival::Finite(_) = survival {
            due.push(Reverse((expiry, seq, id)));
            seq += 1;
        }
    }
    expire(None, &mut live, &mut due, &mut events);

    Ok(WorkloadSchedule {
        events,
        snapshots,
        survival,
        seed,
        reinsertions,
    })
}

#[derive(Serialize, Deserialize)]
struct Header {
    survival: Option<u64>,
    seed: u64,
    reinsertions: usize,
    snapshots: Vec<u64>,
}

impl WorkloadSchedule {
    pub fn has_deletes(&self) -> bool {
        self.events.iter().any(|e| e.op == EventOp::Delete)
    }

    /// Stable digest of the event sequence and snapshot points.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv64::new();
        h.u64(self.events.len() as u64);
        for e in &self.events {
            h.u64(e.t).u64(e.op as u64).u64(e.u.0).u64(e.v.0);
        }
        h.u64(self.snapshots.len() as u64);
        for &s in &self.snapshots {
            h.u64(s);
        }
        h.finish()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header = Header {
            survival: match self.survival {
                Survival::Finite(d) => Some(d),
                Survival::Never => None,
            },
            seed: self.seed,
            reinsertions: self.reinsertions,
            snapshots: self.snapshots.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for e in &self.events {
            serde_json::to_writer(&mut w, e)?;
            writeln!(w)?;
        }
        w.flush()
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Self> {
        let mut lines = r.lines();
        let header: Header = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => {
                return Err(io::Error::new(
                    io::ErrorKind::UnexpectedEof,
                    "missing header",
                ))
            }
        };
        let mut events = Vec::new();
        for line in lines {
            let line = line?;
            if !line.trim().is_empty() {
                events.push(serde_json::from_str(&line)?);
            }
        }
        Ok(WorkloadSchedule {
            events,
            snapshots: header.snapshots,
            survival: header.survival.map_or(Survival::Never, Survival::Finite),
            seed: header.seed,
            reinsertions: header.reinsertions,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: u64, op: EventOp, u: u64, v: u64) -> EdgeEvent {
        EdgeEvent {
            t,
            op,
            u: VertexKey(u),
            v: VertexKey(v),
        }
    }

    #[test]
    fn insert_spawns_delete_after_survival() {
        let s = schedule(&[RawEdge::new(1, 2, 0)], Survival::Finite(14), 1, 0).unwrap();
        assert_eq!(
            s.events,
            vec![ev(0, EventOp::Insert, 1, 2), ev(14, EventOp::Delete, 1, 2)]
        );
    }

    #[test]
    fn reinsertion_extends_survival() {
        let raw = [RawEdge::new(1, 2, 0), RawEdge::new(2, 1, 5)];
        let s = schedule(&raw, Survival::Finite(14), 1, 0).unwrap();
        assert_eq!(
            s.events,
            vec![ev(0, EventOp::Insert, 1, 2), ev(19, EventOp::Delete, 1, 2)]
        );
        assert_eq!(s.reinsertions, 1);
    }

    #[test]
    fn snapshots_are_evenly_spaced() {
        let raw = [RawEdge::new(1, 2, 0), RawEdge::new(3, 4, 1000)];
        let s = schedule(&raw, Survival::Finite(14), 100, 0).unwrap();
        let expect: Vec<u64> = (1..=100).map(|k| 10 * k).collect();
        assert_eq!(s.snapshots, expect);
    }

    #[test]
    fn deletes_run_before_inserts_at_the_same_time() {
        // (1,2) expires at 10 exactly when it is inserted again
        let raw = [RawEdge::new(1, 2, 0), RawEdge::new(1, 2, 10)];
        let s = schedule(&raw, Survival::Finite(10), 1, 0).unwrap();
        assert_eq!(
            s.events,
            vec![
                ev(0, EventOp::Insert, 1, 2),
                ev(10, EventOp::Delete, 1, 2),
                ev(10, EventOp::Insert, 1, 2),
                ev(20, EventOp::Delete, 1, 2),
            ]
        );
        assert_eq!(s.reinsertions, 0);
    }

    #[test]
    fn ties_keep_input_order() {
        let raw = [
            RawEdge::new(5, 6, 3),
            RawEdge::new(1, 2, 3),
            RawEdge::new(3, 4, 1),
        ];
        let s = schedule(&raw, Survival::Never, 1, 0).unwrap();
        let order: Vec<_> = s.events.iter().map(|e| e.u.0).collect();
        assert_eq!(order, vec![3, 5, 1]);
        assert!(!s.has_deletes());
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(
            schedule(&[], Survival::Finite(1), 1, 0),
            Err(ScheduleError::EmptyStream)
        );
        let raw = [RawEdge::new(1, 2, 0)];
        assert_eq!(
            schedule(&raw, Survival::Finite(0), 1, 0),
            Err(ScheduleError::ZeroSurvival)
        );
        assert_eq!(
            schedule(&raw, Survival::Finite(1), 0, 0),
            Err(ScheduleError::ZeroSnapshots)
        );
    }

    #[test]
    fn every_delete_follows_a_live_insert() {
        let raw: Vec<_> = (0..200u64)
            .map(|i| RawEdge::new(i % 7, 7 + i % 5, i / 3))
            .collect();
        let s = schedule(&raw, Survival::Finite(4), 10, 0).unwrap();
        let mut live = std::collections::HashSet::new();
        for e in &s.events {
            let id = edge_id(e.u, e.v);
            match e.op {
                EventOp::Insert => assert!(live.insert(id)),
                EventOp::Delete => assert!(live.remove(&id)),
            }
        }
        assert!(live.is_empty());
        assert!(s.events.windows(2).all(|w| w[0].t <= w[1].t));
    }

    #[test]
    fn jsonl_round_trip() {
        let raw = [RawEdge::new(1, 2, 0), RawEdge::new(2, 3, 4)];
        let s = schedule(&raw, Survival::Finite(3), 4, 9).unwrap();
        let mut buf = Vec::new();
        s.write_jsonl(&mut buf).unwrap();
        let back = WorkloadSchedule::read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.digest(), s.digest());
    }

    #[test]
    fn survival_parses() {
        assert_eq!("14".parse::<Survival>(), Ok(Survival::Finite(14)));
        assert_eq!("never".parse::<Survival>(), Ok(Survival::Never));
        assert!("x".parse::<Survival>().is_err());
    }
}
