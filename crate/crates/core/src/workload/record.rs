//! Per-snapshot measurements and their serialized forms.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::digest::Fnv64;

/// Structure-level classification of an update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpClass {
    InsertTe,
    InsertNte,
    DeleteTe,
    DeleteNte,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpStats {
    pub count: u64,
    pub total_ns: u64,
}

impl OpStats {
    pub fn add(&mut self, ns: u64) {
        self.count += 1;
        self.total_ns += ns;
    }

    pub fn merge(&mut self, other: &OpStats) {
        self.count += other.count;
        self.total_ns += other.total_ns;
    }

    /// Mean latency in microseconds, `None` if nothing was counted.
    pub fn mean_us(&self) -> Option<f64> {
        (self.count > 0).then(|| self.total_ns as f64 / self.count as f64 / 1000.0)
    }
}

/// Measurements taken at one snapshot. Update counters cover the events
/// replayed since the previous snapshot; query counters cover only this
/// snapshot's battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub snapshot_t: u64,
    pub structure: String,
    /// `None` for structures without a spanning forest (union-find).
    pub s_d_total: Option<u64>,
    pub s_c_total: Option<u64>,
    pub n_components: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub depth_histogram: BTreeMap<usize, usize>,
    pub insert_te: OpStats,
    pub insert_nte: OpStats,
    pub delete_te: OpStats,
    pub delete_nte: OpStats,
    /// `count` is the number of pairs asked; `total_ns` the whole battery.
    pub query: OpStats,
    pub connected_pairs: u64,
    /// Order-insensitive hash of the `(u, v, connected)` answers.
    pub query_digest: u64,
}

impl MetricsRecord {
    pub fn op(&self, class: OpClass) -> &OpStats {
        match class {
            OpClass::InsertTe => &self.insert_te,
            OpClass::InsertNte => &self.insert_nte,
            OpClass::DeleteTe => &self.delete_te,
            OpClass::DeleteNte => &self.delete_nte,
        }
    }

    pub fn op_mut(&mut self, class: OpClass) -> &mut OpStats {
        match class {
            OpClass::InsertTe => &mut self.insert_te,
            OpClass::InsertNte => &mut self.insert_nte,
            OpClass::DeleteTe => &mut self.delete_te,
            OpClass::DeleteNte => &mut self.delete_nte,
        }
    }

    /// Digest of everything except wall-clock latencies.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv64::new();
        h.u64(self.snapshot_t).bytes(self.structure.as_bytes());
        for x in [self.s_d_total, self.s_c_total] {
            h.u64(x.map_or(u64::MAX, |v| v));
        }
        h.u64(self.n_components as u64)
            .u64(self.n_vertices as u64)
            .u64(self.n_edges as u64);
        for (&d, &c) in &self.depth_histogram {
            h.u64(d as u64).u64(c as u64);
        }
        for s in [
            &self.insert_te,
            &self.insert_nte,
            &self.delete_te,
            &self.delete_nte,
            &self.query,
        ] {
            h.u64(s.count);
        }
        h.u64(self.connected_pairs).u64(self.query_digest);
        h.finish()
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "snapshot_t",
    "structure",
    "s_d_total",
    "s_c_total",
    "n_components",
    "n_vertices",
    "n_edges",
    "mean_us_insert_te",
    "mean_us_insert_nte",
    "mean_us_delete_te",
    "mean_us_delete_nte",
    "mean_us_query",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the fixed-header CSV. Missing values are empty fields.
pub fn write_csv<W: Write>(w: W, records: &[MetricsRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.write_record([
            r.snapshot_t.to_string(),
            r.structure.clone(),
            opt(r.s_d_total),
            opt(r.s_c_total),
            r.n_components.to_string(),
            r.n_vertices.to_string(),
            r.n_edges.to_string(),
            opt(r.insert_te.mean_us()),
            opt(r.insert_nte.mean_us()),
            opt(r.delete_te.mean_us()),
            opt(r.delete_nte.mean_us()),
            opt(r.query.mean_us()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One JSON object per line, fields in struct order.
pub fn write_jsonl<W: Write>(mut w: W, records: &[MetricsRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    w.flush()
}

pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Vec<MetricsRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MetricsRecord {
        MetricsRecord {
            snapshot_t: 10,
            structure: "dtree".into(),
            s_d_total: Some(7),
            s_c_total: Some(7),
            n_components: 2,
            n_vertices: 9,
            n_edges: 8,
            depth_histogram: BTreeMap::from([(0, 2), (1, 4), (2, 3)]),
            insert_te: OpStats {
                count: 4,
                total_ns: 4000,
            },
            insert_nte: OpStats::default(),
            delete_te: OpStats::default(),
            delete_nte: OpStats::default(),
            query: OpStats {
                count: 36,
                total_ns: 900,
            },
            connected_pairs: 20,
            query_digest: 42,
        }
    }

    #[test]
    fn csv_has_fixed_header_and_blank_missing_means() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[sample()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "10,dtree,7,7,2,9,8,1,,,,0.025");
    }

    #[test]
    fn digest_ignores_latencies() {
        let a = sample();
        let mut b = a.clone();
        b.insert_te.total_ns = 1;
        b.query.total_ns = 77;
        assert_eq!(a.digest(), b.digest());
        b.query_digest = 43;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn jsonl_round_trip() {
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &[sample(), sample()]).unwrap();
        assert_eq!(read_jsonl(&buf[..]).unwrap(), vec![sample(), sample()]);
    }
}
