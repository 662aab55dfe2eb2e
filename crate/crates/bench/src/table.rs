//! Joined per-snapshot comparison tables.

use std::io::{self, Write};

use dynconn::workload::{MetricsRecord, OpStats};

/// One replayed configuration.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub records: Vec<MetricsRecord>,
}

fn update_stats(r: &MetricsRecord) -> OpStats {
    let mut s = r.insert_te;
    s.merge(&r.insert_nte);
    s.merge(&r.delete_te);
    s.merge(&r.delete_nte);
    s
}

fn ratio(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    }
}

fn fmt_f(x: Option<f64>, places: usize) -> String {
    x.map(|x| format!("{x:.places$}")).unwrap_or_default()
}

fn fmt_u(x: Option<u64>) -> String {
    x.map(|x| x.to_string()).unwrap_or_default()
}

/// Makes labels unique by suffixing repeats with `#2`, `#3`, ...
pub fn dedup_labels(labels: &mut [String]) {
    for i in 1..labels.len() {
        let base = labels[i].clone();
        let mut n = 1;
        while labels[..i].contains(&labels[i]) {
            n += 1;
            labels[i] = format!("{base}#{n}");
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Ratio of summed S_d, per config after the first.
    pub s_d_ratio: Vec<(String, Option<f64>)>,
}

/// Builds the joined table. Every series must cover the same snapshots.
/// For each config after the first there are S_d and update-latency ratio
/// columns against the first.
pub fn join(series: &[Series]) -> Result<Table, String> {
    let first = series.first().ok_or("nothing to compare")?;
    for s in &series[1..] {
        let a: Vec<_> = first.records.iter().map(|r| r.snapshot_t).collect();
        let b: Vec<_> = s.records.iter().map(|r| r.snapshot_t).collect();
        if a != b {
            return Err(format!(
                "{} and {} cover different snapshots",
                first.label, s.label
            ));
        }
    }
    let mut header = vec!["snapshot_t".to_string()];
    for (i, s) in series.iter().enumerate() {
        let l = &s.label;
        header.extend([
            format!("{l}_s_d"),
            format!("{l}_s_c"),
            format!("{l}_us_update"),
            format!("{l}_us_query"),
        ]);
        if i > 0 {
            header.extend([format!("{l}_s_d_ratio"), format!("{l}_us_update_ratio")]);
        }
    }

    let mut rows = Vec::new();
    for (j, base) in first.records.iter().enumerate() {
        let mut row = vec![base.snapshot_t.to_string()];
        let base_sd = base.s_d_total.map(|x| x as f64);
        let base_up = update_stats(base).mean_us();
        for (i, s) in series.iter().enumerate() {
            let r = &s.records[j];
            let up = update_stats(r).mean_us();
            row.extend([
                fmt_u(r.s_d_total),
                fmt_u(r.s_c_total),
                fmt_f(up, 3),
                fmt_f(r.query.mean_us(), 3),
            ]);
            if i > 0 {
                row.push(fmt_f(ratio(r.s_d_total.map(|x| x as f64), base_sd), 4));
                row.push(fmt_f(ratio(up, base_up), 3));
            }
        }
        rows.push(row);
    }

    let total = |s: &Series| -> Option<f64> {
        s.records
            .iter()
            .map(|r| r.s_d_total.map(|x| x as f64))
            .sum::<Option<f64>>()
    };
    let s_d_ratio = series[1..]
        .iter()
        .map(|s| (s.label.clone(), ratio(total(s), total(first))))
        .collect();
    Ok(Table {
        header,
        rows,
        s_d_ratio,
    })
}

impl Table {
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Right-aligned columns separated by two spaces.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (c, cell) in r.iter().enumerate() {
                width[c] = width[c].max(cell.len());
            }
        }
        let line = |w: &mut W, cells: &[String]| -> io::Result<()> {
            let parts: Vec<_> = cells
                .iter()
                .zip(&width)
                .map(|(c, n)| format!("{c:>n$}"))
                .collect();
            writeln!(w, "{}", parts.join("  "))
        };
        line(&mut w, &self.header)?;
        for r in &self.rows {
            line(&mut w, r)?;
        }
        Ok(())
    }
}
