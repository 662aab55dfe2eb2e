//! Edge-stream files: one `<u> <v> <t>` insertion per line, whitespace
//! separated non-negative integers. Blank lines and lines starting with `#`
//! are ignored. Lines need not be sorted by timestamp.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dtree::VertexKey;

/// A timestamped edge insertion from a raw stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEdge {
    pub u: VertexKey,
    pub v: VertexKey,
    pub t: u64,
}

impl RawEdge {
    pub fn new(u: u64, v: u64, t: u64) -> Self {
        RawEdge {
            u: VertexKey(u),
            v: VertexKey(v),
            t,
        }
    }
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn parse_stream<R: BufRead>(reader: R) -> Result<Vec<RawEdge>, StreamError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let err = |message: String| StreamError::Parse {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!(
                "expected `<u> <v> <t>`, found {} fields",
                fields.len()
            )));
        }
        let mut nums = [0u64; 3];
        for (slot, f) in nums.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| err(format!("`{f}` is not a non-negative integer")))?;
        }
        if nums[0] == nums[1] {
            return Err(err(format!("self-loop on vertex {}", nums[0])));
        }
        out.push(RawEdge::new(nums[0], nums[1], nums[2]));
    }
    Ok(out)
}

pub fn parse_stream_str(text: &str) -> Result<Vec<RawEdge>, StreamError> {
    parse_stream(text.as_bytes())
}

pub fn read_stream_file(path: &Path) -> Result<Vec<RawEdge>, StreamError> {
    parse_stream(BufReader::new(File::open(path)?))
}

pub fn write_stream<W: Write>(mut w: W, edges: &[RawEdge]) -> io::Result<()> {
    for e in edges {
        writeln!(w, "{} {} {}", e.u, e.v, e.t)?;
    }
    w.flush()
}
