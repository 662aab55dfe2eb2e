//! Input sources: stream files and `gen:` generator specs.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dynconn::workload::{gen_random_dynamic, gen_star_of_lines, read_stream_file, RawEdge};

use crate::CliError;

/// A stream file or a generator spec.
///
/// Generator specs look like `gen:random:n=1000,m=5000,churn=0.2[,seed=7]`
/// or `gen:star:k=48,n=480`.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    File(PathBuf),
    Random {
        n: u64,
        m: usize,
        churn: f64,
        seed: Option<u64>,
    },
    Star {
        k: usize,
        n: usize,
    },
}

impl InputSpec {
    /// Loads or generates the raw stream. `seed` is used by the random
    /// generator unless the spec carries its own.
    pub fn load(&self, seed: u64) -> Result<Vec<RawEdge>, CliError> {
        match self {
            InputSpec::File(path) => read_stream_file(path)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
            InputSpec::Random {
                n,
                m,
                churn,
                seed: s,
            } => gen_random_dynamic(*n, *m, *churn, s.unwrap_or(seed))
                .map_err(|e| CliError::Usage(e.to_string())),
            InputSpec::Star { k, n } => gen_star_of_lines(*k, *n)
                .map(|(_, stream)| stream)
                .map_err(|e| CliError::Usage(e.to_string())),
        }
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSpec::File(p) => write!(f, "{}", p.display()),
            InputSpec::Random { n, m, churn, seed } => {
                write!(f, "gen:random:n={n},m={m},churn={churn}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
            InputSpec::Star { k, n } => write!(f, "gen:star:k={k},n={n}"),
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("bad value for {key}: {value:?}"))
}

impl FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let Some(rest) = s.strip_prefix("gen:") else {
            if s.is_empty() {
                return Err("empty input".into());
            }
            return Ok(InputSpec::File(PathBuf::from(s)));
        };
        let (kind, params) = rest.split_once(':').unwrap_or((rest, ""));
        let mut kv = Vec::new();
        for part in params.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            kv.push((key.trim().to_ascii_lowercase(), value.trim()));
        }
        let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
        let need = |key: &str| get(key).ok_or_else(|| format!("gen:{kind} needs {key}="));
        let allow = |keys: &[&str]| match kv.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
            Some((k, _)) => Err(format!("gen:{kind} does not take {k}=")),
            None => Ok(()),
        };
        match kind {
            "random" => {
                allow(&["n", "m", "churn", "seed"])?;
                Ok(InputSpec::Random {
                    n: num("n", need("n")?)?,
                    m: num("m", need("m")?)?,
                    churn: get("churn")
                        .map(|c| num("churn", c))
                        .transpose()?
                        .unwrap_or(0.0),
                    seed: get("seed").map(|c| num("seed", c)).transpose()?,
                })
            }
            "star" => {
                allow(&["k", "n"])?;
                Ok(InputSpec::Star {
                    k: num("k", need("k")?)?,
                    n: num("n", need("n")?)?,
                })
            }
            other => Err(format!(
                "unknown generator {other:?} (expected random or star)"
            )),
        }
    }
}
