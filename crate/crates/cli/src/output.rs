use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Invalid flag value or combination; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Malformed input content outside the graph parser; exit code 3.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn input(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    use qfern::Error as E;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if cause.is::<InputError>() || cause.is::<std::io::Error>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidParameter(_)
                | E::InvalidQuantile(_)
                | E::InvalidFanOut { .. }
                | E::InvalidNode { .. }
                | E::UncenteredOmega { .. } => 2,
                E::Io(_) | E::Parse { .. } | E::DimensionMismatch { .. } => 3,
                E::DisconnectedGraph { .. }
                | E::NoCandidateEdges
                | E::DirectedInput
                | E::NonSymmetric { .. }
                | E::TooLarge { .. }
                | E::EmptyReport => 4,
                E::ConvergenceFailure { .. } | E::NonFiniteState { .. } => 1,
            };
        }
    }
    1
}

/// Rounds every float in `v` to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) => {
            if num.is_f64() {
                if let Some(x) = num.as_f64().map(qfern::fmt::round_sig12) {
                    if let Some(r) = serde_json::Number::from_f64(x) {
                        *num = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub params: Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Collects output files and writes them together with a manifest.
pub struct Run {
    manifest: RunManifest,
}

impl Run {
    pub fn new(command: &'static str, seed: Option<u64>, params: Value) -> Self {
        Run {
            manifest: RunManifest {
                command,
                version: env!("CARGO_PKG_VERSION"),
                seed,
                params,
                inputs: Vec::new(),
                outputs: Vec::new(),
            },
        }
    }

    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.manifest.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes)
            .map_err(|_| input(format!("{} is not valid UTF-8", path.display())))
    }

    pub fn write(&mut self, path: impl AsRef<Path>, contents: &str) -> Result<()> {
        let path = path.as_ref();
        create_parent(path)?;
        fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn finish(self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = to_json(&self.manifest)?;
        create_parent(path)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
        }
        _ => Ok(()),
    }
}

/// `<prefix>.<suffix>`.
pub fn prefixed(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}.{suffix}"))
}

/// `<path>.manifest.json`.
pub fn manifest_beside(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
