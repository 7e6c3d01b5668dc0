//! Plain-text checkpoint format for training runs.
//!
//! Layout (version 1), line oriented, space separated:
//!
//! ```text
//! thermoedge-checkpoint v1
//! seed <u64>
//! topology <input> <hidden> <output>
//! epochs <n>
//! epoch <k>
//! train_mse <f64>
//! val_mse <f64>
//! w1 <hidden*input values, row-major>
//! b1 <hidden values>
//! w2 <hidden values>
//! b2 <1 value>
//! ... one epoch block per completed epoch, ascending ...
//! end
//! ```
//!
//! Floats are written in Rust's shortest round-trip decimal form, so loading
//! restores bit-identical parameters and rewriting an unchanged checkpoint
//! reproduces the file byte for byte. The layout is stable: breaking changes
//! bump the version token.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::nn::{EpochRecord, Mlp, NetworkTopology, TrainingHistory};

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("checkpoint line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> CheckpointError {
    CheckpointError::Malformed {
        line,
        message: message.into(),
    }
}

/// A training run as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub seed: u64,
    pub history: TrainingHistory,
}

impl Checkpoint {
    pub fn new(seed: u64, history: TrainingHistory) -> Self {
        Self { seed, history }
    }

    pub fn topology(&self) -> NetworkTopology {
        self.history.records()[0].snapshot.topology()
    }
}

/// Serializes a checkpoint to the v1 text format.
pub fn to_string(checkpoint: &Checkpoint) -> String {
    let records = checkpoint.history.records();
    assert!(!records.is_empty(), "checkpoint needs at least one epoch");
    let topology = records[0].snapshot.topology();

    let mut out = String::new();
    out.push_str("thermoedge-checkpoint v1\n");
    let _ = writeln!(out, "seed {}", checkpoint.seed);
    let _ = writeln!(
        out,
        "topology {} {} {}",
        topology.input_size(),
        topology.hidden_size(),
        topology.output_size()
    );
    let _ = writeln!(out, "epochs {}", records.len());
    for record in records {
        let _ = writeln!(out, "epoch {}", record.epoch);
        let _ = writeln!(out, "train_mse {}", record.train_mse);
        let _ = writeln!(out, "val_mse {}", record.val_mse);
        for (name, block) in [
            ("w1", record.snapshot.w1()),
            ("b1", record.snapshot.b1()),
            ("w2", record.snapshot.w2()),
            ("b2", record.snapshot.b2()),
        ] {
            out.push_str(name);
            for value in block {
                let _ = write!(out, " {value}");
            }
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

/// Parses the v1 text format.
pub fn from_str(text: &str) -> Result<Checkpoint, CheckpointError> {
    let mut lines = text.lines().enumerate();

    let mut next_line = |expectation: &str| -> Result<(usize, &str), CheckpointError> {
        lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| malformed(0, format!("file ended, expected {expectation}")))
    };

    let (n, header) = next_line("header")?;
    if header != "thermoedge-checkpoint v1" {
        return Err(malformed(n, format!("unknown header {header:?}")));
    }

    let (n, seed_line) = next_line("seed")?;
    let seed = parse_tagged_u64(n, seed_line, "seed")?;

    let (n, topo_line) = next_line("topology")?;
    let sizes = parse_tagged_values(n, topo_line, "topology")?;
    if sizes.len() != 3 {
        return Err(malformed(n, "topology needs exactly three sizes"));
    }
    let topology = NetworkTopology::new(sizes[0] as usize, sizes[1] as usize, sizes[2] as usize)
        .map_err(|e| malformed(n, e.to_string()))?;

    let (n, epochs_line) = next_line("epochs")?;
    let epochs = parse_tagged_u64(n, epochs_line, "epochs")? as usize;
    if epochs == 0 {
        return Err(malformed(n, "checkpoint holds zero epochs"));
    }

    let mut records = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        let (n, epoch_line) = next_line("epoch")?;
        let epoch = parse_tagged_u64(n, epoch_line, "epoch")? as usize;
        let (n, train_line) = next_line("train_mse")?;
        let train_mse = parse_tagged_f64(n, train_line, "train_mse")?;
        let (n, val_line) = next_line("val_mse")?;
        let val_mse = parse_tagged_f64(n, val_line, "val_mse")?;

        let mut blocks = Vec::with_capacity(4);
        for (name, len) in [
            ("w1", topology.hidden_size() * topology.input_size()),
            ("b1", topology.hidden_size()),
            ("w2", topology.output_size() * topology.hidden_size()),
            ("b2", topology.output_size()),
        ] {
            let (n, line) = next_line(name)?;
            let values = parse_tagged_floats(n, line, name)?;
            if values.len() != len {
                return Err(malformed(
                    n,
                    format!("{name} holds {} values, expected {len}", values.len()),
                ));
            }
            blocks.push(values);
        }
        let b2 = blocks.pop().unwrap();
        let w2 = blocks.pop().unwrap();
        let b1 = blocks.pop().unwrap();
        let w1 = blocks.pop().unwrap();
        let snapshot = Mlp::from_parts(topology, w1, b1, w2, b2)
            .map_err(|e| malformed(n, e.to_string()))?;
        records.push(EpochRecord {
            epoch,
            train_mse,
            val_mse,
            snapshot,
        });
    }

    let (n, tail) = next_line("end")?;
    if tail != "end" {
        return Err(malformed(n, format!("expected end marker, got {tail:?}")));
    }

    Ok(Checkpoint::new(seed, TrainingHistory::new(records)))
}

fn split_tag<'a>(
    line_no: usize,
    line: &'a str,
    tag: &str,
) -> Result<std::str::SplitWhitespace<'a>, CheckpointError> {
    let mut parts = line.split_whitespace();
    match parts.next() {
        Some(found) if found == tag => Ok(parts),
        other => Err(malformed(
            line_no,
            format!("expected {tag:?}, got {other:?}"),
        )),
    }
}

fn parse_tagged_u64(line_no: usize, line: &str, tag: &str) -> Result<u64, CheckpointError> {
    let mut parts = split_tag(line_no, line, tag)?;
    let value = parts
        .next()
        .ok_or_else(|| malformed(line_no, format!("{tag} is missing its value")))?;
    value
        .parse()
        .map_err(|_| malformed(line_no, format!("{tag} value {value:?} is not an integer")))
}

fn parse_tagged_f64(line_no: usize, line: &str, tag: &str) -> Result<f64, CheckpointError> {
    let mut parts = split_tag(line_no, line, tag)?;
    let value = parts
        .next()
        .ok_or_else(|| malformed(line_no, format!("{tag} is missing its value")))?;
    value
        .parse()
        .map_err(|_| malformed(line_no, format!("{tag} value {value:?} is not a number")))
}

fn parse_tagged_values(line_no: usize, line: &str, tag: &str) -> Result<Vec<u64>, CheckpointError> {
    split_tag(line_no, line, tag)?
        .map(|v| {
            v.parse()
                .map_err(|_| malformed(line_no, format!("{tag} value {v:?} is not an integer")))
        })
        .collect()
}

fn parse_tagged_floats(line_no: usize, line: &str, tag: &str) -> Result<Vec<f64>, CheckpointError> {
    split_tag(line_no, line, tag)?
        .map(|v| {
            v.parse()
                .map_err(|_| malformed(line_no, format!("{tag} value {v:?} is not a number")))
        })
        .collect()
}

/// Writes a checkpoint file.
pub fn save(checkpoint: &Checkpoint, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
    let path = path.as_ref();
    std::fs::write(path, to_string(checkpoint)).map_err(|source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a checkpoint file.
pub fn load(path: impl AsRef<Path>) -> Result<Checkpoint, CheckpointError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_str(&text)
}
