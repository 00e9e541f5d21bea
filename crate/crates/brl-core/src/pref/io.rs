//! JSON-Lines serialization for preference datasets.
//!
//! Line 1 is a header `{version, T, link_kind, ...}`; every following line
//! is one pair `{pair_id, c1, t1: [{s,a,s2}...], c2, t2: [...], labels}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{Step, TrajectoryClip};
use crate::error::{Error, Result};
use crate::pref::{LinkFunction, PreferenceDataset, PreferencePair};

pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: u32,
    #[serde(rename = "T")]
    clip_length: usize,
    #[serde(flatten)]
    link: LinkFunction,
}

#[derive(Debug, Serialize, Deserialize)]
struct PairRecord {
    pair_id: u64,
    c1: u64,
    t1: Vec<Step>,
    c2: u64,
    t2: Vec<Step>,
    labels: Vec<u8>,
}

impl From<&PreferencePair> for PairRecord {
    fn from(p: &PreferencePair) -> Self {
        PairRecord {
            pair_id: p.pair_id,
            c1: p.clip_1.clip_id,
            t1: p.clip_1.steps.clone(),
            c2: p.clip_2.clip_id,
            t2: p.clip_2.steps.clone(),
            labels: p.labels.clone(),
        }
    }
}

impl TryFrom<PairRecord> for PreferencePair {
    type Error = Error;

    fn try_from(r: PairRecord) -> Result<Self> {
        Ok(PreferencePair {
            pair_id: r.pair_id,
            clip_1: TrajectoryClip::new(r.c1, r.t1)?,
            clip_2: TrajectoryClip::new(r.c2, r.t2)?,
            labels: r.labels,
        })
    }
}

/// Write a dataset as JSON Lines. The byte output is a pure function of the
/// dataset contents.
pub fn save_dataset(dataset: &PreferenceDataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    let header = Header {
        version: DATASET_FORMAT_VERSION,
        clip_length: dataset.clip_length(),
        link: dataset.link(),
    };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    for pair in dataset.pairs() {
        writeln!(w, "{}", serde_json::to_string(&PairRecord::from(pair))?)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a dataset back, validating every invariant. Malformed lines report
/// their 1-based line number.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<PreferenceDataset> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty file; header expected".into() })??;
    let header: Header = serde_json::from_str(&header_line)
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    if header.version != DATASET_FORMAT_VERSION {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unsupported format version {}", header.version),
        });
    }

    let mut pairs = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PairRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
        pairs.push(PreferencePair::try_from(record)?);
    }
    PreferenceDataset::new(pairs, header.clip_length, header.link)
}
