//! JSON-Lines storage for reward-labeled datasets: one tuple per line,
//! `{s, a, r, s2, pair_id, side, t}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::types::{LabelMethod, LabelingMeta, Provenance, RewardLabeledDataset, RewardTuple, Side};

#[derive(Debug, Serialize, Deserialize)]
struct TupleRecord {
    s: usize,
    a: usize,
    r: f64,
    s2: usize,
    pair_id: u64,
    side: Side,
    t: usize,
}

pub fn save_labeled(labeled: &RewardLabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    for (tuple, prov) in labeled.iter() {
        let record = TupleRecord {
            s: tuple.state,
            a: tuple.action,
            r: tuple.reward,
            s2: tuple.next_state,
            pair_id: prov.pair_id,
            side: prov.side,
            t: prov.t,
        };
        writeln!(w, "{}", serde_json::to_string(&record)?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_labeled(path: impl AsRef<Path>) -> Result<RewardLabeledDataset> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut tuples = Vec::new();
    let mut provenance = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TupleRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?;
        tuples.push(RewardTuple {
            state: record.s,
            action: record.a,
            reward: record.r,
            next_state: record.s2,
        });
        provenance.push(Provenance { pair_id: record.pair_id, side: record.side, t: record.t });
    }
    RewardLabeledDataset::new(tuples, provenance, LabelingMeta::for_method(LabelMethod::External))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::binary_label;
    use crate::pref::synthetic;

    #[test]
    fn labeled_round_trip_preserves_tuples_and_provenance() {
        let ds = synthetic::no_overlap_dataset(30, 4, 4, 3, 9).unwrap();
        let labeled = binary_label(&ds).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.jsonl");
        save_labeled(&labeled, &path).unwrap();
        let back = load_labeled(&path).unwrap();
        assert_eq!(labeled.tuples(), back.tuples());
        assert_eq!(labeled.provenance(), back.provenance());
    }

    #[test]
    fn corrupt_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.jsonl");
        std::fs::write(
            &path,
            "{\"s\":0,\"a\":0,\"r\":1.0,\"s2\":0,\"pair_id\":0,\"side\":\"chosen\",\"t\":0}\nnot json\n",
        )
        .unwrap();
        match load_labeled(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
