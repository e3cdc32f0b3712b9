use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const HISTORY_CSV_HEADER: &str = "epoch,sse,learning_rate,accepted";

/// One attempted epoch. `sse` is the total over the training set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub sse: f64,
    pub learning_rate: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    records: Vec<EpochRecord>,
}

impl TrainingHistory {
    pub(crate) fn push(&mut self, record: EpochRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.epoch < record.epoch));
        self.records.push(record);
    }

    pub fn records(&self) -> &[EpochRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// SSE of the last accepted epoch.
    pub fn final_sse(&self) -> Option<f64> {
        self.records
            .iter()
            .rev()
            .find(|r| r.accepted)
            .map(|r| r.sse)
    }

    pub fn rejected(&self) -> usize {
        self.records.iter().filter(|r| !r.accepted).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(HISTORY_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:?},{:?},{}",
                r.epoch, r.sse, r.learning_rate, r.accepted
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == HISTORY_CSV_HEADER => {}
            _ => {
                return Err(Error::Format(format!(
                    "history CSV must start with {HISTORY_CSV_HEADER:?}"
                )))
            }
        }
        let mut records = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse {
                line: idx + 1,
                message: format!("invalid {what} in history row {line:?}"),
            };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(bad("field count"));
            }
            records.push(EpochRecord {
                epoch: fields[0].parse().map_err(|_| bad("epoch"))?,
                sse: fields[1].parse().map_err(|_| bad("sse"))?,
                learning_rate: fields[2].parse().map_err(|_| bad("learning_rate"))?,
                accepted: fields[3].parse().map_err(|_| bad("accepted"))?,
            });
        }
        Ok(TrainingHistory { records })
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut h = TrainingHistory::default();
        h.push(EpochRecord {
            epoch: 1,
            sse: 3.25,
            learning_rate: 0.1,
            accepted: true,
        });
        h.push(EpochRecord {
            epoch: 2,
            sse: 0.1 + 0.2,
            learning_rate: 0.105,
            accepted: false,
        });
        let text = h.to_csv();
        assert!(text.starts_with("epoch,sse,learning_rate,accepted\n1,3.25,0.1,true\n"));
        assert_eq!(TrainingHistory::from_csv(&text).unwrap(), h);
        assert_eq!(h.final_sse(), Some(3.25));
        assert_eq!(h.rejected(), 1);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(matches!(
            TrainingHistory::from_csv("epoch,loss\n"),
            Err(Error::Format(_))
        ));
    }
}
