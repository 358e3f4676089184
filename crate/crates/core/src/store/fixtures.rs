use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::Serialize;

use super::{Record, RecordKind, StoreError, Tables};

/// Number of records imported per kind.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportCounts {
    pub by_kind: BTreeMap<RecordKind, usize>,
}

impl ImportCounts {
    pub(super) fn add(&mut self, kind: RecordKind) {
        *self.by_kind.entry(kind).or_default() += 1;
    }

    pub fn total(&self) -> usize {
        self.by_kind.values().sum()
    }

    pub fn get(&self, kind: RecordKind) -> usize {
        self.by_kind.get(&kind).copied().unwrap_or(0)
    }
}

pub(super) fn write(tables: &Tables, w: &mut impl Write) -> Result<usize, StoreError> {
    let mut n = 0;
    for rec in tables.records() {
        serde_json::to_writer(&mut *w, &rec)?;
        w.write_all(b"\n")?;
        n += 1;
    }
    Ok(n)
}

pub(super) fn read(r: impl BufRead) -> Result<Vec<Record>, StoreError> {
    let mut out = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| StoreError::MalformedLine {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}
