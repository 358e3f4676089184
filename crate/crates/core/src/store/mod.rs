//! Durable record store.
//!
//! Committed state lives in memory behind a single reader/writer lock. Every
//! committed transaction is appended as one JSON line to a write-ahead journal
//! and the journal is replayed on open. A transaction mutates the tables in
//! place and keeps an undo log, so an error anywhere before the journal write
//! restores the previous state.

mod fixtures;
mod journal;
mod tables;

pub use fixtures::ImportCounts;
pub use tables::{Entity, Record, RecordKind, Tables};

use std::path::Path;

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use journal::Journal;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("conflicting concurrent write: {0}")]
    Conflict(String),
    #[error("no {kind:?} with id {id}")]
    Missing { kind: RecordKind, id: u64 },
    #[error("fixtures can only be imported into an empty store")]
    ImportIntoNonEmptyStore,
    #[error("malformed fixture line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("journal corrupt at line {line}: {reason}")]
    CorruptJournal { line: usize, reason: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

/// A single logged change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    Put(Record),
    Delete { kind: RecordKind, id: u64 },
}

struct Inner {
    tables: Tables,
    /// Highest id ever assigned per kind, including deleted rows.
    high_water: [u64; 7],
}

pub struct Store {
    inner: RwLock<Inner>,
    journal: Option<Mutex<Journal>>,
}

impl Store {
    /// Volatile store with no journal.
    pub fn in_memory() -> Self {
        Store {
            inner: RwLock::new(Inner {
                tables: Tables::default(),
                high_water: [0; 7],
            }),
            journal: None,
        }
    }

    /// Open (or create) a journaled store at `path`, replaying committed
    /// transactions. A torn final line from an interrupted write is discarded.
    pub fn open(path: impl AsRef<Path>, sync: bool) -> Result<Self, StoreError> {
        let mut tables = Tables::default();
        let mut high_water = [0u64; 7];
        let journal = Journal::open(path.as_ref(), sync, |ops| {
            for op in ops {
                match op {
                    Mutation::Put(rec) => {
                        let k = rec.kind().index();
                        high_water[k] = high_water[k].max(rec.id());
                        tables.put_record(rec);
                    }
                    Mutation::Delete { kind, id } => {
                        tables.remove_record(kind, id);
                    }
                }
            }
        })?;
        Ok(Store {
            inner: RwLock::new(Inner { tables, high_water }),
            journal: Some(Mutex::new(journal)),
        })
    }

    /// Run `f` against a consistent snapshot of committed state.
    pub fn read<R>(&self, f: impl FnOnce(&Tables) -> R) -> R {
        f(&self.inner.read().tables)
    }

    pub fn snapshot(&self) -> Tables {
        self.read(Tables::clone)
    }

    /// Run `f` as one all-or-nothing transaction. Changes become visible only
    /// if `f` returns `Ok`, every touched row passes its constraints and the
    /// journal append succeeds.
    pub fn transaction<R, E>(&self, f: impl FnOnce(&mut Tx<'_>) -> Result<R, E>) -> Result<R, E>
    where
        E: From<StoreError>,
    {
        let mut guard = self.inner.write();
        let mut tx = Tx {
            inner: &mut guard,
            undo: Vec::new(),
            log: Vec::new(),
            saved_high_water: [0; 7],
        };
        tx.saved_high_water = tx.inner.high_water;
        let result = f(&mut tx).and_then(|r| {
            tx.validate()?;
            if !tx.log.is_empty() {
                if let Some(j) = &self.journal {
                    j.lock().append(&tx.log)?;
                }
            }
            Ok(r)
        });
        if result.is_err() {
            tx.rollback();
        }
        result
    }

    /// Apply a prepared list of mutations atomically.
    pub fn transact(&self, ops: Vec<Mutation>) -> Result<(), StoreError> {
        self.transaction(|tx| {
            for op in ops {
                match op {
                    Mutation::Put(rec) => tx.put(rec)?,
                    Mutation::Delete { kind, id } => tx.delete(kind, id)?,
                }
            }
            Ok(())
        })
    }

    pub fn export_fixtures(&self, path: impl AsRef<Path>) -> Result<usize, StoreError> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        let n = self.read(|t| fixtures::write(t, &mut w))?;
        std::io::Write::flush(&mut w)?;
        Ok(n)
    }

    pub fn import_fixtures(&self, path: impl AsRef<Path>) -> Result<ImportCounts, StoreError> {
        let file = std::fs::File::open(path)?;
        self.import_from_reader(std::io::BufReader::new(file))
    }

    pub fn export_to_writer(&self, w: &mut impl std::io::Write) -> Result<usize, StoreError> {
        self.read(|t| fixtures::write(t, w))
    }

    pub fn import_from_reader(&self, r: impl std::io::BufRead) -> Result<ImportCounts, StoreError> {
        let records = fixtures::read(r)?;
        self.transaction(|tx| {
            if !tx.tables().is_empty() {
                return Err(StoreError::ImportIntoNonEmptyStore);
            }
            let mut counts = ImportCounts::default();
            for rec in records {
                counts.add(rec.kind());
                tx.put(rec)?;
            }
            Ok(counts)
        })
    }
}

enum Undo {
    Restore(Record),
    Remove(RecordKind, u64),
}

/// Open transaction. Reads through [`Tx::tables`] see this transaction's own
/// writes.
pub struct Tx<'a> {
    inner: &'a mut Inner,
    undo: Vec<Undo>,
    log: Vec<Mutation>,
    saved_high_water: [u64; 7],
}

impl Tx<'_> {
    pub fn tables(&self) -> &Tables {
        &self.inner.tables
    }

    /// Reserve the next id for `kind`.
    pub fn next_id(&mut self, kind: RecordKind) -> u64 {
        let slot = &mut self.inner.high_water[kind.index()];
        *slot += 1;
        *slot
    }

    pub fn get<T: Entity>(&self, id: T::Id) -> Option<&T> {
        self.inner.tables.get(id)
    }

    /// Insert or replace a row. Ledger rows are append-only.
    pub fn put(&mut self, rec: impl Into<Record>) -> Result<(), StoreError> {
        let rec = rec.into();
        let (kind, id) = (rec.kind(), rec.id());
        if id == 0 {
            return Err(StoreError::ConstraintViolation(format!("{}.id_positive", kind.table_name())));
        }
        if kind == RecordKind::CoinTransaction && self.inner.tables.lookup(kind, id).is_some() {
            return Err(StoreError::ConstraintViolation("coin_ledger.immutable".into()));
        }
        let hw = &mut self.inner.high_water[kind.index()];
        *hw = (*hw).max(id);
        let prev = self.inner.tables.put_record(rec.clone());
        self.undo.push(match prev {
            Some(p) => Undo::Restore(p),
            None => Undo::Remove(kind, id),
        });
        self.log.push(Mutation::Put(rec));
        Ok(())
    }

    pub fn delete(&mut self, kind: RecordKind, id: u64) -> Result<(), StoreError> {
        if kind == RecordKind::CoinTransaction {
            return Err(StoreError::ConstraintViolation("coin_ledger.immutable".into()));
        }
        let prev = self
            .inner
            .tables
            .remove_record(kind, id)
            .ok_or(StoreError::Missing { kind, id })?;
        self.undo.push(Undo::Restore(prev));
        self.log.push(Mutation::Delete { kind, id });
        Ok(())
    }

    fn validate(&self) -> Result<(), StoreError> {
        let tables = &self.inner.tables;
        for op in &self.log {
            let violations = match op {
                Mutation::Put(rec) => tables.row_violations(rec.kind(), rec.id()),
                Mutation::Delete { kind, id } => {
                    if tables.lookup(*kind, *id).is_some() {
                        continue;
                    }
                    tables.dangling_references_to(*kind, *id)
                }
            };
            if let Some(first) = violations.first() {
                return Err(StoreError::ConstraintViolation((*first).to_string()));
            }
        }
        Ok(())
    }

    fn rollback(&mut self) {
        while let Some(u) = self.undo.pop() {
            match u {
                Undo::Restore(rec) => {
                    self.inner.tables.put_record(rec);
                }
                Undo::Remove(kind, id) => {
                    self.inner.tables.remove_record(kind, id);
                }
            }
        }
        self.inner.high_water = self.saved_high_water;
        self.log.clear();
    }
}
