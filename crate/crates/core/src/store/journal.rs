use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Mutation, StoreError};

#[derive(Serialize, Deserialize)]
struct Entry {
    ops: Vec<Mutation>,
}

pub(super) struct Journal {
    file: File,
    sync: bool,
}

impl Journal {
    pub(super) fn open(
        path: &Path,
        sync: bool,
        mut replay: impl FnMut(Vec<Mutation>),
    ) -> Result<Self, StoreError> {
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)?;

        let mut good_len = 0u64;
        let mut reader = BufReader::new(&file);
        let mut line = String::new();
        let mut line_no = 0;
        loop {
            line.clear();
            let n = reader.read_line(&mut line)?;
            if n == 0 {
                break;
            }
            line_no += 1;
            if !line.ends_with('\n') {
                // interrupted append; never acknowledged as committed
                break;
            }
            let entry: Entry =
                serde_json::from_str(line.trim_end()).map_err(|e| StoreError::CorruptJournal {
                    line: line_no,
                    reason: e.to_string(),
                })?;
            replay(entry.ops);
            good_len += n as u64;
        }
        drop(reader);

        if file.metadata()?.len() != good_len {
            file.set_len(good_len)?;
            file.seek(SeekFrom::End(0))?;
        }
        Ok(Journal { file, sync })
    }

    pub(super) fn append(&mut self, ops: &[Mutation]) -> Result<(), StoreError> {
        #[derive(Serialize)]
        struct EntryRef<'a> {
            ops: &'a [Mutation],
        }
        let mut buf = serde_json::to_vec(&EntryRef { ops })?;
        buf.push(b'\n');
        self.file.write_all(&buf)?;
        if self.sync {
            self.file.sync_data()?;
        }
        Ok(())
    }
}
