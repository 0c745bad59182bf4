//! Plain-text persistence for enumeration tables.
//!
//! A cache file holds one header line `machine=<descriptor>\tL=<n>\tS=<n>`
//! followed by one tab-separated record per program in canonical order:
//! program, output, consumed, halted (0/1), steps. Rebuilding a table is
//! cheap but not free, so experiment runs share tables through [`TableCache`].

use super::{ComplexityTable, EnumerationBudget, TableRecord};
use crate::bits::BinString;
use crate::machines::MonotoneMachine;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug)]
pub enum CacheError {
    Io(io::Error),
    /// A line that does not parse as a header or record. Line numbers are
    /// 1-based.
    Malformed { line: usize, reason: String },
    /// The file exists but was built for a different machine or budget.
    KeyMismatch { expected: String, found: String },
}

impl fmt::Display for CacheError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CacheError::Io(e) => write!(f, "cache io error: {}", e),
            CacheError::Malformed { line, reason } => {
                write!(f, "malformed cache file at line {}: {}", line, reason)
            }
            CacheError::KeyMismatch { expected, found } => {
                write!(f, "cache key mismatch: expected {}, found {}", expected, found)
            }
        }
    }
}

impl std::error::Error for CacheError {}

impl From<io::Error> for CacheError {
    fn from(e: io::Error) -> Self {
        CacheError::Io(e)
    }
}

pub fn save_table(table: &ComplexityTable, path: &Path) -> Result<(), CacheError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(
        out,
        "machine={}\tL={}\tS={}",
        table.descriptor(),
        table.budget().max_len,
        table.budget().steps
    )?;
    for r in table.records() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.program,
            r.output,
            r.consumed,
            if r.halted { 1 } else { 0 },
            r.steps
        )?;
    }
    out.flush()?;
    Ok(())
}

fn malformed(line: usize, reason: impl Into<String>) -> CacheError {
    CacheError::Malformed { line, reason: reason.into() }
}

fn strip_key<'a>(field: &'a str, key: &str, line: usize) -> Result<&'a str, CacheError> {
    field
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| malformed(line, format!("expected `{}=...`, got `{}`", key, field)))
}

pub fn load_table(path: &Path) -> Result<ComplexityTable, CacheError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| malformed(1, "empty file"))?;
    let header = header?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() != 3 {
        return Err(malformed(1, "header needs machine, L, and S fields"));
    }
    let descriptor = strip_key(fields[0], "machine", 1)?.to_string();
    let max_len: u32 = strip_key(fields[1], "L", 1)?
        .parse()
        .map_err(|_| malformed(1, "L is not a number"))?;
    let steps: u64 = strip_key(fields[2], "S", 1)?
        .parse()
        .map_err(|_| malformed(1, "S is not a number"))?;
    if max_len > 32 {
        return Err(malformed(1, "L too large for a full table"));
    }
    if steps == 0 {
        return Err(malformed(1, "S must be positive"));
    }
    let budget = EnumerationBudget::new(max_len, steps);

    let expected = (1usize << (max_len + 1)) - 1;
    let mut records = Vec::with_capacity(expected);
    let mut canon = crate::bits::strings_up_to(max_len as usize);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(malformed(lineno, "record needs 5 tab-separated fields"));
        }
        let program: BinString =
            fields[0].parse().map_err(|_| malformed(lineno, "bad program field"))?;
        match canon.next() {
            Some(want) if want == program => {}
            _ => return Err(malformed(lineno, "programs out of canonical order")),
        }
        let output: BinString =
            fields[1].parse().map_err(|_| malformed(lineno, "bad output field"))?;
        let consumed: usize =
            fields[2].parse().map_err(|_| malformed(lineno, "bad consumed field"))?;
        let halted = match fields[3] {
            "0" => false,
            "1" => true,
            _ => return Err(malformed(lineno, "halted must be 0 or 1")),
        };
        let steps: u64 = fields[4].parse().map_err(|_| malformed(lineno, "bad steps field"))?;
        if consumed > program.len() {
            return Err(malformed(lineno, "consumed exceeds program length"));
        }
        records.push(TableRecord { program, output, consumed, halted, steps });
    }
    if records.len() != expected {
        return Err(malformed(
            records.len() + 1,
            format!("expected {} records, found {}", expected, records.len()),
        ));
    }
    Ok(ComplexityTable::from_parts(descriptor, budget, records))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
}

/// Directory of saved tables, keyed by machine descriptor and budget.
#[derive(Clone, Debug)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into() }
    }

    /// The file a given key lives at. Descriptor punctuation is flattened
    /// to underscores, so distinct keys that collide here would be caught
    /// by the header check on load.
    pub fn path_for(&self, descriptor: &str, budget: EnumerationBudget) -> PathBuf {
        let safe: String = descriptor
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        self.dir.join(format!("{}_L{}_S{}.tsv", safe, budget.max_len, budget.steps))
    }

    /// Loads the table for this machine and budget, building and saving it
    /// on a miss. A present file whose header names a different key is an
    /// error rather than silently rebuilt, since it means the directory is
    /// being shared in a way the naming scheme cannot support.
    pub fn get_or_build<M: MonotoneMachine>(
        &self,
        machine: &M,
        budget: EnumerationBudget,
    ) -> Result<(Arc<ComplexityTable>, CacheStatus), CacheError> {
        let descriptor = machine.descriptor();
        let path = self.path_for(&descriptor, budget);
        if path.exists() {
            let table = load_table(&path)?;
            if table.descriptor() != descriptor || table.budget() != budget {
                return Err(CacheError::KeyMismatch {
                    expected: format!("machine={} L={} S={}", descriptor, budget.max_len, budget.steps),
                    found: format!(
                        "machine={} L={} S={}",
                        table.descriptor(),
                        table.budget().max_len,
                        table.budget().steps
                    ),
                });
            }
            return Ok((Arc::new(table), CacheStatus::Hit));
        }
        let table = ComplexityTable::build(machine, budget);
        save_table(&table, &path)?;
        Ok((Arc::new(table), CacheStatus::Miss))
    }
}
