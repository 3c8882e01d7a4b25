//! Binary dataset storage and bit-column arithmetic.
//!
//! Columns are packed into `u64` words so that XOR and joint-pattern
//! counting run over whole words instead of per-row branches. All types
//! here are immutable after construction and safe to share across threads.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: expected {expected} cells, found {found}")]
    MalformedRow {
        row: u64,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column:?}: unrecognized token {token:?}")]
    UnknownToken {
        row: u64,
        column: String,
        token: String,
    },
    #[error("duplicate column name {0:?}")]
    DuplicateName(String),
    #[error("true/false tokens must differ")]
    AmbiguousTokens,
    #[error("input has no header row")]
    EmptyHeader,
    #[error("need at least 2 columns, found {0}")]
    TooFewColumns(usize),
    #[error("no data rows")]
    EmptyBody,
    #[error("column lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{names} column names for {columns} columns")]
    NameCountMismatch { names: usize, columns: usize },
}

/// A length-n column of bits, packed least-significant-bit first into
/// `u64` words. Unused high bits of the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitColumn {
    words: Vec<u64>,
    len: usize,
}

impl BitColumn {
    pub fn zeros(len: usize) -> Self {
        BitColumn {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        bits.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, row: usize) -> bool {
        assert!(
            row < self.len,
            "row {row} out of range for column of length {}",
            self.len
        );
        (self.words[row / 64] >> (row % 64)) & 1 == 1
    }

    /// Number of one-bits in the column.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Elementwise exclusive-or. Self-inverse: `a.xor(b)?.xor(b)? == a`.
    pub fn xor(&self, other: &BitColumn) -> Result<BitColumn, DataError> {
        if self.len != other.len {
            return Err(DataError::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BitColumn {
            words,
            len: self.len,
        })
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl FromIterator<bool> for BitColumn {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        let mut current = 0u64;
        for bit in iter {
            if bit {
                current |= 1 << (len % 64);
            }
            len += 1;
            if len.is_multiple_of(64) {
                words.push(current);
                current = 0;
            }
        }
        if !len.is_multiple_of(64) {
            words.push(current);
        }
        BitColumn { words, len }
    }
}

impl fmt::Debug for BitColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitColumn[")?;
        for i in 0..self.len.min(64) {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        if self.len > 64 {
            write!(f, "… len={}", self.len)?;
        }
        write!(f, "]")
    }
}

/// A set of variable indices represented as a bitmask. Identifies a node
/// of the subset lattice; the empty set is the lattice bottom.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableSubset(u64);

impl VariableSubset {
    pub const EMPTY: VariableSubset = VariableSubset(0);

    /// The full set `{0, …, p-1}`.
    pub fn full(p: usize) -> Self {
        assert!(p <= 63, "subsets support at most 63 variables");
        VariableSubset(if p == 0 { 0 } else { (1u64 << p) - 1 })
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut mask = 0u64;
        for i in indices {
            assert!(i < 64);
            mask |= 1 << i;
        }
        VariableSubset(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn without(self, v: usize) -> Self {
        VariableSubset(self.0 & !(1u64 << v))
    }

    pub fn with(self, v: usize) -> Self {
        assert!(v < 64);
        VariableSubset(self.0 | 1 << v)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct SubsetIter(u64);

impl Iterator for SubsetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

impl fmt::Debug for VariableSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// An n×p matrix of bits with named columns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinaryDataset {
    names: Vec<String>,
    columns: Vec<BitColumn>,
}

impl BinaryDataset {
    /// Builds a dataset, enforcing p ≥ 2, n ≥ 1, unique names and equal
    /// column lengths.
    pub fn new(names: Vec<String>, columns: Vec<BitColumn>) -> Result<Self, DataError> {
        if names.len() != columns.len() {
            return Err(DataError::NameCountMismatch {
                names: names.len(),
                columns: columns.len(),
            });
        }
        if columns.len() < 2 {
            return Err(DataError::TooFewColumns(columns.len()));
        }
        let n = columns[0].len();
        for c in &columns[1..] {
            if c.len() != n {
                return Err(DataError::LengthMismatch {
                    left: n,
                    right: c.len(),
                });
            }
        }
        if n == 0 {
            return Err(DataError::EmptyBody);
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(DataError::DuplicateName(name.clone()));
            }
        }
        Ok(BinaryDataset { names, columns })
    }

    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn column(&self, v: usize) -> &BitColumn {
        &self.columns[v]
    }

    pub fn columns(&self) -> &[BitColumn] {
        &self.columns
    }
}

/// Reads a comma-separated file whose header names the variables and whose
/// cells all equal one of the two tokens. Token matching trims surrounding
/// whitespace and ignores case.
pub fn load_csv<R: Read>(
    reader: R,
    true_token: &str,
    false_token: &str,
) -> Result<BinaryDataset, DataError> {
    let t = true_token.trim().to_lowercase();
    let f = false_token.trim().to_lowercase();
    if t == f {
        return Err(DataError::AmbiguousTokens);
    }

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(DataError::EmptyHeader),
    };
    let names: Vec<String> = header.iter().map(|s| s.trim().to_string()).collect();
    if names.len() < 2 {
        return Err(DataError::TooFewColumns(names.len()));
    }
    let mut seen = std::collections::HashSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(DataError::DuplicateName(name.clone()));
        }
    }

    let p = names.len();
    let mut columns: Vec<Vec<bool>> = vec![Vec::new(); p];
    let mut data_rows = 0u64;
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        let row = rec.position().map(|pos| pos.line()).unwrap_or(i as u64 + 2);
        if rec.len() != p {
            return Err(DataError::MalformedRow {
                row,
                expected: p,
                found: rec.len(),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            let c = cell.trim().to_lowercase();
            let bit = if c == t {
                true
            } else if c == f {
                false
            } else {
                return Err(DataError::UnknownToken {
                    row,
                    column: names[j].clone(),
                    token: cell.trim().to_string(),
                });
            };
            columns[j].push(bit);
        }
        data_rows += 1;
    }
    if data_rows == 0 {
        return Err(DataError::EmptyBody);
    }

    let columns = columns
        .into_iter()
        .map(|bits| BitColumn::from_bools(&bits))
        .collect();
    BinaryDataset::new(names, columns)
}

pub fn load_csv_path<P: AsRef<Path>>(
    path: P,
    true_token: &str,
    false_token: &str,
) -> Result<BinaryDataset, DataError> {
    load_csv(File::open(path)?, true_token, false_token)
}

/// Writes the dataset back out in the same format `load_csv` reads; a
/// round trip through both is bit-exact.
pub fn write_csv<W: Write>(
    data: &BinaryDataset,
    writer: W,
    true_token: &str,
    false_token: &str,
) -> Result<(), DataError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(data.names())?;
    for row in 0..data.n() {
        let rec: Vec<&str> = (0..data.p())
            .map(|j| {
                if data.column(j).get(row) {
                    true_token
                } else {
                    false_token
                }
            })
            .collect();
        wtr.write_record(rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv_path<P: AsRef<Path>>(
    data: &BinaryDataset,
    path: P,
    true_token: &str,
    false_token: &str,
) -> Result<(), DataError> {
    write_csv(data, File::create(path)?, true_token, false_token)
}

/// Packs one row of the given columns into a joint symbol, little-endian
/// by list position: bit k of the result is row `row` of `columns[k]`.
/// For a fixed column list this is a bijection between bit tuples and
/// `0..2^q`.
pub fn encode_joint_pattern(columns: &[&BitColumn], row: usize) -> u64 {
    let mut sym = 0u64;
    for (k, col) in columns.iter().enumerate() {
        sym |= u64::from(col.get(row)) << k;
    }
    sym
}
