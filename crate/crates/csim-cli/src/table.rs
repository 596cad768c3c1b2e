//! The known-values table: for each pair `(r, s)` up to 30, the smallest
//! `n` such that an integer sums-of-squares formula of type `[r, s, n]`
//! exists, or an upper bound on it.
//!
//! The table ships as a plain-text data file (`data/known_values.txt`, one
//! `r s n flag` record per line, `=` exact / `*` upper bound) and is the
//! reference the `bench` and `table-check` commands validate verdicts
//! against.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

const EMBEDDED: &str = include_str!("../data/known_values.txt");

/// Number of `(r, s)` records in the shipped table.
pub const EXPECTED_ROWS: usize = 465;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: expected `r s n flag`, found `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: duplicate entry for ({r},{s})")]
    Duplicate { line: usize, r: usize, s: usize },
    #[error("line {line}: ({r},{s}) -> {n} violates max(r,s) <= n <= r*s")]
    OutOfRange { line: usize, r: usize, s: usize, n: usize },
    #[error("table holds {found} records, expected {EXPECTED_ROWS}")]
    WrongRowCount { found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownEntry {
    /// Smallest n (exact) or an upper bound on it.
    pub n: usize,
    pub exact: bool,
}

#[derive(Debug)]
pub struct KnownValuesTable {
    entries: BTreeMap<(usize, usize), KnownEntry>,
}

impl KnownValuesTable {
    /// The table compiled into the binary.
    pub fn embedded() -> &'static KnownValuesTable {
        static TABLE: OnceLock<KnownValuesTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            KnownValuesTable::parse(EMBEDDED).expect("the shipped table is well formed")
        })
    }

    pub fn parse(text: &str) -> Result<KnownValuesTable, TableError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let malformed = || TableError::Malformed { line, text: content.to_string() };
            if fields.len() != 4 {
                return Err(malformed());
            }
            let r: usize = fields[0].parse().map_err(|_| malformed())?;
            let s: usize = fields[1].parse().map_err(|_| malformed())?;
            let n: usize = fields[2].parse().map_err(|_| malformed())?;
            let exact = match fields[3] {
                "=" => true,
                "*" => false,
                _ => return Err(malformed()),
            };
            if r == 0 || s == 0 || n < r.max(s) || n > r * s {
                return Err(TableError::OutOfRange { line, r, s, n });
            }
            let key = (r.min(s), r.max(s));
            if entries.insert(key, KnownEntry { n, exact }).is_some() {
                return Err(TableError::Duplicate { line, r, s });
            }
        }
        if entries.len() != EXPECTED_ROWS {
            return Err(TableError::WrongRowCount { found: entries.len() });
        }
        Ok(KnownValuesTable { entries })
    }

    /// Symmetric lookup: `get(r, s) == get(s, r)`.
    pub fn get(&self, r: usize, s: usize) -> Option<KnownEntry> {
        self.entries.get(&(r.min(s), r.max(s))).copied()
    }

    /// Is a formula of type `[r, s, n]` known to exist / not exist?
    /// `None` when the table cannot say (unknown pair, or `n` below an
    /// inexact upper bound).
    pub fn expected_existence(&self, r: usize, s: usize, n: usize) -> Option<bool> {
        let entry = self.get(r, s)?;
        if n >= entry.n {
            return Some(true);
        }
        entry.exact.then_some(false)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in `(r, s)` order with `r <= s`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), KnownEntry)> + '_ {
        self.entries.iter().map(|(&key, &entry)| (key, entry))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_has_the_expected_shape() {
        let table = KnownValuesTable::embedded();
        assert_eq!(table.len(), EXPECTED_ROWS);
        for ((r, s), entry) in table.iter() {
            assert!(r <= s);
            assert!(entry.n >= s && entry.n <= r * s);
        }
    }

    #[test]
    fn spot_values() {
        let table = KnownValuesTable::embedded();
        assert_eq!(table.get(3, 3), Some(KnownEntry { n: 4, exact: true }));
        assert_eq!(table.get(9, 9), Some(KnownEntry { n: 16, exact: true }));
        assert_eq!(table.get(1, 7), Some(KnownEntry { n: 7, exact: true }));
        assert_eq!(table.get(3, 5), Some(KnownEntry { n: 7, exact: true }));
        assert_eq!(table.get(8, 17), Some(KnownEntry { n: 24, exact: true }));
        assert_eq!(table.get(10, 17), Some(KnownEntry { n: 29, exact: false }));
        assert_eq!(table.get(28, 30), Some(KnownEntry { n: 96, exact: false }));
        assert_eq!(table.get(31, 31), None);
    }

    #[test]
    fn lookups_are_symmetric() {
        let table = KnownValuesTable::embedded();
        assert_eq!(table.get(5, 9), table.get(9, 5));
        assert_eq!(table.get(17, 10), table.get(10, 17));
    }

    #[test]
    fn expected_existence_respects_bounds() {
        let table = KnownValuesTable::embedded();
        assert_eq!(table.expected_existence(3, 3, 4), Some(true));
        assert_eq!(table.expected_existence(3, 3, 9), Some(true));
        assert_eq!(table.expected_existence(3, 3, 3), Some(false));
        // (10,17) is an upper bound: nothing is known below it.
        assert_eq!(table.expected_existence(10, 17, 29), Some(true));
        assert_eq!(table.expected_existence(10, 17, 28), None);
    }

    #[test]
    fn parse_rejects_bad_rows() {
        assert!(matches!(
            KnownValuesTable::parse("1 2 3\n"),
            Err(TableError::Malformed { .. })
        ));
        assert!(matches!(
            KnownValuesTable::parse("2 2 5 =\n"),
            Err(TableError::OutOfRange { .. })
        ));
        assert!(matches!(
            KnownValuesTable::parse("1 1 1 =\n"),
            Err(TableError::WrongRowCount { found: 1 })
        ));
    }
}
