//! Tabular data: numeric datasets read from CSV and binary state counts.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::MixedGraph;

/// A rectangular numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<String>,
    /// Row-major values, `nrows * columns.len()` long.
    data: Vec<f64>,
    nrows: usize,
}

impl Dataset {
    pub fn new(columns: Vec<String>, data: Vec<f64>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyData);
        }
        let mut sorted = columns.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::ShapeMismatch("duplicate column name".into()));
        }
        if !data.len().is_multiple_of(columns.len()) {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not fill rows of width {}",
                data.len(),
                columns.len()
            )));
        }
        let nrows = data.len() / columns.len();
        if nrows < 2 {
            return Err(Error::ShapeMismatch("need at least 2 rows".into()));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::ShapeMismatch("non-finite value in data".into()));
        }
        Ok(Dataset { columns, data, nrows })
    }

    /// Reads a CSV file with a header row, comma separators, and `.` decimal
    /// marks. Missing fields are rejected.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let columns: Vec<String> =
            rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut data = Vec::new();
        for record in rdr.records() {
            let record = record?;
            if record.len() != columns.len() {
                return Err(Error::ShapeMismatch(format!(
                    "row has {} fields, expected {}",
                    record.len(),
                    columns.len()
                )));
            }
            for field in record.iter() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::ShapeMismatch(format!("cannot parse `{field}` as a number"))
                })?;
                data.push(v);
            }
        }
        Dataset::new(columns, data)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for r in 0..self.nrows {
            let row: Vec<String> =
                (0..self.columns.len()).map(|c| format!("{}", self.value(r, c))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.columns.len() + col]
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        Ok((0..self.nrows).map(|r| self.value(r, idx)).collect())
    }

    /// Checks that the column names exactly cover the graph's vertices.
    pub fn check_matches_graph(&self, g: &MixedGraph) -> Result<()> {
        let mut cols = self.columns.clone();
        cols.sort();
        if cols != g.sorted_vertices() {
            return Err(Error::ShapeMismatch(format!(
                "columns {:?} do not match graph vertices {:?}",
                self.columns,
                g.vertices()
            )));
        }
        Ok(())
    }

    /// True iff every value is 0.0 or 1.0.
    pub fn is_binary(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0 || x == 1.0)
    }

    /// New dataset containing the given rows (with repetition).
    pub fn take_rows(&self, rows: &[usize]) -> Dataset {
        let w = self.columns.len();
        let mut data = Vec::with_capacity(rows.len() * w);
        for &r in rows {
            data.extend_from_slice(&self.data[r * w..(r + 1) * w]);
        }
        Dataset { columns: self.columns.clone(), data, nrows: rows.len() }
    }
}

/// Counts of full 0/1 assignments over a fixed variable order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCounts {
    vars: Vec<String>,
    counts: BTreeMap<Vec<u8>, u64>,
    total: u64,
}

impl BinaryCounts {
    pub fn new(vars: Vec<String>, counts: BTreeMap<Vec<u8>, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::EmptyData);
        }
        for key in counts.keys() {
            if key.len() != vars.len() || key.iter().any(|&b| b > 1) {
                return Err(Error::InvalidAssignment(
                    "count keys must be full 0/1 assignments".into(),
                ));
            }
        }
        Ok(BinaryCounts { vars, counts, total })
    }

    /// Tallies a dataset whose values are all 0/1, using the given variable
    /// order (typically the graph's sorted vertex order).
    pub fn from_dataset(d: &Dataset, vars: &[String]) -> Result<Self> {
        let idx: Vec<usize> =
            vars.iter().map(|v| d.column_index(v)).collect::<Result<_>>()?;
        let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
        for r in 0..d.nrows() {
            let mut key = Vec::with_capacity(vars.len());
            for &c in &idx {
                let x = d.value(r, c);
                if x != 0.0 && x != 1.0 {
                    return Err(Error::InvalidAssignment(format!(
                        "non-binary value {x} in column `{}`",
                        d.columns()[c]
                    )));
                }
                key.push(x as u8);
            }
            *counts.entry(key).or_insert(0) += 1;
        }
        BinaryCounts::new(vars.to_vec(), counts)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<Vec<u8>, u64> {
        &self.counts
    }

    pub fn count_of(&self, key: &[u8]) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }
}
