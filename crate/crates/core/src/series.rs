//! Series and dataset types, z-normalization, Euclidean distance and the
//! UCR text format.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ops::OpCounts;

/// Identifier of a series within a dataset. Rows loaded from UCR files are
/// numbered from 0 in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesId(pub u64);

impl fmt::Display for SeriesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub id: SeriesId,
    /// Class tag carried from the source file. Never used by search.
    pub label: Option<String>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(id: u64, values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        Ok(Self {
            id: SeriesId(id),
            label: None,
            values,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if values.len() < 2 {
        return Err(Error::TooShort(values.len()));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// An ordered collection of equal-length series with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    series: Vec<TimeSeries>,
    n: usize,
    normalized: bool,
}

impl Dataset {
    pub fn new(series: Vec<TimeSeries>) -> Result<Self> {
        let n = series
            .first()
            .map(TimeSeries::len)
            .ok_or(Error::EmptySeries)?;
        let mut seen = HashSet::with_capacity(series.len());
        for s in &series {
            check_values(&s.values)?;
            if s.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: s.len(),
                });
            }
            if !seen.insert(s.id) {
                return Err(Error::DuplicateId(s.id.0));
            }
        }
        Ok(Self {
            series,
            n,
            normalized: false,
        })
    }

    /// Builds a dataset from bare value rows, assigning ids 0, 1, 2, ...
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let series = rows
            .into_iter()
            .enumerate()
            .map(|(i, values)| TimeSeries::new(i as u64, values))
            .collect::<Result<Vec<_>>>()?;
        Self::new(series)
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn get(&self, id: SeriesId) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.id == id)
    }

    /// Z-normalizes every series. A dataset already flagged as normalized
    /// is returned unchanged.
    pub fn normalize(self) -> Result<Self> {
        if self.normalized {
            return Ok(self);
        }
        let series = self
            .series
            .iter()
            .map(znormalize)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            series,
            n: self.n,
            normalized: true,
        })
    }

    /// SHA-256 over the length, ids and value bit patterns, hex encoded.
    /// Labels are not part of the digest.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        h.update((self.series.len() as u64).to_le_bytes());
        for s in &self.series {
            h.update(s.id.0.to_le_bytes());
            for v in &s.values {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

/// Z-normalizes a series to mean 0 and population standard deviation 1.
/// Constant series map to all zeros.
pub fn znormalize(s: &TimeSeries) -> Result<TimeSeries> {
    Ok(TimeSeries {
        id: s.id,
        label: s.label.clone(),
        values: znormalize_values(&s.values)?,
    })
}

pub fn znormalize_values(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Ok(vec![0.0; values.len()]);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 || !std.is_finite() {
        return Ok(vec![0.0; values.len()]);
    }
    Ok(values.iter().map(|v| (v - mean) / std).collect())
}

/// Euclidean distance between two equal-length sequences.
pub fn euclidean(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(squared_distance(u, v).sqrt())
}

pub(crate) fn squared_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

/// Operations spent by [`euclidean`] on length-`n` inputs.
pub fn euclidean_cost(n: usize) -> OpCounts {
    let n = n as u64;
    OpCounts {
        // one subtraction and one accumulation per point
        adds: 2 * n,
        mults: n,
        sqrts: 1,
        ..OpCounts::ZERO
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Parses UCR text: one series per line, the first field being the class
/// label. Fields are comma or whitespace separated; blank lines and lines
/// starting with `#` are skipped.
pub fn load_ucr(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_ucr(&text, path)
}

pub fn parse_ucr(text: &str, path: &Path) -> Result<Dataset> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut series = Vec::new();
    let mut n = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if fields.iter().any(|f| f.is_empty()) {
            return Err(err(lineno, "empty field".into()));
        }
        let (label, rest) = fields.split_first().expect("non-empty line has a field");
        let values = rest
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let v: f64 = f
                    .parse()
                    .map_err(|_| err(lineno, format!("cannot parse {f:?} as a number")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(lineno, format!("non-finite value at index {i}")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() < 2 {
            return Err(err(
                lineno,
                format!("need at least 2 values, found {}", values.len()),
            ));
        }
        match n {
            None => n = Some(values.len()),
            Some(n) if n != values.len() => {
                return Err(err(
                    lineno,
                    format!("ragged row: {} values, expected {n}", values.len()),
                ));
            }
            Some(_) => {}
        }
        series.push(TimeSeries {
            id: SeriesId(series.len() as u64),
            label: Some(label.to_string()),
            values,
        });
    }
    if series.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    Dataset::new(series)
}

/// Writes comma-separated UCR text. Values use the shortest representation
/// that parses back to the same `f64`; a missing label is written as `0`.
pub fn write_ucr<W: Write>(d: &Dataset, mut out: W) -> Result<()> {
    for s in d.series() {
        out.write_all(s.label.as_deref().unwrap_or("0").as_bytes())?;
        for v in &s.values {
            write!(out, ",{v}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_ucr(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_ucr(d, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}
