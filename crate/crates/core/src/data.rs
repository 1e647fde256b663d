//! Labelled data sets, CSV ingestion and per-feature standardization.

use std::io::Read;
use std::path::Path;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Last,
    Name(String),
    /// No label column; every field is a feature.
    Absent,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// `last`, `none`, a zero-based column index, or a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if s.eq_ignore_ascii_case("none") {
            LabelColumn::Absent
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label: LabelColumn,
    /// Label token mapped to `+1`; any other token maps to `-1`.
    pub positive: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            has_header: false,
            label: LabelColumn::Last,
            positive: "1".into(),
        }
    }
}

/// Features before standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub features: Array2<f64>,
    pub labels: Vec<f64>,
    pub feature_names: Option<Vec<String>>,
}

/// Column filter plus per-column affine map to zero mean and unit variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub n_input: usize,
    pub kept: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fits on the columns of `features`; constant columns are dropped.
    pub fn fit(features: &Array2<f64>) -> Self {
        let n = features.nrows() as f64;
        let mut kept = Vec::new();
        let mut mean = Vec::new();
        let mut std = Vec::new();
        for (j, col) in features.axis_iter(Axis(1)).enumerate() {
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            let s = var.sqrt();
            if s < 1e-12 {
                log::warn!("dropping constant feature column {j}");
                continue;
            }
            kept.push(j);
            mean.push(m);
            std.push(s);
        }
        Self {
            n_input: features.ncols(),
            kept,
            mean,
            std,
        }
    }

    pub fn transform(&self, features: &Array2<f64>) -> Result<Array2<f64>> {
        if features.ncols() != self.n_input {
            return Err(Error::Shape {
                expected: self.n_input,
                got: features.ncols(),
            });
        }
        Ok(Array2::from_shape_fn((features.nrows(), self.kept.len()), |(i, k)| {
            (features[[i, self.kept[k]]] - self.mean[k]) / self.std[k]
        }))
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_input {
            return Err(Error::Shape {
                expected: self.n_input,
                got: row.len(),
            });
        }
        Ok(self
            .kept
            .iter()
            .enumerate()
            .map(|(k, &j)| (row[j] - self.mean[k]) / self.std[k])
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f64>,
    /// `+1` or `-1` per row.
    pub labels: Vec<f64>,
    pub feature_names: Option<Vec<String>>,
    /// Present when the features were standardized at load time.
    pub standardizer: Option<Standardizer>,
}

impl Dataset {
    pub fn new(features: Array2<f64>, labels: Vec<f64>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::Shape {
                expected: features.nrows(),
                got: labels.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::Domain(format!("labels must be +1 or -1, found {bad}")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("features must be finite".into()));
        }
        Ok(Self {
            features,
            labels,
            feature_names: None,
            standardizer: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            standardizer: self.standardizer.clone(),
        }
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.labels.iter().filter(|&&y| y > 0.0).count();
        pos > 0 && pos < self.len()
    }

    /// Standardizes in place, recording the fitted map.
    pub fn standardize(mut self) -> Self {
        let st = Standardizer::fit(&self.features);
        self.features = st.transform(&self.features).expect("fitted on the same matrix");
        if let Some(names) = &self.feature_names {
            self.feature_names = Some(st.kept.iter().map(|&j| names[j].clone()).collect());
        }
        self.standardizer = Some(st);
        self
    }
}

pub fn read_csv_from<R: Read>(reader: R, opts: &CsvOptions) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header: Option<Vec<String>> = if opts.has_header {
        let h = rdr.headers().map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut label_tokens: Vec<String> = Vec::new();
    let mut width: Option<usize> = header.as_ref().map(Vec::len);
    let mut label_idx: Option<usize> = None;

    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::Parse {
                line,
                message: format!("expected {w} fields, found {}", rec.len()),
            });
        }
        let li = match label_idx {
            Some(i) => i,
            None => {
                let i = match &opts.label {
                    LabelColumn::Absent => w,
                    LabelColumn::Last => w - 1,
                    LabelColumn::Index(i) => *i,
                    LabelColumn::Name(name) => header
                        .as_ref()
                        .and_then(|h| h.iter().position(|c| c == name))
                        .ok_or_else(|| Error::InvalidConfig(format!("no column named {name:?}")))?,
                };
                if i > w || (i == w && opts.label != LabelColumn::Absent) {
                    return Err(Error::InvalidConfig(format!("label column {i} out of range for {w} columns")));
                }
                label_idx = Some(i);
                i
            }
        };
        let mut row = Vec::with_capacity(w);
        for (j, field) in rec.iter().enumerate() {
            if j == li {
                continue;
            }
            if field.is_empty() || field == "?" {
                return Err(Error::Parse {
                    line,
                    message: format!("missing value in column {j}"),
                });
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {j}: cannot parse {field:?} as a number"),
            })?;
            row.push(v);
        }
        if li == w {
            rows.push(row);
            continue;
        }
        let tok = &rec[li];
        if tok.is_empty() {
            return Err(Error::Parse {
                line,
                message: "missing label".into(),
            });
        }
        if !label_tokens.iter().any(|t| t == tok) {
            label_tokens.push(tok.to_string());
            if label_tokens.len() > 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("more than two distinct labels: {label_tokens:?}"),
                });
            }
        }
        labels.push(if tok == opts.positive { 1.0 } else { -1.0 });
        rows.push(row);
    }

    let n = rows.len();
    let d = match (width, label_idx) {
        (Some(w), Some(li)) if li == w => w,
        (Some(w), _) => w.saturating_sub(1),
        (None, _) => 0,
    };
    let features = Array2::from_shape_vec((n, d), rows.into_iter().flatten().collect())
        .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    let feature_names = header.map(|h| {
        let li = label_idx.unwrap_or(usize::MAX);
        h.into_iter()
            .enumerate()
            .filter(|(j, _)| *j != li)
            .map(|(_, s)| s)
            .collect()
    });
    Ok(RawTable {
        features,
        labels,
        feature_names,
    })
}

pub fn read_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<RawTable> {
    let file = std::fs::File::open(path)?;
    read_csv_from(file, opts)
}

fn into_dataset(raw: RawTable) -> Result<Dataset> {
    let mut ds = Dataset::new(raw.features, raw.labels)?;
    ds.feature_names = raw.feature_names;
    Ok(ds)
}

/// Reads a CSV and standardizes every feature column; constant columns are
/// dropped. Requires at least two rows.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let ds = into_dataset(read_csv(path, opts)?)?;
    if ds.len() < 2 {
        return Err(Error::Domain(format!("need at least 2 rows, found {}", ds.len())));
    }
    Ok(ds.standardize())
}

/// Reads a CSV and applies an already fitted standardization.
pub fn load_csv_with(path: impl AsRef<Path>, opts: &CsvOptions, st: &Standardizer) -> Result<Dataset> {
    let raw = read_csv(path, opts)?;
    let features = st.transform(&raw.features)?;
    let mut ds = Dataset::new(features, raw.labels)?;
    ds.standardizer = Some(st.clone());
    Ok(ds)
}
