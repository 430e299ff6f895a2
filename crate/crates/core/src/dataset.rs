//! Labeled point sets, distance metrics, and the CSV interchange format.
//!
//! A [`Dataset`] owns an immutable m×n matrix of points together with a ±1
//! label per point. All distance computations go through [`Metric`], so the
//! weighted metric used for high-dimensional problems plugs into every
//! downstream operation unchanged.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SdfError};

/// Binary class label. `Positive` maps to +1, `Negative` to −1; the sign is
/// what every estimator and model in this crate works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    /// The numeric sign of the label: +1.0 or −1.0.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// Classify a real-valued prediction. Zero maps to the positive class.
    pub fn from_sign(value: f64) -> Self {
        if value < 0.0 {
            Label::Negative
        } else {
            Label::Positive
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Positive => write!(f, "1"),
            Label::Negative => write!(f, "-1"),
        }
    }
}

/// Row-major m×n point storage. Rows are samples, columns are features.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    /// Build from one `Vec` per point. Rows must be non-empty, rectangular,
    /// and finite.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(SdfError::invalid("point set must contain at least one point"));
        }
        let dim = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(SdfError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, dim)
    }

    /// Build from a flat row-major buffer whose length is a multiple of `dim`.
    pub fn from_flat(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(SdfError::invalid("points must have at least one feature"));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(SdfError::invalid(format!(
                "flat buffer of {} values is not a positive multiple of dim {}",
                data.len(),
                dim
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(SdfError::invalid("point coordinates must be finite"));
        }
        Ok(Points { data, dim })
    }

    pub fn n_points(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of point `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub(crate) fn to_nested(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn select(&self, indices: &[usize]) -> Points {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Points { data, dim: self.dim }
    }
}

/// Distance function used everywhere point distances appear.
///
/// The weighted variant is a per-feature weighted Euclidean metric,
/// `d(x, y) = sqrt(sum_k a_k^2 (x_k - y_k)^2)`, so a weight of zero masks a
/// feature entirely and all-ones weights reduce to the Euclidean case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Weighted { weights: Vec<f64> },
}

impl Metric {
    /// Build a weighted metric, validating the weight vector: finite,
    /// nonnegative, and not identically zero.
    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(SdfError::invalid("weight vector must be non-empty"));
        }
        if !weights.iter().all(|w| w.is_finite() && *w >= 0.0) {
            return Err(SdfError::invalid(
                "metric weights must be finite and nonnegative",
            ));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(SdfError::invalid(
                "metric weights must contain at least one positive entry",
            ));
        }
        Ok(Metric::Weighted { weights })
    }

    /// Check that the metric can measure `dim`-dimensional points.
    pub(crate) fn ensure_dim(&self, dim: usize) -> Result<()> {
        match self {
            Metric::Euclidean => Ok(()),
            Metric::Weighted { weights } if weights.len() == dim => Ok(()),
            Metric::Weighted { weights } => Err(SdfError::DimensionMismatch {
                expected: weights.len(),
                got: dim,
            }),
        }
    }

    /// Distance between two points.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(self.distance_sq(x, y)?.sqrt())
    }

    /// Squared distance between two points.
    pub fn distance_sq(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(SdfError::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        self.ensure_dim(x.len())?;
        Ok(self.distance_sq_unchecked(x, y))
    }

    /// Squared distance without dimension checks; callers validate once up
    /// front and then use this in O(m^2) scans.
    pub(crate) fn distance_sq_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => x
                .iter()
                .zip(y)
                .map(|(a, b)| {
                    let d = a - b;
                    d * d
                })
                .sum(),
            Metric::Weighted { weights } => x
                .iter()
                .zip(y)
                .zip(weights)
                .map(|((a, b), w)| {
                    let d = w * (a - b);
                    d * d
                })
                .sum(),
        }
    }

    pub(crate) fn distance_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        self.distance_sq_unchecked(x, y).sqrt()
    }
}

/// Immutable labeled dataset: m points in R^n with labels in {−1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Points,
    labels: Vec<Label>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Build a dataset with default feature names `x1..xn`.
    pub fn new(points: Points, labels: Vec<Label>) -> Result<Self> {
        let names = (1..=points.dim()).map(|k| format!("x{k}")).collect();
        Self::with_feature_names(points, labels, names)
    }

    /// Build a dataset carrying explicit feature names (used by the CSV
    /// loader so write-back preserves the header).
    pub fn with_feature_names(
        points: Points,
        labels: Vec<Label>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if labels.len() != points.n_points() {
            return Err(SdfError::LengthMismatch {
                left: points.n_points(),
                right: labels.len(),
            });
        }
        if feature_names.len() != points.dim() {
            return Err(SdfError::LengthMismatch {
                left: points.dim(),
                right: feature_names.len(),
            });
        }
        Ok(Dataset {
            points,
            labels,
            feature_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.points.n_points()
    }

    pub fn n_features(&self) -> usize {
        self.points.dim()
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Number of (negative, positive) samples.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|l| **l == Label::Positive).count();
        (self.labels.len() - pos, pos)
    }

    pub fn has_both_classes(&self) -> bool {
        let (neg, pos) = self.class_counts();
        neg > 0 && pos > 0
    }

    /// Dataset restricted to the given sample indices (panics when an index
    /// is out of bounds).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            points: self.points.select(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// How to identify a CSV column: by header name or 0-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl ColumnSelector {
    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            ColumnSelector::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| SdfError::ColumnNotFound(name.clone())),
            ColumnSelector::Index(i) if *i < headers.len() => Ok(*i),
            ColumnSelector::Index(i) => Err(SdfError::ColumnNotFound(i.to_string())),
        }
    }
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    /// Purely numeric strings are treated as 0-based column indices,
    /// anything else as a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

fn read_header(reader: &mut csv::Reader<std::fs::File>) -> Result<Vec<String>> {
    Ok(reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect())
}

/// Header row of a CSV file.
pub fn csv_headers(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::Reader::from_path(path)?;
    read_header(&mut reader)
}

fn parse_cell(path: &Path, row: usize, column: &str, value: &str) -> Result<f64> {
    match value.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(SdfError::NonNumericCell {
            path: path.display().to_string(),
            row,
            column: column.to_string(),
            value: value.to_string(),
        }),
    }
}

/// Load a labeled dataset from CSV. The file must have a header row; the
/// label column may sit anywhere. `positive_label` names the raw label value
/// mapped to +1; the (single) remaining value maps to −1.
pub fn load_csv(
    path: &Path,
    label_column: &ColumnSelector,
    positive_label: &str,
) -> Result<Dataset> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = read_header(&mut reader)?;
    let label_idx = label_column.resolve(&headers)?;
    if headers.len() < 2 {
        return Err(SdfError::invalid(
            "a labeled CSV needs at least one feature column besides the label",
        ));
    }

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut data = Vec::new();
    let mut raw_labels = Vec::new();
    // Row numbers are 1-based file rows; the header is row 1.
    for (record_no, record) in reader.records().enumerate() {
        let record = record?;
        let row = record_no + 2;
        for (col, value) in record.iter().enumerate() {
            if col == label_idx {
                raw_labels.push(value.trim().to_string());
            } else {
                data.push(parse_cell(path, row, &headers[col], value)?);
            }
        }
        if record.len() != headers.len() {
            return Err(SdfError::invalid(format!(
                "{}: row {} has {} fields, header has {}",
                path.display(),
                row,
                record.len(),
                headers.len()
            )));
        }
    }
    if raw_labels.is_empty() {
        return Err(SdfError::EmptyFile {
            path: path.display().to_string(),
        });
    }

    let mut distinct: Vec<String> = raw_labels.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != 2 {
        return Err(SdfError::NotBinary {
            column: headers[label_idx].clone(),
            count: distinct.len(),
        });
    }
    if !distinct.iter().any(|v| v == positive_label) {
        return Err(SdfError::MissingPositiveLabel {
            label: positive_label.to_string(),
            found: distinct,
        });
    }

    let labels = raw_labels
        .iter()
        .map(|v| {
            if v == positive_label {
                Label::Positive
            } else {
                Label::Negative
            }
        })
        .collect();
    let points = Points::from_flat(data, headers.len() - 1)?;
    Dataset::with_feature_names(points, labels, feature_names)
}

/// Load an unlabeled point matrix from CSV, optionally dropping one column
/// (typically the label column of a dataset file).
pub fn load_points_csv(path: &Path, exclude: Option<&ColumnSelector>) -> Result<Points> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = read_header(&mut reader)?;
    let skip = exclude.map(|sel| sel.resolve(&headers)).transpose()?;

    let mut data = Vec::new();
    let mut rows = 0usize;
    for (record_no, record) in reader.records().enumerate() {
        let record = record?;
        let row = record_no + 2;
        for (col, value) in record.iter().enumerate() {
            if Some(col) == skip {
                continue;
            }
            data.push(parse_cell(path, row, &headers[col], value)?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(SdfError::EmptyFile {
            path: path.display().to_string(),
        });
    }
    let dim = headers.len() - usize::from(skip.is_some());
    Points::from_flat(data, dim)
}

/// Write a dataset back to CSV using the same layout the loader accepts:
/// feature columns (preserved names), then a `label` column with ±1 values.
/// Floats are written in shortest round-trip form, so load → write → load
/// reproduces the values bit-exactly.
pub fn write_dataset_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = data.feature_names().to_vec();
    header.push("label".to_string());
    writer.write_record(&header)?;
    for i in 0..data.n_samples() {
        let mut record: Vec<String> = data.point(i).iter().map(|v| v.to_string()).collect();
        record.push(data.label(i).to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-feature weights: the absolute Pearson correlation between each
/// feature column and the ±1 label vector. Zero-variance columns get weight
/// zero; outputs are clamped to [0, 1].
pub fn correlation_weights(data: &Dataset) -> Result<Vec<f64>> {
    let m = data.n_samples();
    if m < 2 {
        return Err(SdfError::invalid(
            "correlation weights need at least two samples",
        ));
    }
    if !data.has_both_classes() {
        let (neg, _) = data.class_counts();
        let missing = if neg == 0 { "-1" } else { "+1" };
        return Err(SdfError::SingleClass { missing });
    }

    let signs: Vec<f64> = data.labels().iter().map(|l| l.sign()).collect();
    let label_mean = signs.iter().sum::<f64>() / m as f64;
    let label_var: f64 = signs.iter().map(|s| (s - label_mean).powi(2)).sum();

    let n = data.n_features();
    let weights: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mean = (0..m).map(|i| data.point(i)[k]).sum::<f64>() / m as f64;
            let mut cov = 0.0;
            let mut var = 0.0;
            for (i, sign) in signs.iter().enumerate() {
                let centered = data.point(i)[k] - mean;
                cov += centered * (sign - label_mean);
                var += centered * centered;
            }
            if var == 0.0 {
                0.0
            } else {
                (cov / (var * label_var).sqrt()).abs().min(1.0)
            }
        })
        .collect();
    Ok(weights)
}

/// Summary statistic over all pairwise inter-point distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceStat {
    /// Mean of d(x_i, x_j) over i < j.
    Mean,
    /// Root mean square of d(x_i, x_j) over i < j.
    Rmsd,
}

/// Mean or RMS pairwise distance of the dataset under the given metric.
pub fn interdistance_stat(data: &Dataset, metric: &Metric, stat: DistanceStat) -> Result<f64> {
    let m = data.n_samples();
    if m < 2 {
        return Err(SdfError::invalid(
            "inter-point distance statistics need at least two samples",
        ));
    }
    metric.ensure_dim(data.n_features())?;

    // Parallel over rows, but each partial sum is sequential and the final
    // fold runs in index order, so the result is bit-reproducible.
    let partials: Vec<f64> = (0..m - 1)
        .into_par_iter()
        .map(|i| {
            let xi = data.point(i);
            let mut acc = 0.0;
            for j in i + 1..m {
                let d2 = metric.distance_sq_unchecked(xi, data.point(j));
                acc += match stat {
                    DistanceStat::Mean => d2.sqrt(),
                    DistanceStat::Rmsd => d2,
                };
            }
            acc
        })
        .collect();
    let total: f64 = partials.iter().sum();
    let pairs = (m * (m - 1) / 2) as f64;
    Ok(match stat {
        DistanceStat::Mean => total / pairs,
        DistanceStat::Rmsd => (total / pairs).sqrt(),
    })
}
