//! Pointwise signed-distance estimates derived from labels alone.
//!
//! The initial estimate at each training point is the (signed) distance to
//! the nearest point of the opposite class. Because that neighbor is itself
//! at some distance from the class boundary, the midpoint refinement then
//! deducts half of the neighbor's own estimate, which places the boundary
//! halfway between mutual nearest pairs.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Metric};
use crate::error::{Result, SdfError};

/// Which refinement stage a set of estimates is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStage {
    Initial,
    MidpointRefined,
}

/// Signed-distance estimates at the training points.
///
/// Invariants: `b[i]` carries the sign of label `i` and is never zero;
/// `opposite_index[i]` points at the nearest sample of the opposite class;
/// at the `Initial` stage `|b[i]|` equals that neighbor's distance exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SdfEstimates {
    b: Vec<f64>,
    opposite_index: Vec<usize>,
    stage: EstimateStage,
}

impl SdfEstimates {
    /// The signed estimates, one per training point.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Index of the nearest opposite-class sample for each point.
    pub fn opposite_index(&self) -> &[usize] {
        &self.opposite_index
    }

    pub fn stage(&self) -> EstimateStage {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

/// Nearest-opposite-class estimates: `b[i] = sign(label_i) * min_j d(x_i, x_j)`
/// over samples `j` of the opposite class. Ties break to the lowest index.
///
/// Rejects single-class datasets and datasets with coincident opposite-label
/// points (which would force a zero estimate).
pub fn initial_estimates(data: &Dataset, metric: &Metric) -> Result<SdfEstimates> {
    let (neg, pos) = data.class_counts();
    if pos == 0 {
        return Err(SdfError::SingleClass { missing: "+1" });
    }
    if neg == 0 {
        return Err(SdfError::SingleClass { missing: "-1" });
    }
    metric.ensure_dim(data.n_features())?;

    let m = data.n_samples();
    // O(m^2) scan, parallel over i. Each row's reduction is a sequential
    // in-order pass, so ties resolve to the lowest index deterministically.
    let per_point: Vec<(f64, usize)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let xi = data.point(i);
            let li = data.label(i);
            let mut best = f64::INFINITY;
            let mut best_j = usize::MAX;
            for j in 0..m {
                if data.label(j) == li {
                    continue;
                }
                let d = metric.distance_unchecked(xi, data.point(j));
                if d < best {
                    best = d;
                    best_j = j;
                }
            }
            (best, best_j)
        })
        .collect();

    let mut b = Vec::with_capacity(m);
    let mut opposite_index = Vec::with_capacity(m);
    for (i, &(d, j)) in per_point.iter().enumerate() {
        if d == 0.0 {
            return Err(SdfError::CoincidentOpposites { i, j });
        }
        b.push(data.label(i).sign() * d);
        opposite_index.push(j);
    }
    Ok(SdfEstimates {
        b,
        opposite_index,
        stage: EstimateStage::Initial,
    })
}

/// Midpoint refinement `b'[i] = sign(b[i]) * (|b[i]| - 0.5 |c[i]|)` with
/// `c[i]` the partner's own estimate. Since `|c[i]| <= |b[i]|` always holds,
/// the refined magnitude stays within `[0.5 |b[i]|, |b[i]|]` and the sign is
/// preserved.
pub fn midpoint_refine(est: &SdfEstimates) -> Result<SdfEstimates> {
    if est.stage != EstimateStage::Initial {
        return Err(SdfError::invalid(
            "midpoint refinement applies to initial estimates only",
        ));
    }
    let b: Vec<f64> = est
        .b
        .iter()
        .zip(&est.opposite_index)
        .map(|(&bi, &j)| {
            let ci = est.b[j];
            bi.signum() * (bi.abs() - 0.5 * ci.abs())
        })
        .collect();
    Ok(SdfEstimates {
        b,
        opposite_index: est.opposite_index.clone(),
        stage: EstimateStage::MidpointRefined,
    })
}

/// Write the dataset with an extra `b` column holding the estimates.
pub fn write_estimates_csv(data: &Dataset, est: &SdfEstimates, path: &Path) -> Result<()> {
    if est.len() != data.n_samples() {
        return Err(SdfError::LengthMismatch {
            left: data.n_samples(),
            right: est.len(),
        });
    }
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = data.feature_names().to_vec();
    header.push("label".to_string());
    header.push("b".to_string());
    writer.write_record(&header)?;
    for i in 0..data.n_samples() {
        let mut record: Vec<String> = data.point(i).iter().map(|v| v.to_string()).collect();
        record.push(data.label(i).to_string());
        record.push(est.b()[i].to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Label, Points};
    use approx::assert_relative_eq;

    fn dataset(rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Dataset {
        Dataset::new(Points::from_rows(rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn mutual_nearest_pair() {
        let data = dataset(
            vec![vec![0.0], vec![1.0]],
            vec![Label::Positive, Label::Negative],
        );
        let est = initial_estimates(&data, &Metric::Euclidean).unwrap();
        assert_eq!(est.b(), &[1.0, -1.0]);
        assert_eq!(est.opposite_index(), &[1, 0]);
        assert_eq!(est.stage(), EstimateStage::Initial);
    }

    #[test]
    fn three_point_hand_enumeration() {
        // (0,0)+ sees (3,4)− at 5; (3,4)− sees (0,5)+ at sqrt(10) < 5;
        // (0,5)+ sees (3,4)− at sqrt(10).
        let data = dataset(
            vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![0.0, 5.0]],
            vec![Label::Positive, Label::Negative, Label::Positive],
        );
        let est = initial_estimates(&data, &Metric::Euclidean).unwrap();
        let s10 = 10.0_f64.sqrt();
        assert_relative_eq!(est.b()[0], 5.0, max_relative = 1e-15);
        assert_relative_eq!(est.b()[1], -s10, max_relative = 1e-15);
        assert_relative_eq!(est.b()[2], s10, max_relative = 1e-15);
        assert_eq!(est.opposite_index(), &[1, 2, 1]);
    }

    #[test]
    fn single_class_errors_name_missing_class() {
        let data = dataset(
            vec![vec![0.0], vec![1.0]],
            vec![Label::Positive, Label::Positive],
        );
        match initial_estimates(&data, &Metric::Euclidean).unwrap_err() {
            SdfError::SingleClass { missing } => assert_eq!(missing, "-1"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn coincident_opposite_points_rejected() {
        let data = dataset(
            vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![0.0, 0.0]],
            vec![Label::Positive, Label::Negative, Label::Positive],
        );
        assert!(matches!(
            initial_estimates(&data, &Metric::Euclidean).unwrap_err(),
            SdfError::CoincidentOpposites { .. }
        ));
    }

    #[test]
    fn nearest_tie_breaks_to_lowest_index() {
        // Point 0 (+) is at distance 1 from both points 1 and 2 (−).
        let data = dataset(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0]],
            vec![Label::Positive, Label::Negative, Label::Negative],
        );
        let est = initial_estimates(&data, &Metric::Euclidean).unwrap();
        assert_eq!(est.opposite_index()[0], 1);
    }

    #[test]
    fn midpoint_halves_mutual_pair() {
        let data = dataset(
            vec![vec![0.0], vec![1.0]],
            vec![Label::Positive, Label::Negative],
        );
        let est = initial_estimates(&data, &Metric::Euclidean).unwrap();
        let refined = midpoint_refine(&est).unwrap();
        assert_eq!(refined.b(), &[0.5, -0.5]);
        assert_eq!(refined.stage(), EstimateStage::MidpointRefined);
    }

    #[test]
    fn midpoint_three_point_example() {
        let data = dataset(
            vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![0.0, 5.0]],
            vec![Label::Positive, Label::Negative, Label::Positive],
        );
        let est = initial_estimates(&data, &Metric::Euclidean).unwrap();
        let refined = midpoint_refine(&est).unwrap();
        // b'_0 = 5 − 0.5·sqrt(10) ≈ 3.4189
        assert_relative_eq!(refined.b()[0], 5.0 - 0.5 * 10.0_f64.sqrt(), max_relative = 1e-15);
        assert!(refined.b()[0] > 0.0 && refined.b()[1] < 0.0 && refined.b()[2] > 0.0);
    }

    #[test]
    fn midpoint_direct_formula() {
        // |b| = 4 with partner magnitude 2 refines to 3, sign unchanged.
        let est = SdfEstimates {
            b: vec![-4.0, 2.0, -1.9],
            opposite_index: vec![1, 2, 1],
            stage: EstimateStage::Initial,
        };
        let refined = midpoint_refine(&est).unwrap();
        assert_eq!(refined.b()[0], -3.0);
    }

    #[test]
    fn midpoint_rejects_refined_input() {
        let data = dataset(
            vec![vec![0.0], vec![1.0]],
            vec![Label::Positive, Label::Negative],
        );
        let refined = midpoint_refine(&initial_estimates(&data, &Metric::Euclidean).unwrap()).unwrap();
        assert!(midpoint_refine(&refined).is_err());
    }

    #[test]
    fn estimates_csv_has_b_column() {
        let data = dataset(
            vec![vec![0.0], vec![1.0]],
            vec![Label::Positive, Label::Negative],
        );
        let est = initial_estimates(&data, &Metric::Euclidean).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("est.csv");
        write_estimates_csv(&data, &est, &path).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        let mut lines = content.lines();
        assert_eq!(lines.next().unwrap(), "x1,label,b");
        assert_eq!(lines.next().unwrap(), "0,1,1");
        assert_eq!(lines.next().unwrap(), "1,-1,-1");
    }
}
