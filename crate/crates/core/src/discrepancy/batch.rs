//! Latent feature batches and their CSV representation.

use std::fs;
use std::path::Path;

use crate::error::{CqError, Result};

/// An M x n matrix of latent samples, one domain's batch.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBatch {
    rows: Vec<Vec<f64>>,
}

impl FeatureBatch {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(CqError::EmptyInput("feature batch has no samples".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(CqError::Shape("feature batch has zero dimension".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(CqError::Shape(format!(
                    "ragged batch: row {i} has {} values, expected {n}",
                    r.len()
                )));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(CqError::InvalidArgument(format!(
                    "non-finite value in batch row {i}"
                )));
            }
        }
        Ok(FeatureBatch { rows })
    }

    /// Number of samples M.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Feature dimension n.
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// All samples restricted to one coordinate.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// Per-coordinate mean.
    pub fn mean(&self) -> Vec<f64> {
        let n = self.n();
        let mut mu = vec![0.0; n];
        for r in &self.rows {
            for (m, x) in mu.iter_mut().zip(r) {
                *m += x;
            }
        }
        let inv = 1.0 / self.m() as f64;
        mu.iter_mut().for_each(|m| *m *= inv);
        mu
    }
}

/// Per-sample diagonal Gaussian parameters: M x n means and variances.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBatch {
    means: FeatureBatch,
    vars: FeatureBatch,
}

impl GaussianBatch {
    pub fn new(means: Vec<Vec<f64>>, vars: Vec<Vec<f64>>) -> Result<Self> {
        let means = FeatureBatch::new(means)?;
        let vars = FeatureBatch::new(vars)?;
        if means.m() != vars.m() || means.n() != vars.n() {
            return Err(CqError::Shape(format!(
                "means {}x{} and vars {}x{} disagree",
                means.m(),
                means.n(),
                vars.m(),
                vars.n()
            )));
        }
        if vars.rows().iter().flatten().any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(CqError::InvalidArgument(
                "variances must be strictly positive".into(),
            ));
        }
        Ok(GaussianBatch { means, vars })
    }

    pub fn m(&self) -> usize {
        self.means.m()
    }

    pub fn n(&self) -> usize {
        self.means.n()
    }

    pub fn means(&self) -> &[Vec<f64>] {
        self.means.rows()
    }

    pub fn vars(&self) -> &[Vec<f64>] {
        self.vars.rows()
    }

    /// Restrict every sample to one coordinate.
    pub fn coordinate(&self, i: usize) -> GaussianBatch {
        let means = self.means().iter().map(|r| vec![r[i]]).collect();
        let vars = self.vars().iter().map(|r| vec![r[i]]).collect();
        GaussianBatch::new(means, vars).expect("coordinate restriction preserves validity")
    }
}

/// Read a headerless numeric CSV, one sample per row.
pub fn read_feature_csv(path: &Path) -> Result<FeatureBatch> {
    let text = fs::read_to_string(path)
        .map_err(|e| CqError::Format(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Vec<f64> = trimmed
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    CqError::Format(format!(
                        "{} line {}: bad number {f:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    FeatureBatch::new(rows).map_err(|e| match e {
        // a ragged file is a format problem, not a shape problem
        CqError::Shape(msg) => CqError::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Write a batch as a headerless numeric CSV.
pub fn write_feature_csv(path: &Path, batch: &FeatureBatch) -> Result<()> {
    let mut out = String::new();
    for r in batch.rows() {
        let fields: Vec<String> = r.iter().map(|x| format!("{x}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn batch_validation() {
        assert!(FeatureBatch::new(vec![]).is_err());
        assert!(FeatureBatch::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(FeatureBatch::new(vec![vec![f64::NAN]]).is_err());
        let b = FeatureBatch::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(b.m(), 2);
        assert_eq!(b.n(), 2);
        assert_eq!(b.mean(), vec![2.0, 3.0]);
        assert_eq!(b.column(1), vec![2.0, 4.0]);
    }

    #[test]
    fn gaussian_batch_validation() {
        assert!(GaussianBatch::new(vec![vec![0.0]], vec![vec![0.0]]).is_err());
        assert!(GaussianBatch::new(vec![vec![0.0]], vec![vec![1.0, 2.0]]).is_err());
        let g = GaussianBatch::new(vec![vec![0.0, 1.0]], vec![vec![0.5, 2.0]]).unwrap();
        let c = g.coordinate(1);
        assert_eq!(c.means()[0], vec![1.0]);
        assert_eq!(c.vars()[0], vec![2.0]);
    }

    #[test]
    fn csv_roundtrip_and_ragged_detection() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("z.csv");
        let b = FeatureBatch::new(vec![vec![0.25, -1.5], vec![3.0, 0.125]]).unwrap();
        write_feature_csv(&p, &b).unwrap();
        assert_eq!(read_feature_csv(&p).unwrap(), b);

        std::fs::write(&p, "1,2\n3\n").unwrap();
        let err = read_feature_csv(&p).unwrap_err();
        assert!(matches!(err, CqError::Format(_)), "{err}");
    }
}
