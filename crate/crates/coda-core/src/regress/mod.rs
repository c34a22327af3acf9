//! Ordinary least squares with per-coefficient t tests.
//!
//! Coefficients come from a QR decomposition of the design matrix (normal
//! equations solved without forming X'X); standard errors from
//! sigma^2 (X'X)^-1 with sigma^2 = SSR / (n - p); p-values from the
//! two-sided Student-t distribution with n - p degrees of freedom.

mod dist;

pub use dist::{inc_beta, ln_gamma, student_t_p_two_sided, student_t_sf};

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::transforms::LogRatioMatrix;

/// Relative pivot threshold below which a design column counts as collinear.
const RANK_TOL: f64 = 1e-10;

/// Threshold for flagging a p-value as significant in hypothesis tables.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Design matrix with a leading intercept column.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    columns: Vec<String>,
    /// Row-major n x p values.
    rows: Vec<Vec<f64>>,
}

impl DesignMatrix {
    /// Builds an intercept-plus-predictors design and checks full column
    /// rank. Predictor columns must be complete (no missing values) and
    /// equal length.
    pub fn with_intercept(names: &[String], predictors: &[Vec<f64>]) -> Result<Self> {
        if names.len() != predictors.len() {
            return Err(CoreError::Shape(format!(
                "{} names for {} predictor columns",
                names.len(),
                predictors.len()
            )));
        }
        let n = predictors.first().map_or(0, |c| c.len());
        for (name, col) in names.iter().zip(predictors) {
            if col.len() != n {
                return Err(CoreError::Shape(format!(
                    "predictor '{}' has {} rows, expected {}",
                    name,
                    col.len(),
                    n
                )));
            }
            if let Some(bad) = col.iter().find(|v| !v.is_finite()) {
                return Err(CoreError::Shape(format!(
                    "predictor '{}' contains a non-finite value {}",
                    name, bad
                )));
            }
        }
        let mut columns = vec!["intercept".to_string()];
        columns.extend(names.iter().cloned());
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row = Vec::with_capacity(columns.len());
                row.push(1.0);
                for col in predictors {
                    row.push(col[i]);
                }
                row
            })
            .collect();
        let design = Self { columns, rows };
        design.check_rank()?;
        Ok(design)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n(), self.p(), |i, j| self.rows[i][j])
    }

    /// Full-column-rank check via QR; names the first dependent column.
    fn check_rank(&self) -> Result<()> {
        let (n, p) = (self.n(), self.p());
        if n < p {
            return Err(CoreError::NotEnoughRows { n, p });
        }
        let qr = self.matrix().qr();
        let r = qr.r();
        let max_diag = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
        for j in 0..p {
            if r[(j, j)].abs() <= RANK_TOL * max_diag {
                return Err(CoreError::RankDeficient(self.columns[j].clone()));
            }
        }
        Ok(())
    }
}

/// One fitted response.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub response: String,
    pub columns: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    pub dof: usize,
}

impl RegressionFit {
    fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.column_index(name).map(|j| self.coefficients[j])
    }

    pub fn p_value(&self, name: &str) -> Option<f64> {
        self.column_index(name).map(|j| self.p_values[j])
    }
}

/// Fits one response against the design.
pub fn ols(response: &str, y: &[f64], design: &DesignMatrix) -> Result<RegressionFit> {
    let (n, p) = (design.n(), design.p());
    if y.len() != n {
        return Err(CoreError::Shape(format!(
            "response '{}' has {} rows, design has {}",
            response,
            y.len(),
            n
        )));
    }
    if n <= p {
        return Err(CoreError::NotEnoughRows { n, p });
    }

    let x = design.matrix();
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let max_diag = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    for j in 0..p {
        if r[(j, j)].abs() <= RANK_TOL * max_diag {
            return Err(CoreError::RankDeficient(design.columns[j].clone()));
        }
    }

    let qty = q.transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| CoreError::RankDeficient("design".into()))?;

    let fitted = &x * &beta;
    let residuals = &yv - &fitted;
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let dof = n - p;
    let sigma2 = ssr / dof as f64;

    // (X'X)^-1 = R^-1 R^-T from the QR factors.
    let identity = DMatrix::<f64>::identity(p, p);
    let r_inv = r
        .solve_upper_triangular(&identity)
        .ok_or_else(|| CoreError::RankDeficient("design".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let mut standard_errors = Vec::with_capacity(p);
    let mut t_statistics = Vec::with_capacity(p);
    let mut p_values = Vec::with_capacity(p);
    for j in 0..p {
        let se = (sigma2 * xtx_inv[(j, j)]).sqrt();
        let t = beta[j] / se;
        standard_errors.push(se);
        t_statistics.push(t);
        p_values.push(student_t_p_two_sided(t, dof));
    }

    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };

    Ok(RegressionFit {
        response: response.to_string(),
        columns: design.columns().to_vec(),
        coefficients: beta.iter().copied().collect(),
        standard_errors,
        t_statistics,
        p_values,
        r_squared,
        residuals: residuals.iter().copied().collect(),
        dof,
    })
}

/// Fits every column of a log-ratio matrix against the same design.
pub fn ols_matrix(responses: &LogRatioMatrix, design: &DesignMatrix) -> Result<Vec<RegressionFit>> {
    responses
        .columns
        .iter()
        .enumerate()
        .map(|(j, name)| ols(name, &responses.column_at(j), design))
        .collect()
}

/// One row per (response, non-intercept predictor) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisRow {
    pub response: String,
    pub predictor: String,
    pub estimate: f64,
    pub p_value: f64,
    pub significant: bool,
}

/// Flattens fits into a significance table at the 0.05 level.
pub fn hypothesis_table(fits: &[RegressionFit]) -> Vec<HypothesisRow> {
    let mut rows = Vec::new();
    for fit in fits {
        for (j, name) in fit.columns.iter().enumerate() {
            if name == "intercept" {
                continue;
            }
            rows.push(HypothesisRow {
                response: fit.response.clone(),
                predictor: name.clone(),
                estimate: fit.coefficients[j],
                p_value: fit.p_values[j],
                significant: fit.p_values[j] < SIGNIFICANCE_LEVEL,
            });
        }
    }
    rows
}
