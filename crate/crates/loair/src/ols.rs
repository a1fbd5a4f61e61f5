//! Ordinary least squares with intercept: coefficients, their standard
//! errors, Gaussian confidence intervals, prediction, fit metrics, and
//! quadratic feature expansion.
//!
//! The solve goes through a Householder QR factorization of the design
//! matrix rather than forming (X'X) explicitly; the diagonal of (X'X)^-1
//! needed for standard errors is recovered from the R factor. Critical
//! values are Gaussian (not Student-t) at every sample size.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::gaussian::{probit, Probability};

/// Column name given to the leading all-ones column.
pub const INTERCEPT_NAME: &str = "intercept";

/// A dense row-major design matrix whose first column is identically one.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    column_names: Vec<String>,
    /// Row-major n x m values, m = p + 1.
    data: Vec<f64>,
    n: usize,
    m: usize,
}

impl DesignMatrix {
    /// Builds the intercept-augmented design matrix of a dataset.
    pub fn from_dataset(dataset: &Dataset) -> Self {
        let (n, p) = (dataset.n(), dataset.p());
        let m = p + 1;
        let mut data = Vec::with_capacity(n * m);
        for i in 0..n {
            data.push(1.0);
            data.extend_from_slice(dataset.row(i));
        }
        let mut column_names = Vec::with_capacity(m);
        column_names.push(INTERCEPT_NAME.to_string());
        column_names.extend(dataset.feature_names().iter().cloned());
        Self { column_names, data, n, m }
    }

    /// Builds a design matrix from raw feature rows (the intercept column is
    /// prepended here, so `rows` carries p values per row).
    pub fn from_feature_rows(feature_names: &[String], rows: &[Vec<f64>]) -> Result<Self> {
        let p = feature_names.len();
        let n = rows.len();
        if n == 0 {
            return Err(Error::Data("design matrix needs at least one row".into()));
        }
        let m = p + 1;
        let mut data = Vec::with_capacity(n * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Shape(format!(
                    "row {i} has {} values, expected {p}",
                    row.len()
                )));
            }
            data.push(1.0);
            data.extend_from_slice(row);
        }
        let mut column_names = Vec::with_capacity(m);
        column_names.push(INTERCEPT_NAME.to_string());
        column_names.extend(feature_names.iter().cloned());
        Ok(Self { column_names, data, n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns (p + 1).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }
}

/// A fitted least-squares model with its sampling-uncertainty estimates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OlsFit {
    /// Coefficients, intercept first (length p + 1).
    pub coefficients: Vec<f64>,
    /// Classical homoskedastic standard errors, same order.
    pub std_errors: Vec<f64>,
    /// Residual variance estimate RSS / (n - p - 1).
    pub sigma2: f64,
    /// In-sample R^2 (0 by convention when the target is constant).
    pub r_squared: f64,
    pub n: usize,
    pub p: usize,
    pub column_names: Vec<String>,
}

/// Maximum allowed condition-number estimate for X'X before the fit is
/// rejected as singular.
const MAX_CONDITION: f64 = 1e12;

/// Fits ordinary least squares.
///
/// Errors with [`Error::InsufficientData`] when n <= p + 1 (no degrees of
/// freedom for the residual variance) and with [`Error::Singular`] when the
/// condition estimate of X'X exceeds 1e12, naming the offending columns.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    let (n, m) = (x.n(), x.m());
    if y.len() != n {
        return Err(Error::Shape(format!(
            "target has {} values, design matrix has {n} rows",
            y.len()
        )));
    }
    if n <= m {
        return Err(Error::InsufficientData { n, m });
    }

    let qr = HouseholderQr::factorize(&x.data, n, m);
    qr.check_conditioning(x.column_names())?;

    let coefficients = qr.solve(y);

    let mut rss = 0.0;
    for i in 0..n {
        let row = x.row(i);
        let fitted: f64 = row.iter().zip(&coefficients).map(|(a, b)| a * b).sum();
        let r = y[i] - fitted;
        rss += r * r;
    }
    let dof = (n - m) as f64;
    let sigma2 = rss / dof;

    let inv_diag = qr.inverse_gram_diagonal();
    let std_errors: Vec<f64> = inv_diag.iter().map(|d| (sigma2 * d.max(0.0)).sqrt()).collect();

    let ybar = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    // Constant targets leave TSS at rounding level; define R^2 = 0 there.
    let tss_floor = 1e-28 * n as f64 * (1.0 + ybar * ybar);
    let r_squared = if tss <= tss_floor {
        log::warn!("target is constant (TSS = 0); defining R^2 = 0");
        0.0
    } else {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    };

    Ok(OlsFit {
        coefficients,
        std_errors,
        sigma2,
        r_squared,
        n,
        p: m - 1,
        column_names: x.column_names().to_vec(),
    })
}

/// Gaussian confidence interval for coefficient `j` at significance `alpha`:
/// beta_j -+ probit(1 - alpha/2) * se_j.
pub fn confidence_interval(fit: &OlsFit, j: usize, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if j > fit.p {
        return Err(Error::Lookup(format!(
            "coefficient index {j} out of range (model has {} coefficients)",
            fit.p + 1
        )));
    }
    let z = probit(Probability::new(1.0 - alpha / 2.0)?);
    let half = z * fit.std_errors[j];
    Ok((fit.coefficients[j] - half, fit.coefficients[j] + half))
}

/// Mean prediction X * beta.
pub fn ols_predict(fit: &OlsFit, x: &DesignMatrix) -> Result<Vec<f64>> {
    if x.m() != fit.p + 1 {
        return Err(Error::Shape(format!(
            "design matrix has {} columns, fit expects {}",
            x.m(),
            fit.p + 1
        )));
    }
    Ok((0..x.n())
        .map(|i| x.row(i).iter().zip(&fit.coefficients).map(|(a, b)| a * b).sum())
        .collect())
}

/// Standard regression test metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
}

/// RMSE, MAE and R^2 of predictions against targets. R^2 is 0 by convention
/// when the targets are constant.
pub fn regression_metrics(predictions: &[f64], targets: &[f64]) -> Result<Metrics> {
    if predictions.is_empty() || targets.is_empty() {
        return Err(Error::Domain("metrics require at least one observation".into()));
    }
    if predictions.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} predictions vs {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    let n = targets.len() as f64;
    let mut sse = 0.0;
    let mut sae = 0.0;
    for (p, t) in predictions.iter().zip(targets) {
        let d = p - t;
        sse += d * d;
        sae += d.abs();
    }
    let ybar = targets.iter().sum::<f64>() / n;
    let tss: f64 = targets.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let tss_floor = 1e-28 * n * (1.0 + ybar * ybar);
    let r2 = if tss <= tss_floor { 0.0 } else { 1.0 - sse / tss };
    Ok(Metrics { rmse: (sse / n).sqrt(), mae: sae / n, r2 })
}

/// Appends the elementwise square of `feature_name` as "<feature>^2".
pub fn expand_quadratic(dataset: &Dataset, feature_name: &str) -> Result<Dataset> {
    let j = dataset.feature_index(feature_name)?;
    let squared: Vec<f64> = dataset.column(j).iter().map(|v| v * v).collect();
    dataset.with_column(format!("{feature_name}^2"), squared)
}

/// Compact Householder QR of a tall row-major matrix.
///
/// The upper triangle of `qr` holds R (diagonal in `r_diag`); columns below
/// the diagonal hold the Householder vectors.
struct HouseholderQr {
    qr: Vec<f64>,
    r_diag: Vec<f64>,
    n: usize,
    m: usize,
}

impl HouseholderQr {
    fn factorize(data: &[f64], n: usize, m: usize) -> Self {
        let mut qr = data.to_vec();
        let mut r_diag = vec![0.0; m];
        for k in 0..m {
            let mut norm_sq = 0.0;
            for i in k..n {
                let v = qr[i * m + k];
                norm_sq += v * v;
            }
            let mut norm = norm_sq.sqrt();
            if norm == 0.0 {
                r_diag[k] = 0.0;
                continue;
            }
            if qr[k * m + k] > 0.0 {
                norm = -norm;
            }
            for i in k..n {
                qr[i * m + k] /= -norm;
            }
            qr[k * m + k] += 1.0;
            for j in (k + 1)..m {
                let mut s = 0.0;
                for i in k..n {
                    s += qr[i * m + k] * qr[i * m + j];
                }
                s = -s / qr[k * m + k];
                for i in k..n {
                    qr[i * m + j] += s * qr[i * m + k];
                }
            }
            r_diag[k] = norm;
        }
        Self { qr, r_diag, n, m }
    }

    /// Rejects rank-deficient or ill-conditioned systems. The condition of
    /// X'X is estimated as (max |r_ii| / min |r_ii|)^2.
    fn check_conditioning(&self, names: &[String]) -> Result<()> {
        let max_d = self.r_diag.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        let min_d = self.r_diag.iter().fold(f64::INFINITY, |a, d| a.min(d.abs()));
        if max_d == 0.0 {
            return Err(Error::Singular { columns: names.to_vec(), cond: f64::INFINITY });
        }
        let cond = if min_d == 0.0 { f64::INFINITY } else { (max_d / min_d) * (max_d / min_d) };
        if cond > MAX_CONDITION {
            let threshold = max_d / MAX_CONDITION.sqrt();
            let columns = self
                .r_diag
                .iter()
                .zip(names)
                .filter(|(d, _)| d.abs() <= threshold)
                .map(|(_, name)| name.clone())
                .collect();
            return Err(Error::Singular { columns, cond });
        }
        Ok(())
    }

    /// Least-squares solution of min ||Ax - y||.
    fn solve(&self, y: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut x = y.to_vec();
        for k in 0..m {
            if self.qr[k * m + k] == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for i in k..n {
                s += self.qr[i * m + k] * x[i];
            }
            s = -s / self.qr[k * m + k];
            for i in k..n {
                x[i] += s * self.qr[i * m + k];
            }
        }
        for i in (0..m).rev() {
            for j in (i + 1)..m {
                x[i] -= self.qr[i * m + j] * x[j];
            }
            x[i] /= self.r_diag[i];
        }
        x.truncate(m);
        x
    }

    /// Diagonal of (X'X)^-1 = R^-1 R^-T: row sums of squares of R^-1.
    fn inverse_gram_diagonal(&self) -> Vec<f64> {
        let m = self.m;
        // invert R column by column (back substitution on identity columns)
        let mut r_inv = vec![0.0; m * m];
        for col in 0..m {
            for i in (0..=col).rev() {
                let mut v = if i == col { 1.0 } else { 0.0 };
                for j in (i + 1)..=col {
                    let r_ij = if i == j { self.r_diag[i] } else { self.qr[i * m + j] };
                    let _ = r_ij; // r_ij only valid for j > i below
                    v -= self.qr[i * m + j] * r_inv[j * m + col];
                }
                r_inv[i * m + col] = v / self.r_diag[i];
            }
        }
        (0..m)
            .map(|i| (i..m).map(|j| r_inv[i * m + j] * r_inv[i * m + j]).sum())
            .collect()
    }
}
