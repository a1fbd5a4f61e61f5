//! Dataset ingestion, normalization, deterministic splitting and synthetic
//! data generation.
//!
//! A [`Dataset`] keeps features in raw (unnormalized) units; normalization
//! statistics belong to a [`Normalizer`] fitted on training rows only, so
//! validation and test data can never leak into them.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named feature matrix plus target vector, in raw units.
#[derive(Debug, Clone)]
pub struct Dataset {
    feature_names: Vec<String>,
    target_name: String,
    /// Row-major n x p feature matrix.
    x: Vec<f64>,
    y: Vec<f64>,
    provenance: String,
    n: usize,
    p: usize,
}

impl Dataset {
    /// Builds a dataset, validating shape and finiteness.
    pub fn new(
        feature_names: Vec<String>,
        target_name: impl Into<String>,
        x: Vec<f64>,
        y: Vec<f64>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let p = feature_names.len();
        let n = y.len();
        if n == 0 || p == 0 {
            return Err(Error::Data(format!(
                "dataset must have at least one row and one feature (n={n}, p={p})"
            )));
        }
        if x.len() != n * p {
            return Err(Error::Shape(format!(
                "feature matrix holds {} values, expected n*p = {}",
                x.len(),
                n * p
            )));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite feature value at row {}, column '{}'",
                i / p,
                feature_names[i % p]
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite target value at row {i}")));
        }
        Ok(Self {
            feature_names,
            target_name: target_name.into(),
            x,
            y,
            provenance: provenance.into(),
            n,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    /// Copy of feature column `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.x[i * self.p + j]).collect()
    }

    /// Index of a feature by name.
    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::Lookup(format!("feature '{name}' not found")))
    }

    /// New dataset containing the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(rows.len() * self.p);
        let mut y = Vec::with_capacity(rows.len());
        for &i in rows {
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Dataset {
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            x,
            y,
            provenance: self.provenance.clone(),
            n: rows.len(),
            p: self.p,
        }
    }

    /// Appends a feature column. Used by quadratic expansion.
    pub(crate) fn with_column(&self, name: String, values: Vec<f64>) -> Result<Dataset> {
        if values.len() != self.n {
            return Err(Error::Shape(format!(
                "new column has {} values, dataset has {} rows",
                values.len(),
                self.n
            )));
        }
        let p_new = self.p + 1;
        let mut x = Vec::with_capacity(self.n * p_new);
        for i in 0..self.n {
            x.extend_from_slice(self.row(i));
            x.push(values[i]);
        }
        let mut feature_names = self.feature_names.clone();
        feature_names.push(name);
        Dataset::new(
            feature_names,
            self.target_name.clone(),
            x,
            self.y.clone(),
            self.provenance.clone(),
        )
    }

    /// Loads a CSV file with a header row; `target_column` becomes `y` and
    /// the remaining columns become features in header order.
    pub fn from_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| Error::Data(format!("cannot read '{}': {e}", path.display())))?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Data(format!("bad header in '{}': {e}", path.display())))?
            .iter()
            .map(str::to_owned)
            .collect();
        let target_idx = headers
            .iter()
            .position(|h| h == target_column)
            .ok_or_else(|| {
                Error::Lookup(format!(
                    "target column '{target_column}' not found in '{}' (columns: {})",
                    path.display(),
                    headers.join(", ")
                ))
            })?;
        let feature_names: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != target_idx)
            .map(|(_, h)| h.clone())
            .collect();

        let mut x = Vec::new();
        let mut y = Vec::new();
        for (row_idx, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| Error::Data(format!("row {}: {e}", row_idx + 1)))?;
            if record.len() != headers.len() {
                return Err(Error::Data(format!(
                    "row {} has {} cells, header has {}",
                    row_idx + 1,
                    record.len(),
                    headers.len()
                )));
            }
            for (col_idx, cell) in record.iter().enumerate() {
                let value: f64 = cell.trim().parse().map_err(|_| {
                    Error::Data(format!(
                        "row {}, column '{}': cannot parse '{}' as a number",
                        row_idx + 1,
                        headers[col_idx],
                        cell
                    ))
                })?;
                if !value.is_finite() {
                    return Err(Error::Data(format!(
                        "row {}, column '{}': non-finite value",
                        row_idx + 1,
                        headers[col_idx]
                    )));
                }
                if col_idx == target_idx {
                    y.push(value);
                } else {
                    x.push(value);
                }
            }
        }
        Dataset::new(
            feature_names,
            target_column,
            x,
            y,
            format!("csv:{}", path.display()),
        )
    }

    /// Writes the dataset as CSV (features in order, target last). Values are
    /// printed with shortest round-trip formatting, so a write/read cycle
    /// reproduces every f64 bit for bit.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for name in &self.feature_names {
            out.push_str(name);
            out.push(',');
        }
        out.push_str(&self.target_name);
        out.push('\n');
        for i in 0..self.n {
            for v in self.row(i) {
                let _ = write!(out, "{v},");
            }
            let _ = writeln!(out, "{}", self.y[i]);
        }
        out
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

/// Split proportions for train/validation/test.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.75, val: 0.15, test: 0.10 }
    }
}

impl SplitRatios {
    fn validate(&self) -> Result<()> {
        if self.train <= 0.0 || self.val <= 0.0 || self.test <= 0.0 {
            return Err(Error::Config("split ratios must all be positive".into()));
        }
        if (self.train + self.val + self.test - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split ratios must sum to 1, got {}",
                self.train + self.val + self.test
            )));
        }
        Ok(())
    }
}

/// Deterministic shuffle-and-slice split.
///
/// Sizes: |train| = round(r_train * n), |val| = round(r_val * n), and test
/// takes the remainder, so the three parts always partition n exactly
/// (n = 506 with default ratios gives 380/76/50).
pub fn split(
    dataset: &Dataset,
    ratios: SplitRatios,
    seed: u64,
) -> Result<(Dataset, Dataset, Dataset)> {
    ratios.validate()?;
    let n = dataset.n();
    if n < 10 {
        return Err(Error::Domain(format!("need at least 10 rows to split, got {n}")));
    }
    let n_train = (ratios.train * n as f64).round() as usize;
    let n_val = (ratios.val * n as f64).round() as usize;
    if n_train == 0 || n_val == 0 || n_train + n_val >= n {
        return Err(Error::Domain(format!(
            "split of {n} rows at ratios {ratios:?} leaves an empty part"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let train = dataset.subset(&indices[..n_train]);
    let val = dataset.subset(&indices[n_train..n_train + n_val]);
    let test = dataset.subset(&indices[n_train + n_val..]);
    Ok((train, val, test))
}

/// Normalization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerKind {
    /// (x - mean) / std with population (divide by n) standard deviation.
    ZScore,
    /// (x - min) / (max - min).
    MinMax,
}

/// Per-feature affine normalization statistics, fitted on training rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Normalizer {
    pub kind: NormalizerKind,
    /// Subtracted first (mean or min).
    pub offsets: Vec<f64>,
    /// Divided second (std or range); constant features store 1.
    pub scales: Vec<f64>,
    /// Marks features that were constant in the fitting data.
    pub constant: Vec<bool>,
}

impl Normalizer {
    pub fn fit(train: &Dataset, kind: NormalizerKind) -> Self {
        let (n, p) = (train.n(), train.p());
        let mut offsets = vec![0.0; p];
        let mut scales = vec![1.0; p];
        let mut constant = vec![false; p];
        for j in 0..p {
            let col = train.column(j);
            match kind {
                NormalizerKind::ZScore => {
                    let mean = col.iter().sum::<f64>() / n as f64;
                    let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                    offsets[j] = mean;
                    if var > 0.0 {
                        scales[j] = var.sqrt();
                    } else {
                        constant[j] = true;
                    }
                }
                NormalizerKind::MinMax => {
                    let min = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    offsets[j] = min;
                    if max > min {
                        scales[j] = max - min;
                    } else {
                        constant[j] = true;
                    }
                }
            }
        }
        Self { kind, offsets, scales, constant }
    }

    pub fn p(&self) -> usize {
        self.offsets.len()
    }

    /// Normalizes one raw row into `out`.
    pub fn apply_row(&self, row: &[f64], out: &mut [f64]) {
        for j in 0..self.offsets.len() {
            out[j] = (row[j] - self.offsets[j]) / self.scales[j];
        }
    }

    /// Normalizes a whole dataset's features into a row-major matrix.
    pub fn apply(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        if dataset.p() != self.p() {
            return Err(Error::Shape(format!(
                "normalizer fitted for {} features, dataset has {}",
                self.p(),
                dataset.p()
            )));
        }
        let p = self.p();
        let mut out = vec![0.0; dataset.n() * p];
        for i in 0..dataset.n() {
            let row = dataset.row(i);
            self.apply_row(row, &mut out[i * p..(i + 1) * p]);
        }
        Ok(out)
    }

    /// Inverse transform of a normalized row (exact affine inverse).
    pub fn invert_row(&self, row_norm: &[f64], out: &mut [f64]) {
        for j in 0..self.offsets.len() {
            out[j] = row_norm[j] * self.scales[j] + self.offsets[j];
        }
    }
}

/// Default coefficient band width of the synthetic generator.
pub const SYNTH_DEFAULT_BAND: f64 = 0.5;
/// Default noise standard deviation of the synthetic generator.
pub const SYNTH_DEFAULT_NOISE: f64 = 0.5;

/// Synthetic data whose true regression coefficients drift smoothly with the
/// inputs — the regime local adaptation is built for.
///
/// Two features: x1 uniform on [-2, 2] and x2 = x1 + u with u uniform on
/// [-0.2, 0.2]. The near-collinear pair keeps the coefficient standard errors
/// wide, mirroring the benchmark datasets where per-observation adaptation
/// has room to work. The target is
///   y = b0(x) + b1(x) x1 + b2(x) x2 + noise * e,
/// with b0 = 1 + band sin(x1 + x2), b1 = 2 + band sin(1.5 x1),
/// b2 = -1 + band cos(1.5 x2), e standard normal.
pub fn synth_locally_varying(n: usize, seed: u64) -> Result<Dataset> {
    synth_locally_varying_with(n, seed, SYNTH_DEFAULT_BAND, SYNTH_DEFAULT_NOISE)
}

/// [`synth_locally_varying`] with explicit band width and noise scale.
/// `band = 0` and `noise = 0` degenerate to an exactly linear target.
pub fn synth_locally_varying_with(n: usize, seed: u64, band: f64, noise: f64) -> Result<Dataset> {
    if n < 100 {
        return Err(Error::Domain(format!("synthetic generator needs n >= 100, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n * 2);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x1: f64 = rng.gen_range(-2.0..2.0);
        let u: f64 = rng.gen_range(-0.2..0.2);
        let x2 = x1 + u;
        let b0 = 1.0 + band * (x1 + x2).sin();
        let b1 = 2.0 + band * (1.5 * x1).sin();
        let b2 = -1.0 + band * (1.5 * x2).cos();
        let e: f64 = StandardNormal.sample(&mut rng);
        x.push(x1);
        x.push(x2);
        y.push(b0 + b1 * x1 + b2 * x2 + noise * e);
    }
    Dataset::new(
        vec!["x1".into(), "x2".into()],
        "y",
        x,
        y,
        format!("synth_locally_varying: n={n} seed={seed} band={band} noise={noise}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset::new(
            vec!["a".into(), "b".into()],
            "t",
            vec![1.0, 10.0, 2.0, 20.0, 3.0, 30.0],
            vec![0.1, 0.2, 0.3],
            "test",
        )
        .unwrap()
    }

    #[test]
    fn new_validates_shape_and_finiteness() {
        assert!(Dataset::new(vec!["a".into()], "t", vec![1.0, 2.0], vec![1.0], "x").is_err());
        assert!(Dataset::new(vec!["a".into()], "t", vec![f64::NAN], vec![1.0], "x").is_err());
        assert!(Dataset::new(vec!["a".into()], "t", vec![1.0], vec![f64::INFINITY], "x").is_err());
        assert!(Dataset::new(vec![], "t", vec![], vec![], "x").is_err());
    }

    #[test]
    fn csv_shape_and_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.csv");
        std::fs::write(&path, "a,b,target\n1,4,7\n2,5,8\n3,6,9\n").unwrap();
        let ds = Dataset::from_csv(&path, "target").unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.p(), 2);
        assert_eq!(ds.feature_names(), ["a".to_string(), "b".to_string()]);
        assert_eq!(ds.y(), [7.0, 8.0, 9.0]);
        assert_eq!(ds.column(1), [4.0, 5.0, 6.0]);
    }

    #[test]
    fn csv_rejects_non_numeric_cell_naming_it() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,target\n1,2\nNA,4\n").unwrap();
        let err = Dataset::from_csv(&path, "target").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2") && msg.contains("'a'") && msg.contains("NA"), "{msg}");
    }

    #[test]
    fn csv_rejects_missing_target() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("no_target.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(Dataset::from_csv(&path, "target"), Err(Error::Lookup(_))));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let ds = synth_locally_varying(120, 7).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        ds.save_csv(&path).unwrap();
        let back = Dataset::from_csv(&path, "y").unwrap();
        assert_eq!(ds.feature_names(), back.feature_names());
        assert_eq!(ds.x(), back.x());
        assert_eq!(ds.y(), back.y());
    }

    #[test]
    fn split_default_ratios_n100() {
        let ds = synth_locally_varying(100, 0).unwrap();
        let (tr, va, te) = split(&ds, SplitRatios::default(), 1).unwrap();
        assert_eq!((tr.n(), va.n(), te.n()), (75, 15, 10));
    }

    #[test]
    fn split_is_deterministic() {
        let ds = synth_locally_varying(150, 3).unwrap();
        let (a1, b1, c1) = split(&ds, SplitRatios::default(), 9).unwrap();
        let (a2, b2, c2) = split(&ds, SplitRatios::default(), 9).unwrap();
        assert_eq!(a1.x(), a2.x());
        assert_eq!(b1.y(), b2.y());
        assert_eq!(c1.x(), c2.x());
    }

    #[test]
    fn split_rejects_tiny_and_bad_ratios() {
        let ds = toy();
        assert!(split(&ds, SplitRatios::default(), 0).is_err());
        let ds = synth_locally_varying(100, 0).unwrap();
        assert!(split(&ds, SplitRatios { train: 0.5, val: 0.5, test: 0.5 }, 0).is_err());
        assert!(split(&ds, SplitRatios { train: 1.0, val: -0.5, test: 0.5 }, 0).is_err());
    }

    #[test]
    fn split_partitions_rows_exactly() {
        let ds = synth_locally_varying(107, 5).unwrap();
        let (tr, va, te) = split(&ds, SplitRatios::default(), 2).unwrap();
        assert_eq!(tr.n() + va.n() + te.n(), 107);
        // every original row appears exactly once across the parts
        let mut seen: Vec<(u64, u64)> = Vec::new();
        for part in [&tr, &va, &te] {
            for i in 0..part.n() {
                seen.push((part.row(i)[0].to_bits(), part.y()[i].to_bits()));
            }
        }
        seen.sort_unstable();
        let mut orig: Vec<(u64, u64)> = (0..ds.n())
            .map(|i| (ds.row(i)[0].to_bits(), ds.y()[i].to_bits()))
            .collect();
        orig.sort_unstable();
        assert_eq!(seen, orig);
    }

    #[test]
    fn zscore_population_convention() {
        let ds = Dataset::new(
            vec!["a".into()],
            "t",
            vec![1.0, 2.0, 3.0],
            vec![0.0, 0.0, 0.0],
            "test",
        )
        .unwrap();
        let norm = Normalizer::fit(&ds, NormalizerKind::ZScore);
        assert_eq!(norm.offsets[0], 2.0);
        let normed = norm.apply(&ds).unwrap();
        assert!((normed[0] + 1.224744871391589).abs() < 1e-12);
        assert!(normed[1].abs() < 1e-12);
        assert!((normed[2] - 1.224744871391589).abs() < 1e-12);
    }

    #[test]
    fn constant_column_is_flagged_and_maps_to_zero() {
        let ds = Dataset::new(
            vec!["c".into()],
            "t",
            vec![5.0, 5.0],
            vec![1.0, 2.0],
            "test",
        )
        .unwrap();
        let norm = Normalizer::fit(&ds, NormalizerKind::ZScore);
        assert!(norm.constant[0]);
        assert_eq!(norm.scales[0], 1.0);
        assert_eq!(norm.apply(&ds).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn training_columns_have_zero_mean_unit_std() {
        let ds = synth_locally_varying(500, 11).unwrap();
        let norm = Normalizer::fit(&ds, NormalizerKind::ZScore);
        let normed = norm.apply(&ds).unwrap();
        for j in 0..ds.p() {
            let col: Vec<f64> = (0..ds.n()).map(|i| normed[i * ds.p() + j]).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < 1e-10);
            assert!((var.sqrt() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn normalizer_round_trip() {
        let ds = synth_locally_varying(200, 13).unwrap();
        let norm = Normalizer::fit(&ds, NormalizerKind::ZScore);
        let normed = norm.apply(&ds).unwrap();
        let mut back = vec![0.0; ds.p()];
        for i in 0..ds.n() {
            norm.invert_row(&normed[i * ds.p()..(i + 1) * ds.p()], &mut back);
            for j in 0..ds.p() {
                assert!((back[j] - ds.row(i)[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn minmax_maps_into_unit_interval() {
        let ds = synth_locally_varying(200, 17).unwrap();
        let norm = Normalizer::fit(&ds, NormalizerKind::MinMax);
        let normed = norm.apply(&ds).unwrap();
        assert!(normed.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn synth_is_deterministic() {
        let a = synth_locally_varying(150, 42).unwrap();
        let b = synth_locally_varying(150, 42).unwrap();
        assert_eq!(a.x(), b.x());
        assert_eq!(a.y(), b.y());
        let c = synth_locally_varying(150, 43).unwrap();
        assert_ne!(a.y(), c.y());
    }

    #[test]
    fn synth_records_parameters_in_provenance() {
        let ds = synth_locally_varying_with(100, 1, 0.25, 0.75).unwrap();
        assert!(ds.provenance().contains("band=0.25"));
        assert!(ds.provenance().contains("noise=0.75"));
    }

    #[test]
    fn synth_rejects_small_n() {
        assert!(synth_locally_varying(50, 0).is_err());
    }
}
