//! Synthetic data generation, batch gradient descent on normalized linear
//! models, trajectory logging, and CSV dataset ingestion.

use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::risk::{robust_risk, surrogate_risk, zero_one_risk};
use crate::util::{format_float, write_atomic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::path::Path;

/// A labeled dataset with features in the closed L2 unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl Dataset {
    /// Build a dataset; validates shape consistency and labels in {-1, +1}.
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Domain("dataset is empty".into()));
        }
        if features.len() != labels.len() {
            return Err(Error::Domain(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let d = features[0].len();
        if d == 0 {
            return Err(Error::Domain("feature rows must be non-empty".into()));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Domain(format!(
                    "row {i} has {} features, expected {d}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!(
                    "row {i} contains a non-finite value"
                )));
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::Domain(format!(
                    "label {i} must be +1 or -1, got {y}"
                )));
            }
        }
        Ok(Dataset { features, labels })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.features
            .iter()
            .map(|r| r.as_slice())
            .zip(self.labels.iter().copied())
    }

    /// Largest row L2 norm.
    pub fn max_norm(&self) -> f64 {
        self.features
            .iter()
            .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// A linear scorer `f(x) = weights . x + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    /// L2 norm of the augmented parameter `[weights; bias]`.
    pub fn augmented_norm(&self) -> f64 {
        (self.weights.iter().map(|w| w * w).sum::<f64>() + self.bias * self.bias).sqrt()
    }

    /// Rescale so the augmented parameter has unit norm.
    fn normalize(&mut self) -> Result<()> {
        let n = self.augmented_norm();
        if !(n > 1e-300) {
            return Err(Error::Internal(
                "cannot normalize a zero augmented parameter vector".into(),
            ));
        }
        for w in &mut self.weights {
            *w /= n;
        }
        self.bias /= n;
        Ok(())
    }
}

/// Configuration echo stored alongside a training trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub loss: LossSpec,
    pub gamma: f64,
    pub lr: f64,
    pub steps: usize,
    pub seed: u64,
}

/// One per-step risk record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub train_surrogate: f64,
    pub test_surrogate: f64,
    pub test_robust: f64,
    pub test_zero_one: f64,
}

/// A full training run: initial state plus one record per step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub config: TrainConfig,
    pub records: Vec<TrajectoryRecord>,
    pub final_model: LinearModel,
}

impl Trajectory {
    /// CSV header for trajectory exports.
    pub const CSV_HEADER: &'static str =
        "step,train_surrogate,test_surrogate,test_robust,test_zero_one";

    /// Render the trajectory as CSV (floats at full round-trip precision).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.step,
                format_float(r.train_surrogate),
                format_float(r.test_surrogate),
                format_float(r.test_robust),
                format_float(r.test_zero_one)
            ));
        }
        out
    }

    /// Write the trajectory CSV atomically to `path`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_csv_string())
    }
}

/// Generate the two-Gaussian benchmark: identity-covariance normals centered
/// at `(2, 2)` for the positive class and `(-2, -2)` for the negative class,
/// labels assigned in exact alternation, then all points (train and test
/// jointly) rescaled by the maximum L2 norm into the unit ball.
///
/// Deterministic for a fixed seed.
pub fn gen_twonorm(n_train: usize, n_test: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if n_train == 0 || n_test == 0 {
        return Err(Error::Precondition(
            "n_train and n_test must both be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_train + n_test;
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = if i % 2 == 0 { 1.0 } else { -1.0 };
        let g0: f64 = rng.sample(StandardNormal);
        let g1: f64 = rng.sample(StandardNormal);
        features.push(vec![2.0 * y + g0, 2.0 * y + g1]);
        labels.push(y);
    }
    let max_norm = features
        .iter()
        .map(|r| (r[0] * r[0] + r[1] * r[1]).sqrt())
        .fold(0.0, f64::max);
    for row in &mut features {
        row[0] /= max_norm;
        row[1] /= max_norm;
    }
    let test_features = features.split_off(n_train);
    let test_labels = labels.split_off(n_train);
    Ok((
        Dataset::new(features, labels)?,
        Dataset::new(test_features, test_labels)?,
    ))
}

/// Full-batch gradient descent on the mean surrogate loss of margins
/// `y * (w . x + b)`, with the augmented parameter renormalized to unit norm
/// after every update.
///
/// At kinks of the loss the subgradient is taken as the mean of the left and
/// right one-sided derivatives. The initial parameter is drawn uniformly from
/// the unit sphere in `d + 1` dimensions, seeded. The returned trajectory has
/// `steps + 1` records: the initial state and one per update.
pub fn train(
    loss: &LossSpec,
    train_data: &Dataset,
    lr: f64,
    steps: usize,
    gamma: f64,
    test_data: &Dataset,
    seed: u64,
) -> Result<Trajectory> {
    if !(lr > 0.0) {
        return Err(Error::Precondition(format!(
            "lr must be positive, got {lr}"
        )));
    }
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    if train_data.dim() != test_data.dim() {
        return Err(Error::Domain(format!(
            "train dimension {} != test dimension {}",
            train_data.dim(),
            test_data.dim()
        )));
    }
    let d = train_data.dim();

    // Gaussian direction, normalized: uniform on the unit sphere.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = loop {
        let aug: Vec<f64> = (0..=d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let m = LinearModel {
            weights: aug[..d].to_vec(),
            bias: aug[d],
        };
        if m.augmented_norm() > 1e-12 {
            break m;
        }
    };
    model.normalize()?;

    let record = |step: usize, model: &LinearModel| -> Result<TrajectoryRecord> {
        Ok(TrajectoryRecord {
            step,
            train_surrogate: surrogate_risk(loss, model, train_data)?,
            test_surrogate: surrogate_risk(loss, model, test_data)?,
            test_robust: robust_risk(model, test_data, gamma)?,
            test_zero_one: zero_one_risk(model, test_data)?,
        })
    };

    let mut records = Vec::with_capacity(steps + 1);
    records.push(record(0, &model)?);

    let n = train_data.len() as f64;
    for step in 1..=steps {
        let mut grad = vec![0.0; d + 1];
        for (x, y) in train_data.iter() {
            let margin = y * model.score(x);
            let (dl, dr) = loss.one_sided_derivatives(margin)?;
            let g = 0.5 * (dl + dr); // subgradient selection at kinks
            for (gi, xi) in grad.iter_mut().zip(x) {
                *gi += g * y * xi;
            }
            grad[d] += g * y;
        }
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= lr * g / n;
        }
        model.bias -= lr * grad[d] / n;
        model.normalize()?;
        records.push(record(step, &model)?);
    }

    Ok(Trajectory {
        config: TrainConfig {
            loss: *loss,
            gamma,
            lr,
            steps,
            seed,
        },
        records,
        final_model: model,
    })
}

/// Excess-risk proxies along a trajectory: each step's test surrogate risk
/// (resp. test robust risk) minus the per-trajectory minimum of that series.
pub fn excess_proxies(traj: &Trajectory) -> (Vec<f64>, Vec<f64>) {
    let min_sur = traj
        .records
        .iter()
        .map(|r| r.test_surrogate)
        .fold(f64::INFINITY, f64::min);
    let min_rob = traj
        .records
        .iter()
        .map(|r| r.test_robust)
        .fold(f64::INFINITY, f64::min);
    let sur = traj
        .records
        .iter()
        .map(|r| r.test_surrogate - min_sur)
        .collect();
    let rob = traj
        .records
        .iter()
        .map(|r| r.test_robust - min_rob)
        .collect();
    (sur, rob)
}

/// A dataset loaded from CSV, with rescale bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    /// True when the file's features exceeded the unit ball and were rescaled.
    pub rescaled: bool,
    /// Divisor applied to every feature row (1.0 when no rescale happened).
    pub scale: f64,
}

/// Load a dataset from a CSV file with rows `label,feat1,...,featd` and
/// labels in {-1, +1}. If any row's norm exceeds 1, every row is divided by
/// the file's maximum norm and the result is flagged as rescaled.
pub fn load_csv(path: &Path) -> Result<LoadedDataset> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: display.clone(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::Parse {
                line: 0,
                message: e.to_string(),
            },
        })?;

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let line = idx + 1;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if rec.len() < 2 {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected label plus at least one feature, got {} fields",
                    rec.len()
                ),
            });
        }
        let label: f64 = rec[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad label '{}'", &rec[0]),
        })?;
        if label != 1.0 && label != -1.0 {
            return Err(Error::Parse {
                line,
                message: format!("label must be +1 or -1, got {label}"),
            });
        }
        let mut row = Vec::with_capacity(rec.len() - 1);
        for field in rec.iter().skip(1) {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad feature '{field}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite feature '{field}'"),
                });
            }
            row.push(v);
        }
        features.push(row);
        labels.push(label);
    }

    let mut dataset = Dataset::new(features, labels)?;
    let max_norm = dataset.max_norm();
    let (rescaled, scale) = if max_norm > 1.0 {
        for row in &mut dataset.features {
            for v in row.iter_mut() {
                *v /= max_norm;
            }
        }
        (true, max_norm)
    } else {
        (false, 1.0)
    };
    Ok(LoadedDataset {
        dataset,
        rescaled,
        scale,
    })
}
