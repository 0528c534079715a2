use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::kernel::PolyKernel;
use super::smo::{solve, SmoProblem};
use crate::binio::{self, Reader, Writer};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;
use crate::standardize::Standardizer;

const MAGIC: &[u8; 4] = b"CSVM";
const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeighting {
    /// Both classes bounded by `C`.
    Uniform,
    /// Class bound `C * n / (2 * n_class)`.
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmConfig {
    pub c: f64,
    pub class_weighting: ClassWeighting,
    /// Kernel scale; `None` uses 1 / (number of standardised features).
    pub gamma: Option<f64>,
    pub coef0: f64,
    pub tolerance: f64,
    pub cache_mb: usize,
    /// Iteration cap; `None` uses max(10^6, 100 n).
    pub max_iterations: Option<usize>,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            class_weighting: ClassWeighting::Balanced,
            gamma: None,
            coef0: 1.0,
            tolerance: 1e-3,
            cache_mb: 256,
            max_iterations: None,
        }
    }
}

/// Trained second-order polynomial-kernel SVM.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub standardizer: Standardizer,
    pub kernel: PolyKernel,
    /// Standardised support vectors.
    pub support_vectors: Matrix,
    /// `alpha_i * y_i` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    /// Multipliers of `c` for the cough and other classes.
    pub class_weights: [f64; 2],
    /// Training-row index of each support vector.
    pub sv_indices: Vec<usize>,
    /// Maximal KKT violation at termination.
    pub kkt_gap: f64,
    pub iterations: usize,
    /// Seconds since the Unix epoch when training finished.
    pub created_unix: u64,
}

fn check_labels(x: &Matrix, y: &[bool]) -> Result<(usize, usize)> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            context: "training labels",
            expected: x.rows(),
            actual: y.len(),
        });
    }
    if !x.all_finite() {
        return Err(Error::NonFinite("training matrix"));
    }
    let pos = y.iter().filter(|&&l| l).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::SingleClass("training labels"));
    }
    Ok((pos, y.len() - pos))
}

impl SvmModel {
    /// Trains on rows of `x` with labels `y` (`true` = cough).
    pub fn train(x: &Matrix, y: &[bool], config: &SvmConfig) -> Result<Self> {
        let (n_pos, n_neg) = check_labels(x, y)?;
        if !(config.c > 0.0) {
            return Err(Error::InvalidArgument(format!("C must be positive, got {}", config.c)));
        }
        let standardizer = Standardizer::fit(x)?;
        if standardizer.output_dim() == 0 {
            return Err(Error::InvalidArgument("every feature is constant".into()));
        }
        let z = standardizer.transform(x)?;
        let kernel = PolyKernel {
            gamma: config.gamma.unwrap_or(1.0 / z.cols() as f64),
            coef0: config.coef0,
        };
        let n = x.rows();
        let class_weights = match config.class_weighting {
            ClassWeighting::Uniform => [1.0, 1.0],
            ClassWeighting::Balanced => [n as f64 / (2.0 * n_pos as f64), n as f64 / (2.0 * n_neg as f64)],
        };
        let ys: Vec<f64> = y.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
        let bounds: Vec<f64> = y
            .iter()
            .map(|&l| config.c * class_weights[if l { 0 } else { 1 }])
            .collect();
        let sol = solve(&SmoProblem {
            data: &z,
            y: &ys,
            bounds: &bounds,
            kernel,
            tolerance: config.tolerance,
            max_iterations: config.max_iterations.unwrap_or((100 * n).max(1_000_000)),
            cache_bytes: config.cache_mb << 20,
        });
        let sv_indices: Vec<usize> = (0..n).filter(|&i| sol.alpha[i] > 0.0).collect();
        Ok(Self {
            support_vectors: z.select_rows(&sv_indices),
            dual_coef: sv_indices.iter().map(|&i| sol.alpha[i] * ys[i]).collect(),
            sv_indices,
            standardizer,
            kernel,
            bias: sol.bias,
            c: config.c,
            class_weights,
            kkt_gap: sol.gap,
            iterations: sol.iterations,
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        })
    }

    /// Raw input dimension.
    pub fn input_dim(&self) -> usize {
        self.standardizer.input_dim()
    }

    /// Decision value of one raw input; positive means cough.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        let z = self.standardizer.transform_row(x)?;
        Ok(self
            .support_vectors
            .iter_rows()
            .zip(&self.dual_coef)
            .map(|(sv, a)| a * self.kernel.eval(sv, &z))
            .sum::<f64>()
            + self.bias)
    }

    pub fn decision_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "model input",
                expected: self.input_dim(),
                actual: x.cols(),
            });
        }
        par::map_range(x.rows(), |i| self.decision(x.row(i)))
            .into_iter()
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> Result<bool> {
        Ok(self.decision(x)? > 0.0)
    }

    /// Per-sample multiplier bound.
    pub fn bound(&self, positive: bool) -> f64 {
        self.c * self.class_weights[if positive { 0 } else { 1 }]
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.created_unix);
        self.standardizer.write(w);
        w.f64(self.kernel.gamma)
            .f64(self.kernel.coef0)
            .f64(self.c)
            .f64(self.class_weights[0])
            .f64(self.class_weights[1])
            .f64(self.bias)
            .f64(self.kkt_gap)
            .u64(self.iterations as u64)
            .u64(self.support_vectors.rows() as u64)
            .u64(self.support_vectors.cols() as u64)
            .f64s(self.support_vectors.as_slice())
            .f64s(&self.dual_coef);
        for &i in &self.sv_indices {
            w.u64(i as u64);
        }
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let created_unix = r.u64()?;
        let standardizer = Standardizer::read(r)?;
        let kernel = PolyKernel {
            gamma: r.f64()?,
            coef0: r.f64()?,
        };
        let c = r.f64()?;
        let class_weights = [r.f64()?, r.f64()?];
        let bias = r.f64()?;
        let kkt_gap = r.f64()?;
        let iterations = r.usize()?;
        let rows = r.usize()?;
        let cols = r.usize()?;
        let sv = r.f64s()?;
        let dual_coef = r.f64s()?;
        if cols != standardizer.output_dim() || dual_coef.len() != rows {
            return Err(Error::format("model", "support-vector dimensions disagree"));
        }
        let support_vectors =
            Matrix::new(rows, cols, sv).map_err(|_| Error::format("model", "support-vector storage size"))?;
        let sv_indices = (0..rows).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            standardizer,
            kernel,
            support_vectors,
            dual_coef,
            bias,
            c,
            class_weights,
            sv_indices,
            kkt_gap,
            iterations,
            created_unix,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        binio::seal(MAGIC, VERSION, &w.into_inner())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (_, mut r) = binio::open("model", MAGIC, VERSION, bytes)?;
        let m = Self::read(&mut r)?;
        r.finish()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        binio::write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&binio::read_file(path)?).map_err(|e| e.with_path(path))
    }
}
