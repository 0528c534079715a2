use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;

/// Second-order polynomial kernel `(gamma * <x, z> + coef0)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyKernel {
    pub gamma: f64,
    pub coef0: f64,
}

pub const DEGREE: i32 = 2;

impl PolyKernel {
    #[inline]
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        let dot: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
        (self.gamma * dot + self.coef0).powi(DEGREE)
    }

    pub fn eval_checked(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                context: "kernel arguments",
                expected: x.len(),
                actual: z.len(),
            });
        }
        Ok(self.eval(x, z))
    }

    /// Gram matrix of the rows of `data`.
    pub fn gram(&self, data: &Matrix) -> Matrix {
        let n = data.rows();
        let rows = par::map_range(n, |i| {
            (0..n).map(|j| self.eval(data.row(i), data.row(j))).collect::<Vec<_>>()
        });
        Matrix::from_rows(&rows).unwrap_or_default()
    }
}

/// Kernel value of two vectors.
pub fn poly2_kernel(x: &[f64], z: &[f64], gamma: f64, coef0: f64) -> Result<f64> {
    PolyKernel { gamma, coef0 }.eval_checked(x, z)
}
