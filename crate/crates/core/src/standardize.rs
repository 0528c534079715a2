//! Per-feature z-scoring with population statistics.

use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Relative spread below which a feature counts as constant.
const CONSTANT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    input_dim: usize,
    /// Input columns kept, in output order.
    columns: Vec<usize>,
    mean: Vec<f64>,
    sd: Vec<f64>,
}

fn column_stats(data: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (data.rows() as f64, data.cols());
    let mut mean = vec![0.0; d];
    for row in data.iter_rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for row in data.iter_rows() {
        for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
            *s += (v - m).powi(2);
        }
    }
    (mean, var.into_iter().map(|s| (s / n).sqrt()).collect())
}

fn is_constant(mean: f64, sd: f64) -> bool {
    !(sd > CONSTANT_TOLERANCE * mean.abs().max(1.0))
}

impl Standardizer {
    /// Fits on `data` and drops constant columns.
    pub fn fit(data: &Matrix) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty("standardizer training data"));
        }
        let (mean, sd) = column_stats(data);
        let columns: Vec<usize> = (0..data.cols()).filter(|&j| !is_constant(mean[j], sd[j])).collect();
        if columns.len() < data.cols() {
            log::warn!(
                "dropping {} constant feature(s): columns {:?}",
                data.cols() - columns.len(),
                (0..data.cols()).filter(|j| !columns.contains(j)).collect::<Vec<_>>()
            );
        }
        Ok(Self {
            input_dim: data.cols(),
            mean: columns.iter().map(|&j| mean[j]).collect(),
            sd: columns.iter().map(|&j| sd[j]).collect(),
            columns,
        })
    }

    /// Fits on `data` keeping every column; constant columns are only centred.
    pub fn fit_all(data: &Matrix) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty("standardizer training data"));
        }
        let (mean, sd) = column_stats(data);
        let sd = mean
            .iter()
            .zip(sd)
            .map(|(&m, s)| if is_constant(m, s) { 1.0 } else { s })
            .collect();
        Ok(Self {
            input_dim: data.cols(),
            columns: (0..data.cols()).collect(),
            mean,
            sd,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sd(&self) -> &[f64] {
        &self.sd
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.input_dim {
            return Err(Error::DimensionMismatch {
                context: "standardizer input",
                expected: self.input_dim,
                actual: len,
            });
        }
        Ok(())
    }

    pub fn transform_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check(x.len())?;
        for (k, o) in out.iter_mut().enumerate() {
            *o = (x[self.columns[k]] - self.mean[k]) / self.sd[k];
        }
        Ok(())
    }

    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.output_dim()];
        self.transform_into(x, &mut out)?;
        Ok(out)
    }

    pub fn transform(&self, data: &Matrix) -> Result<Matrix> {
        self.check(data.cols())?;
        let mut out = Matrix::zeros(data.rows(), self.output_dim());
        for i in 0..data.rows() {
            self.transform_into(data.row(i), out.row_mut(i))?;
        }
        Ok(out)
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.input_dim as u64).u64(self.columns.len() as u64);
        for &c in &self.columns {
            w.u64(c as u64);
        }
        w.f64s(&self.mean).f64s(&self.sd);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let input_dim = r.usize()?;
        let n = r.usize()?;
        if n > input_dim {
            return Err(Error::format("standardizer", "more columns than inputs"));
        }
        let columns = (0..n).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
        let mean = r.f64s()?;
        let sd = r.f64s()?;
        if columns.iter().any(|&c| c >= input_dim) || mean.len() != n || sd.len() != n {
            return Err(Error::format("standardizer", "inconsistent dimensions"));
        }
        if sd.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::format("standardizer", "non-positive standard deviation"));
        }
        Ok(Self {
            input_dim,
            columns,
            mean,
            sd,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zscores_and_drops_constants() {
        let x = Matrix::from_rows(&[[1.0, 5.0, 2.0], [3.0, 5.0, 4.0]]).unwrap();
        let s = Standardizer::fit(&x).unwrap();
        assert_eq!(s.columns(), &[0, 2]);
        assert_eq!(s.transform_row(&[1.0, 5.0, 4.0]).unwrap(), vec![-1.0, 1.0]);
        let a = Standardizer::fit_all(&x).unwrap();
        assert_eq!(a.output_dim(), 3);
        assert_eq!(a.transform_row(&[3.0, 6.0, 2.0]).unwrap(), vec![1.0, 1.0, -1.0]);
        assert!(s.transform_row(&[1.0]).is_err());
    }

    #[test]
    fn binary_roundtrip() {
        let x = Matrix::from_rows(&[[1.0, 5.0, 2.0], [3.0, 5.0, 4.5]]).unwrap();
        let s = Standardizer::fit(&x).unwrap();
        let mut w = Writer::new();
        s.write(&mut w);
        let bytes = w.into_inner();
        let mut r = Reader::new("t", &bytes);
        assert_eq!(Standardizer::read(&mut r).unwrap(), s);
    }
}
