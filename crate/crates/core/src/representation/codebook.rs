//! Supervised audio-word codebook.

use std::path::Path;

use super::kmeans::{nearest_centroid, KMeans, KMeansConfig};
use crate::binio::{self, Reader, Writer};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::standardize::Standardizer;

const MAGIC: &[u8; 4] = b"CBK1";
const VERSION: u16 = 1;

/// Cluster centres of the cough class followed by those of the other class,
/// in the z-scored space of `standardizer`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub words: Matrix,
    pub k_pos: usize,
    pub k_neg: usize,
    pub standardizer: Standardizer,
    pub seed: u64,
    /// k-means iterations for the cough and other halves.
    pub iterations: (usize, usize),
}

impl Codebook {
    /// Clusters each class separately and joins the two sets of words.
    ///
    /// Features are z-scored with statistics of both classes together; both
    /// halves are clustered with the same seed.
    pub fn build(
        pos: &Matrix,
        neg: &Matrix,
        k_pos: usize,
        k_neg: usize,
        seed: u64,
        config: &KMeansConfig,
    ) -> Result<Self> {
        if pos.cols() != neg.cols() {
            return Err(Error::DimensionMismatch {
                context: "codebook class data",
                expected: pos.cols(),
                actual: neg.cols(),
            });
        }
        let mut all = pos.clone();
        all.append(neg)?;
        let standardizer = Standardizer::fit_all(&all)?;
        let zpos = standardizer.transform(pos)?;
        let zneg = standardizer.transform(neg)?;
        let (kp, kn) = crate::par::join(
            || KMeans::fit(&zpos, k_pos, seed, config),
            || KMeans::fit(&zneg, k_neg, seed, config),
        );
        let (kp, kn) = (kp?, kn?);
        let mut words = kp.centroids;
        words.append(&kn.centroids)?;
        Ok(Self {
            words,
            k_pos,
            k_neg,
            standardizer,
            seed,
            iterations: (kp.iterations, kn.iterations),
        })
    }

    pub fn len(&self) -> usize {
        self.words.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.words.rows() == 0
    }

    /// Short-term input dimension.
    pub fn dim(&self) -> usize {
        self.standardizer.input_dim()
    }

    /// True when word `w` belongs to the cough class.
    pub fn is_cough_word(&self, w: usize) -> bool {
        w < self.k_pos
    }

    /// Nearest word of a raw short-term vector.
    pub fn quantize(&self, x: &[f64]) -> Result<usize> {
        let z = self.standardizer.transform_row(x)?;
        Ok(nearest_centroid(&self.words, &z).0)
    }

    /// Word counts over the frames of one group.
    pub fn encode<R: AsRef<[f64]>>(&self, frames: &[R]) -> Result<Vec<f64>> {
        let mut hist = vec![0.0; self.len()];
        for f in frames {
            hist[self.quantize(f.as_ref())?] += 1.0;
        }
        Ok(hist)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u64(self.k_pos as u64)
            .u64(self.k_neg as u64)
            .u64(self.words.cols() as u64)
            .u64(self.seed)
            .u64(self.iterations.0 as u64)
            .u64(self.iterations.1 as u64)
            .f64s(self.words.as_slice());
        self.standardizer.write(&mut w);
        binio::seal(MAGIC, VERSION, &w.into_inner())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (_, mut r): (u16, Reader) = binio::open("codebook", MAGIC, VERSION, bytes)?;
        let k_pos = r.usize()?;
        let k_neg = r.usize()?;
        let dim = r.usize()?;
        let seed = r.u64()?;
        let iterations = (r.usize()?, r.usize()?);
        let data = r.f64s()?;
        let standardizer = Standardizer::read(&mut r)?;
        r.finish()?;
        let words = Matrix::new(k_pos + k_neg, dim, data)
            .map_err(|_| Error::format("codebook", "word matrix size does not match header"))?;
        if standardizer.output_dim() != dim || !words.all_finite() {
            return Err(Error::format("codebook", "inconsistent word dimensions"));
        }
        Ok(Self {
            words,
            k_pos,
            k_neg,
            standardizer,
            seed,
            iterations,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        binio::write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&binio::read_file(path)?).map_err(|e| e.with_path(path))
    }
}
