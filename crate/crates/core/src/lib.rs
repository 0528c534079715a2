//! Machine-hearing toolkit for cough event detection.
//!
//! The pipeline runs in stages:
//!
//! 1. [`dsp`]: WAV ingestion, resampling to 11.025 kHz, 75 ms framing and a
//!    three-sub-frame Welch PSD per frame.
//! 2. [`features`]: 61 band-specific spectral descriptors plus 56 auxiliary
//!    descriptors, giving a 117-dimensional short-term vector.
//! 3. [`selection`]: intrinsic-dimension estimation, ReliefF ranking per
//!    recording scenario, the seven-step combination and a stability vote
//!    reducing the space to 29 features.
//! 4. [`representation`]: long-term observations over five-frame groups,
//!    either mean/standard deviation (AvgSD) or a supervised bag of audio words.
//! 5. [`classifier`]: degree-2 polynomial kernel SVM and a three-model
//!    majority-vote ensemble.
//! 6. [`evaluation`]: block-wise and leave-one-patient-out partitions,
//!    SEN/SPE/ACC, ROC/AUC, McNemar's test and SNR annotation.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise. Both paths
//! produce identical results.

// `!(x > t)` comparisons reject NaN along with small values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod annotation;
pub mod binio;
pub mod classifier;
pub mod config;
pub mod dataset;
pub mod dsp;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod matrix;
pub mod par;
pub mod pipeline;
pub mod representation;
pub mod selection;
pub mod standardize;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::Matrix;
