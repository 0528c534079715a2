//! Polynomial-kernel SVM and the three-model majority-vote ensemble.

mod ensemble;
mod kernel;
mod model;
mod smo;

pub use ensemble::{ensemble_vote, EnsembleDecision, EnsembleModel};
pub use kernel::{poly2_kernel, PolyKernel, DEGREE};
pub use model::{ClassWeighting, SvmConfig, SvmModel};
