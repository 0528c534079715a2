//! Partitions, detection metrics, significance testing and SNR annotation.

mod mcnemar;
mod metrics;
mod partition;
mod report;
mod snr;

pub use mcnemar::{chi2_1_survival, mcnemar_test, significance_stars, McNemar};
pub use metrics::{roc_auc, Confusion, Roc};
pub use partition::{
    block5_partition, block_sizes, lopo_partition, partition, Fold, ObservationTag, PartitionPlan, PartitionScheme,
    N_BLOCKS,
};
pub use report::{Comparison, EvalReport, EvalSummary, FoldOutcome, FoldReport};
pub use snr::{event_spans, snr_annotate, SnrEstimate, SnrFlag, DEFAULT_CONTEXT_FRAMES};
