//! Training, cross-validation and the optimizer comparison.

mod compare;
mod folds;
mod train;

pub use compare::{
    format_table, run_comparison, split_rows, write_results_csv, ComparisonConfig,
    ComparisonReport, CycleDataset, ExperimentResult, RunFailure, SplitMode, RESULTS_HEADER,
    SPLIT_BLOCKS,
};
pub use folds::{make_folds, Fold, FoldMode, FoldSplit};
pub use train::{
    cross_validate, evaluate, train, CrossValidation, EpochRecord, FoldScore, TrainingLog,
    LOG_HEADER,
};
