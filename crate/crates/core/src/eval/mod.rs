//! Stratified cross-validation and classification metrics.

mod cv;
mod folds;
mod metrics;

pub use cv::{
    audit_contributors, cross_validate, AuditEntry, Classifier, CvReport, ExperimentConfig,
    FoldResult, LeakageAudit, Method, MethodReport, Stage, DEFAULT_FOLDS, DEFAULT_TOP_NB,
    DEFAULT_TOP_SVM,
};
pub use folds::stratified_kfold;
pub use metrics::{metrics, ConfusionMatrix, Metrics, MetricsSummary, Stat};
