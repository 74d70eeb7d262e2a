//! Experiment configuration, execution, error measurement, invariance audit
//! and CSV export.

pub mod audit;
pub mod config;
pub mod report;
pub mod run;

pub use audit::{incompatibility_witness, invariance_audit, invariance_audit_with, AuditReport, AuditRow, IncompatibilityWitness};
pub use config::ExperimentConfig;
pub use report::{emit_audit, emit_comparison, emit_convergence, emit_reports};
pub use run::{compare, convergence_study, run_experiment, ComparisonReport, ConvergenceRow, ErrorReport};
