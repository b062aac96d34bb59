//! Configuration-driven experiments: instance generation, the PG-EXTRA
//! baseline and the `run`, `check-mixing`, `verify` and `compare` commands.

mod build;
mod commands;
mod config;
mod pg_extra;

pub use build::{build_graph, build_mixing, Instance};
pub use commands::{
    aligned_csv, cmd_check_mixing, cmd_compare, cmd_run, cmd_verify, compare_summary, exit, exit_code, format_verify,
    load_config, raw_mixing, resolved_decentralized_tau, run_algorithm, status_name, write_atomic, AuditSummary,
    CompareEntry, Overrides, RunReport, VerifyRow,
};
pub use config::{
    AlgorithmName, AlgorithmSection, CouplingKind, ExperimentConfig, ExplicitCoupling, GraphSection, MixingSection,
    MixingSpec, ProblemSection, ProxSpec, RunSection, StartPoint, StepSpec, TopologySpec,
};
pub use pg_extra::{pg_extra_run, PgExtraOutcome};
