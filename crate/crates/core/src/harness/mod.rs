//! Experiment plumbing: JSON configs, bundled fixtures, seeded trial
//! generators, the property suites, and run records.

pub mod config;
pub mod fixtures;
pub mod generate;
pub mod run;
pub mod verify;

pub use config::{
    BenchPlan, Budgets, DomainSpec, Expectation, ExperimentConfig, Family, VerifyPlan,
    SCHEMA_VERSION,
};
pub use run::{
    bench_csv, run_bench, run_label, run_search, run_solve, run_verify, BenchRow, RunRecord,
    Stage, Timings,
};
pub use verify::{Check, Status};
