//! Benchmarking, ablation and command-line tooling for `compact-core`.

pub mod cli;
mod error;
pub mod fixtures;
pub mod harness;
pub mod metrics;
pub mod phantom;

pub use error::{BenchError, Result};
pub use harness::{
    ablate_inputs, bench_inputs, run_ablation, run_bench, AblationConfig, AblationReport,
    BenchInput, BenchRecord, BenchReport, Codec,
};
pub use metrics::{compression_ratio, entropy};
pub use phantom::{phantom, phantom_set};
