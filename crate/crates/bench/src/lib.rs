//! Dataset generators and the timing harness.

pub mod generators;
pub mod suite;

pub use generators::{gen_disjoint, gen_distinctness, gen_uniform, gen_worst_case, gen_zipf};
pub use suite::{run_suite, to_csv, BenchConfig, BenchError, Distribution, Outcome, Row};
