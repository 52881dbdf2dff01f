//! Artifact plumbing: result documents, subprocess black boxes, benchmarks and appendix analyses.

pub mod bench;
pub mod coverage;
pub mod document;
pub mod protocol;
pub mod run;
pub mod stability;
pub mod stats;
pub mod subprocess;

pub use bench::{bench_tables, BenchCell, BenchGrid};
pub use coverage::{coverage_experiment, CoverageReport, CoverageSpec, Explainer};
pub use document::{BoundDocument, BoundEntry, ResultDocument, RunEntry, SCHEMA_VERSION};
pub use run::{run_certify, BlackBoxSource, ExplanationSource, RunSpec};
pub use stability::{spearman, stability_metrics, top_k_intersection, StabilityReport};
pub use stats::Summary;
pub use subprocess::SubprocessModel;
