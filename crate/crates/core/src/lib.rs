//! Trust-region certification for local explanations of query-only models.
//!
//! Given a black box `g`, an explanation `e` computed for an example `x0` and a
//! quality metric (fidelity by default), the crate searches for the largest
//! half-width `w` such that the metric stays above a threshold `θ` everywhere
//! in the ℓ∞ cube `[x0 - w, x0 + w]`, using only a fixed number of queries per
//! checked region. Certified runs can then be scored with probabilistic
//! lower bounds on how close the observed minimum is to the true minimum.
//!
//! The layout follows the pipeline:
//!
//! - [`point`], [`blackbox`], [`explanation`], [`metric`], [`shell`], [`record`]:
//!   shared domain types.
//! - [`strategies`]: per-region certification (`unif`, `unifI`, `adaptI`, i.i.d. `unifI`).
//! - [`driver`]: the outer expansion/contraction search over half-widths.
//! - [`bounds`]: finite-sample (KDE based) and extreme-value certificates.
//! - [`special`]: Lipschitz head start, piecewise-linear early stop and the
//!   synthetic benchmark.
//! - [`harness`]: result documents, the subprocess wire protocol, benchmark
//!   grids, sequential covering and explanation stability.

pub mod blackbox;
pub mod bounds;
pub mod driver;
pub mod error;
pub mod explanation;
pub mod harness;
pub mod metric;
pub mod point;
pub mod record;
pub mod rng;
pub mod shell;
pub mod special;
pub mod strategies;

pub use blackbox::{BlackBox, Model};
pub use driver::{ecertify, BPolicy, DriverConfig};
pub use error::{Error, Result};
pub use explanation::Explanation;
pub use metric::{Fidelity, FidelityOracle, QualityMetric};
pub use point::Point;
pub use record::{CertificationReport, CertifyOutcome, FidelitySample, Provenance, RegionRecord};
pub use shell::ShellRegion;
pub use strategies::{StrategyConfig, StrategyKind};
