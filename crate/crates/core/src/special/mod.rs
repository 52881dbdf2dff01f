//! Shortcuts available when more is known about the black box, and the
//! analytically solvable synthetic benchmark.

pub mod early_stop;
pub mod lipschitz;
pub mod synthetic;

pub use early_stop::{PiecewiseEarlyStop, StopSignal};
pub use lipschitz::{lipschitz_headstart, HeadStart, LipschitzInfo};
pub use synthetic::{hyperplane_explanation, make_synthetic, Synthetic, SyntheticPwl};
