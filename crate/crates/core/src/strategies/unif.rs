use crate::error::Result;
use crate::metric::FidelityOracle;
use crate::record::{CertifyOutcome, Provenance};
use crate::shell::ShellRegion;

use super::sampling::sample_uniform_shell;
use super::{certify, Ctx, Execution, StrategyConfig, StrategyKind};

/// Queries exactly `Q` uniform shell points and certifies iff all reach `θ`.
pub fn certify_unif(
    shell: &ShellRegion,
    oracle: &dyn FidelityOracle,
    theta: f64,
    cfg: &StrategyConfig,
) -> Result<CertifyOutcome> {
    let cfg = StrategyConfig { kind: StrategyKind::Unif, ..cfg.clone() };
    certify(shell, oracle, theta, &cfg, 0, Execution::Sequential)
}

pub(super) fn run(ctx: &Ctx<'_>) -> Result<CertifyOutcome> {
    let mut rng = ctx.rng(&[0]);
    let points = sample_uniform_shell(ctx.shell, ctx.cfg.budget as usize, &mut rng);
    let fids = ctx.evaluate(&points)?;
    let samples = points
        .into_iter()
        .zip(fids)
        .map(|(p, f)| ctx.sample(p, f, Provenance::Uniform))
        .collect();
    super::finish(samples, ctx.theta, Vec::new())
}
