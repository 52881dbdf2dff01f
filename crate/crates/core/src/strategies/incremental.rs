//! unifI and its i.i.d. mixture variant.

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::metric::FidelityOracle;
use crate::point::Point;
use crate::record::{CertifyOutcome, IterationTrace, Provenance};
use crate::shell::ShellRegion;

use super::sampling::{sample_gaussian_shell, sample_uniform_shell};
use super::{certify, Budget, Ctx, Execution, StrategyConfig, StrategyKind, KEY_MIXTURE, KEY_PROTOTYPES};

pub fn certify_unif_i(
    shell: &ShellRegion,
    oracle: &dyn FidelityOracle,
    theta: f64,
    cfg: &StrategyConfig,
) -> Result<CertifyOutcome> {
    let cfg = StrategyConfig { kind: StrategyKind::UnifI, ..cfg.clone() };
    certify(shell, oracle, theta, &cfg, 0, Execution::Sequential)
}

pub fn certify_unif_i_iid(
    shell: &ShellRegion,
    oracle: &dyn FidelityOracle,
    theta: f64,
    cfg: &StrategyConfig,
) -> Result<CertifyOutcome> {
    let cfg = StrategyConfig { kind: StrategyKind::UnifIiid, ..cfg.clone() };
    certify(shell, oracle, theta, &cfg, 0, Execution::Sequential)
}

fn draw_prototypes(ctx: &Ctx<'_>, budget: &Budget) -> Vec<Vec<Point>> {
    (1..=budget.iterations)
        .map(|i| {
            let n = budget.unif_i_prototypes(i) as usize;
            sample_uniform_shell(ctx.shell, n, &mut ctx.rng(&[i as u64, KEY_PROTOTYPES]))
        })
        .collect()
}

pub(super) fn run(ctx: &Ctx<'_>) -> Result<CertifyOutcome> {
    let budget = Budget::new(ctx.cfg.budget);
    let mut samples = Vec::with_capacity(budget.unif_i_total() as usize);
    let mut trace = Vec::new();
    for i in 1..=budget.iterations {
        let n = budget.unif_i_prototypes(i) as usize;
        let per = budget.unif_i_batch(i) as usize;
        let protos = sample_uniform_shell(ctx.shell, n, &mut ctx.rng(&[i as u64, KEY_PROTOTYPES]));

        let draw = |k: usize| {
            let mut rng = ctx.rng(&[i as u64, k as u64]);
            sample_gaussian_shell(&protos[k], ctx.cfg.sigma, ctx.shell, per, ctx.cfg.max_rejection_factor, &mut rng)
        };
        let groups: Vec<Vec<Point>> = match ctx.exec {
            Execution::Sequential => (0..n).map(draw).collect(),
            Execution::Parallel => (0..n).into_par_iter().map(draw).collect(),
        };

        let mut points = Vec::with_capacity(n * per);
        let mut provs = Vec::with_capacity(n * per);
        for (k, group) in groups.into_iter().enumerate() {
            let prov = Provenance::Prototype { iteration: i, prototype: k as u32 };
            provs.extend(std::iter::repeat_n(prov, group.len()));
            points.extend(group);
        }
        let fids = ctx.evaluate(&points)?;
        let batch_min = fids.iter().copied().fold(f64::INFINITY, f64::min);
        samples.extend(
            points
                .into_iter()
                .zip(fids)
                .zip(provs)
                .map(|((p, f), prov)| ctx.sample(p, f, prov)),
        );
        trace.push(IterationTrace { iteration: i, prototypes: n as u32, survivor: None });
        if batch_min < ctx.theta {
            break;
        }
    }
    super::finish(samples, ctx.theta, trace)
}

/// Draws `count` i.i.d. samples from the mixture that gives every outer
/// iteration weight `1/L` and every prototype inside iteration `i` weight
/// `1/n_i`, each component conditioned on `shell`.
///
/// Returns the points together with the (iteration, prototype) component each
/// came from. Iterations are 1-based, prototypes 0-based.
pub fn draw_mixture<R: Rng + ?Sized>(
    prototypes: &[Vec<Point>],
    sigma: f64,
    shell: &ShellRegion,
    count: usize,
    max_rejection_factor: u32,
    rng: &mut R,
) -> Vec<(Point, Provenance)> {
    let nonempty: Vec<usize> = (0..prototypes.len()).filter(|&i| !prototypes[i].is_empty()).collect();
    assert!(!nonempty.is_empty(), "mixture needs at least one prototype");
    (0..count)
        .map(|_| {
            let i = nonempty[rng.random_range(0..nonempty.len())];
            let k = rng.random_range(0..prototypes[i].len());
            let mut x = sample_gaussian_shell(&prototypes[i][k], sigma, shell, 1, max_rejection_factor, rng);
            let prov = Provenance::Prototype { iteration: i as u32 + 1, prototype: k as u32 };
            (x.pop().expect("one sample requested"), prov)
        })
        .collect()
}

pub(super) fn run_iid(ctx: &Ctx<'_>) -> Result<CertifyOutcome> {
    let budget = Budget::new(ctx.cfg.budget);
    let protos = draw_prototypes(ctx, &budget);
    let mut rng = ctx.rng(&[KEY_MIXTURE]);
    let draws = draw_mixture(
        &protos,
        ctx.cfg.sigma,
        ctx.shell,
        ctx.cfg.budget as usize,
        ctx.cfg.max_rejection_factor,
        &mut rng,
    );
    let (points, provs): (Vec<Point>, Vec<Provenance>) = draws.into_iter().unzip();
    let fids = ctx.evaluate(&points)?;
    let samples = points
        .into_iter()
        .zip(fids)
        .zip(provs)
        .map(|((p, f), prov)| ctx.sample(p, f, prov))
        .collect();
    let trace = protos
        .iter()
        .enumerate()
        .map(|(i, ps)| IterationTrace { iteration: i as u32 + 1, prototypes: ps.len() as u32, survivor: None })
        .collect();
    super::finish(samples, ctx.theta, trace)
}
