//! adaptI: doubling prototypes per outer iteration, halving survivors per round.

use rayon::prelude::*;

use crate::error::Result;
use crate::metric::FidelityOracle;
use crate::point::Point;
use crate::record::{CertifyOutcome, IterationTrace, Provenance};
use crate::shell::ShellRegion;

use super::sampling::{sample_gaussian_shell, sample_uniform_shell};
use super::{certify, AdaptSchedule, Ctx, Execution, StrategyConfig, StrategyKind, KEY_PROTOTYPES};

pub fn certify_adapt_i(
    shell: &ShellRegion,
    oracle: &dyn FidelityOracle,
    theta: f64,
    cfg: &StrategyConfig,
) -> Result<CertifyOutcome> {
    let cfg = StrategyConfig { kind: StrategyKind::AdaptI, ..cfg.clone() };
    certify(shell, oracle, theta, &cfg, 0, Execution::Sequential)
}

/// Keeps the `keep` prototypes with the lowest round minimum; ties go to the
/// lower prototype index. Returned in index order.
pub(super) fn select_survivors(active: &[usize], round_min: &[f64], keep: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..active.len()).collect();
    order.sort_by(|&a, &b| {
        round_min[a]
            .total_cmp(&round_min[b])
            .then(active[a].cmp(&active[b]))
    });
    let mut kept: Vec<usize> = order[..keep.min(order.len())].iter().map(|&j| active[j]).collect();
    kept.sort_unstable();
    kept
}

pub(super) fn run(ctx: &Ctx<'_>) -> Result<CertifyOutcome> {
    let schedule = AdaptSchedule::new(ctx.cfg.budget);
    let mut samples = Vec::new();
    let mut trace = Vec::new();

    'outer: for it in &schedule.iterations {
        let i = it.iteration;
        let n = it.prototypes as usize;
        let protos = sample_uniform_shell(ctx.shell, n, &mut ctx.rng(&[i as u64, KEY_PROTOTYPES]));
        let mut active: Vec<usize> = (0..n).collect();

        for (round, &per) in it.batches.iter().enumerate() {
            let per = per as usize;
            let draw = |&k: &usize| {
                let mut rng = ctx.rng(&[i as u64, k as u64, round as u64]);
                sample_gaussian_shell(&protos[k], ctx.cfg.sigma, ctx.shell, per, ctx.cfg.max_rejection_factor, &mut rng)
            };
            let groups: Vec<Vec<Point>> = match ctx.exec {
                Execution::Sequential => active.iter().map(draw).collect(),
                Execution::Parallel => active.par_iter().map(draw).collect(),
            };

            let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
            let points: Vec<Point> = groups.into_iter().flatten().collect();
            let fids = ctx.evaluate(&points)?;

            let mut round_min = Vec::with_capacity(active.len());
            let mut offset = 0;
            for &size in &sizes {
                round_min.push(fids[offset..offset + size].iter().copied().fold(f64::INFINITY, f64::min));
                offset += size;
            }
            let mut fid_iter = fids.into_iter();
            let mut point_iter = points.into_iter();
            for (&k, &size) in active.iter().zip(&sizes) {
                let prov = Provenance::Prototype { iteration: i, prototype: k as u32 };
                for _ in 0..size {
                    let p = point_iter.next().expect("sizes sum to point count");
                    let f = fid_iter.next().expect("one fidelity per point");
                    samples.push(ctx.sample(p, f, prov));
                }
            }

            let worst = round_min.iter().copied().fold(f64::INFINITY, f64::min);
            if worst < ctx.theta {
                trace.push(IterationTrace { iteration: i, prototypes: n as u32, survivor: None });
                break 'outer;
            }
            active = select_survivors(&active, &round_min, active.len().div_ceil(2));
        }
        let survivor = (active.len() == 1).then(|| active[0] as u32);
        trace.push(IterationTrace { iteration: i, prototypes: n as u32, survivor });
    }
    super::finish(samples, ctx.theta, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survivors_take_lowest_minima() {
        let active = vec![0, 1, 2, 3];
        let mins = vec![0.9, 0.8, 0.95, 0.85];
        assert_eq!(select_survivors(&active, &mins, 2), vec![1, 3]);
    }

    #[test]
    fn survivor_ties_go_to_lowest_index() {
        let active = vec![2, 5, 7];
        let mins = vec![0.8, 0.8, 0.8];
        assert_eq!(select_survivors(&active, &mins, 2), vec![2, 5]);
        assert_eq!(select_survivors(&active, &mins, 1), vec![2]);
    }
}
