//! Exact samplers for hypercube shells.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::point::Point;
use crate::shell::ShellRegion;

/// Draws `count` i.i.d. points uniformly distributed on `shell`.
///
/// Two exact schemes are available and the one with the higher acceptance
/// rate is used:
///
/// - rejection from the outer cube, accepting with probability `1 - (lb/ub)^d`;
/// - slab sampling: pick one of the `2d` equal-volume slabs
///   `{±x_a ∈ (lb, ub]}`, fill the other coordinates uniformly in `[-ub, ub]`
///   and accept only when `a` carries the largest offset, so every shell point
///   is reachable from exactly one slab. Acceptance is at least `1/d` and
///   tends to one as `lb → ub`.
pub fn sample_uniform_shell<R: Rng + ?Sized>(shell: &ShellRegion, count: usize, rng: &mut R) -> Vec<Point> {
    let d = shell.dim();
    let (lb, ub) = (shell.lb(), shell.ub());
    let ratio = lb / ub;
    let cube_rate = 1.0 - ratio.powi(d as i32);
    let slab_rate = if lb > 0.0 { cube_rate / (d as f64 * (1.0 - ratio)) } else { 0.0 };
    let use_slabs = slab_rate > cube_rate;
    let center = shell.center();

    let mut out = Vec::with_capacity(count);
    let mut offset = vec![0.0; d];
    while out.len() < count {
        let accepted = if use_slabs {
            let axis = rng.random_range(0..d);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            // 1 - U lies in (0, 1], so t lies in (lb, ub].
            let t = lb + (ub - lb) * (1.0 - rng.random::<f64>());
            let mut ok = true;
            for (j, o) in offset.iter_mut().enumerate() {
                if j == axis {
                    *o = sign * t;
                } else {
                    *o = rng.random_range(-ub..=ub);
                    ok &= o.abs() < t;
                }
            }
            ok
        } else {
            for o in offset.iter_mut() {
                *o = rng.random_range(-ub..=ub);
            }
            true
        };
        if !accepted {
            continue;
        }
        let x: Vec<f64> = center.iter().zip(&offset).map(|(c, o)| c + o).collect();
        // The membership test also guards against round-off at the faces.
        if shell.contains_coords(&x) {
            out.push(Point::from_vec_unchecked(x));
        }
    }
    out
}

/// Draws `count` points from `N(proto, σ²I)` conditioned on `shell` by rejection.
///
/// After `max_rejection_factor * count` attempts the remaining slots are
/// filled with uniform shell samples, so the call always terminates.
pub fn sample_gaussian_shell<R: Rng + ?Sized>(
    proto: &Point,
    sigma: f64,
    shell: &ShellRegion,
    count: usize,
    max_rejection_factor: u32,
    rng: &mut R,
) -> Vec<Point> {
    let cap = count.saturating_mul(max_rejection_factor as usize);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < cap {
        attempts += 1;
        let x: Vec<f64> = proto
            .iter()
            .map(|&c| c + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        if x.iter().all(|v| v.is_finite()) && shell.contains_coords(&x) {
            out.push(Point::from_vec_unchecked(x));
        }
    }
    if out.len() < count {
        log::debug!(
            "gaussian rejection cap hit after {attempts} attempts; {} uniform fallbacks",
            count - out.len()
        );
        let rest = count - out.len();
        out.extend(sample_uniform_shell(shell, rest, rng));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn shell(d: usize, lb: f64, ub: f64) -> ShellRegion {
        ShellRegion::new(Point::zeros(d), lb, ub).unwrap()
    }

    #[test]
    fn one_dim_cube_mean_abs_is_half() {
        let mut rng = stream(1, &[]);
        let xs = sample_uniform_shell(&shell(1, 0.0, 1.0), 10_000, &mut rng);
        let m = xs.iter().map(|x| x[0].abs()).sum::<f64>() / xs.len() as f64;
        assert!((m - 0.5).abs() < 0.02, "{m}");
    }

    #[test]
    fn thin_shell_membership() {
        let mut rng = stream(2, &[]);
        let s = shell(5, 0.9, 1.0);
        for x in sample_uniform_shell(&s, 2000, &mut rng) {
            let r = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(r > 0.9 && r <= 1.0);
        }
    }

    #[test]
    fn quadrant_symmetry_in_two_dims() {
        let mut rng = stream(3, &[]);
        let xs = sample_uniform_shell(&shell(2, 0.0, 1.0), 10_000, &mut rng);
        let frac = xs.iter().filter(|x| x[0] > 0.0 && x[1] > 0.0).count() as f64 / xs.len() as f64;
        assert!((frac - 0.25).abs() < 0.02, "{frac}");
    }

    #[test]
    fn slab_sampler_is_uniform_over_the_shell() {
        // d = 2, lb = 0.8, ub = 1 uses slabs. The max-offset radius r of a
        // uniform shell point has density ∝ r on (0.8, 1], so
        // P(r ≤ 0.9) = (0.81 - 0.64) / (1 - 0.64).
        let mut rng = stream(4, &[]);
        let xs = sample_uniform_shell(&shell(2, 0.8, 1.0), 40_000, &mut rng);
        let inner = xs
            .iter()
            .filter(|x| x.iter().map(|v| v.abs()).fold(0.0, f64::max) <= 0.9)
            .count() as f64
            / xs.len() as f64;
        let expected = (0.81 - 0.64) / (1.0 - 0.64);
        assert!((inner - expected).abs() < 0.01, "{inner} vs {expected}");
        // Corners are as likely as edge midpoints: both coordinates beyond 0.8.
        let corner = xs.iter().filter(|x| x[0].abs() > 0.8 && x[1].abs() > 0.8).count() as f64 / xs.len() as f64;
        let corner_expected = 4.0 * 0.2 * 0.2 / (4.0 - 4.0 * 0.64);
        assert!((corner - corner_expected).abs() < 0.01, "{corner} vs {corner_expected}");
    }

    #[test]
    fn off_center_shell() {
        let center = Point::new(vec![3.0, -2.0, 10.0]).unwrap();
        let s = ShellRegion::new(center, 0.5, 0.6).unwrap();
        let mut rng = stream(5, &[]);
        for x in sample_uniform_shell(&s, 500, &mut rng) {
            assert!(s.contains(&x).unwrap());
        }
    }

    #[test]
    fn gaussian_mean_near_prototype() {
        let mut rng = stream(6, &[]);
        let proto = Point::new(vec![0.5]).unwrap();
        let xs = sample_gaussian_shell(&proto, 0.1, &shell(1, 0.0, 1.0), 10_000, 100, &mut rng);
        let m = xs.iter().map(|x| x[0]).sum::<f64>() / xs.len() as f64;
        assert!((m - 0.5).abs() < 0.01, "{m}");
    }

    #[test]
    fn tiny_sigma_stays_at_prototype() {
        let mut rng = stream(7, &[]);
        let proto = Point::new(vec![0.3, -0.2]).unwrap();
        let sigma = 1e-9;
        for x in sample_gaussian_shell(&proto, sigma, &shell(2, 0.0, 1.0), 1000, 100, &mut rng) {
            assert!(x.linf_distance(&proto).unwrap() < 6.0 * sigma);
        }
    }

    #[test]
    fn gaussian_falls_back_when_rejection_fails() {
        let mut rng = stream(8, &[]);
        // A prototype far outside a thin shell: every Gaussian draw is rejected.
        let proto = Point::new(vec![50.0, 50.0]).unwrap();
        let s = shell(2, 0.9, 1.0);
        let xs = sample_gaussian_shell(&proto, 1e-3, &s, 100, 3, &mut rng);
        assert_eq!(xs.len(), 100);
        assert!(xs.iter().all(|x| s.contains(&x).unwrap()));
    }
}
