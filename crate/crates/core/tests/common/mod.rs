//! Independent oracles for the synthetic piecewise-linear benchmark.
#![allow(dead_code)]

/// Per-coordinate piece of the benchmark black box, written out from its definition.
pub fn phi(t: f64) -> f64 {
    if t > 2.0 {
        4.0 - t
    } else if t < -2.0 {
        -4.0 - t
    } else {
        t
    }
}

pub fn fidelity(x: &[f64], slope: f64) -> f64 {
    let g: f64 = x.iter().copied().map(phi).sum();
    let e: f64 = slope * x.iter().sum::<f64>();
    1.0 - (g - e).abs()
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| (lo + i as f64 * step).min(hi)).collect();
    v.extend([-2.0, 2.0].into_iter().filter(|&k| k > lo && k < hi));
    v
}

/// Minimum fidelity over `[c_i - w, c_i + w]` per coordinate.
///
/// The residual `Σ (φ(x_i) - slope·x_i)` is separable, so its range over the cube
/// is the sum of per-coordinate ranges, each taken on a grid of the given step
/// that also contains the kinks of `φ`.
pub fn cube_min_fidelity(center: &[f64], w: f64, slope: f64, step: f64) -> f64 {
    let (mut hi, mut lo) = (0.0, 0.0);
    for &c in center {
        let vals: Vec<f64> = grid(c - w, c + w, step).into_iter().map(|t| phi(t) - slope * t).collect();
        hi += vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lo += vals.iter().copied().fold(f64::INFINITY, f64::min);
    }
    1.0 - hi.max(-lo)
}

/// Brute-force minimum over every point of a full 2-d grid, for cross-checking.
pub fn cube_min_fidelity_2d_brute(center: [f64; 2], w: f64, slope: f64, step: f64) -> f64 {
    let xs = grid(center[0] - w, center[0] + w, step);
    let ys = grid(center[1] - w, center[1] + w, step);
    let mut m = f64::INFINITY;
    for &x in &xs {
        for &y in &ys {
            m = m.min(fidelity(&[x, y], slope));
        }
    }
    m
}

/// Minimum fidelity over the 2-d shell `lb < |x - c|_∞ <= ub` on a full grid.
pub fn shell_min_fidelity_2d(center: [f64; 2], lb: f64, ub: f64, slope: f64, step: f64) -> f64 {
    let xs = grid(center[0] - ub, center[0] + ub, step);
    let ys = grid(center[1] - ub, center[1] + ub, step);
    let mut m = f64::INFINITY;
    for &x in &xs {
        for &y in &ys {
            let r = (x - center[0]).abs().max((y - center[1]).abs());
            if r > lb && r <= ub {
                m = m.min(fidelity(&[x, y], slope));
            }
        }
    }
    m
}

/// Fraction of a 2-d shell around the origin where `|x + y| > 1`, by midpoint rule.
pub fn violating_fraction_2d(lb: f64, ub: f64, cells: usize) -> f64 {
    let h = 2.0 * ub / cells as f64;
    let (mut inside, mut bad) = (0u64, 0u64);
    for i in 0..cells {
        for j in 0..cells {
            let x = -ub + (i as f64 + 0.5) * h;
            let y = -ub + (j as f64 + 0.5) * h;
            if x.abs().max(y.abs()) > lb {
                inside += 1;
                if (x + y).abs() > 1.0 {
                    bad += 1;
                }
            }
        }
    }
    bad as f64 / inside as f64
}

/// `P(hit at least once in n independent tries)`.
pub fn hit_probability(p: f64, n: u64) -> f64 {
    1.0 - (1.0 - p).powf(n as f64)
}

/// Standard normal CDF by composite Simpson integration of the density.
pub fn normal_cdf(z: f64) -> f64 {
    if z.abs() > 12.0 {
        return if z > 0.0 { 1.0 } else { 0.0 };
    }
    let n = 4000;
    let h = z / n as f64;
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(0.0) + pdf(z);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(i as f64 * h);
    }
    0.5 + s * h / 3.0
}

/// Gaussian KDE CDF with Scott bandwidth, written independently of the library.
pub fn kde_cdf(samples: &[f64], v: f64) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let h = if sd > 0.0 { sd * n.powf(-0.2) } else { 1e-6 };
    samples.iter().map(|s| normal_cdf((v - s) / h)).sum::<f64>() / n
}
