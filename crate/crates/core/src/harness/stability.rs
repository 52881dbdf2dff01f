//! Explanation stability: top-k overlap and rank correlation of coefficient magnitudes.

use serde::{Deserialize, Serialize};

use super::stats::Summary;
use crate::error::{check_dim, Error, Result};

/// Ranks of `|v|` in descending order, 1-based, ties share their average rank.
pub fn magnitude_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && v[idx[end]].abs() == v[idx[start]].abs() {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

fn top_k(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// `|top-k(a) ∩ top-k(b)| / k` under absolute-coefficient ranking.
pub fn top_k_intersection(a: &[f64], b: &[f64], k: usize) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    if k == 0 || k > a.len() {
        return Err(Error::InvalidArgument(format!("k = {k} must be in 1..={}", a.len())));
    }
    let ta = top_k(a, k);
    let tb = top_k(b, k);
    Ok(ta.iter().filter(|i| tb.contains(i)).count() as f64 / k as f64)
}

/// Spearman's ρ between the magnitude rankings, as Pearson correlation of average ranks.
///
/// Returns 1 when both rankings are constant and 0 when exactly one is.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    let ra = magnitude_ranks(a);
    let rb = magnitude_ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    Ok(match (va > 0.0, vb > 0.0) {
        (true, true) => (cov / (va * vb).sqrt()).clamp(-1.0, 1.0),
        (false, false) => 1.0,
        _ => 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub k: usize,
    pub top_k_intersection: Summary,
    pub spearman: Summary,
}

/// Compares `reference` against each of `others`.
pub fn stability_metrics(reference: &[f64], others: &[Vec<f64>], k: usize) -> Result<StabilityReport> {
    if others.is_empty() {
        return Err(Error::InvalidArgument("no explanations to compare".into()));
    }
    let mut inter = Vec::with_capacity(others.len());
    let mut rho = Vec::with_capacity(others.len());
    for o in others {
        inter.push(top_k_intersection(reference, o, k)?);
        rho.push(spearman(reference, o)?);
    }
    Ok(StabilityReport {
        k,
        top_k_intersection: Summary::of(&inter).expect("nonempty"),
        spearman: Summary::of(&rho).expect("nonempty"),
    })
}
