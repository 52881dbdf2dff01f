//! Query savings through sequential covering of a dataset with certified explanations.

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use super::stats::Summary;
use crate::blackbox::BlackBox;
use crate::driver::{ecertify, DriverConfig};
use crate::error::{Error, Result};
use crate::explanation::Explanation;
use crate::metric::{Fidelity, QualityMetric};
use crate::point::Point;
use crate::rng;

/// Produces a local explanation for a sample.
pub trait Explainer: Sync {
    fn explain(&self, x: &Point) -> Result<Explanation>;
}

impl<F> Explainer for F
where
    F: Fn(&Point) -> Result<Explanation> + Sync,
{
    fn explain(&self, x: &Point) -> Result<Explanation> {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSpec {
    pub dataset: Vec<Point>,
    pub theta: f64,
    /// Fraction of features, ranked by absolute coefficient, that must fall inside a cube.
    pub top_fraction: f64,
    /// Queries one explanation is assumed to cost.
    pub nominal_cost: f64,
    pub seed: u64,
}

impl CoverageSpec {
    pub fn new(dataset: Vec<Point>, theta: f64) -> Self {
        Self { dataset, theta, top_fraction: 0.6, nominal_cost: 5000.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.is_empty() {
            return Err(Error::InvalidArgument("dataset is empty".into()));
        }
        let d = self.dataset[0].dim();
        if let Some(p) = self.dataset.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!("top fraction {} not in (0, 1]", self.top_fraction)));
        }
        if !(self.nominal_cost > 0.0) {
            return Err(Error::InvalidArgument("nominal cost must be positive".into()));
        }
        Ok(())
    }
}

/// A certified cube centred on a dataset sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRegion {
    pub center_index: usize,
    pub w: f64,
    pub queries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub dataset_size: usize,
    /// Samples whose own explanation reaches θ at the sample.
    pub effective_size: usize,
    pub excluded: Vec<usize>,
    pub explanations: usize,
    pub covered: usize,
    pub coverage_fraction: f64,
    pub certification_queries: u64,
    pub savings: f64,
    pub regions: Vec<CoverRegion>,
    /// Region index assigned to each sample, `None` for excluded samples.
    pub assignment: Vec<Option<usize>>,
    /// Fidelity of each covered sample under its assigned explanation.
    pub covered_fidelity: Option<Summary>,
}

/// Indices of the `ceil(fraction · d)` largest absolute coefficients; ties keep index order.
pub fn top_features(alpha: &[f64], fraction: f64) -> Vec<usize> {
    let k = ((fraction * alpha.len() as f64).ceil() as usize).clamp(1, alpha.len());
    let mut idx: Vec<usize> = (0..alpha.len()).collect();
    idx.sort_by(|&a, &b| alpha[b].abs().total_cmp(&alpha[a].abs()).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Whether the listed features of `x` lie within `w` of `center`.
pub fn covers(center: &Point, w: f64, x: &Point, features: &[usize]) -> bool {
    w >= 0.0 && features.iter().all(|&j| (x[j] - center[j]).abs() <= w)
}

/// Greedy sequential covering: certify a random uncovered sample, drop what its cube covers, repeat.
pub fn coverage_experiment(
    spec: &CoverageSpec,
    blackbox: &BlackBox,
    explainer: &dyn Explainer,
    cfg: &DriverConfig,
) -> Result<CoverageReport> {
    spec.validate()?;
    let n = spec.dataset.len();

    let mut explanations: Vec<Option<(Explanation, Vec<usize>)>> = Vec::with_capacity(n);
    let mut excluded = Vec::new();
    for (i, x) in spec.dataset.iter().enumerate() {
        let entry = explainer.explain(x).and_then(|e| {
            let alpha = e
                .alpha()
                .ok_or_else(|| Error::InvalidArgument("coverage needs linear explanations".into()))?;
            let features = top_features(alpha, spec.top_fraction);
            let f = Fidelity::new(QualityMetric::AbsFidelity, e.clone(), blackbox.clone())?.at(x)?;
            Ok((f, e, features))
        });
        match entry {
            Ok((f, e, features)) if f >= spec.theta => explanations.push(Some((e, features))),
            Ok((f, ..)) => {
                log::debug!("sample {i} excluded: fidelity {f} below θ");
                excluded.push(i);
                explanations.push(None);
            }
            Err(err) => {
                log::warn!("sample {i} excluded: {err}");
                excluded.push(i);
                explanations.push(None);
            }
        }
    }

    let effective: Vec<usize> = (0..n).filter(|&i| explanations[i].is_some()).collect();
    let mut uncovered = effective.clone();
    let mut regions = Vec::new();
    let mut pick_rng = rng::stream(spec.seed, &[0]);
    while let Some(&center_index) = uncovered.choose(&mut pick_rng) {
        let (e, _) = explanations[center_index].as_ref().expect("effective sample");
        let x0 = &spec.dataset[center_index];
        let mut run_cfg = cfg.clone();
        run_cfg.theta = spec.theta;
        run_cfg.strategy.seed = rng::derive_seed(spec.seed, &[1, regions.len() as u64]);
        let report = ecertify(x0, blackbox, e, &QualityMetric::AbsFidelity, &run_cfg)?;
        let w = report.w;
        uncovered.retain(|&i| {
            let features = &explanations[i].as_ref().expect("effective sample").1;
            i != center_index && !covers(x0, w, &spec.dataset[i], features)
        });
        regions.push(CoverRegion { center_index, w, queries: report.total_queries });
    }

    let mut assign_rng = rng::stream(spec.seed, &[2]);
    let mut assignment = vec![None; n];
    let mut fidelities = Vec::new();
    for &i in &effective {
        let features = &explanations[i].as_ref().expect("effective sample").1;
        let candidates: Vec<usize> = regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.center_index == i || covers(&spec.dataset[r.center_index], r.w, &spec.dataset[i], features))
            .map(|(k, _)| k)
            .collect();
        let Some(&k) = candidates.choose(&mut assign_rng) else {
            return Err(Error::Internal(format!("sample {i} left uncovered")));
        };
        assignment[i] = Some(k);
        let (e, _) = explanations[regions[k].center_index].as_ref().expect("effective sample");
        let g = blackbox.evaluate(&spec.dataset[i])?;
        fidelities.push(1.0 - (g - e.apply(&spec.dataset[i])?).abs());
    }

    let certification_queries: u64 = regions.iter().map(|r| r.queries).sum();
    let effective_size = effective.len();
    let savings = if effective_size == 0 {
        0.0
    } else {
        1.0 - (regions.len() as f64 * spec.nominal_cost + certification_queries as f64)
            / (effective_size as f64 * spec.nominal_cost)
    };
    Ok(CoverageReport {
        dataset_size: n,
        effective_size,
        excluded,
        explanations: regions.len(),
        covered: effective_size,
        coverage_fraction: effective_size as f64 / n as f64,
        certification_queries,
        savings,
        regions,
        assignment,
        covered_fidelity: Summary::of(&fidelities),
    })
}
