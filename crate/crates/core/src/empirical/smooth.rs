use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::DegreeDistribution;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Smoothing {
    #[default]
    None,
    /// Bins whose edges grow by `ratio`; each bin's mass is spread evenly
    /// over its degrees.
    LogBin { ratio: f64 },
    /// Replaces the tail above `cut_degree` by a least-squares power law
    /// fitted on log-log axes.
    TailPowerLaw { cut_degree: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum SmoothError {
    #[error("only {points} nonzero points above the cut degree, need 5")]
    InsufficientTail { points: usize },
    #[error("log-bin ratio must exceed 1, got {0}")]
    BadRatio(f64),
}

pub fn smooth_vdd(q: &DegreeDistribution, method: Smoothing) -> Result<DegreeDistribution, SmoothError> {
    match method {
        Smoothing::None => Ok(q.clone()),
        Smoothing::LogBin { ratio } => log_bin(q, ratio),
        Smoothing::TailPowerLaw { cut_degree } => tail_power_law(q, cut_degree),
    }
}

fn log_bin(q: &DegreeDistribution, ratio: f64) -> Result<DegreeDistribution, SmoothError> {
    if ratio.is_nan() || ratio <= 1.0 {
        return Err(SmoothError::BadRatio(ratio));
    }
    let lo = q.min_degree();
    let hi = q.max_degree();
    let mut probs = vec![0.0; q.probs().len()];
    let mut start = lo;
    while start <= hi {
        let end = ((start as f64 * ratio).ceil() as usize).max(start + 1).min(hi + 1);
        let mass: f64 = (start..end).map(|k| q.get(k)).sum();
        let share = mass / (end - start) as f64;
        for p in &mut probs[start - lo..end - lo] {
            *p = share;
        }
        start = end;
    }
    Ok(DegreeDistribution::new(lo, probs, q.truncation_mass()))
}

fn tail_power_law(q: &DegreeDistribution, cut: usize) -> Result<DegreeDistribution, SmoothError> {
    let points: Vec<(f64, f64)> = q
        .iter()
        .filter(|&(k, p)| k > cut && p > 0.0)
        .map(|(k, p)| ((k as f64).ln(), p.ln()))
        .collect();
    if points.len() < 5 {
        return Err(SmoothError::InsufficientTail { points: points.len() });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let lo = q.min_degree();
    let first_tail = (cut + 1).max(lo);
    let tail_mass: f64 = q.iter().filter(|&(k, _)| k > cut).map(|(_, p)| p).sum();
    let mut probs = q.probs().to_vec();
    let fitted = |k: usize| (intercept + slope * (k as f64).ln()).exp();
    let fitted_mass: f64 = (first_tail..=q.max_degree()).map(fitted).sum();
    let scale = tail_mass / fitted_mass;
    for k in first_tail..=q.max_degree() {
        probs[k - lo] = fitted(k) * scale;
    }
    Ok(DegreeDistribution::new(lo, probs, q.truncation_mass()))
}
