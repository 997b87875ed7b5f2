//! Distributions, trends and per-match summary statistics.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::clustering::Formation;
use crate::ingest::SampleStream;

use super::{AnalysisError, Component, Signal, ViSeries};

pub const DEFAULT_BIN_WIDTH: f64 = 0.05;

/// Histogram density over `[0, max]` plus the empirical CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub bin_width: f64,
    /// Density per bin; `Σ pdf · bin_width = 1`.
    pub pdf: Vec<f64>,
    /// Empirical CDF at each bin's upper edge.
    pub cdf: Vec<(f64, f64)>,
    #[serde(skip)]
    sorted: Vec<f64>,
}

impl Distribution {
    /// Empirical CDF: fraction of values `≤ x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Probability mass of bin `i`.
    pub fn mass(&self, i: usize) -> f64 {
        self.pdf[i] * self.bin_width
    }
}

pub fn distribution(signal: &Signal, bin_width: f64) -> Result<Distribution, AnalysisError> {
    if signal.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if !(bin_width > 0.0) {
        return Err(AnalysisError::NonPositiveWindow(bin_width));
    }
    let mut sorted = signal.v.clone();
    sorted.sort_by(f64::total_cmp);
    let max = sorted.last().copied().unwrap_or(0.0).max(0.0);
    let bins = ((max / bin_width).ceil() as usize).max(1);
    let mut counts = vec![0usize; bins];
    for &v in &signal.v {
        let b = ((v.max(0.0) / bin_width).floor() as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = signal.len() as f64;
    let pdf = counts.iter().map(|&c| c as f64 / (n * bin_width)).collect();
    let mut running = 0usize;
    let cdf = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            running += c;
            ((i + 1) as f64 * bin_width, running as f64 / n)
        })
        .collect();
    Ok(Distribution { bin_width, pdf, cdf, sorted })
}

/// Ordinary least-squares slope of value against time.
pub fn trend(signal: &Signal) -> Result<f64, AnalysisError> {
    if signal.len() < 2 {
        return Err(AnalysisError::TooFewPoints(signal.len()));
    }
    let n = signal.len() as f64;
    let mt = signal.t.iter().sum::<f64>() / n;
    let mv = signal.v.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&t, &v) in signal.t.iter().zip(&signal.v) {
        sxy += (t - mt) * (v - mv);
        sxx += (t - mt) * (t - mt);
    }
    if sxx == 0.0 {
        return Err(AnalysisError::DegenerateTime);
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub mean: f64,
    /// Population standard deviation.
    pub sigma: f64,
    /// `sigma / mean`; absent when the mean is zero.
    pub coefficient_of_variation: Option<f64>,
    /// Least-squares slope in bps per second; absent for < 2 points.
    pub regression_slope: Option<f64>,
}

impl ComponentStats {
    pub fn of(signal: &Signal) -> Self {
        let n = signal.len();
        if n == 0 {
            return ComponentStats { mean: 0.0, sigma: 0.0, coefficient_of_variation: None, regression_slope: None };
        }
        let mean = signal.v.iter().sum::<f64>() / n as f64;
        let var = signal.v.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sigma = var.sqrt();
        ComponentStats {
            mean,
            sigma,
            coefficient_of_variation: (mean != 0.0).then(|| sigma / mean),
            regression_slope: trend(signal).ok(),
        }
    }
}

/// Match-level statistics over the raw (unsmoothed) VI rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub samples: usize,
    pub transitions: usize,
    pub roster_gaps: usize,
    pub total: ComponentStats,
    pub home: ComponentStats,
    pub visitor: ComponentStats,
    pub compositional: ComponentStats,
    pub formation: ComponentStats,
    /// Fraction of transitions with zero VI.
    pub null_transition_fraction: f64,
    pub unique_clusterings: usize,
    /// Distinct formations among samples carrying the largest roster.
    pub unique_full_formations: usize,
    /// Samples whose clustering appeared earlier, excluding immediate
    /// repeats, over samples that differ from their predecessor.
    pub reappearance_rate: f64,
    pub reappearances: usize,
    pub reappearance_candidates: usize,
    /// `mean(VI_f) / mean(VI_c)`; absent when the compositional mean is zero.
    pub formation_to_compositional_ratio: Option<f64>,
}

impl MatchSummary {
    pub fn component(&self, c: Component) -> &ComponentStats {
        match c {
            Component::Total => &self.total,
            Component::Home => &self.home,
            Component::Visitor => &self.visitor,
            Component::Compositional => &self.compositional,
            Component::Formation => &self.formation,
        }
    }
}

pub fn summarize(stream: &SampleStream, series: &ViSeries) -> MatchSummary {
    let stats = |c| ComponentStats::of(&series.signal(c));
    let nulls = series.points.iter().filter(|p| p.total == 0.0).count();
    let keys: Vec<_> = stream.samples.iter().map(|s| s.clustering.canonical_key()).collect();

    let mut seen = HashSet::new();
    let (mut reappearances, mut candidates) = (0usize, 0usize);
    for (i, k) in keys.iter().enumerate() {
        if i > 0 && keys[i - 1] != *k {
            candidates += 1;
            if seen.contains(k) {
                reappearances += 1;
            }
        }
        seen.insert(k.clone());
    }
    let full = stream.samples.iter().map(|s| s.clustering.node_count()).max().unwrap_or(0);
    let formations: HashSet<Formation> = stream
        .samples
        .iter()
        .filter(|s| s.clustering.node_count() == full)
        .map(|s| s.clustering.formation())
        .collect();

    let formation = stats(Component::Formation);
    let compositional = stats(Component::Compositional);
    MatchSummary {
        samples: stream.len(),
        transitions: series.len(),
        roster_gaps: series.gaps.len(),
        total: stats(Component::Total),
        home: stats(Component::Home),
        visitor: stats(Component::Visitor),
        null_transition_fraction: if series.is_empty() { 0.0 } else { nulls as f64 / series.len() as f64 },
        unique_clusterings: seen.len(),
        unique_full_formations: formations.len(),
        reappearance_rate: if candidates > 0 { reappearances as f64 / candidates as f64 } else { 0.0 },
        reappearances,
        reappearance_candidates: candidates,
        formation_to_compositional_ratio: (compositional.mean > 0.0).then(|| formation.mean / compositional.mean),
        formation,
        compositional,
    }
}
