//! Peak envelopes: cubic Hermite splines through selected local maxima.
//!
//! Pivots are chosen greedily by descending value; a candidate is kept when
//! it lies at least `d(v) = max_pivot_gap · (1 − F(v))` away from every
//! pivot already kept, where `F` is the empirical CDF of the signal's
//! positive values. Higher values may therefore sit closer together.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Signal};

/// Runs `[a, b]` of equal values strictly above both neighbouring values.
/// A run spanning the whole slice counts only when `whole_counts` is set.
fn plateau_maxima(v: &[f64], whole_counts: bool) -> Vec<(usize, usize)> {
    let n = v.len();
    let mut out = Vec::new();
    let mut a = 0;
    while a < n {
        let mut b = a;
        while b + 1 < n && v[b + 1] == v[a] {
            b += 1;
        }
        let left_ok = a == 0 || v[a - 1] < v[a];
        let right_ok = b + 1 == n || v[b + 1] < v[a];
        let whole = a == 0 && b + 1 == n;
        if left_ok && right_ok && (!whole || whole_counts) {
            out.push((a, b));
        }
        a = b + 1;
    }
    out
}

/// Piecewise cubic Hermite curve through a set of pivots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSpline {
    pub pivots: Vec<(f64, f64)>,
    pub tangents: Vec<f64>,
    /// Value used when there are no pivots (a flat signal's level).
    pub floor: f64,
    pub max_pivot_gap: f64,
}

/// Monotone (Fritsch–Carlson) tangents with zero slope at both ends.
fn monotone_tangents(p: &[(f64, f64)]) -> Vec<f64> {
    let n = p.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    let h: Vec<f64> = p.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let delta: Vec<f64> = p.windows(2).zip(&h).map(|(w, h)| (w[1].1 - w[0].1) / h).collect();
    for i in 1..n - 1 {
        let (a, b) = (delta[i - 1], delta[i]);
        if a == 0.0 || b == 0.0 || a.signum() != b.signum() {
            continue;
        }
        let w1 = 2.0 * h[i] + h[i - 1];
        let w2 = h[i] + 2.0 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / a + w2 / b);
    }
    d
}

impl EnvelopeSpline {
    pub fn from_pivots(pivots: Vec<(f64, f64)>, floor: f64, max_pivot_gap: f64) -> Self {
        let tangents = monotone_tangents(&pivots);
        EnvelopeSpline { pivots, tangents, floor, max_pivot_gap }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let p = &self.pivots;
        match p.len() {
            0 => return self.floor,
            _ if t <= p[0].0 => return p[0].1,
            _ if t >= p[p.len() - 1].0 => return p[p.len() - 1].1,
            _ => {}
        }
        let k = p.partition_point(|q| q.0 <= t) - 1;
        let (t0, y0) = p[k];
        let (t1, y1) = p[k + 1];
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y0 + h10 * h * self.tangents[k] + h01 * y1 + h11 * h * self.tangents[k + 1]
    }

    /// Derivative of the spline at `t` (zero outside the pivot range).
    pub fn derivative(&self, t: f64) -> f64 {
        let p = &self.pivots;
        if p.len() < 2 || t <= p[0].0 || t >= p[p.len() - 1].0 {
            return 0.0;
        }
        let k = p.partition_point(|q| q.0 <= t) - 1;
        let (t0, y0) = p[k];
        let (t1, y1) = p[k + 1];
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        (d00 * y0 + d01 * y1) / h + d10 * self.tangents[k] + d11 * self.tangents[k + 1]
    }

    /// Evaluates the spline every `step` seconds over `[t0, t1]`.
    pub fn sample(&self, t0: f64, t1: f64, step: f64) -> Vec<(f64, f64)> {
        if !(step > 0.0) || t1 < t0 {
            return Vec::new();
        }
        let n = ((t1 - t0) / step).floor() as usize;
        (0..=n).map(|i| {
            let t = t0 + i as f64 * step;
            (t, self.eval(t))
        })
        .collect()
    }
}

/// Selects pivots from `signal` and fits the envelope.
pub fn envelope(signal: &Signal, max_pivot_gap: f64) -> Result<EnvelopeSpline, AnalysisError> {
    if signal.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let floor = signal.v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut positive: Vec<f64> = signal.v.iter().copied().filter(|&v| v > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    let cdf = |v: f64| -> f64 {
        if positive.is_empty() {
            return 1.0;
        }
        positive.partition_point(|&x| x <= v) as f64 / positive.len() as f64
    };

    let mut candidates: Vec<(f64, f64)> = plateau_maxima(&signal.v, false)
        .into_iter()
        .map(|(a, b)| (0.5 * (signal.t[a] + signal.t[b]), signal.v[a]))
        .collect();
    candidates.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.total_cmp(&y.0)));

    // accepted pivots keyed by time bits (times are finite, non-negative in practice)
    let mut kept: BTreeMap<OrdF64, f64> = BTreeMap::new();
    for (t, v) in candidates {
        let sep = max_pivot_gap * (1.0 - cdf(v));
        let key = OrdF64(t);
        let before = kept.range(..key).next_back().map(|(k, _)| k.0);
        let after = kept.range(key..).next().map(|(k, _)| k.0);
        let clear = before.is_none_or(|b| t - b >= sep) && after.is_none_or(|a| a - t >= sep);
        if clear && (sep > 0.0 || !kept.contains_key(&key)) {
            kept.insert(key, v);
        }
    }
    let pivots = kept.into_iter().map(|(k, v)| (k.0, v)).collect();
    Ok(EnvelopeSpline::from_pivots(pivots, floor, max_pivot_gap))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A stationary maximum of an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
}

/// Stationary maxima of the envelope. With monotone tangents each piece is
/// monotone, so maxima sit exactly at pivots that exceed their neighbours.
pub fn find_peaks(env: &EnvelopeSpline) -> Vec<Peak> {
    let values: Vec<f64> = env.pivots.iter().map(|p| p.1).collect();
    plateau_maxima(&values, true)
        .into_iter()
        .map(|(a, b)| Peak {
            t: 0.5 * (env.pivots[a].0 + env.pivots[b].0),
            value: values[a],
        })
        .collect()
}

/// Acceptable peak-count band for a target count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakTarget {
    pub target: usize,
    pub min: usize,
    pub max: usize,
}

impl PeakTarget {
    /// `target` with the band `[target − 1, target + 2]` (23..=26 for 24).
    pub fn around(target: usize) -> Self {
        PeakTarget { target, min: target.saturating_sub(1), max: target + 2 }
    }

    fn contains(&self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSearch {
    pub envelope: EnvelopeSpline,
    pub peaks: Vec<Peak>,
    pub max_pivot_gap: f64,
    pub reached: bool,
}

/// Bisects the pivot gap (log scale, within `gap_bounds`) until the peak
/// count lands in the target band. Fails with the closest attempt when the
/// band cannot be reached.
pub fn peaks_with_target(
    signal: &Signal,
    target: PeakTarget,
    gap_bounds: (f64, f64),
) -> Result<PeakSearch, AnalysisError> {
    let (mut lo, mut hi) = gap_bounds;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(AnalysisError::BadGapBounds(lo, hi));
    }
    let attempt = |gap: f64| -> Result<PeakSearch, AnalysisError> {
        let env = envelope(signal, gap)?;
        let peaks = find_peaks(&env);
        Ok(PeakSearch { envelope: env, peaks, max_pivot_gap: gap, reached: false })
    };
    let distance = |n: usize| -> usize {
        if n < target.min {
            target.min - n
        } else {
            n.saturating_sub(target.max)
        }
    };
    let mut best: Option<PeakSearch> = None;
    for _ in 0..64 {
        let mid = (lo * hi).sqrt();
        let mut run = attempt(mid)?;
        let n = run.peaks.len();
        if target.contains(n) {
            run.reached = true;
            return Ok(run);
        }
        if best.as_ref().is_none_or(|b| distance(n) < distance(b.peaks.len())) {
            best = Some(run);
        }
        if n > target.max {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-9 {
            break;
        }
    }
    let best = best.expect("at least one attempt");
    Err(AnalysisError::PeakTargetUnreachable {
        target: target.target,
        closest: best.peaks.len(),
        search: Box::new(best),
    })
}
