//! Time-series analytics over per-transition VI rates.

mod envelope;
mod series;
mod smoothing;
mod stats;

use thiserror::Error;

use crate::formation::FormationError;
use crate::metric::MetricError;

pub use envelope::{envelope, find_peaks, peaks_with_target, EnvelopeSpline, Peak, PeakSearch, PeakTarget};
pub use series::{vi_series, vi_series_with, Component, Signal, ViPoint, ViSeries};
pub use smoothing::moving_average;
pub use stats::{distribution, summarize, trend, ComponentStats, Distribution, MatchSummary, DEFAULT_BIN_WIDTH};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("series is empty")]
    Empty,
    #[error("window must be positive, got {0}")]
    NonPositiveWindow(f64),
    #[error("all points share the same time")]
    DegenerateTime,
    #[error("invalid pivot-gap bounds ({0}, {1})")]
    BadGapBounds(f64, f64),
    #[error("could not reach {target} peaks; closest was {closest}")]
    PeakTargetUnreachable {
        target: usize,
        closest: usize,
        search: Box<PeakSearch>,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Formation(#[from] FormationError),
}
