//! The analysis pipeline behind the `vinfo` binary: configuration, the
//! report bundle and its on-disk layout.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    distribution, envelope, find_peaks, moving_average, peaks_with_target, summarize, vi_series_with, AnalysisError,
    Component, Distribution, MatchSummary, Peak, PeakSearch, PeakTarget, ViSeries, DEFAULT_BIN_WIDTH,
};
use crate::clustering::{NodeId, Profile};
use crate::formation::FormationSolver;
use crate::ingest::{EventKind, IngestError, SampleStream};
use crate::insight::{
    correlate_events_with, mine_transitions, player_profiles, transition_chart_data, CorrelationOptions,
    CorrelationReport, InsightError, PlayerProfile, SimplexTransition, TransitionChart, DEFAULT_TOP_N,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Insight(#[from] InsightError),
    #[error("writing {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Hz.
    pub sample_rate: f64,
    /// Moving-average window, seconds.
    pub ma_window: f64,
    /// Pivot gap used when no peak target is set, seconds.
    pub max_pivot_gap: f64,
    /// Peaks wanted from the envelope; `None` uses `max_pivot_gap` as is.
    pub peak_target: Option<usize>,
    /// Half-width around each tagged minute, seconds.
    pub event_window: f64,
    /// Extra half-width of the peak neighbourhoods when measuring coverage.
    pub baseline_pad: f64,
    pub profile: Profile,
    pub seed: u64,
    pub top_n: usize,
    /// Spacing of the sampled envelope in `peaks.json`, seconds.
    pub envelope_step: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sample_rate: 10.0,
            ma_window: 4.0,
            max_pivot_gap: 80.0,
            peak_target: Some(24),
            event_window: 30.0,
            baseline_pad: 0.0,
            profile: Profile::Soccer,
            seed: 0,
            top_n: DEFAULT_TOP_N,
            envelope_step: 1.0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let positive = [
            ("sample rate", self.sample_rate),
            ("moving-average window", self.ma_window),
            ("max pivot gap", self.max_pivot_gap),
            ("event window", self.event_window),
            ("envelope step", self.envelope_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(PipelineError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.baseline_pad >= 0.0) {
            return Err(PipelineError::Config(format!("baseline pad must be non-negative, got {}", self.baseline_pad)));
        }
        if self.peak_target == Some(0) {
            return Err(PipelineError::Config("peak target must be positive".into()));
        }
        Ok(())
    }
}

/// Envelope, pivots and peaks as written to `peaks.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub max_pivot_gap: f64,
    pub target: Option<usize>,
    pub reached: bool,
    pub pivots: Vec<(f64, f64)>,
    pub envelope: Vec<(f64, f64)>,
    pub peaks: Vec<Peak>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub config: RunConfig,
    pub summary: MatchSummary,
    /// Distribution of the raw total VI rate.
    pub distribution: Distribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub top: Vec<SimplexTransition>,
    pub chart: TransitionChart,
}

/// Everything `analyze` produces, before it is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub series: ViSeries,
    pub smoothed: Vec<f64>,
    pub summary: SummaryReport,
    pub peaks: PeakReport,
    pub correlation: CorrelationReport,
    pub transitions: TransitionReport,
    pub players: Vec<PlayerProfile>,
}

fn search_peaks(signal: &crate::analysis::Signal, config: &RunConfig, span: f64) -> Result<PeakSearch, AnalysisError> {
    let Some(target) = config.peak_target else {
        let env = envelope(signal, config.max_pivot_gap)?;
        let peaks = find_peaks(&env);
        return Ok(PeakSearch { envelope: env, peaks, max_pivot_gap: config.max_pivot_gap, reached: true });
    };
    let hi = span.max(2.0 * config.max_pivot_gap);
    match peaks_with_target(signal, PeakTarget::around(target), (hi * 1e-6, hi)) {
        Ok(found) => Ok(found),
        Err(AnalysisError::PeakTargetUnreachable { closest, search, .. }) => {
            log::warn!("peak target {target} not reachable; using {closest} peaks");
            Ok(*search)
        }
        Err(e) => Err(e),
    }
}

/// Runs the full pipeline over a sample stream.
pub fn analyze(stream: &SampleStream, config: &RunConfig) -> Result<Bundle, PipelineError> {
    config.validate()?;
    let solver = FormationSolver::new();
    let series = vi_series_with(stream, &solver)?;
    log::info!("{} transitions, {} formation pairs solved", series.len(), solver.cached_pairs());
    let total = series.signal(Component::Total);
    let smooth = moving_average(&total, config.ma_window)?;

    let summary = SummaryReport {
        config: config.clone(),
        summary: summarize(stream, &series),
        distribution: distribution(&total, DEFAULT_BIN_WIDTH)?,
    };

    let span = stream.span();
    let found = search_peaks(&smooth, config, span)?;
    let (t0, t1) = (stream.samples[0].t, stream.samples[stream.len() - 1].t);
    let peaks = PeakReport {
        max_pivot_gap: found.max_pivot_gap,
        target: config.peak_target,
        reached: found.reached,
        pivots: found.envelope.pivots.clone(),
        envelope: found.envelope.sample(t0, t1, config.envelope_step),
        peaks: found.peaks.clone(),
    };

    let opts = CorrelationOptions {
        window: config.event_window,
        baseline_pad: config.baseline_pad,
        span: Some((t0, t1)),
    };
    let correlation = correlate_events_with(&found.peaks, &stream.events, EventKind::Corner, opts)?;

    let mined = mine_transitions(stream, &series)?;
    let top: Vec<SimplexTransition> = mined.into_iter().take(config.top_n).collect();
    let chart = transition_chart_data(&top, span.max(f64::MIN_POSITIVE))?;
    let players = player_profiles(stream, &series, config.top_n)?;

    Ok(Bundle {
        smoothed: smooth.v,
        series,
        summary,
        peaks,
        correlation,
        transitions: TransitionReport { top, chart },
        players,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, PipelineError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| PipelineError::Write { path: path.display().to_string(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T, pretty: bool) -> Result<(), PipelineError> {
    let mut w = create(path)?;
    if pretty {
        serde_json::to_writer_pretty(&mut w, value)?;
    } else {
        serde_json::to_writer(&mut w, value)?;
    }
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|source| PipelineError::Write { path: path.display().to_string(), source })
}

impl Bundle {
    pub const SERIES: &'static str = "series.csv";
    pub const SUMMARY: &'static str = "summary.json";
    pub const PEAKS: &'static str = "peaks.json";
    pub const CORRELATION: &'static str = "correlation.json";
    pub const TRANSITIONS: &'static str = "transitions.json";
    pub const PLAYERS: &'static str = "players";

    pub fn write_series<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "total_bps", "vif_bps", "vic_bps", "home_bps", "visitor_bps", "ma_total_bps"])?;
        for (p, ma) in self.series.points.iter().zip(&self.smoothed) {
            out.write_record(
                [p.t, p.total, p.vif, p.vic, p.home, p.visitor, *ma].iter().map(|v| format!("{v:.6}")),
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes the bundle into `dir`, creating it when missing.
    pub fn write(&self, dir: &Path) -> Result<(), PipelineError> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| PipelineError::Write { path, source }
        };
        let players = dir.join(Self::PLAYERS);
        fs::create_dir_all(&players).map_err(io(&players))?;

        let series_path = dir.join(Self::SERIES);
        self.write_series(create(&series_path)?).map_err(|e| PipelineError::Write {
            path: series_path.display().to_string(),
            source: e.into(),
        })?;
        write_json(&dir.join(Self::SUMMARY), &self.summary, true)?;
        write_json(&dir.join(Self::PEAKS), &self.peaks, false)?;
        write_json(&dir.join(Self::CORRELATION), &self.correlation, true)?;
        write_json(&dir.join(Self::TRANSITIONS), &self.transitions, true)?;
        for p in &self.players {
            write_json(&players.join(format!("{}.json", p.node.0)), p, false)?;
        }
        Ok(())
    }

    pub fn player(&self, node: NodeId) -> Option<&PlayerProfile> {
        self.players.iter().find(|p| p.node == node)
    }

    /// Per-node totals, handy for quick checks.
    pub fn player_totals(&self) -> BTreeMap<NodeId, f64> {
        self.players.iter().map(|p| (p.node, p.total.0)).collect()
    }
}
