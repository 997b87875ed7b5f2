//! Per-transition VI rates for a sample stream.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{confusion, ConfusionMatrix, Team};
use crate::formation::FormationSolver;
use crate::ingest::SampleStream;
use crate::metric::{cell_contribution, vi_from_confusion, MetricError};

use super::AnalysisError;

/// One consecutive same-roster transition, rates in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViPoint {
    /// Time of the destination sample.
    pub t: f64,
    pub dt: f64,
    pub total: f64,
    pub vif: f64,
    pub vic: f64,
    pub home: f64,
    pub visitor: f64,
}

impl ViPoint {
    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::Total => self.total,
            Component::Formation => self.vif,
            Component::Compositional => self.vic,
            Component::Home => self.home,
            Component::Visitor => self.visitor,
        }
    }

    /// Total VI of the transition in bits.
    pub fn total_bits(&self) -> f64 {
        self.total * self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Total,
    Formation,
    Compositional,
    Home,
    Visitor,
}

impl Component {
    pub const ALL: [Component; 5] = [
        Component::Total,
        Component::Home,
        Component::Visitor,
        Component::Compositional,
        Component::Formation,
    ];
}

/// Time-ordered VI rates. Transitions across a roster change are skipped
/// and recorded in `gaps` by the time of the first sample after the change.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ViSeries {
    pub points: Vec<ViPoint>,
    pub gaps: Vec<f64>,
}

/// Plain `(t, value)` signal used by the downstream analytics.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Signal {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
}

impl Signal {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(t.len(), v.len(), "signal times and values differ in length");
        Signal { t, v }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn scaled(&self, k: f64) -> Signal {
        Signal::new(self.t.clone(), self.v.iter().map(|x| x * k).collect())
    }
}

impl ViSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn signal(&self, c: Component) -> Signal {
        Signal::new(
            self.points.iter().map(|p| p.t).collect(),
            self.points.iter().map(|p| p.get(c)).collect(),
        )
    }

    pub fn total_bits(&self) -> f64 {
        self.points.iter().map(ViPoint::total_bits).sum()
    }
}

fn transition_point(
    stream: &SampleStream,
    i: usize,
    solver: &FormationSolver,
) -> Result<ViPoint, AnalysisError> {
    let (a, b) = (&stream.samples[i - 1], &stream.samples[i]);
    let dt = b.t - a.t;
    let m: ConfusionMatrix = confusion(&a.clustering, &b.clustering).map_err(MetricError::from)?;
    let total = vi_from_confusion(&m);
    if total == 0.0 {
        return Ok(ViPoint { t: b.t, dt, total: 0.0, vif: 0.0, vic: 0.0, home: 0.0, visitor: 0.0 });
    }
    let vif = solver.from_confusion(&m)?.min_vi.0;
    let n = m.total();
    let (mut home, mut visitor) = (0.0, 0.0);
    for (ci, xi) in a.clustering.clusters().iter().enumerate() {
        for (cj, yj) in b.clustering.clusters().iter().enumerate() {
            let shared = m.get(ci, cj);
            if shared == 0 {
                continue;
            }
            let per = cell_contribution(shared, m.row_sums()[ci], m.col_sums()[cj], n) / f64::from(shared);
            for node in xi.iter().filter(|v| yj.binary_search(v).is_ok()) {
                match stream.nodes.get(node).map(|info| info.team) {
                    Some(Team::Home) => home += per,
                    Some(Team::Visitor) => visitor += per,
                    None => return Err(MetricError::MissingTeam(*node).into()),
                }
            }
        }
    }
    Ok(ViPoint {
        t: b.t,
        dt,
        total: total / dt,
        vif: vif / dt,
        vic: (total - vif) / dt,
        home: home / dt,
        visitor: visitor / dt,
    })
}

/// Builds the series with an explicit formation solver (and its memo).
pub fn vi_series_with(stream: &SampleStream, solver: &FormationSolver) -> Result<ViSeries, AnalysisError> {
    if stream.len() < 2 {
        return Err(AnalysisError::TooFewSamples(stream.len()));
    }
    let idx: Vec<usize> = (1..stream.len()).filter(|&i| !stream.is_boundary(i)).collect();
    let points = idx
        .par_iter()
        .map(|&i| transition_point(stream, i, solver))
        .collect::<Result<Vec<_>, _>>()?;
    let gaps = stream.boundaries.iter().map(|&i| stream.samples[i].t).collect();
    Ok(ViSeries { points, gaps })
}

pub fn vi_series(stream: &SampleStream) -> Result<ViSeries, AnalysisError> {
    vi_series_with(stream, &FormationSolver::new())
}
