//! Seeded synthetic matches for desk-scale validation.
//!
//! Every player wobbles around an anchor (an Ornstein–Uhlenbeck walk) and
//! the anchor itself wanders slowly around a fixed home position. Noise
//! scales with the baseline change rate, fades linearly under
//! `decay_slope`, and is multiplied by `1 + burst_intensity` in a smooth
//! bump around each burst time, when the anchors are also pulled into a
//! huddle near one of the goals. Goal frames never move.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{NodeId, NodeInfo, Role, Team};
use crate::ingest::{cluster_positions, EventKind, IngestError, MatchEvent, PositionSample, Sample, SampleStream, StreamConfig};
use crate::metric::NodeTable;

const FIELD: (f64, f64) = (105.0, 68.0);
const REVERSION: f64 = 0.5;
const ANCHOR_DRIFT: f64 = 0.5;
const DRIFT_REVERSION: f64 = 0.01;
const SPREAD: f64 = 4.0;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("duration must be positive, got {0}")]
    Duration(f64),
    #[error("sample rate must be positive, got {0}")]
    Rate(f64),
    #[error("roster needs at least 4 nodes, got {0}")]
    Roster(u32),
    #[error("burst time {0} outside the match")]
    BurstTime(f64),
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("decay slope must lie in [0, 1), got {0}")]
    Decay(f64),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    /// Match length in seconds.
    pub duration: f64,
    pub rate_hz: f64,
    /// Node count; the last two are goal frames.
    pub roster: u32,
    /// Burst centres in seconds.
    pub burst_times: Vec<f64>,
    pub burst_intensity: f64,
    /// Full width of a burst in seconds.
    pub burst_width: f64,
    /// Positional noise in metres per √s.
    pub baseline_change_rate: f64,
    /// Fraction of baseline activity lost by the end of the match.
    pub decay_slope: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            duration: 5400.0,
            rate_hz: 10.0,
            roster: 24,
            burst_times: Vec::new(),
            burst_intensity: 10.0,
            burst_width: 30.0,
            baseline_change_rate: 0.2,
            decay_slope: 0.0,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    /// Bursts at the middle of each given minute.
    pub fn with_corner_minutes(mut self, minutes: &[u32]) -> Self {
        self.burst_times = minutes.iter().map(|&m| f64::from(m) * 60.0 + 30.0).collect();
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(SynthError::Duration(self.duration));
        }
        if !(self.rate_hz > 0.0) || !self.rate_hz.is_finite() {
            return Err(SynthError::Rate(self.rate_hz));
        }
        if self.roster < 4 {
            return Err(SynthError::Roster(self.roster));
        }
        if let Some(&t) = self.burst_times.iter().find(|&&t| !(0.0..=self.duration).contains(&t)) {
            return Err(SynthError::BurstTime(t));
        }
        for (name, value) in [
            ("burst intensity", self.burst_intensity),
            ("burst width", self.burst_width),
            ("baseline change rate", self.baseline_change_rate),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(SynthError::Negative { name, value });
            }
        }
        if !(0.0..1.0).contains(&self.decay_slope) {
            return Err(SynthError::Decay(self.decay_slope));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        (self.duration * self.rate_hz).floor() as usize + 1
    }

    /// One corner event per burst, in the minute containing it.
    pub fn events(&self) -> Vec<MatchEvent> {
        let mut out: Vec<MatchEvent> = self
            .burst_times
            .iter()
            .map(|&t| MatchEvent { minute: (t / 60.0).floor() as u32, kind: EventKind::Corner, team: None })
            .collect();
        out.sort_by_key(|e| e.minute);
        out
    }

    pub fn nodes(&self) -> NodeTable {
        let players = self.roster - 2;
        (0..self.roster)
            .map(|i| {
                let (team, role) = if i < players {
                    (if i < players / 2 { Team::Home } else { Team::Visitor }, Role::Player)
                } else if i == players {
                    (Team::Home, Role::GoalFrame)
                } else {
                    (Team::Visitor, Role::GoalFrame)
                };
                (NodeId(i), NodeInfo { id: NodeId(i), team, role })
            })
            .collect()
    }

    /// Activity multiplier at time `t`.
    fn activity(&self, t: f64) -> f64 {
        let decay = 1.0 - self.decay_slope * t / self.duration;
        decay * (1.0 + self.burst_intensity * self.burst_weight(t))
    }

    /// Smooth bump in [0, 1] that peaks at each burst centre.
    fn burst_weight(&self, t: f64) -> f64 {
        self.nearest_burst(t).map_or(0.0, |(w, _)| w)
    }

    /// Strongest burst bump active at `t` and its index.
    fn nearest_burst(&self, t: f64) -> Option<(f64, usize)> {
        let half = self.burst_width / 2.0;
        self.burst_times
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| {
                let u = (t - b) / half.max(f64::MIN_POSITIVE);
                (u.abs() < 1.0).then(|| (0.5 * (1.0 + (std::f64::consts::PI * u).cos()), i))
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))
    }
}

fn reflect(v: f64, hi: f64) -> f64 {
    let mut v = v.rem_euclid(2.0 * hi);
    if v > hi {
        v = 2.0 * hi - v;
    }
    v
}

/// Frames of positions, one per sample.
pub fn generate_positions(spec: &SyntheticSpec) -> Result<Vec<Vec<PositionSample>>, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.roster as usize;
    let players = n - 2;
    let dt = 1.0 / spec.rate_hz;
    let sqrt_dt = dt.sqrt();
    let normal = |rng: &mut ChaCha8Rng| rng.sample::<f64, _>(StandardNormal);

    let homes: Vec<(f64, f64)> = (0..players)
        .map(|_| (rng.gen_range(5.0..FIELD.0 - 5.0), rng.gen_range(5.0..FIELD.1 - 5.0)))
        .collect();
    let huddle: Vec<(f64, f64)> = (0..players).map(|_| (SPREAD * normal(&mut rng), SPREAD * normal(&mut rng))).collect();
    let goals = [(0.0, FIELD.1 / 2.0), (FIELD.0, FIELD.1 / 2.0)];
    let spots: Vec<(f64, f64)> = spec
        .burst_times
        .iter()
        .map(|_| {
            let (gx, gy) = goals[rng.gen_range(0..2)];
            ((gx - 12.0).abs().min(FIELD.0 - 12.0), gy)
        })
        .collect();
    let mut drift = vec![(0.0, 0.0); players];
    let mut pos = homes.clone();

    let mut frames = Vec::with_capacity(spec.samples());
    for k in 0..spec.samples() {
        let t = k as f64 * dt;
        if k > 0 {
            let sigma = spec.baseline_change_rate * spec.activity(t);
            let (pull, spot) = spec.nearest_burst(t).map_or((0.0, (0.0, 0.0)), |(w, b)| (w, spots[b]));
            let drift_sigma = ANCHOR_DRIFT * spec.baseline_change_rate * sqrt_dt;
            for i in 0..players {
                let d = &mut drift[i];
                d.0 += -DRIFT_REVERSION * d.0 * dt + drift_sigma * normal(&mut rng);
                d.1 += -DRIFT_REVERSION * d.1 * dt + drift_sigma * normal(&mut rng);
                let base = (homes[i].0 + d.0, homes[i].1 + d.1);
                let target = (
                    base.0 + pull * (spot.0 + huddle[i].0 - base.0),
                    base.1 + pull * (spot.1 + huddle[i].1 - base.1),
                );
                let (x, y) = &mut pos[i];
                let nx = *x + REVERSION * (target.0 - *x) * dt + sigma * sqrt_dt * normal(&mut rng);
                let ny = *y + REVERSION * (target.1 - *y) * dt + sigma * sqrt_dt * normal(&mut rng);
                *x = reflect(nx, FIELD.0);
                *y = reflect(ny, FIELD.1);
            }
        }
        let mut frame: Vec<PositionSample> = pos
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| PositionSample { t, node: NodeId(i as u32), x, y })
            .collect();
        for (g, &(x, y)) in goals.iter().enumerate() {
            frame.push(PositionSample { t, node: NodeId((players + g) as u32), x, y });
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Clusters generated frames into a stream carrying the burst corners.
pub fn stream_from_frames(spec: &SyntheticSpec, frames: &[Vec<PositionSample>]) -> Result<SampleStream, SynthError> {
    let samples = frames
        .par_iter()
        .map(|f| {
            let t = f.first().map_or(0.0, |p| p.t);
            cluster_positions(f).map(|clustering| Sample { t, clustering })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SampleStream::new(spec.rate_hz, samples, spec.nodes(), spec.events(), &StreamConfig::default())?)
}

pub fn generate(spec: &SyntheticSpec) -> Result<SampleStream, SynthError> {
    let frames = generate_positions(spec)?;
    stream_from_frames(spec, &frames)
}

/// Writes frames as `t,node,team,role,x,y` rows.
pub fn write_positions_csv<W: Write>(
    spec: &SyntheticSpec,
    frames: &[Vec<PositionSample>],
    w: W,
) -> Result<(), std::io::Error> {
    let nodes = spec.nodes();
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "node", "team", "role", "x", "y"])?;
    for frame in frames {
        for p in frame {
            let info = &nodes[&p.node];
            out.write_record([
                format!("{:.3}", p.t),
                p.node.0.to_string(),
                info.team.code().to_string(),
                info.role.code().to_string(),
                format!("{:.4}", p.x),
                format!("{:.4}", p.y),
            ])?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short() -> SyntheticSpec {
        SyntheticSpec { duration: 60.0, rate_hz: 5.0, ..SyntheticSpec::default() }
    }

    #[test]
    fn static_without_activity() {
        let spec = SyntheticSpec { baseline_change_rate: 0.0, ..short() };
        let s = generate(&spec).unwrap();
        assert_eq!(s.len(), 301);
        assert!(s.samples.windows(2).all(|w| w[0].clustering == w[1].clustering));
    }

    #[test]
    fn deterministic_under_seed() {
        let spec = SyntheticSpec { seed: 7, ..short() }.with_corner_minutes(&[0]);
        assert_eq!(generate_positions(&spec).unwrap(), generate_positions(&spec).unwrap());
        let other = SyntheticSpec { seed: 8, ..spec.clone() };
        assert_ne!(generate_positions(&spec).unwrap(), generate_positions(&other).unwrap());
    }

    #[test]
    fn roles_and_events() {
        let spec = short().with_corner_minutes(&[0]);
        let nodes = spec.nodes();
        assert_eq!(nodes.values().filter(|i| i.role == Role::GoalFrame).count(), 2);
        assert_eq!(nodes.values().filter(|i| i.team == Team::Home).count(), 12);
        assert_eq!(spec.events(), vec![MatchEvent { minute: 0, kind: EventKind::Corner, team: None }]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SyntheticSpec { duration: 0.0, ..short() }.validate().is_err());
        assert!(SyntheticSpec { burst_times: vec![61.0], ..short() }.validate().is_err());
        assert!(SyntheticSpec { baseline_change_rate: -1.0, ..short() }.validate().is_err());
        assert!(SyntheticSpec { roster: 3, ..short() }.validate().is_err());
        assert!(SyntheticSpec { decay_slope: 1.0, ..short() }.validate().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let spec = SyntheticSpec { duration: 2.0, ..short() };
        let frames = generate_positions(&spec).unwrap();
        let mut buf = Vec::new();
        write_positions_csv(&spec, &frames, &mut buf).unwrap();
        let table = crate::ingest::parse_positions(buf.as_slice(), spec.rate_hz).unwrap();
        assert_eq!(table.buckets.len(), frames.len());
        let direct = stream_from_frames(&spec, &frames).unwrap();
        let parsed = crate::ingest::assemble_stream(&table, &spec.events(), &StreamConfig::default()).unwrap();
        assert_eq!(direct.samples.len(), parsed.samples.len());
        assert_eq!(table.nodes, spec.nodes());
    }
}
