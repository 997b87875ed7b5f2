//! Event–peak correlation, simplex-transition mining and per-player profiles.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{Peak, ViSeries};
use crate::clustering::{confusion, NodeId, Team};
use crate::ingest::{EventKind, MatchEvent, SampleStream};
use crate::metric::{cell_contribution, Bits, MetricError, NodeTable};

pub const DEFAULT_TOP_N: usize = 10;

#[derive(Debug, Error)]
pub enum InsightError {
    #[error("window must be positive, got {0}")]
    NonPositiveWindow(f64),
    #[error("baseline pad must be non-negative, got {0}")]
    NegativePad(f64),
    #[error("node {0:?} never appears in the stream")]
    UnknownNode(NodeId),
    #[error("series has {series} points but the stream has {expected} same-roster transitions")]
    SeriesMismatch { series: usize, expected: usize },
    #[error("match span must be positive, got {0}")]
    NonPositiveSpan(f64),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// How often peaks coincide with tagged events of one kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub kind: EventKind,
    /// `recognized / total`; absent when there are no events of the kind.
    pub p_peak_given_corner: Option<f64>,
    /// Fraction of the match covered by peak neighbourhoods.
    pub p_peak_random: f64,
    pub window: f64,
    /// Half-width added to the window when measuring coverage.
    pub baseline_pad: f64,
    pub peaks_used: usize,
    pub corners_total: usize,
    pub corners_recognized: usize,
    /// Minutes of the events that had a peak nearby.
    pub recognized_minutes: Vec<u32>,
}

/// Options for [`correlate_events_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationOptions {
    pub window: f64,
    /// Extra half-width of the peak neighbourhoods used for coverage.
    pub baseline_pad: f64,
    /// Match interval used to clip coverage; defaults to the peak range.
    pub span: Option<(f64, f64)>,
}

impl CorrelationOptions {
    pub fn new(window: f64) -> Self {
        CorrelationOptions { window, baseline_pad: 0.0, span: None }
    }
}

/// Correlates peaks with events using the default coverage neighbourhood
/// `peak ± window`, clipped to the range of peak times.
pub fn correlate_events(
    peaks: &[Peak],
    events: &[MatchEvent],
    kind: EventKind,
    window: f64,
) -> Result<CorrelationReport, InsightError> {
    correlate_events_with(peaks, events, kind, CorrelationOptions::new(window))
}

pub fn correlate_events_with(
    peaks: &[Peak],
    events: &[MatchEvent],
    kind: EventKind,
    opts: CorrelationOptions,
) -> Result<CorrelationReport, InsightError> {
    let window = opts.window;
    if !(window > 0.0) {
        return Err(InsightError::NonPositiveWindow(window));
    }
    if !(opts.baseline_pad >= 0.0) {
        return Err(InsightError::NegativePad(opts.baseline_pad));
    }
    let mut times: Vec<f64> = peaks.iter().map(|p| p.t).collect();
    times.sort_by(f64::total_cmp);

    let mut recognized_minutes = Vec::new();
    let mut total = 0;
    for e in events.iter().filter(|e| e.kind == kind) {
        total += 1;
        let lo = f64::from(e.minute) * 60.0 - window;
        let hi = f64::from(e.minute) * 60.0 + 60.0 + window;
        let first = times.partition_point(|&t| t < lo);
        if times.get(first).is_some_and(|&t| t < hi) {
            recognized_minutes.push(e.minute);
        }
    }

    let (start, end) = opts
        .span
        .unwrap_or_else(|| (times.first().copied().unwrap_or(0.0), times.last().copied().unwrap_or(0.0)));
    let half = window + opts.baseline_pad;
    let mut covered = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for &t in &times {
        let (a, b) = ((t - half).max(start), (t + half).min(end));
        if b <= a {
            continue;
        }
        current = match current {
            Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                covered += cb - ca;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((ca, cb)) = current {
        covered += cb - ca;
    }
    let length = end - start;
    let p_peak_random = if length > 0.0 { (covered / length).clamp(0.0, 1.0) } else { 0.0 };

    Ok(CorrelationReport {
        kind,
        p_peak_given_corner: (total > 0).then(|| recognized_minutes.len() as f64 / total as f64),
        p_peak_random,
        window,
        baseline_pad: opts.baseline_pad,
        peaks_used: peaks.len(),
        corners_total: total,
        corners_recognized: recognized_minutes.len(),
        recognized_minutes,
    })
}

/// Team make-up of one cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Composition {
    pub size: usize,
    pub home: usize,
    pub visitor: usize,
    /// Members, home team first, ascending within each team.
    pub labels: Vec<NodeId>,
}

impl Composition {
    fn of(nodes: &[NodeId], table: &NodeTable) -> Result<Self, MetricError> {
        let mut home = Vec::new();
        let mut visitor = Vec::new();
        for &n in nodes {
            match table.get(&n).map(|i| i.team) {
                Some(Team::Home) => home.push(n),
                Some(Team::Visitor) => visitor.push(n),
                None => return Err(MetricError::MissingTeam(n)),
            }
        }
        let (h, v) = (home.len(), visitor.len());
        home.extend(visitor);
        Ok(Composition { size: nodes.len(), home: h, visitor: v, labels: home })
    }
}

/// A pair of distinct, intersecting clusters seen at consecutive samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexTransition {
    pub source: Vec<NodeId>,
    pub dest: Vec<NodeId>,
    /// Times of the destination samples.
    pub occurrences: Vec<f64>,
    pub accumulated_vi: Bits,
    pub per_player_vi: BTreeMap<NodeId, Bits>,
    pub formation_pair: (Composition, Composition),
}

impl SimplexTransition {
    pub fn involves(&self, node: NodeId) -> bool {
        self.per_player_vi.contains_key(&node)
    }
}

/// One non-trivial confusion cell of a transition.
struct Flow {
    source: Vec<NodeId>,
    dest: Vec<NodeId>,
    shared: Vec<NodeId>,
    bits: f64,
}

struct TransitionFlows {
    t: f64,
    dt: f64,
    flows: Vec<Flow>,
}

fn transition_indices(stream: &SampleStream, series: &ViSeries) -> Result<Vec<usize>, InsightError> {
    let idx: Vec<usize> = (1..stream.len()).filter(|&i| !stream.is_boundary(i)).collect();
    if idx.len() != series.len() {
        return Err(InsightError::SeriesMismatch { series: series.len(), expected: idx.len() });
    }
    Ok(idx)
}

fn flows_at(stream: &SampleStream, i: usize) -> Result<Vec<Flow>, MetricError> {
    let (a, b) = (&stream.samples[i - 1].clustering, &stream.samples[i].clustering);
    let m = confusion(a, b)?;
    let n = m.total();
    let mut out = Vec::new();
    for (ci, xi) in a.clusters().iter().enumerate() {
        for (cj, yj) in b.clusters().iter().enumerate() {
            let shared = m.get(ci, cj);
            if shared == 0 || xi == yj {
                continue;
            }
            out.push(Flow {
                source: xi.clone(),
                dest: yj.clone(),
                shared: xi.iter().copied().filter(|v| yj.binary_search(v).is_ok()).collect(),
                bits: cell_contribution(shared, m.row_sums()[ci], m.col_sums()[cj], n),
            });
        }
    }
    Ok(out)
}

fn all_flows(stream: &SampleStream, series: &ViSeries) -> Result<Vec<TransitionFlows>, InsightError> {
    let idx = transition_indices(stream, series)?;
    idx.par_iter()
        .zip(series.points.par_iter())
        .map(|(&i, p)| {
            let flows = if p.total == 0.0 { Vec::new() } else { flows_at(stream, i)? };
            Ok(TransitionFlows { t: stream.samples[i].t, dt: p.dt, flows })
        })
        .collect()
}

fn rank(mut list: Vec<SimplexTransition>) -> Vec<SimplexTransition> {
    list.sort_by(|a, b| {
        b.accumulated_vi
            .0
            .total_cmp(&a.accumulated_vi.0)
            .then_with(|| a.source.cmp(&b.source))
            .then_with(|| a.dest.cmp(&b.dest))
    });
    list
}

fn accumulate(flows: &[TransitionFlows], nodes: &NodeTable) -> Result<Vec<SimplexTransition>, InsightError> {
    let mut by_key: HashMap<(&[NodeId], &[NodeId]), SimplexTransition> = HashMap::new();
    for tf in flows {
        for f in &tf.flows {
            let entry = match by_key.entry((&f.source, &f.dest)) {
                std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
                std::collections::hash_map::Entry::Vacant(v) => v.insert(SimplexTransition {
                    source: f.source.clone(),
                    dest: f.dest.clone(),
                    occurrences: Vec::new(),
                    accumulated_vi: Bits(0.0),
                    per_player_vi: BTreeMap::new(),
                    formation_pair: (Composition::of(&f.source, nodes)?, Composition::of(&f.dest, nodes)?),
                }),
            };
            entry.occurrences.push(tf.t);
            entry.accumulated_vi.0 += f.bits;
            let per = f.bits / f.shared.len() as f64;
            for &n in &f.shared {
                entry.per_player_vi.entry(n).or_insert(Bits(0.0)).0 += per;
            }
        }
    }
    Ok(rank(by_key.into_values().collect()))
}

/// All simplex transitions of the stream, ranked by accumulated VI.
///
/// `series` must be the VI series of `stream`; transitions with zero VI are
/// skipped without recomputing their confusion matrix.
pub fn mine_transitions(stream: &SampleStream, series: &ViSeries) -> Result<Vec<SimplexTransition>, InsightError> {
    accumulate(&all_flows(stream, series)?, &stream.nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub dt: f64,
    /// Node contribution in bits per second; zero when absent.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerProfile {
    pub node: NodeId,
    pub series: Vec<ProfilePoint>,
    pub total: Bits,
    /// Time-weighted `Σ VI_k / |roster_k|` over all transitions.
    pub match_average_per_player: Bits,
    pub top_transitions: Vec<SimplexTransition>,
}

/// Profiles of every node seen in the stream, in node order.
pub fn player_profiles(
    stream: &SampleStream,
    series: &ViSeries,
    top_n: usize,
) -> Result<Vec<PlayerProfile>, InsightError> {
    let flows = all_flows(stream, series)?;
    let mined = accumulate(&flows, &stream.nodes)?;
    let seen: std::collections::BTreeSet<NodeId> =
        stream.samples.iter().flat_map(|s| s.clustering.roster().iter().copied()).collect();
    let average = match_average(stream, series)?;

    let mut rates: BTreeMap<NodeId, Vec<f64>> = seen.iter().map(|&n| (n, vec![0.0; flows.len()])).collect();
    for (k, tf) in flows.iter().enumerate() {
        for f in &tf.flows {
            let per = f.bits / f.shared.len() as f64 / tf.dt;
            for n in &f.shared {
                if let Some(r) = rates.get_mut(n) {
                    r[k] += per;
                }
            }
        }
    }
    Ok(rates
        .into_iter()
        .map(|(node, r)| build_profile(node, &flows, &r, average, &mined, top_n))
        .collect())
}

/// Profile of a single node.
pub fn player_profile(
    stream: &SampleStream,
    series: &ViSeries,
    node: NodeId,
    top_n: usize,
) -> Result<PlayerProfile, InsightError> {
    if !stream.samples.iter().any(|s| s.clustering.cluster_of(node).is_some()) {
        return Err(InsightError::UnknownNode(node));
    }
    let flows = all_flows(stream, series)?;
    let mined = accumulate(&flows, &stream.nodes)?;
    let average = match_average(stream, series)?;
    let rates: Vec<f64> = flows
        .iter()
        .map(|tf| {
            tf.flows
                .iter()
                .find(|f| f.shared.binary_search(&node).is_ok())
                .map_or(0.0, |f| f.bits / f.shared.len() as f64 / tf.dt)
        })
        .collect();
    Ok(build_profile(node, &flows, &rates, average, &mined, top_n))
}

fn match_average(stream: &SampleStream, series: &ViSeries) -> Result<f64, InsightError> {
    let idx = transition_indices(stream, series)?;
    Ok(idx
        .iter()
        .zip(&series.points)
        .map(|(&i, p)| p.total_bits() / stream.samples[i].clustering.node_count() as f64)
        .sum())
}

fn build_profile(
    node: NodeId,
    flows: &[TransitionFlows],
    rates: &[f64],
    average: f64,
    mined: &[SimplexTransition],
    top_n: usize,
) -> PlayerProfile {
    let series: Vec<ProfilePoint> = flows
        .iter()
        .zip(rates)
        .map(|(tf, &rate)| ProfilePoint { t: tf.t, dt: tf.dt, rate })
        .collect();
    let total = series.iter().map(|p| p.rate * p.dt).sum();
    PlayerProfile {
        node,
        series,
        total: Bits(total),
        match_average_per_player: Bits(average),
        top_transitions: mined.iter().filter(|s| s.involves(node)).take(top_n).cloned().collect(),
    }
}

/// Plot-ready record of one transition on a circular match chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartRecord {
    pub accumulated_vi: f64,
    /// Circle area; equal to the accumulated VI.
    pub area: f64,
    pub radius: f64,
    /// Occurrence angles in radians, a full match being `2π`.
    pub angles: Vec<f64>,
    pub source: Composition,
    pub dest: Composition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionChart {
    pub match_span: f64,
    pub records: Vec<ChartRecord>,
}

pub fn transition_chart_data(transitions: &[SimplexTransition], match_span: f64) -> Result<TransitionChart, InsightError> {
    if !(match_span > 0.0) {
        return Err(InsightError::NonPositiveSpan(match_span));
    }
    let records = transitions
        .iter()
        .map(|s| ChartRecord {
            accumulated_vi: s.accumulated_vi.0,
            area: s.accumulated_vi.0,
            radius: (s.accumulated_vi.0 / PI).sqrt(),
            angles: s.occurrences.iter().map(|t| 2.0 * PI * t / match_span).collect(),
            source: s.formation_pair.0.clone(),
            dest: s.formation_pair.1.clone(),
        })
        .collect();
    Ok(TransitionChart { match_span, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::vi_series;
    use crate::clustering::{Clustering, NodeInfo, Profile, Role};
    use crate::ingest::{Sample, StreamConfig};
    use crate::metric::vi;

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    fn c(parts: &[&[u32]]) -> Clustering {
        Clustering::from_clusters(parts.iter().map(|p| ids(p)).collect::<Vec<_>>(), Profile::Generic).unwrap()
    }

    fn table(n: u32) -> NodeTable {
        (0..n)
            .map(|i| {
                let team = if i % 2 == 0 { Team::Home } else { Team::Visitor };
                (NodeId(i), NodeInfo { id: NodeId(i), team, role: Role::Player })
            })
            .collect()
    }

    fn stream(cs: Vec<Clustering>, n: u32) -> SampleStream {
        let samples = cs.into_iter().enumerate().map(|(i, clustering)| Sample { t: i as f64, clustering }).collect();
        let cfg = StreamConfig { profile: Profile::Generic, ..StreamConfig::default() };
        SampleStream::new(1.0, samples, table(n), Vec::new(), &cfg).unwrap()
    }

    fn peak(minute: f64) -> Peak {
        Peak { t: minute * 60.0 + 30.0, value: 1.0 }
    }

    fn corner(minute: u32) -> MatchEvent {
        MatchEvent { minute, kind: EventKind::Corner, team: None }
    }

    #[test]
    fn correlation_counts() {
        let r = correlate_events(&[peak(10.0), peak(30.0)], &[corner(10), corner(50)], EventKind::Corner, 30.0).unwrap();
        assert_eq!(r.p_peak_given_corner, Some(0.5));
        assert_eq!(r.corners_recognized, 1);
        assert_eq!(r.recognized_minutes, vec![10]);

        let all = correlate_events(&[peak(10.0), peak(30.0)], &[corner(10), corner(30)], EventKind::Corner, 30.0).unwrap();
        assert_eq!(all.p_peak_given_corner, Some(1.0));

        let none = correlate_events(&[], &[corner(10)], EventKind::Corner, 30.0).unwrap();
        assert_eq!(none.p_peak_given_corner, Some(0.0));
        assert_eq!(none.p_peak_random, 0.0);

        let empty = correlate_events(&[peak(1.0)], &[], EventKind::Corner, 30.0).unwrap();
        assert_eq!(empty.p_peak_given_corner, None);
        assert!(correlate_events(&[], &[], EventKind::Corner, 0.0).is_err());
    }

    #[test]
    fn recognition_interval_edges() {
        // minute 10 spans [600, 660); with a 30 s window the interval is [570, 690)
        let at = |t: f64| Peak { t, value: 1.0 };
        let hit = |t| {
            correlate_events(&[at(t)], &[corner(10)], EventKind::Corner, 30.0).unwrap().corners_recognized == 1
        };
        assert!(hit(570.0));
        assert!(hit(689.9));
        assert!(!hit(690.0));
        assert!(!hit(569.9));
    }

    #[test]
    fn coverage_union_and_clip() {
        let ps = [Peak { t: 100.0, value: 1.0 }, Peak { t: 120.0, value: 1.0 }, Peak { t: 500.0, value: 1.0 }];
        let opts = CorrelationOptions { window: 30.0, baseline_pad: 0.0, span: Some((0.0, 1000.0)) };
        let r = correlate_events_with(&ps, &[], EventKind::Corner, opts).unwrap();
        // [70,150] ∪ [470,530] = 80 + 60
        assert!((r.p_peak_random - 0.14).abs() < 1e-12);
        let clipped = CorrelationOptions { span: Some((110.0, 1000.0)), ..opts };
        let r = correlate_events_with(&ps, &[], EventKind::Corner, clipped).unwrap();
        assert!((r.p_peak_random - 100.0 / 890.0).abs() < 1e-12);
        let padded = CorrelationOptions { baseline_pad: 30.0, ..opts };
        let r = correlate_events_with(&ps, &[], EventKind::Corner, padded).unwrap();
        // [40,180] ∪ [440,560]
        assert!((r.p_peak_random - 0.26).abs() < 1e-12);
    }

    #[test]
    fn static_stream_has_no_transitions() {
        let s = stream(vec![c(&[&[0, 1], &[2, 3]]); 4], 4);
        let series = vi_series(&s).unwrap();
        assert!(mine_transitions(&s, &series).unwrap().is_empty());
        let p = player_profile(&s, &series, NodeId(0), 10).unwrap();
        assert_eq!(p.total, Bits(0.0));
        assert!(p.series.iter().all(|x| x.rate == 0.0));
        assert_eq!(p.match_average_per_player, Bits(0.0));
    }

    #[test]
    fn pair_swap_profiles() {
        let s = stream(vec![c(&[&[0, 1], &[2, 3]]), c(&[&[0, 2], &[1, 3]])], 4);
        let series = vi_series(&s).unwrap();
        let profiles = player_profiles(&s, &series, 10).unwrap();
        assert_eq!(profiles.len(), 4);
        for p in &profiles {
            assert!((p.total.0 - 0.5).abs() < 1e-12);
            assert!((p.match_average_per_player.0 - 0.5).abs() < 1e-12);
            assert_eq!(p.top_transitions.len(), 1);
        }
        let mined = mine_transitions(&s, &series).unwrap();
        assert_eq!(mined.len(), 4);
        assert!(mined.iter().all(|m| (m.accumulated_vi.0 - 0.5).abs() < 1e-12));
    }

    #[test]
    fn alternating_stream_recount() {
        let a = c(&[&[0, 1, 2], &[3, 4, 5]]);
        let b = c(&[&[0, 1], &[2, 3], &[4, 5]]);
        let s = stream(vec![a.clone(), b.clone(), a.clone(), b.clone(), a.clone()], 6);
        let series = vi_series(&s).unwrap();
        let mined = mine_transitions(&s, &series).unwrap();
        let expected = 2.0 * vi(&a, &b).unwrap().0 + 2.0 * vi(&b, &a).unwrap().0;
        let got: f64 = mined.iter().map(|m| m.accumulated_vi.0).sum();
        assert!((got - expected).abs() < 1e-9);
        // {0,1,2}→{2,3} happens on every a→b step, at t = 1 and 3
        let k = mined.iter().find(|m| m.source == ids(&[0, 1, 2]) && m.dest == ids(&[2, 3])).unwrap();
        assert_eq!(k.occurrences, vec![1.0, 3.0]);
        for m in &mined {
            assert_ne!(m.source, m.dest);
            let per: f64 = m.per_player_vi.values().map(|b| b.0).sum();
            assert!((per - m.accumulated_vi.0).abs() < 1e-12);
        }
        assert!(mined.windows(2).all(|w| w[0].accumulated_vi.0 >= w[1].accumulated_vi.0));
    }

    #[test]
    fn shedding_node_dominates() {
        let s = stream(vec![c(&[&[0, 1, 2], &[3, 4]]), c(&[&[0, 1], &[2, 3, 4]])], 5);
        let series = vi_series(&s).unwrap();
        let profiles = player_profiles(&s, &series, 10).unwrap();
        let e = profiles.iter().find(|p| p.node == NodeId(2)).unwrap().total.0;
        assert!(profiles.iter().filter(|p| p.node != NodeId(2)).all(|p| p.total.0 < e));
        let sum: f64 = profiles.iter().map(|p| p.total.0).sum();
        assert!((sum - series.total_bits()).abs() < 1e-9);
        assert!(matches!(player_profile(&s, &series, NodeId(9), 10), Err(InsightError::UnknownNode(_))));
    }

    #[test]
    fn chart_angles_and_labels() {
        let s = stream(vec![c(&[&[0, 1], &[2, 3]]), c(&[&[0, 2], &[1, 3]])], 4);
        let series = vi_series(&s).unwrap();
        let mined = mine_transitions(&s, &series).unwrap();
        let chart = transition_chart_data(&mined, 2.0).unwrap();
        assert_eq!(chart.records.len(), 4);
        for r in &chart.records {
            assert!((r.angles[0] - PI).abs() < 1e-12);
            assert!((r.area / r.accumulated_vi - 1.0).abs() < 1e-9);
            assert_eq!((r.source.home, r.source.visitor), (1, 1));
        }
        // node 1 is visitor, node 0 home
        let src = &chart.records.iter().find(|r| r.source.labels.contains(&NodeId(1))).unwrap().source;
        assert_eq!(src.labels, ids(&[0, 1]));
        let dst = chart.records.iter().find(|r| r.dest.labels.contains(&NodeId(3))).unwrap();
        assert_eq!(dst.dest.labels.last(), Some(&NodeId(3)));
        assert!(transition_chart_data(&mined, 0.0).is_err());
    }
}
