//! Tracking and event ingestion: position CSV, event JSON, pre-clustered
//! stream JSON, and the nearest-neighbour clustering rule.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{Clustering, ClusteringError, NodeId, NodeInfo, Profile, Role, Team};
use crate::metric::NodeTable;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {msg}")]
    Malformed { line: u64, msg: String },
    #[error("line {line}: timestamp {t} precedes previous timestamp {previous}")]
    TimestampRegression { line: u64, t: f64, previous: f64 },
    #[error("duplicate node {node} at t={t}")]
    DuplicateNode { t: f64, node: NodeId },
    #[error("non-finite coordinate for node {node} at t={t}")]
    NonFinite { t: f64, node: NodeId },
    #[error("need at least 2 nodes to cluster, got {got} at t={t}")]
    TooFewNodes { t: f64, got: usize },
    #[error("line {line}: node {node} changes team or role")]
    InconsistentNode { line: u64, node: NodeId },
    #[error("roster changes at t={t} without a substitution or red card (added {added:?}, removed {removed:?})")]
    UnexplainedRosterChange { t: f64, added: Vec<NodeId>, removed: Vec<NodeId> },
    #[error("sample times must strictly increase (t={t} after {previous})")]
    NonIncreasingTime { t: f64, previous: f64 },
    #[error("sample rate must be positive, got {0}")]
    BadRate(f64),
    #[error("invalid clustering at t={t}: {source}")]
    Clustering { t: f64, source: ClusteringError },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// One tracked position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionSample {
    pub t: f64,
    pub node: NodeId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Corner,
    Goal,
    Substitution,
    RedCard,
    Other,
}

impl EventKind {
    pub fn changes_roster(self) -> bool {
        matches!(self, EventKind::Substitution | EventKind::RedCard)
    }
}

/// A tagged match event at one-minute resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchEvent {
    pub minute: u32,
    pub kind: EventKind,
    #[serde(default)]
    pub team: Option<Team>,
}

/// Nearest-neighbour clustering: every node is joined to its closest node
/// and clusters are the connected components of the resulting graph.
///
/// Equidistant neighbours resolve to the lower node id. Every cluster has
/// at least two members by construction.
pub fn cluster_positions(positions: &[PositionSample]) -> Result<Clustering, IngestError> {
    let t = positions.first().map_or(0.0, |p| p.t);
    if positions.len() < 2 {
        return Err(IngestError::TooFewNodes { t, got: positions.len() });
    }
    let mut pts: Vec<PositionSample> = positions.to_vec();
    pts.sort_by_key(|p| p.node);
    for w in pts.windows(2) {
        if w[0].node == w[1].node {
            return Err(IngestError::DuplicateNode { t, node: w[0].node });
        }
    }
    if let Some(p) = pts.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(IngestError::NonFinite { t, node: p.node });
    }
    let n = pts.len();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = pts[i].x - pts[j].x;
            let dy = pts[i].y - pts[j].y;
            let d = dx * dx + dy * dy;
            // ascending id order, strict comparison: ties keep the lower id
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        uf.union(i, best);
    }
    let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for (i, p) in pts.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(p.node);
    }
    Clustering::new(groups.into_values(), pts.iter().map(|p| p.node), Profile::Soccer)
        .map_err(|source| IngestError::Clustering { t, source })
}

/// Positions bucketed by sample index (`round(t · rate)`).
#[derive(Debug, Clone, PartialEq)]
pub struct PositionTable {
    pub rate_hz: f64,
    pub buckets: BTreeMap<i64, Vec<PositionSample>>,
    pub nodes: NodeTable,
    /// Runs of empty buckets between observed ones, as inclusive index ranges.
    pub gaps: Vec<(i64, i64)>,
}

impl PositionTable {
    pub fn bucket_time(&self, bucket: i64) -> f64 {
        bucket as f64 / self.rate_hz
    }
}

#[derive(Debug, Deserialize)]
struct PositionRow {
    t: Option<f64>,
    node: Option<u32>,
    team: Option<Team>,
    role: Option<Role>,
    x: Option<f64>,
    y: Option<f64>,
}

/// Parses `t,node,team,role,x,y` rows into a bucketed table.
pub fn parse_positions<R: Read>(reader: R, rate_hz: f64) -> Result<PositionTable, IngestError> {
    if !(rate_hz > 0.0) || !rate_hz.is_finite() {
        return Err(IngestError::BadRate(rate_hz));
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut buckets: BTreeMap<i64, Vec<PositionSample>> = BTreeMap::new();
    let mut nodes = NodeTable::new();
    let mut previous: Option<f64> = None;
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::Malformed { line: 1, msg: e.to_string() })?
        .clone();
    for record in rdr.records() {
        let record = record.map_err(|e| IngestError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row: PositionRow = record
            .deserialize(Some(&headers))
            .map_err(|e| IngestError::Malformed { line, msg: e.to_string() })?;
        let missing = |field: &str| IngestError::Malformed { line, msg: format!("missing `{field}`") };
        let t = row.t.ok_or_else(|| missing("t"))?;
        let node = NodeId(row.node.ok_or_else(|| missing("node"))?);
        let team = row.team.ok_or_else(|| missing("team"))?;
        let role = row.role.ok_or_else(|| missing("role"))?;
        let x = row.x.ok_or_else(|| missing("x"))?;
        let y = row.y.ok_or_else(|| missing("y"))?;
        if !t.is_finite() {
            return Err(IngestError::Malformed { line, msg: "non-finite `t`".into() });
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(IngestError::NonFinite { t, node });
        }
        if let Some(prev) = previous {
            if t < prev {
                return Err(IngestError::TimestampRegression { line, t, previous: prev });
            }
        }
        previous = Some(t);
        let info = NodeInfo { id: node, team, role };
        match nodes.get(&node) {
            Some(existing) if *existing != info => return Err(IngestError::InconsistentNode { line, node }),
            Some(_) => {}
            None => {
                nodes.insert(node, info);
            }
        }
        let bucket = (t * rate_hz).round() as i64;
        let entry = buckets.entry(bucket).or_default();
        if entry.iter().any(|p| p.node == node) {
            return Err(IngestError::DuplicateNode { t, node });
        }
        entry.push(PositionSample { t, node, x, y });
    }
    let keys: Vec<i64> = buckets.keys().copied().collect();
    let gaps = keys
        .windows(2)
        .filter(|w| w[1] - w[0] > 1)
        .map(|w| (w[0] + 1, w[1] - 1))
        .collect::<Vec<_>>();
    if !gaps.is_empty() {
        log::warn!("position feed has {} gap(s) of missing samples", gaps.len());
    }
    Ok(PositionTable { rate_hz, buckets, nodes, gaps })
}

pub fn parse_events<R: Read>(reader: R) -> Result<Vec<MatchEvent>, IngestError> {
    let mut events: Vec<MatchEvent> = serde_json::from_reader(reader)?;
    events.sort_by_key(|e| e.minute);
    Ok(events)
}

/// Options for building a [`SampleStream`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamConfig {
    pub profile: Profile,
    /// Fill tracking dropouts with the node's last known position instead of
    /// failing.
    pub carry_forward: bool,
    /// Reject roster changes that no substitution or red card explains.
    pub require_roster_events: bool,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig {
            profile: Profile::Soccer,
            carry_forward: false,
            require_roster_events: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub clustering: Clustering,
}

/// Time-ordered clusterings with their roster metadata and tagged events.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    pub rate_hz: f64,
    pub samples: Vec<Sample>,
    pub nodes: NodeTable,
    pub events: Vec<MatchEvent>,
    /// Indices `i` where the roster of sample `i` differs from sample `i-1`.
    pub boundaries: Vec<usize>,
}

fn roster_event_near(events: &[MatchEvent], t: f64) -> bool {
    let minute = (t / 60.0).floor() as i64;
    events
        .iter()
        .any(|e| e.kind.changes_roster() && (i64::from(e.minute) - minute).abs() <= 1)
}

fn roster_diff(prev: &[NodeId], cur: &[NodeId]) -> (Vec<NodeId>, Vec<NodeId>) {
    let p: BTreeSet<_> = prev.iter().copied().collect();
    let c: BTreeSet<_> = cur.iter().copied().collect();
    (c.difference(&p).copied().collect(), p.difference(&c).copied().collect())
}

impl SampleStream {
    /// Validates ordering and roster changes and derives boundaries.
    pub fn new(
        rate_hz: f64,
        samples: Vec<Sample>,
        nodes: NodeTable,
        events: Vec<MatchEvent>,
        config: &StreamConfig,
    ) -> Result<Self, IngestError> {
        if !(rate_hz > 0.0) || !rate_hz.is_finite() {
            return Err(IngestError::BadRate(rate_hz));
        }
        let mut boundaries = Vec::new();
        for (i, s) in samples.iter().enumerate() {
            s.clustering
                .validate(config.profile)
                .map_err(|source| IngestError::Clustering { t: s.t, source })?;
            if i == 0 {
                continue;
            }
            let prev = &samples[i - 1];
            if !(s.t > prev.t) {
                return Err(IngestError::NonIncreasingTime { t: s.t, previous: prev.t });
            }
            if prev.clustering.roster() != s.clustering.roster() {
                if config.require_roster_events && !roster_event_near(&events, s.t) {
                    let (added, removed) = roster_diff(prev.clustering.roster(), s.clustering.roster());
                    return Err(IngestError::UnexplainedRosterChange { t: s.t, added, removed });
                }
                boundaries.push(i);
            }
        }
        Ok(SampleStream { rate_hz, samples, nodes, events, boundaries })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time span covered by the samples, in seconds.
    pub fn span(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundaries.binary_search(&i).is_ok()
    }

    /// Keeps every `step`-th sample, lowering the rate accordingly.
    pub fn downsample(&self, step: usize) -> SampleStream {
        let step = step.max(1);
        let samples: Vec<Sample> = self.samples.iter().step_by(step).cloned().collect();
        let boundaries = (1..samples.len())
            .filter(|&i| samples[i].clustering.roster() != samples[i - 1].clustering.roster())
            .collect();
        SampleStream {
            rate_hz: self.rate_hz / step as f64,
            samples,
            nodes: self.nodes.clone(),
            events: self.events.clone(),
            boundaries,
        }
    }

    pub fn to_json(&self) -> StreamJson {
        StreamJson {
            rate_hz: self.rate_hz,
            nodes: Some(self.nodes.values().copied().collect()),
            samples: self
                .samples
                .iter()
                .map(|s| SampleJson { t: s.t, clusters: s.clustering.clusters().to_vec() })
                .collect(),
            events: self.events.clone(),
        }
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<(), IngestError> {
        serde_json::to_writer(w, &self.to_json())?;
        Ok(())
    }

    pub fn from_json(raw: StreamJson, config: &StreamConfig) -> Result<Self, IngestError> {
        let mut samples = Vec::with_capacity(raw.samples.len());
        for s in raw.samples {
            let clustering = Clustering::from_clusters(s.clusters, config.profile)
                .map_err(|source| IngestError::Clustering { t: s.t, source })?;
            samples.push(Sample { t: s.t, clustering });
        }
        let mut nodes: NodeTable = raw.nodes.unwrap_or_default().into_iter().map(|n| (n.id, n)).collect();
        let mut defaulted = 0;
        for s in &samples {
            for &id in s.clustering.roster() {
                nodes.entry(id).or_insert_with(|| {
                    defaulted += 1;
                    NodeInfo { id, team: Team::Home, role: Role::Player }
                });
            }
        }
        if defaulted > 0 {
            log::warn!("{defaulted} node(s) without metadata attributed to the home team");
        }
        let mut events = raw.events;
        events.sort_by_key(|e| e.minute);
        SampleStream::new(raw.rate_hz, samples, nodes, events, config)
    }

    pub fn read_json<R: Read>(r: R, config: &StreamConfig) -> Result<Self, IngestError> {
        let raw: StreamJson = serde_json::from_reader(r)?;
        SampleStream::from_json(raw, config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleJson {
    pub t: f64,
    pub clusters: Vec<Vec<NodeId>>,
}

/// Pre-clustered stream carrier:
/// `{"rate_hz":..,"samples":[{"t":..,"clusters":[[..]..]}..],"events":[..]}`,
/// plus an optional `nodes` array with team and role per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamJson {
    pub rate_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeInfo>>,
    pub samples: Vec<SampleJson>,
    #[serde(default)]
    pub events: Vec<MatchEvent>,
}

/// Clusters every bucket of a position table into a sample stream.
pub fn assemble_stream(
    table: &PositionTable,
    events: &[MatchEvent],
    config: &StreamConfig,
) -> Result<SampleStream, IngestError> {
    let mut resolved: Vec<(f64, Vec<PositionSample>)> = Vec::with_capacity(table.buckets.len());
    let mut last_seen: BTreeMap<NodeId, PositionSample> = BTreeMap::new();
    let mut prev_roster: Option<Vec<NodeId>> = None;
    for (&bucket, positions) in &table.buckets {
        let t = table.bucket_time(bucket);
        let mut positions = positions.clone();
        if positions.len() < 2 {
            return Err(IngestError::TooFewNodes { t, got: positions.len() });
        }
        let mut roster: Vec<NodeId> = positions.iter().map(|p| p.node).collect();
        roster.sort_unstable();
        if let Some(prev) = &prev_roster {
            if *prev != roster && !roster_event_near(events, t) {
                let (added, removed) = roster_diff(prev, &roster);
                if config.carry_forward && added.is_empty() {
                    for id in &removed {
                        let mut p = last_seen[id];
                        p.t = t;
                        positions.push(p);
                    }
                    roster = prev.clone();
                } else if config.require_roster_events {
                    return Err(IngestError::UnexplainedRosterChange { t, added, removed });
                }
            }
        }
        for p in &positions {
            last_seen.insert(p.node, *p);
        }
        prev_roster = Some(roster);
        resolved.push((t, positions));
    }
    let samples = resolved
        .par_iter()
        .map(|(t, positions)| {
            cluster_positions(positions).map(|clustering| Sample { t: *t, clustering })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut events = events.to_vec();
    events.sort_by_key(|e| e.minute);
    SampleStream::new(table.rate_hz, samples, table.nodes.clone(), events, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(node: u32, x: f64, y: f64) -> PositionSample {
        PositionSample { t: 0.0, node: NodeId(node), x, y }
    }

    fn groups(c: &Clustering) -> Vec<Vec<u32>> {
        c.clusters().iter().map(|g| g.iter().map(|n| n.0).collect()).collect()
    }

    #[test]
    fn mutual_pairs() {
        let c = cluster_positions(&[pos(0, 0.0, 0.0), pos(1, 1.0, 0.0), pos(2, 5.0, 0.0), pos(3, 6.0, 0.0)]).unwrap();
        assert_eq!(groups(&c), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn chain_merges() {
        let c = cluster_positions(&[pos(0, 0.0, 0.0), pos(1, 1.0, 0.0), pos(2, 3.0, 0.0)]).unwrap();
        assert_eq!(groups(&c), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn two_nodes_form_a_pair() {
        let c = cluster_positions(&[pos(4, -30.0, 2.0), pos(9, 40.0, 17.0)]).unwrap();
        assert_eq!(groups(&c), vec![vec![4, 9]]);
    }

    #[test]
    fn ties_go_to_lower_id() {
        // 5 sits midway between pairs {0,1} and {2,3}; its tie breaks toward 1
        let c = cluster_positions(&[
            pos(0, -10.0, 0.0),
            pos(1, -5.0, 0.0),
            pos(5, 0.0, 0.0),
            pos(2, 5.0, 0.0),
            pos(3, 10.0, 0.0),
        ])
        .unwrap();
        assert_eq!(groups(&c), vec![vec![2, 3], vec![0, 1, 5]]);
    }

    #[test]
    fn cluster_errors() {
        assert!(matches!(cluster_positions(&[pos(0, 0.0, 0.0)]), Err(IngestError::TooFewNodes { got: 1, .. })));
        assert!(matches!(
            cluster_positions(&[pos(0, 0.0, 0.0), pos(0, 1.0, 0.0)]),
            Err(IngestError::DuplicateNode { .. })
        ));
        assert!(matches!(
            cluster_positions(&[pos(0, 0.0, 0.0), pos(1, f64::NAN, 0.0)]),
            Err(IngestError::NonFinite { .. })
        ));
    }

    const HEADER: &str = "t,node,team,role,x,y\n";

    #[test]
    fn parse_three_rows() {
        let csv = format!("{HEADER}0.0,1,H,P,1.0,2.0\n0.0,2,V,G,3.0,4.0\n0.1,1,H,P,1.5,2.0\n");
        let table = parse_positions(csv.as_bytes(), 10.0).unwrap();
        let total: usize = table.buckets.values().map(Vec::len).sum();
        assert_eq!(total, 3);
        assert_eq!(table.buckets.len(), 2);
        assert_eq!(table.nodes[&NodeId(2)].role, Role::GoalFrame);
        assert!(table.gaps.is_empty());
    }

    #[test]
    fn parse_missing_coordinate_names_line() {
        let csv = format!("{HEADER}0.0,1,H,P,1.0,2.0\n0.0,2,V,P,,4.0\n");
        let err = parse_positions(csv.as_bytes(), 10.0).unwrap_err();
        match err {
            IngestError::Malformed { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains('x'), "{msg}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parse_rejects_regression() {
        let csv = format!("{HEADER}0.2,1,H,P,1.0,2.0\n0.1,2,V,P,3.0,4.0\n");
        let err = parse_positions(csv.as_bytes(), 10.0).unwrap_err();
        assert!(matches!(err, IngestError::TimestampRegression { line: 3, .. }), "{err}");
    }

    #[test]
    fn parse_bad_field_reports_line() {
        let csv = format!("{HEADER}0.0,1,H,P,1.0,2.0\n0.0,2,X,P,3.0,4.0\n");
        let err = parse_positions(csv.as_bytes(), 10.0).unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 3, .. }), "{err}");
    }

    #[test]
    fn parse_reports_gaps() {
        let csv = format!("{HEADER}0.0,1,H,P,0,0\n0.0,2,H,P,1,0\n0.5,1,H,P,0,0\n0.5,2,H,P,1,0\n");
        let table = parse_positions(csv.as_bytes(), 10.0).unwrap();
        assert_eq!(table.gaps, vec![(1, 4)]);
    }

    #[test]
    fn events_parse() {
        let ev = parse_events(r#"[{"minute":12,"kind":"corner","team":"H"},{"minute":3,"kind":"red_card","team":null}]"#.as_bytes()).unwrap();
        assert_eq!(ev[0].kind, EventKind::RedCard);
        assert_eq!(ev[1].team, Some(Team::Home));
        assert!(parse_events(r#"[{"minute":1,"kind":"throw_in","team":null}]"#.as_bytes()).is_err());
        assert!(parse_events(r#"[{"minute":-1,"kind":"goal","team":null}]"#.as_bytes()).is_err());
    }

    fn csv_for(buckets: &[Vec<(u32, f64, f64)>]) -> String {
        let mut s = String::from(HEADER);
        for (b, rows) in buckets.iter().enumerate() {
            for (n, x, y) in rows {
                s.push_str(&format!("{:.1},{n},H,P,{x},{y}\n", b as f64 / 10.0));
            }
        }
        s
    }

    #[test]
    fn assemble_600_buckets() {
        let rows: Vec<Vec<(u32, f64, f64)>> = (0..600)
            .map(|_| vec![(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 5.0, 0.0), (3, 6.0, 0.0)])
            .collect();
        let table = parse_positions(csv_for(&rows).as_bytes(), 10.0).unwrap();
        let s = assemble_stream(&table, &[], &StreamConfig::default()).unwrap();
        assert_eq!(s.len(), 600);
        assert!((s.span() - 59.9).abs() < 1e-9);
        assert!(s.boundaries.is_empty());
    }

    #[test]
    fn substitution_creates_one_boundary() {
        let mut rows = Vec::new();
        for b in 0..20 {
            let fourth = if b < 10 { 3 } else { 7 };
            rows.push(vec![(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 5.0, 0.0), (fourth, 6.0, 0.0)]);
        }
        let table = parse_positions(csv_for(&rows).as_bytes(), 10.0).unwrap();
        let err = assemble_stream(&table, &[], &StreamConfig::default()).unwrap_err();
        assert!(matches!(err, IngestError::UnexplainedRosterChange { .. }));
        let sub = MatchEvent { minute: 0, kind: EventKind::Substitution, team: Some(Team::Home) };
        let s = assemble_stream(&table, &[sub], &StreamConfig::default()).unwrap();
        assert_eq!(s.boundaries, vec![10]);
    }

    #[test]
    fn dropout_carry_forward() {
        let mut rows = Vec::new();
        for b in 0..5 {
            let mut r = vec![(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 5.0, 0.0)];
            if b != 2 {
                r.push((3, 6.0, 0.0));
            }
            rows.push(r);
        }
        let table = parse_positions(csv_for(&rows).as_bytes(), 10.0).unwrap();
        assert!(assemble_stream(&table, &[], &StreamConfig::default()).is_err());
        let cfg = StreamConfig { carry_forward: true, ..Default::default() };
        let s = assemble_stream(&table, &[], &cfg).unwrap();
        assert!(s.boundaries.is_empty());
        assert_eq!(s.samples[2].clustering.node_count(), 4);
    }

    #[test]
    fn too_few_in_bucket() {
        let rows = vec![vec![(0, 0.0, 0.0), (1, 1.0, 0.0)], vec![(0, 0.0, 0.0)]];
        let table = parse_positions(csv_for(&rows).as_bytes(), 10.0).unwrap();
        assert!(matches!(
            assemble_stream(&table, &[], &StreamConfig::default()),
            Err(IngestError::TooFewNodes { got: 1, .. })
        ));
    }

    #[test]
    fn stream_json_round_trip() {
        let raw = r#"{"rate_hz":10.0,"samples":[{"t":0.0,"clusters":[[3,2],[0,1]]},{"t":0.1,"clusters":[[0,2],[1,3]]}],"events":[{"minute":1,"kind":"corner","team":"V"}]}"#;
        let s = SampleStream::read_json(raw.as_bytes(), &StreamConfig::default()).unwrap();
        let mut out = Vec::new();
        s.write_json(&mut out).unwrap();
        let again = SampleStream::read_json(out.as_slice(), &StreamConfig::default()).unwrap();
        assert_eq!(s, again);
        let mut out2 = Vec::new();
        again.write_json(&mut out2).unwrap();
        assert_eq!(out, out2);
        assert_eq!(again.samples[0].clustering.clusters()[0], vec![NodeId(0), NodeId(1)]);
    }

    #[test]
    fn stream_rejects_time_regression() {
        let raw = r#"{"rate_hz":10.0,"samples":[{"t":0.1,"clusters":[[0,1]]},{"t":0.1,"clusters":[[0,1]]}]}"#;
        assert!(matches!(
            SampleStream::read_json(raw.as_bytes(), &StreamConfig::default()),
            Err(IngestError::NonIncreasingTime { .. })
        ));
    }
}
