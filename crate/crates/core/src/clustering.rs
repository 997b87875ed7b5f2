//! Clusterings, formations and confusion matrices.
//!
//! A [`Clustering`] is a partition of a roster of nodes into disjoint,
//! non-empty clusters. Clusters are kept in canonical order (ascending size,
//! then smallest member) with members sorted, so structural equality of two
//! values is equality of the underlying cluster sets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a network node (a player or a goal frame).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Team {
    #[serde(rename = "H")]
    Home,
    #[serde(rename = "V")]
    Visitor,
}

impl Team {
    pub fn code(self) -> &'static str {
        match self {
            Team::Home => "H",
            Team::Visitor => "V",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "P")]
    Player,
    /// A goal frame, attributed to the team defending it.
    #[serde(rename = "G")]
    GoalFrame,
}

impl Role {
    pub fn code(self) -> &'static str {
        match self {
            Role::Player => "P",
            Role::GoalFrame => "G",
        }
    }
}

/// Roster entry: a node together with its team and role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeInfo {
    pub id: NodeId,
    pub team: Team,
    pub role: Role,
}

/// Validation profile for clusterings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Any partition of the roster.
    #[default]
    Generic,
    /// Partitions without singleton clusters.
    Soccer,
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(Profile::Generic),
            "soccer" => Ok(Profile::Soccer),
            other => Err(format!("unknown profile `{other}` (expected generic|soccer)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusteringError {
    #[error("node {0} appears in more than one cluster")]
    Overlap(NodeId),
    #[error("node {0} is in the roster but in no cluster")]
    Uncovered(NodeId),
    #[error("node {0} is clustered but not in the roster")]
    Extra(NodeId),
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("singleton cluster {{{0}}} not allowed under the soccer profile")]
    Singleton(NodeId),
    #[error("duplicate node {0} in roster")]
    DuplicateRosterNode(NodeId),
    #[error("clusterings are over different rosters")]
    RosterMismatch,
    #[error("label array length {labels} does not match node count {nodes}")]
    LabelLength { nodes: usize, labels: usize },
}

/// A validated partition of a roster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    clusters: Vec<Vec<NodeId>>,
    roster: Vec<NodeId>,
}

impl Clustering {
    /// Validates `clusters` against `roster` and stores them in canonical order.
    pub fn new<C, R>(clusters: C, roster: R, profile: Profile) -> Result<Self, ClusteringError>
    where
        C: IntoIterator,
        C::Item: IntoIterator<Item = NodeId>,
        R: IntoIterator<Item = NodeId>,
    {
        let mut roster_sorted: Vec<NodeId> = roster.into_iter().collect();
        roster_sorted.sort_unstable();
        if let Some(w) = roster_sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ClusteringError::DuplicateRosterNode(w[0]));
        }

        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (idx, cluster) in clusters.into_iter().enumerate() {
            let mut members: Vec<NodeId> = cluster.into_iter().collect();
            if members.is_empty() {
                return Err(ClusteringError::EmptyCluster(idx));
            }
            members.sort_unstable();
            for &m in &members {
                if !seen.insert(m) {
                    return Err(ClusteringError::Overlap(m));
                }
                if roster_sorted.binary_search(&m).is_err() {
                    return Err(ClusteringError::Extra(m));
                }
            }
            if profile == Profile::Soccer && members.len() < 2 {
                return Err(ClusteringError::Singleton(members[0]));
            }
            out.push(members);
        }
        if let Some(&missing) = roster_sorted.iter().find(|n| !seen.contains(n)) {
            return Err(ClusteringError::Uncovered(missing));
        }
        out.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then(a[0].cmp(&b[0])));
        Ok(Clustering {
            clusters: out,
            roster: roster_sorted,
        })
    }

    /// Builds a clustering whose roster is the union of the given clusters.
    pub fn from_clusters<C>(clusters: C, profile: Profile) -> Result<Self, ClusteringError>
    where
        C: IntoIterator,
        C::Item: IntoIterator<Item = NodeId>,
    {
        let clusters: Vec<Vec<NodeId>> = clusters
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        let roster: Vec<NodeId> = clusters.iter().flatten().copied().collect();
        let mut dedup = roster.clone();
        dedup.sort_unstable();
        if let Some(w) = dedup.windows(2).find(|w| w[0] == w[1]) {
            return Err(ClusteringError::Overlap(w[0]));
        }
        Clustering::new(clusters, dedup, profile)
    }

    /// Builds a clustering from parallel `nodes` / `labels` arrays; nodes with
    /// the same label share a cluster.
    pub fn from_labels(
        nodes: &[NodeId],
        labels: &[u32],
        profile: Profile,
    ) -> Result<Self, ClusteringError> {
        if nodes.len() != labels.len() {
            return Err(ClusteringError::LabelLength {
                nodes: nodes.len(),
                labels: labels.len(),
            });
        }
        let mut groups: std::collections::BTreeMap<u32, Vec<NodeId>> = Default::default();
        for (&n, &l) in nodes.iter().zip(labels) {
            groups.entry(l).or_default().push(n);
        }
        Clustering::new(groups.into_values(), nodes.iter().copied(), profile)
    }

    pub fn clusters(&self) -> &[Vec<NodeId>] {
        &self.clusters
    }

    pub fn roster(&self) -> &[NodeId] {
        &self.roster
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.roster.len()
    }

    /// Index of the cluster holding `node`.
    pub fn cluster_of(&self, node: NodeId) -> Option<usize> {
        self.clusters.iter().position(|c| c.binary_search(&node).is_ok())
    }

    /// Re-checks the partition invariants.
    pub fn validate(&self, profile: Profile) -> Result<(), ClusteringError> {
        Clustering::new(self.clusters.clone(), self.roster.clone(), profile).map(|_| ())
    }

    pub fn formation(&self) -> Formation {
        formation_of(self)
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canonical_key(self)
    }
}

/// Canonical JSON carrier: `{"roster":[..],"clusters":[[..],..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteringJson {
    pub roster: Vec<NodeId>,
    pub clusters: Vec<Vec<NodeId>>,
}

impl From<&Clustering> for ClusteringJson {
    fn from(c: &Clustering) -> Self {
        ClusteringJson {
            roster: c.roster.clone(),
            clusters: c.clusters.clone(),
        }
    }
}

impl Serialize for Clustering {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ClusteringJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Clustering {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = ClusteringJson::deserialize(d)?;
        Clustering::new(raw.clusters, raw.roster, Profile::Generic).map_err(serde::de::Error::custom)
    }
}

/// Multiset of cluster sizes, stored in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Formation(Vec<u32>);

impl Formation {
    /// Builds a formation from arbitrary positive sizes.
    pub fn new(mut sizes: Vec<u32>) -> Option<Self> {
        if sizes.contains(&0) {
            return None;
        }
        sizes.sort_unstable();
        Some(Formation(sizes))
    }

    pub fn sizes(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn parts(&self) -> usize {
        self.0.len()
    }

    pub fn has_singleton(&self) -> bool {
        self.0.first() == Some(&1)
    }
}

impl fmt::Display for Formation {
    /// Exponent notation, e.g. `{2^4,3^4,4}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let v = self.0[i];
            let run = self.0[i..].iter().take_while(|&&x| x == v).count();
            if !first {
                write!(f, ",")?;
            }
            first = false;
            if run > 1 {
                write!(f, "{v}^{run}")?;
            } else {
                write!(f, "{v}")?;
            }
            i += run;
        }
        write!(f, "}}")
    }
}

pub fn formation_of(c: &Clustering) -> Formation {
    // canonical order is already ascending by size
    Formation(c.clusters.iter().map(|c| c.len() as u32).collect())
}

/// Integer node-flow matrix between two clusterings.
///
/// Rows follow the order of the source clusters, columns the destination.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    rows: usize,
    cols: usize,
    counts: Vec<u32>,
    row_sums: Vec<u32>,
    col_sums: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("expected {expected} cells, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("matrix has no rows or no columns")]
    Empty,
    #[error("row {0} sums to zero")]
    EmptyRow(usize),
    #[error("column {0} sums to zero")]
    EmptyCol(usize),
}

impl ConfusionMatrix {
    /// Builds a matrix from row-major counts; sums are derived.
    pub fn from_counts(rows: usize, cols: usize, counts: Vec<u32>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if counts.len() != rows * cols {
            return Err(MatrixError::Shape {
                expected: rows * cols,
                got: counts.len(),
            });
        }
        let mut row_sums = vec![0u32; rows];
        let mut col_sums = vec![0u32; cols];
        for i in 0..rows {
            for j in 0..cols {
                let v = counts[i * cols + j];
                row_sums[i] += v;
                col_sums[j] += v;
            }
        }
        if let Some(i) = row_sums.iter().position(|&s| s == 0) {
            return Err(MatrixError::EmptyRow(i));
        }
        if let Some(j) = col_sums.iter().position(|&s| s == 0) {
            return Err(MatrixError::EmptyCol(j));
        }
        Ok(ConfusionMatrix {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
        })
    }

    pub(crate) fn from_parts_unchecked(
        rows: usize,
        cols: usize,
        counts: Vec<u32>,
        row_sums: Vec<u32>,
        col_sums: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(counts.len(), rows * cols);
        ConfusionMatrix {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.cols + j]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u32] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u32] {
        &self.col_sums
    }

    pub fn total(&self) -> u32 {
        self.row_sums.iter().sum()
    }

    pub fn row_formation(&self) -> Formation {
        Formation::new(self.row_sums.clone()).expect("row sums are positive")
    }

    pub fn col_formation(&self) -> Formation {
        Formation::new(self.col_sums.clone()).expect("column sums are positive")
    }

    pub fn transpose(&self) -> ConfusionMatrix {
        let mut counts = vec![0u32; self.counts.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                counts[j * self.rows + i] = self.get(i, j);
            }
        }
        ConfusionMatrix {
            rows: self.cols,
            cols: self.rows,
            counts,
            row_sums: self.col_sums.clone(),
            col_sums: self.row_sums.clone(),
        }
    }

    /// True when every row and column sum matches the given margins
    /// (as multisets, in matrix order).
    pub fn realizes(&self, rows: &Formation, cols: &Formation) -> bool {
        self.row_formation() == *rows && self.col_formation() == *cols
    }
}

/// Computes `counts[i][j] = |x_i ∩ y_j|` in O(n + k·l).
pub fn confusion(x: &Clustering, y: &Clustering) -> Result<ConfusionMatrix, ClusteringError> {
    if x.roster != y.roster {
        return Err(ClusteringError::RosterMismatch);
    }
    let max_id = x.roster.last().map_or(0, |n| n.0 as usize);
    let mut col_of = vec![u32::MAX; max_id + 1];
    for (j, c) in y.clusters.iter().enumerate() {
        for n in c {
            col_of[n.0 as usize] = j as u32;
        }
    }
    let (rows, cols) = (x.clusters.len(), y.clusters.len());
    let mut counts = vec![0u32; rows * cols];
    for (i, c) in x.clusters.iter().enumerate() {
        for n in c {
            counts[i * cols + col_of[n.0 as usize] as usize] += 1;
        }
    }
    let row_sums = x.clusters.iter().map(|c| c.len() as u32).collect();
    let col_sums = y.clusters.iter().map(|c| c.len() as u32).collect();
    Ok(ConfusionMatrix::from_parts_unchecked(
        rows, cols, counts, row_sums, col_sums,
    ))
}

/// Order-independent exact encoding of a clustering's cluster sets.
///
/// Layout: for each cluster in canonical order, its length followed by its
/// sorted members. Equal keys iff equal cluster sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Box<[u32]>);

impl CanonicalKey {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// 64-bit FNV-1a digest of the encoding, for compact logging.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for w in self.0.iter() {
            for b in w.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }
}

pub fn canonical_key(c: &Clustering) -> CanonicalKey {
    let mut enc = Vec::with_capacity(c.roster.len() + c.clusters.len());
    for cl in &c.clusters {
        enc.push(cl.len() as u32);
        enc.extend(cl.iter().map(|n| n.0));
    }
    CanonicalKey(enc.into_boxed_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    fn cl(groups: &[&[u32]]) -> Clustering {
        Clustering::from_clusters(groups.iter().map(|g| ids(g)), Profile::Generic).unwrap()
    }

    #[test]
    fn two_pairs_are_valid() {
        let c = Clustering::new(
            vec![ids(&[0, 1]), ids(&[2, 3])],
            ids(&[0, 1, 2, 3]),
            Profile::Soccer,
        )
        .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.formation().sizes(), &[2, 2]);
    }

    #[test]
    fn overlap_is_rejected() {
        let err = Clustering::new(
            vec![ids(&[0, 1]), ids(&[1, 2])],
            ids(&[0, 1, 2]),
            Profile::Generic,
        )
        .unwrap_err();
        assert_eq!(err, ClusteringError::Overlap(NodeId(1)));
    }

    #[test]
    fn cover_errors() {
        let err = Clustering::new(vec![ids(&[0, 1])], ids(&[0, 1, 2]), Profile::Generic);
        assert_eq!(err.unwrap_err(), ClusteringError::Uncovered(NodeId(2)));
        let err = Clustering::new(vec![ids(&[0, 1, 5])], ids(&[0, 1]), Profile::Generic);
        assert_eq!(err.unwrap_err(), ClusteringError::Extra(NodeId(5)));
        let err = Clustering::new(vec![ids(&[0, 1]), vec![]], ids(&[0, 1]), Profile::Generic);
        assert_eq!(err.unwrap_err(), ClusteringError::EmptyCluster(1));
    }

    #[test]
    fn singleton_depends_on_profile() {
        let groups = vec![ids(&[0, 1]), ids(&[2])];
        assert!(Clustering::new(groups.clone(), ids(&[0, 1, 2]), Profile::Generic).is_ok());
        assert_eq!(
            Clustering::new(groups, ids(&[0, 1, 2]), Profile::Soccer).unwrap_err(),
            ClusteringError::Singleton(NodeId(2))
        );
    }

    #[test]
    fn canonical_order_and_keys() {
        let a = cl(&[&[0, 1], &[2, 3]]);
        let b = cl(&[&[3, 2], &[1, 0]]);
        assert_eq!(a, b);
        assert_eq!(a.canonical_key(), b.canonical_key());
        let c = cl(&[&[0, 2], &[1, 3]]);
        assert_ne!(a.canonical_key(), c.canonical_key());

        let d = cl(&[&[9, 4, 5], &[7, 8], &[1, 2]]);
        assert_eq!(d.clusters(), &[ids(&[1, 2]), ids(&[7, 8]), ids(&[4, 5, 9])]);
    }

    #[test]
    fn confusion_examples() {
        let x = cl(&[&[0, 1], &[2, 3]]);
        let m = confusion(&x, &x).unwrap();
        assert_eq!(m.counts(), &[2, 0, 0, 2]);
        let y = cl(&[&[0, 2], &[1, 3]]);
        let m = confusion(&x, &y).unwrap();
        assert_eq!(m.counts(), &[1, 1, 1, 1]);
        let z = cl(&[&[0, 1, 2]]);
        assert_eq!(confusion(&x, &z).unwrap_err(), ClusteringError::RosterMismatch);
    }

    #[test]
    fn single_cluster_formation() {
        let all: Vec<u32> = (0..24).collect();
        assert_eq!(cl(&[&all]).formation().sizes(), &[24]);
    }

    #[test]
    fn formation_display() {
        let f = Formation::new(vec![4, 2, 3, 2, 3, 2, 3, 2, 3]).unwrap();
        assert_eq!(f.to_string(), "{2^4,3^4,4}");
    }

    #[test]
    fn json_round_trip() {
        let c = cl(&[&[3, 2], &[1, 0, 4]]);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"roster":[0,1,2,3,4],"clusters":[[2,3],[0,1,4]]}"#);
        let back: Clustering = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn from_labels_groups_by_label() {
        let c = Clustering::from_labels(&ids(&[0, 1, 2, 3]), &[7, 3, 7, 3], Profile::Soccer).unwrap();
        assert_eq!(c, cl(&[&[0, 2], &[1, 3]]));
    }
}
