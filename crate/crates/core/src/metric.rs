//! Variation of Information between clusterings and its attribution to nodes
//! and teams.
//!
//! All logarithms are base 2. Empty intersections contribute nothing.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{confusion, Clustering, ClusteringError, ConfusionMatrix, NodeId, NodeInfo, Team};

/// Information quantity in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(pub f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} bits", self.0)
    }
}

/// Rate of change in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBits {
    pub value: f64,
    pub dt: f64,
}

/// Node id → team/role lookup.
pub type NodeTable = BTreeMap<NodeId, NodeInfo>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
    #[error("time step must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("node {0} is not in the roster")]
    UnknownNode(NodeId),
    #[error("no team attribution for node {0}")]
    MissingTeam(NodeId),
    #[error("formation VI {vif} exceeds total VI {total}")]
    VifExceedsTotal { vif: f64, total: f64 },
    #[error("invalid bounds arguments n={n}, m={m}")]
    InvalidBounds { n: usize, m: usize },
}

#[inline]
fn xlog2x(m: u32) -> f64 {
    if m <= 1 {
        0.0
    } else {
        let m = f64::from(m);
        m * m.log2()
    }
}

/// Sum of `m log2 m` over a multiset of counts, accumulated in ascending
/// count order so that equal multisets give bit-identical sums.
fn sum_xlog2x<I: IntoIterator<Item = u32>>(values: I, n: u32, hist: &mut Vec<u32>) -> f64 {
    hist.clear();
    hist.resize(n as usize + 1, 0);
    for v in values {
        hist[v as usize] += 1;
    }
    hist.iter()
        .enumerate()
        .skip(2)
        .filter(|(_, &c)| c > 0)
        .map(|(m, &c)| f64::from(c) * xlog2x(m as u32))
        .sum()
}

/// VI evaluated on a confusion matrix.
///
/// Uses `VI = (Σ a log a + Σ b log b − 2 Σ m log m) / n` over row sums `a`,
/// column sums `b` and cells `m`, which is the cell-wise formula rearranged.
/// The result is exactly symmetric under transposition and exactly zero for
/// monomial matrices.
pub fn vi_from_confusion(m: &ConfusionMatrix) -> f64 {
    let n = m.total();
    if n == 0 {
        return 0.0;
    }
    let mut hist = Vec::new();
    let a = sum_xlog2x(m.row_sums().iter().copied(), n, &mut hist);
    let b = sum_xlog2x(m.col_sums().iter().copied(), n, &mut hist);
    let c = sum_xlog2x(m.counts().iter().copied().filter(|&v| v > 0), n, &mut hist);
    ((a + b) - 2.0 * c).max(0.0) / f64::from(n)
}

/// Contribution of one confusion cell with `m` shared nodes between clusters
/// of sizes `a` and `b`, out of `n` nodes.
pub fn cell_contribution(m: u32, a: u32, b: u32, n: u32) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let r = f64::from(m) / f64::from(n);
    let ratio = (f64::from(a) * f64::from(b)) / (f64::from(m) * f64::from(m));
    r * ratio.log2()
}

pub fn vi(x: &Clustering, y: &Clustering) -> Result<Bits, MetricError> {
    let m = confusion(x, y)?;
    Ok(Bits(vi_from_confusion(&m)))
}

pub fn vi_rate(x: &Clustering, y: &Clustering, dt: f64) -> Result<RateBits, MetricError> {
    if !(dt > 0.0) {
        return Err(MetricError::NonPositiveDt(dt));
    }
    let bits = vi(x, y)?;
    Ok(RateBits {
        value: bits.0 / dt,
        dt,
    })
}

/// Share of the transition's VI attributed to `node`: its cell's
/// contribution divided equally among the nodes in that cell.
pub fn node_contribution(x: &Clustering, y: &Clustering, node: NodeId) -> Result<Bits, MetricError> {
    if x.roster() != y.roster() {
        return Err(ClusteringError::RosterMismatch.into());
    }
    let i = x.cluster_of(node).ok_or(MetricError::UnknownNode(node))?;
    let j = y.cluster_of(node).ok_or(MetricError::UnknownNode(node))?;
    let (xi, yj) = (&x.clusters()[i], &y.clusters()[j]);
    let shared = xi.iter().filter(|n| yj.binary_search(n).is_ok()).count() as u32;
    let n = x.node_count() as u32;
    let cell = cell_contribution(shared, xi.len() as u32, yj.len() as u32, n);
    Ok(Bits(cell / f64::from(shared)))
}

/// Per-node contributions for every node of the roster, computed in one
/// pass over the confusion matrix.
pub fn node_contributions(x: &Clustering, y: &Clustering) -> Result<BTreeMap<NodeId, f64>, MetricError> {
    let m = confusion(x, y)?;
    let n = m.total();
    let mut out = BTreeMap::new();
    for (i, xi) in x.clusters().iter().enumerate() {
        for (j, yj) in y.clusters().iter().enumerate() {
            let shared = m.get(i, j);
            if shared == 0 {
                continue;
            }
            let per = cell_contribution(shared, m.row_sums()[i], m.col_sums()[j], n) / f64::from(shared);
            for node in xi.iter().filter(|v| yj.binary_search(v).is_ok()) {
                out.insert(*node, per);
            }
        }
    }
    Ok(out)
}

/// Total VI split into formation and compositional parts, per node and per team.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViBreakdown {
    pub total: Bits,
    pub formation_part: Bits,
    pub compositional_part: Bits,
    pub per_node: BTreeMap<NodeId, Bits>,
    pub home: Bits,
    pub visitor: Bits,
}

impl ViBreakdown {
    pub fn team(&self, team: Team) -> Bits {
        match team {
            Team::Home => self.home,
            Team::Visitor => self.visitor,
        }
    }
}

/// Assembles a [`ViBreakdown`] from a precomputed formation part `vif`.
/// Goal frames count toward the team defending them, as recorded in `nodes`.
pub fn breakdown(x: &Clustering, y: &Clustering, vif: Bits, nodes: &NodeTable) -> Result<ViBreakdown, MetricError> {
    let total = vi(x, y)?.0;
    if vif.0 > total {
        return Err(MetricError::VifExceedsTotal { vif: vif.0, total });
    }
    let per = node_contributions(x, y)?;
    let (mut home, mut visitor) = (0.0, 0.0);
    for (node, &v) in &per {
        match nodes.get(node).map(|i| i.team) {
            Some(Team::Home) => home += v,
            Some(Team::Visitor) => visitor += v,
            None => return Err(MetricError::MissingTeam(*node)),
        }
    }
    Ok(ViBreakdown {
        total: Bits(total),
        formation_part: vif,
        compositional_part: Bits(total - vif.0),
        per_node: per.into_iter().map(|(k, v)| (k, Bits(v))).collect(),
        home: Bits(home),
        visitor: Bits(visitor),
    })
}

/// Nominal VI bounds for `n` nodes and at most `m` clusters:
/// smallest nonzero value `2/n` and the ceiling `log2(m)`.
///
/// The ceiling is the figure used for soccer clusterings (12 pairs of 24
/// nodes); the general upper bound on any pair of partitions is `log2(n)`.
pub fn vi_bounds(n: usize, m: usize) -> Result<(Bits, Bits), MetricError> {
    if n < 2 || m < 1 || m > n {
        return Err(MetricError::InvalidBounds { n, m });
    }
    Ok((Bits(2.0 / n as f64), Bits((m as f64).log2())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{Profile, Role};

    fn cl(groups: &[&[u32]]) -> Clustering {
        Clustering::from_clusters(
            groups.iter().map(|g| g.iter().map(|&i| NodeId(i)).collect::<Vec<_>>()),
            Profile::Generic,
        )
        .unwrap()
    }

    fn table(n: u32) -> NodeTable {
        (0..n)
            .map(|i| {
                let team = if i % 2 == 0 { Team::Home } else { Team::Visitor };
                (NodeId(i), NodeInfo { id: NodeId(i), team, role: Role::Player })
            })
            .collect()
    }

    // Cell-wise formula evaluated directly over set intersections.
    fn brute_vi(x: &Clustering, y: &Clustering) -> f64 {
        let n = x.node_count() as f64;
        let mut s = 0.0;
        for a in x.clusters() {
            for b in y.clusters() {
                let m = a.iter().filter(|v| b.contains(v)).count() as f64;
                if m > 0.0 {
                    let r = m / n;
                    let p = a.len() as f64 / n;
                    let q = b.len() as f64 / n;
                    s -= r * ((r / p).log2() + (r / q).log2());
                }
            }
        }
        s
    }

    #[test]
    fn identical_is_zero() {
        let x = cl(&[&[0, 1], &[2, 3, 4]]);
        assert_eq!(vi(&x, &x).unwrap().0, 0.0);
        assert_eq!(vi_rate(&x, &x, 0.3).unwrap().value, 0.0);
        assert_eq!(node_contribution(&x, &x, NodeId(3)).unwrap().0, 0.0);
    }

    #[test]
    fn small_examples_match_brute_force() {
        let x = cl(&[&[0, 1], &[2, 3]]);
        let y = cl(&[&[0, 2], &[1, 3]]);
        assert_eq!(brute_vi(&x, &y), 2.0);
        assert!((vi(&x, &y).unwrap().0 - 2.0).abs() < 1e-12);
        let whole = cl(&[&[0, 1, 2, 3]]);
        assert_eq!(brute_vi(&whole, &x), 1.0);
        assert!((vi(&whole, &x).unwrap().0 - 1.0).abs() < 1e-12);
        let r = vi_rate(&x, &y, 0.1).unwrap();
        assert!((r.value - 20.0).abs() < 1e-9);
    }

    #[test]
    fn rate_rejects_bad_dt() {
        let x = cl(&[&[0, 1]]);
        assert_eq!(vi_rate(&x, &x, 0.0).unwrap_err(), MetricError::NonPositiveDt(0.0));
        assert!(vi_rate(&x, &x, -1.0).is_err());
        assert!(vi_rate(&x, &x, f64::NAN).is_err());
    }

    #[test]
    fn unknown_node() {
        let x = cl(&[&[0, 1]]);
        assert_eq!(
            node_contribution(&x, &x, NodeId(9)).unwrap_err(),
            MetricError::UnknownNode(NodeId(9))
        );
    }

    #[test]
    fn breakdown_swapped_composition() {
        let x = cl(&[&[0, 1], &[2, 3]]);
        let y = cl(&[&[0, 2], &[1, 3]]);
        let b = breakdown(&x, &y, Bits(0.0), &table(4)).unwrap();
        assert!((b.total.0 - 2.0).abs() < 1e-12);
        assert_eq!(b.formation_part.0, 0.0);
        assert!((b.compositional_part.0 - 2.0).abs() < 1e-12);
        for v in b.per_node.values() {
            assert!((v.0 - 0.5).abs() < 1e-12);
        }
        assert!((b.home.0 + b.visitor.0 - b.total.0).abs() < 1e-12);
        assert!(matches!(
            breakdown(&x, &y, Bits(2.5), &table(4)),
            Err(MetricError::VifExceedsTotal { .. })
        ));
        let mut partial = table(4);
        partial.remove(&NodeId(3));
        assert_eq!(
            breakdown(&x, &y, Bits(0.0), &partial).unwrap_err(),
            MetricError::MissingTeam(NodeId(3))
        );
    }

    #[test]
    fn breakdown_identity_all_zero() {
        let x = cl(&[&[0, 1], &[2, 3]]);
        let b = breakdown(&x, &x, Bits(0.0), &table(4)).unwrap();
        assert_eq!(b.total.0, 0.0);
        assert_eq!(b.compositional_part.0, 0.0);
        assert!(b.per_node.values().all(|v| v.0 == 0.0));
        assert_eq!((b.home.0, b.visitor.0), (0.0, 0.0));
    }

    #[test]
    fn bounds_examples() {
        let (lo, hi) = vi_bounds(24, 12).unwrap();
        assert!((lo.0 - 1.0 / 12.0).abs() < 1e-15);
        assert!((hi.0 - 3.585).abs() < 5e-4);
        let (lo, hi) = vi_bounds(2, 1).unwrap();
        assert_eq!((lo.0, hi.0), (1.0, 0.0));
        assert!(vi_bounds(1, 1).is_err());
        assert!(vi_bounds(4, 5).is_err());
        assert!(vi_bounds(4, 0).is_err());
    }

    #[test]
    fn one_cluster_to_twelve_pairs() {
        let all: Vec<u32> = (0..24).collect();
        let whole = cl(&[&all]);
        let pairs: Vec<Vec<u32>> = (0..12).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let refs: Vec<&[u32]> = pairs.iter().map(|p| p.as_slice()).collect();
        let split = cl(&refs);
        let v = vi(&whole, &split).unwrap().0;
        assert!((v - 12f64.log2()).abs() < 1e-12);
        assert_eq!(v, vi(&split, &whole).unwrap().0);
    }
}
