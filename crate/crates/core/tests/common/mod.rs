//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use vinfo::{Clustering, NodeId, NodeInfo, Profile, Role, Team};
use vinfo::metric::NodeTable;

pub fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&i| NodeId(i)).collect()
}

/// Golden transition, rows (time t) by simplex number.
pub const ROWS: [(u32, &[u32]); 9] = [
    (1, &[0, 1]),
    (2, &[2, 3]),
    (3, &[4, 5, 6]),
    (4, &[7, 8]),
    (5, &[9, 10, 14]),
    (6, &[11, 13, 15]),
    (7, &[16, 17, 18]),
    (8, &[12, 20, 21, 22]),
    (9, &[19, 23]),
];

/// Columns (time t + 0.9 s) by simplex number.
pub const COLS: [(u32, &[u32]); 9] = [
    (1, &[0, 1]),
    (2, &[2, 3]),
    (10, &[4, 5, 6, 7, 8]),
    (11, &[11, 13]),
    (12, &[15, 16]),
    (13, &[17, 18]),
    (14, &[12, 20, 22]),
    (15, &[9, 10, 14, 21]),
    (9, &[19, 23]),
];

/// Shared-node counts, rows and columns in the order above.
pub const COUNTS: [[u32; 9]; 9] = [
    [2, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 3, 0, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 3, 0],
    [0, 0, 0, 2, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 2, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 3, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 2],
];

/// Published per-cell contributions, six decimals.
pub const CELL_VI: [[f64; 9]; 9] = [
    [0.0; 9],
    [0.0; 9],
    [0.0, 0.0, 0.092121, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.110161, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05188, 0.0],
    [0.0, 0.0, 0.0, 0.048747, 0.107707, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.107707, 0.048747, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05188, 0.166667, 0.0],
    [0.0; 9],
];

pub const GOLDEN_VI: f64 = 0.785615;
pub const GOLDEN_RATE: f64 = 0.872905;
pub const GOLDEN_DT: f64 = 0.9;

pub fn golden_pair() -> (Clustering, Clustering) {
    let x = Clustering::from_clusters(ROWS.iter().map(|r| ids(r.1)).collect::<Vec<_>>(), Profile::Soccer).unwrap();
    let y = Clustering::from_clusters(COLS.iter().map(|c| ids(c.1)).collect::<Vec<_>>(), Profile::Soccer).unwrap();
    (x, y)
}

/// Even ids home, odd ids visitor.
pub fn alternating_teams(n: u32) -> NodeTable {
    (0..n)
        .map(|i| {
            let team = if i % 2 == 0 { Team::Home } else { Team::Visitor };
            (NodeId(i), NodeInfo { id: NodeId(i), team, role: Role::Player })
        })
        .collect()
}

fn label_map(c: &Clustering) -> HashMap<NodeId, usize> {
    c.clusters().iter().enumerate().flat_map(|(k, members)| members.iter().map(move |&n| (n, k))).collect()
}

fn entropy<I: IntoIterator<Item = usize>>(counts: I, n: f64) -> f64 {
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// VI as `2 H(X,Y) − H(X) − H(Y)`, from label maps only.
pub fn oracle_vi(x: &Clustering, y: &Clustering) -> f64 {
    let (lx, ly) = (label_map(x), label_map(y));
    let n = lx.len() as f64;
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mx: HashMap<usize, usize> = HashMap::new();
    let mut my: HashMap<usize, usize> = HashMap::new();
    for (node, &a) in &lx {
        let b = ly[node];
        *joint.entry((a, b)).or_default() += 1;
        *mx.entry(a).or_default() += 1;
        *my.entry(b).or_default() += 1;
    }
    2.0 * entropy(joint.into_values(), n) - entropy(mx.into_values(), n) - entropy(my.into_values(), n)
}

/// Uniform random labels over `k` groups (generic profile).
pub fn random_clustering<R: Rng>(rng: &mut R, n: u32, k: u32) -> Clustering {
    let nodes: Vec<NodeId> = (0..n).map(NodeId).collect();
    let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..k.max(1))).collect();
    Clustering::from_labels(&nodes, &labels, Profile::Generic).unwrap()
}

/// Random partition of `0..n` with every cluster of size ≥ 2.
pub fn random_soccer<R: Rng>(rng: &mut R, n: u32) -> Clustering {
    let mut nodes: Vec<NodeId> = (0..n).map(NodeId).collect();
    nodes.shuffle(rng);
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let mut s = rng.gen_range(2..=left.min(6).max(2));
        if left - s == 1 {
            s += 1;
        }
        if s > left {
            s = left;
        }
        sizes.push(s);
        left -= s;
    }
    let mut clusters = Vec::new();
    let mut at = 0;
    for s in sizes {
        clusters.push(nodes[at..at + s as usize].to_vec());
        at += s as usize;
    }
    Clustering::from_clusters(clusters, Profile::Soccer).unwrap()
}

/// Moves up to `moves` random nodes into a random other cluster, keeping
/// the soccer profile valid.
pub fn perturb<R: Rng>(rng: &mut R, c: &Clustering, moves: usize) -> Clustering {
    let mut clusters: Vec<Vec<NodeId>> = c.clusters().to_vec();
    for _ in 0..moves {
        let from = rng.gen_range(0..clusters.len());
        if clusters[from].len() < 3 && clusters.len() > 1 {
            // dissolve a pair into a neighbour
            let to = (from + 1 + rng.gen_range(0..clusters.len() - 1)) % clusters.len();
            let moved = std::mem::take(&mut clusters[from]);
            clusters[to].extend(moved);
            clusters.retain(|k| !k.is_empty());
            continue;
        }
        let i = rng.gen_range(0..clusters[from].len());
        let node = clusters[from].swap_remove(i);
        if rng.gen_bool(0.3) && clusters[from].len() >= 3 {
            let j = rng.gen_range(0..clusters[from].len());
            let other = clusters[from].swap_remove(j);
            clusters.push(vec![node, other]);
        } else {
            let to = rng.gen_range(0..clusters.len());
            if to == from {
                clusters[from].push(node);
            } else {
                clusters[to].push(node);
            }
        }
    }
    Clustering::from_clusters(clusters, Profile::Soccer).unwrap()
}

/// All set partitions of `0..n` as restricted-growth strings.
pub fn all_set_partitions(n: u32) -> Vec<Clustering> {
    fn go(i: usize, n: usize, labels: &mut Vec<u32>, max: u32, out: &mut Vec<Vec<u32>>) {
        if i == n {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            go(i + 1, n, labels, max.max(l), out);
            labels.pop();
        }
    }
    let mut raw = Vec::new();
    if n > 0 {
        go(1, n as usize, &mut vec![0], 0, &mut raw);
    }
    let nodes: Vec<NodeId> = (0..n).map(NodeId).collect();
    raw.into_iter().map(|l| Clustering::from_labels(&nodes, &l, Profile::Generic).unwrap()).collect()
}

/// Brute-force nearest neighbour, ties to the lower index.
pub fn nearest(points: &[(f64, f64)], i: usize) -> usize {
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for (j, p) in points.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = (p.0 - points[i].0).hypot(p.1 - points[i].1);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}
