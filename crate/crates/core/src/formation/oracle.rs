//! Exhaustive heuristic-versus-exact comparison over all formation pairs.

use serde::{Deserialize, Serialize};

use crate::clustering::Formation;

use super::{min_formation_vi_exact, min_formation_vi_heuristic, FormationError};

/// All integer partitions of `n`, each in ascending part order.
pub fn all_formations(n: u32) -> Vec<Formation> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Formation>) {
        if rem == 0 {
            out.push(Formation::new(cur.clone()).expect("positive parts"));
            return;
        }
        for p in (1..=max.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub source: Formation,
    pub dest: Formation,
    pub exact: f64,
    pub heuristic: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub witness: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: u32,
    pub pairs: usize,
    pub max_gap: f64,
    pub mean_gap: f64,
    pub mean_relative_gap: f64,
    pub nonzero_gaps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n_max: u32,
    pub pairs: usize,
    pub max_gap: f64,
    pub mean_gap: f64,
    pub mean_relative_gap: f64,
    pub per_n: Vec<SizeSummary>,
    /// Pairs where the heuristic missed the optimum, with the exact witness.
    pub nonzero: Vec<GapRecord>,
}

/// Gaps below this are rounding noise.
const GAP_EPS: f64 = 1e-9;

pub fn heuristic_vs_exact(n_max: u32, exact_limit: u32) -> Result<OracleReport, FormationError> {
    if n_max > exact_limit {
        return Err(FormationError::AboveExactLimit { n: n_max, limit: exact_limit });
    }
    let mut per_n = Vec::new();
    let mut nonzero = Vec::new();
    let (mut pairs, mut max_gap, mut gap_sum, mut rel_sum) = (0usize, 0f64, 0f64, 0f64);
    for n in 1..=n_max {
        let forms = all_formations(n);
        let (mut p, mut mx, mut gs, mut rs, mut nz) = (0usize, 0f64, 0f64, 0f64, 0usize);
        for a in &forms {
            for b in &forms {
                let exact = min_formation_vi_exact(a, b, exact_limit)?;
                let heur = min_formation_vi_heuristic(a, b, None)?;
                let gap = (heur.min_vi.0 - exact.min_vi.0).max(0.0);
                let gap = if gap < GAP_EPS { 0.0 } else { gap };
                let rel = if exact.min_vi.0 > 0.0 { gap / exact.min_vi.0 } else { 0.0 };
                p += 1;
                mx = mx.max(gap);
                gs += gap;
                rs += rel;
                if gap > 0.0 {
                    nz += 1;
                    nonzero.push(GapRecord {
                        source: a.clone(),
                        dest: b.clone(),
                        exact: exact.min_vi.0,
                        heuristic: heur.min_vi.0,
                        gap,
                        relative_gap: rel,
                        witness: exact.witness.counts().to_vec(),
                    });
                }
            }
        }
        per_n.push(SizeSummary {
            n,
            pairs: p,
            max_gap: mx,
            mean_gap: gs / p as f64,
            mean_relative_gap: rs / p as f64,
            nonzero_gaps: nz,
        });
        pairs += p;
        max_gap = max_gap.max(mx);
        gap_sum += gs;
        rel_sum += rs;
    }
    Ok(OracleReport {
        n_max,
        pairs,
        max_gap,
        mean_gap: if pairs > 0 { gap_sum / pairs as f64 } else { 0.0 },
        mean_relative_gap: if pairs > 0 { rel_sum / pairs as f64 } else { 0.0 },
        per_n,
        nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::partitions_min_part;

    #[test]
    fn formation_enumeration_counts() {
        for n in 1..=12 {
            assert_eq!(all_formations(n).len() as u64, partitions_min_part(n, 1));
        }
    }

    #[test]
    fn no_gap_up_to_six() {
        let r = heuristic_vs_exact(6, 10).unwrap();
        assert_eq!(r.max_gap, 0.0, "{:?}", r.nonzero);
    }
}
