//! Formation-level minimum VI (the part of a transition's VI forced by the
//! change of cluster sizes alone) and the size of the formation space.

mod counts;
mod exact;
mod heuristic;
mod oracle;

use std::collections::HashMap;
use std::sync::OnceLock;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{confusion, Clustering, ClusteringError, ConfusionMatrix, Formation};
use crate::metric::{vi_from_confusion, Bits};

pub use counts::{bell_no_singletons, bell_numbers, count_spaces, partitions_min_part, SpaceCounts, MAX_COUNT_N};
pub use exact::min_formation_vi_exact;
pub use heuristic::min_formation_vi_heuristic;
pub use oracle::{all_formations, heuristic_vs_exact, GapRecord, OracleReport, SizeSummary};

/// Default node-count limit for the exhaustive solver.
pub const DEFAULT_EXACT_LIMIT: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormationError {
    #[error("formations cover different node counts ({left} vs {right})")]
    SizeMismatch { left: u32, right: u32 },
    #[error("n = {n} exceeds the exact-solver limit {limit}")]
    AboveExactLimit { n: u32, limit: u32 },
    #[error("seed matrix does not realize the requested formations")]
    InvalidSeed,
    #[error("n = {n} outside 1..={max}")]
    CountRange { n: u32, max: u32 },
    #[error("minimum part size must be at least 1")]
    InvalidMinPart,
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
}

/// A minimum-VI realization of a formation change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormationTransition {
    pub source: Formation,
    pub dest: Formation,
    pub min_vi: Bits,
    pub witness: ConfusionMatrix,
}

impl FormationTransition {
    /// The same transition read in the opposite direction.
    pub fn reversed(&self) -> FormationTransition {
        FormationTransition {
            source: self.dest.clone(),
            dest: self.source.clone(),
            min_vi: self.min_vi,
            witness: self.witness.transpose(),
        }
    }

    fn identity(f: &Formation) -> FormationTransition {
        let k = f.parts();
        let mut cells = vec![0u32; k * k];
        for (i, &s) in f.sizes().iter().enumerate() {
            cells[i * k + i] = s;
        }
        let witness = ConfusionMatrix::from_counts(k, k, cells).expect("diagonal of positive sizes");
        FormationTransition {
            source: f.clone(),
            dest: f.clone(),
            min_vi: Bits(0.0),
            witness,
        }
    }
}

/// `g[m] = m log2 m` for `m = 0..=n`.
pub(crate) fn xlog2x_table(n: u32) -> Vec<f64> {
    (0..=n)
        .map(|m| if m <= 1 { 0.0 } else { f64::from(m) * f64::from(m).log2() })
        .collect()
}

/// Formation-VI solver with a shared memo of seed-independent heuristic
/// results, keyed by the oriented formation pair.
#[derive(Debug, Default)]
pub struct FormationSolver {
    cache: RwLock<HashMap<(Formation, Formation), FormationTransition>>,
}

impl FormationSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cached_pairs(&self) -> usize {
        self.cache.read().len()
    }

    /// Seed-independent heuristic minimum; symmetric by construction since
    /// every pair is solved in one orientation (smaller formation first).
    pub fn unseeded(&self, f1: &Formation, f2: &Formation) -> Result<FormationTransition, FormationError> {
        if f1.total() != f2.total() {
            return Err(FormationError::SizeMismatch { left: f1.total(), right: f2.total() });
        }
        if f1 == f2 {
            return Ok(FormationTransition::identity(f1));
        }
        let flipped = f1 > f2;
        let key = if flipped { (f2.clone(), f1.clone()) } else { (f1.clone(), f2.clone()) };
        let hit = self.cache.read().get(&key).cloned();
        let oriented = match hit {
            Some(t) => t,
            None => {
                let t = min_formation_vi_heuristic(&key.0, &key.1, None)?;
                self.cache.write().entry(key).or_insert(t).clone()
            }
        };
        Ok(if flipped { oriented.reversed() } else { oriented })
    }

    /// VI_f of an observed transition: the better of the cached formation
    /// optimum and a local search started from the observed confusion matrix.
    pub fn transition(&self, x: &Clustering, y: &Clustering) -> Result<FormationTransition, FormationError> {
        let observed = confusion(x, y)?;
        self.from_confusion(&observed)
    }

    pub fn from_confusion(&self, observed: &ConfusionMatrix) -> Result<FormationTransition, FormationError> {
        let f1 = observed.row_formation();
        let f2 = observed.col_formation();
        if f1 == f2 {
            return Ok(FormationTransition::identity(&f1));
        }
        let base = self.unseeded(&f1, &f2)?;
        let observed_vi = vi_from_confusion(observed);
        // orient like the cache so the result is symmetric in (x, y)
        let flipped = f1 > f2;
        let seed = if flipped { observed.transpose() } else { observed.clone() };
        let improved = heuristic::descend(&seed);
        let improved = if flipped { improved.transpose() } else { improved };
        let improved_vi = vi_from_confusion(&improved);

        let mut best = (base.min_vi.0, base.witness);
        if improved_vi < best.0 {
            best = (improved_vi, improved);
        }
        if observed_vi < best.0 {
            best = (observed_vi, observed.clone());
        }
        Ok(FormationTransition {
            source: f1,
            dest: f2,
            min_vi: Bits(best.0),
            witness: best.1,
        })
    }
}

fn shared_solver() -> &'static FormationSolver {
    static SOLVER: OnceLock<FormationSolver> = OnceLock::new();
    SOLVER.get_or_init(FormationSolver::new)
}

/// Formation part of the VI between `x` and `y`; never exceeds `vi(x, y)`.
pub fn vif_for_transition(x: &Clustering, y: &Clustering) -> Result<Bits, FormationError> {
    Ok(shared_solver().transition(x, y)?.min_vi)
}
