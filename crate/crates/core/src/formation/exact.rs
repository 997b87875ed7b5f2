//! Exhaustive minimum-VI search over integer matrices with fixed margins.

use crate::clustering::{ConfusionMatrix, Formation};
use crate::metric::{vi_from_confusion, Bits};

use super::{xlog2x_table, FormationError, FormationTransition};

/// Global minimum of VI over all non-negative integer matrices whose row
/// sums are `f1` and column sums are `f2`.
///
/// Since the margins fix both marginal entropies, minimizing VI is the same
/// as maximizing `Σ m log m` over the cells; the search fills the matrix
/// row by row and prunes a branch once even the most concentrated completion
/// of the remaining row mass cannot beat the incumbent.
pub fn min_formation_vi_exact(
    f1: &Formation,
    f2: &Formation,
    limit: u32,
) -> Result<FormationTransition, FormationError> {
    let n = f1.total();
    if n != f2.total() {
        return Err(FormationError::SizeMismatch { left: n, right: f2.total() });
    }
    if n > limit {
        return Err(FormationError::AboveExactLimit { n, limit });
    }
    let rows = f1.sizes().to_vec();
    let cols = f2.sizes().to_vec();
    let mut search = Search {
        g: xlog2x_table(n),
        cols: cols.len(),
        row_rem: rows.clone(),
        col_rem: cols.clone(),
        cells: vec![0; rows.len() * cols.len()],
        best: f64::NEG_INFINITY,
        best_cells: Vec::new(),
        tail_bound: Vec::new(),
    };
    // tail_bound[i] = Σ g(rows[i'']) for i'' > i
    search.tail_bound = (0..rows.len())
        .map(|i| rows[i + 1..].iter().map(|&r| search.g[r as usize]).sum())
        .collect();
    search.fill(0, 0, 0.0);

    let witness = ConfusionMatrix::from_counts(rows.len(), cols.len(), search.best_cells)
        .expect("enumerated matrix realizes positive margins");
    let min_vi = Bits(vi_from_confusion(&witness));
    Ok(FormationTransition {
        source: f1.clone(),
        dest: f2.clone(),
        min_vi,
        witness,
    })
}

struct Search {
    g: Vec<f64>,
    cols: usize,
    row_rem: Vec<u32>,
    col_rem: Vec<u32>,
    cells: Vec<u32>,
    best: f64,
    best_cells: Vec<u32>,
    tail_bound: Vec<f64>,
}

impl Search {
    fn fill(&mut self, i: usize, j: usize, score: f64) {
        let rows = self.row_rem.len();
        if i == rows {
            if score > self.best + 1e-12 {
                self.best = score;
                self.best_cells = self.cells.clone();
            }
            return;
        }
        let bound = score + self.g[self.row_rem[i] as usize] + self.tail_bound[i];
        if bound <= self.best + 1e-12 {
            return;
        }
        let (ni, nj) = if j + 1 == self.cols { (i + 1, 0) } else { (i, j + 1) };
        let rem = self.row_rem[i];
        let cap = rem.min(self.col_rem[j]);
        // the last column must absorb the rest of the row
        let range: Vec<u32> = if j + 1 == self.cols {
            if rem > self.col_rem[j] {
                return;
            }
            vec![rem]
        } else {
            (0..=cap).rev().collect()
        };
        for v in range {
            self.cells[i * self.cols + j] = v;
            self.row_rem[i] -= v;
            self.col_rem[j] -= v;
            self.fill(ni, nj, score + self.g[v as usize]);
            self.row_rem[i] += v;
            self.col_rem[j] += v;
        }
        self.cells[i * self.cols + j] = 0;
    }
}
