//! Grid search over the RBF SVM's `C` and `gamma`, scored by F1_avg.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::svm::{train_svm, Kernel, SvmParams};
use super::tfidf::SparseVec;
use super::{LearnerError, Result};
use crate::corpus::StanceLabel;
use crate::evaluation::score_labels;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub c_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            c_values: vec![10.0, 100.0, 300.0, 500.0, 700.0, 1000.0],
            gamma_values: vec![0.0001, 0.001, 0.01, 0.1, 0.75, 1.0],
        }
    }
}

impl GridSpec {
    /// Cells sorted by C, then gamma, both ascending.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut c = self.c_values.clone();
        let mut g = self.gamma_values.clone();
        c.sort_by(f64::total_cmp);
        g.sort_by(f64::total_cmp);
        c.iter().flat_map(|&c| g.iter().map(move |&g| (c, g))).collect()
    }
}

/// Held-out data for scoring each cell.
#[derive(Clone, Copy, Debug)]
pub enum Validation<'a> {
    Dev {
        x: &'a [SparseVec],
        y: &'a [StanceLabel],
    },
    /// Mean F1_avg over `k` folds of the training data, for corpora without a dev split.
    KFold { k: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub c: f64,
    pub gamma: f64,
    pub f1_avg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: GridCell,
    pub cells: Vec<GridCell>,
}

fn cell_score(
    x: &[SparseVec],
    y: &[StanceLabel],
    validation: Validation<'_>,
    params: &SvmParams,
) -> Result<f64> {
    match validation {
        Validation::Dev { x: dx, y: dy } => {
            let model = train_svm(x, y, params)?;
            let pred = model.predict_all(dx);
            Ok(score_labels("grid", dy, &pred).expect("aligned").f1_avg)
        }
        Validation::KFold { k, seed } => {
            let folds = fold_assignment(x.len(), k, seed)?;
            let mut total = 0.0;
            for fold in 0..k {
                let (mut tx, mut ty, mut vx, mut vy) = (vec![], vec![], vec![], vec![]);
                for (i, &f) in folds.iter().enumerate() {
                    if f == fold {
                        vx.push(x[i].clone());
                        vy.push(y[i]);
                    } else {
                        tx.push(x[i].clone());
                        ty.push(y[i]);
                    }
                }
                let model = train_svm(&tx, &ty, params)?;
                total += score_labels("grid", &vy, &model.predict_all(&vx)).expect("aligned").f1_avg;
            }
            Ok(total / k as f64)
        }
    }
}

/// Fold index per item: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 || k > n {
        return Err(LearnerError::InvalidParam(format!("cannot make {k} folds from {n} items")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut crate::seeded_rng(seed));
    let mut folds = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        folds[i] = pos % k;
    }
    Ok(folds)
}

/// Trains one RBF SVM per cell (in parallel) and keeps the best F1_avg; ties go
/// to the smaller C, then the smaller gamma. `base` supplies tolerance and cache size.
pub fn grid_search(
    x: &[SparseVec],
    y: &[StanceLabel],
    validation: Validation<'_>,
    grid: &GridSpec,
    base: &SvmParams,
) -> Result<GridResult> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(LearnerError::InvalidParam("empty grid".into()));
    }
    let scored: Vec<GridCell> = cells
        .par_iter()
        .map(|&(c, gamma)| {
            let params = SvmParams {
                c,
                kernel: Kernel::Rbf { gamma },
                ..*base
            };
            let f1_avg = cell_score(x, y, validation, &params)?;
            log::debug!("grid C={c} gamma={gamma}: F1_avg {f1_avg:.4}");
            Ok(GridCell { c, gamma, f1_avg })
        })
        .collect::<Result<_>>()?;
    let mut best = scored[0];
    for cell in &scored[1..] {
        if cell.f1_avg > best.f1_avg {
            best = *cell;
        }
    }
    Ok(GridResult { best, cells: scored })
}

#[cfg(test)]
mod tests {
    use super::*;
    use StanceLabel::*;

    fn data() -> (Vec<SparseVec>, Vec<StanceLabel>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..12 {
            let d = i as f64 * 0.03;
            x.push(SparseVec::from_dense(&[d, 1.0 - d]));
            y.push(Against);
            x.push(SparseVec::from_dense(&[1.0 - d, d]));
            y.push(Favor);
        }
        (x, y)
    }

    #[test]
    fn singleton_grid() {
        let (x, y) = data();
        let grid = GridSpec {
            c_values: vec![1.0],
            gamma_values: vec![1.0],
        };
        let r = grid_search(&x, &y, Validation::Dev { x: &x, y: &y }, &grid, &SvmParams::rbf(1.0, 1.0)).unwrap();
        assert_eq!((r.best.c, r.best.gamma), (1.0, 1.0));
        assert_eq!(r.cells.len(), 1);
    }

    #[test]
    fn ties_prefer_smaller_c_then_gamma() {
        let (x, y) = data();
        let grid = GridSpec {
            c_values: vec![100.0, 10.0],
            gamma_values: vec![1.0, 0.5],
        };
        let r = grid_search(&x, &y, Validation::Dev { x: &x, y: &y }, &grid, &SvmParams::rbf(1.0, 1.0)).unwrap();
        assert!(r.cells.iter().all(|c| c.f1_avg == 100.0));
        assert_eq!((r.best.c, r.best.gamma), (10.0, 0.5));
    }

    #[test]
    fn kfold_runs() {
        let (x, y) = data();
        let grid = GridSpec {
            c_values: vec![10.0],
            gamma_values: vec![1.0],
        };
        let r = grid_search(&x, &y, Validation::KFold { k: 3, seed: 1 }, &grid, &SvmParams::rbf(1.0, 1.0)).unwrap();
        assert!(r.best.f1_avg > 90.0);
        assert!(fold_assignment(3, 4, 0).is_err());
    }

    #[test]
    fn default_grid_contains_reported_optima() {
        let cells = GridSpec::default().cells();
        assert_eq!(cells.len(), 36);
        for pair in [(700.0, 0.001), (500.0, 0.001)] {
            assert!(cells.contains(&pair));
        }
    }
}
