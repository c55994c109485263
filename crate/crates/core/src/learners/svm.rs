//! Kernel SVM trained with SMO (second-order working set selection, maintained
//! gradient), one-vs-rest for multiclass problems.
//!
//! The binary dual solved is
//!
//! ```text
//! min_a  1/2 a'Qa - e'a    s.t.  y'a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! and the decision function is `f(x) = sum_i a_i y_i K(x_i, x) - rho`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::tfidf::SparseVec;
use super::{class_list, LearnerError, Result};
use crate::corpus::StanceLabel;

const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    /// `exp(-gamma * |x - z|^2)`
    Rbf { gamma: f64 },
}

impl Kernel {
    /// Kernel value given both squared norms and the dot product.
    fn eval(self, norm_a: f64, norm_b: f64, dot: f64) -> f64 {
        match self {
            Kernel::Linear => dot,
            Kernel::Rbf { gamma } => (-gamma * (norm_a + norm_b - 2.0 * dot).max(0.0)).exp(),
        }
    }

    pub fn compute(self, a: &SparseVec, b: &SparseVec) -> f64 {
        self.eval(a.norm_sq(), b.norm_sq(), a.dot(b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: Kernel,
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    /// Kernel row cache budget in megabytes.
    pub cache_mb: usize,
}

impl SvmParams {
    pub fn rbf(c: f64, gamma: f64) -> Self {
        SvmParams {
            c,
            kernel: Kernel::Rbf { gamma },
            tolerance: 1e-3,
            cache_mb: 200,
        }
    }

    pub fn linear(c: f64) -> Self {
        SvmParams {
            kernel: Kernel::Linear,
            ..SvmParams::rbf(c, 1.0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(LearnerError::InvalidParam(format!("C must be positive, got {}", self.c)));
        }
        if let Kernel::Rbf { gamma } = self.kernel {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(LearnerError::InvalidParam(format!("gamma must be positive, got {gamma}")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(LearnerError::InvalidParam("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Kernel rows over a fixed training set, computed on demand and kept in a
/// bounded FIFO cache.
pub struct KernelMatrix<'a> {
    x: &'a [SparseVec],
    norms: Vec<f64>,
    kernel: Kernel,
    diag: Vec<f64>,
    rows: HashMap<usize, Vec<f64>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelMatrix<'a> {
    pub fn new(x: &'a [SparseVec], kernel: Kernel, cache_mb: usize) -> Self {
        let norms: Vec<f64> = x.iter().map(SparseVec::norm_sq).collect();
        let diag = norms.iter().map(|&n| kernel.eval(n, n, n)).collect();
        let row_bytes = (x.len() * 8).max(1);
        KernelMatrix {
            x,
            norms,
            kernel,
            diag,
            rows: HashMap::new(),
            order: VecDeque::new(),
            capacity: (cache_mb * 1024 * 1024 / row_bytes).max(2),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        if let Some(row) = self.rows.get(&i) {
            return row[j];
        }
        self.kernel.eval(self.norms[i], self.norms[j], self.x[i].dot(&self.x[j]))
    }

    fn ensure_row(&mut self, i: usize) {
        if self.rows.contains_key(&i) {
            return;
        }
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows.remove(&old);
            }
        }
        let xi = &self.x[i];
        let ni = self.norms[i];
        let row = self
            .x
            .iter()
            .zip(&self.norms)
            .map(|(xj, &nj)| self.kernel.eval(ni, nj, xi.dot(xj)))
            .collect();
        self.rows.insert(i, row);
        self.order.push_back(i);
    }

    pub fn row(&mut self, i: usize) -> &[f64] {
        self.ensure_row(i);
        &self.rows[&i]
    }

    /// Two rows at once; both stay cached while borrowed.
    fn rows2(&mut self, i: usize, j: usize) -> (&[f64], &[f64]) {
        self.ensure_row(i);
        self.ensure_row(j);
        if !self.rows.contains_key(&i) {
            // Capacity 2 with i evicted by j: recompute i without evicting j.
            self.capacity += 1;
            self.ensure_row(i);
            self.capacity -= 1;
        }
        (&self.rows[&i], &self.rows[&j])
    }
}

/// Solution of one binary dual problem.
#[derive(Clone, Debug, PartialEq)]
pub struct BinarySolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    /// `sum a - 1/2 a'Qa` (the maximized form of the dual).
    pub dual_objective: f64,
}

impl BinarySolution {
    /// Decision values on the training points themselves.
    pub fn training_decisions(&self, k: &mut KernelMatrix<'_>, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        let mut f = vec![-self.rho; n];
        for i in (0..n).filter(|&i| self.alpha[i] > 0.0) {
            let coef = self.alpha[i] * y[i];
            let row = k.row(i);
            for (fj, kij) in f.iter_mut().zip(row) {
                *fj += coef * kij;
            }
        }
        f
    }
}

/// SMO on a binary problem with labels `y` in {-1, +1}.
pub fn solve_binary(k: &mut KernelMatrix<'_>, y: &[f64], c: f64, tolerance: f64) -> BinarySolution {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    // Gradient of 1/2 a'Qa - e'a at a = 0.
    let mut grad = vec![-1.0; n];
    let max_iter = (100 * n).max(10_000_000);
    let mut iterations = 0;

    let up = |a: f64, yt: f64| if yt > 0.0 { a < c } else { a > 0.0 };
    let low = |a: f64, yt: f64| if yt > 0.0 { a > 0.0 } else { a < c };

    while iterations < max_iter {
        // i maximizes -y_t G_t over I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if up(alpha[t], y[t]) && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else { break };
        let ki = k.row(i).to_vec();
        let kii = k.diag(i);

        // j minimizes the second-order objective decrease over I_low.
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut obj_min = f64::INFINITY;
        for t in 0..n {
            if !low(alpha[t], y[t]) {
                continue;
            }
            let yg = y[t] * grad[t];
            gmax2 = gmax2.max(yg);
            let grad_diff = gmax + yg;
            if grad_diff > 0.0 {
                let quad = kii + k.diag(t) - 2.0 * ki[t];
                let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                if obj <= obj_min {
                    obj_min = obj;
                    j_sel = Some(t);
                }
            }
        }
        let Some(j) = j_sel else { break };
        if gmax + gmax2 < tolerance {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = ki[j];
        let quad = (kii + k.diag(j) - 2.0 * kij).max(TAU);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (d_i, d_j) = (alpha[i] - old_i, alpha[j] - old_j);
        let (ri, rj) = k.rows2(i, j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ri[t] * d_i + y[j] * rj[t] * d_j);
        }
    }
    if iterations >= max_iter {
        log::warn!("SMO stopped after {max_iter} iterations without reaching tolerance {tolerance}");
    }

    // rho: mean of y G over free vectors, else midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 { sum_free / free as f64 } else { (ub + lb) / 2.0 };

    // G = Qa - e, so a'Qa = a'(G + e).
    let quad: f64 = alpha.iter().zip(&grad).map(|(a, g)| a * (g + 1.0)).sum();
    let sum_alpha: f64 = alpha.iter().sum();
    BinarySolution {
        alpha,
        rho,
        iterations,
        dual_objective: sum_alpha - 0.5 * quad,
    }
}

/// One binary machine: coefficients `a_i y_i` over entries of the shared support-vector pool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryMachine {
    pub positive: StanceLabel,
    pub support: Vec<u32>,
    pub coef: Vec<f64>,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub params: SvmParams,
    /// AGAINST, FAVOR, NONE order, restricted to the classes seen in training.
    pub classes: Vec<StanceLabel>,
    pub support_vectors: Vec<SparseVec>,
    pub machines: Vec<BinaryMachine>,
}

/// One-vs-rest SMO. The kernel cache is shared by the binary problems.
pub fn train_svm(x: &[SparseVec], y: &[StanceLabel], params: &SvmParams) -> Result<SvmModel> {
    params.validate()?;
    if x.len() != y.len() {
        return Err(LearnerError::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(LearnerError::EmptyTrainingSet);
    }
    let classes = class_list(y);
    if classes.len() < 2 {
        return Err(LearnerError::SingleClass(classes[0]));
    }
    let mut k = KernelMatrix::new(x, params.kernel, params.cache_mb);
    let mut pool: BTreeMap<usize, u32> = BTreeMap::new();
    let mut solved = Vec::new();
    for &positive in &classes {
        let yb: Vec<f64> = y.iter().map(|&l| if l == positive { 1.0 } else { -1.0 }).collect();
        let sol = solve_binary(&mut k, &yb, params.c, params.tolerance);
        log::debug!(
            "svm {positive}-vs-rest: {} iterations, {} support vectors",
            sol.iterations,
            sol.alpha.iter().filter(|&&a| a > 0.0).count()
        );
        let sv: Vec<(usize, f64)> = (0..x.len())
            .filter(|&i| sol.alpha[i] > 0.0)
            .map(|i| (i, sol.alpha[i] * yb[i]))
            .collect();
        for &(i, _) in &sv {
            let next = pool.len() as u32;
            pool.entry(i).or_insert(next);
        }
        solved.push((positive, sv, sol.rho));
    }
    let mut support_vectors = vec![SparseVec::default(); pool.len()];
    for (&i, &p) in &pool {
        support_vectors[p as usize] = x[i].clone();
    }
    let machines = solved
        .into_iter()
        .map(|(positive, sv, rho)| BinaryMachine {
            positive,
            support: sv.iter().map(|(i, _)| pool[i]).collect(),
            coef: sv.iter().map(|(_, c)| *c).collect(),
            rho,
        })
        .collect();
    Ok(SvmModel {
        params: *params,
        classes,
        support_vectors,
        machines,
    })
}

impl SvmModel {
    /// One decision value per class, in `classes` order.
    pub fn decision_values(&self, x: &SparseVec) -> Vec<f64> {
        let nx = x.norm_sq();
        let kv: Vec<f64> = self
            .support_vectors
            .iter()
            .map(|sv| self.params.kernel.eval(sv.norm_sq(), nx, sv.dot(x)))
            .collect();
        self.machines
            .iter()
            .map(|m| {
                m.support
                    .iter()
                    .zip(&m.coef)
                    .map(|(&s, c)| c * kv[s as usize])
                    .sum::<f64>()
                    - m.rho
            })
            .collect()
    }

    /// Class with the largest decision value; ties go to the earliest class.
    pub fn predict(&self, x: &SparseVec) -> StanceLabel {
        let values = self.decision_values(x);
        let mut best = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = i;
            }
        }
        self.classes[best]
    }

    pub fn predict_all(&self, xs: &[SparseVec]) -> Vec<StanceLabel> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> Vec<SparseVec> {
        v.iter().map(|p| SparseVec::from_dense(p)).collect()
    }

    #[test]
    fn two_point_analytic_solution() {
        let x = pts(&[&[0.0], &[2.0]]);
        let y = [1.0, -1.0];
        let mut k = KernelMatrix::new(&x, Kernel::Linear, 1);
        let sol = solve_binary(&mut k, &y, 10.0, 1e-3);
        assert!((sol.alpha[0] - 0.5).abs() < 1e-9, "{:?}", sol.alpha);
        assert!((sol.alpha[1] - 0.5).abs() < 1e-9);
        // f(x) = -x + 1
        let f = sol.training_decisions(&mut k, &y);
        assert!((f[0] - 1.0).abs() < 1e-9 && (f[1] + 1.0).abs() < 1e-9, "{f:?}");
        assert!((sol.dual_objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn xor_with_rbf() {
        let x = pts(&[&[0.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]]);
        let y = [StanceLabel::Favor, StanceLabel::Favor, StanceLabel::Against, StanceLabel::Against];
        let model = train_svm(&x, &y, &SvmParams::rbf(10.0, 1.0)).unwrap();
        assert_eq!(model.predict_all(&x), y.to_vec());
    }

    #[test]
    fn dual_constraints_hold() {
        let x = pts(&[&[0.0, 0.1], &[0.3, 1.0], &[1.0, 0.2], &[0.9, 0.8], &[0.5, 0.5]]);
        let y = [1.0, -1.0, 1.0, -1.0, 1.0];
        let c = 2.0;
        let mut k = KernelMatrix::new(&x, Kernel::Rbf { gamma: 0.5 }, 1);
        let sol = solve_binary(&mut k, &y, c, 1e-3);
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(balance.abs() < 1e-8);
        assert!(sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
    }

    #[test]
    fn single_class_rejected() {
        let x = pts(&[&[0.0], &[1.0]]);
        let err = train_svm(&x, &[StanceLabel::None; 2], &SvmParams::linear(1.0)).unwrap_err();
        assert!(matches!(err, LearnerError::SingleClass(StanceLabel::None)));
        assert!(train_svm(&x, &[StanceLabel::None, StanceLabel::Favor], &SvmParams::rbf(1.0, 0.0)).is_err());
    }

    #[test]
    fn three_class_blobs() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (ci, (cx, cy)) in [(0.0, 0.0), (5.0, 0.0), (0.0, 5.0)].iter().enumerate() {
            for d in [-0.3, 0.0, 0.3] {
                x.push(SparseVec::from_dense(&[cx + d, cy - d]));
                y.push(StanceLabel::ALL[ci]);
            }
        }
        let model = train_svm(&x, &y, &SvmParams::rbf(10.0, 0.5)).unwrap();
        assert_eq!(model.predict_all(&x), y);
        assert_eq!(model.classes, StanceLabel::ALL.to_vec());
    }

    #[test]
    fn tiny_cache_matches_large_cache() {
        let x = pts(&[&[0.0, 0.1], &[0.3, 1.0], &[1.0, 0.2], &[0.9, 0.8], &[0.5, 0.5], &[0.2, 0.7]]);
        let y = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let kernel = Kernel::Rbf { gamma: 2.0 };
        let mut small = KernelMatrix::new(&x, kernel, 0);
        let mut big = KernelMatrix::new(&x, kernel, 10);
        assert_eq!(solve_binary(&mut small, &y, 5.0, 1e-3), solve_binary(&mut big, &y, 5.0, 1e-3));
    }
}
