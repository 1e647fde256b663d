//! DC training loop.
//!
//! The objective
//!
//! ```text
//! J(alpha, b, rho) = lambda * sum(alpha) + mean_i L_dr(y_i f(x_i), rho)
//! f(x_i)           = sum_j y_j alpha_j K(x_j, x_i) + b
//! ```
//!
//! is written as `Q1 - Q2` with both parts convex. Each iteration replaces
//! `Q2` by its linearization at the current iterate; the resulting convex
//! majorizer is piecewise linear, so minimizing it is a linear program in
//! `(alpha, b, rho, xi', xi'')` with `2N` inequality rows.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::{gram_matrix, KernelMatrix, KernelSpec};
use crate::loss::{l_d, l_dr_unchecked, LossConfig};
use crate::lp::{canonicalize, Bound, LpProblem, LpStatus, RawLp, Sense, SimplexSolver, VarMap};

/// Dual coefficients, offset and reject half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: Vec<f64>,
    pub b: f64,
    pub rho: f64,
}

impl ModelParams {
    /// `alpha = 0`, `b = 0`, `rho` at its lower bound.
    pub fn initial(n: usize, loss: &LossConfig) -> Self {
        Self {
            alpha: vec![0.0; n],
            b: 0.0,
            rho: loss.min_rho(),
        }
    }

    /// Scores `f(x_i)` on the training points, read from the Gram matrix.
    pub fn decision_values(&self, gram: &KernelMatrix, labels: &[f64]) -> Vec<f64> {
        let n = labels.len();
        let k = gram.entries();
        (0..n)
            .map(|i| {
                let row = k.row(i);
                let mut s = 0.0;
                for j in 0..n {
                    s += labels[j] * self.alpha[j] * row[j];
                }
                s + self.b
            })
            .collect()
    }

    pub fn margins(&self, gram: &KernelMatrix, labels: &[f64]) -> Vec<f64> {
        self.decision_values(gram, labels)
            .into_iter()
            .zip(labels)
            .map(|(f, y)| y * f)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lambda: f64,
    pub loss: LossConfig,
    /// Stop once an iteration lowers the objective by at most this much.
    pub epsilon: f64,
    pub max_dc_iters: usize,
    /// Simplex pivot cap per subproblem; `None` uses `50 * (vars + rows)`.
    pub lp_iter_cap: Option<usize>,
    /// Also consider the minimizer of `Q1` as a starting point and start
    /// from whichever candidate has the lower objective.
    #[serde(default = "default_warm_start")]
    pub warm_start: bool,
}

fn default_warm_start() -> bool {
    true
}

impl TrainConfig {
    pub fn new(lambda: f64, loss: LossConfig) -> Self {
        Self {
            lambda,
            loss,
            epsilon: 1e-5,
            max_dc_iters: 50,
            lp_iter_cap: None,
            warm_start: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        LossConfig::new(self.loss.d, self.loss.mu)?;
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.max_dc_iters == 0 {
            return Err(Error::InvalidConfig("max_dc_iters must be positive".into()));
        }
        if self.lp_iter_cap == Some(0) {
            return Err(Error::InvalidConfig("lp_iter_cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// `J` at the initial point followed by `J` after every LP solve.
    pub objective_trace: Vec<f64>,
    /// Number of LP subproblems solved.
    pub iterations: usize,
    pub termination: Termination,
    pub lp_pivots: Vec<usize>,
    /// Pivots of the `Q1` warm-start solve, when one was run.
    pub warm_start_pivots: Option<usize>,
    /// Whether the `Q1` minimizer replaced the default starting point.
    pub started_from_q1: bool,
    /// Mean reject loss of the final model on the training set.
    pub train_risk_d: f64,
    pub wall_time: Duration,
}

fn check_shapes(theta: &ModelParams, gram: &KernelMatrix, labels: &[f64]) -> Result<()> {
    let n = labels.len();
    if gram.n() != n {
        return Err(Error::Shape {
            expected: n,
            got: gram.n(),
        });
    }
    if theta.alpha.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: theta.alpha.len(),
        });
    }
    Ok(())
}

/// Regularized empirical double ramp risk.
pub fn objective_j(theta: &ModelParams, gram: &KernelMatrix, labels: &[f64], cfg: &TrainConfig) -> Result<f64> {
    check_shapes(theta, gram, labels)?;
    Ok(objective_from_margins(theta, &theta.margins(gram, labels), cfg))
}

fn objective_from_margins(theta: &ModelParams, margins: &[f64], cfg: &TrainConfig) -> f64 {
    let n = margins.len() as f64;
    let reg: f64 = cfg.lambda * theta.alpha.iter().sum::<f64>();
    let risk: f64 = margins.iter().map(|&t| l_dr_unchecked(t, theta.rho, &cfg.loss)).sum::<f64>() / n;
    reg + risk
}

/// Convex part: regularizer plus the two outer hinges.
pub fn q1(theta: &ModelParams, gram: &KernelMatrix, labels: &[f64], cfg: &TrainConfig) -> Result<f64> {
    check_shapes(theta, gram, labels)?;
    let LossConfig { d, mu } = cfg.loss;
    let n = labels.len() as f64;
    let hinge: f64 = theta
        .margins(gram, labels)
        .iter()
        .map(|&t| d * (mu - t + theta.rho).max(0.0) + (1.0 - d) * (mu - t - theta.rho).max(0.0))
        .sum();
    Ok(cfg.lambda * theta.alpha.iter().sum::<f64>() + hinge / (n * mu))
}

/// Concave part (subtracted): the two inner hinges.
pub fn q2(theta: &ModelParams, gram: &KernelMatrix, labels: &[f64], cfg: &TrainConfig) -> Result<f64> {
    check_shapes(theta, gram, labels)?;
    let LossConfig { d, mu } = cfg.loss;
    let n = labels.len() as f64;
    let mu2 = mu * mu;
    let hinge: f64 = theta
        .margins(gram, labels)
        .iter()
        .map(|&t| d * (-mu2 - t + theta.rho).max(0.0) + (1.0 - d) * (-mu2 - t - theta.rho).max(0.0))
        .sum();
    Ok(hinge / (n * mu))
}

/// `beta'_i = [t_i <= rho - mu^2]`, `beta''_i = [t_i <= -rho - mu^2]`.
pub fn compute_indicators(
    theta: &ModelParams,
    gram: &KernelMatrix,
    labels: &[f64],
    cfg: &TrainConfig,
) -> Result<(Vec<bool>, Vec<bool>)> {
    check_shapes(theta, gram, labels)?;
    Ok(indicators_from_margins(&theta.margins(gram, labels), theta.rho, &cfg.loss))
}

fn indicators_from_margins(margins: &[f64], rho: f64, loss: &LossConfig) -> (Vec<bool>, Vec<bool>) {
    let mu2 = loss.mu * loss.mu;
    let upper = rho - mu2;
    let lower = -rho - mu2;
    margins.iter().map(|&t| (t <= upper, t <= lower)).unzip()
}

/// Subgradient of `Q2` at `theta` in `(alpha, b, rho)` order, built from
/// the indicator vectors.
pub fn q2_subgradient(
    beta1: &[bool],
    beta2: &[bool],
    gram: &KernelMatrix,
    labels: &[f64],
    loss: &LossConfig,
) -> Vec<f64> {
    let n = labels.len();
    let LossConfig { d, mu } = *loss;
    let scale = 1.0 / (n as f64 * mu);
    let w: Vec<f64> = (0..n)
        .map(|i| (d * f64::from(u8::from(beta1[i])) + (1.0 - d) * f64::from(u8::from(beta2[i]))) * scale)
        .collect();
    let k = gram.entries();
    let mut g = vec![0.0; n + 2];
    for j in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            if w[i] != 0.0 {
                s += w[i] * labels[i] * labels[j] * k[[j, i]];
            }
        }
        g[j] = -s;
    }
    g[n] = -(0..n).map(|i| w[i] * labels[i]).sum::<f64>();
    g[n + 1] = (0..n)
        .map(|i| (d * f64::from(u8::from(beta1[i])) - (1.0 - d) * f64::from(u8::from(beta2[i]))) * scale)
        .sum::<f64>();
    g
}

/// Majorizer `B(theta, anchor) = Q1(theta) - Q2(anchor) - (theta - anchor) . grad Q2(anchor)`.
pub fn majorizer(
    theta: &ModelParams,
    anchor: &ModelParams,
    gram: &KernelMatrix,
    labels: &[f64],
    cfg: &TrainConfig,
) -> Result<f64> {
    let (b1, b2) = compute_indicators(anchor, gram, labels, cfg)?;
    let g = q2_subgradient(&b1, &b2, gram, labels, &cfg.loss);
    let n = labels.len();
    let mut lin = 0.0;
    for j in 0..n {
        lin += (theta.alpha[j] - anchor.alpha[j]) * g[j];
    }
    lin += (theta.b - anchor.b) * g[n];
    lin += (theta.rho - anchor.rho) * g[n + 1];
    Ok(q1(theta, gram, labels, cfg)? - q2(anchor, gram, labels, cfg)? - lin)
}

/// One linearized subproblem, in raw and canonical form.
///
/// Raw variable order: `alpha (N)`, `b`, `rho`, `xi' (N)`, `xi'' (N)`.
#[derive(Debug, Clone)]
pub struct Subproblem {
    pub raw: RawLp,
    pub lp: LpProblem,
    pub map: VarMap,
    pub n: usize,
}

impl Subproblem {
    pub fn params_from(&self, x_canonical: &[f64], loss: &LossConfig) -> ModelParams {
        let x = self.map.reconstruct(x_canonical);
        let n = self.n;
        ModelParams {
            alpha: x[..n].iter().map(|&a| a.max(0.0)).collect(),
            b: x[n],
            rho: x[n + 1].max(loss.min_rho()),
        }
    }
}

pub fn build_subproblem(
    beta1: &[bool],
    beta2: &[bool],
    gram: &KernelMatrix,
    labels: &[f64],
    cfg: &TrainConfig,
) -> Result<Subproblem> {
    let n = labels.len();
    for len in [beta1.len(), beta2.len(), gram.n()] {
        if len != n {
            return Err(Error::Shape { expected: n, got: len });
        }
    }
    let LossConfig { d, mu } = cfg.loss;
    let scale = 1.0 / (n as f64 * mu);
    let nv = 3 * n + 2;
    let (ib, irho, ixi1, ixi2) = (n, n + 1, n + 2, 2 * n + 2);

    let g = q2_subgradient(beta1, beta2, gram, labels, &cfg.loss);
    let mut cost = vec![0.0; nv];
    for j in 0..n {
        cost[j] = cfg.lambda - g[j];
        cost[ixi1 + j] = d * scale;
        cost[ixi2 + j] = (1.0 - d) * scale;
    }
    cost[ib] = -g[n];
    cost[irho] = -g[n + 1];

    let mut bounds = vec![Bound::NonNegative; nv];
    bounds[ib] = Bound::Free;
    bounds[irho] = Bound::Lower(cfg.loss.min_rho());
    let mut raw = RawLp::new(cost, bounds)?;

    let k = gram.entries();
    // y_i f(x_i) - rho + xi'_i >= mu   and   y_i f(x_i) + rho + xi''_i >= mu
    for (rho_sign, xi) in [(-1.0, ixi1), (1.0, ixi2)] {
        for i in 0..n {
            let mut row = vec![0.0; nv];
            for j in 0..n {
                row[j] = labels[i] * labels[j] * k[[j, i]];
            }
            row[ib] = labels[i];
            row[irho] = rho_sign;
            row[xi + i] = 1.0;
            raw.push(row, Sense::Ge, mu)?;
        }
    }

    // alpha = 0, b = 0, rho at its bound, slacks absorbing the margin is always feasible
    let rho0 = cfg.loss.min_rho();
    let mut start = vec![0.0; nv];
    start[irho] = rho0;
    for i in 0..n {
        start[ixi1 + i] = (mu + rho0).max(0.0);
        start[ixi2 + i] = (mu - rho0).max(0.0);
    }
    let viol = raw.max_violation(&start);
    if viol > 1e-12 {
        return Err(Error::LpInfeasible { iteration: 0 });
    }

    let (lp, map) = canonicalize(&raw)?;
    Ok(Subproblem { raw, lp, map, n })
}

fn check_labels(labels: &[f64]) -> Result<()> {
    if labels.len() < 2 {
        return Err(Error::Domain(format!("need at least 2 training points, got {}", labels.len())));
    }
    if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
        return Err(Error::Domain(format!("labels must be +1 or -1, found {bad}")));
    }
    let pos = labels.iter().filter(|&&y| y > 0.0).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::Domain("training data contains a single class".into()));
    }
    Ok(())
}

pub fn train(data: &Dataset, kernel: &KernelSpec, cfg: &TrainConfig) -> Result<(ModelParams, TrainReport)> {
    check_labels(&data.labels)?;
    let gram = gram_matrix(kernel, data.features.view())?;
    train_with_gram(&gram, &data.labels, cfg)
}

/// Runs the DC iterations on a precomputed Gram matrix.
pub fn train_with_gram(gram: &KernelMatrix, labels: &[f64], cfg: &TrainConfig) -> Result<(ModelParams, TrainReport)> {
    train_with_gram_observed(gram, labels, cfg, &mut |_, _| Ok(()))
}

/// Like [`train_with_gram`], but hands every LP subproblem to `observer`
/// before it is solved. Iteration 0 is the warm-start solve.
pub fn train_with_gram_observed(
    gram: &KernelMatrix,
    labels: &[f64],
    cfg: &TrainConfig,
    observer: &mut dyn FnMut(usize, &LpProblem) -> Result<()>,
) -> Result<(ModelParams, TrainReport)> {
    let start = Instant::now();
    cfg.validate()?;
    check_labels(labels)?;
    let n = labels.len();
    if gram.n() != n {
        return Err(Error::Shape {
            expected: n,
            got: gram.n(),
        });
    }

    let mut solver = SimplexSolver::new(0);
    let mut solve = |b1: &[bool], b2: &[bool], iteration: usize| -> Result<(ModelParams, usize)> {
        let sub = build_subproblem(b1, b2, gram, labels, cfg)?;
        observer(iteration, &sub.lp)?;
        solver.max_iters = cfg
            .lp_iter_cap
            .unwrap_or(50 * (sub.lp.n_vars() + sub.lp.n_constraints()));
        let sol = solver.solve(&sub.lp)?;
        match sol.status {
            LpStatus::Optimal => Ok((sub.params_from(&sol.x, &cfg.loss), sol.iterations)),
            LpStatus::Unbounded => Err(Error::LpUnbounded { iteration }),
            LpStatus::Infeasible => Err(Error::LpInfeasible { iteration }),
        }
    };

    let mut theta = ModelParams::initial(n, &cfg.loss);
    let mut margins = theta.margins(gram, labels);
    let mut j_prev = objective_from_margins(&theta, &margins, cfg);
    let mut warm_start_pivots = None;
    let mut started_from_q1 = false;
    if cfg.warm_start {
        let none = vec![false; n];
        let (warm, pivots) = solve(&none, &none, 0)?;
        warm_start_pivots = Some(pivots);
        let warm_margins = warm.margins(gram, labels);
        let j_warm = objective_from_margins(&warm, &warm_margins, cfg);
        if j_warm < j_prev {
            theta = warm;
            margins = warm_margins;
            j_prev = j_warm;
            started_from_q1 = true;
        }
    }
    let mut trace = vec![j_prev];
    let mut lp_pivots = Vec::new();
    let mut termination = Termination::IterCap;

    for iteration in 1..=cfg.max_dc_iters {
        let (b1, b2) = indicators_from_margins(&margins, theta.rho, &cfg.loss);
        let (next, pivots) = solve(&b1, &b2, iteration)?;
        lp_pivots.push(pivots);
        theta = next;
        margins = theta.margins(gram, labels);
        let j_new = objective_from_margins(&theta, &margins, cfg);
        trace.push(j_new);
        log::debug!("dc iteration {iteration}: J = {j_new:.12} ({pivots} pivots)");
        let drop = j_prev - j_new;
        j_prev = j_new;
        if drop <= cfg.epsilon {
            termination = Termination::Converged;
            break;
        }
    }

    let train_risk_d = margins.iter().map(|&t| l_d(t, theta.rho, &cfg.loss)).sum::<f64>() / n as f64;
    let report = TrainReport {
        iterations: trace.len() - 1,
        objective_trace: trace,
        termination,
        lp_pivots,
        warm_start_pivots,
        started_from_q1,
        train_risk_d,
        wall_time: start.elapsed(),
    };
    Ok((theta, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn cfg(lambda: f64, d: f64, mu: f64) -> TrainConfig {
        TrainConfig::new(lambda, LossConfig::new(d, mu).unwrap())
    }

    #[test]
    fn objective_at_zero_model_is_plateau() {
        let gram = gram_matrix(&KernelSpec::Linear, array![[1.0], [-2.0], [0.5]].view()).unwrap();
        let labels = [1.0, -1.0, 1.0];
        let c = cfg(0.3, 0.2, 1.0);
        let theta = ModelParams::initial(3, &c.loss);
        assert_eq!(theta.rho, 1.0);
        let j = objective_j(&theta, &gram, &labels, &c).unwrap();
        assert!((j - 0.4).abs() < 1e-15);
    }

    #[test]
    fn objective_zero_when_all_margins_clear() {
        let gram = gram_matrix(&KernelSpec::Linear, array![[1.0], [-1.0]].view()).unwrap();
        let labels = [1.0, -1.0];
        let mut c = cfg(0.1, 0.2, 1.0);
        c.lambda = 0.0; // bypasses validate on purpose
        let theta = ModelParams {
            alpha: vec![3.0, 3.0],
            b: 0.0,
            rho: 1.0,
        };
        // f(x_1) = 3 + 3 = 6 >= rho + mu
        assert_eq!(objective_j(&theta, &gram, &labels, &c).unwrap(), 0.0);
    }

    #[test]
    fn objective_matches_per_point_sum() {
        let x = array![[0.1, 0.2], [1.0, -0.5], [-0.3, 0.8], [0.0, 0.0], [2.0, 1.0]];
        let labels = [1.0, -1.0, -1.0, 1.0, 1.0];
        let spec = KernelSpec::gaussian(0.7).unwrap();
        let gram = gram_matrix(&spec, x.view()).unwrap();
        let c = cfg(0.05, 0.3, 0.5);
        let theta = ModelParams {
            alpha: vec![0.4, 0.0, 1.3, 0.2, 0.9],
            b: -0.25,
            rho: 0.6,
        };
        let mut expected = 0.05 * (0.4 + 1.3 + 0.2 + 0.9);
        for i in 0..5 {
            let mut f = theta.b;
            for j in 0..5 {
                let xi: Vec<f64> = x.row(i).to_vec();
                let xj: Vec<f64> = x.row(j).to_vec();
                f += labels[j] * theta.alpha[j] * crate::kernel::eval_kernel(&spec, &xj, &xi).unwrap();
            }
            expected += crate::loss::l_dr(labels[i] * f, theta.rho, &c.loss).unwrap() / 5.0;
        }
        let j = objective_j(&theta, &gram, &labels, &c).unwrap();
        assert!((j - expected).abs() < 1e-12);
    }

    #[test]
    fn indicators_of_zero_model() {
        let gram = gram_matrix(&KernelSpec::Linear, array![[1.0], [-1.0], [2.0]].view()).unwrap();
        let labels = [1.0, -1.0, 1.0];
        let c = cfg(0.1, 0.2, 1.0);
        let theta = ModelParams::initial(3, &c.loss);
        let (b1, b2) = compute_indicators(&theta, &gram, &labels, &c).unwrap();
        assert_eq!(b1, vec![true; 3]);
        assert_eq!(b2, vec![false; 3]);
    }

    #[test]
    fn indicators_far_from_band() {
        let gram = gram_matrix(&KernelSpec::Linear, array![[1.0], [1.0]].view()).unwrap();
        let c = cfg(0.1, 0.2, 1.0);
        let theta = ModelParams {
            alpha: vec![0.0, 0.0],
            b: 10.0,
            rho: 1.0,
        };
        let (b1, b2) = compute_indicators(&theta, &gram, &[1.0, -1.0], &c).unwrap();
        assert_eq!((b1[0], b2[0]), (false, false));
        assert_eq!((b1[1], b2[1]), (true, true));
    }

    #[test]
    fn single_point_subproblem() {
        let gram = gram_matrix(&KernelSpec::Linear, array![[1.0]].view()).unwrap();
        let c = cfg(0.1, 0.2, 0.5);
        let sub = build_subproblem(&[false], &[false], &gram, &[1.0], &c).unwrap();
        assert_eq!(sub.raw.constraints.len(), 2);
        // alpha, b, rho, xi', xi''
        assert_eq!(sub.raw.cost, vec![0.1, 0.0, 0.0, 0.2 / 0.5, 0.8 / 0.5]);
    }

    #[test]
    fn subproblem_coefficients_match_expansion() {
        let x = array![[0.0, 1.0], [1.5, -0.5]];
        let labels = [1.0, -1.0];
        let spec = KernelSpec::gaussian(0.4).unwrap();
        let gram = gram_matrix(&spec, x.view()).unwrap();
        let c = cfg(0.2, 0.3, 0.5);
        let b1 = [true, true];
        let b2 = [false, true];
        let sub = build_subproblem(&b1, &b2, &gram, &labels, &c).unwrap();
        let (d, mu, n) = (0.3, 0.5, 2.0);
        for j in 0..2 {
            let mut coef = 0.2;
            for i in 0..2 {
                let kji = gram.get(j, i);
                if b1[i] {
                    coef += d / (n * mu) * labels[i] * labels[j] * kji;
                }
                if b2[i] {
                    coef += (1.0 - d) / (n * mu) * labels[i] * labels[j] * kji;
                }
            }
            assert!((sub.raw.cost[j] - coef).abs() < 1e-15);
        }
        let rho_coef = -(d / (n * mu)) * 2.0 + ((1.0 - d) / (n * mu)) * 1.0;
        assert!((sub.raw.cost[3] - rho_coef).abs() < 1e-15);
        let b_coef = d / (n * mu) * (1.0 - 1.0) + (1.0 - d) / (n * mu) * (-1.0);
        assert!((sub.raw.cost[2] - b_coef).abs() < 1e-15);
    }

    #[test]
    fn infinite_epsilon_solves_once() {
        let x = array![[1.0], [-1.0], [0.5], [-0.2]];
        let labels = [1.0, -1.0, 1.0, -1.0];
        let gram = gram_matrix(&KernelSpec::Linear, x.view()).unwrap();
        let mut c = cfg(0.1, 0.2, 1.0);
        c.epsilon = f64::INFINITY;
        let (_, report) = train_with_gram(&gram, &labels, &c).unwrap();
        assert_eq!(report.iterations, 1);
        assert_eq!(report.objective_trace.len(), 2);
        assert_eq!(report.termination, Termination::Converged);
    }

    #[test]
    fn rejects_single_class() {
        let gram = gram_matrix(&KernelSpec::Linear, array![[1.0], [2.0]].view()).unwrap();
        let c = cfg(0.1, 0.2, 1.0);
        assert!(matches!(train_with_gram(&gram, &[1.0, 1.0], &c), Err(Error::Domain(_))));
        assert!(matches!(train_with_gram(&gram, &[1.0, 0.0], &c), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_config() {
        let gram = gram_matrix(&KernelSpec::Linear, Array2::from_elem((2, 1), 1.0).view()).unwrap();
        let mut c = cfg(0.1, 0.2, 1.0);
        c.lambda = 0.0;
        assert!(matches!(train_with_gram(&gram, &[1.0, -1.0], &c), Err(Error::InvalidConfig(_))));
    }
}
