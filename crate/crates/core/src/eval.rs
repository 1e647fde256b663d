//! Reject-option metrics, stratified cross-validation, label noise and
//! Monte Carlo excess-risk estimates.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::distribution::Mixture1d;
use crate::error::{Error, Result};
use crate::kernel::{gram_matrix, KernelMatrix, KernelSpec};
use crate::loss::{bayes_discriminant, l_d, l_dr_unchecked, Decision, LossConfig};
use crate::model::{support_count, SavedModel, SV_THRESHOLD};
use crate::trainer::{train_with_gram, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub empirical_risk_d: f64,
    pub rejection_rate: f64,
    /// 1.0 by convention when every point is rejected; see `all_rejected`.
    pub accuracy_unrejected: f64,
    pub all_rejected: bool,
    pub support_count: usize,
    pub n_test: usize,
}

impl EvalMetrics {
    pub fn from_decisions(decisions: &[Decision], labels: &[f64], d: f64, support_count: usize) -> Result<Self> {
        if decisions.is_empty() {
            return Err(Error::Domain("cannot evaluate on an empty test set".into()));
        }
        if decisions.len() != labels.len() {
            return Err(Error::Shape {
                expected: labels.len(),
                got: decisions.len(),
            });
        }
        let (mut rejected, mut wrong) = (0usize, 0usize);
        for (dec, &y) in decisions.iter().zip(labels) {
            match dec {
                Decision::Reject => rejected += 1,
                Decision::Positive if y < 0.0 => wrong += 1,
                Decision::Negative if y > 0.0 => wrong += 1,
                _ => {}
            }
        }
        let n = decisions.len();
        let accepted = n - rejected;
        let all_rejected = accepted == 0;
        let accuracy_unrejected = if all_rejected {
            1.0
        } else {
            (accepted - wrong) as f64 / accepted as f64
        };
        Ok(Self {
            empirical_risk_d: (wrong as f64 + d * rejected as f64) / n as f64,
            rejection_rate: rejected as f64 / n as f64,
            accuracy_unrejected,
            all_rejected,
            support_count,
            n_test: n,
        })
    }

    /// `|risk - ((1 - RR)(1 - Acc) + d RR)|`
    pub fn identity_gap(&self, d: f64) -> f64 {
        let rr = self.rejection_rate;
        (self.empirical_risk_d - ((1.0 - rr) * (1.0 - self.accuracy_unrejected) + d * rr)).abs()
    }
}

/// Scores `test` with `model`. Test features must already live in the
/// model's (standardized) feature space.
pub fn evaluate(model: &SavedModel, test: &Dataset) -> Result<EvalMetrics> {
    let decisions = (0..test.len())
        .map(|i| model.predict(test.features.row(i).as_slice().expect("standard layout")))
        .collect::<Result<Vec<_>>>()?;
    EvalMetrics::from_decisions(&decisions, &test.labels, model.loss.d, model.support_count())
}

/// Flips each label independently with probability `rate`.
pub fn inject_label_noise(data: &Dataset, rate: f64, seed: u64) -> Result<Dataset> {
    let mut out = data.clone();
    flip_labels(&mut out.labels, rate, &mut ChaCha8Rng::seed_from_u64(seed))?;
    Ok(out)
}

fn flip_labels<R: Rng>(labels: &mut [f64], rate: f64, rng: &mut R) -> Result<()> {
    if !(0.0..0.5).contains(&rate) {
        return Err(Error::Domain(format!("noise rate must lie in [0, 0.5), got {rate}")));
    }
    for y in labels.iter_mut() {
        if rng.random::<f64>() < rate {
            *y = -*y;
        }
    }
    Ok(())
}

/// Fold index for every point. Each class is shuffled separately and dealt
/// round-robin, continuing where the previous class stopped.
pub fn stratified_folds(labels: &[f64], k: usize, seed: u64, repeat: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 folds, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::InvalidConfig(format!("{} points cannot fill {k} folds", labels.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repeat);
    let mut fold = vec![0; labels.len()];
    let mut next = 0;
    for class in [1.0, -1.0] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            fold[i] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Gaussian,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvPlan {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    pub d_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    /// Ignored for the linear kernel.
    pub gamma_grid: Vec<f64>,
    pub family: KernelFamily,
    pub mu: f64,
    /// Label noise applied to training folds only.
    pub noise_rate: f64,
    pub epsilon: f64,
    pub max_dc_iters: usize,
}

pub fn default_lambda_grid() -> Vec<f64> {
    (0..9).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect()
}

pub fn default_gamma_grid() -> Vec<f64> {
    (0..7).map(|i| 2f64.powi(i - 4)).collect()
}

impl CvPlan {
    pub fn new(k: usize, repeats: usize, seed: u64, d_grid: Vec<f64>) -> Self {
        Self {
            k,
            repeats,
            seed,
            d_grid,
            lambda_grid: default_lambda_grid(),
            gamma_grid: default_gamma_grid(),
            family: KernelFamily::Gaussian,
            mu: 1.0,
            noise_rate: 0.0,
            epsilon: 1e-5,
            max_dc_iters: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.k < 2 {
            return bad(format!("need at least 2 folds, got {}", self.k));
        }
        if self.repeats == 0 {
            return bad("repeats must be positive".into());
        }
        if self.d_grid.is_empty() || self.lambda_grid.is_empty() {
            return bad("d and lambda grids must be nonempty".into());
        }
        for &d in &self.d_grid {
            LossConfig::new(d, self.mu)?;
        }
        for &l in &self.lambda_grid {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("lambda must be > 0, got {l}"));
            }
        }
        if self.family == KernelFamily::Gaussian {
            if self.gamma_grid.is_empty() {
                return bad("gamma grid must be nonempty for the gaussian kernel".into());
            }
            for &g in &self.gamma_grid {
                KernelSpec::gaussian(g)?;
            }
        }
        if !(0.0..0.5).contains(&self.noise_rate) {
            return Err(Error::Domain(format!("noise rate must lie in [0, 0.5), got {}", self.noise_rate)));
        }
        if !(self.epsilon > 0.0) || self.max_dc_iters == 0 {
            return bad("epsilon and max_dc_iters must be positive".into());
        }
        Ok(())
    }

    fn kernels(&self) -> Vec<KernelSpec> {
        match self.family {
            KernelFamily::Linear => vec![KernelSpec::Linear],
            KernelFamily::Gaussian => self.gamma_grid.iter().map(|&g| KernelSpec::Gaussian { gamma: g }).collect(),
        }
    }
}

/// One trained fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub d: f64,
    pub lambda: f64,
    pub gamma: Option<f64>,
    pub fold: usize,
    pub repeat: usize,
    pub metrics: EvalMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedJob {
    pub d: f64,
    pub lambda: f64,
    pub gamma: Option<f64>,
    pub fold: usize,
    pub repeat: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Sample standard deviation; 0 for a single value.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

/// Aggregate over folds and repeats for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub d: f64,
    pub lambda: f64,
    pub gamma: Option<f64>,
    pub runs: usize,
    /// False when some fold failed to train for reasons other than a
    /// single-class training split; such points are never selected.
    pub complete: bool,
    pub risk: MeanStd,
    pub rejection_rate: MeanStd,
    pub accuracy_unrejected: MeanStd,
    pub support_count: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub rows: Vec<CvRow>,
    pub summaries: Vec<GridSummary>,
    /// Best grid point per `d`, in `d_grid` order. `None` when no grid point
    /// for that `d` trained on every fold.
    pub best: Vec<Option<GridSummary>>,
    pub skipped: Vec<SkippedJob>,
}

pub const METRICS_HEADER: &str = "d,lambda,gamma,fold,repeat,risk,rejection_rate,accuracy_unrejected,support_count";

fn fmt_gamma(g: Option<f64>) -> String {
    g.map(|v| v.to_string()).unwrap_or_default()
}

impl CvResult {
    pub fn write_metrics_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{METRICS_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.d,
                r.lambda,
                fmt_gamma(r.gamma),
                r.fold,
                r.repeat,
                r.metrics.empirical_risk_d,
                r.metrics.rejection_rate,
                r.metrics.accuracy_unrejected,
                r.metrics.support_count
            )?;
        }
        Ok(())
    }

    /// One line per `d`: the selected hyperparameters with mean and std of every metric.
    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "d,lambda,gamma,runs,risk_mean,risk_std,rejection_rate_mean,rejection_rate_std,accuracy_unrejected_mean,accuracy_unrejected_std,support_count_mean,support_count_std"
        )?;
        for s in self.best.iter().flatten() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                s.d,
                s.lambda,
                fmt_gamma(s.gamma),
                s.runs,
                s.risk.mean,
                s.risk.std,
                s.rejection_rate.mean,
                s.rejection_rate.std,
                s.accuracy_unrejected.mean,
                s.accuracy_unrejected.std,
                s.support_count.mean,
                s.support_count.std
            )?;
        }
        Ok(())
    }

    pub fn best_for(&self, d: f64) -> Option<&GridSummary> {
        self.best.iter().flatten().find(|s| s.d == d)
    }
}

/// Scores held-out points from a full Gram matrix, keeping only support
/// vectors as a saved model would.
fn fold_decisions(
    gram: &KernelMatrix,
    train_idx: &[usize],
    train_labels: &[f64],
    alpha: &[f64],
    b: f64,
    rho: f64,
    test_idx: &[usize],
) -> Vec<Decision> {
    let k = gram.entries();
    test_idx
        .iter()
        .map(|&t| {
            let mut s = 0.0;
            for (j, &i) in train_idx.iter().enumerate() {
                if alpha[j] >= SV_THRESHOLD {
                    s += train_labels[j] * alpha[j] * k[[i, t]];
                }
            }
            Decision::from_score(s + b, rho)
        })
        .collect()
}

/// Selection key: lowest mean risk, first in grid order on ties.
fn select_best<'a>(candidates: impl Iterator<Item = &'a GridSummary>) -> Option<GridSummary> {
    let mut best: Option<&GridSummary> = None;
    for s in candidates.filter(|s| s.complete && s.runs > 0) {
        if best.is_none_or(|b| s.risk.mean < b.risk.mean) {
            best = Some(s);
        }
    }
    best.cloned()
}

/// Grid search with `repeats` rounds of stratified `k`-fold cross-validation.
/// Jobs run in the order repeat, fold, d, lambda, gamma, and all randomness
/// derives from `plan.seed`.
pub fn cross_validate(data: &Dataset, plan: &CvPlan) -> Result<CvResult> {
    plan.validate()?;
    if !data.has_both_classes() {
        return Err(Error::Domain("cross-validation needs both classes".into()));
    }
    let kernels = plan.kernels();
    let grams = kernels
        .iter()
        .map(|k| gram_matrix(k, data.features.view()))
        .collect::<Result<Vec<_>>>()?;

    let n_grid = plan.d_grid.len() * plan.lambda_grid.len() * kernels.len();
    let grid_index = |di: usize, li: usize, gi: usize| (di * plan.lambda_grid.len() + li) * kernels.len() + gi;
    let mut per_grid: Vec<Vec<EvalMetrics>> = vec![Vec::new(); n_grid];
    let mut failed = vec![false; n_grid];
    let mut rows = Vec::new();
    let mut skipped = Vec::new();

    for repeat in 0..plan.repeats {
        let folds = stratified_folds(&data.labels, plan.k, plan.seed, repeat as u64)?;
        for fold in 0..plan.k {
            let train_idx: Vec<usize> = (0..data.len()).filter(|&i| folds[i] != fold).collect();
            let test_idx: Vec<usize> = (0..data.len()).filter(|&i| folds[i] == fold).collect();
            let mut train_labels: Vec<f64> = train_idx.iter().map(|&i| data.labels[i]).collect();
            if plan.noise_rate > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(plan.seed ^ 0x6e6f_6973_655f_7365);
                rng.set_stream((repeat * plan.k + fold) as u64);
                flip_labels(&mut train_labels, plan.noise_rate, &mut rng)?;
            }
            let test_labels: Vec<f64> = test_idx.iter().map(|&i| data.labels[i]).collect();
            let single_class = train_labels.iter().all(|&y| y == train_labels[0]);
            let sub_grams: Vec<KernelMatrix> = grams.iter().map(|g| g.select(&train_idx)).collect();

            for (di, &d) in plan.d_grid.iter().enumerate() {
                let loss = LossConfig::new(d, plan.mu)?;
                for (li, &lambda) in plan.lambda_grid.iter().enumerate() {
                    for (gi, kernel) in kernels.iter().enumerate() {
                        let gamma = kernel.gamma();
                        let skip = |reason: String| SkippedJob {
                            d,
                            lambda,
                            gamma,
                            fold,
                            repeat,
                            reason,
                        };
                        if single_class {
                            log::warn!("repeat {repeat} fold {fold}: single-class training split skipped");
                            skipped.push(skip("single-class training split".into()));
                            continue;
                        }
                        let mut cfg = TrainConfig::new(lambda, loss);
                        cfg.epsilon = plan.epsilon;
                        cfg.max_dc_iters = plan.max_dc_iters;
                        let (params, _) = match train_with_gram(&sub_grams[gi], &train_labels, &cfg) {
                            Ok(r) => r,
                            Err(e) => {
                                log::warn!("d={d} lambda={lambda} gamma={gamma:?} repeat {repeat} fold {fold}: {e}");
                                failed[grid_index(di, li, gi)] = true;
                                skipped.push(skip(e.to_string()));
                                continue;
                            }
                        };
                        let decisions = fold_decisions(
                            &grams[gi],
                            &train_idx,
                            &train_labels,
                            &params.alpha,
                            params.b,
                            params.rho,
                            &test_idx,
                        );
                        let metrics =
                            EvalMetrics::from_decisions(&decisions, &test_labels, d, support_count(&params.alpha))?;
                        per_grid[grid_index(di, li, gi)].push(metrics);
                        rows.push(CvRow {
                            d,
                            lambda,
                            gamma,
                            fold,
                            repeat,
                            metrics,
                        });
                    }
                }
            }
        }
    }

    let mut summaries = Vec::with_capacity(n_grid);
    for (di, &d) in plan.d_grid.iter().enumerate() {
        for (li, &lambda) in plan.lambda_grid.iter().enumerate() {
            for (gi, kernel) in kernels.iter().enumerate() {
                let ms = &per_grid[grid_index(di, li, gi)];
                let col = |f: fn(&EvalMetrics) -> f64| -> MeanStd {
                    if ms.is_empty() {
                        MeanStd { mean: f64::NAN, std: f64::NAN }
                    } else {
                        MeanStd::of(&ms.iter().map(f).collect::<Vec<_>>())
                    }
                };
                summaries.push(GridSummary {
                    d,
                    lambda,
                    gamma: kernel.gamma(),
                    runs: ms.len(),
                    complete: !failed[grid_index(di, li, gi)],
                    risk: col(|m| m.empirical_risk_d),
                    rejection_rate: col(|m| m.rejection_rate),
                    accuracy_unrejected: col(|m| m.accuracy_unrejected),
                    support_count: col(|m| m.support_count as f64),
                });
            }
        }
    }
    let per_d = plan.lambda_grid.len() * kernels.len();
    let best = (0..plan.d_grid.len())
        .map(|di| select_best(summaries[di * per_d..(di + 1) * per_d].iter()))
        .collect();

    Ok(CvResult {
        rows,
        summaries,
        best,
        skipped,
    })
}

/// Monte Carlo estimates of the reject-loss and double-ramp excess risks of
/// `(f, rho)` over the Bayes pair of `dist`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcessRisk {
    pub excess_d: f64,
    pub excess_dr: f64,
    pub se_d: f64,
    pub se_dr: f64,
}

impl ExcessRisk {
    /// `sqrt(se_d^2 + se_dr^2)`
    pub fn combined_se(&self) -> f64 {
        self.se_d.hypot(self.se_dr)
    }

    /// `excess_dr + 3 SE - excess_d`; nonnegative when the bound holds.
    pub fn margin(&self) -> f64 {
        self.excess_dr + 3.0 * self.combined_se() - self.excess_d
    }
}

/// Bayes pair used as the reference: `rho* = mu` and
/// `f*(x) = (rho* + mu) * f_d*(eta(x))`, which attains the pointwise
/// minimum of both conditional risks.
pub fn bayes_pair_score(eta: f64, loss: &LossConfig) -> Result<(f64, f64)> {
    let rho = loss.mu;
    let dec = bayes_discriminant(eta, loss)?;
    Ok((f64::from(dec.as_i8()) * (rho + loss.mu), rho))
}

/// Samples `x` from `dist` and averages the conditional excess of each loss
/// given `x`, using the closed-form `eta(x)` in place of a sampled label.
pub fn excess_risk_check(
    dist: &Mixture1d,
    f: &dyn Fn(f64) -> f64,
    rho: f64,
    loss: &LossConfig,
    n_samples: usize,
    seed: u64,
) -> Result<ExcessRisk> {
    loss.check_rho(rho)?;
    if n_samples < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sd, mut sd2, mut sr, mut sr2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..n_samples {
        let x = dist.sample_x(&mut rng);
        let eta = dist.eta(x);
        let z = f(x);
        let (zs, rs) = bayes_pair_score(eta, loss)?;
        let cond = |loss_fn: &dyn Fn(f64, f64) -> f64, z: f64, r: f64| eta * loss_fn(z, r) + (1.0 - eta) * loss_fn(-z, r);
        let ld = |t: f64, r: f64| l_d(t, r, loss);
        let ldr = |t: f64, r: f64| l_dr_unchecked(t, r, loss);
        let ed = cond(&ld, z, rho) - cond(&ld, zs, rs);
        let er = cond(&ldr, z, rho) - cond(&ldr, zs, rs);
        sd += ed;
        sd2 += ed * ed;
        sr += er;
        sr2 += er * er;
    }
    let n = n_samples as f64;
    let se = |s: f64, s2: f64| {
        let mean = s / n;
        ((s2 / n - mean * mean).max(0.0) * n / (n - 1.0) / n).sqrt()
    };
    Ok(ExcessRisk {
        excess_d: sd / n,
        excess_dr: sr / n,
        se_d: se(sd, sd2),
        se_dr: se(sr, sr2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::GaussianPair;
    use ndarray::array;

    fn decisions(spec: &str) -> Vec<Decision> {
        spec.chars()
            .map(|c| match c {
                '+' => Decision::Positive,
                '-' => Decision::Negative,
                _ => Decision::Reject,
            })
            .collect()
    }

    #[test]
    fn all_rejected() {
        let m = EvalMetrics::from_decisions(&decisions("rrrr"), &[1.0, -1.0, 1.0, 1.0], 0.2, 0).unwrap();
        assert!((m.empirical_risk_d - 0.2).abs() < 1e-15);
        assert_eq!(m.rejection_rate, 1.0);
        assert_eq!(m.accuracy_unrejected, 1.0);
        assert!(m.all_rejected);
        assert!(m.identity_gap(0.2) < 1e-12);
    }

    #[test]
    fn no_rejections() {
        let labels = [1.0; 10];
        let m = EvalMetrics::from_decisions(&decisions("+++++++++-"), &labels, 0.2, 3).unwrap();
        assert!((m.empirical_risk_d - 0.1).abs() < 1e-15);
        assert!((m.accuracy_unrejected - 0.9).abs() < 1e-15);
        assert_eq!(m.rejection_rate, 0.0);
    }

    #[test]
    fn mixed_case() {
        // 2 rejected, 7 of 8 accepted correct.
        let labels = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0];
        let m = EvalMetrics::from_decisions(&decisions("++--++-+rr"), &labels, 0.2, 0).unwrap();
        assert!((m.empirical_risk_d - 0.14).abs() < 1e-15);
        assert!((m.rejection_rate - 0.2).abs() < 1e-15);
        assert!((m.accuracy_unrejected - 0.875).abs() < 1e-15);
        assert!(m.identity_gap(0.2) < 1e-12);
    }

    #[test]
    fn empty_test_set() {
        assert!(matches!(EvalMetrics::from_decisions(&[], &[], 0.2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_on_random_decisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let n = rng.random_range(1..40);
            let dec: Vec<Decision> = (0..n)
                .map(|_| match rng.random_range(0..3) {
                    0 => Decision::Negative,
                    1 => Decision::Reject,
                    _ => Decision::Positive,
                })
                .collect();
            let labels: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
            let d = rng.random_range(0.01..0.49);
            let m = EvalMetrics::from_decisions(&dec, &labels, d, 0).unwrap();
            assert!(m.identity_gap(d) <= 1e-12);
            assert!((0.0..=1.0).contains(&m.rejection_rate));
            assert!((0.0..=1.0).contains(&m.accuracy_unrejected));
        }
    }

    #[test]
    fn folds_partition_and_stratify() {
        let labels: Vec<f64> = (0..53).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let folds = stratified_folds(&labels, 5, 42, 0).unwrap();
        assert_eq!(folds.len(), 53);
        let pos_total = labels.iter().filter(|&&y| y > 0.0).count();
        for f in 0..5 {
            let members: Vec<usize> = (0..53).filter(|&i| folds[i] == f).collect();
            assert!((10..=11).contains(&members.len()));
            let pos = members.iter().filter(|&&i| labels[i] > 0.0).count();
            assert!((pos as f64 - pos_total as f64 / 5.0).abs() <= 1.0);
        }
        assert_eq!(folds, stratified_folds(&labels, 5, 42, 0).unwrap());
        assert_ne!(folds, stratified_folds(&labels, 5, 42, 1).unwrap());
        assert!(stratified_folds(&labels, 1, 42, 0).is_err());
    }

    #[test]
    fn noise_rates() {
        let data = Dataset::new(ndarray::Array2::zeros((10_000, 1)), vec![1.0; 10_000]).unwrap();
        assert_eq!(inject_label_noise(&data, 0.0, 3).unwrap(), data);
        let noisy = inject_label_noise(&data, 0.3, 3).unwrap();
        let flipped = noisy.labels.iter().filter(|&&y| y < 0.0).count() as f64 / 10_000.0;
        assert!((flipped - 0.3).abs() < 0.02);
        assert_eq!(noisy, inject_label_noise(&data, 0.3, 3).unwrap());
        assert_eq!(noisy.features, data.features);
        assert!(matches!(inject_label_noise(&data, 0.5, 3), Err(Error::Domain(_))));
        assert!(matches!(inject_label_noise(&data, -0.1, 3), Err(Error::Domain(_))));
    }

    fn small_plan(k: usize) -> CvPlan {
        let mut plan = CvPlan::new(k, 1, 7, vec![0.2]);
        plan.lambda_grid = vec![0.01, 0.1];
        plan.gamma_grid = vec![0.5, 1.0];
        plan
    }

    #[test]
    fn smallest_legal_plan() {
        let data = Dataset::new(array![[1.0, 0.0], [-1.0, 0.0], [1.2, 0.1], [-1.2, -0.1]], vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let res = cross_validate(&data, &small_plan(2)).unwrap();
        assert_eq!(res.rows.len(), 2 * 4);
        assert!(res.skipped.is_empty());
        for s in &res.summaries {
            assert_eq!(s.runs, 2);
        }
        assert!(res.best[0].is_some());
    }

    #[test]
    fn selection_is_brute_force_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data = GaussianPair::overlap_2d().dataset(40, &mut rng).unwrap();
        let mut plan = small_plan(4);
        plan.d_grid = vec![0.1, 0.3];
        let res = cross_validate(&data, &plan).unwrap();
        for (di, &d) in plan.d_grid.iter().enumerate() {
            let mut best: Option<(f64, f64, Option<f64>)> = None;
            for s in res.summaries.iter().filter(|s| s.d == d) {
                let risks: Vec<f64> = res
                    .rows
                    .iter()
                    .filter(|r| r.d == d && r.lambda == s.lambda && r.gamma == s.gamma)
                    .map(|r| r.metrics.empirical_risk_d)
                    .collect();
                let mean = risks.iter().sum::<f64>() / risks.len() as f64;
                if best.is_none_or(|(m, _, _)| mean < m) {
                    best = Some((mean, s.lambda, s.gamma));
                }
            }
            let (_, lambda, gamma) = best.unwrap();
            let chosen = res.best[di].as_ref().unwrap();
            assert_eq!((chosen.lambda, chosen.gamma), (lambda, gamma));
        }
        let again = cross_validate(&data, &plan).unwrap();
        assert_eq!(res, again);
    }

    #[test]
    fn metrics_csv_layout() {
        let data = Dataset::new(array![[1.0], [-1.0], [1.2], [-1.2]], vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let mut plan = small_plan(2);
        plan.family = KernelFamily::Linear;
        let res = cross_validate(&data, &plan).unwrap();
        let mut buf = Vec::new();
        res.write_metrics_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(METRICS_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 9);
        assert_eq!(first[2], "");
    }

    #[test]
    fn single_class_training_split_is_skipped() {
        // One positive point: the fold holding it leaves an all-negative training split.
        let data = Dataset::new(array![[1.0], [-1.0], [-1.2], [-0.8]], vec![1.0, -1.0, -1.0, -1.0]).unwrap();
        let mut plan = small_plan(2);
        plan.lambda_grid = vec![0.1];
        plan.gamma_grid = vec![1.0];
        let res = cross_validate(&data, &plan).unwrap();
        assert_eq!(res.skipped.len(), 1);
        assert_eq!(res.rows.len(), 1);
    }

    #[test]
    fn bayes_rule_has_zero_excess() {
        let loss = LossConfig::new(0.2, 1.0).unwrap();
        let dist = Mixture1d::symmetric_pair();
        let f = |x: f64| bayes_pair_score(dist.eta(x), &loss).unwrap().0;
        let e = excess_risk_check(&dist, &f, loss.mu, &loss, 10_000, 1).unwrap();
        assert_eq!(e.excess_d, 0.0);
        assert_eq!(e.excess_dr, 0.0);
    }

    #[test]
    fn zero_function_obeys_bound() {
        let loss = LossConfig::new(0.2, 1.0).unwrap();
        for dist in Mixture1d::standard_set() {
            let e = excess_risk_check(&dist, &|_| 0.0, 1.0, &loss, 20_000, 4).unwrap();
            assert!(e.excess_d <= e.excess_dr + 3.0 * e.combined_se());
            assert!(e.excess_d >= 0.0);
        }
    }

    #[test]
    fn random_linear_functions_obey_bound() {
        let loss = LossConfig::new(0.3, 0.5).unwrap();
        let dist = Mixture1d::symmetric_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..20 {
            let (a, c) = (rng.random_range(-4.0..4.0), rng.random_range(-2.0..2.0));
            let rho = rng.random_range(loss.mu..3.0);
            let e = excess_risk_check(&dist, &|x| a * x + c, rho, &loss, 5_000, trial).unwrap();
            assert!(e.margin() >= 0.0, "{e:?}");
        }
    }
}
