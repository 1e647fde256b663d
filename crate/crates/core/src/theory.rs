//! Numerical verification of the statistical properties of the double ramp
//! loss: Fisher consistency of its conditional risk, the excess-risk
//! inequalities relating it to the reject loss, the pointwise surrogate
//! bound, and a Monte Carlo check of excess-risk domination.
//!
//! Conditional risks are piecewise linear in `z`, so every grid search also
//! visits the kinks `±rho ± mu`, `±rho ± mu^2` and `±rho`; interval minima
//! are then exact up to rounding.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::Mixture1d;
use crate::error::Result;
use crate::eval::{excess_risk_check, ExcessRisk};
use crate::loss::{
    bayes_discriminant, conditional_risk_unchecked, l_d, l_dr_unchecked, optimal_conditional_risk, Decision,
    LossConfig,
};

/// Violations kept per check; the count is always exact.
const MAX_RECORDED: usize = 200;

const VALUE_TOL: f64 = 1e-6;
const INEQUALITY_TOL: f64 = 1e-9;
/// Grid points within this of the minimum count as minimizers.
const ARGMIN_TOL: f64 = 1e-9;
/// `eta` this close to `d` or `1 - d` is a tie and skips region matching.
const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryGrid {
    pub eta_values: Vec<f64>,
    pub d_values: Vec<f64>,
    pub mu_values: Vec<f64>,
    /// Half-widths checked besides `rho = mu`; values below `mu` are skipped.
    pub rho_sweep: Vec<f64>,
    pub z_step: f64,
    /// The z range is `[-(rho + mu + z_margin), rho + mu + z_margin]`.
    pub z_margin: f64,
}

impl Default for TheoryGrid {
    fn default() -> Self {
        Self {
            eta_values: (0..=100).map(|k| k as f64 / 100.0).collect(),
            d_values: (1..=9).map(|k| k as f64 * 5.0 / 100.0).collect(),
            mu_values: vec![0.25, 0.5, 1.0],
            rho_sweep: vec![1.0, 2.0, 5.0],
            z_step: 1e-3,
            z_margin: 1.0,
        }
    }
}

impl TheoryGrid {
    /// A smaller grid for quick runs.
    pub fn coarse() -> Self {
        Self {
            eta_values: (0..=20).map(|k| k as f64 / 20.0).collect(),
            d_values: vec![0.1, 0.2, 0.3, 0.4],
            mu_values: vec![0.5, 1.0],
            rho_sweep: vec![2.0],
            z_step: 1e-2,
            z_margin: 1.0,
        }
    }

    fn rhos(&self, mu: f64) -> Vec<f64> {
        let mut out = vec![mu];
        for &r in &self.rho_sweep {
            if r >= mu && !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }

    /// Lattice `k * z_step` over the range plus the kinks of the conditional risk.
    fn z_values(&self, rho: f64, mu: f64) -> Vec<f64> {
        let half = rho + mu + self.z_margin;
        let kmax = (half / self.z_step).ceil() as i64;
        let mut z: Vec<f64> = (-kmax..=kmax).map(|k| k as f64 * self.z_step).collect();
        let mu2 = mu * mu;
        for s in [-1.0, 1.0] {
            for off in [0.0, mu, -mu, mu2, -mu2] {
                z.push(s * rho + off);
            }
        }
        z.sort_by(f64::total_cmp);
        z.dedup();
        z
    }

    fn configs(&self) -> impl Iterator<Item = (LossConfig, f64)> + '_ {
        self.mu_values.iter().flat_map(move |&mu| {
            self.d_values.iter().flat_map(move |&d| {
                let loss = LossConfig::new(d, mu).expect("theory grid holds valid (d, mu)");
                self.rhos(mu).into_iter().map(move |rho| (loss, rho))
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub eta: f64,
    pub d: f64,
    pub mu: f64,
    pub rho: f64,
    pub expected: f64,
    pub got: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub points_checked: usize,
    pub violation_count: usize,
    /// At most [`MAX_RECORDED`] entries.
    pub violations: Vec<Violation>,
    /// Largest observed discrepancy, in the check's own units.
    pub worst: f64,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            points_checked: 0,
            violation_count: 0,
            violations: Vec::new(),
            worst: 0.0,
        }
    }

    fn record(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED {
            self.violations.push(v);
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

fn in_region(z: f64, rho: f64, dec: Decision) -> bool {
    match dec {
        Decision::Negative => z <= -rho,
        Decision::Reject => z.abs() <= rho,
        Decision::Positive => z >= rho,
    }
}

/// The grid minimum of the conditional risk equals the closed-form optimum,
/// and every grid minimizer lies in the region of the generalized Bayes rule.
pub fn verify_fisher_consistency(grid: &TheoryGrid) -> Result<CheckReport> {
    let mut rep = CheckReport::new("fisher-consistency");
    let mut values = Vec::new();
    for (loss, rho) in grid.configs() {
        let zs = grid.z_values(rho, loss.mu);
        for &eta in &grid.eta_values {
            values.clear();
            values.extend(zs.iter().map(|&z| conditional_risk_unchecked(eta, z, rho, &loss)));
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let (opt, _) = optimal_conditional_risk(eta, &loss)?;
            rep.points_checked += 1;
            let gap = (min - opt).abs();
            rep.worst = rep.worst.max(gap);
            let violation = |check: &str, expected: f64, got: f64| Violation {
                check: check.into(),
                eta,
                d: loss.d,
                mu: loss.mu,
                rho,
                expected,
                got,
            };
            if gap > VALUE_TOL {
                rep.record(violation("minimum value", opt, min));
            }
            let tie = (eta - loss.d).abs() < BOUNDARY_TOL || (eta - (1.0 - loss.d)).abs() < BOUNDARY_TOL;
            if tie {
                continue;
            }
            let dec = bayes_discriminant(eta, &loss)?;
            for (&z, &v) in zs.iter().zip(&values) {
                if v <= min + ARGMIN_TOL && !in_region(z, rho, dec) {
                    rep.record(violation("minimizer region", f64::from(dec.as_i8()), z));
                    break;
                }
            }
        }
    }
    Ok(rep)
}

/// Closed-form excess-risk quantities at one `(eta, d, mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcessTerms {
    /// Optimal reject-loss conditional risk.
    pub xi: f64,
    pub xi_neg: f64,
    pub xi_reject: f64,
    pub xi_pos: f64,
    /// Optimal double-ramp conditional risk.
    pub h: f64,
    /// Infimum of the double-ramp conditional risk over `z <= -rho`.
    pub h_neg: f64,
    /// Over `|z| <= rho`.
    pub h_reject: f64,
    /// Over `z >= rho`.
    pub h_pos: f64,
}

/// Valid for `rho >= mu`, where the infima do not depend on `rho`.
pub fn excess_terms(eta: f64, loss: &LossConfig) -> ExcessTerms {
    let LossConfig { d, mu } = *loss;
    let xi = if eta < d {
        eta
    } else if eta <= 1.0 - d {
        d
    } else {
        1.0 - eta
    };
    let h = (1.0 + mu) * eta.min(d).min(1.0 - eta);
    let plateau = d * (1.0 + mu);
    let edge_neg = eta * d * (mu - 1.0) + eta + d;
    let h_neg = if eta < d {
        eta * (1.0 + mu)
    } else {
        (eta * (1.0 + mu)).min(edge_neg)
    };
    let h_reject = if eta < d {
        edge_neg.min(plateau)
    } else if eta <= 1.0 - d {
        plateau
    } else {
        plateau.min((d * mu + 1.0) * (1.0 - eta) + eta * d)
    };
    let pos_full = (1.0 - eta) * (1.0 + mu);
    let h_pos = if eta <= 1.0 - d {
        (d * eta + (1.0 - eta) * plateau + (1.0 - eta) * (1.0 - d)).min(pos_full)
    } else {
        pos_full
    };
    ExcessTerms {
        xi,
        xi_neg: eta - xi,
        xi_reject: d - xi,
        xi_pos: 1.0 - eta - xi,
        h,
        h_neg,
        h_reject,
        h_pos,
    }
}

/// Closed forms against constrained grid minima, then the three
/// inequalities `xi_s <= H_s - H` for `s` in negative, reject, positive.
pub fn verify_excess_bounds(grid: &TheoryGrid) -> Result<(CheckReport, CheckReport)> {
    let mut agree = CheckReport::new("closed-form-vs-grid");
    let mut ineq = CheckReport::new("excess-inequalities");
    for (loss, rho) in grid.configs() {
        let zs = grid.z_values(rho, loss.mu);
        for &eta in &grid.eta_values {
            let (mut neg, mut rej, mut pos, mut all) = (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY);
            for &z in &zs {
                let v = conditional_risk_unchecked(eta, z, rho, &loss);
                all = all.min(v);
                if z <= -rho {
                    neg = neg.min(v);
                }
                if z.abs() <= rho {
                    rej = rej.min(v);
                }
                if z >= rho {
                    pos = pos.min(v);
                }
            }
            let t = excess_terms(eta, &loss);
            let violation = |check: &str, expected: f64, got: f64| Violation {
                check: check.into(),
                eta,
                d: loss.d,
                mu: loss.mu,
                rho,
                expected,
                got,
            };
            for (name, closed, searched) in [
                ("H", t.h, all),
                ("H_neg", t.h_neg, neg),
                ("H_reject", t.h_reject, rej),
                ("H_pos", t.h_pos, pos),
            ] {
                agree.points_checked += 1;
                let gap = (closed - searched).abs();
                agree.worst = agree.worst.max(gap);
                if gap > VALUE_TOL {
                    agree.record(violation(name, closed, searched));
                }
            }
            for (name, lhs, rhs) in [
                ("xi_neg <= H_neg - H", t.xi_neg, t.h_neg - t.h),
                ("xi_reject <= H_reject - H", t.xi_reject, t.h_reject - t.h),
                ("xi_pos <= H_pos - H", t.xi_pos, t.h_pos - t.h),
            ] {
                ineq.points_checked += 1;
                let excess = lhs - rhs;
                ineq.worst = ineq.worst.max(excess);
                if excess > INEQUALITY_TOL {
                    ineq.record(violation(name, rhs, lhs));
                }
            }
        }
    }
    Ok((agree, ineq))
}

/// `L_d(t, rho) <= L_dr(t, rho)` at random `(t, rho, d, mu)`, compared exactly.
pub fn verify_surrogate_bound(n_points: usize, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new("surrogate-bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_points {
        let d = rng.random_range(0.001..0.499);
        let mu = rng.random_range(0.001..=1.0);
        let loss = LossConfig::new(d, mu).expect("sampled inside the domain");
        let rho = loss.min_rho() + rng.random_range(0.0..5.0);
        let reach = rho + mu + 1.0;
        let t = rng.random_range(-reach..reach);
        let (ld, ldr) = (l_d(t, rho, &loss), l_dr_unchecked(t, rho, &loss));
        rep.points_checked += 1;
        rep.worst = rep.worst.max(ld - ldr);
        if ld > ldr {
            rep.record(Violation {
                check: format!("t = {t}"),
                eta: f64::NAN,
                d,
                mu,
                rho,
                expected: ldr,
                got: ld,
            });
        }
    }
    rep
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationTrial {
    pub distribution: String,
    pub d: f64,
    pub mu: f64,
    pub rho: f64,
    /// `f(x) = slope * x + offset + curvature * x^2`
    pub slope: f64,
    pub offset: f64,
    pub curvature: f64,
    pub result: ExcessRisk,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub trials: Vec<DominationTrial>,
    pub passed: usize,
    /// Smallest `excess_dr + 3 SE - excess_d` over all trials.
    pub worst_margin: f64,
}

impl DominationReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials.len()
    }
}

/// `excess_d <= excess_dr + 3 SE` for random quadratic scores and random
/// `(d, mu, rho)` with `rho` in `[mu, 3]`.
pub fn verify_excess_domination(distributions: &[Mixture1d], trials: usize, n_samples: usize, seed: u64) -> Result<DominationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for dist in distributions {
        for _ in 0..trials {
            let d = rng.random_range(0.05..0.45);
            let mu = [0.25, 0.5, 1.0][rng.random_range(0..3)];
            let loss = LossConfig::new(d, mu)?;
            let rho = rng.random_range(mu..3.0);
            let scale = 10f64.powf(rng.random_range(-1.0..1.5));
            let slope = scale * rng.random_range(-1.0..1.0);
            let offset = scale * rng.random_range(-1.0..1.0);
            let curvature = if rng.random::<bool>() { scale * rng.random_range(-0.5..0.5) } else { 0.0 };
            let f = move |x: f64| slope * x + offset + curvature * x * x;
            let result = excess_risk_check(dist, &f, rho, &loss, n_samples, rng.random())?;
            out.push(DominationTrial {
                distribution: dist.name.clone(),
                d,
                mu,
                rho,
                slope,
                offset,
                curvature,
                passed: result.margin() >= 0.0,
                result,
            });
        }
    }
    Ok(DominationReport {
        passed: out.iter().filter(|t| t.passed).count(),
        worst_margin: out.iter().map(|t| t.result.margin()).fold(f64::INFINITY, f64::min),
        trials: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub notes: Vec<String>,
    pub grid: TheoryGrid,
    pub fisher: CheckReport,
    pub closed_forms: CheckReport,
    pub inequalities: CheckReport,
    pub surrogate: CheckReport,
    pub domination: DominationReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryOptions {
    pub surrogate_points: usize,
    pub mc_trials: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for TheoryOptions {
    fn default() -> Self {
        Self {
            surrogate_points: 1_000_000,
            mc_trials: 20,
            mc_samples: 100_000,
            seed: 1,
        }
    }
}

pub fn run_all(grid: &TheoryGrid, opts: &TheoryOptions) -> Result<TheoryReport> {
    let fisher = verify_fisher_consistency(grid)?;
    let (closed_forms, inequalities) = verify_excess_bounds(grid)?;
    let surrogate = verify_surrogate_bound(opts.surrogate_points, opts.seed);
    let domination = verify_excess_domination(&Mixture1d::standard_set(), opts.mc_trials, opts.mc_samples, opts.seed)?;
    Ok(TheoryReport {
        notes: vec![
            "rho is fixed at mu (plus the sweep values); below mu the minimizer regions of the conditional risk change and the closed forms do not apply".into(),
            "the middle case of the closed form for H_reject uses d(1 + mu)".into(),
            "grid infima are taken over the closed regions z <= -rho, |z| <= rho, z >= rho".into(),
        ],
        grid: grid.clone(),
        fisher,
        closed_forms,
        inequalities,
        surrogate,
        domination,
    })
}

impl TheoryReport {
    pub fn passed(&self) -> bool {
        [&self.fisher, &self.closed_forms, &self.inequalities, &self.surrogate]
            .iter()
            .all(|c| c.passed())
            && self.domination.all_passed()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for n in &self.notes {
            let _ = writeln!(s, "# note: {n}");
        }
        for c in [&self.fisher, &self.closed_forms, &self.inequalities, &self.surrogate] {
            let _ = writeln!(
                s,
                "{:<22} {} points={} violations={} worst={:.3e}",
                c.name,
                if c.passed() { "PASS" } else { "FAIL" },
                c.points_checked,
                c.violation_count,
                c.worst
            );
            for v in c.violations.iter().take(10) {
                let _ = writeln!(
                    s,
                    "    {} eta={} d={} mu={} rho={} expected={} got={}",
                    v.check, v.eta, v.d, v.mu, v.rho, v.expected, v.got
                );
            }
        }
        let t = &self.domination;
        let _ = writeln!(
            s,
            "{:<22} {} trials={} passed={} worst_margin={:.3e}",
            "excess-domination",
            if t.all_passed() { "PASS" } else { "FAIL" },
            t.trials.len(),
            t.passed,
            t.worst_margin
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(eta: f64, d: f64, mu: f64) -> TheoryGrid {
        TheoryGrid {
            eta_values: vec![eta],
            d_values: vec![d],
            mu_values: vec![mu],
            rho_sweep: vec![],
            z_step: 1e-3,
            z_margin: 1.0,
        }
    }

    #[test]
    fn low_eta_minimum_is_left_tail() {
        let loss = LossConfig::new(0.2, 1.0).unwrap();
        let (v, dec) = optimal_conditional_risk(0.1, &loss).unwrap();
        assert!((v - 0.2).abs() < 1e-15);
        assert_eq!(dec, Decision::Negative);
        let rep = verify_fisher_consistency(&single(0.1, 0.2, 1.0)).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!((conditional_risk_unchecked(0.1, -2.5, 1.0, &loss) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn middle_eta_minimum_is_plateau() {
        let loss = LossConfig::new(0.2, 1.0).unwrap();
        assert!((optimal_conditional_risk(0.5, &loss).unwrap().0 - 0.4).abs() < 1e-15);
        let rep = verify_fisher_consistency(&single(0.5, 0.2, 1.0)).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn boundary_eta_has_zero_gap() {
        for &(d, mu) in &[(0.2, 1.0), (0.35, 0.25), (0.05, 0.5)] {
            let t = excess_terms(d, &LossConfig::new(d, mu).unwrap());
            assert!((t.xi_neg - (t.h_neg - t.h)).abs() < 1e-12);
            assert_eq!(t.xi_neg, 0.0);
        }
    }

    #[test]
    fn reject_gap_at_half() {
        let t = excess_terms(0.5, &LossConfig::new(0.2, 1.0).unwrap());
        assert!((t.xi_reject - 0.0).abs() < 1e-15);
        assert!((t.xi_neg - 0.3).abs() < 1e-15);
        assert!((t.xi_pos - 0.3).abs() < 1e-15);
        assert!(t.xi_reject <= t.h_reject - t.h + 1e-12);
        assert!(t.xi_pos <= t.h_pos - t.h + 1e-12);
    }

    #[test]
    fn random_points_satisfy_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let grid = TheoryGrid {
            eta_values: (0..1000).map(|_| rng.random_range(0.0..=1.0)).collect(),
            d_values: vec![0.15, 0.4],
            mu_values: vec![0.3, 1.0],
            rho_sweep: vec![1.7],
            z_step: 5e-3,
            z_margin: 1.0,
        };
        let (agree, ineq) = verify_excess_bounds(&grid).unwrap();
        assert!(agree.passed(), "{:?}", &agree.violations[..agree.violations.len().min(3)]);
        assert!(ineq.passed());
    }

    #[test]
    fn coarse_grid_runs_clean() {
        let opts = TheoryOptions {
            surrogate_points: 10_000,
            mc_trials: 3,
            mc_samples: 2_000,
            seed: 9,
        };
        let rep = run_all(&TheoryGrid::coarse(), &opts).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("fisher-consistency"));
    }

    #[test]
    fn surrogate_bound_cases() {
        let loss = LossConfig::new(0.2, 1.0).unwrap();
        assert_eq!(l_d(0.3, 2.0, &loss), 0.2);
        assert!((l_dr_unchecked(0.3, 2.0, &loss) - 0.4).abs() < 1e-15);
        assert_eq!(l_dr_unchecked(3.0, 2.0, &loss), 0.0);
        assert!(verify_surrogate_bound(50_000, 3).passed());
    }

    #[test]
    fn below_mu_the_checks_detect_failure() {
        // At rho = mu (1 + mu) / 2 < mu the band is too narrow for the plateau.
        let grid = TheoryGrid {
            mu_values: vec![0.25],
            rho_sweep: vec![],
            ..TheoryGrid::default()
        };
        let loss = LossConfig::new(0.2, 0.25).unwrap();
        let rho = loss.min_rho();
        let zs = grid.z_values(rho, 0.25);
        let min = zs.iter().map(|&z| conditional_risk_unchecked(0.5, z, rho, &loss)).fold(f64::INFINITY, f64::min);
        assert!(min > optimal_conditional_risk(0.5, &loss).unwrap().0 + 0.1);
    }
}
