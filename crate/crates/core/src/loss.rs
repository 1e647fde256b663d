//! Reject loss `L_d`, double ramp loss `L_dr`, and the pointwise
//! conditional risks built from them.
//!
//! Throughout, `t = y f(x)` is the signed margin, `rho` the half-width of
//! the reject band and `cfg` carries the rejection cost `d` and the ramp
//! slope `mu`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rejection cost and ramp slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub d: f64,
    pub mu: f64,
}

impl LossConfig {
    /// Requires `0 < d < 0.5` and `0 < mu <= 1`.
    pub fn new(d: f64, mu: f64) -> Result<Self> {
        if !(d > 0.0 && d < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "rejection cost d must lie in (0, 0.5), got {d}"
            )));
        }
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ramp slope mu must lie in (0, 1], got {mu}"
            )));
        }
        Ok(Self { d, mu })
    }

    /// Smallest admissible reject half-width, `mu (1 + mu) / 2`.
    pub fn min_rho(&self) -> f64 {
        0.5 * self.mu * (1.0 + self.mu)
    }

    pub fn check_rho(&self, rho: f64) -> Result<()> {
        if rho >= self.min_rho() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "rho = {rho} is below the admissible minimum {} for mu = {}",
                self.min_rho(),
                self.mu
            )))
        }
    }

    /// Height of the reject plateau of `L_dr`, `d (1 + mu)`.
    pub fn plateau(&self) -> f64 {
        self.d * (1.0 + self.mu)
    }
}

/// Three-way output of a reject-option classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Decision {
    Negative,
    Reject,
    Positive,
}

impl Decision {
    pub fn as_i8(self) -> i8 {
        match self {
            Decision::Negative => -1,
            Decision::Reject => 0,
            Decision::Positive => 1,
        }
    }

    /// Thresholds a score against the band `[-rho, rho]`; the band edges reject.
    pub fn from_score(score: f64, rho: f64) -> Self {
        if score > rho {
            Decision::Positive
        } else if score < -rho {
            Decision::Negative
        } else {
            Decision::Reject
        }
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

#[inline]
fn pos(a: f64) -> f64 {
    a.max(0.0)
}

/// Reject loss: 1 for a confident mistake, `d` inside the closed band, 0 otherwise.
#[inline]
pub fn l_d(t: f64, rho: f64, cfg: &LossConfig) -> f64 {
    if t < -rho {
        1.0
    } else if t.abs() <= rho {
        cfg.d
    } else {
        0.0
    }
}

/// Double ramp loss without the `rho` admissibility check.
#[inline]
pub fn l_dr_unchecked(t: f64, rho: f64, cfg: &LossConfig) -> f64 {
    let LossConfig { d, mu } = *cfg;
    let mu2 = mu * mu;
    (d / mu) * (pos(mu - t + rho) - pos(-mu2 - t + rho))
        + ((1.0 - d) / mu) * (pos(mu - t - rho) - pos(-mu2 - t - rho))
}

/// Double ramp loss. Fails when `rho < mu (1 + mu) / 2`.
pub fn l_dr(t: f64, rho: f64, cfg: &LossConfig) -> Result<f64> {
    cfg.check_rho(rho)?;
    Ok(l_dr_unchecked(t, rho, cfg))
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("eta must lie in [0, 1], got {eta}")))
    }
}

/// Generalized Bayes rule for a posterior `eta = P(y = 1 | x)`.
pub fn bayes_discriminant(eta: f64, cfg: &LossConfig) -> Result<Decision> {
    check_eta(eta)?;
    Ok(if eta > 1.0 - cfg.d {
        Decision::Positive
    } else if eta < cfg.d {
        Decision::Negative
    } else {
        Decision::Reject
    })
}

/// Expected double ramp loss at score `z` when `P(y = 1) = eta`.
pub fn conditional_risk(eta: f64, z: f64, rho: f64, cfg: &LossConfig) -> Result<f64> {
    check_eta(eta)?;
    cfg.check_rho(rho)?;
    Ok(conditional_risk_unchecked(eta, z, rho, cfg))
}

#[inline]
pub fn conditional_risk_unchecked(eta: f64, z: f64, rho: f64, cfg: &LossConfig) -> f64 {
    eta * l_dr_unchecked(z, rho, cfg) + (1.0 - eta) * l_dr_unchecked(-z, rho, cfg)
}

/// Closed-form nine-piece expression of the conditional risk.
///
/// The pieces are ordered along `z`; they only tile the line when
/// `rho >= mu`, so smaller `rho` is rejected. Agrees with
/// [`conditional_risk`] wherever both are defined.
pub fn conditional_risk_piecewise(eta: f64, z: f64, rho: f64, cfg: &LossConfig) -> Result<f64> {
    check_eta(eta)?;
    cfg.check_rho(rho)?;
    if rho < cfg.mu {
        return Err(Error::InvalidConfig(format!(
            "piecewise conditional risk needs rho >= mu, got rho = {rho}, mu = {}",
            cfg.mu
        )));
    }
    let LossConfig { d, mu } = *cfg;
    let mu2 = mu * mu;
    let e = eta;
    let ne = 1.0 - eta;
    let v = if z <= -rho - mu {
        e * (1.0 + mu)
    } else if z <= -rho - mu2 {
        e * (1.0 + mu) + ne * (mu + z + rho) * d / mu
    } else if z <= -rho + mu2 {
        e * d * (1.0 + mu) + e * (mu - z - rho) * (1.0 - d) / mu + ne * (mu + z + rho) * d / mu
    } else if z <= -rho + mu {
        e * d * (1.0 + mu) + e * (mu - z - rho) * (1.0 - d) / mu + ne * (1.0 + mu) * d
    } else if z <= rho - mu {
        d * (1.0 + mu)
    } else if z <= rho - mu2 {
        e * d * (1.0 + mu) + ne * (1.0 + mu) * d + ne * (z - rho + mu) * (1.0 - d) / mu
    } else if z <= rho + mu2 {
        e * (rho + mu - z) * d / mu + ne * (1.0 + mu) * d + ne * (z - rho + mu) * (1.0 - d) / mu
    } else if z <= rho + mu {
        e * (rho + mu - z) * d / mu + ne * (1.0 + mu)
    } else {
        ne * (1.0 + mu)
    };
    Ok(v)
}

/// Minimum of the conditional risk over all scores, together with the
/// region that attains it. Ties at `eta` in `{d, 1 - d}` go to `Reject`.
pub fn optimal_conditional_risk(eta: f64, cfg: &LossConfig) -> Result<(f64, Decision)> {
    check_eta(eta)?;
    let scale = 1.0 + cfg.mu;
    Ok(if eta < cfg.d {
        (eta * scale, Decision::Negative)
    } else if eta > 1.0 - cfg.d {
        ((1.0 - eta) * scale, Decision::Positive)
    } else {
        (cfg.d * scale, Decision::Reject)
    })
}
