//! Synthetic binary distributions with known posterior `eta(x) = P(y = 1 | x)`.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: f64,
    pub std: f64,
}

impl Component {
    pub fn new(weight: f64, mean: f64, std: f64) -> Self {
        Self { weight, mean, std }
    }

    fn density(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std;
        self.weight * (-0.5 * z * z).exp() / (self.std * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Class-conditional Gaussian mixtures on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixture1d {
    pub name: String,
    /// `P(y = 1)`
    pub prior_pos: f64,
    pub pos: Vec<Component>,
    pub neg: Vec<Component>,
}

fn mixture_density(cs: &[Component], x: f64) -> f64 {
    cs.iter().map(|c| c.density(x)).sum()
}

fn sample_mixture<R: Rng + ?Sized>(cs: &[Component], rng: &mut R) -> f64 {
    let total: f64 = cs.iter().map(|c| c.weight).sum();
    let mut u = rng.random::<f64>() * total;
    let mut pick = cs[cs.len() - 1];
    for c in cs {
        if u < c.weight {
            pick = *c;
            break;
        }
        u -= c.weight;
    }
    let z: f64 = StandardNormal.sample(rng);
    pick.mean + pick.std * z
}

impl Mixture1d {
    pub fn new(name: &str, prior_pos: f64, pos: Vec<Component>, neg: Vec<Component>) -> Result<Self> {
        if !(prior_pos > 0.0 && prior_pos < 1.0) {
            return Err(Error::Domain(format!("class prior must lie in (0, 1), got {prior_pos}")));
        }
        for c in pos.iter().chain(&neg) {
            if !(c.weight > 0.0 && c.std > 0.0 && c.mean.is_finite()) {
                return Err(Error::Domain("mixture components need positive weight and std".into()));
            }
        }
        if pos.is_empty() || neg.is_empty() {
            return Err(Error::Domain("each class needs at least one component".into()));
        }
        Ok(Self {
            name: name.into(),
            prior_pos,
            pos,
            neg,
        })
    }

    /// Equal priors, unit variances, means at -1 and +1; `eta(x) = 1 / (1 + e^{-2x})`.
    pub fn symmetric_pair() -> Self {
        Self::new(
            "symmetric-pair",
            0.5,
            vec![Component::new(1.0, 1.0, 1.0)],
            vec![Component::new(1.0, -1.0, 1.0)],
        )
        .expect("valid constants")
    }

    pub fn skewed_pair() -> Self {
        Self::new(
            "skewed-pair",
            0.3,
            vec![Component::new(1.0, 0.5, 0.5)],
            vec![Component::new(1.0, -0.5, 1.5)],
        )
        .expect("valid constants")
    }

    /// Positive class split around a central negative class.
    pub fn sandwich() -> Self {
        Self::new(
            "sandwich",
            0.5,
            vec![Component::new(0.5, -2.0, 0.7), Component::new(0.5, 2.0, 0.7)],
            vec![Component::new(1.0, 0.0, 1.0)],
        )
        .expect("valid constants")
    }

    pub fn standard_set() -> Vec<Self> {
        vec![Self::symmetric_pair(), Self::skewed_pair(), Self::sandwich()]
    }

    pub fn eta(&self, x: f64) -> f64 {
        let wp: f64 = self.pos.iter().map(|c| c.weight).sum();
        let wn: f64 = self.neg.iter().map(|c| c.weight).sum();
        let p = self.prior_pos * mixture_density(&self.pos, x) / wp;
        let n = (1.0 - self.prior_pos) * mixture_density(&self.neg, x) / wn;
        if p + n == 0.0 {
            // Far tails underflow; fall back to the class with the wider spread.
            let sp = self.pos.iter().map(|c| c.std).fold(0.0, f64::max);
            let sn = self.neg.iter().map(|c| c.std).fold(0.0, f64::max);
            return if sp >= sn { 1.0 } else { 0.0 };
        }
        p / (p + n)
    }

    /// Draws `x` from the marginal.
    pub fn sample_x<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample(rng).0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        if rng.random::<f64>() < self.prior_pos {
            (sample_mixture(&self.pos, rng), 1.0)
        } else {
            (sample_mixture(&self.neg, rng), -1.0)
        }
    }

    pub fn dataset<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Dataset> {
        let mut x = Array2::zeros((n, 1));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let (xi, yi) = self.sample(rng);
            x[[i, 0]] = xi;
            y.push(yi);
        }
        Dataset::new(x, y)
    }
}

/// Two isotropic Gaussians with means `±shift * e_1` in `dim` dimensions and equal priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPair {
    pub dim: usize,
    pub shift: f64,
    pub std: f64,
}

impl GaussianPair {
    pub fn new(dim: usize, shift: f64, std: f64) -> Result<Self> {
        if dim == 0 || !(std > 0.0) || !shift.is_finite() {
            return Err(Error::Domain("need dim >= 1, std > 0, finite shift".into()));
        }
        Ok(Self { dim, shift, std })
    }

    /// Means `±(1, 0)`, identity covariance.
    pub fn overlap_2d() -> Self {
        Self {
            dim: 2,
            shift: 1.0,
            std: 1.0,
        }
    }

    /// `eta(x) = 1 / (1 + exp(-2 shift x_1 / std^2))`
    pub fn eta(&self, x: &[f64]) -> f64 {
        let s = 2.0 * self.shift * x[0] / (self.std * self.std);
        1.0 / (1.0 + (-s).exp())
    }

    /// Labels are drawn first, so a small sample can be single-class; callers needing
    /// both classes should check [`Dataset::has_both_classes`].
    pub fn dataset<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Dataset> {
        let noise = Normal::new(0.0, self.std).map_err(|e| Error::Domain(e.to_string()))?;
        let mut x = Array2::zeros((n, self.dim));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let label = if rng.random::<bool>() { 1.0 } else { -1.0 };
            for j in 0..self.dim {
                x[[i, j]] = noise.sample(rng);
            }
            x[[i, 0]] += label * self.shift;
            y.push(label);
        }
        Dataset::new(x, y)
    }
}
