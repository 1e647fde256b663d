//! Trained classifiers: scoring, three-way prediction and persistence.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Standardizer};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::loss::{Decision, LossConfig};
use crate::trainer::{ModelParams, TrainConfig};

pub const FORMAT_VERSION: &str = "sdr-svm/1";

/// Coefficients below this are not support vectors.
pub const SV_THRESHOLD: f64 = 1e-6;

pub fn support_count(alpha: &[f64]) -> usize {
    alpha.iter().filter(|&&a| a >= SV_THRESHOLD).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    pub x: Vec<f64>,
    pub y: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub lambda: f64,
    pub epsilon: f64,
    pub max_dc_iters: usize,
    pub n_train: usize,
    /// FNV-1a hash of the training configuration, hex encoded.
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format: String,
    pub kernel: KernelSpec,
    pub loss: LossConfig,
    pub b: f64,
    pub rho: f64,
    /// Features live in standardized space when `standardizer` is set.
    pub support_vectors: Vec<SupportVector>,
    pub dim: usize,
    pub standardizer: Option<Standardizer>,
    pub metadata: ModelMetadata,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn config_digest(kernel: &KernelSpec, cfg: &TrainConfig) -> String {
    let text = serde_json::to_string(&(kernel, cfg)).expect("plain data serializes");
    format!("{:016x}", fnv1a(text.as_bytes()))
}

impl SavedModel {
    /// Keeps the training points whose coefficient reaches [`SV_THRESHOLD`].
    pub fn from_training(params: &ModelParams, data: &Dataset, kernel: &KernelSpec, cfg: &TrainConfig) -> Result<Self> {
        if params.alpha.len() != data.len() {
            return Err(Error::Shape {
                expected: data.len(),
                got: params.alpha.len(),
            });
        }
        let support_vectors = params
            .alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| a >= SV_THRESHOLD)
            .map(|(i, &a)| SupportVector {
                x: data.features.row(i).to_vec(),
                y: data.labels[i],
                alpha: a,
            })
            .collect();
        Ok(Self {
            format: FORMAT_VERSION.to_string(),
            kernel: *kernel,
            loss: cfg.loss,
            b: params.b,
            rho: params.rho,
            support_vectors,
            dim: data.dim(),
            standardizer: data.standardizer.clone(),
            metadata: ModelMetadata {
                lambda: cfg.lambda,
                epsilon: cfg.epsilon,
                max_dc_iters: cfg.max_dc_iters,
                n_train: data.len(),
                config_digest: config_digest(kernel, cfg),
            },
        })
    }

    pub fn support_count(&self) -> usize {
        self.support_vectors.len()
    }

    /// `f(x) = sum_j y_j alpha_j K(x_j, x) + b` over the retained support vectors.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                got: x.len(),
            });
        }
        let xv = ndarray::ArrayView1::from(x);
        let mut s = 0.0;
        for sv in &self.support_vectors {
            let k = self.kernel.eval_unchecked(ndarray::ArrayView1::from(&sv.x[..]), xv);
            s += sv.y * sv.alpha * k;
        }
        Ok(s + self.b)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Decision> {
        Ok(Decision::from_score(self.decision_value(x)?, self.rho))
    }

    /// Applies the stored standardization before scoring.
    pub fn predict_raw(&self, raw: &[f64]) -> Result<Decision> {
        match &self.standardizer {
            Some(st) => self.predict(&st.transform_row(raw)?),
            None => self.predict(raw),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn save(&self) -> Vec<u8> {
        let mut bytes = self.to_json().into_bytes();
        bytes.push(b'\n');
        bytes
    }

    pub fn load(bytes: &[u8]) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_slice(bytes).map_err(|e| Error::CorruptPayload(e.to_string()))?;
        let found = value
            .get("format")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::CorruptPayload("missing format field".into()))?;
        if found != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: FORMAT_VERSION.into(),
                found: found.into(),
            });
        }
        let model: SavedModel = serde_json::from_value(value).map_err(|e| Error::CorruptPayload(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let corrupt = |m: String| Error::CorruptPayload(m);
        LossConfig::new(self.loss.d, self.loss.mu).map_err(|e| corrupt(e.to_string()))?;
        self.kernel.validate().map_err(|e| corrupt(e.to_string()))?;
        self.loss.check_rho(self.rho).map_err(|e| corrupt(e.to_string()))?;
        for sv in &self.support_vectors {
            if sv.x.len() != self.dim {
                return Err(corrupt(format!("support vector of dimension {} in a {}-d model", sv.x.len(), self.dim)));
            }
            if sv.alpha < SV_THRESHOLD || (sv.y != 1.0 && sv.y != -1.0) {
                return Err(corrupt("invalid support vector coefficient or label".into()));
            }
        }
        if let Some(st) = &self.standardizer {
            if st.kept.len() != self.dim {
                return Err(corrupt("standardizer does not match model dimension".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gram_matrix;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bare_model(kernel: KernelSpec, b: f64, rho: f64, svs: Vec<SupportVector>, dim: usize) -> SavedModel {
        let cfg = TrainConfig::new(0.1, LossConfig::new(0.2, 1.0).unwrap());
        SavedModel {
            format: FORMAT_VERSION.into(),
            kernel,
            loss: cfg.loss,
            b,
            rho,
            support_vectors: svs,
            dim,
            standardizer: None,
            metadata: ModelMetadata {
                lambda: 0.1,
                epsilon: 1e-5,
                max_dc_iters: 50,
                n_train: 0,
                config_digest: config_digest(&kernel, &cfg),
            },
        }
    }

    #[test]
    fn empty_support_set() {
        let m = bare_model(KernelSpec::Linear, 0.5, 1.0, vec![], 2);
        assert_eq!(m.decision_value(&[3.0, 4.0]).unwrap(), 0.5);
    }

    #[test]
    fn single_support_vector_at_query() {
        let sv = SupportVector {
            x: vec![0.3, -0.2],
            y: 1.0,
            alpha: 2.0,
        };
        let m = bare_model(KernelSpec::gaussian(1.3).unwrap(), 0.0, 1.0, vec![sv], 2);
        assert_eq!(m.decision_value(&[0.3, -0.2]).unwrap(), 2.0);
        assert!(matches!(m.decision_value(&[0.3]), Err(Error::Shape { expected: 2, got: 1 })));
    }

    #[test]
    fn band_edges() {
        let m = bare_model(KernelSpec::Linear, 1.0, 1.0, vec![], 1);
        assert_eq!(m.predict(&[0.0]).unwrap(), Decision::Reject);
        let m = bare_model(KernelSpec::Linear, 1.001, 1.0, vec![], 1);
        assert_eq!(m.predict(&[0.0]).unwrap(), Decision::Positive);
        let m = bare_model(KernelSpec::Linear, -1.001, 1.0, vec![], 1);
        assert_eq!(m.predict(&[0.0]).unwrap(), Decision::Negative);
    }

    #[test]
    fn support_counting() {
        assert_eq!(support_count(&[0.0, 0.0, 0.0]), 0);
        assert_eq!(support_count(&[1e-7, 1e-6, 0.5]), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let alpha: Vec<f64> = (0..500).map(|_| 10f64.powf(rng.random_range(-9.0..0.0))).collect();
        let mut brute = 0;
        for a in &alpha {
            if *a >= 1e-6 {
                brute += 1;
            }
        }
        assert_eq!(support_count(&alpha), brute);
    }

    #[test]
    fn pruning_error_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 40;
        let x = Array2::from_shape_fn((n, 3), |_| rng.random_range(-1.0..1.0));
        let labels: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let data = Dataset::new(x.clone(), labels.clone()).unwrap();
        let alpha: Vec<f64> = (0..n)
            .map(|i| if i % 3 == 0 { rng.random_range(0.0..1e-6) } else { rng.random_range(0.0..1.0) })
            .collect();
        let params = ModelParams { alpha: alpha.clone(), b: 0.1, rho: 1.0 };
        let kernel = KernelSpec::gaussian(0.5).unwrap();
        let cfg = TrainConfig::new(0.1, LossConfig::new(0.2, 1.0).unwrap());
        let m = SavedModel::from_training(&params, &data, &kernel, &cfg).unwrap();
        let kmax = gram_matrix(&kernel, x.view()).unwrap().max_abs();
        for _ in 0..100 {
            let q: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let full: f64 = (0..n)
                .map(|j| labels[j] * alpha[j] * crate::kernel::eval_kernel(&kernel, &x.row(j).to_vec(), &q).unwrap())
                .sum::<f64>()
                + 0.1;
            let pruned = m.decision_value(&q).unwrap();
            assert!((full - pruned).abs() <= SV_THRESHOLD * n as f64 * kmax);
        }
    }

    #[test]
    fn save_load_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let svs = (0..5)
            .map(|i| SupportVector {
                x: vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                y: if i % 2 == 0 { 1.0 } else { -1.0 },
                alpha: rng.random_range(0.1..1.0),
            })
            .collect();
        let m = bare_model(KernelSpec::gaussian(0.37).unwrap(), -0.123456789, 1.5, svs, 2);
        let back = SavedModel::load(&m.save()).unwrap();
        assert_eq!(m, back);
        for _ in 0..50 {
            let q = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            assert_eq!(
                m.decision_value(&q).unwrap().to_bits(),
                back.decision_value(&q).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn truncated_payload() {
        let m = bare_model(KernelSpec::Linear, 0.0, 1.0, vec![], 1);
        let bytes = m.save();
        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(SavedModel::load(cut), Err(Error::CorruptPayload(_))));
    }

    #[test]
    fn version_bump_rejected() {
        let m = bare_model(KernelSpec::Linear, 0.0, 1.0, vec![], 1);
        let text = String::from_utf8(m.save()).unwrap().replace("sdr-svm/1", "sdr-svm/2");
        assert!(matches!(
            SavedModel::load(text.as_bytes()),
            Err(Error::VersionMismatch { ref found, .. }) if found == "sdr-svm/2"
        ));
    }
}
