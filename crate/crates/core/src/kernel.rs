//! Kernels and dense Gram matrices.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(-gamma * |x - y|^2)`
    Gaussian { gamma: f64 },
    Linear,
}

impl KernelSpec {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(KernelSpec::Gaussian { gamma })
        } else {
            Err(Error::InvalidConfig(format!(
                "gaussian kernel needs gamma > 0, got {gamma}"
            )))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Gaussian { gamma } => KernelSpec::gaussian(gamma).map(|_| ()),
            KernelSpec::Linear => Ok(()),
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            KernelSpec::Gaussian { gamma } => Some(gamma),
            KernelSpec::Linear => None,
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
        match *self {
            KernelSpec::Gaussian { gamma } => {
                let sq: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * sq).exp()
            }
            KernelSpec::Linear => x.iter().zip(y.iter()).map(|(a, b)| a * b).sum(),
        }
    }
}

pub fn eval_kernel(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(spec.eval_unchecked(ArrayView1::from(x), ArrayView1::from(y)))
}

/// Symmetric `n x n` matrix of kernel values on a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    entries: Array2<f64>,
}

impl KernelMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    /// Principal submatrix on `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> KernelMatrix {
        let n = idx.len();
        let mut entries = Array2::zeros((n, n));
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                entries[[a, b]] = self.entries[[i, j]];
            }
        }
        KernelMatrix { entries }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Gram matrix of the rows of `data`. The upper triangle is computed and
/// mirrored, so the result is exactly symmetric.
pub fn gram_matrix(spec: &KernelSpec, data: ArrayView2<f64>) -> Result<KernelMatrix> {
    spec.validate()?;
    let n = data.nrows();
    if n == 0 {
        return Err(Error::Domain("gram matrix of an empty data set".into()));
    }
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        let xi = data.row(i);
        for j in i..n {
            let v = spec.eval_unchecked(xi, data.row(j));
            entries[[i, j]] = v;
            entries[[j, i]] = v;
        }
    }
    Ok(KernelMatrix { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_values() {
        let g = KernelSpec::gaussian(1.0).unwrap();
        assert_eq!(eval_kernel(&g, &[0.3, -1.0], &[0.3, -1.0]).unwrap(), 1.0);
        let v = eval_kernel(&g, &[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((v - 0.367_879_441_171_442_33).abs() < 1e-15);
        assert_eq!(eval_kernel(&KernelSpec::Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn dimension_mismatch() {
        let err = eval_kernel(&KernelSpec::Linear, &[1.0], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::Shape { expected: 1, got: 2 }));
    }

    #[test]
    fn bad_gamma() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
        assert!(gram_matrix(&KernelSpec::Gaussian { gamma: -1.0 }, array![[1.0]].view()).is_err());
    }

    #[test]
    fn small_grams() {
        let g = KernelSpec::gaussian(0.5).unwrap();
        let one = gram_matrix(&g, array![[2.0, 3.0]].view()).unwrap();
        assert_eq!(one.entries(), &array![[1.0]]);
        let two = gram_matrix(&g, array![[2.0, 3.0], [2.0, 3.0]].view()).unwrap();
        assert_eq!(two.entries(), &Array2::from_elem((2, 2), 1.0));
    }

    #[test]
    fn gram_matches_pointwise_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = Array2::from_shape_fn((7, 4), |_| rng.random_range(-2.0..2.0));
        for spec in [KernelSpec::gaussian(0.7).unwrap(), KernelSpec::Linear] {
            let k = gram_matrix(&spec, data.view()).unwrap();
            for i in 0..7 {
                for j in 0..7 {
                    let row_i: Vec<f64> = data.row(i).to_vec();
                    let row_j: Vec<f64> = data.row(j).to_vec();
                    let direct = eval_kernel(&spec, &row_i, &row_j).unwrap();
                    assert_eq!(k.get(i, j).to_bits(), k.get(j, i).to_bits());
                    assert_eq!(k.get(i, j).to_bits(), direct.to_bits());
                }
            }
            // 2x2 principal minors are nonnegative
            for i in 0..7 {
                for j in 0..7 {
                    let minor = k.get(i, i) * k.get(j, j) - k.get(i, j) * k.get(j, i);
                    assert!(minor >= -1e-10);
                }
            }
        }
    }

    #[test]
    fn select_is_principal_submatrix() {
        let data = array![[0.0], [1.0], [3.0]];
        let k = gram_matrix(&KernelSpec::Linear, data.view()).unwrap();
        let s = k.select(&[2, 0]);
        assert_eq!(s.entries(), &array![[9.0, 0.0], [0.0, 0.0]]);
    }
}
