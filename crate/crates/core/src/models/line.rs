use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::{Coefficients, RegressionProblem};

use super::{chi_squared_5, seeded_rng};

/// Which side of the regression surface the outlier errors fall on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Sidedness {
    #[default]
    OneSided,
    TwoSided,
}

/// Contaminated linear data: the first `k` errors are standard normal, the
/// remaining `n - k` are chi-squared with five degrees of freedom (with a
/// random sign when two-sided).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContaminationSpec {
    pub n: usize,
    pub k: usize,
    pub dim: usize,
    pub sidedness: Sidedness,
    /// Make the last column all ones so `dim = 2` is a line `y = m x + b`.
    pub intercept: bool,
    pub seed: u64,
}

impl ContaminationSpec {
    /// A line-fitting instance: one uniform regressor plus an intercept.
    pub fn line(n: usize, k: usize, sidedness: Sidedness, seed: u64) -> Self {
        Self { n, k, dim: 2, sidedness, intercept: true, seed }
    }

    /// The timing workload: seventy percent inliers, one-sided
    /// contamination, and an intercept column once `dim >= 2`.
    pub fn timing(n: usize, dim: usize, seed: u64) -> Self {
        Self {
            n,
            k: (7 * n).div_ceil(10),
            dim,
            sidedness: Sidedness::OneSided,
            intercept: dim >= 2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k > self.n {
            return Err(Error::InvalidInput(format!(
                "inlier count k = {} must satisfy 1 <= k <= n = {}",
                self.k, self.n
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledProblem {
    pub problem: RegressionProblem,
    pub true_beta: Coefficients,
    /// `true` marks a contaminated row.
    pub outlier_mask: Vec<bool>,
}

impl LabeledProblem {
    pub fn outlier_labels(&self) -> Vec<usize> {
        self.outlier_mask
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(i, _)| self.problem.labels()[i])
            .collect()
    }
}

/// Draws `A` uniform on `[-1, 1]^d`, `beta` uniform on `[-1, 1]^d`, and sets
/// `y = A beta + e`.
pub fn gen_line_data(spec: &ContaminationSpec) -> Result<LabeledProblem> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let d = spec.dim;
    let random_cols = if spec.intercept { d - 1 } else { d };
    let mut rows = Vec::with_capacity(spec.n * d);
    for _ in 0..spec.n {
        for _ in 0..random_cols {
            rows.push(rng.random_range(-1.0..=1.0));
        }
        if spec.intercept {
            rows.push(1.0);
        }
    }
    let beta: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut response = Vec::with_capacity(spec.n);
    let mut mask = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let clean: f64 = rows[i * d..(i + 1) * d].iter().zip(&beta).map(|(a, b)| a * b).sum();
        let outlier = i >= spec.k;
        let err = if outlier {
            let e = chi_squared_5(&mut rng);
            match spec.sidedness {
                Sidedness::OneSided => e,
                Sidedness::TwoSided => {
                    if rng.random_bool(0.5) { e } else { -e }
                }
            }
        } else {
            rng.sample::<f64, _>(StandardNormal)
        };
        response.push(clean + err);
        mask.push(outlier);
    }
    Ok(LabeledProblem {
        problem: RegressionProblem::new(rows, d, response)?,
        true_beta: Coefficients::new(beta)?,
        outlier_mask: mask,
    })
}
