//! Regression problems, residuals and the least-squares baseline.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ridge used when the plain normal equations turn out singular.
pub const FALLBACK_RIDGE: f64 = 1e-8;

/// A pivot of the Cholesky factor below this fraction of the largest diagonal
/// entry of the normal matrix marks it singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// Dense measurement matrix `A` (n x d, row-major) and response `y`, with a
/// stable label per row that survives subset extraction.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionProblem {
    rows: Vec<f64>,
    response: Vec<f64>,
    labels: Vec<usize>,
    dim: usize,
}

impl RegressionProblem {
    /// Builds a problem from row-major data. Labels are `0..n`.
    pub fn new(rows: Vec<f64>, dim: usize, response: Vec<f64>) -> Result<Self> {
        let labels = (0..response.len()).collect();
        Self::with_labels(rows, dim, response, labels)
    }

    pub fn with_labels(
        rows: Vec<f64>,
        dim: usize,
        response: Vec<f64>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if response.is_empty() {
            return Err(Error::InvalidInput("problem needs at least one row".into()));
        }
        if rows.len() != response.len() * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} matrix entries for {} rows of dimension {}",
                rows.len(),
                response.len(),
                dim
            )));
        }
        if labels.len() != response.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} rows",
                labels.len(),
                response.len()
            )));
        }
        if let Some(pos) = rows.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / dim, col: pos % dim });
        }
        if let Some(row) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, col: dim });
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("row labels must be unique".into()));
        }
        Ok(Self { rows, response, labels, dim })
    }

    /// Builds a problem from a slice of rows.
    pub fn from_rows(rows: &[Vec<f64>], response: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("rows have differing lengths".into()));
        }
        Self::new(rows.concat(), dim, response)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.response.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.response.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    #[inline]
    pub fn response(&self) -> &[f64] {
        &self.response
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Position of the row carrying `label`, if any.
    pub fn position_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Extracts the rows at `positions`, keeping their labels.
    pub fn subset(&self, positions: &[usize]) -> Result<Self> {
        let mut rows = Vec::with_capacity(positions.len() * self.dim);
        let mut response = Vec::with_capacity(positions.len());
        let mut labels = Vec::with_capacity(positions.len());
        for &p in positions {
            if p >= self.len() {
                return Err(Error::InvalidInput(format!("row position {p} out of range")));
            }
            rows.extend_from_slice(self.row(p));
            response.push(self.response[p]);
            labels.push(self.labels[p]);
        }
        Self::with_labels(rows, self.dim, response, labels)
    }

    /// Same problem with every row and response multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::with_labels(
            self.rows.iter().map(|v| v * factor).collect(),
            self.dim,
            self.response.iter().map(|v| v * factor).collect(),
            self.labels.clone(),
        )
    }

    /// Signed residual `a_i . beta - y_i` of row `i`.
    #[inline]
    pub fn residual(&self, i: usize, beta: &[f64]) -> f64 {
        dot(self.row(i), beta) - self.response[i]
    }

    fn check_beta(&self, beta: &[f64]) -> Result<()> {
        if beta.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector has length {}, problem dimension is {}",
                beta.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Regression coefficients `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients(Vec<f64>);

impl Coefficients {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidInput("empty coefficient vector".into()));
        }
        if let Some(col) = beta.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        Ok(Self(beta))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Deref for Coefficients {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// How a raw residual `r = a_i . beta - y_i` is turned into a cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualKind {
    Absolute,
    Squared,
}

impl ResidualKind {
    #[inline]
    pub fn apply(self, r: f64) -> f64 {
        match self {
            ResidualKind::Absolute => r.abs(),
            ResidualKind::Squared => r * r,
        }
    }
}

/// Per-row residual costs, in row order.
pub fn residuals(
    problem: &RegressionProblem,
    beta: &[f64],
    kind: ResidualKind,
) -> Result<Vec<f64>> {
    problem.check_beta(beta)?;
    Ok((0..problem.len())
        .map(|i| kind.apply(problem.residual(i, beta)))
        .collect())
}

/// Largest absolute residual over all rows.
pub fn max_abs_residual(problem: &RegressionProblem, beta: &[f64]) -> f64 {
    (0..problem.len()).fold(0.0, |m, i| m.max(problem.residual(i, beta).abs()))
}

/// Solves `(A^T A + ridge I) beta = A^T y` by Cholesky factorization.
pub fn least_squares(problem: &RegressionProblem, ridge: f64) -> Result<Coefficients> {
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(Error::InvalidInput(format!("ridge must be finite and >= 0, got {ridge}")));
    }
    let d = problem.dim();
    let mut normal = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    for i in 0..problem.len() {
        let a = problem.row(i);
        let y = problem.response()[i];
        for j in 0..d {
            rhs[j] += a[j] * y;
            for k in 0..=j {
                normal[(j, k)] += a[j] * a[k];
            }
        }
    }
    for j in 0..d {
        normal[(j, j)] += ridge;
        for k in 0..j {
            normal[(k, j)] = normal[(j, k)];
        }
    }
    let max_diag = (0..d).fold(0.0_f64, |m, j| m.max(normal[(j, j)]));
    if max_diag <= 0.0 {
        return Err(Error::SingularNormalEquations);
    }
    let chol = normal.cholesky().ok_or(Error::SingularNormalEquations)?;
    let l = chol.l_dirty();
    if (0..d).any(|j| l[(j, j)] * l[(j, j)] < SINGULAR_PIVOT_RATIO * max_diag) {
        return Err(Error::SingularNormalEquations);
    }
    let beta = chol.solve(&rhs);
    Coefficients::new(beta.iter().copied().collect())
}

/// Plain least squares, retrying with [`FALLBACK_RIDGE`] when the normal
/// equations are singular.
pub fn least_squares_auto(problem: &RegressionProblem) -> Result<Coefficients> {
    match least_squares(problem, 0.0) {
        Err(Error::SingularNormalEquations) => least_squares(problem, FALLBACK_RIDGE),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(rows: &[&[f64]], y: &[f64]) -> RegressionProblem {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        RegressionProblem::from_rows(&rows, y.to_vec()).unwrap()
    }

    #[test]
    fn ls_identity_design() {
        let p = problem(&[&[1.0, 0.0], &[0.0, 1.0]], &[3.0, 4.0]);
        let b = least_squares(&p, 0.0).unwrap();
        assert!((b[0] - 3.0).abs() < 1e-12 && (b[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ls_mean_of_responses() {
        let p = problem(&[&[1.0], &[1.0]], &[1.0, 3.0]);
        assert!((least_squares(&p, 0.0).unwrap()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ls_ridge_halves() {
        let p = problem(&[&[1.0]], &[1.0]);
        assert!((least_squares(&p, 1.0).unwrap()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ls_singular_and_fallback() {
        // duplicated column
        let p = problem(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]], &[1.0, 2.0, 3.0]);
        assert!(matches!(least_squares(&p, 0.0), Err(Error::SingularNormalEquations)));
        let b = least_squares_auto(&p).unwrap();
        assert!((b[0] + b[1] - 1.0).abs() < 1e-6);

        // n < d
        let p = problem(&[&[1.0, 2.0]], &[1.0]);
        assert!(matches!(least_squares(&p, 0.0), Err(Error::SingularNormalEquations)));
        assert!(least_squares_auto(&p).is_ok());
    }

    #[test]
    fn ls_rejects_negative_ridge() {
        let p = problem(&[&[1.0]], &[1.0]);
        assert!(matches!(least_squares(&p, -1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn residual_examples() {
        let p = problem(&[&[1.0], &[1.0]], &[0.0, 2.0]);
        assert_eq!(residuals(&p, &[1.0], ResidualKind::Absolute).unwrap(), vec![1.0, 1.0]);
        assert_eq!(residuals(&p, &[1.0], ResidualKind::Squared).unwrap(), vec![1.0, 1.0]);
        let p = problem(&[&[2.0]], &[5.0]);
        assert_eq!(residuals(&p, &[1.0], ResidualKind::Absolute).unwrap(), vec![3.0]);
        assert!(matches!(
            residuals(&p, &[1.0, 2.0], ResidualKind::Absolute),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            RegressionProblem::new(vec![1.0, f64::NAN], 1, vec![0.0, 1.0]),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
        assert!(matches!(
            RegressionProblem::new(vec![1.0], 1, vec![f64::INFINITY]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            RegressionProblem::new(vec![1.0, 2.0, 3.0], 2, vec![0.0, 1.0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(RegressionProblem::new(vec![], 1, vec![]).is_err());
        assert!(RegressionProblem::with_labels(vec![1.0, 2.0], 1, vec![0.0, 1.0], vec![3, 3]).is_err());
    }

    #[test]
    fn subset_keeps_labels() {
        let p = problem(&[&[1.0], &[2.0], &[3.0]], &[4.0, 5.0, 6.0]);
        let s = p.subset(&[2, 0]).unwrap();
        assert_eq!(s.labels(), &[2, 0]);
        assert_eq!(s.row(0), &[3.0]);
        assert_eq!(s.response(), &[6.0, 4.0]);
        let ss = s.subset(&[1]).unwrap();
        assert_eq!(ss.labels(), &[0]);
        assert_eq!(s.position_of(0), Some(1));
    }
}
