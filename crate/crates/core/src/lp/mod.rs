//! Chebyshev (minimax) linear programs over a handful of measurements.
//!
//! `min s  s.t.  -s <= a_i . beta - y_i <= s` is written in standard form with
//! `beta = beta_plus - beta_minus` and handed to the dense simplex in
//! [`simplex`].

mod simplex;

use crate::error::{Error, Result};
use crate::problem::{Coefficients, RegressionProblem};

use simplex::Simplex;

/// Relative slack when deciding that a row attains the optimal level.
pub const ACTIVE_TOL_REL: f64 = 1e-7;
/// Absolute slack for the same decision, guarding levels near zero.
pub const ACTIVE_TOL_ABS: f64 = 1e-12;

/// At most `d + 2` measurements of a regression problem.
#[derive(Clone, Debug)]
pub struct ChebyshevSubproblem {
    problem: RegressionProblem,
}

impl ChebyshevSubproblem {
    pub fn new(problem: RegressionProblem) -> Result<Self> {
        let limit = problem.dim() + 2;
        if problem.len() > limit {
            return Err(Error::SubproblemTooLarge { rows: problem.len(), limit });
        }
        Ok(Self { problem })
    }

    /// Subproblem made of the rows of `problem` at `positions`.
    pub fn from_positions(problem: &RegressionProblem, positions: &[usize]) -> Result<Self> {
        let limit = problem.dim() + 2;
        if positions.len() > limit {
            return Err(Error::SubproblemTooLarge { rows: positions.len(), limit });
        }
        Self::new(problem.subset(positions)?)
    }

    pub fn problem(&self) -> &RegressionProblem {
        &self.problem
    }
}

#[derive(Clone, Debug)]
pub struct ChebyshevSolution {
    pub beta: Coefficients,
    /// Optimal level `s*`, the largest absolute residual over the rows.
    pub level: f64,
    /// Labels of the rows whose residual attains `level`.
    pub active_constraints: Vec<usize>,
    pub pivot_count: usize,
}

/// Scratch space for repeated solves. One workspace per thread.
#[derive(Debug, Default)]
pub struct LpWorkspace {
    simplex: Simplex,
    g: Vec<f64>,
    h: Vec<f64>,
    c: Vec<f64>,
    col_scale: Vec<f64>,
}

impl LpWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&mut self, sub: &ChebyshevSubproblem) -> Result<ChebyshevSolution> {
        self.solve_problem(&sub.problem)
    }

    /// The same LP over every row of `problem`, without the `d + 2` bound.
    pub(crate) fn solve_problem(&mut self, problem: &RegressionProblem) -> Result<ChebyshevSolution> {
        let all: Vec<usize> = (0..problem.len()).collect();
        self.solve_rows(problem, &all)
    }

    /// The LP restricted to the rows of `problem` at `positions`, read in
    /// place. Column generation calls this once per iteration.
    pub(crate) fn solve_rows(
        &mut self,
        problem: &RegressionProblem,
        positions: &[usize],
    ) -> Result<ChebyshevSolution> {
        if positions.len() == 1 {
            return Ok(single_row(problem, positions[0]));
        }
        let d = problem.dim();
        let nv = 2 * d + 1;
        let m = positions.len();
        // Equilibrate: unit max-norm columns and response. The simplex
        // tolerances are absolute, so they need data of order one.
        self.col_scale.clear();
        self.col_scale.resize(d, 0.0);
        let mut y_scale: f64 = 0.0;
        for &i in positions {
            for (s, a) in self.col_scale.iter_mut().zip(problem.row(i)) {
                *s = s.max(a.abs());
            }
            y_scale = y_scale.max(problem.response()[i].abs());
        }
        for s in self.col_scale.iter_mut() {
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        if y_scale == 0.0 {
            y_scale = 1.0;
        }

        self.g.clear();
        self.g.reserve(2 * m * nv);
        self.h.clear();
        for &i in positions {
            let y = problem.response()[i] / y_scale;
            let start = self.g.len();
            // a.beta - s <= y
            self.g.extend(problem.row(i).iter().zip(&self.col_scale).map(|(a, s)| a / s));
            self.g.extend_from_within(start..start + d);
            for v in &mut self.g[start + d..start + 2 * d] {
                *v = -*v;
            }
            self.g.push(-1.0);
            self.h.push(y);
            // -a.beta - s <= -y
            self.g.extend_from_within(start..start + nv);
            for v in &mut self.g[start + nv..start + nv + 2 * d] {
                *v = -*v;
            }
            self.h.push(-y);
        }
        self.c.clear();
        self.c.resize(nv, 0.0);
        self.c[nv - 1] = 1.0;

        let out = self.simplex.solve(&self.g, &self.h, &self.c)?;
        debug_assert!(self.simplex.is_optimal());
        let beta: Vec<f64> = (0..d)
            .map(|j| (out.x[j] - out.x[d + j]) * y_scale / self.col_scale[j])
            .collect();
        let beta = Coefficients::new(beta)
            .map_err(|_| Error::NumericalFailure("non-finite simplex solution".into()))?;
        let lp_level = out.objective * y_scale;
        let level = positions.iter().fold(0.0_f64, |m, &i| m.max(problem.residual(i, &beta).abs()));
        if level > lp_level + 1e-6 * (y_scale + level) {
            return Err(Error::NumericalFailure(format!(
                "simplex level {lp_level} disagrees with recomputed residual {level}"
            )));
        }
        let cut = level * (1.0 - ACTIVE_TOL_REL) - ACTIVE_TOL_ABS;
        let active_constraints = positions
            .iter()
            .filter(|&&i| problem.residual(i, &beta).abs() >= cut)
            .map(|&i| problem.labels()[i])
            .collect();
        Ok(ChebyshevSolution { beta, level, active_constraints, pivot_count: out.pivots })
    }

    /// Text dump of the final tableau of the last solve.
    pub fn dump_tableau(&self) -> String {
        self.simplex.dump()
    }
}

/// Solves `sub` with a fresh workspace.
pub fn solve_chebyshev(sub: &ChebyshevSubproblem) -> Result<ChebyshevSolution> {
    LpWorkspace::new().solve(sub)
}

/// One row: the minimum-norm exact fit, or `beta = 0` for an all-zero row.
fn single_row(problem: &RegressionProblem, i: usize) -> ChebyshevSolution {
    let a = problem.row(i);
    let y = problem.response()[i];
    let nrm2: f64 = a.iter().map(|v| v * v).sum();
    let beta: Vec<f64> = if nrm2 > 0.0 {
        a.iter().map(|v| v * y / nrm2).collect()
    } else {
        vec![0.0; a.len()]
    };
    let beta = Coefficients::new(beta).expect("finite");
    let level = if nrm2 > 0.0 { 0.0 } else { y.abs() };
    ChebyshevSolution {
        beta,
        level,
        active_constraints: vec![problem.labels()[i]],
        pivot_count: 0,
    }
}
