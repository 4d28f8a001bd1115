//! Iterative outlier removal: repeatedly solve the minimax problem, delete
//! its support set, and restore deleted rows that fall strictly inside the
//! re-solved optimum.

use std::collections::BTreeSet;
use std::io::Write;

use crate::error::{Error, Result};
use crate::minimax::{solve_cg, solve_full_with, CgConfig, MinimaxSolution};
use crate::problem::{least_squares_auto, Coefficients, RegressionProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Solver {
    Full,
    #[default]
    ColumnGeneration,
}

/// How the removed-count `l` advances after a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RemovalCounting {
    /// `l += |support| - |remedied|`.
    #[default]
    Net,
    /// `l += |support|`, ignoring remedied rows.
    Gross,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemovalConfig {
    pub outlier_fraction: f64,
    pub solver: Solver,
    pub cg: CgConfig,
    pub counting: RemovalCounting,
}

impl RemovalConfig {
    pub fn new(outlier_fraction: f64) -> Self {
        Self {
            outlier_fraction,
            solver: Solver::default(),
            cg: CgConfig::default(),
            counting: RemovalCounting::default(),
        }
    }

    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    /// `floor(n p)`, validated against the room left for a `d + 1` row fit.
    pub fn target(&self, n: usize, d: usize) -> Result<usize> {
        let p = self.outlier_fraction;
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidInput(format!("outlier fraction must be in [0, 1), got {p}")));
        }
        self.cg.validate()?;
        let target = (n as f64 * p).floor() as usize;
        if target + d + 1 > n {
            return Err(Error::InsufficientData(format!(
                "removing {target} of {n} rows leaves fewer than d + 1 = {} rows",
                d + 1
            )));
        }
        Ok(target)
    }
}

/// One pass of the removal loop. Index sets hold row labels.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundLog {
    pub support_removed: Vec<usize>,
    pub remedied: Vec<usize>,
    /// Optimum before the support was deleted.
    pub delta_before: f64,
    /// Optimum after the deletion (and after remedy, which leaves it unchanged).
    pub delta_after: f64,
}

impl RoundLog {
    pub fn net_removed(&self) -> usize {
        self.support_removed.len() - self.remedied.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemovalReport {
    pub rounds: Vec<RoundLog>,
    /// Labels kept, ascending.
    pub kept: Vec<usize>,
    /// Labels removed, ascending.
    pub removed: Vec<usize>,
    /// Least-squares refit on the kept rows.
    pub final_beta: Coefficients,
    /// Minimax optimum on the kept rows.
    pub final_delta: f64,
    /// `floor(n p)`.
    pub target: usize,
    /// The last support set pushed the removed count past the target.
    pub overshoot: bool,
}

impl RemovalReport {
    /// Writes `round,delta_before,delta_after,n_removed,n_remedied` rows and a
    /// closing `kept,<labels separated by spaces>` line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(["round", "delta_before", "delta_after", "n_removed", "n_remedied"])?;
        for (k, r) in self.rounds.iter().enumerate() {
            w.write_record([
                (k + 1).to_string(),
                r.delta_before.to_string(),
                r.delta_after.to_string(),
                r.support_removed.len().to_string(),
                r.remedied.len().to_string(),
            ])?;
        }
        let kept: Vec<String> = self.kept.iter().map(ToString::to_string).collect();
        w.write_record(["kept".to_string(), kept.join(" ")])?;
        w.flush()?;
        Ok(())
    }
}

fn solve(problem: &RegressionProblem, config: &RemovalConfig) -> Result<MinimaxSolution> {
    match config.solver {
        Solver::Full => solve_full_with(problem, config.cg.tolerances()),
        Solver::ColumnGeneration => solve_cg(problem, &config.cg),
    }
}

/// Removes roughly `floor(n p)` rows with the largest minimax residuals.
pub fn remove_outliers(problem: &RegressionProblem, config: &RemovalConfig) -> Result<RemovalReport> {
    let n = problem.len();
    let d = problem.dim();
    let target = config.target(n, d)?;
    if target > 0 && n < d + 2 {
        return Err(Error::InsufficientData(format!("need at least d + 2 = {} rows", d + 2)));
    }

    // positions into `problem`
    let mut kept: BTreeSet<usize> = (0..n).collect();
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    let mut rounds = Vec::new();
    let mut count = 0;
    let mut last_delta = None;

    while count < target {
        let current: Vec<usize> = kept.iter().copied().collect();
        let sub = problem.subset(&current)?;
        let before = solve(&sub, config)?;
        let support: Vec<usize> = before
            .support
            .iter()
            .map(|&label| problem.position_of(label).expect("label from subset"))
            .collect();
        if support.len() >= current.len() {
            return Err(Error::InsufficientData(
                "support set covers every remaining row".into(),
            ));
        }
        if current.len() - support.len() < d + 1 {
            return Err(Error::InsufficientData(format!(
                "deleting the support leaves fewer than d + 1 = {} rows",
                d + 1
            )));
        }
        for p in &support {
            kept.remove(p);
        }

        let remaining: Vec<usize> = kept.iter().copied().collect();
        let after = solve(&problem.subset(&remaining)?, config)?;
        // strict, modulo the tolerance that defines the support itself
        let tol = config.cg.tolerances();
        let cut = after.delta_opt * (1.0 - tol.rel) - tol.abs;
        let remedied: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&p| problem.residual(p, &after.beta).abs() < cut)
            .collect();
        if remedied.len() == support.len() {
            return Err(Error::NumericalFailure(
                "remedy step restored the entire support set".into(),
            ));
        }
        for &p in &remedied {
            kept.insert(p);
        }
        for p in support.iter().filter(|p| !remedied.contains(p)) {
            removed.insert(*p);
        }
        count += match config.counting {
            RemovalCounting::Net => support.len() - remedied.len(),
            RemovalCounting::Gross => support.len(),
        };
        let label = |p: &usize| problem.labels()[*p];
        let mut support_removed: Vec<usize> = support.iter().map(label).collect();
        support_removed.sort_unstable();
        let mut remedied: Vec<usize> = remedied.iter().map(label).collect();
        remedied.sort_unstable();
        rounds.push(RoundLog {
            support_removed,
            remedied,
            delta_before: before.delta_opt,
            delta_after: after.delta_opt,
        });
        last_delta = Some(after.delta_opt);
    }

    let kept_pos: Vec<usize> = kept.iter().copied().collect();
    let kept_problem = problem.subset(&kept_pos)?;
    let final_beta = least_squares_auto(&kept_problem)?;
    let final_delta = match last_delta {
        Some(delta) => delta,
        None => solve(&kept_problem, config)?.delta_opt,
    };
    let mut kept: Vec<usize> = kept_pos.iter().map(|&p| problem.labels()[p]).collect();
    kept.sort_unstable();
    let mut removed: Vec<usize> = removed.iter().map(|&p| problem.labels()[p]).collect();
    removed.sort_unstable();
    Ok(RemovalReport {
        rounds,
        kept,
        removed,
        final_beta,
        final_delta,
        target,
        overshoot: count > target,
    })
}
