//! L-infinity regression over a whole problem: the direct LP solve and the
//! column-generation solver that only ever touches `d + 1` or `d + 2` rows.

use crate::error::{Error, Result};
use crate::lp::LpWorkspace;
use crate::problem::{least_squares_auto, Coefficients, RegressionProblem, ResidualKind};

/// Slack on the column-generation optimality test `f_max <= t*`.
const CG_OPT_REL: f64 = 1e-9;
const CG_OPT_ABS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxSolution {
    pub beta: Coefficients,
    /// Optimal largest absolute residual.
    pub delta_opt: f64,
    /// Labels of the rows attaining `delta_opt`, ascending.
    pub support: Vec<usize>,
    /// Column-generation iterations (zero for the direct solve).
    pub iterations: usize,
    pub subproblem_solves: usize,
    /// Simplex pivots summed over every LP solved.
    pub pivots: usize,
    /// False only when column generation stopped at its iteration cap.
    pub certified: bool,
}

impl MinimaxSolution {
    /// Optimal level in the requested residual scale. The argmin is shared,
    /// the squared level is the absolute one squared.
    pub fn delta(&self, kind: ResidualKind) -> f64 {
        kind.apply(self.delta_opt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgConfig {
    pub l_max: usize,
    pub support_tol_rel: f64,
    pub support_tol_abs: f64,
}

impl Default for CgConfig {
    fn default() -> Self {
        Self { l_max: 100, support_tol_rel: 1e-7, support_tol_abs: 1e-12 }
    }
}

impl CgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l_max == 0 {
            return Err(Error::InvalidInput("l_max must be at least 1".into()));
        }
        if !(self.support_tol_rel > 0.0) || !(self.support_tol_abs >= 0.0) {
            return Err(Error::InvalidInput("support tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> SupportTolerances {
        SupportTolerances { rel: self.support_tol_rel, abs: self.support_tol_abs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportTolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for SupportTolerances {
    fn default() -> Self {
        CgConfig::default().tolerances()
    }
}

/// Labels of rows with `|a_i . beta - y_i| >= delta (1 - rel) - abs`.
pub fn support_set(
    problem: &RegressionProblem,
    beta: &[f64],
    delta: f64,
    tol: SupportTolerances,
) -> Vec<usize> {
    let cut = delta * (1.0 - tol.rel) - tol.abs;
    let mut s: Vec<usize> = (0..problem.len())
        .filter(|&i| problem.residual(i, beta).abs() >= cut)
        .map(|i| problem.labels()[i])
        .collect();
    s.sort_unstable();
    s
}

fn finish(
    problem: &RegressionProblem,
    beta: Coefficients,
    tol: SupportTolerances,
    iterations: usize,
    subproblem_solves: usize,
    pivots: usize,
    certified: bool,
) -> MinimaxSolution {
    let delta_opt = crate::problem::max_abs_residual(problem, &beta);
    let support = support_set(problem, &beta, delta_opt, tol);
    MinimaxSolution { beta, delta_opt, support, iterations, subproblem_solves, pivots, certified }
}

/// Solves the LP over all `n` rows at once.
pub fn solve_full(problem: &RegressionProblem) -> Result<MinimaxSolution> {
    solve_full_with(problem, SupportTolerances::default())
}

pub fn solve_full_with(problem: &RegressionProblem, tol: SupportTolerances) -> Result<MinimaxSolution> {
    let sol = LpWorkspace::new().solve_problem(problem)?;
    Ok(finish(problem, sol.beta, tol, 0, 1, sol.pivot_count, true))
}

/// Column generation. The active set starts at the `d + 1` rows with the
/// largest least-squares residuals; each iteration adds the most violated
/// remaining row, re-solves on `d + 2` rows and returns the row with the
/// smallest residual to the remaining pool.
///
/// Hitting `l_max` returns [`Error::IterationCapReached`] carrying the best
/// iterate seen (smallest largest residual over all rows).
pub fn solve_cg(problem: &RegressionProblem, config: &CgConfig) -> Result<MinimaxSolution> {
    config.validate()?;
    let n = problem.len();
    let d = problem.dim();
    let tol = config.tolerances();
    if n < d + 1 {
        return solve_full_with(problem, tol);
    }
    let mut ws = LpWorkspace::new();
    if n == d + 1 {
        let all: Vec<usize> = (0..n).collect();
        let sol = ws.solve_rows(problem, &all)?;
        return Ok(finish(problem, sol.beta, tol, 0, 1, sol.pivot_count, true));
    }

    let ls = least_squares_auto(problem)?;
    // largest residuals first, lowest position on ties
    let by_residual = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    let mut order: Vec<(f64, usize)> =
        (0..n).map(|i| (problem.residual(i, &ls).abs(), i)).collect();
    order.select_nth_unstable_by(d, by_residual);
    order[..d + 1].sort_by(by_residual);
    let mut active: Vec<usize> = order[..d + 1].iter().map(|&(_, i)| i).collect();
    let mut in_active = vec![false; n];
    for &i in &active {
        in_active[i] = true;
    }

    let mut sol = ws.solve_rows(problem, &active)?;
    let mut solves = 1;
    let mut pivots = sol.pivot_count;
    let mut best: Option<(f64, Coefficients)> = None;
    let mut iterations = 0;

    while iterations < config.l_max {
        // most violated remaining row, lowest position on ties
        let mut worst = None::<(usize, f64)>;
        for i in (0..n).filter(|&i| !in_active[i]) {
            let r = problem.residual(i, &sol.beta).abs();
            if worst.is_none_or(|(_, w)| r > w) {
                worst = Some((i, r));
            }
        }
        let (im, fm) = worst.expect("n > d + 1 leaves a remaining row");
        let overall = fm.max(sol.level);
        if best.as_ref().is_none_or(|(b, _)| overall < *b) {
            best = Some((overall, sol.beta.clone()));
        }
        if fm <= sol.level * (1.0 + CG_OPT_REL) + CG_OPT_ABS {
            return Ok(finish(problem, sol.beta, tol, iterations, solves, pivots, true));
        }

        active.push(im);
        in_active[im] = true;
        debug_assert!(active.len() == d + 2);
        sol = ws.solve_rows(problem, &active)?;
        solves += 1;
        pivots += sol.pivot_count;

        let (drop_at, _) = active
            .iter()
            .enumerate()
            .map(|(k, &i)| (k, i, problem.residual(i, &sol.beta).abs()))
            .min_by(|a, b| a.2.total_cmp(&b.2).then(a.1.cmp(&b.1)))
            .map(|(k, i, _)| (k, i))
            .expect("active set is nonempty");
        let dropped = active.swap_remove(drop_at);
        in_active[dropped] = false;
        debug_assert!(active.len() == d + 1);
        iterations += 1;
    }

    let (_, beta) = best.expect("at least one iterate");
    let capped = finish(problem, beta, tol, iterations, solves, pivots, false);
    Err(Error::IterationCapReached(Box::new(capped)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(y: &[f64]) -> RegressionProblem {
        RegressionProblem::new(vec![1.0; y.len()], 1, y.to_vec()).unwrap()
    }

    #[test]
    fn full_scalar_midrange() {
        let s = solve_full(&scalar(&[0.0, 1.0, 5.0])).unwrap();
        assert!((s.beta[0] - 2.5).abs() < 1e-12);
        assert!((s.delta_opt - 2.5).abs() < 1e-12);
        assert_eq!(s.support, vec![0, 2]);
        let s = solve_full(&scalar(&[7.5, 7.5])).unwrap();
        assert!((s.beta[0] - 7.5).abs() < 1e-12 && s.delta_opt < 1e-12);
    }

    #[test]
    fn cg_scalar_extremes() {
        let s = solve_cg(&scalar(&[0.0, 1.0, 2.0, 3.0, 10.0]), &CgConfig::default()).unwrap();
        assert!((s.beta[0] - 5.0).abs() < 1e-12);
        assert!((s.delta_opt - 5.0).abs() < 1e-12);
        assert_eq!(s.support, vec![0, 4]);
        assert!(s.certified);
    }

    #[test]
    fn cg_with_d_plus_one_rows_is_one_subproblem() {
        let p = RegressionProblem::new(vec![1.0, 0.0, 1.0, 1.0, 1.0, 2.0], 2, vec![0.0, 3.0, 1.0])
            .unwrap();
        let s = solve_cg(&p, &CgConfig::default()).unwrap();
        assert_eq!(s.iterations, 0);
        assert_eq!(s.subproblem_solves, 1);
        let f = solve_full(&p).unwrap();
        assert!((s.delta_opt - f.delta_opt).abs() < 1e-12);
    }

    #[test]
    fn cg_underdetermined_delegates() {
        let p = RegressionProblem::new(vec![1.0, 2.0], 2, vec![3.0]).unwrap();
        let s = solve_cg(&p, &CgConfig::default()).unwrap();
        assert!(s.delta_opt < 1e-12);
    }

    #[test]
    fn support_set_examples() {
        let tol = SupportTolerances::default();
        assert_eq!(support_set(&scalar(&[0.0, 2.0]), &[1.0], 1.0, tol), vec![0, 1]);
        assert_eq!(support_set(&scalar(&[0.0, 1.0, 2.0]), &[1.0], 1.0, tol), vec![0, 2]);
    }

    #[test]
    fn squared_level_is_square() {
        let s = solve_full(&scalar(&[0.0, 3.0])).unwrap();
        assert!((s.delta(ResidualKind::Squared) - 2.25).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let cfg = CgConfig { l_max: 0, ..CgConfig::default() };
        assert!(matches!(solve_cg(&scalar(&[0.0, 1.0, 2.0]), &cfg), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn cap_returns_uncertified_best() {
        let y: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64).collect();
        let p = RegressionProblem::new(
            (0..50).flat_map(|i| [1.0, i as f64 / 10.0]).collect(),
            2,
            y,
        )
        .unwrap();
        let cfg = CgConfig { l_max: 1, ..CgConfig::default() };
        match solve_cg(&p, &cfg) {
            Err(Error::IterationCapReached(sol)) => {
                assert!(!sol.certified);
                assert_eq!(sol.iterations, 1);
            }
            Ok(sol) => assert!(sol.iterations <= 1),
            Err(e) => panic!("{e}"),
        }
    }
}
