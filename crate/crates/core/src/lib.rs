//! Robust linear regression by L-infinity (minimax) residual minimization.
//!
//! The minimax fit is attained on a support set of at most `d + 1` rows, so
//! [`solve_cg`] finds it by column generation over LP subproblems of `d + 1`
//! or `d + 2` rows instead of solving the `2n`-constraint LP directly
//! ([`solve_full`]). [`remove_outliers`] repeatedly deletes the support set
//! of the current fit, which always contains an outlier while the inliers can
//! be fitted to a strictly smaller level.

pub mod error;
pub mod io;
pub mod lp;
pub mod minimax;
pub mod models;
pub mod problem;
pub mod removal;

pub use error::{Error, Result};
pub use lp::{solve_chebyshev, ChebyshevSolution, ChebyshevSubproblem, LpWorkspace};
pub use minimax::{
    solve_cg, solve_full, solve_full_with, support_set, CgConfig, MinimaxSolution,
    SupportTolerances,
};
pub use problem::{
    least_squares, least_squares_auto, max_abs_residual, residuals, Coefficients,
    RegressionProblem, ResidualKind,
};
pub use removal::{remove_outliers, RemovalConfig, RemovalCounting, RemovalReport, RoundLog, Solver};
