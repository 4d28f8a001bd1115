//! Instance builders shared by the criterion benches.

use linfit::models::{gen_line_data, ContaminationSpec};
use linfit::{ChebyshevSubproblem, RegressionProblem};

/// Line-size sweep at `d = 2`.
pub const LINE_SIZES: [usize; 6] = [20, 100, 500, 1000, 2000, 10_000];
/// Dimension sweep at `n = 200`.
pub const DIMS: [usize; 5] = [2, 4, 6, 8, 10];

/// The timing workload used by `linfit bench` and the acceptance suite.
pub fn instance(n: usize, d: usize, seed: u64) -> RegressionProblem {
    gen_line_data(&ContaminationSpec::timing(n, d, seed)).expect("valid timing spec").problem
}

/// The first `d + 2` rows of a timing instance, the largest LP column
/// generation ever solves.
pub fn subproblem(d: usize, seed: u64) -> ChebyshevSubproblem {
    let p = instance(d + 2, d, seed);
    ChebyshevSubproblem::new(p).expect("d + 2 rows")
}
