//! Independent reference solvers and instance builders shared by the
//! integration tests. Nothing here calls into the simplex code.

#![allow(dead_code)]

use linfit::models::{gen_line_data, ContaminationSpec, Sidedness};
use linfit::RegressionProblem;
use nalgebra::{DMatrix, DVector};

pub struct BruteForce {
    pub beta: Vec<f64>,
    pub delta: f64,
}

fn max_residual(p: &RegressionProblem, beta: &[f64]) -> f64 {
    (0..p.len()).map(|i| p.residual(i, beta).abs()).fold(0.0, f64::max)
}

/// Exhaustive vertex enumeration. An optimal vertex of the minimax LP in
/// `(beta, s)` makes `d + 1` rows satisfy `a_i . beta - y_i = sigma_i s`.
/// Flipping every sign yields the same `beta` with `-s`, so the first sign
/// can be pinned to `+1`.
pub fn brute_force(p: &RegressionProblem) -> BruteForce {
    let d = p.dim();
    let k = d + 1;
    assert!(p.len() >= k, "brute force needs at least d + 1 rows");
    let mut best = BruteForce { beta: vec![0.0; d], delta: f64::INFINITY };
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        for signs in 0u32..(1 << (k - 1)) {
            let m = DMatrix::from_fn(k, k, |r, c| {
                if c < d {
                    p.row(subset[r])[c]
                } else if r == 0 || signs >> (r - 1) & 1 == 0 {
                    -1.0
                } else {
                    1.0
                }
            });
            let rhs = DVector::from_fn(k, |r, _| p.response()[subset[r]]);
            let Some(x) = m.lu().solve(&rhs) else { continue };
            let beta: Vec<f64> = x.iter().take(d).copied().collect();
            if beta.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let delta = max_residual(p, &beta);
            if delta < best.delta {
                best = BruteForce { beta, delta };
            }
        }
        // next k-subset in lexicographic order
        let n = p.len();
        let Some(i) = (0..k).rev().find(|&i| subset[i] < n - k + i) else { break };
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    best
}

/// The contaminated linear model without an intercept column, seventy
/// percent inliers, alternating one- and two-sided contamination by seed.
pub fn random_instance(n: usize, d: usize, seed: u64) -> RegressionProblem {
    let sidedness = if seed.is_multiple_of(2) { Sidedness::OneSided } else { Sidedness::TwoSided };
    let spec = ContaminationSpec { n, k: (7 * n).div_ceil(10), dim: d, sidedness, intercept: false, seed };
    gen_line_data(&spec).expect("valid spec").problem
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}
