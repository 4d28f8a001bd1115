//! Dense two-phase primal simplex on the condensed (dictionary) tableau.
//!
//! Solves `min c.x  s.t.  G x <= h, x >= 0`. Slack variables are kept
//! implicit: the tableau stores one column per nonbasic variable, so a pivot
//! is a Jordan exchange costing `O(m * n)` for `m` rows and `n` structural
//! variables. Phase one uses a single auxiliary variable subtracted from every
//! row; entering and leaving choices follow Bland's rule.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Reduced costs at or above `-OPT_TOL` count as nonnegative.
const OPT_TOL: f64 = 1e-10;
/// Smallest tableau entry accepted as a pivot.
const PIVOT_TOL: f64 = 1e-9;
/// Entries below this are treated as structurally zero.
const ZERO_TOL: f64 = 1e-12;

/// Result of a simplex run.
#[derive(Debug)]
pub(crate) struct LpOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Reusable tableau storage. Row `m` holds the objective, column `ncols`
/// holds the right-hand side (for the objective row: minus its value).
#[derive(Debug, Default)]
pub(crate) struct Simplex {
    m: usize,
    ncols: usize,
    tab: Vec<f64>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    pivots: usize,
    nvars: usize,
}

impl Simplex {
    #[inline]
    fn stride(&self) -> usize {
        self.ncols + 1
    }

    #[inline]
    fn at(&self, r: usize, k: usize) -> f64 {
        self.tab[r * self.stride() + k]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.tab[r * self.stride() + self.ncols]
    }

    /// Loads `G` (row-major `m x nvars`), `h` and `c`. The aux column is
    /// allocated up front so phase one does not have to reshape the tableau.
    fn load(&mut self, g: &[f64], h: &[f64], c: &[f64]) {
        let m = h.len();
        let n = c.len();
        self.m = m;
        self.nvars = n;
        self.ncols = n + 1;
        let stride = self.stride();
        self.tab.clear();
        self.tab.resize((m + 1) * stride, 0.0);
        for r in 0..m {
            let row = &mut self.tab[r * stride..(r + 1) * stride];
            row[..n].copy_from_slice(&g[r * n..(r + 1) * n]);
            row[n] = -1.0;
            row[n + 1] = h[r];
        }
        self.basic.clear();
        self.basic.extend(n..n + m);
        self.nonbasic.clear();
        self.nonbasic.extend(0..n);
        self.nonbasic.push(self.aux_id());
        self.pivots = 0;
    }

    #[inline]
    fn aux_id(&self) -> usize {
        self.nvars + self.m
    }

    /// Jordan exchange of basic row `r` with nonbasic column `j`.
    fn pivot(&mut self, r: usize, j: usize) -> Result<()> {
        let stride = self.stride();
        let p = self.at(r, j);
        if !p.is_finite() || p.abs() < ZERO_TOL {
            return Err(Error::NumericalFailure(format!("pivot magnitude {p:e} too small")));
        }
        {
            let row = &mut self.tab[r * stride..(r + 1) * stride];
            let inv = 1.0 / p;
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[j] = inv;
        }
        let (head, rest) = self.tab.split_at_mut(r * stride);
        let (prow, tail) = rest.split_at_mut(stride);
        let update = |other: &mut [f64]| {
            for row in other.chunks_exact_mut(stride) {
                let f = row[j];
                if f == 0.0 {
                    continue;
                }
                for (v, &pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[j] = -f * prow[j];
            }
        };
        update(head);
        update(tail);
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[j]);
        self.pivots += 1;
        Ok(())
    }

    /// Bland entering column: lowest variable id with negative reduced cost.
    fn entering(&self) -> Option<usize> {
        let obj = self.m;
        (0..self.ncols)
            .filter(|&k| self.at(obj, k) < -OPT_TOL)
            .min_by_key(|&k| self.nonbasic[k])
    }

    /// Minimum-ratio leaving row for column `j`; ties go to the aux variable
    /// if `prefer_aux`, otherwise to the lowest variable id.
    fn leaving(&self, j: usize, prefer_aux: bool) -> Result<usize> {
        let aux = self.aux_id();
        let mut best: Option<(usize, f64)> = None;
        let mut tiny = false;
        for r in 0..self.m {
            let a = self.at(r, j);
            if a <= PIVOT_TOL {
                tiny |= a > ZERO_TOL;
                continue;
            }
            let ratio = self.rhs(r).max(0.0) / a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                    if tie {
                        let (vb, vr) = (self.basic[br], self.basic[r]);
                        let take = if prefer_aux && (vr == aux || vb == aux) {
                            vr == aux
                        } else {
                            vr < vb
                        };
                        if take { Some((r, ratio)) } else { Some((br, bratio)) }
                    } else if ratio < bratio {
                        Some((r, ratio))
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        match best {
            Some((r, _)) => Ok(r),
            None if tiny => Err(Error::NumericalFailure(
                "entering column has only degenerate pivot candidates".into(),
            )),
            None => Err(Error::Unbounded),
        }
    }

    fn run(&mut self, prefer_aux: bool) -> Result<()> {
        let limit = 100 * (self.m + self.ncols) + 1000;
        while let Some(j) = self.entering() {
            let r = self.leaving(j, prefer_aux)?;
            self.pivot(r, j)?;
            if self.pivots > limit {
                return Err(Error::NumericalFailure("simplex pivot limit exceeded".into()));
            }
        }
        Ok(())
    }

    fn drop_column(&mut self, j: usize) {
        let old = self.stride();
        let rows = self.m + 1;
        let mut w = 0;
        for r in 0..rows {
            for k in 0..old {
                if k != j {
                    self.tab[w] = self.tab[r * old + k];
                    w += 1;
                }
            }
        }
        self.tab.truncate(w);
        self.nonbasic.remove(j);
        self.ncols -= 1;
    }

    fn phase_one(&mut self) -> Result<()> {
        let aux = self.aux_id();
        let aux_col = self.ncols - 1;
        let mut worst: Option<(usize, f64)> = None;
        for r in 0..self.m {
            let h = self.rhs(r);
            if h < 0.0 && worst.is_none_or(|(_, w)| h < w) {
                worst = Some((r, h));
            }
        }
        if let Some((r, _)) = worst {
            // minimize the aux variable
            let obj = self.m * self.stride();
            self.tab[obj + aux_col] = 1.0;
            self.pivot(r, aux_col)?;
            self.run(true)?;
            if -self.rhs(self.m) > 1e-9 * (1.0 + self.max_abs_rhs()) {
                return Err(Error::NumericalFailure("phase one found no feasible point".into()));
            }
            if let Some(r) = self.basic.iter().position(|&v| v == aux) {
                let j = (0..self.ncols)
                    .filter(|&k| self.at(r, k).abs() > PIVOT_TOL)
                    .max_by(|&a, &b| self.at(r, a).abs().total_cmp(&self.at(r, b).abs()))
                    .ok_or_else(|| {
                        Error::NumericalFailure("cannot drive auxiliary variable out".into())
                    })?;
                self.pivot(r, j)?;
            }
        }
        let j = self.nonbasic.iter().position(|&v| v == aux).expect("aux is nonbasic");
        self.drop_column(j);
        Ok(())
    }

    fn max_abs_rhs(&self) -> f64 {
        (0..self.m).fold(0.0, |m, r| m.max(self.rhs(r).abs()))
    }

    /// Rewrites the objective row for cost vector `c` in terms of the current
    /// nonbasic variables.
    fn set_objective(&mut self, c: &[f64]) {
        let stride = self.stride();
        let obj = self.m * stride;
        for k in 0..self.ncols {
            let v = self.nonbasic[k];
            self.tab[obj + k] = if v < self.nvars { c[v] } else { 0.0 };
        }
        self.tab[obj + self.ncols] = 0.0;
        for r in 0..self.m {
            let v = self.basic[r];
            if v >= self.nvars || c[v] == 0.0 {
                continue;
            }
            let cb = c[v];
            for k in 0..stride {
                let t = self.tab[r * stride + k];
                self.tab[obj + k] -= cb * t;
            }
        }
    }

    /// Runs both phases and returns the optimal structural vector.
    pub(crate) fn solve(&mut self, g: &[f64], h: &[f64], c: &[f64]) -> Result<LpOutcome> {
        debug_assert_eq!(g.len(), h.len() * c.len());
        self.load(g, h, c);
        self.phase_one()?;
        self.set_objective(c);
        self.run(false)?;
        let mut x = vec![0.0; self.nvars];
        for r in 0..self.m {
            let v = self.basic[r];
            if v < self.nvars {
                x[v] = self.rhs(r).max(0.0);
            }
        }
        Ok(LpOutcome { x, objective: -self.rhs(self.m), pivots: self.pivots })
    }

    /// All reduced costs nonnegative at the current vertex.
    pub(crate) fn is_optimal(&self) -> bool {
        (0..self.ncols).all(|k| self.at(self.m, k) >= -OPT_TOL)
    }

    /// Plain-text tableau for debugging.
    pub(crate) fn dump(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>8}", "");
        for &v in &self.nonbasic {
            let _ = write!(out, " {:>12}", format!("x{v}"));
        }
        let _ = writeln!(out, " {:>12}", "rhs");
        for r in 0..=self.m {
            let name = if r == self.m { "obj".to_string() } else { format!("x{}", self.basic[r]) };
            let _ = write!(out, "{name:>8}");
            for k in 0..=self.ncols {
                let _ = write!(out, " {:>12.5e}", self.at(r, k));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_max_problem() {
        // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
        let g = [1.0, 0.0, 0.0, 2.0, 3.0, 2.0];
        let h = [4.0, 12.0, 18.0];
        let c = [-3.0, -5.0];
        let out = Simplex::default().solve(&g, &h, &c).unwrap();
        assert!((out.x[0] - 2.0).abs() < 1e-12);
        assert!((out.x[1] - 6.0).abs() < 1e-12);
        assert!((out.objective + 36.0).abs() < 1e-12);
    }

    #[test]
    fn needs_phase_one() {
        // min x + y  s.t. x + y >= 2, x <= 3  ->  objective 2
        let g = [-1.0, -1.0, 1.0, 0.0];
        let h = [-2.0, 3.0];
        let c = [1.0, 1.0];
        let mut s = Simplex::default();
        let out = s.solve(&g, &h, &c).unwrap();
        assert!((out.objective - 2.0).abs() < 1e-12);
        assert!(s.is_optimal());
        assert!(s.dump().contains("obj"));
    }

    #[test]
    fn infeasible_is_reported() {
        // x <= -1 with x >= 0
        let out = Simplex::default().solve(&[1.0], &[-1.0], &[1.0]);
        assert!(matches!(out, Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn unbounded_is_reported() {
        // min -x s.t. -x <= 1
        let out = Simplex::default().solve(&[-1.0], &[1.0], &[-1.0]);
        assert!(matches!(out, Err(Error::Unbounded)));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's cycling example; Bland's rule must terminate at -0.05.
        let g = [
            0.25, -60.0, -0.04, 9.0, //
            0.5, -90.0, -0.02, 3.0, //
            0.0, 0.0, 1.0, 0.0,
        ];
        let h = [0.0, 0.0, 1.0];
        let c = [-0.75, 150.0, -0.02, 6.0];
        let out = Simplex::default().solve(&g, &h, &c).unwrap();
        assert!((out.objective + 0.05).abs() < 1e-12);
    }
}
