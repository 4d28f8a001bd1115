use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::{least_squares, RegressionProblem};
use crate::removal::{remove_outliers, RemovalConfig, RemovalReport};

use super::seeded_rng;

/// Points sampled around an ellipse perimeter plus box-uniform outliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseSpec {
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub center: [f64; 2],
    /// Semi-axis lengths before rotation.
    pub semi_axes: [f64; 2],
    /// Rotation of the first semi-axis, radians.
    pub rotation: f64,
    /// Standard deviation of the radial offset applied to inliers.
    pub noise: f64,
    /// Outliers are uniform in the ellipse's bounding box scaled by this.
    pub box_scale: f64,
    pub seed: u64,
}

impl Default for EllipseSpec {
    fn default() -> Self {
        Self {
            n_inliers: 100,
            n_outliers: 30,
            center: [0.0, 0.0],
            semi_axes: [30.0, 20.0],
            rotation: 0.0,
            noise: 1.0,
            box_scale: 1.2,
            seed: 0,
        }
    }
}

impl EllipseSpec {
    /// Half-widths of the axis-aligned box around the ellipse.
    pub fn half_extents(&self) -> [f64; 2] {
        let (s, c) = self.rotation.sin_cos();
        let [a, b] = self.semi_axes;
        [(a * a * c * c + b * b * s * s).sqrt(), (a * a * s * s + b * b * c * c).sqrt()]
    }

    fn validate(&self) -> Result<()> {
        if self.n_inliers < 5 {
            return Err(Error::InvalidInput("a conic needs at least 5 inliers".into()));
        }
        if !(self.semi_axes[0] > 0.0 && self.semi_axes[1] > 0.0) {
            return Err(Error::InvalidInput("semi-axes must be positive".into()));
        }
        if !(self.noise >= 0.0) || !(self.box_scale > 0.0) {
            return Err(Error::InvalidInput("noise must be >= 0 and box scale > 0".into()));
        }
        Ok(())
    }
}

/// 2-D points with optional ground-truth outlier flags.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PointSet {
    pub points: Vec<[f64; 2]>,
    pub outlier: Vec<bool>,
}

pub fn gen_ellipse_data(spec: &EllipseSpec) -> Result<PointSet> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let (s, c) = spec.rotation.sin_cos();
    let [a, b] = spec.semi_axes;
    let [cx, cy] = spec.center;
    let mut set = PointSet::default();
    for _ in 0..spec.n_inliers {
        let t = rng.random_range(0.0..TAU);
        let (u, v) = (a * t.cos(), b * t.sin());
        let r = u.hypot(v);
        let offset = if spec.noise > 0.0 {
            spec.noise * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        let k = (r + offset) / r;
        let (u, v) = (u * k, v * k);
        set.points.push([cx + c * u - s * v, cy + s * u + c * v]);
        set.outlier.push(false);
    }
    let [hx, hy] = spec.half_extents();
    let (hx, hy) = (hx * spec.box_scale, hy * spec.box_scale);
    for _ in 0..spec.n_outliers {
        set.points.push([cx + rng.random_range(-hx..=hx), cy + rng.random_range(-hy..=hy)]);
        set.outlier.push(true);
    }
    Ok(set)
}

/// `a x^2 + b x y + c y^2 + d x + e y = 1` in coordinates shifted by `offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConicCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub offset: [f64; 2],
}

impl ConicCoefficients {
    pub fn is_ellipse(&self) -> bool {
        self.b * self.b - 4.0 * self.a * self.c < 0.0
    }

    /// Conic polynomial minus one at a point in original coordinates.
    pub fn evaluate(&self, p: [f64; 2]) -> f64 {
        let (x, y) = (p[0] - self.offset[0], p[1] - self.offset[1]);
        self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y - 1.0
    }

    /// Stationary point of the conic in original coordinates.
    pub fn center(&self) -> Option<[f64; 2]> {
        let det = 4.0 * self.a * self.c - self.b * self.b;
        if det.abs() < 1e-300 {
            return None;
        }
        let x = (self.b * self.e - 2.0 * self.c * self.d) / det;
        let y = (self.b * self.d - 2.0 * self.a * self.e) / det;
        Some([x + self.offset[0], y + self.offset[1]])
    }
}

#[derive(Clone, Debug)]
pub struct ConicFit {
    pub conic: ConicCoefficients,
    pub report: RemovalReport,
}

/// Centers the points at their centroid, removes outliers from the linear
/// system `[x^2, xy, y^2, x, y] theta = 1`, and refits the survivors by
/// least squares.
pub fn fit_conic(points: &[[f64; 2]], config: &RemovalConfig) -> Result<ConicFit> {
    if points.len() < 5 {
        return Err(Error::InsufficientData("a conic needs at least 5 points".into()));
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let rows: Vec<f64> = points
        .iter()
        .flat_map(|p| {
            let (x, y) = (p[0] - cx, p[1] - cy);
            [x * x, x * y, y * y, x, y]
        })
        .collect();
    let problem = RegressionProblem::new(rows, 5, vec![1.0; points.len()])?;
    let report = remove_outliers(&problem, config)?;
    if report.kept.len() < 5 {
        return Err(Error::DegenerateConic);
    }
    let kept = problem.subset(&report.kept)?;
    let theta = match least_squares(&kept, 0.0) {
        Ok(theta) => theta,
        Err(Error::SingularNormalEquations) => return Err(Error::DegenerateConic),
        Err(e) => return Err(e),
    };
    let conic = ConicCoefficients {
        a: theta[0],
        b: theta[1],
        c: theta[2],
        d: theta[3],
        e: theta[4],
        offset: [cx, cy],
    };
    Ok(ConicFit { conic, report })
}
