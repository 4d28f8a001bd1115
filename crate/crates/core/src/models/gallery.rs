use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::{least_squares_auto, RegressionProblem};
use crate::removal::{remove_outliers, RemovalConfig};

use super::seeded_rng;

/// Per-class template vectors. Classes are kept sorted by label.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassGallery {
    classes: Vec<(String, Vec<Vec<f64>>)>,
    len: usize,
}

impl ClassGallery {
    pub fn new(mut classes: Vec<(String, Vec<Vec<f64>>)>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidInput("gallery has no classes".into()));
        }
        classes.sort_by(|a, b| a.0.cmp(&b.0));
        if classes.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("duplicate class label".into()));
        }
        let len = classes[0].1.first().map_or(0, Vec::len);
        for (label, templates) in &classes {
            if templates.is_empty() {
                return Err(Error::InvalidInput(format!("class {label} has no templates")));
            }
            if templates.iter().any(|t| t.len() != len) {
                return Err(Error::DimensionMismatch(format!(
                    "class {label} has templates of a different length than {len}"
                )));
            }
            if templates.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("class {label} has non-finite values")));
            }
        }
        if len == 0 {
            return Err(Error::InvalidInput("templates are empty".into()));
        }
        Ok(Self { classes, len })
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.classes.iter().map(|(l, _)| l.as_str())
    }

    pub fn classes(&self) -> &[(String, Vec<Vec<f64>>)] {
        &self.classes
    }

    pub fn template_count(&self) -> usize {
        self.classes.iter().map(|(_, t)| t.len()).sum()
    }

    /// Rows are vector coordinates, columns are the templates of `classes`.
    fn design(&self, classes: &[usize], coords: &[usize], query: &[f64]) -> Result<RegressionProblem> {
        let cols: Vec<&Vec<f64>> = classes.iter().flat_map(|&c| &self.classes[c].1).collect();
        let mut rows = Vec::with_capacity(coords.len() * cols.len());
        for &j in coords {
            rows.extend(cols.iter().map(|t| t[j]));
        }
        let response = coords.iter().map(|&j| query[j]).collect();
        RegressionProblem::with_labels(rows, cols.len(), response, coords.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub label: String,
    /// Least-squares residual norm per class on the surviving coordinates.
    pub residuals: Vec<(String, f64)>,
    /// Coordinates that survived outlier removal.
    pub kept: Vec<usize>,
}

/// Removes outlying coordinates of `query` against all templates at once,
/// then assigns the class whose templates reconstruct the surviving
/// coordinates with the smallest least-squares residual.
pub fn classify_residual(
    gallery: &ClassGallery,
    query: &[f64],
    config: &RemovalConfig,
) -> Result<Classification> {
    if query.len() != gallery.vector_len() {
        return Err(Error::DimensionMismatch(format!(
            "query has length {}, gallery vectors have length {}",
            query.len(),
            gallery.vector_len()
        )));
    }
    if let Some(j) = query.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: j, col: 0 });
    }
    let all: Vec<usize> = (0..query.len()).collect();
    let target = config.target(query.len(), gallery.template_count())?;
    let kept = if target == 0 {
        all
    } else {
        let every: Vec<usize> = (0..gallery.classes.len()).collect();
        let collaborative = gallery.design(&every, &all, query)?;
        remove_outliers(&collaborative, config)?.kept
    };

    let mut residuals = Vec::with_capacity(gallery.classes.len());
    for (c, (label, _)) in gallery.classes.iter().enumerate() {
        let sub = gallery.design(&[c], &kept, query)?;
        let beta = least_squares_auto(&sub)?;
        let ss: f64 = (0..sub.len()).map(|i| sub.residual(i, &beta).powi(2)).sum();
        residuals.push((label.clone(), ss.sqrt()));
    }
    // first minimum wins, classes are sorted by label
    let best = residuals
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.1 < residuals[b].1 { i } else { b });
    Ok(Classification { label: residuals[best].0.clone(), residuals, kept })
}

/// Synthetic gallery: every template is a shared smooth profile plus a
/// class-specific smooth profile plus a small per-template variation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GallerySpec {
    pub classes: usize,
    pub templates_per_class: usize,
    pub len: usize,
    /// Amplitude of the class-specific component relative to the shared one.
    pub class_spread: f64,
    /// Per-coordinate noise on each template.
    pub template_noise: f64,
    pub seed: u64,
}

impl Default for GallerySpec {
    fn default() -> Self {
        Self {
            classes: 10,
            templates_per_class: 3,
            len: 300,
            class_spread: 0.3,
            template_noise: 0.05,
            seed: 0,
        }
    }
}

/// Sum of a few random low-frequency sinusoids, sampled at `len` points.
fn smooth_profile<R: Rng>(rng: &mut R, len: usize, amplitude: f64) -> Vec<f64> {
    let waves: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(0.5..4.0),
                rng.random_range(0.0..TAU),
                amplitude * rng.random_range(0.3..1.0),
            )
        })
        .collect();
    (0..len)
        .map(|j| {
            let x = j as f64 / len as f64;
            waves.iter().map(|&(f, ph, a)| a * (TAU * f * x + ph).sin()).sum()
        })
        .collect()
}

pub fn gen_gallery(spec: &GallerySpec) -> Result<ClassGallery> {
    if spec.classes == 0 || spec.templates_per_class == 0 || spec.len == 0 {
        return Err(Error::InvalidInput("gallery sizes must be positive".into()));
    }
    let mut rng = seeded_rng(spec.seed);
    let base: Vec<f64> = smooth_profile(&mut rng, spec.len, 0.25).iter().map(|v| v + 0.5).collect();
    let width = spec.classes.to_string().len();
    let classes = (0..spec.classes)
        .map(|c| {
            let identity = smooth_profile(&mut rng, spec.len, spec.class_spread);
            let templates = (0..spec.templates_per_class)
                .map(|_| {
                    let light = 1.0 + 0.1 * rng.sample::<f64, _>(StandardNormal);
                    (0..spec.len)
                        .map(|j| {
                            light * (base[j] + identity[j])
                                + spec.template_noise * rng.sample::<f64, _>(StandardNormal)
                        })
                        .collect()
                })
                .collect();
            (format!("class_{c:0width$}"), templates)
        })
        .collect();
    ClassGallery::new(classes)
}

/// Query generation: a random positive mix of one class's templates with
/// additive noise, then a contiguous block overwritten by uniform clutter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OcclusionSpec {
    pub count: usize,
    /// Fraction of coordinates covered by the occluding block.
    pub fraction: f64,
    /// Occluder values are uniform on `[0, amplitude]`.
    pub amplitude: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for OcclusionSpec {
    fn default() -> Self {
        Self { count: 100, fraction: 0.3, amplitude: 2.0, noise: 0.02, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledQuery {
    pub vector: Vec<f64>,
    pub label: String,
    /// Coordinates overwritten by the occluder.
    pub occluded: Vec<usize>,
}

pub fn gen_queries(gallery: &ClassGallery, spec: &OcclusionSpec) -> Result<Vec<LabeledQuery>> {
    if !(0.0..1.0).contains(&spec.fraction) {
        return Err(Error::InvalidInput("occlusion fraction must be in [0, 1)".into()));
    }
    let mut rng = seeded_rng(spec.seed);
    let len = gallery.vector_len();
    let block = (spec.fraction * len as f64).round() as usize;
    (0..spec.count)
        .map(|q| {
            let c = q % gallery.classes.len();
            let (label, templates) = &gallery.classes[c];
            let weights: Vec<f64> = templates.iter().map(|_| rng.random_range(0.2..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let mut vector: Vec<f64> = (0..len)
                .map(|j| {
                    templates.iter().zip(&weights).map(|(t, w)| t[j] * w / total).sum::<f64>()
                        + spec.noise * rng.sample::<f64, _>(StandardNormal)
                })
                .collect();
            let start = if block < len { rng.random_range(0..=len - block) } else { 0 };
            let occluded: Vec<usize> = (start..start + block).collect();
            for &j in &occluded {
                vector[j] = rng.random_range(0.0..=spec.amplitude);
            }
            Ok(LabeledQuery { vector, label: label.clone(), occluded })
        })
        .collect()
}
