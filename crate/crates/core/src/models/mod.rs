//! Synthetic data generators and the model-fitting pipelines built on
//! outlier removal: lines, conics and residual-based classification.

mod ellipse;
mod gallery;
mod line;

pub use ellipse::{fit_conic, gen_ellipse_data, ConicCoefficients, ConicFit, EllipseSpec, PointSet};
pub use gallery::{
    classify_residual, gen_gallery, gen_queries, ClassGallery, Classification, GallerySpec,
    LabeledQuery, OcclusionSpec,
};
pub use line::{gen_line_data, ContaminationSpec, LabeledProblem, Sidedness};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Chi-squared with five degrees of freedom as a sum of squared normals.
pub(crate) fn chi_squared_5<R: Rng>(rng: &mut R) -> f64 {
    (0..5).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum()
}
