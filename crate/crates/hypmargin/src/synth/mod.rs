//! Data generation and witnesses: separable samples on the hyperboloid, tree
//! embeddings (hyperbolic and Euclidean), distortion measurement and the
//! spherical-code construction that defeats adversarial ERM.

pub mod compare;
pub mod distortion;
pub mod pathology;
pub mod sample;
pub mod sarkar;
pub mod stress;
pub mod tree;

pub use compare::{compare_dimensions, fit_logistic, linear_error, CompareConfig, CompareRow};
pub use distortion::{euclidean_distance_matrix, lorentz_distance_matrix, measure_distortion, DistortionReport};
pub use pathology::{build_erm_pathology, shannon_lower_bound, PathologyChecks, PathologyWitness};
pub use sample::sample_separable;
pub use sarkar::sarkar_embed;
pub use stress::{euclidean_stress_embed, StressEmbedding};
pub use tree::{parse_tree, two_subtree_tree, write_tree, TreeMetric};
