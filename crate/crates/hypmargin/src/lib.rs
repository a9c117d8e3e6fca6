//! Large-margin classification in hyperbolic space.
//!
//! Points live on the upper sheet of the hyperboloid `x*x = 1` in
//! `R^{d+1}` with the Minkowski product `u*v = u0 v0 - sum ui vi`. A
//! classifier is a vector `w` with `w*w < 0`; it labels `x` by the sign of
//! `w*x`, and the hyperbolic distance from `x` to its decision boundary is
//! `asinh(|w*x| / sqrt(-w*w))`.
//!
//! - [`geometry`]: Minkowski algebra, hyperboloid points, model maps.
//! - [`margin`]: labels, labelled sets, decisions and margins.
//! - [`loss`]: margin losses and their gradients.
//! - [`perceptron`]: hyperbolic, adversarial and Euclidean perceptrons.
//! - [`cert`]: worst-case perturbations within a geodesic ball.
//! - [`train`]: adversarial and plain gradient descent with CSV traces.
//! - [`synth`]: data generators, tree embeddings and witnesses.
//! - [`cli`]: the experiment runner behind the `hypmargin` binary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cert;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod loss;
pub mod margin;
pub mod perceptron;
pub mod synth;
pub mod train;

pub use error::{Error, Result};
pub use geometry::{Hypothesis, LorentzPoint};
pub use margin::{Label, LabeledSet};
