use super::distortion::{euclidean_distance_matrix, lorentz_distance_matrix, measure_distortion};
use super::sarkar::sarkar_embed;
use super::stress::euclidean_stress_embed;
use super::tree::TreeMetric;
use crate::error::{Error, Result};
use crate::geometry::{Hypothesis, LorentzPoint};
use crate::margin::{decide, Label, LabeledSet};
use crate::perceptron::{run_hyperbolic_perceptron, PerceptronConfig};

/// Logistic regression with bias by full-batch gradient descent on
/// standardised features. Returns `(weights, bias)` in the original units.
pub fn fit_logistic(points: &[Vec<f64>], labels: &[Label], iters: usize, lr: f64) -> Result<(Vec<f64>, f64)> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    if points.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: labels.len() });
    }
    let n = points.len() as f64;
    let k = points[0].len();
    let mean: Vec<f64> = (0..k).map(|j| points.iter().map(|p| p[j]).sum::<f64>() / n).collect();
    let sd: Vec<f64> = (0..k)
        .map(|j| {
            let v = points.iter().map(|p| (p[j] - mean[j]).powi(2)).sum::<f64>() / n;
            if v > 0.0 {
                v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let z: Vec<Vec<f64>> = points.iter().map(|p| (0..k).map(|j| (p[j] - mean[j]) / sd[j]).collect()).collect();
    let mut w = vec![0.0; k];
    let mut b = 0.0;
    for _ in 0..iters {
        let mut gw = vec![0.0; k];
        let mut gb = 0.0;
        for (x, y) in z.iter().zip(labels) {
            let s = y.sign() * (x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b);
            // d/ds log(1 + e^-s) = -1 / (1 + e^s)
            let g = -y.sign() / (1.0 + s.exp());
            for j in 0..k {
                gw[j] += g * x[j] / n;
            }
            gb += g / n;
        }
        for j in 0..k {
            w[j] -= lr * gw[j];
        }
        b -= lr * gb;
    }
    let weights: Vec<f64> = (0..k).map(|j| w[j] / sd[j]).collect();
    let bias = b - (0..k).map(|j| w[j] * mean[j] / sd[j]).sum::<f64>();
    Ok((weights, bias))
}

pub fn linear_error(points: &[Vec<f64>], labels: &[Label], w: &[f64], b: f64) -> f64 {
    let wrong = points
        .iter()
        .zip(labels)
        .filter(|(x, y)| {
            let s = x.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b;
            (if s > 0.0 { Label::Pos } else { Label::Neg }) != **y
        })
        .count();
    wrong as f64 / points.len().max(1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareConfig {
    pub tau: f64,
    pub stress_iters: usize,
    pub logistic_iters: usize,
    pub logistic_lr: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { tau: 1.0, stress_iters: 3000, logistic_iters: 5000, logistic_lr: 0.5, max_epochs: 100_000, seed: 0 }
    }
}

/// One row of the dimension comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub d: usize,
    /// Training error of the hyperbolic perceptron on the Sarkar layout
    /// (padded with zero coordinates beyond the plane).
    pub hyperbolic_error: f64,
    pub hyperbolic_mistakes: usize,
    pub hyperbolic_converged: bool,
    pub hyperbolic_distortion: f64,
    /// Training error of logistic regression on the stress layout.
    pub euclidean_error: f64,
    pub euclidean_distortion: f64,
    pub stress: f64,
}

/// Leaves labelled `+1` when they hang below the root's first child.
pub fn leaf_labels(tree: &TreeMetric) -> Vec<(usize, Label)> {
    tree.first_subtree_membership()
        .into_iter()
        .map(|(i, first)| (i, if first { Label::Pos } else { Label::Neg }))
        .collect()
}

fn pad(p: &LorentzPoint, d: usize) -> LorentzPoint {
    let mut s = p.spatial().to_vec();
    s.resize(d, 0.0);
    LorentzPoint::lift(&s)
}

/// Classifies the leaves of `tree` after embedding it in each dimension of `dims`.
pub fn compare_dimensions(tree: &TreeMetric, dims: &[usize], cfg: &CompareConfig) -> Result<Vec<CompareRow>> {
    let leaves = leaf_labels(tree);
    if leaves.is_empty() {
        return Err(Error::InvalidArgument("tree has no leaves".into()));
    }
    let idx: Vec<usize> = leaves.iter().map(|(i, _)| *i).collect();
    let labels: Vec<Label> = leaves.iter().map(|(_, y)| *y).collect();
    let full_truth = tree.distance_matrix();
    let planar = sarkar_embed(tree, cfg.tau)?;
    let hyper_distortion = measure_distortion(&full_truth, &lorentz_distance_matrix(&planar))?.c_m;

    let mut rows = Vec::with_capacity(dims.len());
    for &d in dims {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("dimensions must be at least 2, got {d}")));
        }
        let pts: Vec<LorentzPoint> = idx.iter().map(|&i| pad(&planar[i], d)).collect();
        let set = LabeledSet::new(pts, labels.clone(), d)?;
        let pcfg = PerceptronConfig { max_epochs: cfg.max_epochs, ..Default::default() };
        let run = run_hyperbolic_perceptron(&set, &Hypothesis::axis(d), &pcfg)?;
        let wrong = set.iter().filter(|(x, y)| decide(&run.final_w, x) != *y).count();

        let emb = euclidean_stress_embed(&full_truth, d, cfg.stress_iters, cfg.seed)?;
        let coords: Vec<Vec<f64>> = idx.iter().map(|&i| emb.coords[i].clone()).collect();
        let (w, b) = fit_logistic(&coords, &labels, cfg.logistic_iters, cfg.logistic_lr)?;
        let euclid_distortion = measure_distortion(&full_truth, &euclidean_distance_matrix(&emb.coords))?.c_m;
        rows.push(CompareRow {
            d,
            hyperbolic_error: wrong as f64 / set.len() as f64,
            hyperbolic_mistakes: run.mistakes,
            hyperbolic_converged: run.converged,
            hyperbolic_distortion: hyper_distortion,
            euclidean_error: linear_error(&coords, &labels, &w, b),
            euclidean_distortion: euclid_distortion,
            stress: emb.stress,
        });
    }
    Ok(rows)
}
