//! Perceptrons: hyperbolic, adversarial and a Euclidean baseline.
//!
//! The hyperbolic variants scan the samples in order, stop at the first
//! mistake, update, and restart the scan. A scan that finds no mistake ends
//! the run. One scan counts as one epoch, so `max_epochs` also caps the
//! number of updates.

use crate::cert::{find_adversarial, CertSearch};
use crate::error::{Error, Result};
use crate::geometry::{mdot, reflect, Hypothesis};
use crate::margin::{Label, LabeledSet};

/// How a mistake on `(x, y)` changes the classifier before normalisation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UpdateRule {
    /// `v = w + y (x0, -x1, ..., -xd)`. This is the ordinary perceptron step on
    /// the features whose dot product with `w` is `w*x`, so it inherits the
    /// Euclidean convergence guarantee. Intermediate vectors may fail to be
    /// time-like; they are then used unnormalised.
    #[default]
    Reflected,
    /// `v = w + y x`. Keeps every iterate time-like when the mistake is
    /// strict, but need not converge.
    Ambient,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerceptronConfig {
    pub max_epochs: usize,
    pub rule: UpdateRule,
}

impl Default for PerceptronConfig {
    fn default() -> Self {
        Self { max_epochs: 100_000, rule: UpdateRule::Reflected }
    }
}

/// Outcome of a perceptron run.
#[derive(Clone, Debug, PartialEq)]
pub struct PerceptronResult<W = Hypothesis> {
    pub final_w: W,
    pub mistakes: usize,
    pub epochs: usize,
    pub converged: bool,
    /// `(epoch, sample index)` of every update, in order.
    pub mistake_log: Vec<(usize, usize)>,
    /// Updates after which the classifier was not time-like.
    pub invalid_steps: usize,
}

/// One perceptron step with perceptron-mode normalisation.
///
/// Returns the new vector and whether it is time-like.
pub fn perceptron_step(w: &[f64], x: &[f64], y: Label, rule: UpdateRule) -> (Vec<f64>, bool) {
    let dir = match rule {
        UpdateRule::Reflected => reflect(x),
        UpdateRule::Ambient => x.to_vec(),
    };
    let v: Vec<f64> = w.iter().zip(&dir).map(|(a, b)| a + y.sign() * b).collect();
    let q = -mdot(&v, &v);
    if q > 0.0 {
        let scale = q.sqrt().min(1.0);
        (v.into_iter().map(|a| a / scale).collect(), true)
    } else {
        (v, false)
    }
}

fn run_scan<F>(s: &LabeledSet, w0: &Hypothesis, cfg: &PerceptronConfig, mut pick: F) -> Result<PerceptronResult>
where
    F: FnMut(&[f64], usize) -> Option<Vec<f64>>,
{
    if w0.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: w0.dim() });
    }
    let mut w = w0.as_slice().to_vec();
    let mut log = Vec::new();
    let mut invalid_steps = 0;
    let mut converged = false;
    let mut epochs = 0;
    while epochs < cfg.max_epochs {
        epochs += 1;
        let hit = (0..s.len()).find_map(|i| pick(&w, i).map(|p| (i, p)));
        let Some((i, p)) = hit else {
            converged = true;
            break;
        };
        let y = s.labels()[i];
        let (next, valid) = perceptron_step(&w, &p, y, cfg.rule);
        if !valid {
            if cfg.rule == UpdateRule::Ambient {
                return Err(Error::DegenerateUpdate { index: i });
            }
            invalid_steps += 1;
        }
        w = next;
        log.push((epochs, i));
    }
    let final_w = Hypothesis::new(w)?;
    Ok(PerceptronResult { final_w, mistakes: log.len(), epochs, converged, mistake_log: log, invalid_steps })
}

/// Hyperbolic perceptron. A sample with `y (w*x) <= 0` is a mistake.
pub fn run_hyperbolic_perceptron(s: &LabeledSet, w0: &Hypothesis, cfg: &PerceptronConfig) -> Result<PerceptronResult> {
    run_scan(s, w0, cfg, |w, i| {
        let (x, y) = s.get(i);
        (y.sign() * mdot(w, x.as_slice()) <= 0.0).then(|| x.as_slice().to_vec())
    })
}

/// Adversarial perceptron with budget `alpha`.
///
/// A sample is a mistake when it is misclassified, or when some point within
/// distance `alpha` of it is. Misclassified samples update with the sample
/// itself; the others update with the perturbation found by
/// [`find_adversarial`]. Converging therefore means every sample sits at
/// least `alpha` from the boundary.
pub fn run_adversarial_perceptron(
    s: &LabeledSet,
    alpha: f64,
    w0: &Hypothesis,
    cfg: &PerceptronConfig,
    search: &CertSearch,
) -> Result<PerceptronResult> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("budget must be non-negative, got {alpha}")));
    }
    let reach = alpha.sinh();
    run_scan(s, w0, cfg, |w, i| {
        let (x, y) = s.get(i);
        let score = y.sign() * mdot(w, x.as_slice());
        if score <= 0.0 {
            return Some(x.as_slice().to_vec());
        }
        let q = -mdot(w, w);
        if alpha == 0.0 || q <= 0.0 || score / q.sqrt() > reach * (1.0 + 1e-12) {
            // No flip is possible beyond the budget.
            return None;
        }
        let h = Hypothesis::new(w.to_vec()).ok()?;
        find_adversarial(&h, x, y, alpha, search).map(|a| a.point.as_slice().to_vec())
    })
}

/// Classic Euclidean perceptron `w <- w + y x` over full passes, starting at
/// zero. No bias term: append a constant feature if one is needed.
pub fn run_euclidean_perceptron(
    points: &[Vec<f64>],
    labels: &[Label],
    max_epochs: usize,
) -> Result<PerceptronResult<Vec<f64>>> {
    if points.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: labels.len() });
    }
    let dim = points.first().map_or(0, |p| p.len());
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
    }
    if points.iter().flatten().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut w = vec![0.0; dim];
    let mut log = Vec::new();
    let mut converged = false;
    let mut epochs = 0;
    while epochs < max_epochs {
        epochs += 1;
        let mut clean = true;
        for (i, (x, y)) in points.iter().zip(labels).enumerate() {
            let dot: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            if y.sign() * dot <= 0.0 {
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi += y.sign() * xi;
                }
                log.push((epochs, i));
                clean = false;
            }
        }
        if clean {
            converged = true;
            break;
        }
    }
    Ok(PerceptronResult { final_w: w, mistakes: log.len(), epochs, converged, mistake_log: log, invalid_steps: 0 })
}
