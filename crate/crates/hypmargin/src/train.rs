//! Gradient-descent training: adversarial mini-batch GD and a plain
//! full-batch baseline, with step sizes derived from the problem constants.
//!
//! Both trainers renormalise to `w*w = -1` after every step and record one
//! [`TraceRow`] per iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cert::{find_adversarial, CertSearch};
use crate::error::{Error, Result};
use crate::geometry::{euclid_norm, mdot, normalize_hypothesis, Hypothesis, NormalizeMode};
use crate::loss::{grad_raw, LossKind};
use crate::margin::{dataset_margin, LabeledSet};
use crate::perceptron::{run_hyperbolic_perceptron, PerceptronConfig};

/// Loss selection. A logistic loss without a radius gets one estimated from
/// the data (see [`estimate_radius`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LossChoice {
    Hinge,
    Square,
    Logistic { radius: Option<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSize {
    Fixed(f64),
    /// [`default_step_size`] evaluated on the training set.
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub loss: LossChoice,
    /// Perturbation budget.
    pub alpha: f64,
    pub step: StepSize,
    /// Safety factor in `(0, 1)` for the automatic step size.
    pub c: f64,
    /// Mini-batch size; `None` means `min(n, 32)`.
    pub batch: Option<usize>,
    pub iterations: usize,
    pub seed: u64,
    /// Smoothness constant of the loss.
    pub beta: f64,
    /// Cap on the classifier norm used when estimating the logistic radius.
    pub radius_cap: f64,
    /// Margin used by the automatic step size. Estimated with a perceptron
    /// run when absent.
    pub gamma: Option<f64>,
    pub search: CertSearch,
    /// Starting classifier; `None` means `(0, 1, 0, ..., 0)`.
    pub w0: Option<Hypothesis>,
    /// Keep every iterate and applied gradient in the trace.
    pub keep_iterates: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss: LossChoice::Logistic { radius: None },
            alpha: 0.0,
            step: StepSize::Auto,
            c: 0.5,
            batch: None,
            iterations: 1000,
            seed: 0,
            beta: 1.0,
            radius_cap: 10.0,
            gamma: None,
            search: CertSearch::default(),
            w0: None,
            keep_iterates: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be a finite non-negative number, got {}", self.alpha));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return bad(format!("c must lie in (0, 1), got {}", self.c));
        }
        if self.batch == Some(0) {
            return bad("batch size must be at least 1".into());
        }
        if !(self.beta > 0.0) || !(self.radius_cap > 0.0) {
            return bad("beta and radius cap must be positive".into());
        }
        if let StepSize::Fixed(eta) = self.step {
            if !(eta > 0.0) || !eta.is_finite() {
                return bad(format!("step size must be positive, got {eta}"));
            }
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0) {
                return bad(format!("gamma must be positive, got {g}"));
            }
        }
        if let LossChoice::Logistic { radius: Some(r) } = self.loss {
            if !(r > 0.0) {
                return bad(format!("logistic radius must be positive, got {r}"));
            }
        }
        Ok(())
    }
}

/// One iteration of a training run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    /// Mean loss on the clean samples.
    pub clean_loss: f64,
    /// Mean worst-case loss over the budget ball of each sample.
    pub robust_loss: f64,
    /// Dataset margin of the current classifier on the clean samples.
    pub margin: f64,
    pub eta: f64,
    /// Number of perturbed samples used in this step.
    pub adv_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrace {
    pub rows: Vec<TraceRow>,
    pub final_w: Hypothesis,
    /// Total number of perturbed samples generated over the run.
    pub pool_size: usize,
    pub loss: LossKind,
    pub eta: f64,
    /// `w_0, w_1, ..., w_T` when requested.
    pub iterates: Vec<Hypothesis>,
    /// Averaged gradient applied at each step when requested.
    pub gradients: Vec<Vec<f64>>,
}

/// `c * 2 sinh^2(gamma) / (beta sigma_max^2 cosh^2(alpha) R^2)`.
pub fn default_step_size(gamma: f64, alpha: f64, beta: f64, sigma_max: f64, radius: f64, c: f64) -> f64 {
    c * 2.0 * gamma.sinh().powi(2) / (beta * sigma_max.powi(2) * alpha.cosh().powi(2) * radius.powi(2))
}

/// Square root of the largest eigenvalue of `(1/n) sum x x^T`, by power
/// iteration.
pub fn estimate_sigma_max<'a, I>(points: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let pts: Vec<&[f64]> = points.into_iter().collect();
    let Some(first) = pts.first() else {
        return Err(Error::EmptySet);
    };
    let k = first.len();
    if let Some(p) = pts.iter().find(|p| p.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, found: p.len() });
    }
    let n = pts.len() as f64;
    let mut m = vec![0.0; k * k];
    for p in &pts {
        for i in 0..k {
            for j in 0..k {
                m[i * k + j] += p[i] * p[j] / n;
            }
        }
    }
    let mut v: Vec<f64> = (0..k).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..100_000 {
        let mv: Vec<f64> = (0..k).map(|i| (0..k).map(|j| m[i * k + j] * v[j]).sum()).collect();
        let norm = euclid_norm(&mv);
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = norm / euclid_norm(&v);
        v = mv.into_iter().map(|a| a / norm).collect();
        let done = (next - lambda).abs() <= 1e-12 * next;
        lambda = next;
        if done {
            break;
        }
    }
    Ok(lambda.sqrt())
}

/// Largest Euclidean sample norm, inflated by `cosh(alpha)`, times the
/// classifier norm cap.
pub fn estimate_radius(s: &LabeledSet, alpha: f64, radius_cap: f64) -> f64 {
    let rx = s.points().iter().map(|p| euclid_norm(p.as_slice())).fold(0.0, f64::max);
    rx * alpha.cosh() * radius_cap
}

fn resolve_loss(s: &LabeledSet, cfg: &TrainConfig) -> LossKind {
    match cfg.loss {
        LossChoice::Hinge => LossKind::HyperbolicHinge,
        LossChoice::Square => LossKind::SmoothedSquare,
        LossChoice::Logistic { radius: Some(r) } => LossKind::HyperbolicLogistic { radius: r },
        LossChoice::Logistic { radius: None } => {
            LossKind::HyperbolicLogistic { radius: estimate_radius(s, cfg.alpha, cfg.radius_cap) }
        }
    }
}

fn resolve_eta(s: &LabeledSet, cfg: &TrainConfig, loss: LossKind) -> Result<f64> {
    match cfg.step {
        StepSize::Fixed(eta) => Ok(eta),
        StepSize::Auto => {
            let gamma = match cfg.gamma {
                Some(g) => g,
                None => estimate_gamma(s)?,
            };
            let sigma = estimate_sigma_max(s.points().iter().map(|p| p.as_slice()))?;
            let radius = match loss {
                LossKind::HyperbolicLogistic { radius } => radius,
                _ => estimate_radius(s, cfg.alpha, cfg.radius_cap),
            };
            Ok(default_step_size(gamma, cfg.alpha, cfg.beta, sigma, radius, cfg.c))
        }
    }
}

/// Margin of the separator found by a perceptron run.
pub fn estimate_gamma(s: &LabeledSet) -> Result<f64> {
    let start = Hypothesis::axis(s.dim());
    let cfg = PerceptronConfig { max_epochs: 100_000, ..PerceptronConfig::default() };
    let r = run_hyperbolic_perceptron(s, &start, &cfg)?;
    let m = dataset_margin(&r.final_w, s)?.margin;
    if !r.converged || !(m > 0.0) {
        return Err(Error::Numerical("could not estimate a positive margin for the step size".into()));
    }
    Ok(m)
}

/// Mean clean loss and mean worst-case loss over the budget ball.
///
/// The worst case of a non-increasing loss sits at the minimum of
/// `y (w*z)` over the ball, which is `sqrt(-w*w) sinh(m - alpha)` with `m`
/// the signed margin of the sample.
fn losses(s: &LabeledSet, w: &Hypothesis, loss: LossKind, alpha: f64) -> (f64, f64) {
    let norm = w.norm();
    let n = s.len() as f64;
    let mut clean = 0.0;
    let mut robust = 0.0;
    for (x, y) in s.iter() {
        let score = y.sign() * mdot(w.as_slice(), x.as_slice());
        clean += loss.value(score);
        let m = (score / norm).asinh();
        robust += loss.value(norm * (m - alpha).sinh());
    }
    (clean / n, robust / n)
}

fn start(s: &LabeledSet, cfg: &TrainConfig) -> Result<Hypothesis> {
    cfg.validate()?;
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let w0 = cfg.w0.clone().unwrap_or_else(|| Hypothesis::axis(s.dim()));
    if w0.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: w0.dim() });
    }
    normalize_hypothesis(w0.as_slice(), NormalizeMode::Full)
}

fn apply_step(w: &Hypothesis, grad: &[f64], eta: f64, iter: usize) -> Result<Hypothesis> {
    let v: Vec<f64> = w.as_slice().iter().zip(grad).map(|(a, g)| a - eta * g).collect();
    let q = -mdot(&v, &v);
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Numerical(format!("step {iter} left the classifier non-time-like (w*w = {})", -q)));
    }
    let scale = q.sqrt();
    Hypothesis::new(v.into_iter().map(|a| a / scale).collect())
}

fn mean_grad<'a, I>(loss: LossKind, w: &Hypothesis, samples: I, k: usize) -> Vec<f64>
where
    I: IntoIterator<Item = (&'a [f64], crate::margin::Label)>,
{
    let mut g = vec![0.0; k];
    let mut count = 0usize;
    for (x, y) in samples {
        for (gi, di) in g.iter_mut().zip(grad_raw(loss, x, y, w.as_slice())) {
            *gi += di;
        }
        count += 1;
    }
    if count > 0 {
        g.iter_mut().for_each(|a| *a /= count as f64);
    }
    g
}

fn row(
    s: &LabeledSet,
    w: &Hypothesis,
    loss: LossKind,
    alpha: f64,
    iter: usize,
    eta: f64,
    adv: usize,
) -> Result<TraceRow> {
    let (clean_loss, robust_loss) = losses(s, w, loss, alpha);
    let margin = dataset_margin(w, s)?.margin;
    Ok(TraceRow { iter, clean_loss, robust_loss, margin, eta, adv_count: adv })
}

/// Adversarial mini-batch gradient descent.
///
/// Each iteration draws a batch with replacement, perturbs every sample whose
/// decision can be flipped within the budget, and steps along the mean loss
/// gradient at those perturbed samples. When none can be flipped the step
/// uses the clean batch instead, so with `alpha = 0` this is plain
/// mini-batch GD.
pub fn run_adversarial_gd(s: &LabeledSet, cfg: &TrainConfig) -> Result<TrainTrace> {
    let mut w = start(s, cfg)?;
    let loss = resolve_loss(s, cfg);
    let eta = resolve_eta(s, cfg, loss)?;
    let m = cfg.batch.unwrap_or(32).min(s.len()).max(1);
    let k = s.dim() + 1;
    let reach = cfg.alpha.sinh();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.iterations);
    let mut iterates = Vec::new();
    let mut gradients = Vec::new();
    let mut pool_size = 0;
    if cfg.keep_iterates {
        iterates.push(w.clone());
    }
    for t in 1..=cfg.iterations {
        let batch: Vec<usize> = (0..m).map(|_| rng.random_range(0..s.len())).collect();
        let mut adv = Vec::new();
        if cfg.alpha > 0.0 {
            for &i in &batch {
                let (x, y) = s.get(i);
                let score = y.sign() * mdot(w.as_slice(), x.as_slice());
                if score > 0.0 && score <= reach * (1.0 + 1e-12) {
                    if let Some(a) = find_adversarial(&w, x, y, cfg.alpha, &cfg.search) {
                        adv.push((a.point, y));
                    }
                }
            }
        }
        pool_size += adv.len();
        let grad = if adv.is_empty() {
            mean_grad(loss, &w, batch.iter().map(|&i| (s.points()[i].as_slice(), s.labels()[i])), k)
        } else {
            mean_grad(loss, &w, adv.iter().map(|(p, y)| (p.as_slice(), *y)), k)
        };
        w = apply_step(&w, &grad, eta, t)?;
        rows.push(row(s, &w, loss, cfg.alpha, t, eta, adv.len())?);
        if cfg.keep_iterates {
            iterates.push(w.clone());
            gradients.push(grad);
        }
    }
    Ok(TrainTrace { rows, final_w: w, pool_size, loss, eta, iterates, gradients })
}

/// Full-batch gradient descent on the clean loss.
pub fn run_plain_gd(s: &LabeledSet, cfg: &TrainConfig) -> Result<TrainTrace> {
    let mut w = start(s, cfg)?;
    let loss = resolve_loss(s, cfg);
    let eta = resolve_eta(s, cfg, loss)?;
    let k = s.dim() + 1;
    let mut rows = Vec::with_capacity(cfg.iterations);
    let mut iterates = Vec::new();
    let mut gradients = Vec::new();
    if cfg.keep_iterates {
        iterates.push(w.clone());
    }
    for t in 1..=cfg.iterations {
        let grad = mean_grad(loss, &w, s.iter().map(|(x, y)| (x.as_slice(), y)), k);
        w = apply_step(&w, &grad, eta, t)?;
        rows.push(row(s, &w, loss, cfg.alpha, t, eta, 0)?);
        if cfg.keep_iterates {
            iterates.push(w.clone());
            gradients.push(grad);
        }
    }
    Ok(TrainTrace { rows, final_w: w, pool_size: 0, loss, eta, iterates, gradients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LorentzPoint;
    use crate::margin::Label;

    #[test]
    fn step_size_examples() {
        let eta = default_step_size(0.5, 0.0, 1.0, 1.0, 1.0, 0.5);
        assert!((eta - 0.5f64.sinh().powi(2)).abs() < 1e-15);
        assert!((eta - 0.27154).abs() < 1e-5);
        let doubled = default_step_size(0.5, 0.0, 1.0, 1.0, 2.0, 0.5);
        assert!((doubled - eta / 4.0).abs() < 1e-15);
        assert!(default_step_size(0.5, 50.0, 1.0, 1.0, 1.0, 0.5) < 1e-40);
    }

    #[test]
    fn sigma_examples() {
        let p = [1.0, 0.0, 0.0];
        assert!((estimate_sigma_max([&p[..]]).unwrap() - 1.0).abs() < 1e-12);
        let pts = [[1.2, 0.3, -0.1], [2.0, 1.0, 1.5], [1.5, -1.0, 0.2]];
        let a = estimate_sigma_max(pts.iter().map(|p| &p[..])).unwrap();
        let doubled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| 2.0 * v).collect()).collect();
        let b = estimate_sigma_max(doubled.iter().map(|p| p.as_slice())).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-9 * b);
        assert!(matches!(estimate_sigma_max(std::iter::empty()), Err(Error::EmptySet)));
    }

    fn toy() -> LabeledSet {
        let pts: Vec<_> = (0..40)
            .map(|k| {
                let side = if k % 2 == 0 { -1.0 } else { 1.0 };
                LorentzPoint::lift(&[side * (0.6 + 0.03 * (k % 9) as f64), (k as f64 * 0.9).sin()])
            })
            .collect();
        let labels = (0..40).map(|k| if k % 2 == 0 { Label::Pos } else { Label::Neg }).collect();
        LabeledSet::new(pts, labels, 2).unwrap()
    }

    #[test]
    fn zero_iterations_return_normalized_start() {
        let cfg = TrainConfig {
            iterations: 0,
            w0: Some(Hypothesis::new(vec![0.0, 3.0, 0.0]).unwrap()),
            step: StepSize::Fixed(0.1),
            ..TrainConfig::default()
        };
        let t = run_plain_gd(&toy(), &cfg).unwrap();
        assert!(t.rows.is_empty());
        assert_eq!(t.final_w.as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn traces_have_unit_iterates() {
        let cfg = TrainConfig {
            iterations: 50,
            alpha: 0.3,
            step: StepSize::Fixed(2.0),
            keep_iterates: true,
            w0: Some(Hypothesis::new(vec![0.2, 0.3, 1.0]).unwrap()),
            ..TrainConfig::default()
        };
        let t = run_adversarial_gd(&toy(), &cfg).unwrap();
        assert_eq!(t.rows.len(), 50);
        assert_eq!(t.iterates.len(), 51);
        for w in &t.iterates {
            assert!((mdot(w.as_slice(), w.as_slice()) + 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_budget_matches_mini_batch_descent() {
        let s = toy();
        let cfg = TrainConfig { iterations: 20, step: StepSize::Fixed(1.0), ..TrainConfig::default() };
        let t = run_adversarial_gd(&s, &cfg).unwrap();
        assert!(t.rows.iter().all(|r| r.adv_count == 0));
        assert_eq!(t.pool_size, 0);
        for r in &t.rows {
            assert!((r.clean_loss - r.robust_loss).abs() < 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        let s = toy();
        for cfg in [
            TrainConfig { c: 1.0, ..TrainConfig::default() },
            TrainConfig { batch: Some(0), ..TrainConfig::default() },
            TrainConfig { alpha: -0.1, ..TrainConfig::default() },
            TrainConfig { step: StepSize::Fixed(0.0), ..TrainConfig::default() },
        ] {
            assert!(matches!(run_plain_gd(&s, &cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn oversized_step_is_a_numerical_failure() {
        let cfg = TrainConfig {
            loss: LossChoice::Logistic { radius: Some(0.01) },
            step: StepSize::Fixed(1e6),
            iterations: 5,
            ..TrainConfig::default()
        };
        assert!(matches!(run_plain_gd(&toy(), &cfg), Err(Error::Numerical(_))));
    }
}
