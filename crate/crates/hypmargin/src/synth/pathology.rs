use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sample::unit_vector;
use crate::error::{Error, Result};
use crate::geometry::{lorentz_distance, mdot, Hypothesis, LorentzPoint, Tolerances};
use crate::margin::{dataset_margin, decide, Label, LabeledSet};

/// Consecutive rejections after which greedy packing stops.
pub const PACKING_PATIENCE: usize = 10_000;
/// Hard cap on the code size.
pub const MAX_CODE: usize = 100_000;

/// A two-point set together with a long sequence of classifiers, each of
/// which separates it with margin `eps` and classifies every earlier
/// adversarial pair correctly, yet is fooled by the current one.
#[derive(Clone, Debug)]
pub struct PathologyWitness {
    pub set: LabeledSet,
    pub code: Vec<Vec<f64>>,
    pub classifiers: Vec<Hypothesis>,
    /// `(x1_t, x2_t)` perturbations of `(e0, -e0)` for each round.
    pub adversarial: Vec<(LorentzPoint, LorentzPoint)>,
    pub eps: f64,
    pub alpha: f64,
    pub delta: f64,
    pub rho: f64,
    pub theta: f64,
}

/// Outcome of [`PathologyWitness::validate`]. Each flag covers every round.
#[derive(Clone, Debug, PartialEq)]
pub struct PathologyChecks {
    pub code_angles: bool,
    pub unit_classifiers: bool,
    pub cumulative_separation: bool,
    pub current_round_flips: bool,
    pub max_margin_error: f64,
    pub max_distance_error: f64,
    /// Code size against `floor(shannon_lower_bound(d, theta))`.
    pub shannon_floor: f64,
    pub meets_shannon: bool,
}

impl PathologyChecks {
    pub fn all_passed(&self, tol: f64) -> bool {
        self.code_angles
            && self.unit_classifiers
            && self.cumulative_separation
            && self.current_round_flips
            && self.max_margin_error <= tol
            && self.max_distance_error <= tol
            && self.meets_shannon
    }
}

/// `sqrt(2 pi d) cos(theta) / sin(theta)^(d-1)`.
pub fn shannon_lower_bound(d: usize, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!("angle must lie in (0, pi/2), got {theta}")));
    }
    let d = d as f64;
    Ok((2.0 * std::f64::consts::PI * d).sqrt() * theta.cos() / theta.sin().powf(d - 1.0))
}

/// Angle of the spherical code used by [`build_erm_pathology`].
pub fn pathology_angle(eps: f64, alpha: f64, rho: f64) -> f64 {
    let delta = (alpha.cosh().powi(2) - 1.0).sqrt();
    let eps_p = eps.sinh();
    (rho * eps_p * alpha.cosh() / (delta * (1.0 + eps_p * eps_p).sqrt())).acos()
}

/// Greedy random spherical code in `R^d` with pairwise inner products at most `cos_theta`.
pub fn greedy_code(d: usize, cos_theta: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut code: Vec<Vec<f64>> = Vec::new();
    let mut misses = 0;
    while misses < PACKING_PATIENCE && code.len() < MAX_CODE {
        let v = unit_vector(&mut rng, d);
        let ok = code.iter().all(|c| c.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() <= cos_theta);
        if ok {
            code.push(v);
            misses = 0;
        } else {
            misses += 1;
        }
    }
    code
}

/// Builds the witness in spatial dimension `d`.
///
/// The set is `{(e0, +1), (-e0, -1)}` with `-e0` on the lower sheet. For each
/// code vector `v_t`, `w_t = (sinh eps, cosh eps v_t)` and the adversarial
/// pair is `+-(cosh alpha, sinh alpha v_t)`.
pub fn build_erm_pathology(d: usize, eps: f64, alpha: f64, rho: f64, seed: u64) -> Result<PathologyWitness> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("need d >= 2, got {d}")));
    }
    if !(eps > 0.0 && eps < alpha && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < eps < alpha, got eps = {eps}, alpha = {alpha}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < rho < 1, got {rho}")));
    }
    let theta = pathology_angle(eps, alpha, rho);
    let code = greedy_code(d, theta.cos(), seed);
    if code.len() < 2 {
        return Err(Error::PackingStalled { found: code.len() });
    }
    let delta = (alpha.cosh().powi(2) - 1.0).sqrt();
    let eps_p = eps.sinh();
    let tol = Tolerances::default();
    let e0 = LorentzPoint::origin(d);
    let set = LabeledSet::new_double_sheet(vec![e0.clone(), e0.antipode()], vec![Label::Pos, Label::Neg], d)?;

    let mut classifiers = Vec::with_capacity(code.len());
    let mut adversarial = Vec::with_capacity(code.len());
    for v in &code {
        let mut w = vec![eps_p];
        w.extend(v.iter().map(|a| (1.0 + eps_p * eps_p).sqrt() * a));
        classifiers.push(Hypothesis::new(w)?);
        let mut x = vec![(1.0 + delta * delta).sqrt()];
        x.extend(v.iter().map(|a| delta * a));
        let x1 = LorentzPoint::new_double_sheet(x, &tol)?;
        let x2 = x1.antipode();
        adversarial.push((x1, x2));
    }
    Ok(PathologyWitness { set, code, classifiers, adversarial, eps, alpha, delta, rho, theta })
}

impl PathologyWitness {
    pub fn len(&self) -> usize {
        self.classifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifiers.is_empty()
    }

    pub fn validate(&self) -> Result<PathologyChecks> {
        let cos_theta = self.theta.cos();
        let code_angles =
            self.code.iter().enumerate().all(|(i, a)| {
                self.code[..i].iter().all(|b| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>() <= cos_theta)
            });
        let unit_classifiers = self.classifiers.iter().all(|w| (mdot(w.as_slice(), w.as_slice()) + 1.0).abs() <= 1e-12);
        let (x1, y1) = self.set.get(0);
        let (x2, y2) = self.set.get(1);
        let mut cumulative_separation = true;
        let mut current_round_flips = true;
        let mut max_margin_error: f64 = 0.0;
        let mut max_distance_error: f64 = 0.0;
        for (t, w) in self.classifiers.iter().enumerate() {
            cumulative_separation &= decide(w, x1) == y1 && decide(w, x2) == y2;
            for (a1, a2) in &self.adversarial[..t] {
                cumulative_separation &= decide(w, a1) == y1 && decide(w, a2) == y2;
            }
            let (a1, a2) = &self.adversarial[t];
            current_round_flips &= decide(w, a1) != decide(w, x1) && decide(w, a2) != decide(w, x2);
            max_margin_error = max_margin_error.max((dataset_margin(w, &self.set)?.margin - self.eps).abs());
            for (a, x) in [(a1, x1), (a2, x2)] {
                max_distance_error = max_distance_error.max((lorentz_distance(a, x)? - self.alpha).abs());
            }
        }
        let shannon_floor = shannon_lower_bound(self.set.dim(), self.theta)?.floor();
        Ok(PathologyChecks {
            code_angles,
            unit_classifiers,
            cumulative_separation,
            current_round_flips,
            max_margin_error,
            max_distance_error,
            shannon_floor,
            meets_shannon: self.len() as f64 >= shannon_floor,
        })
    }
}
