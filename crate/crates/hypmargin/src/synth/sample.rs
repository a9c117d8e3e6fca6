use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Hypothesis, LorentzPoint};
use crate::margin::{decide, Label, LabeledSet};

pub(crate) fn gaussian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

pub(crate) fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v = gaussian(rng, d, 1.0);
        let n = crate::geometry::euclid_norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// Draws `n` labelled points on the upper sheet that a planted unit separator
/// splits with margin at least `gamma`.
///
/// The separator is `(0, u)` with `u` uniform on the sphere. Spatial parts are
/// Gaussian with per-coordinate variance `(x0_cap^2 - 1)/d` and are rejected
/// when `x0 > x0_cap` or when they fall inside the margin band. One sample of
/// each class is placed at `y (wbar*x)` in `[sinh(gamma), 1.05 sinh(gamma))`
/// so the margin is attained, and the whole set is shuffled.
pub fn sample_separable(d: usize, n: usize, gamma: f64, x0_cap: f64, seed: u64) -> Result<(LabeledSet, Hypothesis)> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!("need d >= 2 and n >= 2, got d = {d}, n = {n}")));
    }
    if !(gamma > 0.0) || !(x0_cap > gamma.cosh()) {
        return Err(Error::InvalidArgument(format!(
            "need gamma > 0 and x0_cap > cosh(gamma), got gamma = {gamma}, x0_cap = {x0_cap}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = unit_vector(&mut rng, d);
    let mut wbar = vec![0.0];
    wbar.extend_from_slice(&u);
    let wbar = Hypothesis::new(wbar)?;

    let band = gamma.sinh();
    let max_sq = x0_cap * x0_cap - 1.0;
    let scale = (max_sq / d as f64).sqrt();
    let budget = 10_000 * n;
    let mut attempts = 0;
    let spend = |attempts: &mut usize| -> Result<()> {
        *attempts += 1;
        if *attempts > budget {
            Err(Error::RejectionBudget { attempts: budget })
        } else {
            Ok(())
        }
    };

    let mut points = Vec::with_capacity(n);
    // wbar*x = -<u, v>, so a positive label needs <u, v> negative.
    for sign in [-1.0, 1.0] {
        loop {
            spend(&mut attempts)?;
            let mut v = gaussian(&mut rng, d, scale);
            let along: f64 = v.iter().zip(&u).map(|(a, b)| a * b).sum();
            let target = sign * band * (1.0 + 0.05 * rng.random::<f64>());
            for (vi, ui) in v.iter_mut().zip(&u) {
                *vi += (target - along) * ui;
            }
            let sq: f64 = v.iter().map(|a| a * a).sum();
            if sq <= max_sq {
                points.push(LorentzPoint::lift(&v));
                break;
            }
        }
    }
    while points.len() < n {
        spend(&mut attempts)?;
        let v = gaussian(&mut rng, d, scale);
        let sq: f64 = v.iter().map(|a| a * a).sum();
        let along: f64 = v.iter().zip(&u).map(|(a, b)| a * b).sum();
        if sq <= max_sq && along.abs() >= band {
            points.push(LorentzPoint::lift(&v));
        }
    }
    points.shuffle(&mut rng);
    let labels: Vec<Label> = points.iter().map(|x| decide(&wbar, x)).collect();
    Ok((LabeledSet::new(points, labels, d)?, wbar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margin::{dataset_margin, verify_separator};

    #[test]
    fn generator_contract() {
        for seed in 0..20 {
            let d = 2 + (seed as usize % 9);
            let (s, w) = sample_separable(d, 60, 0.3, 2.0, seed).unwrap();
            assert_eq!(s.len(), 60);
            assert!(verify_separator(&w, &s, 0.3).unwrap());
            let m = dataset_margin(&w, &s).unwrap().margin;
            assert!(m >= 0.3 - 1e-12 && m <= (1.05 * 0.3f64.sinh()).asinh());
            assert!(s.points().iter().all(|p| p.time() <= 2.0 + 1e-12));
            for class in [Label::Pos, Label::Neg] {
                let near = s
                    .iter()
                    .filter(|(_, y)| *y == class)
                    .any(|(x, y)| y.sign() * crate::geometry::mdot(w.as_slice(), x.as_slice()) < 1.05 * 0.3f64.sinh());
                assert!(near);
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = sample_separable(4, 50, 0.3, 2.0, 9).unwrap();
        let b = sample_separable(4, 50, 0.3, 2.0, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_separable(4, 50, 0.3, 2.0, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn slightly_larger_margin_fails_somewhere() {
        let failed = (0..10).any(|seed| {
            let (s, w) = sample_separable(3, 100, 0.3, 2.0, seed).unwrap();
            !verify_separator(&w, &s, 0.31).unwrap()
        });
        assert!(failed);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(sample_separable(1, 10, 0.3, 2.0, 0).is_err());
        assert!(sample_separable(3, 10, 0.3, 1.01, 0).is_err());
    }
}
