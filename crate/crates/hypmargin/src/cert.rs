//! Closed-form worst-case perturbations inside a hyperbolic ball.
//!
//! For a sample `(x, y)`, a classifier `w` and a budget `alpha`, the problem is
//!
//! ```text
//! maximise   -y (w*z)
//! subject to z*z = 1,  z0 >= 1,  x*z <= cosh(alpha)
//! ```
//!
//! A linear functional of a time-like `w` has no critical point on the
//! hyperboloid, so the maximum sits on the sphere `x*z = cosh(alpha)`. Fixing
//! the time coordinate `z0` of the answer turns the rest into a linear
//! objective on a circle, solved in closed form by [`solve_cert_at`]. The
//! remaining scalar `z0` is searched over the interval where that circle is
//! non-empty.

use crate::error::{Error, Result};
use crate::geometry::{euclid_norm, lorentz_distance, mdot, Hypothesis, LorentzPoint};
use crate::margin::{decide_raw, Label};

/// A perturbed sample.
#[derive(Clone, Debug, PartialEq)]
pub struct AdvExample {
    pub point: LorentzPoint,
    /// Index of the source sample, when known.
    pub source_index: Option<usize>,
    /// Distance actually moved.
    pub budget_used: f64,
    /// Whether the perturbation changes the classifier's decision.
    pub misclassifies: bool,
    /// `-y (w*x~)`.
    pub objective: f64,
}

/// Time coordinates reachable on the budget sphere around `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Z0Interval {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub half_width: f64,
}

/// Settings for the search over `z0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertSearch {
    /// Number of uniformly spaced grid points.
    pub grid_size: usize,
    /// Bracket width at which golden-section refinement stops.
    pub tol: f64,
}

impl Default for CertSearch {
    fn default() -> Self {
        Self { grid_size: 65, tol: 1e-8 }
    }
}

pub fn feasible_z0_interval(x: &LorentzPoint, alpha: f64) -> Z0Interval {
    let x0 = x.time();
    let ca = alpha.cosh();
    let center = x0 * ca;
    let half_width = ((x0 * x0 - 1.0).max(0.0) * (ca * ca - 1.0)).sqrt();
    Z0Interval { lo: (center - half_width).max(1.0), hi: center + half_width, center, half_width }
}

/// A unit vector orthogonal to `u` (itself a unit vector), or `None` when the
/// spatial dimension is 1.
fn orthogonal_unit(u: &[f64]) -> Option<Vec<f64>> {
    if u.len() < 2 {
        return None;
    }
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for k in 0..u.len() {
        let mut e: Vec<f64> = u.iter().map(|a| -u[k] * a).collect();
        e[k] += 1.0;
        let n = euclid_norm(&e);
        if n > best_norm + 1e-12 {
            best_norm = n;
            best = Some(e);
        }
        if n > 0.5 {
            break;
        }
    }
    best.map(|e| e.into_iter().map(|a| a / best_norm).collect())
}

/// Closed-form maximiser for a fixed time coordinate `z0`.
///
/// Returns `None` when no point of the budget sphere has time coordinate `z0`.
/// With `x_check = -x_sp/|x_sp|` and `b = (cosh(alpha) - x0 z0)/(|x_sp| sqrt(z0^2-1))`
/// the answer is `(z0, sqrt(z0^2-1) (b x_check + sqrt(1-b^2) x_perp))`, where
/// `x_perp` is the unit direction of the ascent vector `y w_sp` with its
/// `x_check` component removed.
pub fn solve_cert_at(w: &Hypothesis, x: &LorentzPoint, y: Label, alpha: f64, z0: f64) -> Option<AdvExample> {
    let d = x.dim();
    if !(z0 >= 1.0) || alpha < 0.0 {
        return None;
    }
    let ws = &w.as_slice()[1..];
    let xs = x.spatial();
    let r = euclid_norm(xs);
    let s = (z0 * z0 - 1.0).sqrt();
    let ca = alpha.cosh();

    let wn = euclid_norm(ws);
    let ascent: Vec<f64> = if wn > 0.0 {
        ws.iter().map(|a| y.sign() * a / wn).collect()
    } else {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    };

    let spatial: Vec<f64> = if r == 0.0 {
        // At the apex the sphere is a level set of z0.
        let scale = ca.max(1.0);
        if (z0 - ca).abs() > 1e-9 * scale {
            return None;
        }
        ascent.iter().map(|a| s * a).collect()
    } else if s == 0.0 {
        // z0 = 1 is the apex itself, reachable when x is within the budget.
        if x.time() > ca * (1.0 + 1e-12) {
            return None;
        }
        vec![0.0; d]
    } else {
        let b = (ca - x.time() * z0) / (r * s);
        if b.abs() > 1.0 + 1e-9 {
            return None;
        }
        let b = b.clamp(-1.0, 1.0);
        let check: Vec<f64> = xs.iter().map(|a| -a / r).collect();
        let xi: f64 = ascent.iter().zip(&check).map(|(g, c)| g * c).sum();
        let perp: Vec<f64> = ascent.iter().zip(&check).map(|(g, c)| g - xi * c).collect();
        let zeta = euclid_norm(&perp);
        let perp_unit = if zeta > 1e-12 {
            perp.into_iter().map(|p| p / zeta).collect()
        } else {
            match orthogonal_unit(&check) {
                Some(u) => u,
                None if (1.0 - b.abs()) <= 1e-9 => vec![0.0; d],
                None => return None,
            }
        };
        let t = (1.0 - b * b).sqrt();
        check.iter().zip(&perp_unit).map(|(c, p)| s * (b * c + t * p)).collect()
    };

    let mut coords = Vec::with_capacity(d + 1);
    coords.push(z0);
    coords.extend(spatial);
    let point = LorentzPoint::from_raw(coords);
    let product = mdot(w.as_slice(), point.as_slice());
    let budget_used = lorentz_distance(x, &point).unwrap_or(alpha);
    Some(AdvExample {
        objective: -y.sign() * product,
        misclassifies: decide_raw(w.as_slice(), point.as_slice()) != decide_raw(w.as_slice(), x.as_slice()),
        budget_used,
        point,
        source_index: None,
    })
}

/// The loss-maximising perturbation within the budget, whether or not it
/// changes the decision.
pub fn maximize_cert(
    w: &Hypothesis,
    x: &LorentzPoint,
    y: Label,
    alpha: f64,
    search: &CertSearch,
) -> Option<AdvExample> {
    if !(alpha >= 0.0) {
        return None;
    }
    if alpha == 0.0 {
        return Some(AdvExample {
            point: x.clone(),
            source_index: None,
            budget_used: 0.0,
            misclassifies: false,
            objective: -y.sign() * mdot(w.as_slice(), x.as_slice()),
        });
    }
    let iv = feasible_z0_interval(x, alpha);
    let objective = |z: f64| solve_cert_at(w, x, y, alpha, z).map_or(f64::NEG_INFINITY, |a| a.objective);

    if iv.hi - iv.lo <= 0.0 {
        return solve_cert_at(w, x, y, alpha, iv.lo);
    }
    let n = search.grid_size.max(3);
    let step = (iv.hi - iv.lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|k| if k == n - 1 { iv.hi } else { iv.lo + step * k as f64 }).collect();
    let mut best_k = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (k, &z) in grid.iter().enumerate() {
        let v = objective(z);
        if v > best_v {
            best_v = v;
            best_k = k;
        }
    }
    let mut a = grid[best_k.saturating_sub(1)];
    let mut b = grid[(best_k + 1).min(n - 1)];
    let mut best_z = grid[best_k];

    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut e = a + phi * (b - a);
    let mut fc = objective(c);
    let mut fe = objective(e);
    while b - a > search.tol {
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + phi * (b - a);
            fe = objective(e);
        }
    }
    for (z, v) in [(c, fc), (e, fe)] {
        if v > best_v {
            best_v = v;
            best_z = z;
        }
    }
    solve_cert_at(w, x, y, alpha, best_z)
}

/// The loss-maximising perturbation if it changes the decision, else `None`.
pub fn find_adversarial(
    w: &Hypothesis,
    x: &LorentzPoint,
    y: Label,
    alpha: f64,
    search: &CertSearch,
) -> Option<AdvExample> {
    maximize_cert(w, x, y, alpha, search).filter(|a| a.misclassifies)
}

/// The exact maximiser obtained by walking the geodesic from `x` along the
/// steepest descent direction of `y (w*z)` for distance `alpha`.
///
/// Independent of the `z0` parametrisation; used to cross-check it.
pub fn geodesic_worst_case(w: &Hypothesis, x: &LorentzPoint, y: Label, alpha: f64) -> Result<LorentzPoint> {
    let ws = w.as_slice();
    let xv = x.as_slice();
    let wx = mdot(ws, xv);
    let tangent: Vec<f64> = ws.iter().zip(xv).map(|(a, b)| a - wx * b).collect();
    let tt = -mdot(&tangent, &tangent);
    if tt <= 0.0 {
        return Err(Error::Numerical("degenerate tangent direction".into()));
    }
    let norm = tt.sqrt();
    let (ch, sh) = (alpha.cosh(), alpha.sinh());
    let coords = xv.iter().zip(&tangent).map(|(a, t)| ch * a + y.sign() * sh * t / norm).collect();
    Ok(LorentzPoint::from_raw(coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn interval_examples() {
        let x = LorentzPoint::new(vec![SQRT2, 1.0, 0.0]).unwrap();
        let iv = feasible_z0_interval(&x, 0.0);
        assert_eq!(iv.lo, iv.hi);
        assert!((iv.lo - SQRT2).abs() < 1e-15);

        let iv = feasible_z0_interval(&x, 0.5);
        let center = SQRT2 * 0.5f64.cosh();
        assert!((iv.center - center).abs() < 1e-15);
        assert!((iv.half_width - 0.5f64.sinh()).abs() < 1e-15);
        // Reference values quoted to six truncated decimals.
        assert!((iv.center - 1.594703).abs() < 2e-6);
        assert!((iv.lo - 1.073608).abs() < 2e-6);
        assert!((iv.hi - 2.115798).abs() < 2e-6);

        let iv = feasible_z0_interval(&LorentzPoint::origin(3), 0.7);
        assert_eq!(iv.lo, 0.7f64.cosh());
        assert_eq!(iv.hi, 0.7f64.cosh());
    }

    #[test]
    fn b_coefficient_example() {
        let x = LorentzPoint::new(vec![SQRT2, 1.0, 0.0]).unwrap();
        let w = Hypothesis::axis(2);
        let z0 = feasible_z0_interval(&x, 0.5).center;
        let a = solve_cert_at(&w, &x, Label::Pos, 0.5, z0).unwrap();
        // Recover b from the component along x_check = (-1, 0).
        let s = (z0 * z0 - 1.0).sqrt();
        let b = -a.point.spatial()[0] / s;
        let expect = (0.5f64.cosh() - SQRT2 * z0) / s;
        assert!((b - expect).abs() < 1e-12);
        assert!((b + 0.907759).abs() < 1e-6);
    }

    #[test]
    fn solution_lies_on_sphere_when_interior() {
        let x = LorentzPoint::lift(&[0.7, -0.2, 0.4]);
        let w = Hypothesis::new(vec![0.1, 0.5, 1.0, -0.3]).unwrap();
        let alpha = 0.6;
        let iv = feasible_z0_interval(&x, alpha);
        for k in 1..20 {
            let z0 = iv.lo + (iv.hi - iv.lo) * k as f64 / 20.0;
            let a = solve_cert_at(&w, &x, Label::Neg, alpha, z0).unwrap();
            assert!(a.point.residual().abs() < 1e-12);
            let p = mdot(x.as_slice(), a.point.as_slice());
            assert!((p - alpha.cosh()).abs() < 1e-12);
        }
        assert!(solve_cert_at(&w, &x, Label::Neg, alpha, iv.hi + 0.1).is_none());
        assert!(solve_cert_at(&w, &x, Label::Neg, alpha, (iv.lo - 0.05).max(1.0 + 1e-6)).is_none());
    }

    #[test]
    fn apex_uses_ascent_direction() {
        let x = LorentzPoint::origin(2);
        let w = Hypothesis::new(vec![0.0, 0.6, -0.8]).unwrap();
        let a = maximize_cert(&w, &x, Label::Pos, 0.4, &CertSearch::default()).unwrap();
        let want = geodesic_worst_case(&w, &x, Label::Pos, 0.4).unwrap();
        for (p, q) in a.point.as_slice().iter().zip(want.as_slice()) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn parallel_ascent_picks_orthogonal_direction() {
        // ascent direction y*w_sp is parallel to x_check
        let x = LorentzPoint::lift(&[1.0, 0.0]);
        let w = Hypothesis::new(vec![0.0, -1.0, 0.0]).unwrap();
        let iv = feasible_z0_interval(&x, 0.5);
        let z0 = 0.5 * (iv.lo + iv.hi);
        let a = solve_cert_at(&w, &x, Label::Pos, 0.5, z0).unwrap();
        assert!(a.point.residual().abs() < 1e-12);
        assert!((mdot(x.as_slice(), a.point.as_slice()) - 0.5f64.cosh()).abs() < 1e-12);
    }

    #[test]
    fn zero_budget_has_no_adversary() {
        let x = LorentzPoint::lift(&[0.01, 0.0]);
        let w = Hypothesis::axis(2);
        assert!(find_adversarial(&w, &x, Label::Neg, 0.0, &CertSearch::default()).is_none());
        let a = maximize_cert(&w, &x, Label::Neg, 0.0, &CertSearch::default()).unwrap();
        assert_eq!(a.point, x);
        assert!((a.objective - (-0.01)).abs() < 1e-15);
    }

    fn at_distance(dist: f64) -> (Hypothesis, LorentzPoint) {
        // w*x = -x1 for w = (0,1,0), so the boundary distance is asinh(|x1|)
        let w = Hypothesis::axis(2);
        let x = LorentzPoint::lift(&[-dist.sinh(), 0.3]);
        (w, x)
    }

    #[test]
    fn near_point_flips_far_point_does_not() {
        let (w, x) = at_distance(0.2);
        let m = crate::margin::boundary_distance(&w, &x);
        assert!((m - 0.2).abs() < 1e-9, "{m}");
        let a = find_adversarial(&w, &x, Label::Pos, 0.5, &CertSearch::default()).unwrap();
        assert!(a.misclassifies);
        assert!(a.budget_used <= 0.5 + 1e-9);

        let (w, x) = at_distance(2.0);
        assert!(find_adversarial(&w, &x, Label::Pos, 0.5, &CertSearch::default()).is_none());
        let best = geodesic_worst_case(&w, &x, Label::Pos, 0.5).unwrap();
        assert!(mdot(w.as_slice(), best.as_slice()) > 0.0);
    }

    proptest! {
        #[test]
        fn matches_geodesic_closed_form(
            v in prop::collection::vec(-2.0f64..2.0, 3),
            w in prop::collection::vec(-2.0f64..2.0, 4),
            alpha in 0.01f64..1.5,
            pos in any::<bool>(),
        ) {
            prop_assume!(mdot(&w, &w) < -0.05);
            let w = Hypothesis::new(w).unwrap();
            let x = LorentzPoint::lift(&v);
            let y = if pos { Label::Pos } else { Label::Neg };
            let a = maximize_cert(&w, &x, y, alpha, &CertSearch::default()).unwrap();
            let g = geodesic_worst_case(&w, &x, y, alpha).unwrap();
            let best = -y.sign() * mdot(w.as_slice(), g.as_slice());
            let scale = 1.0 + best.abs();
            prop_assert!(a.objective >= best - 1e-7 * scale, "{} vs {}", a.objective, best);
            prop_assert!(a.objective <= best + 1e-9 * scale);
            prop_assert!(a.point.residual().abs() <= 1e-9 * a.point.time().powi(2));
            prop_assert!(mdot(x.as_slice(), a.point.as_slice()) <= alpha.cosh() + 1e-9 * scale);
        }

        #[test]
        fn objective_grows_with_budget(
            v in prop::collection::vec(-1.5f64..1.5, 2),
            w in prop::collection::vec(-2.0f64..2.0, 3),
            a1 in 0.01f64..1.0,
            a2 in 0.01f64..1.0,
        ) {
            prop_assume!(mdot(&w, &w) < -0.05);
            let w = Hypothesis::new(w).unwrap();
            let x = LorentzPoint::lift(&v);
            let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let s = CertSearch::default();
            let f_lo = maximize_cert(&w, &x, Label::Pos, lo, &s).unwrap().objective;
            let f_hi = maximize_cert(&w, &x, Label::Pos, hi, &s).unwrap().objective;
            prop_assert!(f_hi >= f_lo - 1e-9 * (1.0 + f_lo.abs()));
        }
    }
}
