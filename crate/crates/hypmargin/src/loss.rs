//! Margin losses on the hyperboloid and their gradients in the ambient space.
//!
//! Every loss is a function `f(s)` of the score `s = y (w*x)`. Its gradient
//! with respect to `w` is `f'(s) * y * (x0, -x1, ..., -xd)`.

use std::f64::consts::LN_2;

use crate::geometry::{mdot, reflect, Hypothesis, LorentzPoint};
use crate::margin::Label;

/// The available losses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LossKind {
    /// `max(0, asinh(1) - asinh(s))`.
    HyperbolicHinge,
    /// `(asinh(1) - asinh(s))^2 / 2` for `s <= 1`, zero above.
    SmoothedSquare,
    /// `ln(1 + exp(-asinh(s / 2R)))` with radius `R > 0`.
    HyperbolicLogistic { radius: f64 },
}

impl LossKind {
    /// Loss as a function of the score `s = y (w*x)`.
    pub fn value(self, s: f64) -> f64 {
        let a1 = 1f64.asinh();
        match self {
            LossKind::HyperbolicHinge => (a1 - s.asinh()).max(0.0),
            LossKind::SmoothedSquare => {
                if s <= 1.0 {
                    0.5 * (a1 - s.asinh()).powi(2)
                } else {
                    0.0
                }
            }
            LossKind::HyperbolicLogistic { radius } => softplus(-(s / (2.0 * radius)).asinh()),
        }
    }

    /// Derivative of [`LossKind::value`] in `s`. The hinge uses the zero
    /// subgradient at its kink `s = 1`.
    pub fn slope(self, s: f64) -> f64 {
        let a1 = 1f64.asinh();
        match self {
            LossKind::HyperbolicHinge => {
                if s < 1.0 {
                    -1.0 / (1.0 + s * s).sqrt()
                } else {
                    0.0
                }
            }
            LossKind::SmoothedSquare => {
                if s <= 1.0 {
                    -(a1 - s.asinh()) / (1.0 + s * s).sqrt()
                } else {
                    0.0
                }
            }
            LossKind::HyperbolicLogistic { radius } => {
                let r2 = 2.0 * radius;
                let t = s / r2;
                -sigmoid(-t.asinh()) / (r2 * (1.0 + t * t).sqrt())
            }
        }
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `y (w*x)`.
pub fn score(x: &LorentzPoint, y: Label, w: &Hypothesis) -> f64 {
    y.sign() * mdot(w.as_slice(), x.as_slice())
}

pub fn eval_loss(kind: LossKind, x: &LorentzPoint, y: Label, w: &Hypothesis) -> f64 {
    kind.value(score(x, y, w))
}

pub fn grad_loss(kind: LossKind, x: &LorentzPoint, y: Label, w: &Hypothesis) -> Vec<f64> {
    grad_raw(kind, x.as_slice(), y, w.as_slice())
}

pub(crate) fn grad_raw(kind: LossKind, x: &[f64], y: Label, w: &[f64]) -> Vec<f64> {
    let coef = kind.slope(y.sign() * mdot(w, x)) * y.sign();
    reflect(x).into_iter().map(|r| coef * r).collect()
}

/// Scale-invariant logistic variant `ln(1 + exp(-asinh(y (w*x) / sqrt(-w*w))))`.
///
/// It depends only on the signed margin of the point. Kept for diagnostics;
/// the training code uses [`LossKind::HyperbolicLogistic`].
pub fn margin_logistic(x: &LorentzPoint, y: Label, w: &Hypothesis) -> f64 {
    softplus(-(score(x, y, w) / w.norm()).asinh())
}

/// Upper end of the range `[ln(1 + 1/e), ln(1 + e)]` that bounds the
/// logistic loss whenever `|w*x| <= 2R`.
pub fn logistic_bounded_range() -> (f64, f64) {
    ((-1f64).exp().ln_1p(), 1f64.exp().ln_1p())
}

/// `ln 2`, the logistic loss at a zero score.
pub const LOGISTIC_AT_ZERO: f64 = LN_2;
