//! Decision rule, distances to a decision boundary and dataset margins.

use crate::error::{Error, Result};
use crate::geometry::{mdot, Hypothesis, LorentzPoint, Tolerances};

/// A binary label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Label::Pos => 1,
            Label::Neg => -1,
        }
    }

    pub fn from_i32(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Label::Pos),
            -1 => Ok(Label::Neg),
            other => Err(Error::InvalidArgument(format!("label must be -1 or 1, got {other}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Pos => Label::Neg,
            Label::Neg => Label::Pos,
        }
    }
}

/// An immutable labelled sample set on the hyperboloid.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSet {
    points: Vec<LorentzPoint>,
    labels: Vec<Label>,
    dim: usize,
}

impl LabeledSet {
    /// Builds a set of upper-sheet points of a common dimension `dim`.
    pub fn new(points: Vec<LorentzPoint>, labels: Vec<Label>, dim: usize) -> Result<Self> {
        let set = Self::new_double_sheet(points, labels, dim)?;
        if let Some(p) = set.points.iter().find(|p| !p.is_upper()) {
            return Err(Error::LowerSheet { x0: p.time() });
        }
        Ok(set)
    }

    /// Like [`LabeledSet::new`] but accepts points on either sheet.
    pub fn new_double_sheet(points: Vec<LorentzPoint>, labels: Vec<Label>, dim: usize) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: labels.len() });
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        Ok(Self { points, labels, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[LorentzPoint] {
        &self.points
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> (&LorentzPoint, Label) {
        (&self.points[i], self.labels[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LorentzPoint, Label)> {
        self.points.iter().zip(self.labels.iter().copied())
    }
}

/// Minimum signed margin of a classifier over a set and where it occurs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginReport {
    pub margin: f64,
    pub argmin_index: usize,
}

/// `+1` when `w*x > 0`, otherwise `-1` (a zero product counts as negative).
pub fn decide(w: &Hypothesis, x: &LorentzPoint) -> Label {
    decide_raw(w.as_slice(), x.as_slice())
}

pub(crate) fn decide_raw(w: &[f64], x: &[f64]) -> Label {
    if mdot(w, x) > 0.0 {
        Label::Pos
    } else {
        Label::Neg
    }
}

/// Hyperbolic distance from `x` to the boundary `{w*z = 0}`.
pub fn boundary_distance(w: &Hypothesis, x: &LorentzPoint) -> f64 {
    (mdot(w.as_slice(), x.as_slice()) / w.norm()).asinh().abs()
}

/// `asinh(y (w*x) / sqrt(-w*w))`: positive iff `x` is on the side of its label.
pub fn signed_margin(w: &Hypothesis, x: &LorentzPoint, y: Label) -> f64 {
    (y.sign() * mdot(w.as_slice(), x.as_slice()) / w.norm()).asinh()
}

pub fn dataset_margin(w: &Hypothesis, s: &LabeledSet) -> Result<MarginReport> {
    let mut best: Option<MarginReport> = None;
    for (i, (x, y)) in s.iter().enumerate() {
        let m = signed_margin(w, x, y);
        if best.is_none_or(|b| m < b.margin) {
            best = Some(MarginReport { margin: m, argmin_index: i });
        }
    }
    best.ok_or(Error::EmptySet)
}

/// Whether a unit separator `wbar` satisfies `y (wbar*x) >= sinh(gamma)` on every sample.
pub fn verify_separator(wbar: &Hypothesis, s: &LabeledSet, gamma: f64) -> Result<bool> {
    verify_separator_with(wbar, s, gamma, &Tolerances::default())
}

pub fn verify_separator_with(wbar: &Hypothesis, s: &LabeledSet, gamma: f64, tol: &Tolerances) -> Result<bool> {
    let norm = wbar.norm();
    if (norm - 1.0).abs() > tol.unit_norm {
        return Err(Error::Unnormalized { norm });
    }
    let need = gamma.sinh();
    Ok(s.iter().all(|(x, y)| y.sign() * mdot(wbar.as_slice(), x.as_slice()) >= need))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn tilted(eps: f64) -> Hypothesis {
        let e = eps.sinh();
        Hypothesis::new(vec![e, (1.0 + e * e).sqrt(), 0.0]).unwrap()
    }

    #[test]
    fn decide_examples() {
        let w = Hypothesis::axis(2);
        let x = LorentzPoint::new(vec![SQRT2, 1.0, 0.0]).unwrap();
        assert_eq!(decide(&w, &x), Label::Neg);
        assert_eq!(decide(&tilted(0.05), &LorentzPoint::origin(2)), Label::Pos);
        // w*x = 0 exactly
        assert_eq!(decide(&w, &LorentzPoint::origin(2)), Label::Neg);
    }

    #[test]
    fn boundary_distance_examples() {
        let w = Hypothesis::axis(2);
        assert_eq!(boundary_distance(&w, &LorentzPoint::origin(2)), 0.0);
        let w = tilted(0.3);
        let x = LorentzPoint::origin(2);
        assert!((boundary_distance(&w, &x) - 0.3).abs() < 1e-12);
        let w5 = Hypothesis::new(w.as_slice().iter().map(|a| 5.0 * a).collect()).unwrap();
        assert!((boundary_distance(&w5, &x) - boundary_distance(&w, &x)).abs() < 1e-12);
    }

    #[test]
    fn signed_margin_examples() {
        let eps = 0.05;
        let w = tilted(eps);
        let x1 = LorentzPoint::origin(2);
        assert!((signed_margin(&w, &x1, Label::Pos) - eps).abs() < 1e-12);
        assert_eq!(signed_margin(&w, &x1, Label::Neg), -signed_margin(&w, &x1, Label::Pos));
    }

    #[test]
    fn dataset_margin_examples() {
        let eps = 0.05;
        let w = tilted(eps);
        let tol = Tolerances::default();
        let s = LabeledSet::new_double_sheet(
            vec![LorentzPoint::origin(2), LorentzPoint::new_double_sheet(vec![-1.0, 0.0, 0.0], &tol).unwrap()],
            vec![Label::Pos, Label::Neg],
            2,
        )
        .unwrap();
        let r = dataset_margin(&w, &s).unwrap();
        assert!((r.margin - eps).abs() < 1e-12);

        // a point at margin exactly 0.5 from the axis classifier
        let x = LorentzPoint::lift(&[-(0.5f64).sinh(), 0.0]);
        let s = LabeledSet::new(vec![x], vec![Label::Pos], 2).unwrap();
        let r = dataset_margin(&Hypothesis::axis(2), &s).unwrap();
        assert!((r.margin - 0.5).abs() < 1e-12);
        assert_eq!(r.argmin_index, 0);

        let s = LabeledSet::new(vec![], vec![], 2).unwrap();
        assert!(matches!(dataset_margin(&w, &s), Err(Error::EmptySet)));
    }

    #[test]
    fn misclassified_set_has_negative_margin() {
        let x = LorentzPoint::lift(&[1.0, 0.0]);
        let s = LabeledSet::new(vec![x], vec![Label::Pos], 2).unwrap();
        assert!(dataset_margin(&Hypothesis::axis(2), &s).unwrap().margin < 0.0);
    }

    #[test]
    fn verify_separator_cases() {
        let w = Hypothesis::axis(2);
        let x = LorentzPoint::lift(&[-(0.3f64).sinh(), 0.4]);
        let s = LabeledSet::new(vec![x], vec![Label::Pos], 2).unwrap();
        assert!(verify_separator(&w, &s, 0.3 - 1e-9).unwrap());
        assert!(!verify_separator(&w, &s, 0.31).unwrap());
        let empty = LabeledSet::new(vec![], vec![], 2).unwrap();
        assert!(verify_separator(&w, &empty, 5.0).unwrap());
        let big = Hypothesis::new(vec![0.0, 2.0, 0.0]).unwrap();
        assert!(matches!(verify_separator(&big, &s, 0.1), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn set_validation() {
        let tol = Tolerances::default();
        let low = LorentzPoint::new_double_sheet(vec![-1.0, 0.0], &tol).unwrap();
        assert!(LabeledSet::new(vec![low], vec![Label::Pos], 1).is_err());
        let x = LorentzPoint::origin(2);
        assert!(LabeledSet::new(vec![x.clone()], vec![], 2).is_err());
        assert!(LabeledSet::new(vec![x], vec![Label::Pos], 3).is_err());
    }

    proptest! {
        #[test]
        fn margin_properties(
            w in prop::collection::vec(-2.0f64..2.0, 3),
            pts in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 1..20),
            signs in prop::collection::vec(any::<bool>(), 20),
            scale in 0.01f64..100.0,
        ) {
            prop_assume!(mdot(&w, &w) < -1e-3);
            let h = Hypothesis::new(w.clone()).unwrap();
            let hs = Hypothesis::new(w.iter().map(|a| a * scale).collect()).unwrap();
            let points: Vec<_> = pts.iter().map(|v| LorentzPoint::lift(v)).collect();
            let labels: Vec<_> = points.iter().zip(&signs).map(|(_, &b)| if b { Label::Pos } else { Label::Neg }).collect();
            let s = LabeledSet::new(points, labels, 2).unwrap();
            let r = dataset_margin(&h, &s).unwrap();
            let rs = dataset_margin(&hs, &s).unwrap();
            prop_assert_eq!(r.argmin_index, rs.argmin_index);
            prop_assert!((r.margin - rs.margin).abs() <= 1e-12 * r.margin.abs().max(1.0));
            for (x, y) in s.iter() {
                let m = signed_margin(&h, x, y);
                prop_assert!(r.margin <= m);
                prop_assert_eq!(decide(&h, x) == Label::Pos, signed_margin(&h, x, Label::Pos) > 0.0);
            }
        }
    }
}
