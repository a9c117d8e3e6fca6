//! Minkowski algebra on the ambient space R^{d+1}, points of the hyperboloid
//! `x*x = 1`, classifier vectors and the maps between the Lorentz, ball and
//! half-plane models.
//!
//! Index 0 is the time-like coordinate throughout. The product is
//! `u*v = u0 v0 - sum_i ui vi`, so hyperboloid points have `x*x = 1` and valid
//! classifiers have `w*w < 0`.

use crate::error::{Error, Result};

/// Tolerances used by the checked constructors.
///
/// Hyperboloid membership is tested relative to the size of the point:
/// `|x*x - 1| <= manifold * max(1, x0^2)`. Far from the origin `x*x` is a
/// difference of two numbers of size `x0^2`, so an absolute test would reject
/// points that are as exact as floating point allows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance on `x*x = 1`.
    pub manifold: f64,
    /// How far below 1 a product `x*y` may fall before distance errors.
    pub distance_clamp: f64,
    /// Tolerance on `sqrt(-w*w) = 1` for unit separators.
    pub unit_norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { manifold: 1e-9, distance_clamp: 1e-9, unit_norm: 1e-9 }
    }
}

/// Unchecked Minkowski product. Callers guarantee equal lengths.
#[inline]
pub(crate) fn mdot(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let spatial: f64 = u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
    u[0] * v[0] - spatial
}

#[inline]
pub(crate) fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Minkowski product `u0 v0 - sum_{i>=1} ui vi`.
pub fn minkowski(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    Ok(mdot(u, v))
}

/// `(x0, -x1, ..., -xd)`: the Euclidean gradient of `w -> w*x`.
///
/// The decision value `w*x` is the ordinary dot product of `w` with this
/// vector, which is why gradients and perceptron steps use it.
pub fn reflect(x: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().map(|a| -a).collect();
    out[0] = x[0];
    out
}

/// A vector of the ambient space with at least one spatial coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientVector(Vec<f64>);

impl AmbientVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "ambient vectors need d >= 1 spatial coordinates, got length {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(coords))
    }

    /// Spatial dimension `d` (the vector has `d + 1` entries).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn minkowski(&self, other: &AmbientVector) -> Result<f64> {
        minkowski(&self.0, &other.0)
    }

    /// `self * self`.
    pub fn norm_sq(&self) -> f64 {
        mdot(&self.0, &self.0)
    }
}

/// A point of the hyperboloid `x*x = 1`.
///
/// Points built with [`LorentzPoint::new`] lie on the upper sheet. The lower
/// sheet is only reachable through [`LorentzPoint::new_double_sheet`], which
/// exists for constructions that deliberately use both sheets.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzPoint(Vec<f64>);

impl LorentzPoint {
    /// Checked constructor for an upper-sheet point with default tolerances.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(coords, &Tolerances::default())
    }

    pub fn with_tolerance(coords: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        let p = Self::new_double_sheet(coords, tol)?;
        if p.0[0] < 0.0 {
            return Err(Error::LowerSheet { x0: p.0[0] });
        }
        Ok(p)
    }

    /// Checked constructor that accepts either sheet.
    pub fn new_double_sheet(coords: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        let v = AmbientVector::new(coords)?;
        let residual = v.norm_sq() - 1.0;
        let x0 = v.0[0];
        if residual.abs() > tol.manifold * x0.abs().max(1.0).powi(2) {
            return Err(Error::OffManifold { residual });
        }
        Ok(Self(v.0))
    }

    /// Upper-sheet point with the given spatial part: `x0 = sqrt(1 + |v|^2)`.
    pub fn lift(spatial: &[f64]) -> Self {
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        let sq: f64 = spatial.iter().map(|a| a * a).sum();
        coords.push((1.0 + sq).sqrt());
        coords.extend_from_slice(spatial);
        Self(coords)
    }

    /// The apex `(1, 0, ..., 0)`.
    pub fn origin(d: usize) -> Self {
        let mut coords = vec![0.0; d + 1];
        coords[0] = 1.0;
        Self(coords)
    }

    /// Wraps coordinates already known to be on the hyperboloid.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_upper(&self) -> bool {
        self.0[0] > 0.0
    }

    /// The point with every coordinate negated (the other sheet).
    pub fn antipode(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    /// `x*x - 1`.
    pub fn residual(&self) -> f64 {
        mdot(&self.0, &self.0) - 1.0
    }
}

/// A classifier vector `w` with `w*w < 0`; its decision boundary
/// `{x : w*x = 0}` is a geodesic hypersurface.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis(Vec<f64>);

impl Hypothesis {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let v = AmbientVector::new(coords)?;
        let norm_sq = v.norm_sq();
        if norm_sq >= 0.0 {
            return Err(Error::InvalidHypothesis { norm_sq });
        }
        Ok(Self(v.0))
    }

    /// `(0, 1, 0, ..., 0)`, the usual starting classifier.
    pub fn axis(d: usize) -> Self {
        let mut coords = vec![0.0; d + 1];
        coords[1] = 1.0;
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `sqrt(-w*w)`.
    pub fn norm(&self) -> f64 {
        (-mdot(&self.0, &self.0)).sqrt()
    }
}

/// How [`normalize_hypothesis`] rescales a classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizeMode {
    /// Divide by `min(1, sqrt(-w*w))`, so the result has `-w*w >= 1`.
    Perceptron,
    /// Divide by `sqrt(-w*w)`, so the result has `w*w = -1`.
    Full,
}

pub fn normalize_hypothesis(w: &[f64], mode: NormalizeMode) -> Result<Hypothesis> {
    let v = AmbientVector::new(w.to_vec())?;
    let norm_sq = v.norm_sq();
    if norm_sq >= 0.0 {
        return Err(Error::InvalidHypothesis { norm_sq });
    }
    let norm = (-norm_sq).sqrt();
    let scale = match mode {
        NormalizeMode::Perceptron => norm.min(1.0),
        NormalizeMode::Full => norm,
    };
    Ok(Hypothesis(v.0.into_iter().map(|a| a / scale).collect()))
}

/// Geodesic distance `acosh(x*y)`.
pub fn lorentz_distance(x: &LorentzPoint, y: &LorentzPoint) -> Result<f64> {
    lorentz_distance_with(x, y, &Tolerances::default())
}

pub fn lorentz_distance_with(x: &LorentzPoint, y: &LorentzPoint, tol: &Tolerances) -> Result<f64> {
    let p = minkowski(&x.0, &y.0)?;
    if p >= 1.0 {
        return Ok(p.acosh());
    }
    let scale = (x.0[0] * y.0[0]).abs().max(1.0);
    if 1.0 - p <= tol.distance_clamp * scale {
        Ok(0.0)
    } else {
        Err(Error::BelowUnitProduct { product: p })
    }
}

/// `-(u*v) / (sqrt(-u*u) sqrt(-v*v))` for classifier vectors.
///
/// This is the "hyperbolic cosine of the angle" between two classifiers. It
/// is not bounded below by 1 in general: two orthogonal boundaries through
/// the apex, `(0,1,0)` and `(0,0,1)`, give 0.
pub fn cosh_angle(u: &[f64], v: &[f64]) -> Result<f64> {
    let uv = minkowski(u, v)?;
    let uu = mdot(u, u);
    let vv = mdot(v, v);
    if uu >= 0.0 {
        return Err(Error::InvalidHypothesis { norm_sq: uu });
    }
    if vv >= 0.0 {
        return Err(Error::InvalidHypothesis { norm_sq: vv });
    }
    Ok(-uv / ((-uu).sqrt() * (-vv).sqrt()))
}

/// A point of the open unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint(Vec<f64>);

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("ball point needs d >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let r = euclid_norm(&coords);
        if r >= 1.0 {
            return Err(Error::OutsideModel(format!("ball point has norm {r} >= 1")));
        }
        Ok(Self(coords))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// A point of the upper half-plane (second coordinate positive).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlanePoint([f64; 2]);

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite);
        }
        if y <= 0.0 {
            return Err(Error::OutsideModel(format!("half-plane point has height {y} <= 0")));
        }
        Ok(Self([x, y]))
    }

    pub fn coords(&self) -> [f64; 2] {
        self.0
    }
}

pub fn lorentz_to_ball(x: &LorentzPoint) -> BallPoint {
    let denom = 1.0 + x.time();
    BallPoint(x.spatial().iter().map(|a| a / denom).collect())
}

pub fn ball_to_lorentz(b: &BallPoint) -> LorentzPoint {
    let sq: f64 = b.0.iter().map(|a| a * a).sum();
    let denom = 1.0 - sq;
    let mut coords = Vec::with_capacity(b.0.len() + 1);
    coords.push((1.0 + sq) / denom);
    coords.extend(b.0.iter().map(|a| 2.0 * a / denom));
    LorentzPoint(coords)
}

/// Inversion in the circle of radius sqrt(2) centred at (-1, 0). It is its own
/// inverse and swaps the unit disk with the half-plane `{x0 > 0}`.
fn invert_about_minus_one(p: [f64; 2]) -> [f64; 2] {
    let sq = p[0] * p[0] + p[1] * p[1];
    let denom = 1.0 + 2.0 * p[0] + sq;
    [(1.0 - sq) / denom, 2.0 * p[1] / denom]
}

/// Disk to upper half-plane. Only defined for `d = 2`.
pub fn ball_to_half_plane(b: &BallPoint) -> Result<HalfPlanePoint> {
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: b.dim() });
    }
    let [u, v] = invert_about_minus_one([b.0[0], b.0[1]]);
    HalfPlanePoint::new(v, u)
}

pub fn half_plane_to_ball(h: &HalfPlanePoint) -> BallPoint {
    let [x, y] = h.0;
    let [u, v] = invert_about_minus_one([y, x]);
    BallPoint(vec![u, v])
}

pub fn ball_distance(a: &BallPoint, b: &BallPoint) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let diff: f64 = a.0.iter().zip(&b.0).map(|(p, q)| (p - q).powi(2)).sum();
    let na: f64 = a.0.iter().map(|p| p * p).sum();
    let nb: f64 = b.0.iter().map(|p| p * p).sum();
    Ok((1.0 + 2.0 * diff / ((1.0 - na) * (1.0 - nb))).acosh())
}

pub fn half_plane_distance(a: &HalfPlanePoint, b: &HalfPlanePoint) -> f64 {
    let [x0, y0] = a.0;
    let [x1, y1] = b.0;
    (1.0 + ((x1 - x0).powi(2) + (y1 - y0).powi(2)) / (2.0 * y0 * y1)).acosh()
}

/// The three models handled by [`model_map`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Lorentz,
    Ball,
    HalfPlane,
}

/// A point tagged with its model.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelPoint {
    Lorentz(LorentzPoint),
    Ball(BallPoint),
    HalfPlane(HalfPlanePoint),
}

impl ModelPoint {
    pub fn model(&self) -> Model {
        match self {
            ModelPoint::Lorentz(_) => Model::Lorentz,
            ModelPoint::Ball(_) => Model::Ball,
            ModelPoint::HalfPlane(_) => Model::HalfPlane,
        }
    }

    /// Hyperbolic distance between two points of the same model.
    pub fn distance(&self, other: &ModelPoint) -> Result<f64> {
        match (self, other) {
            (ModelPoint::Lorentz(a), ModelPoint::Lorentz(b)) => lorentz_distance(a, b),
            (ModelPoint::Ball(a), ModelPoint::Ball(b)) => ball_distance(a, b),
            (ModelPoint::HalfPlane(a), ModelPoint::HalfPlane(b)) => Ok(half_plane_distance(a, b)),
            _ => Err(Error::InvalidArgument("points belong to different models".into())),
        }
    }
}

/// Maps a point into the target model. Half-plane targets require `d = 2`.
pub fn model_map(p: &ModelPoint, target: Model) -> Result<ModelPoint> {
    let ball = match p {
        ModelPoint::Lorentz(x) if target == Model::Lorentz => return Ok(ModelPoint::Lorentz(x.clone())),
        ModelPoint::Lorentz(x) => lorentz_to_ball(x),
        ModelPoint::Ball(b) => b.clone(),
        ModelPoint::HalfPlane(h) if target == Model::HalfPlane => return Ok(ModelPoint::HalfPlane(*h)),
        ModelPoint::HalfPlane(h) => half_plane_to_ball(h),
    };
    Ok(match target {
        Model::Ball => ModelPoint::Ball(ball),
        Model::Lorentz => ModelPoint::Lorentz(ball_to_lorentz(&ball)),
        Model::HalfPlane => ModelPoint::HalfPlane(ball_to_half_plane(&ball)?),
    })
}
