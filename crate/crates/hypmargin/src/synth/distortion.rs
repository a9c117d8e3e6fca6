use crate::error::{Error, Result};
use crate::geometry::{lorentz_distance, LorentzPoint};

/// Multiplicative distortion of an embedding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionReport {
    /// `max r / min r` over pairs, with `r = embedded / true`. Infinite when
    /// two points at positive true distance coincide.
    pub c_m: f64,
    /// The most contracted pair.
    pub worst_pair: (usize, usize),
    /// Set when some pair collapsed to a single point.
    pub degenerate: bool,
}

/// Distortion between two square distance matrices over the same index set.
///
/// Uniform rescaling of the embedding does not change the result, so no
/// contractive normalisation is needed up front.
pub fn measure_distortion(truth: &[Vec<f64>], embedded: &[Vec<f64>]) -> Result<DistortionReport> {
    let n = truth.len();
    if embedded.len() != n || truth.iter().chain(embedded).any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: embedded.len() });
    }
    if n < 2 {
        return Err(Error::InvalidArgument("distortion needs at least two points".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut worst = (0, 1);
    for i in 0..n {
        for j in i + 1..n {
            let t = truth[i][j];
            if t <= 0.0 {
                continue;
            }
            let r = embedded[i][j] / t;
            if r < lo {
                lo = r;
                worst = (i, j);
            }
            hi = hi.max(r);
        }
    }
    if lo == 0.0 {
        return Ok(DistortionReport { c_m: f64::INFINITY, worst_pair: worst, degenerate: true });
    }
    Ok(DistortionReport { c_m: hi / lo, worst_pair: worst, degenerate: false })
}

pub fn lorentz_distance_matrix(points: &[LorentzPoint]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            // Products a hair below 1 (round-off) clamp to zero distance.
            let d = lorentz_distance(&points[i], &points[j]).unwrap_or(0.0);
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    out
}

pub fn euclidean_distance_matrix(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| points.iter().map(|b| a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()).collect())
        .collect()
}
